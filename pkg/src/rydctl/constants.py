"""Physical constants and reference values, in one place.

CODATA values are stored to ten significant digits.  Every unit conversion in
the package goes through the names defined here.
"""

import math

# CODATA 2018
C_LIGHT = 299792458.0  # m/s, exact
HBAR = 1.054571817e-34  # J s
PLANCK = 6.62607015e-34  # J s, exact
ELEMENTARY_CHARGE = 1.602176634e-19  # C, exact
EPSILON_0 = 8.854187813e-12  # F/m
BOHR_RADIUS = 5.291772109e-11  # m
HARTREE_CM = 219474.6314  # cm^-1
AU_TIME = 2.418884326e-17  # s
AU_EFIELD = 5.142206747e11  # V/m
RYDBERG_INF_CM = 109737.3157  # cm^-1
ELECTRON_MASS_U = 5.485799091e-4  # u
YB174_MASS_U = 173.9388664  # u

# cm^-1 <-> Hz
C_CM_PER_S = C_LIGHT * 100.0
GHZ_PER_CM = C_CM_PER_S / 1e9
HARTREE_HZ = HARTREE_CM * C_CM_PER_S

EA0 = ELEMENTARY_CHARGE * BOHR_RADIUS  # C m

RYDBERG_YB_CM = RYDBERG_INF_CM * YB174_MASS_U / (YB174_MASS_U + ELECTRON_MASS_U)

# Yb 6s75s 3S1 and the Yb+ 6s-6p1/2 line
E_75_CM = 50421.0303
NU0 = 70.561
F_PLUS_THZ = 811.29150
DELTA_PLUS_GHZ = -0.73
QUANTUM_DEFECT_3S1 = 4.439
D_CORE_EA0 = 2.6829  # reduced 6p1/2-6s1/2 core dipole

# two-level fit of the 6s75s scattering rate
GAMMA_75 = 2 * math.pi * 0.92e9  # rad/s
DIPOLE_75_EA0 = 1.46

# n*^-3 power laws
GAMMA_NSTAR_COEFF = 2 * math.pi * 2.9e14  # rad/s * n*^3
DELTA_PLUS_NSTAR_COEFF = 2.2e14  # Hz * n*^3

# Rydberg drive and detection
OMEGA_R = 2 * math.pi * 0.7e6  # rad/s
CONTROL_DETUNING = -2 * math.pi * 5e9  # rad/s
DETECTION_FIDELITY = 0.994
LIGHT_SHIFT_SCALE = 0.7

# quantum defect matrices of the five-channel fit (upper triangles, row-major)
MU_J0 = ((8.58074e-3, 1.71383e-1), (1.71383e-1, -4.83877e-1))
MU_J1 = (
    (3.68692e-2, -1.37765, 4.42814e-2),
    (-1.37765, -1.35495e-2, -7.41744e-1),
    (4.42814e-2, -7.41744e-1, 1.02353e-2),
)

# measured two-atom populations (gg, gr, rg, rr) at t_g and 2 t_g
POPS_TG = (0.014, 0.487, 0.494, 0.005)
POPS_2TG = (0.968, 0.013, 0.013, 0.006)
