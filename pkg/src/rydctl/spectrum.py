"""Photoionization rate and light shift of the 6s75s 3S1 state under the control field.

The autoionization kernel multiplies the squared ICE overlap factor by the
6p1/2 ns admixture of both J' blocks.  It is evaluated in atomic units
(per hartree); rates are returned in s^-1 and light shifts as complex
angular frequencies in rad/s, so ``rate == -2 * shift.imag``.

Detunings are in GHz from the main line at f_+ + Delta_+.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import constants as const
from .errors import AboveThreshold, InputError, PoleOutsideWindow, QuadratureNotConverged
from .mqdt import ChannelModel, z21_squared
from .quadrature import adaptive_gk

R_YB_AU = const.RYDBERG_YB_CM / const.HARTREE_CM
SERIES_CUTOFF = 1e-6
WINDOW_TOL = 5e-3


def field_from_intensity(I_c):
    """Peak electric field (V/m) of a running wave of intensity ``I_c`` (W/cm^2)."""
    I_c = np.asarray(I_c, dtype=float)
    if np.any(I_c < 0):
        raise InputError("intensity must be non-negative")
    return np.sqrt(2.0 * I_c * 1e4 / (const.EPSILON_0 * const.C_LIGHT))


@dataclass(frozen=True)
class FieldConfig:
    """Control field, given either as a field amplitude in atomic units or an intensity."""

    E_o: float | None = None
    I_c: float | None = None
    D_core: float = const.D_CORE_EA0

    def __post_init__(self):
        if (self.E_o is None) == (self.I_c is None):
            raise InputError("specify exactly one of E_o and I_c")
        if (self.E_o if self.E_o is not None else self.I_c) < 0:
            raise InputError("field strength must be non-negative")

    @property
    def field_au(self) -> float:
        if self.E_o is not None:
            return float(self.E_o)
        return float(field_from_intensity(self.I_c)) / const.AU_EFIELD

    def scaled(self, factor: float) -> "FieldConfig":
        """Same field with the intensity multiplied by ``factor``."""
        if self.E_o is not None:
            return FieldConfig(E_o=self.E_o * math.sqrt(factor), D_core=self.D_core)
        return FieldConfig(I_c=self.I_c * factor, D_core=self.D_core)


@dataclass(frozen=True)
class TwoLevelParams:
    Gamma: float = const.GAMMA_75  # rad/s
    Delta_plus: float = const.DELTA_PLUS_GHZ * 1e9  # Hz
    d: float = const.DIPOLE_75_EA0  # e a0

    def __post_init__(self):
        if not self.Gamma > 0:
            raise InputError("Gamma must be positive")


def overlap_factor(nu, nu0):
    """ICE overlap factor between the 6s nu0 s and 6p1/2 nu s Rydberg electrons.

    ``2 sin[pi(nu - nu0)] nu^2 nu0^2 / (sqrt(6) nu0^1.5 pi (nu^2 - nu0^2))``,
    with the removable singularity at nu = nu0 (limit ``nu0^1.5/sqrt(6)``)
    taken from the series of sin(pi x)/(pi x) for ``|x| < 1e-6``.
    """
    nu = np.asarray(nu, dtype=float)
    if np.any(nu <= 0) or nu0 <= 0:
        raise InputError("effective quantum numbers must be positive")
    x = nu - nu0
    k = np.round(x)
    # sin(pi x) from the exactly reduced argument, so integer x gives exactly 0
    s = np.where(k % 2 == 0, 1.0, -1.0) * np.sin(np.pi * (x - k))
    small = np.abs(x) < SERIES_CUTOFF
    px = np.pi * np.where(small, 1.0, x)
    sinc = np.where(small, 1.0 - (np.pi * x) ** 2 / 6.0, s / px)
    out = 2.0 * nu**2 * nu0**2 * sinc / (math.sqrt(6.0) * nu0**1.5 * (nu + nu0))
    return float(out) if out.ndim == 0 else out


def kernel_by_block(nu, model: ChannelModel, unit_nu: bool = True):
    """(J=0, J=1) contributions to the kernel at ``nu``."""
    nu = np.asarray(nu, dtype=float)
    f2 = overlap_factor(nu, model.nu0) ** 2
    return f2 * z21_squared(model.k_j0, nu, unit_nu), f2 * z21_squared(model.k_j1, nu, unit_nu)


def kernel_from_nu(nu, model: ChannelModel, unit_nu: bool = True):
    """Autoionization kernel (per hartree) at effective quantum number ``nu``."""
    k0, k1 = kernel_by_block(nu, model, unit_nu)
    return k0 + k1


def ionization_kernel(E, model: ChannelModel, unit_nu: bool = True):
    """Kernel at absolute energy ``E`` (cm^-1), which must lie in (E_75, I_6p1/2)."""
    E = np.asarray(E, dtype=float)
    th = model.thresholds
    if np.any(E >= th.I_6p12):
        raise AboveThreshold("energy at or above the 6p1/2 threshold")
    if np.any(E <= th.E_75):
        raise InputError("energy must lie above E_75")
    nu = np.sqrt(th.R_Yb / (th.I_6p12 - E))
    return kernel_from_nu(nu, model, unit_nu)


def _prefactor(field: FieldConfig) -> float:
    return (field.field_au * field.D_core) ** 2


def photoionization_rate(delta_ghz, model: ChannelModel, field: FieldConfig, unit_nu: bool = True):
    """Photoionization rate (s^-1) at control detuning ``delta_ghz``."""
    k = kernel_from_nu(model.nu_from_detuning(delta_ghz), model, unit_nu)
    return 0.5 * math.pi * _prefactor(field) * k / const.AU_TIME


def _pv_integral(nu_p, model, nu_lo, nu_hi, unit_nu, epsrel):
    """PV int k(E)/(E - E_p) dE over [E(nu_lo), E(nu_hi)], integrated in nu."""
    k_p = float(kernel_from_nu(nu_p, model, unit_nu))
    inv_p = 1.0 / nu_p**2

    def g(nu):
        dE = R_YB_AU * (inv_p - 1.0 / nu**2)
        return (kernel_from_nu(nu, model, unit_nu) - k_p) / dE * (2.0 * R_YB_AU / nu**3)

    step = 0.25
    grid = np.arange(math.ceil(nu_lo / step) * step, nu_hi, step)
    pts = np.unique(np.concatenate([[nu_lo, nu_hi, nu_p], grid]))
    pts = pts[(pts >= nu_lo) & (pts <= nu_hi)]
    res = adaptive_gk(g, pts, epsrel=epsrel)
    E_a = R_YB_AU * (inv_p - 1.0 / nu_lo**2)
    E_b = R_YB_AU * (inv_p - 1.0 / nu_hi**2)
    # E_a < 0 < E_b measured from the pole
    return res.value + k_p * math.log(E_b / -E_a), k_p


def complex_light_shift(delta_ghz: float, model: ChannelModel, field: FieldConfig,
                        window: float = 15.0, check_window: bool = True,
                        epsrel: float = 1e-8, unit_nu: bool = True) -> complex:
    """Complex energy shift of the 6s75s state, as an angular frequency (rad/s).

    ``-(1/4) E_o^2 D^2 [PV int k(E)/(E - E_p) dE + i pi k(E_p)]`` with
    ``E_p = E_75 + omega``.  The PV integral runs over
    ``nu0 - window <= nu <= nu0 + window`` (clipped above E_75).  With
    ``check_window`` the integral is repeated on a doubled window and
    :class:`QuadratureNotConverged` is raised if the complex shift moves by
    more than 0.5 % of its magnitude.
    """
    nu_p = float(model.nu_from_detuning(delta_ghz))

    def shift(w):
        nu_min = math.sqrt(model.thresholds.R_Yb / (model.thresholds.I_6p12 - model.E_75_cm))
        lo = max(model.nu0 - w, nu_min * (1 + 1e-9))
        hi = model.nu0 + w
        if not lo < nu_p < hi:
            raise PoleOutsideWindow(f"nu={nu_p:.6f} outside integration window [{lo:.3f}, {hi:.3f}]")
        pv, k_p = _pv_integral(nu_p, model, lo, hi, unit_nu, epsrel)
        return -0.25 * _prefactor(field) * complex(pv, math.pi * k_p) / const.AU_TIME

    out = shift(window)
    if check_window and out != 0:
        wide = shift(2 * window)
        if abs(wide - out) > WINDOW_TOL * abs(out):
            raise QuadratureNotConverged(
                f"light shift changed by {abs(wide - out) / abs(out):.2%} on doubling the window")
    return out


class TwoLevelResponse(NamedTuple):
    Delta_LS: float
    Gamma_LS: float


def two_level_response(Omega_c, Delta, Gamma) -> TwoLevelResponse:
    """Light shift and scattering rate of a driven two-level transition (all rad/s)."""
    if np.any(np.asarray(Gamma) <= 0):
        raise InputError("Gamma must be positive")
    den = 4.0 * np.asarray(Delta) ** 2 + np.asarray(Gamma) ** 2
    om2 = np.asarray(Omega_c) ** 2
    return TwoLevelResponse(om2 * Delta / den, Gamma * om2 / den)


class NStarScaling(NamedTuple):
    nstar: float
    Gamma: float  # rad/s
    Delta_plus: float  # Hz, magnitude


def nstar_scaling(n: int, delta_qd: float = const.QUANTUM_DEFECT_3S1) -> NStarScaling:
    """Linewidth and line offset of the 6sns -> 6p1/2 ns transition from n*^-3 laws."""
    nstar = n - delta_qd
    if nstar <= 0:
        raise InputError("n must exceed the quantum defect")
    return NStarScaling(nstar, const.GAMMA_NSTAR_COEFF / nstar**3,
                        const.DELTA_PLUS_NSTAR_COEFF / nstar**3)


def rabi_from_intensity(I_c, d: float = const.DIPOLE_75_EA0):
    """Control Rabi frequency (rad/s) for intensity ``I_c`` (W/cm^2) and dipole ``d`` (e a0)."""
    return d * const.EA0 * field_from_intensity(I_c) / const.HBAR


def effective_adjustment(Gamma, I_c, kappa: float = const.LIGHT_SHIFT_SCALE):
    """Rescale (Gamma, I_c) -> (Gamma/kappa, kappa I_c).

    For |Delta| >> Gamma this keeps Gamma_LS and multiplies Delta_LS by kappa.
    """
    if not 0 < kappa <= 1:
        raise InputError("kappa must lie in (0, 1]")
    return Gamma / kappa, kappa * I_c


def spectrum_table(delta_ghz, model: ChannelModel, field: FieldConfig, light_shift: bool = True,
                   unit_nu: bool = True) -> dict[str, np.ndarray]:
    """Rate and light shift on a detuning grid, in the columns of the spectrum CSV."""
    delta = np.asarray(delta_ghz, dtype=float)
    rate = photoionization_rate(delta, model, field, unit_nu)
    scale = 2 * math.pi * 1e6
    if light_shift:
        shifts = np.array([complex_light_shift(d, model, field, unit_nu=unit_nu) for d in delta])
        re, im = shifts.real, shifts.imag
    else:
        re, im = np.full(delta.shape, np.nan), -0.5 * rate
    return {
        "delta_ghz": delta,
        "rate_per_s": rate,
        "lightshift_re_mhz": re / scale,
        "lightshift_im_mhz": im / scale,
    }
