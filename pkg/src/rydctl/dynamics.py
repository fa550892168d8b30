"""Lindblad simulation of control-field-suppressed Rydberg excitation.

Single atoms live in the basis (g, r, r', d): the Rydberg drive couples g-r,
the control field couples r-r' at detuning Delta, r' autoionizes into the
dark state d at rate Gamma, and g-r coherence dephases at gamma_r.  Two atoms
use the tensor product of that basis plus a blockade shift U_int on |rr>.

All frequencies are angular (rad/s) and times are in seconds.  Generators are
time-independent, so states are propagated with the exact matrix
exponential of the column-stacked Liouvillian.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import NamedTuple, Sequence

import numpy as np
from scipy.linalg import expm
from scipy.optimize import brentq

from . import constants as const
from .errors import InputError, NonPhysicalState, TargetUnreachable
from .spectrum import effective_adjustment, rabi_from_intensity

BASIS = ("g", "r", "rp", "d")
G, R, RP, D = range(4)
TWO_ATOM_BASIS = tuple(a + b for a in ("g", "r", "r'", "d") for b in ("g", "r", "r'", "d"))
GG, GR, RG = 4 * G + G, 4 * G + R, 4 * R + G

TRACE_TOL = 1e-9
HERMITIAN_TOL = 1e-10
POSITIVITY_TOL = 1e-8


def ket(i: int, dim: int = 4) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[i] = 1.0
    return v


def sigma(i: int, j: int, dim: int = 4) -> np.ndarray:
    """|i><j|"""
    m = np.zeros((dim, dim), dtype=complex)
    m[i, j] = 1.0
    return m


def projector(i: int, dim: int = 4) -> np.ndarray:
    return sigma(i, i, dim)


def pure_state(i: int, dim: int = 4) -> np.ndarray:
    return projector(i, dim)


@dataclass(frozen=True)
class PulseConfig:
    """Everything a single- or two-atom run needs.

    ``Omega_c`` overrides the intensity when given.  With ``adjust`` set,
    the control coupling is built from ``(Gamma / kappa, kappa * I_c)``.
    """

    Omega_r: float = const.OMEGA_R
    I_c: float = 0.0
    Omega_c: float | None = None
    Delta: float = const.CONTROL_DETUNING
    Gamma: float = const.GAMMA_75
    gamma_r: float = 0.0
    U_int: float = 2 * math.pi * 1e9
    F_g: float = const.DETECTION_FIDELITY
    duration: float | None = None
    kappa: float = const.LIGHT_SHIFT_SCALE
    adjust: bool = True
    d: float = const.DIPOLE_75_EA0

    def __post_init__(self):
        if not 0.0 <= self.F_g <= 1.0:
            raise InputError("F_g must be a probability")
        rates = (self.Omega_r, self.I_c, self.Gamma, self.gamma_r)
        if any(x < 0 for x in rates) or (self.Omega_c is not None and self.Omega_c < 0):
            raise InputError("rates and intensities must be non-negative")
        if not 0 < self.kappa <= 1:
            raise InputError("kappa must lie in (0, 1]")

    def control(self) -> tuple[float, float]:
        """Effective (Omega_c, Gamma) after the optional kappa rescaling."""
        kappa = self.kappa if self.adjust else 1.0
        gamma, _ = effective_adjustment(self.Gamma, 0.0, kappa)
        if self.Omega_c is not None:
            return self.Omega_c * math.sqrt(kappa), gamma
        return float(rabi_from_intensity(kappa * self.I_c, self.d)), gamma

    @property
    def pi_time(self) -> float:
        return math.pi / self.Omega_r

    @property
    def t_gate(self) -> float:
        """Blockaded pi pulse, gg -> (gr + rg)/sqrt(2)."""
        return math.pi / (math.sqrt(2) * self.Omega_r)


class OpenSystem(NamedTuple):
    H: np.ndarray
    collapse: list
    basis: tuple


def build_single_atom(cfg: PulseConfig) -> OpenSystem:
    omega_c, gamma = cfg.control()
    H = (0.5 * cfg.Omega_r * (sigma(R, G) + sigma(G, R))
         + 0.5 * omega_c * (sigma(RP, R) + sigma(R, RP))
         - cfg.Delta * projector(RP))
    collapse = []
    if gamma > 0:
        collapse.append(math.sqrt(gamma) * sigma(D, RP))
    if cfg.gamma_r > 0:
        collapse.append(math.sqrt(cfg.gamma_r) * (projector(G) - projector(R)))
    return OpenSystem(H, collapse, BASIS)


def build_two_atom(cfg: PulseConfig) -> OpenSystem:
    single = build_single_atom(cfg)
    eye = np.eye(4)
    H = (np.kron(single.H, eye) + np.kron(eye, single.H)
         + cfg.U_int * np.kron(projector(R), projector(R)))
    collapse = [np.kron(c, eye) for c in single.collapse] + [np.kron(eye, c) for c in single.collapse]
    # order as c1..c4: both decay channels first, then both dephasing channels
    n = len(single.collapse)
    collapse = [op for k in range(n) for op in (collapse[k], collapse[n + k])]
    return OpenSystem(H, collapse, TWO_ATOM_BASIS)


def liouvillian(H: np.ndarray, collapse: Sequence[np.ndarray]) -> np.ndarray:
    """Superoperator acting on column-stacked vec(rho): vec(A X B) = (B^T kron A) vec(X)."""
    n = H.shape[0]
    eye = np.eye(n)
    L = -1j * (np.kron(eye, H) - np.kron(H.T, eye))
    for c in collapse:
        cdc = c.conj().T @ c
        L += np.kron(c.conj(), c) - 0.5 * np.kron(eye, cdc) - 0.5 * np.kron(cdc.T, eye)
    return L


def check_state(rho: np.ndarray, t: float | None = None) -> None:
    where = "" if t is None else f" at t={t:.6g}"
    tr = np.trace(rho).real
    if abs(tr - 1.0) > TRACE_TOL:
        raise NonPhysicalState(f"trace {tr!r}{where}")
    if np.max(np.abs(rho - rho.conj().T)) > HERMITIAN_TOL:
        raise NonPhysicalState(f"density matrix not Hermitian{where}")
    lam = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0]
    if lam < -POSITIVITY_TOL:
        raise NonPhysicalState(f"negative eigenvalue {lam:.3g}{where}")


def evolve(H: np.ndarray, collapse: Sequence[np.ndarray], rho0: np.ndarray, times,
           validate: bool = True) -> np.ndarray:
    """Density matrices at ``times`` (s), starting from ``rho0`` at t = 0.

    Each interval is propagated with ``expm(L dt)``; propagators are reused
    for repeated step sizes.
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0 or times[0] < 0 or np.any(np.diff(times) <= 0):
        raise InputError("times must be a non-empty, increasing grid starting at t >= 0")
    n = H.shape[0]
    rho0 = np.asarray(rho0, dtype=complex)
    if validate:
        check_state(rho0)
    L = liouvillian(np.asarray(H, dtype=complex), collapse)
    cache: dict[float, np.ndarray] = {}
    out = np.empty((times.size, n, n), dtype=complex)
    vec = rho0.reshape(-1, order="F")
    prev = 0.0
    for k, t in enumerate(times):
        dt = t - prev
        if dt > 0:
            key = float(f"{dt:.12e}")
            if key not in cache:
                cache[key] = expm(L * dt)
            vec = cache[key] @ vec
        rho = vec.reshape(n, n, order="F")
        if validate:
            check_state(rho, t)
        out[k] = rho
        prev = t
    return out


def ground_population(cfg: PulseConfig, t: float | None = None) -> float:
    """P_g after driving a single atom for ``t`` (default: the pi time)."""
    t = cfg.pi_time if t is None else t
    sysm = build_single_atom(cfg)
    rho = evolve(sysm.H, sysm.collapse, pure_state(G), [t])[-1]
    return float(rho[G, G].real)


def two_atom_populations(rho: np.ndarray) -> np.ndarray:
    """Detection-basis populations (gg, gr, rg, rr) of a two-atom state.

    Anything other than g (r, r', d) reads out as "r": the atom is not
    detected in the ground state.
    """
    p = np.real(np.diag(rho)).reshape(4, 4)
    pg_a = p[G, :]
    gg = p[G, G]
    gr = pg_a.sum() - gg
    rg = p[:, G].sum() - gg
    rr = p.sum() - gg - gr - rg
    return np.array([gg, gr, rg, rr])


def detection_matrix(F_g: float) -> np.ndarray:
    """Simulated -> measured population map in the (gg, gr, rg, rr) basis."""
    e = 1.0 - F_g
    return np.array([
        [F_g**2, 0.0, 0.0, 0.0],
        [F_g * e, F_g, 0.0, 0.0],
        [F_g * e, 0.0, F_g, 0.0],
        [e**2, e, e, 1.0],
    ])


def apply_detection_transform(pops, F_g: float) -> np.ndarray:
    pops = np.asarray(pops, dtype=float)
    if pops.shape != (4,) or np.any(pops < -1e-12) or abs(pops.sum() - 1) > 1e-9:
        raise InputError("pops must be a normalized 4-vector (gg, gr, rg, rr)")
    if not 0.0 <= F_g <= 1.0:
        raise InputError("F_g must be a probability")
    return detection_matrix(F_g) @ pops


def bell_bound(pops_tg, pops_2tg) -> float:
    """Lower bound on the |phi+> fidelity from populations at t_g and 2 t_g.

    Both vectors are ordered (gg, gr, rg, rr).  The purity proxy
    ``sum_i p_i(2 t_g)^2`` bounds the coherence between |gr> and |rg>.
    """
    p1 = np.asarray(pops_tg, dtype=float)
    p2 = np.asarray(pops_2tg, dtype=float)
    for p in (p1, p2):
        if p.shape != (4,) or np.any(p < -1e-12) or abs(p.sum() - 1) > 1e-6:
            raise InputError("populations must be normalized 4-vectors (gg, gr, rg, rr)")
    p1, p2 = np.clip(p1, 0, None), np.clip(p2, 0, None)
    gr, rg = p1[1], p1[2]
    coh2 = (np.sum(p2**2) - 1.0) / 2.0 + gr * rg
    return float(0.5 * (gr + rg) + math.sqrt(max(0.0, coh2)))


def phi_plus() -> np.ndarray:
    return (ket(GR, 16) + ket(RG, 16)) / math.sqrt(2)


def bell_exact(rho: np.ndarray) -> float:
    v = phi_plus()
    return float(np.real(v.conj() @ rho @ v))


def _dephasing_residual(gamma_r, cfg, target):
    return ground_population(replace(cfg, gamma_r=gamma_r)) - target


def calibrate_dephasing(target_Pg: float, cfg: PulseConfig, tol: float = 1e-6) -> float:
    """gamma_r that reproduces ``target_Pg`` after a pi pulse with the control off."""
    cfg = replace(cfg, I_c=0.0, Omega_c=None)
    if not 0 <= target_Pg < 0.5:
        raise InputError("target P_g must lie in [0, 0.5)")
    lo, hi = 0.0, 10.0 * cfg.Omega_r
    f_lo = _dephasing_residual(lo, cfg, target_Pg)
    if f_lo >= -tol:
        if abs(f_lo) <= tol:
            return 0.0
        raise TargetUnreachable(f"P_g already {f_lo + target_Pg:.3g} without dephasing")
    if _dephasing_residual(hi, cfg, target_Pg) < 0:
        raise TargetUnreachable("target not reached for gamma_r <= 10 Omega_r")
    gamma = brentq(_dephasing_residual, lo, hi, args=(cfg, target_Pg),
                   xtol=1e-12 * cfg.Omega_r, rtol=1e-14)
    return float(gamma)


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("RYDCTL_THREADS", "1")))
    except ValueError:
        return 1


def parallel_map(func, items) -> list:
    """Order-preserving map, threaded up to RYDCTL_THREADS workers."""
    items = list(items)
    n = min(_workers(), len(items))
    if n <= 1:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(func, items))


def figure3a_curve(I_grid, cfg: PulseConfig) -> np.ndarray:
    """Measured ground-state probability F_g P_g(pi/Omega_r) versus control intensity."""

    def point(I_c):
        return cfg.F_g * ground_population(replace(cfg, I_c=float(I_c), Omega_c=None))

    return np.array(parallel_map(point, np.asarray(I_grid, dtype=float)))


class Figure3b(NamedTuple):
    f_exact: np.ndarray
    f_bound: np.ndarray
    f_gg: np.ndarray


def blockade_point(cfg: PulseConfig):
    """(F_exact, F_bound, F_gg) for one two-atom configuration."""
    sysm = build_two_atom(cfg)
    tg = cfg.t_gate
    traj = evolve(sysm.H, sysm.collapse, pure_state(GG, 16), [tg, 2 * tg])
    meas_tg = apply_detection_transform(two_atom_populations(traj[0]), cfg.F_g)
    meas_2tg = apply_detection_transform(two_atom_populations(traj[1]), cfg.F_g)
    return bell_exact(traj[0]), bell_bound(meas_tg, meas_2tg), float(meas_tg[0])


def figure3b_curves(I_grid, cfg: PulseConfig) -> Figure3b:
    """Exact Bell fidelity, its measurable lower bound, and F_gg versus intensity."""
    rows = parallel_map(lambda I_c: blockade_point(replace(cfg, I_c=float(I_c), Omega_c=None)),
                        np.asarray(I_grid, dtype=float))
    arr = np.array(rows, dtype=float).reshape(-1, 3)
    return Figure3b(arr[:, 0], arr[:, 1], arr[:, 2])
