"""Addressing errors for spectator atoms, and the control settings that meet a target.

Two ways of detuning a spectator's g -> r transition by Delta_LS:

* ``GroundShift``: the control beam light-shifts |g> through a short-lived
  state of width Gamma; the spectator scatters at Gamma_LS for the whole
  gate.
* ``RydbergShift``: the control beam light-shifts |r>; scattering only
  happens from the small off-resonant Rydberg population P_r.

Far-detuned forms are used throughout: Delta_LS = Omega_c^2/(4 Delta),
Gamma_LS = Gamma Omega_c^2/(4 Delta^2), t_g = 2 pi/Omega_r,
P_r = (Omega_r/Delta_LS)^2.  Only the exponents of the resulting power
laws are meaningful; prefactors default to one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

import numpy as np

from .errors import Infeasible, InputError, ZeroShift


class Variant(Enum):
    GROUND = "ground"
    RYDBERG = "rydberg"


@dataclass(frozen=True)
class Scheme:
    variant: Variant
    c_rot: float = 1.0
    c_sc: float = 1.0
    # fraction of the error budget given to epsilon_rot when the total has
    # no interior optimum in Omega_c (RydbergShift)
    rot_fraction: float = 0.5

    def __post_init__(self):
        if isinstance(self.variant, str):
            object.__setattr__(self, "variant", Variant(self.variant))
        if self.c_rot <= 0 or self.c_sc <= 0:
            raise InputError("proportionality constants must be positive")
        if not 0 < self.rot_fraction < 1:
            raise InputError("rot_fraction must lie in (0, 1)")

    @classmethod
    def ground(cls, **kw) -> "Scheme":
        return cls(Variant.GROUND, **kw)

    @classmethod
    def rydberg(cls, **kw) -> "Scheme":
        return cls(Variant.RYDBERG, **kw)


class AddressingErrors(NamedTuple):
    eps_rot: float
    eps_sc: float


class ErrorBudget(NamedTuple):
    Delta_opt: float
    Omega_c_opt: float
    Omega_r: float
    eps_rot: float
    eps_sc: float

    @property
    def omega_c_sq(self) -> float:
        return self.Omega_c_opt**2

    @property
    def eps_total(self) -> float:
        return self.eps_rot + self.eps_sc

    @property
    def I_opt(self) -> float:
        """Intensity surrogate: I_c is proportional to Omega_c^2."""
        return self.omega_c_sq


def addressing_errors(scheme: Scheme, Omega_r, Omega_c, Delta, Gamma, t_g=None) -> AddressingErrors:
    """Rotation and scattering error of one spectator atom over a gate of length ``t_g``.

    ``t_g`` defaults to 2 pi/Omega_r.
    """
    Omega_c = np.asarray(Omega_c, dtype=float)
    Delta = np.asarray(Delta, dtype=float)
    if np.any(Omega_c == 0) or np.any(Delta == 0) or np.any(~np.isfinite(Delta)):
        raise ZeroShift("the light shift vanishes")
    delta_ls = Omega_c**2 / (4 * Delta)
    gamma_ls = Gamma * Omega_c**2 / (4 * Delta**2)
    t_g = 2 * math.pi / Omega_r if t_g is None else t_g
    p_r = (Omega_r / delta_ls) ** 2
    eps_rot = scheme.c_rot * p_r
    eps_sc = scheme.c_sc * gamma_ls * t_g
    if scheme.variant is Variant.RYDBERG:
        eps_sc = eps_sc * p_r
    return AddressingErrors(eps_rot, eps_sc)


def intrinsic_rabi(eps: float, Gamma_r: float) -> float:
    """Rabi frequency at which Rydberg decay alone costs eps = 2 pi Gamma_r/Omega_r."""
    return 2 * math.pi * Gamma_r / eps


def optimize_control(scheme: Scheme, eps_target: float, Gamma: float, Gamma_r: float,
                     Omega_r: float | None = None) -> ErrorBudget:
    """Smallest detuning and matching control strength that keep addressing errors at eps.

    Write x = Omega_c^2, a = c_rot, b = c_sc, T = 2 pi/Omega_r.  Then
    eps_rot = 16 a Omega_r^2 Delta^2 / x^2.

    GroundShift: eps_sc = b Gamma T x / (4 Delta^2).  The total is minimal
    at x^3 = 128 a Omega_r^2 Delta^4 / (b Gamma T), where eps_sc = 2 eps_rot
    and the minimum is 3 a^(1/3) (b Gamma T Omega_r / 2)^(2/3) Delta^(-2/3).
    Setting that to eps gives Delta ~ Gamma eps^-3/2 and, with
    Omega_r ~ Gamma_r/eps, x ~ Gamma Gamma_r / eps^3.

    RydbergShift: eps_sc = 4 a b Gamma T Omega_r^2 / x, so both terms fall
    monotonically with x and there is no interior minimum.  The budget is
    split as eps_rot = f eps, eps_sc = (1 - f) eps, which fixes
    x = 4 a b Gamma T Omega_r^2 / ((1 - f) eps) ~ Gamma Gamma_r / eps^2 and
    Delta = x sqrt(f eps / a) / (4 Omega_r) ~ Gamma / sqrt(eps).

    ``Omega_r`` defaults to the intrinsic-error condition.
    """
    if not 0 < eps_target < 1:
        raise InputError("eps_target must lie in (0, 1)")
    if Gamma <= 0 or Gamma_r <= 0:
        raise InputError("Gamma and Gamma_r must be positive")
    Omega_r = intrinsic_rabi(eps_target, Gamma_r) if Omega_r is None else Omega_r
    a, b = scheme.c_rot, scheme.c_sc
    T = 2 * math.pi / Omega_r
    with np.errstate(over="ignore", invalid="ignore"):
        if scheme.variant is Variant.GROUND:
            coeff = 3 * a ** (1 / 3) * (b * Gamma * T * Omega_r / 2) ** (2 / 3)
            delta = (coeff / eps_target) ** 1.5
            x = (128 * a * Omega_r**2 * delta**4 / (b * Gamma * T)) ** (1 / 3)
        else:
            f = scheme.rot_fraction
            x = 4 * a * b * Gamma * T * Omega_r**2 / ((1 - f) * eps_target)
            delta = x * math.sqrt(f * eps_target / a) / (4 * Omega_r)
    if not (delta > 0 and x > 0 and math.isfinite(delta) and math.isfinite(x)):
        raise Infeasible("no positive solution for the control settings")
    errs = addressing_errors(scheme, Omega_r, math.sqrt(x), delta, Gamma)
    return ErrorBudget(delta, math.sqrt(x), Omega_r, float(errs.eps_rot), float(errs.eps_sc))


class ScalingExponents(NamedTuple):
    omega_c_sq: float
    delta: float


def scaling_exponent(scheme: Scheme, eps_grid, Gamma: float = 1.0, Gamma_r: float = 1e-3) -> ScalingExponents:
    """Log-log slopes of Omega_c_opt^2 and Delta_opt against eps."""
    eps = np.asarray(eps_grid, dtype=float)
    if eps.size < 2:
        raise InputError("need at least two eps values")
    opts = [optimize_control(scheme, e, Gamma, Gamma_r) for e in eps]
    le = np.log(eps)
    s_x = np.polyfit(le, np.log([o.omega_c_sq for o in opts]), 1)[0]
    s_d = np.polyfit(le, np.log([o.Delta_opt for o in opts]), 1)[0]
    return ScalingExponents(float(s_x), float(s_d))


def budget_table(scheme: Scheme, eps_grid, Gamma: float = 1.0, Gamma_r: float = 1e-3) -> dict[str, np.ndarray]:
    """Columns of the error-budget CSV."""
    eps = np.asarray(eps_grid, dtype=float)
    opts = [optimize_control(scheme, e, Gamma, Gamma_r) for e in eps]
    return {
        "eps": eps,
        "delta_opt": np.array([o.Delta_opt for o in opts]),
        "omega_c_sq_opt": np.array([o.omega_c_sq for o in opts]),
        "eps_rot": np.array([o.eps_rot for o in opts]),
        "eps_sc": np.array([o.eps_sc for o in opts]),
    }
