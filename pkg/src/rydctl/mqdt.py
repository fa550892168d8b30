"""Five-channel MQDT model of the 6p1/2 ns/nd autoionizing series.

Each total angular momentum block J'=0, 1 has a single open channel
(6s1/2 ep1/2, index 0) and closed channels attached to the 6p1/2 threshold
(6p1/2 ns1/2 at index 1, plus 6p1/2 nd3/2 for J'=1).  The short-range physics
is a real symmetric quantum-defect matrix mu with ``K = tan(pi mu)``.

Energies are in cm^-1 throughout this module.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np

from . import constants as const
from .errors import AboveThreshold, Degenerate, InputError, NearPole

POLE_TOL = 1e-9
DEGENERATE_TOL = 1e-300


class Channel(NamedTuple):
    label: str
    is_open: bool
    threshold: str


@dataclass(frozen=True)
class ChannelSet:
    j_block: int
    channels: tuple[Channel, ...]

    def __post_init__(self):
        if sum(ch.is_open for ch in self.channels) != 1 or not self.channels[0].is_open:
            raise InputError("exactly one open channel, at index 0, is supported")
        if not self.channels[1].label.startswith("6p1/2ns"):
            raise InputError("channel index 1 must be 6p1/2 ns1/2")

    def __len__(self):
        return len(self.channels)


J0_CHANNELS = ChannelSet(0, (
    Channel("6s1/2ep1/2", True, "6s1/2"),
    Channel("6p1/2ns1/2", False, "6p1/2"),
))
J1_CHANNELS = ChannelSet(1, (
    Channel("6s1/2ep1/2", True, "6s1/2"),
    Channel("6p1/2ns1/2", False, "6p1/2"),
    Channel("6p1/2nd3/2", False, "6p1/2"),
))
CHANNEL_SETS = {0: J0_CHANNELS, 1: J1_CHANNELS}


def wrap_defect(x):
    """Map quantum defects into (-0.5, 0.5]."""
    return x - np.ceil(np.asarray(x, dtype=float) - 0.5)


@dataclass(frozen=True, eq=False)
class MuMatrix:
    """Symmetric quantum-defect matrix for one J block."""

    j_block: int
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        n = len(CHANNEL_SETS[self.j_block]) if self.j_block in CHANNEL_SETS else None
        if n is None:
            raise InputError(f"unknown J block {self.j_block}")
        if values.shape != (n, n):
            raise InputError(f"J={self.j_block} mu matrix must be {n}x{n}, got {values.shape}")
        if not np.array_equal(values, values.T):
            raise InputError("mu matrix must be symmetric")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_upper(cls, j_block: int, upper) -> "MuMatrix":
        n = len(CHANNEL_SETS[j_block])
        upper = np.asarray(upper, dtype=float)
        if upper.shape != (n * (n + 1) // 2,):
            raise InputError(f"expected {n * (n + 1) // 2} upper-triangle entries")
        m = np.zeros((n, n))
        m[np.triu_indices(n)] = upper
        m = m + np.triu(m, 1).T
        return cls(j_block, m)

    def upper(self) -> np.ndarray:
        return self.values[np.triu_indices(self.values.shape[0])].copy()

    def canonical(self) -> "MuMatrix":
        """Equivalent matrix with every eigenvalue wrapped into (-0.5, 0.5].

        Shifting eigenvalues by integers leaves tan(pi mu) unchanged.  The
        result has spectral norm <= 0.5, so all of its entries lie in
        [-0.5, 0.5] as well.
        """
        w, v = np.linalg.eigh(self.values)
        m = (v * wrap_defect(w)) @ v.T
        return MuMatrix(self.j_block, 0.5 * (m + m.T))

    def __eq__(self, other):
        return (isinstance(other, MuMatrix) and self.j_block == other.j_block
                and np.array_equal(self.values, other.values))

    def __repr__(self):
        return f"MuMatrix(j_block={self.j_block}, values={self.values.tolist()!r})"


@dataclass(frozen=True)
class ThresholdSet:
    I_6p12: float
    E_75: float = const.E_75_CM
    R_Yb: float = const.RYDBERG_YB_CM
    nu0: float = const.NU0

    def __post_init__(self):
        if not self.I_6p12 > self.E_75:
            raise InputError("6p1/2 threshold must lie above E_75")


def k_matrix(mu) -> np.ndarray:
    """Reaction matrix ``K = tan(pi mu)`` as a matrix function.

    Computed in the eigenbasis of ``mu``.  Raises :class:`NearPole` when an
    eigenvalue sits within ``POLE_TOL`` of a half-integer.
    """
    m = mu.values if isinstance(mu, MuMatrix) else np.asarray(mu, dtype=float)
    w, v = np.linalg.eigh(m)
    dist = np.abs(w - np.floor(w) - 0.5)
    if np.any(dist < POLE_TOL):
        raise NearPole(f"mu eigenvalue {w[np.argmin(dist)]!r} is at a pole of tan(pi mu)")
    k = (v * np.tan(np.pi * w)) @ v.T
    return 0.5 * (k + k.T)


def effective_nu(E, thresholds: ThresholdSet):
    """Effective quantum number relative to the 6p1/2 threshold."""
    E = np.asarray(E, dtype=float)
    binding = thresholds.I_6p12 - E
    if np.any(binding <= 0):
        raise AboveThreshold("energy at or above the 6p1/2 threshold")
    nu = np.sqrt(thresholds.R_Yb / binding)
    return float(nu) if nu.ndim == 0 else nu


def calibrate_threshold(E_75: float, f_resonance: float, nu0: float, R_Yb: float) -> float:
    """6p1/2 ionization limit from the ICE resonance condition nu(E) = nu0.

    ``f_resonance`` is the control frequency in Hz that drives the main
    6sns -> 6p1/2 ns line.
    """
    if min(E_75, f_resonance, nu0, R_Yb) <= 0:
        raise InputError("calibrate_threshold inputs must be positive")
    return E_75 + f_resonance / const.C_CM_PER_S + R_Yb / nu0**2


class ClosedChannelSolution(NamedTuple):
    tau: float
    z_closed: np.ndarray
    z_unit: np.ndarray  # z_closed / cos(pi nu)


def _adjugate(m: np.ndarray) -> np.ndarray:
    """Adjugate of a stack of square matrices, shape (..., n, n)."""
    n = m.shape[-1]
    if n == 1:
        return np.ones_like(m)
    if n == 2:
        adj = np.empty_like(m)
        adj[..., 0, 0] = m[..., 1, 1]
        adj[..., 1, 1] = m[..., 0, 0]
        adj[..., 0, 1] = -m[..., 0, 1]
        adj[..., 1, 0] = -m[..., 1, 0]
        return adj
    adj = np.empty_like(m)
    idx = np.arange(n)
    for i in range(n):
        for j in range(n):
            minor = m[..., idx != i, :][..., :, idx != j]
            adj[..., j, i] = (-1) ** (i + j) * np.linalg.det(minor)
    return adj


def _closed_channel_arrays(K: np.ndarray, nu, unit_nu: bool = False):
    """Vectorized core of :func:`closed_channel_solution` over an array of nu.

    With ``unit_nu`` the closed block is ``cos(pi nu) K_cc + sin(pi nu) I``
    instead of ``K_cc + tan(pi nu) I``; the resulting amplitudes are
    ``Z / cos(pi nu)`` evaluated without the 0/0 at half-integer nu.
    """
    nu = np.asarray(nu, dtype=float)
    K = np.asarray(K, dtype=float)
    k_oo, k_oc, k_co, k_cc = K[0, 0], K[0, 1:], K[1:, 0], K[1:, 1:]
    nc = k_cc.shape[0]
    if unit_nu:
        c, s = np.cos(np.pi * nu), np.sin(np.pi * nu)
        M = c[..., None, None] * k_cc + s[..., None, None] * np.eye(nc)
    else:
        c = 1.0
        M = k_cc + np.tan(np.pi * nu)[..., None, None] * np.eye(nc)
    D = np.linalg.det(M) if nc > 1 else M[..., 0, 0]
    adj_kco = _adjugate(M) @ k_co
    N = adj_kco @ k_oc
    num_tau = k_oo * D - c * N
    norm2 = D**2 + num_tau**2
    if np.any(norm2 < DEGENERATE_TOL):
        raise Degenerate("det(M) and the physical reactance numerator vanish together")
    z = -adj_kco / np.sqrt(norm2)[..., None]
    tau = np.arctan2(num_tau, D) / np.pi
    return tau, z


def closed_channel_solution(K: np.ndarray, nu: float) -> ClosedChannelSolution:
    """Closed-channel amplitudes for the energy-normalized single-continuum solution.

    With ``M = K_cc + tan(pi nu) I``, ``D = det M`` and
    ``N = K_oc adj(M) K_co``, the physical reactance is ``K_oo - N/D`` and

        Z = -adj(M) K_co / sqrt(D**2 + (K_oo D - N)**2)

    which equals ``-cos(pi tau) M^-1 K_co`` wherever ``D != 0`` and stays
    finite on the closed-channel bound-state poles where ``D -> 0``.
    """
    tau, z = _closed_channel_arrays(K, float(nu))
    _, z_unit = _closed_channel_arrays(K, float(nu), unit_nu=True)
    return ClosedChannelSolution(float(tau), z, z_unit)


def z21_squared(K: np.ndarray, nu, unit_nu: bool = True) -> np.ndarray:
    """|Z_21|^2, the 6p1/2 ns admixture, over an array of nu.

    By default the amplitude is normalized per unit nu, so that one
    closed-channel state integrates to ``int |Z|^2 dnu = 1`` across its
    resonance.  ``unit_nu=False`` returns the tan-form amplitude of
    :func:`closed_channel_solution`.
    """
    _, z = _closed_channel_arrays(K, nu, unit_nu)
    return z[..., 0] ** 2


@dataclass(frozen=True, eq=False)
class ChannelModel:
    """Complete MQDT parameterization: both mu blocks plus the energy anchors."""

    mu_j0: MuMatrix = field(default_factory=lambda: MuMatrix(0, const.MU_J0))
    mu_j1: MuMatrix = field(default_factory=lambda: MuMatrix(1, const.MU_J1))
    E_75_cm: float = const.E_75_CM
    nu0: float = const.NU0
    f_plus_thz: float = const.F_PLUS_THZ
    delta_plus_ghz: float = const.DELTA_PLUS_GHZ

    def __post_init__(self):
        if self.mu_j0.j_block != 0 or self.mu_j1.j_block != 1:
            raise InputError("mu_j0/mu_j1 have the wrong J labels")
        object.__setattr__(self, "_k", (k_matrix(self.mu_j0), k_matrix(self.mu_j1)))

    @property
    def k_j0(self) -> np.ndarray:
        return self._k[0]

    @property
    def k_j1(self) -> np.ndarray:
        return self._k[1]

    @property
    def resonance_hz(self) -> float:
        return self.f_plus_thz * 1e12 + self.delta_plus_ghz * 1e9

    @property
    def thresholds(self) -> ThresholdSet:
        R = const.RYDBERG_YB_CM
        I = calibrate_threshold(self.E_75_cm, self.resonance_hz, self.nu0, R)
        return ThresholdSet(I_6p12=I, E_75=self.E_75_cm, R_Yb=R, nu0=self.nu0)

    def binding_from_detuning(self, delta_ghz):
        """I_6p12 - E for a control detuning (GHz) from the main resonance.

        Evaluated without forming the large absolute energies, so nu stays
        accurate to a few ulp.
        """
        return const.RYDBERG_YB_CM / self.nu0**2 - np.asarray(delta_ghz, float) / const.GHZ_PER_CM

    def nu_from_detuning(self, delta_ghz):
        binding = self.binding_from_detuning(delta_ghz)
        if np.any(binding <= 0):
            raise AboveThreshold("detuning reaches the 6p1/2 threshold")
        return np.sqrt(const.RYDBERG_YB_CM / binding)

    def detuning_from_nu(self, nu):
        binding = const.RYDBERG_YB_CM / np.asarray(nu, float) ** 2
        return (const.RYDBERG_YB_CM / self.nu0**2 - binding) * const.GHZ_PER_CM

    def energy_from_detuning(self, delta_ghz):
        return self.E_75_cm + (self.resonance_hz + np.asarray(delta_ghz, float) * 1e9) / const.C_CM_PER_S

    def detuning_from_energy(self, E):
        return ((np.asarray(E, float) - self.E_75_cm) * const.C_CM_PER_S - self.resonance_hz) / 1e9

    def with_mu(self, mu_j0: MuMatrix, mu_j1: MuMatrix) -> "ChannelModel":
        return ChannelModel(mu_j0, mu_j1, self.E_75_cm, self.nu0, self.f_plus_thz, self.delta_plus_ghz)

    def to_dict(self) -> dict:
        return {
            "mu_j0": self.mu_j0.values.tolist(),
            "mu_j1": self.mu_j1.values.tolist(),
            "E_75_cm": self.E_75_cm,
            "nu0": self.nu0,
            "f_plus_thz": self.f_plus_thz,
            "delta_plus_ghz": self.delta_plus_ghz,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ChannelModel":
        missing = {"mu_j0", "mu_j1", "E_75_cm", "nu0", "f_plus_thz", "delta_plus_ghz"} - set(d)
        if missing:
            raise InputError(f"channel model is missing fields: {sorted(missing)}")
        return cls(
            MuMatrix(0, d["mu_j0"]),
            MuMatrix(1, d["mu_j1"]),
            float(d["E_75_cm"]),
            float(d["nu0"]),
            float(d["f_plus_thz"]),
            float(d["delta_plus_ghz"]),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "ChannelModel":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"invalid channel model JSON: {exc}") from exc
        return cls.from_dict(d)

    @classmethod
    def load(cls, path) -> "ChannelModel":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))

    def save(self, path) -> None:
        Path(path).write_text(self.to_json() + "\n", encoding="utf-8")


def default_model() -> ChannelModel:
    """The five-channel fit of the 6s75s 3S1 shake-up spectrum."""
    return ChannelModel()


def energy_at_nu(nu: float, thresholds: ThresholdSet) -> float:
    """Energy (cm^-1) at which the effective quantum number equals ``nu``."""
    return thresholds.I_6p12 - thresholds.R_Yb / nu**2

