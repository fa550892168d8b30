"""Least-squares fits of the two-level line and of the mu matrices to scattering spectra.

Data are Gamma_LS (s^-1) against control detuning (GHz).  Both fits use a
Levenberg-Marquardt loop with Marquardt scaling and a central-difference
Jacobian.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field as dc_field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize

from .errors import (DuplicateAbscissa, EmptyDataset, InputError, NearPole, NotConverged,
                     ParseError)
from .mqdt import ChannelModel, MuMatrix
from .spectrum import FieldConfig, TwoLevelParams, photoionization_rate

JAC_STEP = 1e-6
GTOL = 1e-8
XTOL = 1e-12
FTOL = 1e-15
MAX_ITER = 500
GHZ = 2 * math.pi * 1e9


@dataclass(frozen=True)
class SpectrumDataset:
    """Scattering-rate samples, sorted by detuning."""

    delta_ghz: np.ndarray
    gamma_ls: np.ndarray
    sigma: np.ndarray | None = None
    provenance: str = ""

    def __post_init__(self):
        d = np.array(self.delta_ghz, dtype=float)
        y = np.array(self.gamma_ls, dtype=float)
        s = None if self.sigma is None else np.array(self.sigma, dtype=float)
        if d.size == 0:
            raise EmptyDataset("dataset has no rows")
        if d.shape != y.shape or d.ndim != 1 or (s is not None and s.shape != d.shape):
            raise InputError("columns must be 1-D and of equal length")
        if not (np.all(np.isfinite(d)) and np.all(np.isfinite(y))):
            raise InputError("non-finite values in dataset")
        if np.any(y < 0):
            raise InputError("gamma_ls must be non-negative")
        if s is not None and np.any(~(s > 0)):
            raise InputError("sigma must be positive")
        order = np.argsort(d, kind="stable")
        d, y = d[order], y[order]
        s = None if s is None else s[order]
        if np.any(np.diff(d) == 0):
            raise DuplicateAbscissa(f"duplicate detuning {d[1:][np.diff(d) == 0][0]}")
        for arr in (d, y, s):
            if arr is not None:
                arr.setflags(write=False)
        object.__setattr__(self, "delta_ghz", d)
        object.__setattr__(self, "gamma_ls", y)
        object.__setattr__(self, "sigma", s)

    def __len__(self):
        return self.delta_ghz.size

    def weights(self) -> np.ndarray:
        return np.ones_like(self.gamma_ls) if self.sigma is None else 1.0 / self.sigma


def load_spectrum_csv(path) -> SpectrumDataset:
    """Read ``delta_ghz, gamma_ls[, sigma]`` rows; ``#`` starts a comment.

    A first non-comment row that does not parse as numbers is taken as a
    column header.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"{path}: not valid UTF-8") from exc
    rows, n_cols = [], None
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        fields = [f.strip() for f in next(csv.reader([line]))]
        try:
            vals = [float(f) for f in fields]
        except ValueError:
            if not rows and n_cols is None and fields[0].lower().startswith("delta"):
                n_cols = len(fields)
                continue
            raise ParseError(f"{path}:{lineno}: cannot parse {line!r}", lineno) from None
        if len(vals) not in (2, 3) or (n_cols is not None and len(vals) != n_cols):
            raise ParseError(f"{path}:{lineno}: expected 2 or 3 columns", lineno)
        if rows and len(vals) != len(rows[0][1]):
            raise ParseError(f"{path}:{lineno}: inconsistent column count", lineno)
        rows.append((lineno, vals))
    if not rows:
        raise EmptyDataset(f"{path}: no data rows")
    arr = np.array([v for _, v in rows])
    deltas = arr[:, 0]
    uniq, counts = np.unique(deltas, return_counts=True)
    if np.any(counts > 1):
        dup = uniq[counts > 1][0]
        line = next(ln for ln, v in rows if v[0] == dup)
        raise DuplicateAbscissa(f"{path}:{line}: duplicate detuning {dup}")
    sigma = arr[:, 2] if arr.shape[1] == 3 else None
    return SpectrumDataset(deltas, arr[:, 1], sigma, provenance=str(path))


def save_spectrum_csv(data: SpectrumDataset, path) -> None:
    cols = ["delta_ghz", "gamma_ls"] + ([] if data.sigma is None else ["sigma"])
    arrs = [data.delta_ghz, data.gamma_ls] + ([] if data.sigma is None else [data.sigma])
    with open(path, "w", newline="") as fh:
        if data.provenance:
            fh.write(f"# {data.provenance}\n")
        fh.write(",".join(cols) + "\n")
        for row in zip(*arrs):
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


@dataclass
class FitResult:
    names: tuple[str, ...]
    params: np.ndarray
    residual_norm: float
    n_iterations: int
    converged: bool
    covariance: np.ndarray
    grad_norm: float = 0.0
    gtol: float = GTOL
    rank_deficient: bool = False
    history: list[float] = dc_field(default_factory=list)
    extra: dict = dc_field(default_factory=dict)

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.names, map(float, self.params)))

    def stderr(self) -> np.ndarray:
        return np.sqrt(np.clip(np.diag(self.covariance), 0, None))

    def to_json(self) -> str:
        return json.dumps({
            "params": self.as_dict(),
            "stderr": dict(zip(self.names, map(float, self.stderr()))),
            "covariance": self.covariance.tolist(),
            "residual_norm": self.residual_norm,
            "n_iterations": self.n_iterations,
            "converged": self.converged,
            "grad_norm": self.grad_norm,
            "rank_deficient": self.rank_deficient,
            **self.extra,
        }, indent=2, sort_keys=True)


def numerical_jacobian(fun: Callable[[np.ndarray], np.ndarray], p: np.ndarray,
                       step: float = JAC_STEP) -> np.ndarray:
    cols = []
    for i in range(p.size):
        h = step * max(1.0, abs(p[i]))
        dp = np.zeros_like(p)
        dp[i] = h
        cols.append((fun(p + dp) - fun(p - dp)) / (2 * h))
    return np.stack(cols, axis=1)


def _safe_residual(fun, p):
    try:
        r = np.asarray(fun(p), dtype=float)
    except NearPole:
        return None
    return r if np.all(np.isfinite(r)) else None


def levenberg_marquardt(fun: Callable[[np.ndarray], np.ndarray], p0, names: Sequence[str],
                        project: Callable[[np.ndarray], np.ndarray] | None = None,
                        max_iter: int = MAX_ITER, gtol: float = GTOL, scale_sq: float | None = None,
                        resid_floor: float = 0.0, raise_on_fail: bool = True) -> FitResult:
    """Minimize ``|fun(p)|^2`` by damped Gauss-Newton.

    ``project`` maps a trial point onto an equivalent canonical one after
    every accepted step.  Convergence means the scaled gradient
    ``max_i |J_i . r| / (|J_i| |r|)`` has dropped below ``gtol``, or the
    residual norm is below ``resid_floor`` (exact data, where the gradient
    direction is pure roundoff).  The cost history of accepted steps is
    non-increasing.
    """
    p = np.array(p0, dtype=float)
    if project is not None:
        p = project(p)
    r = _safe_residual(fun, p)
    if r is None:
        raise InputError("residual is not finite at the initial point")
    cost = float(r @ r)
    history = [cost]
    lam = 1e-3
    converged = False
    J = numerical_jacobian(fun, p)
    it = 0

    def scaled_grad(J, r):
        rn = math.sqrt(float(r @ r))
        if rn == 0:
            return 0.0
        cn = np.linalg.norm(J, axis=0)
        g = np.abs(J.T @ r)
        return float(np.max(np.where(cn > 0, g / np.where(cn > 0, cn, 1) / rn, 0)))

    gnorm = scaled_grad(J, r)
    while it < max_iter:
        if gnorm <= gtol or math.sqrt(cost) <= resid_floor:
            gnorm = 0.0 if gnorm > gtol else gnorm
            converged = True
            break
        it += 1
        A = J.T @ J
        g = J.T @ r
        diag = np.maximum(np.diag(A), 1e-30)
        accepted = False
        while lam < 1e16:
            try:
                step = -np.linalg.solve(A + lam * np.diag(diag), g)
            except np.linalg.LinAlgError:
                lam *= 10
                continue
            trial = p + step
            if project is not None:
                trial = project(trial)
            r_new = _safe_residual(fun, trial)
            if r_new is not None and (c_new := float(r_new @ r_new)) <= cost:
                accepted = True
                break
            lam *= 10
        if not accepted:
            # no descent direction at any damping: numerically at a minimum
            converged = gnorm <= math.sqrt(gtol) or math.sqrt(cost) <= resid_floor
            break
        small_step = np.linalg.norm(step) <= XTOL * (np.linalg.norm(p) + XTOL)
        small_drop = cost - c_new <= FTOL * cost
        p, r, cost = trial, r_new, c_new
        history.append(cost)
        lam = max(lam / 10, 1e-12)
        J = numerical_jacobian(fun, p)
        gnorm = scaled_grad(J, r)
        if math.sqrt(cost) <= resid_floor:
            gnorm, converged = 0.0, True
            break
        if small_step or small_drop:
            converged = gnorm <= math.sqrt(gtol)
            break
    else:
        converged = gnorm <= gtol

    A = J.T @ J
    rank = np.linalg.matrix_rank(A, tol=1e-10 * max(np.abs(A).max(), 1e-300))
    m, n = r.size, p.size
    s2 = cost / (m - n) if (scale_sq is None and m > n) else (scale_sq or 1.0)
    cov = np.linalg.pinv(A) * s2
    res = FitResult(tuple(names), p, math.sqrt(cost), it, bool(converged), cov, float(gnorm),
                    gtol if gnorm <= gtol else math.sqrt(gtol), bool(rank < n), history)
    if not converged and raise_on_fail:
        raise NotConverged(f"no convergence after {it} iterations", res)
    return res


def two_level_model(delta_ghz, Gamma, Delta_plus_ghz, A):
    """Gamma_LS (s^-1) with Gamma in GHz (angular, 2 pi x) units and A = Omega_c^2 in (2 pi GHz)^2."""
    det = 2 * math.pi * (np.asarray(delta_ghz) - Delta_plus_ghz)
    return 1e9 * A * Gamma / (4 * det**2 + Gamma**2)


TWO_LEVEL_NAMES = ("Gamma", "Delta_plus", "A")


def fit_two_level(data: SpectrumDataset, init: TwoLevelParams | None = None, A0: float = 1.0,
                  max_iter: int = MAX_ITER) -> FitResult:
    """Fit Gamma (rad/s), Delta_plus (Hz) and amplitude A to a scattering-rate line.

    Internally the parameters are (Gamma/1e9, Delta_plus/1e9, A) so the
    problem is well scaled; they are reported in SI units with
    ``A = Omega_c^2/(2 pi GHz)^2``.
    """
    if len(data) < 5:
        raise InputError("need at least 5 points")
    init = init or TwoLevelParams()
    w = data.weights()
    y = data.gamma_ls

    def resid(p):
        return (two_level_model(data.delta_ghz, *p) - y) * w

    p0 = np.array([init.Gamma / 1e9, init.Delta_plus / 1e9, A0])
    peak = p0[1]
    if not (data.delta_ghz[0] < peak < data.delta_ghz[-1]):
        raise InputError("data must span both sides of the line")
    floor = 1e-13 * float(np.linalg.norm(y * w))
    res = levenberg_marquardt(resid, p0, TWO_LEVEL_NAMES, max_iter=max_iter, resid_floor=floor,
                              scale_sq=1.0 if data.sigma is not None else None, raise_on_fail=False)
    units = np.array([1e9, 1e9, 1.0])
    res.params = res.params * units
    res.covariance = res.covariance * np.outer(units, units)
    res.extra["units"] = {"Gamma": "rad/s", "Delta_plus": "Hz", "A": "(2 pi GHz)^2"}
    if not res.converged:
        raise NotConverged(f"two-level fit did not converge in {res.n_iterations} iterations", res)
    return res


MU_NAMES = ("mu0_00", "mu0_01", "mu0_11",
            "mu1_00", "mu1_01", "mu1_02", "mu1_11", "mu1_12", "mu1_22")


def _split_mu(p):
    return MuMatrix.from_upper(0, p[:3]), MuMatrix.from_upper(1, p[3:])


def _canonical_params(p):
    m0, m1 = _split_mu(p)
    return np.concatenate([m0.canonical().upper(), m1.canonical().upper()])


def mu_params(model: ChannelModel) -> np.ndarray:
    return np.concatenate([model.mu_j0.upper(), model.mu_j1.upper()])


def model_with_params(model: ChannelModel, p) -> ChannelModel:
    return model.with_mu(*_split_mu(np.asarray(p, dtype=float)))


def fit_mu(data: SpectrumDataset, model: ChannelModel, field: FieldConfig, n_starts: int = 1,
           seed: int = 0, method: str = "lm", max_iter: int = MAX_ITER,
           init=None) -> FitResult:
    """Fit the 9 independent mu-matrix entries to a photoionization spectrum.

    ``model`` supplies the starting matrices (overridden by ``init``, a
    length-9 vector) and every other parameter.  With ``n_starts > 1`` the
    extra starts are drawn uniformly from (-0.5, 0.5] with ``seed`` and the
    lowest residual wins.  ``method="nelder-mead"`` swaps in a derivative-free
    minimizer.  A rank-deficient Jacobian is flagged, not raised: several
    parameter sets describe the data equally well.
    """
    w = data.weights()
    y = data.gamma_ls

    def resid(p):
        return (photoionization_rate(data.delta_ghz, model_with_params(model, p), field) - y) * w

    p0 = mu_params(model) if init is None else np.asarray(init, dtype=float)
    rng = np.random.default_rng(seed)
    floor = 1e-13 * float(np.linalg.norm(y * w))
    starts = [p0] + [0.5 - rng.random(9) for _ in range(n_starts - 1)]
    best = None
    for start in starts:
        if method == "lm":
            try:
                res = levenberg_marquardt(resid, start, MU_NAMES, project=_canonical_params,
                                          max_iter=max_iter, raise_on_fail=False, resid_floor=floor,
                                          scale_sq=1.0 if data.sigma is not None else None)
            except InputError:
                continue
        elif method == "nelder-mead":
            res = _nelder_mead(resid, start, max_iter)
        else:
            raise InputError(f"unknown method {method!r}")
        if best is None or res.residual_norm < best.residual_norm:
            best = res
    if best is None:
        raise InputError("no start gave a finite residual")
    best.extra["n_starts"] = n_starts
    best.extra["seed"] = seed
    if not best.converged:
        raise NotConverged(f"mu fit did not converge in {best.n_iterations} iterations", best)
    return best


def _nelder_mead(resid, start, max_iter):
    def cost(p):
        r = _safe_residual(resid, _canonical_params(p))
        return np.inf if r is None else float(r @ r)

    opt = minimize(cost, start, method="Nelder-Mead",
                   options={"maxiter": max_iter * 20, "xatol": 1e-10, "fatol": 1e-14})
    p = _canonical_params(opt.x)
    return FitResult(MU_NAMES, p, math.sqrt(opt.fun), int(opt.nit), bool(opt.success),
                     np.full((9, 9), np.nan), gtol=np.nan, history=[float(opt.fun)])


def synthetic_two_level(delta_ghz, params: TwoLevelParams, A: float = 1.0, noise: float = 0.0,
                        seed: int = 0) -> SpectrumDataset:
    """Two-level line sampled on ``delta_ghz`` with optional multiplicative Gaussian noise."""
    y = two_level_model(delta_ghz, params.Gamma / 1e9, params.Delta_plus / 1e9, A)
    if noise:
        y = y * (1 + noise * np.random.default_rng(seed).standard_normal(y.shape))
    return SpectrumDataset(delta_ghz, np.abs(y), provenance=f"synthetic two-level noise={noise} seed={seed}")


def synthetic_mu_spectrum(delta_ghz, model: ChannelModel, field: FieldConfig, noise: float = 0.0,
                          seed: int = 0) -> SpectrumDataset:
    y = photoionization_rate(np.asarray(delta_ghz, dtype=float), model, field)
    if noise:
        y = y * (1 + noise * np.random.default_rng(seed).standard_normal(y.shape))
    return SpectrumDataset(delta_ghz, np.abs(y), provenance=f"synthetic mqdt noise={noise} seed={seed}")
