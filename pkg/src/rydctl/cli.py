"""Command-line front end.

Every subcommand resolves its settings as defaults < JSON config < flags,
writes a CSV (and optionally an SVG) into ``--out``, records a ``run.json``
provenance file next to it and prints one summary line.

Exit codes: 0 success, 2 bad input, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import platform
import sys
from dataclasses import replace
from importlib import metadata, resources
from pathlib import Path

import numpy as np
import scipy

from . import constants as const
from . import dynamics as dyn
from . import error_budget as eb
from . import fit as fitmod
from . import spectrum as spec
from .errors import InputError, NotConverged, NumericalError
from .mqdt import ChannelModel
from .plotting import Series, render_svg

BUNDLED_MODEL = "table_s2.json"
LOG_POINTS_PER_DECADE = 5

COMMON = {"out": "rydctl_out", "svg": False, "seed": 0}
SIM = {
    "ic": "0:600:50", "delta_ghz": -5.0, "omega_r_mhz": 0.7, "gamma_ghz": 0.92,
    "target_pg": 0.03, "gamma_r": None, "kappa": const.LIGHT_SHIFT_SCALE, "adjust": True,
    "fg": const.DETECTION_FIDELITY, "dipole": const.DIPOLE_75_EA0,
}
DEFAULTS = {
    "spectrum": {"model": BUNDLED_MODEL, "delta": "-35:10:0.05", "ic": 600.0, "eo": None,
                 "lightshift": True},
    "lightshift": {"model": BUNDLED_MODEL, "delta": "-30:5:0.5", "ic": 600.0, "eo": None},
    "fit-mqdt": {"model": BUNDLED_MODEL, "data": None, "ic": 600.0, "eo": None, "starts": 1,
                 "method": "lm"},
    "fit-two-level": {"data": None, "gamma_ghz": 0.92, "delta_plus_ghz": const.DELTA_PLUS_GHZ,
                      "amplitude": 1.0},
    "sim-rabi": {**SIM, "times": None},
    "sim-blockade": {**SIM, "u_int_ghz": 1.0},
    "fidelity": {"pops_tg": "0.487,0.494,0.005,0.014", "pops_2tg": "0.013,0.013,0.006,0.968"},
    "error-budget": {"scheme": "both", "eps": "1e-4:1e-2", "gamma": 1.0, "gamma_r": 1e-3},
}
# keys that only say where outputs go; left out of CSV headers so reruns elsewhere match
LOCATION_KEYS = {"out"}


def parse_grid(text, log_default: bool = False) -> np.ndarray:
    """Grid from ``start:stop:step`` (inclusive within half a step), a comma list, or one value.

    With ``log_default``, ``start:stop`` gives log-spaced points,
    five per decade.
    """
    if isinstance(text, (int, float)):
        return np.array([float(text)])
    if isinstance(text, (list, tuple)):
        grid = np.array(text, dtype=float)
    else:
        text = str(text).strip()
        sep = ":" if ":" in text else ","
        try:
            parts = [float(p) for p in text.split(sep) if p.strip()]
        except ValueError as exc:
            raise InputError(f"cannot parse grid {text!r}") from exc
        if sep == ",":
            grid = np.array(parts)
        elif len(parts) == 3:
            start, stop, step = parts
            if step == 0 or (stop - start) / step < 0:
                raise InputError(f"grid {text!r} does not reach its end")
            n = int(math.floor((stop - start) / step + 0.5))
            grid = np.round(start + step * np.arange(n + 1), 12)
        elif len(parts) == 2 and log_default:
            start, stop = parts
            if start <= 0 or stop <= 0:
                raise InputError("log grids need positive ends")
            n = max(2, int(round(abs(math.log10(stop / start)) * LOG_POINTS_PER_DECADE)) + 1)
            grid = np.logspace(math.log10(start), math.log10(stop), n)
        else:
            raise InputError(f"grid {text!r} must be start:stop:step")
    if grid.size == 0 or not np.all(np.isfinite(grid)):
        raise InputError("grid is empty or non-finite")
    d = np.diff(grid)
    if grid.size > 1 and not (np.all(d > 0) or np.all(d < 0)):
        raise InputError("grid must be strictly monotone")
    return grid


def parse_pops(text) -> np.ndarray:
    """Populations in table order (gr, rg, rr, gg), returned as (gg, gr, rg, rr)."""
    vals = text if isinstance(text, (list, tuple)) else str(text).split(",")
    try:
        p = np.array([float(v) for v in vals])
    except ValueError as exc:
        raise InputError(f"cannot parse populations {text!r}") from exc
    if p.shape != (4,):
        raise InputError("populations need 4 values: gr,rg,rr,gg")
    return np.array([p[3], p[0], p[1], p[2]])


def resolve_model(path) -> tuple[ChannelModel, str]:
    p = Path(path)
    if not p.exists() and p.name == str(path) == BUNDLED_MODEL:
        text = resources.files("rydctl").joinpath("data", BUNDLED_MODEL).read_text(encoding="utf-8")
    else:
        if not p.is_file():
            raise InputError(f"model file not found: {path}")
        text = p.read_text(encoding="utf-8")
    return ChannelModel.from_json(text), hashlib.sha256(text.encode()).hexdigest()


def field_config(cfg) -> spec.FieldConfig:
    if cfg.get("eo") is not None:
        return spec.FieldConfig(E_o=float(cfg["eo"]))
    return spec.FieldConfig(I_c=float(cfg["ic"]))


def _fmt(v) -> str:
    return repr(float(v))


class Run:
    """Collects outputs of one subcommand and writes them with provenance."""

    def __init__(self, command: str, cfg: dict):
        self.command = command
        self.cfg = cfg
        self.out = Path(cfg["out"])
        self.out.mkdir(parents=True, exist_ok=True)
        self.files: list[str] = []
        self.hashes: dict[str, str] = {}

    def header(self) -> list[str]:
        lines = [f"# rydctl {self.command}"]
        lines += [f"# {k}={json.dumps(v)}" for k, v in sorted(self.cfg.items()) if k not in LOCATION_KEYS]
        lines += [f"# {k}_sha256={v}" for k, v in sorted(self.hashes.items())]
        return lines

    def write_csv(self, name: str, columns: dict) -> Path:
        path = self.out / name
        keys = list(columns)
        arrs = [np.atleast_1d(np.asarray(columns[k])) for k in keys]
        with open(path, "w", newline="", encoding="utf-8") as fh:
            fh.write("\n".join(self.header()) + "\n")
            fh.write(",".join(keys) + "\n")
            for row in zip(*arrs):
                fh.write(",".join(_fmt(v) for v in row) + "\n")
        self.files.append(name)
        return path

    def write_text(self, name: str, text: str) -> None:
        (self.out / name).write_text(text, encoding="utf-8")
        self.files.append(name)

    def write_svg(self, name: str, series, **kw) -> None:
        if self.cfg.get("svg"):
            self.write_text(name, render_svg(series, **kw))

    def finish(self) -> None:
        record = {
            "command": self.command,
            "config": self.cfg,
            "hashes": {"constants": _constants_hash(), **self.hashes},
            "versions": {
                "rydctl": _version(),
                "python": platform.python_version(),
                "numpy": np.__version__,
                "scipy": scipy.__version__,
            },
            "outputs": self.files,
        }
        (self.out / "run.json").write_text(json.dumps(record, indent=2, sort_keys=True) + "\n",
                                           encoding="utf-8")


def _constants_hash() -> str:
    return hashlib.sha256(Path(const.__file__).read_bytes()).hexdigest()


def _version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "unknown"


def cmd_spectrum(run: Run) -> str:
    cfg = run.cfg
    model, run.hashes["model"] = resolve_model(cfg["model"])
    field = field_config(cfg)
    delta = parse_grid(cfg["delta"])
    rate = spec.photoionization_rate(delta, model, field)
    scale = 2 * math.pi * 1e6
    if cfg["lightshift"]:
        shifts = np.array(dyn.parallel_map(lambda d: spec.complex_light_shift(d, model, field), delta))
        re, im = shifts.real / scale, shifts.imag / scale
    else:
        re, im = np.full(delta.shape, np.nan), -0.5 * rate / scale
    run.write_csv("spectrum.csv", {"delta_ghz": delta, "rate_per_s": rate,
                                   "lightshift_re_mhz": re, "lightshift_im_mhz": im})
    series = [Series(delta, rate, "rate (1/s)")]
    if cfg["lightshift"]:
        series.append(Series(delta, 2 * math.pi * 1e6 * np.abs(re), "|Re shift| (rad/s)"))
    run.write_svg("spectrum.svg", series, xlabel="control detuning (GHz)", ylabel="rate",
                  logy=True)
    i = int(np.argmax(rate))
    return f"rows={delta.size} peak_rate={rate[i]:.4e}/s at delta={delta[i]:.3f} GHz"


def cmd_lightshift(run: Run) -> str:
    cfg = run.cfg
    model, run.hashes["model"] = resolve_model(cfg["model"])
    field = field_config(cfg)
    delta = parse_grid(cfg["delta"])
    shifts = np.array(dyn.parallel_map(lambda d: spec.complex_light_shift(d, model, field), delta))
    rate = spec.photoionization_rate(delta, model, field)
    tl = spec.TwoLevelParams()
    E = field.field_au * const.AU_EFIELD
    omega_c = tl.d * const.EA0 * E / const.HBAR
    # detunings are measured from the two-level line itself
    det = 2 * math.pi * delta * 1e9
    two = spec.two_level_response(omega_c, det, tl.Gamma)
    scale = 2 * math.pi * 1e6
    run.write_csv("lightshift.csv", {
        "delta_ghz": delta,
        "lightshift_re_mhz": shifts.real / scale,
        "lightshift_im_mhz": shifts.imag / scale,
        "rate_per_s": rate,
        "two_level_shift_mhz": two.Delta_LS / scale,
        "two_level_rate_per_s": two.Gamma_LS,
    })
    run.write_svg("lightshift.svg", [Series(delta, rate, "rate (1/s)"),
                                     Series(delta, np.abs(shifts.real), "|Re shift| (rad/s)")],
                  xlabel="control detuning (GHz)", ylabel="rate, shift", logy=True)
    resid = np.max(np.abs(rate + 2 * shifts.imag) / rate)
    return f"rows={delta.size} max|R+2Im dE|/R={resid:.2e}"


def _load_data(cfg) -> fitmod.SpectrumDataset:
    if not cfg.get("data"):
        raise InputError("--data is required")
    return fitmod.load_spectrum_csv(cfg["data"])


def _data_hash(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def cmd_fit_mqdt(run: Run) -> str:
    cfg = run.cfg
    model, run.hashes["model"] = resolve_model(cfg["model"])
    data = _load_data(cfg)
    run.hashes["data"] = _data_hash(cfg["data"])
    field = field_config(cfg)
    try:
        res = fitmod.fit_mu(data, model, field, n_starts=int(cfg["starts"]), seed=int(cfg["seed"]),
                            method=cfg["method"])
    except NotConverged as exc:
        if exc.result is not None:
            run.write_text("fit.json", exc.result.to_json() + "\n")
        raise
    fitted = fitmod.model_with_params(model, res.params)
    run.write_text("fit.json", res.to_json() + "\n")
    run.write_text("model_fit.json", fitted.to_json() + "\n")
    y = spec.photoionization_rate(data.delta_ghz, fitted, field)
    run.write_csv("fit_mqdt.csv", {"delta_ghz": data.delta_ghz, "gamma_ls": data.gamma_ls,
                                   "model_rate_per_s": y})
    run.write_svg("fit_mqdt.svg", [Series(data.delta_ghz, data.gamma_ls, "data"),
                                   Series(data.delta_ghz, y, "fit")],
                  xlabel="control detuning (GHz)", ylabel="rate (1/s)", logy=True)
    flag = " rank_deficient" if res.rank_deficient else ""
    return f"residual={res.residual_norm:.4e} iterations={res.n_iterations}{flag}"


def cmd_fit_two_level(run: Run) -> str:
    cfg = run.cfg
    data = _load_data(cfg)
    run.hashes["data"] = _data_hash(cfg["data"])
    init = spec.TwoLevelParams(Gamma=2 * math.pi * 1e9 * float(cfg["gamma_ghz"]),
                               Delta_plus=1e9 * float(cfg["delta_plus_ghz"]))
    res = fitmod.fit_two_level(data, init, A0=float(cfg["amplitude"]))
    run.write_text("fit.json", res.to_json() + "\n")
    g, dp, a = res.params
    y = fitmod.two_level_model(data.delta_ghz, g / 1e9, dp / 1e9, a)
    run.write_csv("fit_two_level.csv", {"delta_ghz": data.delta_ghz, "gamma_ls": data.gamma_ls,
                                        "model_rate_per_s": y})
    run.write_svg("fit_two_level.svg", [Series(data.delta_ghz, data.gamma_ls, "data"),
                                        Series(data.delta_ghz, y, "fit")],
                  xlabel="control detuning (GHz)", ylabel="rate (1/s)")
    return (f"Gamma/2pi={g / (2 * math.pi * 1e9):.4f} GHz Delta_plus={dp / 1e9:.4f} GHz "
            f"A={a:.4f}")


def _pulse(cfg) -> dyn.PulseConfig:
    base = dyn.PulseConfig(
        Omega_r=2 * math.pi * 1e6 * float(cfg["omega_r_mhz"]),
        Delta=2 * math.pi * 1e9 * float(cfg["delta_ghz"]),
        Gamma=2 * math.pi * 1e9 * float(cfg["gamma_ghz"]),
        F_g=float(cfg["fg"]),
        kappa=float(cfg["kappa"]),
        adjust=bool(cfg["adjust"]),
        d=float(cfg["dipole"]),
        U_int=2 * math.pi * 1e9 * float(cfg.get("u_int_ghz", 1.0)),
    )
    gamma_r = cfg.get("gamma_r")
    if gamma_r is None:
        gamma_r = dyn.calibrate_dephasing(float(cfg["target_pg"]), base)
    return replace(base, gamma_r=float(gamma_r))


def cmd_sim_rabi(run: Run) -> str:
    cfg = run.cfg
    pulse = _pulse(cfg)
    grid = parse_grid(cfg["ic"])
    pg = dyn.figure3a_curve(grid, pulse)
    run.write_csv("sim_rabi.csv", {"ic_w_cm2": grid, "p_g": pg})
    run.write_svg("sim_rabi.svg", [Series(grid, pg, "F_g P_g")] if grid.size > 1 else [],
                  xlabel="control intensity (W/cm^2)", ylabel="ground population")
    if cfg.get("times") is not None:
        t_us = parse_grid(cfg["times"])
        if np.any(t_us < 0):
            raise InputError("times must be non-negative")
        p = replace(pulse, I_c=float(grid[0]))
        sysm = dyn.build_single_atom(p)
        traj = dyn.evolve(sysm.H, sysm.collapse, dyn.pure_state(dyn.G), t_us * 1e-6)
        pops = np.real(np.array([np.diag(r) for r in traj]))
        run.write_csv("rabi_trace.csv", {"t_us": t_us, "p_g": pops[:, 0], "p_r": pops[:, 1],
                                         "p_rp": pops[:, 2], "p_d": pops[:, 3]})
    return f"gamma_r={pulse.gamma_r:.6g}/s p_g[{grid[0]:g}]={pg[0]:.4f} p_g[{grid[-1]:g}]={pg[-1]:.4f}"


def cmd_sim_blockade(run: Run) -> str:
    cfg = run.cfg
    pulse = _pulse(cfg)
    grid = parse_grid(cfg["ic"])
    curves = dyn.figure3b_curves(grid, pulse)
    run.write_csv("sim_blockade.csv", {"ic_w_cm2": grid, "f_exact": curves.f_exact,
                                       "f_bound": curves.f_bound, "f_gg": curves.f_gg})
    if grid.size > 1:
        run.write_svg("sim_blockade.svg", [Series(grid, curves.f_exact, "F exact"),
                                           Series(grid, curves.f_bound, "F bound"),
                                           Series(grid, curves.f_gg, "F_gg")],
                      xlabel="control intensity (W/cm^2)", ylabel="fidelity")
    return (f"gamma_r={pulse.gamma_r:.6g}/s f_bound[{grid[0]:g}]={curves.f_bound[0]:.4f} "
            f"f_gg[{grid[-1]:g}]={curves.f_gg[-1]:.4f}")


def cmd_fidelity(run: Run) -> str:
    p_tg = parse_pops(run.cfg["pops_tg"])
    p_2tg = parse_pops(run.cfg["pops_2tg"])
    bound = dyn.bell_bound(p_tg, p_2tg)
    run.write_csv("fidelity.csv", {"bound": [bound]})
    return f"bound={bound:.4f}"


def cmd_error_budget(run: Run) -> str:
    cfg = run.cfg
    eps = parse_grid(cfg["eps"], log_default=True)
    if eps.size < 2:
        raise InputError("need at least two eps values")
    names = {"ground": ["ground"], "rydberg": ["rydberg"], "both": ["ground", "rydberg"]}
    if cfg["scheme"] not in names:
        raise InputError(f"unknown scheme {cfg['scheme']!r}")
    parts = []
    series = []
    for name in names[cfg["scheme"]]:
        scheme = eb.Scheme(eb.Variant(name))
        table = eb.budget_table(scheme, eps, float(cfg["gamma"]), float(cfg["gamma_r"]))
        le = np.log(table["eps"])
        table["slope_omega_c_sq"] = np.gradient(np.log(table["omega_c_sq_opt"]), le)
        table["slope_delta"] = np.gradient(np.log(table["delta_opt"]), le)
        run.write_csv(f"error_budget_{name}.csv", table)
        fit_x = np.polyfit(le, np.log(table["omega_c_sq_opt"]), 1)[0]
        fit_d = np.polyfit(le, np.log(table["delta_opt"]), 1)[0]
        parts.append(f"{name}: slope_omega_c_sq={fit_x:.3f} slope_delta={fit_d:.3f}")
        series += [Series(eps, table["omega_c_sq_opt"], f"{name} Omega_c^2"),
                   Series(eps, table["delta_opt"], f"{name} Delta")]
    run.write_svg("error_budget.svg", series, xlabel="eps", ylabel="optimal setting",
                  logx=True, logy=True)
    return "; ".join(parts)


COMMANDS = {
    "spectrum": cmd_spectrum,
    "lightshift": cmd_lightshift,
    "fit-mqdt": cmd_fit_mqdt,
    "fit-two-level": cmd_fit_two_level,
    "sim-rabi": cmd_sim_rabi,
    "sim-blockade": cmd_sim_blockade,
    "fidelity": cmd_fidelity,
    "error-budget": cmd_error_budget,
}


def _add_field_flags(p):
    p.add_argument("--model", help="channel model JSON (default: bundled table_s2.json)")
    p.add_argument("--ic", type=float, help="control intensity, W/cm^2")
    p.add_argument("--eo", type=float, help="control field amplitude, atomic units")


def _add_sim_flags(p):
    p.add_argument("--ic", help="intensity grid start:stop:step (W/cm^2)")
    p.add_argument("--delta-ghz", type=float, help="control detuning (GHz)")
    p.add_argument("--omega-r-mhz", type=float, help="Rydberg Rabi frequency / 2pi (MHz)")
    p.add_argument("--gamma-ghz", type=float, help="6p1/2 75s linewidth / 2pi (GHz)")
    p.add_argument("--target-pg", type=float, help="P_g after a pi pulse used to calibrate gamma_r")
    p.add_argument("--gamma-r", type=float, help="dephasing rate (1/s); skips calibration")
    p.add_argument("--kappa", type=float, help="light-shift scale factor")
    p.add_argument("--no-kappa", dest="adjust", action="store_false", help="disable the kappa rescaling")
    p.add_argument("--fg", type=float, help="ground-state detection fidelity")
    p.add_argument("--dipole", type=float, help="control transition dipole (e a0)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rydctl", description=__doc__.splitlines()[0],
                                     argument_default=argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--config", help="JSON file of settings; flags override it")
    common.add_argument("--out", help="output directory")
    common.add_argument("--svg", action="store_true", help="also write an SVG plot")
    common.add_argument("--seed", type=int, help="seed for stochastic steps")

    p = sub.add_parser("spectrum", parents=[common], help="photoionization rate and light shift",
                       argument_default=argparse.SUPPRESS)
    _add_field_flags(p)
    p.add_argument("--delta", help="detuning grid start:stop:step (GHz)")
    p.add_argument("--no-lightshift", dest="lightshift", action="store_false",
                   help="skip the dispersion integral")

    p = sub.add_parser("lightshift", parents=[common], help="light shift against the two-level model",
                       argument_default=argparse.SUPPRESS)
    _add_field_flags(p)
    p.add_argument("--delta", help="detuning grid start:stop:step (GHz)")

    p = sub.add_parser("fit-mqdt", parents=[common], help="fit the mu matrices to a spectrum",
                       argument_default=argparse.SUPPRESS)
    _add_field_flags(p)
    p.add_argument("--data", help="CSV of delta_ghz,gamma_ls[,sigma]")
    p.add_argument("--starts", type=int, help="number of seeded starts")
    p.add_argument("--method", choices=["lm", "nelder-mead"])

    p = sub.add_parser("fit-two-level", parents=[common], help="fit a two-level line",
                       argument_default=argparse.SUPPRESS)
    p.add_argument("--data", help="CSV of delta_ghz,gamma_ls[,sigma]")
    p.add_argument("--gamma-ghz", type=float, help="initial Gamma / 2pi (GHz)")
    p.add_argument("--delta-plus-ghz", type=float, help="initial line offset (GHz)")
    p.add_argument("--amplitude", type=float, help="initial amplitude")

    p = sub.add_parser("sim-rabi", parents=[common], help="single-atom pi pulse vs intensity",
                       argument_default=argparse.SUPPRESS)
    _add_sim_flags(p)
    p.add_argument("--times", help="time grid (us) for a trace at the first intensity")

    p = sub.add_parser("sim-blockade", parents=[common], help="two-atom Bell fidelity vs intensity",
                       argument_default=argparse.SUPPRESS)
    _add_sim_flags(p)
    p.add_argument("--u-int-ghz", type=float, help="blockade shift / 2pi (GHz)")

    p = sub.add_parser("fidelity", parents=[common], help="Bell-state fidelity lower bound",
                       argument_default=argparse.SUPPRESS)
    p.add_argument("--pops-tg", help="populations at t_g as gr,rg,rr,gg")
    p.add_argument("--pops-2tg", help="populations at 2 t_g as gr,rg,rr,gg")

    p = sub.add_parser("error-budget", parents=[common], help="optimal control settings vs eps",
                       argument_default=argparse.SUPPRESS)
    p.add_argument("--scheme", choices=["ground", "rydberg", "both"])
    p.add_argument("--eps", help="eps grid; start:stop is log-spaced")
    p.add_argument("--gamma", type=float, help="linewidth Gamma (sets the units)")
    p.add_argument("--gamma-r", type=float, help="Rydberg decay rate, same units")
    return parser


def resolve_config(command: str, flags: dict) -> dict:
    cfg = {**COMMON, **DEFAULTS[command]}
    path = flags.pop("config", None)
    if path is not None:
        try:
            loaded = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise InputError("config must be a JSON object")
        loaded = {k.replace("-", "_"): v for k, v in loaded.items()}
        unknown = set(loaded) - set(cfg)
        if unknown:
            raise InputError(f"unknown config keys for {command}: {sorted(unknown)}")
        cfg.update(loaded)
    cfg.update(flags)
    return cfg


def _attach_negative_values(argv):
    """Turn ``--delta -35:10:0.05`` into ``--delta=-35:10:0.05`` so argparse keeps the value."""
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        nxt = argv[i + 1] if i + 1 < len(argv) else ""
        if (tok.startswith("--") and "=" not in tok and len(nxt) > 1 and nxt[0] == "-"
                and (nxt[1].isdigit() or nxt[1] == ".")):
            out.append(f"{tok}={nxt}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def run(argv=None) -> int:
    parser = build_parser()
    argv = _attach_negative_values(sys.argv[1:] if argv is None else list(argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    flags = vars(args)
    command = flags.pop("command", None)
    if command is None:
        parser.print_usage(sys.stderr)
        return 2
    try:
        cfg = resolve_config(command, flags)
        job = Run(command, cfg)
        summary = COMMANDS[command](job)
        job.finish()
    except (InputError, OSError) as exc:
        print(f"rydctl {command}: error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"rydctl {command}: numerical failure: {exc}", file=sys.stderr)
        return 3
    print(summary)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
