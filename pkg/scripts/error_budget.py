"""Optimal control settings and their scaling with the target addressing error."""

import sys
from pathlib import Path

import numpy as np

from rydctl.error_budget import Scheme, budget_table, scaling_exponent
from rydctl.plotting import Series, render_svg


def main(out="out"):
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    eps = np.logspace(-4, -2, 21)
    series = []
    for scheme in (Scheme.ground(), Scheme.rydberg()):
        name = scheme.variant.value
        table = budget_table(scheme, eps)
        np.savetxt(out / f"error_budget_{name}.csv", np.column_stack(list(table.values())), delimiter=",",
                   header=",".join(table), comments="", fmt="%.17g")
        series.append(Series(eps, table["omega_c_sq_opt"], f"{name}: Omega_c^2"))
        s = scaling_exponent(scheme, eps)
        print(f"{name:8s} Omega_c^2 ~ eps^{s.omega_c_sq:.3f}, Delta ~ eps^{s.delta:.3f}")
    (out / "error_budget.svg").write_text(
        render_svg(series, "target error", "Omega_c^2 (Gamma^2 units)", logx=True, logy=True))


if __name__ == "__main__":
    main(*sys.argv[1:])
