"""Photoionization rate and light shift of 6s75s 3S1 across the shake-up spectrum.

Writes ``shakeup_spectrum.csv`` and ``shakeup_spectrum.svg`` to the output
directory (first argument, default ``out``).
"""

import csv
import sys
from pathlib import Path

import numpy as np

from rydctl.mqdt import default_model
from rydctl.plotting import Series, render_svg
from rydctl.spectrum import FieldConfig, TwoLevelParams, rabi_from_intensity, spectrum_table, two_level_response


def main(out="out"):
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    model, field = default_model(), FieldConfig(I_c=600.0)
    delta = np.round(np.arange(-35.0, 10.0 + 1e-9, 0.1), 10)
    table = spectrum_table(delta, model, field)
    tl = TwoLevelParams()
    two_level = two_level_response(rabi_from_intensity(field.I_c, tl.d), 2 * np.pi * 1e9 * delta, tl.Gamma)
    table["two_level_rate_per_s"] = two_level.Gamma_LS

    with open(out / "shakeup_spectrum.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(table)
        w.writerows(zip(*(map(repr, map(float, col)) for col in table.values())))
    svg = render_svg([Series(delta, table["rate_per_s"], "MQDT rate"),
                      Series(delta, table["two_level_rate_per_s"], "two-level rate")],
                     "control detuning (GHz)", "rate (1/s)", "6s75s 3S1 photoionization", logy=True)
    (out / "shakeup_spectrum.svg").write_text(svg)

    i = np.argmin(np.abs(delta + 18.7))
    print(f"peak rate {table['rate_per_s'].max():.3e} /s at {delta[np.argmax(table['rate_per_s'])]:.1f} GHz")
    print(f"two-level / MQDT rate at -18.7 GHz: {table['two_level_rate_per_s'][i] / table['rate_per_s'][i]:.2f}")


if __name__ == "__main__":
    main(*sys.argv[1:])
