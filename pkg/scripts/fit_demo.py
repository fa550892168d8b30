"""Fit synthetic spectra: a noisy two-level line, then the mu matrices from a multi-start."""

import sys

import numpy as np

from rydctl.fit import (fit_mu, fit_two_level, model_with_params, synthetic_mu_spectrum,
                        synthetic_two_level)
from rydctl.mqdt import default_model
from rydctl.spectrum import FieldConfig, TwoLevelParams, photoionization_rate


def main(noise="0.02", starts="8"):
    noise, starts = float(noise), int(starts)
    truth = TwoLevelParams()
    res = fit_two_level(synthetic_two_level(np.linspace(-5, 4, 60), truth, noise=noise, seed=1),
                        TwoLevelParams(truth.Gamma * 1.2, truth.Delta_plus * 0.8))
    for name, value, err, ref in zip(res.names, res.params, res.stderr(),
                                     (truth.Gamma, truth.Delta_plus, 1.0)):
        print(f"{name:10s} {value:+.5e} +- {err:.1e}  (truth {ref:+.5e})")

    model, field = default_model(), FieldConfig(I_c=600.0)
    delta = np.arange(-35.0, 10.01, 0.5)
    data = synthetic_mu_spectrum(delta, model, field, noise=noise, seed=1)
    fit = fit_mu(data, model, field, n_starts=starts, seed=0)
    rel = photoionization_rate(delta, model_with_params(model, fit.params), field) / data.gamma_ls - 1
    print(f"mu fit: {fit.n_iterations} iterations, rms relative residual {np.sqrt(np.mean(rel**2)):.3f}")
    print(fit.to_json())


if __name__ == "__main__":
    main(*sys.argv[1:])
