import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rydctl import constants as const
from rydctl.errors import AboveThreshold, InputError, PoleOutsideWindow
from rydctl.mqdt import MuMatrix
from rydctl.spectrum import (FieldConfig, TwoLevelParams, complex_light_shift,
                             effective_adjustment, field_from_intensity, ionization_kernel,
                             kernel_by_block, kernel_from_nu, nstar_scaling, overlap_factor,
                             photoionization_rate, rabi_from_intensity, spectrum_table,
                             two_level_response)

TWO_PI_GHZ = 2 * math.pi * 1e9


def local_minima(x, y):
    i = np.where((y[1:-1] < y[:-2]) & (y[1:-1] <= y[2:]))[0] + 1
    return x[i], y[i]


class TestOverlap:
    @pytest.mark.parametrize("n", [-3, -2, -1, 1, 2, 3])
    def test_integer_offsets_vanish(self, n):
        assert overlap_factor(70.561 + n, 70.561) == 0.0

    def test_limit_at_nu0(self):
        limit = 70.561**1.5 / math.sqrt(6)
        assert overlap_factor(70.561, 70.561) == pytest.approx(limit, rel=1e-15)
        assert limit == pytest.approx(242.0, abs=0.05)
        for h in (1e-4, -1e-4, 1e-7, -1e-7):
            assert overlap_factor(70.561 + h, 70.561) == pytest.approx(limit, rel=1e-4)

    def test_series_branch_is_continuous(self):
        nu0 = 70.561
        h = np.array([0.999e-6, 1.001e-6])
        v = overlap_factor(nu0 + h, nu0)
        assert abs(v[1] - v[0]) / v[0] < 1e-10

    def test_direct_arithmetic(self):
        assert overlap_factor(0.5, 1.0) == pytest.approx(0.5 / (0.75 * math.pi * math.sqrt(6)), rel=1e-14)
        assert overlap_factor(0.5, 1.0) == pytest.approx(0.0866, abs=1e-4)

    def test_rejects_nonpositive(self):
        with pytest.raises(InputError):
            overlap_factor(-1.0, 70.0)


class TestKernel:
    def test_exact_zeros(self, model):
        peak = kernel_from_nu(np.linspace(60, 80, 20001), model).max()
        for n in (1, 2, 3):
            for s in (1, -1):
                assert kernel_from_nu(model.nu0 - s * n, model) < 1e-20 * peak

    def test_zero_coupling(self, model):
        m = model.with_mu(MuMatrix(0, np.zeros((2, 2))), MuMatrix(1, np.zeros((3, 3))))
        assert np.all(kernel_from_nu(np.linspace(60, 80, 101), m) == 0)

    def test_domain(self, model):
        with pytest.raises(AboveThreshold):
            ionization_kernel(model.thresholds.I_6p12 + 1, model)
        with pytest.raises(InputError):
            ionization_kernel(model.E_75_cm - 1, model)

    def test_energy_and_nu_agree(self, model):
        d = np.array([-20.0, -3.0, 4.0])
        E = model.energy_from_detuning(d)
        np.testing.assert_allclose(ionization_kernel(E, model),
                                   kernel_from_nu(model.nu_from_detuning(d), model), rtol=1e-8)

    def test_morphology(self, model):
        d = np.linspace(-35, 10, 2001)
        k = kernel_from_nu(model.nu_from_detuning(d), model)
        assert abs(d[np.argmax(k)]) < 3
        sat = (d > -30) & (d < -12)
        assert abs(d[sat][np.argmax(k[sat])] + 19) < 3

    def test_j1_fano_zeros(self, model):
        d = np.linspace(-35, -5, 30001)
        _, k1 = kernel_by_block(model.nu_from_detuning(d), model)
        xm, ym = local_minima(d, k1)
        zeros = xm[ym < 1e-6 * k1.max()]
        # overlap zeros (integer nu0 - nu) are shared with J=0; the Fano zeros are J=1 only
        k0, _ = kernel_by_block(model.nu_from_detuning(zeros), model)
        fano = zeros[k0 > 1e-6 * k1.max()]
        assert len(fano) >= 2
        assert np.min(np.abs(fano + 11)) < 3
        assert np.min(np.abs(fano + 31)) < 3

    @given(st.floats(-35, 10))
    def test_nonnegative(self, d):
        from rydctl.mqdt import default_model
        m = default_model()
        assert kernel_from_nu(m.nu_from_detuning(d), m) >= 0


class TestRate:
    def test_zero_field(self, model):
        assert photoionization_rate(-5.0, model, FieldConfig(E_o=0.0)) == 0

    def test_linear_in_intensity(self, model):
        r1 = photoionization_rate(-5.0, model, FieldConfig(I_c=300.0))
        r2 = photoionization_rate(-5.0, model, FieldConfig(I_c=600.0))
        assert r2 / r1 == pytest.approx(2.0, rel=1e-12)

    def test_field_config_exclusive(self):
        with pytest.raises(InputError):
            FieldConfig()
        with pytest.raises(InputError):
            FieldConfig(E_o=1e-5, I_c=10.0)
        with pytest.raises(InputError):
            FieldConfig(I_c=-1.0)

    def test_field_conversion(self):
        # 600 W/cm^2: E = sqrt(2 I / (eps0 c))
        E = field_from_intensity(600.0)
        assert E == pytest.approx(math.sqrt(2 * 6e6 / (8.8541878128e-12 * 299792458.0)), rel=1e-9)
        assert FieldConfig(I_c=600.0).field_au == pytest.approx(E / 5.14220674763e11, rel=1e-9)

    def test_same_order_as_two_level_off_resonance(self, model, field600):
        # both describe the same line; far from other resonances they agree within a factor 2
        tl = TwoLevelParams()
        om = rabi_from_intensity(600.0)
        g = two_level_response(om, -5 * TWO_PI_GHZ, tl.Gamma).Gamma_LS
        r = photoionization_rate(-5.0, model, field600)
        assert 0.5 < r / g < 2


class TestLightShift:
    def test_zero_field(self, model):
        assert complex_light_shift(-5.0, model, FieldConfig(E_o=0.0)) == 0

    @pytest.mark.parametrize("d", [-27.3, -12.0, -5.0, -1.0, 0.4, 4.5])
    def test_imaginary_part_is_rate(self, model, field600, d):
        r = photoionization_rate(d, model, field600)
        s = complex_light_shift(d, model, field600)
        assert abs(r + 2 * s.imag) / r < 1e-6

    def test_dispersive_sign_change(self, model, field600):
        lo = complex_light_shift(-3.0, model, field600).real
        hi = complex_light_shift(3.0, model, field600).real
        assert lo * hi < 0

    def test_window_converged(self, model, field600):
        a = complex_light_shift(-5.0, model, field600, check_window=False)
        b = complex_light_shift(-5.0, model, field600, window=30.0, check_window=False)
        assert abs(b.real - a.real) < 5e-3 * abs(a.real)

    def test_pole_outside_window(self, model, field600):
        with pytest.raises(PoleOutsideWindow):
            complex_light_shift(-300.0, model, field600, window=1.0)

    def test_far_detuned_matches_two_level_shift(self, model, field600):
        # far below the line only the main resonance matters: Re dE -> Omega^2/(4 Delta)
        tl = TwoLevelParams()
        s = complex_light_shift(-60.0, model, field600, window=15.0, check_window=False)
        two = two_level_response(rabi_from_intensity(600.0), -60 * TWO_PI_GHZ, tl.Gamma)
        assert s.real < 0 and 0.3 < s.real / two.Delta_LS < 3

    def test_spectrum_table_columns(self, model, field600):
        t = spectrum_table([-5.0, -4.0], model, field600)
        assert list(t) == ["delta_ghz", "rate_per_s", "lightshift_re_mhz", "lightshift_im_mhz"]
        np.testing.assert_allclose(-2 * t["lightshift_im_mhz"] * 2 * math.pi * 1e6, t["rate_per_s"], rtol=1e-6)


class TestTwoLevel:
    def test_resonance(self):
        r = two_level_response(3.0, 0.0, 2.0)
        assert r.Delta_LS == 0 and r.Gamma_LS == pytest.approx(9.0 / 2.0)

    @given(st.floats(1e3, 1e10), st.floats(-1e10, 1e10).filter(lambda x: abs(x) > 1), st.floats(1e3, 1e10))
    def test_identities(self, om, delta, gamma):
        r = two_level_response(om, delta, gamma)
        den = 4 * delta**2 + gamma**2
        assert r.Gamma_LS * den == pytest.approx(gamma * om**2, rel=1e-12)
        assert r.Delta_LS * den == pytest.approx(delta * om**2, rel=1e-12)
        assert r.Delta_LS / r.Gamma_LS == pytest.approx(delta / gamma, rel=1e-12)

    def test_full_power_numbers(self):
        # direct arithmetic: Omega = 2 pi 1.256 GHz, Delta = -2 pi 5 GHz, Gamma = 2 pi 0.92 GHz
        om, delta, gamma = 1.256 * TWO_PI_GHZ, -5 * TWO_PI_GHZ, 0.92 * TWO_PI_GHZ
        r = two_level_response(om, delta, gamma)
        den = 4 * 25 + 0.92**2
        assert r.Delta_LS / (2 * math.pi * 1e6) == pytest.approx(1.256**2 * -5 / den * 1e3, rel=1e-12)
        assert r.Delta_LS / (2 * math.pi * 1e6) == pytest.approx(-78.21, abs=0.01)
        assert r.Gamma_LS / (2 * math.pi * 1e6) == pytest.approx(14.40, abs=0.01)

    def test_gamma_positive(self):
        with pytest.raises(InputError):
            two_level_response(1.0, 1.0, 0.0)
        with pytest.raises(InputError):
            TwoLevelParams(Gamma=0.0)


class TestScalings:
    def test_nstar_75(self):
        s = nstar_scaling(75)
        assert s.nstar == pytest.approx(70.561)
        assert s.Gamma / TWO_PI_GHZ == pytest.approx(0.826, abs=1e-3)
        assert s.Delta_plus / 1e9 == pytest.approx(0.626, abs=5e-4)
        assert abs(s.Gamma / TWO_PI_GHZ / 0.92 - 1) < 0.15
        assert abs(s.Delta_plus / 1e9 / 0.73 - 1) < 0.20

    @given(st.integers(10, 200), st.integers(10, 200))
    def test_power_law(self, n1, n2):
        a, b = nstar_scaling(n1), nstar_scaling(n2)
        assert a.Gamma / b.Gamma == pytest.approx((b.nstar / a.nstar) ** 3, rel=1e-12)

    def test_nstar_domain(self):
        with pytest.raises(InputError):
            nstar_scaling(4)

    def test_rabi(self):
        assert rabi_from_intensity(0.0) == 0
        om = rabi_from_intensity(600.0, 1.46)
        hand = 1.46 * 1.602176634e-19 * 5.29177210903e-11 * math.sqrt(2 * 6e6 / (8.8541878128e-12 * 299792458.0)) / 1.054571817e-34
        assert om == pytest.approx(hand, rel=1e-9)
        assert om == pytest.approx(7.9e9, rel=0.01)
        assert om / TWO_PI_GHZ == pytest.approx(1.26, abs=0.01)
        assert rabi_from_intensity(4 * 37.0) == pytest.approx(2 * rabi_from_intensity(37.0), rel=1e-14)

    def test_adjustment_identity(self):
        assert effective_adjustment(5.0, 7.0, 1.0) == (5.0, 7.0)

    def test_adjustment_ratios(self):
        kappa, delta = 0.7, -5 * TWO_PI_GHZ
        gamma = 0.92 * TWO_PI_GHZ
        om2 = rabi_from_intensity(600.0) ** 2
        raw = two_level_response(math.sqrt(om2), delta, gamma)
        g2, i2 = effective_adjustment(gamma, 600.0, kappa)
        adj = two_level_response(rabi_from_intensity(i2), delta, g2)
        # exact ratio kappa (4 D^2 + G^2)/(4 D^2 + G^2/kappa^2)
        x = (gamma / delta) ** 2
        assert adj.Delta_LS / raw.Delta_LS == pytest.approx(kappa * (4 + x) / (4 + x / kappa**2), rel=1e-12)
        assert adj.Delta_LS / raw.Delta_LS == pytest.approx(0.6939, abs=1e-4)
        assert adj.Gamma_LS / raw.Gamma_LS == pytest.approx(1.0, abs=0.02)
        far = two_level_response(rabi_from_intensity(i2), 100 * delta, g2).Delta_LS
        assert far / two_level_response(math.sqrt(om2), 100 * delta, gamma).Delta_LS == pytest.approx(kappa, abs=1e-5)

    def test_adjustment_on_resonance(self):
        g2, i2 = effective_adjustment(1.0, 1.0, 0.7)
        raw = two_level_response(rabi_from_intensity(1.0), 0.0, 1.0).Gamma_LS
        adj = two_level_response(rabi_from_intensity(i2), 0.0, g2).Gamma_LS
        assert adj / raw == pytest.approx(0.49, rel=1e-12)

    def test_adjustment_domain(self):
        with pytest.raises(InputError):
            effective_adjustment(1.0, 1.0, 0.0)
