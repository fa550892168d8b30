import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rydctl.error_budget import (Scheme, Variant, addressing_errors, budget_table,
                                 intrinsic_rabi, optimize_control, scaling_exponent)
from rydctl.errors import InputError, ZeroShift

EPS_GRID = np.logspace(-4, -2, 12)


class TestAddressingErrors:
    def test_arithmetic(self):
        e = addressing_errors(Scheme.ground(), 1.0, 10.0, 100.0, 1.0)
        assert e.eps_rot == pytest.approx(16.0)
        assert e.eps_sc == pytest.approx(0.0025 * 2 * math.pi)
        r = addressing_errors(Scheme.rydberg(), 1.0, 10.0, 100.0, 1.0)
        assert r.eps_sc == pytest.approx(0.0025 * 2 * math.pi * 16.0)

    def test_power_counting(self):
        a = addressing_errors(Scheme.ground(), 1.0, 10.0, 100.0, 1.0)
        b = addressing_errors(Scheme.ground(), 1.0, 20.0, 100.0, 1.0)
        assert b.eps_rot == pytest.approx(a.eps_rot / 16)
        assert b.eps_sc == pytest.approx(4 * a.eps_sc)
        a = addressing_errors(Scheme.rydberg(), 1.0, 10.0, 100.0, 1.0)
        b = addressing_errors(Scheme.rydberg(), 1.0, 20.0, 100.0, 1.0)
        assert b.eps_sc == pytest.approx(a.eps_sc / 4)

    def test_explicit_gate_time(self):
        a = addressing_errors(Scheme.ground(), 1.0, 10.0, 100.0, 1.0, t_g=1.0)
        assert a.eps_sc == pytest.approx(0.0025)

    def test_zero_shift(self):
        with pytest.raises(ZeroShift):
            addressing_errors(Scheme.ground(), 1.0, 0.0, 100.0, 1.0)

    def test_scheme_validation(self):
        with pytest.raises(InputError):
            Scheme(Variant.GROUND, c_rot=0.0)
        assert Scheme("rydberg").variant is Variant.RYDBERG

    def test_rydberg_monotone_in_control(self):
        om = np.logspace(0, 4, 200)
        e = addressing_errors(Scheme.rydberg(), 1.0, om, 1e3, 1.0)
        assert np.all(np.diff(e.eps_rot) < 0) and np.all(np.diff(e.eps_sc) < 0)

    def test_ground_unique_interior_minimum(self):
        om = np.logspace(0, 4, 2001)
        e = addressing_errors(Scheme.ground(), 1.0, om, 1e3, 1.0)
        slope = np.sign(np.diff(e.eps_rot + e.eps_sc))
        assert np.count_nonzero(np.diff(slope)) == 1 and slope[0] < 0 < slope[-1]

    @given(st.floats(1e-3, 1e3), st.floats(0.1, 10), st.floats(1, 1e3), st.floats(1e3, 1e6))
    def test_scale_invariance(self, s, om_r, om_c, delta):
        for scheme in (Scheme.ground(), Scheme.rydberg()):
            a = addressing_errors(scheme, om_r, om_c, delta, 1.0)
            b = addressing_errors(scheme, s * om_r, s * om_c, s * delta, s)
            assert b.eps_rot == pytest.approx(a.eps_rot, rel=1e-9)
            assert b.eps_sc == pytest.approx(a.eps_sc, rel=1e-9)


class TestOptimize:
    @pytest.mark.parametrize("scheme", [Scheme.ground(), Scheme.rydberg()])
    @pytest.mark.parametrize("eps", [1e-4, 1e-3, 1e-2])
    def test_meets_target(self, scheme, eps):
        o = optimize_control(scheme, eps, 1.0, 1e-3)
        assert abs(o.eps_rot + o.eps_sc - eps) < 1e-9 * max(1.0, eps)
        assert o.eps_total == pytest.approx(eps, rel=1e-9)
        assert o.Omega_r == pytest.approx(intrinsic_rabi(eps, 1e-3))

    def test_ground_is_minimum_at_fixed_detuning(self):
        o = optimize_control(Scheme.ground(), 1e-3, 1.0, 1e-3)
        om = o.Omega_c_opt * np.linspace(0.9, 1.1, 2001)
        e = addressing_errors(Scheme.ground(), o.Omega_r, om, o.Delta_opt, 1.0)
        assert np.argmin(e.eps_rot + e.eps_sc) == 1000
        assert o.eps_sc == pytest.approx(2 * o.eps_rot, rel=1e-9)

    def test_ground_detuning_law(self):
        a = optimize_control(Scheme.ground(), 1e-3, 1.0, 1e-3)
        b = optimize_control(Scheme.ground(), 0.25e-3, 1.0, 1e-3)
        assert b.Delta_opt / a.Delta_opt == pytest.approx(8.0, abs=1e-9)

    def test_rydberg_intensity_law(self):
        a = optimize_control(Scheme.rydberg(), 1e-3, 1.0, 1e-3)
        b = optimize_control(Scheme.rydberg(), 0.5e-3, 1.0, 1e-3)
        assert b.omega_c_sq / a.omega_c_sq == pytest.approx(4.0, abs=1e-9)

    @given(st.floats(1e-3, 1e3))
    def test_scale_invariant_errors(self, s):
        for scheme in (Scheme.ground(), Scheme.rydberg()):
            a = optimize_control(scheme, 1e-3, 1.0, 1e-3)
            b = optimize_control(scheme, 1e-3, s, s * 1e-3)
            assert b.Delta_opt == pytest.approx(s * a.Delta_opt, rel=1e-9)
            assert b.eps_rot == pytest.approx(a.eps_rot, rel=1e-9)

    def test_domain(self):
        with pytest.raises(InputError):
            optimize_control(Scheme.ground(), 1.5, 1.0, 1e-3)
        with pytest.raises(InputError):
            optimize_control(Scheme.ground(), 1e-3, -1.0, 1e-3)


class TestScaling:
    def test_exponents(self):
        g = scaling_exponent(Scheme.ground(), EPS_GRID)
        r = scaling_exponent(Scheme.rydberg(), EPS_GRID)
        assert g.omega_c_sq == pytest.approx(-3.0, abs=0.05)
        assert g.delta == pytest.approx(-1.5, abs=0.05)
        assert r.omega_c_sq == pytest.approx(-2.0, abs=0.05)
        assert r.delta == pytest.approx(-0.5, abs=0.05)

    def test_exponents_independent_of_constants(self):
        s = Scheme(Variant.GROUND, c_rot=3.0, c_sc=0.2)
        assert scaling_exponent(s, EPS_GRID).omega_c_sq == pytest.approx(-3.0, abs=1e-9)

    def test_table_columns(self):
        t = budget_table(Scheme.ground(), EPS_GRID)
        assert list(t) == ["eps", "delta_opt", "omega_c_sq_opt", "eps_rot", "eps_sc"]
        assert np.all(np.concatenate(list(t.values())) >= 0)
