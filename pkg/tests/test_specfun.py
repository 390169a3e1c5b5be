import numpy as np
import pytest
from scipy.special import gamma as scipy_gamma
from scipy.special import jv as scipy_jv

from hyperhup.specfun import (
    BesselOrder,
    bessel_j,
    bessel_uniform_bound_check,
    e2_factor,
    gamma_fn,
    gautschi_check,
)


class TestBesselOrder:
    def test_representable_range(self):
        BesselOrder(1)  # nu = 1/2
        BesselOrder(2)  # nu = 1
        for d in range(1, 13):
            BesselOrder(d)  # nu = d/2

    def test_rejects_bad_orders(self):
        with pytest.raises(ValueError):
            BesselOrder(0)
        with pytest.raises(ValueError):
            BesselOrder(25)
        with pytest.raises(TypeError):
            BesselOrder(1.5)


class TestBesselJ:
    def test_j1_at_zero(self):
        assert bessel_j(1, 0.0) == 0.0

    def test_half_order_closed_form(self):
        # J_{1/2}(x) = sqrt(2/(pi x)) sin x; at x = pi/2 the value is 2/pi
        x = np.pi / 2
        assert bessel_j(0.5, x) == pytest.approx(2.0 / np.pi, rel=1e-12)

    def test_first_j1_root(self):
        # root bracketed by the series evaluation itself
        from scipy.optimize import brentq

        root = brentq(lambda x: bessel_j(1, x), 3.0, 4.5, xtol=1e-13)
        assert root == pytest.approx(3.8317059702, abs=1e-8)
        assert abs(bessel_j(1, 3.8317059702)) < 1e-8

    @pytest.mark.parametrize("twice", [1, 2, 3, 4, 8, 12, 24])
    def test_against_scipy(self, twice):
        rng = np.random.default_rng(twice)
        x = np.concatenate(
            [rng.uniform(0, 16, 300), rng.uniform(16, 64, 300), rng.uniform(64, 200, 100)]
        )
        mine = bessel_j(BesselOrder(twice), x)
        ref = scipy_jv(twice / 2.0, x)
        low = x <= 64
        # relative against the local envelope (plain relative error is
        # meaningless at the zeros), absolute beyond 64
        env = np.sqrt(2.0 / (np.pi * np.maximum(x, max(twice / 2.0, 0.5))))
        assert np.max(np.abs(mine - ref)[low] / env[low]) < 1e-12
        assert np.max(np.abs(mine - ref)[~low]) < 1e-10

    def test_magnitude_bound(self):
        # |J_nu| <= 1 on (0, 100] for every representable order
        x = np.linspace(1e-3, 100.0, 10**4)
        for twice in range(1, 25):
            assert np.max(np.abs(bessel_j(BesselOrder(twice), x))) <= 1.0 + 1e-12

    def test_three_term_recurrence(self):
        x = np.linspace(0.05, 100.0, 10**4)
        for twice in range(3, 23):
            nu = twice / 2.0
            lhs = bessel_j(BesselOrder(twice - 2), x) + bessel_j(
                BesselOrder(twice + 2), x
            )
            rhs = (2.0 * nu / x) * bessel_j(BesselOrder(twice), x)
            assert np.max(np.abs(lhs - rhs)) < 1e-9

    def test_rejects_negative_argument(self):
        with pytest.raises(ValueError):
            bessel_j(1, -1.0)


class TestGamma:
    def test_integers(self):
        assert gamma_fn(1.0) == 1.0
        assert gamma_fn(5.0) == 24.0

    def test_half(self):
        assert gamma_fn(0.5) == pytest.approx(np.sqrt(np.pi), rel=1e-13)

    def test_against_scipy(self):
        x = np.random.default_rng(0).uniform(0.01, 30.0, 500)
        vals = np.array([gamma_fn(v) for v in x])
        assert np.max(np.abs(vals / scipy_gamma(x) - 1.0)) < 1e-12

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            gamma_fn(0.0)
        with pytest.raises(ValueError):
            gamma_fn(-2.5)


class TestE2Factor:
    def test_normalization(self):
        assert e2_factor(0.0) == 1.0 + 0.0j

    def test_prescribed_zero(self):
        assert e2_factor(1.0) == 0.0 + 0.0j

    def test_complex_value(self):
        expected = (1 - 1j) * np.exp(1j - 0.5)
        assert e2_factor(1j) == pytest.approx(expected, rel=1e-14)

    def test_simple_zero_derivative(self):
        # |e2(1+h)/h - e2'(1)| -> 0 with e2'(1) = -e^{3/2}
        target = -np.exp(1.5)
        errs = [abs(e2_factor(1.0 + h) / h - target) for h in (1e-3, 1e-5)]
        assert errs[1] < errs[0]
        assert errs[1] < 1e-4


class TestBounds:
    def test_uniform_bessel_bound_examples(self):
        assert bessel_uniform_bound_check(4, 1.0)
        assert bessel_uniform_bound_check(1, 10.0)
        assert bessel_uniform_bound_check(2, 0.001)

    def test_uniform_bound_lattice(self):
        t = np.linspace(1e-2, 100.0, 10**4)
        for d in range(1, 13):
            lhs = (
                2.0 ** (d / 2.0)
                * gamma_fn(d / 2.0 + 1.0)
                * np.abs(bessel_j(BesselOrder(d), t))
                / t ** (d / 2.0 - 1.0)
            )
            assert np.all(lhs <= np.sqrt((2 * d + 4) / np.pi) + 1e-12)

    def test_uniform_bound_rejects_bad_dimension(self):
        with pytest.raises(ValueError):
            bessel_uniform_bound_check(13, 1.0)
        with pytest.raises(ValueError):
            bessel_uniform_bound_check(0, 1.0)

    def test_gautschi_examples(self):
        assert gautschi_check(0.0, 0.5)
        assert gautschi_check(3.0, 0.25)
        assert gautschi_check(10.0, 0.9)

    def test_gautschi_rejects_bad_s(self):
        with pytest.raises(ValueError):
            gautschi_check(1.0, 1.5)
        with pytest.raises(ValueError):
            gautschi_check(1.0, 0.0)
