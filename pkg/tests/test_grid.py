import json

import numpy as np
import pytest

from hyperhup.grid import (
    Grid,
    GridFunction,
    analytic_projection,
    derivative,
    hermite_fixture,
    hilbert_transform,
    inversion_pullback,
    make_fejer_example,
    poisson_kernel_fixture,
    weighted_norms,
)
from hyperhup.transforms import fourier_pi


@pytest.fixture(scope="module")
def grid():
    return Grid(32.0, 2**13)


class TestGrid:
    def test_zero_is_a_point(self, grid):
        assert grid.points[grid.zero_index] == 0.0

    def test_rejects_odd_count(self):
        with pytest.raises(ValueError):
            Grid(4.0, 17)

    def test_rejects_nonpositive_length(self):
        with pytest.raises(ValueError):
            Grid(0.0, 64)


class TestGridFunction:
    def test_immutable(self, grid):
        f = hermite_fixture(1, grid)
        with pytest.raises(AttributeError):
            f.values = None
        with pytest.raises(ValueError):
            f.values[0] = 1.0

    def test_rejects_nonfinite(self, grid):
        vals = np.zeros(grid.point_count)
        vals[3] = np.inf
        with pytest.raises(ValueError):
            GridFunction(grid, vals)

    def test_json_round_trip(self, grid):
        f = hermite_fixture(2, grid)
        d = json.loads(json.dumps(f.to_json_dict()))
        g = GridFunction.from_json_dict(d)
        assert g.grid == f.grid
        assert np.array_equal(g.values, f.values)


class TestWeightedNorms:
    def test_zero_function(self, grid):
        rep = weighted_norms(GridFunction(grid, np.zeros(grid.point_count)))
        assert (rep.l2, rep.l2_weight_t2, rep.l2_inv_weight, rep.h1_semi, rep.l1) == (
            0.0,
            0.0,
            0.0,
            0.0,
            0.0,
        )

    def test_gaussian_l2(self):
        # ||e^{-pi t^2}||_2 = 2^{-1/4} via int e^{-2 pi t^2} = 1/sqrt(2)
        g = Grid(16.0, 2**14)
        f = GridFunction.from_callable(g, lambda t: np.exp(-np.pi * t * t))
        assert weighted_norms(f).l2 == pytest.approx(2.0 ** (-0.25), abs=1e-8)

    def test_inv_weight_closed_form(self, grid):
        # f = t e^{-pi t^2/2}: int |f|^2/|t| = int |t| e^{-pi t^2} = 1/pi
        f = hermite_fixture(1, grid)
        assert weighted_norms(f).l2_inv_weight == pytest.approx(1.0 / np.pi, rel=1e-6)

    def test_inv_weight_flagged_infinite(self, grid):
        f = GridFunction.from_callable(grid, lambda t: np.exp(-np.pi * t * t / 2))
        rep = weighted_norms(f)
        assert not rep.inv_weight_finite
        assert rep.l2_inv_weight == np.inf

    def test_embedding_inequality(self, grid):
        # the dt/|t| mass interpolates the L2 and H1 norms:
        # int |f|^2/|t| <= 2 sqrt2 ||f||_2 ||f'||_2 for f(0) = 0 (the
        # sufficient constant from optimizing the two-piece split)
        for k in (1, 2, 3):
            rep = weighted_norms(hermite_fixture(k, grid))
            assert rep.l2_inv_weight <= 2.0 * np.sqrt(2.0) * rep.l2 * rep.h1_semi


class TestDerivative:
    def test_gaussian(self, grid):
        f = GridFunction.from_callable(grid, lambda t: np.exp(-np.pi * t * t / 2))
        df = derivative(f)
        expected = -np.pi * grid.points * np.exp(-np.pi * grid.points**2 / 2)
        assert np.max(np.abs(df.values - expected)) < 1e-6

    def test_zero(self, grid):
        df = derivative(GridFunction(grid, np.zeros(grid.point_count)))
        assert np.max(np.abs(df.values)) == 0.0

    def test_windowed_sine_interior(self, grid):
        from hyperhup.grid import plateau_window

        w = plateau_window(grid, 10.0, 6.0)
        f = GridFunction(grid, np.sin(np.pi * grid.points) * w)
        df = derivative(f, warn=False)
        m = np.abs(grid.points) < 8.0
        expected = np.pi * np.cos(np.pi * grid.points[m])
        assert np.max(np.abs(df.values[m] - expected)) < 1e-5

    def test_warns_without_decay(self, grid):
        f = GridFunction(grid, np.ones(grid.point_count))
        with pytest.warns(UserWarning):
            derivative(f)


class TestInversionPullback:
    @pytest.mark.filterwarnings("ignore::UserWarning")
    def test_fixed_point(self, grid):
        f = GridFunction.from_callable(grid, lambda t: 1.0 / (1.0 + t * t))
        phi = inversion_pullback(f)
        m = (np.abs(grid.points) > 0.5) & (np.abs(grid.points) < grid.half_length / 2)
        assert np.max(np.abs(phi.values[m] - f.values[m])) < 1e-6

    def test_zero(self, grid):
        phi = inversion_pullback(GridFunction(grid, np.zeros(grid.point_count)))
        assert phi.max_abs() == 0.0

    @pytest.mark.filterwarnings("ignore::UserWarning")
    def test_poisson_kernel_maps_to_poisson_kernel(self, grid):
        z = 0.7 + 0.9j
        phi = inversion_pullback(poisson_kernel_fixture(grid, z))
        w = 1.0 / np.conj(z)
        expected = poisson_kernel_fixture(grid, w)
        assert np.max(np.abs(phi.values - expected.values)) < 1e-6

    @pytest.mark.filterwarnings("ignore::UserWarning")
    def test_involution_on_rational_decay(self, grid):
        f = GridFunction.from_callable(grid, lambda t: 1.0 / (1.0 + t * t))
        back = inversion_pullback(inversion_pullback(f))
        m = (np.abs(grid.points) > 0.5) & (np.abs(grid.points) < grid.half_length / 2)
        scale = np.max(np.abs(f.values[m]))
        assert np.max(np.abs(back.values[m] - f.values[m])) < 1e-4 * scale

    def test_rejects_small_grids(self):
        g = Grid(1.0, 64)
        with pytest.raises(ValueError):
            inversion_pullback(GridFunction(g, np.ones(64)))


class TestHilbert:
    def test_cosine_to_sine(self):
        from hyperhup.grid import plateau_window

        g = Grid(32.0, 2**13)
        w = plateau_window(g, 12.0, 8.0)
        f = GridFunction(g, np.cos(np.pi * g.points) * w)
        hf = hilbert_transform(f)
        m = np.abs(g.points) < 10.0
        expected = np.sin(np.pi * g.points[m])
        assert np.max(np.abs(hf.values[m] - expected)) < 2e-3

    def test_zero(self, grid):
        hf = hilbert_transform(GridFunction(grid, np.zeros(grid.point_count)))
        assert hf.max_abs() == 0.0

    @pytest.mark.filterwarnings("ignore::UserWarning")
    def test_conjugate_poisson(self):
        # the O(L^-4) kernel term grows like t^3; a 64-half-length grid keeps
        # the whole |t| < 8 interior below 1e-4
        g = Grid(64.0, 2**14)
        f = GridFunction.from_callable(g, lambda t: 1.0 / (1.0 + t * t))
        hf = hilbert_transform(f, line_corrections=True)
        m = np.abs(g.points) < 8.0
        expected = g.points[m] / (1.0 + g.points[m] ** 2)
        assert np.max(np.abs(hf.values[m] - expected)) < 1e-4

    def test_double_transform_is_minus_identity(self, grid):
        f = hermite_fixture(1, grid)
        hh = hilbert_transform(hilbert_transform(f))
        assert np.max(np.abs(hh.values + f.values)) < 1e-6 * f.max_abs()


class TestAnalyticProjection:
    def test_cosine(self):
        from hyperhup.grid import plateau_window

        g = Grid(32.0, 2**13)
        w = plateau_window(g, 12.0, 8.0)
        f = GridFunction(g, np.cos(np.pi * g.points) * w)
        p = analytic_projection(f)
        m = np.abs(g.points) < 10.0
        expected = 0.5 * np.exp(1j * np.pi * g.points[m])
        assert np.max(np.abs(p.values[m] - expected)) < 2e-3

    def test_negative_frequency_mass(self, grid):
        # spectral mass on the grid's own modes (the analytic signal has a
        # genuine 1/t tail, so any windowed continuous transform leaks)
        from scipy.fft import fft

        f = GridFunction.from_callable(grid, lambda t: np.exp(-np.pi * t * t / 2))
        p = analytic_projection(f)
        modes = fft(p.values)
        j = np.fft.fftfreq(grid.point_count, d=1.0 / grid.point_count)
        ratio = np.sqrt(
            np.sum(np.abs(modes[j < 0]) ** 2) / np.sum(np.abs(modes) ** 2)
        )
        assert ratio < 1e-6


class TestFejerExample:
    def test_zero_terms(self, grid):
        f = make_fejer_example(0, grid)
        assert f.max_abs() == 0.0

    def test_nyquist_guard(self):
        g = Grid(272.0, 2**18)
        with pytest.raises(ValueError):
            make_fejer_example(3, g)

    @pytest.mark.filterwarnings("ignore::UserWarning")
    def test_construction_and_transform_identity(self):
        # psi-hat equals sqrt2 f0(xi) sin(pi(xi-1))/(pi(xi-1)) by construction
        g = Grid(272.0, 2**18)
        psi = make_fejer_example(2, g)
        assert weighted_norms(psi).l2 > 0
        ph = fourier_pi(psi, dealias=False)
        xi = g.points

        def f0(x):
            out = np.zeros_like(x)
            for n in (1, 2):
                k = 2 ** (n**3) + 1
                out += np.sin(k * np.pi * np.abs(np.mod(x + 1, 2) - 1)) / n**2
            return out

        m = (np.abs(xi) > 2) & (np.abs(xi) < 260)
        expected = (
            np.sqrt(2.0)
            * f0(xi[m])
            * np.sin(np.pi * (xi[m] - 1))
            / (np.pi * (xi[m] - 1))
        )
        sup = np.max(np.abs(expected))
        assert np.max(np.abs(ph.values[m] - expected)) < 1e-2 * sup

    def test_top_coefficient_sits_near_257(self):
        from hyperhup.grid import _fejer_coefficient

        m = np.arange(-271, 272)
        c = _fejer_coefficient(m, 2)
        high = np.abs(m) > 100
        assert abs(m[high][np.argmax(np.abs(c[high]))]) in (256, 258)
