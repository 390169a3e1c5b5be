"""Sampled-function infrastructure: uniform symmetric grids, the weighted
norms attached to the function classes in play, spectral derivatives, the
discrete Hilbert transform, the t -> 1/t pullback, and fixture generators
used across the test and certificate suites.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.fft import fft, ifft
from scipy.interpolate import CubicSpline

__all__ = [
    "NumericsWarning",
    "Grid",
    "GridFunction",
    "NormReport",
    "weighted_norms",
    "derivative",
    "inversion_pullback",
    "hilbert_transform",
    "analytic_projection",
    "make_fejer_example",
    "hermite_fixture",
    "bump_fixture",
    "gauss_bump_fixture",
    "poisson_kernel_fixture",
    "plateau_window",
]

DEFAULT_TOL_ZERO = 1e-9


class NumericsWarning(UserWarning):
    """Raised (as a warning) when a numerical precondition is degraded."""


@dataclass(frozen=True)
class Grid:
    """Uniform symmetric grid t_k = -L + k h, k = 0..n-1, h = 2L/n.

    n is even so that t = 0 is a grid point.
    """

    half_length: float
    point_count: int

    def __post_init__(self):
        if not self.half_length > 0:
            raise ValueError("half_length must be positive")
        if self.point_count < 16 or self.point_count % 2:
            raise ValueError("point_count must be an even integer >= 16")

    @property
    def h(self) -> float:
        return 2.0 * self.half_length / self.point_count

    @property
    def points(self) -> np.ndarray:
        n = self.point_count
        return -self.half_length + self.h * np.arange(n)

    @property
    def zero_index(self) -> int:
        return self.point_count // 2

    @staticmethod
    def default() -> "Grid":
        return Grid(32.0, 2**16)


class GridFunction:
    """Complex samples of a function on a Grid. Values are immutable."""

    __slots__ = ("grid", "values", "_spline")

    def __init__(self, grid: Grid, values):
        values = np.asarray(values, dtype=complex)
        if values.shape != (grid.point_count,):
            raise ValueError(
                f"values must have shape ({grid.point_count},), got {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("values must be finite")
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "_spline", None)

    def __setattr__(self, name, value):  # immutability
        raise AttributeError("GridFunction is immutable")

    @classmethod
    def from_callable(cls, grid: Grid, fn) -> "GridFunction":
        return cls(grid, np.asarray(fn(grid.points), dtype=complex))

    def spline(self) -> CubicSpline:
        if self._spline is None:
            object.__setattr__(
                self, "_spline", CubicSpline(self.grid.points, self.values)
            )
        return self._spline

    def value_at(self, t):
        """Cubic-spline read at arbitrary points inside [-L, L - h]."""
        t = np.asarray(t, dtype=float)
        out = self.spline()(np.clip(t, self.grid.points[0], self.grid.points[-1]))
        out = np.where(np.abs(t) > self.grid.half_length, 0.0, out)
        return out

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))

    def zero_check(self, tol_zero: float = DEFAULT_TOL_ZERO) -> bool:
        """Whether |f(0)| <= tol_zero * max|f| (the admissibility constraint
        for Fourier-side data fed to the restriction operator)."""
        scale = self.max_abs()
        if scale == 0.0:
            return True
        return bool(abs(self.values[self.grid.zero_index]) <= tol_zero * scale)

    def decays_at_edges(self, rel: float = 1e-6) -> bool:
        scale = self.max_abs()
        if scale == 0.0:
            return True
        edge = max(abs(self.values[0]), abs(self.values[-1]))
        return bool(edge <= rel * scale)

    def to_json_dict(self) -> dict:
        return {
            "L": self.grid.half_length,
            "n": self.grid.point_count,
            "re": self.values.real.tolist(),
            "im": self.values.imag.tolist(),
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "GridFunction":
        grid = Grid(float(d["L"]), int(d["n"]))
        return cls(grid, np.asarray(d["re"], float) + 1j * np.asarray(d["im"], float))


@dataclass(frozen=True)
class NormReport:
    """The five norms attached to the function classes in play.

    l2, h1_semi and l1 are norms; l2_weight_t2 and l2_inv_weight are the
    weighted integrals int t^2 |f|^2 and int |f|^2 / |t| themselves.
    l2_inv_weight is finite only when f(0) vanishes to tolerance.
    """

    l2: float
    l2_weight_t2: float
    l2_inv_weight: float
    h1_semi: float
    l1: float
    inv_weight_finite: bool = True


def _tail_power_fit(f: GridFunction, kmin: int = 2, kmax: int = 6, frac: float = 0.5):
    """Least-squares inverse-power tail fits c_k t^-k on the outer `frac` of
    samples, one fit per side. Returns (coeff_plus, coeff_minus, ks, resid)."""
    t = f.grid.points
    v = f.values
    L = f.grid.half_length
    ks = np.arange(kmin, kmax + 1)
    cut = (1.0 - frac) * L
    out = []
    resid = 0.0
    for side in (+1, -1):
        m = (side * t >= cut) & (side * t < L)
        ts, vs = t[m], v[m]
        cols = np.array([ts ** (-k + 0.0) for k in ks]).T
        scale = np.linalg.norm(cols, axis=0)
        sol, *_ = np.linalg.lstsq(cols / scale, vs, rcond=None)
        c = sol / scale
        model = cols @ c
        denom = max(float(np.max(np.abs(vs))), 1e-300)
        resid = max(resid, float(np.max(np.abs(vs - model))) / denom)
        # wild cancellation between terms marks a fit of structure the
        # basis cannot represent; such models must not be extrapolated
        term_max = float(np.max(np.abs(c) * cut ** (-ks.astype(float))))
        if term_max > 3.0 * denom:
            resid = max(resid, 1.0)
        out.append(c)
    return out[0], out[1], ks, resid


def _trapz(y: np.ndarray, h: float) -> float:
    return float(np.trapezoid(y, dx=h).real)


def simpson_weights(n: int) -> np.ndarray:
    """Composite Simpson weights on n uniform points (trapezoid patch on the
    final interval when n is even)."""
    w = np.zeros(n)
    if n < 3:
        return np.full(n, 0.5) if n == 2 else np.ones(max(n, 0))
    m = n if n % 2 == 1 else n - 1
    w[0:m] = 2.0 / 3.0
    w[1:m:2] = 4.0 / 3.0
    w[0] = w[m - 1] = 1.0 / 3.0
    if n % 2 == 0:
        w[m - 1] += 0.5
        w[n - 1] = 0.5
    return w


def weighted_norms(
    f: GridFunction,
    tol_zero: float = DEFAULT_TOL_ZERO,
    tail_correction: bool | None = None,
) -> NormReport:
    """Trapezoid-rule norms; the dt/|t| weight handles the central cell with
    the local model f(t) ~ f'(0) t, and slowly decaying inputs get analytic
    inverse-power tail corrections for the l2 and t^2-weighted entries."""
    t = f.grid.points
    v = f.values
    h = f.grid.h
    a2 = np.abs(v) ** 2

    l2_sq = _trapz(a2, h)
    t2 = _trapz(t * t * a2, h)
    l1 = _trapz(np.abs(v), h)

    if tail_correction is None:
        tail_correction = not f.decays_at_edges()
    if tail_correction and f.max_abs() > 0:
        cp, cm, ks, resid = _tail_power_fit(f)
        if resid > 0.05:
            # tails are not inverse-power (or are at the numeric floor);
            # an extrapolated correction would be meaningless
            tail_correction = False
    if tail_correction and f.max_abs() > 0:
        L = f.grid.half_length
        for c in (cp, cm):
            for i, ki in enumerate(ks):
                for j, kj in enumerate(ks):
                    w = float((c[i] * np.conj(c[j])).real)
                    l2_sq += w * L ** (1 - ki - kj) / (ki + kj - 1)
                    if ki + kj > 3:
                        t2 += w * L ** (3 - ki - kj) / (ki + kj - 3)

    df = derivative(f, warn=False)
    h1 = np.sqrt(_trapz(np.abs(df.values) ** 2, h))

    k0 = f.grid.zero_index
    g = np.zeros_like(a2)
    nz = t != 0.0
    g[nz] = a2[nz] / np.abs(t[nz])
    # Simpson on each half-line [h, L) and (-L, -h]; the central cells come
    # from the local model f(t) ~ f'(0) t
    right = g[k0 + 1 :]
    left = g[: k0][::-1]
    inv = float(np.sum(simpson_weights(len(right)) * right) * h)
    inv += float(np.sum(simpson_weights(len(left)) * left) * h)
    # local model over [-h, h] with one-sided slopes (transform-side data is
    # generically only C^1 across 0)
    sp_p, sp_m = _half_splines(f)
    dp = complex(sp_p.derivative()(0.0))
    dm = complex(sp_m.derivative()(0.0))
    inv += (abs(dp) ** 2 + abs(dm) ** 2) * h * h / 2.0

    finite = f.zero_check(tol_zero)
    if not finite:
        inv = float("inf")
    return NormReport(
        l2=float(np.sqrt(l2_sq)),
        l2_weight_t2=float(t2),
        l2_inv_weight=inv,
        h1_semi=float(h1),
        l1=float(l1),
        inv_weight_finite=finite,
    )


def _fft_modes(grid: Grid) -> np.ndarray:
    """Integer mode numbers j; the mode frequency is pi*j/L in the e^{-i pi t xi}
    pairing (period 2L)."""
    return np.fft.fftfreq(grid.point_count, d=1.0 / grid.point_count)


def derivative(f: GridFunction, warn: bool = True) -> GridFunction:
    """Spectral derivative on the periodic extension of the grid."""
    if warn and not f.decays_at_edges(1e-8):
        warnings.warn(
            "derivative: input does not decay to 1e-8*max at the grid edges; "
            "wrap-around error is not controlled",
            NumericsWarning,
            stacklevel=2,
        )
    grid = f.grid
    j = _fft_modes(grid)
    omega = np.pi * j / grid.half_length
    omega[grid.point_count // 2] = 0.0  # drop the Nyquist mode
    out = ifft(1j * omega * fft(f.values))
    return GridFunction(grid, out)


def _hilbert_tail_integrals(cp, cm, ks, t: np.ndarray, L: float) -> np.ndarray:
    """(1/pi) int_{|s|>L} m(s)/(t-s) ds for the fitted inverse-power tail
    models m+- , |t| < L (no singularity on the tail domain).

    Uses J_k(t) = int_L^inf ds/(s^k (t-s)) with the recursion
    J_k = (L^{1-k}/(k-1) + J_{k-1})/t and J_1 = log(1 - t/L)/t.
    """
    kmax = int(np.max(ks))
    tt = np.asarray(t, dtype=float)
    # the tail integral is log-singular exactly at t = -+L; the first grid
    # point sits there, clamp it half a cell inward
    span = 0.5 * (tt[1] - tt[0]) if len(tt) > 1 else 1e-6
    tt = np.clip(tt, -L + span, L - span)

    def j_table(x):
        out = np.zeros((kmax + 1, len(x)))
        small = np.abs(x) < 1e-8
        with np.errstate(divide="ignore", invalid="ignore"):
            out[1] = np.where(small, -1.0 / L - x / (2 * L * L), np.log1p(-x / L) / x)
        for k in range(2, kmax + 1):
            out[k] = np.where(
                small,
                -(1.0 / k) * L**-k - x * (1.0 / (k + 1)) * L ** (-k - 1),
                (L ** (1 - k) / (k - 1) + out[k - 1]) / x,
            )
        return out

    Jp = j_table(tt)  # right tail at argument t
    Jm = j_table(-tt)  # right tail at argument -t, for the reflected left tail
    out = np.zeros(len(tt), dtype=complex)
    for i, k in enumerate(ks):
        kk = int(k)
        out += cp[i] * Jp[kk]
        out -= cm[i] * (-1.0) ** kk * Jm[kk]
    return out / np.pi


def hilbert_transform(
    f: GridFunction, line_corrections: bool = False
) -> GridFunction:
    """Discrete Hilbert transform: multiplier -i sgn(xi) on the modes.

    This pure multiplier squares exactly to minus the identity on mean-zero
    data. With line_corrections=True the values instead track the transform
    on the whole line: the analytic contribution of fitted inverse-power
    tails beyond the grid is added, together with the leading
    periodization-defect moment term (pi/(12 L^2)) (t M0 - M1) of the
    windowed part (the periodic kernel (pi/2L) cot(pi u/2L) differs from 1/u
    by -(pi/2L)^2 u/3 + O(L^-4)).
    """
    decays = f.decays_at_edges()
    if not decays:
        warnings.warn(
            "hilbert_transform: input does not decay at the grid edges",
            NumericsWarning,
            stacklevel=2,
        )
    grid = f.grid
    j = _fft_modes(grid)
    mult = -1j * np.sign(j)
    out = ifft(mult * fft(f.values))
    if line_corrections and f.max_abs() > 0:
        if not decays:
            cp, cm, ks, resid = _tail_power_fit(f)
            if resid <= 0.05:
                out = out + _hilbert_tail_integrals(
                    cp, cm, ks, grid.points, grid.half_length
                )
        t = grid.points
        h = grid.h
        L = grid.half_length
        m0 = _ctrapz(f.values, h)
        m1 = _ctrapz(t * f.values, h)
        out = out + (np.pi / (12.0 * L * L)) * (t * m0 - m1)
    return GridFunction(grid, out)


def _ctrapz(y: np.ndarray, h: float) -> complex:
    return complex(np.trapezoid(y, dx=h))


def analytic_projection(f: GridFunction) -> GridFunction:
    """Projection (f + i H f)/2 of f onto nonnegative frequencies.

    With hat(H f) = -i sgn(xi) hat(f) this combination carries the
    multiplier (1 + sgn(xi))/2; it is applied directly on the modes, which
    realizes the same operator without the line-kernel corrections H itself
    carries (they cancel in the combination up to the supported side).
    """
    grid = f.grid
    j = _fft_modes(grid)
    mask = 0.5 * (1.0 + np.sign(j))
    mask[0] = 0.5
    return GridFunction(grid, ifft(mask * fft(f.values)))


def inversion_pullback(psi: GridFunction) -> GridFunction:
    """phi(t) = t^-2 psi(1/t) on the same grid.

    Inside |t| < 1/L (where 1/t leaves the grid) the fitted tail model
    psi(s) ~ c/s^2 gives the continuation phi ~ c; phi(0) is set to c.
    """
    grid = psi.grid
    L = grid.half_length
    if L < 2.0:
        raise ValueError("inversion_pullback requires a grid with L >= 2")
    t = grid.points
    v = psi.values

    scale = psi.max_abs()
    if scale == 0.0:
        return GridFunction(grid, np.zeros_like(v))

    # tail-ratio decay heuristic: |psi| should fall at least like 1/t^2
    i_half = int(round(0.75 * grid.point_count))  # t = L/2
    edge = max(abs(v[0]), abs(v[-1]))
    half = max(abs(v[i_half]), abs(v[grid.point_count - i_half]))
    if edge * 1.0 > 4.0 * half + 1e-12 * scale:
        warnings.warn(
            "inversion_pullback: tail decays slower than 1/t^2",
            NumericsWarning,
            stacklevel=2,
        )

    # leading tail coefficient (psi ~ c/s^2) on the outer 10%, for the
    # residual diagnostic, plus the full inverse-power fit that continues
    # phi(t) = sum_k c_k t^{k-2} across the unresolved cells around 0
    cut = 0.9 * L
    m = np.abs(t) >= cut
    ts, vs = t[m], v[m]
    basis = ts**-2.0
    c = complex(np.vdot(basis, vs) / np.vdot(basis, basis))
    model_resid = float(np.max(np.abs(vs - c * basis)))
    if model_resid > 0.1 * max(float(np.max(np.abs(vs))), 1e-300):
        warnings.warn(
            "inversion_pullback: tail fit residual exceeds 10%",
            NumericsWarning,
            stacklevel=2,
        )
    cp, cm, ks, fit_resid = _tail_power_fit(psi)

    out = np.empty_like(v)
    inner = np.abs(t) < 1.0 / L + 0.5 * grid.h
    outer = ~inner
    inv = 1.0 / t[outer]
    sp_p, sp_m = _half_splines(psi)
    vals = np.where(inv > 0, sp_p(np.clip(inv, 0, L)), sp_m(np.clip(inv, -L, 0)))
    out[outer] = vals / (t[outer] ** 2)
    ti = t[inner]
    if fit_resid <= 0.1:
        model = np.zeros(len(ti), dtype=complex)
        for i, k in enumerate(ks):
            model += np.where(ti >= 0, cp[i], cm[i] * (-1.0) ** k) * np.abs(ti) ** (
                int(k) - 2
            )
    else:
        # tails are not inverse-power on the window; fall back to the
        # single-coefficient projection
        model = np.full(len(ti), c, dtype=complex)
    out[inner] = model
    return GridFunction(grid, out)


def _half_splines(f: GridFunction):
    """One-sided cubic splines (t <= 0 and t >= 0, both including the node at
    0) so that reads never cross the kink the dt/|t| geometry places there."""
    t = f.grid.points
    k0 = f.grid.zero_index
    sp_minus = CubicSpline(t[: k0 + 1], f.values[: k0 + 1])
    sp_plus = CubicSpline(t[k0:], f.values[k0:])
    return sp_plus, sp_minus


# ---------------------------------------------------------------------------
# fixtures


def hermite_fixture(k: int, grid: Grid) -> GridFunction:
    """t^k e^{-pi t^2/2}; admissible Fourier-side data for k >= 1."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    t = grid.points
    return GridFunction(grid, (t**k) * np.exp(-np.pi * t * t / 2.0))


def bump_fixture(grid: Grid, center: float, width: float, amplitude: complex = 1.0):
    """Smooth compactly supported bump exp(1 - 1/(1-u^2)) on |u| < 1."""
    t = grid.points
    u = (t - center) / width
    out = np.zeros(grid.point_count, dtype=complex)
    m = np.abs(u) < 1.0
    out[m] = amplitude * np.exp(1.0 - 1.0 / (1.0 - u[m] ** 2))
    return GridFunction(grid, out)


def gauss_bump_fixture(grid: Grid, center: float, width: float) -> GridFunction:
    """Shifted smooth bump t exp(-((t-center)/width)^2); admissible (vanishes
    at 0) and with grid-representable transforms on both sides of the
    restriction operator."""
    t = grid.points
    return GridFunction(grid, t * np.exp(-(((t - center) / width) ** 2)))


def poisson_kernel_fixture(grid: Grid, z: complex) -> GridFunction:
    """Poisson kernel P_z(t) = y / ((x-t)^2 + y^2), z = x + i y, y > 0."""
    z = complex(z)
    if z.imag <= 0:
        raise ValueError("z must lie in the upper half-plane")
    t = grid.points
    return GridFunction(grid, z.imag / ((z.real - t) ** 2 + z.imag**2))


def plateau_window(grid: Grid, flat: float, taper: float) -> np.ndarray:
    """C^inf window equal to 1 on |t| <= flat, 0 beyond flat + taper."""
    t = np.abs(grid.points)
    out = np.zeros(grid.point_count)
    out[t <= flat] = 1.0
    m = (t > flat) & (t < flat + taper)
    u = (t[m] - flat) / taper

    def s(x):
        with np.errstate(over="ignore"):
            return np.where(x > 0, np.exp(-1.0 / np.maximum(x, 1e-300)), 0.0)

    out[m] = s(1.0 - u) / (s(1.0 - u) + s(u))
    return out


def _fejer_coefficient(m: np.ndarray, n_terms: int) -> np.ndarray:
    """Fourier coefficients on period 2 of sum_n n^-2 sin((2^{n^3}+1) pi |x|)."""
    c = np.zeros(m.shape, dtype=float)
    even = m % 2 == 0
    for n in range(1, n_terms + 1):
        k = 2 ** (n**3) + 1
        c[even] += (1.0 / n**2) * (2.0 * k / np.pi) / (k * k - m[even] ** 2)
    return c


def make_fejer_example(N: int, grid: Grid) -> GridFunction:
    """Windowed modulation example built from a continuous 2-periodic profile
    whose Fourier coefficients are not absolutely summable: an L^2 but not
    L^1 function whose transform is continuous and vanishes at infinity.
    """
    if N < 0:
        raise ValueError("N must be >= 0")
    if N == 0:
        return GridFunction(grid, np.zeros(grid.point_count, dtype=complex))
    k_max = 2 ** (N**3) + 1
    if k_max >= 1.0 / grid.h:
        raise ValueError(
            f"top frequency {k_max} violates the grid Nyquist limit {1.0 / grid.h:.1f}"
        )
    L = grid.half_length
    t = grid.points
    out = np.zeros(grid.point_count, dtype=complex)
    ms = np.arange(-int(L) + 1, int(L))
    cs = _fejer_coefficient(ms, N)
    for m, c in zip(ms, cs):
        if c == 0.0:
            continue
        lo = np.searchsorted(t, m - 1.0)
        hi = np.searchsorted(t, m + 1.0, side="right")
        x = t[lo:hi]
        out[lo:hi] += c * np.exp(1j * np.pi * (x - m))
    return GridFunction(grid, out)
