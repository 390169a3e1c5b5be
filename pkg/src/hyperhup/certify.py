"""Positive-direction machinery: interval Poincare-Wirtinger checks, the
subcritical certificate chain, critical-case sine-segment structure, the
periodization identities and transfer-operator iteration, annulus Poincare
constants, the sphere-density inequality, and one-sided probes.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solveh_banded
from scipy.special import zeta as hurwitz_zeta

from .grid import (
    Grid,
    GridFunction,
    NormReport,
    NumericsWarning,
    _half_splines,
    analytic_projection,
    derivative,
    hilbert_transform,
    inversion_pullback,
    simpson_weights,
    weighted_norms,
)
from .lattice import CrossSpec, RealSequence, gap_stats
from .transforms import extension_E, fourier_pi, op_T, radial_fourier

__all__ = [
    "PWIntervalResult",
    "SineSegmentFit",
    "CertificateReport",
    "pw_interval",
    "subcritical_chain",
    "critical_structure",
    "periodization_check",
    "t_beta_iterate",
    "annulus_poincare",
    "hd_sphere_lemma_check",
    "one_sided_probe",
]


@dataclass(frozen=True)
class PWIntervalResult:
    lhs: float  # int |f|^2 over (a, b)
    rhs: float  # ((b-a)/pi)^2 int |f'|^2
    ratio: float
    equality_flag: bool
    sine_correlation: float
    note: str = ""


def pw_interval(
    f: GridFunction, a: float, b: float, tol_end: float = 1e-6
) -> PWIntervalResult:
    """Poincare-Wirtinger data on (a, b): int |f|^2 <= ((b-a)/pi)^2 int |f'|^2
    for endpoint-vanishing f, with equality exactly on half-period sines."""
    grid = f.grid
    h = grid.h
    t = grid.points
    ia = int(round((a + grid.half_length) / h))
    ib = int(round((b + grid.half_length) / h))
    if not (0 <= ia < ib < grid.point_count):
        raise ValueError("interval not contained in the grid")
    if abs(t[ia] - a) > 0.5 * h or abs(t[ib] - b) > 0.5 * h:
        raise ValueError("endpoints must be grid-aligned within h")
    seg = f.values[ia : ib + 1]
    scale = float(np.max(np.abs(seg)))
    if scale == 0.0:
        return PWIntervalResult(0.0, 0.0, 1.0, True, 1.0, "zero on the interval")
    if max(abs(seg[0]), abs(seg[-1])) > tol_end * max(scale, f.max_abs()):
        raise ValueError("f must vanish at the interval endpoints")
    w = simpson_weights(len(seg)) * h
    lhs = float(np.sum(w * np.abs(seg) ** 2))
    # derivative local to the segment: f need not continue smoothly past it
    from scipy.interpolate import CubicSpline

    x_seg = t[ia : ib + 1]
    df = CubicSpline(x_seg, seg).derivative()(x_seg)
    rhs = ((b - a) / np.pi) ** 2 * float(np.sum(w * np.abs(df) ** 2))
    x = t[ia : ib + 1]
    sine = np.sin(np.pi * (x - a) / (b - a))
    denom = np.sqrt(np.sum(w * sine**2) * np.sum(w * np.abs(seg) ** 2))
    corr = float(abs(np.sum(w * np.conj(sine) * seg)) / max(denom, 1e-300))
    ratio = lhs / rhs if rhs > 0 else 1.0
    flag = bool(abs(lhs - rhs) <= 1e-6 * rhs and corr >= 0.999)
    return PWIntervalResult(lhs, rhs, ratio, flag, corr)


@dataclass(frozen=True)
class CertificateReport:
    norms_psi: NormReport
    norms_phi: NormReport
    plancherel_gap: float
    pw_gaps: np.ndarray
    verdict: str  # consistent_uniqueness | vanishing_violated | inconclusive
    notes: str
    res_A: float = float("nan")
    res_B: float = float("nan")
    chain_gap_A: float = float("nan")
    chain_gap_B: float = float("nan")

    def to_json_dict(self) -> dict:
        out = {
            "verdict": self.verdict,
            "notes": self.notes,
            "plancherel_gap": self.plancherel_gap,
            "pw_gaps": np.asarray(self.pw_gaps, float).tolist(),
            "res_A": self.res_A,
            "res_B": self.res_B,
            "chain_gap_A": self.chain_gap_A,
            "chain_gap_B": self.chain_gap_B,
        }
        for name, rep in (("norms_psi", self.norms_psi), ("norms_phi", self.norms_phi)):
            out[name] = {
                "l2": rep.l2,
                "l2_weight_t2": rep.l2_weight_t2,
                "l2_inv_weight": rep.l2_inv_weight,
                "h1_semi": rep.h1_semi,
                "l1": rep.l1,
            }
        return out


def subcritical_chain(
    psi: GridFunction,
    cross: CrossSpec,
    tol_vanish: float = 1e-6,
    method: str = "compose",
) -> CertificateReport:
    """The two-sided interval chain: a nonzero density vanishing on a cross
    with sup-gap product below one would force t^2-weighted mass inequalities
    in both directions at once. Reports the vanishing residuals, the two
    chain gaps, the per-interval slacks, and the Plancherel bridge defect."""
    grid = psi.grid
    L = grid.half_length
    theta = fourier_pi(psi)
    norms_psi = weighted_norms(psi)
    norms_theta = weighted_norms(theta)
    if psi.max_abs() == 0.0:
        zero = np.zeros(0)
        return CertificateReport(
            norms_psi,
            norms_psi,
            0.0,
            zero,
            "consistent_uniqueness",
            "zero density",
            0.0,
            0.0,
            0.0,
            0.0,
        )
    T_theta = op_T(theta, method, tol_zero=1.0)  # admissibility reported below
    norms_T = weighted_norms(T_theta)
    phi = inversion_pullback(psi)
    norms_phi = weighted_norms(phi)

    a_in = cross.A.values[np.abs(cross.A.values) <= L - grid.h]
    b_in = cross.B.values[np.abs(cross.B.values) <= L - grid.h]
    res_A = float(np.max(np.abs(theta.value_at(a_in))) / max(theta.max_abs(), 1e-300))
    res_B = float(
        np.max(np.abs(T_theta.value_at(b_in))) / max(T_theta.max_abs(), 1e-300)
    )

    plancherel_gap = abs(
        norms_psi.l2_weight_t2 - (norms_theta.h1_semi / np.pi) ** 2
    ) / max(norms_psi.l2_weight_t2, 1e-300)

    stats_a = gap_stats(cross.A)
    stats_b = gap_stats(cross.B)
    alpha = stats_a["sup"]
    beta = stats_b["sup"]

    # per-interval Poincare-Wirtinger slacks of theta on the A-intervals
    gaps = []
    for lo, hi in zip(a_in[:-1], a_in[1:]):
        try:
            r = pw_interval(theta, lo, hi, tol_end=10 * tol_vanish)
        except ValueError:
            continue
        gaps.append(r.rhs - r.lhs)
    pw_gaps = np.asarray(gaps)

    # chain gaps: vanishing on A forces ||theta||^2 <= alpha^2 ||theta'/pi||^2,
    # vanishing on B the T-side analogue; strictness in both is impossible
    # for nonzero psi when alpha*beta < 1
    t2_psi = norms_psi.l2_weight_t2  # = ||theta'/pi||^2 = ||T theta||^2
    t2_phi = norms_phi.l2_weight_t2  # = ||theta||^2
    chain_gap_A = alpha**2 * (norms_theta.h1_semi / np.pi) ** 2 - norms_theta.l2**2
    chain_gap_B = beta**2 * norms_theta.l2**2 - norms_T.l2**2

    vanishes = res_A <= tol_vanish and res_B <= tol_vanish
    err_scale = max(plancherel_gap, res_A, res_B)
    notes = (
        f"sup gaps alpha={alpha:.6g} beta={beta:.6g}, alpha*beta={alpha * beta:.6g}; "
        f"t2(psi)={t2_psi:.6g} t2(phi)={t2_phi:.6g}"
    )
    if not vanishes:
        verdict = "vanishing_violated"
    elif norms_psi.l2 <= 1e-6 * max(psi.max_abs(), 1.0):
        verdict = "consistent_uniqueness"
    elif alpha * beta < 1.0:
        # a nonzero vanishing density in the subcritical regime contradicts
        # the interval chains; report honestly rather than asserting
        verdict = "inconclusive"
        notes += "; nonzero density passes vanishing at alpha*beta<1 (quadrature-level)"
    else:
        verdict = "inconclusive"
        notes += "; supercritical cross: the chains do not force uniqueness"
    if vanishes and err_scale > 0.1 * max(
        abs(chain_gap_A) / max(t2_psi, 1e-300), 1e-300
    ):
        notes += "; grid error may dominate the reported gaps"
    return CertificateReport(
        norms_psi,
        norms_phi,
        plancherel_gap,
        pw_gaps,
        verdict,
        notes,
        res_A,
        res_B,
        chain_gap_A,
        chain_gap_B,
    )


@dataclass(frozen=True)
class SineSegmentFit:
    breakpoints: np.ndarray
    coefficients: np.ndarray  # fitted t_n per interval
    correlations: np.ndarray
    fit_residuals: np.ndarray
    alternation_defect: float
    l2_sum: float
    reconstruction_error: float
    weighted_dual_sum: float = float("nan")


def critical_structure(
    theta: GridFunction,
    A: RealSequence,
    tol_vanish: float = 1e-6,
    r_coefficients=None,
    b_points: RealSequence | None = None,
) -> SineSegmentFit:
    """Per-interval sine fits of endpoint-vanishing transform data on the
    breakpoints A, the sign-alternation check where gaps equal one, and the
    closed-form reconstruction of the density compared against the inverse
    transform of the fitted piecewise-sine profile."""
    grid = theta.grid
    L = grid.half_length
    t = grid.points
    a = A.values[np.abs(A.values) <= L - grid.h]
    if len(a) < 3:
        raise ValueError("need at least 3 breakpoints inside the grid")
    res = float(np.max(np.abs(theta.value_at(a)))) / max(theta.max_abs(), 1e-300)
    if res > tol_vanish:
        raise ValueError(
            f"theta does not vanish on A (residual {res:.3g} > {tol_vanish:g})"
        )
    h = grid.h
    coeffs = []
    corrs = []
    resids = []
    for lo, hi in zip(a[:-1], a[1:]):
        ia, ib = int(round((lo + L) / h)), int(round((hi + L) / h))
        seg = theta.values[ia : ib + 1]
        x = t[ia : ib + 1]
        sine = np.sin(np.pi * (x - lo) / (hi - lo))
        denom = float(np.sum(sine**2))
        c = complex(np.sum(sine * seg) / max(denom, 1e-300))
        model = c * sine
        scale = max(float(np.max(np.abs(seg))), 1e-300)
        resid = float(np.max(np.abs(seg - model))) / scale
        nrm = np.sqrt(np.sum(np.abs(seg) ** 2) * denom)
        corr = float(abs(np.sum(np.conj(sine) * seg)) / max(nrm, 1e-300))
        coeffs.append(c)
        corrs.append(corr)
        resids.append(resid)
    coeffs = np.asarray(coeffs)
    corrs = np.asarray(corrs)
    resids = np.asarray(resids)
    if np.any(corrs < 0.99):
        warnings.warn(
            "critical_structure: some intervals do not carry sine profiles "
            "(correlation < 0.99); not a critical-case structure",
            NumericsWarning,
            stacklevel=2,
        )

    gaps = np.diff(a)
    big = np.abs(coeffs) > 1e-2 * np.max(np.abs(coeffs))
    unit = np.abs(gaps - 1.0) < 1e-9
    pair = big[:-1] & big[1:] & unit[:-1] & unit[1:]
    if np.any(pair):
        alt = float(
            np.max(np.abs(coeffs[1:][pair] + coeffs[:-1][pair]))
            / np.max(np.abs(coeffs))
        )
    else:
        alt = float("nan")

    # reconstruction: closed form vs inverse transform of the fitted profile
    fit_vals = np.zeros(grid.point_count, dtype=complex)
    for c, lo, hi in zip(coeffs, a[:-1], a[1:]):
        ia, ib = int(round((lo + L) / h)), int(round((hi + L) / h))
        x = t[ia : ib + 1]
        fit_vals[ia : ib + 1] += c * np.sin(np.pi * (x - lo) / (hi - lo))
    theta_fit = GridFunction(grid, fit_vals)
    psi_fit = fourier_pi(theta_fit, "inverse")
    band = (np.abs(np.abs(t) - 1.0) > 0.05) & (np.abs(t) < L / 2)
    rec = np.zeros(grid.point_count, dtype=complex)
    with np.errstate(divide="ignore", invalid="ignore"):
        pref = -1.0 / (np.sqrt(2.0) * np.pi * (t * t - 1.0))
    for c, lo, hi in zip(coeffs, a[:-1], a[1:]):
        rec += c * (np.exp(1j * np.pi * t * hi) + np.exp(1j * np.pi * t * lo))
    rec = rec * pref
    scale = float(np.max(np.abs(psi_fit.values[band])))
    rec_err = float(np.max(np.abs(rec[band] - psi_fit.values[band]))) / max(
        scale, 1e-300
    )

    dual = float("nan")
    if r_coefficients is not None and b_points is not None:
        r = np.asarray(r_coefficients)
        b = b_points.values[: len(r)]
        dual = float(np.sum(np.abs(r) * np.abs(b) ** 0.25))

    return SineSegmentFit(
        breakpoints=a,
        coefficients=coeffs,
        correlations=corrs,
        fit_residuals=resids,
        alternation_defect=alt,
        l2_sum=float(np.sum(np.abs(coeffs) ** 2)),
        reconstruction_error=rec_err,
        weighted_dual_sum=dual,
    )


def _hurwitz_tail(k: int, q: float) -> float:
    return float(hurwitz_zeta(k, q))


def periodization_check(
    psi: GridFunction,
    theta_shift: float,
    beta: float,
    n_t: int = 512,
) -> tuple[float, float]:
    """Residuals of the two periodization identities carried by a density
    vanishing on the translated cross: the direct 2-periodization of the
    modulated density, and the 2-periodization transported through t -> 1/t.
    Both are normalized by ||psi||_1 / 2."""
    grid = psi.grid
    L = grid.half_length
    if psi.max_abs() == 0.0:
        return 0.0, 0.0
    J = int(L / 2 - 1)
    # half-step offset keeps t + 2j away from 0 (where the transported sum
    # has its removable j = 0 singularity)
    ts = -1.0 + (np.arange(n_t) + 0.5) * (2.0 / n_t)
    js = np.arange(-J, J + 1)
    pts = ts[:, None] + 2.0 * js[None, :]
    vals = psi.value_at(pts.ravel()).reshape(pts.shape)
    phase = np.exp(-1j * np.pi * theta_shift * pts)
    direct = np.sum(vals * phase, axis=1)

    # analytic continuation of the sum beyond the represented window using
    # the fitted inverse-power tails (shift-free case only)
    from .grid import _tail_power_fit

    cp, cm, ks, resid = _tail_power_fit(psi)
    tail_sig = sum(
        abs(c[i]) * (2.0 * J) ** (1 - int(k))
        for c in (cp, cm)
        for i, k in enumerate(ks)
    )
    norm1 = weighted_norms(psi).l1
    if theta_shift == 0.0 and resid <= 0.05:
        for i, k in enumerate(ks):
            kk = int(k)
            zp = 2.0**-kk * hurwitz_zeta(kk, J + 1 + ts / 2.0)
            zm = (-1.0) ** kk * 2.0**-kk * hurwitz_zeta(kk, J + 1 - ts / 2.0)
            direct += cp[i] * zp + cm[i] * zm
    elif tail_sig > 0.1 * max(np.max(np.abs(direct)), 1e-300):
        warnings.warn(
            "periodization_check: truncation tail estimate exceeds 10% of the "
            "direct residual",
            NumericsWarning,
            stacklevel=2,
        )
    res_direct = float(np.max(np.abs(direct)) / (norm1 / 2.0))

    args = beta / pts
    vals_inv = psi.value_at(args.ravel()).reshape(pts.shape)
    # the j = 0 column can push beta/t past the grid edge, where the read
    # clips to zero; continue it with the fitted inverse-power tail
    j0 = np.searchsorted(js, 0)
    far = np.abs(args[:, j0]) > 0.9 * L
    if np.any(far) and resid <= 0.05:
        cont = np.zeros(np.sum(far), dtype=complex)
        a_far = args[far, j0]
        for i, k in enumerate(ks):
            ck = np.where(a_far > 0, cp[i], cm[i])
            cont += ck * a_far ** (-float(k))
        vals_inv[far, j0] = cont
    elif np.any(far):
        warnings.warn(
            "periodization_check: the transported j=0 term leaves the grid "
            "and the tail fit is unreliable",
            NumericsWarning,
            stacklevel=2,
        )
    inverted = np.sum(vals_inv / pts**2, axis=1)
    # tail: psi(beta/u) Taylor-expanded around 0 against Hurwitz zeta sums
    sp_plus, sp_minus = _half_splines(psi)
    d0 = psi.values[grid.zero_index]
    ders_p = [complex(sp_plus.derivative(m)(0.0)) for m in (1, 2, 3)]
    ders_m = [complex(sp_minus.derivative(m)(0.0)) for m in (1, 2, 3)]
    for m in range(0, 4):
        kk = m + 2
        zp = 2.0**-kk * hurwitz_zeta(kk, J + 1 + ts / 2.0)
        zm = (-1.0) ** kk * 2.0**-kk * hurwitz_zeta(kk, J + 1 - ts / 2.0)
        if m == 0:
            cp_m = cm_m = d0
        else:
            fact = 1.0
            for j in range(1, m + 1):
                fact *= j
            cp_m = ders_p[m - 1] / fact * beta**m
            cm_m = ders_m[m - 1] / fact * beta**m
        # argument beta/u is positive for u > 0 (right tail), negative left
        inverted += cp_m * zp + cm_m * zm
    res_inverted = float(np.max(np.abs(inverted)) / (norm1 / 2.0))
    return res_direct, res_inverted


def t_beta_iterate(
    f: GridFunction,
    beta: float,
    l: int,
    j_cut: int = 64,
    delta: float = 0.1,
) -> dict:
    """L^1 norms of the even iterates of the periodization-transfer operator

        (T_beta f)(t) = sum_{j != 0} beta/(t+2j)^2 f(beta/(t+2j))

    on [-1, 1], with a refinement check of the j-truncation. Returns the full
    and delta-interior norms for m = 1..l."""
    if not 0.0 < beta <= 1.0:
        raise ValueError("beta must lie in (0, 1]")
    n = 2049
    ts = np.linspace(-1.0, 1.0, n)
    w = simpson_weights(n) * (ts[1] - ts[0])
    cur = np.abs(f.value_at(ts))

    def apply_T(vals: np.ndarray, J: int) -> np.ndarray:
        from scipy.interpolate import CubicSpline

        sp = CubicSpline(ts, vals)
        js = np.concatenate([np.arange(-J, 0), np.arange(1, J + 1)])
        den = ts[:, None] + 2.0 * js[None, :]
        args = beta / den
        return np.sum(beta / den**2 * sp(np.clip(args, -1.0, 1.0)), axis=1)

    interior = np.abs(ts) <= 1.0 - delta
    norms = []
    norms_interior = []
    check = cur.copy()
    for m in range(1, l + 1):
        for _ in range(2):
            cur = apply_T(cur, j_cut)
        norms.append(float(np.sum(w * np.abs(cur))))
        norms_interior.append(float(np.sum((w * np.abs(cur))[interior])))
    for _ in range(2):
        check = apply_T(check, 2 * j_cut)
    first_ref = float(np.sum(w * np.abs(check)))
    if abs(first_ref - norms[0]) > 1e-6 * max(norms[0], 1e-300):
        warnings.warn(
            "t_beta_iterate: doubling the j-truncation moves the first norm "
            "by more than 1e-6",
            NumericsWarning,
            stacklevel=2,
        )
    return {
        "norms": np.asarray(norms),
        "interior_norms": np.asarray(norms_interior),
        "refined_first": first_ref,
    }


def annulus_poincare(a: float, b: float, d: int, n_r: int = 4096) -> dict:
    """First Dirichlet eigenvalue of the radial Laplacian on the annulus
    (a, b) in dimension d, against the one-dimensional comparison bound
    C <= (b/a)^{(d-1)/2} (b-a)/pi."""
    if not 2 <= int(d) <= 6 or int(d) != d:
        raise ValueError("d must be an integer in [2, 6]")
    if not (0 < a < b):
        raise ValueError("need 0 < a < b")
    if b / a > 100.0:
        raise ValueError("aspect ratio b/a must be at most 100")
    d = int(d)
    r = np.linspace(a, b, n_r + 2)
    h = r[1] - r[0]
    ri = r[1:-1]
    half = (r[:-1] + r[1:]) / 2.0  # flux points
    flux = half ** (d - 1)
    # conservative symmetric tridiagonal A u = lambda W u
    main = (flux[:-1] + flux[1:]) / h**2
    off = -flux[1:-1] / h**2
    wdiag = ri ** (d - 1)
    band = np.zeros((2, n_r))
    band[0, 1:] = off
    band[1] = main
    v = np.sin(np.pi * (ri - a) / (b - a)) * wdiag**0.0
    lam_old = 0.0
    for _ in range(200):
        rhs = wdiag * v
        u = solveh_banded(band, rhs, lower=False)
        nrm = np.sqrt(np.sum(wdiag * u * u) * h)
        v = u / nrm
        Av_num = np.empty(n_r)
        Av_num = main * v
        Av_num[:-1] += off * v[1:]
        Av_num[1:] += off * v[:-1]
        lam = float(np.sum(v * Av_num) * h) / float(np.sum(wdiag * v * v) * h)
        if abs(lam - lam_old) <= 1e-10 * max(lam, 1.0):
            break
        lam_old = lam
    c_computed = 1.0 / np.sqrt(lam)
    c_bound = (b / a) ** ((d - 1) / 2.0) * (b - a) / np.pi
    return {
        "C_computed": float(c_computed),
        "C_bound": float(c_bound),
        "lambda1": lam,
        "pass": bool(c_computed <= c_bound + 1e-6),
    }


def hd_sphere_lemma_check(
    f_profile,
    d: int,
    t_param: float,
    radii: RealSequence,
    tol_vanish: float = 1e-6,
) -> dict:
    """Check t^2 int |f|^2 <= int |xi|^2 |F_d f|^2 for a radial f supported
    outside the unit ball and vanishing on a sufficiently dense family of
    spheres (density (1-eps)/(2t) with eps from the annulus comparison)."""
    r, vals = f_profile
    r = np.asarray(r, float)
    vals = np.asarray(vals, complex)
    eps = 1.0 - (1.0 + 1.0 / (2.0 * t_param)) ** (-(d - 1) / 2.0)
    need = (1.0 - eps) / (2.0 * t_param)
    rad = radii.values
    supp = np.abs(vals) > tol_vanish * np.max(np.abs(vals))
    if not np.all(r[supp] >= 1.0 - 1e-9):
        raise ValueError("profile must be supported outside the unit ball")
    r_hi = float(np.max(r[supp]))
    cover = rad[(rad >= 1.0) & (rad <= r_hi + need)]
    if len(cover) < 2 or np.max(np.diff(cover)) > need + 1e-12 or cover[0] > 1.0 + need:
        raise ValueError(
            f"radii are not (1-eps)/(2t)-dense over the support (need gaps <= {need:.4g})"
        )
    on = np.interp(cover, r, np.abs(vals))
    if np.max(on) > tol_vanish * np.max(np.abs(vals)):
        raise ValueError("profile does not vanish on the listed radii")
    h = r[1] - r[0]
    w = simpson_weights(len(r)) * h
    surf = 2.0 * np.pi ** (d / 2.0) / _gamma_half(d)
    lhs = t_param**2 * surf * float(np.sum(w * np.abs(vals) ** 2 * r ** (d - 1)))
    rho_max = 3.0 * t_param + 24.0
    n_rho = 4096
    rho = np.linspace(0.0, rho_max, n_rho)
    F = radial_fourier((r, vals), d, rho)
    w_rho = simpson_weights(n_rho) * (rho[1] - rho[0])
    integ = np.abs(F) ** 2 * rho ** (d + 1)
    rhs = surf * float(np.sum(w_rho * integ))
    tail = float(np.sum((w_rho * integ)[rho > 0.9 * rho_max]))
    if tail > 1e-6 * max(rhs, 1e-300):
        warnings.warn(
            "hd_sphere_lemma_check: frequency integral may not have converged",
            NumericsWarning,
            stacklevel=2,
        )
    return {
        "lhs": lhs,
        "rhs": rhs,
        "slack": rhs - lhs,
        "pass": bool(lhs <= rhs * (1.0 + 1e-9) + 1e-12),
        "eps": eps,
        "density_needed": need,
    }


def _gamma_half(d: int) -> float:
    from .specfun import gamma_fn

    return gamma_fn(d / 2.0)


def one_sided_probe(
    psi: GridFunction,
    A: RealSequence,
    B: RealSequence,
    quadrant_extent: float | None = None,
) -> dict:
    """One-sided cross probe: the analytic projection of a mean-zero density,
    the pullback invariance of its Hilbert transform, vanishing of the
    extension on A x {0} and {0} x B (A >= 0, B <= 0), and a quadrant sample
    of the extension of the projected density."""
    if np.any(A.values < 0) or np.any(B.values > 0):
        raise ValueError("need A subset of [0, inf) and B subset of (-inf, 0]")
    grid = psi.grid
    L = grid.half_length
    norms = weighted_norms(psi)
    mean = complex(np.trapezoid(psi.values, dx=grid.h))
    if abs(mean) > 1e-6 * max(norms.l1, 1e-300):
        warnings.warn(
            "one_sided_probe: the density mean exceeds 1e-6 * ||psi||_1; the "
            "pullback invariance identity assumes a vanishing mean",
            NumericsWarning,
            stacklevel=2,
        )
    hp = hilbert_transform(psi, line_corrections=True)
    phi = inversion_pullback(psi)
    hphi = hilbert_transform(phi, line_corrections=True)
    band = np.abs(grid.points) >= 1.0 / L + 2 * grid.h
    band &= np.abs(grid.points) <= 2.0
    tb = grid.points[band]
    lhs = hp.value_at(1.0 / tb)
    rhs = -(tb**2) * hphi.value_at(tb)
    inv_res = float(np.max(np.abs(lhs - rhs)) / max(hp.max_abs(), 1e-300))

    psi_t = analytic_projection(psi)
    if psi.max_abs() == 0.0:
        e_res = 0.0
        quad = np.zeros((16, 16), dtype=complex)
        q = 1.0
    else:
        pts = [(a, 0.0) for a in A.values] + [(0.0, b) for b in B.values]
        evals = extension_E(psi_t, pts)
        e_res = float(np.max(np.abs(evals)))
        q = quadrant_extent or max(
            float(np.max(A.values, initial=1.0)), float(-np.min(B.values, initial=-1.0))
        )
        xs = np.linspace(0.0, q, 16)
        ys = np.linspace(-q, 0.0, 16)
        quad = extension_E(
            psi_t, [(x, y) for x in xs for y in ys]
        ).reshape(16, 16)
    return {
        "invariance_residual": inv_res,
        "cross_residual": e_res,
        "quadrant": quad,
        "quadrant_extent": q,
        "mean": mean,
    }
