"""Sequences, crosses, densities and the geometric preprocessing feeding the
witness construction: expansion to 1-smooth supersets, square-root lifting,
and assembly of zero sets on four rays with matched quadratic densities.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .grid import NumericsWarning

__all__ = [
    "RealSequence",
    "CrossSpec",
    "ZeroRaySet",
    "make_cross",
    "gap_stats",
    "expand_to_smooth",
    "sqrt_lift",
    "build_k_regular",
    "is_p_smooth",
    "density_order_p",
]


@dataclass(frozen=True)
class RealSequence:
    """Strictly increasing finite window of a separated real sequence."""

    values: np.ndarray
    index_offset: int = 0

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", v)
        if v.ndim != 1 or len(v) < 1:
            raise ValueError("values must be a nonempty 1-d array")
        if len(v) > 1 and np.any(np.diff(v) <= 0):
            raise ValueError("values must be strictly increasing (separated)")

    @property
    def separation(self) -> float:
        if len(self.values) < 2:
            return float("inf")
        return float(np.min(np.diff(self.values)))

    def __len__(self):
        return len(self.values)

    def restricted(self, lo: float, hi: float) -> "RealSequence":
        m = (self.values >= lo) & (self.values <= hi)
        idx = np.nonzero(m)[0]
        if len(idx) == 0:
            raise ValueError("restriction is empty")
        return RealSequence(self.values[m], self.index_offset + int(idx[0]))

    def to_json_dict(self) -> dict:
        return {"offset": self.index_offset, "values": self.values.tolist()}

    @classmethod
    def from_json_dict(cls, d: dict) -> "RealSequence":
        return cls(np.asarray(d["values"], float), int(d.get("offset", 0)))


@dataclass(frozen=True)
class CrossSpec:
    """Generalized lattice cross (A x {0}) u ({0} x B)."""

    A: RealSequence
    B: RealSequence

    def to_json_dict(self) -> dict:
        return {"A": self.A.to_json_dict(), "B": self.B.to_json_dict()}

    @classmethod
    def from_json_dict(cls, d: dict) -> "CrossSpec":
        return cls(
            RealSequence.from_json_dict(d["A"]), RealSequence.from_json_dict(d["B"])
        )


def make_cross(
    alpha: float, beta: float, theta_shift: float = 0.0, window: int = 64
) -> CrossSpec:
    """The translated cross A = alpha Z + theta_shift, B = beta Z over the
    index window -window..window."""
    if alpha <= 0 or beta <= 0:
        raise ValueError("alpha, beta must be positive")
    n = np.arange(-window, window + 1)
    return CrossSpec(
        RealSequence(alpha * n + theta_shift, -window),
        RealSequence(beta * n.astype(float), -window),
    )


def gap_stats(s: RealSequence) -> dict:
    """Gap statistics: inf/sup over all represented gaps, and tail estimates
    of liminf/limsup over the outer 25% of indices on each side."""
    if len(s) < 3:
        raise ValueError("need at least 3 points")
    gaps = np.diff(s.values)
    n = len(gaps)
    q = max(1, n // 4)
    tail = np.concatenate([gaps[:q], gaps[-q:]])
    out = {
        "inf": float(np.min(gaps)),
        "sup": float(np.max(gaps)),
        "liminf_tail": float(np.min(tail)),
        "limsup_tail": float(np.max(tail)),
    }
    # crude non-stationarity probe: compare the two outermost quarters
    inner = gaps[q : n - q] if n > 2 * q else gaps
    if len(inner) and (
        np.max(tail) > 1.5 * np.max(inner) or np.min(tail) < 0.66 * np.min(inner)
    ):
        warnings.warn(
            "gap_stats: tail gaps drift relative to the interior; tail "
            "estimates may not be stationary",
            NumericsWarning,
            stacklevel=2,
        )
    return out


def expand_to_smooth(s: RealSequence, density: float) -> RealSequence:
    """Greedy 1-smooth expansion of a positive sequence: scan outward and
    insert a point at the smallest admissible slot whenever the counting
    function falls behind floor(density * r).

    Requires density > 1/liminf-gap; the result contains s, has counting
    discrepancy <= 2 against density * r, and gaps >= min(1/(2 density),
    separation/2).
    """
    v = s.values
    if np.any(v <= 0):
        raise ValueError("expand_to_smooth expects a positive sequence")
    gaps = np.diff(v)
    sigma = float(np.min(gaps)) if len(gaps) else float("inf")
    if density <= 1.0 / sigma:
        raise ValueError(
            f"density {density} is infeasible: need density > 1/min-gap = {1.0 / sigma:.4g}"
        )
    gap_min = min(1.0 / (2.0 * density), s.separation / 2.0)
    out = []
    count = 0
    next_orig = 0
    r = 0.0
    r_max = float(v[-1])
    last = -np.inf
    while r <= r_max or next_orig < len(v):
        # next event: either the next original point or the next deficit radius
        target_r = (count + 1) / density
        orig_r = v[next_orig] if next_orig < len(v) else np.inf
        if orig_r <= target_r:
            out.append(orig_r)
            last = orig_r
            count += 1
            next_orig += 1
            continue
        if target_r > r_max and next_orig >= len(v):
            break
        # deficit: insert at the smallest admissible slot
        cand = max(last + gap_min, target_r)
        if orig_r - cand < gap_min:
            # slot collides with the next original point; take that point
            out.append(orig_r)
            last = orig_r
            count += 1
            next_orig += 1
            continue
        out.append(cand)
        last = cand
        count += 1
    # strict-superset requirement: add tail points if nothing was inserted
    if len(out) == len(v):
        for _ in range(3):
            out.append(out[-1] + max(gap_min, 1.0 / density))
    return RealSequence(np.asarray(sorted(out)))


def sqrt_lift(a: RealSequence) -> tuple[RealSequence, RealSequence]:
    """(sqrt of the positive part, sqrt of |negative part|), both sorted."""
    v = a.values
    if np.any(v == 0.0):
        raise ValueError("sqrt_lift requires 0 not in the sequence")
    pos = np.sqrt(v[v > 0])
    neg = np.sqrt(-v[v < 0])
    lift1 = RealSequence(np.sort(pos)) if len(pos) else None
    lift2 = RealSequence(np.sort(neg)) if len(neg) else None
    return lift1, lift2


def density_order_p(s: RealSequence, p: float, r_max: float) -> float:
    """Counting density #(s cap [0, r_max]) / r_max^p."""
    if r_max <= 0 or r_max > float(s.values[-1]) + 1e-9:
        raise ValueError("r_max must lie in the represented range")
    count = int(np.sum((s.values >= 0) & (s.values <= r_max)))
    return count / r_max**p


def is_p_smooth(s: RealSequence, p: float, density: float) -> dict:
    """Check the p-smoothness conditions on the window: bounded counting
    discrepancy against density * r^p, and gaps >= d (1+r)^{1-p} for the
    largest feasible d."""
    v = s.values
    if np.any(v < 0):
        raise ValueError("is_p_smooth expects a nonnegative sequence")
    gaps = np.diff(v)
    if len(gaps):
        d_feasible = float(np.min(gaps / (1.0 + v[:-1]) ** (1.0 - p)))
    else:
        d_feasible = float("inf")
    # counting discrepancy sampled at the points themselves (where the
    # counting function jumps) and midway between them
    r_checks = np.concatenate([v, 0.5 * (v[:-1] + v[1:]), [v[-1] + 1e-9]])
    counts = np.searchsorted(v, r_checks, side="right")
    disc = float(np.max(np.abs(counts - density * r_checks**p)))
    return {
        "d": d_feasible,
        "discrepancy": disc,
        "smooth": bool(d_feasible > 0 and disc <= 3.0),
    }


@dataclass(frozen=True)
class ZeroRaySet:
    """Origin-symmetric zero set on the four half-axes: moduli along
    arg = 0, pi (ray 1) and arg = +-pi/2 (ray 2), with the growth-indicator
    parameters (beta, gamma) and the separation-disk constant."""

    ray1: np.ndarray  # moduli of the real-axis zeros (one sign class)
    ray2: np.ndarray  # moduli of the imaginary-axis zeros
    beta: float
    gamma: float
    disk_c: float

    def __post_init__(self):
        for r in (self.ray1, self.ray2):
            r = np.asarray(r, float)
            if len(r) == 0 or np.any(r <= 0) or np.any(np.diff(r) <= 0):
                raise ValueError("ray moduli must be positive and increasing")
        object.__setattr__(self, "ray1", np.asarray(self.ray1, float))
        object.__setattr__(self, "ray2", np.asarray(self.ray2, float))

    def disks_disjoint(self) -> bool:
        return _disks_disjoint(self.ray1, self.ray2, self.disk_c)

    def counting_discrepancy(self) -> float:
        """sup over the window of |#(ray cap [0,r]) - beta r^2| (both rays
        carry the same quadratic density coefficient beta)."""
        out = 0.0
        for ray in (self.ray1, self.ray2):
            r_checks = np.concatenate([ray, 0.5 * (ray[:-1] + ray[1:])])
            counts = np.searchsorted(ray, r_checks, side="right")
            out = max(out, float(np.max(np.abs(counts - self.beta * r_checks**2))))
        return out


def _disks_disjoint(ray1: np.ndarray, ray2: np.ndarray, c: float) -> bool:
    """Disks B(z, c/(1+|z|)) pairwise disjoint for the symmetric zero set.

    Checks consecutive pairs along each ray and the cross-ray minima (the
    closest cross pairs are near the origin; |x - iy| = sqrt(x^2+y^2))."""

    def rad(r):
        return c / (1.0 + r)

    for ray in (ray1, ray2):
        if np.any(np.diff(ray) < rad(ray[:-1]) + rad(ray[1:])):
            return False
        # opposite-sign pair on the same axis through the origin
        if 2.0 * ray[0] < 2.0 * rad(ray[0]):
            return False
    x = ray1[: min(len(ray1), 64)]
    y = ray2[: min(len(ray2), 64)]
    d = np.sqrt(x[:, None] ** 2 + y[None, :] ** 2)
    if np.any(d < rad(x)[:, None] + rad(y)[None, :]):
        return False
    return True


def build_k_regular(
    lifted: RealSequence, gamma: float, disk_c: float = 0.25
) -> ZeroRaySet:
    """Zero set whose real-axis rays carry the lifted sequence (with greedy
    infill repairing counting deficits) and whose imaginary-axis rays carry
    the canonical equal-density moduli sqrt((k - 1/2)/beta).

    Both ray pairs must share one quadratic density coefficient beta for the
    truncated products to stay within a quadratic-exponential envelope; the
    decay tilt gamma is realized by the quadratic prefactor, not by a
    density imbalance, and is recorded here as the indicator parameter.
    """
    if lifted is None or len(lifted) == 0:
        raise ValueError("empty lifted sequence")
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    v = lifted.values
    if np.any(v <= 0):
        raise ValueError("lifted moduli must be positive")
    r_max = float(v[-1])
    beta = len(v) / r_max**2
    # greedy infill in the lifted scale: keep |count - beta r^2| small with
    # the 2-smooth admissible gap d (1+r)^{-1}
    rep = is_p_smooth(lifted, 2.0, beta)
    d_gap = max(min(rep["d"], 0.5 / (beta * 2.0)), 1e-3)
    ray1 = list(v)
    changed = True
    guard = 0
    while changed and guard < 10 * len(v) + 100:
        changed = False
        guard += 1
        arr = np.asarray(ray1)
        counts = np.arange(1, len(arr) + 1)
        deficit = beta * arr**2 - counts
        idx = np.nonzero(deficit > 1.0)[0]
        if len(idx):
            i = int(idx[0])
            lo = arr[i - 1] if i > 0 else 0.0
            cand = lo + d_gap / (1.0 + lo)
            if arr[i] - cand > d_gap / (1.0 + cand):
                ray1.insert(i, cand)
                changed = True
    ray1 = np.asarray(sorted(ray1))
    n2 = int(np.ceil(beta * r_max**2))
    ray2 = np.sqrt((np.arange(1, n2 + 1) - 0.5) / beta)
    c = float(disk_c)
    for _ in range(20):
        if _disks_disjoint(ray1, ray2, c):
            break
        c *= 0.5
    else:
        raise ValueError("could not separate zero disks; sequence too dense")
    return ZeroRaySet(ray1=ray1, ray2=ray2, beta=beta, gamma=gamma, disk_c=c)
