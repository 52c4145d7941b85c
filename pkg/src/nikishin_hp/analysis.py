"""Numerical quantification of the ratio asymptotics and zero attraction.

The solved vectors are compared against their limit targets on a compact
evaluation grid away from the last interval and from the perturbation's
poles: a_j/a_m tends to (-1)^(m-j) s-hat_{m,j+1} and a_0/a_m to the reversed
transform combination carrying the perturbation.  Sup-errors over diagonal
sweeps feed a least-squares geometric rate estimate, and root censuses verify
that each pole of multiplicity kappa captures exactly kappa zeros of every
component while stray zeros vanish.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional

from mpmath import mp, mpc, mpf

from .hermite_pade import MultiIndex, RationalPerturbation, TypeIVector, remainder_eval
from .measures import Interval, cauchy_eval
from .nikishin import NikishinSystem
from .precision import noise_floor


@dataclass(frozen=True)
class EvalGrid:
    """Evaluation points in a compact set off the last interval and the poles."""

    points: tuple
    description: str

    def __init__(self, points, description="explicit points"):
        object.__setattr__(self, "points", tuple(mpc(z) for z in points))
        object.__setattr__(self, "description", str(description))
        if not self.points:
            raise ValueError("empty evaluation grid")

    @classmethod
    def default(
        cls,
        sys: NikishinSystem,
        pert: Optional[RationalPerturbation] = None,
        radius_factor=4,
        circle_points: int = 64,
        segment_points: int = 16,
        pole_clearance=mpf("0.25"),
    ) -> "EvalGrid":
        """Circle of radius radius_factor * (outer radius of supports and poles),
        plus a short segment in the gap between the first and last intervals,
        lifted 0.1i off the axis.  Points too close to a pole are dropped.
        """
        outer = sys.outer_radius
        poles = pert.poles if pert is not None else ()
        for zeta, _ in poles:
            outer = max(outer, abs(zeta))
        radius = mpf(radius_factor) * outer
        pts = [radius * mp.expjpi(2 * mpf(k) / circle_points) for k in range(circle_points)]
        first, last = sys.intervals[0], sys.intervals[-1]
        lo = hi = None
        if first.b < last.a:
            lo, hi = first.b, last.a
        elif last.b < first.a:
            lo, hi = last.b, first.a
        if lo is not None and segment_points > 0:
            span = hi - lo
            if segment_points == 1:
                pts.append(mpc(lo + span / 2, mpf("0.1")))
            else:
                for i in range(segment_points):
                    t = mpf("0.1") + mpf("0.8") * i / (segment_points - 1)
                    pts.append(mpc(lo + t * span, mpf("0.1")))
        clearance = mpf(pole_clearance)
        kept = [
            z for z in pts if all(abs(z - zeta) >= clearance for zeta, _ in poles)
        ]
        desc = f"circle r={mp.nstr(radius, 6)} x{circle_points} + gap segment x{segment_points}"
        return cls(kept, desc)


class RatioErrorResult(NamedTuple):
    sup_error: mpf
    target_scale: mpf
    skipped: int


@dataclass(frozen=True)
class ConvergenceRow:
    """One sweep entry: target-normalized sup-errors for a solved multi-index."""

    n: MultiIndex
    err: tuple
    err0: mpf
    nullity_flag: bool
    precision_bits: int


def ratio_error(
    sys: NikishinSystem,
    pert: Optional[RationalPerturbation],
    v: TypeIVector,
    j: int,
    grid: EvalGrid,
) -> RatioErrorResult:
    """sup_K |a_j/a_m - (-1)^(m-j) s-hat_{m,j+1}|, skipping near-zeros of a_m."""
    m = sys.m
    if m < 2:
        raise ValueError("ratio error needs at least two components")
    if not 1 <= j <= m - 1:
        raise IndexError(f"component {j} outside 1..{m - 1}")
    target = sys.chain(m, j + 1)
    sign = (-1) ** (m - j)
    return _sup_ratio_error(v, grid, lambda z: sign * cauchy_eval(target, z), numerator=j)


def ratio_error_a0(
    sys: NikishinSystem,
    pert: Optional[RationalPerturbation],
    v: TypeIVector,
    grid: EvalGrid,
) -> RatioErrorResult:
    """sup_K |a_0/a_m - target| with the perturbation folded into the target.

    target = (-1)^m s-hat_{m,1} - sum_{j<m} (-1)^(m-j) r_j s-hat_{m,j+1} - r_m.
    """
    m = sys.m

    def target(z):
        acc = (-1) ** m * cauchy_eval(sys.chain(m, 1), z)
        if pert is not None:
            for j in range(1, m):
                f = pert.fractions[j - 1]
                if not f.is_zero:
                    acc -= (-1) ** (m - j) * f(z) * cauchy_eval(sys.chain(m, j + 1), z)
            if not pert.fractions[m - 1].is_zero:
                acc -= pert.fractions[m - 1](z)
        return acc

    return _sup_ratio_error(v, grid, target, numerator=0)


def _sup_ratio_error(v: TypeIVector, grid: EvalGrid, target, numerator: int):
    m = v.m
    a_m = v.a[m]
    if a_m.is_zero:
        raise ValueError("degenerate last component")
    a_num = v.a[numerator]
    skip_below = noise_floor(0.5)
    sup_err = mpf(0)
    target_scale = mpf(0)
    skipped = 0
    evaluated = 0
    for z in grid.points:
        den = a_m(z)
        if abs(den) < skip_below:
            skipped += 1
            continue
        t = target(z)
        target_scale = max(target_scale, abs(t))
        sup_err = max(sup_err, abs(a_num(z) / den - t))
        evaluated += 1
    if evaluated == 0:
        raise RuntimeError("every grid point fell on a zero of the last component")
    return RatioErrorResult(sup_err, target_scale, skipped)


def convergence_row(
    sys: NikishinSystem,
    pert: Optional[RationalPerturbation],
    v: TypeIVector,
    grid: EvalGrid,
) -> ConvergenceRow:
    """Sup-errors for all ratio limits, each normalized by its target's sup.

    Normalization makes rows exactly invariant under generator rescaling for
    plain systems (the blockwise nullspace covariance cancels), while leaving
    monotonicity and rate estimates untouched.
    """
    floor = mpf(2) ** (-mp.prec)
    errs = []
    for j in range(1, sys.m):
        r = ratio_error(sys, pert, v, j, grid)
        errs.append(r.sup_error / max(r.target_scale, floor))
    r0 = ratio_error_a0(sys, pert, v, grid)
    return ConvergenceRow(
        v.n,
        tuple(errs),
        r0.sup_error / max(r0.target_scale, floor),
        v.nullity_flag,
        v.precision_bits,
    )


@dataclass(frozen=True)
class RateEstimate:
    """Least-squares geometric rates exp(slope of log err vs |n|), per column."""

    deltas: dict
    notes: tuple


def estimate_rate(rows) -> RateEstimate:
    rows = sorted(rows, key=lambda r: r.n.total)
    if len(rows) < 3:
        raise ValueError("rate estimation needs at least three rows")
    totals = [r.n.total for r in rows]
    if any(totals[i] >= totals[i + 1] for i in range(len(totals) - 1)):
        raise ValueError("rows must have strictly increasing |n|")
    notes = []
    deltas = {}
    m_minus_1 = len(rows[0].err)
    columns = [(f"err_{j + 1}", [r.err[j] for r in rows]) for j in range(m_minus_1)]
    columns.append(("err_0", [r.err0 for r in rows]))
    for name, errs in columns:
        xs, ys = [], []
        for t, e in zip(totals, errs):
            if e == 0:
                notes.append(f"{name}: row |n|={t} excluded (exact recovery)")
                continue
            xs.append(mpf(t))
            ys.append(mp.log(e))
        if len(xs) < 2:
            notes.append(f"{name}: not enough nonzero rows for a rate")
            deltas[name] = None
            continue
        xbar = mp.fsum(xs) / len(xs)
        ybar = mp.fsum(ys) / len(ys)
        sxx = mp.fsum((x - xbar) ** 2 for x in xs)
        sxy = mp.fsum((x - xbar) * (y - ybar) for x, y in zip(xs, ys))
        deltas[name] = mp.e ** (sxy / sxx)
    return RateEstimate(deltas, tuple(notes))


def sign_changes(values) -> int:
    """Strict sign alternations, ignoring entries below 2^-P/2 of the max."""
    values = [mpf(v) for v in values]
    mx = max((abs(v) for v in values), default=mpf(0))
    if mx == 0:
        raise ValueError("function vanishes on grid")
    tol = noise_floor(0.5) * mx
    kept = [v for v in values if abs(v) > tol]
    if not kept:
        raise ValueError("function vanishes on grid")
    count = 0
    for a, b in zip(kept, kept[1:]):
        if (a > 0) != (b > 0):
            count += 1
    return count


def first_level_sign_grid(sys: NikishinSystem, refine: bool = False):
    """Ordered interior points where A_1's alternations are counted.

    Atoms of sigma_1 and the midpoints between them; refine adds the quarter
    points flanking each atom.  The transforms inside A_1 live on later
    intervals, so values at the atoms themselves are finite.
    """
    nodes = sys.generators[0].nodes
    pts = list(nodes)
    for x, y in zip(nodes, nodes[1:]):
        pts.append((x + y) / 2)
        if refine:
            pts.append(x + (y - x) / 4)
            pts.append(x + 3 * (y - x) / 4)
    return sorted(pts)


def first_level_remainder_values(sys: NikishinSystem, v: TypeIVector, refine: bool = False):
    return [
        remainder_eval(sys, None, v, 1, x) for x in first_level_sign_grid(sys, refine)
    ]


@dataclass(frozen=True)
class PoleAttractionReport:
    """Per-pole zero capture counts and the off-pole, off-interval stray census.

    Zeros beyond far_radius belong to the point at infinity (the limit set of
    the uncaptured zeros is the last interval together with infinity) and are
    tallied separately from strays.
    """

    counts: tuple  # (zeta, kappa, zeros within eps)
    strays: tuple
    far: int
    total_roots: int


def pole_attraction(
    pert: Optional[RationalPerturbation],
    v: TypeIVector,
    j: int,
    eps,
    last_interval: Interval,
    far_radius=None,
) -> PoleAttractionReport:
    """Count zeros of a_j inside eps-balls at the poles; census the leftovers.

    Strays are roots farther than eps from every pole, outside the
    eps-inflation of the last interval, and within far_radius of the origin
    (default: 4x the outer radius of the poles and the last interval, the
    same compact scale as the default grid).  The predicted limit puts kappa
    zeros at each pole and every other zero on the last interval or out at
    infinity, so strays should empty as |n| grows.
    """
    from .algebra import poly_roots

    if not 1 <= j <= v.m:
        raise IndexError("component out of range")
    eps = mpf(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    poles = pert.poles if pert is not None else ()
    for i in range(len(poles)):
        for k in range(i + 1, len(poles)):
            if eps >= abs(poles[i][0] - poles[k][0]) / 2:
                raise ValueError("eps exceeds half the minimal pole separation")
    for zeta, _ in poles:
        if eps >= last_interval.distance_to(zeta) / 2:
            raise ValueError("eps exceeds half the pole distance to the last interval")
    if far_radius is None:
        outer = max(abs(last_interval.a), abs(last_interval.b), mpf(1))
        for zeta, _ in poles:
            outer = max(outer, abs(zeta))
        far_radius = 4 * outer
    far_radius = mpf(far_radius)
    poly = v.a[j].trimmed()
    if poly.is_zero:
        raise ValueError("component is identically zero")
    roots = poly_roots(poly) if poly.degree >= 1 else []
    counts = []
    for zeta, kappa in poles:
        counts.append((zeta, kappa, sum(1 for r in roots if abs(r - zeta) < eps)))
    leftovers = [
        r
        for r in roots
        if all(abs(r - zeta) >= eps for zeta, _ in poles)
        and last_interval.distance_to(r) > eps
    ]
    strays = tuple(r for r in leftovers if abs(r) <= far_radius)
    far = sum(1 for r in leftovers if abs(r) > far_radius)
    return PoleAttractionReport(tuple(counts), strays, far, len(roots))
