"""Type I and type II simultaneous rational approximation of Cauchy transforms.

Order conditions at infinity translate into homogeneous moment-shift linear
systems; the solution is the right singular direction of least singular value
at working precision, with automatic precision doubling (up to 4096 bits) when
the achieved vanishing order falls short of the target.  The perturbed problem
approximates f_j = s-hat_{1,j} + r_j; multiplying its order condition by
T = prod t_j turns the solution into an incomplete approximant of the plain
system with order deficit deg T, which perturbed_reduce performs and verifies.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional

from mpmath import mp, mpc, mpf

from .algebra import LaurentTail, Polynomial, RationalFn, laurent_expand_rational, poly_roots
from .measures import cauchy_eval, moments
from .nikishin import NikishinSystem
from .precision import MAX_PRECISION_BITS, noise_floor, working_precision

NULLITY_GAP = mpf(2) ** 10  # sigma_min2/sigma_min at or below this flags nullity > 1


@dataclass(frozen=True)
class MultiIndex:
    """Per-component degree budget (n_1, ..., n_m), not all zero."""

    parts: tuple

    def __init__(self, parts):
        parts = tuple(int(p) for p in parts)
        if not parts:
            raise ValueError("empty multi-index")
        if any(p < 0 for p in parts):
            raise ValueError("multi-index entries must be nonnegative")
        if all(p == 0 for p in parts):
            raise ValueError("multi-index must not be zero")
        object.__setattr__(self, "parts", parts)

    def __len__(self) -> int:
        return len(self.parts)

    def __getitem__(self, j: int) -> int:
        return self.parts[j]

    def __iter__(self):
        return iter(self.parts)

    @property
    def total(self) -> int:
        return sum(self.parts)

    @property
    def max_part(self) -> int:
        return max(self.parts)

    @property
    def spread(self) -> int:
        return max(self.parts) - min(self.parts)

    @classmethod
    def diagonal(cls, m: int, k: int) -> "MultiIndex":
        return cls((k,) * m)


@dataclass(frozen=True)
class RationalPerturbation:
    """The rational vector r = (v_1/t_1, ..., v_m/t_m) plus T = prod t_j.

    poles holds the distinct zeros of T with multiplicities; components may be
    identically zero (they contribute no pole factors).  Pole sets of distinct
    nonzero components must be disjoint.
    """

    fractions: tuple
    T: Polynomial
    degree: int
    poles: tuple

    def __init__(self, fractions):
        fractions = tuple(
            f if isinstance(f, RationalFn) else RationalFn(*f) for f in fractions
        )
        if not fractions:
            raise ValueError("perturbation needs one entry per system component")
        for f in fractions:
            if any(isinstance(c, mpc) for c in f.num.coeffs + f.den.coeffs):
                raise ValueError("perturbation coefficients must be real")
        T = Polynomial.one()
        per_component = []
        for f in fractions:
            T = T * f.den
            per_component.append(
                _cluster_roots(poly_roots(f.den)) if f.den.degree >= 1 else ()
            )
        # poles of distinct components must not collide
        tol = noise_floor(0.125)
        for i in range(len(per_component)):
            for j in range(i + 1, len(per_component)):
                for zi, _ in per_component[i]:
                    for zj, _ in per_component[j]:
                        if abs(zi - zj) <= tol * (1 + abs(zi)):
                            raise ValueError(
                                "distinct components must have distinct poles"
                            )
        poles = tuple(p for comp in per_component for p in comp)
        object.__setattr__(self, "fractions", fractions)
        object.__setattr__(self, "T", T)
        object.__setattr__(self, "degree", T.degree)
        object.__setattr__(self, "poles", poles)

    @classmethod
    def zero(cls, m: int) -> "RationalPerturbation":
        return cls([RationalFn.zero() for _ in range(m)])

    @property
    def m(self) -> int:
        return len(self.fractions)

    @property
    def is_zero(self) -> bool:
        return all(f.is_zero for f in self.fractions)

    def validate_against(self, sys: NikishinSystem):
        """Poles must avoid the first and last support intervals."""
        if self.m != sys.m:
            raise ValueError("perturbation size does not match the system")
        clearance = noise_floor(0.25)
        for interval in (sys.intervals[0], sys.intervals[-1]):
            for zeta, _ in self.poles:
                if interval.distance_to(zeta) <= clearance:
                    raise ValueError(
                        "perturbation poles must avoid the first and last intervals"
                    )


def _cluster_roots(roots, rel_tol=None):
    """Group near-coincident roots into (center, multiplicity) pairs."""
    tol = noise_floor(0.125) if rel_tol is None else mpf(rel_tol)
    clusters = []
    for z in roots:
        for idx, (center, count) in enumerate(clusters):
            if abs(z - center) <= tol * (1 + abs(center)):
                clusters[idx] = ((center * count + z) / (count + 1), count + 1)
                break
        else:
            clusters.append((z, 1))
    return tuple(clusters)


@dataclass(frozen=True)
class TypeIVector:
    """Type I solution (a_0, ..., a_m) with its achieved vanishing order."""

    a: tuple
    n: MultiIndex
    order_target: int
    residual_order: int
    nullity_flag: bool
    precision_bits: int

    @property
    def m(self) -> int:
        return len(self.a) - 1


@dataclass(frozen=True)
class TypeIIVector:
    """Type II solution (Q, P_1, ..., P_m) with per-component achieved orders."""

    q: Polynomial
    p: tuple
    n: MultiIndex
    residual_orders: tuple
    nullity_flag: bool
    precision_bits: int

    @property
    def m(self) -> int:
        return len(self.p)


class OrthogonalityReport(NamedTuple):
    max_residual: mpf
    scale: mpf
    conditions: int


@dataclass(frozen=True)
class ReduceReport:
    """Outcome of the T-multiplication reduction of a perturbed solution."""

    p0: Polynomial
    reduced: TypeIVector
    max_residual: mpf
    scale: mpf
    order_checked: int


# ---------------------------------------------------------------------------
# assembly and nullspace extraction
# ---------------------------------------------------------------------------


def assemble_type1_system(tails, n: MultiIndex, M: int = 0):
    """Moment-shift matrix whose nullspace is the admissible (a_1..a_m) set.

    Row t (t = 0..|n|-2-M) imposes a zero coefficient of z^-(t+1) in
    sum_j a_j f_j; the column block for component j has width n_j with entry
    tails[j][l + t] in column position l.
    """
    if M < 0:
        raise ValueError("order deficit M must be nonnegative")
    if len(tails) != len(n):
        raise ValueError("one tail per component required")
    rows = max(0, n.total - 1 - M)
    cols = n.total
    for j, tail in enumerate(tails):
        need = n[j] - 1 + max(rows - 1, 0) + 1
        if n[j] > 0 and len(tail) < need:
            raise ValueError("tails too short for the requested order conditions")
    if rows == 0:
        return mp.matrix(0, cols)
    A = mp.matrix(rows, cols)
    for t in range(rows):
        col = 0
        for j in range(len(n)):
            for l in range(n[j]):
                A[t, col] = tails[j][l + t]
                col += 1
    return A


def _nullspace_min_direction(A, expected_rank: int):
    """Least-singular right direction of A (padded square), plus a nullity flag.

    The flag fires when the smallest structural singular value is within a
    factor 2^10 of the largest should-be-zero one (rank deficient beyond the
    guaranteed nullity), or when there are no constraints at all.
    """
    rows, cols = A.rows, A.cols
    S = mp.matrix(cols, cols)
    for i in range(rows):
        for j in range(cols):
            S[i, j] = A[i, j]
    _, svals, V = mp.svd_r(S)
    vec = [V[cols - 1, j] for j in range(cols)]
    if expected_rank <= 0:
        return vec, True, svals
    flag = svals[expected_rank - 1] <= NULLITY_GAP * svals[expected_rank]
    return vec, bool(flag), svals


# ---------------------------------------------------------------------------
# type I
# ---------------------------------------------------------------------------


def solve_type1(
    sys: NikishinSystem, n: MultiIndex, M: int = 0, base_tails=None
) -> TypeIVector:
    """Normalized type I vector for the plain system, order target |n| - M."""
    return _escalating_type1(sys, None, n, M, base_tails)


def solve_type1_perturbed(
    sys: NikishinSystem, pert: RationalPerturbation, n: MultiIndex, base_tails=None
) -> TypeIVector:
    """Type I vector for f_j = s-hat_{1,j} + r_j, full order |n|."""
    pert.validate_against(sys)
    return _escalating_type1(sys, pert, n, 0, base_tails)


def _escalating_type1(sys, pert, n, M, base_tails=None) -> TypeIVector:
    if len(n) != sys.m:
        raise ValueError("multi-index size does not match the system")
    bits = mp.prec
    first = True
    while True:
        with working_precision(bits):
            v = _solve_type1_once(sys, pert, n, M, bits, base_tails if first else None)
        if v.residual_order >= v.order_target or bits >= MAX_PRECISION_BITS:
            return v
        bits = min(2 * bits, MAX_PRECISION_BITS)
        first = False


def _type1_tails(sys, pert, n, K, base_tails=None):
    """Moment tails of s_{1,j} to index K, plus the rational expansions.

    base_tails, when long enough, supplies the measure moments (e.g. from the
    CLI cache); they are only trusted at the precision they were computed at,
    so escalated re-solves always recompute.
    """
    tails = []
    for j in range(1, len(n) + 1):
        if base_tails is not None and len(base_tails[j - 1]) >= K + 1:
            tail = LaurentTail(base_tails[j - 1].coeffs[: K + 1])
        else:
            tail = moments(sys.chain(1, j), K)
        if pert is not None and not pert.fractions[j - 1].is_zero:
            tail = tail + laurent_expand_rational(pert.fractions[j - 1], K + 1)
        tails.append(tail)
    return tails


def _solve_type1_once(sys, pert, n, M, bits, base_tails=None) -> TypeIVector:
    total = n.total
    K = total + n.max_part + 4
    tails = _type1_tails(sys, pert, n, K, base_tails)
    A = assemble_type1_system(tails, n, M)
    vec, flag, _ = _nullspace_min_direction(A, max(0, total - 1 - M))
    blocks = _split_blocks(vec, n)
    blocks = _normalize_blocks(blocks)
    a0 = _polynomial_part(blocks, tails, n)
    residual_order = _achieved_order(blocks, tails, n, total + 4)
    a = (a0,) + tuple(Polynomial(b) for b in blocks)
    return TypeIVector(a, n, total - M, residual_order, flag, bits)


def _split_blocks(vec, n):
    blocks = []
    pos = 0
    for j in range(len(n)):
        blocks.append(list(vec[pos : pos + n[j]]))
        pos += n[j]
    return blocks


def _normalize_blocks(blocks):
    """Unit max coefficient over a_1..a_m; leading coeff of last nonzero block positive."""
    mx = max((abs(c) for b in blocks for c in b), default=mpf(0))
    if mx == 0:
        raise RuntimeError("nullspace produced the zero vector")
    blocks = [[c / mx for c in b] for b in blocks]
    tol = noise_floor(0.5)
    for b in reversed(blocks):
        lead = next((c for c in reversed(b) if abs(c) > tol), None)
        if lead is not None:
            if lead < 0:
                blocks = [[-c for c in b2] for b2 in blocks]
            break
    return blocks


def _polynomial_part(blocks, tails, n):
    """-PolynomialPart(sum_j a_j f_j); degree at most max(n_j) - 2."""
    coeffs = []
    for p in range(max(n.max_part - 1, 0)):
        acc = mpf(0)
        for j in range(len(n)):
            tail = tails[j]
            block = blocks[j]
            for l in range(p + 1, n[j]):
                acc += block[l] * tail[l - p - 1]
        coeffs.append(-acc)
    return Polynomial(coeffs)


def _achieved_order(blocks, tails, n, upto):
    """First non-vanishing tail index of the remainder, plus one."""
    tol = noise_floor(0.5)
    for k in range(upto):
        acc = mpf(0)
        scale = mpf(0)
        for j in range(len(n)):
            tail = tails[j]
            block = blocks[j]
            for l in range(n[j]):
                term = block[l] * tail[l + k]
                acc += term
                scale += abs(term)
        if abs(acc) > tol * scale:
            return k + 1
    return upto


# ---------------------------------------------------------------------------
# perturbation reduction
# ---------------------------------------------------------------------------


def perturbed_reduce(
    pert: RationalPerturbation, v: TypeIVector, sys: NikishinSystem
) -> ReduceReport:
    """Multiply the perturbed order condition by T and verify the outcome.

    p_0 = T a_0 + sum_j (T/t_j) v_j a_j is an exact polynomial; the vector
    (p_0, T a_1, ..., T a_m) must satisfy the plain system's order conditions
    through |n| - deg T, which is re-verified from fresh unperturbed tails.
    """
    m = sys.m
    if v.m != m or pert.m != m:
        raise ValueError("component count mismatch")
    T, D = pert.T, pert.degree
    tol = noise_floor(0.5)
    for f in pert.fractions:
        if f.is_zero:
            continue
        rem = T % f.den
        if not rem.is_zero and rem.max_coeff() > tol * T.max_coeff():
            raise ValueError("pole cancellation failed; perturbation input corrupted")

    p0 = T * v.a[0]
    for j in range(1, m + 1):
        f = pert.fractions[j - 1]
        if f.is_zero:
            continue
        cofactor = Polynomial.one()
        for k in range(1, m + 1):
            if k != j:
                cofactor = cofactor * pert.fractions[k - 1].den
        p0 = p0 + cofactor * f.num * v.a[j]

    reduced_n = MultiIndex([p + D for p in v.n])
    order_checked = v.n.total - D
    blocks = [list((T * v.a[j]).coeffs) for j in range(1, m + 1)]
    blocks = [b + [mpf(0)] * (reduced_n[j] - len(b)) for j, b in enumerate(blocks)]
    K = reduced_n.total + reduced_n.max_part + 4
    tails = _type1_tails(sys, None, reduced_n, K)

    max_residual = mpf(0)
    scale = mpf(0)
    for k in range(max(order_checked - 1, 0)):
        acc = mpf(0)
        sc = mpf(0)
        for j in range(m):
            tail = tails[j]
            for l, c in enumerate(blocks[j]):
                term = c * tail[l + k]
                acc += term
                sc += abs(term)
        max_residual = max(max_residual, abs(acc))
        scale = max(scale, sc)
    residual_order = _achieved_order(blocks, tails, reduced_n, v.n.total + 4)
    reduced = TypeIVector(
        (p0,) + tuple(T * v.a[j] for j in range(1, m + 1)),
        reduced_n,
        order_checked,
        residual_order,
        v.nullity_flag,
        v.precision_bits,
    )
    return ReduceReport(p0, reduced, max_residual, scale, order_checked)


# ---------------------------------------------------------------------------
# type II
# ---------------------------------------------------------------------------


def solve_type2(sys: NikishinSystem, n: MultiIndex) -> TypeIIVector:
    """Monic common denominator Q and numerators P_j, orders n_j + 1 each."""
    if len(n) != sys.m:
        raise ValueError("multi-index size does not match the system")
    bits = mp.prec
    while True:
        with working_precision(bits):
            v = _solve_type2_once(sys, n, bits)
        if (
            all(v.residual_orders[j] >= n[j] + 1 for j in range(sys.m))
            or bits >= MAX_PRECISION_BITS
        ):
            return v
        bits = min(2 * bits, MAX_PRECISION_BITS)


def _solve_type2_once(sys, n, bits) -> TypeIIVector:
    total = n.total
    K = total + n.max_part + 4
    tails = [moments(sys.chain(1, j), K) for j in range(1, len(n) + 1)]
    A = mp.matrix(total + 1, total + 1)
    row = 0
    for j in range(len(n)):
        for nu in range(n[j]):
            for mu in range(total + 1):
                A[row, mu] = tails[j][nu + mu]
            row += 1
    vec, flag, _ = _nullspace_min_direction(A, total)
    tol = noise_floor(0.5)
    mx = max(abs(c) for c in vec)
    deg = max(k for k, c in enumerate(vec) if abs(c) > tol * mx)
    lead = vec[deg]
    q = Polynomial([c / lead for c in vec[: deg + 1]])

    ps = []
    orders = []
    for j in range(len(n)):
        tail = tails[j]
        coeffs = []
        for p in range(total):
            acc = mpf(0)
            for mu in range(p + 1, deg + 1):
                acc += q[mu] * tail[mu - p - 1]
            coeffs.append(acc)
        ps.append(Polynomial(coeffs))
        orders.append(_type2_order(q, tail, n[j] + 4))
    return TypeIIVector(q, tuple(ps), n, tuple(orders), flag, bits)


def _type2_order(q, tail, upto):
    tol = noise_floor(0.5)
    for k in range(upto):
        acc = mpf(0)
        scale = mpf(0)
        for mu in range(q.degree + 1):
            term = q[mu] * tail[mu + k]
            acc += term
            scale += abs(term)
        if abs(acc) > tol * scale:
            return k + 1
    return upto


def type2_residual_tail(sys: NikishinSystem, v: TypeIIVector, j: int, extra: int = 4):
    """Tail coefficients of Q s-hat_{1,j} - P_j, indices 0..n_j+extra."""
    if not 1 <= j <= v.m:
        raise IndexError("component out of range")
    K = v.q.degree + v.n[j - 1] + extra + 1
    tail = moments(sys.chain(1, j), K)
    out = []
    for k in range(v.n[j - 1] + extra + 1):
        out.append(mp.fsum(v.q[mu] * tail[mu + k] for mu in range(v.q.degree + 1)))
    return out


# ---------------------------------------------------------------------------
# remainders and orthogonality
# ---------------------------------------------------------------------------


def remainder_eval(
    sys: NikishinSystem,
    pert: Optional[RationalPerturbation],
    v: TypeIVector,
    j: int,
    z,
):
    """A_j(z) = a_j(z) + sum_{k>j} a_k(z) s-hat_{j+1,k}(z); perturbed at j = 0.

    j = m degenerates to the plain polynomial value a_m(z).
    """
    m = v.m
    if not 0 <= j <= m:
        raise IndexError("remainder level out of range")
    acc = v.a[j](z)
    for k in range(j + 1, m + 1):
        acc = acc + v.a[k](z) * cauchy_eval(sys.chain(j + 1, k), z)
    if j == 0 and pert is not None:
        for k in range(1, m + 1):
            f = pert.fractions[k - 1]
            if not f.is_zero:
                acc = acc + v.a[k](z) * f(z)
    return acc


def check_orthogonality(
    sys: NikishinSystem, v: TypeIVector, level: int = 1, M: Optional[int] = None
) -> OrthogonalityReport:
    """Moment orthogonality of the first-level remainder on sigma_1's atoms.

    With achieved order N the sums sum_i x_i^nu A_1(x_i) w_i sign vanish for
    nu = 0..N-2.  N defaults to the vector's order target; pass M to override
    (N = |n| - M).  Vectors from perturbed_reduce verify the T-weighted form
    automatically since their remainder is T * A_1.
    """
    if level != 1:
        raise ValueError("only the first-level orthogonality is computable here")
    N = v.order_target if M is None else v.n.total - M
    if N <= 1:
        return OrthogonalityReport(mpf(0), mpf(0), 0)
    sigma1 = sys.generators[0]
    vals = [remainder_eval(sys, None, v, 1, x) for x in sigma1.nodes]
    signed = [val * w * sigma1.sign for val, w in zip(vals, sigma1.weights)]
    max_residual = mpf(0)
    max_scale = mpf(0)
    powers = list(signed)
    for _ in range(N - 1):
        max_residual = max(max_residual, abs(mp.fsum(powers)))
        max_scale = max(max_scale, mp.fsum(abs(t) for t in powers))
        powers = [t * x for t, x in zip(powers, sigma1.nodes)]
    return OrthogonalityReport(max_residual, max_scale, N - 1)
