"""Nikishin systems: nested products of measures on alternating intervals.

The product <alpha, beta> reweights alpha's atoms by the Cauchy transform of
beta, so every chain s_{j,k} = <sigma_j, ..., sigma_k> keeps sigma_j's nodes
and only changes weights and sign.  Both the forward chains s_{j,k} (j <= k)
and the reversed chains s_{k,j} (built from the reversed generator list) are
materialized eagerly at build time; the reversed transforms are the limit
targets of the ratio asymptotics and live on the last interval.

Two residual checks act as the correctness oracles for the tables: the
alternating cross-product identity linking forward and reversed transforms,
and the ratio identity expressing s-hat_{1,k}/s-hat_{1,1} through the inverse
measure of sigma_1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional

from mpmath import mp, mpc, mpf

from .measures import (
    AtomicMeasure,
    MeasureSpec,
    cauchy_eval,
    inverse_measure,
    realize,
)
from .precision import noise_floor


@dataclass(frozen=True)
class SystemSpec:
    """Generator descriptions, first interval to last."""

    measures: tuple

    def __init__(self, measures):
        measures = tuple(measures)
        if not measures:
            raise ValueError("a system needs at least one generator")
        if not all(isinstance(s, MeasureSpec) for s in measures):
            raise TypeError("SystemSpec takes MeasureSpec entries")
        object.__setattr__(self, "measures", measures)

    @property
    def m(self) -> int:
        return len(self.measures)


@dataclass(frozen=True)
class NikishinSystem:
    """Generators plus the eagerly built forward and reversed product tables.

    forward[(j, k)] = <sigma_j, ..., sigma_k> for 1 <= j <= k <= m (nodes of
    sigma_j); reversed_chains[(k, j)] = <sigma_k, ..., sigma_j> for j <= k
    (nodes of sigma_k).
    """

    generators: tuple
    intervals: tuple
    forward: dict
    reversed_chains: dict

    @property
    def m(self) -> int:
        return len(self.generators)

    def chain(self, a: int, b: int) -> AtomicMeasure:
        """The measure s_{a,b}: forward when a <= b, reversed when a > b."""
        self._check_index(a)
        self._check_index(b)
        return self.forward[(a, b)] if a <= b else self.reversed_chains[(a, b)]

    def _check_index(self, j: int):
        if not 1 <= j <= self.m:
            raise IndexError(f"chain index {j} outside 1..{self.m}")

    @property
    def outer_radius(self) -> mpf:
        return max(g.outer_radius for g in self.generators)


def product_measure(alpha: AtomicMeasure, beta: AtomicMeasure) -> AtomicMeasure:
    """<alpha, beta>: alpha's atoms reweighted by |beta-hat|, sign adjusted.

    beta-hat has one sign on all of alpha's support (the supports are disjoint
    or touch at a single point), so the result keeps constant sign.
    """
    _check_separation(alpha, beta)
    values = [cauchy_eval(beta, x) for x in alpha.nodes]
    first_positive = values[0] > 0
    if any((v > 0) != first_positive for v in values) or any(v == 0 for v in values):
        raise ValueError("supports overlap")
    sign = alpha.sign * (1 if first_positive else -1)
    return AtomicMeasure(
        alpha.nodes,
        [w * abs(v) for w, v in zip(alpha.weights, values)],
        sign,
        alpha.support,
    )


def _check_separation(alpha: AtomicMeasure, beta: AtomicMeasure):
    overlap_tol = noise_floor(0.5)
    touching = (
        alpha.support.b == beta.support.a or beta.support.b == alpha.support.a
    )
    min_gap = min(abs(x - y) for x in alpha.nodes for y in beta.nodes)
    if min_gap <= overlap_tol:
        raise ValueError("supports overlap")
    if touching and min_gap <= noise_floor(0.25):
        raise ValueError("node gap across the interval junction is below 2^-P/4")


def build_system(spec: SystemSpec) -> NikishinSystem:
    """Realize the generators and fill both product tables."""
    return system_from_generators([realize(s) for s in spec.measures])


def system_from_generators(generators) -> NikishinSystem:
    generators = tuple(generators)
    intervals = tuple(g.support for g in generators)
    m = len(generators)
    for j in range(m - 1):
        a, b = intervals[j], intervals[j + 1]
        lo, hi = (a, b) if a.a <= b.a else (b, a)
        if hi.a < lo.b:
            raise ValueError(
                f"intervals {j + 1} and {j + 2} overlap; consecutive supports "
                "must be disjoint or share a single endpoint"
            )
        if hi.a == lo.b:
            junction = hi.a
            if any(x == junction for x in generators[j].nodes) or any(
                x == junction for x in generators[j + 1].nodes
            ):
                raise ValueError("shared interval endpoint must be node-free")

    forward = {}
    for j in range(m, 0, -1):
        forward[(j, j)] = generators[j - 1]
        for k in range(j + 1, m + 1):
            forward[(j, k)] = product_measure(generators[j - 1], forward[(j + 1, k)])
    reversed_chains = {}
    for k in range(1, m + 1):
        reversed_chains[(k, k)] = generators[k - 1]
        for j in range(k - 1, 0, -1):
            reversed_chains[(k, j)] = product_measure(
                generators[k - 1], reversed_chains[(k - 1, j)]
            )
    return NikishinSystem(generators, intervals, forward, reversed_chains)


def s_hat_eval(sys: NikishinSystem, j: int, k: int, z):
    """Cauchy transform of the chain s_{j,k} at z."""
    return cauchy_eval(sys.chain(j, k), z)


class IdentityResidual(NamedTuple):
    residual: mpf
    scale: mpf


def check_chain_identity(sys: NikishinSystem, j: int, z) -> IdentityResidual:
    """Residual of the alternating identity tying reversed to forward chains.

    For j in 0..m-1 the combination
        (-1)^(m-j) s-hat_{m,j+1} + sum_{k=j+1}^{m-1} (-1)^(m-k) s-hat_{m,k+1} s-hat_{j+1,k}
        + s-hat_{j+1,m}
    vanishes identically off the supports; the returned scale is the largest
    term magnitude, for tolerance checks at 2^-P/2 * scale.
    """
    m = sys.m
    if not 0 <= j <= m - 1:
        raise IndexError(f"level {j} outside 0..{m - 1}")
    z = mpc(z)
    terms = [(-1) ** (m - j) * s_hat_eval(sys, m, j + 1, z)]
    for k in range(j + 1, m):
        terms.append(
            (-1) ** (m - k) * s_hat_eval(sys, m, k + 1, z) * s_hat_eval(sys, j + 1, k, z)
        )
    terms.append(s_hat_eval(sys, j + 1, m, z))
    residual = abs(mp.fsum(terms))
    scale = max(abs(t) for t in terms)
    return IdentityResidual(residual, scale)


def check_ratio_identity(
    sys: NikishinSystem, k: int, z, inverse: Optional[tuple] = None
) -> IdentityResidual:
    """Residual of s-hat_{1,k}/s-hat_{1,1} = mass ratio - <tau_11, <s_{2,k}, sigma_1>>-hat.

    The constant is the signed mass ratio c_0(s_{1,k})/c_0(s_{1,1}).  A
    single-atom sigma_1 has an empty tau and the bracket term is the zero
    function.  `inverse` can pass a precomputed inverse_measure(sigma_1).
    """
    if not 2 <= k <= sys.m:
        raise IndexError(f"ratio identity needs 2 <= k <= m, got {k}")
    z = mpc(z)
    sigma1 = sys.generators[0]
    _, tau = inverse if inverse is not None else inverse_measure(sigma1)
    lhs = s_hat_eval(sys, 1, k, z) / s_hat_eval(sys, 1, 1, z)
    mass_ratio = sys.chain(1, k).total_mass / sigma1.total_mass
    if tau is None:
        bracket = mpc(0)
    else:
        inner = product_measure(sys.chain(2, k), sigma1)
        outer = product_measure(tau, inner)
        bracket = cauchy_eval(outer, z)
    residual = abs(lhs - mass_ratio + bracket)
    scale = max(abs(lhs), abs(mass_ratio), abs(bracket))
    return IdentityResidual(residual, scale)
