"""Product measures, chain tables, and the two identity oracles."""

import random

import pytest
from mpmath import mp, mpc, mpf

from nikishin_hp import (
    AtomicMeasure,
    Interval,
    cauchy_eval,
    check_chain_identity,
    check_ratio_identity,
    noise_floor,
    product_measure,
    s_hat_eval,
    system_from_generators,
)


def unit_at(x, lo, hi):
    return AtomicMeasure([x], [1], 1, Interval(lo, hi))


TIGHT = mpf(10) ** -70


class TestProductMeasure:
    def test_negative_transform_side(self):
        # beta-hat(0) = 1/(0-2) = -1/2: magnitude 1/2, sign flips
        alpha = unit_at(0, -1, "0.5")
        beta = unit_at(2, 1, 3)
        prod = product_measure(alpha, beta)
        assert prod.nodes == alpha.nodes
        assert abs(prod.weights[0] - mpf("0.5")) < TIGHT
        assert prod.sign == -1

    def test_positive_transform_side(self):
        # beta = mass 2 at -3: beta-hat(0) = 2/3
        alpha = unit_at(0, -1, 1)
        beta = AtomicMeasure([-3], [2], 1, Interval(-4, -2))
        prod = product_measure(alpha, beta)
        assert abs(prod.weights[0] - mpf(2) / 3) < TIGHT
        assert prod.sign == 1

    def test_total_mass_is_integral_of_transform(self):
        rng = random.Random(31)
        alpha = AtomicMeasure(
            sorted(rng.uniform(-1, 0) for _ in range(5)),
            [rng.uniform(0.2, 1) for _ in range(5)],
            1,
            Interval(-1, 0),
        )
        beta = AtomicMeasure(
            sorted(rng.uniform(1, 3) for _ in range(4)),
            [rng.uniform(0.2, 1) for _ in range(4)],
            1,
            Interval(1, 3),
        )
        prod = product_measure(alpha, beta)
        integral = mp.fsum(
            w * cauchy_eval(beta, x) for x, w in zip(alpha.nodes, alpha.weights)
        )
        assert abs(prod.total_variation - abs(integral)) < TIGHT

    def test_overlapping_supports_rejected(self):
        a = AtomicMeasure([0, 1], [1, 1], 1, Interval(-1, 2))
        b = AtomicMeasure([1, 2], [1, 1], 1, Interval("0.5", 3))
        with pytest.raises(ValueError):
            product_measure(a, b)


class TestBuildSystem:
    def test_single_generator(self, f1_system):
        assert f1_system.m == 1
        assert f1_system.chain(1, 1) is f1_system.generators[0]

    def test_support_preservation(self, m2_16_system):
        sys = m2_16_system
        assert sys.chain(1, 2).nodes == sys.generators[0].nodes
        assert sys.chain(2, 1).nodes == sys.generators[1].nodes

    def test_all_entries_keep_constant_sign(self, m3_16_system):
        for table in (m3_16_system.forward, m3_16_system.reversed_chains):
            for mu in table.values():
                assert all(w > 0 for w in mu.weights)
                assert mu.sign in (1, -1)

    def test_nested_product_against_double_sum(self, m3_16_system):
        # s_{1,3} weights w_i * |sum_j w2_j sigma3-hat(y_j) / (x_i - y_j)|
        sys = m3_16_system
        s13 = sys.chain(1, 3)
        sigma1, sigma2, sigma3 = sys.generators
        for i in (0, 7, 15):
            x = sigma1.nodes[i]
            double_sum = mp.fsum(
                w2 * cauchy_eval(sigma3, y) / (x - y)
                for y, w2 in zip(sigma2.nodes, sigma2.weights)
            )
            oracle = sigma1.weights[i] * abs(double_sum)
            assert abs(s13.weights[i] - oracle) <= noise_floor(0.5) * oracle

    def test_adjacency_violation_rejected(self):
        a = AtomicMeasure([0], [1], 1, Interval(-1, 1))
        b = AtomicMeasure([0.5], [1], 1, Interval(0, 2))
        with pytest.raises(ValueError):
            system_from_generators([a, b])

    def test_touching_junction_must_be_node_free(self):
        a = AtomicMeasure([-0.5, 0], [1, 1], 1, Interval(-1, 0))
        b = AtomicMeasure([1], [1], 1, Interval(0, 2))
        with pytest.raises(ValueError):
            system_from_generators([a, b])

    def test_touching_intervals_with_clear_junction_build(self):
        a = AtomicMeasure(["-0.5", "-0.25"], [1, 1], 1, Interval(-1, 0))
        b = AtomicMeasure(["0.25", "0.5"], [1, 1], 1, Interval(0, 1))
        sys = system_from_generators([a, b])
        assert sys.m == 2


class TestTransformEval:
    def test_diagonal_matches_generator(self, m2_16_system):
        z = mpc(2, 3)
        got = s_hat_eval(m2_16_system, 1, 1, z)
        assert got == cauchy_eval(m2_16_system.generators[0], z)

    def test_leading_asymptotics(self, m2_16_system):
        z = mpf(10) ** 8
        s12 = m2_16_system.chain(1, 2)
        got = s_hat_eval(m2_16_system, 1, 2, z)
        assert abs(got - s12.total_mass / z) < abs(s12.total_mass) / z**2 * 10

    def test_forward_and_reversed_differ(self, m2_16_system):
        z = mpc(1, 2)
        assert s_hat_eval(m2_16_system, 1, 2, z) != s_hat_eval(m2_16_system, 2, 1, z)


class TestChainIdentity:
    def test_m1_degenerate(self, f1_system):
        r = check_chain_identity(f1_system, 0, mpc(2, 1))
        assert r.residual == 0

    def test_m2_partial_fraction_identity(self, m2_16_system):
        rng = random.Random(41)
        for _ in range(5):
            z = mpc(rng.uniform(-4, 4), rng.uniform(0.5, 4))
            r = check_chain_identity(m2_16_system, 0, z)
            assert r.residual <= noise_floor(0.5) * r.scale

    def test_m3_all_levels_at_10i(self, m3_16_system):
        for j in range(3):
            r = check_chain_identity(m3_16_system, j, mpc(0, 10))
            assert r.residual <= noise_floor(0.5) * max(r.scale, mpf(1))

    def test_level_out_of_range(self, m2_16_system):
        with pytest.raises(IndexError):
            check_chain_identity(m2_16_system, 2, mpc(0, 1))


class TestRatioIdentity:
    def test_single_atom_constant_ratio(self):
        sigma1 = unit_at(0, -1, "0.5")
        sigma2 = AtomicMeasure([1, 2], [1, 1], 1, Interval(1, 3))
        sys = system_from_generators([sigma1, sigma2])
        z = mpc(5, 5)
        r = check_ratio_identity(sys, 2, z)
        assert r.residual < TIGHT
        ratio = s_hat_eval(sys, 1, 2, z) / s_hat_eval(sys, 1, 1, z)
        mass_ratio = sys.chain(1, 2).total_mass / sigma1.total_mass
        assert abs(ratio - mass_ratio) < TIGHT

    def test_two_atom_residual(self):
        sigma1 = AtomicMeasure([-1, 1], ["0.5", "0.5"], 1, Interval("-1.2", "1.2"))
        sigma2 = AtomicMeasure([2, 3], [1, 2], 1, Interval(2, 4))
        sys = system_from_generators([sigma1, sigma2])
        r = check_ratio_identity(sys, 2, mpc(5, 5))
        assert r.residual <= noise_floor(0.5) * max(r.scale, mpf(1))

    def test_limit_at_infinity_signed(self, m2_16_system):
        z = mpf(10) ** 9
        lhs = s_hat_eval(m2_16_system, 1, 2, z) / s_hat_eval(m2_16_system, 1, 1, z)
        ratio = m2_16_system.chain(1, 2).total_mass / m2_16_system.chain(1, 1).total_mass
        assert abs(lhs - ratio) < abs(ratio) * mpf(10) ** -8
        assert (lhs > 0) == (ratio > 0)

    def test_residual_across_levels(self, m3_16_system):
        rng = random.Random(43)
        for k in (2, 3):
            z = mpc(rng.uniform(5, 8), rng.uniform(2, 4))
            r = check_ratio_identity(m3_16_system, k, z)
            assert r.residual <= noise_floor(0.4) * max(r.scale, mpf(1))
