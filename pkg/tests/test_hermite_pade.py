"""Order-condition assembly, type I/II solves, reduction, remainders, orthogonality."""

import pytest
from mpmath import mp, mpc, mpf

from nikishin_hp import (
    AtomicMeasure,
    Interval,
    LaurentTail,
    MultiIndex,
    Polynomial,
    RationalFn,
    RationalPerturbation,
    assemble_type1_system,
    check_orthogonality,
    noise_floor,
    perturbed_reduce,
    remainder_eval,
    solve_type1,
    solve_type1_perturbed,
    solve_type2,
    system_from_generators,
    type2_residual_tail,
)

TIGHT = mpf(10) ** -70


def unit_at(x, lo, hi):
    return AtomicMeasure([x], [1], 1, Interval(lo, hi))


class TestMultiIndex:
    def test_validation(self):
        with pytest.raises(ValueError):
            MultiIndex(())
        with pytest.raises(ValueError):
            MultiIndex((0, 0))
        with pytest.raises(ValueError):
            MultiIndex((1, -1))

    def test_accessors(self):
        n = MultiIndex((2, 5))
        assert n.total == 7 and n.max_part == 5 and n.spread == 3
        assert list(n) == [2, 5]
        assert MultiIndex.diagonal(3, 4).parts == (4, 4, 4)


class TestAssembly:
    def test_hand_assembled_row(self):
        tails = [LaurentTail([1, 0, 1, 0, 1])]
        A = assemble_type1_system(tails, MultiIndex((2,)), 0)
        assert (A.rows, A.cols) == (1, 2)
        assert A[0, 0] == 1 and A[0, 1] == 0

    def test_no_conditions_for_total_one(self):
        A = assemble_type1_system([LaurentTail([1])], MultiIndex((1,)), 0)
        assert (A.rows, A.cols) == (0, 1)

    def test_full_deficit_empty_matrix(self):
        tails = [LaurentTail([1, 2, 3]), LaurentTail([1, 2, 3])]
        A = assemble_type1_system(tails, MultiIndex((2, 1)), 2)
        assert (A.rows, A.cols) == (0, 3)

    def test_one_more_column_than_rows_when_complete(self):
        tails = [LaurentTail(range(1, 12)), LaurentTail(range(2, 13))]
        n = MultiIndex((3, 2))
        A = assemble_type1_system(tails, n, 0)
        assert A.cols == A.rows + 1 == n.total

    def test_short_tails_rejected(self):
        with pytest.raises(ValueError):
            assemble_type1_system([LaurentTail([1, 2])], MultiIndex((3,)), 0)


class TestTypeIPlain:
    def test_f1_hand_solution(self, f1_system):
        v = solve_type1(f1_system, MultiIndex((2,)))
        assert abs(v.a[1][1] - 1) < noise_floor(0.5)  # a_1 = z
        assert abs(v.a[1][0]) < noise_floor(0.5)
        assert abs(v.a[0][0] + 1) < noise_floor(0.5)  # a_0 = -1
        assert v.residual_order >= 2
        assert not v.nullity_flag
        # remainder z s-hat - 1 = 1/(z^2-1)
        assert abs(remainder_eval(f1_system, None, v, 0, 2) - mpf(1) / 3) < TIGHT

    def test_no_conditions_means_constant(self, f1_system):
        v = solve_type1(f1_system, MultiIndex((1,)))
        assert v.a[1].degree == 0
        assert abs(v.a[1][0] - 1) < TIGHT
        assert v.a[0].is_zero
        assert v.nullity_flag  # zero constraints: every vector admissible

    def test_m2_orthogonality_residuals_vanish(self, m2_16_system):
        for k in (2, 3):
            v = solve_type1(m2_16_system, MultiIndex((k, k)))
            rep = check_orthogonality(m2_16_system, v)
            assert rep.conditions == 2 * k - 1
            assert rep.max_residual <= noise_floor(0.5) * max(rep.scale, mpf(1))

    def test_achieved_order_meets_target(self, m2_16_system):
        v = solve_type1(m2_16_system, MultiIndex((4, 4)))
        assert v.residual_order >= 8

    def test_degenerate_component_stays_zero(self, m2_16_system):
        v = solve_type1(m2_16_system, MultiIndex((2, 0)))
        assert v.a[2].is_zero

    def test_scaling_first_generator_leaves_nullspace_vector(self, m2_16_system):
        # scaling sigma_1 scales every s_{1,j} uniformly: same normalized blocks,
        # the recovered a_0 scales along
        lam = mpf(7)
        scaled = system_from_generators(
            [m2_16_system.generators[0].scaled(lam), m2_16_system.generators[1]]
        )
        n = MultiIndex((3, 3))
        v = solve_type1(m2_16_system, n)
        w = solve_type1(scaled, n)
        tol = noise_floor(0.45)
        for j in (1, 2):
            for k in range(n[j - 1]):
                assert abs(v.a[j][k] - w.a[j][k]) < tol
        for k in range(v.a[0].degree + 1):
            assert abs(lam * v.a[0][k] - w.a[0][k]) < tol * lam

    def test_atomic_exactness_remainder_shape(self, f1_system):
        # N=2 atoms: at n=(N) the remainder is const / prod(z - x_i);
        # at n=(N+1) the kill is exact and the constant collapses to zero
        nodes_poly = Polynomial.from_roots(f1_system.generators[0].nodes)
        for parts, expect_zero in (((2,), False), ((3,), True)):
            v = solve_type1(f1_system, MultiIndex(parts))
            consts = [
                remainder_eval(f1_system, None, v, 0, z) * nodes_poly(z)
                for z in (mpf(2), mpf(-3), mpc(1, 2))
            ]
            spread = max(abs(a - b) for a in consts for b in consts)
            assert spread < noise_floor(0.5) * max(1, abs(consts[0]))
            if expect_zero:
                assert all(abs(c) < noise_floor(0.5) for c in consts)
                assert v.residual_order == v.n.total + 4  # never left zero


class TestTypeIPerturbed:
    def test_zero_perturbation_reduces_to_plain(self, m2_16_system):
        n = MultiIndex((3, 3))
        plain = solve_type1(m2_16_system, n)
        pert = RationalPerturbation.zero(2)
        mixed = solve_type1_perturbed(m2_16_system, pert, n)
        for j in range(3):
            for k in range(max(plain.a[j].degree, mixed.a[j].degree) + 1):
                assert abs(plain.a[j][k] - mixed.a[j][k]) < noise_floor(0.5)

    def test_hand_solve_single_pole(self):
        # sigma = unit mass at 0, r = 1/(z-3): summed tail (2, 3, ...)
        sys = system_from_generators([unit_at(0, -1, 1)])
        pert = RationalPerturbation([RationalFn([1], [-3, 1])])
        v = solve_type1_perturbed(sys, pert, MultiIndex((2,)))
        # nullspace of [2 3]: a_1 proportional to z - 3/2
        assert abs(v.a[1][0] / v.a[1][1] + mpf(3) / 2) < noise_floor(0.5)
        assert v.residual_order >= 2

    def test_fixture_order_achieved(self, m2_16_system, pert_pm5):
        v = solve_type1_perturbed(m2_16_system, pert_pm5, MultiIndex((4, 4)))
        assert v.residual_order >= 8

    def test_pole_inside_support_rejected(self, m2_16_system):
        bad = RationalPerturbation([RationalFn([1], [-2, 1]), RationalFn.zero()])
        with pytest.raises(ValueError):
            solve_type1_perturbed(m2_16_system, bad, MultiIndex((2, 2)))

    def test_pole_in_middle_interval_allowed(self, m3_16_system):
        # poles must avoid the first and last intervals only
        pert = RationalPerturbation(
            [RationalFn([1], [-2, 1]), RationalFn.zero(), RationalFn.zero()]
        )
        pert.validate_against(m3_16_system)  # no error


class TestPerturbation:
    def test_double_pole_multiplicity(self):
        pert = RationalPerturbation(
            [RationalFn([1], [25, -10, 1]), RationalFn.zero()]
        )
        assert pert.degree == 2
        assert len(pert.poles) == 1
        zeta, kappa = pert.poles[0]
        assert kappa == 2 and abs(zeta - 5) < mpf(10) ** -20

    def test_shared_pole_across_components_rejected(self):
        with pytest.raises(ValueError):
            RationalPerturbation([RationalFn([1], [-5, 1]), RationalFn([2], [-5, 1])])

    def test_complex_coefficients_rejected(self):
        with pytest.raises(ValueError):
            RationalPerturbation([RationalFn([mpc(0, 1)], [-5, 1])])

    def test_t_is_product_of_denominators(self, pert_pm5):
        # (z-5)(z+5) = z^2 - 25
        assert pert_pm5.T.degree == 2
        assert abs(pert_pm5.T[0] + 25) < TIGHT
        assert abs(pert_pm5.T[1]) < TIGHT


class TestReduce:
    def test_zero_perturbation_identity(self, m2_16_system):
        pert = RationalPerturbation.zero(2)
        v = solve_type1(m2_16_system, MultiIndex((3, 3)))
        rep = perturbed_reduce(pert, v, m2_16_system)
        assert rep.p0 == v.a[0]
        assert rep.max_residual <= noise_floor(0.5) * max(rep.scale, mpf(1))

    def test_single_pole_polynomial_identity(self):
        sys = system_from_generators([unit_at(0, -1, 1)])
        pert = RationalPerturbation([RationalFn([1], [-3, 1])])
        v = solve_type1_perturbed(sys, pert, MultiIndex((2,)))
        rep = perturbed_reduce(pert, v, sys)
        expected = Polynomial([-3, 1]) * v.a[0] + v.a[1]
        for k in range(max(rep.p0.degree, expected.degree) + 1):
            assert abs(rep.p0[k] - expected[k]) < noise_floor(0.5)

    def test_fixture_residual_through_reduced_order(self, m2_16_system, pert_pm5):
        v = solve_type1_perturbed(m2_16_system, pert_pm5, MultiIndex((4, 4)))
        rep = perturbed_reduce(pert_pm5, v, m2_16_system)
        assert rep.order_checked == 8 - 2
        assert rep.max_residual <= noise_floor(0.5) * max(rep.scale, mpf(1))
        assert rep.reduced.residual_order >= rep.order_checked
        # the reduced remainder is T * A_1: its orthogonality runs to |n|-D-2
        orth = check_orthogonality(m2_16_system, rep.reduced)
        assert orth.conditions == 8 - 2 - 1
        assert orth.max_residual <= noise_floor(0.5) * max(orth.scale, mpf(1))


class TestTypeII:
    def test_f1_exact_recovery(self, f1_system):
        v = solve_type2(f1_system, MultiIndex((2,)))
        assert v.q.degree == 2
        assert abs(v.q[0] + 1) < TIGHT and abs(v.q[1]) < TIGHT and v.q[2] == 1
        assert v.p[0].degree == 1 and abs(v.p[0][1] - 1) < TIGHT
        tail = type2_residual_tail(f1_system, v, 1)
        assert max(abs(c) for c in tail) < mpf(10) ** -60

    def test_unit_mass_monomials(self):
        sys = system_from_generators([unit_at(0, -1, 1)])
        v = solve_type2(sys, MultiIndex((1,)))
        assert v.q.coeffs == (mpf(0), mpf(1))  # Q = z
        assert abs(v.p[0][0] - 1) < TIGHT  # P = 1

    def test_m2_orthogonal_to_constants(self, m2_16_system):
        v = solve_type2(m2_16_system, MultiIndex((1, 1)))
        assert v.q.degree == 2
        assert v.q[2] == 1  # monic
        for j in (1, 2):
            mu = m2_16_system.chain(1, j)
            s = mp.fsum(
                v.q(x) * w * mu.sign for x, w in zip(mu.nodes, mu.weights)
            )
            assert abs(s) <= noise_floor(0.5) * max(1, v.q.max_coeff())
        assert all(o >= k + 1 for o, k in zip(v.residual_orders, v.n))


class TestRemainder:
    def test_boundary_is_polynomial_value(self, m2_16_system):
        v = solve_type1(m2_16_system, MultiIndex((3, 3)))
        z = mpc(2, 1)
        assert remainder_eval(m2_16_system, None, v, 2, z) == v.a[2](z)

    def test_integral_representation_spot_check(self, m2_16_system):
        # A_0(z) = sum_i A_1(x_i) w_i sign / (z - x_i) over sigma_1's atoms
        v = solve_type1(m2_16_system, MultiIndex((3, 3)))
        sigma1 = m2_16_system.generators[0]
        for z in (mpc(4, 2), mpc(-2, 1)):
            lhs = remainder_eval(m2_16_system, None, v, 0, z)
            rhs = mp.fsum(
                remainder_eval(m2_16_system, None, v, 1, x) * w * sigma1.sign / (z - x)
                for x, w in zip(sigma1.nodes, sigma1.weights)
            )
            assert abs(lhs - rhs) <= noise_floor(0.5) * max(abs(lhs), abs(rhs), mpf(1))

    def test_out_of_range_level(self, m2_16_system):
        v = solve_type1(m2_16_system, MultiIndex((2, 2)))
        with pytest.raises(IndexError):
            remainder_eval(m2_16_system, None, v, 3, mpc(0, 1))


class TestOrthogonality:
    def test_f1_two_term_cancellation(self, f1_system):
        v = solve_type1(f1_system, MultiIndex((2,)))
        rep = check_orthogonality(f1_system, v)
        # A_1 = a_1 = z: sum = 0.5*(-1) + 0.5*(1) = 0
        assert rep.conditions == 1
        assert rep.max_residual < TIGHT

    def test_no_conditions_convention(self, f1_system):
        v = solve_type1(f1_system, MultiIndex((1,)))
        rep = check_orthogonality(f1_system, v)
        assert rep.conditions == 0 and rep.max_residual == 0

    def test_deficit_shrinks_condition_count(self, m2_16_system):
        v = solve_type1(m2_16_system, MultiIndex((3, 3)), M=2)
        rep = check_orthogonality(m2_16_system, v)
        assert rep.conditions == 6 - 2 - 1
        assert rep.max_residual <= noise_floor(0.5) * max(rep.scale, mpf(1))

    def test_deeper_levels_unsupported(self, m2_16_system):
        v = solve_type1(m2_16_system, MultiIndex((2, 2)))
        with pytest.raises(ValueError):
            check_orthogonality(m2_16_system, v, level=2)
