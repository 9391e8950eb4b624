import math

import numpy as np
import pytest

from setmoduli import families as fam
from setmoduli import geometry as geo
from setmoduli.errors import (
    DegenerateLevelSetError,
    PreconditionError,
    UnsupportedSizeError,
)
from setmoduli.geometry import FinitePointSet, IntervalUnion, Polyhedron


def as_interval(s):
    if isinstance(s, Polyhedron) and s.ambient_dim == 1:
        return s.to_interval_union()
    return s


class TestLpFamilies:
    def test_example_nominal_is_singleton_one(self):
        f = fam.example_lp_optimal()
        S = as_interval(fam.evaluate(f, [1.0, 1.0, -1.0]))
        assert len(S.intervals) == 1
        assert S.intervals[0].lo == S.intervals[0].hi == pytest.approx(1.0)

    def test_perturbed_optimal_point_is_b_over_a(self, rng):
        f = fam.example_lp_optimal()
        for _ in range(25):
            a = 1.0 + rng.uniform(-0.2, 0.2)
            b = 1.0 + rng.uniform(-0.2, 0.2)
            c = -1.0 + rng.uniform(-0.2, 0.2)
            S = as_interval(fam.evaluate(f, [a, b, c]))
            assert S.intervals[0].lo == pytest.approx(b / a)

    def test_optimal_face_subset_of_feasible(self, rng):
        for _ in range(20):
            m, n = int(rng.integers(2, 5)), 2
            A = rng.standard_normal((m, n))
            x0 = rng.uniform(-1, 1, n)
            b = A @ x0 + rng.uniform(0.1, 1.0, m)
            c = rng.standard_normal(n)
            feas_fam = fam.lp_feasible_family(A, b)
            opt_fam = fam.lp_optimal_family(A, b, c)
            feas = fam.evaluate(feas_fam, fam.lp_pack(feas_fam, A, b))
            opt = fam.evaluate(opt_fam, fam.lp_pack(opt_fam, A, b, c))
            if opt.is_empty:
                continue
            for p in geo.extreme_points(opt, 0.0):
                assert feas.contains(p, 1e-6)

    def test_unbounded_objective_gives_empty_face(self):
        f = fam.lp_optimal_family([[1.0]], [1.0], [1.0])  # min x s.t. x <= 1
        S = fam.evaluate(f, fam.lp_pack(f, [[1.0]], [1.0], [1.0]))
        assert S.is_empty

    def test_zero_cost_returns_whole_feasible_set(self):
        f = fam.lp_optimal_family([[1.0], [-1.0]], [1.0, 1.0], [0.0])
        S = as_interval(fam.evaluate(f, fam.lp_pack(f, [[1.0], [-1.0]], [1.0, 1.0], [0.0])))
        assert (S.intervals[0].lo, S.intervals[0].hi) == (-1.0, 1.0)

    def test_face_in_2d_is_polyhedron(self):
        A = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])
        b = np.ones(4)
        c = np.array([1.0, 0.0])  # min x1 over the box: face is {-1} x [-1,1]
        f = fam.lp_optimal_family(A, b, c)
        S = fam.evaluate(f, fam.lp_pack(f, A, b, c))
        assert isinstance(S, Polyhedron)
        verts = geo.enumerate_vertices(S).points
        assert np.allclose(np.sort(verts[:, 1]), [-1.0, 1.0], atol=1e-6)
        assert np.allclose(verts[:, 0], -1.0, atol=1e-6)


class TestLcp:
    def test_paper_instance(self):
        S = fam.solve_lcp_enumerate([[-1.0]], [1.0])
        assert sorted(float(p[0]) for p in S.points) == pytest.approx([0.0, 1.0])

    def test_trivial_instances(self):
        S = fam.solve_lcp_enumerate([[1.0]], [1.0])
        assert [float(p[0]) for p in S.points] == [0.0]
        # brute force over both complementary sets: x = 0 violates Mx+q >= 0
        S = fam.solve_lcp_enumerate([[1.0]], [-1.0])
        assert [float(p[0]) for p in S.points] == [1.0]

    def test_size_limit(self):
        n = 13
        with pytest.raises(UnsupportedSizeError):
            fam.solve_lcp_enumerate(np.eye(n), np.ones(n))

    def test_degenerate_segment_in_1d(self):
        S = fam.solve_lcp_enumerate([[0.0]], [0.0])
        assert isinstance(S, IntervalUnion)
        assert S.intervals[0].lo == 0.0 and S.intervals[0].hi == math.inf

    def test_matches_grid_filter_on_random_small_instances(self, rng):
        for _ in range(40):
            n = int(rng.integers(1, 3))
            M = rng.standard_normal((n, n))
            q = rng.uniform(-1, 1, n)
            S = fam.solve_lcp_enumerate(M, q)
            # independent oracle: dense grid filter of the conditions
            g = np.linspace(0.0, 4.0, 401)
            if n == 1:
                pts = g.reshape(-1, 1)
            else:
                gx, gy = np.meshgrid(g, g)
                pts = np.column_stack([gx.ravel(), gy.ravel()])
            w = pts @ M.T + q
            mask = (
                np.all(w >= -1e-6, axis=1)
                & (np.abs(np.sum(pts * w, axis=1)) <= 1e-3)
            )
            grid_sols = pts[mask]
            # every grid-accepted point is near an enumerated solution
            if not S.is_empty and len(grid_sols):
                pts_enum = (
                    S.points
                    if hasattr(S, "points")
                    else np.array([[iv.lo] for iv in S.intervals])
                )
                for p in grid_sols:
                    d = np.min(np.max(np.abs(pts_enum - p), axis=1))
                    assert d <= 2e-2
            # every enumerated point satisfies the conditions
            if hasattr(S, "points"):
                for p in S.points:
                    wp = M @ p + q
                    assert np.all(p >= -1e-7) and np.all(wp >= -1e-7)
                    assert abs(p @ wp) <= 1e-7


class TestSip:
    def test_nominal_feasible_interval(self):
        f = fam.example_sip()
        S = as_interval(fam.evaluate(f, np.zeros(5)))
        iv = S.intervals[0]
        assert (iv.lo, iv.hi) == pytest.approx((-1.0, 1.0))

    def test_probe_perturbation_shrinks_upper_bound(self):
        f = fam.example_sip()
        eps = 1e-2
        S = as_interval(fam.evaluate(f, np.array([0.0, 0.0, eps, -eps, 0.0])))
        iv = S.intervals[0]
        assert iv.hi == pytest.approx((1 - eps) / (1 + eps))
        assert iv.lo == pytest.approx(-1.0)

    def test_uniform_norm_of_parameters(self):
        f = fam.example_sip()
        # delta_a = eps * |t| has uniform norm eps; delta_b = -eps likewise
        d = f.parameter_distance(np.array([0, 0, 1e-3, -1e-3, 0.0]), np.zeros(5))
        assert d == pytest.approx(1e-3)

    def test_probe_direction_included_in_samples(self):
        f = fam.example_sip()
        eps = 1e-3
        params = fam.sample_parameters(f, np.zeros(5), eps, 64, 7)
        assert any(np.allclose(p, [0, 0, eps, -eps, 0]) for p in params)


class TestSublevel:
    def test_sin_at_zero_matches_fracture_pattern(self):
        f = fam.example_sublevel()
        S = fam.evaluate(f, [0.0])
        pieces = [(iv.lo, iv.hi) for iv in S.intervals]
        expect = [
            (-2 * math.pi, -2 * math.pi),
            (-math.pi, 0.0),
            (math.pi, 2 * math.pi),
        ]
        assert len(pieces) == 3
        for got, exp in zip(pieces, expect):
            assert got[0] == pytest.approx(exp[0], abs=1e-9)
            assert got[1] == pytest.approx(exp[1], abs=1e-9)

    def test_monotone_in_level(self, rng):
        f = fam.example_sublevel()
        for _ in range(10):
            a1, a2 = sorted(rng.uniform(-0.5, 0.5, 2))
            S1 = fam.evaluate(f, [a1])
            S2 = fam.evaluate(f, [a2])
            for iv in S1.intervals:
                for x in (iv.lo, iv.hi, 0.5 * (iv.lo + iv.hi)):
                    assert S2.contains(x, 1e-9)

    def test_tangency_detected(self):
        f = fam.sublevel_family(np.sin, np.cos, (-2 * math.pi, 2 * math.pi), 2001)
        with pytest.raises(DegenerateLevelSetError):
            fam.evaluate(f, [1.0])  # tangent to the maxima of sin

    def test_polynomial_token(self):
        f = fam.sublevel_family(f_token={"poly": [0.0, 0.0, 1.0]}, domain=(-2, 2))
        S = fam.evaluate(f, [1.0])
        iv = S.intervals[0]
        assert (iv.lo, iv.hi) == pytest.approx((-1.0, 1.0), abs=1e-10)


class TestCounterexamples:
    def test_case_formulas_pointwise(self, rng):
        sqrt_f = fam.counterexample_family("counterexample_sqrt")
        jump_f = fam.counterexample_family("counterexample_jump")
        esc_f = fam.counterexample_family("counterexample_escape")
        for _ in range(20):
            y = float(rng.uniform(-0.5, 0.5))
            S = fam.evaluate(sqrt_f, [y])
            if y <= 0:
                assert [(iv.lo, iv.hi) for iv in S.intervals] == [(-1.0, 0.0)]
            else:
                assert [(iv.lo, iv.hi) for iv in S.intervals] == [
                    (-1.0, 0.0),
                    (0.0, math.sqrt(y)),
                ]
            J = fam.evaluate(jump_f, [y])
            expect = {0.0} if y == 0.0 else {0.0, 1.0}
            assert set(map(float, J.points[:, 0])) == expect
            E = fam.evaluate(esc_f, [y])
            if y == 0.0:
                assert set(map(float, E.points[:, 0])) == {0.0}
            else:
                got = sorted(map(float, E.points[:, 0]))
                assert got == sorted([0.0, 1.0 / y])

    def test_nominal_sets(self):
        assert fam.evaluate(fam.counterexample_family("counterexample_jump"), [0.0]).points.tolist() == [[0.0]]
        S = fam.evaluate(fam.counterexample_family("counterexample_sqrt"), [0.0])
        assert S.is_closed is False


class TestSampling:
    def test_contract_count_and_annulus(self):
        f = fam.example_lp_optimal()
        params = fam.sample_parameters(f, [1, 1, -1], 1e-3, 64, 7)
        assert len(params) == 64
        for p in params:
            d = f.parameter_distance(p, [1, 1, -1])
            assert 5e-4 < d <= 1e-3 + 1e-15

    def test_deterministic_in_seed(self):
        f = fam.example_lcp()
        a = fam.sample_parameters(f, [-1, 1], 1e-2, 32, 5)
        b = fam.sample_parameters(f, [-1, 1], 1e-2, 32, 5)
        c = fam.sample_parameters(f, [-1, 1], 1e-2, 32, 6)
        assert all(np.array_equal(x, y) for x, y in zip(a, b))
        assert any(not np.array_equal(x, y) for x, y in zip(a, c))

    def test_invalid_arguments(self):
        f = fam.example_lcp()
        with pytest.raises(PreconditionError):
            fam.sample_parameters(f, [-1, 1], 0.0, 4, 0)
        with pytest.raises(PreconditionError):
            fam.sample_parameters(f, [-1, 1], 1e-2, 0, 0)


class TestGraphMembership:
    """Sampled (parameter, image point) pairs satisfy the defining
    constraints of their kind."""

    def test_lp_feasible(self, rng):
        for _ in range(10):
            A = rng.standard_normal((3, 2))
            b = A @ rng.uniform(-1, 1, 2) + rng.uniform(0.1, 1.0, 3)
            f = fam.lp_feasible_family(A, b)
            center = fam.lp_pack(f, A, b)
            for p in fam.sample_parameters(f, center, 1e-2, 8, 1):
                S = fam.evaluate(f, p)
                A2 = np.array(p[:6]).reshape(3, 2)
                b2 = np.array(p[6:])
                if S.is_empty or not geo.polyhedron_is_bounded(S):
                    continue
                for x in geo.extreme_points(S, 0.0):
                    assert np.all(A2 @ x <= b2 + 1e-7)

    def test_qp_kkt_residuals(self, rng):
        n, m = 1, 2
        f = fam.qp_kkt_family(n, m)
        Q = np.array([[2.0]])
        A = np.array([[1.0], [-1.0]])
        b = np.array([1.0, 1.0])
        c = np.array([-4.0])
        center = fam.kkt_pack(A, Q, b, c)
        for p in fam.sample_parameters(f, center, 1e-2, 8, 3):
            S = fam.evaluate(f, p)
            A2, Q2, b2, c2 = fam._kkt_unpack(f.structure, p)
            for z in S.points:
                x, y = z[:n], z[n:]
                assert np.linalg.norm(Q2 @ x + c2 + A2.T @ y) <= 1e-7
                assert np.all(A2 @ x <= b2 + 1e-7)
                assert np.all(y >= -1e-9)
                assert abs(y @ (A2 @ x - b2)) <= 1e-7

    def test_qp_kkt_active_branch_pair(self):
        # min x^2 - 4x s.t. x <= 1: KKT pair (1, 2) and no other
        f = fam.qp_kkt_family(1, 1)
        p = fam.kkt_pack([[1.0]], [[2.0]], [1.0], [-4.0])
        S = fam.evaluate(f, p)
        assert S.points.shape == (1, 2)
        assert S.points[0] == pytest.approx([1.0, 2.0])


class TestQpCanonicalFamily:
    def test_interior_solution_tracks_unconstrained_minimizer(self, rng):
        Q = np.array([[2.0, 0.0], [0.0, 4.0]])
        A = np.array([[1.0, 0.0]])
        f = fam.qp_canonical_family(Q, A)
        for _ in range(10):
            c = rng.uniform(-1, 1, 2)
            b = np.array([10.0])
            S = fam.evaluate(f, np.concatenate([c, b]))
            x = S.points[0]
            assert np.allclose(x, -np.linalg.solve(Q, c), atol=1e-9)

    def test_infeasible_returns_empty(self):
        Q = np.eye(1)
        A = np.array([[1.0], [-1.0]])
        f = fam.qp_canonical_family(Q, A)
        S = fam.evaluate(f, np.array([0.0, -2.0, 1.0]))  # x <= -2, x >= -1
        assert S.is_empty
