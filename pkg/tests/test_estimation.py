import math

import numpy as np
import pytest

from setmoduli import families as fam
from setmoduli.errors import PreconditionError
from setmoduli.estimation import (
    RadiusSchedule,
    classify_tail,
    default_nominal_probes,
    estimate_calmness,
    estimate_lipusc,
    sup_calmness_over_nominal,
    verify_equality,
)
from setmoduli.geometry import FinitePointSet, NormSpec

FAST = RadiusSchedule.geometric(levels=8, samples_per_radius=48, seed=3)


def identity_family():
    return fam.custom_family(
        lambda p: FinitePointSet([[float(p[0])]]), 1, 1,
        norms=NormSpec("chebyshev", "euclidean"),
        probe_directions=(np.array([1.0]), np.array([-1.0])),
        name="identity",
    )


def constant_family():
    return fam.custom_family(
        lambda p: FinitePointSet([[0.0]]), 1, 1,
        norms=NormSpec("chebyshev", "euclidean"),
        name="constant",
    )


class TestSchedule:
    def test_default_matches_documented_protocol(self):
        s = RadiusSchedule.default()
        assert len(s.radii) == 12
        assert s.radii[0] == pytest.approx(0.1)
        assert s.radii[1] / s.radii[0] == pytest.approx(0.5)
        assert s.samples_per_radius == 256
        assert s.localization_radius_factor == 10.0

    def test_rejects_nonmonotone_radii(self):
        with pytest.raises(PreconditionError):
            RadiusSchedule((0.1, 0.2))
        with pytest.raises(PreconditionError):
            RadiusSchedule((0.1, -0.05))


class TestClassifyTail:
    def test_stabilized_is_finite(self):
        assert classify_tail([5, 3, 2.01, 2.001, 2.0001, 2.00001]) == "finite"

    def test_all_zero_is_finite(self):
        assert classify_tail([17.0, 0.0, 0.0, 0.0]) == "finite"

    def test_sqrt_like_growth_is_infinite(self):
        radii = [0.1 * 0.5**k for k in range(12)]
        vals = [1.0 / math.sqrt(r) for r in radii]
        assert classify_tail(vals) == "infinite"

    def test_linear_and_quadratic_growth_are_infinite(self):
        radii = [0.1 * 0.5**k for k in range(12)]
        assert classify_tail([1.0 / r for r in radii]) == "infinite"
        assert classify_tail([1.0 / r**2 for r in radii]) == "infinite"

    def test_transient_then_flat_is_not_infinite(self):
        assert classify_tail([1.0, 2.04, 2.0, 2.02]) != "infinite"

    def test_unstable_tail_is_inconclusive(self):
        assert classify_tail([1.0, 9.8, 0.0, 0.0]) == "inconclusive"


class TestBasicEstimates:
    def test_identity_family_has_unit_modulus(self):
        est = estimate_lipusc(identity_family(), [0.0], FAST)
        assert est.classification == "finite"
        assert est.value == pytest.approx(1.0, rel=1e-9)

    def test_constant_family_has_zero_moduli(self):
        f = constant_family()
        est = estimate_lipusc(f, [0.0], FAST)
        assert est.value == 0.0
        clm = estimate_calmness(f, [0.0], [0.0], FAST)
        assert clm.value == 0.0

    def test_empty_nominal_raises(self):
        f = fam.lp_feasible_family([[1.0], [-1.0]], [-2.0, 1.0])
        with pytest.raises(PreconditionError):
            estimate_lipusc(f, fam.lp_pack(f, [[1.0], [-1.0]], [-2.0, 1.0]), FAST)

    def test_calmness_requires_membership(self):
        f = identity_family()
        with pytest.raises(PreconditionError):
            estimate_calmness(f, [0.0], [5.0], FAST)

    def test_lp_example_reaches_two(self):
        f = fam.example_lp_optimal()
        yb = fam.example_lp_nominal_parameter()
        est = estimate_lipusc(f, yb, RadiusSchedule.default())
        assert est.classification == "finite"
        assert est.value == pytest.approx(2.0, rel=0.03)

    def test_witness_realizes_final_worst_quotient(self):
        f = fam.example_lp_optimal()
        yb = fam.example_lp_nominal_parameter()
        est = estimate_lipusc(f, yb, FAST)
        p, x = est.attaining_witness
        num = abs(float(x[0]) - 1.0)
        den = f.parameter_distance(p, yb)
        assert num / den == pytest.approx(est.per_radius_worst[-1][1], rel=1e-9)

    def test_lipusc_counterexample_sqrt_infinite(self):
        f = fam.counterexample_family("counterexample_sqrt")
        est = estimate_lipusc(f, [0.0], RadiusSchedule.default())
        assert est.classification == "infinite"
        assert est.value == math.inf


class TestDeterminism:
    def test_identical_inputs_identical_outputs(self):
        f = fam.example_lcp()
        yb = fam.example_lcp_nominal_parameter()
        a = estimate_lipusc(f, yb, FAST)
        b = estimate_lipusc(f, yb, FAST)
        assert a.per_radius_worst == b.per_radius_worst
        assert a.value == b.value
        pa, xa = a.attaining_witness
        pb, xb = b.attaining_witness
        assert np.array_equal(pa, pb) and np.array_equal(xa, xb)

    def test_seed_changes_samples(self):
        f = fam.example_lcp()
        yb = fam.example_lcp_nominal_parameter()
        other = RadiusSchedule.geometric(levels=8, samples_per_radius=48, seed=4)
        a = estimate_lipusc(f, yb, FAST)
        b = estimate_lipusc(f, yb, other)
        # probes pin the worst quotients, so values agree even though the
        # random streams differ
        assert a.value == pytest.approx(b.value, rel=1e-6)


class TestMonotonicityProperties:
    def test_enlarging_localization_never_decreases_calmness(self):
        f = fam.example_lcp()
        yb = fam.example_lcp_nominal_parameter()
        values = []
        for loc in (1.0, 5.0, 10.0, 50.0):
            sched = RadiusSchedule.geometric(
                levels=8, samples_per_radius=48, seed=3,
                localization_radius_factor=loc,
            )
            values.append(estimate_calmness(f, yb, [1.0], sched).value)
        assert all(b >= a - 1e-12 for a, b in zip(values, values[1:]))

    def test_additional_probe_never_decreases_estimates(self):
        base = fam.example_lp_optimal()
        yb = fam.example_lp_nominal_parameter()
        more = base.with_probes([np.array([0.3, -0.8, 0.1])])
        for f_small, f_big in [(base, more)]:
            a = estimate_lipusc(f_small, yb, FAST)
            b = estimate_lipusc(f_big, yb, FAST)
            for (_, wa), (_, wb) in zip(a.per_radius_worst, b.per_radius_worst):
                assert wb >= wa - 1e-12

    def test_scale_equivariance_of_rhs_scaling(self):
        # doubling b and the image while doubling the radii leaves every
        # per-level worst quotient unchanged for feasible-set mappings
        A = np.array([[1.0], [-1.0], [1.0]])
        b = np.array([1.0, 1.0, 2.0])
        mask_A = np.zeros_like(A, dtype=bool)
        f1 = fam.lp_feasible_family(A, b, mask_A=mask_A)
        f2 = fam.lp_feasible_family(A, 2.0 * b, mask_A=mask_A)
        y1 = fam.lp_pack(f1, A, b)
        y2 = fam.lp_pack(f2, A, 2.0 * b)
        s1 = RadiusSchedule.geometric(r0=0.05, levels=8, samples_per_radius=32, seed=9)
        s2 = RadiusSchedule.geometric(r0=0.10, levels=8, samples_per_radius=32, seed=9)
        e1 = estimate_lipusc(f1, y1, s1)
        e2 = estimate_lipusc(f2, y2, s2)
        for (_, w1), (_, w2) in zip(e1.per_radius_worst, e2.per_radius_worst):
            assert w1 == pytest.approx(w2, rel=1e-9, abs=1e-12)


class TestSupCalmness:
    def test_paper_probe_set_for_lcp(self):
        f = fam.example_lcp()
        yb = fam.example_lcp_nominal_parameter()
        sup = sup_calmness_over_nominal(f, yb, schedule=RadiusSchedule.default())
        assert sup.value == pytest.approx(2.0, rel=0.03)
        probe_values = {round(float(p[0]), 6): e.value for p, e in sup.per_probe}
        assert probe_values[0.0] == pytest.approx(0.0, abs=1e-9)
        assert probe_values[1.0] == pytest.approx(2.0, rel=0.03)

    def test_inactive_perturbation_gives_zero(self):
        # the only perturbable row is strictly redundant near the nominal
        A = np.array([[1.0], [-1.0], [1.0]])
        b = np.array([1.0, 1.0, 2.0])
        mask_A = np.zeros_like(A, dtype=bool)
        mask_b = np.array([False, False, True])
        f = fam.lp_feasible_family(A, b, mask_A=mask_A, mask_b=mask_b)
        sup = sup_calmness_over_nominal(f, [2.0], schedule=FAST)
        assert sup.value == pytest.approx(0.0, abs=1e-12)

    def test_probe_membership_validated(self):
        f = fam.example_lcp()
        with pytest.raises(PreconditionError):
            sup_calmness_over_nominal(
                f, fam.example_lcp_nominal_parameter(),
                nominal_probe_points=[[0.5]], schedule=FAST,
            )

    def test_default_probes_include_endpoints(self):
        f = fam.example_sip()
        probes = default_nominal_probes(f, np.zeros(5), FAST)
        vals = sorted(float(p[0]) for p in probes)
        assert vals[0] == pytest.approx(-1.0)
        assert vals[-1] == pytest.approx(1.0)
        assert len(vals) >= 10


class TestKktFullPerturbations:
    """Modulus fixtures for the fully perturbed KKT mapping, checked
    against an independent corner-enumeration oracle of the quotients."""

    @staticmethod
    def _corner_oracle(family, center, eps):
        import itertools

        from setmoduli.geometry import distance_to_set

        nominal = fam.evaluate(family, center)
        worst = 0.0
        for signs in itertools.product((-1.0, 0.0, 1.0), repeat=4):
            if all(s == 0.0 for s in signs):
                continue
            p = center + eps * np.array(signs)
            dist = eps * max(abs(s) for s in signs)
            for z in fam.evaluate(family, p).points:
                worst = max(worst, distance_to_set(z, nominal) / dist)
        return worst

    def test_interior_solution_instance(self):
        probes = (np.array([0.0, -1.0, 0.0, 1.0]), np.array([0.0, 1.0, 0.0, -1.0]))
        f = fam.qp_kkt_family(1, 1, probe_directions=probes)
        center = fam.kkt_pack([[1.0]], [[2.0]], [10.0], [2.0])
        oracle = self._corner_oracle(f, center, 1e-6)
        est = estimate_lipusc(f, center, FAST)
        assert est.classification == "finite"
        assert est.value == pytest.approx(oracle, rel=0.02)
        assert est.value == pytest.approx(1.0, rel=0.02)

    def test_active_constraint_instance(self):
        probes = (np.array([1.0, -1.0, -1.0, -1.0]),
                  np.array([-1.0, 1.0, 1.0, 1.0]))
        f = fam.qp_kkt_family(1, 1, probe_directions=probes)
        center = fam.kkt_pack([[1.0]], [[2.0]], [1.0], [-4.0])
        oracle = self._corner_oracle(f, center, 1e-6)
        est = estimate_lipusc(f, center, FAST)
        assert est.value == pytest.approx(oracle, rel=0.02)
        assert est.value == pytest.approx(math.sqrt(20.0), rel=0.02)
        clm = estimate_calmness(f, center, [1.0, 2.0], FAST)
        assert clm.value == pytest.approx(est.value, rel=1e-9)


class TestVerifyEquality:
    def test_lp_example_equal(self):
        rep = verify_equality(
            fam.example_lp_optimal(), fam.example_lp_nominal_parameter(),
            RadiusSchedule.default(),
        )
        assert rep.verdict == "equal"
        assert rep.inequality_satisfied
        assert rep.lipusc.value == pytest.approx(2.0, rel=0.03)
        assert rep.sup_calmness.value == pytest.approx(2.0, rel=0.03)

    def test_jump_counterexample_reported_consistently(self):
        rep = verify_equality(
            fam.counterexample_family("counterexample_jump"), [0.0],
            RadiusSchedule.default(),
        )
        assert rep.lipusc.classification == "infinite"
        assert rep.sup_calmness.value == pytest.approx(0.0, abs=1e-9)
        assert rep.verdict == "consistent_with_counterexample"
        assert rep.inequality_satisfied

    def test_fundamental_inequality_on_fixture_suite(self):
        cases = [
            (fam.example_lp_optimal(), fam.example_lp_nominal_parameter()),
            (fam.example_lcp(), fam.example_lcp_nominal_parameter()),
            (fam.example_sip(), np.zeros(5)),
            (fam.counterexample_family("counterexample_jump"), [0.0]),
            (fam.counterexample_family("counterexample_escape"), [0.0]),
        ]
        for f, yb in cases:
            lip = estimate_lipusc(f, yb, FAST)
            sup = sup_calmness_over_nominal(f, yb, schedule=FAST)
            if math.isinf(sup.value):
                assert math.isinf(lip.value)
            else:
                assert lip.value >= sup.value - 1e-6
