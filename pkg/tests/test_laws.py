import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bipotkit.convex import MaxAffine, Quadratic, graph_of, subdifferential_contains
from bipotkit.laws import (
    Ball,
    HalfLineRay,
    LawGraph,
    NotCyclicallyMonotoneError,
    Segment,
    Singleton,
    bb_check,
    cycle_sum,
    cyclic_monotonicity_check,
    rockafellar_reconstruct,
    weight_matrix,
)

from .oracles import exhaustive_cycle_check


def law_1d(pairs, **kw):
    return LawGraph([(np.array([x]), np.array([y])) for x, y in pairs], **kw)


# ---------------------------------------------------------------------------
# hint shapes


def test_singleton_contains():
    s = Singleton(np.array([1.0, 2.0]))
    assert s.contains(np.array([1.0, 2.0]), 1e-9)
    assert not s.contains(np.array([1.0, 2.1]), 1e-9)


def test_segment_contains_interior_and_rejects_offline():
    seg = Segment(np.array([-1.0]), np.array([1.0]))
    assert seg.contains(np.array([0.25]), 1e-9)
    assert not seg.contains(np.array([1.5]), 1e-9)
    seg2 = Segment(np.array([0.0, 0.0]), np.array([1.0, 1.0]))
    assert seg2.contains(np.array([0.5, 0.5]), 1e-9)
    assert not seg2.contains(np.array([0.5, 0.6]), 1e-9)


def test_ball_contains_and_whole_space():
    assert Ball(np.array([0.0, 0.0]), 1.0).contains(np.array([0.6, 0.8]), 1e-9)
    assert not Ball(np.array([0.0, 0.0]), 1.0).contains(np.array([0.8, 0.8]), 1e-9)
    assert Ball(np.array([0.0, 0.0]), np.inf).contains(np.array([9.0, 9.0]), 1e-9)


def test_ray_contains_forward_only():
    ray = HalfLineRay(np.array([1.0]), np.array([1.0]))
    assert ray.contains(np.array([3.0]), 1e-9)
    assert not ray.contains(np.array([0.5]), 1e-9)
    skew = HalfLineRay(np.array([0.0, 0.0]), np.array([1.0, 1.0]))
    assert skew.contains(np.array([2.0, 2.0]), 1e-9)
    assert not skew.contains(np.array([2.0, 1.0]), 1e-9)


def test_ray_rejects_zero_direction():
    with pytest.raises(ValueError):
        HalfLineRay(np.array([0.0]), np.array([0.0]))


# ---------------------------------------------------------------------------
# law graph container


def test_law_requires_pairs():
    with pytest.raises(ValueError):
        LawGraph([])


def test_domain_image_first_appearance_order():
    law = law_1d([(1, 5), (0, 5), (1, 6)])
    assert [v[0] for v in law.domain()] == [1.0, 0.0]
    assert [v[0] for v in law.image()] == [5.0, 6.0]


def test_slices():
    law = law_1d([(0, -1), (0, 1), (1, 1)])
    assert sorted(v[0] for v in law.slice([0.0])) == [-1.0, 1.0]
    assert sorted(v[0] for v in law.dual_slice([1.0])) == [0.0, 1.0]


def test_contains_stored_pairs_and_snap():
    law = law_1d([(0.5, 1.0)])
    assert law.contains([0.5], [1.0])
    assert not law.contains([0.5 + 1e-12], [1.0])
    assert law.contains([0.5 + 1e-12], [1.0], snap=2 ** -20)


def test_contains_through_hints():
    law = law_1d([(0, -1), (0, 1)],
                 primal_hints={(0.0,): Segment(np.array([-1.0]), np.array([1.0]))})
    assert law.contains([0.0], [0.25])
    assert not law.contains([0.0], [1.25])


def test_hint_anchor_must_be_in_domain():
    with pytest.raises(ValueError):
        law_1d([(0, 0)], primal_hints={(3.0,): Singleton(np.array([0.0]))})


def test_stored_pair_must_sit_inside_hint():
    with pytest.raises(ValueError):
        law_1d([(0, -1), (0, 1)],
               primal_hints={(0.0,): Singleton(np.array([-1.0]))})


# ---------------------------------------------------------------------------
# BB screen


def test_two_point_slice_without_hint_fails_at_midpoint():
    report = bb_check(law_1d([(0, -1), (0, 1)]))
    assert not report.is_bb_graph
    assert report.failing_slice.which == "primal"
    assert report.failing_slice.at.tolist() == [0.0]
    assert report.failing_slice.witness_midpoint.tolist() == [0.0]


def test_hinted_slice_passes():
    law = law_1d([(0, -1), (0, 1)],
                 primal_hints={(0.0,): Segment(np.array([-1.0]), np.array([1.0]))})
    assert bb_check(law).is_bb_graph


def test_dual_slice_failure_detected():
    report = bb_check(law_1d([(-1, 0), (1, 0)]))
    assert not report.is_bb_graph
    assert report.failing_slice.which == "dual"
    assert report.failing_slice.at.tolist() == [0.0]


def test_singleton_slices_always_pass():
    assert bb_check(law_1d([(0, 0), (1, 1), (2, 4)])).is_bb_graph


# ---------------------------------------------------------------------------
# cyclic monotonicity


def test_weight_matrix_formula():
    law = law_1d([(0, 1), (2, 3)])
    w = weight_matrix(law)
    assert w[0, 0] == 0.0 and w[1, 1] == 0.0
    assert w[0, 1] == (2.0 - 0.0) * 1.0
    assert w[1, 0] == (0.0 - 2.0) * 3.0


def test_antitone_pair_is_rejected_with_cycle():
    report = cyclic_monotonicity_check(law_1d([(0, 0), (1, -1)]))
    assert not report.cyclically_monotone
    assert report.witness_cycle == (0, 1)
    assert report.cycle_sum == 1.0


def test_monotone_chain_accepted():
    report = cyclic_monotonicity_check(law_1d([(0, 0), (1, 1), (2, 2)]))
    assert report.cyclically_monotone and report.witness_cycle is None


def test_borderline_cycle_counts_as_monotone():
    tol = 1e-9
    report = cyclic_monotonicity_check(law_1d([(0, 0), (1, -tol / 2)]), tol=tol)
    assert report.cyclically_monotone
    report = cyclic_monotonicity_check(law_1d([(0, 0), (1, -2 * tol)]), tol=tol)
    assert not report.cyclically_monotone


def test_detector_agrees_with_exhaustive_enumeration():
    rng = np.random.default_rng(2024)
    tol = 1e-9
    for _ in range(150):
        m = int(rng.integers(1, 7))
        n = int(rng.integers(1, 3))
        law = LawGraph([(rng.uniform(-1, 1, n), rng.uniform(-1, 1, n))
                        for _ in range(m)])
        report = cyclic_monotonicity_check(law, tol=tol)
        w = weight_matrix(law)
        ok, _, best = exhaustive_cycle_check(w, tol)
        assert report.cyclically_monotone == ok, (law.pairs, best)
        if not ok:
            assert cycle_sum(w, report.witness_cycle) > tol


@settings(max_examples=60)
@given(st.lists(st.tuples(st.floats(-1, 1), st.floats(-1, 1)),
                min_size=1, max_size=5))
def test_detector_agreement_property(pairs):
    law = law_1d(pairs)
    report = cyclic_monotonicity_check(law)
    ok, _, _ = exhaustive_cycle_check(weight_matrix(law), 1e-9)
    assert report.cyclically_monotone == ok


def test_gradient_samples_are_cyclically_monotone():
    # subgradient pairs of a convex function can never fail the screen
    g = np.linspace(-2, 2, 9)
    law = graph_of(Quadratic(1.0, 1), g, g)
    assert cyclic_monotonicity_check(law).cyclically_monotone


# ---------------------------------------------------------------------------
# reconstruction


def test_reconstruct_identity_samples():
    law = law_1d([(0, 0), (1, 1), (2, 2)])
    phi = rockafellar_reconstruct(law, base=0)
    assert isinstance(phi, MaxAffine)
    got = sorted((s[0], o) for s, o in phi.pieces)
    assert got == [(0.0, 0.0), (1.0, -1.0), (2.0, -3.0)]


def test_reconstruct_normalizes_base_to_zero():
    law = law_1d([(0, 0), (1, 1), (2, 2)])
    for base in range(3):
        phi = rockafellar_reconstruct(law, base=base)
        assert phi.value(law.xs[base]) == 0.0


def test_reconstruct_single_pair():
    phi = rockafellar_reconstruct(law_1d([(1.5, 2.0)]))
    assert [(tuple(s), o) for s, o in phi.pieces] == [((2.0,), 0.0 - 1.5 * 2.0)]


def test_reconstruct_rejects_antitone():
    with pytest.raises(NotCyclicallyMonotoneError) as exc:
        rockafellar_reconstruct(law_1d([(0, 0), (1, -1)]))
    assert exc.value.report.witness_cycle == (0, 1)


def test_reconstruct_interpolates_subgradients():
    # every sample must be a subgradient pair of the rebuilt function
    rng = np.random.default_rng(5)
    xs = np.sort(rng.uniform(-2, 2, 6))
    ys = np.sort(rng.uniform(-2, 2, 6))  # sorted pairs are monotone in 1-d
    law = LawGraph([(np.array([x]), np.array([y])) for x, y in zip(xs, ys)])
    phi = rockafellar_reconstruct(law)
    for x, y in law.pairs:
        assert subdifferential_contains(phi, x, y, tol=1e-9, primal_grid=law.xs)
