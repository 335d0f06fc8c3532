import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bpec.scheduler import (
    Action,
    FlowOutcome,
    PolicyKind,
    PolicySpec,
    QueueState,
    apply_action,
    max_weight_decide,
    max_weight_weights,
    probabilistic_from_region_point,
)

queues = st.tuples(*[st.integers(0, 50)] * 4).map(lambda t: QueueState(*t))


@st.composite
def joint_pmf(draw):
    w = np.array([draw(st.floats(0.01, 1.0)) for _ in range(4)])
    e00, e01, e10, e11 = w / w.sum()
    return e10 + e11, e01 + e11, e10, e01


def test_direct1_when_only_q1_u1():
    assert max_weight_decide(QueueState(5, 0, 0, 0), 0.3, 0.4, 0.1, 0.2) is Action.DIRECT1


def test_coded_when_only_q2():
    for e in [(0.2, 0.4, 0.1, 0.3), (1.0, 0.4, 0.6, 0.0), (0.3, 1.0, 0.0, 0.7)]:
        assert max_weight_decide(QueueState(0, 10, 0, 10), *e) is Action.CODED


def test_hand_evaluated_weights():
    q = QueueState(3, 1, 2, 2)
    w = max_weight_weights(q, 0.2, 0.4, 0.1, 0.3)
    assert w == pytest.approx((2.6, 1.2, 2.0), abs=1e-12)
    assert max_weight_decide(q, 0.2, 0.4, 0.1, 0.3) is Action.DIRECT1


def test_ties_go_to_lowest_index():
    assert max_weight_decide(QueueState(0, 0, 0, 0), 0.2, 0.2, 0.1, 0.1) is Action.DIRECT1
    # symmetric queues and channel: w1 == w2
    assert max_weight_decide(QueueState(4, 0, 4, 0), 0.2, 0.2, 0.1, 0.1) is Action.DIRECT1


@given(queues, joint_pmf(), st.integers(1, 20))
@settings(max_examples=200, deadline=None)
def test_scale_invariance(q, e, k):
    scaled = QueueState(*(k * v for v in q))
    assert max_weight_decide(scaled, *e) is max_weight_decide(q, *e)


@given(queues, joint_pmf())
@settings(max_examples=300, deadline=None)
def test_never_serves_empty_source(q, e):
    a = max_weight_decide(q, *e)
    if q.total == 0:
        return
    if a is Action.DIRECT1:
        assert q.q1_u1 > 0
    elif a is Action.DIRECT2:
        assert q.q1_u2 > 0
    else:
        assert q.q2_u1 + q.q2_u2 > 0


def test_probabilistic_substitution():
    spec = probabilistic_from_region_point([0.7], [0.6])
    assert spec.kind is PolicyKind.PROBABILISTIC
    np.testing.assert_allclose(spec.table, [[0.4, 0.3, 0.3]], atol=1e-15)
    np.testing.assert_allclose(probabilistic_from_region_point([1.0], [1.0]).table, [[0, 0, 1]])
    np.testing.assert_allclose(probabilistic_from_region_point([1.0], [0.0]).table, [[1, 0, 0]])


def test_probabilistic_per_state_rows():
    spec = probabilistic_from_region_point([0.7, 1.0], [0.6, 0.5])
    assert spec.table.shape == (2, 3)
    np.testing.assert_allclose(spec.table.sum(axis=1), 1.0)


def test_probabilistic_rejects_unrealisable():
    with pytest.raises(ValueError, match="< 1"):
        probabilistic_from_region_point([0.3], [0.4])
    with pytest.raises(ValueError):
        probabilistic_from_region_point([1.2], [0.4])
    with pytest.raises(ValueError):
        probabilistic_from_region_point([0.5, 0.5], [0.6])


def test_policy_spec_validation():
    with pytest.raises(ValueError):
        PolicySpec("probabilistic", [[0.5, 0.6, 0.1]])
    with pytest.raises(ValueError):
        PolicySpec("maxweight", [[1, 0, 0]])
    assert PolicySpec.max_weight().to_dict() == {"kind": "maxweight"}


def test_apply_direct1_delivered():
    q, f, d1, d2 = apply_action(QueueState(1, 0, 0, 0), Action.DIRECT1, 0, 1)
    assert q == QueueState(0, 0, 0, 0)
    assert (d1, d2) == (1, 0)
    assert f.f13_u1 == 1


def test_apply_direct1_overheard():
    q, f, d1, d2 = apply_action(QueueState(1, 0, 0, 0), Action.DIRECT1, 1, 0)
    assert q == QueueState(0, 1, 0, 0)
    assert f == FlowOutcome(f12_u1=1)
    assert (d1, d2) == (0, 0)


def test_apply_direct1_both_erased():
    q, f, d1, d2 = apply_action(QueueState(1, 0, 0, 0), Action.DIRECT1, 1, 1)
    assert q == QueueState(1, 0, 0, 0) and f == FlowOutcome()


def test_apply_coded_split():
    q, f, d1, d2 = apply_action(QueueState(0, 1, 0, 1), Action.CODED, 0, 1)
    assert q == QueueState(0, 0, 0, 1)
    assert (d1, d2) == (1, 0)


def test_apply_coded_one_side_only():
    q, f, d1, d2 = apply_action(QueueState(0, 0, 0, 2), Action.CODED, 0, 0)
    assert q == QueueState(0, 0, 0, 1)
    assert f == FlowOutcome(f23_u2=1)
    assert (d1, d2) == (0, 1)


def test_apply_empty_is_noop():
    for a in Action:
        q, f, d1, d2 = apply_action(QueueState(), a, 0, 0)
        assert q == QueueState() and f == FlowOutcome() and d1 == d2 == 0


@given(queues, st.sampled_from(list(Action)), st.integers(0, 1), st.integers(0, 1))
@settings(max_examples=300, deadline=None)
def test_flow_algebra_and_conservation(q, a, z1, z2):
    nq, f, d1, d2 = apply_action(q, a, z1, z2)
    assert f.f12_u1 + f.f13_u1 <= 1 and f.f23_u1 <= 1
    assert f.f12_u2 + f.f13_u2 <= 1 and f.f23_u2 <= 1
    assert min(nq) >= 0
    assert q.q1_u1 + q.q2_u1 == nq.q1_u1 + nq.q2_u1 + d1
    assert q.q1_u2 + q.q2_u2 == nq.q1_u2 + nq.q2_u2 + d2
    assert d1 == f.f13_u1 + f.f23_u1
    assert d2 == f.f13_u2 + f.f23_u2
    # an erased receiver never gets anything
    if z1:
        assert d1 == 0
    if z2:
        assert d2 == 0
