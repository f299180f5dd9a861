import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import dist_and_partition
from oracles import expected_eliminated, vote_entropy
from qsmkit.core import Distribution, Partition, ValidationError
from qsmkit.enumeration import EnumOptions, all_dps
from qsmkit.qsm import (
    Direction,
    Kind,
    MeasureSpec,
    direction,
    ent_z_threshold,
    ent_z_threshold_inverse,
    evaluate,
    parse_measure,
    prefers,
    select_best,
)
from qsmkit.relations import check_strict_order

M = MeasureSpec
FOUR_BOXES = Distribution.from_list([0.41, 0.15, 0.07, 0.37])


@pytest.mark.parametrize("kind,want", [(Kind.ENT, Direction.MINIMIZE), (Kind.GI, Direction.MAXIMIZE),
                                       (Kind.BAL, Direction.MINIMIZE), (Kind.KL, Direction.MAXIMIZE),
                                       (Kind.LC, Direction.MINIMIZE), (Kind.BME, Direction.MAXIMIZE)])
def test_direction(kind, want):
    assert direction(M(kind)) is want


def test_bal_running_example(t1):
    vals = [evaluate(M(Kind.BAL), q, t1.dist) for q in t1.pool]
    assert vals == pytest.approx([0.2, 0.2, 0.5, 0.5], abs=1e-9)


def test_small_values_running_example(t1):
    q1, q2, q3, _ = t1.pool
    assert evaluate(M(Kind.LC), q2, t1.dist) == pytest.approx(0.5)
    assert evaluate(M(Kind.LC), q1, t1.dist) == pytest.approx(0.6)
    assert evaluate(M(Kind.VE), q2, t1.dist) == pytest.approx(vote_entropy(2, 2)) == pytest.approx(1.0)
    assert [evaluate(M(Kind.SPL), q, t1.dist) for q in (q1, q2, q3)] == [1, 1, 3]
    assert evaluate(M(Kind.MPS), q3, t1.dist) == pytest.approx(0.25)
    assert evaluate(M(Kind.MPS, literal=True), q3, t1.dist) == 0.0


def test_proof_sketch_numbers(t1_p2, t1_p3):
    q3, q4 = t1_p3.partition("Q3"), t1_p3.partition("Q4")
    assert evaluate(M(Kind.ENT), q3, t1_p3.dist) == pytest.approx(-0.469, abs=5e-4)
    assert evaluate(M(Kind.ENT), q4, t1_p3.dist) == pytest.approx(-0.4936, abs=5e-5)
    assert evaluate(M(Kind.EMCb), q3, t1_p2.dist) == pytest.approx(1.45)
    assert evaluate(M(Kind.EMCb), q4, t1_p2.dist) == pytest.approx(2.1)


def test_prefers_examples(t1, t1_p3):
    assert prefers(M(Kind.LC), t1.partition("Q2"), t1.partition("Q1"), t1.dist)
    assert prefers(M(Kind.ENT), t1_p3.partition("Q4"), t1_p3.partition("Q3"), t1_p3.dist)
    for kind in (Kind.LC, Kind.ENT, Kind.KL):
        for q in t1.pool:
            assert not prefers(M(kind), q, q, t1.dist)


def test_select_best(t1):
    assert select_best(M(Kind.BAL), t1.pool, t1.dist) == (0, pytest.approx(0.2))
    assert select_best(M(Kind.ENT), t1.pool[2:3], t1.dist)[0] == 0
    strong = list(all_dps(range(4), EnumOptions(strong_only=True)))
    i, v = select_best(M(Kind.SPL), strong, FOUR_BOXES)
    assert v == 0 and len(strong[i].plus) == len(strong[i].minus) == 2
    with pytest.raises(ValidationError):
        select_best(M(Kind.ENT), [], t1.dist)
    with pytest.raises(ValidationError):
        select_best(M(Kind.ENT), [Partition.of([0, 1, 2, 3, 4], [])], t1.dist)


def test_evaluate_rejects_non_dq(t1):
    with pytest.raises(ValidationError, match="not discriminating"):
        evaluate(M(Kind.ENT), Partition.of([], range(5)), t1.dist)


def test_ent_z_threshold():
    assert ent_z_threshold(0.5 - 1e-12) == pytest.approx(1.0)
    assert ent_z_threshold(0.1) == pytest.approx(0.5 * math.log2(9))
    assert ent_z_threshold(0.25) == 1.0
    for z in (1.0, 1.5, 3.0):
        t = ent_z_threshold_inverse(z)
        assert ent_z_threshold(t) == pytest.approx(max(z, 1.0))
    with pytest.raises(ValidationError):
        ent_z_threshold(0.5)


@pytest.mark.parametrize("text,want", [
    ("ENT", M(Kind.ENT)),
    ("ENT_z=1.5", M(Kind.ENT_z, z=1.5)),
    ("RIO_n=2", M(Kind.RIOp, n=2)),
    ("RIO_z=1.5_n=2", M(Kind.RIOp_z, z=1.5, n=2)),
    ("SPL_z=1.1", M(Kind.SPL_z, z=1.1)),
    ("MPS'", M(Kind.MPSp)),
])
def test_parse_measure(text, want):
    assert parse_measure(text) == want


@pytest.mark.parametrize("text,token", [("ENT_q=1", "q=1"), ("FOO", "FOO"), ("SPL_z=abc", "z=abc")])
def test_parse_errors_name_token(text, token):
    with pytest.raises(ValidationError, match=token):
        parse_measure(text)


def test_parameter_validation():
    with pytest.raises(ValidationError):
        M(Kind.ENT, z=1.0)
    with pytest.raises(ValidationError):
        M(Kind.RIOp)
    with pytest.raises(ValidationError):
        M(Kind.ENT, literal=True)


def test_labels_name_mps_variant():
    assert str(M(Kind.MPS)) == "MPS[singleton]"
    assert str(parse_measure("MPS", mps_literal=True)) == "MPS[literal]"
    assert str(M(Kind.RIOp_z, z=1.5, n=2)) == "RIO'_z=1.5_n=2"


@given(dist_and_partition(dq=True))
def test_bounds_h_gi(dp):
    d, part = dp
    h = evaluate(M(Kind.H), part, d)
    gi = evaluate(M(Kind.GI), part, d)
    assert 0.0 < h <= 1.0 + 1e-12
    assert 0.0 < gi <= 0.5 + 1e-12


@given(dist_and_partition(dq=True))
def test_unit_parameter_identities(dp):
    d, part = dp
    for plain, param in ((M(Kind.ENT), M(Kind.ENT_z, z=1)), (M(Kind.SPL), M(Kind.SPL_z, z=1)),
                         (M(Kind.EMCa), M(Kind.EMCa_z, z=1)),
                         (M(Kind.RIOp, n=2), M(Kind.RIOp_z, z=1, n=2))):
        assert evaluate(plain, part, d) == evaluate(param, part, d)


@given(dist_and_partition(dq=True, strong=True))
def test_strong_identities(dp):
    d, part = dp
    assert math.isclose(evaluate(M(Kind.ENT), part, d), -evaluate(M(Kind.H), part, d), abs_tol=1e-12)
    assert math.isclose(evaluate(M(Kind.GI), part, d), evaluate(M(Kind.EMCa_z, z=0), part, d),
                        abs_tol=1e-12)


@given(dist_and_partition(dq=True))
def test_emcb_is_expected_elimination(dp):
    d, part = dp
    want = expected_eliminated(dict(d.weights), part.plus, part.minus, part.zero)
    assert math.isclose(evaluate(M(Kind.EMCb), part, d), want, rel_tol=1e-12, abs_tol=1e-12)


@given(dist_and_partition(dq=True))
def test_ve_oracle(dp):
    d, part = dp
    assert math.isclose(evaluate(M(Kind.VE), part, d), vote_entropy(len(part.plus), len(part.minus)))


@given(dist_and_partition(n_max=5, dq=True, strong=True))
def test_rio_goal_value_is_half_ent(dp):
    d, part = dp
    n = min(len(part.plus), len(part.minus))
    rio = evaluate(M(Kind.RIOp, n=n), part, d)
    assert rio == evaluate(M(Kind.ENT), part, d) / 2
    assert rio < 1


@pytest.mark.parametrize("kind", [Kind.LC, Kind.ENT, Kind.SPL, Kind.KL, Kind.EMCb, Kind.BME, Kind.MPSp])
def test_preference_is_strict_order(kind):
    parts = list(all_dps(range(4)))
    m = M(kind)
    rep = check_strict_order(lambda a, b: prefers(m, a, b, FOUR_BOXES), parts)
    assert rep.ok, rep


@given(st.sampled_from(list(Kind)), dist_and_partition(dq=True))
def test_every_kind_evaluates_finite(kind, dp):
    d, part = dp
    z = 1.5 if kind.value.endswith("_z") else None
    n = 1 if kind in (Kind.RIOp, Kind.RIOp_z) else None
    assert math.isfinite(evaluate(M(kind, z=z, n=n), part, d))
