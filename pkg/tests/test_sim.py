import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import dists
from qsmkit.boxes import four_boxes_scenario
from qsmkit.core import Answer, Distribution, Partition, ValidationError
from qsmkit.enumeration import EnumOptions, all_dps
from qsmkit.qsm import Kind, MeasureSpec
from qsmkit.sim import (
    MassThreshold,
    OracleSpec,
    PoolMode,
    SingletonSupport,
    SynthesisMode,
    benchmark,
    rows_to_csv,
    run_session,
)

M = MeasureSpec


def test_running_example_bal_session(t1):
    h4 = 3
    r = run_session(t1.dist, M(Kind.BAL), PoolMode(tuple(t1.pool)), OracleSpec(h4))
    q, a = r.history[0]
    assert q == t1.partition("Q1") and a is Answer.NO
    assert r.identified and r.final_dist.support == {h4}
    assert r.queries_asked == len(r.history) == 2


def test_threshold_already_met():
    d = Distribution.from_list([0.97, 0.03])
    r = run_session(d, M(Kind.ENT), PoolMode((Partition.of([0], [1]),)), OracleSpec(0),
                    MassThreshold(0.95))
    assert r.queries_asked == 0 and r.identified


def test_four_boxes_synthesis_session():
    scen = four_boxes_scenario()
    r = run_session(scen.dist, M(Kind.RIOp, n=2), SynthesisMode(scen), OracleSpec(3))
    q, a = r.history[0]
    assert q == Partition.of([1, 3], [0, 2]) and a is Answer.YES
    assert r.identified and r.final_dist.support == {3}
    assert r.queries_asked == 2


def test_empty_pool_stops_unidentified(t1):
    r = run_session(t1.dist, M(Kind.ENT), PoolMode(()), OracleSpec(0))
    assert r.queries_asked == 0 and not r.identified


def test_bad_target(t1):
    with pytest.raises(ValidationError):
        run_session(t1.dist, M(Kind.ENT), PoolMode(tuple(t1.pool)), OracleSpec(9))


def test_single_pair_needs_one_query():
    d = Distribution.from_list([0.3, 0.7])
    for kind in (Kind.ENT, Kind.SPL, Kind.KL, Kind.BME):
        for target in (0, 1):
            r = run_session(d, M(kind), PoolMode((Partition.of([0], [1]),)), OracleSpec(target))
            assert r.queries_asked == 1 and r.identified


def test_halving_eight_uniform():
    d = Distribution.uniform(range(8))
    pool = tuple(all_dps(range(8), EnumOptions(strong_only=True)))
    for target in range(8):
        r = run_session(d, M(Kind.SPL), PoolMode(pool), OracleSpec(target, 5))
        assert r.queries_asked == 3 and r.identified


def test_weak_coin_answers_are_seeded():
    d = Distribution.uniform(range(3))
    pool = (Partition.of([0], [1], [2]), Partition.of([0, 2], [1]), Partition.of([0], [2], [1]))
    a = run_session(d, M(Kind.ENT), PoolMode(pool), OracleSpec(2, 123))
    b = run_session(d, M(Kind.ENT), PoolMode(pool), OracleSpec(2, 123))
    assert a.history == b.history


@settings(max_examples=30)
@given(dists(3, 5), st.integers(0, 10 ** 6), st.data())
def test_session_invariants(d, seed, data):
    n = len(d)
    target = data.draw(st.integers(0, n - 1))
    pool = tuple(all_dps(range(n)))
    kind = data.draw(st.sampled_from([Kind.ENT, Kind.SPL, Kind.LC, Kind.EMCb, Kind.MPSp]))
    r = run_session(d, M(kind), PoolMode(pool), OracleSpec(target, seed), SingletonSupport())
    assert r.queries_asked == len(r.history) <= len(pool)
    assert target in r.final_dist.support
    # replay: target mass never drops after an answer it predicts
    cur = d
    from qsmkit.core import bayes_update
    for q, a in r.history:
        nxt = bayes_update(cur, q, a)
        assert abs(sum(nxt.weights.values()) - 1) < 1e-12
        if target not in q.zero:
            assert nxt[target] >= cur[target] - 1e-15
        cur = nxt
    assert cur == r.final_dist


@settings(max_examples=20)
@given(dists(3, 5), st.integers(0, 10 ** 6))
def test_pool_shrinks(d, seed):
    n = len(d)
    pool = tuple(all_dps(range(n)))
    r = run_session(d, M(Kind.ENT), PoolMode(pool), OracleSpec(0, seed))
    survivors = d.support
    sizes = [len(pool)]
    for q, a in r.history:
        survivors = survivors - (q.minus if a == 1 else q.plus)
        sizes.append(sum(1 for p in pool if p.restrict(survivors).is_dq))
    assert all(x > y for x, y in zip(sizes, sizes[1:]))


def test_equivalent_measures_identical_sessions():
    scen_pool = tuple(all_dps(range(5)))
    from qsmkit.core import random_distribution
    import numpy as np
    rng = np.random.default_rng(3)
    for _ in range(10):
        d = random_distribution(5, rng)
        for target in range(5):
            oracle = OracleSpec(target, int(rng.integers(1000)))
            runs = [run_session(d, m, PoolMode(scen_pool), oracle)
                    for m in (M(Kind.H), M(Kind.ENT_z, z=0), M(Kind.LC), M(Kind.GI))]
            assert all(r.history == runs[0].history for r in runs)


def test_benchmark_reproducible(t1):
    ms = [M(Kind.SPL), M(Kind.ENT)]
    rows1, rec1 = benchmark(ms, [t1], 6, seed=9)
    rows2, rec2 = benchmark(ms, [t1], 6, seed=9, jobs=2)
    assert rows1 == rows2 and rec1 == rec2
    assert rows_to_csv(rows1).splitlines()[0].startswith("measure,scenario")
    # every measure faces the same targets
    targets = {m: [r.target for r in rec1 if r.measure == str(m)] for m in ms}
    assert targets[ms[0]] == targets[ms[1]]


def test_benchmark_rejects_empty(t1):
    with pytest.raises(ValidationError):
        benchmark([], [t1], 1, 0)
