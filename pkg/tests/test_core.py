import math

import pytest
from hypothesis import given

from conftest import dist_and_partition, dists
from oracles import posterior
from qsmkit.core import (
    Answer,
    Distribution,
    Partition,
    QueryClass,
    Scenario,
    ValidationError,
    answer_probabilities,
    answer_probability,
    bayes_update,
    classify_partition,
    eliminated_set,
    likelihood,
    load_scenario,
)


def test_running_example_partitions(t1):
    q1, q2, q3, q4 = t1.pool
    assert classify_partition(q1) is QueryClass.STRONG
    assert classify_partition(q3) is QueryClass.STRONG
    assert classify_partition(q2) is QueryClass.WEAK
    assert classify_partition(q4) is QueryClass.WEAK
    assert classify_partition(Partition.of([], range(5))) is QueryClass.NON_DISCRIMINATING


def test_answer_probabilities_running_example(t1):
    q3, q2 = t1.partition("Q3"), t1.partition("Q2")
    assert answer_probability(q3, t1.dist, 1) == pytest.approx(0.25, abs=1e-12)
    assert answer_probability(q2, t1.dist, 0) == pytest.approx(0.5, abs=1e-12)


def test_eliminated_sets(t1):
    assert eliminated_set(t1.partition("Q2"), Answer.NO) == t1.ids(["h1", "h2"])
    assert eliminated_set(t1.partition("Q3"), Answer.YES) == t1.ids(["h1", "h2", "h3", "h5"])
    everyone = Partition.of([], range(5))
    assert eliminated_set(everyone, 1) == frozenset(range(5))
    with pytest.raises(ValidationError):
        eliminated_set(everyone, 2)


def test_bayes_running_example(t1):
    post = bayes_update(t1.dist, t1.partition("Q2"), 0)
    assert post.support == t1.ids(["h3", "h4", "h5"])
    for name, want in (("h3", 0.3), ("h4", 0.5), ("h5", 0.2)):
        assert post[min(t1.ids([name]))] == pytest.approx(want, abs=1e-12)


def test_bayes_weak_example_matches_likelihood_oracle():
    prior = Distribution.uniform(range(4))
    part = Partition.of([0], [1], [2, 3])
    post = bayes_update(prior, part, 1)
    # frozen from the likelihood-table oracle: 0.25 / (0.25 + 2 * 0.125)
    assert post.weights == pytest.approx({0: 0.5, 2: 0.25, 3: 0.25})
    assert post.weights == pytest.approx(posterior(dict(prior.weights), {0}, {1}, {2, 3}, 1))


def test_partition_rejects_overlap():
    with pytest.raises(ValidationError, match="hypothesis 1"):
        Partition.of([0, 1], [1, 2])


def test_partition_universe_check():
    with pytest.raises(ValidationError, match="hypothesis 3"):
        Partition.of([0], [1, 2], universe=range(4))


@pytest.mark.parametrize("probs", [[0.5, 0.6], [1.0, 0.0], [-0.1, 1.1], [float("nan"), 1.0]])
def test_distribution_validation(probs):
    with pytest.raises(ValidationError):
        Distribution.from_list(probs)


def test_distribution_pickles():
    import pickle
    d = Distribution.from_list([0.3, 0.7])
    assert pickle.loads(pickle.dumps(d)) == d


def test_zero_probability_answer_rejected():
    d = Distribution.from_list([0.5, 0.5])
    with pytest.raises(ValidationError):
        bayes_update(d, Partition.of([0, 1], []), 0)


def test_scenario_errors_name_field(tmp_path):
    bad = tmp_path / "s.json"
    bad.write_text('{"hypotheses": ["a", "b"], "p": [0.5, 0.5], "partitions": [{"plus": ["c"]}]}')
    with pytest.raises(ValidationError, match="partitions\\[0\\].plus"):
        load_scenario(bad)
    bad.write_text('{"hypotheses": ["a", "b"]}')
    with pytest.raises(ValidationError, match="'p'"):
        load_scenario(bad)


def test_scenario_roundtrip(t1):
    again = Scenario.from_dict(t1.to_dict())
    assert again.pool == t1.pool and again.dist == t1.dist


@given(dist_and_partition(dq=False))
def test_answer_probabilities_complement(dp):
    d, part = dp
    p1 = answer_probability(part, d, 1)
    p0 = answer_probability(part, d, 0)
    assert math.isclose(p1 + p0, 1.0, abs_tol=1e-12)
    assert answer_probabilities(part, d) == pytest.approx((p1, p0), abs=1e-15)


@given(dist_and_partition(dq=False))
def test_eliminated_sets_cover_universe(dp):
    _, part = dp
    e1, e0 = eliminated_set(part, 1), eliminated_set(part, 0)
    assert e1 | e0 | part.zero == part.universe
    assert not (e1 & e0) and not (e1 & part.zero) and not (e0 & part.zero)


@given(dist_and_partition(dq=True))
def test_posterior_is_distribution(dp):
    d, part = dp
    for a in (0, 1):
        post = bayes_update(d, part, a)
        assert math.isclose(math.fsum(post.weights.values()), 1.0, abs_tol=1e-12)
        assert all(v > 0 for v in post.weights.values())
        want = posterior(dict(d.weights), part.plus, part.minus, part.zero, a)
        assert post.weights == pytest.approx(want, rel=1e-12)


@given(dist_and_partition(dq=True, strong=True))
def test_strong_update_renormalizes_by_side_mass(dp):
    d, part = dp
    post = bayes_update(d, part, 1)
    assert post.support == part.plus
    mass = d.mass(part.plus)
    for h in part.plus:
        assert math.isclose(post[h], d[h] / mass, rel_tol=1e-12)


@given(dist_and_partition(dq=True))
def test_likelihood_sums_to_one(dp):
    _, part = dp
    for h in part.universe:
        assert likelihood(part, h, 0) + likelihood(part, h, 1) == 1.0


@given(dists())
def test_uniform_and_mass(d):
    assert math.isclose(d.mass(d.support), 1.0, abs_tol=1e-9)
