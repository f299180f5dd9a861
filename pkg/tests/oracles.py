"""Independent reference implementations used to derive frozen test values.

These deliberately avoid the package's own helpers: counts come from literal
loops, posteriors from the likelihood table, entropies from raw frequencies.
"""

import itertools
import math


def count_dps_literal(n):
    total = 0
    for digits in itertools.product("+-0", repeat=n):
        if "+" in digits and "-" in digits:
            total += 1
    return total


def count_strong_literal(n):
    return sum(1 for d in itertools.product("+-", repeat=n) if "+" in d and "-" in d)


def likelihood_table(plus, minus, zero, h, a):
    if h in zero:
        return 0.5
    if h in plus:
        return 1.0 if a == 1 else 0.0
    return 1.0 if a == 0 else 0.0


def posterior(prior, plus, minus, zero, a):
    """Bayes' rule over the likelihood table; prior is {h: p}."""
    joint = {h: p * likelihood_table(plus, minus, zero, h, a) for h, p in prior.items()}
    z = sum(joint.values())
    return {h: v / z for h, v in joint.items() if v > 0}


def vote_entropy(n_plus, n_minus):
    c = n_plus + n_minus
    out = 0.0
    for k in (n_plus, n_minus):
        f = k / c
        if f > 0:
            out -= f * math.log2(f)
    return out


def expected_eliminated(p, plus, minus, zero):
    """E[|eliminated|] under the answer distribution, by explicit expectation."""
    p1 = sum(p[h] for h in plus) + sum(p[h] for h in zero) / 2
    p0 = 1 - p1
    return p1 * len(minus) + p0 * len(plus)


def all_triples(n):
    """Every partition of range(n) as (plus, minus, zero) frozensets."""
    for digits in itertools.product((0, 1, 2), repeat=n):
        sides = ([], [], [])
        for h, d in enumerate(digits):
            sides[d].append(h)
        yield tuple(map(frozenset, sides))


def dpo_by_definition(q, q2):
    """Literal reading: some answer bijection where each answer of q eliminates
    a superset of the matched answer of q2, strictly for at least one."""
    qp, qm, _ = q
    rp, rm, _ = q2
    # eliminated sets: answer 1 kills minus, answer 0 kills plus
    for f in ({1: 1, 0: 0}, {1: 0, 0: 1}):
        elim_q = {1: qm, 0: qp}
        elim_r = {1: rm, 0: rp}
        ok = all(elim_q[f[a]] >= elim_r[a] for a in (0, 1))
        strict = any(elim_q[f[a]] > elim_r[a] for a in (0, 1))
        if ok and strict:
            return True
    return False
