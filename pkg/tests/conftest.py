from fractions import Fraction

import numpy as np
import pytest

from hsig.process import Atom, FiltrationTree, validate


def random_tree(rng, depth, max_branch=3, dim=1, exact=False, min_branch=1):
    """Random filtration tree; exact trees use small rational values and probabilities."""

    def probs(k):
        if exact:
            w = [int(x) for x in rng.integers(1, 5, size=k)]
            return [Fraction(x, sum(w)) for x in w]
        w = rng.random(k) + 0.05
        w = w / w.sum()
        w[-1] = 1.0 - w[:-1].sum()
        return list(w)

    def value():
        if exact:
            return [Fraction(int(x), 2) for x in rng.integers(-4, 5, size=dim)]
        return list(rng.normal(size=dim))

    def build(t):
        if t == depth:
            return Atom(value())
        k = int(rng.integers(min_branch, max_branch + 1))
        kids = [build(t + 1) for _ in range(k)]
        for kid, p in zip(kids, probs(k)):
            kid.prob = p
        return Atom(value(), 1, kids)

    return validate(FiltrationTree(build(0), depth, dim, exact=exact))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
