"""Canonical example processes with rational probabilities."""

from __future__ import annotations

from fractions import Fraction

from .errors import ConfigurationError
from .process import Atom, FiltrationTree, validate

# Outcomes in {1..16} on which the terminal value equals 1 (it is 2 elsewhere).
_ONES_X = frozenset({1, 2, 5, 6, 9, 11, 13, 15})
_ONES_Y = frozenset({1, 2, 5, 7, 9, 10, 13, 15})

# Smallest truncation at which d_2 separates the counterexample pair.  Every
# coefficient of degree <= 6 agrees exactly; the first difference is in degree 7.
SEPARATION_TRUNCATION = 7


def _dyadic(ones, lo, hi, depth):
    """Binary tree over outcomes ``lo..hi``; only the leaves carry a nonzero value."""
    if lo == hi:
        return Atom([1 if lo in ones else 2], Fraction(1, 2))
    mid = (lo + hi) // 2
    return Atom([0], Fraction(1, 2),
                [_dyadic(ones, lo, mid, depth + 1), _dyadic(ones, mid + 1, hi, depth + 1)])


def counterexample_pair() -> tuple[FiltrationTree, FiltrationTree]:
    """Two processes on 16 equally likely outcomes with a dyadic filtration.

    Both are zero up to time 3 and take values in {1, 2} at time 4.  They share
    their law and the law of their first-order prediction process but differ in
    ``E[E[X_4|F_3]^2|F_1]``.
    """
    out = []
    for ones in (_ONES_X, _ONES_Y):
        root = _dyadic(ones, 1, 16, 0)
        root.prob = Fraction(1)
        out.append(validate(FiltrationTree(root, 4, 1, exact=True)))
    return out[0], out[1]


def two_step_pair(n: int) -> tuple[FiltrationTree, FiltrationTree]:
    """Processes that agree in law in the limit but differ in information.

    The left process moves to ``±1/n`` at time 1 and then to ``±1`` with the
    same sign, so the final value is revealed early.  The right process stays
    at 0 and only then jumps to ``±1``.  As ``n`` grows the laws converge.
    """
    if int(n) != n or n < 1:
        raise ConfigurationError(f"n must be a positive integer, got {n}")
    half = Fraction(1, 2)
    gap = Fraction(1, int(n))
    left = Atom([0], 1, [Atom([gap], half, [Atom([1], 1)]),
                         Atom([-gap], half, [Atom([-1], 1)])])
    right = Atom([0], 1, [Atom([0], 1, [Atom([1], half), Atom([-1], half)])])
    return (validate(FiltrationTree(left, 2, 1, exact=True)),
            validate(FiltrationTree(right, 2, 1, exact=True)))


def chain(values, exact: bool = True) -> FiltrationTree:
    """Deterministic process with the given sequence of values (scalars or vectors)."""
    values = [v if isinstance(v, (list, tuple)) else [v] for v in values]
    node = Atom(list(values[-1]), 1)
    for v in reversed(values[:-1]):
        node = Atom(list(v), 1, [node])
    return validate(FiltrationTree(node, len(values) - 1, len(values[0]), exact=exact))
