"""Rank-1 truncated tensor algebra over ``R^{d+1}``.

Letter 0 is the time coordinate.  Elements are :class:`~hsig.graded.Tensor`
objects over the rank-1 algebra, whose basis order within each degree is
lexicographic, i.e. the row-major layout of ``(d+1)^{⊗k}``.  The arithmetic
here works block by block with Kronecker products and is independent of the
generic product tables in :mod:`hsig.graded`.
"""

from __future__ import annotations

import math
from collections import Counter
from fractions import Fraction

import numpy as np

from .errors import ConfigurationError
from .graded import Tensor, algebra, dilate, norm  # noqa: F401  (re-exported)


def _blocks(t: Tensor) -> list[np.ndarray]:
    return [t.degree_part(k) for k in range(t.max_degree + 1)]


def _assemble(alg, blocks, exact):
    coeffs = np.concatenate(blocks)
    if exact:
        coeffs = coeffs.astype(object)
    return Tensor(alg, coeffs)


def _check_rank1(*ts: Tensor):
    for t in ts:
        if t.rank != 1:
            raise ConfigurationError(f"expected a rank-1 tensor, got rank {t.rank}")


def tensor_product(a: Tensor, b: Tensor) -> Tensor:
    """Truncated convolution product of two rank-1 tensors."""
    _check_rank1(a, b)
    if (a.dim, a.max_degree) != (b.dim, b.max_degree):
        raise ConfigurationError(
            f"mismatch: (d={a.dim}, M={a.max_degree}) vs (d={b.dim}, M={b.max_degree})")
    exact = a.exact or b.exact
    ab, bb = _blocks(a), _blocks(b)
    out = []
    for k in range(a.max_degree + 1):
        acc = np.kron(ab[0], bb[k])
        for i in range(1, k + 1):
            acc = acc + np.kron(ab[i], bb[k - i])
        out.append(acc)
    return _assemble(a.algebra, out, exact)


def tensor_exp(v, max_degree: int) -> Tensor:
    """``sum_{m <= M} v^{⊗m} / m!`` for ``v`` in ``R^{d+1}`` (time first)."""
    if max_degree < 0:
        raise ConfigurationError(f"max_degree must be >= 0, got {max_degree}")
    v = np.asarray(v)
    exact = v.dtype == object
    if exact:
        v = np.array([Fraction(x) for x in v], dtype=object)
    else:
        v = v.astype(np.float64)
    if v.ndim != 1 or len(v) < 2:
        raise ConfigurationError("v must be a vector of length d+1 >= 2")
    alg = algebra(1, len(v) - 1, max_degree)
    one = np.array([Fraction(1)], dtype=object) if exact else np.ones(1)
    blocks = [one]
    power = one
    for m in range(1, max_degree + 1):
        power = np.kron(power, v)
        blocks.append(power / math.factorial(m))
    return _assemble(alg, blocks, exact)


def shuffle_product(u, v) -> Counter:
    """All interleavings of the words ``u`` and ``v``, with multiplicity."""
    u, v = tuple(u), tuple(v)
    if not u:
        return Counter({v: 1})
    if not v:
        return Counter({u: 1})
    out = Counter()
    for w, c in shuffle_product(u[:-1], v).items():
        out[w + (u[-1],)] += c
    for w, c in shuffle_product(u, v[:-1]).items():
        out[w + (v[-1],)] += c
    return out


def word_coefficient(t: Tensor, word) -> float:
    """Coefficient of a letter word; zero above the truncation."""
    word = tuple(word)
    if len(word) > t.max_degree:
        return 0
    return t[word]


__all__ = ["tensor_product", "tensor_exp", "dilate", "norm", "shuffle_product", "word_coefficient"]
