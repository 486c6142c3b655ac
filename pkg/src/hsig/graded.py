"""Truncated tensor algebras of arbitrary rank.

A rank-1 algebra is the truncated tensor algebra over ``R^{d+1}`` where
letter 0 is the time coordinate and letters ``1..d`` are space coordinates.
The rank-r algebra is the free algebra generated by a fresh time letter
``tau_r`` together with the nonempty basis words of the rank-(r-1) algebra.
A generator inherits the degree of the word it comes from and ``tau_r`` has
degree one, so every composite word carries a total degree.  All algebras
here are truncated at a single total degree ``M``.

Words are stored as tuples of generator indices.  Generator 0 is always the
time letter; generator ``g >= 1`` is letter ``g`` at rank 1 and the lower
basis word with flat index ``g`` at higher rank (lower index 0 is the unit
and is never a generator).  Basis order is degree-major, then lexicographic
on generator indices, so the time letter sorts first.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Number

import numpy as np

from .errors import ConfigurationError, InvalidIncrement

FORMAT_VERSION = 1


class GradedAlgebra:
    """Basis and multiplication tables for one ``(rank, dim, max_degree)``.

    Instances are cached; obtain them through :func:`algebra`.
    """

    def __init__(self, rank: int, dim: int, max_degree: int):
        if rank < 1:
            raise ConfigurationError(f"rank must be >= 1, got {rank}")
        if dim < 1:
            raise ConfigurationError(f"dim must be >= 1, got {dim}")
        if max_degree < 0:
            raise ConfigurationError(f"max_degree must be >= 0, got {max_degree}")
        self.rank = rank
        self.dim = dim
        self.max_degree = max_degree
        if rank == 1:
            self.lower = None
            gen_degrees = [1] * (dim + 1)
        else:
            self.lower = algebra(rank - 1, dim, max_degree)
            gen_degrees = [1] + [int(k) for k in self.lower.degrees[1:]]
        self.gen_degrees = np.asarray(gen_degrees, dtype=np.int64)

        # The degree-k block is the concatenation, over generators g in index
        # order, of g prepended to the degree-(k - deg g) block.  This is the
        # lexicographic order, and it gives each prefix a fixed offset.
        by_degree = [[()]]
        for k in range(1, max_degree + 1):
            level = []
            for g, dg in enumerate(gen_degrees):
                if dg <= k:
                    level.extend((g,) + rest for rest in by_degree[k - dg])
            by_degree.append(level)

        self.words = [w for level in by_degree for w in level]
        self.degree_counts = [len(level) for level in by_degree]
        self.offsets = np.concatenate([[0], np.cumsum(self.degree_counts)]).astype(np.int64)
        self.degrees = np.repeat(np.arange(max_degree + 1), self.degree_counts)
        self.size = len(self.words)

    def __repr__(self):
        return f"GradedAlgebra(rank={self.rank}, dim={self.dim}, max_degree={self.max_degree})"

    @property
    def n_generators(self) -> int:
        return len(self.gen_degrees)

    def degree_slice(self, k: int) -> slice:
        return slice(int(self.offsets[k]), int(self.offsets[k + 1]))

    @functools.cached_property
    def index(self) -> dict:
        return {w: i for i, w in enumerate(self.words)}

    @functools.cached_property
    def _shifts(self):
        """``shifts[i][k][p]``: position inside the degree-k block of the word
        formed by the p-th degree-i word followed by the first degree-(k-i) word."""
        M = self.max_degree
        counts = self.degree_counts
        gen_off = []
        for k in range(M + 1):
            sizes = [counts[k - dg] if dg <= k else 0 for dg in self.gen_degrees]
            gen_off.append(np.concatenate([[0], np.cumsum(sizes)[:-1]]).astype(np.int64))
        shifts = [{k: np.zeros(1, dtype=np.int64) for k in range(M + 1)}]
        for i in range(1, M + 1):
            row = {}
            for k in range(i, M + 1):
                parts = [gen_off[k][g] + shifts[i - dg][k - dg]
                         for g, dg in enumerate(self.gen_degrees) if dg <= i]
                row[k] = np.concatenate(parts)
            shifts.append(row)
        return shifts

    @functools.cached_property
    def product_table(self):
        """Index triples ``(left, right, out)`` with ``words[left] + words[right] == words[out]``."""
        shifts = self._shifts
        counts = self.degree_counts
        left, right, out = [], [], []
        for i in range(self.max_degree + 1):
            for j in range(self.max_degree + 1 - i):
                ni, nj = counts[i], counts[j]
                left.append(np.repeat(self.offsets[i] + np.arange(ni), nj))
                right.append(np.tile(self.offsets[j] + np.arange(nj), ni))
                out.append((self.offsets[i + j] + shifts[i][i + j][:, None]
                            + np.arange(nj)[None, :]).ravel())
        return np.concatenate(left), np.concatenate(right), np.concatenate(out)

    @functools.cached_property
    def _exp_layout(self):
        lengths = np.fromiter((len(w) for w in self.words), dtype=np.int64, count=self.size)
        width = max(1, int(lengths.max()))
        pad = self.n_generators
        gens = np.full((self.size, width), pad, dtype=np.int64)
        for i, w in enumerate(self.words):
            gens[i, : len(w)] = w
        return gens, lengths

    def word_label(self, i: int):
        """JSON-friendly nested description of basis word ``i``."""
        w = self.words[i]
        if self.rank == 1:
            return list(w)
        return ["t" if g == 0 else self.lower.word_label(g) for g in w]

    def word_from_label(self, label) -> tuple:
        if self.rank == 1:
            return tuple(int(x) for x in label)
        out = []
        for g in label:
            if g == "t":
                out.append(0)
            else:
                idx = self.lower.index.get(self.lower.word_from_label(g))
                if not idx:
                    raise ConfigurationError(f"unknown generator {g!r}")
                out.append(idx)
        return tuple(out)


@functools.lru_cache(maxsize=None)
def algebra(rank: int, dim: int, max_degree: int) -> GradedAlgebra:
    return GradedAlgebra(rank, dim, max_degree)


def basis_enumerate(rank: int, dim: int, max_degree: int) -> list[tuple]:
    """Basis words of total degree <= ``max_degree`` in canonical order."""
    return list(algebra(rank, dim, max_degree).words)


@functools.lru_cache(maxsize=None)
def _count_table(rank: int, dim: int, k: int) -> tuple:
    if rank == 0:
        return tuple([1, dim] + [0] * (k - 1))[: k + 1]
    lower = _count_table(rank - 1, dim, k)
    gens = [0] * (k + 1)
    for j in range(1, k + 1):
        gens[j] = lower[j]
    if k >= 1:
        gens[1] += 1
    counts = [1]
    for n in range(1, k + 1):
        counts.append(sum(gens[j] * counts[n - j] for j in range(1, n + 1)))
    return tuple(counts)


def dim_graded(rank: int, dim: int, k: int) -> int:
    """Number of basis words of degree exactly ``k``.

    Rank 1 is ``(d+1)^k``.  Rank 2 follows the two-term recursion
    ``A(k) = (2q+1) A(k-1) - q A(k-2)`` with ``q = d+1``, ``A(0)=1`` and
    ``A(1)=q+1``; for ``q=1`` this is OEIS A001519 shifted by one place and
    for ``q=2`` it is A052984.  Higher ranks are counted by convolving the
    generator counts with the sequence counts, with no closed form.
    """
    if k < 0:
        raise ConfigurationError(f"degree must be >= 0, got {k}")
    if rank < 1 or dim < 1:
        raise ConfigurationError("rank and dim must be >= 1")
    if rank == 1:
        return (dim + 1) ** k
    if rank == 2:
        q = dim + 1
        a, b = 1, q + 1
        if k == 0:
            return a
        for _ in range(k - 1):
            a, b = b, (2 * q + 1) * b - q * a
        return b
    return _count_table(rank, dim, k)[k]


def total_dim(rank: int, dim: int, max_degree: int) -> int:
    return sum(dim_graded(rank, dim, k) for k in range(max_degree + 1))


def _as_coeffs(values, exact: bool) -> np.ndarray:
    if exact:
        arr = np.empty(len(values), dtype=object)
        arr[:] = [Fraction(v) for v in values]
        return arr
    return np.asarray(values, dtype=np.float64)


@dataclass(frozen=True, eq=False)
class Tensor:
    """Element of a truncated graded algebra, stored as a dense coefficient vector.

    ``coeffs`` is float64 by default or an object array of ``Fraction`` in
    exact mode.
    """

    algebra: GradedAlgebra
    coeffs: np.ndarray

    def __post_init__(self):
        if self.coeffs.shape != (self.algebra.size,):
            raise ConfigurationError(
                f"expected {self.algebra.size} coefficients, got shape {self.coeffs.shape}")
        self.coeffs.setflags(write=False)

    @property
    def rank(self):
        return self.algebra.rank

    @property
    def dim(self):
        return self.algebra.dim

    @property
    def max_degree(self):
        return self.algebra.max_degree

    @property
    def exact(self) -> bool:
        return self.coeffs.dtype == object

    def __getitem__(self, word) -> Number:
        i = self.algebra.index.get(tuple(word))
        if i is None:
            if sum(int(self.algebra.gen_degrees[g]) for g in word) > self.max_degree:
                return 0
            raise KeyError(word)
        return self.coeffs[i]

    def degree_part(self, k: int) -> np.ndarray:
        return self.coeffs[self.algebra.degree_slice(k)]

    def _check(self, other: "Tensor"):
        if not isinstance(other, Tensor):
            raise ConfigurationError(f"expected Tensor, got {type(other).__name__}")
        if self.algebra is not other.algebra:
            raise ConfigurationError(f"algebra mismatch: {self.algebra} vs {other.algebra}")

    def __add__(self, other):
        self._check(other)
        return Tensor(self.algebra, self.coeffs + other.coeffs)

    def __sub__(self, other):
        self._check(other)
        return Tensor(self.algebra, self.coeffs - other.coeffs)

    def __neg__(self):
        return Tensor(self.algebra, -self.coeffs)

    def __mul__(self, other):
        if isinstance(other, Tensor):
            return product_r(self, other)
        return Tensor(self.algebra, self.coeffs * other)

    def __rmul__(self, scalar):
        return Tensor(self.algebra, scalar * self.coeffs)

    def __truediv__(self, scalar):
        return Tensor(self.algebra, self.coeffs / scalar)

    def to_float(self) -> "Tensor":
        return Tensor(self.algebra, self.coeffs.astype(np.float64))

    def to_dict(self) -> dict:
        alg = self.algebra
        coeffs = [str(c) if isinstance(c, Fraction) else float(c) for c in self.coeffs]
        return {
            "version": FORMAT_VERSION,
            "rank": alg.rank,
            "dim": alg.dim,
            "max_degree": alg.max_degree,
            "exact": self.exact,
            "words": [alg.word_label(i) for i in range(alg.size)],
            "coefficients": coeffs,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Tensor":
        if data.get("version") != FORMAT_VERSION:
            raise ConfigurationError(f"unsupported tensor format version {data.get('version')}")
        alg = algebra(int(data["rank"]), int(data["dim"]), int(data["max_degree"]))
        exact = bool(data.get("exact", False))
        coeffs = _as_coeffs([0] * alg.size, exact)
        for label, c in zip(data["words"], data["coefficients"]):
            coeffs[alg.index[alg.word_from_label(label)]] = Fraction(c) if exact else float(c)
        return cls(alg, coeffs)


def zeros(alg: GradedAlgebra, exact: bool = False) -> Tensor:
    return Tensor(alg, _as_coeffs([0] * alg.size, exact))


def unit(alg: GradedAlgebra, exact: bool = False) -> Tensor:
    c = _as_coeffs([0] * alg.size, exact)
    c[0] = 1
    return Tensor(alg, c)


def from_terms(alg: GradedAlgebra, terms: dict, exact: bool = False) -> Tensor:
    """Build a tensor from ``{word: coefficient}``; words above the truncation are dropped."""
    c = _as_coeffs([0] * alg.size, exact)
    for w, v in terms.items():
        i = alg.index.get(tuple(w))
        if i is None:
            if sum(int(alg.gen_degrees[g]) for g in w) > alg.max_degree:
                continue
            raise ConfigurationError(f"word {w} is not in {alg}")
        c[i] += Fraction(v) if exact else v
    return Tensor(alg, c)


def product_r(a: Tensor, b: Tensor) -> Tensor:
    """Truncated concatenation product."""
    a._check(b)
    left, right, out = a.algebra.product_table
    if a.exact or b.exact:
        res = np.zeros(a.algebra.size, dtype=object)
        res[:] = [Fraction(0)] * a.algebra.size
        np.add.at(res, out, a.coeffs[left] * b.coeffs[right])
        return Tensor(a.algebra, res)
    res = np.bincount(out, weights=a.coeffs[left] * b.coeffs[right], minlength=a.algebra.size)
    return Tensor(a.algebra, res)


def exp_generators(alg: GradedAlgebra, x) -> Tensor:
    """Exponential of the degree-one-in-generators element ``sum_g x[g] g``.

    The coefficient of a word ``g_1...g_n`` is ``x[g_1]...x[g_n] / n!``.
    """
    x = np.asarray(x)
    if x.shape != (alg.n_generators,):
        raise ConfigurationError(f"expected {alg.n_generators} generator values, got {x.shape}")
    gens, lengths = alg._exp_layout
    exact = x.dtype == object
    if exact:
        xpad = np.empty(len(x) + 1, dtype=object)
        xpad[:-1] = [Fraction(v) for v in x]
        xpad[-1] = Fraction(1)
        fact = np.array([math.factorial(n) for n in lengths], dtype=object)
        num = np.prod(xpad[gens], axis=1)
        return Tensor(alg, num / fact)
    xpad = np.append(x.astype(np.float64), 1.0)
    fact = np.array([math.factorial(n) for n in lengths], dtype=np.float64)
    return Tensor(alg, np.prod(xpad[gens], axis=1) / fact)


def exp_r(time, increment, max_degree: int | None = None, *, rank: int | None = None) -> Tensor:
    """Exponential of ``time * tau + increment`` in the rank-r algebra.

    ``increment`` is a rank-(r-1) :class:`Tensor` with zero unit coefficient,
    in which case the result lives in the rank-r algebra with the same
    truncation.  For rank 1 pass a length-d vector of space coordinates
    together with ``max_degree``.
    """
    if isinstance(increment, Tensor):
        if increment.coeffs[0] != 0:
            raise InvalidIncrement(
                f"increment has unit coefficient {increment.coeffs[0]!r}, expected 0")
        if max_degree is not None and max_degree != increment.max_degree:
            raise ConfigurationError("max_degree must match the increment's truncation")
        alg = algebra(increment.rank + 1, increment.dim, increment.max_degree)
        x = increment.coeffs.copy()
        x[0] = Fraction(time) if increment.exact else time
        return exp_generators(alg, x)
    v = np.asarray(increment)
    if max_degree is None:
        raise ConfigurationError("max_degree is required for rank-1 increments")
    if rank not in (None, 1):
        raise ConfigurationError("vector increments only define rank-1 exponentials")
    alg = algebra(1, len(v), max_degree)
    if v.dtype == object:
        x = np.empty(len(v) + 1, dtype=object)
        x[0] = Fraction(time)
        x[1:] = [Fraction(c) for c in v]
    else:
        x = np.concatenate([[time], v.astype(np.float64)])
    return exp_generators(alg, x)


def dilate(t: Tensor, lam) -> Tensor:
    """Scale each degree-k coefficient by ``lam**k``."""
    powers = np.array([lam ** int(k) for k in range(t.max_degree + 1)],
                      dtype=object if t.exact else np.float64)
    return Tensor(t.algebra, t.coeffs * powers[t.algebra.degrees])


def norm(t: Tensor, mode: str = "hilbert") -> float:
    """Hilbert norm (Euclidean over the word basis) or sum of per-degree Euclidean norms."""
    c = t.coeffs.astype(np.float64) if not t.exact else np.array(
        [float(v) for v in t.coeffs], dtype=np.float64)
    if mode == "hilbert":
        return float(np.sqrt(np.dot(c, c)))
    if mode == "level_l1":
        return float(sum(np.linalg.norm(c[t.algebra.degree_slice(k)])
                         for k in range(t.max_degree + 1)))
    raise ConfigurationError(f"unknown norm mode {mode!r}")


def degree_norms(t: Tensor) -> list[float]:
    c = np.array([float(v) for v in t.coeffs], dtype=np.float64)
    return [float(np.linalg.norm(c[t.algebra.degree_slice(k)])) for k in range(t.max_degree + 1)]
