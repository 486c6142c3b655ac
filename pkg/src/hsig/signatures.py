"""Discrete-time signatures, their higher-rank pullbacks and conditional versions.

The signature of a path ``x(0), ..., x(T)`` in ``R^d`` is the ordered product
``exp(D_0) ⊗ ... ⊗ exp(D_T)`` with time-augmented increments
``D_0 = (1, x(0))`` and ``D_t = (1, x(t) - x(t-1))``.  Its level-one time
coefficient is therefore ``T + 1``.

At rank ``r >= 2`` the path takes values in the rank-(r-1) algebra.  The
first increment is ``(1, x(0))`` with the unit coefficient of ``x(0)``
dropped, later increments are plain differences.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .errors import ConfigurationError
from .graded import Tensor, algebra, dilate, exp_generators, exp_r, norm, product_r, zeros
from .process import FiltrationTree
from .tensor import tensor_exp, tensor_product


def _as_path(path) -> np.ndarray:
    arr = np.asarray(path)
    if arr.dtype != object:
        arr = arr.astype(np.float64)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2 or arr.shape[0] == 0:
        raise ConfigurationError("path must be a non-empty sequence of points")
    return arr


def _time_increments(arr: np.ndarray) -> np.ndarray:
    """Rows ``(1, x(t) - x(t-1))`` with ``x(-1) = 0``."""
    diffs = np.diff(arr, axis=0, prepend=arr[:1] * 0)
    ones = np.full((arr.shape[0], 1), Fraction(1) if arr.dtype == object else 1.0,
                   dtype=arr.dtype)
    return np.hstack([ones, diffs])


def signature(path, max_degree: int) -> Tensor:
    """Truncated signature of a discrete path in ``R^d``."""
    arr = _as_path(path)
    out = None
    for inc in _time_increments(arr):
        e = tensor_exp(inc, max_degree)
        out = e if out is None else tensor_product(out, e)
    return out


def expected_signature(weighted_paths, max_degree: int) -> Tensor:
    """Probability-weighted average of signatures."""
    weighted_paths = list(weighted_paths)
    if not weighted_paths:
        raise ConfigurationError("no paths given")
    total = sum(p for p, _ in weighted_paths)
    exact = all(isinstance(p, (int, Fraction)) for p, _ in weighted_paths)
    if (total != 1) if exact else abs(total - 1) > 1e-12:
        raise ConfigurationError(f"probabilities sum to {total}, expected 1")
    acc = None
    for p, path in weighted_paths:
        term = p * signature(path, max_degree)
        acc = term if acc is None else acc + term
    return acc


def sup_norm(path) -> float:
    """``max_t |x(t)|`` with the Euclidean (Hilbert, for tensors) norm of each value."""
    if isinstance(path, (list, tuple)) and path and isinstance(path[0], Tensor):
        return max(norm(v) for v in path)
    arr = _as_path(path).astype(np.float64)
    return float(np.max(np.linalg.norm(arr, axis=1)))


def robust_normalize(s: Tensor, path_sup_norm: float, mode: str = "hilbert") -> Tensor:
    """Dilate ``s`` by ``exp(-|s| - path_sup_norm)``; the result is always float."""
    s = s.to_float() if s.exact else s
    return dilate(s, math.exp(-norm(s, mode) - float(path_sup_norm)))


def _increments_rank_r(path: list[Tensor]) -> list[Tensor]:
    first = path[0]
    lead = first.coeffs.copy()
    lead[0] = 0
    out = [Tensor(first.algebra, lead)]
    for prev, cur in zip(path, path[1:]):
        diff = (cur - prev).coeffs.copy()
        # Values with equal unit coefficients; clear float round-off only.
        if not cur.exact and abs(diff[0]) <= 1e-12 * max(1.0, abs(cur.coeffs[0])):
            diff[0] = 0.0
        out.append(Tensor(first.algebra, diff))
    return out


def signature_rank_r(path, max_degree: int | None = None) -> Tensor:
    """Signature of a path of rank-(r-1) values, living in the rank-r algebra.

    ``path`` is either a sequence of points in ``R^d`` (rank 1, requires
    ``max_degree``) or a sequence of :class:`Tensor` sharing one algebra.
    Unlike :func:`signature` this uses the generic graded product.
    """
    if len(path) == 0:
        raise ConfigurationError("path must be non-empty")
    if isinstance(path[0], Tensor):
        alg = path[0].algebra
        if any(v.algebra is not alg for v in path):
            raise ConfigurationError("all path values must share rank, dim and truncation")
        if max_degree not in (None, alg.max_degree):
            raise ConfigurationError("max_degree must match the path's truncation")
        incs = _increments_rank_r(list(path))
        out = None
        for inc in incs:
            e = exp_r(1, inc)
            out = e if out is None else product_r(out, e)
        return out
    if max_degree is None:
        raise ConfigurationError("max_degree is required for a path in R^d")
    arr = _as_path(path)
    out = None
    for inc in _time_increments(arr):
        e = exp_r(inc[0], inc[1:], max_degree)
        out = e if out is None else product_r(out, e)
    return out


def _node_increment(tree: FiltrationTree, lower, node: int):
    """Generator values of the time-augmented increment arriving at ``node``."""
    par = tree.parent[node]
    if isinstance(lower[node], Tensor):
        cur = lower[node].coeffs
        inc = cur - lower[par].coeffs if par >= 0 else cur.copy()
        inc = inc.copy()
        inc[0] = 1
        return inc
    cur = lower[node]
    inc = cur - lower[par] if par >= 0 else cur
    one = Fraction(1) if cur.dtype == object else 1.0
    return np.concatenate([np.array([one], dtype=cur.dtype), inc])


def lift(tree: FiltrationTree, lower: list, max_degree: int, normalize: bool = False,
         mode: str = "hilbert") -> list[Tensor]:
    """One rank step: conditional expectations of branch signatures of ``lower``.

    ``lower`` holds the value of the rank-(r-1) process at every node.  The
    result holds ``E[S(lower along the branch) | F_t]`` at every node.
    """
    if isinstance(lower[0], Tensor):
        lo = lower[0]
        alg = algebra(lo.rank + 1, lo.dim, lo.max_degree)
        exact = lo.exact
    else:
        alg = algebra(1, tree.dim, max_degree)
        exact = lower[0].dtype == object
    if normalize:
        exact = False
    n = len(tree)
    prefix = [None] * n
    sup = [0.0] * n
    for i in range(n):
        e = exp_generators(alg, _node_increment(tree, lower, i))
        par = tree.parent[i]
        prefix[i] = e if par < 0 else product_r(prefix[par], e)
        if normalize:
            val = lower[i]
            here = norm(val) if isinstance(val, Tensor) else float(
                np.linalg.norm(np.asarray(val, dtype=np.float64)))
            sup[i] = here if par < 0 else max(sup[par], here)

    out = [None] * n
    for i in reversed(range(n)):
        kids = tree.children[i]
        if not kids:
            out[i] = robust_normalize(prefix[i], sup[i], mode) if normalize else prefix[i]
        else:
            acc = zeros(alg, exact)
            for c in kids:
                acc = acc + tree.prob[c] * out[c]
            out[i] = acc
    return out


def node_values(tree: FiltrationTree) -> list[np.ndarray]:
    return [tree.value_array(i) for i in range(len(tree))]


def conditional_signature_process(tree: FiltrationTree, r: int, max_degree: int,
                                  normalize: bool = False, mode: str = "hilbert") -> dict:
    """Rank-r conditional signature process ``{node: Tensor}``.

    Rank 0 is the process itself, and rank ``k`` is the conditional
    expectation given ``F_t`` of the rank-k signature of the rank-(k-1)
    process along the branch.
    """
    if r < 0:
        raise ConfigurationError(f"rank must be >= 0, got {r}")
    vals = node_values(tree)
    for _ in range(r):
        vals = lift(tree, vals, max_degree, normalize, mode)
    return dict(enumerate(vals))

