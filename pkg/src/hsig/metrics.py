"""Distances between processes and the robust signature kernel."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dp import DEFAULT_BUDGET, phi_r
from .errors import ConfigurationError
from .graded import Tensor, degree_norms, norm
from .process import FiltrationTree
from .signatures import robust_normalize, signature, sup_norm


@dataclass
class DistanceReport:
    rank: int
    truncation: int
    normalized: bool
    value: float
    per_degree: list = field(default_factory=list)
    mode: str = "hilbert"

    def to_dict(self) -> dict:
        return {"rank": self.rank, "truncation": self.truncation, "normalized": self.normalized,
                "mode": self.mode, "value": self.value, "per_degree": list(self.per_degree)}


def distance(a: Tensor, b: Tensor, mode: str = "hilbert") -> float:
    return norm(a - b, mode)


def d_r(tree_a: FiltrationTree, tree_b: FiltrationTree, r: int, max_degree: int,
        normalize: bool = False, mode: str = "hilbert", method: str = "auto",
        budget: int = DEFAULT_BUDGET) -> DistanceReport:
    """Norm of the difference of the two expected rank-(r+1) signatures.

    ``per_degree`` lists the Euclidean norm of the difference in each degree.
    """
    if tree_a.dim != tree_b.dim:
        raise ConfigurationError(f"dimension mismatch: {tree_a.dim} vs {tree_b.dim}")
    pa = phi_r(tree_a, r, max_degree, normalize, mode, method, budget).value
    pb = phi_r(tree_b, r, max_degree, normalize, mode, method, budget).value
    if pa.exact != pb.exact:
        pa, pb = pa.to_float(), pb.to_float()
    diff = pa - pb
    return DistanceReport(r, max_degree, normalize, norm(diff, mode), degree_norms(diff), mode)


def robust_signature(path, max_degree: int, mode: str = "hilbert") -> Tensor:
    return robust_normalize(signature(path, max_degree), sup_norm(path), mode)


def sig_kernel(path_x, path_y, max_degree: int) -> float:
    """``<S(x), S(y)> - 1`` for robust (normalized) signatures."""
    sx = robust_signature(path_x, max_degree)
    sy = robust_signature(path_y, max_degree)
    if sx.algebra is not sy.algebra:
        raise ConfigurationError("paths must have the same dimension")
    return float(np.dot(sx.coeffs, sy.coeffs)) - 1.0


def _features(samples, max_degree):
    samples = list(samples)
    if not samples:
        raise ConfigurationError("empty sample")
    return np.stack([robust_signature(p, max_degree).coeffs for p in samples])


def mmd(samples_a, samples_b, max_degree: int) -> float:
    """Distance between the mean robust signatures of two samples of paths."""
    fa = _features(samples_a, max_degree)
    fb = _features(samples_b, max_degree)
    if fa.shape[1] != fb.shape[1]:
        raise ConfigurationError("samples must share the path dimension")
    return float(np.linalg.norm(fa.mean(axis=0) - fb.mean(axis=0)))


def mmd_kernel_form(samples_a, samples_b, max_degree: int) -> float:
    """The same quantity through Gram-matrix averages of :func:`sig_kernel`."""
    samples_a, samples_b = list(samples_a), list(samples_b)
    if not samples_a or not samples_b:
        raise ConfigurationError("empty sample")

    def mean_k(xs, ys):
        return np.mean([[sig_kernel(x, y, max_degree) for y in ys] for x in xs])

    sq = mean_k(samples_a, samples_a) - 2 * mean_k(samples_a, samples_b) + mean_k(samples_b, samples_b)
    return float(np.sqrt(max(sq, 0.0)))
