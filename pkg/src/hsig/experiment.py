"""Classifying mixtures of two-step processes from expected-signature features.

For a level ``c`` the process ``X^c`` is ``0, N_1, c + N_2`` and ``Y^c`` is
``0, sqrt(1 - eps^2) M_1 + eps c, c + M_2`` where the noises are independent
fair ``±1`` coin flips.  Each sample draws ``C ~ N(0, 1)`` and one of the two
processes with equal probability; the features of a sample are the exact
expected signatures of that process, computed on its four-leaf tree.
"""

from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .dp import expsig0_dp, expsig1_dp
from .errors import ConfigurationError
from .process import Atom, FiltrationTree


@dataclass(frozen=True)
class ExperimentConfig:
    epsilon: float = 1e-4
    n_samples: int = 1000
    n_train: int = 500
    n_test: int = 500
    trunc_phi0: int = 6
    trunc_phi1: int = 3
    m_values: tuple = tuple(range(50, 501, 50))
    reg: float = 1e-3
    epochs: int = 10_000
    seed: int = 42

    def __post_init__(self):
        if self.n_samples <= 0:
            raise ConfigurationError(f"n_samples must be positive, got {self.n_samples}")
        if self.n_train <= 0 or self.n_test <= 0:
            raise ConfigurationError("train and test sizes must be positive")
        if self.n_train + self.n_test != self.n_samples:
            raise ConfigurationError(
                f"split {self.n_train}+{self.n_test} does not sum to n_samples={self.n_samples}")
        if not self.epsilon > 0 or self.epsilon >= 1:
            raise ConfigurationError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if not self.m_values or any(m < 1 or m > self.n_train for m in self.m_values):
            raise ConfigurationError(f"m values must lie in 1..{self.n_train}")
        if self.trunc_phi0 < 0 or self.trunc_phi1 < 0:
            raise ConfigurationError("truncations must be nonnegative")
        if self.reg <= 0 or self.epochs < 1:
            raise ConfigurationError("reg must be positive and epochs at least 1")


def two_step_tree(first: tuple, level: float) -> FiltrationTree:
    """Tree with time-1 values ``first`` (equally likely) and ``level ± 1`` at time 2."""
    kids = [Atom([x1], 0.5, [Atom([level + 1.0], 0.5), Atom([level - 1.0], 0.5)])
            for x1 in first]
    return FiltrationTree(Atom([0.0], 1.0, kids), 2, 1, exact=False)


def make_process(label: int, c: float, epsilon: float) -> FiltrationTree:
    """``label`` 0 builds ``X^c`` and 1 builds ``Y^c``."""
    if label == 0:
        return two_step_tree((1.0, -1.0), c)
    scale = math.sqrt(1.0 - epsilon ** 2)
    return two_step_tree((scale + epsilon * c, -scale + epsilon * c), c)


def sample_processes(config: ExperimentConfig):
    rng = np.random.default_rng(config.seed)
    levels = rng.standard_normal(config.n_samples)
    labels = rng.integers(0, 2, size=config.n_samples)
    return levels, labels


def _n_threads() -> int:
    try:
        return max(1, int(os.environ.get("HSIG_THREADS", "1")))
    except ValueError:
        return 1


def features(levels, labels, config: ExperimentConfig):
    """Rows of expected signature features ``(phi0, phi1)`` per sample."""

    def one(args):
        c, y = args
        tree = make_process(int(y), float(c), config.epsilon)
        return (expsig0_dp(tree, config.trunc_phi0).value.coeffs,
                expsig1_dp(tree, config.trunc_phi1).value.coeffs)

    jobs = list(zip(levels, labels))
    n = _n_threads()
    if n > 1:
        with ThreadPoolExecutor(max_workers=n) as pool:
            rows = list(pool.map(one, jobs))
    else:
        rows = [one(j) for j in jobs]
    return np.stack([r[0] for r in rows]), np.stack([r[1] for r in rows])


def standardize(train: np.ndarray, *others):
    """Centre and scale by training statistics; constant columns map to zero."""
    mean = train.mean(axis=0)
    std = train.std(axis=0)
    std[std < 1e-12 * np.maximum(1.0, np.abs(mean))] = np.inf
    return tuple((a - mean) / std for a in (train,) + others)


class LinearSVM:
    """Soft-margin linear classifier trained by full-batch hinge subgradient steps.

    Minimizes ``reg/2 |w|^2 + mean(max(0, 1 - y (w.x + b)))`` with the step
    size ``1 / (reg * t)``.  The bias is an extra, equally regularized weight
    on a constant feature.
    """

    def __init__(self, reg: float = 1e-3, epochs: int = 10_000):
        self.reg = reg
        self.epochs = epochs
        self.coef_ = None

    def fit(self, X, y):
        X = np.hstack([np.asarray(X, dtype=np.float64), np.ones((len(X), 1))])
        y = np.where(np.asarray(y) > 0, 1.0, -1.0)
        w = np.zeros(X.shape[1])
        for t in range(1, self.epochs + 1):
            eta = 1.0 / (self.reg * t)
            active = y * (X @ w) < 1.0
            grad = self.reg * w - (y[active] @ X[active]) / len(y)
            w -= eta * grad
        self.coef_ = w
        return self

    def decision_function(self, X):
        X = np.asarray(X, dtype=np.float64)
        return X @ self.coef_[:-1] + self.coef_[-1]

    def predict(self, X):
        return np.where(self.decision_function(X) >= 0, 1, 0)

    def score(self, X, y):
        return float(np.mean(self.predict(X) == np.asarray(y)))


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    rows: list = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["m", "accuracy_phi0", "accuracy_phi1"])
        for m, a0, a1 in self.rows:
            writer.writerow([m, f"{a0:.4f}", f"{a1:.4f}"])
        return buf.getvalue()


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    levels, labels = sample_processes(config)
    phi0, phi1 = features(levels, labels, config)
    tr = slice(0, config.n_train)
    te = slice(config.n_train, config.n_samples)
    y_tr, y_te = labels[tr], labels[te]
    result = ExperimentResult(config)
    scaled = [standardize(f[tr], f[te]) for f in (phi0, phi1)]
    for m in config.m_values:
        accs = []
        for f_tr, f_te in scaled:
            clf = LinearSVM(config.reg, config.epochs).fit(f_tr[:m], y_tr[:m])
            accs.append(clf.score(f_te, y_te))
        result.rows.append((m, accs[0], accs[1]))
    return result
