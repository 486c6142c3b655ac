"""Expected signatures of conditional signature processes on filtration trees.

``phi_r`` returns the expected rank-(r+1) signature of the rank-r conditional
signature process, which is that process's value at the root.  Ranks 0 and 1
use backward recursions over the tree: for rank 0

    u(leaf) = 1,    u(a) = sum_b p(a, b) exp((1, x_b - x_a)) ⊗ u(b),

and ``Phi_0 = exp((1, x_root)) ⊗ u(root)``.  For rank 1 the same recursion is
run one rank up on the values ``s(a) ⊗ u(a)``, where ``s(a)`` is the
signature of the branch from the root to ``a``.  Both traversals use an
explicit stack, so only the nodes on the current branch hold state.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, ResourceError
from .graded import Tensor, algebra, exp_generators, product_r, total_dim, unit, zeros
from .process import FiltrationTree
from .signatures import (conditional_signature_process, robust_normalize, signature,
                         signature_rank_r, sup_norm)

DEFAULT_BUDGET = 2_000_000
DEFAULT_LEAF_CAP = 4096


@dataclass
class PhiResult:
    rank: int
    truncation: int
    value: Tensor
    provenance: str
    counters: dict = field(default_factory=dict)
    elapsed: float = 0.0

    def to_dict(self) -> dict:
        return {"rank": self.rank, "truncation": self.truncation,
                "provenance": self.provenance, "elapsed_seconds": self.elapsed,
                "counters": dict(self.counters), "value": self.value.to_dict()}


def _one(exact):
    from fractions import Fraction
    return Fraction(1) if exact else 1.0


def _time_aug(diff: np.ndarray, exact: bool) -> np.ndarray:
    out = np.empty(len(diff) + 1, dtype=object if exact else np.float64)
    out[0] = _one(exact)
    out[1:] = diff
    return out


def _postorder(tree: FiltrationTree, on_enter, on_exit, counters):
    """Iterative depth-first traversal.

    ``on_enter(node)`` runs when a node is first visited and
    ``on_exit(node)`` once all of its children are done; its return value is
    passed to ``on_child(parent, child, value)`` via the parent's frame.
    Counts visits and the peak number of edges on the stack.
    """
    stack = [[0, 0]]
    on_enter(0)
    visits = 1
    peak = 0
    while stack:
        frame = stack[-1]
        node, pos = frame
        kids = tree.children[node]
        if pos < len(kids):
            frame[1] += 1
            child = kids[pos]
            on_enter(child)
            visits += 1
            stack.append([child, 0])
            peak = max(peak, len(stack) - 1)
        else:
            stack.pop()
            on_exit(node)
    counters["visits"] = visits
    counters["peak_depth"] = peak


def _rank1_algebra(tree, M):
    return algebra(1, tree.dim, M)


def expsig0_dp(tree: FiltrationTree, max_degree: int) -> PhiResult:
    """Expected signature of the process by backward recursion."""
    start = time.perf_counter()
    alg = _rank1_algebra(tree, max_degree)
    exact = tree.exact
    vals = [tree.value_array(i) for i in range(len(tree))]
    acc = {}
    result = {}

    def enter(i):
        acc[i] = zeros(alg, exact)

    def leave(i):
        u = acc.pop(i)
        if not tree.children[i]:
            u = unit(alg, exact)
        par = tree.parent[i]
        if par < 0:
            result["root"] = u
            return
        e = exp_generators(alg, _time_aug(vals[i] - vals[par], exact))
        acc[par] = acc[par] + tree.prob[i] * product_r(e, u)

    counters = {}
    _postorder(tree, enter, leave, counters)
    e0 = exp_generators(alg, _time_aug(vals[0], exact))
    value = product_r(e0, result["root"])
    counters.update(n_nodes=len(tree), n_edges=tree.n_edges)
    return PhiResult(0, max_degree, value, "dp", counters, time.perf_counter() - start)


def _backward_values(tree, alg, exact, vals):
    """``u`` at every node for the rank-0 recursion (cached, post-order)."""
    u = [None] * len(tree)

    def enter(i):
        pass

    def leave(i):
        kids = tree.children[i]
        if not kids:
            u[i] = unit(alg, exact)
            return
        acc = zeros(alg, exact)
        for c in kids:
            e = exp_generators(alg, _time_aug(vals[c] - vals[i], exact))
            acc = acc + tree.prob[c] * product_r(e, u[c])
        u[i] = acc

    counters = {}
    _postorder(tree, enter, leave, counters)
    return u


def expsig1_dp(tree: FiltrationTree, max_degree: int) -> PhiResult:
    """Expected rank-2 signature of the rank-1 conditional signature process.

    The first pass caches ``u`` at each node.  The second pass carries the
    branch signature ``s`` downwards, forms the rank-1 process value
    ``s ⊗ u`` at each node and runs the backward recursion in rank 2.
    """
    start = time.perf_counter()
    alg1 = _rank1_algebra(tree, max_degree)
    alg2 = algebra(2, tree.dim, max_degree)
    exact = tree.exact
    vals = [tree.value_array(i) for i in range(len(tree))]
    u = _backward_values(tree, alg1, exact, vals)

    prefix = {}
    cond = {}
    acc = {}
    result = {}

    def enter(i):
        par = tree.parent[i]
        diff = vals[i] - vals[par] if par >= 0 else vals[i]
        e = exp_generators(alg1, _time_aug(diff, exact))
        prefix[i] = e if par < 0 else product_r(prefix[par], e)
        cond[i] = product_r(prefix[i], u[i])
        acc[i] = zeros(alg2, exact)

    def leave(i):
        v = acc.pop(i)
        if not tree.children[i]:
            v = unit(alg2, exact)
        par = tree.parent[i]
        if par < 0:
            result["root"] = v
        else:
            inc = (cond[i] - cond[par]).coeffs.copy()
            inc[0] = _one(exact)
            acc[par] = acc[par] + tree.prob[i] * product_r(exp_generators(alg2, inc), v)
            del prefix[i], cond[i]

    counters = {}
    _postorder(tree, enter, leave, counters)
    lead = cond[0].coeffs.copy()
    lead[0] = _one(exact)
    value = product_r(exp_generators(alg2, lead), result["root"])
    counters.update(n_nodes=len(tree), n_edges=tree.n_edges)
    return PhiResult(1, max_degree, value, "dp", counters, time.perf_counter() - start)


def estimate_size(tree: FiltrationTree, r: int, max_degree: int) -> int:
    """Coefficient count of the algebra holding ``Phi_r``."""
    return total_dim(r + 1, tree.dim, max_degree)


def check_budget(tree, r, max_degree, budget=DEFAULT_BUDGET):
    size = estimate_size(tree, r, max_degree)
    if size > budget:
        raise ResourceError(
            f"rank-{r + 1} algebra at truncation {max_degree} has {size} coefficients "
            f"(budget {budget})", estimate=size)
    return size


def phi_r(tree: FiltrationTree, r: int, max_degree: int, normalize: bool = False,
          mode: str = "hilbert", method: str = "auto", budget: int = DEFAULT_BUDGET) -> PhiResult:
    """Expected rank-(r+1) signature of the rank-r conditional signature process.

    ``method`` is ``"auto"`` (recursions for r <= 1 without normalization,
    the generic per-rank lift otherwise), ``"dp"`` or ``"generic"``.
    """
    if r < 0:
        raise ConfigurationError(f"rank must be >= 0, got {r}")
    if max_degree < 0:
        raise ConfigurationError(f"truncation must be >= 0, got {max_degree}")
    if method not in ("auto", "dp", "generic"):
        raise ConfigurationError(f"unknown method {method!r}")
    check_budget(tree, r, max_degree, budget)
    use_dp = method == "dp" or (method == "auto" and r <= 1 and not normalize)
    if use_dp:
        if r > 1 or normalize:
            raise ConfigurationError("recursions are only available for r <= 1 without normalization")
        return expsig0_dp(tree, max_degree) if r == 0 else expsig1_dp(tree, max_degree)
    start = time.perf_counter()
    proc = conditional_signature_process(tree, r + 1, max_degree, normalize, mode)
    return PhiResult(r, max_degree, proc[0], "generic_recursion",
                     {"n_nodes": len(tree)}, time.perf_counter() - start)


def brute_force_phi(tree: FiltrationTree, r: int, max_degree: int, normalize: bool = False,
                    mode: str = "hilbert", leaf_cap: int = DEFAULT_LEAF_CAP) -> PhiResult:
    """Reference value of ``Phi_r`` by explicit averaging over leaves.

    For each rank, the value at an atom is the conditional average, over the
    leaves below it, of the signature of the whole branch computed from
    scratch.  No backward recursion or prefix sharing is used.
    """
    if len(tree.leaves) > leaf_cap:
        raise ResourceError(f"{len(tree.leaves)} leaves exceed the cap of {leaf_cap}",
                            estimate=len(tree.leaves))
    start = time.perf_counter()
    branches = {leaf: tree.branch(leaf) for leaf in tree.leaves}
    probs = {leaf: tree.path_prob(leaf) for leaf in tree.leaves}
    below = {i: [] for i in range(len(tree))}
    for leaf, br in branches.items():
        for i in br:
            below[i].append(leaf)

    def branch_sig(path):
        if isinstance(path[0], Tensor):
            s = signature_rank_r(path)
        else:
            s = signature(np.array(path), max_degree)
        return robust_normalize(s, sup_norm(path), mode) if normalize else s

    values = [tree.value_array(i) for i in range(len(tree))]
    for _ in range(r + 1):
        sigs = {leaf: branch_sig([values[i] for i in br]) for leaf, br in branches.items()}
        new = []
        for i in range(len(tree)):
            mass = sum(probs[leaf] for leaf in below[i])
            acc = None
            for leaf in below[i]:
                term = (probs[leaf] / mass) * sigs[leaf]
                acc = term if acc is None else acc + term
            new.append(acc)
        values = new
    return PhiResult(r, max_degree, values[0], "brute_force",
                     {"n_leaves": len(tree.leaves)}, time.perf_counter() - start)


def complexity_probe(tree: FiltrationTree, max_degree: int = 1) -> dict:
    """Traversal counters of the rank-0 recursion."""
    res = expsig0_dp(tree, max_degree)
    return {"visits": res.counters["visits"], "peak_depth": res.counters["peak_depth"],
            "n_nodes": len(tree), "n_edges": tree.n_edges, "depth": tree.time_horizon}
