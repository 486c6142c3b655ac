"""Finite adapted processes represented as filtration trees.

A tree of depth ``T`` encodes a filtered probability space with finitely many
atoms: the nodes at depth ``t`` are the atoms of ``F_t``, each node stores the
transition probability from its parent and the value of ``X_t`` on that atom.
Nodes are numbered in depth-first preorder, so leaves appear left to right.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import ConfigurationError, ValidationError


@dataclass
class Atom:
    """Mutable node used to describe a tree before it is frozen."""

    value: list
    prob: object = 1
    children: list = field(default_factory=list)


def _parse_scalar(x, exact):
    if exact or isinstance(x, str):
        x = Fraction(x)
    return x if exact else float(x)


class FiltrationTree:
    """Immutable flattened filtration tree.

    Attributes are parallel tuples indexed by node id: ``parent`` (-1 at the
    root), ``depth``, ``prob`` (transition probability from the parent),
    ``values`` (length-d tuples) and ``children``.
    """

    def __init__(self, root: Atom, time_horizon: int, dim: int, exact: bool | None = None):
        self.time_horizon = int(time_horizon)
        self.dim = int(dim)
        if exact is None:
            exact = _uses_strings(root)
        self.exact = bool(exact)

        parent, depth, prob, values, children = [], [], [], [], []
        stack = [(root, -1, 0)]
        while stack:
            atom, par, dep = stack.pop()
            i = len(parent)
            parent.append(par)
            depth.append(dep)
            p = _parse_scalar(1 if par < 0 and atom.prob is None else atom.prob, self.exact)
            prob.append(p)
            values.append(tuple(_parse_scalar(v, self.exact) for v in np.atleast_1d(atom.value).tolist()))
            children.append([])
            if par >= 0:
                children[par].append(i)
            for child in reversed(atom.children):
                stack.append((child, i, dep + 1))
        self.parent = tuple(parent)
        self.depth = tuple(depth)
        self.prob = tuple(prob)
        self.values = tuple(values)
        self.children = tuple(tuple(c) for c in children)
        self.leaves = tuple(i for i, c in enumerate(self.children) if not c)

    def __len__(self):
        return len(self.parent)

    @property
    def n_nodes(self) -> int:
        return len(self.parent)

    @property
    def n_edges(self) -> int:
        return len(self.parent) - 1

    def nodes_at(self, t: int) -> list[int]:
        return [i for i, k in enumerate(self.depth) if k == t]

    def branch(self, node: int) -> list[int]:
        """Node ids from the root down to ``node``."""
        out = []
        while node >= 0:
            out.append(node)
            node = self.parent[node]
        return out[::-1]

    def path_prob(self, node: int):
        p = 1
        for i in self.branch(node)[1:]:
            p = p * self.prob[i]
        return p

    def value_array(self, node: int) -> np.ndarray:
        return np.array(self.values[node], dtype=object if self.exact else np.float64)

    def to_atom(self, node: int = 0) -> Atom:
        return Atom(list(self.values[node]), self.prob[node],
                    [self.to_atom(c) for c in self.children[node]])

    def to_float(self) -> "FiltrationTree":
        """Copy of the tree in floating-point mode."""
        return FiltrationTree(self.to_atom(), self.time_horizon, self.dim, exact=False)

    def to_dict(self) -> dict:
        def enc(x):
            if isinstance(x, Fraction):
                return str(x) if x.denominator != 1 else int(x.numerator)
            return x

        def node(i):
            out = {"prob": enc(self.prob[i]), "value": [enc(v) for v in self.values[i]],
                   "children": [node(c) for c in self.children[i]]}
            if self.exact and isinstance(out["prob"], int):
                out["prob"] = str(out["prob"])
            return out

        return {"time_horizon": self.time_horizon, "dim": self.dim, "root": node(0)}

    @classmethod
    def from_dict(cls, data: dict, check: bool = True) -> "FiltrationTree":
        try:
            T = int(data["time_horizon"])
            d = int(data["dim"])
            root = _atom_from_dict(data["root"], is_root=True)
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise ConfigurationError(f"malformed tree description: {exc}") from exc
        tree = cls(root, T, d)
        return validate(tree) if check else tree


def _atom_from_dict(node: dict, is_root=False) -> Atom:
    prob = node.get("prob", 1 if is_root else None)
    if prob is None:
        raise KeyError("prob")
    return Atom(list(node["value"]), prob, [_atom_from_dict(c) for c in node.get("children", [])])


def _uses_strings(root: Atom) -> bool:
    stack = [root]
    while stack:
        a = stack.pop()
        if isinstance(a.prob, str) or any(isinstance(v, str) for v in np.atleast_1d(a.value).tolist()):
            return True
        stack.extend(a.children)
    return False


def load_tree(path, check: bool = True) -> FiltrationTree:
    with open(path) as fh:
        data = json.load(fh)
    return FiltrationTree.from_dict(data, check=check)


def save_tree(tree: FiltrationTree, path) -> None:
    Path(path).write_text(json.dumps(tree.to_dict(), indent=1) + "\n")


def diagnose(tree: FiltrationTree) -> list[str]:
    """List every violated invariant; empty when the tree is valid."""
    problems = []
    if tree.prob[0] != 1:
        problems.append(f"root probability is {tree.prob[0]}, expected 1")
    tol = 0 if tree.exact else 1e-12
    for i, kids in enumerate(tree.children):
        vals = tree.values[i]
        if len(vals) != tree.dim:
            problems.append(f"node {i}: value has length {len(vals)}, expected dim {tree.dim}")
        if any(not isinstance(v, Fraction) and not math.isfinite(v) for v in vals):
            problems.append(f"node {i}: non-finite value {list(vals)}")
        if kids:
            probs = [tree.prob[c] for c in kids]
            if any(not isinstance(p, Fraction) and not math.isfinite(p) for p in probs):
                problems.append(f"node {i}: non-finite transition probability")
                continue
            if any(p < 0 for p in probs):
                problems.append(f"node {i}: negative transition probability")
            s = sum(probs)
            if abs(s - 1) > tol:
                problems.append(f"node {i}: children probabilities row sum {s} != 1")
        if tree.depth[i] > tree.time_horizon:
            problems.append(f"node {i}: depth {tree.depth[i]} exceeds time horizon {tree.time_horizon}")
        elif not kids and tree.depth[i] != tree.time_horizon:
            problems.append(
                f"node {i}: ragged depth, leaf at depth {tree.depth[i]} but time horizon is {tree.time_horizon}")
    return problems


def prune(tree: FiltrationTree) -> FiltrationTree:
    """Drop subtrees reached with probability zero."""
    if not any(tree.prob[i] == 0 for i in range(1, len(tree))):
        return tree

    def rebuild(i):
        return Atom(list(tree.values[i]), tree.prob[i],
                    [rebuild(c) for c in tree.children[i] if tree.prob[c] != 0])

    return FiltrationTree(rebuild(0), tree.time_horizon, tree.dim, exact=tree.exact)


def validate(tree: FiltrationTree) -> FiltrationTree:
    """Check invariants and return the tree with zero-probability branches pruned.

    Raises :class:`ValidationError` carrying the list of diagnostics.
    """
    pruned = prune(tree)
    problems = diagnose(pruned)
    if problems:
        raise ValidationError(problems)
    return pruned


def cond_exp(tree: FiltrationTree, leaf_values: dict, t: int) -> dict:
    """Conditional expectation of a leaf function given ``F_t``.

    Returns ``{node: value}`` for the nodes at depth ``t``.
    """
    if not 0 <= t <= tree.time_horizon:
        raise ConfigurationError(f"time {t} outside 0..{tree.time_horizon}")
    acc = dict(leaf_values)
    for i in reversed(range(len(tree))):
        if tree.children[i] and tree.depth[i] >= t:
            acc[i] = sum(tree.prob[c] * acc[c] for c in tree.children[i])
    return {i: acc[i] for i in tree.nodes_at(t)}


def ancestor_at(tree: FiltrationTree, node: int, t: int) -> int:
    while tree.depth[node] > t:
        node = tree.parent[node]
    return node


def enumerate_paths(tree: FiltrationTree) -> list[tuple]:
    """``(probability, path)`` per leaf; ``path`` has shape ``(T+1, d)``."""
    out = []
    dtype = object if tree.exact else np.float64
    for leaf in tree.leaves:
        br = tree.branch(leaf)
        path = np.array([tree.values[i] for i in br], dtype=dtype)
        out.append((tree.path_prob(leaf), path))
    return out


# -- adapted functionals ---------------------------------------------------

def _affine(args, params):
    *weights, bias = params
    if len(weights) != len(args):
        raise ConfigurationError("affine needs one weight per argument plus a bias")
    return sum(w * a for w, a in zip(weights, args)) + bias


def _single(fn):
    def wrapped(args, params):
        if len(args) != 1:
            raise ConfigurationError("function takes exactly one argument")
        return fn(args[0], *params)
    return wrapped


def _product(args, params):
    out = 1
    for a in args:
        out = out * a
    return out


CATALOGUE = {
    "identity": _single(lambda x: x),
    "power": _single(lambda x, p: x ** int(p)),
    "clamp": _single(lambda x, lo, hi: min(max(x, lo), hi)),
    "product": _product,
    "sum": lambda args, params: sum(args),
    "affine": _affine,
    "min": lambda args, params: min(args),
    "max": lambda args, params: max(args),
    "constant": lambda args, params: params[0],
}


class AdaptedFunctional:
    """Base class of adapted functional expression nodes."""

    rank: int

    def max_time(self) -> int:
        raise NotImplementedError


def _lookup(fn: str):
    try:
        return CATALOGUE[fn]
    except KeyError:
        raise ConfigurationError(f"unknown built-in function {fn!r}") from None


@dataclass(frozen=True)
class CoordEval(AdaptedFunctional):
    """``f(X_{t_1}, ..., X_{t_n})``; arguments are the concatenated coordinates."""

    times: tuple
    fn: str = "identity"
    params: tuple = ()

    def __post_init__(self):
        _lookup(self.fn)

    @property
    def rank(self) -> int:
        return 0

    def max_time(self) -> int:
        return max(self.times, default=0)


@dataclass(frozen=True)
class Compose(AdaptedFunctional):
    fn: str
    children: tuple
    params: tuple = ()

    def __post_init__(self):
        _lookup(self.fn)

    @property
    def rank(self) -> int:
        return max((c.rank for c in self.children), default=0)

    def max_time(self) -> int:
        return max((c.max_time() for c in self.children), default=0)


@dataclass(frozen=True)
class CondExp(AdaptedFunctional):
    child: AdaptedFunctional
    time: int

    @property
    def rank(self) -> int:
        return self.child.rank + 1

    def max_time(self) -> int:
        return max(self.time, self.child.max_time())


def _eval_leaves(tree: FiltrationTree, af: AdaptedFunctional) -> dict:
    if isinstance(af, CoordEval):
        fn = _lookup(af.fn)
        out = {}
        for leaf in tree.leaves:
            br = tree.branch(leaf)
            args = [v for t in af.times for v in tree.values[br[t]]]
            out[leaf] = fn(args, af.params)
        return out
    if isinstance(af, Compose):
        fn = _lookup(af.fn)
        parts = [_eval_leaves(tree, c) for c in af.children]
        return {leaf: fn([p[leaf] for p in parts], af.params) for leaf in tree.leaves}
    if isinstance(af, CondExp):
        inner = _eval_leaves(tree, af.child)
        at_t = cond_exp(tree, inner, af.time)
        return {leaf: at_t[ancestor_at(tree, leaf, af.time)] for leaf in tree.leaves}
    raise ConfigurationError(f"not an adapted functional: {af!r}")


def eval_adapted_functional(tree: FiltrationTree, af: AdaptedFunctional):
    """Evaluate ``af`` on every leaf and return ``(leaf_values, expectation)``.

    Arithmetic is exact when the tree is in rational mode and the functional
    uses rational parameters.
    """
    if af.max_time() > tree.time_horizon:
        raise ConfigurationError(
            f"functional references time {af.max_time()} beyond horizon {tree.time_horizon}")
    values = _eval_leaves(tree, af)
    expectation = sum(tree.path_prob(leaf) * values[leaf] for leaf in tree.leaves)
    return values, expectation
