"""Command-line interface: ``hsig phi | dist | dims | experiment | fixtures``.

Exit codes: 0 success, 2 unreadable input or bad arguments, 3 invalid tree
or parameters, 4 size budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import fixtures
from .dp import DEFAULT_BUDGET, brute_force_phi, phi_r
from .errors import ConfigurationError, ResourceError, ValidationError
from .experiment import ExperimentConfig, run_experiment
from .graded import basis_enumerate, dim_graded
from .metrics import d_r
from .process import FiltrationTree, save_tree, validate

EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_RESOURCE = 4


class ParseError(Exception):
    pass


def _load(path) -> FiltrationTree:
    try:
        with open(path) as fh:
            data = json.load(fh)
        tree = FiltrationTree.from_dict(data, check=False)
    except (OSError, json.JSONDecodeError, ConfigurationError) as exc:
        raise ParseError(f"{path}: {exc}") from exc
    return validate(tree)


def _emit(obj, out):
    out.write(json.dumps(obj, indent=1) + "\n")


def cmd_phi(args, out):
    tree = _load(args.input)
    res = phi_r(tree, args.rank, args.trunc, normalize=args.normalize, mode=args.mode,
                budget=args.budget)
    doc = res.to_dict()
    doc["n_coefficients"] = res.value.algebra.size
    if args.oracle:
        ref = brute_force_phi(tree, args.rank, args.trunc, normalize=args.normalize, mode=args.mode)
        dev = np.abs(res.value.to_float().coeffs - ref.value.to_float().coeffs)
        doc["oracle"] = {"max_deviation": float(dev.max()), "elapsed_seconds": ref.elapsed}
    _emit(doc, out)


def cmd_dist(args, out):
    a, b = _load(args.a), _load(args.b)
    rep = d_r(a, b, args.rank, args.trunc, normalize=args.normalize, mode=args.mode,
              budget=args.budget)
    _emit(rep.to_dict(), out)


def cmd_dims(args, out):
    if args.max_degree < 0 or args.rank < 1 or args.dim < 1:
        raise ConfigurationError("rank and dim must be >= 1 and max degree >= 0")
    counts = [dim_graded(args.rank, args.dim, k) for k in range(args.max_degree + 1)]
    if args.check:
        words = basis_enumerate(args.rank, args.dim, args.max_degree)
        from .graded import algebra
        enumerated = algebra(args.rank, args.dim, args.max_degree).degree_counts
        if list(enumerated) != counts or len(words) != sum(counts):
            raise ConfigurationError(f"count mismatch: formula {counts}, enumeration {enumerated}")
    out.write("degree\tcount\tcumulative\n")
    total = 0
    for k, c in enumerate(counts):
        total += c
        out.write(f"{k}\t{c}\t{total}\n")


def _m_values(text):
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def cmd_experiment(args, out):
    cfg = ExperimentConfig(epsilon=args.epsilon, n_samples=args.n_samples, n_train=args.n_train,
                           n_test=args.n_test, trunc_phi0=args.trunc_phi0,
                           trunc_phi1=args.trunc_phi1, m_values=args.m_values, reg=args.reg,
                           epochs=args.epochs, seed=args.seed)
    res = run_experiment(cfg)
    text = res.to_csv()
    if args.output:
        Path(args.output).write_text(text)
    else:
        out.write(text)


def cmd_fixtures(args, out):
    outdir = Path(args.out_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    if args.name == "appendix-a":
        x, y = fixtures.counterexample_pair()
        files = {"appendix-a-x.json": x, "appendix-a-y.json": y}
    else:
        left, right = fixtures.two_step_pair(args.n)
        files = {f"figure-1-left-n{args.n}.json": left, f"figure-1-right-n{args.n}.json": right}
    for name, tree in files.items():
        save_tree(tree, outdir / name)
        out.write(f"{outdir / name}\n")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hsig", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def tree_opts(sp):
        sp.add_argument("--rank", type=int, required=True, help="rank r of Phi_r")
        sp.add_argument("--trunc", type=int, required=True, help="total truncation degree")
        sp.add_argument("--normalize", action="store_true", help="robust normalization of signatures")
        sp.add_argument("--mode", choices=["hilbert", "level_l1"], default="hilbert")
        sp.add_argument("--budget", type=int, default=DEFAULT_BUDGET,
                        help="maximum number of coefficients (default %(default)s)")

    sp = sub.add_parser("phi", help="expected higher-rank signature of a tree")
    sp.add_argument("--input", required=True)
    tree_opts(sp)
    sp.add_argument("--oracle", action="store_true", help="also run the brute-force reference")
    sp.set_defaults(func=cmd_phi)

    sp = sub.add_parser("dist", help="distance between two trees")
    sp.add_argument("--a", required=True)
    sp.add_argument("--b", required=True)
    tree_opts(sp)
    sp.set_defaults(func=cmd_dist)

    sp = sub.add_parser("dims", help="basis sizes per degree")
    sp.add_argument("--rank", type=int, required=True)
    sp.add_argument("--dim", type=int, required=True)
    sp.add_argument("--max-degree", type=int, required=True)
    sp.add_argument("--check", action="store_true", help="cross-check against basis enumeration")
    sp.set_defaults(func=cmd_dims)

    sp = sub.add_parser("experiment", help="classification experiment, CSV output")
    d = ExperimentConfig()
    sp.add_argument("--epsilon", type=float, default=d.epsilon)
    sp.add_argument("--n-samples", type=int, default=d.n_samples)
    sp.add_argument("--n-train", type=int, default=d.n_train)
    sp.add_argument("--n-test", type=int, default=d.n_test)
    sp.add_argument("--trunc-phi0", type=int, default=d.trunc_phi0)
    sp.add_argument("--trunc-phi1", type=int, default=d.trunc_phi1)
    sp.add_argument("--m-values", type=_m_values, default=d.m_values)
    sp.add_argument("--reg", type=float, default=d.reg)
    sp.add_argument("--epochs", type=int, default=d.epochs)
    sp.add_argument("--seed", type=int, default=d.seed)
    sp.add_argument("--output", help="CSV file (default: stdout)")
    sp.set_defaults(func=cmd_experiment)

    sp = sub.add_parser("fixtures", help="write example trees as JSON")
    sp.add_argument("name", choices=["appendix-a", "figure-1"])
    sp.add_argument("--n", type=int, default=4, help="gap parameter for figure-1")
    sp.add_argument("--out-dir", default=".")
    sp.set_defaults(func=cmd_fixtures)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        args.func(args, out)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ValidationError as exc:
        for msg in exc.diagnostics:
            print(f"invalid: {msg}", file=sys.stderr)
        return EXIT_VALIDATION
    except ConfigurationError as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ResourceError as exc:
        print(f"resource: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    return 0


if __name__ == "__main__":
    sys.exit(main())
