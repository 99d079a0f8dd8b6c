"""Command-line front end.

Every run prints one flat record, one ``key value`` pair per line, so two
runs can be compared with ``diff``.  Wall-clock time is only included with
``--timing``; without it identical invocations print identical bytes.
"""

from __future__ import annotations

import argparse
import hashlib
import os
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction

from . import bench
from .graph import GraphError, NoCut, VertexWeightedDigraph, WeightedDigraph, as_weight
from .instrument import Counters
from .io import ParseError, format_graph, format_weight, parse_graph
from .local import build_local_ec, build_local_vc
from .oracle import exact_global_ec, exact_global_vc, exact_rooted_ec, exact_rooted_vc
from .rooted import DriverConfig, approx_global_ec, approx_global_vc, approx_rooted_ec, approx_rooted_vc
from .sparsify import SparsifyParams, sparsify_edge, sparsify_vertex

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_NOCUT = 4
EXIT_INTERNAL = 5

SEED_ENV = "DIRCUT_SEED"
ORACLE_MAX_N = 60
VARIANTS = ("ec-rooted", "ec-global", "vc-rooted", "vc-global")
CONSTANT_KEYS = {
    "c_tau": "c_tau",
    "c_delta": "c_delta",
    "c_w": "c_w",
    "c_clamp": "c_clamp",
    "c_local": "c_local",
    "c_big": "c_big",
    "C": "sample_c",
    "k_star": "k_star",
}


@dataclass
class RunRecord:
    """Ordered flat key/value record of one run."""

    fields: dict[str, str] = field(default_factory=dict)

    def add(self, key: str, value) -> None:
        if isinstance(value, (Fraction, int)) and not isinstance(value, bool):
            value = format_weight(value) if isinstance(value, Fraction) else str(value)
        elif isinstance(value, (set, frozenset, list, tuple)):
            value = " ".join(str(x) for x in sorted(value)) or "-"
        self.fields[key] = str(value)

    def render(self) -> str:
        return "".join(f"{k} {v}\n" for k, v in self.fields.items())

    @classmethod
    def parse(cls, text: str) -> RunRecord:
        rec = cls()
        for line in text.splitlines():
            if line:
                k, _, v = line.partition(" ")
                rec.fields[k] = v
        return rec


def digest(g) -> str:
    """SHA-256 of the canonical text form of ``g``."""
    return hashlib.sha256(format_graph(g).encode()).hexdigest()


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(as_weight(Fraction(text)))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _constants(text: str) -> dict:
    out = {}
    for part in filter(None, (p.strip() for p in text.split(","))):
        key, eq, val = part.partition("=")
        if not eq or key not in CONSTANT_KEYS:
            raise argparse.ArgumentTypeError(
                f"bad constant {part!r}; keys: {', '.join(sorted(CONSTANT_KEYS))}"
            )
        out[CONSTANT_KEYS[key]] = float(val) if key == "k_star" else _fraction(val)
    return out


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV, "0")
    try:
        return int(raw)
    except ValueError:
        return 0


def _parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--eps", type=_fraction, default=Fraction(1, 5), help="accuracy (default 0.2)")
    shared.add_argument("--seed", type=int, default=None, help=f"random seed (default ${SEED_ENV} or 0)")
    shared.add_argument("--fail-prob", type=_fraction, default=None, help="target failure probability")
    shared.add_argument("--constants", type=_constants, default={}, help="overrides: c_tau,c_delta,c_w,c_clamp,c_local,c_big,C,k_star")
    shared.add_argument("--with-oracle", action="store_true", help="also compute the exact answer")
    shared.add_argument("--timing", action="store_true", help="include elapsed wall time")
    shared.add_argument("--strict", action="store_true", help="turn internal bound checks into hard failures")

    p = argparse.ArgumentParser(prog="dircut", description="Approximate minimum cuts in directed graphs.")
    sub = p.add_subparsers(dest="command", required=True)
    for name in VARIANTS:
        sp = sub.add_parser(name, parents=[shared], help=f"approximate {name} cut")
        sp.add_argument("graph", help="graph file, or - for stdin")
        if name.endswith("rooted"):
            sp.add_argument("--root", type=int, required=True)
    sp = sub.add_parser("exact", parents=[shared], help="exact cut via max-flow")
    sp.add_argument("variant", choices=VARIANTS)
    sp.add_argument("graph")
    sp.add_argument("--root", type=int, default=None)
    sp = sub.add_parser("sparsify", parents=[shared], help="print a sparsified graph and its scale")
    sp.add_argument("graph")
    sp.add_argument("--root", type=int, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--lambda", dest="lam", type=_fraction, required=True)
    sp = sub.add_parser("local-query", parents=[shared], help="one local small-sink query")
    sp.add_argument("graph")
    sp.add_argument("--root", type=int, required=True)
    sp.add_argument("--t", type=int, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--lambda", dest="lam", type=_fraction, required=True)
    sp = sub.add_parser("bench", parents=[shared], help="scaling harness")
    sp.add_argument("--family", choices=bench.FAMILIES, default="planted")
    sp.add_argument("--sizes", default="64,128,256")
    sp.add_argument("--trials", type=int, default=1)
    return p


def _read(path: str):
    text = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
    return parse_graph(text)


def _config(args) -> DriverConfig:
    return DriverConfig(eps=args.eps, seed=args.seed, fail_prob=args.fail_prob, strict=args.strict, **args.constants)


def _params(args, g, lam, k) -> SparsifyParams:
    keys = ("c_tau", "c_delta", "c_w", "c_clamp")
    extra = {key: args.constants[key] for key in keys if key in args.constants}
    return SparsifyParams(eps=args.eps, lambda_guess=lam, k_guess=k, rng_seed=args.seed, **extra)


def _need(g, kind, command):
    want = WeightedDigraph if kind == "edge" else VertexWeightedDigraph
    if not isinstance(g, want):
        raise GraphError(f"{command} needs a {kind}-weighted graph")


def _cut_fields(rec: RunRecord, cut) -> None:
    rec.add("weight", cut.weight)
    rec.add("root", cut.root)
    rec.add("sink_size", len(cut.sink_component))
    rec.add("sink", cut.sink_component)
    rec.add("cut_size", len(cut.cut_elements))
    rec.add("cut", cut.cut_elements)


def _exact(variant: str, g, root):
    if variant == "ec-rooted":
        return exact_rooted_ec(g, root)
    if variant == "ec-global":
        return exact_global_ec(g)
    if variant == "vc-rooted":
        return exact_rooted_vc(g, root)
    return exact_global_vc(g)


def _approx(variant: str, g, root, cfg, counters):
    if variant == "ec-rooted":
        return approx_rooted_ec(g, root, cfg, counters)
    if variant == "ec-global":
        return approx_global_ec(g, cfg, counters)
    if variant == "vc-rooted":
        return approx_rooted_vc(g, root, cfg, counters)
    return approx_global_vc(g, cfg, counters)


def _counters(rec: RunRecord, counters: Counters) -> None:
    for key in sorted(counters):
        rec.add(f"counter.{key}", counters[key])


def _run(args, rec: RunRecord) -> str | None:
    """Fill ``rec``; return raw text instead for subcommands that print a graph."""
    cmd = args.command
    if cmd == "bench":
        sizes = [int(x) for x in args.sizes.split(",") if x]
        summary = bench.run_bench(args.family, sizes, args.eps, args.trials, args.seed, _config(args))
        rec.add("family", args.family)
        for r in summary.rows:
            pre = f"bench.n{r.n}.t{r.trial}"
            rec.add(f"{pre}.m", r.m)
            rec.add(f"{pre}.traversals", r.traversals)
            rec.add(f"{pre}.flow_calls", r.flow_calls)
            rec.add(f"{pre}.local_queries", r.local_queries)
            rec.add(f"{pre}.weight", r.weight)
            if args.timing:
                rec.add(f"{pre}.seconds", f"{r.seconds:.3f}")
        rec.add("exponent", f"{summary.exponent:.3f}")
        return
    g = _read(args.graph)
    rec.add("input_digest", digest(g))
    rec.add("n", g.n)
    rec.add("m", g.m)
    if cmd == "exact":
        kind = "edge" if args.variant.startswith("ec") else "vertex"
        _need(g, kind, args.variant)
        if args.variant.endswith("rooted") and args.root is None:
            raise GraphError("--root is required for rooted variants")
        rec.add("variant", args.variant)
        _cut_fields(rec, _exact(args.variant, g, args.root))
        return
    if cmd == "sparsify":
        p = _params(args, g, args.lam, args.k)
        sg = sparsify_edge(g, args.root, p) if isinstance(g, WeightedDigraph) else sparsify_vertex(g, args.root, p)
        return format_graph(sg.graph) + f"tau {sg.tau.numerator}/{sg.tau.denominator}\n"
    if cmd == "local-query":
        p = _params(args, g, args.lam, args.k)
        build = build_local_ec if isinstance(g, WeightedDigraph) else build_local_vc
        s = build(g, args.root, p, strict=args.strict)
        ans = s.query(args.t)
        rec.add("verdict", ans.verdict)
        if ans.above:
            rec.add("reason", ans.reason)
        else:
            rec.add("weight", ans.weight)
            rec.add("sparse_weight", ans.sparse_weight)
            rec.add("sink", ans.sink_component)
        rec.add("flow_units", ans.flow_units)
        return
    kind = "edge" if cmd.startswith("ec") else "vertex"
    _need(g, kind, cmd)
    root = getattr(args, "root", None)
    cfg = _config(args)
    counters = Counters()
    report = _approx(cmd, g, root, cfg, counters)
    _cut_fields(rec, report.best)
    rec.add("candidates", report.candidates_examined)
    rec.add("guesses", len(report.guesses))
    rec.add("branches", " ".join(sorted({gr.branch for gr in report.guesses})) or "-")
    _counters(rec, counters)
    if args.with_oracle and g.n > ORACLE_MAX_N:
        rec.add("oracle_check", f"skipped (n > {ORACLE_MAX_N})")
    elif args.with_oracle:
        exact = _exact(cmd, g, root).weight
        rec.add("oracle_weight", exact)
        ok = exact <= report.best.weight <= (1 + args.eps) * exact
        rec.add("oracle_check", "pass" if ok else "fail")


def main(argv=None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and EXIT_USAGE
    if args.seed is None:
        args.seed = _default_seed()
    rec = RunRecord()
    rec.add("command", args.command if args.command != "exact" else f"exact {args.variant}")
    rec.add("seed", args.seed)
    rec.add("eps", args.eps)
    t0 = time.perf_counter()
    try:
        raw = _run(args, rec)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except NoCut as exc:
        rec.add("result", "nocut")
        rec.add("reason", str(exc))
        sys.stdout.write(rec.render())
        return EXIT_NOCUT
    except (GraphError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except AssertionError as exc:
        print(f"internal check failed: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    if raw is not None:
        sys.stdout.write(raw)
        return EXIT_OK
    if args.timing:
        rec.add("elapsed", f"{time.perf_counter() - t0:.3f}")
    sys.stdout.write(rec.render())
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
