"""Command-line interface.

Results go to stdout, diagnostics to stderr.  Exit status is 0 on success,
1 on usage errors and 2 when a computation fails (cap exceeded, ramified
prime, splitting failure).
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import chebotarev, closure, fqpoly, nottingham, selfsim, tree_core, zzpoly
from .intfactor import DEFAULT_EFFORT, FactorizationIncomplete

log = logging.getLogger("arboreal")

EXIT_OK, EXIT_USAGE, EXIT_FAILURE = 0, 1, 2


class UsageError(Exception):
    pass


class ComputationError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _write(args, text: str) -> None:
    out = getattr(args, "out", None)
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _group_generators(spec: str):
    """Map a --group value to a function depth -> generator list."""
    if spec == "wn":
        return tree_core.standard_wn_generators
    if spec in selfsim.BUILTINS:
        return selfsim.builtin(spec).generators
    if spec.startswith("file:"):
        path = Path(spec[5:])
        try:
            text = path.read_text()
        except OSError as exc:
            raise UsageError(f"cannot read {path}: {exc}") from None
        lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
        if lines and all(ln.startswith("n=") for ln in lines):
            gens = [tree_core.TreeAutomorphism.from_string(ln) for ln in lines]

            def fixed(n, gens=gens):
                depth = gens[0].depth
                if n > depth:
                    raise UsageError(f"{path} holds depth-{depth} portraits; cannot lift to depth {n}")
                return [tree_core.restrict(g, n) for g in gens]

            return fixed
        try:
            return selfsim.Automaton.parse(text).generators
        except selfsim.AutomatonError as exc:
            raise UsageError(f"{path}: {exc}") from None
    raise UsageError(f"unknown group {spec!r}: use grigorchuk, odometer, wn or file:PATH")


def cmd_wn(args):
    print(tree_core.wn_order(args.n))


def cmd_close(args):
    gens = _group_generators(args.group)(args.depth)
    result = closure.close(gens, args.cap, with_census=args.census)
    if result.truncated:
        raise ComputationError(
            f"cap {args.cap} exceeded at depth {args.depth}: order >= {result.order} (lower bound only)"
        )
    if args.census:
        _write(args, closure.census_to_csv(result.census))
        print(f"order {result.order}", file=sys.stderr)
    else:
        _write(args, f"{result.order}\n")


def cmd_hausdorff(args):
    seq = closure.hausdorff_sequence(_group_generators(args.group), args.max_depth, args.cap)
    _write(args, seq.to_csv())
    if not seq.complete:
        print(f"cap {args.cap} exceeded; sequence stops at depth {len(seq.entries)}", file=sys.stderr)


def cmd_iterate(args):
    print(zzpoly.to_string(zzpoly.iterate(args.c, args.n)))


def cmd_disc(args):
    print(zzpoly.discriminant(zzpoly.iterate(args.c, args.n)))


def cmd_orbit(args):
    crit = zzpoly.critical_orbit(args.c, args.n)
    adj = zzpoly.adjusted_orbit(args.c, args.n)
    lines = ["k,critical,adjusted"] + [f"{k},{t},{b}" for k, (t, b) in enumerate(zip(crit, adj), start=1)]
    print("\n".join(lines))


def cmd_cert(args):
    cert = zzpoly.surjectivity_certificate(args.c, args.n, args.effort, seed=args.seed)
    for lv in cert.levels:
        if lv.verdict != "holds":
            print(f"level {lv.k}: inconclusive ({lv.reason})", file=sys.stderr)
    _write(args, cert.to_json() + "\n")


def cmd_frobenius(args):
    print(fqpoly.frobenius_signature(args.c, args.n, args.q, args.seed))


def cmd_sweep(args):
    cfg = chebotarev.SweepConfig(args.c, args.n, args.pmin, args.pmax, args.seed, args.jobs)
    report = chebotarev.sweep(cfg)
    _write(args, report.to_json())
    if report.skipped:
        print(f"skipped {len(report.skipped)} primes", file=sys.stderr)


def cmd_compare(args):
    try:
        report = chebotarev.load_report(args.report)
    except OSError as exc:
        raise UsageError(f"cannot read {args.report}: {exc}") from None
    if report.n != args.depth:
        raise UsageError(f"report has depth {report.n}, --depth is {args.depth}")
    counts = closure.census(_group_generators(args.group)(args.depth), args.cap)
    cmp = chebotarev.compare(report, counts)
    _write(args, cmp.to_csv())
    if cmp.foreign:
        print(f"foreign signatures: {' '.join(cmp.foreign)}", file=sys.stderr)


def _nott(p, prec, coeffs):
    try:
        values = tuple(int(x) for x in coeffs.split(",")) if coeffs else ()
    except ValueError:
        raise UsageError(f"bad coefficient list {coeffs!r}") from None
    return nottingham.NottinghamElement(p, prec, values)


def cmd_nottingham(args):
    u = _nott(args.p, args.prec, args.u)
    op = args.op
    if op == "compose":
        if args.v is None:
            raise UsageError("compose needs --v")
        print(nottingham.n_compose(u, _nott(args.p, args.prec, args.v)))
    elif op == "invert":
        print(nottingham.n_invert(u))
    elif op == "order":
        print(nottingham.n_order(u))
    else:
        d = nottingham.n_depth(u)
        print("inf" if d == nottingham.IDENTITY_DEPTH else d)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    common.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")

    parser = _Parser(prog="arboreal", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_):
        p = sub.add_parser(name, parents=[common], help=help_, description=help_)
        p.set_defaults(func=func)
        return p

    p = add("wn", cmd_wn, "order of W_n = 2^(2^n - 1)")
    p.add_argument("--n", type=int, required=True)

    p = add("close", cmd_close, "order or signature census of a group image G_n")
    p.add_argument("--group", required=True, help="grigorchuk, odometer, wn or file:PATH")
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--cap", type=int, default=closure.DEFAULT_CAP)
    p.add_argument("--census", action="store_true", help="print signature,count CSV")
    p.add_argument("--out")

    p = add("hausdorff", cmd_hausdorff, "CSV of log2|G_n| / log2|W_n| for n = 1..max-depth")
    p.add_argument("--group", required=True)
    p.add_argument("--max-depth", type=int, required=True)
    p.add_argument("--cap", type=int, default=closure.DEFAULT_CAP)
    p.add_argument("--out")

    for name, func, help_ in (
        ("iterate", cmd_iterate, "n-th iterate of x^2 + c"),
        ("disc", cmd_disc, "discriminant of the n-th iterate of x^2 + c"),
        ("orbit", cmd_orbit, "critical and adjusted orbits of x^2 + c"),
    ):
        p = add(name, func, help_)
        p.add_argument("--c", type=int, required=True)
        p.add_argument("--n", type=int, required=True)

    p = add("cert", cmd_cert, "JSON certificate that Gal(f^k) = W_k (sufficient only)")
    p.add_argument("--c", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--effort", type=int, default=DEFAULT_EFFORT)
    p.add_argument("--out")

    p = add("frobenius", cmd_frobenius, "Frobenius signature of f^1..f^n at a prime q")
    p.add_argument("--c", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--q", type=int, required=True)

    p = add("sweep", cmd_sweep, "Frobenius signature counts over primes in [pmin, pmax]")
    p.add_argument("--c", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--pmin", type=int, required=True)
    p.add_argument("--pmax", type=int, required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out")

    p = add("compare", cmd_compare, "compare a sweep report with a group census (CSV)")
    p.add_argument("--report", required=True)
    p.add_argument("--group", required=True)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--cap", type=int, default=closure.DEFAULT_CAP)
    p.add_argument("--out")

    p = add("nottingham", cmd_nottingham, "truncated Nottingham group arithmetic")
    p.add_argument("op", choices=["compose", "invert", "order", "depth"])
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--prec", type=int, required=True, help="precision N (work mod T^(N+1))")
    p.add_argument("--u", required=True, help="comma-separated a_2..a_N")
    p.add_argument("--v")
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, stream=sys.stderr)
    log.debug("arboreal %s", " ".join(sys.argv[1:] if argv is None else argv))
    try:
        args.func(args)
    except (ComputationError, closure.CapExceeded, fqpoly.RamifiedPrime, fqpoly.SplittingFailure,
            FactorizationIncomplete) as exc:
        print(f"arboreal {args.command}: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except (UsageError, ValueError) as exc:
        print(f"arboreal {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


def main() -> None:
    sys.exit(run())
