"""Command-line front end.

Exit codes: 0 success, 1 verification mismatch, 2 usage or input error,
3 internal limit exceeded.
"""

import argparse
import sys

from .certificate import CertificateError, deserialize, evaluate, metrics, serialize
from .flow import (BlowUp, FlowError, FlowLimitExceeded, FlowRequest, Inconclusive,
                   Nilpotent, NotNilpotent, Reached, check_locally_nilpotent, integrate,
                   write_csv)
from .generator import CertStore, NodeLimitExceeded
from .parse import ParseError, format_field, parse_field
from .vectorfield import VectorField, lie_bracket, standard_generators

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_LIMIT = 0, 1, 2, 3


class UsageError(Exception):
    pass


def resolve_field(text, n):
    """Parse a field, with ``U`` and ``V`` naming the standard generators."""
    name = text.strip()
    if name in ("U", "V"):
        U, V = standard_generators(n)
        return U if name == "U" else V
    return parse_field(text, n)


def _complex(s):
    try:
        return complex(s.replace(" ", ""))
    except ValueError:
        raise UsageError(f"bad start coordinate {s!r}") from None


def cmd_bracket(args):
    X = resolve_field(args.left, args.n)
    Y = resolve_field(args.right, args.n)
    print(format_field(lie_bracket(X, Y)))
    return EXIT_OK


def cmd_generate(args):
    target = resolve_field(args.target, args.n)
    store = CertStore(args.n, max_nodes=args.max_nodes)
    cert = store.generate_field(target)
    data = serialize(cert)
    m = metrics(cert)
    report = f"nodes: {m.node_count}\ndepth: {m.depth}\nmax scalar bits: {m.max_scalar_bits}"
    if args.output:
        with open(args.output, "wb") as fp:
            fp.write(data + b"\n")
        print(report)
    else:
        sys.stdout.write(data.decode() + "\n")
        print(report, file=sys.stderr)
    return EXIT_OK


def cmd_verify(args):
    target = resolve_field(args.target, args.n)
    try:
        with open(args.cert, "rb") as fp:
            cert = deserialize(fp.read().strip())
    except OSError as e:
        raise UsageError(f"cannot read certificate: {e}") from None
    if cert.n != args.n:
        raise UsageError(f"certificate is for n = {cert.n}, expected {args.n}")
    got = evaluate(cert)
    if got == target:
        print("ok: certificate evaluates to the target")
        return EXIT_OK
    print("MISMATCH", file=sys.stderr)
    print(f"  expected: {format_field(target)}", file=sys.stderr)
    print(f"  got:      {format_field(got)}", file=sys.stderr)
    return EXIT_MISMATCH


def _fmt_state(z):
    return ", ".join(f"{c.real:.12g}" if c.imag == 0 else f"{c.real:.12g}{c.imag:+.12g}j" for c in z)


def cmd_flow(args):
    if (args.field is None) == (args.builtin is None):
        raise UsageError("give exactly one of --field or --builtin")
    field = resolve_field(args.builtin or args.field, args.n)
    start = [_complex(s) for s in args.start.split(",")]
    req = FlowRequest(field, start, args.t_max, theta=args.theta,
                      rel_tol=args.rtol, abs_tol=args.atol,
                      blowup_norm=args.blowup_norm, min_step=args.min_step,
                      detect_blowup=args.detect_blowup, max_steps=args.max_steps)
    res = integrate(req)
    st = res.status
    if isinstance(st, Reached):
        print(f"status: reached t = {st.t:.12g}")
    elif isinstance(st, BlowUp):
        print(f"status: blow-up detected at t = {st.t:.12g} (|z| > {args.blowup_norm:g})")
    else:
        print(f"status: step underflow at t = {st.t:.12g}")
    print(f"steps: {len(res.samples) - 1}")
    print(f"final: t = {res.t_final:.12g}, z = ({_fmt_state(res.final)})")
    if args.csv:
        with open(args.csv, "w", newline="") as fp:
            write_csv(res, fp)
    return EXIT_OK


def cmd_nilpotent(args):
    field = resolve_field(args.field, args.n)
    r = check_locally_nilpotent(field, args.max_iter)
    if isinstance(r, Nilpotent):
        print(f"nilpotent: W^{r.bound} kills every coordinate")
    elif isinstance(r, NotNilpotent):
        print(f"not nilpotent: iterates of z{r.witness} cycle with period {r.period}")
    else:
        assert isinstance(r, Inconclusive)
        print(f"inconclusive after {args.max_iter} iterations")
    return EXIT_OK


def cmd_demo(args):
    n = args.n
    trace = []
    store = CertStore(n, trace=trace)
    U, V = standard_generators(n)
    print(f"n = {n}")
    print(f"U = {format_field(U)}")
    print(f"V = {format_field(V)}")
    store.initialize()
    extra = [(tuple(5 if v == 1 else 0 for v in range(1, n + 1)), 1)]
    if n >= 2:
        extra.append((tuple(4 if v == n else 0 for v in range(1, n + 1)), 1))
        extra.append((tuple(2 if v == 1 else 1 for v in range(1, n + 1)), 1))
    for exps, i in extra:
        store.gen_monomial(exps, i)
    stage = None
    for st, msg in trace:
        if st != stage:
            stage = st
            print(f"\n[{st}]")
        print(f"  {msg}")
    print("\nchain heads (evaluated):")
    for k in sorted(store.heads, reverse=True):
        desc, node, expected = store.heads[k]
        got = store.field(node)
        print(f"  {desc} = {format_field(got)}")
        if got != expected:
            print("  head mismatch", file=sys.stderr)
            return EXIT_MISMATCH
    bad = 0
    for (exps, i), node in sorted(store.memo.items()):
        if store.field(node) != VectorField.basis(exps, i):
            bad += 1
    print(f"\nverified {len(store.memo) - bad}/{len(store.memo)} certificates "
          f"({len(store.builder)} shared nodes)")
    return EXIT_MISMATCH if bad else EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="vfgen", description="Generation certificates and flows for polynomial vector fields.")
    sub = p.add_subparsers(dest="command", required=True)

    def dim(sp):
        sp.add_argument("-n", type=int, required=True, help="ambient dimension")

    sp = sub.add_parser("bracket", help="Lie bracket of two fields")
    dim(sp)
    sp.add_argument("left")
    sp.add_argument("right")
    sp.set_defaults(func=cmd_bracket)

    sp = sub.add_parser("generate", help="certificate expressing a field via U and V")
    dim(sp)
    sp.add_argument("--target", required=True)
    sp.add_argument("-o", "--output")
    sp.add_argument("--max-nodes", type=int, default=2_000_000)
    sp.set_defaults(func=cmd_generate)

    sp = sub.add_parser("verify", help="re-evaluate a certificate against a target")
    dim(sp)
    sp.add_argument("--cert", required=True)
    sp.add_argument("--target", required=True)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("flow", help="integrate the flow of a field")
    dim(sp)
    sp.add_argument("--field")
    sp.add_argument("--builtin", choices=["U", "V"])
    sp.add_argument("--start", required=True, help="comma-separated coordinates (complex allowed, e.g. 1+2j)")
    sp.add_argument("--t-max", type=float, required=True)
    sp.add_argument("--theta", type=float, default=0.0)
    sp.add_argument("--csv")
    sp.add_argument("--detect-blowup", action="store_true")
    sp.add_argument("--rtol", type=float, default=1e-10)
    sp.add_argument("--atol", type=float, default=1e-10)
    sp.add_argument("--blowup-norm", type=float, default=1e8)
    sp.add_argument("--min-step", type=float, default=1e-13)
    sp.add_argument("--max-steps", type=int, default=1_000_000)
    sp.set_defaults(func=cmd_flow)

    sp = sub.add_parser("nilpotent", help="check local nilpotency")
    dim(sp)
    sp.add_argument("--field", required=True)
    sp.add_argument("--max-iter", type=int, default=25)
    sp.set_defaults(func=cmd_nilpotent)

    sp = sub.add_parser("demo", help="print the step-by-step construction")
    dim(sp)
    sp.set_defaults(func=cmd_demo)
    return p


def run(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE
    if args.n < 1:
        print("error: -n must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except (ParseError, CertificateError, FlowError, UsageError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (NodeLimitExceeded, FlowLimitExceeded, RecursionError, MemoryError) as e:
        print(f"limit exceeded: {e}", file=sys.stderr)
        return EXIT_LIMIT


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
