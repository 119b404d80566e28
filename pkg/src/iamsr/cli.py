"""Command-line interface: ``iamsr <command> ...`` (or ``python -m iamsr``)."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import analysis
from .cauchy import WORKED_EXAMPLE_SEQUENCE, InjectiveSequence
from .cluster import (
    create_cluster,
    dump_json,
    eavesdrop_cluster,
    fail_node,
    open_cluster,
    reconstruct_cluster,
    repair_cluster,
    verify_cluster,
)
from .gf import next_prime
from .iacode import params_new
from .secrecy import EveModel, default_eve
from .storage import BYTE_Q_MIN, ingest, ingest_symbols, parse_symbol_text


def _id_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated node ids, got {text!r}") from None


def cmd_encode(args) -> int:
    symbolic = args.symbols or args.worked_example_psi
    if args.q is not None:
        q = args.q
    elif args.worked_example_psi:
        q = 7
    elif symbolic:
        q = None
    else:
        q = next_prime(max(2 * args.k, BYTE_Q_MIN))
    params = params_new(args.k, q_override=q, epsilon=args.epsilon)
    if args.worked_example_psi:
        if (params.k, params.q) != (3, 7):
            raise ValueError("--worked-example-psi is only valid with k=3 and q=7")
        seq = WORKED_EXAMPLE_SEQUENCE
    else:
        seq = InjectiveSequence(range(params.alpha), range(params.alpha, params.alpha + params.n - params.k))
    eve = None
    if args.secure:
        eve = default_eve(params, args.l1, args.l2)
        if args.e1 is not None or args.e2 is not None:
            eve = EveModel(args.e1 or (), args.e2 or ())
            if (eve.l1, eve.l2) != (args.l1, args.l2):
                raise ValueError(f"--e1/--e2 give (l1, l2)=({eve.l1}, {eve.l2}), flags say ({args.l1}, {args.l2})")
        eve.validate(params)
    mode = "secure" if args.secure else "plain"
    raw = Path(args.input).read_bytes()
    if symbolic:
        values = parse_symbol_text(raw.decode("utf-8"))
        stripes = ingest_symbols(values, params, mode, eve)
        length, payload = len(values), "symbols"
    else:
        stripes = ingest(raw, params, mode, eve)
        length, payload = len(raw), "bytes"
    rng = np.random.default_rng(args.seed)
    cluster = create_cluster(args.cluster, params, seq, stripes, length, mode, payload, eve, rng)
    m = cluster.manifest
    print(f"encoded {length} {payload} into {m.stripes} stripes on {params.n} nodes "
          f"(k={params.k}, q={params.q}, mode={mode})")
    if eve is not None:
        print(f"secure layout: {cluster.layout.R} random + {cluster.layout.secret_size} secret symbols per stripe, "
              f"taps e1={sorted(eve.e1)} e2={sorted(eve.e2)}")
    return 0


def cmd_reconstruct(args) -> int:
    cluster = open_cluster(args.cluster)
    out = reconstruct_cluster(cluster, args.nodes)
    if isinstance(out, list):
        Path(args.output).write_text(" ".join(map(str, out)) + "\n")
    else:
        Path(args.output).write_bytes(out)
    print(f"reconstructed {cluster.manifest.length} {cluster.manifest.payload} from nodes {args.nodes}")
    return 0


def cmd_fail(args) -> int:
    fail_node(open_cluster(args.cluster), args.node)
    print(f"node {args.node} removed")
    return 0


def cmd_repair(args) -> int:
    report = repair_cluster(open_cluster(args.cluster), args.node)
    print(report.describe())
    return 0


def cmd_eavesdrop(args) -> int:
    cluster = open_cluster(args.cluster)
    dump = eavesdrop_cluster(cluster, EveModel(args.e1, args.e2), args.stripe)
    dump_json(dump, args.dump)
    print(f"{len(dump['values'])} observed symbols from stripe {args.stripe} written to {args.dump}")
    return 0


def cmd_verify(args) -> int:
    cluster = open_cluster(args.cluster)
    report, oracle = verify_cluster(cluster, EveModel(args.e1, args.e2), args.exhaustive, args.max_states)
    for line in report.lines():
        print(line)
    ok = report.perfect
    if oracle is not None:
        print(f"exhaustive oracle: {'identical distributions' if oracle else 'distributions differ'}")
        ok = ok and oracle
    return 0 if ok else 1


def cmd_analyze(args) -> int:
    if args.table == "bandwidth":
        rows = analysis.bandwidth_table(args.kmax)
    else:
        rows = analysis.secrecy_table(args.k, args.l1)
    text = analysis.to_csv(rows)
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text)
        print(f"{len(rows)} rows written to {args.out}")
    return 0


def cmd_selftest(args) -> int:
    from .selftest import run

    return 0 if run(print) else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="iamsr", description="Secure interference-alignment MSR storage code")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encode", help="encode a file into a node cluster")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--q", type=int)
    p.add_argument("--epsilon", type=int, default=2)
    p.add_argument("--secure", action="store_true")
    p.add_argument("--l1", type=int, default=0)
    p.add_argument("--l2", type=int, default=0)
    p.add_argument("--e1", type=_id_list, help="storage-tap node ids (default: first l1 systematic)")
    p.add_argument("--e2", type=_id_list, help="repair-tap node ids (default: last l2 systematic)")
    p.add_argument("--worked-example-psi", "--paper-psi", action="store_true",
                   help="Cauchy matrix from xs=(0,1,2), ys=(4,5,6); needs k=3, q=7, symbolic input")
    p.add_argument("--symbols", action="store_true", help="input is whitespace-separated integer symbols")
    p.add_argument("--seed", type=int)
    p.add_argument("--input", required=True)
    p.add_argument("--cluster", required=True)
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("reconstruct", help="decode from exactly k nodes")
    p.add_argument("--cluster", required=True)
    p.add_argument("--nodes", type=_id_list, required=True)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("fail", help="delete a node file")
    p.add_argument("--cluster", required=True)
    p.add_argument("--node", type=int, required=True)
    p.set_defaults(func=cmd_fail)

    p = sub.add_parser("repair", help="regenerate a missing node")
    p.add_argument("--cluster", required=True)
    p.add_argument("--node", type=int, required=True)
    p.set_defaults(func=cmd_repair)

    for name, func in (("eavesdrop", cmd_eavesdrop), ("verify-secrecy", cmd_verify)):
        p = sub.add_parser(name)
        p.add_argument("--cluster", required=True)
        p.add_argument("--e1", type=_id_list, default=[])
        p.add_argument("--e2", type=_id_list, default=[])
        p.set_defaults(func=func)
        if name == "eavesdrop":
            p.add_argument("--dump", required=True)
            p.add_argument("--stripe", type=int, default=0)
        else:
            p.add_argument("--exhaustive", action="store_true")
            p.add_argument("--max-states", type=int, default=1 << 20)

    p = sub.add_parser("analyze", help="bandwidth / secrecy comparison tables as CSV")
    tables = p.add_subparsers(dest="table", required=True)
    t = tables.add_parser("bandwidth")
    t.add_argument("--kmax", type=int, default=30)
    t.add_argument("--out")
    t = tables.add_parser("secrecy")
    t.add_argument("--k", type=int, default=30)
    t.add_argument("--l1", type=int, default=1)
    t.add_argument("--out")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("selftest", help="worked-example vectors and the k=2 exhaustive secrecy oracle")
    p.set_defaults(func=cmd_selftest)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, ArithmeticError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
