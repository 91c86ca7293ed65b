"""Command-line interface: ingest, audit, table1, and per-form queries.

Exit codes: 0 = ran, no findings; 2 = ran, findings present; 1 = error.
"""
from __future__ import annotations

import argparse
import sys

from .arith import DomainError
from .audit import ALL_CHECKS, emit_report, reproduce_table1, run_audit
from .autmass import aut_order, local_density, nipp_density, siegel_mass
from .ingest import (RawDataset, emit_normalized,
                     load_descriptor, parse_appendix, parse_main_table,
                     parse_normalized)
from .jordan import split_form
from .model import QuadForm
from .symbol import canonical_gram, canonicalize_2, symbol_2, symbol_odd_p


def _parse_coeffs(text: str) -> QuadForm:
    coeffs = tuple(int(c) for c in text.split(","))
    return QuadForm(coeffs)


def _load_dataset(path: str) -> RawDataset:
    with open(path, encoding="utf-8") as f:
        return parse_normalized(f.read())


def _cmd_ingest(args) -> int:
    descriptor = load_descriptor(args.descriptor) if args.descriptor else None
    dataset = RawDataset()
    for path in args.main:
        with open(path, encoding="utf-8") as f:
            part = parse_main_table(f.read(), descriptor, source=path)
        dataset.genera.extend(part.genera)
        dataset.source_manifest.extend(part.source_manifest)
    warnings = []
    for path in args.appendix or []:
        with open(path, encoding="utf-8") as f:
            warnings += parse_appendix(f.read(), dataset, descriptor, source=path)
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    text = emit_normalized(dataset)
    with open(args.out, "w", encoding="utf-8") as f:
        f.write(text)
    print(f"wrote {len(dataset.genera)} genera to {args.out}")
    return 0


def _cmd_audit(args) -> int:
    dataset = _load_dataset(args.dataset)
    checks = tuple(args.checks.split(",")) if args.checks else ALL_CHECKS
    report = run_audit(dataset, checks=checks,
                       disc_min=args.disc_min, disc_max=args.disc_max)
    machine = emit_report(report, "machine")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            f.write(machine)
    else:
        print(machine, end="")
    if args.human:
        with open(args.human, "w", encoding="utf-8") as f:
            f.write(emit_report(report, "human"))
    return 2 if report.findings else 0


def _cmd_table1(args) -> int:
    dataset = _load_dataset(args.dataset)
    flagged = reproduce_table1(dataset)
    for d, gid in flagged:
        print(f"{d}#{gid}")
    return 2 if flagged else 0


def _cmd_symbol(args) -> int:
    form = _parse_coeffs(args.coeffs)
    p = args.p
    if p == 2:
        sym = symbol_2(form.gram_doubled)
        canon = canonicalize_2(sym)
        print(f"2-adic symbol (of 2M): {sym.entries}")
        print(f"canonical: {canon.entries}")
        print(f"canonical representative (of 2M): {canonical_gram(canon)}")
    else:
        sym = symbol_odd_p(form.gram, p)
        print(f"{p}-adic symbol: {sym.entries}")
    print(f"jordan splitting: {split_form(form, p).constituents}")
    return 0


def _cmd_density(args) -> int:
    form = _parse_coeffs(args.coeffs)
    if args.nipp_normalized:
        print(nipp_density(form, args.p))
    else:
        print(local_density(form, args.p))
    return 0


def _cmd_aut(args) -> int:
    print(aut_order(_parse_coeffs(args.coeffs)))
    return 0


def _cmd_mass(args) -> int:
    if args.coeffs:
        form = _parse_coeffs(args.coeffs)
    else:
        dataset = _load_dataset(args.dataset)
        keyed = dataset.by_key()
        key = (args.d, args.id)
        if key not in keyed:
            raise DomainError(f"genus {args.d}#{args.id} not in dataset")
        form = keyed[key].forms[0].form
    print(siegel_mass(form))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nippaudit",
        description="Exact-arithmetic audit of quaternary quadratic form tables")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse raw table files, emit normalized dataset")
    p.add_argument("--main", nargs="+", required=True)
    p.add_argument("--appendix", nargs="*")
    p.add_argument("--descriptor")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("audit", help="run checks over a normalized dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--checks")
    p.add_argument("--disc-min", type=int)
    p.add_argument("--disc-max", type=int)
    p.add_argument("--out")
    p.add_argument("--human")
    p.set_defaults(func=_cmd_audit)

    p = sub.add_parser("table1", help="print genera flagged by splitting/density checks")
    p.add_argument("--dataset", required=True)
    p.set_defaults(func=_cmd_table1)

    p = sub.add_parser("symbol", help="print p-adic symbol data of a form")
    p.add_argument("--coeffs", required=True)
    p.add_argument("--p", type=int, required=True)
    p.set_defaults(func=_cmd_symbol)

    p = sub.add_parser("density", help="print the local density of a form")
    p.add_argument("--coeffs", required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--nipp-normalized", action="store_true")
    p.set_defaults(func=_cmd_density)

    p = sub.add_parser("aut", help="print the automorphism count of a form")
    p.add_argument("--coeffs", required=True)
    p.set_defaults(func=_cmd_aut)

    p = sub.add_parser("mass", help="print the Siegel mass of a genus")
    p.add_argument("--coeffs")
    p.add_argument("--dataset")
    p.add_argument("--d", type=int)
    p.add_argument("--id", type=int)
    p.set_defaults(func=_cmd_mass)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DomainError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
