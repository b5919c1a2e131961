"""Command-line front end: ``b1sets <command> ...``.

Payloads (JSON, CSV or plain text) go to stdout, diagnostics to stderr.
Exit codes: 0 ok, 1 negative verification or search result, 2 usage
error, 3 search budget exceeded (or interrupted).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import signal
import sys
from contextlib import contextmanager
from math import gcd

from . import oracle
from .bset import BSet, dump_set, load_set, verify
from .codec import EncodingUnsupported, build_code, decode, encode, syndrome
from .construct import (
    LAMBDA,
    BaseProvider,
    BaseUnavailable,
    dispatch,
    m4_prime_formula,
)
from .numtheory import divisors

log = logging.getLogger("b1sets")

OK, NEGATIVE, USAGE, BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _ints(text: str) -> list[int]:
    try:
        return [int(t) for t in text.replace(" ", "").split(",") if t]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def _load_set(spec: str, q: int | None, lam: int | None) -> BSet:
    """A set from a JSON set file, or from an inline list together with --q."""
    if os.path.isfile(spec):
        try:
            bset = load_set(spec)
        except (OSError, ValueError, KeyError) as exc:
            raise UsageError(f"cannot read set file {spec}: {exc}") from None
        if q is not None and q != bset.q:
            raise UsageError(f"--q {q} disagrees with q={bset.q} in {spec}")
        if lam is not None and lam != bset.lam:
            bset = BSet(bset.q, bset.elements, lam)
        return bset
    if q is None:
        raise UsageError("an inline --set needs --q")
    try:
        return BSet.of(q, _ints(spec), LAMBDA if lam is None else lam)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _emit(args, payload: dict, text: str) -> None:
    if args.format == "text":
        out = text.rstrip("\n") + "\n"
    else:
        out = json.dumps(payload, indent=2) + "\n"
    sys.stdout.write(out)


def _provider(args) -> BaseProvider:
    return BaseProvider(
        base_file=args.base_file,
        max_nodes=args.oracle_budget_nodes,
        max_seconds=args.oracle_budget_secs,
    )


@contextmanager
def _interruptible():
    """SIGINT stops a running search, which then reports its best set."""
    previous = signal.signal(signal.SIGINT, lambda *_: oracle.request_stop())
    try:
        yield
    finally:
        signal.signal(signal.SIGINT, previous)


def _check_q(q: int) -> None:
    if q < 2:
        raise UsageError(f"modulus must be at least 2, got {q}")


# ---- commands -------------------------------------------------------------


def cmd_construct(args) -> int:
    _check_q(args.q)
    if args.lam != LAMBDA:
        raise UsageError(f"constructions are for lambda = {LAMBDA} only")
    try:
        with _interruptible():
            bset, report = dispatch(args.q, _provider(args))
    except BaseUnavailable as exc:
        print(f"error: {exc}", file=sys.stderr)
        return BUDGET if exc.budget else USAGE
    for note in report.notes:
        log.info(note)
    if args.out:
        dump_set(bset, args.out)
        log.info("wrote %s", args.out)
    payload = {"set": bset.to_json(), "report": report.to_json()}
    trace = " <- ".join(f"{s.theorem}({s.q})" for s in report.steps)
    text = (
        f"q={bset.q} size={len(bset)} {report.exactness}\n"
        f"elements: {','.join(map(str, bset))}\n"
        f"steps: {trace}"
    )
    if report.deficit is not None:
        text += f"\nformula size {report.formula_size}, discrepancy {report.discrepancy}"
    _emit(args, payload, text)
    return OK


def cmd_verify(args) -> int:
    bset = _load_set(args.set, args.q, args.lam)
    _check_q(bset.q)
    verdict = verify(bset.q, bset.lam, bset.elements)
    payload = {"q": bset.q, "lambda": bset.lam, "size": len(bset), "valid": verdict.valid}
    if not verdict:
        (i, x), (j, y) = verdict.collision
        payload["collision"] = {"first": [i, x], "second": [j, y], "residue": i * x % bset.q}
        print(f"collision: {verdict.describe()}", file=sys.stderr)
    _emit(args, payload, f"B1[{bset.lam}]({bset.q}) size {len(bset)}: {verdict.describe()}")
    return OK if verdict else NEGATIVE


def _search(args, q: int):
    with _interruptible():
        return oracle.max_bset_exact(
            q, args.lam, args.oracle_budget_nodes, args.oracle_budget_secs
        )


def cmd_search(args) -> int:
    _check_q(args.q)
    res = _search(args, args.q)
    text = (
        f"q={res.q} lambda={res.lam} max_size={res.max_size} ({res.status})\n"
        f"witness: {','.join(map(str, res.witness))}"
    )
    _emit(args, res.to_json(), text)
    if not res.exact:
        print("search budget exceeded; reporting the best set found", file=sys.stderr)
        return BUDGET
    return OK


def cmd_msize(args) -> int:
    """Maximum size: from a construction when it is provably maximal, else search."""
    _check_q(args.q)
    source = None
    if args.lam == LAMBDA:
        try:
            bset, report = dispatch(args.q, BaseProvider(use_oracle=False))
            if report.exact:
                size, status, source = len(bset), "exact", "construction"
        except BaseUnavailable:
            pass
    if source is None:
        res = _search(args, args.q)
        size, status, source = res.max_size, res.status, "search"
    payload = {"q": args.q, "lambda": args.lam, "max_size": size, "status": status, "source": source}
    _emit(args, payload, f"M{args.lam}({args.q}) = {size} ({status}, {source})")
    return OK if status == "exact" else BUDGET


def _r_values(args) -> list[int]:
    rs = list(args.r or [])
    if args.r_range:
        lo, hi = args.r_range
        rs += [r for r in range(lo, hi + 1) if gcd(r, 6) == 1]
    bad = [r for r in rs if r < 1 or gcd(r, 6) != 1]
    if bad:
        raise UsageError(f"r must be positive and prime to 6: {bad}")
    return sorted(set(rs))


def cmd_table(args) -> int:
    rows = []
    budget_hit = False

    def exact_max(q: int) -> int:
        nonlocal budget_hit
        res = _search(args, q)
        budget_hit |= not res.exact
        return res.max_size

    if args.mode == "conjecture":
        header = ["q", "oracle", "lower_bound"]
        for r in _r_values(args):
            rows.append([12 * r, exact_max(12 * r), exact_max(2 * r) + 2 * r])
    else:
        header = ["q", "predicted", "oracle"]
        for r in _r_values(args):
            predicted = sum(m4_prime_formula(d).value for d in divisors(r))
            rows.append([3 * r, predicted, exact_max(3 * r)])
    if args.format == "json":
        sys.stdout.write(json.dumps([dict(zip(header, row)) for row in rows], indent=2) + "\n")
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        sys.stdout.write(buf.getvalue())
    if budget_hit:
        print("some searches ran out of budget; their values are lower bounds", file=sys.stderr)
        return BUDGET
    return OK


def _code(args):
    bset = _load_set(args.set, args.q, None)
    try:
        return build_code(bset)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_code_build(args) -> int:
    code, table = _code(args)
    entries = sorted(table.lookup.items())
    payload = {
        "q": code.q,
        "lambda": code.lam,
        "m": code.m,
        "check_row": list(code.check_row),
        "check_position": code.check_position(),
        "syndromes": [{"syndrome": s, "position": i, "magnitude": e} for s, (i, e) in entries],
    }
    lines = [f"length {code.m} code over Z_{code.q}, check row {list(code.check_row)}"]
    lines += [f"{s} -> position {i}, magnitude {e}" for s, (i, e) in entries]
    _emit(args, payload, "\n".join(lines))
    return OK


def cmd_code_encode(args) -> int:
    code, _ = _code(args)
    try:
        word = encode(code, _ints(args.message))
    except EncodingUnsupported as exc:
        print(f"error: {exc}", file=sys.stderr)
        return NEGATIVE
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    payload = {"word": list(word), "syndrome": syndrome(code, word)}
    _emit(args, payload, ",".join(map(str, word)))
    return OK


def cmd_code_decode(args) -> int:
    code, table = _code(args)
    try:
        result = decode(code, table, _ints(args.word))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    text = f"{result.status}: {','.join(map(str, result.word))} (syndrome {result.syndrome})"
    if result.error:
        text += f"\nerror at position {result.position}, magnitude {result.magnitude}"
    _emit(args, result.to_json(), text)
    return NEGATIVE if result.status == "uncorrectable" else OK


# ---- parser ---------------------------------------------------------------


def _budget_flags(p) -> None:
    p.add_argument(
        "--oracle-budget-nodes", "--max-nodes", type=int,
        default=oracle.DEFAULT_MAX_NODES, metavar="N",
        help="search node limit",
    )
    p.add_argument(
        "--oracle-budget-secs", type=float, default=oracle.DEFAULT_MAX_SECONDS,
        metavar="S", help="search time limit in seconds",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="b1sets", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name, func, help, formats=("json", "text"), **kw):
        p = sub.add_parser(name, help=help, **kw)
        p.add_argument("--format", choices=formats, default=formats[0])
        p.set_defaults(func=func)
        return p

    p = command("construct", cmd_construct, "build a B1[4](q) set from the constructions")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--lambda", dest="lam", type=int, default=LAMBDA)
    p.add_argument("--base-file", help="set file offered as a base set")
    p.add_argument("--out", help="also write the set file here")
    _budget_flags(p)

    p = command("verify", cmd_verify, "check a set")
    p.add_argument("--q", type=int)
    p.add_argument("--lambda", dest="lam", type=int)
    p.add_argument("--set", required=True, help="set file or comma-separated residues")

    p = command("search", cmd_search, "exact maximum set by search")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--lambda", dest="lam", type=int, default=LAMBDA)
    _budget_flags(p)

    p = command("msize", cmd_msize, "maximum size of a B1[lambda](q) set")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--lambda", dest="lam", type=int, default=LAMBDA)
    _budget_flags(p)

    p = command("table", cmd_table, "comparison tables as CSV", formats=("csv", "json"))
    p.add_argument("--mode", choices=("conjecture", "formula-vs-oracle"), required=True)
    p.add_argument("--r", type=_ints, help="comma-separated r values prime to 6")
    p.add_argument("--r-range", type=int, nargs=2, metavar=("LO", "HI"),
                   help="all r in [LO, HI] prime to 6")
    p.set_defaults(lam=LAMBDA)
    _budget_flags(p)

    code = sub.add_parser("code", help="single-check code operations")
    code_sub = code.add_subparsers(dest="code_command", required=True)
    for name, func, extra in (
        ("build", cmd_code_build, None),
        ("encode", cmd_code_encode, "--message"),
        ("decode", cmd_code_decode, "--word"),
    ):
        p = code_sub.add_parser(name)
        p.add_argument("--set", required=True, help="set file or comma-separated residues")
        p.add_argument("--q", type=int)
        p.add_argument("--format", choices=("json", "text"), default="json")
        if extra:
            p.add_argument(extra, required=True, help="comma-separated integers")
        p.set_defaults(func=func)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
