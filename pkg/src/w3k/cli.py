"""Command-line entry point: ``w3k <subcommand> ...``.

Exit codes: 0 success, 1 failed verification, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Optional, Sequence

from .apfree import APDescriptor
from .arith import MASK64
from .certificate import Certificate, CertificateError
from .construction import (
    base_set,
    count_kaps,
    estimate_miss_probability,
    normalize_strategy,
    threshold_scan,
    union_bound_certifies,
)
from .search import (
    SearchUndetermined,
    certify_erdos_turan,
    certify_exact_w,
    certify_r3,
    certify_scan,
    certify_threshold,
    construct_certificate,
    lower_bound_report,
    verify_certificate,
)


class UsageError(Exception):
    pass


def _seed(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v <= MASK64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="w3k", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--out", help="write output to this file instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("r3", parents=[common], help="exact r3(N) with a witness")
    p.add_argument("N", type=_positive)

    p = sub.add_parser("et", parents=[common], help="Erdos-Turan ternary set and count")
    p.add_argument("N", type=_positive)

    p = sub.add_parser("construct", parents=[common], help="build a 3-AP-free A in [p^2-p]")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--strategy", default="exact", choices=("exact", "et", "exact-r3", "erdos-turan"))
    p.add_argument("--seed", type=_seed, default=0)

    p = sub.add_parser("verify", parents=[common], help="re-verify a certificate file")
    p.add_argument("--cert", required=True)

    p = sub.add_parser("prob", parents=[common], help="miss probability and union-bound criteria")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--m", type=int, required=True)

    p = sub.add_parser("scan", parents=[common], help="union-bound criteria over a prime range")
    p.add_argument("--from", dest="lo", type=int, required=True)
    p.add_argument("--to", dest="hi", type=int, required=True)
    p.add_argument("--strategy", default="et", choices=("exact", "et", "exact-r3", "erdos-turan"))

    p = sub.add_parser("mc", parents=[common], help="Monte Carlo estimate of the miss probability")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--trials", type=_positive, required=True)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--strategy", default="exact", choices=("exact", "et", "exact-r3", "erdos-turan"))
    p.add_argument("--start", type=int, default=1, help="first term of the p-AP")
    p.add_argument("--diff", type=int, default=1, help="difference of the p-AP")
    p.add_argument("--workers", type=_positive, default=1)

    p = sub.add_parser("wexact", parents=[common], help="exact w(3,k) by backtracking")
    p.add_argument("--k", type=int, required=True)

    p = sub.add_parser("report", parents=[common], help="lower-bound certificate for w(3,k)")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--seeds", type=_positive, default=10)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--workers", type=_positive, default=1)
    return parser


def _fraction_text(p: int, m: int) -> str:
    q = Fraction(p - 1 - m, p - 1) ** m
    if len(str(q.denominator)) > 30:
        return f"{float(q):.6g}"
    return f"{q} ~ {float(q):.6f}"


def _cert_text(cert: Certificate) -> str:
    lines = [f"kind: {cert.kind}", f"parameters: {cert.parameters}"]
    for name, value in cert.claims.items():
        lines.append(f"  {name}: {value}")
    if cert.blue:
        shown = cert.blue if len(cert.blue) <= 40 else cert.blue[:40] + ["..."]
        lines.append(f"blue ({len(cert.blue)}): {' '.join(map(str, shown))}")
    lines.append(f"digest: {cert.digest}")
    return "\n".join(lines)


def _emit(cert: Certificate, args, text: Optional[str] = None) -> str:
    if args.format == "json":
        return cert.to_json()
    return (text if text is not None else _cert_text(cert)) + "\n"


def _run(args) -> tuple[str, int]:
    cmd = args.command
    if cmd == "r3":
        cert = certify_r3(args.N)
        return _emit(cert, args, f"r3({args.N}) = {cert.claims['r3']}\nwitness: {cert.blue}"), 0
    if cmd == "et":
        cert = certify_erdos_turan(args.N)
        return _emit(cert, args), 0
    if cmd == "construct":
        return _emit(construct_certificate(args.p, normalize_strategy(args.strategy), args.seed), args), 0
    if cmd == "verify":
        try:
            with open(args.cert, encoding="utf-8") as fh:
                cert = Certificate.from_json(fh.read())
        except (OSError, CertificateError) as exc:
            return f"cannot read certificate: {exc}\n", 1
        rows = verify_certificate(cert)
        ok = all(passed for _, passed, _ in rows)
        if args.format == "json":
            doc = {"accepted": ok, "checks": [{"check": n, "passed": r, "detail": d} for n, r, d in rows]}
            return json.dumps(doc, indent=2) + "\n", 0 if ok else 1
        lines = [f"{'PASS' if r else 'FAIL'} {n}" + ("" if r or not d else f"  ({d})") for n, r, d in rows]
        lines.append("ACCEPTED" if ok else "REJECTED")
        return "\n".join(lines) + "\n", 0 if ok else 1
    if cmd == "prob":
        cert = certify_threshold(args.p, args.m)
        fast = union_bound_certifies(args.p, args.m)
        text = (
            f"p = {args.p}, m = {args.m}\n"
            f"miss probability (1 - m/(p-1))^m = {_fraction_text(args.p, args.m)}\n"
            f"p-APs in [p^2-p]: {count_kaps(args.p ** 2 - args.p, args.p)}\n"
            f"paper criterion (miss <= p^-3): {str(cert.claims['paper_criterion']).lower()}\n"
            f"expectation criterion (expected unhit < 1): {str(cert.claims['expectation_criterion']).lower()}"
        )
        if fast != (cert.claims["paper_criterion"], cert.claims["expectation_criterion"]):
            text += "\nwarning: log-space and exact evaluations disagree"
        return _emit(cert, args, text), 0
    if cmd == "scan":
        strategy = normalize_strategy(args.strategy)
        if args.format == "json":
            return certify_scan(strategy, args.lo, args.hi).to_json(), 0
        rows = threshold_scan(strategy, args.lo, args.hi)
        lines = [f"{'p':>12} {'m':>8} {'paper':>6} {'expect':>6}"]
        lines += [f"{r.p:>12} {r.m:>8} {str(r.paper_criterion):>6} {str(r.expectation_criterion):>6}" for r in rows]
        return "\n".join(lines) + "\n", 0
    if cmd == "mc":
        p = args.p
        ap = APDescriptor(args.start, args.diff, p)
        emp, ana, se = estimate_miss_probability(p, args.strategy, ap, args.trials, args.seed, args.workers)
        m = len(base_set(p, normalize_strategy(args.strategy)))
        if args.format == "json":
            doc = {
                "p": p, "m": m, "ap": [ap.start, ap.diff, ap.length], "trials": args.trials,
                "seed": args.seed, "empirical": emp, "analytic": ana, "stderr": se,
                "z": (emp - ana) / se if se else 0.0,
            }
            return json.dumps(doc) + "\n", 0
        z = (emp - ana) / se if se else 0.0
        text = (
            f"p = {p}, m = {m}, AP start {ap.start} diff {ap.diff}, trials = {args.trials}\n"
            f"empirical {emp:.6f}  analytic {ana:.6f}  stderr {se:.6f}  z = {z:+.2f}"
        )
        return text + "\n", 0
    if cmd == "wexact":
        cert = certify_exact_w(args.k)
        text = f"w(3,{args.k}) = {cert.claims['w']}\nvalid coloring of [{cert.parameters['N']}], blue: {cert.blue}"
        return _emit(cert, args, text), 0
    if cmd == "report":
        cert = lower_bound_report(args.k, args.seeds, args.seed, workers=args.workers)
        return _emit(cert, args), 0
    raise UsageError(f"unknown command {cmd}")


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        out, code = _run(args)
    except (ValueError, UsageError) as exc:
        print(f"w3k {args.command}: {exc}", file=sys.stderr)
        return 2
    except SearchUndetermined as exc:
        print(f"w3k {args.command}: {exc}", file=sys.stderr)
        return 1
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    return code


if __name__ == "__main__":
    sys.exit(main())
