"""Command line entry point: build-basis, verify, report."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from collections import Counter, defaultdict
from typing import Dict, Iterable, List, Optional

from . import cache
from .current import verify_current_center, verify_gr_formulas, verify_sym_invariance
from .gaussian import GaussianSet
from .presentation import (c_symmetry_reports, center_suite, check_automorphisms,
                           check_lemma_catalog, check_presentation, harness_self_test,
                           ideal_reports)
from .reports import FAIL, STATUSES, CheckReport
from .rtt import BudgetExceeded, IdealCollapse, QuotientBasis, close_ideal, generate_rtt_relations
from .scalars import is_prime

log = logging.getLogger("modyangian")

SCHEMA = "modyangian-report/1"
SUITES = ("presentation", "center", "gr", "current", "automorphisms", "all", "self-test")
ALL_SUITES = ("current", "presentation", "center", "gr", "automorphisms")


def odd_prime(text: str) -> int:
    try:
        p = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer")
    if p == 2 or not is_prime(p):
        raise argparse.ArgumentTypeError(f"p must be an odd prime, got {p}")
    return p


def positive(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("expected a positive integer")
    return n


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with default option values; flags win")
    common.add_argument("--N", type=int, default=3)
    common.add_argument("--p", type=odd_prime, default=3)
    common.add_argument("--D", type=positive, default=5, help="loop-degree cap of the ideal")
    common.add_argument("--cache-dir", default=".modyangian-cache")
    common.add_argument("--budget-rows", type=int, default=None,
                        help="abort the closure when the rule count exceeds this")
    common.add_argument("-v", "--verbose", action="store_true")

    ap = argparse.ArgumentParser(prog="modyangian",
                                 description="Exact verification of the extended Yangian X(o_N) over F_p")
    sub = ap.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build-basis", parents=[common], help="close the RTT ideal and cache it")
    b.add_argument("--out", help="cache file path (default: inside --cache-dir)")

    v = sub.add_parser("verify", parents=[common], help="run verification suites")
    v.add_argument("--K", type=positive, default=3, help="series truncation order")
    v.add_argument("--L", type=positive, default=2, help="t-truncation of the current algebra")
    v.add_argument("--suite", choices=SUITES, default="all")
    v.add_argument("--workers", type=positive, default=1)
    v.add_argument("--no-build", action="store_true", help="fail instead of building a missing cache")
    v.add_argument("--out", help="JSON lines report (default: stdout)")

    r = sub.add_parser("report", help="summarize report files")
    r.add_argument("files", nargs="*")
    r.add_argument("-v", "--verbose", action="store_true")
    ap.subcommands = {"build-basis": b, "verify": v, "report": r}
    return ap


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    ap = build_parser()
    if known.config:
        with open(known.config) as f:
            values = {k.replace("-", "_"): v for k, v in json.load(f).items()}
        # file values become defaults, so explicit flags still win
        for sp in ap.subcommands.values():
            sp.set_defaults(**values)
    args = ap.parse_args(argv)
    if args.command != "report":
        try:
            odd_prime(str(args.p))
        except argparse.ArgumentTypeError as exc:
            ap.error(str(exc))
        if args.N < 3:
            ap.error("N must be at least 3")
        if args.command == "verify" and args.K > args.D:
            ap.error("K must not exceed D")
    return args


# ---------------------------------------------------------------------------
# basis handling


def build_basis(N: int, p: int, D: int, budget_rows: Optional[int] = None) -> QuotientBasis:
    t0 = time.time()
    qb = close_ideal(None, N, p, D, max_rules=budget_rows)
    log.info("closed ideal N=%d p=%d D=%d: %d rules in %.2fs", N, p, D, len(qb.rules),
             time.time() - t0)
    return qb


def obtain_basis(args) -> QuotientBasis:
    path = cache.cache_path(args.cache_dir, args.N, args.p, args.D)
    if os.path.exists(path):
        h = cache.peek_header(path)
        if (h.N, h.p, h.D, h.order_id) == (args.N, args.p, args.D, cache.ORDER_ID):
            return cache.load(path)
        log.warning("cache %s does not match the configuration; ignoring it", path)
    if args.no_build:
        raise FileNotFoundError(f"no usable basis cache at {path} and --no-build given")
    qb = build_basis(args.N, args.p, args.D, args.budget_rows)
    cache.save(qb, path)
    return qb


# ---------------------------------------------------------------------------
# suites


def run_suite(name: str, qb: Optional[QuotientBasis], args) -> List[CheckReport]:
    if name == "current":
        return [verify_current_center(args.N, args.L, args.p),
                verify_sym_invariance(args.N, args.L, args.p)]
    if name == "presentation":
        gs = GaussianSet(qb, args.K)
        return (ideal_reports(qb) + c_symmetry_reports(qb)
                + check_presentation(gs, workers=args.workers)
                + check_lemma_catalog(gs, workers=args.workers))
    if name == "center":
        return center_suite(GaussianSet(qb, args.K))
    if name == "gr":
        return verify_gr_formulas(GaussianSet(qb, args.K))
    if name == "automorphisms":
        rels = generate_rtt_relations(qb.N, qb.D, qb.p)
        return check_automorphisms(qb, rels, K=args.K)
    if name == "self-test":
        return [harness_self_test(args.N, args.p, min(args.D, 3), min(args.K, 2), mode=m)[0]
                for m in ("relation", "rule")]
    raise ValueError(name)


def record(rep: CheckReport) -> Dict:
    return {"schema": SCHEMA, "id": rep.id, "tag": rep.tag, "suite": rep.suite,
            "params": rep.params, "status": rep.status, "counterexample": rep.counterexample,
            "compared": rep.compared, "skipped": rep.skipped,
            "wall_time": round(rep.seconds, 6), "note": rep.note}


def cmd_build_basis(args) -> int:
    path = args.out or cache.cache_path(args.cache_dir, args.N, args.p, args.D)
    try:
        qb = build_basis(args.N, args.p, args.D, args.budget_rows)
    except (BudgetExceeded, IdealCollapse) as exc:
        if os.path.exists(path + ".part"):
            os.remove(path + ".part")
        print(f"error: {exc}", file=sys.stderr)
        return 3
    cache.save(qb, path)
    dims = qb.stats.get("dimensions")
    print(json.dumps({"cache": path, "rules": len(qb.rules), "dimensions": dims,
                      "complete_degree": qb.complete_degree}))
    return 0


def cmd_verify(args) -> int:
    suites = ALL_SUITES if args.suite == "all" else (args.suite,)
    needs_basis = any(s not in ("current", "self-test") for s in suites)
    qb = None
    if needs_basis:
        try:
            qb = obtain_basis(args)
        except cache.CacheError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 4
        except FileNotFoundError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        except (BudgetExceeded, IdealCollapse) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 3
    reports: List[CheckReport] = []
    for s in suites:
        reports.extend(run_suite(s, qb, args))
    lines = [json.dumps(record(r), sort_keys=True) for r in reports]
    if args.out:
        os.makedirs(os.path.dirname(os.path.abspath(args.out)), exist_ok=True)
        with open(args.out, "w") as f:
            f.write("\n".join(lines) + ("\n" if lines else ""))
    else:
        for line in lines:
            print(line)
    counts = Counter(r.status for r in reports)
    print("summary: " + ", ".join(f"{s}={counts.get(s, 0)}" for s in STATUSES), file=sys.stderr)
    return 1 if counts.get(FAIL) else 0


def load_records(paths: Iterable[str]) -> List[Dict]:
    out = []
    for path in paths:
        try:
            with open(path) as f:
                for k, line in enumerate(f, 1):
                    line = line.strip()
                    if not line:
                        continue
                    rec = json.loads(line)
                    if not isinstance(rec, dict) or rec.get("status") not in STATUSES:
                        raise ValueError(f"line {k}: not a check record")
                    out.append(rec)
        except (OSError, ValueError) as exc:
            print(f"warning: skipping {path}: {exc}", file=sys.stderr)
    return out


def summarize(records: List[Dict]) -> List[Dict]:
    groups: Dict[tuple, Counter] = defaultdict(Counter)
    for rec in records:
        prm = rec.get("params", {})
        key = (rec.get("suite", "?"), prm.get("N"), prm.get("p"), prm.get("D", prm.get("L")))
        groups[key][rec["status"]] += 1
    rows = []
    for key in sorted(groups, key=lambda k: tuple(str(x) for x in k)):
        suite, N, p, D = key
        rows.append({"suite": suite, "N": N, "p": p, "D": D,
                     **{s: groups[key].get(s, 0) for s in STATUSES}})
    return rows


def cmd_report(args) -> int:
    rows = summarize(load_records(args.files))
    header = ["suite", "N", "p", "D/L"] + list(STATUSES)
    print("  ".join(f"{h:>14}" for h in header))
    for row in rows:
        cells = [row["suite"], row["N"], row["p"], row["D"]] + [row[s] for s in STATUSES]
        print("  ".join(f"{str(c):>14}" for c in cells))
    return 1 if any(row[FAIL] for row in rows) else 0


def main(argv: Optional[List[str]] = None) -> int:
    args = parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "build-basis":
        return cmd_build_basis(args)
    if args.command == "verify":
        return cmd_verify(args)
    return cmd_report(args)


if __name__ == "__main__":
    sys.exit(main())
