from __future__ import annotations

import argparse
from typing import List

from rknet.tableau import check_order_conditions, highest_order, validate_tableau

from .common import configure_logging, handles_errors, resolve_tableau


@handles_errors
def cmd_tableau(argv: List[str]) -> int:
    """Validate a Butcher tableau and print its order conditions"""
    p = argparse.ArgumentParser(prog="rknet tableau")
    p.add_argument("--tableau", default="rk4", help="Builtin name or tableau JSON path")
    p.add_argument("--order", type=int, default=0, help="Check conditions up to this order (default: highest passing)")
    p.add_argument("-v", "--verbose", action="count", default=0)
    ns = p.parse_args(argv)
    configure_logging(ns.verbose)

    t = resolve_tableau(ns.tableau)
    report = validate_tableau(t)
    print(f"[tableau] {t.name}: s={t.s}")
    for w in report.warnings:
        print(f"warning: {w}")
    if not report.ok:
        for v in report.violations:
            print(f"violation: {v}")
        return 3

    order = ns.order or max(1, min(4, highest_order(t) + 1))
    for cond in check_order_conditions(t, order):
        status = "pass" if cond.passed else "FAIL"
        print(f"  order {cond.order}  {cond.label:<32} {cond.value!r:<24} {status}")
    print(f"[tableau] highest order satisfied: {highest_order(t)}")
    return 0
