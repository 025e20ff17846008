"""Butcher tableaus for explicit Runge-Kutta schemes.

Document format (JSON)::

    {"name": "rk2", "s": 2, "a": [[], ["1/2"]], "b": [0, 1], "c": [0, "1/2"]}

Row ``i`` of ``a`` lists ``a_i1 .. a_i,i-1``. A row may also be written out to
full length ``s`` as long as the entries on and above the diagonal are zero.
Numbers are JSON numbers or ``"p/q"`` strings, which are rounded once to the
nearest binary64.
"""

from __future__ import annotations

import json
import logging
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, List, Tuple

import numpy as np

from .defaults import read_default_text
from .errors import ConfigError, ParseError, UnknownTableauError, ValidationError

logger = logging.getLogger(__name__)

SUM_TOLERANCE = 1e-12
ORDER_TOLERANCE = 1e-12

_BUILTINS = {"rk1": "rk1", "rk2": "rk2", "rk4": "rk4", "euler": "rk1", "midpoint": "rk2", "classic": "rk4"}
_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*/\s*([+-]?\d+)\s*$")


@dataclass(frozen=True)
class ButcherTableau:
    name: str
    s: int
    a: Tuple[Tuple[float, ...], ...]
    b: Tuple[float, ...]
    c: Tuple[float, ...]

    def a_matrix(self) -> np.ndarray:
        full = np.zeros((self.s, self.s), dtype=np.float64)
        for i, row in enumerate(self.a):
            full[i, : len(row)] = row
        return full


@dataclass
class TableauReport:
    violations: List[str] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


@dataclass(frozen=True)
class OrderCondition:
    order: int
    label: str
    value: float
    expected: float

    @property
    def passed(self) -> bool:
        return abs(self.value - self.expected) <= ORDER_TOLERANCE


def available_tableaus() -> List[str]:
    return sorted(_BUILTINS)


@lru_cache(maxsize=None)
def builtin(name: str) -> ButcherTableau:
    key = name.strip().lower()
    if key not in _BUILTINS:
        raise UnknownTableauError(name, available_tableaus())
    return parse_tableau(read_default_text(f"{_BUILTINS[key]}.json"))


# ----------------------------
# Parsing
# ----------------------------

def _coefficient(value: Any, where: str) -> float:
    if isinstance(value, bool):
        raise ParseError(f"{where}: expected a number or 'p/q', got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        m = _RATIONAL_RE.match(value)
        if not m:
            raise ParseError(f"{where}: expected 'p/q' with integer p and q, got {value!r}")
        p, q = int(m.group(1)), int(m.group(2))
        if q == 0:
            raise ParseError(f"{where}: zero denominator in {value!r}")
        return float(Fraction(p, q))
    raise ParseError(f"{where}: expected a number or 'p/q', got {value!r}")


def _coefficient_list(value: Any, where: str) -> List[float]:
    if not isinstance(value, list):
        raise ParseError(f"{where}: expected an array")
    return [_coefficient(v, f"{where}[{i}]") for i, v in enumerate(value)]


def parse_tableau(text: str) -> ButcherTableau:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"malformed tableau document at line {e.lineno} column {e.colno}: {e.msg}") from e
    if not isinstance(doc, dict):
        raise ParseError("tableau document must be an object")
    for key in ("name", "s", "a", "b", "c"):
        if key not in doc:
            raise ParseError(f"tableau document is missing {key!r}")

    s = doc["s"]
    if isinstance(s, bool) or not isinstance(s, int) or s < 1:
        raise ParseError(f"s: expected a positive integer, got {s!r}")
    if not isinstance(doc["a"], list):
        raise ParseError("a: expected an array of rows")

    problems: List[str] = []
    rows: List[Tuple[float, ...]] = []
    if len(doc["a"]) != s:
        problems.append(f"a: expected {s} rows, got {len(doc['a'])}")
    for i, raw in enumerate(doc["a"]):
        entries = _coefficient_list(raw, f"a[{i}]")
        if len(entries) > s:
            problems.append(f"a[{i}]: row has {len(entries)} entries, more than s={s}")
        for j in range(i, len(entries)):
            if entries[j] != 0.0:
                problems.append(f"a[{i}][{j}] = {entries[j]!r} is on or above the diagonal (scheme must be explicit)")
        if len(entries) < i:
            problems.append(f"a[{i}]: row needs {i} entries, got {len(entries)}")
        rows.append(tuple(entries[:i]))

    t = ButcherTableau(
        name=str(doc["name"]),
        s=s,
        a=tuple(rows),
        b=tuple(_coefficient_list(doc["b"], "b")),
        c=tuple(_coefficient_list(doc["c"], "c")),
    )
    report = validate_tableau(t)
    problems.extend(p for p in report.violations if p not in problems)
    if problems:
        raise ValidationError(f"invalid tableau {t.name!r}", problems)
    for w in report.warnings:
        logger.warning("tableau %s: %s", t.name, w)
    return t


def serialize_tableau(t: ButcherTableau) -> str:
    doc = {"name": t.name, "s": t.s, "a": [list(row) for row in t.a], "b": list(t.b), "c": list(t.c)}
    return json.dumps(doc, indent=2) + "\n"


# ----------------------------
# Checks
# ----------------------------

def validate_tableau(t: ButcherTableau) -> TableauReport:
    report = TableauReport()
    if t.s < 1:
        report.violations.append(f"s must be positive, got {t.s}")
        return report
    if len(t.b) != t.s:
        report.violations.append(f"b: expected {t.s} weights, got {len(t.b)}")
    if len(t.c) != t.s:
        report.violations.append(f"c: expected {t.s} abscissae, got {len(t.c)}")
    if len(t.a) != t.s:
        report.violations.append(f"a: expected {t.s} rows, got {len(t.a)}")
    for i, row in enumerate(t.a):
        if len(row) > i:
            report.violations.append(f"a[{i}]: stores {len(row)} entries, explicit row {i} allows {i}")
        elif len(row) < i:
            report.violations.append(f"a[{i}]: row needs {i} entries, got {len(row)}")

    values = [v for row in t.a for v in row] + list(t.b) + list(t.c)
    if not all(math.isfinite(v) for v in values):
        report.violations.append("coefficients must be finite")
        return report
    if report.violations:
        return report

    if t.c[0] != 0.0:
        report.violations.append(f"c[0] must be 0, got {t.c[0]!r}")
    total = math.fsum(t.b)
    if abs(total - 1.0) > SUM_TOLERANCE:
        report.violations.append(f"b: weights sum to {total!r}, expected 1 (consistency)")

    for i in range(1, t.s):
        row_sum = math.fsum(t.a[i])
        if abs(t.c[i] - row_sum) > SUM_TOLERANCE:
            report.warnings.append(f"c[{i}] = {t.c[i]!r} differs from row sum of a[{i}] = {row_sum!r}")
    return report


def check_order_conditions(t: ButcherTableau, p: int) -> List[OrderCondition]:
    """Rooted-tree order conditions of orders 1..p (p at most 4)."""
    if not 1 <= p <= 4:
        raise ConfigError(f"order must be between 1 and 4, got {p}")
    a = t.a_matrix()
    b = np.array(t.b, dtype=np.float64)
    c = np.array(t.c, dtype=np.float64)
    ac = a @ c

    conds = [OrderCondition(1, "sum b_i = 1", float(b.sum()), 1.0)]
    if p >= 2:
        conds.append(OrderCondition(2, "sum b_i c_i = 1/2", float(b @ c), 1 / 2))
    if p >= 3:
        conds.append(OrderCondition(3, "sum b_i c_i^2 = 1/3", float(b @ c**2), 1 / 3))
        conds.append(OrderCondition(3, "sum b_i a_ij c_j = 1/6", float(b @ ac), 1 / 6))
    if p >= 4:
        conds.append(OrderCondition(4, "sum b_i c_i^3 = 1/4", float(b @ c**3), 1 / 4))
        conds.append(OrderCondition(4, "sum b_i c_i a_ij c_j = 1/8", float((b * c) @ ac), 1 / 8))
        conds.append(OrderCondition(4, "sum b_i a_ij c_j^2 = 1/12", float(b @ (a @ c**2)), 1 / 12))
        conds.append(OrderCondition(4, "sum b_i a_ij a_jk c_k = 1/24", float(b @ (a @ ac)), 1 / 24))
    return conds


def highest_order(t: ButcherTableau) -> int:
    """Largest p <= 4 for which every condition up to order p holds (0 if none)."""
    best = 0
    for p in range(1, 5):
        if all(cond.passed for cond in check_order_conditions(t, p)):
            best = p
        else:
            break
    return best
