import json
from pathlib import Path

import pytest

from rknet.errors import ConfigError, ParseError, UnknownTableauError, ValidationError
from rknet.tableau import (
    ButcherTableau,
    available_tableaus,
    builtin,
    check_order_conditions,
    highest_order,
    parse_tableau,
    serialize_tableau,
    validate_tableau,
)


def doc(**fields):
    base = {"name": "t", "s": 2, "a": [[], ["1/2"]], "b": [0, 1], "c": [0, "1/2"]}
    base.update(fields)
    return json.dumps(base)


def test_builtin_values():
    rk1 = builtin("rk1")
    assert (rk1.s, rk1.b, rk1.c) == (1, (1.0,), (0.0,))

    rk2 = builtin("rk2")
    assert rk2.b == (0.0, 1.0) and rk2.a[1] == (0.5,) and rk2.c == (0.0, 0.5)

    rk4 = builtin("rk4")
    assert rk4.b == (1 / 6, 1 / 3, 1 / 3, 1 / 6)
    assert rk4.a == ((), (0.5,), (0.0, 0.5), (0.0, 0.0, 1.0))
    assert rk4.c == (0.0, 0.5, 0.5, 1.0)


def test_builtin_aliases():
    assert builtin("euler") == builtin("rk1")
    assert builtin("midpoint") == builtin("rk2")
    assert builtin("classic") == builtin("rk4")
    assert "rk4" in available_tableaus()


def test_unknown_builtin_lists_names():
    with pytest.raises(UnknownTableauError) as info:
        builtin("rk3")
    assert "rk1" in str(info.value) and "rk4" in str(info.value)
    assert isinstance(info.value, LookupError)
    assert info.value.exit_code == 2


def test_parse_matches_builtin():
    text = json.dumps(
        {
            "name": "rk4",
            "s": 4,
            "a": [[0, 0, 0, 0], ["1/2", 0, 0, 0], [0, 0.5, 0, 0], [0, 0, 1, 0]],
            "b": ["1/6", "1/3", "2/6", "1/6"],
            "c": [0, "1/2", 0.5, "4/4"],
        }
    )
    assert parse_tableau(text) == builtin("rk4")


def test_parse_rejects_diagonal_entry():
    with pytest.raises(ValidationError, match="diagonal"):
        parse_tableau(json.dumps({"name": "x", "s": 1, "a": [[1]], "b": [1], "c": [0]}))


def test_parse_rejects_inconsistent_weights():
    with pytest.raises(ValidationError, match="consistency") as info:
        parse_tableau(doc(b=[0.5, 0.4]))
    assert any("0.9" in v for v in info.value.violations)


@pytest.mark.parametrize(
    "text, error",
    [
        ("{", ParseError),
        ('["not", "an", "object"]', ParseError),
        (doc(s=0), ParseError),
        (doc(b=["1/0", 1]), ParseError),
        (doc(b=["one", 1]), ParseError),
        (doc(b=[1]), ValidationError),
        (doc(a=[[]]), ValidationError),
        (doc(a=[[], []]), ValidationError),
        (doc(c=[0.1, 0.5]), ValidationError),
    ],
)
def test_parse_errors(text, error):
    with pytest.raises(error):
        parse_tableau(text)


def test_missing_field_is_named():
    text = json.dumps({"name": "x", "s": 1, "a": [[]], "b": [1]})
    with pytest.raises(ParseError, match="'c'"):
        parse_tableau(text)


def test_validate_reports():
    assert validate_tableau(builtin("rk4")).violations == []
    assert validate_tableau(builtin("rk4")).warnings == []

    shifted = ButcherTableau("rk2-shift", 2, ((), (0.5,)), (0.0, 1.0), (0.0, 0.4))
    report = validate_tableau(shifted)
    assert report.ok and len(report.warnings) == 1

    doubled = ButcherTableau("double", 2, ((), (0.5,)), (1.0, 1.0), (0.0, 0.5))
    report = validate_tableau(doubled)
    assert len(report.violations) == 1 and "consistency" in report.violations[0]


def test_row_sum_mismatch_only_warns_when_parsing(caplog):
    t = parse_tableau(doc(c=[0, 0.4]))
    assert t.c == (0.0, 0.4)
    assert "row sum" in caplog.text


def test_rk4_passes_all_order_four_conditions():
    conds = check_order_conditions(builtin("rk4"), 4)
    assert len(conds) == 8
    assert all(c.passed for c in conds)


def test_rk1_fails_order_two():
    conds = check_order_conditions(builtin("rk1"), 2)
    assert conds[0].passed
    assert not conds[1].passed and conds[1].value == 0.0


def test_rk2_passes_two_fails_three():
    assert all(c.passed for c in check_order_conditions(builtin("rk2"), 2))
    third = [c for c in check_order_conditions(builtin("rk2"), 3) if c.order == 3]
    assert not third[0].passed and third[0].value == 0.25


@pytest.mark.parametrize("name, nominal", [("rk1", 1), ("rk2", 2), ("rk4", 4)])
def test_builtins_have_nominal_order(name, nominal):
    t = builtin(name)
    assert all(c.passed for c in check_order_conditions(t, nominal))
    if nominal < 4:
        assert not all(c.passed for c in check_order_conditions(t, nominal + 1))
    assert highest_order(t) == nominal


def test_order_out_of_range():
    for p in (0, 5):
        with pytest.raises(ConfigError):
            check_order_conditions(builtin("rk4"), p)


@pytest.mark.parametrize("name", ["rk1", "rk2", "rk4"])
def test_serialize_round_trip(name):
    t = builtin(name)
    assert parse_tableau(serialize_tableau(t)) == t


@pytest.mark.parametrize("filename, order", [("rk38.json", 4), ("heun.json", 2)])
def test_example_tableau_files(filename, order):
    path = Path(__file__).resolve().parents[1] / "data" / filename
    t = parse_tableau(path.read_text(encoding="utf-8"))
    assert validate_tableau(t).warnings == []
    assert highest_order(t) == order
