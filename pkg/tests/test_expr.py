import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cfinterp.expr import (
    Const,
    EvaluationError,
    ParseError,
    derive,
    eval_at,
    eval_increment,
    parse,
    unparse,
)


@pytest.mark.parametrize(
    "text, var, at, expected",
    [
        ("1+z*z", "z", 2.0, 5.0),
        ("2*3+1", "s", 0.0, 7.0),
        ("s^2", "s", 3.0, 9.0),
        ("exp(0)", "s", 0.0, 1.0),
        ("8/4/2", "s", 0.0, 1.0),
        ("10-4-3", "s", 0.0, 3.0),
        ("-s^2", "s", 3.0, -9.0),
        ("2^-2", "s", 0.0, 0.25),
        ("(s+1)^3", "s", 1.0, 8.0),
        ("sqrt(s)*log(s)", "s", math.e ** 2, 2 * math.e),
        ("1.5e1 + .5", "s", 0.0, 15.5),
        ("sin(s)^2 + cos(s)^2", "s", 0.8, 1.0),
    ],
)
def test_parse_and_evaluate(text, var, at, expected):
    assert eval_at(parse(text, var), at) == pytest.approx(expected, rel=1e-15)


def test_constant_folding():
    assert parse("2*3+1", "s") == Const(7.0)


@pytest.mark.parametrize(
    "text, position",
    [("1+", 2), ("(s+1", 4), ("s+1)", 3), ("s + q", 4), ("s^s", 2), ("s^1.5", 2), ("s $ 1", 2), ("exp s", 4)],
)
def test_parse_errors_report_position(text, position):
    with pytest.raises(ParseError) as info:
        parse(text, "s")
    assert info.value.position == position


def test_empty_text_rejected():
    with pytest.raises(ParseError):
        parse("  ", "s")


def test_wrong_variable_is_unknown():
    with pytest.raises(ParseError, match="unknown identifier 'z'"):
        parse("z+1", "s")


@pytest.mark.parametrize("text, at", [("1/(s-1)", 1.0), ("log(s)", 0.0), ("log(s)", -1.0), ("sqrt(s)", -0.1), ("exp(s)", 1e6), ("s^-1", 0.0)])
def test_evaluation_errors(text, at):
    with pytest.raises(EvaluationError):
        eval_at(parse(text, "s"), at)


def test_evaluation_error_names_node():
    with pytest.raises(EvaluationError, match=r"1/\(s-1\)"):
        eval_at(parse("2+1/(s-1)", "s"), 1.0)


def test_derivative_examples():
    assert eval_at(derive(parse("s^2", "s")), 5.0) == 10.0
    assert eval_at(derive(parse("exp(2*s)", "s")), 0.0) == 2.0
    assert derive(parse("7", "s")) == Const(0.0)
    assert eval_at(derive(derive(parse("s^3", "s"))), 2.0) == 12.0


def test_chain_rule_against_central_difference():
    e = parse("exp(2*s)", "s")
    h = 1e-5
    fd = (eval_at(e, h) - eval_at(e, -h)) / (2 * h)
    assert abs(eval_at(derive(e), 0.0) - fd) < 1e-8


# ---------------------------------------------------------------- random expressions

def _random_expr(rng, depth):
    if depth == 0 or rng.random() < 0.25:
        return "s" if rng.random() < 0.6 else f"{rng.uniform(0.5, 2.0):.3f}"
    kind = rng.integers(0, 7)
    a = _random_expr(rng, depth - 1)
    if kind <= 2:
        b = _random_expr(rng, depth - 1)
        op = "+-*"[kind]
        return f"({a}){op}({b})"
    if kind == 3:
        b = _random_expr(rng, depth - 1)
        return f"({a})/(2+({b})^2)"
    if kind == 4:
        return f"({a})^{int(rng.integers(-2, 4))}" if rng.random() < 0.5 else f"({a})^2"
    if kind == 5:
        return f"{['exp', 'sin', 'cos'][int(rng.integers(0, 3))]}({a})"
    return f"{['log', 'sqrt'][int(rng.integers(0, 2))]}(1+({a})^2)"


def _five_point(e, p, h=1e-3):
    f = lambda x: eval_at(e, x)
    return (f(p - 2 * h) - 8 * f(p - h) + 8 * f(p + h) - f(p + 2 * h)) / (12 * h)


def test_derivatives_of_random_expressions():
    rng = np.random.default_rng(7)
    checked = 0
    while checked < 50:
        e = parse(_random_expr(rng, 3), "s")
        d = derive(e)
        points = rng.uniform(-1, 1, 10)
        try:
            samples = [(eval_at(d, p), _five_point(e, p), eval_at(e, p)) for p in points]
        except EvaluationError:
            continue
        # the finite-difference oracle is only trustworthy for moderate f and f'
        if max(max(abs(v), abs(d)) for d, _, v in samples) > 1e3:
            continue
        for exact, fd, _ in samples:
            assert abs(exact - fd) <= 1e-6 * (1 + abs(exact))
        checked += 1


def test_derivative_is_linear():
    rng = np.random.default_rng(11)
    for _ in range(30):
        t1, t2 = _random_expr(rng, 2), _random_expr(rng, 2)
        e1, e2, s = parse(t1, "s"), parse(t2, "s"), parse(f"({t1})+({t2})", "s")
        for p in rng.uniform(-1, 1, 5):
            try:
                lhs = eval_at(derive(s), p)
                rhs = eval_at(derive(e1), p) + eval_at(derive(e2), p)
            except EvaluationError:
                continue
            assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)


texts = st.integers(0, 2 ** 32 - 1).map(lambda seed: _random_expr(np.random.default_rng(seed), 4))


@settings(max_examples=200, deadline=None)
@given(texts)
def test_unparse_round_trip(text):
    ast = parse(text, "s")
    again = parse(unparse(ast), "s")
    assert again == ast
    assert parse(unparse(again), "s") == again


@settings(max_examples=100, deadline=None)
@given(texts)
def test_unparse_round_trip_of_derivatives(text):
    d = derive(parse(text, "s"))
    assert parse(unparse(d), "s") == d


@pytest.mark.parametrize("text", ["s", "s^2", "exp(s)", "log(s)", "sqrt(s)", "sin(3*s)", "cos(s)/s", "s^-3", "2-s*s"])
def test_increment_matches_difference(text):
    e = parse(text, "s")
    base = 1.3
    for delta in (0.5, 1e-3, -1e-3, 1e-9):
        naive = eval_at(e, base + delta) - eval_at(e, base)
        assert eval_increment(e, base, delta) == pytest.approx(naive, rel=1e-6, abs=1e-15)


def test_increment_keeps_relative_accuracy():
    e = parse("exp(s)", "s")
    delta = 1e-12
    assert eval_increment(e, 0.0, delta) == pytest.approx(math.expm1(delta), rel=1e-15)
    assert eval_increment(parse("s", "s"), 0.3, 1e-17) == 1e-17
