import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cfinterp.fraction import (
    BreakdownError,
    FiniteFraction,
    FractionDerivativeInput,
    eval_backward,
    eval_forward,
    eval_with_derivative,
)


def fib(k):
    a, b = 0, 1
    for _ in range(k):
        a, b = b, a + b
    return a


def test_empty_fraction_is_b0(backend):
    cf = FiniteFraction(1.0)
    assert eval_backward(cf) == 1.0
    assert eval_forward(cf) == (1.0, 1.0, 1.0)


def test_two_floor_example(backend):
    cf = FiniteFraction(0.0, ((1, 2), (1, 2)))
    assert eval_backward(cf) == pytest.approx(0.4, abs=1e-15)
    assert eval_forward(cf)[2] == pytest.approx(0.4, abs=1e-15)


def test_all_ones_gives_fibonacci_ratio(backend):
    cf = FiniteFraction(1.0, ((1, 1),) * 5)
    num, den, value = eval_forward(cf)
    assert (num, den) == (fib(7), fib(6)) == (13, 8)
    assert eval_backward(cf) == value == 1.625


def test_backward_breakdown_names_floor(backend):
    # 1 + 1/(1 + 1/(-1)) : floor 1 denominator is 1 - 1 = 0
    with pytest.raises(BreakdownError) as info:
        eval_backward(FiniteFraction(1.0, ((1, 1), (1, -1))))
    assert info.value.floor == 1
    with pytest.raises(BreakdownError) as info:
        eval_backward(FiniteFraction(1.0, ((1, 2), (1, 0))))
    assert info.value.floor == 2


def test_forward_breakdown():
    with pytest.raises(BreakdownError):
        eval_forward(FiniteFraction(1.0, ((1, 1), (1, -1))))


def test_non_finite_entries_rejected():
    with pytest.raises(ValueError):
        FiniteFraction(math.inf)
    with pytest.raises(ValueError):
        FiniteFraction(0.0, ((1.0, math.nan),))


def test_derivative_of_constant_fraction_is_zero(backend):
    inp = FractionDerivativeInput(FiniteFraction(1.0, ((2, 3), (4, 5))))
    assert eval_with_derivative(inp)[1] == 0.0


def test_single_floor_quotient_rule(backend):
    t = 0.7
    inp = FractionDerivativeInput(FiniteFraction(0.0, ((t, 1.0),)), 0.0, ((1.0, 0.0),))
    value, d = eval_with_derivative(inp)
    assert value == pytest.approx(t)
    assert d == pytest.approx(1.0)


def _path(t, coeffs):
    # smooth coefficient paths c0 + c1*t + c2*sin(t) per entry
    vals = coeffs[:, 0] + coeffs[:, 1] * t + coeffs[:, 2] * np.sin(t)
    dvals = coeffs[:, 1] + coeffs[:, 2] * np.cos(t)
    return vals, dvals


def _fraction_on_path(t, coeffs):
    v, d = _path(t, coeffs)
    floors = tuple(zip(v[1::2], v[2::2]))
    d_floors = tuple(zip(d[1::2], d[2::2]))
    return FractionDerivativeInput(FiniteFraction(v[0], floors), d[0], d_floors)


def test_derivative_matches_central_differences(backend, rng):
    for _ in range(20):
        coeffs = rng.uniform(-1, 1, size=(7, 3))
        coeffs[2::2, 0] += 3.0  # keep denominators away from zero
        t = rng.uniform(-0.5, 0.5)
        _, d = eval_with_derivative(_fraction_on_path(t, coeffs))
        h = 1e-5
        fd = (eval_backward(_fraction_on_path(t + h, coeffs).base)
              - eval_backward(_fraction_on_path(t - h, coeffs).base)) / (2 * h)
        assert abs(d - fd) <= 1e-6 * max(1.0, abs(d))


def test_derivative_fd_error_is_second_order(backend, rng):
    coeffs = rng.uniform(-1, 1, size=(7, 3))
    coeffs[2::2, 0] += 3.0
    t = 0.3
    _, d = eval_with_derivative(_fraction_on_path(t, coeffs))

    def fd_err(h):
        up = eval_backward(_fraction_on_path(t + h, coeffs).base)
        dn = eval_backward(_fraction_on_path(t - h, coeffs).base)
        return abs((up - dn) / (2 * h) - d)

    errs = [fd_err(0.1 / 2 ** i) for i in range(4)]
    for coarse, fine in zip(errs, errs[1:]):
        assert coarse / fine >= 3.5


def test_mismatched_derivative_lengths():
    with pytest.raises(ValueError):
        FractionDerivativeInput(FiniteFraction(0.0, ((1, 1),)), 0.0, ((0, 0), (0, 0)))


finite = st.floats(-10, 10, allow_nan=False)


@settings(max_examples=200, deadline=None)
@given(b0=finite, floors=st.lists(st.tuples(finite, finite), max_size=6))
def test_backward_and_forward_agree(b0, floors):
    cf = FiniteFraction(b0, tuple(floors))
    try:
        back = eval_backward(cf)
        _, den, fwd = eval_forward(cf)
    except (BreakdownError, ZeroDivisionError):
        return
    # only compare where the fraction is well conditioned: every tail bounded away from 0
    tails = []
    t = cf.floors[-1][1] if cf.floors else b0
    for i in range(len(cf.floors), 0, -1):
        tails.append(t)
        t = (cf.floors[i - 2][1] if i > 1 else b0) + cf.floors[i - 1][0] / t
    if tails and min(abs(x) for x in tails) < 1e-2:
        return
    if not all(math.isfinite(v) for v in (back, fwd)) or abs(back) > 1e6:
        return
    assert abs(back - fwd) <= 1e-9 * (1 + abs(back))


@settings(max_examples=200, deadline=None)
@given(b0=finite, floors=st.lists(st.tuples(finite, st.floats(1.5, 5)), max_size=6), b_new=finite)
def test_appending_zero_numerator_keeps_value(b0, floors, b_new):
    cf = FiniteFraction(b0, tuple(floors))
    if abs(b_new) < 1e-3:
        b_new = 1.0
    try:
        before = eval_backward(cf)
    except BreakdownError:
        return
    assert eval_backward(cf.append(0.0, b_new)) == before


def test_random_fractions_forward_backward_1e12(backend, rng):
    for _ in range(1000):
        n = int(rng.integers(0, 9))
        floors = tuple(zip(rng.uniform(-1, 1, n), rng.uniform(2, 3, n)))
        cf = FiniteFraction(rng.uniform(-5, 5), floors)
        back = eval_backward(cf)
        fwd = eval_forward(cf)[2]
        assert abs(back - fwd) <= 1e-12 * (1 + abs(back))
