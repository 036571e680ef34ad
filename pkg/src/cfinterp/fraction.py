"""Finite continued fractions ``b0 + a1/(b1 + a2/(b2 + ... + an/bn))``.

Two evaluators are provided. :func:`eval_backward` folds the fraction from
the innermost floor outwards and is the runtime path. :func:`eval_forward`
runs the numerator/denominator three-term recurrence

    A_i = b_i A_{i-1} + a_i A_{i-2},   B_i = b_i B_{i-1} + a_i B_{i-2},
    A_{-1} = 1, B_{-1} = 0, A_0 = b0, B_0 = 1,

which also carries first derivatives for :func:`eval_with_derivative`.
The batched variants evaluate many fractions of equal depth in one call and
are backed by the compiled kernels when available.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _kernels

#: Absolute threshold below which a denominator counts as zero.
BREAKDOWN_TOL = 1e-300


class BreakdownError(ArithmeticError):
    """A denominator vanished while evaluating or fitting a fraction.

    Attributes
    ----------
    floor : int or None
        1-based floor whose denominator vanished.
    k : int or None
        Level being fitted or evaluated, when the caller knows it.
    xi : float or None
        Grid position, for integral fractions.
    """

    def __init__(self, message, floor=None, k=None, xi=None):
        super().__init__(message)
        self.floor = floor
        self.k = k
        self.xi = xi


@dataclass(frozen=True)
class FiniteFraction:
    b0: float
    floors: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        floors = tuple((float(a), float(b)) for a, b in self.floors)
        object.__setattr__(self, "b0", float(self.b0))
        object.__setattr__(self, "floors", floors)
        if not np.isfinite(self.b0) or not all(
            np.isfinite(a) and np.isfinite(b) for a, b in floors
        ):
            raise ValueError("fraction entries must be finite")

    @property
    def depth(self) -> int:
        return len(self.floors)

    def append(self, a: float, b: float) -> FiniteFraction:
        return FiniteFraction(self.b0, self.floors + ((a, b),))

    def _arrays(self):
        n = len(self.floors)
        a = np.array([p[0] for p in self.floors], dtype=float).reshape(1, n)
        b = np.array([p[1] for p in self.floors], dtype=float).reshape(1, n)
        return np.array([self.b0]), a, b


@dataclass(frozen=True)
class FractionDerivativeInput:
    """A fraction together with the derivatives of each of its entries."""

    base: FiniteFraction
    d_b0: float = 0.0
    d_floors: tuple[tuple[float, float], ...] = field(default=())

    def __post_init__(self):
        d_floors = tuple((float(a), float(b)) for a, b in self.d_floors)
        if not d_floors and self.base.floors:
            d_floors = tuple((0.0, 0.0) for _ in self.base.floors)
        if len(d_floors) != len(self.base.floors):
            raise ValueError("d_floors must match base.floors in length")
        object.__setattr__(self, "d_floors", d_floors)
        object.__setattr__(self, "d_b0", float(self.d_b0))


def _raise_for(fail, tol, what="denominator"):
    bad = np.flatnonzero(fail)
    if bad.size:
        row = int(bad[0])
        floor = int(fail[row])
        raise BreakdownError(
            f"{what} of floor {floor} vanished (|.| < {tol:g})", floor=floor
        )


def eval_backward(cf: FiniteFraction, tol: float = BREAKDOWN_TOL) -> float:
    """Value of ``cf`` folded innermost-first.

    Raises
    ------
    BreakdownError
        If some ``b_i + tail`` has absolute value below ``tol``.
    """
    b0, a, b = cf._arrays()
    values, fail = _kernels.impl.backward_batch(b0, a, b, tol)
    _raise_for(fail, tol)
    return float(values[0])


def eval_forward(cf: FiniteFraction, tol: float = BREAKDOWN_TOL) -> tuple[float, float, float]:
    """``(A_n, B_n, A_n / B_n)`` from the three-term recurrence."""
    b0, a, b = cf._arrays()
    num, den = _kernels.impl.forward_batch(b0, a, b)
    num, den = float(num[0]), float(den[0])
    if abs(den) < tol:
        raise BreakdownError(f"B_{cf.depth} vanished", floor=cf.depth)
    return num, den, num / den


def eval_with_derivative(inp: FractionDerivativeInput, tol: float = BREAKDOWN_TOL) -> tuple[float, float]:
    """Value and first derivative of a fraction whose entries move along a path."""
    b0, a, b = inp.base._arrays()
    n = inp.base.depth
    da = np.array([p[0] for p in inp.d_floors], dtype=float).reshape(1, n)
    db = np.array([p[1] for p in inp.d_floors], dtype=float).reshape(1, n)
    value, d_value, fail = eval_with_derivative_batch(
        b0, a, b, np.array([inp.d_b0]), da, db, tol
    )
    _raise_for(fail, tol, "B_n")
    return float(value[0]), float(d_value[0])


def _as_batch(b0, a, b):
    b0 = np.ascontiguousarray(b0, dtype=float)
    a = np.ascontiguousarray(a, dtype=float).reshape(b0.shape[0], -1)
    b = np.ascontiguousarray(b, dtype=float).reshape(a.shape)
    return b0, a, b


def eval_backward_batch(b0, a, b, tol: float = BREAKDOWN_TOL):
    """Evaluate fractions row-wise; returns ``(values, fail)``.

    ``fail[r]`` is 0 for a clean row and otherwise the floor that broke down;
    ``values[r]`` is NaN there. Nothing is raised.
    """
    b0, a, b = _as_batch(b0, a, b)
    return _kernels.impl.backward_batch(b0, a, b, tol)


def eval_with_derivative_batch(b0, a, b, db0, da, db, tol: float = BREAKDOWN_TOL):
    """Row-wise value and derivative; returns ``(values, d_values, fail)``.

    ``fail[r]`` is the depth when ``|B_n| < tol`` and 0 otherwise.
    """
    b0, a, b = _as_batch(b0, a, b)
    db0, da, db = _as_batch(db0, da, db)
    num, den, dnum, dden = _kernels.impl.forward_deriv_batch(b0, a, b, db0, da, db)
    bad = np.abs(den) < tol
    safe = np.where(bad, 1.0, den)
    values = np.where(bad, np.nan, num / safe)
    d_values = np.where(bad, np.nan, (dnum * safe - num * dden) / (safe * safe))
    fail = np.where(bad, a.shape[1], 0).astype(np.intp)
    return values, d_values, fail


def from_sequences(b0: float, numerators: Sequence[float], denominators: Sequence[float]) -> FiniteFraction:
    return FiniteFraction(b0, tuple(zip(numerators, denominators)))
