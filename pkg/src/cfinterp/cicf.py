"""Interpolation continued C-fractions for functions of one variable.

The model is ::

    D(x) = a_0 + a_1 (x - x_0) / (1 + a_2 (x - x_1) / (1 + ... + a_n (x - x_{n-1}) / 1))

with ``a_0 = y_0``, ``a_1 = (y_1 - y_0) / (x_1 - x_0)`` and, for ``k >= 2``, ``a_k``
obtained by inverting the fraction at ``x_k``::

    a_k = (-1 + a_{k-1}(x_k - x_{k-2}) / (-1 + ... + a_1 (x_k - x_0) / (y_k - y_0))) / (x_k - x_{k-1})
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .fraction import BreakdownError, FiniteFraction, eval_backward

#: Relative threshold for near-vanishing denominators while fitting.
NEAR_BREAKDOWN = 1e-12


@dataclass(frozen=True)
class CIcf:
    nodes: np.ndarray
    coefficients: np.ndarray

    def __post_init__(self):
        nodes = np.array(self.nodes, dtype=float)
        coefs = np.array(self.coefficients, dtype=float)
        if nodes.ndim != 1 or nodes.shape != coefs.shape or nodes.size == 0:
            raise ValueError("nodes and coefficients must be equal-length 1-d arrays")
        if not np.all(np.isfinite(coefs)):
            raise ValueError("coefficients must be finite")
        _check_distinct(nodes)
        nodes.setflags(write=False)
        coefs.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "coefficients", coefs)

    @property
    def n(self) -> int:
        return self.nodes.size - 1

    def __call__(self, x: float) -> float:
        return evaluate(self, x)

    def to_json(self) -> str:
        doc = {
            "nodes": [float(v) for v in self.nodes],
            "coefficients": [float(v) for v in self.coefficients],
        }
        return json.dumps(doc, indent=2)

    @classmethod
    def from_json(cls, text: str) -> CIcf:
        doc = json.loads(text)
        return cls(doc["nodes"], doc["coefficients"])


def _check_distinct(nodes: np.ndarray) -> None:
    if nodes.size < 2:
        return
    span = float(np.ptp(nodes))
    gaps = np.abs(nodes[:, None] - nodes[None, :])
    np.fill_diagonal(gaps, np.inf)
    if gaps.min() <= 1e-12 * span or span == 0.0:
        raise ValueError("interpolation nodes must be pairwise distinct")


def fit_coefficients(nodes: Sequence[float], values: Sequence[float]) -> CIcf:
    """Fit the C-fraction through ``(nodes[i], values[i])``.

    Raises
    ------
    BreakdownError
        When a chain denominator vanishes (``k`` is set on the exception);
        the data admit no C-fraction with this node order.
    """
    x = np.asarray(nodes, dtype=float)
    y = np.asarray(values, dtype=float)
    if x.ndim != 1 or x.shape != y.shape or x.size == 0:
        raise ValueError("nodes and values must be equal-length, non-empty 1-d arrays")
    _check_distinct(x)
    tol = NEAR_BREAKDOWN * max(1.0, float(np.max(np.abs(y))))
    a = np.zeros(x.size)
    a[0] = y[0]
    if x.size > 1:
        a[1] = (y[1] - y[0]) / (x[1] - x[0])
    for k in range(2, x.size):
        # outermost floor first: (a_{k-1}(x_k - x_{k-2}), -1), ..., (a_1(x_k - x_0), y_k - y_0)
        floors = [(a[j] * (x[k] - x[j - 1]), -1.0) for j in range(k - 1, 1, -1)]
        floors.append((a[1] * (x[k] - x[0]), y[k] - y[0]))
        try:
            chain = eval_backward(FiniteFraction(-1.0, tuple(floors)), tol=tol)
        except BreakdownError as exc:
            raise BreakdownError(
                f"C-fraction fit breaks down at k={k} (floor {exc.floor}): no interpolating "
                "C-fraction exists for this node order",
                floor=exc.floor,
                k=k,
            ) from None
        a[k] = chain / (x[k] - x[k - 1])
    return CIcf(x, a)


def evaluate(model: CIcf, x: float) -> float:
    """Value of the fitted fraction at ``x``; raises BreakdownError at a pole."""
    nodes, a = model.nodes, model.coefficients
    floors = tuple((a[i] * (x - nodes[i - 1]), 1.0) for i in range(1, a.size))
    return eval_backward(FiniteFraction(a[0], floors))
