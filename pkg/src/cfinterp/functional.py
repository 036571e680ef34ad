"""Functionals ``F(x) = f(int_0^1 x(t) dt)`` and continual node families.

For node functions ``x_0, ..., x_n`` the continual node ``x^i(., xi)`` equals
``x_0`` left of ``xi`` and ``x_i`` from ``xi`` on. Its moment is

    s_i(xi) = int_0^xi x_0 + int_xi^1 x_i,

and ``d/dxi F(x^i(., xi)) = f'(s_i(xi)) * (x_0(xi) - x_i(xi))``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .expr import Ast, derive, eval_at, eval_increment, parse
from .grid import (
    DEFAULT_CELLS,
    GridFunction,
    PiecewiseGridFunction,
    integrate_range,
    sample_expression,
    tail_integral_table,
)

#: Minimum pointwise gap between two node functions.
NODE_SEPARATION = 1e-9


class Functional:
    """``F(x) = f(int_0^1 x)`` with a lazily grown cache of ``f', f'', ...``."""

    def __init__(self, f: Ast):
        self.f = f
        self._derivs = [f]

    @classmethod
    def from_text(cls, text: str) -> Functional:
        return cls(parse(text, "s"))

    def derivative(self, order: int) -> Ast:
        while len(self._derivs) <= order:
            self._derivs.append(derive(self._derivs[-1]))
        return self._derivs[order]

    def __call__(self, x) -> float:
        return apply_F(self, x)


@dataclass
class NodeSystem:
    """Node functions ``x_0..x_n`` on a shared grid plus the outer function ``f``."""

    node_fns: Sequence[GridFunction]
    functional: Functional
    _tails: dict = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self):
        self.node_fns = tuple(self.node_fns)
        if len(self.node_fns) < 2:
            raise ValueError("a node system needs at least x_0 and x_1 (n >= 1)")
        n_cells = self.node_fns[0].n_cells
        if any(g.n_cells != n_cells for g in self.node_fns):
            raise ValueError("all node functions must share one grid")
        for i in range(len(self.node_fns)):
            for k in range(i + 1, len(self.node_fns)):
                gap = np.min(np.abs(self.node_fns[i].values - self.node_fns[k].values))
                if not gap > NODE_SEPARATION:
                    raise ValueError(
                        f"node functions x_{i} and x_{k} are not separated (min gap {gap:.3g})"
                    )

    @classmethod
    def from_expressions(cls, nodes: Sequence[str], f: str, n_cells: int = DEFAULT_CELLS) -> NodeSystem:
        fns = [sample_expression(parse(str(text), "z"), n_cells) for text in nodes]
        return cls(fns, Functional.from_text(f))

    @property
    def n(self) -> int:
        return len(self.node_fns) - 1

    @property
    def n_cells(self) -> int:
        return self.node_fns[0].n_cells

    @property
    def f(self) -> Ast:
        return self.functional.f

    @property
    def f_prime(self) -> Ast:
        return self.functional.derivative(1)

    def base_moment(self) -> float:
        """``s_0 = int_0^1 x_0``."""
        return integrate_range(self.node_fns[0], 0, self.n_cells)

    def moment_increments(self, k: int) -> np.ndarray:
        """``s_k(xi_j) - s_0 = int_{xi_j}^1 (x_k - x_0)`` for every grid ``j``."""
        if k not in self._tails:
            diff = self.node_fns[k] - self.node_fns[0]
            self._tails[k] = tail_integral_table(diff).values
        return self._tails[k]

    def moments(self, k: int) -> np.ndarray:
        """``s_k(xi_j)`` split at the grid-resident ``xi_j``."""
        c0 = self.node_fns[0].cumulative()
        ck = self.node_fns[k].cumulative()
        return c0 + (ck[-1] - ck)


def continual_node(sys: NodeSystem, i: int, xi_index: int):
    """Samples of ``x^i(., xi)`` with ``xi = xi_index / N`` and ``H(0) = 1``.

    ``i = 0`` returns ``x_0``; ``xi_index = 0`` returns ``x_i``. Otherwise the
    result is a :class:`PiecewiseGridFunction` with a jump at ``xi_index``.
    """
    n_cells = sys.n_cells
    if not 0 <= i <= sys.n:
        raise IndexError(f"node index {i} outside 0..{sys.n}")
    if not 0 <= xi_index <= n_cells:
        raise IndexError(f"xi_index {xi_index} outside 0..{n_cells}")
    if i == 0:
        return sys.node_fns[0]
    if xi_index == 0:
        return sys.node_fns[i]
    return PiecewiseGridFunction((xi_index,), (sys.node_fns[0], sys.node_fns[i]))


def apply_F(fun: Functional, x) -> float:
    """``f`` at the integral of ``x`` over [0, 1]."""
    return eval_at(fun.f, integrate_range(x, 0, x.n_cells))


def moment_and_dF(sys: NodeSystem, k: int, xi_index: int) -> tuple[float, float]:
    """Moment ``s_k(xi)`` and ``d/dxi F(x^k(., xi))`` at a grid point."""
    if not 1 <= k <= sys.n:
        raise IndexError(f"level {k} outside 1..{sys.n}")
    n_cells = sys.n_cells
    if not 0 <= xi_index <= n_cells:
        raise IndexError(f"xi_index {xi_index} outside 0..{n_cells}")
    x0, xk = sys.node_fns[0], sys.node_fns[k]
    s_k = integrate_range(x0, 0, xi_index) + integrate_range(xk, xi_index, n_cells)
    slope = eval_at(sys.f_prime, s_k)
    return s_k, slope * (x0.values[xi_index] - xk.values[xi_index])


def dF_table(sys: NodeSystem, k: int) -> np.ndarray:
    """``d/dxi F(x^k(., xi_j))`` over the whole grid."""
    s = sys.moments(k)
    fp = np.array([eval_at(sys.f_prime, v) for v in s])
    return fp * (sys.node_fns[0].values - sys.node_fns[k].values)


def delta_table(sys: NodeSystem, k: int) -> np.ndarray:
    """``F(x^k(., xi_j)) - F(x_0)`` via the cancellation-free increment of ``f``."""
    s0 = sys.base_moment()
    return np.array([eval_increment(sys.f, s0, t) for t in sys.moment_increments(k)])


def check_nondegenerate(sys: NodeSystem, tol: float = 1e-9) -> list[int]:
    """Orders ``j <= n - 1`` with ``|f^(j)(s_0)| < tol``; warns when any exist."""
    s0 = sys.base_moment()
    bad = []
    for order in range(1, sys.n):
        if abs(eval_at(sys.functional.derivative(order), s0)) < tol:
            bad.append(order)
    if bad:
        warnings.warn(
            f"f derivative(s) of order {bad} vanish at s0={s0:.6g}; the kernel "
            "construction may degrade or terminate early",
            DegeneracyWarning,
            stacklevel=3,
        )
    return bad


class DegeneracyWarning(RuntimeWarning):
    pass
