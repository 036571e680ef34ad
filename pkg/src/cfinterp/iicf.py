"""Integral interpolation continued C-fractions for functionals.

The fraction is ::

    Q_n(x, xi) = a_0 + N_1 / (1 + N_2 / (1 + ... + N_n / 1)),
    N_i = int_0^1 a_i(z) [x(z) - x^{i-1}(z, xi)] dz,      x^0 = x_0,

and must reproduce ``F`` on every continual node ``x^k(., xi)``. Kernels are
built level by level. With the tail integrals

    I_j(xi) = int_xi^1 a_j(z) (x_k(z) - x_{j-1}(z)) dz,   Delta_k(xi) = F(x^k(., xi)) - F(x_0),

level ``k`` inverts the fraction into the chain ::

    G_k(xi) = I_{k-1} / (-1 + I_{k-2} / (-1 + ... + I_1 / Delta_k)) = 1 + I_k(xi)

and differentiates it: ``a_k(xi) = -G_k'(xi) / (x_k(xi) - x_{k-1}(xi))``. The
derivative is propagated exactly through the forward recurrence using
``I_j' = -a_j(xi)(x_k(xi) - x_{j-1}(xi))`` and ``Delta_k' = f'(s_k)(x_0(xi) - x_k(xi))``.
At ``xi = 1`` the chain is 0/0; that sample of each kernel (from ``a_2`` on) is
extrapolated from the four nearest interior samples.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .cicf import CIcf, fit_coefficients
from .expr import eval_at
from .fraction import (
    BREAKDOWN_TOL,
    BreakdownError,
    FiniteFraction,
    FractionDerivativeInput,
    eval_backward,
    eval_backward_batch,
    eval_with_derivative,
    eval_with_derivative_batch,
)
from .functional import (
    NodeSystem,
    apply_F,
    check_nondegenerate,
    continual_node,
    dF_table,
    delta_table,
)
from .grid import GridFunction, grid_points, integrate_range, tail_integral_table


@dataclass
class KernelSet:
    """``a_0`` and the kernels ``a_1..a_n`` fitted to a node system.

    ``terminated_at`` is the first level whose kernel was set to zero
    because the level below vanished identically (the fraction already
    terminates there), or None.
    """

    a0: float
    kernels: tuple[GridFunction, ...]
    sys: NodeSystem
    terminated_at: int | None = None
    _tails: dict = field(default_factory=dict, init=False, repr=False)

    @property
    def n(self) -> int:
        return len(self.kernels)

    @property
    def n_cells(self) -> int:
        return self.sys.n_cells

    def kernel(self, i: int) -> GridFunction:
        return self.kernels[i - 1]

    def tail(self, k: int, i: int) -> np.ndarray:
        """``int_{xi_j}^1 a_i (x_k - x_{i-1})`` for all grid ``j``."""
        key = (k, i)
        if key not in self._tails:
            self._tails[key] = _tail(self.kernels[i - 1], self.sys, k, i)
        return self._tails[key]


def _tail(kernel: GridFunction, sys: NodeSystem, k: int, i: int) -> np.ndarray:
    nodes = sys.node_fns
    return tail_integral_table(kernel * (nodes[k] - nodes[i - 1])).values


@dataclass(frozen=True)
class TailChain:
    """Everything the level-``k`` chain needs, tabulated on the grid.

    ``tails[j - 1]`` is ``I_j`` and ``d_tails[j - 1]`` its xi-derivative,
    for ``j = 1..k-1``.
    """

    k: int
    tails: tuple[np.ndarray, ...]
    d_tails: tuple[np.ndarray, ...]
    delta: np.ndarray
    d_delta: np.ndarray

    def fraction_arrays(self, rows=slice(None)):
        """Batch arrays ``(b0, a, b, db0, da, db)``, outermost floor first."""
        tails = self.tails[::-1]
        d_tails = self.d_tails[::-1]
        a = np.column_stack([t[rows] for t in tails])
        da = np.column_stack([t[rows] for t in d_tails])
        m = a.shape[0]
        b = -np.ones_like(a)
        b[:, -1] = self.delta[rows]
        db = np.zeros_like(a)
        db[:, -1] = self.d_delta[rows]
        zeros = np.zeros(m)
        return zeros, a, b, zeros.copy(), da, db


def tail_chain(sys: NodeSystem, kernels, k: int) -> TailChain:
    """Tabulate the chain for level ``k`` from the kernels ``a_1..a_{k-1}``."""
    if not 2 <= k <= sys.n:
        raise IndexError(f"chain level {k} outside 2..{sys.n}")
    nodes = sys.node_fns
    xk = nodes[k].values
    tails, d_tails = [], []
    for j in range(1, k):
        kern = kernels[j - 1]
        tails.append(_tail(kern, sys, k, j))
        d_tails.append(-kern.values * (xk - nodes[j - 1].values))
    return TailChain(k, tuple(tails), tuple(d_tails), delta_table(sys, k), dF_table(sys, k))


def _chain_fraction(chain: TailChain, xi_index: int) -> FractionDerivativeInput:
    b0, a, b, db0, da, db = chain.fraction_arrays(slice(xi_index, xi_index + 1))
    base = FiniteFraction(0.0, tuple(zip(a[0], b[0])))
    return FractionDerivativeInput(base, 0.0, tuple(zip(da[0], db[0])))


def tail_fraction(chain: TailChain, xi_index: int) -> tuple[float, float]:
    """``(G_k(xi), G_k'(xi))`` at an interior or left-end grid point.

    ``G`` comes from the backward evaluator and ``G'`` from forward
    derivative propagation.
    """
    n_cells = chain.delta.size - 1
    if not 0 <= xi_index < n_cells:
        raise IndexError(f"xi_index must lie in 0..{n_cells - 1}; xi = 1 is a removable 0/0")
    inp = _chain_fraction(chain, xi_index)
    xi = xi_index / n_cells
    try:
        g = eval_backward(inp.base)
        _, dg = eval_with_derivative(inp)
    except BreakdownError as exc:
        raise BreakdownError(
            f"level {chain.k} chain breaks down at xi={xi!r} (floor {exc.floor})",
            floor=exc.floor, k=chain.k, xi=xi,
        ) from None
    return g, dg


def _extrapolate_right(values: np.ndarray) -> float:
    # cubic through the four samples left of z = 1 (values[-1] is the slot being filled)
    return 4.0 * values[-2] - 6.0 * values[-3] + 4.0 * values[-4] - values[-5]


def compute_kernels(sys: NodeSystem) -> KernelSet:
    """Fit ``a_0`` and kernels ``a_1..a_n`` so the fraction matches ``F`` on all continual nodes.

    Raises
    ------
    BreakdownError
        With ``k`` and ``xi`` set, when some level's chain has a vanishing
        denominator.

    Warns
    -----
    DegeneracyWarning
        When ``f^(j)(s_0)`` is tiny for some ``j <= n - 1``.
    """
    check_nondegenerate(sys)
    nodes = sys.node_fns
    n_cells = sys.n_cells
    a0 = apply_F(sys.functional, nodes[0])

    # a_1 = -F'(x^1)/(x_1 - x_0) reduces to f'(s_1), which stays finite at xi = 1
    a1 = np.array([eval_at(sys.f_prime, s) for s in sys.moments(1)])
    kernels = [GridFunction(a1)]
    terminated_at = None
    xi = grid_points(n_cells)
    for k in range(2, sys.n + 1):
        if terminated_at is None and not np.any(kernels[-1].values):
            terminated_at = k
        if terminated_at is not None:
            kernels.append(GridFunction(np.zeros(n_cells + 1)))
            continue
        chain = tail_chain(sys, kernels, k)
        interior = slice(0, n_cells)
        _, d_g, fail = eval_with_derivative_batch(*chain.fraction_arrays(interior))
        bad = np.flatnonzero(fail)
        if bad.size:
            j = int(bad[0])
            raise BreakdownError(
                f"level {k} chain breaks down at xi={float(xi[j])!r} (floor {int(fail[j])})",
                floor=int(fail[j]), k=k, xi=float(xi[j]),
            )
        step = (nodes[k].values - nodes[k - 1].values)[interior]
        values = np.empty(n_cells + 1)
        values[:n_cells] = -d_g / step
        values[n_cells] = _extrapolate_right(values)
        kernels.append(GridFunction(values))
    return KernelSet(a0, tuple(kernels), sys, terminated_at)


def _check_xi(ks: KernelSet, xi_index: int) -> None:
    if not 0 <= xi_index <= ks.n_cells:
        raise IndexError(f"xi_index {xi_index} outside 0..{ks.n_cells}")


def evaluate(ks: KernelSet, x, xi_index: int) -> float:
    """``Q_n(x, xi)`` for an arbitrary grid function ``x``.

    Floors below the first identically zero numerator are dropped; they
    cannot change the value.
    """
    _check_xi(ks, xi_index)
    numerators = []
    for i in range(1, ks.n + 1):
        diff = x - continual_node(ks.sys, i - 1, xi_index)
        num = integrate_range(diff * ks.kernel(i), 0, ks.n_cells)
        if num == 0.0:
            break
        numerators.append(num)
    try:
        return eval_backward(FiniteFraction(ks.a0, tuple((v, 1.0) for v in numerators)))
    except BreakdownError as exc:
        exc.xi = xi_index / ks.n_cells
        raise


def evaluate_at_node(ks: KernelSet, k: int, xi_index: int) -> float:
    """``Q_n(x^k(., xi), xi)`` using only floors ``1..k``."""
    if not 0 <= k <= ks.n:
        raise IndexError(f"node level {k} outside 0..{ks.n}")
    _check_xi(ks, xi_index)
    floors = tuple((float(ks.tail(k, i)[xi_index]), 1.0) for i in range(1, k + 1))
    try:
        return eval_backward(FiniteFraction(ks.a0, floors))
    except BreakdownError as exc:
        exc.k, exc.xi = k, xi_index / ks.n_cells
        raise


@dataclass(frozen=True)
class InterpolationReport:
    """``residuals[k, j] = |Q_n(x^k(., xi_j)) - F(x^k(., xi_j))|``; NaN where evaluation broke down."""

    residuals: np.ndarray
    failed: tuple[tuple[int, int], ...]

    @property
    def max_residual(self) -> float:
        finite = self.residuals[np.isfinite(self.residuals)]
        return float(finite.max()) if finite.size else float("nan")

    @property
    def ok(self) -> bool:
        return not self.failed

    def level_max(self) -> np.ndarray:
        return np.nanmax(self.residuals, axis=1)


def node_values(ks: KernelSet, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Fraction values at ``x^k(., xi_j)`` for every ``j``; returns ``(values, fail)``."""
    n_cells = ks.n_cells
    b0 = np.full(n_cells + 1, ks.a0)
    a = np.column_stack([ks.tail(k, i) for i in range(1, k + 1)]) if k else np.zeros((n_cells + 1, 0))
    return eval_backward_batch(b0, a, np.ones_like(a), BREAKDOWN_TOL)


def verify_interpolation(ks: KernelSet) -> InterpolationReport:
    """Residuals of the interpolation conditions on every continual node."""
    sys = ks.sys
    n_cells = ks.n_cells
    res = np.empty((ks.n + 1, n_cells + 1))
    failed = []
    for k in range(ks.n + 1):
        q, fail = node_values(ks, k)
        moments = sys.moments(k) if k else np.full(n_cells + 1, sys.base_moment())
        target = np.array([eval_at(sys.f, s) for s in moments])
        res[k] = np.abs(q - target)
        for j in np.flatnonzero(fail):
            failed.append((k, int(j)))
    return InterpolationReport(res, tuple(failed))


def chain_limit_diagnostic(ks: KernelSet, m: int, xi_index: int) -> float:
    """Value of the level-``m`` chain ``G_m(xi)``, which tends to 1 as ``xi -> 1``.

    Levels at or beyond ``ks.terminated_at`` have ``a_m = 0``, so the
    identity ``G_m = 1 + I_m`` gives exactly 1 there.
    """
    if not 2 <= m <= ks.n:
        raise IndexError(f"level {m} outside 2..{ks.n}")
    if ks.terminated_at is not None and m >= ks.terminated_at:
        return 1.0
    chain = tail_chain(ks.sys, ks.kernels, m)
    g, _ = tail_fraction(chain, xi_index)
    return g


@dataclass(frozen=True)
class ReductionReport:
    a0: float
    integrated: np.ndarray  # int_0^1 a_m, m = 1..n
    cicf: CIcf

    @property
    def discrepancies(self) -> np.ndarray:
        ours = np.concatenate([[self.a0], self.integrated])
        return np.abs(ours - self.cicf.coefficients)

    @property
    def max_discrepancy(self) -> float:
        return float(self.discrepancies.max())

    def table(self) -> str:
        lines = [f"{'m':>3}  {'integrated kernel':>24}  {'C-fraction coefficient':>24}  {'|diff|':>10}"]
        ours = np.concatenate([[self.a0], self.integrated])
        for m, (u, v, d) in enumerate(zip(ours, self.cicf.coefficients, self.discrepancies)):
            lines.append(f"{m:>3}  {u:>24.17g}  {v:>24.17g}  {d:>10.3e}")
        lines.append(f"max discrepancy {self.max_discrepancy:.17g}")
        return "\n".join(lines)


def reduce_to_cicf(sys: NodeSystem, ks: KernelSet) -> ReductionReport:
    """Compare integrated kernels with the scalar C-fraction on constant nodes."""
    points = []
    for i, g in enumerate(sys.node_fns):
        v = g.values
        if np.ptp(v) > 1e-14 * max(1.0, float(np.max(np.abs(v)))):
            raise ValueError(f"node function x_{i} is not constant on the grid")
        points.append(float(v[0]))
    values = [eval_at(sys.f, p) for p in points]
    model = fit_coefficients(points, values)
    integrated = np.array([integrate_range(a, 0, ks.n_cells) for a in ks.kernels])
    return ReductionReport(ks.a0, integrated, model)


# --------------------------------------------------------------------------
# export


def kernel_table_csv(ks: KernelSet, report: InterpolationReport | None = None) -> str:
    """CSV with ``xi,a1..an`` and, given a report, ``r0..rn`` residual columns."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = ["xi"] + [f"a{i}" for i in range(1, ks.n + 1)]
    if report is not None:
        header += [f"r{k}" for k in range(ks.n + 1)]
    writer.writerow(header)
    xi = grid_points(ks.n_cells)
    for j in range(ks.n_cells + 1):
        row = [xi[j]] + [a.values[j] for a in ks.kernels]
        if report is not None:
            row += list(report.residuals[:, j])
        writer.writerow([f"{v:.17g}" for v in row])
    return buf.getvalue()


def residual_csv(report: InterpolationReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    n_levels, npts = report.residuals.shape
    writer.writerow(["xi"] + [f"r{k}" for k in range(n_levels)])
    xi = grid_points(npts - 1)
    for j in range(npts):
        writer.writerow([f"{v:.17g}" for v in [xi[j], *report.residuals[:, j]]])
    return buf.getvalue()


def sidecar(ks: KernelSet) -> dict:
    return {"a0": ks.a0, "n": ks.n, "grid": ks.n_cells}
