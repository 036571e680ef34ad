"""Functions on [0, 1] sampled on the uniform grid ``z_j = j / N``.

Integrals over grid-aligned ranges are differences of one cumulative table
(composite Simpson, 3/8 rule for odd trailing cell counts, see
``_pykernels.cumulative_quad``), so ``integrate_range`` is exactly additive
and exact for cubics.

:class:`PiecewiseGridFunction` represents functions with jumps at grid
points, such as the step-shaped continual nodes. Each piece keeps a smooth
full-grid extension and is integrated on its own sub-range, so a jump never
sits inside a quadrature panel.
"""

from __future__ import annotations

import bisect
import csv
import io
from typing import Callable, Sequence

import numpy as np

from . import _kernels
from .expr import Ast, EvaluationError, eval_at

DEFAULT_CELLS = 512
MIN_CELLS = 8


class GridFunction:
    """Samples ``values[j]`` of a smooth function at ``z_j = j / N``."""

    def __init__(self, values):
        arr = np.array(values, dtype=float)
        if arr.ndim != 1 or arr.size < MIN_CELLS + 1:
            raise ValueError(f"need a 1-d array of at least {MIN_CELLS + 1} samples")
        if not np.all(np.isfinite(arr)):
            raise ValueError("grid values must be finite")
        arr.setflags(write=False)
        self._values = arr
        self._cumulative = None

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def n_cells(self) -> int:
        return self._values.size - 1

    @property
    def h(self) -> float:
        return 1.0 / self.n_cells

    @property
    def breaks(self) -> tuple[int, ...]:
        return ()

    def cumulative(self) -> np.ndarray:
        """``C[j]``, the integral from 0 to ``z_j``."""
        if self._cumulative is None:
            c = _kernels.impl.cumulative_quad(np.ascontiguousarray(self._values), self.h)
            c.setflags(write=False)
            self._cumulative = c
        return self._cumulative

    def piece_at(self, j: int) -> GridFunction:
        return self

    def _binary(self, other, op):
        if isinstance(other, PiecewiseGridFunction):
            return PiecewiseGridFunction.from_smooth(self, other.n_cells)._binary(other, op)
        if isinstance(other, GridFunction):
            _check_same_grid(self, other)
            return GridFunction(op(self._values, other._values))
        return GridFunction(op(self._values, float(other)))

    def __add__(self, other):
        return self._binary(other, np.add)

    def __radd__(self, other):
        return self._binary(other, lambda u, v: np.add(v, u))

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __rsub__(self, other):
        return self._binary(other, lambda u, v: np.subtract(v, u))

    def __mul__(self, other):
        return self._binary(other, np.multiply)

    def __rmul__(self, other):
        return self._binary(other, lambda u, v: np.multiply(v, u))

    def __neg__(self):
        return GridFunction(-self._values)

    def __repr__(self):
        return f"GridFunction(N={self.n_cells})"


class PiecewiseGridFunction:
    """A function with jumps at grid indices ``breaks``.

    Piece ``p`` covers ``[breaks[p-1], breaks[p]]`` (with 0 and N at the
    ends) and is described by a smooth full-grid function. The sample at a
    break belongs to the piece on its right, so values follow the
    ``H(0) = 1`` convention. A break at ``N`` leaves a zero-width last piece
    that only supplies the sample at ``z = 1``.
    """

    def __init__(self, breaks: Sequence[int], pieces: Sequence[GridFunction]):
        breaks = tuple(int(b) for b in breaks)
        pieces = tuple(pieces)
        if len(pieces) != len(breaks) + 1:
            raise ValueError("need exactly one more piece than breaks")
        n = pieces[0].n_cells
        for g in pieces:
            if isinstance(g, PiecewiseGridFunction):
                raise TypeError("pieces must be smooth GridFunctions")
            _check_same_grid(pieces[0], g)
        if any(not 0 < b <= n for b in breaks) or list(breaks) != sorted(set(breaks)):
            raise ValueError("breaks must be strictly increasing in [1, N]")
        self._breaks = breaks
        self._pieces = pieces
        self._n = n

    @classmethod
    def from_smooth(cls, g: GridFunction, n_cells: int | None = None):
        return cls((), (g,))

    @property
    def n_cells(self) -> int:
        return self._n

    @property
    def h(self) -> float:
        return 1.0 / self._n

    @property
    def breaks(self) -> tuple[int, ...]:
        return self._breaks

    @property
    def pieces(self) -> tuple[GridFunction, ...]:
        return self._pieces

    def bounds(self):
        """Yield ``(lo, hi, piece)`` for every piece."""
        edges = (0,) + self._breaks + (self._n,)
        for p, g in enumerate(self._pieces):
            yield edges[p], edges[p + 1], g

    def piece_at(self, j: int) -> GridFunction:
        return self._pieces[bisect.bisect_right(self._breaks, j)]

    @property
    def values(self) -> np.ndarray:
        out = np.empty(self._n + 1)
        for lo, hi, g in self.bounds():
            out[lo:hi + 1] = g.values[lo:hi + 1]
        return out

    def _binary(self, other, op):
        if isinstance(other, (int, float, np.floating)):
            return PiecewiseGridFunction(
                self._breaks, [GridFunction(op(g.values, float(other))) for g in self._pieces]
            )
        if not isinstance(other, PiecewiseGridFunction):
            _check_same_grid(self._pieces[0], other)
            other = PiecewiseGridFunction.from_smooth(other)
        elif other.n_cells != self._n:
            raise ValueError("grid functions live on different grids")
        breaks = sorted(set(self._breaks) | set(other._breaks))
        edges = [0] + breaks
        pieces = []
        for lo in edges:
            u = self.piece_at(lo)
            v = other.piece_at(lo)
            pieces.append(GridFunction(op(u.values, v.values)))
        return PiecewiseGridFunction(breaks, pieces)

    __add__ = GridFunction.__add__
    __radd__ = GridFunction.__radd__
    __sub__ = GridFunction.__sub__
    __rsub__ = GridFunction.__rsub__
    __mul__ = GridFunction.__mul__
    __rmul__ = GridFunction.__rmul__

    def __neg__(self):
        return PiecewiseGridFunction(self._breaks, [-g for g in self._pieces])

    def __repr__(self):
        return f"PiecewiseGridFunction(N={self._n}, breaks={self._breaks})"


def _check_same_grid(u, v):
    if u.n_cells != v.n_cells:
        raise ValueError(f"grid functions live on different grids ({u.n_cells} vs {v.n_cells})")


def grid_points(n_cells: int) -> np.ndarray:
    return np.arange(n_cells + 1) / n_cells


def sample_expression(ast: Ast, n_cells: int = DEFAULT_CELLS) -> GridFunction:
    """Sample ``ast`` at every grid point.

    Raises
    ------
    EvaluationError
        Re-raised with the offending grid index in the message.
    """
    if n_cells < MIN_CELLS:
        raise ValueError(f"n_cells must be at least {MIN_CELLS}")
    z = grid_points(n_cells)
    values = np.empty(n_cells + 1)
    for j, zj in enumerate(z):
        try:
            values[j] = eval_at(ast, zj)
        except EvaluationError as exc:
            raise EvaluationError(f"grid index {j} (z={zj!r}): {exc}") from exc
    return GridFunction(values)


def sample_callable(fn: Callable[[np.ndarray], np.ndarray], n_cells: int = DEFAULT_CELLS) -> GridFunction:
    return GridFunction(fn(grid_points(n_cells)))


def integrate_range(g, j_lo: int, j_hi: int) -> float:
    """Integral of ``g`` over ``[j_lo / N, j_hi / N]``."""
    n = g.n_cells
    if not (0 <= j_lo <= j_hi <= n):
        raise IndexError(f"need 0 <= j_lo <= j_hi <= {n}, got ({j_lo}, {j_hi})")
    if isinstance(g, PiecewiseGridFunction):
        total = 0.0
        for lo, hi, piece in g.bounds():
            a, b = max(lo, j_lo), min(hi, j_hi)
            if a < b:
                c = piece.cumulative()
                total += c[b] - c[a]
        return float(total)
    c = g.cumulative()
    return float(c[j_hi] - c[j_lo])


def tail_integral_table(g: GridFunction) -> GridFunction:
    """``T[j]``, the integral of ``g`` from ``z_j`` to 1; ``T[N]`` is exactly 0."""
    c = g.cumulative()
    return GridFunction(c[-1] - c)


def to_csv(g, path=None) -> str:
    """Write ``z,value`` rows at 17 significant digits; returns the text."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["z", "value"])
    for zj, v in zip(grid_points(g.n_cells), g.values):
        writer.writerow([f"{zj:.17g}", f"{v:.17g}"])
    text = buf.getvalue()
    if path is not None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return text
