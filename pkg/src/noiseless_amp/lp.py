"""Small dense LP solver: maximize ``c @ x`` s.t. ``A @ x <= b``, ``x >= 0``.

Only the ``b >= 0`` case is supported, so the slack basis is feasible from
the start and no phase one is needed. Bland's rule prevents cycling. Rows
are scaled by their right-hand side (or by their largest entry when the
right-hand side is zero) so that tiny eigenvalues of small-amplitude sets
still give well-conditioned pivots. The final basic solution is recomputed
with a direct solve instead of read off the updated tableau.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import SolverFailure

__all__ = ["LPResult", "maximize"]

PIVOT_TOL = 1e-12
COST_TOL = 1e-13


@dataclass(frozen=True)
class LPResult:
    x: np.ndarray
    value: float
    basis: tuple[int, ...]
    iterations: int

    def slack(self, a, b) -> np.ndarray:
        return np.asarray(b, dtype=float) - np.asarray(a, dtype=float) @ self.x


def _scale_rows(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    scale = np.where(b > 0, b, np.abs(a).max(axis=1))
    scale = np.where(scale > 0, scale, 1.0)
    return a / scale[:, None], b / scale


def maximize(c, a, b, max_iter: int | None = None) -> LPResult:
    c = np.asarray(c, dtype=float)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    m, n = a.shape
    if c.shape != (n,) or b.shape != (m,):
        raise ValueError("inconsistent LP dimensions")
    if np.any(b < 0):
        raise ValueError("right-hand side must be nonnegative")
    if max_iter is None:
        max_iter = 50 * (m + n) + 100

    sa, sb = _scale_rows(a, b)
    cmax = max(np.abs(c).max(), 1.0)
    tab = np.zeros((m + 1, n + m + 1))
    tab[:m, :n] = sa
    tab[:m, n:n + m] = np.eye(m)
    tab[:m, -1] = sb
    tab[m, :n] = -c / cmax
    basis = list(range(n, n + m))

    it = 0
    while True:
        reduced = tab[m, :-1]
        candidates = np.flatnonzero(reduced < -COST_TOL)
        if candidates.size == 0:
            break
        if it >= max_iter:
            raise SolverFailure(f"simplex did not converge in {max_iter} iterations")
        col = int(candidates[0])
        column = tab[:m, col]
        rows = np.flatnonzero(column > PIVOT_TOL)
        if rows.size == 0:
            raise SolverFailure("LP is unbounded")
        ratios = tab[rows, -1] / column[rows]
        best = ratios.min()
        ties = rows[ratios <= best + 1e-15 * max(1.0, abs(best))]
        row = int(min(ties, key=lambda r: basis[r]))
        tab[row] /= tab[row, col]
        for r in range(m + 1):
            if r != row and tab[r, col] != 0.0:
                tab[r] -= tab[r, col] * tab[row]
        basis[row] = col
        it += 1

    # recompute the vertex by a direct solve on the (row-scaled) basis
    full = np.hstack([sa, np.eye(m)])
    try:
        xb = np.linalg.solve(full[:, basis], sb)
    except np.linalg.LinAlgError:
        # row scaling leaves structural values untouched
        xb = tab[:m, -1]
    xfull = np.zeros(n + m)
    xfull[basis] = xb
    x = np.clip(xfull[:n], 0.0, None)
    if not np.all(np.isfinite(x)):
        raise SolverFailure("non-finite LP solution")
    return LPResult(x=x, value=float(c @ x), basis=tuple(basis), iterations=it)
