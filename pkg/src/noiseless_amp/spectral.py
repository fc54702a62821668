"""Circulant/DFT machinery and numerical checks of the spectral properties.

The checks here are spot checks on grids, not proofs. Each returns a
:class:`PropertyReport` whose ``margin`` is the smallest slack seen over
the grid (negative when the inequality fails).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .coherent import (
    CLAMP_TOL,
    SUM_TOL,
    SymmetricCoherentSet,
    finalize_spectrum,
    roots_of_unity,
    spectrum,
)
from .exceptions import LengthMismatch, NotCirculant

__all__ = [
    "PropertyReport",
    "unitary_dft",
    "diagonalize_circulant",
    "circular_convolve",
    "convolution_matrix",
    "is_valid_spectrum",
    "check_property1",
    "check_property2",
    "check_logconcavity",
    "log_series",
    "amplitude_grid",
]

OFFDIAG_TOL = 1e-8
LOGCONCAVE_TOL = 1e-9


@dataclass(frozen=True)
class PropertyReport:
    holds: bool
    margin: float
    witness: tuple | None = None
    checked: int = 0

    def __post_init__(self):
        if self.holds != (self.witness is None):
            raise ValueError("holds must be True exactly when there is no witness")

    def merge(self, other: "PropertyReport") -> "PropertyReport":
        """Combine reports from disjoint grid shards (minimum slack wins)."""
        witness = self.witness if self.witness is not None else other.witness
        return PropertyReport(
            holds=self.holds and other.holds,
            margin=min(self.margin, other.margin),
            witness=witness,
            checked=self.checked + other.checked,
        )


def unitary_dft(n: int) -> np.ndarray:
    """Unitary DFT matrix ``F[p, q] = exp(-2*pi*i*p*q/n) / sqrt(n)`` (0-based)."""
    w = roots_of_unity(n)
    pq = (np.arange(n)[:, None] * np.arange(n)[None, :]) % n
    return np.conj(w[pq]) / math.sqrt(n)


def diagonalize_circulant(g) -> np.ndarray:
    """Diagonal of ``F^H g F`` for a circulant ``g``."""
    g = np.asarray(g, dtype=complex)
    n = g.shape[0]
    if g.shape != (n, n):
        raise ValueError(f"expected a square matrix, got shape {g.shape}")
    f = unitary_dft(n)
    d = f.conj().T @ g @ f
    off = d - np.diag(np.diag(d))
    resid = np.abs(off).max() if n > 1 else 0.0
    if resid > OFFDIAG_TOL:
        raise NotCirculant(f"off-diagonal residue {resid:.3e} after DFT conjugation")
    return finalize_spectrum(np.diag(d).real)


def _as_vector(v) -> np.ndarray:
    arr = np.asarray(v, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"expected a 1-d vector, got shape {arr.shape}")
    return arr


def convolution_matrix(u) -> np.ndarray:
    """Matrix ``C`` with ``C @ v == circular_convolve(u, v)``.

    ``C[i, k] = u[(i - k) % n] / n``.
    """
    u = _as_vector(u)
    n = u.size
    idx = (np.arange(n)[:, None] - np.arange(n)[None, :]) % n
    return u[idx] / n


def circular_convolve(u, v) -> np.ndarray:
    """``(u * v)_i = (1/n) sum_j u_j v_{(n - j + i) mod n}``."""
    u = _as_vector(u)
    v = _as_vector(v)
    if u.size != v.size:
        raise LengthMismatch(f"cannot convolve lengths {u.size} and {v.size}")
    n = u.size
    out = np.empty(n)
    for i in range(n):
        out[i] = sum(u[j] * v[(n - j + i) % n] for j in range(n)) / n
    return out


def is_valid_spectrum(v) -> bool:
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.size == 0 or not np.all(np.isfinite(v)):
        return False
    return bool(np.all(v >= -CLAMP_TOL) and abs(v.sum() - v.size) <= SUM_TOL)


def amplitude_grid(step: float = 0.01, upper: float = 1.0, include_upper: bool = True) -> list[float]:
    """``step, 2*step, ...`` up to ``upper`` (rounded to kill float drift)."""
    count = int(round(upper / step))
    pts = [round(k * step, 12) for k in range(1, count + 1)]
    if not include_upper:
        pts = [p for p in pts if p < upper]
    return pts


def check_property1(n: int, amplitude_grid: Iterable[float]) -> PropertyReport:
    """Check that eigenvalues decrease along DFT index at every amplitude.

    Strict decrease is required below amplitude 1; at 1 and above only the
    non-strict inequality is checked.
    """
    margin = math.inf
    witness = None
    checked = 0
    for a in amplitude_grid:
        if not a > 0:
            raise ValueError(f"amplitudes must be > 0, got {a}")
        lam = spectrum(SymmetricCoherentSet(n, a))
        gaps = lam[:-1] - lam[1:]
        checked += 1
        j = int(np.argmin(gaps))
        margin = min(margin, float(gaps[j]))
        ok = gaps[j] > 0 if a < 1 else gaps[j] >= 0
        if not ok and witness is None:
            witness = (a, j)
    return PropertyReport(holds=witness is None, margin=margin, witness=witness, checked=checked)


def check_property2(n: int, pair_grid: Iterable[Sequence[float]]) -> PropertyReport:
    """Check ``lam_j(a)/lam_j(b) >= lam_last(a)/lam_last(b)`` for all ``j``.

    Slack is measured relative to the last quotient; a relative shortfall
    beyond 1e-12 counts as a violation.
    """
    margin = math.inf
    witness = None
    checked = 0
    for a, b in pair_grid:
        if not 0 < a < b:
            raise ValueError(f"pairs must satisfy 0 < alpha < beta, got ({a}, {b})")
        q = spectrum(SymmetricCoherentSet(n, a)) / spectrum(SymmetricCoherentSet(n, b))
        slack = q[:-1] / q[-1] - 1.0
        checked += 1
        j = int(np.argmin(slack))
        margin = min(margin, float(slack[j]))
        if slack[j] < -1e-12 and witness is None:
            witness = (a, b, j)
    return PropertyReport(holds=witness is None, margin=margin, witness=witness, checked=checked)


def log_series(n: int, j: int, x: float) -> float:
    """``log f_j(x)`` with ``f_j(x) = sum_r x**(n*r+j) / (n*r+j)!``."""
    if x <= 0:
        raise ValueError("x must be > 0")
    # factor out the leading term for accuracy at small x
    lead = j * math.log(x) - math.lgamma(j + 1)
    total = 1.0
    term = 1.0
    k = j
    while True:
        for m in range(1, n + 1):
            term *= x / (k + m)
        k += n
        total += term
        if term <= 1e-17 * total:
            break
    return lead + math.log(total)


def check_logconcavity(n: int, j: int, grid: Sequence[float], tol: float = LOGCONCAVE_TOL) -> PropertyReport:
    """Check concavity of ``log f_j`` through second differences on ``grid``.

    Non-uniform grids use the three-point second divided difference scaled
    so that on a uniform grid it equals ``y[i-1] - 2*y[i] + y[i+1]``.
    """
    if not 1 <= j <= n - 1:
        raise ValueError(f"j must be in [1, {n - 1}], got {j}")
    xs = sorted(float(x) for x in grid)
    ys = [log_series(n, j, x) for x in xs]
    margin = math.inf
    witness = None
    checked = 0
    for i in range(1, len(xs) - 1):
        h1 = xs[i] - xs[i - 1]
        h2 = xs[i + 1] - xs[i]
        d2 = 2.0 * ((ys[i + 1] - ys[i]) / h2 - (ys[i] - ys[i - 1]) / h1) / (h1 + h2) * h1 * h2
        checked += 1
        margin = min(margin, tol - d2)
        if d2 > tol and witness is None:
            witness = (xs[i],)
    return PropertyReport(holds=witness is None, margin=margin, witness=witness, checked=checked)
