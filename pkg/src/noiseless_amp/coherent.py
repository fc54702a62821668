"""Coherent-state arithmetic for symmetric sets.

A symmetric set holds the ``n`` states ``|amplitude * w**k>`` with
``w = exp(2*pi*i/n)``. Its Gram matrix is circulant, and the eigenvalues are
reported in DFT index order ``j = 0..n-1`` (never sorted numerically).

Two independent routes compute the spectrum:

* :func:`spectrum_series` sums every ``n``-th term of the Poisson weights
  ``exp(-x) x**k / k!`` (``x = amplitude**2``). Accurate in relative terms,
  so it is the route used for ratios of small eigenvalues.
* :func:`spectrum_closed` takes the finite DFT of the Gram first row.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .exceptions import ImaginaryResidueTooLarge, NegativeEigenvalue

__all__ = [
    "SymmetricCoherentSet",
    "overlap",
    "roots_of_unity",
    "gram_matrix",
    "check_gram_matrix",
    "spectrum_series",
    "spectrum_closed",
    "spectrum",
    "finalize_spectrum",
    "CLAMP_TOL",
    "SUM_TOL",
]

CLAMP_TOL = 1e-10
SUM_TOL = 1e-9
IMAG_ERROR_TOL = 1e-8
DEFAULT_TERMS_TOL = 1e-16
# exp(-x) underflows past this; switch to log-space terms
_LOG_SPACE_THRESHOLD = 700.0


def overlap(a: complex, b: complex) -> complex:
    """Inner product ``<a|b>`` of two coherent states.

    Evaluated as ``exp(-|a - b|**2 / 2 + i * Im(conj(a) * b))``, which is
    exactly 1 for ``a == b`` and never exceeds 1 in modulus.
    """
    a = complex(a)
    b = complex(b)
    return cmath.exp(complex(-0.5 * abs(a - b) ** 2, (a.conjugate() * b).imag))


def roots_of_unity(n: int) -> np.ndarray:
    """``exp(2*pi*i*k/n)`` for ``k = 0..n-1``.

    Quarter turns are exact and ``root[n-k] == conj(root[k])`` bit for bit,
    which keeps Gram matrices exactly Hermitian.
    """
    out = np.empty(n, dtype=complex)
    for k in range(n // 2 + 1):
        if (4 * k) % n == 0:
            q = (4 * k) // n
            out[k] = (1, 1j, -1, -1j)[q % 4]
        else:
            t = 2.0 * math.pi * k / n
            out[k] = complex(math.cos(t), math.sin(t))
    for k in range(n // 2 + 1, n):
        out[k] = out[n - k].conjugate()
    return out


@dataclass(frozen=True)
class SymmetricCoherentSet:
    """``n`` coherent states ``amplitude * exp(2*pi*i*k/n)``."""

    n: int
    amplitude: float

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n:
            raise ValueError(f"n must be an integer, got {self.n!r}")
        if self.n < 2:
            raise ValueError(f"n must be >= 2, got {self.n}")
        amp = float(self.amplitude)
        if not math.isfinite(amp) or amp < 0:
            raise ValueError(f"amplitude must be finite and >= 0, got {self.amplitude!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "amplitude", amp)

    def member(self, k: int) -> complex:
        return self.amplitude * complex(roots_of_unity(self.n)[k % self.n])

    def members(self) -> np.ndarray:
        return self.amplitude * roots_of_unity(self.n)

    def scaled(self, gain: float) -> "SymmetricCoherentSet":
        return SymmetricCoherentSet(self.n, gain * self.amplitude)


def gram_matrix(cset: SymmetricCoherentSet) -> np.ndarray:
    """Circulant Gram matrix with entries ``<c_i|c_j>``."""
    n = cset.n
    alpha = cset.amplitude
    first_row = np.array([overlap(alpha, alpha * w) for w in roots_of_unity(n)])
    idx = (np.arange(n)[None, :] - np.arange(n)[:, None]) % n
    return first_row[idx]


def check_gram_matrix(g, tol: float = CLAMP_TOL) -> np.ndarray:
    """Validate a Gram matrix: unit diagonal, Hermitian, PSD within ``tol``."""
    g = np.asarray(g, dtype=complex)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise ValueError(f"Gram matrix must be square, got shape {g.shape}")
    if not np.all(np.diag(g) == 1):
        raise ValueError("Gram matrix diagonal must be exactly 1")
    if not np.allclose(g, g.conj().T, rtol=0, atol=1e-12):
        raise ValueError("Gram matrix is not Hermitian")
    eig = np.linalg.eigvalsh(g)
    if eig.min() < -tol:
        raise NegativeEigenvalue(f"Gram matrix not PSD: min eigenvalue {eig.min():.3e}")
    return g


def finalize_spectrum(values) -> np.ndarray:
    """Clamp round-off negatives to zero and freeze the array.

    Components in ``[-CLAMP_TOL, 0)`` become 0; anything more negative is a
    genuine positivity violation.
    """
    out = np.array(values, dtype=float)
    bad = out < -CLAMP_TOL
    if np.any(bad):
        j = int(np.flatnonzero(bad)[0])
        raise NegativeEigenvalue(f"eigenvalue {j} is {out[j]:.3e} < -{CLAMP_TOL:g}")
    out[out < 0] = 0.0
    out.setflags(write=False)
    return out


def _poisson_terms(x: float, k: int, prev: float) -> float:
    if x < _LOG_SPACE_THRESHOLD:
        return math.exp(-x) if k == 0 else prev * x / k
    return math.exp(k * math.log(x) - x - math.lgamma(k + 1))


def spectrum_series(cset: SymmetricCoherentSet, terms_tolerance: float = DEFAULT_TERMS_TOL) -> np.ndarray:
    """Eigenvalues as ``n * sum_r exp(-x) x**(n*r+j) / (n*r+j)!``.

    Each of the ``n`` interleaved series stops once its next term drops below
    ``terms_tolerance`` times its own partial sum, past the Poisson peak.
    """
    if not terms_tolerance > 0:
        raise ValueError("terms_tolerance must be > 0")
    n = cset.n
    x = cset.amplitude ** 2
    if x == 0.0:
        return finalize_spectrum([n] + [0.0] * (n - 1))

    sums = [0.0] * n
    term = 0.0
    quiet = 0
    k = 0
    while quiet < n:
        term = _poisson_terms(x, k, term)
        j = k % n
        if k >= n and k > x and term <= terms_tolerance * sums[j]:
            quiet += 1
        else:
            quiet = 0
        sums[j] += term
        k += 1
    return finalize_spectrum([n * s for s in sums])


def spectrum_closed(cset: SymmetricCoherentSet) -> np.ndarray:
    """Eigenvalues as the DFT of the Gram first row.

    ``lambda_j = sum_l w**(-j*l) * exp(-x * (1 - w**l))``.
    """
    n = cset.n
    x = cset.amplitude ** 2
    w = roots_of_unity(n)
    row = np.exp(-x * (1.0 - w))
    jl = (np.arange(n)[:, None] * np.arange(n)[None, :]) % n
    lam = np.conj(w[jl]) @ row
    imag = np.abs(lam.imag)
    if imag.max() > IMAG_ERROR_TOL:
        raise ImaginaryResidueTooLarge(f"imaginary residue {imag.max():.3e} in closed-form spectrum")
    return finalize_spectrum(lam.real)


@lru_cache(maxsize=4096)
def _cached_spectrum(n: int, amplitude: float) -> np.ndarray:
    return spectrum_series(SymmetricCoherentSet(n, amplitude))


def spectrum(cset: SymmetricCoherentSet) -> np.ndarray:
    """Default spectrum route (series), memoized per ``(n, amplitude)``."""
    return _cached_spectrum(cset.n, cset.amplitude)
