"""Success probabilities and transform plans for perfect amplification.

Everything works at the level of Gram spectra. For source spectrum ``lam_a``
and target spectrum ``lam_b`` a plan with success probability ``p`` and leak
spectrum ``lam_l`` exists when::

    lam_a = p * (lam_b * lam_l) + (1 - p) * lam_r

for some valid redundancy spectrum ``lam_r`` (``*`` is the normalized
circular convolution). A leakless plan has ``lam_l = n * e_s``, which just
rotates ``lam_b`` by ``s``.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from . import lp
from .coherent import SymmetricCoherentSet, finalize_spectrum, spectrum
from .exceptions import (
    DegenerateP,
    DegenerateSource,
    InvalidResidual,
    OutOfRegime,
    SolverFailure,
)
from .spectral import circular_convolve, convolution_matrix, is_valid_spectrum

__all__ = [
    "AmplificationRequest",
    "TransformPlan",
    "Lemma1Report",
    "usd_success",
    "upper_bound",
    "leakless_optimum",
    "leaky_optimum",
    "redundancy",
    "check_lemma1",
    "small_amplitude_popt",
]

RESIDUAL_TOL = 1e-9
P_ONE_TOL = 1e-12
UNIQUE_REL_GAP = 1e-9
# a leakless plan this close to the LP optimum is returned instead
LEAKLESS_PREFERENCE_TOL = 1e-10

Mode = Literal["leakless-trivial", "leakless-shifted", "leaky"]


@dataclass(frozen=True)
class AmplificationRequest:
    """Amplify ``n`` symmetric states from ``source_amplitude`` to ``target_amplitude``."""

    n: int
    source_amplitude: float
    target_amplitude: float

    def __post_init__(self):
        a = float(self.source_amplitude)
        b = float(self.target_amplitude)
        if not (math.isfinite(a) and math.isfinite(b)):
            raise ValueError("amplitudes must be finite")
        if a < 0:
            raise ValueError(f"source amplitude must be >= 0, got {a}")
        if b <= 0:
            raise ValueError(f"target amplitude must be > 0, got {b}")
        if a > b:
            raise ValueError(f"gain must be >= 1: source {a} exceeds target {b}")
        object.__setattr__(self, "source_amplitude", a)
        object.__setattr__(self, "target_amplitude", b)
        # validates n
        SymmetricCoherentSet(self.n, a)

    @classmethod
    def from_gain(cls, n: int, source_amplitude: float, gain: float) -> "AmplificationRequest":
        return cls(n, source_amplitude, gain * source_amplitude)

    @property
    def gain(self) -> float:
        if self.source_amplitude == 0:
            return math.inf
        return self.target_amplitude / self.source_amplitude

    @property
    def source(self) -> SymmetricCoherentSet:
        return SymmetricCoherentSet(self.n, self.source_amplitude)

    @property
    def target(self) -> SymmetricCoherentSet:
        return SymmetricCoherentSet(self.n, self.target_amplitude)

    @property
    def source_spectrum(self) -> np.ndarray:
        return spectrum(self.source)

    @property
    def target_spectrum(self) -> np.ndarray:
        return spectrum(self.target)


@dataclass(frozen=True)
class TransformPlan:
    p: float
    leak: np.ndarray
    redundancy: np.ndarray | None
    mode: Mode
    source_spectrum: np.ndarray = field(repr=False)
    target_spectrum: np.ndarray = field(repr=False)
    shift: int | None = None

    @property
    def n(self) -> int:
        return self.leak.size

    def success_spectrum(self) -> np.ndarray:
        """``lam_b * lam_l``."""
        return circular_convolve(self.target_spectrum, self.leak)

    def reconstruction_error(self) -> float:
        """Max componentwise error of the spectral transform equation."""
        rhs = self.p * self.success_spectrum()
        if self.redundancy is not None:
            rhs = rhs + (1.0 - self.p) * self.redundancy
        return float(np.abs(self.source_spectrum - rhs).max())

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "mode": self.mode,
            "shift": self.shift,
            "leak": self.leak.tolist(),
            "redundancy": None if self.redundancy is None else self.redundancy.tolist(),
        }


@dataclass(frozen=True)
class Lemma1Report:
    min_unique: bool
    best_nontrivial_leaky_p: float
    p_up: float
    saturates: bool
    best_leak: np.ndarray | None = field(default=None, repr=False)
    restricted_lps: int = 0
    random_leaks: int = 0

    def to_dict(self) -> dict:
        return {
            "min_unique": self.min_unique,
            "best_nontrivial_leaky_p": self.best_nontrivial_leaky_p,
            "p_up": self.p_up,
            "saturates": self.saturates,
            "restricted_lps": self.restricted_lps,
            "random_leaks": self.random_leaks,
        }


def usd_success(cset: SymmetricCoherentSet) -> float:
    """Optimal unambiguous discrimination probability: the smallest eigenvalue."""
    return float(spectrum(cset).min())


def upper_bound(req: AmplificationRequest) -> float:
    """Ratio of source to target discrimination probabilities."""
    if req.source_amplitude == 0:
        warnings.warn("source amplitude is zero; upper bound is 0", DegenerateSource, stacklevel=2)
        return 0.0
    return usd_success(req.source) / usd_success(req.target)


def _point_leak(n: int, s: int) -> np.ndarray:
    leak = np.zeros(n)
    leak[s] = n
    return finalize_spectrum(leak)


def _leakless_mode(s: int) -> Mode:
    return "leakless-trivial" if s == 0 else "leakless-shifted"


def redundancy(lam_a, lam_b, p: float, lam_l) -> np.ndarray:
    """Redundancy spectrum ``(lam_a - p * (lam_b * lam_l)) / (1 - p)``.

    Residual components in ``[-1e-9, 0)`` are treated as round-off and
    clamped to zero before dividing.
    """
    if p >= 1.0 - P_ONE_TOL:
        raise DegenerateP(f"redundancy undefined for p = {p!r}")
    lam_a = np.asarray(lam_a, dtype=float)
    resid = lam_a - p * circular_convolve(lam_b, lam_l)
    if resid.min() < -RESIDUAL_TOL:
        j = int(np.argmin(resid))
        raise InvalidResidual(f"residual component {j} is {resid[j]:.3e}")
    resid = np.clip(resid, 0.0, None)
    n = resid.size
    # exact trace of the residual is n*(1-p); near p=1 the division by 1-p
    # amplifies round-off, so restore the trace when the drift is that small
    drift = resid.sum() - n * (1.0 - p)
    if abs(drift) <= RESIDUAL_TOL and resid.sum() > 0:
        lam_r = resid * (n / resid.sum())
    else:
        lam_r = resid / (1.0 - p)
    if not is_valid_spectrum(lam_r):
        raise InvalidResidual(f"redundancy is not a valid spectrum (sum {lam_r.sum():.12g})")
    return finalize_spectrum(lam_r)


def _make_plan(req: AmplificationRequest, p: float, leak: np.ndarray, mode: Mode, shift: int | None) -> TransformPlan:
    lam_a = req.source_spectrum
    lam_b = req.target_spectrum
    p = min(max(float(p), 0.0), 1.0)
    lam_r = None if p >= 1.0 - P_ONE_TOL else redundancy(lam_a, lam_b, p, leak)
    return TransformPlan(
        p=p,
        leak=leak,
        redundancy=lam_r,
        mode=mode,
        source_spectrum=lam_a,
        target_spectrum=lam_b,
        shift=shift,
    )


def _zero_plan(req: AmplificationRequest) -> TransformPlan:
    return _make_plan(req, 0.0, _point_leak(req.n, 0), "leakless-trivial", 0)


def leakless_probabilities(req: AmplificationRequest) -> np.ndarray:
    """Best ``p`` for each cyclic shift ``s`` of the target spectrum."""
    lam_a = req.source_spectrum
    lam_b = req.target_spectrum
    n = req.n
    return np.array([min(lam_a[i] / lam_b[(i - s) % n] for i in range(n)) for s in range(n)])


def leakless_optimum(req: AmplificationRequest) -> TransformPlan:
    """Best leakless plan, searching all cyclic shifts (smallest shift wins ties)."""
    if req.source_amplitude == 0:
        return _zero_plan(req)
    probs = leakless_probabilities(req)
    s = int(np.argmax(probs))  # first maximum
    return _make_plan(req, probs[s], _point_leak(req.n, s), _leakless_mode(s), s)


def _solve_leak_lp(lam_a, lam_b, support=None, min_weight: float = 0.0) -> tuple[float, np.ndarray | None]:
    """Maximize ``sum(mu)/n`` s.t. ``lam_b * mu <= lam_a``, ``mu >= 0``.

    With ``support`` the leak may only use those components, and each must
    carry at least ``min_weight`` of the total. Returns ``(p, leak)``.
    """
    n = len(lam_a)
    cols = list(range(n)) if support is None else list(support)
    conv = convolution_matrix(lam_b)[:, cols]
    a_rows = [conv]
    b_rows = [np.asarray(lam_a, dtype=float)]
    if min_weight > 0:
        k = len(cols)
        a_rows.append(min_weight * np.ones((k, k)) - np.eye(k))
        b_rows.append(np.zeros(k))
    res = lp.maximize(np.full(len(cols), 1.0 / n), np.vstack(a_rows), np.concatenate(b_rows))
    total = res.x.sum()
    if total <= 0:
        return 0.0, None
    mu = np.zeros(n)
    mu[cols] = res.x
    return total / n, mu * (n / total)


def leaky_optimum(req: AmplificationRequest) -> TransformPlan:
    """Global optimum over all leak spectra via the linearized LP.

    Substituting ``mu = p * lam_l`` makes the problem linear. When a leakless
    plan matches the LP value to within 1e-10 the leakless plan is returned.
    """
    if req.source_amplitude == 0:
        return _zero_plan(req)
    p_lp, leak = _solve_leak_lp(req.source_spectrum, req.target_spectrum)
    if leak is None:
        raise SolverFailure("LP returned the zero leak for a nondegenerate source")
    best_leakless = leakless_optimum(req)
    if best_leakless.p >= p_lp - LEAKLESS_PREFERENCE_TOL:
        return best_leakless
    return _make_plan(req, p_lp, finalize_spectrum(leak), "leaky", None)


def _supports(n: int, rng: np.random.Generator, count: int):
    if n <= 6:
        for size in range(2, n + 1):
            yield from itertools.combinations(range(n), size)
        return
    seen = set()
    while len(seen) < count:
        size = int(rng.integers(2, n + 1))
        s = tuple(sorted(rng.choice(n, size=size, replace=False).tolist()))
        if s not in seen:
            seen.add(s)
            yield s


def check_lemma1(
    req: AmplificationRequest,
    samples: int = 200,
    seed: int = 0,
    min_weight: float = 1e-3,
) -> Lemma1Report:
    """Search for a nontrivial leak that reaches the upper bound.

    Nontrivial leaks are explored two ways: LPs restricted to a support of
    at least two components, each forced to hold ``min_weight`` of the leak,
    and ``samples`` leaks drawn uniformly from the simplex.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    lam_a = req.source_spectrum
    lam_b = req.target_spectrum
    n = req.n
    ordered = np.sort(lam_b)
    min_unique = bool(ordered[1] - ordered[0] > UNIQUE_REL_GAP * ordered[0])
    p_up = upper_bound(req)

    best_p = -math.inf
    best_leak = None
    n_lps = 0
    for support in _supports(n, rng, max(samples, 64)):
        p, leak = _solve_leak_lp(lam_a, lam_b, support, min_weight)
        n_lps += 1
        if leak is not None and p > best_p:
            best_p, best_leak = p, leak
    for _ in range(samples):
        leak = n * rng.dirichlet(np.ones(n))
        p = float(np.min(lam_a / circular_convolve(lam_b, leak)))
        if p > best_p:
            best_p, best_leak = p, leak

    return Lemma1Report(
        min_unique=min_unique,
        best_nontrivial_leaky_p=float(best_p),
        p_up=p_up,
        saturates=bool(best_p >= p_up - 1e-9),
        best_leak=best_leak,
        restricted_lps=n_lps,
        random_leaks=samples,
    )


def _last_eigenvalue(n: int, amplitude: float) -> float:
    """``exp(-x) * n * sum_r x**(n(r+1)-1) / (n(r+1)-1)!`` with ``x = amplitude**2``."""
    x = amplitude * amplitude
    term = 1.0
    for k in range(1, n):
        term *= x / k
    total = term
    k = n - 1
    while True:
        for m in range(1, n + 1):
            term *= x / (k + m)
        k += n
        total += term
        if term <= 1e-17 * total:
            break
    return math.exp(-x) * n * total


def small_amplitude_popt(req: AmplificationRequest) -> float:
    """Optimal success probability for amplitudes below one.

    The quotient of the last DFT-ordered eigenvalues of the source and
    target Gram matrices.
    """
    if not 0 < req.source_amplitude <= req.target_amplitude < 1:
        raise OutOfRegime(
            f"requires 0 < alpha <= beta < 1, got alpha={req.source_amplitude}, beta={req.target_amplitude}"
        )
    return _last_eigenvalue(req.n, req.source_amplitude) / _last_eigenvalue(req.n, req.target_amplitude)
