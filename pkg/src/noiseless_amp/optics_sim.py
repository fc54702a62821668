"""Linear-optics simulation of discrimination-based amplification.

Modes are plain complex coherent amplitudes. Detectors only distinguish
vacuum from "one or more photons": a mode of amplitude ``a`` clicks with
probability ``1 - exp(-eta * |a|**2)``. Dark counts are not modelled, so an
empty port never clicks and identifications are never wrong.

The strong reference beam is treated as an unlimited classical resource:
once a state is identified, the amplified output is prepared exactly.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .coherent import SymmetricCoherentSet, roots_of_unity
from .exceptions import UnknownScenario

__all__ = [
    "UsdOutcome",
    "INCONCLUSIVE",
    "Scenario",
    "SimReport",
    "beamsplitter",
    "displace",
    "click_probability",
    "usd_two",
    "usd_multiport",
    "multiport_success_probability",
    "amplify_pipeline",
    "monte_carlo",
    "RNG_ALGORITHM",
]

RNG_ALGORITHM = "numpy.random.PCG64"
SQRT1_2 = 1.0 / math.sqrt(2.0)

SCENARIOS = ("usd_two", "usd_multiport", "amplify_pipeline")


@dataclass(frozen=True)
class UsdOutcome:
    """Either ``identified(index)`` or inconclusive (``index is None``)."""

    index: int | None = None

    @property
    def identified(self) -> bool:
        return self.index is not None

    @classmethod
    def found(cls, index: int) -> "UsdOutcome":
        return cls(int(index))


INCONCLUSIVE = UsdOutcome()


def _check_amplitude(a) -> complex:
    a = complex(a)
    if not (math.isfinite(a.real) and math.isfinite(a.imag)):
        raise ValueError(f"mode amplitude must be finite, got {a!r}")
    return a


def beamsplitter(a: complex, b: complex) -> tuple[complex, complex]:
    """Balanced beam splitter: ``(a, b) -> ((a + b)/sqrt2, (a - b)/sqrt2)``."""
    a = _check_amplitude(a)
    b = _check_amplitude(b)
    return (a + b) * SQRT1_2, (a - b) * SQRT1_2


def displace(a: complex, d: complex) -> complex:
    return _check_amplitude(a) + _check_amplitude(d)


def click_probability(a: complex, efficiency: float = 1.0) -> float:
    if not 0 < efficiency <= 1:
        raise ValueError(f"efficiency must be in (0, 1], got {efficiency}")
    return -math.expm1(-efficiency * abs(_check_amplitude(a)) ** 2)


def _clicks(a: complex, rng: np.random.Generator, efficiency: float) -> bool:
    p = click_probability(a, efficiency)
    # always draw so the stream position is independent of the amplitude
    u = rng.random()
    return u < p


def usd_two(alpha: float, actual: int, rng: np.random.Generator, efficiency: float = 1.0) -> UsdOutcome:
    """Discriminate ``|+alpha>`` from ``|-alpha>`` with one beam splitter.

    ``actual`` is +1 or -1. Outcome index 0 means ``+alpha`` and index 1
    means ``-alpha`` (the order of the ``n = 2`` symmetric set).
    """
    if not alpha > 0:
        raise ValueError(f"alpha must be > 0, got {alpha}")
    if actual not in (1, -1):
        raise ValueError(f"actual must be +1 or -1, got {actual!r}")
    port1, port2 = beamsplitter(actual * alpha, alpha)
    d1 = _clicks(port1, rng, efficiency)
    d2 = _clicks(port2, rng, efficiency)
    if d1 and not d2:
        return UsdOutcome.found(0)
    if d2 and not d1:
        return UsdOutcome.found(1)
    return INCONCLUSIVE


def _multiport_branches(n: int, branches: int | None) -> int:
    b = n if branches is None else int(branches)
    if b not in (n, n - 1):
        raise ValueError(f"branches must be n or n-1, got {b}")
    return b


def usd_multiport(
    cset: SymmetricCoherentSet,
    actual: int,
    rng: np.random.Generator,
    efficiency: float = 1.0,
    branches: int | None = None,
) -> UsdOutcome:
    """Rule candidates out one branch at a time.

    The input is split evenly into ``branches`` beams; beam ``k`` is
    displaced by minus candidate ``k`` (scaled down the same way), so it
    stays vacuum exactly when the input is candidate ``k``. A click rules
    ``k`` out. With ``branches = n - 1`` the last candidate is never tested
    and can only be identified by elimination.
    """
    n = cset.n
    if not 0 <= actual < n:
        raise ValueError(f"actual must be in [0, {n - 1}], got {actual}")
    nb = _multiport_branches(n, branches)
    members = cset.members()
    scale = 1.0 / math.sqrt(nb)
    branch_in = members[actual] * scale
    ruled_out = [False] * n
    for k in range(nb):
        probe = displace(branch_in, -members[k] * scale)
        ruled_out[k] = _clicks(probe, rng, efficiency)
    survivors = [k for k in range(n) if not ruled_out[k]]
    if len(survivors) == 1:
        return UsdOutcome.found(survivors[0])
    return INCONCLUSIVE


def multiport_success_probability(
    cset: SymmetricCoherentSet,
    actual: int,
    efficiency: float = 1.0,
    branches: int | None = None,
) -> float:
    """Analytic success probability of :func:`usd_multiport`."""
    n = cset.n
    nb = _multiport_branches(n, branches)
    if nb < n:
        # only the untested last candidate can survive elimination
        if actual != n - 1:
            return 0.0
        tested = range(nb)
    else:
        tested = (k for k in range(n) if k != actual)
    w = roots_of_unity(n)
    x = efficiency * cset.amplitude ** 2 / nb
    return math.prod(-math.expm1(-x * abs(w[actual] - w[k]) ** 2) for k in tested)


def amplify_pipeline(
    cset: SymmetricCoherentSet,
    gain: float,
    actual: int,
    rng: np.random.Generator,
    efficiency: float = 1.0,
    branches: int | None = None,
) -> complex | None:
    """Identify the input, then emit the matching amplified amplitude.

    Returns ``None`` for a heralded failure. The emitted amplitude is exactly
    ``cset.scaled(gain).member(m)`` for the identified index ``m``.
    """
    if not gain >= 1:
        raise ValueError(f"gain must be >= 1, got {gain}")
    if cset.n == 2:
        outcome = usd_two(cset.amplitude, 1 if actual == 0 else -1, rng, efficiency)
    else:
        outcome = usd_multiport(cset, actual, rng, efficiency, branches)
    if not outcome.identified:
        return None
    return cset.scaled(gain).member(outcome.index)


@dataclass(frozen=True)
class Scenario:
    kind: str
    n: int = 2
    alpha: float = 1.0
    gain: float = 1.0
    efficiency: float = 1.0
    branches: int | None = None

    def __post_init__(self):
        if self.kind not in SCENARIOS:
            raise UnknownScenario(f"unknown scenario {self.kind!r}; expected one of {', '.join(SCENARIOS)}")
        if self.kind == "usd_two" and self.n != 2:
            raise ValueError("usd_two requires n = 2")
        SymmetricCoherentSet(self.n, self.alpha)
        if not 0 < self.efficiency <= 1:
            raise ValueError(f"efficiency must be in (0, 1], got {self.efficiency}")

    @property
    def coherent_set(self) -> SymmetricCoherentSet:
        return SymmetricCoherentSet(self.n, self.alpha)

    def analytic_success(self) -> float:
        """Success probability averaged over a uniformly random input."""
        if self.kind == "usd_two" or (self.kind == "amplify_pipeline" and self.n == 2):
            return -math.expm1(-2.0 * self.efficiency * self.alpha ** 2)
        cset = self.coherent_set
        probs = [multiport_success_probability(cset, m, self.efficiency, self.branches) for m in range(self.n)]
        return sum(probs) / self.n


@dataclass(frozen=True)
class SimReport:
    scenario: dict
    trials: int
    success_count: int
    wrong_count: int
    inconclusive_count: int
    empirical_rate: float
    ci_halfwidth: float
    analytic_rate: float
    seed: int
    shards: int = 1
    rng: str = RNG_ALGORITHM
    fidelity_failures: int = 0

    @property
    def failure_rate(self) -> float:
        return self.inconclusive_count / self.trials

    def to_dict(self) -> dict:
        d = asdict(self)
        d["failure_rate"] = self.failure_rate
        return d


@dataclass
class _Tally:
    success: int = 0
    wrong: int = 0
    inconclusive: int = 0
    fidelity_failures: int = 0

    def add(self, other: "_Tally") -> None:
        self.success += other.success
        self.wrong += other.wrong
        self.inconclusive += other.inconclusive
        self.fidelity_failures += other.fidelity_failures


def _run_shard(scenario: Scenario, trials: int, seed_seq: np.random.SeedSequence) -> _Tally:
    rng = np.random.Generator(np.random.PCG64(seed_seq))
    cset = scenario.coherent_set
    target = cset.scaled(scenario.gain) if scenario.kind == "amplify_pipeline" else None
    tally = _Tally()
    for _ in range(trials):
        actual = int(rng.integers(scenario.n))
        if scenario.kind == "amplify_pipeline":
            out = amplify_pipeline(cset, scenario.gain, actual, rng, scenario.efficiency, scenario.branches)
            if out is None:
                tally.inconclusive += 1
                continue
            tally.success += 1
            if out != target.member(actual):
                tally.wrong += 1
                tally.fidelity_failures += 1
            continue
        if scenario.kind == "usd_two":
            outcome = usd_two(scenario.alpha, 1 if actual == 0 else -1, rng, scenario.efficiency)
        else:
            outcome = usd_multiport(cset, actual, rng, scenario.efficiency, scenario.branches)
        if not outcome.identified:
            tally.inconclusive += 1
        elif outcome.index == actual:
            tally.success += 1
        else:
            tally.wrong += 1
    return tally


def monte_carlo(scenario: Scenario | dict, trials: int, seed: int, shards: int = 1, workers: int = 1) -> SimReport:
    """Run ``trials`` independent trials of ``scenario``.

    Trials are split over ``shards`` sub-streams spawned from ``seed``;
    results depend only on ``(seed, shards)``, not on ``workers``.
    """
    if isinstance(scenario, dict):
        scenario = Scenario(**scenario)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if shards < 1:
        raise ValueError("shards must be >= 1")
    sizes = [trials // shards + (1 if i < trials % shards else 0) for i in range(shards)]
    seqs = np.random.SeedSequence(seed).spawn(shards)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda args: _run_shard(scenario, *args), zip(sizes, seqs)))
    else:
        parts = [_run_shard(scenario, size, seq) for size, seq in zip(sizes, seqs)]
    tally = _Tally()
    for part in parts:
        tally.add(part)

    rate = tally.success / trials
    return SimReport(
        scenario=asdict(scenario),
        trials=trials,
        success_count=tally.success,
        wrong_count=tally.wrong,
        inconclusive_count=tally.inconclusive,
        empirical_rate=rate,
        ci_halfwidth=3.0 * math.sqrt(rate * (1.0 - rate) / trials),
        analytic_rate=scenario.analytic_success(),
        seed=seed,
        shards=shards,
        fidelity_failures=tally.fidelity_failures,
    )
