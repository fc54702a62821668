"""Perfect-fidelity probabilistic amplification of symmetric coherent-state sets."""

__version__ = "0.1.0"

from .coherent import (
    SymmetricCoherentSet,
    gram_matrix,
    overlap,
    spectrum,
    spectrum_closed,
    spectrum_series,
)
from .spectral import (
    PropertyReport,
    check_logconcavity,
    check_property1,
    check_property2,
    circular_convolve,
    diagonalize_circulant,
    is_valid_spectrum,
    unitary_dft,
)
from .transform import (
    AmplificationRequest,
    Lemma1Report,
    TransformPlan,
    check_lemma1,
    leakless_optimum,
    leaky_optimum,
    redundancy,
    small_amplitude_popt,
    upper_bound,
    usd_success,
)
from .optics_sim import Scenario, SimReport, monte_carlo
from .estimators import AmplificationOptimizer, GramSpectrumTransformer

__all__ = [
    "SymmetricCoherentSet",
    "gram_matrix",
    "overlap",
    "spectrum",
    "spectrum_closed",
    "spectrum_series",
    "PropertyReport",
    "check_logconcavity",
    "check_property1",
    "check_property2",
    "circular_convolve",
    "diagonalize_circulant",
    "is_valid_spectrum",
    "unitary_dft",
    "AmplificationRequest",
    "Lemma1Report",
    "TransformPlan",
    "check_lemma1",
    "leakless_optimum",
    "leaky_optimum",
    "redundancy",
    "small_amplitude_popt",
    "upper_bound",
    "usd_success",
    "Scenario",
    "SimReport",
    "monte_carlo",
    "AmplificationOptimizer",
    "GramSpectrumTransformer",
]
