"""scikit-learn compatible wrappers.

``GramSpectrumTransformer`` maps a column of amplitudes to Gram spectra, one
row per amplitude. ``AmplificationOptimizer`` maps ``(alpha, beta)`` rows to
optimal success probabilities. Both are stateless apart from the fitted
input width, so they drop into pipelines and ``clone`` cleanly.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted, validate_data

from .coherent import SymmetricCoherentSet, gram_matrix, spectrum_closed, spectrum_series
from .spectral import diagonalize_circulant
from .transform import AmplificationRequest, leakless_optimum, leaky_optimum, upper_bound

__all__ = ["GramSpectrumTransformer", "AmplificationOptimizer", "as_amplitude_column"]

_ROUTES = {
    "series": spectrum_series,
    "closed": spectrum_closed,
    "dft": lambda cset: diagonalize_circulant(gram_matrix(cset)),
}


class GramSpectrumTransformer(TransformerMixin, BaseEstimator):
    """Transform amplitudes into DFT-ordered Gram eigenvalues.

    Parameters
    ----------
    n : int
        Number of states in the symmetric set.
    route : {"series", "closed", "dft"}
        Which spectrum computation to use.
    """

    def __init__(self, n: int = 2, route: str = "series"):
        self.n = n
        self.route = route

    def _validate_params(self):
        if self.route not in _ROUTES:
            raise ValueError(f"route must be one of {sorted(_ROUTES)}, got {self.route!r}")
        SymmetricCoherentSet(self.n, 0.0)

    def fit(self, X, y=None):
        self._validate_params()
        X = validate_data(self, X, ensure_2d=True, dtype=float)
        if X.shape[1] != 1:
            raise ValueError(f"expected a single amplitude column, got {X.shape[1]} columns")
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        X = validate_data(self, X, reset=False, dtype=float)
        compute = _ROUTES[self.route]
        return np.vstack([compute(SymmetricCoherentSet(self.n, a)) for a in X[:, 0]])

    def get_feature_names_out(self, input_features=None):
        return np.array([f"lambda_{j}" for j in range(self.n)], dtype=object)


class AmplificationOptimizer(RegressorMixin, BaseEstimator):
    """Predict the best amplification success probability for ``(alpha, beta)`` rows.

    ``mode`` selects the bound (``"bound"``), the best leakless plan
    (``"leakless"``) or the global optimum over leaks (``"leaky"``).
    ``fit`` records the plans for the training rows in ``plans_``; ``y`` is
    ignored except by ``score``.
    """

    def __init__(self, n: int = 2, mode: str = "leaky"):
        self.n = n
        self.mode = mode

    def _solve(self, alpha: float, beta: float):
        req = AmplificationRequest(self.n, alpha, beta)
        if self.mode == "bound":
            return upper_bound(req)
        if self.mode == "leakless":
            return leakless_optimum(req)
        return leaky_optimum(req)

    def fit(self, X, y=None):
        if self.mode not in ("bound", "leakless", "leaky"):
            raise ValueError(f"mode must be 'bound', 'leakless' or 'leaky', got {self.mode!r}")
        X = validate_data(self, X, dtype=float)
        if X.shape[1] != 2:
            raise ValueError(f"expected (alpha, beta) columns, got {X.shape[1]} columns")
        self.plans_ = [self._solve(a, b) for a, b in X]
        return self

    def predict(self, X):
        check_is_fitted(self, "plans_")
        X = validate_data(self, X, reset=False, dtype=float)
        out = [self._solve(a, b) for a, b in X]
        return np.array([r if isinstance(r, float) else r.p for r in out])


def as_amplitude_column(amplitudes) -> np.ndarray:
    """Reshape a flat sequence of amplitudes into the single-column layout."""
    return check_array(np.asarray(amplitudes, dtype=float).reshape(-1, 1))
