import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from noiseless_amp import coherent
from noiseless_amp.coherent import (
    SymmetricCoherentSet,
    check_gram_matrix,
    finalize_spectrum,
    gram_matrix,
    overlap,
    roots_of_unity,
    spectrum,
    spectrum_closed,
    spectrum_series,
)
from noiseless_amp.exceptions import ImaginaryResidueTooLarge, NegativeEigenvalue
from noiseless_amp.spectral import diagonalize_circulant

from conftest import REF_LAMBDA_A, REF_LAMBDA_B

reals = st.floats(min_value=-4, max_value=4, allow_nan=False)


def two_state_oracle(alpha):
    """Eigenvalues of [[1, c], [c, 1]] matched to the DFT vectors (1, 1) and (1, -1)."""
    c = math.exp(-2 * alpha**2)
    g = np.array([[1.0, c], [c, 1.0]])
    vals, vecs = np.linalg.eigh(g)
    symmetric = int(np.argmax(np.abs(vecs[0] + vecs[1])))
    return np.array([vals[symmetric], vals[1 - symmetric]])


class TestSymmetricCoherentSet:
    def test_members_follow_roots_of_unity(self):
        s = SymmetricCoherentSet(4, 1.5)
        np.testing.assert_array_equal(s.members(), [1.5, 1.5j, -1.5, -1.5j])

    @pytest.mark.parametrize("n", range(2, 13))
    def test_roots_are_conjugate_symmetric(self, n):
        w = roots_of_unity(n)
        for k in range(1, n):
            assert w[n - k] == w[k].conjugate()
        np.testing.assert_allclose(w, np.exp(2j * np.pi * np.arange(n) / n), atol=1e-15)

    @pytest.mark.parametrize("n, amp", [(1, 1.0), (0, 1.0), (3, -0.1), (3, math.nan), (2.5, 1.0)])
    def test_rejects_invalid(self, n, amp):
        with pytest.raises(ValueError):
            SymmetricCoherentSet(n, amp)

    def test_is_immutable(self):
        s = SymmetricCoherentSet(3, 1.0)
        with pytest.raises(AttributeError):
            s.n = 4


class TestOverlap:
    def test_vacuum(self):
        assert overlap(0, 0) == 1

    @given(reals, reals)
    def test_self_overlap_is_one(self, re, im):
        assert overlap(complex(re, im), complex(re, im)) == pytest.approx(1, abs=1e-15)

    def test_opposite_amplitudes(self):
        assert overlap(1, -1) == pytest.approx(math.exp(-2), abs=1e-15)
        assert abs(overlap(1, -1) - 0.1353353) < 1e-7

    @given(reals, reals)
    def test_modulus(self, a, b):
        assert abs(overlap(a, b)) == pytest.approx(math.exp(-((a - b) ** 2) / 2), abs=1e-12)

    @given(reals, reals, reals, reals)
    def test_modulus_at_most_one(self, a, b, c, d):
        assert abs(overlap(complex(a, b), complex(c, d))) <= 1 + 1e-15


class TestGramMatrix:
    def test_zero_amplitude_all_ones(self):
        np.testing.assert_array_equal(gram_matrix(SymmetricCoherentSet(2, 0.0)), np.ones((2, 2)))

    def test_two_states(self):
        g = gram_matrix(SymmetricCoherentSet(2, 1.0))
        assert g[0, 1] == pytest.approx(math.exp(-2), abs=1e-15)
        assert g[1, 0] == pytest.approx(math.exp(-2), abs=1e-15)

    def test_worked_spectrum(self):
        g = gram_matrix(SymmetricCoherentSet(4, 2.0))
        np.testing.assert_allclose(diagonalize_circulant(g), REF_LAMBDA_A, atol=1e-5)

    @pytest.mark.parametrize("n", range(2, 9))
    @pytest.mark.parametrize("amp", [0.0, 0.3, 1.0, 2.7])
    def test_invariants(self, n, amp):
        g = gram_matrix(SymmetricCoherentSet(n, amp))
        assert np.all(np.diag(g) == 1)
        np.testing.assert_array_equal(g, g.conj().T)
        for i in range(n):
            for j in range(n):
                assert abs(g[i, j] - g[0, (j - i) % n]) <= 1e-14
        check_gram_matrix(g)

    def test_first_row_matches_overlap(self):
        s = SymmetricCoherentSet(5, 1.3)
        g = gram_matrix(s)
        for l in range(5):
            assert g[0, l] == pytest.approx(overlap(1.3, 1.3 * np.exp(2j * np.pi * l / 5)), abs=1e-15)

    def test_check_rejects_non_psd(self):
        with pytest.raises(NegativeEigenvalue):
            check_gram_matrix(np.array([[1.0, 2.0], [2.0, 1.0]]))

    def test_check_rejects_bad_diagonal(self):
        with pytest.raises(ValueError):
            check_gram_matrix(np.array([[1.0, 0.0], [0.0, 0.9]]))


class TestSpectrum:
    @pytest.mark.parametrize("route", [spectrum_series, spectrum_closed])
    def test_two_states(self, route):
        lam = route(SymmetricCoherentSet(2, 1.0))
        np.testing.assert_allclose(lam, two_state_oracle(1.0), atol=1e-14)
        np.testing.assert_allclose(lam, [1.1353353, 0.8646647], atol=1e-7)

    @pytest.mark.parametrize("route", [spectrum_series, spectrum_closed])
    def test_worked_values(self, route):
        np.testing.assert_allclose(route(SymmetricCoherentSet(4, 2.0)), REF_LAMBDA_A, atol=1e-5)
        np.testing.assert_allclose(route(SymmetricCoherentSet(4, 2.3)), REF_LAMBDA_B, atol=1e-5)

    @pytest.mark.parametrize("n", [2, 3, 7])
    @pytest.mark.parametrize("route", [spectrum_series, spectrum_closed])
    def test_zero_amplitude(self, n, route):
        np.testing.assert_allclose(route(SymmetricCoherentSet(n, 0.0)), [n] + [0] * (n - 1), atol=1e-14)

    def test_series_terminates_on_underflow(self):
        lam = spectrum_series(SymmetricCoherentSet(5, 1e-160))
        assert lam[0] == pytest.approx(5.0)

    @pytest.mark.parametrize("n", range(2, 9))
    def test_matches_dense_hermitian_solver(self, n):
        s = SymmetricCoherentSet(n, 1.7)
        dense = np.linalg.eigvalsh(gram_matrix(s))
        np.testing.assert_allclose(np.sort(spectrum_series(s)), dense, atol=1e-12)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(2, 10), st.floats(0.0, 4.0))
    def test_routes_agree_and_trace(self, n, amp):
        s = SymmetricCoherentSet(n, amp)
        a = spectrum_series(s)
        b = spectrum_closed(s)
        np.testing.assert_allclose(a, b, atol=1e-10)
        assert abs(a.sum() - n) <= 1e-9
        assert abs(b.sum() - n) <= 1e-9
        assert np.all(a >= 0)

    def test_series_relative_accuracy_at_small_amplitude(self):
        # last eigenvalue of n=6 at 0.1: 6 * exp(-0.01) * 0.01**5 / 5! to leading order
        lam = spectrum_series(SymmetricCoherentSet(6, 0.1))
        lead = 6 * math.exp(-0.01) * (0.01**5 / 120 + 0.01**11 / math.factorial(11))
        assert lam[5] == pytest.approx(lead, rel=1e-13)

    def test_large_amplitude_log_space(self):
        lam = spectrum_series(SymmetricCoherentSet(3, 30.0))
        np.testing.assert_allclose(lam, spectrum_closed(SymmetricCoherentSet(3, 30.0)), atol=1e-10)

    def test_coarser_truncation_still_close(self):
        s = SymmetricCoherentSet(4, 2.0)
        np.testing.assert_allclose(spectrum_series(s, 1e-8), spectrum_series(s), atol=1e-6)

    def test_terms_tolerance_must_be_positive(self):
        with pytest.raises(ValueError):
            spectrum_series(SymmetricCoherentSet(2, 1.0), 0.0)

    def test_spectrum_uses_dft_order_not_sorted(self):
        lam = spectrum(SymmetricCoherentSet(4, 2.0))
        assert lam[2] > lam[1]

    def test_spectrum_is_read_only(self):
        lam = spectrum(SymmetricCoherentSet(3, 1.0))
        with pytest.raises(ValueError):
            lam[0] = 0

    def test_imaginary_residue_detected(self, monkeypatch):
        real_roots = coherent.roots_of_unity

        def skewed(n):
            w = real_roots(n).copy()
            w[1] *= np.exp(1e-3j)
            return w

        monkeypatch.setattr(coherent, "roots_of_unity", skewed)
        with pytest.raises(ImaginaryResidueTooLarge):
            spectrum_closed(SymmetricCoherentSet(3, 1.0))


class TestFinalizeSpectrum:
    def test_clamps_round_off(self):
        out = finalize_spectrum([2.0, -5e-11])
        assert out[1] == 0.0

    def test_rejects_genuine_negative(self):
        with pytest.raises(NegativeEigenvalue):
            finalize_spectrum([2.0, -1e-6])
