import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from noiseless_amp.coherent import SymmetricCoherentSet, gram_matrix, spectrum, spectrum_closed
from noiseless_amp.exceptions import LengthMismatch, NotCirculant
from noiseless_amp.spectral import (
    PropertyReport,
    amplitude_grid,
    check_logconcavity,
    check_property1,
    check_property2,
    circular_convolve,
    convolution_matrix,
    diagonalize_circulant,
    is_valid_spectrum,
    log_series,
    unitary_dft,
)

from conftest import REF_LAMBDA_A, REF_LAMBDA_B


def random_spectrum(draw_weights):
    w = np.asarray(draw_weights, dtype=float)
    return w.size * w / w.sum()


weights = st.integers(2, 8).flatmap(
    lambda n: arrays(np.float64, n, elements=st.floats(0.01, 10.0))
)


class TestUnitaryDft:
    @pytest.mark.parametrize("n", [1, 2, 3, 5, 8, 16, 31, 64])
    def test_unitary(self, n):
        f = unitary_dft(n)
        assert np.abs(f.conj().T @ f - np.eye(n)).max() <= 1e-12

    def test_entries(self):
        n = 5
        f = unitary_dft(n)
        p, q = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
        np.testing.assert_allclose(f, np.exp(-2j * np.pi * p * q / n) / math.sqrt(n), atol=1e-15)


class TestDiagonalize:
    def test_identity(self):
        np.testing.assert_allclose(diagonalize_circulant(np.eye(3)), [1, 1, 1], atol=1e-15)

    def test_all_ones(self):
        np.testing.assert_allclose(diagonalize_circulant(np.ones((4, 4))), [4, 0, 0, 0], atol=1e-14)

    def test_worked_example(self):
        g = gram_matrix(SymmetricCoherentSet(4, 2.0))
        np.testing.assert_allclose(diagonalize_circulant(g), REF_LAMBDA_A, atol=1e-5)

    def test_equals_plain_dft_of_first_row(self):
        g = gram_matrix(SymmetricCoherentSet(6, 1.1))
        np.testing.assert_allclose(diagonalize_circulant(g), np.fft.fft(g[0]).real, atol=1e-13)

    def test_rejects_non_circulant(self):
        g = np.array([[1, 0.5, 0.1], [0.5, 1, 0.3], [0.1, 0.3, 1]])
        with pytest.raises(NotCirculant):
            diagonalize_circulant(g)

    @pytest.mark.parametrize("n", range(2, 9))
    @pytest.mark.parametrize("amp", [0.05, 0.8, 1.9, 3.0])
    def test_agrees_with_closed_form(self, n, amp):
        s = SymmetricCoherentSet(n, amp)
        np.testing.assert_allclose(diagonalize_circulant(gram_matrix(s)), spectrum_closed(s), atol=1e-10)


class TestConvolution:
    def test_identity_element(self):
        u = np.array([0.5, 1.2, 2.3])
        np.testing.assert_allclose(circular_convolve(u, [3, 0, 0]), u, atol=1e-15)

    @pytest.mark.parametrize("s", range(4))
    def test_point_mass_rotates(self, s):
        u = REF_LAMBDA_A
        e = np.zeros(4)
        e[s] = 4
        got = circular_convolve(u, e)
        for i in range(4):
            assert got[i] == pytest.approx(u[(i - s) % 4], abs=1e-15)

    def test_uniform_vector_averages(self):
        # oracle: (1/4) * sum_j lambda_j * 1 for every component
        expected = np.full(4, REF_LAMBDA_A.sum() / 4)
        np.testing.assert_allclose(circular_convolve(np.ones(4), REF_LAMBDA_A), expected, atol=1e-15)
        np.testing.assert_allclose(expected, 1.0, atol=1e-5)

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            circular_convolve([1, 1], [1, 1, 1])

    def test_matrix_form(self):
        rng = np.random.default_rng(3)
        u, v = rng.random(6), rng.random(6)
        np.testing.assert_allclose(convolution_matrix(u) @ v, circular_convolve(u, v), atol=1e-15)

    @settings(max_examples=80)
    @given(st.data())
    def test_algebra(self, data):
        n = data.draw(st.integers(2, 8))
        vec = arrays(np.float64, n, elements=st.floats(0.01, 10.0))
        u, v, w = (random_spectrum(data.draw(vec)) for _ in range(3))
        np.testing.assert_allclose(circular_convolve(u, v), circular_convolve(v, u), atol=1e-12)
        np.testing.assert_allclose(
            circular_convolve(circular_convolve(u, v), w),
            circular_convolve(u, circular_convolve(v, w)),
            atol=1e-12,
        )
        assert circular_convolve(u, v).sum() == pytest.approx(u.sum() * v.sum() / n, abs=1e-10)
        assert is_valid_spectrum(circular_convolve(u, v))


class TestIsValidSpectrum:
    def test_examples(self):
        assert is_valid_spectrum([2, 0])
        assert not is_valid_spectrum([1.5, 1.5])
        assert is_valid_spectrum(spectrum(SymmetricCoherentSet(4, 2.0)))

    def test_rounded_reference_breaks_trace(self):
        # the six-digit reference values sum to 4.000004, outside the 1e-9 trace tolerance
        assert abs(REF_LAMBDA_A.sum() - 4) > 1e-9
        assert not is_valid_spectrum(REF_LAMBDA_A)

    def test_tolerances(self):
        assert is_valid_spectrum([2 + 1e-10, -1e-10])
        assert not is_valid_spectrum([2 + 1e-9, -1e-9])
        assert not is_valid_spectrum([2 + 2e-9, 0])
        assert not is_valid_spectrum([])
        assert not is_valid_spectrum([math.nan, 2])


class TestProperty1:
    def test_small_grid_holds(self):
        rep = check_property1(4, [k / 10 for k in range(1, 11)])
        assert rep.holds and rep.witness is None and rep.checked == 10

    def test_fails_at_two(self):
        rep = check_property1(4, [2.0])
        assert not rep.holds
        assert rep.witness == (2.0, 1)
        lam = spectrum(SymmetricCoherentSet(4, 2.0))
        assert rep.margin == pytest.approx(lam[1] - lam[2])
        assert REF_LAMBDA_A[2] > REF_LAMBDA_A[1]

    def test_two_state_margin(self):
        # lambda_0 - lambda_1 = 2 exp(-2 a^2) for n=2
        rep = check_property1(2, [0.5])
        assert rep.holds
        assert rep.margin == pytest.approx(2 * math.exp(-0.5), abs=1e-14)

    def test_non_positive_amplitude_rejected(self):
        with pytest.raises(ValueError):
            check_property1(3, [0.0])

    @pytest.mark.parametrize("n", range(2, 9))
    def test_strict_below_one(self, n):
        rep = check_property1(n, amplitude_grid(0.05, include_upper=False))
        assert rep.holds and rep.margin > 0


class TestProperty2:
    def test_grid_holds(self):
        rng = np.random.default_rng(11)
        pairs = [tuple(sorted(rng.uniform(0.01, 0.99, 2))) for _ in range(50)]
        assert check_property2(3, pairs).holds

    def test_degenerate_pair_rejected(self):
        with pytest.raises(ValueError):
            check_property2(3, [(0.5, 0.5)])

    def test_worked_pair_fails(self):
        # oracle from the reference spectra: some quotient is below the last one
        q = REF_LAMBDA_A / REF_LAMBDA_B
        assert np.any(q[:-1] < q[-1])
        rep = check_property2(4, [(2.0, 2.3)])
        assert not rep.holds
        assert rep.witness[2] in set(np.flatnonzero(q[:-1] < q[-1]).tolist())


class TestLogConcavity:
    @pytest.mark.parametrize("n, j", [(2, 1), (3, 2), (3, 1), (4, 3)])
    def test_holds(self, n, j):
        rep = check_logconcavity(n, j, amplitude_grid(0.01, include_upper=False))
        assert rep.holds and rep.checked == 97

    def test_single_point_vacuous(self):
        rep = check_logconcavity(2, 1, [0.5])
        assert rep.holds and rep.checked == 0

    def test_bad_index(self):
        with pytest.raises(ValueError):
            check_logconcavity(3, 0, [0.5])
        with pytest.raises(ValueError):
            check_logconcavity(3, 3, [0.5])

    def test_detects_convex_log(self):
        # log f_1 for n=2 is log sinh(x); on (5, 8) it is nearly linear, so a
        # tolerance of -1 forces a violation
        rep = check_logconcavity(2, 1, [5.0, 6.0, 7.0], tol=-1.0)
        assert not rep.holds

    @pytest.mark.parametrize("n, j", [(2, 1), (3, 1), (3, 2), (5, 4)])
    def test_log_series(self, n, j):
        for x in (0.01, 0.5, 0.99, 3.0):
            direct = sum(x ** (n * r + j) / math.factorial(n * r + j) for r in range(25 // n + 5))
            assert log_series(n, j, x) == pytest.approx(math.log(direct), rel=1e-13)

    def test_two_state_closed_form(self):
        # f_1 for n=2 is sinh
        assert log_series(2, 1, 0.7) == pytest.approx(math.log(math.sinh(0.7)), rel=1e-14)


class TestPropertyReport:
    def test_holds_iff_no_witness(self):
        with pytest.raises(ValueError):
            PropertyReport(holds=True, margin=0.0, witness=(1,))
        with pytest.raises(ValueError):
            PropertyReport(holds=False, margin=0.0)

    def test_merge_takes_min(self):
        a = PropertyReport(True, 0.5, None, 3)
        b = PropertyReport(False, -0.1, (2.0,), 2)
        m = a.merge(b)
        assert not m.holds and m.margin == -0.1 and m.witness == (2.0,) and m.checked == 5
        assert a.merge(a).holds

    def test_merge_of_shards_equals_whole(self):
        grid = amplitude_grid(0.1) + [2.0]
        whole = check_property1(4, grid)
        parts = check_property1(4, grid[:5]).merge(check_property1(4, grid[5:]))
        assert whole == parts


def test_amplitude_grid():
    g = amplitude_grid(0.01)
    assert len(g) == 100 and g[0] == 0.01 and g[-1] == 1.0
    assert amplitude_grid(0.25, include_upper=False) == [0.25, 0.5, 0.75]
