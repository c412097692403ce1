import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ncortho.schur_params import (
    GammaParams1D,
    MomentKernel1D,
    PositivityError,
    catalan_count,
    det_block,
    det_principal,
    fisher_hadamard,
    julia,
    lattice_expand,
    moment_row,
    moments_from_params,
    normalized_moment,
    params_from_moments,
    spectral_factor,
    szego_class_margin,
    unitary_product,
)


def test_julia_examples():
    np.testing.assert_allclose(julia(0), [[0, 1], [1, 0]])
    r = np.sqrt(3) / 2
    np.testing.assert_allclose(julia(0.5), [[0.5, r], [r, -0.5]])
    np.testing.assert_allclose(julia(0.5j), [[0.5j, r], [r, 0.5j]])
    with pytest.raises(ValueError):
        julia(1.0)


def test_julia_unitary(rng):
    for _ in range(10):
        g = 0.99 * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
        J = julia(g)
        np.testing.assert_allclose(J.conj().T @ J, np.eye(2), atol=1e-15)


def test_forward_examples():
    p = GammaParams1D.from_pairs(np.ones(3), {(0, 1): 0.5})
    assert moments_from_params(p)[0, 1] == pytest.approx(0.5)
    p = GammaParams1D.from_pairs(np.ones(3), {(0, 2): 0.3})
    assert moments_from_params(p)[0, 2] == pytest.approx(0.3)
    np.testing.assert_allclose(moments_from_params(GammaParams1D.zeros(5)).entries, np.eye(6))


def test_second_offset_formula(rng):
    # s02 = sqrt(s00 s22) (g01 g12 + d01 g02 d12)
    p = GammaParams1D.random(rng, 2)
    g, d = p.gamma, p.dd
    want = np.sqrt(p.diag[0] * p.diag[2]) * (g[0, 1] * g[1, 2] + d[0, 1] * g[0, 2] * d[1, 2])
    assert moments_from_params(p)[0, 2] == pytest.approx(want, abs=1e-15)


def test_inverse_examples():
    p = params_from_moments(MomentKernel1D(np.eye(4)))
    assert np.all(p.gamma == 0) and np.all(p.diag == 1)
    p = params_from_moments(MomentKernel1D(np.array([[1, 0.5], [0.5, 1]])))
    assert p.gamma[0, 1] == pytest.approx(0.5)


def test_lattice_matches_dense_product(rng):
    p = GammaParams1D.random(rng, 6)
    for k in range(6):
        for j in range(k + 1, 7):
            U = unitary_product(p, k, j)
            np.testing.assert_allclose(U.conj().T @ U, np.eye(j - k + 1), atol=1e-13)
            assert U[0, 0] == pytest.approx(normalized_moment(p, k, j), abs=1e-13)


def test_moment_row_matches_full(rng):
    p = GammaParams1D.random(rng, 7)
    np.testing.assert_allclose(moment_row(p, 2), moments_from_params(p).entries[2, 2:], atol=1e-14)


def test_forward_is_positive_definite(rng):
    for _ in range(10):
        K = moments_from_params(GammaParams1D.random(rng, 8))
        assert np.linalg.eigvalsh(K.entries).min() > 0


def test_inverse_rejects_indefinite():
    with pytest.raises(PositivityError):
        params_from_moments(MomentKernel1D(np.array([[1, 2], [2, 1]])))
    with pytest.raises(ValueError):
        MomentKernel1D(np.array([[1, 2], [0, 1]]))


def test_det_principal_examples():
    p = GammaParams1D.from_pairs(np.ones(3), {(0, 1): 0.5, (0, 2): 0.5, (1, 2): 0.5})
    assert det_principal(p, 0, 2) == pytest.approx(0.421875)
    assert det_block(moments_from_params(p), 0, 2) == pytest.approx(0.421875)
    q = GammaParams1D.random(np.random.default_rng(3), 4)
    assert det_principal(q, 2, 2) == pytest.approx(q.diag[2])
    assert det_principal(GammaParams1D.zeros(5), 1, 4) == 1.0
    assert det_principal(q, 3, 2) == 1.0


def test_fisher_hadamard_examples(rng):
    p = GammaParams1D.random(rng, 6)
    assert fisher_hadamard(p, 2, 2, 2, 5) == 1.0
    assert fisher_hadamard(GammaParams1D.zeros(6), 0, 2, 3, 6) == 1.0
    lhs = det_principal(p, 0, 6) * det_principal(p, 2, 3)
    rhs = det_principal(p, 0, 3) * det_principal(p, 2, 6) * fisher_hadamard(p, 0, 2, 3, 6)
    assert lhs == pytest.approx(rhs, rel=1e-10)


def test_lattice_expand_examples():
    assert [str(t) for t in lattice_expand(1)] == ["+g01"]
    terms = lattice_expand(3)
    assert len(terms) == 5
    want = {
        ("+", frozenset({"g01", "g12", "g23"})),
        ("+", frozenset({"g01", "d12", "g13", "d23"})),
        ("+", frozenset({"d01", "g02", "d12", "g23"})),
        ("-", frozenset({"d01", "g02", "conj(g)12", "g13", "d23"})),
        ("+", frozenset({"d01", "d02", "g03", "d13", "d23"})),
    }
    got = {(str(t)[0], frozenset(str(t)[1:].split("*"))) for t in terms}
    assert got == want
    assert len(lattice_expand(4)) == 14


def test_catalan_numbers():
    assert [catalan_count(l) for l in range(1, 9)] == [1, 2, 5, 14, 42, 132, 429, 1430]


def test_spectral_factor_examples():
    np.testing.assert_allclose(spectral_factor(MomentKernel1D(np.eye(3))).entries, np.eye(3))
    theta = spectral_factor(MomentKernel1D(np.array([[1, 0.5], [0.5, 1]])))
    # columns reproduce the kernel: c_0 = (sqrt(.75), .5), c_1 = (0, 1)
    np.testing.assert_allclose(theta.entries, [[np.sqrt(0.75), 0], [0.5, 1]], atol=1e-15)
    np.testing.assert_allclose(theta.kernel(), [[1, 0.5], [0.5, 1]], atol=1e-15)


def test_spectral_factor_random(rng):
    p = GammaParams1D.random(rng, 10)
    K = moments_from_params(p)
    theta = spectral_factor(K)
    assert np.allclose(np.triu(theta.entries, 1), 0)
    np.testing.assert_allclose(theta.kernel(), K.entries, atol=1e-10)
    assert theta.entries.diagonal().real.min() == pytest.approx(szego_class_margin(p), rel=1e-9)


def test_szego_margin_examples():
    assert szego_class_margin(GammaParams1D.zeros(4)) == 1.0
    p = GammaParams1D.from_pairs(np.ones(5), {(k, j): 0.5 for k in range(5) for j in range(k + 1, 5)})
    assert szego_class_margin(p) == pytest.approx(0.5625)
    p = GammaParams1D.from_pairs(np.ones(3), {(0, 1): 0.99})
    assert szego_class_margin(p) == pytest.approx(np.sqrt(1 - 0.9801))


def test_params_validation():
    with pytest.raises(ValueError):
        GammaParams1D.from_pairs(np.ones(3), {(0, 1): 1.0})
    with pytest.raises(ValueError):
        GammaParams1D(np.array([1.0, -1.0]), np.zeros((2, 2)))


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 9), st.integers(0, 2**31))
def test_roundtrip_property(h, seed):
    p = GammaParams1D.random(np.random.default_rng(seed), h, radius=0.85)
    q = params_from_moments(moments_from_params(p))
    np.testing.assert_allclose(q.gamma, p.gamma, atol=1e-9)
    np.testing.assert_allclose(q.diag, p.diag, rtol=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 8), st.integers(0, 2**31))
def test_determinant_property(h, seed):
    p = GammaParams1D.random(np.random.default_rng(seed), h)
    K = moments_from_params(p)
    for l in range(h + 1):
        assert det_principal(p, l, h) == pytest.approx(det_block(K, l, h), rel=1e-9)
