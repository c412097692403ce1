import json
from pathlib import Path

import numpy as np
import pytest

from ncortho.schur_params import (
    GammaParams1D,
    MomentKernel1D,
    moments_from_params,
    params_from_moments,
    spectral_factor,
)
from ncortho.ortho_one_var import (
    convergence_report,
    gamma_from_polys,
    gram_matrix,
    invert_embedded,
    leading_from_determinants,
    ortho_determinant,
    ortho_gram_schmidt,
    ortho_recurrence,
    szego_first_limit,
    szego_ratio,
    szego_ratio_sides,
    szego_strong_limit,
    toeplitz_embed,
)

BASELINE = Path(__file__).parent / "data" / "convergence_baseline.json"


def geometric_params(H, base=0.5):
    return GammaParams1D.from_pairs(
        np.ones(H + 1), {(k, j): base ** (j - k) for k in range(H + 1) for j in range(k + 1, H + 1)})


def test_zero_params_give_monomials():
    fam = ortho_recurrence(GammaParams1D.zeros(5))
    for (n, l), c in fam.phi.items():
        want = np.zeros(n + 1)
        want[n] = 1
        np.testing.assert_allclose(c, want)


def test_degree_zero(rng):
    p = GammaParams1D.random(rng, 4)
    fam = ortho_recurrence(p)
    for l in range(5):
        assert fam.phi[0, l][0] == pytest.approx(p.diag[l] ** -0.5)
        assert fam.phisharp[0, l][0] == pytest.approx(p.diag[l] ** -0.5)


def test_orthonormal_at_every_level(rng):
    p = GammaParams1D.random(rng, 8)
    K = moments_from_params(p)
    fam = ortho_recurrence(p)
    for l in range(4):
        polys = [fam.phi[n, l] for n in range(9 - l)]
        G = gram_matrix(polys, K.entries[l:, l:])
        np.testing.assert_allclose(G, np.eye(len(polys)), atol=1e-8)


def test_gram_schmidt_hand_example():
    fam = ortho_gram_schmidt(MomentKernel1D(np.array([[1, 0.5], [0.5, 1]])))
    np.testing.assert_allclose(fam.phi[1, 0], np.array([-0.5, 1]) / np.sqrt(0.75))
    fam = ortho_gram_schmidt(MomentKernel1D(np.eye(4)))
    np.testing.assert_allclose(fam.phi[3, 0], [0, 0, 0, 1])


def test_three_routes_agree(rng):
    K = moments_from_params(GammaParams1D.random(rng, 8))
    rec = ortho_recurrence(params_from_moments(K))
    gs = ortho_gram_schmidt(K)
    for n in range(9):
        np.testing.assert_allclose(rec.phi[n, 0], gs.phi[n, 0], atol=1e-8)
        np.testing.assert_allclose(rec.phi[n, 0], ortho_determinant(K, n), atol=1e-8)


def test_leading_coefficient_from_determinants(rng):
    K = moments_from_params(GammaParams1D.random(rng, 6))
    gs = ortho_gram_schmidt(K)
    for n in range(1, 7):
        assert gs.leading(n).real == pytest.approx(leading_from_determinants(K, 0, n), rel=1e-9)


def test_gamma_recovery_both_routes(rng):
    p = GammaParams1D.random(rng, 8)
    fam = ortho_recurrence(p)
    fam.kernel = moments_from_params(p)
    for route in ("leading", "determinant"):
        q = gamma_from_polys(fam, route=route)
        np.testing.assert_allclose(q.gamma, p.gamma, atol=1e-8)
    zero = gamma_from_polys(ortho_recurrence(GammaParams1D.zeros(4)))
    assert np.all(zero.gamma == 0)


def test_toeplitz_family_recovers_toeplitz_gammas():
    H = 7
    pairs = {(k, j): (-1) ** (j - k) / 2 for k in range(H + 1) for j in range(k + 1, H + 1)}
    q = gamma_from_polys(ortho_recurrence(GammaParams1D.from_pairs(np.ones(H + 1), pairs)))
    for n in range(1, H + 1):
        vals = [q.gamma[k, k + n] for k in range(H + 1 - n)]
        np.testing.assert_allclose(vals, vals[0], atol=1e-12)
        assert vals[0] == pytest.approx((-1) ** n / 2)


def test_embedding_trivial_cases(rng):
    fam = ortho_recurrence(GammaParams1D.zeros(5))
    _, sharp = toeplitz_embed(fam, 2)
    np.testing.assert_allclose(sharp, np.eye(4))
    np.testing.assert_allclose(invert_embedded(sharp), np.eye(4))
    p = GammaParams1D.random(rng, 5)
    phi0, sharp0 = toeplitz_embed(ortho_recurrence(p), 0)
    np.testing.assert_allclose(phi0, np.diag(p.diag ** -0.5))
    np.testing.assert_allclose(sharp0, phi0)


def test_embedded_inverse_product(rng):
    p = GammaParams1D.random(rng, 8, radius=0.5)
    _, sharp = toeplitz_embed(ortho_recurrence(p), 3)
    np.testing.assert_allclose(sharp @ invert_embedded(sharp), np.eye(len(sharp)), atol=1e-10)


def test_convergence_trivial_cases():
    rep = convergence_report(GammaParams1D.zeros(8), 5, 3)
    assert all(t == 0 for _, _, t in rep)
    assert all(ph == 0 for n, ph, _ in rep if n >= 3)
    single = GammaParams1D.from_pairs(np.ones(9), {(0, 1): 0.6})
    assert all(t == 0 for n, _, t in convergence_report(single, 6, 1) if n >= 2)


def test_convergence_regression_baseline():
    base = json.loads(BASELINE.read_text())
    rep = convergence_report(geometric_params(base["horizon"]), base["n_max"], base["window"])
    thetas = [t for _, _, t in rep]
    assert all(a > b for a, b in zip(thetas, thetas[1:]))
    for row, (n, ph, th) in zip(base["rows"], rep):
        assert row["n"] == n
        assert ph == pytest.approx(row["deviation_phi"], abs=1e-12)
        assert th == pytest.approx(row["deviation_theta"], abs=1e-12)


def test_inverse_sharp_approaches_spectral_factor():
    p = geometric_params(30)
    rep = convergence_report(p, 20, 4)
    assert rep[-1][2] < 1e-10
    theta = spectral_factor(moments_from_params(p)).entries
    np.testing.assert_allclose(theta.conj().T @ theta, moments_from_params(p).entries, atol=1e-12)


def test_szego_trivial():
    p = GammaParams1D.zeros(6)
    K = moments_from_params(p)
    assert szego_ratio(K, 1, 4) == pytest.approx(1.0)
    assert szego_first_limit(p, 2) == 1.0
    assert szego_strong_limit(p, 3) == (1.0, 1.0)


def test_szego_ratio_random(rng):
    p = GammaParams1D.random(rng, 10)
    lhs, rhs = szego_ratio_sides(moments_from_params(p), 1, 6)
    assert lhs == pytest.approx(rhs, rel=1e-9)


def test_first_limit_example():
    p = GammaParams1D.from_pairs(np.ones(9), {(k, j): 0.5 for k in range(9) for j in range(k + 1, 9)})
    assert szego_first_limit(p, 0) == pytest.approx(0.75 ** 8)


def test_strong_limit_product_is_one(rng):
    p = GammaParams1D.random(rng, 9, radius=0.6)
    for n in range(10):
        ratio, L = szego_strong_limit(p, n)
        assert ratio * L == pytest.approx(1.0, rel=1e-10)
