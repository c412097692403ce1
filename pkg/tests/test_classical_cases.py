import numpy as np
import pytest

from ncortho.classical_cases import (
    GegenbauerSpec,
    SzegoCoeffs,
    gegenbauer_closed,
    gegenbauer_gamma,
    gegenbauer_norm,
    gegenbauer_pipeline,
    hankel_check,
    modified_gegenbauer_norm_quadrature,
    semicircle_moments,
    shifted_mass,
    szego_recursion,
    three_term_from_moments,
    three_term_polys,
    toeplitz_lift,
    weight_mass,
    weight_moments_quadrature,
)
from ncortho.ortho_one_var import ortho_gram_schmidt, ortho_recurrence
from ncortho.schur_params import MomentKernel1D, params_from_moments


def test_szego_recursion_trivial():
    phi, _ = szego_recursion(SzegoCoeffs(np.zeros(4)), 4)
    for n, c in enumerate(phi):
        want = np.zeros(n + 1)
        want[n] = 1
        np.testing.assert_allclose(c, want)


def test_szego_recursion_one_step():
    phi, _ = szego_recursion(SzegoCoeffs([0.5, 0, 0]), 1)
    np.testing.assert_allclose(phi[1], np.array([-0.5, 1]) / np.sqrt(0.75))


def test_toeplitz_lift_matches_classical(rng):
    c = SzegoCoeffs(0.8 * np.sqrt(rng.uniform(size=8)) * np.exp(2j * np.pi * rng.uniform(size=8)))
    fam = ortho_recurrence(toeplitz_lift(c, 8), l_max=4)
    phi, _ = szego_recursion(c, 8)
    for l in range(4):
        for n in range(9 - l):
            np.testing.assert_allclose(fam.phi[n, l], phi[n], atol=1e-10)


def test_hankel_check():
    hilbert = MomentKernel1D(1 / (np.add.outer(np.arange(5), np.arange(5)) + 1))
    assert hankel_check(hilbert)
    toeplitz = MomentKernel1D(np.array([[1, 0.3, 0.1], [0.3, 1, 0.3], [0.1, 0.3, 1]]))
    assert not hankel_check(toeplitz)


def test_semicircle_three_term():
    K = semicircle_moments(6)
    assert K.entries[2, 2] == 2 and K.entries[3, 3] == 5
    c = three_term_from_moments(K)
    np.testing.assert_allclose(c.a, 0, atol=1e-12)
    np.testing.assert_allclose(c.b, 1, atol=1e-12)
    polys = three_term_polys(c, 1.0, 6)
    fam = ortho_gram_schmidt(K)
    for n in range(7):
        np.testing.assert_allclose(polys[n], fam.phi[n, 0], atol=1e-10)


def test_three_term_rejects_non_hankel():
    with pytest.raises(ValueError):
        three_term_from_moments(MomentKernel1D(np.array([[1, 0.3, 0.1], [0.3, 1, 0.3], [0.1, 0.3, 1]])))


def test_gegenbauer_h_example():
    assert gegenbauer_norm(0.5, 0, 2) == pytest.approx(0.2)
    assert modified_gegenbauer_norm_quadrature(0.5, 0, 2) == pytest.approx(0.2, abs=1e-12)


def test_odd_degrees_vanish_at_zero():
    for lam in (0.5, 1.0, 2.5):
        for l in range(3):
            for n in (1, 3, 5):
                assert gegenbauer_closed(GegenbauerSpec(lam, l, n))[2] == 0.0
                assert gegenbauer_gamma(lam, l, n) == 0.0


def test_weight_mass_and_shifted_mass():
    for lam in (0.5, 1.0, 2.5):
        assert weight_mass(lam) == pytest.approx(1.0, abs=1e-13)
        K = weight_moments_quadrature(lam, 2, 0)
        assert K.entries[0, 0] == pytest.approx(shifted_mass(lam, 2), rel=1e-12)


@pytest.mark.parametrize("lam", [0.5, 1.0, 2.5])
def test_closed_forms_match_quadrature(lam):
    for l in range(3):
        lead, zero = gegenbauer_pipeline(lam, l, 6)
        for n in range(7):
            h, k, z0 = gegenbauer_closed(GegenbauerSpec(lam, l, n))
            assert k == pytest.approx(lead[n], rel=1e-8)
            assert z0 == pytest.approx(zero[n], abs=1e-8)
            if n:
                assert h == pytest.approx(modified_gegenbauer_norm_quadrature(lam, l, n), rel=1e-10)


def test_gegenbauer_gamma_example():
    p = params_from_moments(weight_moments_quadrature(0.5, 0, 6))
    assert gegenbauer_gamma(0.5, 0, 2) == pytest.approx(p.gamma[0, 2].real, abs=1e-7)


def test_spec_validation():
    with pytest.raises(ValueError):
        GegenbauerSpec(-0.5, 0, 1)
    with pytest.raises(ValueError):
        SzegoCoeffs([1.0])
    with pytest.raises(ValueError):
        weight_moments_quadrature(0.5, 0, 10, nodes=5)
