import numpy as np
import pytest

from ncortho.fock_multivar import matrix_unit_tuples
from ncortho.szego_kernels import (
    H2Element,
    OperatorPoint,
    PointB1,
    ball_margin,
    cayley,
    cayley_inverse,
    fock_block_kernel,
    fock_eval_direct,
    fock_kernel,
    fock_szego,
    h2_eval,
    module_inner,
    s_z_array,
    siegel_kernel,
    siegel_margin,
    szego_block_kernel,
    szego_eval,
    totality_residuals,
)
from ncortho.words import Word


def random_lower(rng, n):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return H2Element(np.tril(a))


def test_zero_points():
    z = PointB1(np.zeros(5))
    np.testing.assert_allclose(szego_eval(z, z), np.ones(5))


def test_constant_sequences_geometric_sum():
    a, b, T = 0.6 + 0.2j, -0.3 + 0.5j, 7
    val = szego_eval(PointB1(np.full(T + 1, a)), PointB1(np.full(T + 1, b)))
    want = sum((a * np.conj(b)) ** m for m in range(T + 1))
    assert val[0] == pytest.approx(want, abs=1e-14)


def test_h2_eval_examples(rng):
    z = PointB1.random(rng, 4)
    np.testing.assert_allclose(h2_eval(H2Element(np.eye(5)), z), np.ones(5))
    t = np.zeros((5, 5))
    t[2, 0] = 1
    assert h2_eval(H2Element(t), z)[0] == pytest.approx(z.z[1] * z.z[0])


def test_reproducing_property_sequences(rng):
    for _ in range(5):
        theta = random_lower(rng, 7)
        z = PointB1.random(rng, 6)
        np.testing.assert_allclose(module_inner(theta, s_z_array(z)), h2_eval(theta, z), atol=1e-12)


def test_block_kernel_psd(rng):
    pts = [PointB1.random(rng, 5) for _ in range(6)]
    for M in szego_block_kernel(pts):
        np.testing.assert_allclose(M, M.conj().T, atol=1e-14)
        assert np.linalg.eigvalsh(M).min() >= -1e-12


def test_totality_residuals_decrease(rng):
    theta = random_lower(rng, 4)
    res = totality_residuals(theta, [PointB1.random(rng, 3) for _ in range(5)])
    assert all(b <= a + 1e-12 for a, b in zip(res, res[1:]))
    assert res[-1] < 1e-10


def test_sequence_validation():
    with pytest.raises(ValueError):
        PointB1([0.5, 1.0])
    with pytest.raises(ValueError):
        H2Element(np.triu(np.ones((3, 3))))
    with pytest.raises(ValueError):
        szego_eval(PointB1([0.1]), PointB1([0.1, 0.2]))


def test_fock_zero_tuple():
    Z = OperatorPoint([np.zeros((2, 2)), np.zeros((2, 2))])
    np.testing.assert_allclose(fock_kernel(Z, Z, 3), np.eye(2))


def test_fock_single_word_eval(rng):
    Z = OperatorPoint.random(rng, 2, 3)
    v = rng.normal(size=3) + 1j * rng.normal(size=3)
    w = Word.parse("21", 2)
    Zw = Z.Z[1] @ Z.Z[0]
    np.testing.assert_allclose(fock_eval_direct(Z, {w: v}), Zw @ v, atol=1e-15)


def test_fock_reproducing(rng):
    Z = OperatorPoint.random(rng, 2, 3)
    S = fock_szego(Z, 3)
    theta = {w: rng.normal(size=3) + 1j * rng.normal(size=3) for w in S.words}
    stacked = np.concatenate([theta[w] for w in S.words])
    np.testing.assert_allclose(S.eval(stacked), fock_eval_direct(Z, theta), atol=1e-12)


def test_fock_block_kernel_psd_on_matrix_units():
    pts = [OperatorPoint(Z) for Z in matrix_unit_tuples(Word.parse("12", 2))]
    G = fock_block_kernel(pts, 3)
    assert np.linalg.eigvalsh(G).min() >= -1e-10


def test_operator_validation():
    with pytest.raises(ValueError):
        OperatorPoint([np.eye(2)])
    with pytest.raises(ValueError):
        OperatorPoint([np.zeros((2, 2)), np.zeros((3, 3))])


def test_cayley_examples():
    W = cayley(OperatorPoint([np.zeros((2, 2)), np.zeros((2, 2))]))
    np.testing.assert_allclose(W[0], 0)
    np.testing.assert_allclose(W[1], 1j * np.eye(2))
    assert cayley(OperatorPoint([np.array([[0.5]])]))[0][0, 0] == pytest.approx(1j / 3)


def test_cayley_roundtrip(rng):
    Z = OperatorPoint.random(rng, 2, 3)
    W = cayley(Z)
    assert siegel_margin(W) > 0
    back = cayley_inverse(W)
    for a, b in zip(back.Z, Z.Z):
        np.testing.assert_allclose(a, b, atol=1e-12)
    assert ball_margin(back.Z) > 0


def test_siegel_kernel_hermitian_psd(rng):
    Ws = [cayley(OperatorPoint.random(rng, 2, 2)) for _ in range(4)]
    G = np.block([[siegel_kernel(a, b, 3) for b in Ws] for a in Ws])
    np.testing.assert_allclose(G, G.conj().T, atol=1e-12)
    assert np.linalg.eigvalsh(G).min() >= -1e-10


def test_cayley_inverse_rejects_outside():
    with pytest.raises(ValueError):
        cayley_inverse([np.eye(2), -1j * np.eye(2)])
