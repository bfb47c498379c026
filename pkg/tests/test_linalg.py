import numpy as np
import pytest
from scipy.integrate import solve_ivp
from scipy.linalg import expm

from renyi_bounds.linalg import (
    PAULI_X,
    PAULI_Z,
    DimensionError,
    SiteRange,
    embed,
    get_dimension_cap,
    hermitian_evolution,
    kron,
    operator_norm,
    partial_trace,
    random_density_matrix,
    random_hermitian,
    reduced_state_from_vector,
    schatten_norm,
    set_dimension_cap,
    trace_distance,
    trace_norm,
)


def test_kron_identity_and_pauli():
    assert np.allclose(kron(np.eye(2), np.eye(2)), np.eye(4))
    assert np.allclose(kron(PAULI_Z, PAULI_Z), np.diag([1, -1, -1, 1]))


def test_kron_matches_index_formula(rng):
    A = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    B = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    K = kron(A, B)
    for i in range(3):
        for j in range(3):
            for k in range(2):
                for l in range(2):
                    assert K[2 * i + k, 2 * j + l] == pytest.approx(A[i, j] * B[k, l])


def test_kron_respects_dimension_cap():
    old = get_dimension_cap()
    set_dimension_cap(8)
    try:
        with pytest.raises(DimensionError):
            kron(np.eye(4), np.eye(4))
    finally:
        set_dimension_cap(old)


def test_embed_examples(rng):
    chain = SiteRange(-1, 1)
    out = embed(PAULI_X, SiteRange(0, 0), chain)
    assert np.allclose(out, np.kron(np.kron(np.eye(2), PAULI_X), np.eye(2)))
    A = random_hermitian(8, rng)
    assert np.allclose(embed(A, chain, chain), A)
    with pytest.raises(ValueError):
        embed(PAULI_X, SiteRange(2, 2), chain)


def test_partial_trace_bell_and_product(rng):
    chain = SiteRange(1, 2)
    phi = np.array([1, 0, 0, 1]) / np.sqrt(2)
    assert np.allclose(partial_trace(np.outer(phi, phi), chain, [2]), np.eye(2) / 2)
    r1, r2 = random_density_matrix(2, rng), random_density_matrix(2, rng)
    assert np.allclose(partial_trace(np.kron(r1, r2), chain, [2]), r1)
    assert np.allclose(partial_trace(np.kron(r1, r2), chain, [1]), r2)


def test_partial_trace_matches_index_sum(rng):
    rho = random_density_matrix(8, rng)
    T = rho.reshape(2, 2, 2, 2, 2, 2)
    oracle = np.zeros((4, 4), dtype=complex)
    for a in range(2):
        for c in range(2):
            for a2 in range(2):
                for c2 in range(2):
                    oracle[2 * a + c, 2 * a2 + c2] = sum(T[a, b, c, a2, b, c2] for b in range(2))
    assert np.allclose(partial_trace(rho, SiteRange(0, 2), [1]), oracle, atol=1e-14)


def test_partial_trace_preserves_trace_and_composes(rng):
    chain = SiteRange(0, 3)
    rho = random_density_matrix(16, rng)
    once = partial_trace(rho, chain, [1, 3])
    twice = partial_trace(partial_trace(rho, chain, [3]), SiteRange(0, 2), [1])
    assert np.trace(once) == pytest.approx(1.0)
    assert np.allclose(once, twice)


def test_reduced_state_from_vector_matches_partial_trace(rng):
    chain = SiteRange(-1, 2)
    psi = rng.normal(size=16) + 1j * rng.normal(size=16)
    psi /= np.linalg.norm(psi)
    keep = SiteRange(-1, 0)
    expected = partial_trace(np.outer(psi, psi.conj()), chain, [1, 2])
    assert np.allclose(reduced_state_from_vector(psi, chain, keep), expected)


def test_hermitian_evolution_examples(rng):
    assert np.allclose(hermitian_evolution(PAULI_Z, 0.0), np.eye(2))
    assert np.allclose(hermitian_evolution(PAULI_Z, np.pi / 2), np.diag([np.exp(-0.5j * np.pi), np.exp(0.5j * np.pi)]))
    with pytest.raises(ValueError):
        hermitian_evolution(np.array([[0, 1], [0, 0]]), 1.0)


def test_hermitian_evolution_matches_ode_oracle(rng):
    H = random_hermitian(4, rng)
    sol = solve_ivp(
        lambda s, y: (-1j * H @ y.reshape(4, 4)).ravel(),
        (0, 0.7),
        np.eye(4, dtype=complex).ravel(),
        method="DOP853",
        rtol=1e-12,
        atol=1e-12,
    )
    U_ode = sol.y[:, -1].reshape(4, 4)
    U = hermitian_evolution(H, 0.7)
    assert np.abs(U - U_ode).max() < 1e-8
    assert np.allclose(U, expm(-0.7j * H))
    assert np.allclose(U.conj().T @ U, np.eye(4))


def test_norms():
    assert operator_norm(PAULI_X) == pytest.approx(1.0)
    assert trace_norm(PAULI_X) == pytest.approx(2.0)
    D = np.diag([3.0, -4.0])
    assert operator_norm(D) == pytest.approx(4.0)
    assert trace_norm(D) == pytest.approx(7.0)
    assert schatten_norm(D, 2) == pytest.approx(5.0)


def test_norm_ordering_and_trace_distance(rng):
    M = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    assert operator_norm(M) <= schatten_norm(M, 2) + 1e-12 <= trace_norm(M) + 2e-12
    assert operator_norm(M) == pytest.approx(np.linalg.svd(M, compute_uv=False)[0])
    rho, sigma = random_density_matrix(5, rng), random_density_matrix(5, rng)
    T = trace_distance(rho, sigma)
    assert 0 <= T <= 1
    assert T == pytest.approx(0.5 * trace_norm(rho - sigma))


def test_site_range_validation():
    with pytest.raises(ValueError):
        SiteRange(2, 1)
    chain = SiteRange(-2, 2, 3)
    assert chain.dim == 3**5
    assert chain.leg(-2) == 0 and chain.leg(2) == 4
