import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from renyi_bounds.entropy import (
    Ensemble,
    alpha_monotonicity_check,
    audenaert_bound,
    binary_entropy,
    ensemble_renyi_bounds,
    fap_bound,
    hanson_datta_bound,
    log_negativity,
    partial_transpose,
    pinch,
    pinch_and_compare,
    pinching_commutes_with_partial_trace,
    product_basis,
    renyi_entropy,
    saturating_pair,
    simplified_bound,
    simplified_term,
    von_neumann_mixing_bound,
)
from renyi_bounds.linalg import random_density_matrix, random_pure_state, random_unitary, trace_distance

ALPHAS = (0.3, 0.5, 0.7, 0.9, 1.0)
orders = st.floats(min_value=0.05, max_value=1.0)
distances = st.floats(min_value=0.0, max_value=1.0)


def test_renyi_entropy_examples():
    psi = random_pure_state(4, np.random.default_rng(0))
    for a in ALPHAS:
        assert renyi_entropy(np.outer(psi, psi.conj()), a) == pytest.approx(0.0, abs=1e-10)
        assert renyi_entropy(np.eye(3) / 3, a) == pytest.approx(math.log2(3))
    oracle = 2 * math.log2(math.sqrt(0.7) + math.sqrt(0.3))
    assert renyi_entropy(np.diag([0.7, 0.3]), 0.5) == pytest.approx(oracle, rel=1e-14)
    with pytest.raises(ValueError):
        renyi_entropy(np.eye(2) / 2, 1.5)


def test_renyi_entropy_properties(rng):
    rho, sigma = random_density_matrix(3, rng), random_density_matrix(2, rng)
    U = random_unitary(3, rng)
    for a in ALPHAS:
        joint = renyi_entropy(np.kron(rho, sigma), a)
        assert joint == pytest.approx(renyi_entropy(rho, a) + renyi_entropy(sigma, a))
        assert renyi_entropy(U @ rho @ U.conj().T, a) == pytest.approx(renyi_entropy(rho, a))
    values = [renyi_entropy(rho, a) for a in np.linspace(0.1, 1.0, 30)]
    assert np.all(np.diff(values) <= 1e-12)


def test_audenaert_examples():
    for d in (2, 3, 8):
        for a in ALPHAS:
            assert audenaert_bound(0.0, d, a) == 0.0
            assert audenaert_bound(1 - 1 / d, d, a) == pytest.approx(math.log2(d), rel=1e-12)


def test_fap_examples_and_limit():
    assert fap_bound(0.0, 4) == 0.0
    assert fap_bound(0.5, 2) == pytest.approx(1.0)
    assert binary_entropy(0.5) == pytest.approx(1.0)
    for T in (0.1, 0.4, 0.8):
        for d in (2, 5):
            assert audenaert_bound(T, d, 1 - 1e-6) == pytest.approx(fap_bound(T, d), abs=1e-4)


def test_hanson_datta_examples():
    for a in ALPHAS:
        assert hanson_datta_bound(1.0, 4, a) == pytest.approx(2.0)
        assert hanson_datta_bound(0.0, 4, a) == 0.0
    grid = np.linspace(0, 1, 1000)
    vals = [hanson_datta_bound(R, 8, 0.5) for R in grid]
    assert np.all(np.diff(vals) >= -1e-12)


def test_simplified_bound_dominates_and_increases():
    for d in (2, 3, 16):
        for a in ALPHAS:
            grid = np.linspace(0, 1, 200)
            simp = np.array([simplified_bound(R, d, a) for R in grid])
            aud = np.array([audenaert_bound(R, d, a) for R in grid])
            assert simplified_bound(0.0, d, a) == 0.0
            assert np.all(simp >= aud - 1e-12)
            assert np.all(np.diff(simp) > 0)


def test_simplified_term_huge_dimension_is_finite():
    v = simplified_term(0.3, None, 0.5, log_D=5000.0)
    assert math.isfinite(v)
    direct = simplified_term(0.3, math.exp(50.0), 0.5)
    assert simplified_term(0.3, None, 0.5, log_D=50.0) == pytest.approx(direct, rel=1e-12)


def test_saturating_pair_saturates():
    rho, sigma = saturating_pair(0.0, 3)
    assert np.allclose(rho, sigma)
    for d in (2, 3, 6):
        for T in (0.05, 0.3, 0.6):
            rho, sigma = saturating_pair(T, d)
            assert trace_distance(rho, sigma) == pytest.approx(T)
            for a in ALPHAS:
                gap = abs(renyi_entropy(rho, a) - renyi_entropy(sigma, a))
                assert gap == pytest.approx(audenaert_bound(T, d, a), abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10**6), alpha=orders, d=st.integers(2, 5))
def test_audenaert_inequality_on_random_pairs(seed, alpha, d):
    rng = np.random.default_rng(seed)
    rho, sigma = random_density_matrix(d, rng), random_density_matrix(d, rng, rank=1)
    T = trace_distance(rho, sigma)
    gap = abs(renyi_entropy(rho, alpha) - renyi_entropy(sigma, alpha))
    assert gap <= audenaert_bound(T, d, alpha) + 1e-9
    assert audenaert_bound(T, d, alpha) <= simplified_bound(T, d, alpha) + 1e-12


@settings(max_examples=80, deadline=None)
@given(T=distances, d=st.integers(2, 10), a=orders, b=orders)
def test_audenaert_nonincreasing_in_alpha(T, d, a, b):
    lo, hi = sorted((a, b))
    assert audenaert_bound(T, d, hi) <= audenaert_bound(T, d, lo) + 1e-9


def test_alpha_monotonicity_check_examples():
    grid = np.linspace(0.02, 1.0, 50)
    assert alpha_monotonicity_check(0.3, 2, grid)["nonincreasing"]
    flat0 = alpha_monotonicity_check(0.0, 3, grid)
    assert np.allclose(flat0["values"], 0.0)
    flatmax = alpha_monotonicity_check(1 - 1 / 3, 3, grid)
    assert np.allclose(flatmax["values"], math.log2(3))
    with pytest.raises(ValueError):
        alpha_monotonicity_check(0.3, 2, [0.5, 0.4])


def test_log_negativity_examples(rng):
    bell = np.array([1, 0, 0, 1]) / math.sqrt(2)
    assert log_negativity(bell, 2) == pytest.approx(1.0)
    prod = np.kron(random_pure_state(2, rng), random_pure_state(3, rng))
    assert log_negativity(prod, 2) == pytest.approx(0.0, abs=1e-10)
    with pytest.raises(ValueError):
        log_negativity(np.ones(4), 2)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10**6), alpha=st.floats(min_value=0.5, max_value=1.0))
def test_negativity_below_half_order_entropy(seed, alpha):
    rng = np.random.default_rng(seed)
    psi = random_pure_state(6, rng)
    rho_a = psi.reshape(2, 3) @ psi.reshape(2, 3).conj().T
    # E_N equals S_{1/2}; S_alpha is nonincreasing in alpha
    assert log_negativity(psi, 2) == pytest.approx(renyi_entropy(rho_a, 0.5), abs=1e-9)
    assert renyi_entropy(rho_a, alpha) <= log_negativity(psi, 2) + 1e-9


def test_partial_transpose_is_involution(rng):
    rho = random_density_matrix(6, rng)
    assert np.allclose(partial_transpose(partial_transpose(rho, 2, 3), 2, 3), rho)


def test_single_member_ensemble():
    rho = random_density_matrix(3, np.random.default_rng(5))
    e = Ensemble([1.0], [rho])
    vals = ensemble_renyi_bounds(e, 0.6)
    assert np.allclose(vals, renyi_entropy(rho, 0.6))
    S, bound = von_neumann_mixing_bound(e)
    assert S == pytest.approx(bound)


def test_pure_member_ensembles(rng):
    for _ in range(20):
        p = rng.dirichlet(np.ones(4))
        members = [np.outer(v, v.conj()) for v in (random_pure_state(3, rng) for _ in range(4))]
        e = Ensemble(p, members)
        for a in ALPHAS:
            lower, mid, upper_joint, upper_split = ensemble_renyi_bounds(e, a)
            assert lower == pytest.approx(0.0, abs=1e-9)
            assert mid <= upper_joint + 1e-9
            assert upper_joint == pytest.approx(upper_split, abs=1e-9)


def test_mixed_qutrit_ensembles_respect_the_chain(rng):
    for _ in range(100):
        p = rng.dirichlet(np.ones(5))
        e = Ensemble(p, [random_density_matrix(3, rng) for _ in range(5)])
        lower, mid, upper_joint, upper_split = ensemble_renyi_bounds(e, 0.5)
        assert lower <= mid + 1e-9
        assert mid <= upper_joint + 1e-9
        assert mid <= upper_split + 1e-9


def test_orthogonal_pure_mixture_is_shannon(rng):
    U = random_unitary(4, rng)
    p = np.array([0.1, 0.2, 0.3, 0.4])
    e = Ensemble(p, [np.outer(U[:, i], U[:, i].conj()) for i in range(4)])
    S, bound = von_neumann_mixing_bound(e)
    assert S == pytest.approx(bound)
    assert S == pytest.approx(-np.sum(p * np.log2(p)))


def test_ensemble_validation():
    with pytest.raises(ValueError):
        Ensemble([0.5, 0.6], [np.eye(2) / 2, np.eye(2) / 2])


def test_pinching_examples(rng):
    I2 = np.eye(2)
    diag = np.diag(rng.dirichlet(np.ones(4)))
    S, Sp = pinch_and_compare(diag, [I2, I2], 0.7)
    assert S == pytest.approx(Sp)
    bell = np.array([1, 0, 0, 1]) / math.sqrt(2)
    for a in ALPHAS:
        S, Sp = pinch_and_compare(np.outer(bell, bell), [I2, I2], a)
        assert S == pytest.approx(0.0, abs=1e-10)
        assert Sp == pytest.approx(1.0)
    rho = random_density_matrix(8, rng)
    bases = [random_unitary(2, rng) for _ in range(3)]
    S, Sp = pinch_and_compare(rho, bases, 0.7)
    assert Sp >= S - 1e-12
    assert pinching_commutes_with_partial_trace(rho, bases, [1])
    assert pinching_commutes_with_partial_trace(rho, bases, [0, 2])


def test_pinch_is_trace_preserving_and_idempotent(rng):
    rho = random_density_matrix(4, rng)
    B = product_basis([random_unitary(2, rng), random_unitary(2, rng)])
    once = pinch(rho, B)
    assert np.trace(once) == pytest.approx(1.0)
    assert np.allclose(pinch(once, B), once)
