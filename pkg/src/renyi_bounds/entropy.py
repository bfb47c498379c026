"""Rényi entropies (base 2) and continuity bounds in terms of the trace distance."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import reduce
from typing import Sequence

import numpy as np

from .linalg import is_hermitian, partial_trace, SiteRange

EIGEN_FLOOR = 1e-14
LOG2E = 1.0 / math.log(2.0)


def _check_alpha(alpha: float) -> float:
    if not 0 < alpha <= 1:
        raise ValueError(f"Rényi order must lie in (0, 1], got {alpha}")
    return float(alpha)


def renyi_of_distribution(p: Sequence[float] | np.ndarray, alpha: float) -> float:
    """``H_alpha`` of a probability vector, in bits; entries below ``EIGEN_FLOOR`` are dropped."""
    alpha = _check_alpha(alpha)
    p = np.asarray(p, dtype=float).ravel()
    p = p[p > EIGEN_FLOOR]
    if p.size == 0:
        return 0.0
    p = p / p.sum()
    if alpha == 1.0:
        return float(-np.sum(p * np.log2(p)))
    beta = 1.0 - alpha
    # sum p^alpha = 1 + sum p expm1(-beta ln p); stays accurate as alpha -> 1
    return float(np.log1p(np.sum(p * np.expm1(-beta * np.log(p)))) / (beta * math.log(2.0)))


def validate_density_matrix(rho: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError("density matrix must be square")
    if not is_hermitian(rho, tol=tol):
        raise ValueError("density matrix must be Hermitian")
    if abs(np.trace(rho).real - 1.0) > tol:
        raise ValueError("density matrix must have unit trace")
    if np.linalg.eigvalsh(rho).min() < -tol:
        raise ValueError("density matrix must be positive semidefinite")
    return rho


def renyi_entropy(rho: np.ndarray, alpha: float, check: bool = False) -> float:
    """``S_alpha(rho) = log2(Tr rho^alpha) / (1 - alpha)``; von Neumann entropy at ``alpha = 1``."""
    if check:
        validate_density_matrix(rho)
    evals = np.linalg.eigvalsh(0.5 * (rho + np.conj(rho).T))
    return renyi_of_distribution(evals, alpha)


def von_neumann_entropy(rho: np.ndarray) -> float:
    return renyi_entropy(rho, 1.0)


def binary_entropy(T: float) -> float:
    if T <= 0.0 or T >= 1.0:
        return 0.0
    return float(-T * math.log2(T) - (1 - T) * math.log2(1 - T))


def fap_bound(T: float, d: int) -> float:
    """``T log2(d-1) + H_2(T)``."""
    if not 0 <= T <= 1:
        raise ValueError("trace distance must lie in [0, 1]")
    return T * math.log2(d - 1) + binary_entropy(T) if d > 1 else 0.0


def audenaert_bound(T: float, d: int, alpha: float) -> float:
    """``log2[(1-T)^alpha + (d-1)^{1-alpha} T^alpha] / (1 - alpha)``; the FAP bound at ``alpha = 1``.

    Written with ``expm1`` so that orders close to 1 do not lose precision.
    """
    alpha = _check_alpha(alpha)
    if not 0 <= T <= 1:
        raise ValueError("trace distance must lie in [0, 1]")
    if d < 2:
        raise ValueError("dimension must be at least 2")
    if alpha == 1.0:
        return fap_bound(T, d)
    if T == 0.0:
        return 0.0
    beta = 1.0 - alpha
    y = T * math.expm1(beta * (math.log(d - 1) - math.log(T)))
    if T < 1.0:
        y += (1.0 - T) * math.expm1(-beta * math.log1p(-T))
    return math.log1p(y) / (beta * math.log(2.0))


def simplified_term(R: float, D: float | None, alpha: float, log_D: float | None = None) -> float:
    """``log2[1 - alpha R + D^{1-alpha} R^alpha] / (1 - alpha)``, increasing in ``R`` on ``[0, D]``.

    At ``alpha = 1`` the limit is ``R log2 D + R log2 e - R log2 R``. Pass ``log_D``
    (natural log) instead of ``D`` when ``D`` would overflow a float.
    """
    alpha = _check_alpha(alpha)
    if R < 0:
        raise ValueError("argument must be nonnegative")
    if R == 0.0:
        return 0.0
    if log_D is None:
        log_D = math.log(D)
    if alpha == 1.0:
        return R * (log_D / math.log(2.0) + LOG2E - math.log2(R))
    beta = 1.0 - alpha
    z = beta * (log_D - math.log(R))
    if z > 30.0:
        # 1 + y = R e^z (1 + (1 - alpha R) e^{-z} / R)
        log1py = math.log(R) + z + math.log1p((1.0 - alpha * R) * math.exp(-z) / R)
        return log1py / (beta * math.log(2.0))
    # 1 - alpha R + D^beta R^alpha = 1 + R [expm1(beta ln(D/R)) + beta]
    y = R * (math.expm1(z) + beta)
    return math.log1p(y) / (beta * math.log(2.0))


def simplified_bound(R: float, d: int, alpha: float) -> float:
    """Audenaert's bound with ``(1-R)^alpha`` replaced by ``1 - alpha R``: never smaller and increasing."""
    if not 0 <= R <= 1:
        raise ValueError("trace distance must lie in [0, 1]")
    return simplified_term(R, d - 1, alpha) if d > 1 else 0.0


def hanson_datta_bound(R: float, d: int, alpha: float) -> float:
    """Audenaert's form up to ``R = 1 - 1/d``, then the maximal value ``log2 d``."""
    if not 0 <= R <= 1:
        raise ValueError("trace distance must lie in [0, 1]")
    if R <= 1.0 - 1.0 / d:
        return audenaert_bound(R, d, alpha)
    return math.log2(d)


def saturating_pair(T: float, d: int) -> tuple[np.ndarray, np.ndarray]:
    """``rho = diag(1, 0, ...)`` and ``sigma = diag(1 - T, T/(d-1), ...)``."""
    if not 0 <= T <= 1 or d < 2:
        raise ValueError("need T in [0, 1] and d >= 2")
    rho = np.zeros((d, d))
    rho[0, 0] = 1.0
    sigma = np.diag([1.0 - T] + [T / (d - 1)] * (d - 1))
    return rho, sigma


def alpha_monotonicity_check(T: float, d: int, alphas: Sequence[float]) -> dict:
    """Evaluate Audenaert's bound along an increasing grid of orders and report whether it never increases."""
    alphas = list(alphas)
    if any(b <= a for a, b in zip(alphas, alphas[1:])):
        raise ValueError("alpha grid must be strictly increasing")
    values = np.array([audenaert_bound(T, d, a) for a in alphas])
    steps = np.diff(values)
    return {
        "alphas": np.array(alphas),
        "values": values,
        "max_increase": float(steps.max(initial=0.0)),
        "nonincreasing": bool(np.all(steps <= 1e-12 * max(1.0, values.max(initial=0.0)))),
    }


def partial_transpose(rho: np.ndarray, dim_a: int, dim_b: int) -> np.ndarray:
    """Transpose the first tensor factor: ``<i k| rho^{T_A} |j l> = <j k| rho |i l>``."""
    T = np.asarray(rho).reshape(dim_a, dim_b, dim_a, dim_b)
    return T.transpose(2, 1, 0, 3).reshape(dim_a * dim_b, dim_a * dim_b)


def schmidt_coefficients(psi: np.ndarray, dim_a: int) -> np.ndarray:
    psi = np.asarray(psi)
    return np.linalg.svd(psi.reshape(dim_a, -1), compute_uv=False)


def log_negativity(psi: np.ndarray, dim_a: int) -> float:
    """``log2 || rho^{T_A} ||_1`` for the pure state ``psi`` on ``C^{dim_a} x C^{dim_b}``."""
    psi = np.asarray(psi, dtype=complex).ravel()
    if abs(np.linalg.norm(psi) - 1.0) > 1e-10:
        raise ValueError("state vector must be normalized")
    if psi.size % dim_a:
        raise ValueError("dimension of the first factor does not divide the state size")
    dim_b = psi.size // dim_a
    rho = np.outer(psi, psi.conj())
    evals = np.linalg.eigvalsh(partial_transpose(rho, dim_a, dim_b))
    return float(np.log2(np.sum(np.abs(evals))))


@dataclass
class Ensemble:
    """Mixture ``sum_i p_i rho_i`` with the members' spectra cached."""

    weights: np.ndarray
    members: list[np.ndarray]
    spectra: list[np.ndarray] = field(init=False)

    def __post_init__(self) -> None:
        self.weights = np.asarray(self.weights, dtype=float)
        if abs(self.weights.sum() - 1.0) > 1e-12 or np.any(self.weights < 0):
            raise ValueError("weights must form a probability vector")
        if len(self.members) != len(self.weights):
            raise ValueError("one weight per member")
        dims = {m.shape for m in self.members}
        if len(dims) != 1:
            raise ValueError("members must share a dimension")
        for m in self.members:
            validate_density_matrix(m)
        self.spectra = [np.clip(np.linalg.eigvalsh(m), 0.0, None) for m in self.members]

    @property
    def mixture(self) -> np.ndarray:
        return sum(p * m for p, m in zip(self.weights, self.members))


def ensemble_renyi_bounds(e: Ensemble, alpha: float) -> tuple[float, float, float, float]:
    """``(sum p_i S(rho_i), S(rho), H{p_i lambda_j^i}, H{p_i} + max S(rho_i))`` for order ``alpha``."""
    member_S = [renyi_entropy(m, alpha) for m in e.members]
    lower = float(np.dot(e.weights, member_S))
    mid = renyi_entropy(e.mixture, alpha)
    joint = np.concatenate([p * lam for p, lam in zip(e.weights, e.spectra)])
    upper_joint = renyi_of_distribution(joint, alpha)
    upper_split = renyi_of_distribution(e.weights, alpha) + max(member_S)
    return lower, mid, upper_joint, upper_split


def von_neumann_mixing_bound(e: Ensemble) -> tuple[float, float]:
    """``S(rho)`` and ``H{p} + sum p_i S(rho_i)``."""
    bound = renyi_of_distribution(e.weights, 1.0) + float(
        np.dot(e.weights, [von_neumann_entropy(m) for m in e.members])
    )
    return von_neumann_entropy(e.mixture), bound


def product_basis(local_bases: Sequence[np.ndarray]) -> np.ndarray:
    """Columns are the product vectors built from the columns of each local unitary."""
    for U in local_bases:
        if not np.allclose(U.conj().T @ U, np.eye(U.shape[0]), atol=1e-10):
            raise ValueError("local bases must be orthonormal")
    return reduce(np.kron, local_bases)


def pinch(rho: np.ndarray, basis: np.ndarray) -> np.ndarray:
    """``sum_b |b><b| rho |b><b|`` for the orthonormal columns of ``basis``."""
    if not np.allclose(basis.conj().T @ basis, np.eye(basis.shape[1]), atol=1e-10):
        raise ValueError("basis must be orthonormal")
    diag = np.real(np.einsum("ib,ij,jb->b", basis.conj(), rho, basis))
    return (basis * diag) @ basis.conj().T


def pinch_and_compare(rho: np.ndarray, local_bases: Sequence[np.ndarray], alpha: float) -> tuple[float, float]:
    """``(S_alpha(rho), S_alpha(pinched rho))`` for a product basis; the second is never smaller."""
    B = product_basis(local_bases)
    return renyi_entropy(rho, alpha), renyi_entropy(pinch(rho, B), alpha)


def pinching_commutes_with_partial_trace(
    rho: np.ndarray, local_bases: Sequence[np.ndarray], traced_sites: Sequence[int], tol: float = 1e-12
) -> bool:
    """Check ``Tr_X(pinch(rho)) == pinch_{X^c}(Tr_X rho)`` for a product basis of qubits or qudits."""
    r = local_bases[0].shape[0]
    n = len(local_bases)
    chain = SiteRange(0, n - 1, r)
    full = partial_trace(pinch(rho, product_basis(local_bases)), chain, traced_sites)
    kept = [U for i, U in enumerate(local_bases) if i not in set(traced_sites)]
    reduced = pinch(partial_trace(rho, chain, traced_sites), product_basis(kept))
    return bool(np.allclose(full, reduced, atol=tol))
