"""Dense linear algebra on chains of r-level sites.

Sites carry signed labels ``lo..hi`` (e.g. ``[-L, L]``). Tensor legs are
ordered by increasing site label, so the leftmost site is the most
significant factor in a Kronecker product.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

DEFAULT_DIM_CAP = 2**14
_dim_cap = DEFAULT_DIM_CAP


class DimensionError(ValueError):
    """Raised when a Hilbert space would exceed the configured dimension cap."""


def set_dimension_cap(cap: int) -> None:
    global _dim_cap
    if cap < 1:
        raise ValueError("dimension cap must be positive")
    _dim_cap = int(cap)


def get_dimension_cap() -> int:
    return _dim_cap


def check_dimension(dim: int) -> int:
    if dim > _dim_cap:
        raise DimensionError(f"Hilbert dimension {dim} exceeds cap {_dim_cap}")
    return dim


@dataclass(frozen=True)
class SiteRange:
    """Contiguous block of sites ``lo..hi`` (inclusive), each of dimension ``local_dim``."""

    lo: int
    hi: int
    local_dim: int = 2

    def __post_init__(self) -> None:
        if self.lo > self.hi:
            raise ValueError(f"empty site range [{self.lo}, {self.hi}]")
        if self.local_dim < 1:
            raise ValueError("local dimension must be positive")

    @property
    def n_sites(self) -> int:
        return self.hi - self.lo + 1

    @property
    def sites(self) -> range:
        return range(self.lo, self.hi + 1)

    @property
    def dim(self) -> int:
        return self.local_dim**self.n_sites

    def __contains__(self, site: object) -> bool:
        return isinstance(site, (int, np.integer)) and self.lo <= site <= self.hi

    def covers(self, other: "SiteRange") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def leg(self, site: int) -> int:
        """0-based tensor leg of a signed site label."""
        if site not in self:
            raise ValueError(f"site {site} outside [{self.lo}, {self.hi}]")
        return site - self.lo

    def intersect(self, lo: int, hi: int) -> "SiteRange":
        return SiteRange(max(lo, self.lo), min(hi, self.hi), self.local_dim)


def is_hermitian(M: np.ndarray, tol: float = 1e-12) -> bool:
    M = np.asarray(M)
    return M.ndim == 2 and M.shape[0] == M.shape[1] and np.allclose(M, M.conj().T, atol=tol, rtol=0)


def kron(*mats: np.ndarray) -> np.ndarray:
    """Kronecker product of any number of matrices, respecting the dimension cap."""
    if not mats:
        return np.ones((1, 1), dtype=complex)
    rows = int(np.prod([np.shape(m)[0] for m in mats]))
    cols = int(np.prod([np.shape(m)[1] for m in mats]))
    check_dimension(max(rows, cols))
    out = np.asarray(mats[0], dtype=complex)
    for m in mats[1:]:
        out = np.kron(out, np.asarray(m, dtype=complex))
    return out


def embed(A: np.ndarray, support: SiteRange, chain: SiteRange) -> np.ndarray:
    """Tensor ``A`` (acting on ``support``) with identities on the rest of ``chain``."""
    if not chain.covers(support):
        raise ValueError(f"support [{support.lo}, {support.hi}] not inside chain [{chain.lo}, {chain.hi}]")
    A = np.asarray(A, dtype=complex)
    if A.shape != (support.dim, support.dim):
        raise ValueError(f"operator shape {A.shape} does not match support dimension {support.dim}")
    r = chain.local_dim
    left = r ** (support.lo - chain.lo)
    right = r ** (chain.hi - support.hi)
    check_dimension(chain.dim)
    out = A
    if left > 1:
        out = np.kron(np.eye(left), out)
    if right > 1:
        out = np.kron(out, np.eye(right))
    return out


def _as_leg_sets(chain: SiteRange, traced_sites: Iterable[int]) -> tuple[list[int], list[int]]:
    traced = sorted({chain.leg(int(s)) for s in traced_sites})
    kept = [i for i in range(chain.n_sites) if i not in traced]
    return kept, traced


def partial_trace(M: np.ndarray, chain: SiteRange, traced_sites: Iterable[int]) -> np.ndarray:
    """Trace out ``traced_sites`` from an operator on ``chain``; the result keeps the remaining sites in order."""
    M = np.asarray(M)
    n, r = chain.n_sites, chain.local_dim
    if M.shape != (chain.dim, chain.dim):
        raise ValueError(f"matrix shape {M.shape} inconsistent with chain dimension {chain.dim}")
    kept, traced = _as_leg_sets(chain, traced_sites)
    dk, dt = r ** len(kept), r ** len(traced)
    T = M.reshape((r,) * (2 * n))
    perm = kept + traced + [n + i for i in kept] + [n + i for i in traced]
    T = T.transpose(perm).reshape(dk, dt, dk, dt)
    return np.einsum("iaja->ij", T)


def reduced_state_from_vector(psi: np.ndarray, chain: SiteRange, keep: SiteRange) -> np.ndarray:
    """Reduced density matrix on ``keep`` of the pure state ``psi`` living on ``chain``."""
    if not chain.covers(keep):
        raise ValueError("keep range must lie inside the chain")
    r = chain.local_dim
    left = r ** (keep.lo - chain.lo)
    right = r ** (chain.hi - keep.hi)
    T = np.asarray(psi).reshape(left, keep.dim, right)
    return np.einsum("aib,ajb->ij", T, T.conj())


def operator_norm(M: np.ndarray, hermitian: bool | None = None) -> float:
    """Largest singular value; Hermitian input goes through the eigenvalues."""
    M = np.asarray(M)
    if M.size == 0:
        return 0.0
    if hermitian is None:
        hermitian = is_hermitian(M)
    if hermitian:
        return float(np.max(np.abs(np.linalg.eigvalsh(M))))
    return float(np.linalg.norm(M, 2))


def trace_norm(M: np.ndarray, hermitian: bool | None = None) -> float:
    """Sum of singular values; Hermitian input goes through the eigenvalues."""
    M = np.asarray(M)
    if hermitian is None:
        hermitian = is_hermitian(M)
    if hermitian:
        return float(np.sum(np.abs(np.linalg.eigvalsh(M))))
    return float(np.sum(np.linalg.svd(M, compute_uv=False)))


def schatten_norm(M: np.ndarray, p: float) -> float:
    s = np.linalg.svd(np.asarray(M), compute_uv=False)
    if np.isinf(p):
        return float(s.max(initial=0.0))
    return float(np.sum(s**p) ** (1.0 / p))


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Half the trace norm of ``rho - sigma`` (both Hermitian)."""
    diff = np.asarray(rho) - np.asarray(sigma)
    diff = 0.5 * (diff + diff.conj().T)
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(diff))))


class SpectralPropagator:
    """Caches the eigendecomposition of a Hermitian ``H`` so that ``e^{-itH}`` is cheap for many ``t``."""

    def __init__(self, H: np.ndarray, check: bool = True):
        H = np.asarray(H, dtype=complex)
        if check and not is_hermitian(H, tol=1e-10):
            raise ValueError("hermitian_evolution requires a Hermitian generator")
        self.dim = H.shape[0]
        self.energies, self.vectors = np.linalg.eigh(H)

    def unitary(self, t: float) -> np.ndarray:
        phases = np.exp(-1j * t * self.energies)
        return (self.vectors * phases) @ self.vectors.conj().T

    def evolve_vector(self, psi: np.ndarray, t: float) -> np.ndarray:
        coeffs = self.vectors.conj().T @ psi
        return self.vectors @ (np.exp(-1j * t * self.energies) * coeffs)

    def to_eigenbasis(self, A: np.ndarray) -> np.ndarray:
        return self.vectors.conj().T @ A @ self.vectors

    def heisenberg_in_eigenbasis(self, A_eig: np.ndarray, t: float) -> np.ndarray:
        """``e^{itH} A e^{-itH}`` expressed in the eigenbasis of ``H``."""
        ph = np.exp(1j * t * self.energies)
        return (ph[:, None] * A_eig) * ph.conj()[None, :]

    def heisenberg(self, A: np.ndarray, t: float, A_eig: np.ndarray | None = None) -> np.ndarray:
        if A_eig is None:
            A_eig = self.to_eigenbasis(A)
        At = self.heisenberg_in_eigenbasis(A_eig, t)
        return self.vectors @ At @ self.vectors.conj().T


def hermitian_evolution(H: np.ndarray, t: float) -> np.ndarray:
    """``e^{-itH}`` through the eigendecomposition of the Hermitian ``H``."""
    return SpectralPropagator(H).unitary(t)


def random_density_matrix(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    rank = dim if rank is None else rank
    G = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = G @ G.conj().T
    return rho / np.trace(rho).real


def random_pure_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return psi / np.linalg.norm(psi)


def random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    G = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return 0.5 * (G + G.conj().T)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    Z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    Q, R = np.linalg.qr(Z)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)


def site_operator(op: np.ndarray, site: int, chain: SiteRange) -> np.ndarray:
    return embed(op, SiteRange(site, site, chain.local_dim), chain)
