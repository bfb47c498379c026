"""Product initial states on a chain."""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .linalg import SiteRange, check_dimension


@dataclass(frozen=True)
class ProductState:
    """One local state per site, ordered from ``chain.lo`` to ``chain.hi``.

    ``factors`` holds either kets (1-d arrays) or density matrices (2-d arrays).
    """

    chain: SiteRange
    factors: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        if len(self.factors) != self.chain.n_sites:
            raise ValueError("need exactly one local factor per site")
        for f in self.factors:
            if f.shape[0] != self.chain.local_dim:
                raise ValueError("local factor dimension differs from the chain's local dimension")

    @property
    def is_pure(self) -> bool:
        return all(f.ndim == 1 for f in self.factors)

    def local(self, site: int) -> np.ndarray:
        return self.factors[self.chain.leg(site)]

    def _local_density(self, site: int) -> np.ndarray:
        f = self.local(site)
        return np.outer(f, f.conj()) if f.ndim == 1 else f

    def vector(self, window: SiteRange | None = None) -> np.ndarray:
        window = self.chain if window is None else window
        if not self.is_pure:
            raise ValueError("mixed product state has no state vector")
        check_dimension(window.dim)
        return reduce(np.kron, (self.local(s) for s in window.sites)).astype(complex)

    def density(self, window: SiteRange | None = None) -> np.ndarray:
        window = self.chain if window is None else window
        check_dimension(window.dim)
        return reduce(np.kron, (self._local_density(s) for s in window.sites)).astype(complex)


def basis_product_state(chain: SiteRange, labels: list[int] | int = 0) -> ProductState:
    """Computational basis state; ``labels`` is one level per site or a single level for all."""
    if isinstance(labels, int):
        labels = [labels] * chain.n_sites
    kets = []
    for lab in labels:
        v = np.zeros(chain.local_dim, dtype=complex)
        v[lab] = 1.0
        kets.append(v)
    return ProductState(chain, tuple(kets))


def bloch_product_state(chain: SiteRange, angles: list[tuple[float, float]]) -> ProductState:
    """Qubit product state from per-site Bloch angles ``(theta, phi)``."""
    if chain.local_dim != 2:
        raise ValueError("Bloch angles describe qubits")
    kets = tuple(
        np.array([np.cos(th / 2), np.exp(1j * ph) * np.sin(th / 2)], dtype=complex) for th, ph in angles
    )
    return ProductState(chain, kets)


def random_product_state(chain: SiteRange, seed: int) -> ProductState:
    """Haar-random pure state on each site."""
    rng = np.random.default_rng(seed)
    kets = []
    for _ in chain.sites:
        v = rng.normal(size=chain.local_dim) + 1j * rng.normal(size=chain.local_dim)
        kets.append(v / np.linalg.norm(v))
    return ProductState(chain, tuple(kets))
