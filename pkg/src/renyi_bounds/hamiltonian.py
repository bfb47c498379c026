"""Nearest-neighbour chain Hamiltonians and tailed (quasi-local) Hamiltonians.

A chain of half-length ``L`` has sites ``-L..L`` with open boundaries. The
bond ``j`` couples sites ``j`` and ``j + 1`` and the cut-crossing bond is ``j = 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .linalg import (
    IDENTITY_2,
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    SiteRange,
    check_dimension,
    embed,
    operator_norm,
    partial_trace,
    random_hermitian,
)


@dataclass(frozen=True)
class TFIM:
    J_zz: float = 1.0
    h_x: float = 1.0


@dataclass(frozen=True)
class XXZ:
    J_xy: float = 1.0
    J_z: float = 1.0
    h: float = 0.0


@dataclass(frozen=True)
class RandomNN:
    seed: int = 0
    scale: float = 1.0


Model = Union[TFIM, XXZ, RandomNN]
MODEL_NAMES = {"tfim": TFIM, "xxz": XXZ, "random": RandomNN}


@dataclass(frozen=True)
class ChainSpec:
    L: int
    model: Model = field(default_factory=TFIM)
    r: int = 2

    def __post_init__(self) -> None:
        if self.L < 1:
            raise ValueError("half-length L must be at least 1")
        if isinstance(self.model, (TFIM, XXZ)) and self.r != 2:
            raise ValueError(f"{type(self.model).__name__} is a qubit model; r must be 2")
        check_dimension(self.r ** (2 * self.L + 1))

    @property
    def chain(self) -> SiteRange:
        return SiteRange(-self.L, self.L, self.r)

    @property
    def n_sites(self) -> int:
        return 2 * self.L + 1


def _field_weights(j: int, L: int) -> tuple[float, float]:
    # each interior site shares its field between two bonds; boundary sites have one bond only
    left = 1.0 if j == -L else 0.5
    right = 1.0 if j + 1 == L else 0.5
    return left, right


def _qubit_bond(spec: ChainSpec, j: int) -> np.ndarray:
    m = spec.model
    wl, wr = _field_weights(j, spec.L)
    if isinstance(m, TFIM):
        return (
            m.J_zz * np.kron(PAULI_Z, PAULI_Z)
            + m.h_x * (wl * np.kron(PAULI_X, IDENTITY_2) + wr * np.kron(IDENTITY_2, PAULI_X))
        )
    hop = 0.5 * m.J_xy * (np.kron(PAULI_X, PAULI_X) + np.kron(PAULI_Y, PAULI_Y))
    return (
        hop
        + 0.5 * m.J_z * np.kron(PAULI_Z, PAULI_Z)
        + m.h * (wl * np.kron(PAULI_Z, IDENTITY_2) + wr * np.kron(IDENTITY_2, PAULI_Z))
    )


@dataclass(frozen=True)
class ChainHamiltonian:
    """Bond terms ``{j: H_{j,j+1}}`` of a nearest-neighbour chain."""

    spec: ChainSpec
    terms: dict[int, np.ndarray]
    J: float

    @property
    def chain(self) -> SiteRange:
        return self.spec.chain

    @property
    def r(self) -> int:
        return self.spec.r

    @property
    def bonds(self) -> list[int]:
        return sorted(self.terms)

    def bond(self, j: int) -> np.ndarray:
        return self.terms.get(j, np.zeros((self.r**2, self.r**2), dtype=complex))

    @property
    def interaction(self) -> np.ndarray:
        """The cut-crossing bond ``H_{0,1}``."""
        return self.bond(0)

    def window_matrix(self, lo: int, hi: int, exclude: tuple[int, ...] = ()) -> np.ndarray:
        """Sum of all bonds lying inside ``[lo, hi]`` as a dense matrix on that window."""
        window = SiteRange(lo, hi, self.r)
        check_dimension(window.dim)
        out = np.zeros((window.dim, window.dim), dtype=complex)
        for j, h in self.terms.items():
            if lo <= j and j + 1 <= hi and j not in exclude:
                out += embed(h, SiteRange(j, j + 1, self.r), window)
        return out

    def matrix(self) -> np.ndarray:
        return self.window_matrix(-self.spec.L, self.spec.L)


def build_nn_chain(spec: ChainSpec) -> ChainHamiltonian:
    L = spec.L
    terms: dict[int, np.ndarray] = {}
    if isinstance(spec.model, RandomNN):
        rng = np.random.default_rng(spec.model.seed)
        for j in range(-L, L):
            G = random_hermitian(spec.r**2, rng)
            terms[j] = spec.model.scale * G / operator_norm(G, hermitian=True)
    else:
        for j in range(-L, L):
            terms[j] = _qubit_bond(spec, j)
    J = max(operator_norm(h, hermitian=True) for h in terms.values())
    return ChainHamiltonian(spec, terms, J)


def restrict(H: ChainHamiltonian, k: int) -> ChainHamiltonian:
    """Keep only the bonds with both endpoints inside ``[-k, k]``."""
    if not 0 <= k <= H.spec.L:
        raise ValueError(f"restriction radius {k} outside [0, {H.spec.L}]")
    kept = {j: h for j, h in H.terms.items() if -k <= j and j + 1 <= k}
    return ChainHamiltonian(H.spec, kept, H.J)


def normalized_partial_trace(O: np.ndarray, keep: SiteRange, chain: SiteRange) -> np.ndarray:
    """Average ``O`` over the sites outside ``keep`` and put identities back there."""
    if not chain.covers(keep):
        raise ValueError("keep range must lie inside the chain")
    if np.shape(O) != (chain.dim, chain.dim):
        raise ValueError("operator dimension does not match the chain")
    traced = [s for s in chain.sites if s not in keep]
    if not traced:
        return np.array(O, dtype=complex)
    reduced = partial_trace(O, chain, traced) / chain.local_dim ** len(traced)
    return embed(reduced, keep, chain)


@dataclass(frozen=True)
class TailModel:
    """``H = sum_r H_r`` with each ``H_r`` centred at site ``r`` and decaying away from it.

    ``envelope`` is ``"exponential"`` (``f(x) = e^{-x}``) or ``"compact"``, in which case
    ``H_r`` is the bond ``(r, r+1)`` of a nearest-neighbour chain and ``width`` plays
    the role of the decay length.
    """

    spec: ChainSpec
    centered_terms: dict[int, np.ndarray]
    xi: float
    J: float
    envelope: str = "exponential"
    width: int = 1

    @property
    def chain(self) -> SiteRange:
        return self.spec.chain

    @property
    def b(self) -> int:
        """Half-width of the excluded central block, ``ceil(xi)`` sites (at least one)."""
        return max(1, math.ceil(self.xi))

    def f(self, x: float) -> float:
        if self.envelope == "exponential":
            return math.exp(-x)
        # f(j / xi) = 1 for 1 <= j <= xi, 0 beyond
        j = x * self.xi
        return 1.0 if j <= self.xi + 1e-12 else 0.0

    def term(self, center: int) -> np.ndarray:
        d = self.chain.dim
        return self.centered_terms.get(center, np.zeros((d, d), dtype=complex))

    def matrix(self) -> np.ndarray:
        return sum(self.centered_terms.values())

    def decay_lhs(self, center: int, keep: SiteRange) -> float:
        """``|| Tr~_{X^c} H_r - H_r ||`` for a window ``X = keep`` containing ``center``."""
        Hr = self.term(center)
        return operator_norm(normalized_partial_trace(Hr, keep, self.chain) - Hr, hermitian=True)

    def decay_rhs(self, center: int, keep: SiteRange) -> float:
        outside = [s for s in self.chain.sites if s not in keep]
        if not outside:
            return 0.0
        dist = min(abs(s - center) for s in outside)
        return self.J * self.f(dist / self.xi)


def build_tail_model(
    spec: ChainSpec,
    xi: float,
    seed: int = 0,
    envelope: str = "exponential",
    scale: float = 1.0,
) -> TailModel:
    """Generate a member of the tailed-Hamiltonian class on ``spec.chain``.

    Exponential envelope: ``H_r = sum_d e^{-d/xi} G_{r,d}`` with ``G_{r,d}`` a random
    Hermitian operator of norm ``scale`` on ``[r-d, r+d]``. Dropping every ``d >= m``
    costs at most ``2 scale e^{-m/xi} / (1 - e^{-1/xi})``, which is the stored ``J``.

    Compact envelope: the bonds of ``build_nn_chain(spec)`` attached to their left site.
    """
    if spec.r != 2:
        raise ValueError("tail models are built on qubit chains")
    if xi <= 0:
        raise ValueError("decay length must be positive")
    chain = spec.chain
    check_dimension(chain.dim)
    if envelope == "compact":
        nn = build_nn_chain(spec)
        terms = {j: embed(h, SiteRange(j, j + 1, 2), chain) for j, h in nn.terms.items()}
        return TailModel(spec, terms, xi, nn.J, "compact", max(1, math.ceil(xi)))
    if envelope != "exponential":
        raise ValueError(f"unknown envelope {envelope!r}")
    rng = np.random.default_rng(seed)
    terms = {}
    for center in chain.sites:
        Hr = np.zeros((chain.dim, chain.dim), dtype=complex)
        d = 0
        while True:
            window = chain.intersect(center - d, center + d)
            G = random_hermitian(window.dim, rng)
            G *= scale / operator_norm(G, hermitian=True)
            Hr += math.exp(-d / xi) * embed(G, window, chain)
            if window.lo == chain.lo and window.hi == chain.hi:
                break
            d += 1
        terms[center] = Hr
    J = 2.0 * scale / (1.0 - math.exp(-1.0 / xi))
    return TailModel(spec, terms, xi, J, "exponential")


def hat_H(tail: TailModel, centers: tuple[int, int], keep: SiteRange) -> np.ndarray:
    """Normalized partial trace onto ``keep`` of ``sum_{r=a}^{b} H_r``."""
    a, b = centers
    chain = tail.chain
    if a > b:
        return np.zeros((chain.dim, chain.dim), dtype=complex)
    if a < chain.lo or b > chain.hi:
        raise ValueError(f"centers [{a}, {b}] outside the chain")
    total = sum(tail.term(r) for r in range(a, b + 1))
    return normalized_partial_trace(total, keep, chain)


def hat_H_right(tail: TailModel, b: int, j: int) -> np.ndarray:
    """Centers ``[b, j]`` kept on ``[1, 2j]``."""
    L = tail.spec.L
    if j < b:
        return hat_H(tail, (1, 0), tail.chain)
    return hat_H(tail, (b, min(j, L)), SiteRange(1, min(2 * j, L), 2))


def hat_H_left(tail: TailModel, b: int, j: int) -> np.ndarray:
    """Centers ``[-j, -b]`` kept on ``[-2j, 0]`` (the left half includes site 0)."""
    L = tail.spec.L
    if j < b:
        return hat_H(tail, (1, 0), tail.chain)
    return hat_H(tail, (max(-j, -L), -b), SiteRange(max(-2 * j, -L), 0, 2))


def hat_H_full(tail: TailModel, j: int) -> np.ndarray:
    """Centers ``[-j, j]`` kept on ``[-2j, 2j]``."""
    L = tail.spec.L
    return hat_H(tail, (max(-j, -L), min(j, L)), tail.chain.intersect(-2 * j, 2 * j))
