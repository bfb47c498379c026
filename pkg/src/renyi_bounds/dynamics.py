"""Time evolution, V-operators, trace distances and Lieb-Robinson diagnostics.

Conventions: ``V`` on a window ``[lo, hi]`` containing the cut bond ``(0, 1)`` is
``e^{it(H_W - H_I)} e^{-it H_W}`` where ``H_W`` sums the bonds inside the window
and ``H_I`` is the cut bond. The window ``[0, 0]`` has no bonds and its ``V`` is
the identity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.integrate import cumulative_simpson, solve_ivp
from scipy.sparse.linalg import LinearOperator, eigsh

from .entropy import renyi_entropy
from .hamiltonian import ChainHamiltonian, TailModel, hat_H_full, hat_H_left, hat_H_right
from .linalg import (
    SiteRange,
    SpectralPropagator,
    embed,
    is_hermitian,
    operator_norm,
    partial_trace,
    reduced_state_from_vector,
    schatten_norm,
    trace_distance,
)
from .states import ProductState

# above this dimension, operator norms of evolved differences use a Lanczos solver
LANCZOS_MIN_DIM = 1025


@dataclass(frozen=True)
class TimeGrid:
    """``steps + 1`` equally spaced samples on ``[0, t_max]``."""

    t_max: float
    steps: int = 80

    def __post_init__(self) -> None:
        if self.steps < 1 or self.t_max <= 0:
            raise ValueError("time grid needs t_max > 0 and at least one step")

    @classmethod
    def default(cls, J: float) -> "TimeGrid":
        return cls(2.0 / J, 80)

    @property
    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.steps + 1)

    def rescaled(self, J: float, graph_lr: bool = False) -> np.ndarray:
        return lr_rate(J, graph_lr) * self.times


def lr_rate(J: float, graph_lr: bool = False) -> float:
    """Factor turning ``t`` into the rescaled time ``t' = 4Jt`` (``2Jt`` with the graph variant)."""
    return (2.0 if graph_lr else 4.0) * J


@dataclass(frozen=True)
class LocalOperator:
    """An operator together with the contiguous block of sites it acts on."""

    matrix: np.ndarray
    support: SiteRange

    def on(self, window: SiteRange) -> np.ndarray:
        return embed(self.matrix, self.support, window)

    @property
    def norm(self) -> float:
        return operator_norm(self.matrix)


def site_pauli(pauli: np.ndarray, site: int) -> LocalOperator:
    return LocalOperator(np.asarray(pauli, dtype=complex), SiteRange(site, site, 2))


def _apply_on_block(prop: SpectralPropagator, psi: np.ndarray, t: float, left: int, right: int) -> np.ndarray:
    """Apply ``e^{-itH}`` of a block Hamiltonian to a vector on ``left x block x right``."""
    d = prop.dim
    T = psi.reshape(left, d, right).transpose(1, 0, 2).reshape(d, left * right)
    coeffs = prop.vectors.conj().T @ T
    coeffs *= np.exp(-1j * t * prop.energies)[:, None]
    out = prop.vectors @ coeffs
    return out.reshape(d, left, right).transpose(1, 0, 2).reshape(-1)


class WindowV:
    """``V`` for the bonds of ``H`` inside ``[lo, hi]``; eigendecompositions are cached."""

    def __init__(self, H: ChainHamiltonian, lo: int, hi: int):
        self.H = H
        self.window = SiteRange(lo, hi, H.r)
        self.trivial = not (lo <= 0 and hi >= 1)
        if not self.trivial:
            self.full = SpectralPropagator(H.window_matrix(lo, hi))
            self.split = SpectralPropagator(H.window_matrix(lo, hi, exclude=(0,)))

    def matrix(self, t: float) -> np.ndarray:
        if self.trivial:
            return np.eye(self.window.dim, dtype=complex)
        return self.split.unitary(-t) @ self.full.unitary(t)

    def apply(self, psi: np.ndarray, outer: SiteRange, t: float) -> np.ndarray:
        """Act on a state vector of the larger window ``outer``."""
        if self.trivial:
            return psi
        r = outer.local_dim
        left = r ** (self.window.lo - outer.lo)
        right = r ** (outer.hi - self.window.hi)
        psi = _apply_on_block(self.full, psi, t, left, right)
        return _apply_on_block(self.split, psi, -t, left, right)


def v_window(H: ChainHamiltonian, lo: int, hi: int, t: float) -> np.ndarray:
    return WindowV(H, lo, hi).matrix(t)


def v_operator(H: ChainHamiltonian, k: int, t: float) -> np.ndarray:
    """``V_{Lambda_k}(t)`` as a matrix on ``[-k, k]``."""
    if not 1 <= k <= H.spec.L:
        raise ValueError(f"radius {k} outside [1, {H.spec.L}]")
    return v_window(H, -k, k, t)


def v_interaction_picture(H: ChainHamiltonian, t: float, tol: float = 1e-10) -> np.ndarray:
    """Integrate ``i dV/ds = e^{is(H-H_I)} H_I e^{-is(H-H_I)} V`` from ``V(0) = 1``."""
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    L = H.spec.L
    chain = H.chain
    d = chain.dim
    rest = SpectralPropagator(H.window_matrix(-L, L, exclude=(0,)))
    HI = embed(H.interaction, SiteRange(0, 1, H.r), chain)
    HI_eig = rest.to_eigenbasis(HI)
    if t == 0:
        return np.eye(d, dtype=complex)

    def rhs(s, y):
        G = rest.vectors @ rest.heisenberg_in_eigenbasis(HI_eig, s) @ rest.vectors.conj().T
        return (-1j * G @ y.reshape(d, d)).reshape(-1)

    sol = solve_ivp(rhs, (0.0, t), np.eye(d, dtype=complex).reshape(-1), method="RK45", rtol=tol, atol=tol)
    if sol.status != 0:
        raise RuntimeError(f"interaction-picture integration failed: {sol.message}")
    return sol.y[:, -1].reshape(d, d)


@dataclass
class QuenchTrace:
    """Reduced states of a quench and the Rényi entropies derived from them."""

    times: np.ndarray
    keep: SiteRange
    reduced_states: list[np.ndarray]
    alphas: tuple[float, ...] = ()
    entropies: dict[float, np.ndarray] = field(default_factory=dict)

    def delta_S(self, alpha: float) -> np.ndarray:
        S = self.entropies[alpha]
        return np.abs(S - S[0])


def _initial_vector_or_density(state, chain: SiteRange):
    if isinstance(state, ProductState):
        return (state.vector(), True) if state.is_pure else (state.density(), False)
    arr = np.asarray(state, dtype=complex)
    return arr, arr.ndim == 1


def evolve_reduced(
    H: ChainHamiltonian | np.ndarray,
    state,
    keep: SiteRange,
    times: Sequence[float],
    alphas: Sequence[float] = (),
    chain: SiteRange | None = None,
    propagator: SpectralPropagator | None = None,
) -> QuenchTrace:
    """Reduced state on ``keep`` of ``e^{-itH} rho e^{itH}`` for every ``t`` in ``times``.

    ``state`` may be a ``ProductState``, a state vector or a density matrix. A cached
    ``propagator`` for ``H`` skips the diagonalization.
    """
    if isinstance(H, ChainHamiltonian):
        chain = H.chain
        Hmat = H.matrix() if propagator is None else None
    else:
        Hmat = np.asarray(H)
        if chain is None:
            raise ValueError("a chain is required when H is a bare matrix")
    x0, pure = _initial_vector_or_density(state, chain)
    if x0.shape[0] != chain.dim:
        raise ValueError("initial state dimension does not match the chain")
    prop = propagator if propagator is not None else SpectralPropagator(Hmat)
    traced = [s for s in chain.sites if s not in keep]
    reduced = []
    for t in times:
        if pure:
            reduced.append(reduced_state_from_vector(prop.evolve_vector(x0, t), chain, keep))
        else:
            U = prop.unitary(t)
            reduced.append(partial_trace(U @ x0 @ U.conj().T, chain, traced))
    trace = QuenchTrace(np.asarray(times, dtype=float), keep, reduced, tuple(alphas))
    for a in alphas:
        trace.entropies[a] = np.array([renyi_entropy(rho, a) for rho in reduced])
    return trace


def left_half(chain: SiteRange) -> SiteRange:
    return SiteRange(chain.lo, 0, chain.local_dim)


def _window_pair_distance(
    outer_v: WindowV, inner_v: WindowV, window: SiteRange, psi0: np.ndarray | None, rho0: np.ndarray | None, t: float
) -> float:
    keep = SiteRange(window.lo, 0, window.local_dim)
    if psi0 is not None:
        a = reduced_state_from_vector(outer_v.apply(psi0, window, t), window, keep)
        b = reduced_state_from_vector(inner_v.apply(psi0, window, t), window, keep)
        return trace_distance(a, b)
    Vo = embed(outer_v.matrix(t), outer_v.window, window)
    Vi = embed(inner_v.matrix(t), inner_v.window, window)
    traced = [s for s in window.sites if s > 0]
    a = partial_trace(Vo @ rho0 @ Vo.conj().T, window, traced)
    b = partial_trace(Vi @ rho0 @ Vi.conj().T, window, traced)
    return trace_distance(a, b)


def window_trace_distances(
    H: ChainHamiltonian,
    state: ProductState,
    outer: tuple[int, int],
    inner: tuple[int, int],
    times: Sequence[float],
) -> np.ndarray:
    """Distance between the left-half reductions of ``V_outer rho V_outer^*`` and ``V_inner rho V_inner^*``."""
    window = SiteRange(outer[0], outer[1], H.r)
    if not window.covers(SiteRange(inner[0], inner[1], H.r)):
        raise ValueError("inner window must lie inside the outer one")
    if not isinstance(state, ProductState):
        raise ValueError("trace distances T_k are defined for product initial states")
    ov = WindowV(H, *outer)
    iv = WindowV(H, *inner)
    psi0 = state.vector(window) if state.is_pure else None
    rho0 = None if state.is_pure else state.density(window)
    return np.array([_window_pair_distance(ov, iv, window, psi0, rho0, t) for t in times])


def trace_distance_series(H: ChainHamiltonian, state: ProductState, k: int, times: Sequence[float]) -> np.ndarray:
    """``T_k(t)`` on a list of times."""
    if not 1 <= k <= H.spec.L:
        raise ValueError(f"radius {k} outside [1, {H.spec.L}]")
    return window_trace_distances(H, state, (-k, k), (-(k - 1), k - 1), times)


def trace_distance_Tk(H: ChainHamiltonian, state: ProductState, k: int, t: float) -> float:
    return float(trace_distance_series(H, state, k, [t])[0])


def _norm_of_difference(
    big: SpectralPropagator,
    A_eig: np.ndarray,
    small_op: np.ndarray | None,
    left: int,
    right: int,
    t: float,
    p: float = math.inf,
) -> float:
    """``|| e^{itH_big} A e^{-itH_big} - 1 x small_op x 1 ||_p`` with the big evolution kept in its eigenbasis."""
    At_eig = big.heisenberg_in_eigenbasis(A_eig, t)
    Q = big.vectors
    d = big.dim
    if small_op is None:
        small_op = np.zeros((1, 1))
        left, right = 1, 1
        E_empty = True
    else:
        E_empty = False
    ds = small_op.shape[0]

    def apply_small(v):
        if E_empty:
            return np.zeros_like(v)
        m = v.shape[1] if v.ndim == 2 else 1
        return (small_op @ v.reshape(left, ds, right * m)).reshape(v.shape)

    hermitian = is_hermitian(At_eig, tol=1e-9) and (E_empty or is_hermitian(small_op, tol=1e-9))
    if np.isinf(p) and hermitian and d >= LANCZOS_MIN_DIM:

        def matvec(v):
            v = v.reshape(d, -1)
            return Q @ (At_eig @ (Q.conj().T @ v)) - apply_small(v)

        op = LinearOperator((d, d), matvec=matvec, matmat=matvec, dtype=complex)
        vals = eigsh(op, k=1, which="LM", tol=1e-12, return_eigenvectors=False)
        return float(abs(vals[0]))
    D = Q @ At_eig @ Q.conj().T
    if not E_empty:
        D -= np.kron(np.kron(np.eye(left), small_op), np.eye(right))
    if np.isinf(p):
        return operator_norm(D, hermitian=hermitian)
    return schatten_norm(D, p)


def _heisenberg_difference_series(
    H_big: np.ndarray,
    big: SiteRange,
    H_small: np.ndarray | None,
    small: SiteRange | None,
    A_big: np.ndarray,
    A_small: np.ndarray | None,
    times: Sequence[float],
    p: float = math.inf,
) -> np.ndarray:
    big_prop = SpectralPropagator(H_big)
    A_eig = big_prop.to_eigenbasis(A_big)
    small_prop = SpectralPropagator(H_small) if H_small is not None else None
    r = big.local_dim
    left = r ** (small.lo - big.lo) if small is not None else 1
    right = r ** (big.hi - small.hi) if small is not None else 1
    out = []
    for t in times:
        if small_prop is None:
            small_op = None
        else:
            small_op = small_prop.heisenberg(A_small, t)
        out.append(_norm_of_difference(big_prop, A_eig, small_op, left, right, t, p))
    return np.array(out)


def _clipped_window(H: ChainHamiltonian, k: int) -> SiteRange:
    L = H.spec.L
    return SiteRange(max(-k, -L), min(k, L), H.r)


def delta_k_series(
    H: ChainHamiltonian, A: LocalOperator, k: int, times: Sequence[float], p: float = math.inf
) -> np.ndarray:
    """``Delta_k(t) = || A_{Lambda_{k+1}}(t) - A_{Lambda_k}(t) ||`` with ``A`` evolved by the restricted Hamiltonians.

    Radii beyond the chain are clipped: ``Lambda_j`` for ``j > L`` is the whole chain.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    big = _clipped_window(H, k + 1)
    small = _clipped_window(H, k)
    if not small.covers(A.support):
        raise ValueError("support of A must lie inside [-k, k]")
    H_big = H.window_matrix(big.lo, big.hi)
    H_small = H.window_matrix(small.lo, small.hi)
    return _heisenberg_difference_series(H_big, big, H_small, small, A.on(big), A.on(small), times, p)


def delta_k_numeric(H: ChainHamiltonian, A: LocalOperator, k: int, t: float) -> float:
    return float(delta_k_series(H, A, k, [t])[0])


def operator_schmidt(M: np.ndarray, r: int, tol: float = 1e-13) -> list[tuple[np.ndarray, np.ndarray]]:
    """Write a two-site operator as ``sum_m a_m (x) b_m``."""
    T = np.asarray(M).reshape(r, r, r, r).transpose(0, 2, 1, 3).reshape(r * r, r * r)
    U, s, Vh = np.linalg.svd(T)
    return [
        (np.sqrt(sv) * U[:, m].reshape(r, r), np.sqrt(sv) * Vh[m].reshape(r, r))
        for m, sv in enumerate(s)
        if sv > tol * max(s[0], 1.0)
    ]


def _split_props(H: ChainHamiltonian, k: int) -> tuple[SpectralPropagator, SpectralPropagator]:
    return (
        SpectralPropagator(H.window_matrix(-k, 0)),
        SpectralPropagator(H.window_matrix(1, k)),
    )


def generator_delta_series(H: ChainHamiltonian, k: int, times: Sequence[float]) -> np.ndarray:
    """The integrand bounding ``T_{k+1}``: ``H_I`` evolved by ``H_{Lambda_k} - H_I`` versus ``H_{Lambda_{k+1}} - H_I``.

    For ``k = 0`` the inner ``V`` is the identity, so the integrand is the constant ``||H_I||``.
    Without the cut bond the generator splits into commuting halves, so ``H_I(t)`` is a
    short sum of left (x) right products and the norm is found from small blocks.
    """
    if not 0 <= k <= H.spec.L - 1:
        raise ValueError(f"k must lie in [0, {H.spec.L - 1}]")
    if k == 0:
        return np.full(len(times), operator_norm(H.interaction, hermitian=True))
    r = H.r
    pairs = operator_schmidt(H.interaction, r)
    if not pairs:
        return np.zeros(len(times))
    big_l, big_r = _split_props(H, k + 1)
    small_l, small_r = _split_props(H, k)
    dl, dr = r ** (k + 2), r ** (k + 1)
    eye = np.eye(r)
    out = []
    for t in times:
        terms = []
        for a, b in pairs:
            a_big = big_l.heisenberg(embed(a, SiteRange(0, 0, r), SiteRange(-(k + 1), 0, r)), t)
            b_big = big_r.heisenberg(embed(b, SiteRange(1, 1, r), SiteRange(1, k + 1, r)), t)
            a_small = small_l.heisenberg(embed(a, SiteRange(0, 0, r), SiteRange(-k, 0, r)), t)
            b_small = small_r.heisenberg(embed(b, SiteRange(1, 1, r), SiteRange(1, k, r)), t)
            terms.append((a_big, b_big, 1.0))
            terms.append((np.kron(eye, a_small), np.kron(b_small, eye), -1.0))
        out.append(_product_sum_norm(terms, dl, dr))
    return np.array(out)


def _product_sum_norm(terms: list[tuple[np.ndarray, np.ndarray, float]], dl: int, dr: int) -> float:
    """Operator norm of the Hermitian ``sum_m c_m a_m (x) b_m`` on ``C^dl (x) C^dr``."""
    d = dl * dr
    if d < LANCZOS_MIN_DIM:
        D = sum(c * np.kron(a, b) for a, b, c in terms)
        return operator_norm(D, hermitian=True)
    bts = [(a, b.T, c) for a, b, c in terms]

    def apply(v):
        V = v.reshape(dl, dr)
        return sum(c * (a @ V @ bt) for a, bt, c in bts).reshape(-1)

    def apply_sq(v):
        return apply(apply(v))

    op = LinearOperator((d, d), matvec=apply_sq, dtype=complex)
    top = eigsh(op, k=1, which="LA", tol=1e-10, return_eigenvectors=False)[0]
    return float(math.sqrt(max(top.real, 0.0)))


def generator_delta_dense(H: ChainHamiltonian, k: int, times: Sequence[float]) -> np.ndarray:
    """Reference evaluation of ``generator_delta_series`` with full dense evolutions."""
    if k == 0:
        return np.full(len(times), operator_norm(H.interaction, hermitian=True))
    HI = LocalOperator(H.interaction, SiteRange(0, 1, H.r))
    big = SiteRange(-(k + 1), k + 1, H.r)
    small = SiteRange(-k, k, H.r)
    H_big = H.window_matrix(big.lo, big.hi, exclude=(0,))
    H_small = H.window_matrix(small.lo, small.hi, exclude=(0,))
    return _heisenberg_difference_series(H_big, big, H_small, small, HI.on(big), HI.on(small), times)


def integrate_cumulative(values: np.ndarray, times: np.ndarray) -> np.ndarray:
    """Running integral from 0 by composite Simpson's rule.

    The integrands here are nonnegative, so the running integral is made nondecreasing
    and nonnegative; this removes the small dips Simpson produces near ``t = 0``.
    """
    vals = cumulative_simpson(np.asarray(values, dtype=float), x=np.asarray(times, dtype=float), initial=0.0)
    return np.maximum.accumulate(np.maximum(vals, 0.0))


def refined_grid(times: Sequence[float], refine: int) -> np.ndarray:
    """Insert ``refine - 1`` equally spaced points into every interval of ``times``."""
    times = np.asarray(times, dtype=float)
    if refine < 1:
        raise ValueError("refinement factor must be positive")
    if len(times) < 2 or refine == 1:
        return times
    pieces = [np.linspace(a, b, refine + 1)[:-1] for a, b in zip(times[:-1], times[1:])]
    return np.concatenate(pieces + [times[-1:]])


def generator_integral_series(
    H: ChainHamiltonian, k: int, times: Sequence[float], refine: int = 4
) -> np.ndarray:
    """``int_0^t Delta_{k-1}(s) ds`` on ``times`` (for ``T_k``), with the integrand sampled ``refine`` times finer.

    Near ``t = 0`` the integrand grows like a power of ``t`` and the first Simpson panel
    underestimates it; refining keeps that error far below the trace distances it bounds.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    fine = refined_grid(times, refine)
    vals = integrate_cumulative(generator_delta_series(H, k - 1, fine), fine)
    return vals[::refine]


def delta_k_analytic(norm_A: float, J: float, k: int, t, graph_lr: bool = False):
    """``||A|| (4Jt)^k / k!`` (``2J`` under the graph-theoretic variant)."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    tp = lr_rate(J, graph_lr) * np.asarray(t, dtype=float)
    return norm_A * tp**k / math.factorial(k)


def trace_distance_analytic(J: float, k: int, t, graph_lr: bool = False):
    """``(1/4) t'^k / k!``."""
    tp = lr_rate(J, graph_lr) * np.asarray(t, dtype=float)
    return 0.25 * tp**k / math.factorial(k)


def support_distance(a: SiteRange, b: SiteRange) -> int:
    if a.hi < b.lo:
        return b.lo - a.hi
    if b.hi < a.lo:
        return a.lo - b.hi
    return 0


def lr_commutator(
    H: ChainHamiltonian,
    A: LocalOperator,
    B: LocalOperator,
    times: Sequence[float],
    positive_A: bool = False,
    graph_lr: bool = False,
) -> tuple[np.ndarray, np.ndarray]:
    """Exact ``||[A(t), B]||`` and the bound ``4||A|| ||B|| t'^l / l!`` on a list of times.

    With ``positive_A`` the prefactor drops from 4 to 2.
    """
    l = support_distance(A.support, B.support)
    if l < 1:
        raise ValueError("A and B must have disjoint supports")
    chain = H.chain
    prop = SpectralPropagator(H.matrix())
    A_eig = prop.to_eigenbasis(A.on(chain))
    Bm = B.on(chain)
    numeric = []
    for t in times:
        At = prop.vectors @ prop.heisenberg_in_eigenbasis(A_eig, t) @ prop.vectors.conj().T
        numeric.append(operator_norm(At @ Bm - Bm @ At, hermitian=False))
    prefactor = 2.0 if positive_A else 4.0
    tp = lr_rate(H.J, graph_lr) * np.asarray(times, dtype=float)
    bound = prefactor * A.norm * B.norm * tp**l / math.factorial(l)
    return np.array(numeric), bound


def _check_involution(op: LocalOperator) -> None:
    M = op.matrix
    if not is_hermitian(M, tol=1e-10) or not np.allclose(M @ M, np.eye(M.shape[0]), atol=1e-10):
        raise ValueError("OTOC bound needs Hermitian operators squaring to the identity")


def otoc(
    H: ChainHamiltonian, A: LocalOperator, B: LocalOperator, times: Sequence[float]
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(1/d) Tr(A(t) B A(t) B)`` with its lower bound ``1 - (8 (e t'/j)^j)^2`` and upper bound 1."""
    _check_involution(A)
    _check_involution(B)
    j = support_distance(A.support, B.support)
    if j < 1:
        raise ValueError("A and B must have disjoint supports")
    chain = H.chain
    prop = SpectralPropagator(H.matrix())
    A_eig = prop.to_eigenbasis(A.on(chain))
    B_eig = prop.to_eigenbasis(B.on(chain))
    d = chain.dim
    values = []
    for t in times:
        At = prop.heisenberg_in_eigenbasis(A_eig, t)
        M = At @ B_eig
        values.append(float(np.real(np.einsum("ij,ji->", M, M))) / d)
    tp = 4.0 * H.J * np.asarray(times, dtype=float)
    lower = 1.0 - (8.0 * (math.e * tp / j) ** j) ** 2
    return np.array(values), lower, np.ones(len(values))


class TailV:
    """``V-hat_{Lambda_k}(t) = e^{it(H^_left + H^_right)} e^{-it H^_[-k,k]}`` on the full chain."""

    def __init__(self, tail: TailModel, k: int, b: int | None = None):
        b = tail.b if b is None else b
        self.k = k
        self.full = SpectralPropagator(hat_H_full(tail, k))
        self.split = SpectralPropagator(hat_H_left(tail, b, k) + hat_H_right(tail, b, k))

    def matrix(self, t: float) -> np.ndarray:
        return self.split.unitary(-t) @ self.full.unitary(t)

    def apply(self, psi: np.ndarray, t: float) -> np.ndarray:
        return self.split.evolve_vector(self.full.evolve_vector(psi, t), -t)


def hat_v_operator(tail: TailModel, k: int, b: int, t: float) -> np.ndarray:
    return TailV(tail, k, b).matrix(t)


def r_k_series(
    tail: TailModel, state: ProductState, k: int, times: Sequence[float], b: int | None = None
) -> np.ndarray:
    """``R_k(t)``: distance of the left-half reductions of ``V-hat_{k+1} rho V-hat_{k+1}^*`` and ``V-hat_k rho V-hat_k^*``.

    Both are computed on the whole chain. The product state outside ``[-2(k+1), 2(k+1)]``
    factors out and does not change the distance.
    """
    if not isinstance(state, ProductState):
        raise ValueError("R_k is defined for product initial states")
    chain = tail.chain
    keep = left_half(chain)
    outer, inner = TailV(tail, k + 1, b), TailV(tail, k, b)
    out = []
    if state.is_pure:
        psi0 = state.vector()
        for t in times:
            a = reduced_state_from_vector(outer.apply(psi0, t), chain, keep)
            c = reduced_state_from_vector(inner.apply(psi0, t), chain, keep)
            out.append(trace_distance(a, c))
    else:
        rho0 = state.density()
        traced = [s for s in chain.sites if s > 0]
        for t in times:
            Vo, Vi = outer.matrix(t), inner.matrix(t)
            a = partial_trace(Vo @ rho0 @ Vo.conj().T, chain, traced)
            c = partial_trace(Vi @ rho0 @ Vi.conj().T, chain, traced)
            out.append(trace_distance(a, c))
    return np.array(out)


def r_k_numeric(tail: TailModel, state: ProductState, k: int, b: int, t: float) -> float:
    return float(r_k_series(tail, state, k, [t], b)[0])
