"""Upper bounds on entanglement growth after a quench from a product state.

All entropies are in bits. ``tprime`` is the rescaled time ``4Jt``. The
exponential-tail bound uses natural logarithms inside its exponents.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from .entropy import simplified_term

E = math.e
LN2 = math.log(2.0)
TRUNCATION = 1e-16
DEFAULT_C = 2.854
DEFAULT_C_PRIME = 2.1


@dataclass(frozen=True)
class BoundParams:
    alpha: float
    r: int = 2
    J: float = 1.0
    c: float = DEFAULT_C
    l: int | None = None
    L: int | None = None  # None means an infinite chain
    graph_lr: bool = False

    def __post_init__(self) -> None:
        if not 0 < self.alpha <= 1:
            raise ValueError("alpha must lie in (0, 1]")
        if self.c <= E:
            raise ValueError("c must exceed e")
        if self.r < 2:
            raise ValueError("local dimension must be at least 2")


@dataclass(frozen=True)
class TailBoundParams:
    xi: float
    v_lr: float
    alpha: float
    beta: float
    c_prime: float = DEFAULT_C_PRIME

    @property
    def lam(self) -> float:
        return tail_lambda(self.alpha, self.xi)

    def validate(self) -> None:
        alpha_min, beta_min = tail_feasibility(self.xi, self.v_lr)
        if not 0 < self.alpha <= 1:
            raise ValueError("alpha must lie in (0, 1]")
        if self.alpha <= alpha_min:
            raise ValueError(f"alpha = {self.alpha} is not above the feasibility threshold {alpha_min:.6g}")
        if self.beta <= beta_min(self.alpha):
            raise ValueError(f"beta = {self.beta} is not above the threshold {beta_min(self.alpha):.6g}")
        if self.c_prime <= 2:
            raise ValueError("c_prime must exceed 2")


@dataclass
class BoundCurve:
    times: np.ndarray
    values: np.ndarray
    name: str
    params: object = None
    unit: str = "bits"


def u_k(tprime: float, k: float) -> float:
    """``(1/4) (e t'/k)^k``, an upper bound on ``(1/4) t'^k / k!``; ``k`` may be real."""
    if k <= 0:
        raise ValueError("k must be positive")
    if tprime <= 0:
        return 0.0
    return 0.25 * math.exp(k * math.log(E * tprime / k))


def telescopic_bound_general(
    integrals: Mapping[int, float], alpha: float, r: int, l: int
) -> float:
    """``sum_k log2[1 - alpha I_k + (r^{k+1} - 1)^{1-alpha} I_k^alpha] / (1 - alpha) + (l+1) log2 r``.

    ``integrals`` maps ``k`` (from ``l+1`` up) to an upper bound on the trace distance ``T_k``.
    """
    total = (l + 1) * math.log2(r)
    for k, I in integrals.items():
        if k <= l:
            continue
        if I < 0:
            raise ValueError("trace-distance bounds are nonnegative")
        if I > r ** (k + 1):
            raise ValueError(f"I_{k} = {I} lies beyond the monotone region")
        total += simplified_term(I, r ** (k + 1) - 1, alpha)
    return total


def strict_local_term(tprime: float, k: int, alpha: float, r: int) -> float:
    """Summand with ``u_k`` capped at 1 (a trace distance never exceeds 1) and dimension factor ``r^{k+1}``."""
    return simplified_term(min(u_k(tprime, k), 1.0), None, alpha, log_D=(k + 1) * math.log(r))


def strict_local_sum(
    tprime: float, alpha: float, r: int, l: float, L: int | None = None
) -> tuple[float, int]:
    """``f(l, t')``: the telescopic bound fed with ``u_k``. Returns the value and the last ``k`` summed.

    ``l`` may be real, in which case ``k = l + n`` for ``n = 1, 2, ...``. With ``L = None``
    the series is cut once a term drops below ``1e-16``.
    """
    total = (l + 1) * math.log2(r)
    n = 1
    k_last = l
    while True:
        k = l + n
        if L is not None and k > L:
            break
        term = simplified_term(min(u_k(tprime, k), 1.0), None, alpha, log_D=(k + 1) * math.log(r))
        total += term
        k_last = k
        if L is None and term < TRUNCATION and k > E * tprime:
            break
        n += 1
    return total, k_last


def minimize_l(tprime: float, alpha: float, r: int, L: int | None = None) -> tuple[int, bool]:
    """Walk ``l`` upward until ``f(l) <= f(l+1)``. Returns ``(l, at_boundary)``.

    The walk starts where the capped ``u_{l+1}`` still equals 1 (both stationarity
    conditions then exceed ``log2 r``) and increments while the first one fails.
    ``at_boundary`` is set when the walk hits ``L`` without satisfying it.
    """
    if tprime < 0:
        raise ValueError("t' must be nonnegative")
    log_r = math.log2(r)
    l = 0
    while u_k(tprime, l + 1) >= 1.0 and (L is None or l < L):
        l += 1
    l = max(l - 1, 0)
    limit = L if L is not None else 10**6
    while l < limit and strict_local_term(tprime, l + 1, alpha, r) > log_r:
        l += 1
    at_boundary = l == limit and limit > 0 and strict_local_term(tprime, l + 1, alpha, r) > log_r
    return l, at_boundary


def brute_force_l(tprime: float, alpha: float, r: int, L: int) -> int:
    values = [strict_local_sum(tprime, alpha, r, l, L)[0] for l in range(L + 1)]
    return int(np.argmin(values))


def l_alpha_closed(tprime: float, alpha: float, r: int, c: float = DEFAULT_C) -> float:
    """``c r^{(1-alpha)/alpha} t'``."""
    if c <= E:
        raise ValueError("c must exceed e")
    return c * r ** ((1 - alpha) / alpha) * tprime


def tail_sum_closed(tprime: float, alpha: float, r: int, c: float = DEFAULT_C) -> float:
    """Closed-form geometric majorant of the tail of the strict-local series beyond ``l_alpha``.

    At ``alpha = 1`` the bracket vanishes and the value is minus its derivative in ``alpha``.
    """
    if c <= E:
        raise ValueError("c must exceed e")
    if not 0 < alpha <= 1:
        raise ValueError("alpha must lie in (0, 1]")
    if alpha == 1.0:
        lr, lc = math.log(r), math.log(c)
        Eterm = (E / c) ** (c * tprime)
        d_first = 1 + tprime * c * lr * lc + c * lr / (c - 1)
        d_second = -lr - math.log(4) + tprime * c * (1 - lc) * (1 - lr) - c * lc / (c - 1)
        # bracket'(1) = E/(4(c-1)) * (d_second - d_first); the limit is its negative
        return -Eterm / (4 * (c - 1)) * (d_second - d_first)
    q = c * r ** ((1 - alpha) / alpha)
    first = -(alpha / 4) * (E / q) ** (q * tprime) / (q - 1)
    second = (r ** (1 - alpha) / 4**alpha) * (E / c) ** (alpha * q * tprime) / (c**alpha - 1)
    return (first + second) / (1 - alpha)


def var_change_series(tprime: float, alpha: float, r: int, c: float = DEFAULT_C, terms: int = 200) -> float:
    """Direct sum of ``log2[1 - alpha u + r^{(k+1)(1-alpha)} u^alpha] / (1 - alpha)`` at ``k = l_alpha + n``."""
    la = l_alpha_closed(tprime, alpha, r, c)
    return sum(
        simplified_term(u_k(tprime, la + n), None, alpha, log_D=(la + n + 1) * math.log(r))
        for n in range(1, terms + 1)
    )


def k_prime(r: int, c: float = DEFAULT_C) -> float:
    """``(1 + e / (4c(e-1))) log2 r``."""
    return (1 + E / (4 * c * (E - 1))) * math.log2(r)


def final_linear_bound(t, alpha: float, r: int, J: float, c: float = DEFAULT_C, graph_lr: bool = False):
    """``4c r^{1/alpha - 1} J t log2 r + K'`` (``2c`` under the graph-theoretic variant)."""
    if c <= E:
        raise ValueError("c must exceed e")
    K = (2 if graph_lr else 4) * c
    return K * r ** (1 / alpha - 1) * J * np.asarray(t, dtype=float) * math.log2(r) + k_prime(r, c)


def asymptotic_rate(alpha: float, r: int, c: float = DEFAULT_C) -> float:
    """Long-time slope of the linear bound per unit ``t'``."""
    return c * r ** (1 / alpha - 1) * math.log2(r)


def marien_rate(r: int, J: float) -> float:
    """Slope ``8 J log2 r`` of the von Neumann growth bound used for comparison."""
    return 8 * J * math.log2(r)


def tail_lambda(alpha: float, xi: float) -> float:
    return alpha / (4 * xi) - 2 * LN2 * (1 - alpha)


def tail_feasibility(xi: float, v_lr: float) -> tuple[float, Callable[[float], float]]:
    """``alpha_min = 1 / (1 + 1/(8 xi ln 2))`` and ``beta_min(alpha) = alpha v_LR / lambda``."""
    if xi <= 0:
        raise ValueError("decay length must be positive")
    alpha_min = 1.0 / (1.0 + 1.0 / (8 * xi * LN2))

    def beta_min(alpha: float) -> float:
        lam = tail_lambda(alpha, xi)
        if lam <= 0:
            return math.inf
        return alpha * v_lr / lam

    return alpha_min, beta_min


def tail_bound(t, p: TailBoundParams, J: float):
    """``2 beta t + A(t)`` for Hamiltonians with exponentially decaying tails."""
    p.validate()
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.array([2 * p.beta * s + _tail_A(s, p, J) for s in ts])
    return out if np.ndim(t) else float(out[0])


def _tail_A(t: float, p: TailBoundParams, J: float) -> float:
    if t == 0:
        return 1.0
    xi, v, alpha, beta = p.xi, p.v_lr, p.alpha, p.beta
    X = xi * (t * J) ** 2
    g1 = math.exp(1 / (4 * xi)) / math.expm1(1 / (4 * xi))
    P = X * math.exp(v * t - beta * t / (4 * xi)) * g1
    if alpha == 1.0:
        lam = 1 / (4 * xi)
        dlam = 1 / (4 * xi) + 2 * LN2
        dlogQ = -3 * LN2 + math.log(X) + v * t - dlam * beta * t - dlam / math.expm1(lam)
        return P * (1 - dlogQ) + 1
    lam = p.lam
    Q = math.exp(3 * LN2 * (1 - alpha)) * X**alpha * math.exp(alpha * v * t - lam * beta * t)
    Q *= math.exp(lam) / math.expm1(lam)
    return (-alpha * P + Q) / (1 - alpha) + 1


def tail_rate(p: TailBoundParams) -> float:
    """``c' v_LR / (1/(4 xi) - 2 ln2 (1-alpha)/alpha)``; ``4 c' v_LR xi`` at ``alpha = 1``."""
    return p.c_prime * p.v_lr / (1 / (4 * p.xi) - 2 * LN2 * (1 - p.alpha) / p.alpha)


def tail_telescopic_bound(R: Mapping[int, float], alpha: float, l: int, L: int) -> float:
    """Telescopic bound for tailed Hamiltonians from trace distances ``R_k``, ``k = l .. L-1``.

    The ``k``-th block lives on ``[-2(k+1), 0]`` intersected with the chain.
    """
    total = (min(2 * l, L) + 1) * 1.0
    for k in range(l, L):
        n_left = min(2 * (k + 1), L) + 1
        total += simplified_term(min(R[k], 1.0), 2.0**n_left - 1, alpha)
    return total


def schuch_wolf_lower(t):
    """``(4/(3 pi)) t - (1/2) ln t - 1`` in nats."""
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise ValueError("t must be positive")
    val = 4 / (3 * math.pi) * t - 0.5 * np.log(t) - 1
    return val if val.ndim else float(val)


def schuch_wolf_lower_bits(t):
    return schuch_wolf_lower(t) / LN2


def grid_values(fn: Callable[[float], float], points: Sequence[float]) -> np.ndarray:
    return np.array([fn(x) for x in points])


def tail_sum_closed_bits(tprime: float, alpha: float, r: int, c: float = DEFAULT_C) -> float:
    """``tail_sum_closed`` divided by ``ln 2``.

    The closed form majorizes the series with ``log(1 + y) <= y`` taken in natural
    units; the summands are in bits, so the majorant must carry a ``1/ln 2``.
    """
    return tail_sum_closed(tprime, alpha, r, c) / LN2
