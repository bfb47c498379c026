"""Acceptance criteria, each returning a pass/fail result with a one-line summary."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import bounds as B
from .config import ExperimentConfig
from .dynamics import (
    delta_k_series,
    evolve_reduced,
    generator_integral_series,
    left_half,
    otoc,
    site_pauli,
    trace_distance_series,
)
from .entropy import audenaert_bound, fap_bound, pinch_and_compare, renyi_entropy, saturating_pair
from .experiments import (
    DOMINANCE_ATOL,
    DominanceViolation,
    compact_envelope_gap,
    run_negativity_and_ensembles,
    run_quench_vs_bounds,
    run_tail_bound,
)
from .hamiltonian import TFIM, XXZ, ChainSpec, build_nn_chain
from .linalg import PAULI_Z, random_density_matrix, random_unitary
from .states import basis_product_state, random_product_state


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0
    budget: float = math.inf
    subchecks: list[tuple[str, bool, str]] = field(default_factory=list)

    def line(self) -> str:
        head = "PASS" if self.passed else "FAIL"
        out = f"[{head}] {self.number:2d} {self.name}: {self.detail} ({self.seconds:.2f} s, budget {self.budget:g} s)"
        for name, ok, detail in self.subchecks:
            out += f"\n        [{'pass' if ok else 'fail'}] {name}: {detail}"
        return out


def _timed(number: int, name: str, budget: float):
    def wrap(fn: Callable[[], tuple[bool, str, list]]):
        def run() -> CriterionResult:
            start = time.perf_counter()
            ok, detail, subs = fn()
            elapsed = time.perf_counter() - start
            in_budget = elapsed < budget
            if not in_budget:
                detail += " [over runtime budget]"
            return CriterionResult(number, name, ok and in_budget, detail, elapsed, budget, subs)

        run.number = number
        return run

    return wrap


@_timed(1, "audenaert-saturation", 1.0)
def criterion_audenaert() -> tuple[bool, str, list]:
    rng = np.random.default_rng(101)
    worst = 0.0
    for i in range(50):
        d = int(rng.choice([2, 4, 8, 16]))
        alpha = 1.0 if i % 10 == 0 else float(rng.uniform(0.05, 1.0))
        T = float(rng.uniform(0.0, 1.0))
        rho, sigma = saturating_pair(T, d)
        gap = abs(renyi_entropy(rho, alpha) - renyi_entropy(sigma, alpha))
        worst = max(worst, abs(gap - audenaert_bound(T, d, alpha)))
    worst_max = 0.0
    for d in (2, 4, 8, 16):
        for alpha in (0.1, 0.5, 0.9, 1.0):
            worst_max = max(worst_max, abs(audenaert_bound(1 - 1 / d, d, alpha) - math.log2(d)))
    ok = worst <= 1e-12 and worst_max <= 1e-12
    return ok, f"max |gap - bound| = {worst:.2e}, max |bound(1-1/d) - log2 d| = {worst_max:.2e} (tol 1e-12)", []


@_timed(2, "lieb-robinson-chain", 300.0)
def criterion_lr_chain() -> tuple[bool, str, list]:
    subs = []
    total = 0
    for model in (TFIM(), XXZ()):
        spec = ChainSpec(4, model)
        H = build_nn_chain(spec)
        times = np.linspace(0.0, 2.0 / H.J, 81)
        tp = 4 * H.J * times
        A = site_pauli(PAULI_Z, 0)
        states = [basis_product_state(spec.chain, 0), random_product_state(spec.chain, 7)]
        v_delta = v_T = v_quad = 0
        for k in (2, 3, 4):
            dn = delta_k_series(H, A, k, times)
            v_delta += int(np.sum(dn > (tp**k) / math.factorial(k) * A.norm + DOMINANCE_ATOL))
            quad = generator_integral_series(H, k, times)
            v_quad += int(np.sum(quad > 0.25 * tp**k / math.factorial(k) + DOMINANCE_ATOL))
            for st in states:
                Tk = trace_distance_series(H, st, k, times)
                v_T += int(np.sum(Tk > quad + DOMINANCE_ATOL))
        n = v_delta + v_T + v_quad
        total += n
        subs.append(
            (type(model).__name__, n == 0, f"Delta violations {v_delta}, T_k > integral {v_T}, integral > u_k {v_quad}")
        )
    return total == 0, f"{total} violations over k in {{2,3,4}}, 81 times, TFIM and XXZ", subs


@_timed(3, "headline-linear-bound", 900.0)
def criterion_headline() -> tuple[bool, str, list]:
    cfg = ExperimentConfig(model_L=5, alphas=(0.3, 0.5, 0.9, 1.0), state_seeds=(1, 2, 3))
    try:
        table = run_quench_vs_bounds(cfg)
    except DominanceViolation as exc:
        return False, f"dominance violation: {exc}", []
    rows = table.rows

    def count(lo, hi):
        return sum(1 for r in rows if r[lo] > r[hi] + DOMINANCE_ATOL)

    checks = [
        ("measured <= eq1", count("measured", "eq1")),
        ("measured <= telescopic_numeric", count("measured", "telescopic_numeric")),
        ("telescopic_numeric <= telescopic_analytic", count("telescopic_numeric", "telescopic_analytic")),
        ("telescopic_analytic <= eq1", count("telescopic_analytic", "eq1")),
    ]
    subs = [(name, n == 0, f"{n} of {len(rows)} grid points violate") for name, n in checks]
    worst = max(r["telescopic_analytic"] - r["eq1"] for r in rows)
    subs[-1] = (subs[-1][0], subs[-1][1], subs[-1][2] + f"; worst excess {worst:.3f} bits")
    ok = all(n == 0 for _, n in checks)
    return ok, f"11-site TFIM, 4 initial states, {len(rows)} rows", subs


@_timed(4, "minimizer-and-tail-sum", 10.0)
def criterion_minimizer() -> tuple[bool, str, list]:
    rng = np.random.default_rng(404)
    mismatches = 0
    for _ in range(200):
        r = int(rng.integers(2, 5))
        alpha = float(rng.uniform(0.2, 1.0))
        tprime = float(rng.uniform(0.0, 4.0))
        l_walk, _ = B.minimize_l(tprime, alpha, r, 60)
        if l_walk != B.brute_force_l(tprime, alpha, r, 60):
            mismatches += 1
    failures = failures_bits = 0
    worst = 0.0
    for tp in np.linspace(0.05, 10.0, 20):
        for alpha in np.linspace(0.05, 0.999, 20):
            series = B.var_change_series(tp, alpha, 2)
            closed = B.tail_sum_closed(tp, alpha, 2)
            if series > closed:
                failures += 1
                worst = max(worst, series / closed)
            if series > B.tail_sum_closed_bits(tp, alpha, 2):
                failures_bits += 1
    subs = [
        ("walk == brute force on 200 triples", mismatches == 0, f"{mismatches} mismatches"),
        ("tail_sum_closed >= series on 20x20 grid", failures == 0,
         f"{failures} of 400 cells violate, worst ratio {worst:.3f}"),
        ("tail_sum_closed / ln2 >= series (information)", failures_bits == 0, f"{failures_bits} of 400 cells violate"),
    ]
    return mismatches == 0 and failures == 0, "minimizer walk and closed tail sum", subs


@_timed(5, "alpha-to-one-limits", 1.0)
def criterion_alpha_limit() -> tuple[bool, str, list]:
    a = 1 - 1e-6
    worst_fap = max(
        abs(audenaert_bound(T, d, a) - fap_bound(T, d)) for T in np.linspace(0, 1, 21) for d in (2, 3, 4, 8, 16, 64)
    )
    worst_tail_sum = max(
        abs(B.tail_sum_closed(tp, a, r) / B.tail_sum_closed(tp, 1.0, r) - 1)
        for tp in (0.01, 0.1, 0.5, 1, 3, 10) for r in (2, 3)
    )
    xi, v = 0.5, 4 * math.e
    _, beta_min = B.tail_feasibility(xi, v)
    beta = 1.05 * beta_min(1.0)
    p1 = B.TailBoundParams(xi, v, 1.0, beta)
    pa = B.TailBoundParams(xi, v, a, beta)
    worst_tail = max(abs(B.tail_bound(t, pa, 1.0) / B.tail_bound(t, p1, 1.0) - 1) for t in (0.05, 0.1, 0.5, 1.0, 2.0))
    subs = [
        ("audenaert vs FAP", worst_fap <= 1e-4, f"max diff {worst_fap:.2e} bits (tol 1e-4)"),
        ("tail_sum_closed", worst_tail_sum <= 1e-3, f"max rel diff {worst_tail_sum:.2e} (tol 1e-3)"),
        ("tail_bound", worst_tail <= 1e-3, f"max rel diff {worst_tail:.2e} (tol 1e-3)"),
    ]
    return all(s[1] for s in subs), "analytic alpha = 1 forms", subs


@_timed(6, "exponential-tail-bound", 1200.0)
def criterion_tail() -> tuple[bool, str, list]:
    cfg = ExperimentConfig(experiment="tail-bound", model_L=4, tail_xi=0.5, tail_alphas=(0.8, 0.9, 1.0),
                           tail_beta_factor=1.05, state_seeds=(1,))
    try:
        table = run_tail_bound(cfg)
        dominated = True
        msg = f"{len(table.rows)} rows, measured <= tail_bound everywhere"
    except DominanceViolation as exc:
        dominated, msg, table = False, str(exc), None
    gap = compact_envelope_gap(ExperimentConfig(model_L=4))
    subs = [("measured <= 2 beta t + A(t)", dominated, msg),
            ("compact envelope == strict-local", gap <= 1e-9, f"max diff {gap:.2e} (tol 1e-9)")]
    if table is not None:
        g = {k: v for k, v in table.meta.items() if k.startswith("g_hat")}
        subs.append(("fitted g_hat (reported)", True, ", ".join(f"{k}={v:.4g}" for k, v in g.items())))
    return dominated and gap <= 1e-9, "9-site tail model, xi = 0.5, beta = 1.05 betaMin", subs


@_timed(7, "negativity-and-majorization", 30.0)
def criterion_negativity() -> tuple[bool, str, list]:
    try:
        table = run_negativity_and_ensembles(ExperimentConfig(experiment="negativity", negativity_samples=100, seed=7))
    except DominanceViolation as exc:
        return False, str(exc), []
    rows = table.rows
    neg = [r["abs_diff"] for r in rows if r["experiment"] == "negativity"]
    mix = [r["abs_diff"] for r in rows if r["experiment"] == "mixing"]
    ens = [r for r in rows if r["experiment"] == "ensemble"]
    viol = sum(
        1 for r in ens
        if not (r["lower"] <= r["mid"] + 1e-12 and r["mid"] <= r["upper_joint"] + 1e-12
                and r["upper_joint"] <= r["upper_split"] + 1e-12)
    )
    subs = [
        ("|E_N - S_1/2|", max(neg) <= 1e-10, f"max {max(neg):.2e} over {len(neg)} states (tol 1e-10)"),
        ("ensemble chain", viol == 0, f"{viol} violations over {len(ens)} ensembles"),
        ("mixing equality, orthogonal pure members", max(mix) <= 1e-10, f"max {max(mix):.2e} (tol 1e-10)"),
    ]
    return all(s[1] for s in subs), "random states and ensembles", subs


@_timed(8, "otoc-window", 120.0)
def criterion_otoc() -> tuple[bool, str, list]:
    H = build_nn_chain(ChainSpec(4, TFIM()))
    times = np.linspace(0.0, 2.0 / H.J, 81)
    vals, lower, upper = otoc(H, site_pauli(PAULI_Z, 0), site_pauli(PAULI_Z, 3), times)
    mask = lower > -1
    viol = int(np.sum((vals > upper + 1e-12) | (mask & (vals < lower - 1e-12))))
    at_zero = abs(vals[0] - 1.0)
    ok = viol == 0 and at_zero <= 1e-12
    return ok, f"{viol} violations over {int(mask.sum())} informative points; |F(0) - 1| = {at_zero:.1e}", []


@_timed(9, "schuch-wolf-sanity", 600.0)
def criterion_schuch_wolf() -> tuple[bool, str, list]:
    L = 5
    H = build_nn_chain(ChainSpec(L, TFIM()))
    v_lr = 4 * math.e * H.J
    lo, hi = 0.5, L / (2 * v_lr)
    times = np.linspace(0.0, 2.0 / H.J, 81)
    st = basis_product_state(H.chain, 0)
    dS = evolve_reduced(H, st, left_half(H.chain), times, (1.0,)).delta_S(1.0)
    lower = np.full(len(times), -np.inf)
    lower[1:] = B.schuch_wolf_lower_bits(times[1:])
    in_window = (times >= lo) & (times <= hi)
    viol = int(np.sum(dS[in_window] < lower[in_window]))
    info = int(np.sum(dS[1:] < lower[1:]))
    window = f"window [{lo}, {hi:.4f}]"
    if not in_window.any():
        detail = f"{window} is empty at this size, vacuous pass"
    else:
        detail = f"{window}, {viol} violations at {int(in_window.sum())} points"
    subs = [("full grid (information)", True, f"measured below the lower bound at {info} of {len(times) - 1} points")]
    return viol == 0, f"11-site TFIM; {detail}", subs


@_timed(10, "pinching", 5.0)
def criterion_pinching() -> tuple[bool, str, list]:
    rng = np.random.default_rng(1010)
    viol = 0
    for _ in range(100):
        rho = random_density_matrix(8, rng, rank=int(rng.integers(1, 9)))
        local = [random_unitary(2, rng) for _ in range(3)]
        for alpha in (0.5, 1.0):
            s, sp = pinch_and_compare(rho, local, alpha)
            viol += int(sp < s - 1e-12)
    return viol == 0, f"{viol} violations over 100 states and alpha in {{0.5, 1}}", []


CRITERIA = [
    criterion_audenaert,
    criterion_lr_chain,
    criterion_headline,
    criterion_minimizer,
    criterion_alpha_limit,
    criterion_tail,
    criterion_negativity,
    criterion_otoc,
    criterion_schuch_wolf,
    criterion_pinching,
]


def run_all(only: list[int] | None = None) -> list[CriterionResult]:
    return [c() for c in CRITERIA if not only or c.number in only]
