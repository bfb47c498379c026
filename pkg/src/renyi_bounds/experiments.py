"""Experiment suites that compare measured entanglement growth with the bounds.

Every suite returns a ``ResultTable``. Rows are checked for dominance before they
are handed back, and a failed check raises ``DominanceViolation``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from . import bounds as B
from .config import ExperimentConfig
from .dynamics import (
    evolve_reduced,
    delta_k_analytic,
    delta_k_series,
    generator_integral_series,
    left_half,
    lr_rate,
    otoc,
    r_k_series,
    site_pauli,
    trace_distance_analytic,
    trace_distance_series,
    window_trace_distances,
)
from .entropy import (
    Ensemble,
    ensemble_renyi_bounds,
    log_negativity,
    pinch_and_compare,
    renyi_of_distribution,
    schmidt_coefficients,
    von_neumann_mixing_bound,
)
from .hamiltonian import ChainHamiltonian, ChainSpec, TFIM, build_nn_chain, build_tail_model
from .linalg import PAULI_Z, SpectralPropagator, random_density_matrix, random_pure_state, random_unitary
from .states import ProductState, basis_product_state, bloch_product_state, random_product_state

SCHEMA_VERSION = "v1"
# slack for quadrature and eigensolver noise in dominance checks
DOMINANCE_ATOL = 1e-10


class DominanceViolation(RuntimeError):
    """A bound column fell below the quantity it must dominate."""


class InfeasibleParameters(ValueError):
    """Bound parameters outside the region where the bound is proven."""


@dataclass
class ResultTable:
    name: str
    columns: list[str]
    units: dict[str, str]
    rows: list[dict] = field(default_factory=list)
    meta: dict = field(default_factory=dict)
    sort_keys: tuple[str, ...] = ("experiment", "alpha", "t")

    @property
    def schema(self) -> str:
        return f"renyi-bounds/{self.name}/{SCHEMA_VERSION}:" + ",".join(self.columns)

    def sort(self) -> None:
        def key(row):
            return tuple(_sort_value(row.get(k)) for k in self.sort_keys)

        self.rows.sort(key=key)

    def column(self, name: str, **where) -> np.ndarray:
        return np.array(
            [r[name] for r in self.rows if all(r.get(k) == v for k, v in where.items())], dtype=float
        )

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"#schema={self.schema}\n")
        buf.write("#units=" + ",".join(f"{c}:{self.units.get(c, '')}" for c in self.columns) + "\n")
        for k in sorted(self.meta):
            buf.write(f"#meta {k}={_fmt(self.meta[k])}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([_fmt(row.get(c)) for c in self.columns])
        return buf.getvalue()

    def to_json(self) -> str:
        def clean(v):
            if isinstance(v, float) and not math.isfinite(v):
                return None
            if isinstance(v, (np.floating, np.integer)):
                return clean(v.item())
            return v

        doc = {
            "schema": self.schema,
            "units": {c: self.units.get(c, "") for c in self.columns},
            "meta": {k: clean(v) for k, v in sorted(self.meta.items())},
            "rows": [{c: clean(r.get(c)) for c in self.columns} for r in self.rows],
        }
        return json.dumps(doc, indent=1, sort_keys=False) + "\n"

    def render(self, fmt: str) -> str:
        return self.to_csv() if fmt == "csv" else self.to_json()


def _sort_value(v):
    if v is None:
        return (1, "")
    if isinstance(v, str):
        return (0, v)
    return (0, float(v))


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (float, np.floating)):
        return "nan" if not math.isfinite(v) else repr(float(v))
    return str(v)


def check_dominance(rows: Iterable[dict], pairs: Sequence[tuple[str, str]], atol: float = DOMINANCE_ATOL) -> None:
    """Raise unless ``row[lower] <= row[upper] + atol`` wherever both are finite numbers."""
    for row in rows:
        for lo, hi in pairs:
            a, b = row.get(lo), row.get(hi)
            if a is None or b is None or not (math.isfinite(a) and math.isfinite(b)):
                continue
            if a > b + atol:
                raise DominanceViolation(f"{lo} = {a!r} exceeds {hi} = {b!r} in row {row}")


def _time_grid(cfg: ExperimentConfig, J: float) -> np.ndarray:
    t_max = cfg.time_t_max if cfg.time_t_max > 0 else (2.0 / J if J > 0 else 1.0)
    return np.linspace(0.0, t_max, cfg.time_steps + 1)


def initial_states(cfg: ExperimentConfig, spec: ChainSpec) -> list[tuple[str, ProductState]]:
    chain = spec.chain
    states = []
    if cfg.state_kind == "basis":
        labels = cfg.state_labels
        if len(labels) == 1:
            states.append((f"basis{labels[0]}", basis_product_state(chain, int(labels[0]))))
        elif len(labels) == chain.n_sites:
            states.append(("basis", basis_product_state(chain, list(labels))))
        else:
            raise ValueError("state.labels needs one entry or one per site")
    elif cfg.state_kind == "bloch":
        a = cfg.state_angles
        if len(a) != 2 * chain.n_sites:
            raise ValueError("state.angles needs a (theta, phi) pair per site")
        states.append(("bloch", bloch_product_state(chain, list(zip(a[::2], a[1::2])))))
    else:
        states.append((f"random{cfg.seed}", random_product_state(chain, cfg.seed)))
    for s in cfg.state_seeds:
        states.append((f"random{s}", random_product_state(chain, s)))
    return states


def _map(fn: Callable, items: list, threads: int) -> list:
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def telescopic_numeric(I_by_k: dict[int, float], alpha: float, r: int, L: int) -> tuple[float, int]:
    """Best telescopic bound over ``l`` in ``[0, L]`` for the given trace-distance bounds."""
    best, best_l = math.inf, 0
    for l in range(L + 1):
        value = B.telescopic_bound_general({k: I_by_k[k] for k in range(l + 1, L + 1)}, alpha, r, l)
        if value < best - 1e-15:
            best, best_l = value, l
    return best, best_l


def generator_integrals(H: ChainHamiltonian, times: np.ndarray) -> dict[int, np.ndarray]:
    """``I_k(t) = min(int_0^t Delta_{k-1}, 1)`` for ``k = 1..L`` (a trace distance never exceeds 1)."""
    out = {}
    for k in range(1, H.spec.L + 1):
        out[k] = np.clip(generator_integral_series(H, k, times), 0.0, 1.0)
    return out


QUENCH_UNITS = {
    "experiment": "",
    "state": "",
    "alpha": "",
    "t": "time",
    "t_prime": "",
    "measured": "bits",
    "eq1": "bits",
    "telescopic_numeric": "bits",
    "telescopic_analytic": "bits",
    "marien": "bits",
    "schuch_wolf": "bits (nats x 1/ln2)",
    "l_star": "sites",
    "l_numeric": "sites",
    "l_boundary": "flag",
    "l_alpha": "sites",
}


def run_quench_vs_bounds(cfg: ExperimentConfig, threads: int = 1) -> ResultTable:
    spec = cfg.chain_spec()
    H = build_nn_chain(spec)
    J, r, L = H.J, spec.r, spec.L
    times = _time_grid(cfg, J)
    rate = lr_rate(J, cfg.graph_lr)
    states = initial_states(cfg, spec)
    prop = SpectralPropagator(H.matrix())
    keep = left_half(spec.chain)
    measured = {
        label: evolve_reduced(H, st, keep, times, cfg.alphas, propagator=prop) for label, st in states
    }
    want = set(cfg.bounds)
    I = generator_integrals(H, times) if "telescopic_numeric" in want else {}

    cells = [(label, a, i) for label, _ in states for a in cfg.alphas for i in range(len(times))]

    def cell(item):
        label, a, i = item
        t = float(times[i])
        tp = rate * t
        row = {
            "experiment": "quench",
            "state": label,
            "alpha": a,
            "t": t,
            "t_prime": tp,
            "measured": float(measured[label].delta_S(a)[i]),
        }
        if "eq1" in want:
            row["eq1"] = float(B.final_linear_bound(t, a, r, J, cfg.bounds_c, cfg.graph_lr))
        if "telescopic_analytic" in want:
            l_star, at_boundary = B.minimize_l(tp, a, r, L)
            row["telescopic_analytic"] = B.strict_local_sum(tp, a, r, l_star, L)[0]
            row["l_star"] = l_star
            row["l_boundary"] = int(at_boundary)
            row["l_alpha"] = B.l_alpha_closed(tp, a, r, cfg.bounds_c)
        if "telescopic_numeric" in want:
            row["telescopic_numeric"], row["l_numeric"] = telescopic_numeric(
                {k: float(I[k][i]) for k in I}, a, r, L
            )
        if "marien" in want:
            row["marien"] = B.marien_rate(r, J) * t if a == 1.0 else math.nan
        if "schuch_wolf" in want:
            row["schuch_wolf"] = float(B.schuch_wolf_lower_bits(t)) if (a == 1.0 and t > 0) else math.nan
        return row

    rows = _map(cell, cells, threads)
    columns = [c for c in QUENCH_UNITS if any(c in row for row in rows)]
    table = ResultTable("quench", columns, QUENCH_UNITS, rows, sort_keys=("experiment", "alpha", "t", "state"))
    table.meta.update(
        {"J": J, "L": L, "r": r, "model": cfg.model_name, "c": cfg.bounds_c, "graph_lr": cfg.graph_lr,
         "k_prime": B.k_prime(r, cfg.bounds_c)}
    )
    check_dominance(rows, [("measured", c) for c in ("eq1", "telescopic_numeric", "telescopic_analytic") if c in want])
    table.sort()
    return table


LR_UNITS = {
    "experiment": "",
    "k": "sites",
    "t": "time",
    "t_prime": "",
    "delta_numeric": "operator norm",
    "delta_analytic": "operator norm",
    "T_k": "trace distance",
    "quadrature": "trace distance",
    "trace_analytic": "trace distance",
    "otoc": "",
    "otoc_lower": "",
    "otoc_upper": "",
}


def run_lr_probe(cfg: ExperimentConfig, threads: int = 1) -> ResultTable:
    spec = cfg.chain_spec()
    H = build_nn_chain(spec)
    J, L = H.J, spec.L
    times = _time_grid(cfg, J)
    tps = lr_rate(J, cfg.graph_lr) * times
    state = initial_states(cfg, spec)[0][1]
    A = site_pauli(PAULI_Z, cfg.lr_site)
    for k in cfg.lr_ks:
        if not 1 <= k <= L or abs(cfg.lr_site) > k:
            raise InfeasibleParameters(f"radius {k} incompatible with L = {L} and site {cfg.lr_site}")

    def per_k(k):
        dn = delta_k_series(H, A, k, times)
        da = delta_k_analytic(A.norm, J, k, times, cfg.graph_lr)
        Tk = trace_distance_series(H, state, k, times)
        quad = generator_integral_series(H, k, times)
        ta = trace_distance_analytic(J, k, times, cfg.graph_lr)
        return [
            {"experiment": "lr", "k": k, "t": float(t), "t_prime": float(tp), "delta_numeric": float(dn[i]),
             "delta_analytic": float(da[i]), "T_k": float(Tk[i]), "quadrature": float(quad[i]),
             "trace_analytic": float(ta[i])}
            for i, (t, tp) in enumerate(zip(times, tps))
        ]

    rows = [row for chunk in _map(per_k, list(cfg.lr_ks), threads) for row in chunk]
    check_dominance(rows, [("delta_numeric", "delta_analytic"), ("T_k", "quadrature"), ("quadrature", "trace_analytic")])
    if cfg.otoc_distance > 0:
        d = cfg.otoc_distance
        Bop = site_pauli(PAULI_Z, cfg.lr_site + d)
        if cfg.lr_site + d > L:
            raise InfeasibleParameters("OTOC partner lies outside the chain")
        vals, lower, upper = otoc(H, A, Bop, times)
        otoc_rows = [
            {"experiment": "otoc", "k": d, "t": float(t), "t_prime": float(4 * J * t), "otoc": float(v),
             "otoc_lower": float(lo), "otoc_upper": float(up)}
            for t, v, lo, up in zip(times, vals, lower, upper)
        ]
        check_dominance(otoc_rows, [("otoc", "otoc_upper")])
        check_dominance([r for r in otoc_rows if r["otoc_lower"] > -1], [("otoc_lower", "otoc")])
        rows += otoc_rows
    table = ResultTable("lr-probe", list(LR_UNITS), LR_UNITS, rows, sort_keys=("experiment", "k", "t"))
    table.meta.update({"J": J, "L": L, "model": cfg.model_name, "graph_lr": cfg.graph_lr})
    table.sort()
    return table


TAIL_UNITS = {
    "experiment": "",
    "state": "",
    "alpha": "",
    "t": "time",
    "measured": "bits",
    "tail_bound": "bits",
    "tail_telescopic": "bits",
    "beta": "1/time",
}


def tail_parameters(xi: float, v_lr: float, alpha: float, beta_factor: float, c_prime: float) -> B.TailBoundParams:
    alpha_min, beta_min = B.tail_feasibility(xi, v_lr)
    if alpha <= alpha_min:
        raise InfeasibleParameters(f"alpha = {alpha} not above alphaMin = {alpha_min:.6g} for xi = {xi}")
    p = B.TailBoundParams(xi, v_lr, alpha, beta_factor * beta_min(alpha), c_prime)
    try:
        p.validate()
    except ValueError as exc:
        raise InfeasibleParameters(str(exc)) from exc
    return p


def fit_g_hat(R: dict[int, np.ndarray], times: np.ndarray, J: float, xi: float) -> float:
    """Smallest ``g`` with ``R_k(t) <= t J g e^{-k/(4 xi)}`` on the sampled points."""
    best = 0.0
    for k, vals in R.items():
        scale = times[1:] * J * math.exp(-k / (4 * xi))
        best = max(best, float(np.max(vals[1:] / scale)))
    return best


def run_tail_bound(cfg: ExperimentConfig, threads: int = 1) -> ResultTable:
    spec = ChainSpec(cfg.model_L, TFIM(cfg.model_J_zz, cfg.model_h_x))
    tail = build_tail_model(spec, cfg.tail_xi, cfg.seed, cfg.tail_envelope, cfg.model_scale)
    J, L = tail.J, spec.L
    v_lr = cfg.tail_v_lr if cfg.tail_v_lr > 0 else (2 if cfg.graph_lr else 4) * math.e * J
    params = {a: tail_parameters(cfg.tail_xi, v_lr, a, cfg.tail_beta_factor, cfg.tail_c_prime) for a in cfg.tail_alphas}
    times = _time_grid(cfg, J)
    keep = left_half(spec.chain)
    Hmat = tail.matrix()
    prop = SpectralPropagator(Hmat)
    rows = []
    g_hats = {}
    for label, st in initial_states(cfg, spec):
        trace = evolve_reduced(Hmat, st, keep, times, cfg.tail_alphas, chain=spec.chain, propagator=prop)
        R = dict(zip(range(L), _map(lambda k: r_k_series(tail, st, k, times), list(range(L)), threads)))
        g_hats[label] = fit_g_hat(R, times, J, cfg.tail_xi)
        for a, p in params.items():
            tb = B.tail_bound(times, p, J)
            dS = trace.delta_S(a)
            for i, t in enumerate(times):
                tele = min(
                    B.tail_telescopic_bound({k: float(R[k][i]) for k in range(l, L)}, a, l, L) for l in range(L)
                )
                rows.append(
                    {"experiment": "tail", "state": label, "alpha": a, "t": float(t), "measured": float(dS[i]),
                     "tail_bound": float(tb[i]), "tail_telescopic": tele if st.is_pure else math.nan,
                     "beta": p.beta}
                )
    check_dominance(rows, [("measured", "tail_bound"), ("measured", "tail_telescopic")])
    table = ResultTable("tail-bound", list(TAIL_UNITS), TAIL_UNITS, rows, sort_keys=("experiment", "alpha", "t", "state"))
    alpha_min, _ = B.tail_feasibility(cfg.tail_xi, v_lr)
    table.meta.update(
        {"xi": cfg.tail_xi, "J": J, "v_lr": v_lr, "b": tail.b, "alpha_min": alpha_min, "envelope": cfg.tail_envelope,
         "beta_factor": cfg.tail_beta_factor}
    )
    for label, g in g_hats.items():
        table.meta[f"g_hat.{label}"] = g
    table.sort()
    return table


def compact_envelope_gap(cfg: ExperimentConfig, ks: Sequence[int] | None = None) -> float:
    """Largest difference between compact-envelope ``R_k`` and the matching strict-local window distances.

    For the compact envelope ``V-hat_k`` is the strict-local ``V`` on ``[-k, k+1]``.
    """
    spec = ChainSpec(cfg.model_L, TFIM(cfg.model_J_zz, cfg.model_h_x))
    tail = build_tail_model(spec, cfg.tail_xi, cfg.seed, "compact")
    H = build_nn_chain(spec)
    times = _time_grid(cfg, H.J)
    ks = range(1, spec.L) if ks is None else ks
    gap = 0.0
    for label, st in initial_states(cfg, spec):
        for k in ks:
            Rk = r_k_series(tail, st, k, times)
            strict = window_trace_distances(H, st, (-(k + 1), min(k + 2, spec.L)), (-k, k + 1), times)
            gap = max(gap, float(np.max(np.abs(Rk - strict))))
    return gap


NEG_UNITS = {
    "experiment": "",
    "alpha": "",
    "index": "",
    "log_negativity": "bits",
    "renyi_half": "bits",
    "abs_diff": "bits",
    "lower": "bits",
    "mid": "bits",
    "upper_joint": "bits",
    "upper_split": "bits",
    "entropy": "bits",
    "entropy_pinched": "bits",
}


def _random_ensemble(rng: np.random.Generator) -> Ensemble:
    m = int(rng.integers(2, 7))
    d = int(rng.integers(2, 10))
    members = [random_density_matrix(d, rng, rank=int(rng.integers(1, d + 1))) for _ in range(m)]
    return Ensemble(rng.dirichlet(np.ones(m)), members)


def _orthogonal_pure_ensemble(rng: np.random.Generator) -> Ensemble:
    d = int(rng.integers(2, 10))
    m = int(rng.integers(2, d + 1))
    U = random_unitary(d, rng)
    members = [np.outer(U[:, i], U[:, i].conj()) for i in range(m)]
    return Ensemble(rng.dirichlet(np.ones(m)), members)


def run_negativity_and_ensembles(cfg: ExperimentConfig, threads: int = 1) -> ResultTable:
    rng = np.random.default_rng(cfg.seed)
    n = cfg.negativity_samples
    rows = []
    bell = np.array([1, 0, 0, 1], dtype=complex) / math.sqrt(2)
    pure = [(bell, 2)]
    for _ in range(n):
        da, db = 2 ** int(rng.integers(1, 4)), 2 ** int(rng.integers(1, 3))
        pure.append((random_pure_state(da * db, rng), da))
    for i, (psi, da) in enumerate(pure):
        en = log_negativity(psi, da)
        s_half = renyi_of_distribution(schmidt_coefficients(psi, da) ** 2, 0.5)
        rows.append({"experiment": "negativity", "alpha": 0.5, "index": i, "log_negativity": en,
                     "renyi_half": s_half, "abs_diff": abs(en - s_half)})
    alphas = cfg.alphas
    for i in range(n):
        e = _random_ensemble(rng)
        a = alphas[i % len(alphas)]
        lower, mid, joint, split = ensemble_renyi_bounds(e, a)
        rows.append({"experiment": "ensemble", "alpha": a, "index": i, "lower": lower, "mid": mid,
                     "upper_joint": joint, "upper_split": split})
    for i in range(n):
        mid, bound = von_neumann_mixing_bound(_orthogonal_pure_ensemble(rng))
        rows.append({"experiment": "mixing", "alpha": 1.0, "index": i, "mid": mid, "upper_split": bound,
                     "abs_diff": abs(bound - mid)})
    for i in range(n):
        rho = random_density_matrix(8, rng)
        local = [random_unitary(2, rng) for _ in range(3)]
        for a in (0.5, 1.0):
            s, sp = pinch_and_compare(rho, local, a)
            rows.append({"experiment": "pinching", "alpha": a, "index": i, "entropy": s, "entropy_pinched": sp})
    for r in rows:
        if r["experiment"] in ("negativity", "mixing") and r["abs_diff"] > DOMINANCE_ATOL:
            raise DominanceViolation(f"equality broken in row {r}")
    ens = [r for r in rows if r["experiment"] == "ensemble"]
    check_dominance(ens, [("lower", "mid"), ("mid", "upper_joint"), ("upper_joint", "upper_split")], atol=1e-12)
    check_dominance([r for r in rows if r["experiment"] == "pinching"], [("entropy", "entropy_pinched")], atol=1e-12)
    table = ResultTable("negativity", list(NEG_UNITS), NEG_UNITS, rows, sort_keys=("experiment", "alpha", "index"))
    table.meta.update({"samples": n, "seed": cfg.seed})
    table.sort()
    return table


RUNNERS: dict[str, Callable[[ExperimentConfig, int], ResultTable]] = {
    "quench": run_quench_vs_bounds,
    "lr-probe": run_lr_probe,
    "tail-bound": run_tail_bound,
    "negativity": run_negativity_and_ensembles,
}
