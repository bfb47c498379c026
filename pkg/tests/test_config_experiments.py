import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from renyi_bounds.config import ConfigError, ExperimentConfig, emit, emit_json, parse
from renyi_bounds.experiments import (
    DominanceViolation,
    InfeasibleParameters,
    check_dominance,
    compact_envelope_gap,
    run_lr_probe,
    run_negativity_and_ensembles,
    run_quench_vs_bounds,
    run_tail_bound,
)

SMALL_QUENCH = dict(model_L=2, time_steps=8, alphas=(0.5, 1.0), state_seeds=(1,))


def test_default_template_round_trips():
    cfg = ExperimentConfig()
    assert parse(emit(cfg)) == cfg
    assert parse(emit(cfg, with_docs=True)) == cfg
    assert parse(emit_json(cfg)) == cfg


@settings(max_examples=40, deadline=None)
@given(
    seed=st.integers(0, 2**31),
    L=st.integers(1, 6),
    alphas=st.lists(st.floats(0.01, 1.0), min_size=1, max_size=4).map(tuple),
    t_max=st.floats(0.0, 50.0),
    graph=st.booleans(),
    exp=st.sampled_from(["quench", "lr-probe", "tail-bound", "negativity"]),
)
def test_config_round_trip_property(seed, L, alphas, t_max, graph, exp):
    cfg = ExperimentConfig(experiment=exp, seed=seed, model_L=L, alphas=alphas, time_t_max=t_max, graph_lr=graph)
    assert parse(emit(cfg)) == cfg
    assert parse(emit_json(cfg)) == cfg


def test_nested_json_is_flattened():
    cfg = parse(json.dumps({"model": {"L": 3, "name": "xxz"}, "alphas": [0.5], "graph_lr": True}))
    assert cfg.model_L == 3 and cfg.model_name == "xxz" and cfg.alphas == (0.5,) and cfg.graph_lr


@pytest.mark.parametrize(
    "text",
    ["nonsense", "bogus=1", "alphas=1.5", "model.L=x", "model.name=heisenberg", "seed=1\nseed=2", "{bad json"],
)
def test_config_errors(text):
    with pytest.raises(ConfigError):
        parse(text)


def test_check_dominance():
    check_dominance([{"a": 1.0, "b": 1.0 + 1e-12}], [("a", "b")])
    check_dominance([{"a": 1.0, "b": math.nan}], [("a", "b")])
    with pytest.raises(DominanceViolation):
        check_dominance([{"a": 1.0, "b": 0.9}], [("a", "b")])


def test_zero_hamiltonian_gives_no_growth():
    cfg = ExperimentConfig(model_J_zz=0.0, model_h_x=0.0, time_t_max=3.0, **SMALL_QUENCH)
    table = run_quench_vs_bounds(cfg)
    assert np.allclose(table.column("measured"), 0.0, atol=1e-12)


def test_quench_table_shape_and_dominance():
    table = run_quench_vs_bounds(ExperimentConfig(**SMALL_QUENCH))
    assert len(table.rows) == 2 * 2 * 9
    for c in ("measured", "eq1", "telescopic_numeric", "telescopic_analytic"):
        assert c in table.columns
    for row in table.rows:
        assert row["measured"] <= row["telescopic_numeric"] + 1e-10
        assert row["measured"] <= row["eq1"] + 1e-10
    t0 = [r for r in table.rows if r["t"] == 0.0]
    assert all(r["measured"] == 0.0 for r in t0)
    marien = table.column("marien", alpha=0.5)
    assert np.all(np.isnan(marien))
    keys = [(r["alpha"], r["t"], r["state"]) for r in table.rows]
    assert keys == sorted(keys)


def test_quench_csv_header():
    text = run_quench_vs_bounds(ExperimentConfig(**SMALL_QUENCH)).to_csv()
    lines = text.splitlines()
    assert lines[0].startswith("#schema=renyi-bounds/quench/v1:experiment,state,alpha")
    assert lines[1].startswith("#units=") and "measured:bits" in lines[1]
    header = next(line for line in lines if not line.startswith("#"))
    assert header.split(",")[:3] == ["experiment", "state", "alpha"]


def test_reruns_are_byte_identical_and_thread_independent():
    cfg = ExperimentConfig(**SMALL_QUENCH)
    a = run_quench_vs_bounds(cfg).to_csv()
    b = run_quench_vs_bounds(cfg).to_csv()
    c = run_quench_vs_bounds(cfg, threads=3).to_csv()
    assert a == b == c
    doc = json.loads(run_quench_vs_bounds(cfg).to_json())
    assert doc["schema"].startswith("renyi-bounds/quench/v1") and doc["units"]["measured"] == "bits"


def test_lr_probe_starts_at_zero():
    cfg = ExperimentConfig(experiment="lr-probe", model_L=3, time_steps=6, lr_ks=(1, 2))
    table = run_lr_probe(cfg)
    for row in table.rows:
        if row["t"] == 0.0 and "delta_numeric" in row and row.get("delta_numeric") is not None:
            assert row["delta_numeric"] == pytest.approx(0.0, abs=1e-12)
    vals = [r["T_k"] for r in table.rows if r["t"] == 0.0 and r.get("T_k") is not None and not math.isnan(r["T_k"])]
    assert vals and np.allclose(vals, 0.0, atol=1e-12)


def test_tail_bound_experiment():
    cfg = ExperimentConfig(experiment="tail-bound", model_L=2, time_steps=6, tail_alphas=(0.9, 1.0))
    table = run_tail_bound(cfg)
    t0 = [r for r in table.rows if r["t"] == 0.0]
    assert t0 and all(r["tail_bound"] == 1.0 for r in t0)
    assert all(k.startswith("g_hat.") for k in table.meta if k.startswith("g_hat"))
    assert any(k.startswith("g_hat.") for k in table.meta)
    with pytest.raises(InfeasibleParameters):
        run_tail_bound(cfg.with_overrides(tail_alphas=(0.5,)))


def test_compact_envelope_matches_strict_local():
    cfg = ExperimentConfig(experiment="tail-bound", model_L=3, time_steps=4, state_seeds=(2,))
    assert compact_envelope_gap(cfg) < 1e-10


def test_negativity_experiment():
    table = run_negativity_and_ensembles(ExperimentConfig(experiment="negativity", negativity_samples=10))
    bell = [r for r in table.rows if r["experiment"] == "negativity" and r["index"] == 0]
    assert bell[0]["log_negativity"] == pytest.approx(1.0)
    kinds = {r["experiment"] for r in table.rows}
    assert kinds == {"negativity", "ensemble", "mixing", "pinching"}
