import json

import numpy as np
import pytest

import oracles
from conftest import FIXTURES, KOU_REF
from levy_ihr import Diffusion, Direction, HyperExpSpec, McConfig, simulate_fpp
from levy_ihr.models import model_from_dict
from levy_ihr.risk import fpp
from levy_ihr.models import Scenario


def test_brownian_reflection():
    mc = simulate_fpp(Diffusion(0.0, 1.0), 0.0, -1.0, Direction.DOWN, McConfig(seed=1))
    assert abs(mc.p_hat - oracles.bm_passage(1.0, 1.0, 1.0)) < 3 * mc.stderr
    assert mc.p_diffusion_hat == mc.p_hat


def test_deterministic_drift_hits():
    spec = HyperExpSpec(-1.0, 0.0)
    mc = simulate_fpp(spec, 0.0, -0.5, Direction.DOWN, McConfig(n_paths=1000))
    assert mc.p_hat == 1.0


def test_decomposition_is_exact():
    mc = simulate_fpp(KOU_REF, 0.0, -0.05, Direction.DOWN, McConfig(n_paths=200_000, horizon=10 / 252))
    assert mc.p_diffusion_hat + mc.p_jump_hat == pytest.approx(mc.p_hat, abs=1e-15)


def test_reproducible():
    cfg = McConfig(n_paths=100_000, seed=42, horizon=0.1)
    a = simulate_fpp(KOU_REF, 0.0, -0.05, Direction.DOWN, cfg)
    b = simulate_fpp(KOU_REF, 0.0, -0.05, Direction.DOWN, cfg)
    assert a == b


def test_threads_do_not_change_result():
    cfg = McConfig(n_paths=150_000, seed=4, horizon=0.1)
    a = simulate_fpp(KOU_REF, 0.0, -0.05, Direction.DOWN, cfg)
    b = simulate_fpp(KOU_REF, 0.0, -0.05, Direction.DOWN, McConfig(n_paths=150_000, seed=4, horizon=0.1, threads=3))
    assert a == b


def test_discrete_monitoring_underestimates():
    spec = Diffusion(0.0, 1.0)
    on = simulate_fpp(spec, 0.0, -1.0, Direction.DOWN, McConfig(n_paths=100_000, seed=2))
    off = simulate_fpp(spec, 0.0, -1.0, Direction.DOWN,
                       McConfig(n_paths=100_000, seed=2, bridge_correction=False, n_monitor=200))
    assert off.p_hat < on.p_hat


def test_up_direction_mirrors_down():
    cfg = McConfig(n_paths=100_000, seed=8, horizon=0.1)
    up = simulate_fpp(KOU_REF, 0.0, 0.05, Direction.UP, cfg)
    down = simulate_fpp(KOU_REF.mirror(), 0.0, -0.05, Direction.DOWN, cfg)
    assert up.p_hat == down.p_hat


def test_golden_fixture_consistent_with_engine():
    doc = json.loads((FIXTURES / "kou_oracle.json").read_text())
    model = model_from_dict(doc["model"])
    assert model == KOU_REF
    dist = doc["x"] - doc["ell"]
    value = fpp(model, Scenario.direct(), "all", doc["horizon"], -dist)
    diff = fpp(model, Scenario.direct(), "diffusion", doc["horizon"], -dist)
    assert abs(value - doc["p_hat"]) < 3 * doc["stderr"]
    assert abs(diff - doc["components"]["diffusion"]) < 3 * doc["components"]["diffusion_stderr"]


def test_golden_fixture_reproduces():
    doc = json.loads((FIXTURES / "kou_oracle.json").read_text())
    cfg = McConfig(n_paths=doc["n_paths"], seed=doc["seed"], horizon=doc["horizon"],
                   bridge_correction=doc["bridge_correction"])
    mc = simulate_fpp(model_from_dict(doc["model"]), doc["x"], doc["ell"], doc["direction"], cfg)
    assert mc.p_hat == doc["p_hat"]
    assert mc.p_jump_by_type_hat == doc["components"]["jump_by_type"]
