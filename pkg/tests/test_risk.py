import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from conftest import KOU_REF, MEDIANS
from levy_ihr import Diffusion, Direction, McConfig, RiskQuery, Scenario, kou, simulate_fpp
from levy_ihr.errors import DomainError, WellDefinednessError
from levy_ihr.risk import CLUSTER_SIZES, fpp, ies, ivar, ivar_level, pit_risk, risk_report

T10 = 10 / 252
BM = Diffusion(0.0, 1.0)


def test_start_barrier_is_certain():
    assert fpp(KOU_REF, Scenario.direct(0.0), "all", 0.3, 0.0) == 1.0


def test_brownian_passage():
    assert fpp(BM, Scenario.direct(), "all", 1.0, -1.0) == pytest.approx(oracles.bm_passage(1, 1, 1), abs=1e-4)


def test_long_passage_matches_simulation():
    ell = -0.05
    value = fpp(KOU_REF, Scenario.long(0.0, 1.0), "all", T10, ell)
    mc = simulate_fpp(KOU_REF, 0.0, math.log(1 + ell), Direction.DOWN,
                      McConfig(n_paths=1_000_000, seed=5, horizon=T10))
    assert abs(value - mc.p_hat) < 3 * mc.stderr


def test_short_passage_goes_up():
    # short position loses when the price rises
    ell = -0.05
    value = fpp(KOU_REF, Scenario.short(0.0, 1.0), "all", T10, ell)
    mc = simulate_fpp(KOU_REF, 0.0, math.log(1 - ell), Direction.UP,
                      McConfig(n_paths=400_000, seed=6, horizon=T10))
    assert abs(value - mc.p_hat) < 3 * mc.stderr


def test_brownian_ivar_ies():
    q = RiskQuery(BM, Scenario.direct(), 0.05, 1.0)
    assert ivar(q) == pytest.approx(oracles.bm_ivar(0.05), abs=1e-3)
    assert ies(q) == pytest.approx(oracles.bm_ies(0.05), abs=5e-3)
    assert oracles.bm_ivar(0.05) == pytest.approx(1.959964, abs=1e-6)


def test_brownian_point_in_time():
    pv, pe = pit_risk(RiskQuery(BM, Scenario.direct(), 0.05, 1.0))
    var, es = oracles.normal_var_es(0.05)
    assert pv == pytest.approx(var, abs=1e-4)
    assert pe == pytest.approx(es, abs=1e-3)
    assert var == pytest.approx(1.644854, abs=1e-6)
    assert es == pytest.approx(2.062713, abs=1e-6)


def test_long_losses_bounded():
    q = RiskQuery(KOU_REF, Scenario.long(0.0, 1.0), 0.01, 1.0)
    assert ivar(q) <= 1.0
    assert ies(q) <= 1.0


def test_ivar_monotone_in_alpha():
    vals = [ivar(RiskQuery(KOU_REF, Scenario.long(), a, T10)) for a in (0.01, 0.05, 0.1)]
    assert vals[0] >= vals[1] >= vals[2]


@settings(max_examples=15, deadline=None)
@given(alpha=st.floats(0.005, 0.2), days=st.floats(1, 60),
       kind=st.sampled_from(["direct", "long", "short"]))
def test_ordering_invariants(alpha, days, kind):
    sc = {"direct": Scenario.direct(), "long": Scenario.long(), "short": Scenario.short()}[kind]
    r = risk_report(RiskQuery(KOU_REF, sc, alpha, days / 252))
    assert r.ies >= r.ivar
    assert r.ivar >= r.pit_var - 1e-6
    assert 0 < r.omega <= 1


def test_short_requires_upside_moment():
    q = RiskQuery(kou(0.0, 0.2, 3.0, 0.5, 0.8, 25.0), Scenario.short(), 0.01, T10)
    with pytest.raises(WellDefinednessError):
        ies(q)


def test_invalid_alpha():
    with pytest.raises(DomainError):
        RiskQuery(KOU_REF, Scenario.long(), 1.5, T10)


def test_pure_diffusion_shares():
    r = risk_report(RiskQuery(Diffusion(0.0, 0.2), Scenario.long(), 0.01, T10))
    assert r.contrib_ies.diffusion == pytest.approx(1.0)
    assert r.contrib_ies.jump_total == pytest.approx(0.0, abs=1e-12)
    assert all(v == 0 for v in r.jump_cluster_contrib.values())


def test_pure_jump_has_no_diffusion_share():
    # with zero volatility and nonnegative drift the P&L can only fall by jumping
    spec = kou(0.0, 0.0, 50.0, 0.4, 60.0, 40.0)
    r = risk_report(RiskQuery(spec, Scenario.direct(), 0.01, T10))
    assert r.contrib_ies.diffusion == 0.0
    assert r.contrib_ies.jump_total == pytest.approx(1.0)


def test_jump_share_matches_simulation():
    q = RiskQuery(KOU_REF, Scenario.direct(), 0.05, T10)
    r = risk_report(q)
    assert r.contrib_ivar.diffusion + r.contrib_ivar.jump_total == pytest.approx(1.0, abs=1e-6)
    mc = simulate_fpp(KOU_REF, 0.0, -r.ivar, Direction.DOWN,
                      McConfig(n_paths=1_000_000, seed=9, horizon=T10))
    share = mc.p_jump_hat / mc.p_hat
    # conditional share given passage: binomial error over the passing paths
    se = math.sqrt(share * (1 - share) / (mc.p_hat * mc.n_paths))
    assert abs(r.contrib_ivar.jump_total - share) < 3 * se


@pytest.mark.parametrize("name", ["kou_spx", "kou_co1"])
def test_contributions_consistent(name):
    r = risk_report(RiskQuery(MEDIANS[name], Scenario.long(), 0.01, T10))
    for c in (r.contrib_ivar, r.contrib_integral, r.contrib_ies):
        assert c.diffusion + c.jump_total == pytest.approx(1.0, abs=1e-6)
        assert c.jump_by_type.sum() == pytest.approx(c.jump_total, abs=1e-12)
    tops = [r.jump_cluster_contrib[k] for k in CLUSTER_SIZES]
    assert tops == sorted(tops)
    assert tops[-1] <= r.contrib_ies.jump_total + 1e-12


def test_ivar_level_solves_quantile_equation():
    q = RiskQuery(KOU_REF, Scenario.direct(), 0.02, T10)
    ell = ivar_level(q)
    assert fpp(KOU_REF, q.scenario, "all", T10, ell) <= 0.02
    assert fpp(KOU_REF, q.scenario, "all", T10, ell + 1e-6) > 0.02
