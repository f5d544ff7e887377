"""Smoke tests for the mrelax python module."""

import math

import numpy as np
import pytest

import mrelax


def test_grid_and_spectral_derivative():
    g = mrelax.make_grid(64)
    assert g.n == 64
    assert g.dx == pytest.approx(2 * math.pi / 64)
    f = mrelax.Field(g, np.sin(g.points))
    d = mrelax.deriv(f, 1)
    assert np.max(np.abs(d.values - np.cos(g.points))) < 1e-12
    assert abs(mrelax.mean(f)) < 1e-15
    assert mrelax.sobolev_seminorm(f, 0) == pytest.approx(math.sqrt(math.pi), rel=1e-12)


def test_params_validation():
    with pytest.raises(ValueError):
        mrelax.Params(gamma=2.3)
    with pytest.raises(ValueError):
        mrelax.Params(b0=0.0)


def test_rhs_conserves_means():
    g = mrelax.make_grid(64)
    p = mrelax.Params(1.5, 1.0)
    s = mrelax.State(
        mrelax.Field(g, 1.0 + 0.1 * np.cos(g.points)),
        mrelax.Field(g, 0.1 * np.sin(g.points)),
    )
    drho, db = mrelax.rhs(s, p)
    assert abs(drho.mean()) < 1e-13
    assert abs(db.mean()) < 1e-13


def test_relaxation_variable_identities():
    p = mrelax.Params(1.5, 1.0)
    rho, b = 1.3, 0.7
    f = mrelax.eval_f(rho, b, p)
    g = mrelax.eval_g(rho, b, p)
    want = 4.0 * rho**1.5 / b**2
    assert f * g == pytest.approx(want, rel=1e-12)
    alpha = mrelax.eval_alpha(rho, b, p)
    beta = mrelax.eval_beta(rho, b, p)
    trace = rho**0.5 + (b * b + 1.0) / rho
    det = rho**-0.5
    assert alpha + beta == pytest.approx(trace, rel=1e-12)
    assert alpha * beta == pytest.approx(det, rel=1e-12)
    # infinite branch of f: B = 0 with rho^gamma below b0^2
    assert math.isinf(mrelax.eval_f(0.5, 0.0, p))
    assert mrelax.eval_W(0.5, 0.0, p) == 0.0


def test_zeta_roots():
    p = mrelax.Params(1.5, 1.0)
    z1, z2 = mrelax.zeta_roots(1.0, 0.5, p)
    assert z1 * z2 == pytest.approx(-1.0, abs=1e-13)  # -rho_bar^(gamma-2)
    assert z1 > 0 > z2


def test_level_grid_singular_point():
    p = mrelax.Params(1.5, 1.0)
    rho, b, w_val, w_branch = mrelax.level_grid(p, 0.5, 1.5, 3, -0.5, 0.5, 5, "W")
    _, _, z_val, z_branch = mrelax.level_grid(p, 0.5, 1.5, 3, -0.5, 0.5, 5, "Z")
    both = (w_branch == 1) & (z_branch == 1)
    assert both.sum() == 1
    assert rho[both][0] == 1.0 and b[both][0] == 0.0
    assert np.all(z_val[z_branch == 0] < 1.0)


def test_short_run_conserves_and_dissipates():
    cfg = mrelax.load_scenario("relax-b0")
    cfg.n = 64
    cfg.t_end = 0.1
    cfg.cadence = 0.02
    out = mrelax.run_scenario(cfg)
    assert out["halting_cause"] == "completed"
    rec = out["records"]
    assert len(rec) == 6
    masses = np.array([r["mass"] for r in rec])
    energies = np.array([r["energy"] for r in rec])
    assert np.max(np.abs(masses - masses[0])) < 1e-12
    assert np.all(np.diff(energies) <= 1e-9 * energies[0])
    assert all(r["min_rho"] > 0 for r in rec)


def test_fit_decay():
    t = np.linspace(0.0, 4.0, 50)
    v = 3.0 * np.exp(-0.7 * t)
    fit = mrelax.fit_decay(list(t), list(v), 0.0, 4.0)
    assert fit["rate"] == pytest.approx(0.7, abs=1e-10)
    assert fit["r_squared"] == pytest.approx(1.0, abs=1e-12)


def test_step_and_stable_dt():
    g = mrelax.make_grid(64)
    p = mrelax.Params(1.5, 1.0)
    s = mrelax.State(mrelax.Field(g, np.full(64, 1.0)), mrelax.Field(g, np.zeros(64)))
    dt = mrelax.stable_dt(s, p, mrelax.StepControl(cfl=0.5, t_end=1.0))
    assert dt == pytest.approx(0.5 * g.dx**2 / math.pi**2, rel=1e-12)
    out = mrelax.step(s, p, dt)
    assert np.allclose(out.rho, 1.0) and np.allclose(out.b, 0.0)
