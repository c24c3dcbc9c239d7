import math

import numpy as np
import pytest

from qubitsme.engine import IntegratorConfig
from qubitsme.ensemble import (Scenario, compare_to_me, me_reference,
                               run_ensemble, run_trajectory,
                               transient_metrics)
from qubitsme.exceptions import ConfigError
from qubitsme.fields import VacuumInput
from qubitsme.filters import physical_bloch
from qubitsme.scenarios import builtin_names, builtin_scenario


def _vacuum_scenario(n=8, detection="homodyne", t_final=2.0, seed=77,
                     bloch=(1.0, 0.0, 0.0)):
    cfg = IntegratorConfig(dt=1e-3, t_final=t_final, seed=seed,
                           record_stride=10)
    return Scenario(name="test", field_input=VacuumInput(),
                    detection=detection, gamma=1.0, omega=math.pi,
                    initial_bloch=bloch, integrator=cfg, n_trajectories=n)


def test_scenario_validation():
    with pytest.raises(ConfigError):
        _vacuum_scenario(detection="heterodyne")
    with pytest.raises(ConfigError):
        _vacuum_scenario(n=0)


def test_builtin_scenarios_instantiate():
    assert len(builtin_names()) == 6
    for name in builtin_names():
        s = builtin_scenario(name, n_trajectories=3)
        assert s.n_trajectories == 3
    with pytest.raises(KeyError):
        builtin_scenario("does_not_exist")


def test_single_trajectory_equals_ensemble_mean():
    s = _vacuum_scenario(n=1)
    result = run_ensemble(s)
    rec = run_trajectory(s, index=0)
    bloch = np.array([physical_bloch(st, s.field_input)
                      for st in rec.states])
    assert np.array_equal(result.mean["x"], bloch[:, 0])
    assert np.array_equal(result.mean["z"], bloch[:, 2])
    assert np.array_equal(result.se["x"], np.zeros_like(result.se["x"]))


def test_chunking_and_workers_do_not_change_results():
    base = run_ensemble(_vacuum_scenario(n=23), chunk_size=23)
    for chunk, workers in ((1, 1), (7, 1), (9, 3), (23, 2)):
        other = run_ensemble(_vacuum_scenario(n=23), chunk_size=chunk,
                             n_workers=workers)
        for k in base.mean:
            assert np.array_equal(base.mean[k], other.mean[k])
            assert np.array_equal(base.se[k], other.se[k])
        assert np.array_equal(base.purity_mean, other.purity_mean)


def test_trajectories_independent_of_ensemble_size():
    """Stream (seed, i) pins trajectory i no matter how many run."""
    small = run_trajectory(_vacuum_scenario(n=3), index=2)
    large = run_trajectory(_vacuum_scenario(n=200), index=2)
    assert np.array_equal(small.states, large.states)


def test_compare_to_me_zero_for_identical_series():
    result = run_ensemble(_vacuum_scenario(n=4))
    result.mean = {k: v.copy() for k, v in result.me.items()}
    result.se = {k: np.zeros_like(v) for k, v in result.se.items()}
    metrics = compare_to_me(result)
    for k in metrics:
        assert metrics[k]["sup_norm"] == 0.0
        assert metrics[k]["rmse"] == 0.0
        assert metrics[k]["max_abs_z"] == 0.0


def test_compare_to_me_detects_wrong_reference():
    """A doubled decay rate in the reference must stand out."""
    s = _vacuum_scenario(n=400, t_final=3.0, bloch=(0.0, 0.0, 1.0))
    result = run_ensemble(s)
    t = result.times
    wrong_z = -1.0 + 2.0 * np.exp(-2.0 * t)  # gamma doubled
    result.me = dict(result.me, z=wrong_z)
    metrics = compare_to_me(result)
    assert metrics["z"]["sup_norm"] > 0.2
    assert metrics["z"]["max_abs_z"] > 4.0


def test_monte_carlo_convergence_rate():
    """Quadrupling n roughly halves the sup-norm deviation."""
    sups = {}
    for n in (64, 256):
        devs = []
        for rep in range(6):
            s = _vacuum_scenario(n=n, seed=500 + rep, t_final=2.0)
            r = run_ensemble(s)
            devs.append(r.metrics["z"]["sup_norm"])
        sups[n] = np.mean(devs)
    ratio = sups[64] / sups[256]
    assert 1.3 < ratio < 3.2


def test_martingale_property_of_diffusion_term():
    """Per-step ensemble mean of the diffusion term is 0 within 3 SE."""
    s = _vacuum_scenario(n=600, t_final=1.0, seed=88)
    cfg = IntegratorConfig(dt=1e-3, t_final=1.0, seed=88, record_stride=1)
    s = Scenario(name="mart", field_input=s.field_input, detection="homodyne",
                 gamma=s.gamma, omega=s.omega, initial_bloch=s.initial_bloch,
                 integrator=cfg, n_trajectories=600)
    from qubitsme.ensemble import _integrate_chunk, _prepare
    from qubitsme.filters import vacuum_hd_fields
    from qubitsme.operators import SystemTriple
    prep = _prepare(s)
    out = _integrate_chunk(prep, 0, 600)
    states = out["states"]
    G = SystemTriple.two_level(s.gamma, s.omega)
    drift = np.empty_like(states[:, :-1, :])
    for i in range(states.shape[0]):
        for k in range(states.shape[1] - 1):
            drift[i, k] = vacuum_hd_fields(states[i, k], G).drift
    diffusion_contrib = states[:, 1:, :] - states[:, :-1, :] \
        - drift * cfg.dt
    mean = diffusion_contrib.mean(axis=0)
    se = diffusion_contrib.std(axis=0, ddof=1) / math.sqrt(states.shape[0])
    se = np.maximum(se, 1e-12)
    frac_outside = np.mean(np.abs(mean) > 3.0 * se)
    assert frac_outside < 0.01


def test_transient_metrics_vacuum_ground():
    cfg = IntegratorConfig(dt=1e-3, t_final=2.0, seed=0, record_stride=10)
    s = Scenario(name="ground", field_input=VacuumInput(),
                 detection="homodyne", gamma=1.0, omega=0.0,
                 initial_bloch=(0.0, 0.0, -1.0), integrator=cfg,
                 n_trajectories=2)
    r = run_ensemble(s)
    m = transient_metrics(r)
    assert m["me"]["peak_excitation"] == pytest.approx(0.0, abs=1e-12)
    assert m["me"]["terminal_z"] == pytest.approx(-1.0, abs=1e-12)


def test_warns_when_dt_does_not_resolve_rates():
    cfg = IntegratorConfig(dt=0.05, t_final=1.0, seed=0, record_stride=10)
    s = Scenario(name="stiff", field_input=VacuumInput(),
                 detection="homodyne", gamma=4.0, omega=0.0,
                 initial_bloch=(0.0, 0.0, 0.0), integrator=cfg,
                 n_trajectories=2)
    with pytest.warns(UserWarning, match="does not resolve"):
        run_ensemble(s)


def test_me_reference_matches_analytic_vacuum():
    s = _vacuum_scenario(n=2, t_final=4.0, bloch=(0.0, 0.0, 1.0))
    obs, pur, _ = me_reference(s)
    t = s.integrator.recorded_times()
    assert np.max(np.abs(obs["z"] - (-1.0 + 2.0 * np.exp(-t)))) < 1e-10


def test_jump_times_reported_for_counting():
    s = _vacuum_scenario(n=30, detection="photon_counting", t_final=8.0,
                         bloch=(0.0, 0.0, 1.0))
    r = run_ensemble(s)
    assert r.jump_times is not None and len(r.jump_times) == 30
    counts = np.array([len(j) for j in r.jump_times])
    assert counts.max() <= 1
    assert counts.mean() > 0.9
