"""Trajectory ensembles, their statistics and the filter-vs-ME comparison.

Determinism contract: trajectory i draws its noise from the stream
(seed, i) regardless of how trajectories are batched or scheduled, and
ensemble statistics are folded trajectory-by-trajectory in index order,
so results are bit-identical for any chunk size or worker count.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .engine import IntegratorConfig, TrajectoryRecord, integrate_ode, rng_stream
from .exceptions import ConfigError
from .fields import CatStateInput, SinglePhotonInput, VacuumInput
from .filters import initial_state, me_fields
from .purity import purity_series

DETECTIONS = ("homodyne", "photon_counting")


@dataclass(frozen=True)
class Scenario:
    """One complete simulation setup (input, detection, system, grid)."""

    name: str
    field_input: object
    detection: str
    gamma: float
    omega: float
    initial_bloch: tuple
    integrator: IntegratorConfig
    n_trajectories: int = 50

    def __post_init__(self):
        if self.detection not in DETECTIONS:
            raise ConfigError(f"detection must be one of {DETECTIONS}")
        if self.n_trajectories < 1:
            raise ConfigError("n_trajectories must be >= 1")
        if self.gamma < 0:
            raise ConfigError("gamma must be >= 0")
        if len(tuple(self.initial_bloch)) != 3:
            raise ConfigError("initial_bloch needs exactly three components")


@dataclass
class EnsembleResult:
    """Per-time ensemble statistics next to the ME reference series."""

    scenario: Scenario
    times: np.ndarray
    n_trajectories: int
    mean: dict
    se: dict
    me: dict
    purity_mean: np.ndarray
    purity_se: np.ndarray
    purity_me: np.ndarray
    metrics: dict = field(default_factory=dict)
    jump_times: list | None = None
    failed_indices: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# scenario preparation


def _system_rates(scenario):
    rates = [scenario.gamma, abs(scenario.omega)]
    if isinstance(scenario.field_input, SinglePhotonInput):
        rates.append(scenario.field_input.wavepacket.bandwidth ** 2)
    if isinstance(scenario.field_input, CatStateInput):
        for a in scenario.field_input.amplitudes:
            rates.extend(abs(v) ** 2 for _, _, v in a.segments)
    return max(rates)


def _prepare(scenario: Scenario) -> dict:
    cfg = scenario.integrator
    if cfg.dt * _system_rates(scenario) >= 0.1:
        warnings.warn("dt does not resolve the fastest system rate "
                      "(dt * max rate >= 0.1)", stacklevel=3)
    inp = scenario.field_input
    x0 = initial_state(scenario.initial_bloch, inp)
    tgrid = np.arange(cfg.n_steps) * cfg.dt
    prep = {
        "scenario": scenario,
        "cfg": cfg,
        "x0": x0,
        "gamma": float(scenario.gamma),
        "sg": math.sqrt(scenario.gamma),
        "omega": float(scenario.omega),
        "homodyne": scenario.detection == "homodyne",
    }
    if isinstance(inp, SinglePhotonInput):
        xi = np.asarray(inp.wavepacket(tgrid), dtype=complex)
        prep["xi"] = xi
        prep["xi_abs2"] = xi.real * xi.real + xi.imag * xi.imag
    elif isinstance(inp, CatStateInput):
        alpha = np.ascontiguousarray(inp.amplitude_values(tgrid))
        prep["alpha"] = alpha
        prep["alpha_abs2"] = alpha.real * alpha.real + alpha.imag * alpha.imag
        prep["w"] = np.ascontiguousarray(inp.branch_weights)
    return prep


def _alloc_outputs(prep, m):
    cfg = prep["cfg"]
    nrec = cfg.n_records
    x0 = prep["x0"]
    out = {
        "states": np.empty((m, nrec) + x0.shape, dtype=x0.dtype),
        "innov": np.empty((m, nrec)),
        "yrec": np.empty((m, nrec)),
        "status": np.full(m, -1, dtype=np.int64),
    }
    if not prep["homodyne"]:
        out["jump_steps"] = np.full((m, kernels.MAX_RECORDED_JUMPS), -1,
                                    dtype=np.int64)
        out["njumps"] = np.zeros(m, dtype=np.int64)
        out["nclamped"] = np.zeros(m, dtype=np.int64)
        out["maxnudt"] = np.zeros(m)
    return out


def _chunk_noise(prep, start, m):
    cfg = prep["cfg"]
    n = cfg.n_steps
    noise = np.empty((m, n))
    if prep["homodyne"]:
        sqrt_dt = math.sqrt(cfg.dt)
        for r in range(m):
            noise[r] = rng_stream(cfg.seed, start + r).standard_normal(n) \
                * sqrt_dt
    else:
        for r in range(m):
            noise[r] = rng_stream(cfg.seed, start + r).random(n)
    return noise


def _integrate_chunk(prep, start, m):
    """Integrate trajectories [start, start+m) and return raw outputs."""
    cfg = prep["cfg"]
    inp = prep["scenario"].field_input
    x0 = np.repeat(prep["x0"][None], m, axis=0)
    noise = _chunk_noise(prep, start, m)
    out = _alloc_outputs(prep, m)
    args = (x0, prep["gamma"], prep["sg"], prep["omega"], cfg.dt,
            cfg.record_stride)
    if isinstance(inp, VacuumInput):
        if prep["homodyne"]:
            kernels.vacuum_hd_chunk(*args, noise, out["states"], out["innov"],
                                    out["yrec"], out["status"])
        else:
            kernels.vacuum_pd_chunk(*args, noise, out["states"], out["innov"],
                                    out["yrec"], out["status"],
                                    out["jump_steps"], out["njumps"],
                                    out["nclamped"], out["maxnudt"])
    elif isinstance(inp, SinglePhotonInput):
        if prep["homodyne"]:
            kernels.photon_hd_chunk(*args, prep["xi"], noise, out["states"],
                                    out["innov"], out["yrec"], out["status"])
        else:
            kernels.photon_pd_chunk(*args, prep["xi"], prep["xi_abs2"], noise,
                                    out["states"], out["innov"], out["yrec"],
                                    out["status"], out["jump_steps"],
                                    out["njumps"], out["nclamped"],
                                    out["maxnudt"])
    else:
        if prep["homodyne"]:
            kernels.cat_hd_chunk(*args, prep["alpha"], prep["w"], noise,
                                 out["states"], out["innov"], out["yrec"],
                                 out["status"])
        else:
            kernels.cat_pd_chunk(*args, prep["alpha"], prep["alpha_abs2"],
                                 prep["w"], noise, out["states"],
                                 out["innov"], out["yrec"], out["status"],
                                 out["jump_steps"], out["njumps"],
                                 out["nclamped"], out["maxnudt"])
    return out


# ---------------------------------------------------------------------------
# observable extraction


def observables_from_states(states, field_input) -> dict:
    """Named real observable series from recorded states.

    Cat observables are the raw block sums (the quantity whose ensemble
    mean reproduces the ME); `norm` tracks the summed c component.
    """
    s = np.asarray(states)
    if isinstance(field_input, VacuumInput):
        return {"x": s[..., 0], "y": s[..., 1], "z": s[..., 2]}
    if isinstance(field_input, SinglePhotonInput):
        obs = {
            "x": s[..., 0, 1].real,
            "y": s[..., 0, 2].real,
            "z": s[..., 0, 3].real,
            "pe11": 0.5 * (s[..., 0, 0].real + s[..., 0, 3].real),
            "pe00": 0.5 * (s[..., 2, 0].real + s[..., 2, 3].real),
        }
        pe10 = 0.5 * (s[..., 1, 0] + s[..., 1, 3])
        obs["pe10_re"] = pe10.real.copy()
        obs["pe10_im"] = pe10.imag.copy()
        return obs
    if isinstance(field_input, CatStateInput):
        sums = s.sum(axis=(-3, -2))
        obs = {
            "x": sums[..., 1].real,
            "y": sums[..., 2].real,
            "z": sums[..., 3].real,
            "norm": sums[..., 0].real,
        }
        n = s.shape[-2]
        for i in range(n):
            for j in range(n):
                pe = 0.5 * (s[..., i, j, 0] + s[..., i, j, 3])
                obs[f"pe{i + 1}{j + 1}_re"] = pe.real.copy()
                obs[f"pe{i + 1}{j + 1}_im"] = pe.imag.copy()
        return obs
    raise TypeError(f"unsupported field input {type(field_input).__name__}")


def me_reference(scenario: Scenario):
    """RK4 master-equation run on the same grid; (observables, purity)."""
    inp = scenario.field_input
    from .operators import SystemTriple
    G = SystemTriple.two_level(scenario.gamma, scenario.omega)
    x0 = initial_state(scenario.initial_bloch, inp)

    def drift(state, t):
        return me_fields(state, inp, t, G).drift

    rec = integrate_ode(drift, x0, scenario.integrator)
    obs = observables_from_states(rec.states, inp)
    pur = purity_series(rec.states, inp)
    return obs, pur, rec


# ---------------------------------------------------------------------------
# ensemble runner


def run_ensemble(scenario: Scenario, chunk_size: int = 256,
                 n_workers: int = 1) -> EnsembleResult:
    """Integrate the scenario's ensemble plus its ME reference.

    Results do not depend on chunk_size or n_workers; trajectories that
    diverge are excluded from the statistics and listed in
    failed_indices.
    """
    prep = _prepare(scenario)
    cfg = scenario.integrator
    inp = scenario.field_input
    n = scenario.n_trajectories
    counting = not prep["homodyne"]

    me_obs, me_pur, _ = me_reference(scenario)
    names = list(me_obs.keys())
    nrec = cfg.n_records

    starts = list(range(0, n, chunk_size))
    jobs = [(s, min(chunk_size, n - s)) for s in starts]

    def work(job):
        start, m = job
        out = _integrate_chunk(prep, start, m)
        obs = observables_from_states(out["states"], inp)
        pur = purity_series(out["states"], inp)
        res = {"obs": obs, "purity": pur, "status": out["status"]}
        if counting:
            res["jump_steps"] = out["jump_steps"]
            res["njumps"] = out["njumps"]
            res["nclamped"] = out["nclamped"]
            res["maxnudt"] = out["maxnudt"]
        return res

    if n_workers > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            chunk_results = list(pool.map(work, jobs))
    else:
        chunk_results = [work(j) for j in jobs]

    sums = {k: np.zeros(nrec) for k in names}
    sqs = {k: np.zeros(nrec) for k in names}
    psum = np.zeros(nrec)
    psq = np.zeros(nrec)
    failed = []
    jump_times = [] if counting else None
    n_clamped = 0
    max_nudt = 0.0
    n_ok = 0
    for (start, m), res in zip(jobs, chunk_results):
        for r in range(m):
            if res["status"][r] >= 0:
                failed.append(start + r)
                continue
            n_ok += 1
            for k in names:
                v = res["obs"][k][r]
                sums[k] += v
                sqs[k] += v * v
            pv = res["purity"][r]
            psum += pv
            psq += pv * pv
            if counting:
                nj = int(res["njumps"][r])
                stored = min(nj, kernels.MAX_RECORDED_JUMPS)
                jump_times.append((res["jump_steps"][r, :stored] + 1)
                                  * cfg.dt)
        if counting:
            n_clamped += int(res["nclamped"].sum())
            max_nudt = max(max_nudt, float(res["maxnudt"].max()))

    if n_ok == 0:
        raise RuntimeError("every trajectory diverged: " + repr(failed))

    def stats(total, total_sq):
        mean = total / n_ok
        if n_ok > 1:
            var = (total_sq - n_ok * mean * mean) / (n_ok - 1)
            var = np.where(var > 0.0, var, 0.0)
            se = np.sqrt(var / n_ok)
        else:
            se = np.zeros_like(mean)
        return mean, se

    mean, se = {}, {}
    for k in names:
        mean[k], se[k] = stats(sums[k], sqs[k])
    purity_mean, purity_se = stats(psum, psq)

    diagnostics = {"backend": kernels.backend_name()}
    if counting:
        diagnostics["n_clamped"] = n_clamped
        diagnostics["max_nudt"] = max_nudt

    result = EnsembleResult(
        scenario=scenario,
        times=cfg.recorded_times(),
        n_trajectories=n_ok,
        mean=mean, se=se, me=me_obs,
        purity_mean=purity_mean, purity_se=purity_se, purity_me=me_pur,
        jump_times=jump_times, failed_indices=failed,
        diagnostics=diagnostics,
    )
    result.metrics = compare_to_me(result)
    return result


def compare_to_me(result: EnsembleResult) -> dict:
    """Sup-norm / RMSE / max |z-score| of ensemble means against the ME.

    The z-score denominator is floored at 2/n: a mean of n variables
    bounded by |v| <= 1 cannot resolve deviations below one trajectory's
    worth of influence (this matters for counting runs, where the sample
    variance collapses to exactly zero once every trajectory has decayed
    while the ME retains an exponentially small tail).
    """
    metrics = {}
    floor = 2.0 / result.n_trajectories
    for k, m in result.mean.items():
        ref = result.me[k]
        dev = m - ref
        se = np.maximum(result.se[k], floor)
        z = dev / se
        metrics[k] = {
            "sup_norm": float(np.max(np.abs(dev))),
            "rmse": float(np.sqrt(np.mean(dev * dev))),
            "max_abs_z": float(np.max(np.abs(z))),
        }
    return metrics


def transient_metrics(result: EnsembleResult, pulse_window=None) -> dict:
    """Excitation transient summary of the ME reference and ensemble mean.

    pulse_window (t0, t1), when given, adds the plateau statistics used by
    the cat scenarios: the minimum of |z + 1| at recorded times inside the
    window.
    """
    t = result.times
    out = {}
    for label, z in (("me", result.me["z"]), ("ensemble", result.mean["z"])):
        exc = 0.5 * (1.0 + z)
        i = int(np.argmax(exc))
        entry = {
            "peak_excitation": float(exc[i]),
            "peak_time": float(t[i]),
            "terminal_z": float(z[-1]),
        }
        if pulse_window is not None:
            t0, t1 = pulse_window
            sel = (t >= t0) & (t <= t1)
            entry["plateau_min_dist_from_ground"] = float(
                np.min(np.abs(z[sel] + 1.0)))
        out[label] = entry
    return out


# ---------------------------------------------------------------------------
# single trajectories


def run_trajectory(scenario: Scenario, index: int = 0) -> TrajectoryRecord:
    """One conditioned trajectory (stream (seed, index)), fully recorded."""
    prep = _prepare(scenario)
    cfg = scenario.integrator
    inp = scenario.field_input
    out = _integrate_chunk(prep, index, 1)
    if out["status"][0] >= 0:
        from .exceptions import DivergenceError
        raise DivergenceError(int(out["status"][0]))
    states = out["states"][0]
    diag = {"backend": kernels.backend_name(),
            "detection": scenario.detection, "trajectory_index": index}
    if not prep["homodyne"]:
        nj = int(out["njumps"][0])
        stored = min(nj, kernels.MAX_RECORDED_JUMPS)
        diag["jump_times"] = (out["jump_steps"][0, :stored] + 1) * cfg.dt
        diag["n_jumps"] = nj
        diag["n_clamped"] = int(out["nclamped"][0])
        diag["max_nudt"] = float(out["maxnudt"][0])
    return TrajectoryRecord(
        times=cfg.recorded_times(),
        states=states,
        innovations=out["innov"][0],
        Y=out["yrec"][0],
        purity=purity_series(states, inp),
        diagnostics=diag,
    )


def run_me_trajectory(scenario: Scenario) -> TrajectoryRecord:
    """The deterministic ME solution, packaged like a trajectory record."""
    _, _, rec = me_reference(scenario)
    rec.purity = purity_series(rec.states, scenario.field_input)
    rec.diagnostics = {"detection": "none (master equation)"}
    return rec
