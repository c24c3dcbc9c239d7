"""Time stepping: Euler-Maruyama, Bernoulli-thinned jumps and RK4.

Randomness contract: trajectory i of a run seeded with `seed` draws all of
its noise from numpy's PCG64 initialized with SeedSequence([seed, i])
(exactly what numpy.random.default_rng([seed, i]) builds).  This makes
every trajectory reproducible in isolation and independent of execution
order, worker count or backend.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import (ConfigError, DegenerateJumpError, DivergenceError,
                         StepTooLargeError)

MAX_STEPS = 10 ** 8


@dataclass(frozen=True)
class IntegratorConfig:
    """Fixed-step grid: dt, final time, base seed and recording stride."""

    dt: float = 1e-3
    t_final: float = 10.0
    seed: int = 0
    record_stride: int = 10

    def __post_init__(self):
        if self.dt <= 0 or self.t_final <= 0:
            raise ConfigError("dt and t_final must be positive")
        if self.record_stride < 1:
            raise ConfigError("record_stride must be a positive integer")
        if self.t_final / self.dt > MAX_STEPS:
            raise ConfigError(f"t_final/dt exceeds the {MAX_STEPS:.0e} "
                              "step guard")
        if self.n_steps < 1:
            raise ConfigError("grid has no steps")
        if self.n_steps % self.record_stride != 0:
            raise ConfigError("t_final/dt must be a multiple of record_stride")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_final / self.dt))

    @property
    def n_records(self) -> int:
        return self.n_steps // self.record_stride + 1

    def times(self) -> np.ndarray:
        return np.arange(self.n_steps + 1) * self.dt

    def recorded_times(self) -> np.ndarray:
        return np.arange(self.n_records) * (self.record_stride * self.dt)


def rng_stream(seed: int, index: int) -> np.random.Generator:
    """Independent generator for trajectory `index` of base seed `seed`."""
    return np.random.default_rng([int(seed), int(index)])


def wiener_increment(rng: np.random.Generator, dt: float) -> float:
    """One innovation sample ~ N(0, dt)."""
    return rng.standard_normal() * np.sqrt(dt)


def wiener_increments(rng: np.random.Generator, dt: float, n: int) -> np.ndarray:
    return rng.standard_normal(n) * np.sqrt(dt)


def jump_increment(rng: np.random.Generator, nu: float, dt: float) -> int:
    """Bernoulli-thinned counting increment: 1 with probability nu*dt."""
    if nu < 0:
        raise ValueError("jump intensity must be nonnegative")
    p = nu * dt
    if p >= 1.0:
        raise StepTooLargeError(f"nu*dt = {p} >= 1; reduce the step size")
    return int(rng.random() < p)


@dataclass
class TrajectoryRecord:
    """A recorded trajectory on the stride-subsampled grid.

    innovations[j] is the noise increment accumulated over the j-th
    recording interval (a Wiener sum for homodyne, a count for photon
    detection); Y is the cumulative measurement record at the recorded
    times and purity the state purity there.
    """

    times: np.ndarray
    states: np.ndarray
    innovations: np.ndarray
    Y: np.ndarray
    purity: np.ndarray
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        n = len(self.times)
        for name in ("states", "innovations", "Y", "purity"):
            if len(getattr(self, name)) != n:
                raise ValueError(f"{name} length does not match times")


def _check_finite(state, step):
    if not np.all(np.isfinite(np.asarray(state, dtype=complex).view(float))):
        raise DivergenceError(step)


def _empty_purity(n):
    return np.full(n, np.nan)


def integrate_diffusive(fields, x0, config: IntegratorConfig,
                        rng=None, noise=None, purity_fn=None) -> TrajectoryRecord:
    """Euler-Maruyama for a homodyne filter.

    fields(state, t) must return a FieldDecomposition with drift and
    diffusion; noise (if given) is the per-step Wiener increment array,
    otherwise it is drawn from rng (default: stream (seed, 0)).
    """
    dt = config.dt
    n_steps = config.n_steps
    if noise is None:
        rng = rng or rng_stream(config.seed, 0)
        noise = wiener_increments(rng, dt, n_steps)
    state = np.array(x0, copy=True)
    nrec = config.n_records
    states = np.empty((nrec,) + state.shape, dtype=state.dtype)
    innov = np.zeros(nrec)
    yrec = np.zeros(nrec)
    purity = _empty_purity(nrec)
    states[0] = state
    if purity_fn:
        purity[0] = purity_fn(state)
    y = 0.0
    winc = 0.0
    rec = 1
    for k in range(n_steps):
        d = fields(state, k * dt)
        dw = noise[k]
        state = state + d.drift * dt + d.diffusion * dw
        y = y + (d.rate * dt + dw)
        winc = winc + dw
        if (k + 1) % config.record_stride == 0:
            _check_finite(state, k + 1)
            states[rec] = state
            innov[rec] = winc
            yrec[rec] = y
            if purity_fn:
                purity[rec] = purity_fn(state)
            winc = 0.0
            rec += 1
    return TrajectoryRecord(times=config.recorded_times(), states=states,
                            innovations=innov, Y=yrec, purity=purity)


def integrate_jump(fields, x0, config: IntegratorConfig,
                   rng=None, noise=None, purity_fn=None) -> TrajectoryRecord:
    """Bernoulli-thinned jump integration for a counting filter.

    Per step the between-jump drift is applied, then a detection fires
    with probability nu*dt; on detection the state is replaced by the
    post-jump state of the left endpoint.
    """
    dt = config.dt
    n_steps = config.n_steps
    if noise is None:
        rng = rng or rng_stream(config.seed, 0)
        noise = rng.random(n_steps)
    state = np.array(x0, copy=True)
    nrec = config.n_records
    states = np.empty((nrec,) + state.shape, dtype=state.dtype)
    innov = np.zeros(nrec)
    yrec = np.zeros(nrec)
    purity = _empty_purity(nrec)
    states[0] = state
    if purity_fn:
        purity[0] = purity_fn(state)
    y = 0.0
    ninc = 0.0
    rec = 1
    jump_times = []
    n_clamped = 0
    max_nudt = 0.0
    for k in range(n_steps):
        d = fields(state, k * dt)
        if d.rate_raw < 0.0:
            n_clamped += 1
        p = d.rate * dt
        if p >= 1.0:
            raise StepTooLargeError(f"nu*dt = {p} >= 1 at step {k}")
        max_nudt = max(max_nudt, p)
        if noise[k] < p:
            if d.jump_post is None:
                raise DegenerateJumpError(f"jump drawn at rate {d.rate}")
            state = d.jump_post.copy()
            y = y + 1.0
            ninc = ninc + 1.0
            jump_times.append((k + 1) * dt)
        else:
            state = state + d.drift_nojump * dt
        if (k + 1) % config.record_stride == 0:
            _check_finite(state, k + 1)
            states[rec] = state
            innov[rec] = ninc
            yrec[rec] = y
            if purity_fn:
                purity[rec] = purity_fn(state)
            ninc = 0.0
            rec += 1
    diag = {"jump_times": np.array(jump_times), "n_clamped": n_clamped,
            "max_nudt": max_nudt}
    return TrajectoryRecord(times=config.recorded_times(), states=states,
                            innovations=innov, Y=yrec, purity=purity,
                            diagnostics=diag)


def integrate_ode(drift, x0, config: IntegratorConfig,
                  purity_fn=None) -> TrajectoryRecord:
    """Classical RK4 for a deterministic vector field drift(state, t)."""
    dt = config.dt
    n_steps = config.n_steps
    state = np.array(x0, copy=True)
    if state.dtype == int:
        state = state.astype(float)
    nrec = config.n_records
    states = np.empty((nrec,) + state.shape, dtype=state.dtype)
    purity = _empty_purity(nrec)
    states[0] = state
    if purity_fn:
        purity[0] = purity_fn(state)
    rec = 1
    half = 0.5 * dt
    for k in range(n_steps):
        t = k * dt
        k1 = drift(state, t)
        k2 = drift(state + half * k1, t + half)
        k3 = drift(state + half * k2, t + half)
        k4 = drift(state + dt * k3, t + dt)
        state = state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if (k + 1) % config.record_stride == 0:
            _check_finite(state, k + 1)
            states[rec] = state
            if purity_fn:
                purity[rec] = purity_fn(state)
            rec += 1
    zeros = np.zeros(nrec)
    return TrajectoryRecord(times=config.recorded_times(), states=states,
                            innovations=zeros, Y=zeros.copy(), purity=purity)
