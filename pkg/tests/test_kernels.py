"""Backend equivalence: the compiled core and the numpy fallback must
produce bit-identical trajectories, and both must agree with the generic
per-step integrators driving the scalar filter functions."""

import math

import numpy as np
import pytest

from qubitsme import kernels
from qubitsme.engine import (IntegratorConfig, integrate_diffusive,
                             integrate_jump, rng_stream, wiener_increments)
from qubitsme.exceptions import StepTooLargeError
from qubitsme.fields import (CatStateInput, GaussianWavepacket,
                             PulseAmplitude, SinglePhotonInput, VacuumInput)
from qubitsme.filters import initial_state, sme_fields
from qubitsme.kernels import _pyref
from qubitsme.operators import SystemTriple

_core = pytest.importorskip("qubitsme.kernels._core",
                            reason="compiled core not built")

M, NSTEPS, STRIDE = 5, 400, 10
NREC = NSTEPS // STRIDE + 1
DT = 1e-3
GAMMA, OMEGA = 1.3, 2.1
SG = math.sqrt(GAMMA)


def _outs(shape, dtype=float):
    return dict(states=np.empty((M, NREC) + shape, dtype=dtype),
                innov=np.empty((M, NREC)), yrec=np.empty((M, NREC)),
                status=np.full(M, -1, dtype=np.int64))


def _pd_extra():
    return dict(jump_steps=np.full((M, kernels.MAX_RECORDED_JUMPS), -1,
                                   dtype=np.int64),
                njumps=np.zeros(M, dtype=np.int64),
                nclamped=np.zeros(M, dtype=np.int64),
                maxnudt=np.zeros(M))


def _noise(kind, seed=42):
    rng = np.random.default_rng(seed)
    if kind == "dW":
        return rng.standard_normal((M, NSTEPS)) * math.sqrt(DT)
    return rng.random((M, NSTEPS))


def _assert_identical(a, b):
    for key in a:
        assert np.array_equal(a[key], b[key], equal_nan=True), key


def _photon_inputs(scale):
    t = np.arange(NSTEPS) * DT
    xi = np.ascontiguousarray(
        (scale * GaussianWavepacket(1.5, 0.2)(t)).astype(complex))
    return xi, xi.real * xi.real + xi.imag * xi.imag


def _cat_inputs():
    t = np.arange(NSTEPS) * DT
    alpha = np.ascontiguousarray(np.stack([
        np.where(t < 0.3, 6.0 + 0j, 0.0),
        np.where(t < 0.3, -6.0 + 0j, 0.0)]))
    w = np.array([0.5, 0.5])
    return alpha, alpha.real ** 2 + alpha.imag ** 2, w


def _vac0():
    rng = np.random.default_rng(3)
    return np.ascontiguousarray(rng.uniform(-0.5, 0.5, (M, 3)))


def _ph0():
    s = np.zeros((M, 3, 4), dtype=complex)
    s[:, 0] = (1, 0.2, -0.1, -0.5)
    s[:, 2] = (1, 0.2, -0.1, -0.5)
    return np.ascontiguousarray(s)


def _cat0():
    g12 = math.exp(-10.0)
    s = np.zeros((M, 2, 2, 4), dtype=complex)
    for i in range(2):
        for j in range(2):
            c = 0.5 * (g12 if i != j else 1.0)
            s[:, i, j] = (c, 0.0, 0.0, -c)
    return np.ascontiguousarray(s)


CASES = {
    "vacuum_hd": ("vacuum_hd_chunk", _vac0, (3,), float, "dW", ()),
    "vacuum_pd": ("vacuum_pd_chunk", _vac0, (3,), float, "U", ()),
    "photon_hd": ("photon_hd_chunk", _ph0, (3, 4), complex, "dW",
                  ("xi",)),
    "photon_pd": ("photon_pd_chunk", _ph0, (3, 4), complex, "U",
                  ("xi", "xi_abs2")),
    "cat_hd": ("cat_hd_chunk", _cat0, (2, 2, 4), complex, "dW",
               ("alpha", "w")),
    "cat_pd": ("cat_pd_chunk", _cat0, (2, 2, 4), complex, "U",
               ("alpha", "alpha_abs2", "w")),
}


def _field_args(names, counting):
    # a strong pulse exercises jumps in the counting runs; the homodyne
    # Euler map needs a milder one to stay stable at this dt
    xi, xi_abs2 = _photon_inputs(12.0 if counting else 2.0)
    alpha, alpha_abs2, w = _cat_inputs()
    table = {"xi": xi, "xi_abs2": xi_abs2, "alpha": alpha,
             "alpha_abs2": alpha_abs2, "w": w}
    return tuple(table[n] for n in names)


@pytest.mark.parametrize("case", sorted(CASES))
def test_backends_bit_identical(case):
    fn_name, x0_fn, shape, dtype, noise_kind, extra_names = CASES[case]
    x0 = x0_fn()
    noise = _noise(noise_kind)
    counting = noise_kind == "U"
    extra = _field_args(extra_names, counting)
    results = []
    for mod in (_pyref, _core):
        out = _outs(shape, dtype)
        if counting:
            out.update(_pd_extra())
            args = (x0.copy(), GAMMA, SG, OMEGA, DT, STRIDE, *extra, noise,
                    out["states"], out["innov"], out["yrec"], out["status"],
                    out["jump_steps"], out["njumps"], out["nclamped"],
                    out["maxnudt"])
        else:
            args = (x0.copy(), GAMMA, SG, OMEGA, DT, STRIDE, *extra, noise,
                    out["states"], out["innov"], out["yrec"], out["status"])
        getattr(mod, fn_name)(*args)
        results.append(out)
    _assert_identical(results[0], results[1])
    if counting:
        assert results[0]["njumps"].sum() > 0, "jump path not exercised"


def test_counting_backends_raise_on_huge_rate():
    x0 = np.ascontiguousarray(np.tile([0.0, 0.0, 1.0], (M, 1)))
    noise = _noise("U")
    for mod in (_pyref, _core):
        out = _outs((3,))
        out.update(_pd_extra())
        with pytest.raises(StepTooLargeError):
            mod.vacuum_pd_chunk(x0.copy(), 4000.0, math.sqrt(4000.0), 0.0,
                                DT, STRIDE, noise, out["states"],
                                out["innov"], out["yrec"], out["status"],
                                out["jump_steps"], out["njumps"],
                                out["nclamped"], out["maxnudt"])


def test_divergence_status_matches():
    # an absurd time step makes Euler blow up deterministically
    x0 = _vac0()
    noise = _noise("dW")
    statuses = []
    for mod in (_pyref, _core):
        out = _outs((3,))
        mod.vacuum_hd_chunk(x0.copy(), 1e8, 1e4, 0.0, 10.0, STRIDE, noise,
                            out["states"], out["innov"], out["yrec"],
                            out["status"])
        statuses.append(out["status"].copy())
    assert np.array_equal(statuses[0], statuses[1])
    assert np.all(statuses[0] >= 0)


@pytest.mark.parametrize("detection", ["homodyne", "photon_counting"])
@pytest.mark.parametrize("kind", ["vacuum", "photon", "cat"])
def test_kernels_match_generic_engine(kind, detection):
    """Chunk integrators vs the per-step engine on the scalar filters."""
    G = SystemTriple.two_level(GAMMA, OMEGA)
    if kind == "vacuum":
        inp = VacuumInput()
        bloch0 = (0.2, -0.1, 0.3)
    elif kind == "photon":
        inp = SinglePhotonInput(GaussianWavepacket(1.5, 0.2))
        bloch0 = (0.0, 0.0, -1.0)
    else:
        inp = CatStateInput.from_raw(
            (2 ** -0.5, 2 ** -0.5),
            (PulseAmplitude.pulse(0.0, 0.3, 3.0),
             PulseAmplitude.pulse(0.0, 0.3, -3.0)))
        bloch0 = (0.0, 0.0, -1.0)
    x0 = initial_state(bloch0, inp)
    cfg = IntegratorConfig(dt=DT, t_final=NSTEPS * DT, seed=21,
                           record_stride=STRIDE)
    homodyne = detection == "homodyne"
    if homodyne:
        noise = wiener_increments(rng_stream(cfg.seed, 0), DT, NSTEPS)
    else:
        noise = rng_stream(cfg.seed, 0).random(NSTEPS)

    def fields(state, t):
        return sme_fields(state, inp, detection, t, G)

    if homodyne:
        rec = integrate_diffusive(fields, x0, cfg, noise=noise)
    else:
        rec = integrate_jump(fields, x0, cfg, noise=noise)

    from qubitsme.ensemble import Scenario, run_trajectory
    s = Scenario(name="x", field_input=inp, detection=detection,
                 gamma=GAMMA, omega=OMEGA, initial_bloch=bloch0,
                 integrator=cfg, n_trajectories=1)
    krec = run_trajectory(s, index=0)
    assert np.allclose(rec.states, krec.states, rtol=1e-10, atol=1e-12)
    assert np.allclose(rec.Y, krec.Y, rtol=1e-10, atol=1e-12)
    assert np.array_equal(rec.innovations, krec.innovations)
