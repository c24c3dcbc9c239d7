"""Built-in scenarios reproducing the reference figures.

All registered in code so the validation command needs no files.  The cat
scenarios drive the atom with unit-amplitude pulses on t in [0, 5]: the
symmetric pair (+1, -1) under homodyne detection and the (0, -1) pair
under photon counting.  Figure runs default to 50 trajectories; the
acceptance suite overrides the count.
"""

from __future__ import annotations

from .engine import IntegratorConfig
from .ensemble import Scenario
from .fields import (CatStateInput, GaussianWavepacket, PulseAmplitude,
                     SinglePhotonInput, VacuumInput)

DEFAULT_SEED = 20240817

_SQ2 = 2.0 ** -0.5


def _cat_plus_minus() -> CatStateInput:
    pulse = PulseAmplitude.pulse(0.0, 5.0, 1.0)
    anti = PulseAmplitude.pulse(0.0, 5.0, -1.0)
    return CatStateInput.from_raw((_SQ2, _SQ2), (pulse, anti))


def _cat_zero_minus() -> CatStateInput:
    zero = PulseAmplitude.zero()
    anti = PulseAmplitude.pulse(0.0, 5.0, -1.0)
    return CatStateInput.from_raw((_SQ2, _SQ2), (zero, anti))


def default_wavepacket() -> GaussianWavepacket:
    return GaussianWavepacket(bandwidth=1.5, t_peak=3.0)


def _config(t_final, seed):
    return IntegratorConfig(dt=1e-3, t_final=t_final, seed=seed,
                            record_stride=10)


_BUILDERS = {}


def _register(name):
    def deco(fn):
        _BUILDERS[name] = fn
        return fn
    return deco


@_register("fig2_vacuum_hd")
def _fig2(seed, n):
    return Scenario(name="fig2_vacuum_hd", field_input=VacuumInput(),
                    detection="homodyne", gamma=1.0, omega=3.141592653589793,
                    initial_bloch=(1.0, 0.0, 0.0),
                    integrator=_config(10.0, seed), n_trajectories=n)


@_register("fig3_vacuum_pd")
def _fig3(seed, n):
    return Scenario(name="fig3_vacuum_pd", field_input=VacuumInput(),
                    detection="photon_counting", gamma=1.0,
                    omega=3.141592653589793, initial_bloch=(0.0, 0.0, 1.0),
                    integrator=_config(10.0, seed), n_trajectories=n)


@_register("fig4_photon_hd")
def _fig4_hd(seed, n):
    return Scenario(name="fig4_photon_hd",
                    field_input=SinglePhotonInput(default_wavepacket()),
                    detection="homodyne", gamma=1.0, omega=0.0,
                    initial_bloch=(0.0, 0.0, -1.0),
                    integrator=_config(15.0, seed), n_trajectories=n)


@_register("fig4_photon_pd")
def _fig4_pd(seed, n):
    return Scenario(name="fig4_photon_pd",
                    field_input=SinglePhotonInput(default_wavepacket()),
                    detection="photon_counting", gamma=1.0, omega=0.0,
                    initial_bloch=(0.0, 0.0, -1.0),
                    integrator=_config(15.0, seed), n_trajectories=n)


@_register("fig5_cat_hd")
def _fig5(seed, n):
    return Scenario(name="fig5_cat_hd", field_input=_cat_plus_minus(),
                    detection="homodyne", gamma=1.0, omega=0.0,
                    initial_bloch=(0.0, 0.0, -1.0),
                    integrator=_config(15.0, seed), n_trajectories=n)


@_register("fig6_cat_pd")
def _fig6(seed, n):
    return Scenario(name="fig6_cat_pd", field_input=_cat_zero_minus(),
                    detection="photon_counting", gamma=1.0, omega=0.0,
                    initial_bloch=(0.0, 0.0, -1.0),
                    integrator=_config(15.0, seed), n_trajectories=n)


def builtin_names():
    return sorted(_BUILDERS)


def builtin_scenario(name: str, seed: int | None = None,
                     n_trajectories: int | None = None) -> Scenario:
    """Instantiate a registered scenario, optionally overriding seed / n."""
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise KeyError(f"unknown scenario {name!r}; "
                       f"available: {', '.join(builtin_names())}") from None
    return builder(DEFAULT_SEED if seed is None else seed,
                   50 if n_trajectories is None else n_trajectories)
