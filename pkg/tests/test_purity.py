import math

import numpy as np
import pytest

from qubitsme.engine import IntegratorConfig, TrajectoryRecord, integrate_ode
from qubitsme.exceptions import GridMismatchError
from qubitsme.fields import (GaussianWavepacket, SinglePhotonInput,
                             VacuumInput)
from qubitsme.filters import vacuum_hd_fields
from qubitsme.operators import SystemTriple
from qubitsme.purity import (empirical_conditioned_purity, purity_bloch,
                             purity_rate_general_conditioned_hd,
                             purity_rate_general_unconditioned,
                             purity_rate_qubit_hd, purity_rate_qubit_me,
                             purity_series, purity_state)
from qubitsme.validate import random_bloch


def test_purity_bloch_examples():
    assert purity_bloch((0, 0, -1)) == 1.0
    assert purity_bloch((0, 0, 0)) == 0.0
    assert purity_bloch((0.6, 0, 0.8)) == pytest.approx(1.0)


def G(gamma=1.0, omega=0.0):
    return SystemTriple.two_level(gamma, omega)


def test_me_rate_vacuum_fixed_points():
    vac = VacuumInput()
    assert purity_rate_qubit_me((0, 0, -1), vac, G()) == pytest.approx(0.0)
    assert purity_rate_general_unconditioned(np.zeros(3) + [0, 0, -1], vac,
                                             G()) == pytest.approx(0.0)


def test_me_rate_vacuum_excited_state_against_fd_oracle():
    """Both rate routes must equal the finite-differenced purity of the ME.

    The independently integrated ME from the excited state decays as
    z(t) = -1 + 2 exp(-g t), so dP/dt(0) = 2 z z' = -4 g; the quoted
    closed form carries a factor-2 misprint and is implemented corrected.
    """
    vac = VacuumInput()
    sys = G(1.0, 0.0)
    excited = np.array([0.0, 0.0, 1.0])
    # oracle: finite difference of P along the analytic solution
    eps = 1e-6
    z = lambda t: -1.0 + 2.0 * math.exp(-t)
    fd = (z(eps) ** 2 - z(0.0) ** 2) / eps
    assert fd == pytest.approx(-4.0, abs=1e-4)
    assert purity_rate_qubit_me(excited, vac, sys) == pytest.approx(-4.0)
    assert purity_rate_general_unconditioned(excited, vac, sys) == \
        pytest.approx(-4.0)


def test_hd_rate_vacuum_values_against_ito_oracle():
    """Mean conditioned-purity rate from the Ito rule on the filter fields."""
    vac = VacuumInput()
    sys = G(1.0, 0.0)

    def ito_rate(b):
        d = vacuum_hd_fields(np.asarray(b, dtype=float), sys)
        drift_part = 2.0 * float(np.dot(b, d.drift))
        noise_part = float(np.dot(d.diffusion, d.diffusion))
        return drift_part + noise_part

    for b in ([1.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.3, -0.2, 0.5],
              [0.0, 0.0, 1.0]):
        expect = ito_rate(b)
        assert purity_rate_qubit_hd(b, vac, sys) == pytest.approx(
            expect, abs=1e-12)
        assert purity_rate_general_conditioned_hd(np.asarray(b), vac, sys) \
            == pytest.approx(expect, abs=1e-10)
    # pure equator state: exactly zero; fully mixed: rate gamma
    assert purity_rate_qubit_hd((1.0, 0.0, 0.0), vac, sys) == 0.0
    assert purity_rate_qubit_hd((0.0, 0.0, 0.0), vac, sys) == \
        pytest.approx(1.0)


def test_hd_rate_vanishes_on_pure_states():
    """Conditioned vacuum dynamics keep pure states pure."""
    rng = np.random.default_rng(8)
    vac = VacuumInput()
    sys = G(1.7, 2.0)
    for _ in range(50):
        b = random_bloch(rng)
        b = b / np.linalg.norm(b)
        assert abs(purity_rate_qubit_hd(b, vac, sys)) < 1e-13


def test_photon_rate_degenerates_to_vacuum():
    vac = VacuumInput()
    # wavepacket far in the future: xi(0) underflows to zero
    photon = SinglePhotonInput(GaussianWavepacket(2.0, 1e4))
    sys = G(1.0, 1.2)
    rng = np.random.default_rng(9)
    for _ in range(20):
        b = random_bloch(rng)
        s = np.zeros((3, 4), dtype=complex)
        s[0] = (1.0, *b)
        s[2] = (1.0, *b)
        assert purity_rate_qubit_me(s, photon, sys, 0.0) == pytest.approx(
            purity_rate_qubit_me(b, vac, sys), abs=1e-12)
        assert purity_rate_general_conditioned_hd(s, photon, sys, 0.0) == \
            pytest.approx(purity_rate_general_conditioned_hd(b, vac, sys),
                          abs=1e-10)


def test_purity_state_layouts():
    assert purity_state(np.array([0.6, 0.0, 0.8]), VacuumInput()) == \
        pytest.approx(1.0)
    s = np.zeros((3, 4), dtype=complex)
    s[0] = (1.0, 0.6, 0.0, 0.8)
    wp = SinglePhotonInput(GaussianWavepacket(1.5, 3.0))
    assert purity_state(s, wp) == pytest.approx(1.0)


def test_fd_consistency_along_me_trajectory():
    vac = VacuumInput()
    sys = G(1.0, math.pi)
    cfg = IntegratorConfig(dt=1e-3, t_final=5.0, seed=0, record_stride=1)
    rec = integrate_ode(lambda s, t: vacuum_hd_fields(s, sys).drift,
                        np.array([1.0, 0.0, 0.0]), cfg)
    p = purity_series(rec.states, vac)
    fd = (p[2:] - p[:-2]) / (2.0 * cfg.dt)
    rate = np.array([purity_rate_qubit_me(s, vac, sys)
                     for s in rec.states[1:-1]])
    assert np.max(np.abs(fd - rate)) < 5.0 * cfg.dt


def _record(times, purity):
    n = len(times)
    return TrajectoryRecord(times=times, states=np.zeros((n, 3)),
                            innovations=np.zeros(n), Y=np.zeros(n),
                            purity=purity)


def test_empirical_purity_identical_trajectories():
    t = np.linspace(0.0, 1.0, 11)
    recs = [_record(t, np.ones(11)) for _ in range(5)]
    times, mean, se = empirical_conditioned_purity(recs)
    assert np.array_equal(times, t)
    assert np.array_equal(mean, np.ones(11))
    assert np.array_equal(se, np.zeros(11))


def test_empirical_purity_requires_common_grid():
    t = np.linspace(0.0, 1.0, 11)
    recs = [_record(t, np.ones(11)), _record(t + 0.5, np.ones(11))]
    with pytest.raises(GridMismatchError):
        empirical_conditioned_purity(recs)
    with pytest.raises(ValueError):
        empirical_conditioned_purity(recs[:1])


def test_empirical_purity_mean_and_se():
    t = np.linspace(0.0, 1.0, 3)
    recs = [_record(t, np.full(3, v)) for v in (0.4, 0.6)]
    _, mean, se = empirical_conditioned_purity(recs)
    assert np.allclose(mean, 0.5)
    expected_se = np.std([0.4, 0.6], ddof=1) / math.sqrt(2)
    assert np.allclose(se, expected_se)
