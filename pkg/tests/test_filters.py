import math

import numpy as np
import pytest

from qubitsme.fields import (CatStateInput, GaussianWavepacket,
                             PulseAmplitude, SinglePhotonInput, VacuumInput)
from qubitsme.filters import (cat_hd_fields, cat_hd_fields_at, cat_pd_fields,
                              cat_pd_fields_at, initial_state, me_fields,
                              photon_hd_fields, photon_pd_fields,
                              physical_bloch, sme_fields, vacuum_hd_fields,
                              vacuum_pd_fields)
from qubitsme.operators import SystemTriple


def G(gamma=1.0, omega=0.0):
    return SystemTriple.two_level(gamma, omega)


def test_vacuum_hd_ground_is_fixed_point():
    d = vacuum_hd_fields(np.array([0.0, 0.0, -1.0]), G(1.7, 2.3))
    assert np.array_equal(d.drift, np.zeros(3))
    assert np.array_equal(d.diffusion, np.zeros(3))


def test_vacuum_hd_excited_example():
    d = vacuum_hd_fields(np.array([0.0, 0.0, 1.0]), G(1.0, 0.0))
    assert np.allclose(d.drift, [0.0, 0.0, -2.0])
    assert np.allclose(d.diffusion, [2.0, 0.0, 0.0])
    assert d.rate == 0.0


def test_vacuum_hd_gain_example():
    d = vacuum_hd_fields(np.array([0.5, 0.0, 0.0]), G(4.0, 0.0))
    assert d.rate == pytest.approx(1.0)


def test_vacuum_pd_jump_resets_to_ground_exactly():
    for b in ([0.0, 0.0, 1.0], [0.3, -0.4, 0.2]):
        d = vacuum_pd_fields(np.array(b), G(0.7, 1.1))
        assert np.array_equal(d.jump_post, [0.0, 0.0, -1.0])


def test_vacuum_pd_ground_cannot_emit():
    d = vacuum_pd_fields(np.array([0.0, 0.0, -1.0]), G(1.0, 0.0))
    assert d.rate == 0.0
    assert d.jump_post is None
    assert np.array_equal(d.drift_nojump, np.zeros(3))


def test_vacuum_pd_compensator_value():
    # nu = (gamma/2)(1 + z), the rate consistent with pi(L'L)
    d = vacuum_pd_fields(np.array([0.2, 0.1, 0.5]), G(2.0, 0.0))
    assert d.rate == pytest.approx(1.5)


def test_vacuum_pd_excited_state_is_nojump_fixed_point():
    d = vacuum_pd_fields(np.array([0.0, 0.0, 1.0]), G(1.3, 0.9))
    assert np.array_equal(d.drift_nojump, np.zeros(3))


def _photon_state_from_bloch(b):
    s = np.zeros((3, 4), dtype=complex)
    s[0] = (1.0, *b)
    return s


def test_photon_hd_zero_field_reduces_to_vacuum():
    rng = np.random.default_rng(5)
    for _ in range(10):
        b = rng.uniform(-0.5, 0.5, 3)
        s = _photon_state_from_bloch(b)
        d = photon_hd_fields(s, 0.0, G(1.4, 0.6))
        v = vacuum_hd_fields(b, G(1.4, 0.6))
        assert np.allclose(d.drift[0, 1:], v.drift, atol=1e-14)
        assert np.allclose(d.diffusion[0, 1:], v.diffusion, atol=1e-14)
        assert d.rate == pytest.approx(v.rate)


def test_photon_hd_normalization_increment_vanishes():
    # the physical block's c component has zero drift, and zero diffusion
    # for a real pulse shape
    rng = np.random.default_rng(6)
    for _ in range(10):
        s = np.zeros((3, 4), dtype=complex)
        s[0] = (1.0, *rng.uniform(-0.4, 0.4, 3))
        s[2] = (1.0, *rng.uniform(-0.4, 0.4, 3))
        s[1] = rng.standard_normal(4) * 0.2
        d = photon_hd_fields(s, rng.standard_normal(), G(1.0, 2.0))
        assert d.drift[0, 0] == 0.0
        assert abs(d.diffusion[0, 0]) == 0.0


def test_photon_hd_gain_reading():
    s = np.zeros((3, 4), dtype=complex)
    s[0] = (1.0, 0.25, 0.0, -0.5)
    s[1] = (0.3 + 0.1j, 0.0, 0.0, 0.0)
    xi = 0.7 + 0.2j
    d = photon_hd_fields(s, xi, G(4.0, 0.0))
    expect = 2.0 * 0.25 + (0.3 - 0.1j) * xi + (0.3 + 0.1j) * xi.conjugate()
    assert d.rate == pytest.approx(expect.real)


def test_photon_pd_zero_field_reduces_to_vacuum():
    b = np.array([0.1, -0.2, 0.3])
    s = _photon_state_from_bloch(b)
    d = photon_pd_fields(s, 0.0, G(1.2, 0.4))
    v = vacuum_pd_fields(b, G(1.2, 0.4))
    assert np.allclose(d.drift[0, 1:], v.drift, atol=1e-14)
    assert d.rate == pytest.approx(v.rate)
    assert np.allclose(d.jump_post[0, 1:], v.jump_post, atol=1e-14)


def test_photon_pd_field_triggers_detection_from_ground():
    # unexcited atom, photon at its peak: nu = c00 |xi|^2 > 0
    wp = GaussianWavepacket(bandwidth=1.5, t_peak=3.0)
    xi_peak = complex(wp(3.0))
    s = np.zeros((3, 4), dtype=complex)
    s[0] = (1.0, 0.0, 0.0, -1.0)
    s[2] = (1.0, 0.0, 0.0, -1.0)
    d = photon_pd_fields(s, xi_peak, G(1.0, 0.0))
    assert d.rate == pytest.approx(abs(xi_peak) ** 2)
    assert d.rate > 0.0


def test_photon_pd_jump_preserves_c11():
    rng = np.random.default_rng(7)
    s = np.zeros((3, 4), dtype=complex)
    s[0] = (1.0, *rng.uniform(-0.4, 0.4, 3))
    s[2] = (1.0, *rng.uniform(-0.4, 0.4, 3))
    s[1] = 0.2 * (rng.standard_normal(4) + 1j * rng.standard_normal(4))
    d = photon_pd_fields(s, 0.8, G(1.0, 0.0))
    assert d.jump_post[0, 0].real == 1.0


def _cat(branches):
    amps = [PulseAmplitude.pulse(0.0, 5.0, a) if a else PulseAmplitude.zero()
            for a in branches]
    return CatStateInput.from_raw([2 ** -0.5] * len(branches), amps)


def test_cat_single_branch_zero_amp_reduces_to_vacuum():
    b = np.array([0.2, -0.1, 0.4])
    s = np.zeros((1, 1, 4), dtype=complex)
    s[0, 0] = (1.0, *b)
    zero = np.zeros(1, dtype=complex)
    w = np.ones(1)
    d = cat_hd_fields_at(s, zero, w, G(0.9, 1.3))
    v = vacuum_hd_fields(b, G(0.9, 1.3))
    assert np.allclose(d.drift[0, 0, 1:], v.drift, atol=1e-14)
    assert np.allclose(d.diffusion[0, 0, 1:], v.diffusion, atol=1e-14)
    dpd = cat_pd_fields_at(s, zero, w, G(0.9, 1.3))
    vpd = vacuum_pd_fields(b, G(0.9, 1.3))
    assert np.allclose(dpd.drift[0, 0, 1:], vpd.drift, atol=1e-14)
    assert dpd.rate == pytest.approx(vpd.rate)
    assert np.allclose(dpd.jump_post[0, 0, 1:], vpd.jump_post, atol=1e-14)


def test_cat_constant_drive_z_drift():
    # real constant drive alpha = c adds -2 sqrt(g) x c to the z drift
    c = 0.8
    b = np.array([0.3, 0.0, -0.2])
    s = np.zeros((1, 1, 4), dtype=complex)
    s[0, 0] = (1.0, *b)
    d = cat_hd_fields_at(s, np.array([c + 0j]), np.ones(1), G(1.0, 0.0))
    v = vacuum_hd_fields(b, G(1.0, 0.0))
    assert d.drift[0, 0, 3].real == pytest.approx(v.drift[2] - 2.0 * 0.3 * c)


def test_cat_pd_ground_single_branch_rate():
    s = np.zeros((1, 1, 4), dtype=complex)
    s[0, 0] = (1.0, 0.0, 0.0, -1.0)
    d = cat_pd_fields_at(s, np.array([1.0 + 0j]), np.ones(1), G(1.0, 0.0))
    assert d.rate == pytest.approx(1.0)  # = |alpha|^2 c_11


def test_cat_drift_preserves_normalizer():
    cat = _cat([1.0, -1.0])
    s = initial_state((0.0, 0.0, -1.0), cat)
    d = cat_hd_fields(s, cat, 1.0, G(1.0, 0.0))
    assert np.max(np.abs(d.drift[:, :, 0])) == 0.0


def test_cat_hermitian_symmetry_preserved_one_step():
    cat = _cat([1.0, -1.0])
    s = initial_state((0.3, 0.2, -0.8), cat)
    d = cat_hd_fields(s, cat, 1.0, G(1.0, 0.7))
    dt, dw = 1e-3, 0.02
    new = s + d.drift * dt + d.diffusion * dw
    assert np.max(np.abs(new - np.conj(np.swapaxes(new, 0, 1)))) < 1e-12


def test_me_fields_strips_noise():
    inp = VacuumInput()
    d = me_fields(np.array([0.0, 0.0, 1.0]), inp, 0.0, G(1.0, 0.0))
    assert np.allclose(d.drift, [0.0, 0.0, -2.0])
    assert d.diffusion is None and d.jump_post is None


def test_me_vacuum_analytic_solution():
    # dz/dt = -gamma(1+z): from z0 = 1 at gamma = 1, z(ln 2) = 0
    from qubitsme.engine import IntegratorConfig, integrate_ode
    inp = VacuumInput()
    sys = G(1.0, 0.0)
    n = 693  # ln 2 / 1e-3, within one step of ln 2
    cfg = IntegratorConfig(dt=math.log(2.0) / n, t_final=math.log(2.0),
                           seed=0, record_stride=n)
    rec = integrate_ode(lambda s, t: me_fields(s, inp, t, sys).drift,
                        np.array([0.0, 0.0, 1.0]), cfg)
    assert abs(rec.states[-1][2]) < 1e-12


def test_initial_states():
    b = (0.1, -0.2, 0.3)
    assert np.allclose(initial_state(b, VacuumInput()), b)
    wp = SinglePhotonInput(GaussianWavepacket(1.5, 3.0))
    s = initial_state(b, wp)
    assert np.allclose(s[0], (1.0, *b))
    assert np.allclose(s[2], (1.0, *b))
    assert np.array_equal(s[1], np.zeros(4))
    cat = _cat([1.0, -1.0])
    sc = initial_state(b, cat)
    sums = sc.sum(axis=(0, 1))
    # expectation rule: summed blocks reproduce the system state at t = 0
    assert abs(sums[0] - 1.0) < 1e-12
    assert np.allclose([sums[1], sums[2], sums[3]], b, atol=1e-12)
    assert np.allclose(physical_bloch(sc, cat), b, atol=1e-12)


def test_sme_fields_dispatch():
    b = np.array([0.0, 0.0, 0.5])
    d = sme_fields(b, VacuumInput(), "homodyne", 0.0, G(1.0, 0.0))
    assert d.diffusion is not None
    d = sme_fields(b, VacuumInput(), "photon_counting", 0.0, G(1.0, 0.0))
    assert d.drift_nojump is not None
    with pytest.raises(TypeError):
        sme_fields(b, object(), "homodyne", 0.0, G(1.0, 0.0))
