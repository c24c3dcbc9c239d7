"""Closed-form filters against the brute-force operator route.

The operator route evaluates the block equations with explicit 2x2
matrices and traces; agreement over random states is the primary
correctness argument for the hand-specialized equations.
"""

import numpy as np
import pytest

from qubitsme import filters, generic
from qubitsme.validate import (FILTER_NAMES, decomposition_deviation,
                               random_bloch, random_cat_state,
                               random_photon_state, random_system,
                               specialization_deviation)


@pytest.mark.parametrize("name", FILTER_NAMES)
def test_specialization_agrees_with_operator_route(name):
    assert specialization_deviation(name, n_states=40, seed=123) < 1e-10


def test_deviation_detects_an_injected_sign_error(monkeypatch):
    """A wrong sign in the vacuum diffusion must trip the check."""
    original = filters.vacuum_hd_fields

    def broken(state, G):
        d = original(state, G)
        d.diffusion = d.diffusion.copy()
        d.diffusion[2] = -d.diffusion[2]
        return d

    monkeypatch.setattr(filters, "vacuum_hd_fields", broken)
    assert specialization_deviation("vacuum_hd", n_states=10, seed=3) > 1e-3


def test_cat_three_branch_states_also_agree():
    rng = np.random.default_rng(77)
    worst = 0.0
    for _ in range(10):
        G = random_system(rng)
        s = random_cat_state(rng, n=3)
        alphas = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        w = rng.uniform(0.1, 1.0, 3)
        w /= w.sum()
        worst = max(worst, decomposition_deviation(
            filters.cat_hd_fields_at(s, alphas, w, G),
            generic.cat_hd_generic(s, alphas, w, G)))
        worst = max(worst, decomposition_deviation(
            filters.cat_pd_fields_at(s, alphas, w, G),
            generic.cat_pd_generic(s, alphas, w, G)))
    assert worst < 1e-10


def test_generic_vacuum_emission_rate_identity():
    G = random_system(np.random.default_rng(1))
    d = generic.vacuum_pd_generic(np.array([0.0, 0.0, -1.0]), G)
    assert d.rate == 0.0  # ground state emits nothing
    b = random_bloch(np.random.default_rng(2))
    d = generic.vacuum_pd_generic(b, G)
    assert d.rate == pytest.approx(0.5 * G.gamma * (1.0 + b[2]), rel=1e-12)


def test_photon_generic_c11_increment_zero_for_real_pulse():
    rng = np.random.default_rng(9)
    for _ in range(5):
        G = random_system(rng)
        s = random_photon_state(rng)
        d = generic.photon_hd_generic(s, rng.standard_normal(), G)
        assert abs(d.drift[0, 0]) < 1e-14
        assert abs(d.diffusion[0, 0]) < 1e-13
