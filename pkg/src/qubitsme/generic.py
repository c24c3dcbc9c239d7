"""Brute-force operator-level evaluation of the filter equations.

Every function here mirrors one closed-form evaluator in filters.py but
works directly on 2x2 matrices: block states are reassembled into
generalized density operators, each coefficient is a trace of operator
products, and the (c, x, y, z) components are read back off the
(I, sx, sy, sz) basis.  Nothing is hand-simplified, which makes this the
independent cross check for the specialized equations (and deliberately
slower).
"""

from __future__ import annotations

import numpy as np

from .fields import CatStateInput
from .filters import FieldDecomposition, _clamp_rate
from .operators import (IDENTITY, SIGMA_X, SIGMA_Y, SIGMA_Z, SystemTriple,
                        commutator, dagger, lindblad_generator)

BASIS = (IDENTITY, SIGMA_X, SIGMA_Y, SIGMA_Z)


def block_density(comps) -> np.ndarray:
    """Generalized density operator (c I + x sx + y sy + z sz) / 2."""
    c, x, y, z = comps
    return 0.5 * (c * IDENTITY + x * SIGMA_X + y * SIGMA_Y + z * SIGMA_Z)


def _pi(rho: np.ndarray, A: np.ndarray) -> complex:
    """Block functional pi(A) = Tr[A rho]."""
    return complex(np.trace(A @ rho))


def _ops(G: SystemTriple):
    L = G.L
    Ld = dagger(L)
    S = G.S
    Sd = dagger(S)
    return L, Ld, S, Sd


def vacuum_hd_generic(state, G: SystemTriple) -> FieldDecomposition:
    L, Ld, _, _ = _ops(G)
    rho = block_density((1.0, *state))
    k = _pi(rho, L + Ld)
    drift = np.empty(3, dtype=complex)
    diffusion = np.empty(3, dtype=complex)
    for i, Xop in enumerate(BASIS[1:]):
        drift[i] = _pi(rho, lindblad_generator(G, Xop))
        diffusion[i] = _pi(rho, Xop @ L + Ld @ Xop) - k * _pi(rho, Xop)
    return FieldDecomposition(drift=drift, rate=k.real, rate_raw=k.real,
                              diffusion=diffusion)


def vacuum_pd_generic(state, G: SystemTriple) -> FieldDecomposition:
    L, Ld, _, _ = _ops(G)
    rho = block_density((1.0, *state))
    nu = _pi(rho, Ld @ L)
    drift = np.empty(3, dtype=complex)
    numer = np.empty(3, dtype=complex)
    for i, Xop in enumerate(BASIS[1:]):
        drift[i] = _pi(rho, lindblad_generator(G, Xop))
        numer[i] = _pi(rho, Ld @ Xop @ L)
    rate = _clamp_rate(nu.real)
    jump_post = numer / nu if rate > 0.0 else None
    drift_nojump = drift + rate * np.asarray(state, dtype=complex) - numer
    return FieldDecomposition(drift=drift, rate=rate, rate_raw=nu.real,
                              jump_post=jump_post, drift_nojump=drift_nojump,
                              jump_numerator=numer)


def _photon_blocks(state):
    r11 = block_density(state[0])
    r10 = block_density(state[1])
    r00 = block_density(state[2])
    r01 = block_density(np.conj(state[1]))
    return r11, r10, r01, r00


def photon_hd_generic(state, xi_t, G: SystemTriple) -> FieldDecomposition:
    L, Ld, S, Sd = _ops(G)
    xi = complex(xi_t)
    xis = xi.conjugate()
    a2 = abs(xi) ** 2
    r11, r10, r01, r00 = _photon_blocks(state)
    k = _pi(r11, L + Ld) + _pi(r01, S) * xi + _pi(r10, Sd) * xis
    drift = np.empty((3, 4), dtype=complex)
    diffusion = np.empty((3, 4), dtype=complex)
    for q, Xop in enumerate(BASIS):
        lx = lindblad_generator(G, Xop)
        gain = Xop @ L + Ld @ Xop
        drift[0, q] = (_pi(r11, lx)
                       + _pi(r01, Sd @ commutator(Xop, L)) * xis
                       + _pi(r10, commutator(Ld, Xop) @ S) * xi
                       + _pi(r00, Sd @ Xop @ S - Xop) * a2)
        drift[1, q] = _pi(r10, lx) + _pi(r00, Sd @ commutator(Xop, L)) * xis
        drift[2, q] = _pi(r00, lx)
        diffusion[0, q] = (_pi(r11, gain) + _pi(r01, Sd @ Xop) * xis
                           + _pi(r10, Xop @ S) * xi - _pi(r11, Xop) * k)
        diffusion[1, q] = (_pi(r10, gain) + _pi(r00, Sd @ Xop) * xis
                           - _pi(r10, Xop) * k)
        diffusion[2, q] = _pi(r00, gain) - _pi(r00, Xop) * k
    # reorder basis (I, sx, sy, sz) into the (c, x, y, z) column layout
    return FieldDecomposition(drift=drift, rate=k.real, rate_raw=k.real,
                              diffusion=diffusion)


def photon_pd_generic(state, xi_t, G: SystemTriple) -> FieldDecomposition:
    L, Ld, S, Sd = _ops(G)
    xi = complex(xi_t)
    xis = xi.conjugate()
    a2 = abs(xi) ** 2
    r11, r10, r01, r00 = _photon_blocks(state)
    nu = (_pi(r11, Ld @ L) + _pi(r10, Ld @ S) * xi
          + _pi(r01, Sd @ L) * xis + _pi(r00, IDENTITY) * a2)
    drift = np.empty((3, 4), dtype=complex)
    numer = np.empty((3, 4), dtype=complex)
    for q, Xop in enumerate(BASIS):
        lx = lindblad_generator(G, Xop)
        drift[0, q] = (_pi(r11, lx)
                       + _pi(r01, Sd @ commutator(Xop, L)) * xis
                       + _pi(r10, commutator(Ld, Xop) @ S) * xi
                       + _pi(r00, Sd @ Xop @ S - Xop) * a2)
        drift[1, q] = _pi(r10, lx) + _pi(r00, Sd @ commutator(Xop, L)) * xis
        drift[2, q] = _pi(r00, lx)
        numer[0, q] = (_pi(r11, Ld @ Xop @ L) + _pi(r01, Sd @ Xop @ L) * xis
                       + _pi(r10, Ld @ Xop @ S) * xi
                       + _pi(r00, Sd @ Xop @ S) * a2)
        numer[1, q] = _pi(r10, Ld @ Xop @ L) + _pi(r00, Sd @ Xop @ L) * xis
        numer[2, q] = _pi(r00, Ld @ Xop @ L)
    rate = _clamp_rate(nu.real)
    jump_post = numer / nu if rate > 0.0 else None
    drift_nojump = drift + rate * np.asarray(state, dtype=complex) - numer
    return FieldDecomposition(drift=drift, rate=rate, rate_raw=nu.real,
                              jump_post=jump_post, drift_nojump=drift_nojump,
                              jump_numerator=numer)


def _cat_blocks(state):
    n = state.shape[0]
    return [[block_density(state[i, j]) for j in range(n)] for i in range(n)]


def cat_hd_generic(state, alphas, weights, G: SystemTriple) -> FieldDecomposition:
    L, Ld, S, Sd = _ops(G)
    n = state.shape[0]
    rho = _cat_blocks(state)
    k = 0.0j
    for l in range(n):
        al = complex(alphas[l])
        k += weights[l] * _pi(rho[l][l],
                              L + Ld + S * al + Sd * al.conjugate())
    drift = np.empty((n, n, 4), dtype=complex)
    diffusion = np.empty((n, n, 4), dtype=complex)
    for i in range(n):
        aic = complex(alphas[i]).conjugate()
        for j in range(n):
            aj = complex(alphas[j])
            for q, Xop in enumerate(BASIS):
                gx = (lindblad_generator(G, Xop)
                      + Sd @ commutator(Xop, L) * aic
                      + commutator(Ld, Xop) @ S * aj
                      + (Sd @ Xop @ S - Xop) * (aic * aj))
                drift[i, j, q] = _pi(rho[i][j], gx)
                hx = (Xop @ L + Ld @ Xop + Xop @ S * aj + Sd @ Xop * aic)
                diffusion[i, j, q] = (_pi(rho[i][j], hx)
                                      - _pi(rho[i][j], Xop) * k)
    return FieldDecomposition(drift=drift, rate=k.real, rate_raw=k.real,
                              diffusion=diffusion)


def cat_pd_generic(state, alphas, weights, G: SystemTriple) -> FieldDecomposition:
    L, Ld, S, Sd = _ops(G)
    n = state.shape[0]
    rho = _cat_blocks(state)
    m = 0.0j
    for l in range(n):
        al = complex(alphas[l])
        m += weights[l] * _pi(rho[l][l],
                              Ld @ L + Ld @ S * al + Sd @ L * al.conjugate()
                              + IDENTITY * abs(al) ** 2)
    drift = np.empty((n, n, 4), dtype=complex)
    numer = np.empty((n, n, 4), dtype=complex)
    for i in range(n):
        aic = complex(alphas[i]).conjugate()
        for j in range(n):
            aj = complex(alphas[j])
            for q, Xop in enumerate(BASIS):
                gx = (lindblad_generator(G, Xop)
                      + Sd @ commutator(Xop, L) * aic
                      + commutator(Ld, Xop) @ S * aj
                      + (Sd @ Xop @ S - Xop) * (aic * aj))
                drift[i, j, q] = _pi(rho[i][j], gx)
                nx = (Ld @ Xop @ L + Ld @ Xop @ S * aj
                      + Sd @ Xop @ L * aic + Sd @ Xop @ S * (aic * aj))
                numer[i, j, q] = _pi(rho[i][j], nx)
    rate = _clamp_rate(m.real)
    jump_post = numer / m if rate > 0.0 else None
    drift_nojump = drift + rate * np.asarray(state, dtype=complex) - numer
    return FieldDecomposition(drift=drift, rate=rate, rate_raw=m.real,
                              jump_post=jump_post, drift_nojump=drift_nojump,
                              jump_numerator=numer)


def cat_hd_generic_input(state, cat: CatStateInput, t, G: SystemTriple):
    return cat_hd_generic(state, cat.amplitude_values(t),
                          cat.branch_weights, G)


def cat_pd_generic_input(state, cat: CatStateInput, t, G: SystemTriple):
    return cat_pd_generic(state, cat.amplitude_values(t),
                          cat.branch_weights, G)
