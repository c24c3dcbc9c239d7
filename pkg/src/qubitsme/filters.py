"""Closed-form drift / diffusion / jump fields of the six qubit filters.

State layouts
-------------
vacuum input        float array (3,)          Bloch components (x, y, z)
single photon       complex array (3, 4)      rows: blocks 11, 10, 00
cat (n branches)    complex array (n, n, 4)   block (i, j) of the branch grid

Block columns are (c, x, y, z) = block applied to (I, sx, sy, sz).  The
01 block of the single-photon filter is carried implicitly as the complex
conjugate of the 10 block.  Cat blocks absorb the branch weights: at t=0
block (i, j) equals s_i* s_j g_ij times (1, x0, y0, z0), so the physical
expectation of an operator is the plain sum over all blocks.

Counting filters are expressed through the jump numerators N(X) and the
compensator nu: between detections the state follows

    ds = (drift + nu*s - N) dt

and a detection replaces the state by N/nu, so that averaging over the
Bernoulli(nu dt) detections restores the drift-only master equation.

All stochastic coefficients are evaluated at the left endpoint of a step
(Ito convention); homodyne gains use the reading K = sqrt(g) x11
+ c01 xi + c10 xi* for the single-photon case and the branch-weighted
diagonal sum for cat inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fields import CatStateInput, SinglePhotonInput, VacuumInput
from .operators import SystemTriple

# block component order
C, X, Y, Z = 0, 1, 2, 3


@dataclass
class FieldDecomposition:
    """Vector fields of one filter evaluated at one state.

    drift is the master-equation (printed) drift.  Homodyne filters carry
    a diffusion array; counting filters carry the compensator rate, the
    post-jump state (None when the state cannot emit) and the effective
    between-jump drift.  rate is Re K_t for homodyne and the clamped
    nonnegative nu_t for counting; rate_raw keeps the unclamped value.
    """

    drift: np.ndarray
    rate: float
    rate_raw: float
    diffusion: np.ndarray | None = None
    jump_post: np.ndarray | None = None
    drift_nojump: np.ndarray | None = None
    jump_numerator: np.ndarray | None = None


def _clamp_rate(raw: float) -> float:
    return raw if raw > 0.0 else 0.0


# ---------------------------------------------------------------------------
# vacuum input


def vacuum_hd_fields(state, G: SystemTriple) -> FieldDecomposition:
    """Homodyne-conditioned Bloch fields for a vacuum-driven system."""
    x, y, z = float(state[0]), float(state[1]), float(state[2])
    g, om = G.gamma, G.omega
    sg = math.sqrt(g)
    hg = 0.5 * g
    drift = np.array([
        -om * y - hg * x,
        om * x - hg * y,
        -g * (1.0 + z),
    ])
    diffusion = np.array([
        sg * (1.0 + z - x * x),
        sg * (-(y * x)),
        sg * (-x - z * x),
    ])
    k = sg * x
    return FieldDecomposition(drift=drift, rate=k, rate_raw=k,
                              diffusion=diffusion)


def vacuum_pd_fields(state, G: SystemTriple) -> FieldDecomposition:
    """Counting-conditioned Bloch fields; a detection resets to (0,0,-1)."""
    x, y, z = float(state[0]), float(state[1]), float(state[2])
    g, om = G.gamma, G.omega
    hg = 0.5 * g
    drift = np.array([
        -om * y - hg * x,
        om * x - hg * y,
        -g * (1.0 + z),
    ])
    numer = np.array([0.0, 0.0, -(hg * (1.0 + z))])
    nu_raw = hg * (1.0 + z)
    nu = _clamp_rate(nu_raw)
    state_arr = np.array([x, y, z])
    drift_nojump = drift + nu * state_arr - numer
    jump_post = np.array([0.0, 0.0, -1.0]) if nu > 0.0 else None
    return FieldDecomposition(drift=drift, rate=nu, rate_raw=nu_raw,
                              jump_post=jump_post, drift_nojump=drift_nojump,
                              jump_numerator=numer)


# ---------------------------------------------------------------------------
# single-photon input


def _photon_drift(state, xi, xis, g, om, sg):
    c11, x11, y11, z11 = state[0]
    c10, x10, y10, z10 = state[1]
    c00, x00, y00, z00 = state[2]
    x01 = x10.conjugate()
    y01 = y10.conjugate()
    z01 = z10.conjugate()
    hg = 0.5 * g
    return np.array([
        [0.0,
         -om * y11 - hg * x11 + sg * (z01 * xis + z10 * xi),
         om * x11 - hg * y11 + sg * (1j * (z10 * xi) - 1j * (z01 * xis)),
         -g * (c11 + z11) - sg * ((x01 - 1j * y01) * xis
                                  + (x10 + 1j * y10) * xi)],
        [0.0,
         -om * y10 - hg * x10 + sg * (z00 * xis),
         om * x10 - hg * y10 - sg * (1j * (z00 * xis)),
         -g * (c10 + z10) - sg * ((x00 - 1j * y00) * xis)],
        [0.0,
         -om * y00 - hg * x00,
         om * x00 - hg * y00,
         -g * (c00 + z00)],
    ], dtype=complex)


def photon_hd_fields(state, xi_t, G: SystemTriple) -> FieldDecomposition:
    """Homodyne-conditioned block fields for a single-photon input."""
    state = np.asarray(state, dtype=complex)
    g, om = G.gamma, G.omega
    sg = math.sqrt(g)
    xi = complex(xi_t)
    xis = xi.conjugate()
    c11, x11, y11, z11 = state[0]
    c10, x10, y10, z10 = state[1]
    c00, x00, y00, z00 = state[2]
    c01 = c10.conjugate()
    x01 = x10.conjugate()
    y01 = y10.conjugate()
    z01 = z10.conjugate()
    k = sg * x11 + c01 * xi + c10 * xis
    drift = _photon_drift(state, xi, xis, g, om, sg)
    diffusion = np.array([
        [sg * x11 + c01 * xis + c10 * xi - c11 * k,
         sg * (c11 + z11) + x01 * xis + x10 * xi - x11 * k,
         y01 * xis + y10 * xi - y11 * k,
         -(sg * x11) + z01 * xis + z10 * xi - z11 * k],
        [sg * x10 + c00 * xis - c10 * k,
         sg * (c10 + z10) + x00 * xis - x10 * k,
         y00 * xis - y10 * k,
         -(sg * x10) + z00 * xis - z10 * k],
        [sg * x00 - c00 * k,
         sg * (c00 + z00) - x00 * k,
         -(y00 * k),
         -(sg * x00) - z00 * k],
    ], dtype=complex)
    return FieldDecomposition(drift=drift, rate=k.real, rate_raw=k.real,
                              diffusion=diffusion)


def photon_pd_fields(state, xi_t, G: SystemTriple) -> FieldDecomposition:
    """Counting-conditioned block fields for a single-photon input."""
    state = np.asarray(state, dtype=complex)
    g, om = G.gamma, G.omega
    sg = math.sqrt(g)
    hg = 0.5 * g
    hsg = 0.5 * sg
    xi = complex(xi_t)
    xis = xi.conjugate()
    a2 = xi.real * xi.real + xi.imag * xi.imag
    c11, x11, y11, z11 = state[0]
    c10, x10, y10, z10 = state[1]
    c00, x00, y00, z00 = state[2]
    c01 = c10.conjugate()
    x01 = x10.conjugate()
    y01 = y10.conjugate()
    z01 = z10.conjugate()
    drift = _photon_drift(state, xi, xis, g, om, sg)
    nu_c = (hg * (c11 + z11)
            + hsg * ((x01 - 1j * y01) * xis + (x10 + 1j * y10) * xi)
            + c00 * a2)
    numer = np.array([
        [nu_c,
         hsg * ((c01 + z01) * xis + (c10 + z10) * xi) + x00 * a2,
         hsg * (1j * ((c10 + z10) * xi) - 1j * ((c01 + z01) * xis)) + y00 * a2,
         -(hg * (c11 + z11))
         - hsg * ((x01 - 1j * y01) * xis + (x10 + 1j * y10) * xi)
         + z00 * a2],
        [hg * (c10 + z10) + hsg * ((x00 - 1j * y00) * xis),
         hsg * ((c00 + z00) * xis),
         -(hsg * (1j * ((c00 + z00) * xis))),
         -(hg * (c10 + z10)) - hsg * ((x00 - 1j * y00) * xis)],
        [hg * (c00 + z00),
         0.0,
         0.0,
         -(hg * (c00 + z00))],
    ], dtype=complex)
    nu_raw = nu_c.real
    nu = _clamp_rate(nu_raw)
    drift_nojump = drift + nu * state - numer
    jump_post = _divide_by_rate(numer, nu) if nu > 0.0 else None
    return FieldDecomposition(drift=drift, rate=nu, rate_raw=nu_raw,
                              drift_nojump=drift_nojump, jump_post=jump_post,
                              jump_numerator=numer)


def _divide_by_rate(numer: np.ndarray, nu: float) -> np.ndarray:
    out = np.empty_like(numer)
    out.real = numer.real / nu
    out.imag = numer.imag / nu
    return out


# ---------------------------------------------------------------------------
# superposition-of-coherent-states input


def _cat_gain(state, alphas, weights, sg):
    """Branch-weighted diagonal correction sum (the homodyne gain K_t)."""
    k = 0.0j
    for l in range(len(alphas)):
        al = complex(alphas[l])
        k = k + weights[l] * (sg * state[l, l, X]
                              + state[l, l, C] * (al + al.conjugate()))
    return k


def cat_hd_fields_at(state, alphas, weights, G: SystemTriple) -> FieldDecomposition:
    """Homodyne cat fields with branch amplitudes already evaluated."""
    state = np.asarray(state, dtype=complex)
    n = state.shape[0]
    g, om = G.gamma, G.omega
    sg = math.sqrt(g)
    hg = 0.5 * g
    k = _cat_gain(state, alphas, weights, sg)
    drift = np.empty((n, n, 4), dtype=complex)
    diffusion = np.empty((n, n, 4), dtype=complex)
    for i in range(n):
        aic = complex(alphas[i]).conjugate()
        for j in range(n):
            aj = complex(alphas[j])
            f = aj + aic
            c, x, y, z = state[i, j]
            drift[i, j, C] = 0.0
            drift[i, j, X] = -om * y - hg * x + sg * (z * (aic + aj))
            drift[i, j, Y] = om * x - hg * y - sg * (1j * (z * (aic - aj)))
            drift[i, j, Z] = (-g * (c + z)
                              - sg * ((x - 1j * y) * aic + (x + 1j * y) * aj))
            diffusion[i, j, C] = sg * x + c * f - c * k
            diffusion[i, j, X] = sg * (c + z) + x * f - x * k
            diffusion[i, j, Y] = y * f - y * k
            diffusion[i, j, Z] = -(sg * x) + z * f - z * k
    return FieldDecomposition(drift=drift, rate=k.real, rate_raw=k.real,
                              diffusion=diffusion)


def cat_pd_fields_at(state, alphas, weights, G: SystemTriple) -> FieldDecomposition:
    """Counting cat fields with branch amplitudes already evaluated."""
    state = np.asarray(state, dtype=complex)
    n = state.shape[0]
    g, om = G.gamma, G.omega
    sg = math.sqrt(g)
    hg = 0.5 * g
    hsg = 0.5 * sg
    m = 0.0j
    for l in range(n):
        al = complex(alphas[l])
        a2l = al.real * al.real + al.imag * al.imag
        cll, xll, yll, zll = state[l, l]
        m = m + weights[l] * (hg * (cll + zll)
                              + hsg * ((xll + 1j * yll) * al
                                       + (xll - 1j * yll) * al.conjugate())
                              + cll * a2l)
    drift = np.empty((n, n, 4), dtype=complex)
    numer = np.empty((n, n, 4), dtype=complex)
    for i in range(n):
        aic = complex(alphas[i]).conjugate()
        for j in range(n):
            aj = complex(alphas[j])
            p = aic * aj
            c, x, y, z = state[i, j]
            drift[i, j, C] = 0.0
            drift[i, j, X] = -om * y - hg * x + sg * (z * (aic + aj))
            drift[i, j, Y] = om * x - hg * y - sg * (1j * (z * (aic - aj)))
            drift[i, j, Z] = (-g * (c + z)
                              - sg * ((x - 1j * y) * aic + (x + 1j * y) * aj))
            emit = hsg * ((x + 1j * y) * aj + (x - 1j * y) * aic)
            numer[i, j, C] = hg * (c + z) + emit + c * p
            numer[i, j, X] = hsg * ((c + z) * (aj + aic)) + x * p
            numer[i, j, Y] = hsg * (1j * ((c + z) * (aj - aic))) + y * p
            numer[i, j, Z] = -(hg * (c + z)) - emit + z * p
    nu_raw = m.real
    nu = _clamp_rate(nu_raw)
    drift_nojump = drift + nu * state - numer
    jump_post = _divide_by_rate(numer, nu) if nu > 0.0 else None
    return FieldDecomposition(drift=drift, rate=nu, rate_raw=nu_raw,
                              drift_nojump=drift_nojump, jump_post=jump_post,
                              jump_numerator=numer)


def cat_hd_fields(state, cat: CatStateInput, t: float, G: SystemTriple):
    return cat_hd_fields_at(state, cat.amplitude_values(t),
                            cat.branch_weights, G)


def cat_pd_fields(state, cat: CatStateInput, t: float, G: SystemTriple):
    return cat_pd_fields_at(state, cat.amplitude_values(t),
                            cat.branch_weights, G)


# ---------------------------------------------------------------------------
# dispatch, initial states, observables


def sme_fields(state, field_input, detection: str, t: float,
               G: SystemTriple) -> FieldDecomposition:
    """Evaluate the filter fields for any input kind and detection."""
    homodyne = detection == "homodyne"
    if isinstance(field_input, VacuumInput):
        fn = vacuum_hd_fields if homodyne else vacuum_pd_fields
        return fn(state, G)
    if isinstance(field_input, SinglePhotonInput):
        xi = field_input.wavepacket(t)
        fn = photon_hd_fields if homodyne else photon_pd_fields
        return fn(state, xi, G)
    if isinstance(field_input, CatStateInput):
        fn = cat_hd_fields if homodyne else cat_pd_fields
        return fn(state, field_input, t, G)
    raise TypeError(f"unsupported field input {type(field_input).__name__}")


def me_fields(state, field_input, t: float, G: SystemTriple) -> FieldDecomposition:
    """Master-equation vector field: the filter drift with all noise removed."""
    d = sme_fields(state, field_input, "homodyne", t, G)
    return FieldDecomposition(drift=d.drift, rate=0.0, rate_raw=0.0)


def initial_state(bloch0, field_input) -> np.ndarray:
    """Filter state for system state bloch0 and the given input."""
    x, y, z = (float(v) for v in bloch0)
    if isinstance(field_input, VacuumInput):
        return np.array([x, y, z])
    if isinstance(field_input, SinglePhotonInput):
        # physical block and vacuum-ancilla block start at the system state,
        # the cross block starts empty
        state = np.zeros((3, 4), dtype=complex)
        state[0] = (1.0, x, y, z)
        state[2] = (1.0, x, y, z)
        return state
    if isinstance(field_input, CatStateInput):
        s = field_input.weights
        g = field_input.overlaps
        base = np.array([1.0, x, y, z], dtype=complex)
        coeff = s.conj()[:, None] * s[None, :] * g
        return coeff[:, :, None] * base[None, None, :]
    raise TypeError(f"unsupported field input {type(field_input).__name__}")


def physical_bloch(state, field_input) -> np.ndarray:
    """Bloch expectations (x, y, z) of the physical (normalized) state."""
    if isinstance(field_input, VacuumInput):
        return np.asarray(state, dtype=float)
    if isinstance(field_input, SinglePhotonInput):
        return np.array([state[0, X].real, state[0, Y].real,
                         state[0, Z].real])
    if isinstance(field_input, CatStateInput):
        sums = state.sum(axis=(0, 1))
        c = sums[C].real
        return np.array([sums[X].real / c, sums[Y].real / c,
                         sums[Z].real / c])
    raise TypeError(f"unsupported field input {type(field_input).__name__}")


def observable_sums(state, field_input) -> np.ndarray:
    """Raw expectations (c, x, y, z) before any normalization."""
    if isinstance(field_input, VacuumInput):
        x, y, z = state
        return np.array([1.0, x, y, z], dtype=complex)
    if isinstance(field_input, SinglePhotonInput):
        return np.asarray(state[0], dtype=complex)
    if isinstance(field_input, CatStateInput):
        return np.asarray(state, dtype=complex).sum(axis=(0, 1))
    raise TypeError(f"unsupported field input {type(field_input).__name__}")
