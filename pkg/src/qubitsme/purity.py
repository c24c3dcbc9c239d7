"""Purity P = 2 Tr[rho^2] - 1 and its closed-form rates.

Two independent routes compute each rate: a matrix route that evaluates
trace formulas on reassembled 2x2 density blocks, and a component route
in Bloch coordinates.  They must agree to 1e-10 and that agreement is one
of the release checks.

Conventions: for the single-photon filter the physical state is block 11;
for cat inputs the physical state is the plain block sum, and trajectory
purity divides by the recorded normalizer (the summed c component), which
equals 1 for master-equation dynamics.  Conditioned rates are the mean
growth rate of the homodyne-filtered purity via the Ito rule; the
counting-detection analogue is deliberately not provided in closed form
and is measured from trajectory ensembles instead
(empirical_conditioned_purity).

The single-photon conditioned closed form is a diagnostic only: its
printed source mixes moduli and squares inconsistently, so it is kept
literal (at the normalization of the vacuum form it degenerates to) and
excluded from cross-route checks away from xi = 0.
"""

from __future__ import annotations

import math

import numpy as np

from .exceptions import GridMismatchError
from .fields import CatStateInput, SinglePhotonInput, VacuumInput
from .filters import C, X, Y, Z, cat_hd_fields_at
from .generic import block_density
from .operators import SystemTriple, commutator, dagger, lindblad_adjoint


def purity_bloch(b) -> float:
    """P of a qubit Bloch vector: x^2 + y^2 + z^2."""
    x, y, z = (float(v) for v in b)
    return x * x + y * y + z * z


def purity_state(state, field_input) -> float:
    """Purity of the physical state carried by any filter-state layout."""
    if isinstance(field_input, VacuumInput):
        return purity_bloch(state)
    if isinstance(field_input, SinglePhotonInput):
        return purity_bloch((state[0, X].real, state[0, Y].real,
                             state[0, Z].real))
    if isinstance(field_input, CatStateInput):
        sums = np.asarray(state).sum(axis=(0, 1))
        c = sums[C].real
        return purity_bloch((sums[X].real / c, sums[Y].real / c,
                             sums[Z].real / c))
    raise TypeError(f"unsupported field input {type(field_input).__name__}")


def purity_series(states_rec, field_input) -> np.ndarray:
    """Vectorized purity over recorded states (time axis last-but-layout)."""
    s = np.asarray(states_rec)
    if isinstance(field_input, VacuumInput):
        return s[..., 0] ** 2 + s[..., 1] ** 2 + s[..., 2] ** 2
    if isinstance(field_input, SinglePhotonInput):
        x = s[..., 0, X].real
        y = s[..., 0, Y].real
        z = s[..., 0, Z].real
        return x * x + y * y + z * z
    if isinstance(field_input, CatStateInput):
        sums = s.sum(axis=(-3, -2))
        c = sums[..., C].real
        x = sums[..., X].real / c
        y = sums[..., Y].real / c
        z = sums[..., Z].real / c
        return x * x + y * y + z * z
    raise TypeError(f"unsupported field input {type(field_input).__name__}")


# ---------------------------------------------------------------------------
# matrix (trace-formula) route


def _photon_density_blocks(state):
    r11 = block_density(state[0])
    r10 = block_density(state[1])
    r01 = block_density(np.conj(state[1]))
    r00 = block_density(state[2])
    return r11, r10, r01, r00


def purity_rate_general_unconditioned(state, field_input, G: SystemTriple,
                                      t: float = 0.0) -> float:
    """dP/dt of the master equation, evaluated as a trace formula."""
    L = G.L
    Ld = dagger(L)
    if isinstance(field_input, VacuumInput):
        rho = block_density((1.0, *state))
        return 4.0 * np.trace(commutator(rho, L) @ rho @ Ld).real
    if isinstance(field_input, SinglePhotonInput):
        # adjoint pairing of the filter drift: the 10 block rides with xi,
        # the 01 block with xi*
        xi = complex(field_input.wavepacket(t))
        r11, r10, r01, _ = _photon_density_blocks(state)
        term = (commutator(r11, L) @ r11 @ Ld
                + commutator(Ld, r11) @ G.S @ r10 * xi
                + commutator(r11, L) @ r01 @ dagger(G.S) * xi.conjugate())
        # the S rho00 S' - rho00 term vanishes for a trivial scattering matrix
        return 4.0 * np.trace(term).real
    if isinstance(field_input, CatStateInput):
        alphas = field_input.amplitude_values(t)
        n = state.shape[0]
        rho_s = np.zeros((2, 2), dtype=complex)
        drift_s = np.zeros((2, 2), dtype=complex)
        for i in range(n):
            for j in range(n):
                rij = block_density(state[i, j])
                rho_s += rij
                aic = complex(alphas[i]).conjugate()
                aj = complex(alphas[j])
                drift_s += (lindblad_adjoint(G, rij)
                            + aic * commutator(L, rij)
                            + aj * commutator(rij, Ld))
        return 4.0 * np.trace(rho_s @ drift_s).real
    raise TypeError(f"unsupported field input {type(field_input).__name__}")


def purity_rate_general_conditioned_hd(state, field_input, G: SystemTriple,
                                       t: float = 0.0) -> float:
    """Mean dP/dt under homodyne conditioning, via the Ito rule on traces."""
    L = G.L
    Ld = dagger(L)
    if isinstance(field_input, VacuumInput):
        rho = block_density((1.0, *state))
        k = np.trace((L + Ld) @ rho)
        meas = L @ rho + rho @ Ld - k * rho
        return (4.0 * np.trace(commutator(rho, L) @ rho @ Ld).real
                + 2.0 * np.trace(meas @ meas).real)
    if isinstance(field_input, SinglePhotonInput):
        xi = complex(field_input.wavepacket(t))
        xis = xi.conjugate()
        S = G.S
        Sd = dagger(S)
        r11, r10, r01, r00 = _photon_density_blocks(state)
        drift11 = (lindblad_adjoint(G, r11)
                   + commutator(L, r01 @ Sd) * xis
                   + commutator(S @ r10, Ld) * xi
                   + (S @ r00 @ Sd - r00) * (xi.real ** 2 + xi.imag ** 2))
        k = (np.trace((L + Ld) @ r11) + np.trace(S @ r01) * xi
             + np.trace(Sd @ r10) * xis)
        meas = (L @ r11 + r11 @ Ld + r01 @ Sd * xis + S @ r10 * xi - k * r11)
        return (4.0 * np.trace(r11 @ drift11).real
                + 2.0 * np.trace(meas @ meas).real)
    if isinstance(field_input, CatStateInput):
        alphas = field_input.amplitude_values(t)
        w = field_input.branch_weights
        n = state.shape[0]
        k = 0.0j
        for l in range(n):
            al = complex(alphas[l])
            rll = block_density(state[l, l])
            k += w[l] * np.trace((L + Ld + G.S * al
                                  + dagger(G.S) * al.conjugate()) @ rll)
        rho_s = np.zeros((2, 2), dtype=complex)
        drift_s = np.zeros((2, 2), dtype=complex)
        meas_s = np.zeros((2, 2), dtype=complex)
        for i in range(n):
            aic = complex(alphas[i]).conjugate()
            for j in range(n):
                aj = complex(alphas[j])
                rij = block_density(state[i, j])
                rho_s += rij
                drift_s += (lindblad_adjoint(G, rij)
                            + aic * commutator(L, rij)
                            + aj * commutator(rij, Ld))
                meas_s += (L @ rij + rij @ Ld + rij * (aj + aic) - k * rij)
        return (4.0 * np.trace(rho_s @ drift_s).real
                + 2.0 * np.trace(meas_s @ meas_s).real)
    raise TypeError(f"unsupported field input {type(field_input).__name__}")


# ---------------------------------------------------------------------------
# component (Bloch closed-form) route


def purity_rate_qubit_me(state, field_input, G: SystemTriple,
                         t: float = 0.0) -> float:
    """Closed-form master-equation purity rate in Bloch components."""
    g = G.gamma
    if isinstance(field_input, VacuumInput):
        x, y, z = (float(v) for v in state)
        p = x * x + y * y + z * z
        return -g * (p + z * z + 2.0 * z)
    if isinstance(field_input, SinglePhotonInput):
        xi = complex(field_input.wavepacket(t))
        sg = math.sqrt(g)
        x11 = state[0, X].real
        y11 = state[0, Y].real
        z11 = state[0, Z].real
        x10, y10, z10 = state[1, X], state[1, Y], state[1, Z]
        p = x11 * x11 + y11 * y11 + z11 * z11
        cohere = ((x11 + 1j * y11) * z10 - (x10 + 1j * y10) * z11) * xi
        return (-g * (p + z11 * z11 + 2.0 * z11)
                + 4.0 * sg * cohere.real)
    if isinstance(field_input, CatStateInput):
        alphas = field_input.amplitude_values(t)
        w = field_input.branch_weights
        d = cat_hd_fields_at(state, alphas, w, G).drift
        sums = np.asarray(state).sum(axis=(0, 1))
        dsums = d.sum(axis=(0, 1))
        return 2.0 * (sums[X].real * dsums[X].real
                      + sums[Y].real * dsums[Y].real
                      + sums[Z].real * dsums[Z].real)
    raise TypeError(f"unsupported field input {type(field_input).__name__}")


def purity_rate_qubit_hd(state, field_input, G: SystemTriple,
                         t: float = 0.0) -> float:
    """Closed-form homodyne-conditioned mean purity rate."""
    g = G.gamma
    if isinstance(field_input, VacuumInput):
        x, y, z = (float(v) for v in state)
        p = x * x + y * y + z * z
        return g * (p - 1.0) * (x * x - 1.0)
    if isinstance(field_input, SinglePhotonInput):
        # literal diagnostic form; trustworthy only in its xi -> 0 limit
        xi = complex(field_input.wavepacket(t))
        sg = math.sqrt(g)
        x11 = state[0, X].real
        y11 = state[0, Y].real
        z11 = state[0, Z].real
        c10, x10, y10, z10 = state[1, C], state[1, X], state[1, Y], state[1, Z]
        c01 = c10.conjugate()
        p = x11 * x11 + y11 * y11 + z11 * z11
        k = (sg * x11 + c01 * xi + c10 * xi.conjugate()).real
        a2 = xi.real * xi.real + xi.imag * xi.imag
        return ((k * k - g) * p
                + g * (1.0 + x11 * x11 - 2.0 * sg * x11 * k)
                + 2.0 * ((x10 * x10 + y10 * y10 + z10 * z10) * xi * xi).real
                + 2.0 * (abs(x10) + abs(y10) + abs(z10)) * a2
                + 2.0 * (sg * x10 - x10 * x11 * k - y10 * y11 * k
                         - z10 * z11 * k + 1j * sg * y11 * z10
                         - 1j * sg * z11 * y10).real)
    if isinstance(field_input, CatStateInput):
        # rate of the block-sum purity 2 Tr[rho_s^2] - 1; the summed
        # normalizer has no drift but does diffuse, hence the dc^2 term
        alphas = field_input.amplitude_values(t)
        w = field_input.branch_weights
        d = cat_hd_fields_at(state, alphas, w, G)
        sums = np.asarray(state).sum(axis=(0, 1))
        dsums = d.drift.sum(axis=(0, 1))
        msums = d.diffusion.sum(axis=(0, 1))
        dc, dx, dy, dz = (msums[C].real, msums[X].real, msums[Y].real,
                          msums[Z].real)
        return (2.0 * (sums[X].real * dsums[X].real
                       + sums[Y].real * dsums[Y].real
                       + sums[Z].real * dsums[Z].real)
                + (dc * dc + dx * dx + dy * dy + dz * dz))
    raise TypeError(f"unsupported field input {type(field_input).__name__}")


# ---------------------------------------------------------------------------
# ensemble purity


def empirical_conditioned_purity(records):
    """Mean and standard error of per-trajectory purity over an ensemble.

    All records must share the time grid; returns (times, mean, se).
    """
    if len(records) < 2:
        raise ValueError("need at least two trajectories")
    times = records[0].times
    for r in records[1:]:
        if len(r.times) != len(times) or not np.array_equal(r.times, times):
            raise GridMismatchError("trajectory records use different grids")
    p = np.stack([r.purity for r in records])
    mean = p.mean(axis=0)
    se = p.std(axis=0, ddof=1) / math.sqrt(p.shape[0])
    return times, mean, se
