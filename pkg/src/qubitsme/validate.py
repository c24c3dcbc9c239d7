"""Release checks: oracle equivalences and structural invariants.

Each check compares an independent pair of routes (hand-specialized Bloch
equations vs brute-force operator evaluation, closed-form purity rates vs
trace formulas, degenerations to the vacuum filter) and reports its worst
deviation.  `run_checks` powers the CLI validate command; the acceptance
tests call the same helpers.
"""

from __future__ import annotations

import math

import numpy as np

from . import filters, generic, purity
from .engine import IntegratorConfig, integrate_ode
from .fields import (CatStateInput, GaussianWavepacket, PulseAmplitude,
                     SinglePhotonInput, VacuumInput)
from .operators import (IDENTITY, SIGMA_X, SIGMA_Y, SIGMA_Z, SystemTriple,
                        bloch_to_density, density_to_bloch, pauli)

ORACLE_TOL = 1e-10
N_ORACLE_STATES = 100


# ---------------------------------------------------------------------------
# random physical-ish states


def random_bloch(rng, radius=0.98):
    v = rng.standard_normal(3)
    v /= np.linalg.norm(v)
    return v * radius * rng.uniform() ** (1.0 / 3.0)


def random_photon_state(rng):
    state = np.zeros((3, 4), dtype=complex)
    state[0] = (1.0, *random_bloch(rng))
    c00 = rng.uniform(0.5, 1.5)
    state[2] = (c00, *(c00 * random_bloch(rng)))
    state[1] = 0.4 * (rng.standard_normal(4) + 1j * rng.standard_normal(4))
    return state


def random_cat_state(rng, n=2):
    state = np.zeros((n, n, 4), dtype=complex)
    for i in range(n):
        ci = rng.uniform(0.2, 0.8)
        state[i, i] = (ci, *(ci * random_bloch(rng)))
    for i in range(n):
        for j in range(i + 1, n):
            blk = 0.3 * (rng.standard_normal(4) + 1j * rng.standard_normal(4))
            state[i, j] = blk
            state[j, i] = np.conj(blk)
    return state


def random_system(rng):
    return SystemTriple.two_level(gamma=rng.uniform(0.2, 3.0),
                                  omega=rng.uniform(-4.0, 4.0))


# ---------------------------------------------------------------------------
# decomposition comparison


def _dev(a, b):
    if a is None and b is None:
        return 0.0
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


def decomposition_deviation(closed, brute) -> float:
    """Worst absolute difference between two FieldDecompositions."""
    devs = [_dev(closed.drift, brute.drift),
            abs(closed.rate - brute.rate),
            abs(closed.rate_raw - brute.rate_raw)]
    if closed.diffusion is not None or brute.diffusion is not None:
        devs.append(_dev(closed.diffusion, brute.diffusion))
    if closed.jump_numerator is not None or brute.jump_numerator is not None:
        devs.append(_dev(closed.jump_numerator, brute.jump_numerator))
        devs.append(_dev(closed.drift_nojump, brute.drift_nojump))
        devs.append(_dev(closed.jump_post, brute.jump_post))
    return max(devs)


def _rng(seed):
    return np.random.default_rng(seed)


def specialization_deviation(filter_name: str, n_states: int = N_ORACLE_STATES,
                             seed: int = 7) -> float:
    """Max deviation closed-form vs operator-route over random states."""
    rng = _rng(seed)
    worst = 0.0
    for _ in range(n_states):
        G = random_system(rng)
        if filter_name.startswith("vacuum"):
            s = random_bloch(rng)
            if filter_name == "vacuum_hd":
                pair = (filters.vacuum_hd_fields(s, G),
                        generic.vacuum_hd_generic(s, G))
            else:
                pair = (filters.vacuum_pd_fields(s, G),
                        generic.vacuum_pd_generic(s, G))
        elif filter_name.startswith("photon"):
            s = random_photon_state(rng)
            xi = complex(rng.standard_normal(), rng.standard_normal())
            if filter_name == "photon_hd":
                pair = (filters.photon_hd_fields(s, xi, G),
                        generic.photon_hd_generic(s, xi, G))
            else:
                pair = (filters.photon_pd_fields(s, xi, G),
                        generic.photon_pd_generic(s, xi, G))
        else:
            s = random_cat_state(rng)
            alphas = rng.standard_normal(2) + 1j * rng.standard_normal(2)
            w = rng.uniform(0.2, 0.8, size=2)
            w /= w.sum()
            if filter_name == "cat_hd":
                pair = (filters.cat_hd_fields_at(s, alphas, w, G),
                        generic.cat_hd_generic(s, alphas, w, G))
            else:
                pair = (filters.cat_pd_fields_at(s, alphas, w, G),
                        generic.cat_pd_generic(s, alphas, w, G))
        worst = max(worst, decomposition_deviation(*pair))
    return worst


FILTER_NAMES = ("vacuum_hd", "vacuum_pd", "photon_hd", "photon_pd",
                "cat_hd", "cat_pd")


# ---------------------------------------------------------------------------
# individual checks (name -> (passed, max_dev, detail))


def check_pauli_algebra():
    # sigma_a sigma_b = delta_ab I + i eps_abc sigma_c
    sig = (SIGMA_X, SIGMA_Y, SIGMA_Z)
    levi = {(0, 1): (2, 1), (1, 2): (0, 1), (2, 0): (1, 1),
            (1, 0): (2, -1), (2, 1): (0, -1), (0, 2): (1, -1)}
    worst = 0.0
    for a in range(3):
        for b in range(3):
            expect = np.zeros((2, 2), dtype=complex)
            if a == b:
                expect = IDENTITY.copy()
            else:
                c, s = levi[(a, b)]
                expect = 1j * s * sig[c]
            worst = max(worst, float(np.max(np.abs(sig[a] @ sig[b]
                                                   - expect))))
    return worst <= 1e-15, worst, "sigma_a sigma_b = delta I + i eps sigma"


def check_bloch_roundtrip():
    rng = _rng(11)
    worst = 0.0
    for _ in range(200):
        b = random_bloch(rng)
        b2 = density_to_bloch(bloch_to_density(b))
        worst = max(worst, float(np.max(np.abs(b2 - b))))
    return worst <= 1e-12, worst, "density_to_bloch o bloch_to_density = id"


def check_lindblad_structure():
    rng = _rng(12)
    worst = 0.0
    from .operators import dagger, lindblad_generator
    for _ in range(50):
        G = random_system(rng)
        worst = max(worst, float(np.max(np.abs(
            lindblad_generator(G, IDENTITY)))))
        h = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        h = h + dagger(h)
        lh = lindblad_generator(G, h)
        worst = max(worst, float(np.max(np.abs(lh - dagger(lh)))))
    return worst <= 1e-12, worst, "L(I) = 0 and Hermiticity preserved"


def check_overlap_hermitian():
    rng = _rng(13)
    worst = 0.0
    for _ in range(50):
        def rnd_pulse():
            t0 = rng.uniform(0, 3)
            return PulseAmplitude.pulse(
                t0, t0 + rng.uniform(0.2, 4.0),
                complex(rng.standard_normal(), rng.standard_normal()))
        from .fields import coherent_overlap
        a, b = rnd_pulse(), rnd_pulse()
        gij = coherent_overlap(a, b)
        gji = coherent_overlap(b, a)
        worst = max(worst, abs(gij - gji.conjugate()))
        if abs(gij) > 1.0 + 1e-12:
            return False, abs(gij), "|g_ij| exceeded 1"
        worst = max(worst, abs(coherent_overlap(a, a) - 1.0))
    return worst <= 1e-12, worst, "g_ij = conj(g_ji), g_ii = 1, |g| <= 1"


def check_cat_normalization():
    rng = _rng(14)
    from .fields import normalize_cat_weights, overlap_matrix
    worst = 0.0
    for _ in range(50):
        amps = [PulseAmplitude.pulse(0.0, rng.uniform(0.5, 4.0),
                                     complex(rng.standard_normal(),
                                             rng.standard_normal()))
                for _ in range(2)]
        g = overlap_matrix(amps)
        raw = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        s, _ = normalize_cat_weights(raw, g)
        total = np.einsum("i,ij,j->", s.conj(), g, s)
        worst = max(worst, abs(total - 1.0))
    return worst <= 1e-12, worst, "sum s_i* s_j g_ij = 1 after rescaling"


def _check_specialization(name):
    def run():
        dev = specialization_deviation(name)
        return dev < ORACLE_TOL, dev, f"{name} closed form vs operator route"
    return run


def check_filter_degenerations():
    """Zero-field non-classical filters must reduce to the vacuum filter."""
    rng = _rng(15)
    worst = 0.0
    for _ in range(25):
        G = random_system(rng)
        b = random_bloch(rng)
        vac_hd = filters.vacuum_hd_fields(b, G)
        vac_pd = filters.vacuum_pd_fields(b, G)
        ph = np.zeros((3, 4), dtype=complex)
        ph[0] = (1.0, *b)
        d_hd = filters.photon_hd_fields(ph, 0.0, G)
        worst = max(worst, _dev(d_hd.drift[0, 1:], vac_hd.drift),
                    _dev(d_hd.diffusion[0, 1:], vac_hd.diffusion),
                    abs(d_hd.rate - vac_hd.rate))
        d_pd = filters.photon_pd_fields(ph, 0.0, G)
        worst = max(worst, _dev(d_pd.drift[0, 1:], vac_pd.drift),
                    abs(d_pd.rate - vac_pd.rate))
        if d_pd.jump_post is not None:
            worst = max(worst, _dev(d_pd.jump_post[0, 1:],
                                    vac_pd.jump_post))
        cat = np.zeros((1, 1, 4), dtype=complex)
        cat[0, 0] = (1.0, *b)
        zeros = np.zeros(1, dtype=complex)
        ws = np.ones(1)
        c_hd = filters.cat_hd_fields_at(cat, zeros, ws, G)
        worst = max(worst, _dev(c_hd.drift[0, 0, 1:], vac_hd.drift),
                    _dev(c_hd.diffusion[0, 0, 1:], vac_hd.diffusion),
                    abs(c_hd.rate - vac_hd.rate))
        c_pd = filters.cat_pd_fields_at(cat, zeros, ws, G)
        worst = max(worst, _dev(c_pd.drift[0, 0, 1:], vac_pd.drift),
                    abs(c_pd.rate - vac_pd.rate))
        if c_pd.jump_post is not None:
            worst = max(worst, _dev(c_pd.jump_post[0, 0, 1:],
                                    vac_pd.jump_post))
    return worst <= 1e-12, worst, "zero-field filters equal vacuum filter"


def check_vacuum_fixed_point():
    rng = _rng(16)
    worst = 0.0
    ground = np.array([0.0, 0.0, -1.0])
    for _ in range(20):
        G = random_system(rng)
        hd = filters.vacuum_hd_fields(ground, G)
        pd = filters.vacuum_pd_fields(ground, G)
        worst = max(worst, _dev(hd.drift, 0.0), _dev(hd.diffusion, 0.0),
                    _dev(pd.drift_nojump, 0.0), abs(pd.rate))
    return worst == 0.0, worst, "ground state is an exact fixed point"


def check_normalization_conservation():
    """c11 (photon) and the summed c drift (cat ME) stay put."""
    rng = _rng(17)
    worst = 0.0
    for _ in range(25):
        G = random_system(rng)
        s = random_photon_state(rng)
        xi = rng.standard_normal()  # real pulse shape
        d = filters.photon_hd_fields(s, xi, G)
        worst = max(worst, abs(d.drift[0, 0]), abs(d.diffusion[0, 0]))
        cat = random_cat_state(rng)
        alphas = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        w = rng.uniform(0.2, 0.8, size=2)
        w /= w.sum()
        dc = filters.cat_hd_fields_at(cat, alphas, w, G)
        worst = max(worst, float(np.max(np.abs(dc.drift[:, :, 0]))))
    return worst <= 1e-12, worst, "normalizer has zero drift (and c11 zero " \
                                  "diffusion for real pulses)"


def check_hermitian_symmetry_step():
    """One Euler step keeps cat blocks conjugate-symmetric."""
    rng = _rng(18)
    worst = 0.0
    dt = 1e-3
    for _ in range(25):
        G = random_system(rng)
        s = random_cat_state(rng)
        alphas = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        w = rng.uniform(0.2, 0.8, size=2)
        w /= w.sum()
        for d in (filters.cat_hd_fields_at(s, alphas, w, G),):
            dw = rng.standard_normal() * math.sqrt(dt)
            new = s + d.drift * dt + d.diffusion * dw
            worst = max(worst, float(np.max(np.abs(
                new - np.conj(np.swapaxes(new, 0, 1))))))
    return worst <= 1e-12, worst, "conjugate block symmetry preserved"


def check_purity_me_specialization():
    rng = _rng(19)
    worst = 0.0
    wp = GaussianWavepacket(bandwidth=1.5, t_peak=3.0)
    photon = SinglePhotonInput(wp)
    cat_input = _reference_cat()
    for _ in range(N_ORACLE_STATES):
        G = random_system(rng)
        t = rng.uniform(0.0, 6.0)
        b = random_bloch(rng)
        worst = max(worst, abs(
            purity.purity_rate_general_unconditioned(b, VacuumInput(), G, t)
            - purity.purity_rate_qubit_me(b, VacuumInput(), G, t)))
        ps = random_photon_state(rng)
        worst = max(worst, abs(
            purity.purity_rate_general_unconditioned(ps, photon, G, t)
            - purity.purity_rate_qubit_me(ps, photon, G, t)))
        cs = random_cat_state(rng)
        worst = max(worst, abs(
            purity.purity_rate_general_unconditioned(cs, cat_input, G, t)
            - purity.purity_rate_qubit_me(cs, cat_input, G, t)))
    return worst < ORACLE_TOL, worst, "trace-formula vs Bloch closed form (ME)"


def check_purity_hd_specialization():
    rng = _rng(20)
    worst = 0.0
    cat_input = _reference_cat()
    for _ in range(N_ORACLE_STATES):
        G = random_system(rng)
        t = rng.uniform(0.0, 6.0)
        b = random_bloch(rng)
        worst = max(worst, abs(
            purity.purity_rate_general_conditioned_hd(b, VacuumInput(), G, t)
            - purity.purity_rate_qubit_hd(b, VacuumInput(), G, t)))
        cs = random_cat_state(rng)
        worst = max(worst, abs(
            purity.purity_rate_general_conditioned_hd(cs, cat_input, G, t)
            - purity.purity_rate_qubit_hd(cs, cat_input, G, t)))
    return worst < ORACLE_TOL, worst, \
        "trace-formula vs Bloch closed form (homodyne)"


def check_purity_photon_hd_degeneration():
    """The diagnostic single-photon form must reduce to the vacuum form.

    The literal printed form only closes on the vacuum expression at unit
    coupling, so the check pins gamma = 1 (the regime it is quoted for).
    """
    rng = _rng(21)
    worst = 0.0
    # a wavepacket that has not arrived yet: xi(t) = 0 to double precision
    photon = SinglePhotonInput(GaussianWavepacket(bandwidth=2.0,
                                                  t_peak=1e4))
    for _ in range(50):
        G = SystemTriple.two_level(gamma=1.0, omega=rng.uniform(-4.0, 4.0))
        b = random_bloch(rng)
        ps = np.zeros((3, 4), dtype=complex)
        ps[0] = (1.0, *b)
        ps[2] = (1.0, *b)
        worst = max(worst, abs(
            purity.purity_rate_qubit_hd(ps, photon, G, 0.0)
            - purity.purity_rate_qubit_hd(b, VacuumInput(), G, 0.0)))
    return worst < ORACLE_TOL, worst, "xi -> 0 limit equals vacuum form"


def check_purity_fd_consistency():
    """Centered finite differences of P along the vacuum ME match the rate."""
    G = SystemTriple.two_level(gamma=1.0, omega=3.141592653589793)
    cfg = IntegratorConfig(dt=1e-3, t_final=6.0, seed=0, record_stride=1)
    worst = 0.0
    for start in ((1.0, 0.0, 0.0), (0.0, 0.0, 1.0), (0.3, -0.2, 0.4)):
        rec = integrate_ode(
            lambda s, t: filters.vacuum_hd_fields(s, G).drift,
            np.array(start), cfg)
        p = purity.purity_series(rec.states, VacuumInput())
        fd = (p[2:] - p[:-2]) / (2.0 * cfg.dt)
        rate = np.array([purity.purity_rate_qubit_me(s, VacuumInput(), G)
                         for s in rec.states[1:-1]])
        worst = max(worst, float(np.max(np.abs(fd - rate))))
    return worst < 5.0 * cfg.dt, worst, "d/dt P via finite differences"


def _reference_cat() -> CatStateInput:
    pulse = PulseAmplitude.pulse(0.0, 5.0, 1.0)
    anti = PulseAmplitude.pulse(0.0, 5.0, -1.0)
    return CatStateInput.from_raw((2 ** -0.5, 2 ** -0.5), (pulse, anti))


CHECKS = {
    "pauli-algebra": check_pauli_algebra,
    "bloch-roundtrip": check_bloch_roundtrip,
    "lindblad-structure": check_lindblad_structure,
    "overlap-hermitian": check_overlap_hermitian,
    "cat-normalization": check_cat_normalization,
    **{f"specialization-{n.replace('_', '-')}": _check_specialization(n)
       for n in FILTER_NAMES},
    "filter-degenerations": check_filter_degenerations,
    "vacuum-fixed-point": check_vacuum_fixed_point,
    "normalization-conservation": check_normalization_conservation,
    "hermitian-symmetry-step": check_hermitian_symmetry_step,
    "purity-me-specialization": check_purity_me_specialization,
    "purity-hd-specialization": check_purity_hd_specialization,
    "purity-photon-hd-degeneration": check_purity_photon_hd_degeneration,
    "purity-fd-consistency": check_purity_fd_consistency,
}


def run_checks(names=None):
    """Run the named checks (all by default); list of result dicts."""
    selected = names or list(CHECKS)
    results = []
    for name in selected:
        passed, dev, detail = CHECKS[name]()
        results.append({"name": name, "passed": bool(passed),
                        "max_dev": float(dev), "detail": detail})
    return results
