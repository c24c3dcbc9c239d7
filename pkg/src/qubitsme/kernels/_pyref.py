"""Pure-numpy stepping backend (lockstep across a chunk of trajectories).

This module and the compiled module _core.pyx implement the same chunk
integrators and MUST stay bit-identical: every arithmetic expression here
is transliterated 1:1 into the Cython source (same operands, same
grouping, fields and noise precomputed outside), and the extension is
compiled with FP contraction off.  A test asserts exact equality of the
two backends' outputs.

Chunk conventions: leading axis is the trajectory; noise arrays hold one
column per step (Wiener increments already scaled by sqrt(dt), or
uniforms for the thinned jump decision); `stride` recording includes the
initial state at index 0.  status[i] stays -1 unless trajectory i turned
non-finite, in which case it holds the first recorded step where that was
seen.
"""

from __future__ import annotations

import functools

import numpy as np

from ..exceptions import StepTooLargeError

MAX_RECORDED_JUMPS = 256


def _quiet(fn):
    """Let non-finite values propagate silently, as the compiled core does;
    divergence is reported through the status array, not warnings."""
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        with np.errstate(over="ignore", invalid="ignore"):
            return fn(*args, **kwargs)
    return wrapper


def _record_finite(status, k, *comps):
    ok = None
    for c in comps:
        fc = np.isfinite(c.real)
        if np.iscomplexobj(c):
            fc = fc & np.isfinite(c.imag)
        if fc.ndim > 1:
            fc = fc.all(axis=tuple(range(1, fc.ndim)))
        ok = fc if ok is None else (ok & fc)
    bad = (status < 0) & ~ok
    status[bad] = k


def _store_jumps(jumped, k, jump_steps, njumps):
    for r in np.nonzero(jumped)[0]:
        if njumps[r] < MAX_RECORDED_JUMPS:
            jump_steps[r, njumps[r]] = k
        njumps[r] += 1


@_quiet
def vacuum_hd_chunk(x0, gamma, sg, omega, dt, stride, dW,
                    states, innov, yrec, status):
    m, nsteps = dW.shape
    g, om = gamma, omega
    hg = 0.5 * gamma
    x = x0[:, 0].copy()
    y = x0[:, 1].copy()
    z = x0[:, 2].copy()
    yacc = np.zeros(m)
    winc = np.zeros(m)
    states[:, 0, 0] = x
    states[:, 0, 1] = y
    states[:, 0, 2] = z
    innov[:, 0] = 0.0
    yrec[:, 0] = 0.0
    rec = 1
    for k in range(nsteps):
        dw = dW[:, k]
        K = sg * x
        nx = x + (-om * y - hg * x) * dt + (sg * (1.0 + z - x * x)) * dw
        ny = y + (om * x - hg * y) * dt + (sg * (-(y * x))) * dw
        nz = z + (-g * (1.0 + z)) * dt + (sg * (-x - z * x)) * dw
        yacc = yacc + (K * dt + dw)
        winc = winc + dw
        x, y, z = nx, ny, nz
        if (k + 1) % stride == 0:
            states[:, rec, 0] = x
            states[:, rec, 1] = y
            states[:, rec, 2] = z
            innov[:, rec] = winc
            yrec[:, rec] = yacc
            _record_finite(status, k + 1, x, y, z)
            winc = np.zeros(m)
            rec += 1


@_quiet
def vacuum_pd_chunk(x0, gamma, sg, omega, dt, stride, U,
                    states, innov, yrec, status,
                    jump_steps, njumps, nclamped, maxnudt):
    m, nsteps = U.shape
    g, om = gamma, omega
    hg = 0.5 * gamma
    x = x0[:, 0].copy()
    y = x0[:, 1].copy()
    z = x0[:, 2].copy()
    yacc = np.zeros(m)
    ninc = np.zeros(m)
    states[:, 0, 0] = x
    states[:, 0, 1] = y
    states[:, 0, 2] = z
    innov[:, 0] = 0.0
    yrec[:, 0] = 0.0
    rec = 1
    for k in range(nsteps):
        u = U[:, k]
        ax = -om * y - hg * x
        ay = om * x - hg * y
        az = -g * (1.0 + z)
        nu_raw = hg * (1.0 + z)
        nu = np.where(nu_raw > 0.0, nu_raw, 0.0)
        nclamped += nu_raw < 0.0
        p = nu * dt
        if np.any(p >= 1.0):
            raise StepTooLargeError(f"nu*dt >= 1 at step {k}")
        maxnudt[:] = np.where(p > maxnudt, p, maxnudt)
        jumped = u < p
        numz = -(hg * (1.0 + z))
        nx = x + (ax + nu * x) * dt
        ny = y + (ay + nu * y) * dt
        nz = z + (az + nu * z - numz) * dt
        nx = np.where(jumped, 0.0, nx)
        ny = np.where(jumped, 0.0, ny)
        nz = np.where(jumped, -1.0, nz)
        yacc = np.where(jumped, yacc + 1.0, yacc)
        ninc = np.where(jumped, ninc + 1.0, ninc)
        _store_jumps(jumped, k, jump_steps, njumps)
        x, y, z = nx, ny, nz
        if (k + 1) % stride == 0:
            states[:, rec, 0] = x
            states[:, rec, 1] = y
            states[:, rec, 2] = z
            innov[:, rec] = ninc
            yrec[:, rec] = yacc
            _record_finite(status, k + 1, x, y, z)
            ninc = np.zeros(m)
            rec += 1


def _photon_unpack(x0):
    comps = []
    for b in range(3):
        for q in range(4):
            comps.append(x0[:, b, q].copy())
    return comps


def _photon_store(states, rec, comps):
    i = 0
    for b in range(3):
        for q in range(4):
            states[:, rec, b, q] = comps[i]
            i += 1


@_quiet
def photon_hd_chunk(x0, gamma, sg, omega, dt, stride, xi, dW,
                    states, innov, yrec, status):
    m, nsteps = dW.shape
    g, om = gamma, omega
    hg = 0.5 * gamma
    comps = _photon_unpack(x0)
    (c11, x11, y11, z11, c10, x10, y10, z10, c00, x00, y00, z00) = comps
    yacc = np.zeros(m)
    winc = np.zeros(m)
    _photon_store(states, 0, comps)
    innov[:, 0] = 0.0
    yrec[:, 0] = 0.0
    rec = 1
    for k in range(nsteps):
        dw = dW[:, k]
        f = complex(xi[k])
        fs = f.conjugate()
        c01 = np.conj(c10)
        x01 = np.conj(x10)
        y01 = np.conj(y10)
        z01 = np.conj(z10)
        K = sg * x11 + c01 * f + c10 * fs
        d11x = -om * y11 - hg * x11 + sg * (z01 * fs + z10 * f)
        d11y = om * x11 - hg * y11 + sg * (1j * (z10 * f) - 1j * (z01 * fs))
        d11z = (-g * (c11 + z11)
                - sg * ((x01 - 1j * y01) * fs + (x10 + 1j * y10) * f))
        d10x = -om * y10 - hg * x10 + sg * (z00 * fs)
        d10y = om * x10 - hg * y10 - sg * (1j * (z00 * fs))
        d10z = -g * (c10 + z10) - sg * ((x00 - 1j * y00) * fs)
        d00x = -om * y00 - hg * x00
        d00y = om * x00 - hg * y00
        d00z = -g * (c00 + z00)
        D11c = sg * x11 + c01 * fs + c10 * f - c11 * K
        D11x = sg * (c11 + z11) + x01 * fs + x10 * f - x11 * K
        D11y = y01 * fs + y10 * f - y11 * K
        D11z = -(sg * x11) + z01 * fs + z10 * f - z11 * K
        D10c = sg * x10 + c00 * fs - c10 * K
        D10x = sg * (c10 + z10) + x00 * fs - x10 * K
        D10y = y00 * fs - y10 * K
        D10z = -(sg * x10) + z00 * fs - z10 * K
        D00c = sg * x00 - c00 * K
        D00x = sg * (c00 + z00) - x00 * K
        D00y = -(y00 * K)
        D00z = -(sg * x00) - z00 * K
        c11 = c11 + D11c * dw
        x11 = x11 + d11x * dt + D11x * dw
        y11 = y11 + d11y * dt + D11y * dw
        z11 = z11 + d11z * dt + D11z * dw
        c10 = c10 + D10c * dw
        x10 = x10 + d10x * dt + D10x * dw
        y10 = y10 + d10y * dt + D10y * dw
        z10 = z10 + d10z * dt + D10z * dw
        c00 = c00 + D00c * dw
        x00 = x00 + d00x * dt + D00x * dw
        y00 = y00 + d00y * dt + D00y * dw
        z00 = z00 + d00z * dt + D00z * dw
        yacc = yacc + (K.real * dt + dw)
        winc = winc + dw
        if (k + 1) % stride == 0:
            comps = (c11, x11, y11, z11, c10, x10, y10, z10,
                     c00, x00, y00, z00)
            _photon_store(states, rec, comps)
            innov[:, rec] = winc
            yrec[:, rec] = yacc
            _record_finite(status, k + 1, *comps)
            winc = np.zeros(m)
            rec += 1


@_quiet
def photon_pd_chunk(x0, gamma, sg, omega, dt, stride, xi, xi_abs2, U,
                    states, innov, yrec, status,
                    jump_steps, njumps, nclamped, maxnudt):
    m, nsteps = U.shape
    g, om = gamma, omega
    hg = 0.5 * gamma
    hsg = 0.5 * sg
    comps = _photon_unpack(x0)
    (c11, x11, y11, z11, c10, x10, y10, z10, c00, x00, y00, z00) = comps
    yacc = np.zeros(m)
    ninc = np.zeros(m)
    _photon_store(states, 0, comps)
    innov[:, 0] = 0.0
    yrec[:, 0] = 0.0
    rec = 1
    for k in range(nsteps):
        u = U[:, k]
        f = complex(xi[k])
        fs = f.conjugate()
        a2 = xi_abs2[k]
        c01 = np.conj(c10)
        x01 = np.conj(x10)
        y01 = np.conj(y10)
        z01 = np.conj(z10)
        d11x = -om * y11 - hg * x11 + sg * (z01 * fs + z10 * f)
        d11y = om * x11 - hg * y11 + sg * (1j * (z10 * f) - 1j * (z01 * fs))
        d11z = (-g * (c11 + z11)
                - sg * ((x01 - 1j * y01) * fs + (x10 + 1j * y10) * f))
        d10x = -om * y10 - hg * x10 + sg * (z00 * fs)
        d10y = om * x10 - hg * y10 - sg * (1j * (z00 * fs))
        d10z = -g * (c10 + z10) - sg * ((x00 - 1j * y00) * fs)
        d00x = -om * y00 - hg * x00
        d00y = om * x00 - hg * y00
        d00z = -g * (c00 + z00)
        nu_c = (hg * (c11 + z11)
                + hsg * ((x01 - 1j * y01) * fs + (x10 + 1j * y10) * f)
                + c00 * a2)
        n11c = nu_c
        n11x = hsg * ((c01 + z01) * fs + (c10 + z10) * f) + x00 * a2
        n11y = (hsg * (1j * ((c10 + z10) * f) - 1j * ((c01 + z01) * fs))
                + y00 * a2)
        n11z = (-(hg * (c11 + z11))
                - hsg * ((x01 - 1j * y01) * fs + (x10 + 1j * y10) * f)
                + z00 * a2)
        n10c = hg * (c10 + z10) + hsg * ((x00 - 1j * y00) * fs)
        n10x = hsg * ((c00 + z00) * fs)
        n10y = -(hsg * (1j * ((c00 + z00) * fs)))
        n10z = -(hg * (c10 + z10)) - hsg * ((x00 - 1j * y00) * fs)
        n00c = hg * (c00 + z00)
        n00z = -(hg * (c00 + z00))
        nu_raw = nu_c.real
        nu = np.where(nu_raw > 0.0, nu_raw, 0.0)
        nclamped += nu_raw < 0.0
        p = nu * dt
        if np.any(p >= 1.0):
            raise StepTooLargeError(f"nu*dt >= 1 at step {k}")
        maxnudt[:] = np.where(p > maxnudt, p, maxnudt)
        jumped = u < p
        nu_safe = np.where(jumped, nu, 1.0)
        _store_jumps(jumped, k, jump_steps, njumps)

        def step(s, drift, numer):
            eff = drift + nu * s - numer
            post = numer.real / nu_safe + 1j * (numer.imag / nu_safe)
            return np.where(jumped, post, s + eff * dt)

        zero = np.zeros(m, dtype=complex)
        nc11 = step(c11, zero, n11c)
        nx11 = step(x11, d11x, n11x)
        ny11 = step(y11, d11y, n11y)
        nz11 = step(z11, d11z, n11z)
        nc10 = step(c10, zero, n10c)
        nx10 = step(x10, d10x, n10x)
        ny10 = step(y10, d10y, n10y)
        nz10 = step(z10, d10z, n10z)
        nc00 = step(c00, zero, n00c)
        nx00 = step(x00, d00x, zero)
        ny00 = step(y00, d00y, zero)
        nz00 = step(z00, d00z, n00z)
        c11, x11, y11, z11 = nc11, nx11, ny11, nz11
        c10, x10, y10, z10 = nc10, nx10, ny10, nz10
        c00, x00, y00, z00 = nc00, nx00, ny00, nz00
        yacc = np.where(jumped, yacc + 1.0, yacc)
        ninc = np.where(jumped, ninc + 1.0, ninc)
        if (k + 1) % stride == 0:
            comps = (c11, x11, y11, z11, c10, x10, y10, z10,
                     c00, x00, y00, z00)
            _photon_store(states, rec, comps)
            innov[:, rec] = ninc
            yrec[:, rec] = yacc
            _record_finite(status, k + 1, *comps)
            ninc = np.zeros(m)
            rec += 1


@_quiet
def cat_hd_chunk(x0, gamma, sg, omega, dt, stride, alpha, w, dW,
                 states, innov, yrec, status):
    m, nsteps = dW.shape
    nb = alpha.shape[0]
    g, om = gamma, omega
    hg = 0.5 * gamma
    cc = x0[:, :, :, 0].copy()
    cx = x0[:, :, :, 1].copy()
    cy = x0[:, :, :, 2].copy()
    cz = x0[:, :, :, 3].copy()
    yacc = np.zeros(m)
    winc = np.zeros(m)
    states[:, 0, :, :, 0] = cc
    states[:, 0, :, :, 1] = cx
    states[:, 0, :, :, 2] = cy
    states[:, 0, :, :, 3] = cz
    innov[:, 0] = 0.0
    yrec[:, 0] = 0.0
    rec = 1
    for k in range(nsteps):
        dw = dW[:, k]
        K = np.zeros(m, dtype=complex)
        for l in range(nb):
            al = complex(alpha[l, k])
            K = K + w[l] * (sg * cx[:, l, l]
                            + cc[:, l, l] * (al + al.conjugate()))
        ncc = np.empty_like(cc)
        ncx = np.empty_like(cx)
        ncy = np.empty_like(cy)
        ncz = np.empty_like(cz)
        for i in range(nb):
            aic = complex(alpha[i, k]).conjugate()
            for j in range(nb):
                aj = complex(alpha[j, k])
                fj = aj + aic
                c = cc[:, i, j]
                x = cx[:, i, j]
                y = cy[:, i, j]
                z = cz[:, i, j]
                dx = -om * y - hg * x + sg * (z * (aic + aj))
                dy = om * x - hg * y - sg * (1j * (z * (aic - aj)))
                dz = (-g * (c + z)
                      - sg * ((x - 1j * y) * aic + (x + 1j * y) * aj))
                Dc = sg * x + c * fj - c * K
                Dx = sg * (c + z) + x * fj - x * K
                Dy = y * fj - y * K
                Dz = -(sg * x) + z * fj - z * K
                ncc[:, i, j] = c + Dc * dw
                ncx[:, i, j] = x + dx * dt + Dx * dw
                ncy[:, i, j] = y + dy * dt + Dy * dw
                ncz[:, i, j] = z + dz * dt + Dz * dw
        cc, cx, cy, cz = ncc, ncx, ncy, ncz
        yacc = yacc + (K.real * dt + dw)
        winc = winc + dw
        if (k + 1) % stride == 0:
            states[:, rec, :, :, 0] = cc
            states[:, rec, :, :, 1] = cx
            states[:, rec, :, :, 2] = cy
            states[:, rec, :, :, 3] = cz
            innov[:, rec] = winc
            yrec[:, rec] = yacc
            _record_finite(status, k + 1, cc.reshape(m, -1),
                           cx.reshape(m, -1), cy.reshape(m, -1),
                           cz.reshape(m, -1))
            winc = np.zeros(m)
            rec += 1


@_quiet
def cat_pd_chunk(x0, gamma, sg, omega, dt, stride, alpha, alpha_abs2, w, U,
                 states, innov, yrec, status,
                 jump_steps, njumps, nclamped, maxnudt):
    m, nsteps = U.shape
    nb = alpha.shape[0]
    g, om = gamma, omega
    hg = 0.5 * gamma
    hsg = 0.5 * sg
    cc = x0[:, :, :, 0].copy()
    cx = x0[:, :, :, 1].copy()
    cy = x0[:, :, :, 2].copy()
    cz = x0[:, :, :, 3].copy()
    yacc = np.zeros(m)
    ninc = np.zeros(m)
    states[:, 0, :, :, 0] = cc
    states[:, 0, :, :, 1] = cx
    states[:, 0, :, :, 2] = cy
    states[:, 0, :, :, 3] = cz
    innov[:, 0] = 0.0
    yrec[:, 0] = 0.0
    rec = 1
    for k in range(nsteps):
        u = U[:, k]
        M = np.zeros(m, dtype=complex)
        for l in range(nb):
            al = complex(alpha[l, k])
            a2l = alpha_abs2[l, k]
            M = M + w[l] * (hg * (cc[:, l, l] + cz[:, l, l])
                            + hsg * ((cx[:, l, l] + 1j * cy[:, l, l]) * al
                                     + (cx[:, l, l] - 1j * cy[:, l, l])
                                     * al.conjugate())
                            + cc[:, l, l] * a2l)
        nu_raw = M.real
        nu = np.where(nu_raw > 0.0, nu_raw, 0.0)
        nclamped += nu_raw < 0.0
        p = nu * dt
        if np.any(p >= 1.0):
            raise StepTooLargeError(f"nu*dt >= 1 at step {k}")
        maxnudt[:] = np.where(p > maxnudt, p, maxnudt)
        jumped = u < p
        nu_safe = np.where(jumped, nu, 1.0)
        _store_jumps(jumped, k, jump_steps, njumps)
        ncc = np.empty_like(cc)
        ncx = np.empty_like(cx)
        ncy = np.empty_like(cy)
        ncz = np.empty_like(cz)
        for i in range(nb):
            aic = complex(alpha[i, k]).conjugate()
            for j in range(nb):
                aj = complex(alpha[j, k])
                pij = aic * aj
                c = cc[:, i, j]
                x = cx[:, i, j]
                y = cy[:, i, j]
                z = cz[:, i, j]
                dx = -om * y - hg * x + sg * (z * (aic + aj))
                dy = om * x - hg * y - sg * (1j * (z * (aic - aj)))
                dz = (-g * (c + z)
                      - sg * ((x - 1j * y) * aic + (x + 1j * y) * aj))
                emit = hsg * ((x + 1j * y) * aj + (x - 1j * y) * aic)
                nmc = hg * (c + z) + emit + c * pij
                nmx = hsg * ((c + z) * (aj + aic)) + x * pij
                nmy = hsg * (1j * ((c + z) * (aj - aic))) + y * pij
                nmz = -(hg * (c + z)) - emit + z * pij
                ec = nu * c - nmc
                ex = dx + nu * x - nmx
                ey = dy + nu * y - nmy
                ez = dz + nu * z - nmz
                pc = nmc.real / nu_safe + 1j * (nmc.imag / nu_safe)
                px = nmx.real / nu_safe + 1j * (nmx.imag / nu_safe)
                py = nmy.real / nu_safe + 1j * (nmy.imag / nu_safe)
                pz = nmz.real / nu_safe + 1j * (nmz.imag / nu_safe)
                ncc[:, i, j] = np.where(jumped, pc, c + ec * dt)
                ncx[:, i, j] = np.where(jumped, px, x + ex * dt)
                ncy[:, i, j] = np.where(jumped, py, y + ey * dt)
                ncz[:, i, j] = np.where(jumped, pz, z + ez * dt)
        cc, cx, cy, cz = ncc, ncx, ncy, ncz
        yacc = np.where(jumped, yacc + 1.0, yacc)
        ninc = np.where(jumped, ninc + 1.0, ninc)
        if (k + 1) % stride == 0:
            states[:, rec, :, :, 0] = cc
            states[:, rec, :, :, 1] = cx
            states[:, rec, :, :, 2] = cy
            states[:, rec, :, :, 3] = cz
            innov[:, rec] = ninc
            yrec[:, rec] = yacc
            _record_finite(status, k + 1, cc.reshape(m, -1),
                           cx.reshape(m, -1), cy.reshape(m, -1),
                           cz.reshape(m, -1))
            ninc = np.zeros(m)
            rec += 1
