# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled stepping backend.

Line-for-line transliteration of _pyref.py: identical operand grouping,
fields and noise precomputed by the caller, no transcendental calls in
the loops.  Together with -ffp-contract=off this keeps the compiled and
pure-python backends bit-identical.
"""

import numpy as np

from ..exceptions import StepTooLargeError

from libc.math cimport isfinite

MAX_RECORDED_JUMPS = 256

cdef int _MAXJ = 256


cdef inline bint _cfin(double complex v) noexcept:
    return isfinite(v.real) and isfinite(v.imag)


def vacuum_hd_chunk(double[:, ::1] x0, double gamma, double sg, double omega,
                    double dt, Py_ssize_t stride, double[:, ::1] dW,
                    double[:, :, ::1] states, double[:, ::1] innov,
                    double[:, ::1] yrec, long long[::1] status):
    cdef Py_ssize_t m = dW.shape[0], nsteps = dW.shape[1]
    cdef double g = gamma, om = omega, hg = 0.5 * gamma
    cdef Py_ssize_t i, k, rec
    cdef double x, y, z, yacc, winc, dw, K, nx, ny, nz
    for i in range(m):
        x = x0[i, 0]
        y = x0[i, 1]
        z = x0[i, 2]
        yacc = 0.0
        winc = 0.0
        states[i, 0, 0] = x
        states[i, 0, 1] = y
        states[i, 0, 2] = z
        innov[i, 0] = 0.0
        yrec[i, 0] = 0.0
        rec = 1
        for k in range(nsteps):
            dw = dW[i, k]
            K = sg * x
            nx = x + (-om * y - hg * x) * dt + (sg * (1.0 + z - x * x)) * dw
            ny = y + (om * x - hg * y) * dt + (sg * (-(y * x))) * dw
            nz = z + (-g * (1.0 + z)) * dt + (sg * (-x - z * x)) * dw
            yacc = yacc + (K * dt + dw)
            winc = winc + dw
            x = nx
            y = ny
            z = nz
            if (k + 1) % stride == 0:
                states[i, rec, 0] = x
                states[i, rec, 1] = y
                states[i, rec, 2] = z
                innov[i, rec] = winc
                yrec[i, rec] = yacc
                if status[i] < 0 and not (isfinite(x) and isfinite(y)
                                          and isfinite(z)):
                    status[i] = k + 1
                winc = 0.0
                rec += 1


def vacuum_pd_chunk(double[:, ::1] x0, double gamma, double sg, double omega,
                    double dt, Py_ssize_t stride, double[:, ::1] U,
                    double[:, :, ::1] states, double[:, ::1] innov,
                    double[:, ::1] yrec, long long[::1] status,
                    long long[:, ::1] jump_steps, long long[::1] njumps,
                    long long[::1] nclamped, double[::1] maxnudt):
    cdef Py_ssize_t m = U.shape[0], nsteps = U.shape[1]
    cdef double g = gamma, om = omega, hg = 0.5 * gamma
    cdef Py_ssize_t i, k, rec
    cdef double x, y, z, yacc, ninc, u, ax, ay, az
    cdef double nu_raw, nu, p, numz, nx, ny, nz
    for i in range(m):
        x = x0[i, 0]
        y = x0[i, 1]
        z = x0[i, 2]
        yacc = 0.0
        ninc = 0.0
        states[i, 0, 0] = x
        states[i, 0, 1] = y
        states[i, 0, 2] = z
        innov[i, 0] = 0.0
        yrec[i, 0] = 0.0
        rec = 1
        for k in range(nsteps):
            u = U[i, k]
            ax = -om * y - hg * x
            ay = om * x - hg * y
            az = -g * (1.0 + z)
            nu_raw = hg * (1.0 + z)
            nu = nu_raw if nu_raw > 0.0 else 0.0
            if nu_raw < 0.0:
                nclamped[i] += 1
            p = nu * dt
            if p >= 1.0:
                raise StepTooLargeError(f"nu*dt >= 1 at step {k}")
            if p > maxnudt[i]:
                maxnudt[i] = p
            numz = -(hg * (1.0 + z))
            nx = x + (ax + nu * x) * dt
            ny = y + (ay + nu * y) * dt
            nz = z + (az + nu * z - numz) * dt
            if u < p:
                nx = 0.0
                ny = 0.0
                nz = -1.0
                yacc = yacc + 1.0
                ninc = ninc + 1.0
                if njumps[i] < _MAXJ:
                    jump_steps[i, njumps[i]] = k
                njumps[i] += 1
            x = nx
            y = ny
            z = nz
            if (k + 1) % stride == 0:
                states[i, rec, 0] = x
                states[i, rec, 1] = y
                states[i, rec, 2] = z
                innov[i, rec] = ninc
                yrec[i, rec] = yacc
                if status[i] < 0 and not (isfinite(x) and isfinite(y)
                                          and isfinite(z)):
                    status[i] = k + 1
                ninc = 0.0
                rec += 1


def photon_hd_chunk(double complex[:, :, ::1] x0, double gamma, double sg,
                    double omega, double dt, Py_ssize_t stride,
                    double complex[::1] xi, double[:, ::1] dW,
                    double complex[:, :, :, ::1] states, double[:, ::1] innov,
                    double[:, ::1] yrec, long long[::1] status):
    cdef Py_ssize_t m = dW.shape[0], nsteps = dW.shape[1]
    cdef double g = gamma, om = omega, hg = 0.5 * gamma
    cdef Py_ssize_t i, k, rec
    cdef double yacc, winc, dw
    cdef double complex f, fs, K
    cdef double complex c11, x11, y11, z11, c10, x10, y10, z10
    cdef double complex c00, x00, y00, z00
    cdef double complex c01, x01, y01, z01
    cdef double complex d11x, d11y, d11z, d10x, d10y, d10z
    cdef double complex d00x, d00y, d00z
    cdef double complex D11c, D11x, D11y, D11z, D10c, D10x, D10y, D10z
    cdef double complex D00c, D00x, D00y, D00z
    cdef bint fin
    for i in range(m):
        c11 = x0[i, 0, 0]
        x11 = x0[i, 0, 1]
        y11 = x0[i, 0, 2]
        z11 = x0[i, 0, 3]
        c10 = x0[i, 1, 0]
        x10 = x0[i, 1, 1]
        y10 = x0[i, 1, 2]
        z10 = x0[i, 1, 3]
        c00 = x0[i, 2, 0]
        x00 = x0[i, 2, 1]
        y00 = x0[i, 2, 2]
        z00 = x0[i, 2, 3]
        yacc = 0.0
        winc = 0.0
        states[i, 0, 0, 0] = c11
        states[i, 0, 0, 1] = x11
        states[i, 0, 0, 2] = y11
        states[i, 0, 0, 3] = z11
        states[i, 0, 1, 0] = c10
        states[i, 0, 1, 1] = x10
        states[i, 0, 1, 2] = y10
        states[i, 0, 1, 3] = z10
        states[i, 0, 2, 0] = c00
        states[i, 0, 2, 1] = x00
        states[i, 0, 2, 2] = y00
        states[i, 0, 2, 3] = z00
        innov[i, 0] = 0.0
        yrec[i, 0] = 0.0
        rec = 1
        for k in range(nsteps):
            dw = dW[i, k]
            f = xi[k]
            fs = f.conjugate()
            c01 = c10.conjugate()
            x01 = x10.conjugate()
            y01 = y10.conjugate()
            z01 = z10.conjugate()
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
                states[i, rec, 0, 0] = c11
                states[i, rec, 0, 1] = x11
                states[i, rec, 0, 2] = y11
                states[i, rec, 0, 3] = z11
                states[i, rec, 1, 0] = c10
                states[i, rec, 1, 1] = x10
                states[i, rec, 1, 2] = y10
                states[i, rec, 1, 3] = z10
                states[i, rec, 2, 0] = c00
                states[i, rec, 2, 1] = x00
                states[i, rec, 2, 2] = y00
                states[i, rec, 2, 3] = z00
                innov[i, rec] = winc
                yrec[i, rec] = yacc
                if status[i] < 0:
                    fin = (_cfin(c11) and _cfin(x11) and _cfin(y11)
                           and _cfin(z11) and _cfin(c10) and _cfin(x10)
                           and _cfin(y10) and _cfin(z10) and _cfin(c00)
                           and _cfin(x00) and _cfin(y00) and _cfin(z00))
                    if not fin:
                        status[i] = k + 1
                winc = 0.0
                rec += 1


def photon_pd_chunk(double complex[:, :, ::1] x0, double gamma, double sg,
                    double omega, double dt, Py_ssize_t stride,
                    double complex[::1] xi, double[::1] xi_abs2,
                    double[:, ::1] U,
                    double complex[:, :, :, ::1] states, double[:, ::1] innov,
                    double[:, ::1] yrec, long long[::1] status,
                    long long[:, ::1] jump_steps, long long[::1] njumps,
                    long long[::1] nclamped, double[::1] maxnudt):
    cdef Py_ssize_t m = U.shape[0], nsteps = U.shape[1]
    cdef double g = gamma, om = omega, hg = 0.5 * gamma, hsg = 0.5 * sg
    cdef Py_ssize_t i, k, rec
    cdef double yacc, ninc, u, a2, nu_raw, nu, p
    cdef double complex f, fs, nu_c
    cdef double complex c11, x11, y11, z11, c10, x10, y10, z10
    cdef double complex c00, x00, y00, z00
    cdef double complex c01, x01, y01, z01
    cdef double complex d11x, d11y, d11z, d10x, d10y, d10z
    cdef double complex d00x, d00y, d00z
    cdef double complex n11c, n11x, n11y, n11z, n10c, n10x, n10y, n10z
    cdef double complex n00c, n00z
    cdef double complex nc11, nx11, ny11, nz11, nc10, nx10, ny10, nz10
    cdef double complex nc00, nx00, ny00, nz00
    cdef bint fin, jumped
    for i in range(m):
        c11 = x0[i, 0, 0]
        x11 = x0[i, 0, 1]
        y11 = x0[i, 0, 2]
        z11 = x0[i, 0, 3]
        c10 = x0[i, 1, 0]
        x10 = x0[i, 1, 1]
        y10 = x0[i, 1, 2]
        z10 = x0[i, 1, 3]
        c00 = x0[i, 2, 0]
        x00 = x0[i, 2, 1]
        y00 = x0[i, 2, 2]
        z00 = x0[i, 2, 3]
        yacc = 0.0
        ninc = 0.0
        states[i, 0, 0, 0] = c11
        states[i, 0, 0, 1] = x11
        states[i, 0, 0, 2] = y11
        states[i, 0, 0, 3] = z11
        states[i, 0, 1, 0] = c10
        states[i, 0, 1, 1] = x10
        states[i, 0, 1, 2] = y10
        states[i, 0, 1, 3] = z10
        states[i, 0, 2, 0] = c00
        states[i, 0, 2, 1] = x00
        states[i, 0, 2, 2] = y00
        states[i, 0, 2, 3] = z00
        innov[i, 0] = 0.0
        yrec[i, 0] = 0.0
        rec = 1
        for k in range(nsteps):
            u = U[i, k]
            f = xi[k]
            fs = f.conjugate()
            a2 = xi_abs2[k]
            c01 = c10.conjugate()
            x01 = x10.conjugate()
            y01 = y10.conjugate()
            z01 = z10.conjugate()
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
            nu = nu_raw if nu_raw > 0.0 else 0.0
            if nu_raw < 0.0:
                nclamped[i] += 1
            p = nu * dt
            if p >= 1.0:
                raise StepTooLargeError(f"nu*dt >= 1 at step {k}")
            if p > maxnudt[i]:
                maxnudt[i] = p
            jumped = u < p
            if jumped:
                if njumps[i] < _MAXJ:
                    jump_steps[i, njumps[i]] = k
                njumps[i] += 1
                nc11 = n11c.real / nu + 1j * (n11c.imag / nu)
                nx11 = n11x.real / nu + 1j * (n11x.imag / nu)
                ny11 = n11y.real / nu + 1j * (n11y.imag / nu)
                nz11 = n11z.real / nu + 1j * (n11z.imag / nu)
                nc10 = n10c.real / nu + 1j * (n10c.imag / nu)
                nx10 = n10x.real / nu + 1j * (n10x.imag / nu)
                ny10 = n10y.real / nu + 1j * (n10y.imag / nu)
                nz10 = n10z.real / nu + 1j * (n10z.imag / nu)
                nc00 = n00c.real / nu + 1j * (n00c.imag / nu)
                nx00 = 0.0
                ny00 = 0.0
                nz00 = n00z.real / nu + 1j * (n00z.imag / nu)
                yacc = yacc + 1.0
                ninc = ninc + 1.0
            else:
                nc11 = c11 + (nu * c11 - n11c) * dt
                nx11 = x11 + (d11x + nu * x11 - n11x) * dt
                ny11 = y11 + (d11y + nu * y11 - n11y) * dt
                nz11 = z11 + (d11z + nu * z11 - n11z) * dt
                nc10 = c10 + (nu * c10 - n10c) * dt
                nx10 = x10 + (d10x + nu * x10 - n10x) * dt
                ny10 = y10 + (d10y + nu * y10 - n10y) * dt
                nz10 = z10 + (d10z + nu * z10 - n10z) * dt
                nc00 = c00 + (nu * c00 - n00c) * dt
                nx00 = x00 + (d00x + nu * x00 - 0.0) * dt
                ny00 = y00 + (d00y + nu * y00 - 0.0) * dt
                nz00 = z00 + (d00z + nu * z00 - n00z) * dt
            c11 = nc11
            x11 = nx11
            y11 = ny11
            z11 = nz11
            c10 = nc10
            x10 = nx10
            y10 = ny10
            z10 = nz10
            c00 = nc00
            x00 = nx00
            y00 = ny00
            z00 = nz00
            if (k + 1) % stride == 0:
                states[i, rec, 0, 0] = c11
                states[i, rec, 0, 1] = x11
                states[i, rec, 0, 2] = y11
                states[i, rec, 0, 3] = z11
                states[i, rec, 1, 0] = c10
                states[i, rec, 1, 1] = x10
                states[i, rec, 1, 2] = y10
                states[i, rec, 1, 3] = z10
                states[i, rec, 2, 0] = c00
                states[i, rec, 2, 1] = x00
                states[i, rec, 2, 2] = y00
                states[i, rec, 2, 3] = z00
                innov[i, rec] = ninc
                yrec[i, rec] = yacc
                if status[i] < 0:
                    fin = (_cfin(c11) and _cfin(x11) and _cfin(y11)
                           and _cfin(z11) and _cfin(c10) and _cfin(x10)
                           and _cfin(y10) and _cfin(z10) and _cfin(c00)
                           and _cfin(x00) and _cfin(y00) and _cfin(z00))
                    if not fin:
                        status[i] = k + 1
                ninc = 0.0
                rec += 1


def cat_hd_chunk(double complex[:, :, :, ::1] x0, double gamma, double sg,
                 double omega, double dt, Py_ssize_t stride,
                 double complex[:, ::1] alpha, double[::1] w,
                 double[:, ::1] dW,
                 double complex[:, :, :, :, ::1] states, double[:, ::1] innov,
                 double[:, ::1] yrec, long long[::1] status):
    cdef Py_ssize_t m = dW.shape[0], nsteps = dW.shape[1]
    cdef Py_ssize_t nb = alpha.shape[0]
    cdef double g = gamma, om = omega, hg = 0.5 * gamma
    cdef Py_ssize_t i, k, rec, l, bi, bj, q
    cdef double yacc, winc, dw
    cdef double complex K, al, aic, aj, fj, c, x, y, z, dx, dy, dz
    cdef double complex Dc, Dx, Dy, Dz
    cdef bint fin
    old_arr = np.empty((nb, nb, 4), dtype=complex)
    new_arr = np.empty((nb, nb, 4), dtype=complex)
    cdef double complex[:, :, ::1] old = old_arr
    cdef double complex[:, :, ::1] new = new_arr
    cdef double complex[:, :, ::1] tmp
    for i in range(m):
        old[:, :, :] = x0[i]
        yacc = 0.0
        winc = 0.0
        states[i, 0] = old
        innov[i, 0] = 0.0
        yrec[i, 0] = 0.0
        rec = 1
        for k in range(nsteps):
            dw = dW[i, k]
            K = 0.0
            for l in range(nb):
                al = alpha[l, k]
                K = K + w[l] * (sg * old[l, l, 1]
                                + old[l, l, 0] * (al + al.conjugate()))
            for bi in range(nb):
                aic = alpha[bi, k].conjugate()
                for bj in range(nb):
                    aj = alpha[bj, k]
                    fj = aj + aic
                    c = old[bi, bj, 0]
                    x = old[bi, bj, 1]
                    y = old[bi, bj, 2]
                    z = old[bi, bj, 3]
                    dx = -om * y - hg * x + sg * (z * (aic + aj))
                    dy = om * x - hg * y - sg * (1j * (z * (aic - aj)))
                    dz = (-g * (c + z)
                          - sg * ((x - 1j * y) * aic + (x + 1j * y) * aj))
                    Dc = sg * x + c * fj - c * K
                    Dx = sg * (c + z) + x * fj - x * K
                    Dy = y * fj - y * K
                    Dz = -(sg * x) + z * fj - z * K
                    new[bi, bj, 0] = c + Dc * dw
                    new[bi, bj, 1] = x + dx * dt + Dx * dw
                    new[bi, bj, 2] = y + dy * dt + Dy * dw
                    new[bi, bj, 3] = z + dz * dt + Dz * dw
            tmp = old
            old = new
            new = tmp
            yacc = yacc + (K.real * dt + dw)
            winc = winc + dw
            if (k + 1) % stride == 0:
                states[i, rec] = old
                innov[i, rec] = winc
                yrec[i, rec] = yacc
                if status[i] < 0:
                    fin = True
                    for bi in range(nb):
                        for bj in range(nb):
                            for q in range(4):
                                if not _cfin(old[bi, bj, q]):
                                    fin = False
                    if not fin:
                        status[i] = k + 1
                winc = 0.0
                rec += 1


def cat_pd_chunk(double complex[:, :, :, ::1] x0, double gamma, double sg,
                 double omega, double dt, Py_ssize_t stride,
                 double complex[:, ::1] alpha, double[:, ::1] alpha_abs2,
                 double[::1] w, double[:, ::1] U,
                 double complex[:, :, :, :, ::1] states, double[:, ::1] innov,
                 double[:, ::1] yrec, long long[::1] status,
                 long long[:, ::1] jump_steps, long long[::1] njumps,
                 long long[::1] nclamped, double[::1] maxnudt):
    cdef Py_ssize_t m = U.shape[0], nsteps = U.shape[1]
    cdef Py_ssize_t nb = alpha.shape[0]
    cdef double g = gamma, om = omega, hg = 0.5 * gamma, hsg = 0.5 * sg
    cdef Py_ssize_t i, k, rec, l, bi, bj, q
    cdef double yacc, ninc, u, a2l, nu_raw, nu, p
    cdef double complex M, al, aic, aj, pij, c, x, y, z, dx, dy, dz
    cdef double complex emit, nmc, nmx, nmy, nmz, ec, ex, ey, ez
    cdef bint fin, jumped
    old_arr = np.empty((nb, nb, 4), dtype=complex)
    new_arr = np.empty((nb, nb, 4), dtype=complex)
    cdef double complex[:, :, ::1] old = old_arr
    cdef double complex[:, :, ::1] new = new_arr
    cdef double complex[:, :, ::1] tmp
    for i in range(m):
        old[:, :, :] = x0[i]
        yacc = 0.0
        ninc = 0.0
        states[i, 0] = old
        innov[i, 0] = 0.0
        yrec[i, 0] = 0.0
        rec = 1
        for k in range(nsteps):
            u = U[i, k]
            M = 0.0
            for l in range(nb):
                al = alpha[l, k]
                a2l = alpha_abs2[l, k]
                M = M + w[l] * (hg * (old[l, l, 0] + old[l, l, 3])
                                + hsg * ((old[l, l, 1] + 1j * old[l, l, 2]) * al
                                         + (old[l, l, 1] - 1j * old[l, l, 2])
                                         * al.conjugate())
                                + old[l, l, 0] * a2l)
            nu_raw = M.real
            nu = nu_raw if nu_raw > 0.0 else 0.0
            if nu_raw < 0.0:
                nclamped[i] += 1
            p = nu * dt
            if p >= 1.0:
                raise StepTooLargeError(f"nu*dt >= 1 at step {k}")
            if p > maxnudt[i]:
                maxnudt[i] = p
            jumped = u < p
            if jumped:
                if njumps[i] < _MAXJ:
                    jump_steps[i, njumps[i]] = k
                njumps[i] += 1
                yacc = yacc + 1.0
                ninc = ninc + 1.0
            for bi in range(nb):
                aic = alpha[bi, k].conjugate()
                for bj in range(nb):
                    aj = alpha[bj, k]
                    pij = aic * aj
                    c = old[bi, bj, 0]
                    x = old[bi, bj, 1]
                    y = old[bi, bj, 2]
                    z = old[bi, bj, 3]
                    dx = -om * y - hg * x + sg * (z * (aic + aj))
                    dy = om * x - hg * y - sg * (1j * (z * (aic - aj)))
                    dz = (-g * (c + z)
                          - sg * ((x - 1j * y) * aic + (x + 1j * y) * aj))
                    emit = hsg * ((x + 1j * y) * aj + (x - 1j * y) * aic)
                    nmc = hg * (c + z) + emit + c * pij
                    nmx = hsg * ((c + z) * (aj + aic)) + x * pij
                    nmy = hsg * (1j * ((c + z) * (aj - aic))) + y * pij
                    nmz = -(hg * (c + z)) - emit + z * pij
                    if jumped:
                        new[bi, bj, 0] = nmc.real / nu + 1j * (nmc.imag / nu)
                        new[bi, bj, 1] = nmx.real / nu + 1j * (nmx.imag / nu)
                        new[bi, bj, 2] = nmy.real / nu + 1j * (nmy.imag / nu)
                        new[bi, bj, 3] = nmz.real / nu + 1j * (nmz.imag / nu)
                    else:
                        ec = nu * c - nmc
                        ex = dx + nu * x - nmx
                        ey = dy + nu * y - nmy
                        ez = dz + nu * z - nmz
                        new[bi, bj, 0] = c + ec * dt
                        new[bi, bj, 1] = x + ex * dt
                        new[bi, bj, 2] = y + ey * dt
                        new[bi, bj, 3] = z + ez * dt
            tmp = old
            old = new
            new = tmp
            if (k + 1) % stride == 0:
                states[i, rec] = old
                innov[i, rec] = ninc
                yrec[i, rec] = yacc
                if status[i] < 0:
                    fin = True
                    for bi in range(nb):
                        for bj in range(nb):
                            for q in range(4):
                                if not _cfin(old[bi, bj, q]):
                                    fin = False
                    if not fin:
                        status[i] = k + 1
                ninc = 0.0
                rec += 1
