# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernels: complex-plane ODE integration and trajectory tracing.

Mirrors ``_pure`` exactly; the pure module is the reference semantics.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, fabs, log, sqrt

cdef extern from "complex.h" nogil:
    double complex csqrt(double complex)
    double cabs(double complex)
    double creal(double complex)
    double cimag(double complex)

BACKEND = "compiled"

STATUS_CAPTURE = 0
STATUS_ESCAPE = 1
STATUS_UNRESOLVED = 2
STATUS_ERROR = 3

cdef double C2 = 1.0 / 5, C3 = 3.0 / 10, C4 = 4.0 / 5, C5 = 8.0 / 9
cdef double A21 = 1.0 / 5
cdef double A31 = 3.0 / 40, A32 = 9.0 / 40
cdef double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9
cdef double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187
cdef double A53 = 64448.0 / 6561, A54 = -212.0 / 729
cdef double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247
cdef double A64 = 49.0 / 176, A65 = -5103.0 / 18656
cdef double A71 = 35.0 / 384, A73 = 500.0 / 1113, A74 = 125.0 / 192
cdef double A75 = -2187.0 / 6784, A76 = 11.0 / 84
cdef double E1 = 71.0 / 57600, E3 = -71.0 / 16695, E4 = 71.0 / 1920
cdef double E5 = -17253.0 / 339200, E6 = 22.0 / 525, E7 = -1.0 / 40

cdef double RESCALE_HI = 2.0 ** 500
cdef double RESCALE_LO = 2.0 ** -500
cdef double RESCALE_UP = 2.0 ** 512
cdef double RESCALE_DOWN = 2.0 ** -512
cdef int RESCALE_SHIFT = 512


cdef inline double complex horner(double complex[::1] c, double complex z) nogil:
    cdef Py_ssize_t k = c.shape[0] - 1
    cdef double complex acc = c[k]
    while k > 0:
        k -= 1
        acc = acc * z + c[k]
    return acc


def integrate_segment(coeffs, z0, z1, y, w, rtol, max_steps=2_000_000):
    """Integrate y'' = V(z) y along z0 -> z1; returns (y, w, exp2, n, ok)."""
    cdef double complex[::1] c = np.ascontiguousarray(coeffs, dtype=complex)
    cdef double complex h_seg = <double complex> complex(z1) - <double complex> complex(z0)
    cdef double complex zc0 = complex(z0)
    cdef double complex yy = complex(y), ww = complex(w)
    cdef double seg_len = cabs(h_seg)
    cdef double tol = rtol
    cdef long nmax = max_steps
    if seg_len == 0.0:
        return complex(y), complex(w), 0, 0, True

    cdef long exp2 = 0, n_steps = 0
    cdef double tau = 0.0, dt, err, fac, stiff, scale, m
    cdef double complex v0 = horner(c, zc0)
    dt = 0.5 / (1.0 + sqrt(cabs(v0)) * seg_len)
    if dt > 1.0:
        dt = 1.0
    cdef double complex k1y = h_seg * ww, k1w = h_seg * v0 * yy
    cdef double complex k2y, k2w, k3y, k3w, k4y, k4w, k5y, k5w, k6y, k6w, k7y, k7w
    cdef double complex ys, ws, zz, y_new, w_new, ey, ew, vm
    cdef bint ok = True

    with nogil:
        while tau < 1.0:
            if n_steps >= nmax:
                ok = False
                break
            if tau + dt > 1.0:
                dt = 1.0 - tau

            ys = yy + dt * A21 * k1y
            ws = ww + dt * A21 * k1w
            zz = zc0 + (tau + C2 * dt) * h_seg
            k2y = h_seg * ws
            k2w = h_seg * horner(c, zz) * ys

            ys = yy + dt * (A31 * k1y + A32 * k2y)
            ws = ww + dt * (A31 * k1w + A32 * k2w)
            zz = zc0 + (tau + C3 * dt) * h_seg
            k3y = h_seg * ws
            k3w = h_seg * horner(c, zz) * ys

            ys = yy + dt * (A41 * k1y + A42 * k2y + A43 * k3y)
            ws = ww + dt * (A41 * k1w + A42 * k2w + A43 * k3w)
            zz = zc0 + (tau + C4 * dt) * h_seg
            k4y = h_seg * ws
            k4w = h_seg * horner(c, zz) * ys

            ys = yy + dt * (A51 * k1y + A52 * k2y + A53 * k3y + A54 * k4y)
            ws = ww + dt * (A51 * k1w + A52 * k2w + A53 * k3w + A54 * k4w)
            zz = zc0 + (tau + C5 * dt) * h_seg
            k5y = h_seg * ws
            k5w = h_seg * horner(c, zz) * ys

            ys = yy + dt * (A61 * k1y + A62 * k2y + A63 * k3y + A64 * k4y + A65 * k5y)
            ws = ww + dt * (A61 * k1w + A62 * k2w + A63 * k3w + A64 * k4w + A65 * k5w)
            zz = zc0 + (tau + dt) * h_seg
            k6y = h_seg * ws
            k6w = h_seg * horner(c, zz) * ys

            y_new = yy + dt * (A71 * k1y + A73 * k3y + A74 * k4y + A75 * k5y + A76 * k6y)
            w_new = ww + dt * (A71 * k1w + A73 * k3w + A74 * k4w + A75 * k5w + A76 * k6w)
            vm = horner(c, zz)
            k7y = h_seg * w_new
            k7w = h_seg * vm * y_new

            ey = dt * (E1 * k1y + E3 * k3y + E4 * k4y + E5 * k5y + E6 * k6y + E7 * k7y)
            ew = dt * (E1 * k1w + E3 * k3w + E4 * k4w + E5 * k5w + E6 * k6w + E7 * k7w)

            stiff = sqrt(max(1.0, cabs(vm))) * seg_len
            scale = max(max(cabs(yy), cabs(ww) / stiff * seg_len),
                        max(cabs(y_new), cabs(w_new) / stiff * seg_len))
            if scale == 0.0:
                scale = 1.0
            err = max(cabs(ey), cabs(ew) / stiff * seg_len) / (tol * scale)

            if err <= 1.0:
                tau += dt
                yy = y_new
                ww = w_new
                k1y = k7y
                k1w = k7w
                m = max(cabs(yy), cabs(ww))
                if m > RESCALE_HI:
                    yy *= RESCALE_DOWN
                    ww *= RESCALE_DOWN
                    k1y *= RESCALE_DOWN
                    k1w *= RESCALE_DOWN
                    exp2 += RESCALE_SHIFT
                elif 0.0 < m < RESCALE_LO:
                    yy *= RESCALE_UP
                    ww *= RESCALE_UP
                    k1y *= RESCALE_UP
                    k1w *= RESCALE_UP
                    exp2 -= RESCALE_SHIFT
            n_steps += 1
            fac = 0.9 * (err + 1e-30) ** -0.2
            if fac > 5.0:
                fac = 5.0
            elif fac < 0.2:
                fac = 0.2
            dt *= fac
            if dt > 1.0:
                dt = 1.0
    return complex(yy), complex(ww), exp2, n_steps, ok


cdef inline double complex direction(double complex[::1] c, double complex z,
                                     double complex vref) nogil:
    cdef double complex q = horner(c, z)
    cdef double complex u
    cdef double a = cabs(q)
    if a == 0.0:
        return vref
    u = 1j / csqrt(q)
    u = u / cabs(u)
    if creal(u * (creal(vref) - 1j * cimag(vref))) < 0.0:
        u = -u
    return u


cdef inline double seg_dist(double complex p, double complex a,
                            double complex b) nogil:
    cdef double complex ab = b - a, ap = p - a
    cdef double denom = creal(ab) * creal(ab) + cimag(ab) * cimag(ab)
    cdef double t
    if denom == 0.0:
        return cabs(ap)
    t = (creal(ap) * creal(ab) + cimag(ap) * cimag(ab)) / denom
    if t < 0.0:
        t = 0.0
    elif t > 1.0:
        t = 1.0
    return cabs(p - (a + t * ab))


def trace_path(coeffs, z0, v0, tps, capture_r, escape_r, max_len, step_tol,
               guard_idx=-1, guard_lift_dist=0.0, rec_stride=1):
    """Trace dz/ds = +-i/sqrt(V(z)); see the pure backend for the contract."""
    cdef double complex[::1] c = np.ascontiguousarray(coeffs, dtype=complex)
    cdef cnp.ndarray tps_arr = np.ascontiguousarray(tps, dtype=complex)
    cdef double complex[::1] tp = tps_arr
    cdef Py_ssize_t ntp = tp.shape[0]
    cdef cnp.ndarray md_arr = np.full(max(ntp, 1), np.inf, dtype=float)
    cdef double[::1] min_dists = md_arr

    cdef double complex z = complex(z0), v = complex(v0), z_new, err_c
    cdef double cap = capture_r, esc = escape_r, mlen = max_len, tol = step_tol
    cdef long gi = guard_idx, stride = max(1, rec_stride)
    cdef double glift = guard_lift_dist
    cdef bint guard_active = gi >= 0

    v = v / cabs(v)
    cdef double arclen = 0.0, h, err, fac, d
    cdef long status = STATUS_UNRESOLVED, hit_tp = -1
    cdef long n_acc = 0, n_steps = 0, max_steps = 5_000_000
    cdef bint captured, bad, done = False
    cdef Py_ssize_t it
    cdef double complex k1, k2, k3, k4, k5, k6, k7

    poly = [complex(z)]
    h = min(0.05, max(1e-6, cap * 10.0))

    while not done:
        if n_steps >= max_steps:
            status = STATUS_ERROR
            break
        n_steps += 1
        captured = False
        with nogil:
            k1 = direction(c, z, v)
            k2 = direction(c, z + h * A21 * k1, v)
            k3 = direction(c, z + h * (A31 * k1 + A32 * k2), v)
            k4 = direction(c, z + h * (A41 * k1 + A42 * k2 + A43 * k3), v)
            k5 = direction(c, z + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4), v)
            k6 = direction(c, z + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4
                                       + A65 * k5), v)
            z_new = z + h * (A71 * k1 + A73 * k3 + A74 * k4 + A75 * k5 + A76 * k6)
            k7 = direction(c, z_new, v)
            err_c = h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7)
            err = cabs(err_c) / (tol * max(h, 1e-300))

        if err <= 1.0:
            for it in range(ntp):
                d = seg_dist(tp[it], z, z_new)
                if guard_active and it == gi:
                    if cabs(z_new - tp[it]) > glift:
                        guard_active = False
                    else:
                        continue
                if d < min_dists[it]:
                    min_dists[it] = d
                if d < cap:
                    status = STATUS_CAPTURE
                    hit_tp = it
                    z_new = tp[it]
                    captured = True
                    break
            if k7 != 0:
                v = direction(c, z if captured else z_new, k7)
            arclen += h
            z = z_new
            n_acc += 1
            if n_acc % stride == 0 or captured:
                poly.append(complex(z))
            if captured:
                done = True
            elif cabs(z) > esc:
                status = STATUS_ESCAPE
                poly.append(complex(z))
                done = True
            elif arclen > mlen:
                status = STATUS_UNRESOLVED
                done = True
        fac = 0.9 * (err + 1e-30) ** -0.2
        if fac > 5.0:
            fac = 5.0
        elif fac < 0.1:
            fac = 0.1
        h *= fac
        if h > 0.1 * esc:
            h = 0.1 * esc

    if poly[len(poly) - 1] != complex(z):
        poly.append(complex(z))
    return (int(status), complex(z), complex(v), int(hit_tp), arclen,
            md_arr[:ntp].tolist(), np.array(poly, dtype=complex))
