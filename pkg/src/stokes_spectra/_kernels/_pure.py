"""Pure-python reference kernels.

Same semantics as the compiled extension ``_core``; selected at import time
when the extension is unavailable or STOKES_SPECTRA_PURE=1.
"""

import cmath
import math

import numpy as np

BACKEND = "pure"

# Dormand-Prince 5(4) tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_E = (
    71 / 57600,
    0.0,
    -71 / 16695,
    71 / 1920,
    -17253 / 339200,
    22 / 525,
    -1 / 40,
)

_RESCALE_HI = 2.0**500
_RESCALE_LO = 2.0**-500
_RESCALE_SHIFT = 512


def _horner(coeffs, z):
    acc = 0j
    for k in range(len(coeffs) - 1, -1, -1):
        acc = acc * z + coeffs[k]
    return acc


def integrate_segment(coeffs, z0, z1, y, w, rtol, max_steps=2_000_000):
    """Integrate y'' = V(z) y along the straight segment z0 -> z1.

    ``w`` is dy/dz.  Returns (y, w, exp2, n_steps, ok) where the true values
    are the returned pair times 2**exp2.
    """
    h_seg = z1 - z0
    seg_len = abs(h_seg)
    if seg_len == 0.0:
        return y, w, 0, 0, True

    exp2 = 0
    tau = 0.0
    v0 = _horner(coeffs, z0)
    dt = min(1.0, 0.5 / (1.0 + math.sqrt(abs(v0)) * seg_len))
    n_steps = 0
    k1y = h_seg * w
    k1w = h_seg * v0 * y

    while tau < 1.0:
        if n_steps >= max_steps:
            return y, w, exp2, n_steps, False
        if tau + dt > 1.0:
            dt = 1.0 - tau

        ky = [k1y, 0, 0, 0, 0, 0, 0]
        kw = [k1w, 0, 0, 0, 0, 0, 0]
        for i in range(1, 7):
            yy = y
            ww = w
            arow = _A[i]
            for j in range(i):
                yy = yy + dt * arow[j] * ky[j]
                ww = ww + dt * arow[j] * kw[j]
            zz = z0 + (tau + _C[i] * dt) * h_seg
            ky[i] = h_seg * ww
            kw[i] = h_seg * _horner(coeffs, zz) * yy
        # stage 7 arguments are the 5th order solution (FSAL)
        y_new = y + dt * (
            _A[6][0] * ky[0]
            + _A[6][2] * ky[2]
            + _A[6][3] * ky[3]
            + _A[6][4] * ky[4]
            + _A[6][5] * ky[5]
        )
        w_new = w + dt * (
            _A[6][0] * kw[0]
            + _A[6][2] * kw[2]
            + _A[6][3] * kw[3]
            + _A[6][4] * kw[4]
            + _A[6][5] * kw[5]
        )
        ey = dt * sum(_E[i] * ky[i] for i in range(7))
        ew = dt * sum(_E[i] * kw[i] for i in range(7))

        zm = z0 + (tau + dt) * h_seg
        vm = _horner(coeffs, zm)
        stiff = math.sqrt(max(1.0, abs(vm))) * seg_len
        scale = max(abs(y), abs(w) / stiff * seg_len,
                    abs(y_new), abs(w_new) / stiff * seg_len)
        if scale == 0.0:
            scale = 1.0
        err = max(abs(ey), abs(ew) / stiff * seg_len) / (rtol * scale)

        if err <= 1.0:
            tau += dt
            y, w = y_new, w_new
            k1y = ky[6]
            k1w = kw[6]
            m = max(abs(y), abs(w))
            if m > _RESCALE_HI:
                f = 2.0**-_RESCALE_SHIFT
                y *= f
                w *= f
                k1y *= f
                k1w *= f
                exp2 += _RESCALE_SHIFT
            elif 0.0 < m < _RESCALE_LO:
                f = 2.0**_RESCALE_SHIFT
                y *= f
                w *= f
                k1y *= f
                k1w *= f
                exp2 -= _RESCALE_SHIFT
        n_steps += 1
        fac = 0.9 * (err + 1e-30) ** -0.2
        dt *= min(5.0, max(0.2, fac))
        dt = min(dt, 1.0)
    return y, w, exp2, n_steps, True


STATUS_CAPTURE = 0
STATUS_ESCAPE = 1
STATUS_UNRESOLVED = 2
STATUS_ERROR = 3


def _direction(coeffs, z, vref):
    q = _horner(coeffs, z)
    aq = abs(q)
    if aq == 0.0:
        return vref
    u = 1j / cmath.sqrt(q)
    u /= abs(u)
    if (u * vref.conjugate()).real < 0.0:
        u = -u
    return u


def _seg_dist(p, a, b):
    """Distance from point p to segment [a, b]."""
    ab = b - a
    denom = ab.real * ab.real + ab.imag * ab.imag
    if denom == 0.0:
        return abs(p - a)
    t = ((p - a).real * ab.real + (p - a).imag * ab.imag) / denom
    t = min(1.0, max(0.0, t))
    return abs(p - (a + t * ab))


def trace_path(
    coeffs,
    z0,
    v0,
    tps,
    capture_r,
    escape_r,
    max_len,
    step_tol,
    guard_idx=-1,
    guard_lift_dist=0.0,
    rec_stride=1,
):
    """Trace the unit-speed vertical direction field dz/ds = +-i/sqrt(V).

    Returns (status, z_end, v_end, hit_tp, arclen, min_dists, polyline).
    ``min_dists[k]`` is the closest approach to turning point k over the
    whole trajectory (guarded source excluded until the trajectory has
    moved ``guard_lift_dist`` away from it).
    """
    tps = list(tps)
    ntp = len(tps)
    min_dists = [math.inf] * ntp
    guard_active = guard_idx >= 0

    z = complex(z0)
    v = complex(v0)
    v /= abs(v)
    arclen = 0.0
    poly = [z]
    hit_tp = -1
    status = STATUS_UNRESOLVED

    h = min(0.05, max(1e-6, capture_r * 10.0))
    n_acc = 0
    max_steps = 5_000_000
    n_steps = 0

    while True:
        if n_steps >= max_steps:
            status = STATUS_ERROR
            break
        n_steps += 1
        k = [0j] * 7
        k[0] = _direction(coeffs, z, v)
        bad = False
        for i in range(1, 7):
            zz = z
            arow = _A[i]
            for j in range(i):
                zz = zz + h * arow[j] * k[j]
            k[i] = _direction(coeffs, zz, v)
            if k[i] == 0:
                bad = True
                break
        if bad:
            status = STATUS_ERROR
            break
        z_new = z + h * (
            _A[6][0] * k[0]
            + _A[6][2] * k[2]
            + _A[6][3] * k[3]
            + _A[6][4] * k[4]
            + _A[6][5] * k[5]
        )
        err_c = h * sum(_E[i] * k[i] for i in range(7))
        err = abs(err_c) / (step_tol * max(h, 1e-300))

        if err <= 1.0:
            # check turning point approach along the accepted sub-segment
            captured = False
            for it in range(ntp):
                d = _seg_dist(tps[it], z, z_new)
                if guard_active and it == guard_idx:
                    if abs(z_new - tps[it]) > guard_lift_dist:
                        guard_active = False
                    else:
                        continue
                if d < min_dists[it]:
                    min_dists[it] = d
                if d < capture_r:
                    status = STATUS_CAPTURE
                    hit_tp = it
                    z_new = tps[it]
                    captured = True
                    break
            v = _direction(coeffs, z_new if not captured else z, k[6] if k[6] != 0 else v)
            arclen += h
            z = z_new
            n_acc += 1
            if n_acc % rec_stride == 0 or captured:
                poly.append(z)
            if captured:
                break
            if abs(z) > escape_r:
                status = STATUS_ESCAPE
                poly.append(z)
                break
            if arclen > max_len:
                status = STATUS_UNRESOLVED
                break
        fac = 0.9 * (err + 1e-30) ** -0.2
        h *= min(5.0, max(0.1, fac))
        h = min(h, 0.1 * escape_r)
    if poly[-1] != z:
        poly.append(z)
    return status, z, v, hit_tp, arclen, min_dists, np.array(poly, dtype=complex)
