# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled ring-walk kernel; scalar tree descent per point.

Same contract as mtx._kernel_py.ring_walk.
"""

import numpy as np

from libc.math cimport cos, sin, sqrt

BACKEND = "cython"

cdef double TWO_PI = 6.283185307179586476925286766559


def ring_walk(object zs, double t, object center, object r_in, object r_out,
              object eta, object child1, object child2, object level,
              long depth_cut, bint inverse):
    cdef double complex[::1] z = np.ascontiguousarray(zs, dtype=np.complex128)
    cdef double complex[::1] c = np.ascontiguousarray(center, dtype=np.complex128)
    cdef double[::1] ri = np.ascontiguousarray(r_in, dtype=np.float64)
    cdef double[::1] ro = np.ascontiguousarray(r_out, dtype=np.float64)
    cdef double[::1] et = np.ascontiguousarray(eta, dtype=np.float64)
    cdef long[::1] c1 = np.ascontiguousarray(child1, dtype=np.int64)
    cdef long[::1] c2 = np.ascontiguousarray(child2, dtype=np.int64)
    cdef long[::1] lv = np.ascontiguousarray(level, dtype=np.int64)
    out_arr = np.empty(z.shape[0], dtype=np.complex128)
    cdef double complex[::1] out = out_arr

    cdef Py_ssize_t n = z.shape[0]
    cdef Py_ssize_t i
    cdef long max_chain = 0
    for i in range(lv.shape[0]):
        if lv[i] > max_chain:
            max_chain = lv[i]
    max_chain += 2

    chain_arr = np.empty(max_chain, dtype=np.int64)
    cdef long[::1] chain = chain_arr

    cdef double wr = cos(TWO_PI * t)
    cdef double wi = -sin(TWO_PI * t)
    cdef double turns = 1.0 - t

    if lv[0] > depth_cut:
        for i in range(n):
            out[i] = z[i]
        return out_arr

    cdef double complex p, zeta, rot
    cdef double d2, rhat, ang
    cdef long idx, nxt, k, depth, twist_idx

    for i in range(n):
        p = z[i]
        if inverse:
            # peel ancestors from the root: un-rotate, then descend
            idx = 0
            while True:
                zeta = p - c[idx]
                d2 = zeta.real * zeta.real + zeta.imag * zeta.imag
                if d2 > ro[idx] * ro[idx]:
                    break
                if d2 >= ri[idx] * ri[idx]:
                    rhat = sqrt(d2) / ro[idx]
                    ang = -TWO_PI * turns * (1.0 - rhat) / et[idx]
                    rot = cos(ang) + 1j * sin(ang)
                    p = c[idx] + zeta * rot
                    break
                rot = wr - 1j * wi
                p = c[idx] + zeta * rot
                nxt = _pick_child(p, idx, c, ro, c1, c2, lv, depth_cut)
                if nxt < 0:
                    break
                idx = nxt
            out[i] = p
            continue
        # forward: collect the chain, innermost action first
        idx = 0
        depth = 0
        twist_idx = -1
        while True:
            zeta = p - c[idx]
            d2 = zeta.real * zeta.real + zeta.imag * zeta.imag
            if d2 > ro[idx] * ro[idx]:
                break
            if d2 >= ri[idx] * ri[idx]:
                twist_idx = idx
                break
            chain[depth] = idx
            depth += 1
            nxt = _pick_child(p, idx, c, ro, c1, c2, lv, depth_cut)
            if nxt < 0:
                break
            idx = nxt
        if twist_idx >= 0:
            zeta = p - c[twist_idx]
            rhat = sqrt(zeta.real * zeta.real + zeta.imag * zeta.imag) / ro[twist_idx]
            ang = TWO_PI * turns * (1.0 - rhat) / et[twist_idx]
            rot = cos(ang) + 1j * sin(ang)
            p = c[twist_idx] + zeta * rot
        rot = wr + 1j * wi
        for k in range(depth - 1, -1, -1):
            idx = chain[k]
            p = c[idx] + rot * (p - c[idx])
        out[i] = p
    return out_arr


cdef inline long _pick_child(double complex p, long idx,
                             double complex[::1] c, double[::1] ro,
                             long[::1] c1, long[::1] c2,
                             long[::1] lv, long depth_cut) noexcept nogil:
    cdef long ch
    cdef double complex zeta
    ch = c1[idx]
    if ch >= 0 and lv[ch] <= depth_cut:
        zeta = p - c[ch]
        if zeta.real * zeta.real + zeta.imag * zeta.imag <= ro[ch] * ro[ch]:
            return ch
    ch = c2[idx]
    if ch >= 0 and lv[ch] <= depth_cut:
        zeta = p - c[ch]
        if zeta.real * zeta.real + zeta.imag * zeta.imag <= ro[ch] * ro[ch]:
            return ch
    return -1
