"""Pure-NumPy ring-walk kernel (fallback when the compiled extension is absent).

Semantics (shared with the Cython twin): the ring family is a tree of
disjoint round annuli, each child strictly inside its parent's inner disk.
At parameter t, a point picks up a rigid rotation by -2*pi*t about the
center of every ring whose inner disk strictly contains it, plus the
partial twist with 1-t turns if it lies in some ring's annulus.  Innermost
actions apply first.  t=0 is the multitwist map itself; t=1 the identity.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"
TWO_PI = 2.0 * np.pi


def ring_walk(z, t, center, r_in, r_out, eta, child1, child2, level, depth_cut, inverse):
    """Evaluate the unwinding map (or its inverse) at parameter t."""
    z = np.ascontiguousarray(z, dtype=np.complex128)
    if level[0] > depth_cut:
        return z.copy()
    if inverse:
        return _walk_inverse(z, t, center, r_in, r_out, eta, child1, child2, level, depth_cut)
    return _walk_forward(z, t, center, r_in, r_out, eta, child1, child2, level, depth_cut)


def _children_step(pos, cur, center, r_out, child1, child2, level, depth_cut):
    """Next ring index per point (or -1): the child whose outer disk contains it."""
    nxt = np.full(cur.shape, -1, dtype=np.int64)
    for picker in (child1, child2):
        ch = picker[cur]
        cand = (nxt < 0) & (ch >= 0)
        if np.any(cand):
            ok = cand.copy()
            ok[cand] &= level[ch[cand]] <= depth_cut
            idx = np.where(ok)[0]
            if idx.size:
                inside = np.abs(pos[idx] - center[ch[idx]]) <= r_out[ch[idx]]
                nxt[idx[inside]] = ch[idx[inside]]
    return nxt


def _walk_forward(z, t, center, r_in, r_out, eta, child1, child2, level, depth_cut):
    n = z.shape[0]
    max_chain = int(level.max()) + 2
    chains = np.full((n, max_chain), -1, dtype=np.int64)
    twist_at = np.full(n, -1, dtype=np.int64)
    cur = np.zeros(n, dtype=np.int64)
    alive = np.ones(n, dtype=bool)
    for step in range(max_chain):
        if not np.any(alive):
            break
        ai = np.where(alive)[0]
        d = np.abs(z[ai] - center[cur[ai]])
        outside = d > r_out[cur[ai]]
        annulus = ~outside & (d >= r_in[cur[ai]])
        twist_at[ai[annulus]] = cur[ai[annulus]]
        interior = ~outside & ~annulus
        chains[ai[interior], step] = cur[ai[interior]]
        alive[ai[outside]] = False
        alive[ai[annulus]] = False
        ai = np.where(alive)[0]
        if ai.size == 0:
            break
        nxt = _children_step(z[ai], cur[ai], center, r_out, child1, child2, level, depth_cut)
        stop = nxt < 0
        alive[ai[stop]] = False
        cur[ai[~stop]] = nxt[~stop]
    out = z.copy()
    tw = np.where(twist_at >= 0)[0]
    if tw.size:
        idx = twist_at[tw]
        zeta = out[tw] - center[idx]
        rhat = np.abs(zeta) / r_out[idx]
        ang = TWO_PI * (1.0 - t) * (1.0 - rhat) / eta[idx]
        out[tw] = center[idx] + zeta * np.exp(1j * ang)
    w = np.exp(-1j * TWO_PI * t)
    for step in range(max_chain - 1, -1, -1):
        mask = chains[:, step] >= 0
        if np.any(mask):
            idx = chains[mask, step]
            out[mask] = center[idx] + w * (out[mask] - center[idx])
    return out


def _walk_inverse(z, t, center, r_in, r_out, eta, child1, child2, level, depth_cut):
    n = z.shape[0]
    out = z.copy()
    cur = np.zeros(n, dtype=np.int64)
    alive = np.ones(n, dtype=bool)
    wbar = np.exp(1j * TWO_PI * t)
    max_chain = int(level.max()) + 2
    for _ in range(max_chain):
        if not np.any(alive):
            break
        ai = np.where(alive)[0]
        d = np.abs(out[ai] - center[cur[ai]])
        outside = d > r_out[cur[ai]]
        annulus = ~outside & (d >= r_in[cur[ai]])
        if np.any(annulus):
            ii = ai[annulus]
            idx = cur[ii]
            zeta = out[ii] - center[idx]
            rhat = np.abs(zeta) / r_out[idx]
            ang = TWO_PI * (1.0 - t) * (1.0 - rhat) / eta[idx]
            out[ii] = center[idx] + zeta * np.exp(-1j * ang)
        interior = ~outside & ~annulus
        if np.any(interior):
            ii = ai[interior]
            idx = cur[ii]
            out[ii] = center[idx] + wbar * (out[ii] - center[idx])
        alive[ai[outside]] = False
        alive[ai[annulus]] = False
        ai = np.where(alive)[0]
        if ai.size == 0:
            break
        nxt = _children_step(out[ai], cur[ai], center, r_out, child1, child2, level, depth_cut)
        stop = nxt < 0
        alive[ai[stop]] = False
        cur[ai[~stop]] = nxt[~stop]
    return out
