"""Compiled inner loops. Mirrors ``engine.step`` draw for draw."""

import numpy as np
from numba import njit

KIND_ADD = 0
KIND_MUL = 1

# Slots of the mutable scalar block passed to ``advance``.
S_T = 0
S_POOL = 1
S_POV = 2
S_TC = 3


@njit(cache=True, inline="always")
def _poor(w, kind, c, num, den):
    if kind == KIND_ADD:
        return 1 if w < c else 0
    return 1 if (2 * num * w + den) // (2 * den) == 0 else 0


@njit(cache=True)
def advance(wealth, bankrupt, pool, slot, scal, fully, indptr, indices,
            kind, c, num, den, bankruptcy, solvent_pairing, u, steps, stop_at_tc):
    n = wealth.shape[0]
    t = scal[S_T]
    m = scal[S_POOL]
    pov = scal[S_POV]
    tc = scal[S_TC]
    for s in range(steps):
        if stop_at_tc and tc >= 0:
            break
        u1 = u[3 * s]
        u2 = u[3 * s + 1]
        u3 = u[3 * s + 2]
        t += 1
        if fully:
            if m < 2:
                continue
            a = int(u1 * m)
            b = int(u2 * (m - 1))
            if b >= a:
                b += 1
            i = pool[a]
            j = pool[b]
        else:
            if m < 1:
                continue
            i = pool[int(u1 * m)]
            lo = indptr[i]
            d = indptr[i + 1] - lo
            if d == 0:
                continue
            j = indices[lo + int(u2 * d)]
        if bankruptcy and (bankrupt[i] or bankrupt[j]):
            continue
        wi = wealth[i]
        wj = wealth[j]
        if kind == KIND_ADD:
            dw = c
        else:
            dw = (2 * num * min(wi, wj) + den) // (2 * den)
        if u3 < 0.5:
            win = i
            lose = j
        else:
            win = j
            lose = i
        if dw <= 0 or wealth[lose] < dw:
            continue
        pov -= _poor(wealth[win], kind, c, num, den)
        pov -= _poor(wealth[lose], kind, c, num, den)
        wealth[lose] -= dw
        wealth[win] += dw
        for x in (win, lose):
            p = _poor(wealth[x], kind, c, num, den)
            pov += p
            if bankruptcy and p == 1 and not bankrupt[x]:
                bankrupt[x] = True
                if solvent_pairing:
                    last = m - 1
                    sx = slot[x]
                    other = pool[last]
                    pool[sx] = other
                    pool[last] = x
                    slot[other] = sx
                    slot[x] = last
                    m = last
        if tc < 0 and pov >= n - 1:
            tc = t
    scal[S_T] = t
    scal[S_POOL] = m
    scal[S_POV] = pov
    scal[S_TC] = tc


@njit(cache=True)
def entropy(wealth, scratch):
    """Shannon entropy of the occupation of exact wealth values.

    ``scratch`` must be zero on entry (length > max wealth) and is left zero.
    """
    n = wealth.shape[0]
    for k in range(n):
        scratch[wealth[k]] += 1
    s = 0.0
    for k in range(n):
        cnt = scratch[wealth[k]]
        if cnt > 0:
            p = cnt / n
            s -= p * np.log(p)
            scratch[wealth[k]] = 0
    return s
