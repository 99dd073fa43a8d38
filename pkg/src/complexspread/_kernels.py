"""Compiled inner loops for rewiring and diffusion.

All kernels take a ``numpy.random.Generator`` and draw from it in a fixed
order, so results are bit-reproducible for a given generator state and
match a plain-Python replay that consumes the same stream.
"""

from __future__ import annotations

import numpy as np
from numba import njit

SUSCEPTIBLE = 0
INFLUENTIAL = 1
RECOVERED = 2


# ---------------------------------------------------------------------------
# rewiring
# ---------------------------------------------------------------------------

@njit(cache=True)
def _has_edge(adj, a, b):
    for j in range(adj.shape[1]):
        if adj[a, j] == b:
            return True
    return False


@njit(cache=True)
def _replace(adj, a, old, new):
    for j in range(adj.shape[1]):
        if adj[a, j] == old:
            adj[a, j] = new
            return


@njit(cache=True)
def _connected_pair(adj, a, b, mark, stamp, qa, qb):
    """Bidirectional BFS; True if ``a`` reaches ``b``."""
    if a == b:
        return True
    sa = stamp
    sb = stamp + 1
    k = adj.shape[1]
    mark[a] = sa
    mark[b] = sb
    qa[0] = a
    qb[0] = b
    ha, ta, hb, tb = 0, 1, 0, 1
    while ha < ta and hb < tb:
        if ta - ha <= tb - hb:
            end = ta
            for idx in range(ha, end):
                v = qa[idx]
                for j in range(k):
                    w = adj[v, j]
                    if mark[w] == sb:
                        return True
                    if mark[w] != sa:
                        mark[w] = sa
                        qa[ta] = w
                        ta += 1
            ha = end
        else:
            end = tb
            for idx in range(hb, end):
                v = qb[idx]
                for j in range(k):
                    w = adj[v, j]
                    if mark[w] == sa:
                        return True
                    if mark[w] != sb:
                        mark[w] = sb
                        qb[tb] = w
                        tb += 1
            hb = end
    return False


@njit(cache=True)
def rewire_kernel(adj, edges, swaps, check_interval, max_attempts, rng):
    """Connected double edge swaps, in place on ``adj`` and ``edges``.

    Returns ``(kept, attempts, completed)``.
    """
    n = adj.shape[0]
    m = edges.shape[0]
    mark = np.zeros(n, np.int64)
    qa = np.empty(n, np.int64)
    qb = np.empty(n, np.int64)
    log = np.empty((check_interval, 6), np.int64)
    stamp = 1
    kept = 0
    pending = 0
    attempts = 0
    while kept < swaps:
        if attempts >= max_attempts:
            return kept, attempts, False
        attempts += 1
        e1 = rng.integers(0, m)
        e2 = rng.integers(0, m)
        if e1 == e2:
            continue
        u = edges[e1, 0]
        v = edges[e1, 1]
        if rng.random() < 0.5:
            x = edges[e2, 0]
            y = edges[e2, 1]
        else:
            x = edges[e2, 1]
            y = edges[e2, 0]
        if u == x or v == y:
            continue
        if _has_edge(adj, u, x) or _has_edge(adj, v, y):
            continue
        # (u,v),(x,y) -> (u,x),(v,y)
        _replace(adj, u, v, x)
        _replace(adj, v, u, y)
        _replace(adj, x, y, u)
        _replace(adj, y, x, v)
        edges[e1, 0] = u
        edges[e1, 1] = x
        edges[e2, 0] = v
        edges[e2, 1] = y
        log[pending, 0] = e1
        log[pending, 1] = e2
        log[pending, 2] = u
        log[pending, 3] = v
        log[pending, 4] = x
        log[pending, 5] = y
        pending += 1
        if pending == check_interval or kept + pending == swaps:
            # the window keeps the graph connected iff every removed edge's
            # endpoints are still joined by some path
            ok = True
            for s in range(pending):
                if not _connected_pair(adj, log[s, 2], log[s, 3], mark, stamp, qa, qb):
                    ok = False
                stamp += 2
                if ok and not _connected_pair(adj, log[s, 4], log[s, 5], mark, stamp, qa, qb):
                    ok = False
                stamp += 2
                if not ok:
                    break
            if ok:
                kept += pending
            else:
                for s in range(pending - 1, -1, -1):
                    e1 = log[s, 0]
                    e2 = log[s, 1]
                    u = log[s, 2]
                    v = log[s, 3]
                    x = log[s, 4]
                    y = log[s, 5]
                    _replace(adj, u, x, v)
                    _replace(adj, v, y, u)
                    _replace(adj, x, u, y)
                    _replace(adj, y, v, x)
                    edges[e1, 0] = u
                    edges[e1, 1] = v
                    edges[e2, 0] = x
                    edges[e2, 1] = y
            pending = 0
    return kept, attempts, True


@njit(cache=True)
def is_connected(adj):
    n = adj.shape[0]
    if n == 0:
        return True
    seen = np.zeros(n, np.bool_)
    queue = np.empty(n, np.int64)
    queue[0] = 0
    seen[0] = True
    head, tail = 0, 1
    while head < tail:
        v = queue[head]
        head += 1
        for j in range(adj.shape[1]):
            w = adj[v, j]
            if not seen[w]:
                seen[w] = True
                queue[tail] = w
                tail += 1
    return tail == n


# ---------------------------------------------------------------------------
# diffusion
# ---------------------------------------------------------------------------

@njit(cache=True)
def _expose(v, t, adj, status, start, contacts, probs, sigma, rng):
    """Serial exposures of susceptible ``v`` at step ``t``; True on adoption.

    Neighbours are visited in adjacency order (ascending id). A neighbour
    whose influence began this step is a first contact and bumps the
    distinct-contact count before its draw.
    """
    for j in range(adj.shape[1]):
        u = adj[v, j]
        if status[u] != INFLUENTIAL:
            continue
        if start[u] == t:
            contacts[v] += 1
        p = probs[contacts[v]]
        if sigma > 0.0:
            p = rng.normal(p, sigma)
            if p < 0.0:
                p = 0.0
            elif p > 1.0:
                p = 1.0
        if p <= 0.0:
            continue
        if p >= 1.0 or rng.random() < p:
            return True
    return False


@njit(cache=True)
def trial_kernel(adj, probs, sigma, T, seeds, max_steps, seed_only, rng):
    """One synchronous S->I->R run. ``T < 0`` means influence never ends.

    With ``seed_only`` new adopters are counted but never become
    influential (used to measure adopters produced by the seeds alone).
    Returns ``(cumulative, influential, steps)``; index 0 is the seeded state.
    """
    n = adj.shape[0]
    k = adj.shape[1]
    status = np.zeros(n, np.int8)
    remaining = np.zeros(n, np.int64)
    start = np.full(n, -1, np.int64)
    contacts = np.zeros(n, np.int64)
    infl_nbrs = np.zeros(n, np.int64)
    in_front = np.zeros(n, np.bool_)
    front = np.empty(n, np.int64)
    infl = np.empty(n, np.int64)
    new = np.empty(n, np.int64)
    cum = np.empty(max_steps + 1, np.int64)
    icount = np.empty(max_steps + 1, np.int64)

    nf = 0
    ni = 0
    adopters = 0
    for s in seeds:
        status[s] = INFLUENTIAL
        remaining[s] = T
        start[s] = 1
        infl[ni] = s
        ni += 1
        adopters += 1
    for s in seeds:
        for j in range(k):
            w = adj[s, j]
            infl_nbrs[w] += 1
            if status[w] == SUSCEPTIBLE and not in_front[w]:
                in_front[w] = True
                front[nf] = w
                nf += 1
    cum[0] = adopters
    icount[0] = ni

    t = 0
    while ni > 0 and adopters < n and t < max_steps:
        t += 1
        keep = 0
        for idx in range(nf):
            v = front[idx]
            if status[v] == SUSCEPTIBLE and infl_nbrs[v] > 0:
                front[keep] = v
                keep += 1
            else:
                in_front[v] = False
        nf = keep
        front[:nf].sort()

        nn = 0
        for idx in range(nf):
            v = front[idx]
            if _expose(v, t, adj, status, start, contacts, probs, sigma, rng):
                new[nn] = v
                nn += 1

        if T > 0:
            keep = 0
            for idx in range(ni):
                u = infl[idx]
                remaining[u] -= 1
                if remaining[u] == 0:
                    status[u] = RECOVERED
                    for j in range(k):
                        infl_nbrs[adj[u, j]] -= 1
                else:
                    infl[keep] = u
                    keep += 1
            ni = keep

        for idx in range(nn):
            v = new[idx]
            adopters += 1
            if seed_only:
                status[v] = RECOVERED
            else:
                status[v] = INFLUENTIAL
                remaining[v] = T
                start[v] = t + 1
                infl[ni] = v
                ni += 1
        if not seed_only:
            for idx in range(nn):
                v = new[idx]
                for j in range(k):
                    w = adj[v, j]
                    infl_nbrs[w] += 1
                    if status[w] == SUSCEPTIBLE and not in_front[w]:
                        in_front[w] = True
                        front[nf] = w
                        nf += 1
        cum[t] = adopters
        icount[t] = ni
    return cum[: t + 1].copy(), icount[: t + 1].copy(), t


@njit(cache=True)
def seed_adopters_batch(adj, probs, sigma, T, seed_rows, rng):
    """Adopters produced by each row of seeds within ``T`` steps.

    Same exposure accounting as ``trial_kernel`` with ``seed_only``; state
    arrays are reused across rows so huge sparse graphs stay cheap.
    """
    n = adj.shape[0]
    k = adj.shape[1]
    runs = seed_rows.shape[0]
    status = np.zeros(n, np.int8)
    start = np.full(n, -1, np.int64)
    contacts = np.zeros(n, np.int64)
    seen = np.zeros(n, np.bool_)
    cand = np.empty(seed_rows.shape[1] * k, np.int64)
    new = np.empty(seed_rows.shape[1] * k, np.int64)
    out = np.zeros(runs, np.int64)
    for r in range(runs):
        for s in seed_rows[r]:
            status[s] = INFLUENTIAL
            start[s] = 1
        nc = 0
        for s in seed_rows[r]:
            for j in range(k):
                w = adj[s, j]
                if status[w] == SUSCEPTIBLE and not seen[w]:
                    seen[w] = True
                    cand[nc] = w
                    nc += 1
        cand[:nc].sort()
        total = 0
        for t in range(1, T + 1):
            nn = 0
            for idx in range(nc):
                v = cand[idx]
                if status[v] != SUSCEPTIBLE:
                    continue
                if _expose(v, t, adj, status, start, contacts, probs, sigma, rng):
                    new[nn] = v
                    nn += 1
            for idx in range(nn):
                status[new[idx]] = RECOVERED
            total += nn
        out[r] = total
        for idx in range(nc):
            v = cand[idx]
            status[v] = SUSCEPTIBLE
            contacts[v] = 0
            seen[v] = False
        for s in seed_rows[r]:
            status[s] = SUSCEPTIBLE
            start[s] = -1
    return out
