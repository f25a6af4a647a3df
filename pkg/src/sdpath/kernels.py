"""Hot loops: successor enumeration, Dijkstra and the interval search.

Every function here is compiled by numba when available; the plain Python
versions run when ``SDPATH_DISABLE_NUMBA=1`` (see ``_accel``).
"""
from __future__ import annotations

import heapq

import numpy as np

from ._accel import kernel

INF = np.inf


@kernel
def seg_len(xyz, a, b):
    dx = xyz[b, 0] - xyz[a, 0]
    dy = xyz[b, 1] - xyz[a, 1]
    dz = xyz[b, 2] - xyz[a, 2]
    return np.sqrt(dx * dx + dy * dy + dz * dz)


@kernel
def enumerate_successors(
    x, xyz, nv, node_edge, chain_ptr, chain_nodes, edges, faces, edge_faces, face_edges,
    vf_ptr, vf, ve_ptr, ve, buf,
):
    """Write the successors of node ``x`` into ``buf``; return their count.

    No node is written twice.
    """
    hx = xyz[x, 2]
    cnt = 0
    if x < nv:
        # neighbouring vertices through incident edges
        for k in range(ve_ptr[x], ve_ptr[x + 1]):
            e = ve[k]
            y = edges[e, 0] if edges[e, 1] == x else edges[e, 1]
            if xyz[y, 2] <= hx:
                buf[cnt] = y
                cnt += 1
        # Steiner points on the edge opposite x in each incident face
        for k in range(vf_ptr[x], vf_ptr[x + 1]):
            f = vf[k]
            for j in range(3):
                e = face_edges[f, j]
                if edges[e, 0] == x or edges[e, 1] == x:
                    continue
                for i in range(chain_ptr[e] + 1, chain_ptr[e + 1] - 1):
                    y = chain_nodes[i]
                    if xyz[y, 2] <= hx:
                        buf[cnt] = y
                        cnt += 1
        return cnt
    ex = node_edge[x]
    a = edges[ex, 0]
    b = edges[ex, 1]
    for side in range(2):
        f = edge_faces[ex, side]
        if f < 0:
            continue
        # the apex lies on both other edges; it is emitted from the first only
        apex = faces[f, 0] + faces[f, 1] + faces[f, 2] - a - b
        first = True
        for j in range(3):
            e = face_edges[f, j]
            if e == ex:
                continue
            for i in range(chain_ptr[e], chain_ptr[e + 1]):
                y = chain_nodes[i]
                if y == a or y == b or (y == apex and not first):
                    continue
                if xyz[y, 2] <= hx:
                    buf[cnt] = y
                    cnt += 1
            first = False
    return cnt


@kernel
def dijkstra_kernel(
    s, xyz, nv, node_edge, chain_ptr, chain_nodes, edges, faces, edge_faces, face_edges,
    vf_ptr, vf, ve_ptr, ve,
):
    n = xyz.shape[0]
    dist = np.full(n, np.inf)
    parent = np.full(n, -1, dtype=np.int64)
    best = np.full(n, np.inf)
    best_par = np.full(n, -1, dtype=np.int64)
    settled = np.zeros(n, dtype=np.bool_)
    buf = np.empty(n, dtype=np.int64)
    best[s] = 0.0
    heap = [(0.0, s, np.int64(-1))]
    pops = 0
    pushes = 1
    while len(heap) > 0:
        d, x, p = heapq.heappop(heap)
        pops += 1
        if settled[x]:
            continue
        settled[x] = True
        dist[x] = d
        parent[x] = p
        cnt = enumerate_successors(
            x, xyz, nv, node_edge, chain_ptr, chain_nodes, edges, faces, edge_faces, face_edges,
            vf_ptr, vf, ve_ptr, ve, buf,
        )
        for k in range(cnt):
            y = buf[k]
            if settled[y]:
                continue
            nd = d + seg_len(xyz, x, y)
            if nd < best[y] or (nd == best[y] and x < best_par[y]):
                best[y] = nd
                best_par[y] = x
                heapq.heappush(heap, (nd, y, x))
                pushes += 1
    stats = np.array([pops, pushes], dtype=np.int64)
    return dist, parent, stats


# --------------------------------------------------------------------------
# interval search
#
# For every face and every ordered pair (e, e2) of its edges, targets on e2
# are indexed by position q counted from the vertex c shared with e (q = 0 is
# c itself and never a target). Each target is owned by the settled Steiner
# point on e that offers the cheapest feasible link so far. Owners are keyed
# by their own position on e counted from c; owner keys never decrease along
# q and every owner holds one contiguous run [run_lo, run_hi]. The set of
# keys holding a run is kept in a three-level 64-bit bitset so neighbouring
# owners are found in constant time.

_ALL = np.uint64(0xFFFFFFFFFFFFFFFF)
_ONE = np.uint64(1)
_Z = np.uint64(0)


@kernel
def _ctz(w):
    n = 0
    if (w & np.uint64(0xFFFFFFFF)) == _Z:
        n += 32
        w >>= np.uint64(32)
    if (w & np.uint64(0xFFFF)) == _Z:
        n += 16
        w >>= np.uint64(16)
    if (w & np.uint64(0xFF)) == _Z:
        n += 8
        w >>= np.uint64(8)
    if (w & np.uint64(0xF)) == _Z:
        n += 4
        w >>= np.uint64(4)
    if (w & np.uint64(0x3)) == _Z:
        n += 2
        w >>= np.uint64(2)
    if (w & _ONE) == _Z:
        n += 1
    return n


@kernel
def _hib(w):
    n = 0
    if (w >> np.uint64(32)) != _Z:
        n += 32
        w >>= np.uint64(32)
    if (w >> np.uint64(16)) != _Z:
        n += 16
        w >>= np.uint64(16)
    if (w >> np.uint64(8)) != _Z:
        n += 8
        w >>= np.uint64(8)
    if (w >> np.uint64(4)) != _Z:
        n += 4
        w >>= np.uint64(4)
    if (w >> np.uint64(2)) != _Z:
        n += 2
        w >>= np.uint64(2)
    if (w >> _ONE) != _Z:
        n += 1
    return n


@kernel
def _bits_set(lv0, lv1, lv2, o0, o1, o2, k):
    j = k >> 6
    lv0[o0 + j] |= _ONE << np.uint64(k & 63)
    j1 = j >> 6
    lv1[o1 + j1] |= _ONE << np.uint64(j & 63)
    lv2[o2 + (j1 >> 6)] |= _ONE << np.uint64(j1 & 63)


@kernel
def _bits_clear(lv0, lv1, lv2, o0, o1, o2, k):
    j = k >> 6
    lv0[o0 + j] &= ~(_ONE << np.uint64(k & 63))
    if lv0[o0 + j] != _Z:
        return
    j1 = j >> 6
    lv1[o1 + j1] &= ~(_ONE << np.uint64(j & 63))
    if lv1[o1 + j1] != _Z:
        return
    lv2[o2 + (j1 >> 6)] &= ~(_ONE << np.uint64(j1 & 63))


@kernel
def _bits_next(lv0, lv1, lv2, o0, o1, o2, M, k):
    """Smallest member greater than ``k``, or -1."""
    i = k + 1
    if i >= M:
        return -1
    W0 = (M + 63) >> 6
    W1 = (W0 + 63) >> 6
    W2 = (W1 + 63) >> 6
    j = i >> 6
    w = lv0[o0 + j] & (_ALL << np.uint64(i & 63))
    if w != _Z:
        return (j << 6) + _ctz(w)
    i1 = j + 1
    if i1 >= W0:
        return -1
    j1 = i1 >> 6
    w = lv1[o1 + j1] & (_ALL << np.uint64(i1 & 63))
    if w != _Z:
        wj = (j1 << 6) + _ctz(w)
        return (wj << 6) + _ctz(lv0[o0 + wj])
    i2 = j1 + 1
    if i2 >= W1:
        return -1
    j2 = i2 >> 6
    w = lv2[o2 + j2] & (_ALL << np.uint64(i2 & 63))
    while True:
        if w != _Z:
            w1j = (j2 << 6) + _ctz(w)
            wj = (w1j << 6) + _ctz(lv1[o1 + w1j])
            return (wj << 6) + _ctz(lv0[o0 + wj])
        j2 += 1
        if j2 >= W2:
            return -1
        w = lv2[o2 + j2]


@kernel
def _bits_prev(lv0, lv1, lv2, o0, o1, o2, k):
    """Largest member smaller than ``k``, or -1."""
    i = k - 1
    if i < 0:
        return -1
    j = i >> 6
    w = lv0[o0 + j] & (_ALL >> np.uint64(63 - (i & 63)))
    if w != _Z:
        return (j << 6) + _hib(w)
    i1 = j - 1
    if i1 < 0:
        return -1
    j1 = i1 >> 6
    w = lv1[o1 + j1] & (_ALL >> np.uint64(63 - (i1 & 63)))
    if w != _Z:
        wj = (j1 << 6) + _hib(w)
        return (wj << 6) + _hib(lv0[o0 + wj])
    i2 = j1 - 1
    if i2 < 0:
        return -1
    j2 = i2 >> 6
    w = lv2[o2 + j2] & (_ALL >> np.uint64(63 - (i2 & 63)))
    while True:
        if w != _Z:
            w1j = (j2 << 6) + _hib(w)
            wj = (w1j << 6) + _hib(lv1[o1 + w1j])
            return (wj << 6) + _hib(lv0[o0 + wj])
        j2 -= 1
        if j2 < 0:
            return -1
        w = lv2[o2 + j2]


@kernel
def _find(link, base, i):
    """Union-find root with path compression (skips settled positions)."""
    r = i
    while link[base + r] != r:
        r = link[base + r]
    while link[base + i] != r:
        t = link[base + i]
        link[base + i] = r
        i = t
    return r


@kernel
def _mark_settled(x, nv, node_edge, node_pos, chain_ptr, edges, ve_ptr, ve, up, down):
    if x < nv:
        for k in range(ve_ptr[x], ve_ptr[x + 1]):
            e = ve[k]
            m = chain_ptr[e + 1] - chain_ptr[e]
            i = 0 if edges[e, 0] == x else m - 1
            base = chain_ptr[e] + e
            up[base + i] = i + 1
            down[base + i + 1] = i
    else:
        e = node_edge[x]
        i = node_pos[x]
        base = chain_ptr[e] + e
        up[base + i] = i + 1
        down[base + i + 1] = i


@kernel
def _next_live(q, step, chain_ptr, e2, df, up, down):
    """First unsettled position from ``q`` moving by ``step`` (+1/-1) in q."""
    m = chain_ptr[e2 + 1] - chain_ptr[e2]
    base = chain_ptr[e2] + e2
    forward = (step > 0) != (df != 0)
    i = m - 1 - q if df else q
    if forward:
        i = _find(up, base, i)
        if i >= m:
            return -1 if df else m
    else:
        i = _find(down, base, i + 1) - 1
        if i < 0:
            return m if df else -1
    return m - 1 - i if df else i


@kernel
def _chain_at(chain_ptr, chain_nodes, e, flip, q):
    m = chain_ptr[e + 1] - chain_ptr[e]
    if flip:
        return chain_nodes[chain_ptr[e] + m - 1 - q]
    return chain_nodes[chain_ptr[e] + q]


@kernel
def _beats(xyz, dist, u, o, v):
    return dist[u] + seg_len(xyz, u, v) < dist[o] + seg_len(xyz, o, v)


@kernel
def _feasible_range(xyz, chain_ptr, chain_nodes, e2, flip2, hu):
    """Target positions q in [1, m-1] with height <= hu, as (lo, hi)."""
    m = chain_ptr[e2 + 1] - chain_ptr[e2]
    zc = xyz[_chain_at(chain_ptr, chain_nodes, e2, flip2, 0), 2]
    zw = xyz[_chain_at(chain_ptr, chain_nodes, e2, flip2, m - 1), 2]
    if zw > zc:
        a = 1
        b = m
        while a < b:
            mid = (a + b) // 2
            if xyz[_chain_at(chain_ptr, chain_nodes, e2, flip2, mid), 2] <= hu:
                a = mid + 1
            else:
                b = mid
        return 1, a - 1
    if zw < zc:
        a = 1
        b = m
        while a < b:
            mid = (a + b) // 2
            if xyz[_chain_at(chain_ptr, chain_nodes, e2, flip2, mid), 2] <= hu:
                b = mid
            else:
                a = mid + 1
        return a, m - 1
    if zc <= hu:
        return 1, m - 1
    return 1, 0


@kernel
def _claim(
    p, u, xyz, dist, run_lo, run_hi, span, lv0, lv1, lv2, node_pos, chain_ptr, chain_nodes,
    pr_src, pr_dst, pr_sflip, pr_dflip, pr_soff, pr_b0, pr_b1, pr_b2, stats,
):
    """Give ``u`` every target of pair ``p`` it reaches strictly cheaper.

    Returns the claimed run (lo, hi); empty when lo > hi.
    """
    e = pr_src[p]
    e2 = pr_dst[p]
    df = pr_dflip[p]
    M = chain_ptr[e + 1] - chain_ptr[e]
    sb = pr_soff[p]
    o0 = pr_b0[p]
    o1 = pr_b1[p]
    o2 = pr_b2[p]
    ku = M - 1 - node_pos[u] if pr_sflip[p] else node_pos[u]
    flo, fhi = _feasible_range(xyz, chain_ptr, chain_nodes, e2, df, xyz[u, 2])
    if flo > fhi:
        return 1, 0
    stats[2] += 1
    lo_o = span[2 * p]
    hi_o = span[2 * p + 1]
    if lo_o > hi_o:
        run_lo[sb + ku] = flo
        run_hi[sb + ku] = fhi
        _bits_set(lv0, lv1, lv2, o0, o1, o2, ku)
        span[2 * p] = flo
        span[2 * p + 1] = fhi
        stats[3] += 1
        return flo, fhi

    far = _bits_next(lv0, lv1, lv2, o0, o1, o2, M, ku)
    near = _bits_prev(lv0, lv1, lv2, o0, o1, o2, ku)
    P = run_lo[sb + far] if far >= 0 else hi_o + 1
    cl_lo = fhi + 1
    cl_hi = flo - 1

    # toward farther owners: u takes a prefix of each run
    o = far
    q = max(P, flo)
    while o >= 0 and run_hi[sb + o] < q:
        o = _bits_next(lv0, lv1, lv2, o0, o1, o2, M, o)
    while q <= fhi:
        if o < 0:
            cl_lo = min(cl_lo, q)
            cl_hi = fhi
            break
        rlo = run_lo[sb + o]
        rhi = run_hi[sb + o]
        if q != rlo:
            break
        ownr = _chain_at(chain_ptr, chain_nodes, e, pr_sflip[p], o)
        if not _beats(xyz, dist, u, ownr, _chain_at(chain_ptr, chain_nodes, e2, df, q)):
            break
        r = min(rhi, fhi)
        a = q
        b = r
        while a < b:
            mid = (a + b + 1) // 2
            if _beats(xyz, dist, u, ownr, _chain_at(chain_ptr, chain_nodes, e2, df, mid)):
                a = mid
            else:
                b = mid - 1
        cl_lo = min(cl_lo, q)
        cl_hi = a
        stats[3] += 1
        nxt = _bits_next(lv0, lv1, lv2, o0, o1, o2, M, o)
        if a >= rhi:
            run_lo[sb + o] = 1
            run_hi[sb + o] = 0
            _bits_clear(lv0, lv1, lv2, o0, o1, o2, o)
        else:
            run_lo[sb + o] = a + 1
        if a < rhi or a == fhi:
            break
        q = a + 1
        o = nxt

    # toward nearer owners: u takes a suffix of each run
    o = near
    q = min(P - 1, fhi)
    while o >= 0 and run_lo[sb + o] > q:
        o = _bits_prev(lv0, lv1, lv2, o0, o1, o2, o)
    while q >= flo:
        if o < 0:
            cl_hi = max(cl_hi, q)
            cl_lo = flo
            break
        rlo = run_lo[sb + o]
        rhi = run_hi[sb + o]
        if q != rhi:
            break
        ownr = _chain_at(chain_ptr, chain_nodes, e, pr_sflip[p], o)
        if not _beats(xyz, dist, u, ownr, _chain_at(chain_ptr, chain_nodes, e2, df, q)):
            break
        r = max(rlo, flo)
        a = r
        b = q
        while a < b:
            mid = (a + b) // 2
            if _beats(xyz, dist, u, ownr, _chain_at(chain_ptr, chain_nodes, e2, df, mid)):
                b = mid
            else:
                a = mid + 1
        cl_hi = max(cl_hi, q)
        cl_lo = a
        stats[3] += 1
        prv = _bits_prev(lv0, lv1, lv2, o0, o1, o2, o)
        if a <= rlo:
            run_lo[sb + o] = 1
            run_hi[sb + o] = 0
            _bits_clear(lv0, lv1, lv2, o0, o1, o2, o)
        else:
            run_hi[sb + o] = a - 1
        if a > rlo or a == flo:
            break
        q = a - 1
        o = prv

    if cl_lo <= cl_hi:
        run_lo[sb + ku] = cl_lo
        run_hi[sb + ku] = cl_hi
        _bits_set(lv0, lv1, lv2, o0, o1, o2, ku)
        span[2 * p] = min(lo_o, cl_lo)
        span[2 * p + 1] = max(hi_o, cl_hi)
    return cl_lo, cl_hi


@kernel
def _iter_head(
    it, it_u, it_p, it_l, it_r, it_q, it_side, xyz, dist, run_lo, run_hi, node_pos,
    chain_ptr, chain_nodes, pr_src, pr_dst, pr_sflip, pr_dflip, pr_soff, up, down,
):
    """Move iterator ``it`` to its nearest live target; return (key, node) or node -1."""
    u = it_u[it]
    p = it_p[it]
    e = pr_src[p]
    e2 = pr_dst[p]
    df = pr_dflip[p]
    M = chain_ptr[e + 1] - chain_ptr[e]
    ku = M - 1 - node_pos[u] if pr_sflip[p] else node_pos[u]
    rlo = run_lo[pr_soff[p] + ku]
    rhi = run_hi[pr_soff[p] + ku]
    R = it_r[it]
    if R < rlo:
        R = rlo
    if R <= rhi:
        R = _next_live(R, 1, chain_ptr, e2, df, up, down)
    L = it_l[it]
    if L > rhi:
        L = rhi
    if L >= rlo:
        L = _next_live(L, -1, chain_ptr, e2, df, up, down)
    it_l[it] = L
    it_r[it] = R
    best = np.inf
    node = -1
    if rlo <= R <= rhi:
        v = _chain_at(chain_ptr, chain_nodes, e2, df, R)
        best = dist[u] + seg_len(xyz, u, v)
        node = v
        it_q[it] = R
        it_side[it] = 1
    if rlo <= L <= rhi:
        v = _chain_at(chain_ptr, chain_nodes, e2, df, L)
        key = dist[u] + seg_len(xyz, u, v)
        if node < 0 or key < best or (key == best and v < node):
            best = key
            node = v
            it_q[it] = L
            it_side[it] = 0
    return best, node


@kernel
def _nearest_position(xyz, u, chain_ptr, chain_nodes, e2, df, lo, hi):
    """Position in [lo, hi] closest to ``u`` (distance is unimodal along a segment)."""
    a = lo
    b = hi
    while a < b:
        mid = (a + b) // 2
        d0 = seg_len(xyz, u, _chain_at(chain_ptr, chain_nodes, e2, df, mid))
        d1 = seg_len(xyz, u, _chain_at(chain_ptr, chain_nodes, e2, df, mid + 1))
        if d1 < d0:
            a = mid + 1
        else:
            b = mid
    return a


@kernel
def _check_pair(
    p, xyz, dist, claimed, run_lo, run_hi, chain_ptr, chain_nodes, pr_src, pr_dst, pr_sflip,
    pr_dflip, pr_soff,
):
    """Count targets of pair ``p`` whose owner is not a cheapest feasible source."""
    e = pr_src[p]
    e2 = pr_dst[p]
    df = pr_dflip[p]
    sf = pr_sflip[p]
    M = chain_ptr[e + 1] - chain_ptr[e]
    m = chain_ptr[e2 + 1] - chain_ptr[e2]
    owner = np.full(m, -1, dtype=np.int64)
    bad = 0
    for k in range(1, M - 1):
        lo = run_lo[pr_soff[p] + k]
        hi = run_hi[pr_soff[p] + k]
        for q in range(lo, hi + 1):
            if owner[q] >= 0:
                bad += 1
            owner[q] = _chain_at(chain_ptr, chain_nodes, e, sf, k)
    for q in range(1, m):
        v = _chain_at(chain_ptr, chain_nodes, e2, df, q)
        best = np.inf
        for i in range(chain_ptr[e] + 1, chain_ptr[e + 1] - 1):
            u = chain_nodes[i]
            if claimed[u] and xyz[u, 2] >= xyz[v, 2]:
                f = dist[u] + seg_len(xyz, u, v)
                if f < best:
                    best = f
        o = owner[q]
        if o < 0:
            if best < np.inf:
                bad += 1
        elif xyz[o, 2] < xyz[v, 2] or dist[o] + seg_len(xyz, o, v) > best:
            bad += 1
    return bad


@kernel
def bushwhack_kernel(
    s, xyz, nv, node_edge, node_pos, chain_ptr, chain_nodes, edges, faces, edge_faces, face_edges,
    vf_ptr, vf, ve_ptr, ve, pr_src, pr_dst, pr_sflip, pr_dflip, pr_soff, pr_b0, pr_b1, pr_b2,
    edge_pairs, check,
):
    n = xyz.shape[0]
    npairs = pr_src.shape[0]
    ne = edges.shape[0]
    dist = np.full(n, np.inf)
    parent = np.full(n, -1, dtype=np.int64)
    settled = np.zeros(n, dtype=np.bool_)
    claimed = np.zeros(n, dtype=np.bool_)
    best = np.full(n, np.inf)
    best_par = np.full(n, -1, dtype=np.int64)
    buf = np.empty(n, dtype=np.int64)
    run_lo = np.ones(pr_soff[npairs], dtype=np.int64)
    run_hi = np.zeros(pr_soff[npairs], dtype=np.int64)
    span = np.empty(2 * npairs, dtype=np.int64)
    for p in range(npairs):
        span[2 * p] = 1
        span[2 * p + 1] = 0
    lv0 = np.zeros(pr_b0[npairs], dtype=np.uint64)
    lv1 = np.zeros(pr_b1[npairs], dtype=np.uint64)
    lv2 = np.zeros(pr_b2[npairs], dtype=np.uint64)
    # per-edge skip links over chain positions: up jumps forward, down backward
    total = chain_nodes.shape[0] + ne
    up = np.empty(total, dtype=np.int64)
    down = np.empty(total, dtype=np.int64)
    for e in range(ne):
        base = chain_ptr[e] + e
        for i in range(chain_ptr[e + 1] - chain_ptr[e] + 1):
            up[base + i] = i
            down[base + i] = i
    cap = 4 * n + 4
    it_u = np.empty(cap, dtype=np.int64)
    it_p = np.empty(cap, dtype=np.int64)
    it_l = np.empty(cap, dtype=np.int64)
    it_r = np.empty(cap, dtype=np.int64)
    it_q = np.empty(cap, dtype=np.int64)
    it_side = np.empty(cap, dtype=np.int64)
    n_it = 0
    # pops, pushes, claims, runs touched, iterators, check violations
    stats = np.zeros(6, dtype=np.int64)

    best[s] = 0.0
    heap = [(0.0, s, np.int64(-1), np.int64(-1))]
    stats[1] = 1
    while len(heap) > 0:
        d, v, u, it = heapq.heappop(heap)
        stats[0] += 1
        live = not settled[v]
        if live and it >= 0:
            # an iterator entry only counts while its source still owns v
            p = it_p[it]
            M = chain_ptr[pr_src[p] + 1] - chain_ptr[pr_src[p]]
            ku = M - 1 - node_pos[u] if pr_sflip[p] else node_pos[u]
            q = it_q[it]
            if q < run_lo[pr_soff[p] + ku] or q > run_hi[pr_soff[p] + ku]:
                live = False
        if live:
            settled[v] = True
            dist[v] = d
            parent[v] = u
            _mark_settled(v, nv, node_edge, node_pos, chain_ptr, edges, ve_ptr, ve, up, down)
            if v < nv:
                cnt = enumerate_successors(
                    v, xyz, nv, node_edge, chain_ptr, chain_nodes, edges, faces, edge_faces,
                    face_edges, vf_ptr, vf, ve_ptr, ve, buf,
                )
                for k in range(cnt):
                    y = buf[k]
                    if settled[y]:
                        continue
                    nd = d + seg_len(xyz, v, y)
                    if nd < best[y] or (nd == best[y] and v < best_par[y]):
                        best[y] = nd
                        best_par[y] = v
                        heapq.heappush(heap, (nd, y, v, np.int64(-1)))
                        stats[1] += 1
            else:
                e = node_edge[v]
                claimed[v] = True
                for k in range(4):
                    p = edge_pairs[e, k]
                    if p < 0:
                        continue
                    lo, hi = _claim(
                        p, v, xyz, dist, run_lo, run_hi, span, lv0, lv1, lv2, node_pos,
                        chain_ptr, chain_nodes, pr_src, pr_dst, pr_sflip, pr_dflip, pr_soff,
                        pr_b0, pr_b1, pr_b2, stats,
                    )
                    if check:
                        stats[5] += _check_pair(
                            p, xyz, dist, claimed, run_lo, run_hi, chain_ptr, chain_nodes,
                            pr_src, pr_dst, pr_sflip, pr_dflip, pr_soff,
                        )
                    if lo > hi:
                        continue
                    start = _nearest_position(xyz, v, chain_ptr, chain_nodes, pr_dst[p], pr_dflip[p], lo, hi)
                    j = n_it
                    n_it += 1
                    stats[4] += 1
                    it_u[j] = v
                    it_p[j] = p
                    it_l[j] = start - 1
                    it_r[j] = start
                    key, node = _iter_head(
                        j, it_u, it_p, it_l, it_r, it_q, it_side, xyz, dist, run_lo, run_hi,
                        node_pos, chain_ptr, chain_nodes, pr_src, pr_dst, pr_sflip, pr_dflip,
                        pr_soff, up, down,
                    )
                    if node >= 0:
                        heapq.heappush(heap, (key, node, v, np.int64(j)))
                        stats[1] += 1
        if it >= 0:
            if it_side[it] == 0:
                it_l[it] = it_q[it] - 1
            else:
                it_r[it] = it_q[it] + 1
            key, node = _iter_head(
                it, it_u, it_p, it_l, it_r, it_q, it_side, xyz, dist, run_lo, run_hi,
                node_pos, chain_ptr, chain_nodes, pr_src, pr_dst, pr_sflip, pr_dflip,
                pr_soff, up, down,
            )
            if node >= 0:
                heapq.heappush(heap, (key, node, it_u[it], it))
                stats[1] += 1
    return dist, parent, stats
