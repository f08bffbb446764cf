"""Compiled inner loops on flattened axial windows (index = row * nx + col)."""
import numpy as np
from numba import njit

INF = np.iinfo(np.int64).max // 4

_DX = np.array([1, 0, -1, -1, 0, 1], dtype=np.int64)
_DY = np.array([0, 1, 1, 0, -1, -1], dtype=np.int64)


@njit(cache=True, nogil=True)
def zero_one_search(cost, allowed, init, nx, ny, target):
    """Two-level bucket search for vertex weights in {0, 1}.

    ``init`` holds the starting label of every source (INF elsewhere); entering
    vertex v costs ``cost[v]``.  Stops early once ``target`` (>= 0) is settled.
    Returns (dist, parent, explored).
    """
    n = nx * ny
    dist = init.copy()
    parent = np.full(n, -1, dtype=np.int64)
    done = np.zeros(n, dtype=np.bool_)
    src = np.nonzero(dist < INF)[0]
    if src.shape[0] == 0:
        return dist, parent, 0
    order = np.argsort(dist[src], kind="mergesort")
    src = src[order]
    src_d = init[src]
    cap = n + src.shape[0] + 8
    cur = np.empty(cap, dtype=np.int64)
    nxt = np.empty(cap, dtype=np.int64)
    ncur = 0
    nnxt = 0
    si = 0
    d = src_d[0]
    explored = 0
    while True:
        while si < src.shape[0] and src_d[si] <= d:
            cur[ncur] = src[si]
            ncur += 1
            si += 1
        while ncur > 0:
            ncur -= 1
            u = cur[ncur]
            if done[u] or dist[u] != d:
                continue
            done[u] = True
            explored += 1
            if u == target:
                return dist, parent, explored
            ux = u % nx
            uy = u // nx
            for k in range(6):
                vx = ux + _DX[k]
                vy = uy + _DY[k]
                if vx < 0 or vx >= nx or vy < 0 or vy >= ny:
                    continue
                v = vy * nx + vx
                if done[v] or not allowed[v]:
                    continue
                nd = d + cost[v]
                if nd < dist[v]:
                    dist[v] = nd
                    parent[v] = u
                    if cost[v] == 0:
                        cur[ncur] = v
                        ncur += 1
                    else:
                        nxt[nnxt] = v
                        nnxt += 1
        if nnxt == 0:
            if si >= src.shape[0]:
                break
            d = src_d[si]
            continue
        cur, nxt = nxt, cur
        ncur = nnxt
        nnxt = 0
        d += 1
    return dist, parent, explored


def trace_back(parent, end):
    out = []
    v = int(end)
    while v >= 0:
        out.append(v)
        v = int(parent[v])
    out.reverse()
    return out


@njit(cache=True, nogil=True)
def bounded_bfs_all(allowed, sources, targets_mask, nx, ny, max_depth):
    """For each source, BFS on ``allowed`` until every target is reached.

    Returns the largest distance needed over all sources, or -1 as soon as
    some target is farther than ``max_depth`` (or unreachable).
    """
    n = nx * ny
    n_targets = 0
    for i in range(n):
        if targets_mask[i]:
            n_targets += 1
    stamp = np.zeros(n, dtype=np.int64)
    dist = np.zeros(n, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    worst = 0
    for si in range(sources.shape[0]):
        s = sources[si]
        tag = si + 1
        stamp[s] = tag
        dist[s] = 0
        head = 0
        tail = 1
        queue[0] = s
        found = 1 if targets_mask[s] else 0
        reach = 0
        while head < tail and found < n_targets:
            u = queue[head]
            head += 1
            du = dist[u]
            if du >= max_depth:
                break
            ux = u % nx
            uy = u // nx
            for k in range(6):
                vx = ux + _DX[k]
                vy = uy + _DY[k]
                if vx < 0 or vx >= nx or vy < 0 or vy >= ny:
                    continue
                v = vy * nx + vx
                if stamp[v] == tag or not allowed[v]:
                    continue
                stamp[v] = tag
                dist[v] = du + 1
                queue[tail] = v
                tail += 1
                if targets_mask[v]:
                    found += 1
                    reach = du + 1
        if found < n_targets:
            return -1
        if reach > worst:
            worst = reach
    return worst


@njit(cache=True, nogil=True)
def subset_scan(nbr, g, max_size, n_local, max_keep):
    """Minimum of |boundary(H)| / |H| over nonempty H within the first ``g`` local vertices.

    ``nbr[i]`` lists local neighbour indices (-1 padded) of the i-th vertex of
    the ground set; boundary vertices may have any local index < ``n_local``.
    Returns (num, den, masks of all minimizers (up to max_keep), count).
    """
    stamp = np.zeros(n_local, dtype=np.int64)
    in_h = np.zeros(n_local, dtype=np.int64)
    best_num = 1
    best_den = 0
    keep = np.zeros(max_keep, dtype=np.int64)
    count = 0
    tag = 0
    for mask in range(1, 1 << g):
        size = 0
        m = mask
        while m:
            m &= m - 1
            size += 1
        if size > max_size:
            continue
        tag += 1
        for i in range(g):
            if (mask >> i) & 1:
                in_h[i] = tag
        b = 0
        for i in range(g):
            if (mask >> i) & 1:
                for k in range(nbr.shape[1]):
                    w = nbr[i, k]
                    if w < 0 or in_h[w] == tag or stamp[w] == tag:
                        continue
                    stamp[w] = tag
                    b += 1
        lhs = b * best_den
        rhs = best_num * size
        if best_den == 0 or lhs < rhs:
            best_num = b
            best_den = size
            count = 0
        elif lhs != rhs:
            continue
        if count < max_keep:
            keep[count] = mask
        count += 1
    return best_num, best_den, keep[:min(count, max_keep)], count


@njit(cache=True, nogil=True)
def anchored_scan(nbr, root, n, max_keep):
    """Minimum of |boundary(H)| / |H| over connected H containing ``root`` with |H| <= n.

    Each connected set is visited once (extension with exclusive neighbours).
    Returns (num, den, minimizers as rows of local indices padded with -1, count, visited).
    """
    m = nbr.shape[0]
    mark = np.full(m, -1, dtype=np.int64)
    in_h = np.zeros(m, dtype=np.bool_)
    cnt = np.zeros(m, dtype=np.int64)
    width = 6 * n + 6
    ext = np.empty((n + 1, width), dtype=np.int64)
    extlen = np.zeros(n + 1, dtype=np.int64)
    newn = np.empty((n + 1, 6), dtype=np.int64)
    newlen = np.zeros(n + 1, dtype=np.int64)
    h = np.empty(n, dtype=np.int64)
    keep = np.full((max_keep, n), -1, dtype=np.int64)
    count = 0
    visited = 0
    best_num = 1
    best_den = 0
    bsize = 0

    # level 0: H = {root}
    h[0] = root
    in_h[root] = True
    mark[root] = 0
    for k in range(6):
        w = nbr[root, k]
        if w < 0:
            continue
        cnt[w] += 1
        if cnt[w] == 1:
            bsize += 1
        if mark[w] < 0:
            mark[w] = 0
            ext[0, extlen[0]] = w
            extlen[0] += 1
    d = 0
    fresh = True
    while True:
        if fresh:
            visited += 1
            size = d + 1
            lhs = bsize * best_den
            rhs = best_num * size
            better = best_den == 0 or lhs < rhs
            if better or lhs == rhs:
                if better:
                    best_num = bsize
                    best_den = size
                    count = 0
                if count < max_keep:
                    for i in range(size):
                        keep[count, i] = h[i]
                    for i in range(size, n):
                        keep[count, i] = -1
                count += 1
            fresh = False
        if d + 1 < n and extlen[d] > 0:
            extlen[d] -= 1
            v = ext[d, extlen[d]]
            nd = d + 1
            for i in range(extlen[d]):
                ext[nd, i] = ext[d, i]
            extlen[nd] = extlen[d]
            newlen[nd] = 0
            for k in range(6):
                w = nbr[v, k]
                if w >= 0 and mark[w] < 0:
                    mark[w] = nd
                    ext[nd, extlen[nd]] = w
                    extlen[nd] += 1
                    newn[nd, newlen[nd]] = w
                    newlen[nd] += 1
            # add v
            if cnt[v] > 0:
                bsize -= 1
            in_h[v] = True
            for k in range(6):
                w = nbr[v, k]
                if w < 0:
                    continue
                cnt[w] += 1
                if cnt[w] == 1 and not in_h[w]:
                    bsize += 1
            h[nd] = v
            d = nd
            fresh = True
            continue
        if d == 0:
            break
        v = h[d]
        for k in range(6):
            w = nbr[v, k]
            if w < 0:
                continue
            cnt[w] -= 1
            if cnt[w] == 0 and not in_h[w]:
                bsize -= 1
        in_h[v] = False
        if cnt[v] > 0:
            bsize += 1
        for i in range(newlen[d]):
            mark[newn[d, i]] = -1
        d -= 1
    return best_num, best_den, keep[:min(count, max_keep)], count, visited


@njit(cache=True, nogil=True)
def _flip_delta(nbr, in_h, cnt, u):
    """Change of the boundary count if vertex u changes side."""
    d = 0
    if in_h[u]:
        if cnt[u] > 0:
            d += 1
        for k in range(nbr.shape[1]):
            w = nbr[u, k]
            if w >= 0 and not in_h[w] and cnt[w] == 1:
                d -= 1
    else:
        if cnt[u] > 0:
            d -= 1
        for k in range(nbr.shape[1]):
            w = nbr[u, k]
            if w >= 0 and not in_h[w] and w != u and cnt[w] == 0:
                d += 1
    return d


@njit(cache=True, nogil=True)
def _flip(nbr, in_h, cnt, u):
    s = -1 if in_h[u] else 1
    in_h[u] = not in_h[u]
    for k in range(nbr.shape[1]):
        w = nbr[u, k]
        if w >= 0:
            cnt[w] += s


@njit(cache=True, nogil=True)
def _boundary_size(nbr, in_h, cnt):
    b = 0
    for w in range(in_h.shape[0]):
        if not in_h[w] and cnt[w] > 0:
            b += 1
    return b


@njit(cache=True, nogil=True)
def _init_state(nbr, init, m):
    in_h = np.zeros(m, dtype=np.bool_)
    cnt = np.zeros(m, dtype=np.int64)
    for u in range(init.shape[0]):
        if init[u]:
            _flip(nbr, in_h, cnt, u)
    return in_h, cnt


@njit(cache=True, nogil=True)
def anneal_kernel(nbr, g, max_size, init, n_moves, t0, t1, seed):
    """Metropolis annealing of |boundary(H)| / |H| over H within the first g local vertices.

    Moves flip a vertex on the edge of H; the temperature is measured in units
    of 1/|H| and cools geometrically from t0 to t1.  Returns (best mask, num, den).
    """
    np.random.seed(seed)
    m = nbr.shape[0]
    in_h, cnt = _init_state(nbr, init, m)
    size = 0
    for u in range(g):
        if in_h[u]:
            size += 1
    b = _boundary_size(nbr, in_h, cnt)
    best = in_h[:g].copy()
    best_num, best_den = b, size
    lst = np.empty(g + 7 * n_moves + 1, dtype=np.int64)
    in_list = np.zeros(g, dtype=np.bool_)
    nl = 0
    for u in range(g):
        if cnt[u] > 0 or in_h[u]:
            lst[nl] = u
            nl += 1
            in_list[u] = True
    if size == 0 or nl == 0:
        return best, best_num, best_den
    ratio = np.log(t1 / t0) / max(n_moves - 1, 1)
    moves = 0
    while moves < n_moves and nl > 0:
        j = np.random.randint(nl)
        u = lst[j]
        edge = False
        if in_h[u]:
            for k in range(nbr.shape[1]):
                w = nbr[u, k]
                if w < 0 or not in_h[w]:
                    edge = True
                    break
        else:
            edge = cnt[u] > 0
        if not edge:
            nl -= 1
            lst[j] = lst[nl]
            in_list[u] = False
            continue
        temp = t0 * np.exp(ratio * moves)
        moves += 1
        new_size = size - 1 if in_h[u] else size + 1
        if new_size < 1 or new_size > max_size:
            continue
        nb = b + _flip_delta(nbr, in_h, cnt, u)
        delta = (nb / new_size - b / size) * size
        if delta > 0 and np.random.random() >= np.exp(-delta / temp):
            continue
        _flip(nbr, in_h, cnt, u)
        b = nb
        size = new_size
        for k in range(-1, nbr.shape[1]):
            w = u if k < 0 else nbr[u, k]
            if 0 <= w < g and not in_list[w]:
                lst[nl] = w
                nl += 1
                in_list[w] = True
        if b * best_den < best_num * size:
            best_num, best_den = b, size
            best[:] = in_h[:g]
    return best, best_num, best_den


@njit(cache=True, nogil=True)
def polish_kernel(nbr, g, max_size, init):
    """Greedy single flips that strictly lower the ratio, until none is left."""
    m = nbr.shape[0]
    in_h, cnt = _init_state(nbr, init, m)
    size = 0
    for u in range(g):
        if in_h[u]:
            size += 1
    b = _boundary_size(nbr, in_h, cnt)
    improved = True
    while improved:
        improved = False
        for u in range(g):
            new_size = size - 1 if in_h[u] else size + 1
            if new_size < 1 or new_size > max_size:
                continue
            if not in_h[u] and cnt[u] == 0:
                continue
            nb = b + _flip_delta(nbr, in_h, cnt, u)
            if nb * size < b * new_size:
                _flip(nbr, in_h, cnt, u)
                b, size = nb, new_size
                improved = True
    return in_h[:g].copy(), b, size
