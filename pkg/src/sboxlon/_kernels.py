"""Numba kernels for spectrum maintenance, neighbourhood scans and graphs.

Conventions shared by every kernel here:

* ``H`` is the (2^n, 2^n) int8 sign matrix ``H[a, b] = (-1)^(popcount(a & b))``.
* Spectra are int32 matrices with row ``v - 1`` holding the transform of the
  component selected by the nonzero mask ``v``.
* ``rowmax`` caches ``max_w |W[v, w]|`` per row; the pair ``(G, c)`` is the
  global maximum and the number of rows attaining it.  Maximizing fitness is
  equivalent to minimizing ``(G,)`` or ``(G, c)`` lexicographically, because
  the plain nonlinearity moves in steps of two while the tie indicator stays
  in (0, 1].
* Scan kernels take the running-best ``(G, c)`` and return a move only when
  it is strictly better, so the first of equally good moves always wins; the
  pair enumeration is ascending i, then ascending j.

Exchanging table[i] and table[j] shifts each spectrum cell by
``(H[v, b] - H[v, a]) * (H[w, i] - H[w, j])`` where a, b are the exchanged
outputs.  Only rows with odd ``v & (a ^ b)`` and columns with odd
``w & (i ^ j)`` move, each by exactly +-4, which is what the scan kernels
exploit.
"""

from __future__ import annotations

import numpy as np
from numba import njit

_JIT = dict(cache=True, nogil=True)


@njit(**_JIT)
def fwht_inplace(row):
    """In-place Walsh-Hadamard butterfly, length must be a power of two."""
    length = row.shape[0]
    h = 1
    while h < length:
        start = 0
        while start < length:
            for k in range(start, start + h):
                x = row[k]
                y = row[k + h]
                row[k] = x + y
                row[k + h] = x - y
            start += 2 * h
        h *= 2


@njit(**_JIT)
def spectrum_fill(table, H, out):
    """Fill ``out`` (2^n - 1, 2^n) with the spectra of all components."""
    size = table.shape[0]
    for v in range(1, size):
        row = out[v - 1]
        for x in range(size):
            row[x] = H[v, table[x]]
        fwht_inplace(row)


@njit(**_JIT)
def row_abs_max(W, rowmax):
    for r in range(W.shape[0]):
        m = 0
        for c in range(W.shape[1]):
            a = W[r, c]
            if a < 0:
                a = -a
            if a > m:
                m = a
        rowmax[r] = m


@njit(**_JIT)
def global_max_count(rowmax):
    """Largest cached row maximum and how many rows attain it."""
    g = 0
    c = 0
    for r in range(rowmax.shape[0]):
        m = rowmax[r]
        if m > g:
            g = m
            c = 1
        elif m == g:
            c += 1
    return g, c


@njit(**_JIT)
def swap_update(W, rowmax, table, H, i, j):
    """Apply the exact spectrum delta for exchanging table[i] and table[j].

    ``table`` is the pre-swap table; the caller swaps its entries afterwards.
    Touches only the affected half of the rows and refreshes their maxima.
    """
    size = table.shape[0]
    a = table[i]
    b = table[j]
    d = a ^ b
    e = i ^ j
    for v in range(1, size):
        if H[v, d] < 0:
            s = -4 * H[v, a]
            row = W[v - 1]
            m = 0
            for w in range(size):
                if H[w, e] < 0:
                    row[w] += s * H[w, i]
                val = row[w]
                if val < 0:
                    val = -val
                if val > m:
                    m = val
            rowmax[v - 1] = m


@njit(**_JIT)
def _pair_at(size, index):
    """Map a flat enumeration index to its (i, j) pair, ascending i then j."""
    i = 0
    remaining = index
    span = size - 1
    while remaining >= span:
        remaining -= span
        i += 1
        span -= 1
    return i, i + 1 + remaining


@njit(**_JIT)
def swap_scan(W, rowmax, table, H, best_g, best_c, use_count, lo, hi):
    """Best strictly improving swap in enumeration slots [lo, hi).

    Returns (i, j, g, c); i < 0 when nothing beats the running best
    (best_g, best_c).  ``use_count`` selects the tie-indicator fitness,
    otherwise only the global maximum is compared.
    """
    size = table.shape[0]
    nrows = size - 1
    if lo >= hi:
        return -1, -1, best_g, best_c

    # Per output-xor d: max and multiplicity of rowmax over unchanged rows.
    unch_max = np.zeros(size, np.int32)
    unch_cnt = np.zeros(size, np.int32)
    for d in range(1, size):
        um = np.int32(-1)
        uc = np.int32(0)
        for v in range(1, size):
            if H[v, d] > 0:
                rm = rowmax[v - 1]
                if rm > um:
                    um = rm
                    uc = 1
                elif rm == um:
                    uc += 1
        unch_max[d] = um
        unch_cnt[d] = uc

    # Per position-xor e: row maxima restricted to the unchanged columns.
    UC = np.zeros((nrows, size), np.int32)
    for e in range(1, size):
        for v in range(1, size):
            row = W[v - 1]
            m = 0
            for w in range(size):
                if H[w, e] > 0:
                    val = row[w]
                    if val < 0:
                        val = -val
                    if val > m:
                        m = val
            UC[v - 1, e] = m

    bg = best_g
    bc = best_c
    besti = -1
    bestj = -1
    i, j = _pair_at(size, lo)
    for _ in range(lo, hi):
        fi = table[i]
        fj = table[j]
        d = fi ^ fj
        e = i ^ j
        gm = unch_max[d]
        gc = unch_cnt[d]
        viable = True
        if gm > bg:
            viable = False
        elif use_count:
            if gm == bg and gc >= bc:
                viable = False
        else:
            if gm >= bg:
                viable = False
        if viable:
            for v in range(1, size):
                if H[v, d] < 0:
                    s = -H[v, fi]
                    row = W[v - 1]
                    m = UC[v - 1, e]
                    for w in range(size):
                        if H[w, e] < 0:
                            val = row[w] + 4 * s * H[w, i]
                            if val < 0:
                                val = -val
                            if val > m:
                                m = val
                    if m > gm:
                        gm = m
                        gc = 1
                    elif m == gm:
                        gc += 1
                    if gm > bg:
                        viable = False
                        break
                    if use_count:
                        if gm == bg and gc >= bc:
                            viable = False
                            break
                    elif gm >= bg:
                        viable = False
                        break
        if viable:
            bg = gm
            bc = gc
            besti = i
            bestj = j
        j += 1
        if j == size:
            i += 1
            j = i + 1
    return besti, bestj, bg, bc


@njit(**_JIT)
def invert_scan(rowmax, table, H, best_g, best_c, use_count, lo, hi):
    """Best strictly improving segment reversal in slots [lo, hi).

    Each candidate spectrum is rebuilt row by row with the fast butterfly;
    rows are visited worst-current-first so hopeless candidates die early.
    """
    size = table.shape[0]
    nrows = size - 1
    if lo >= hi:
        return -1, -1, best_g, best_c

    order = np.argsort(rowmax)[::-1].astype(np.int64)

    cand = np.empty(size, np.uint8)
    buf = np.empty(size, np.int32)
    bg = best_g
    bc = best_c
    besti = -1
    bestj = -1
    i, j = _pair_at(size, lo)
    for _ in range(lo, hi):
        for x in range(size):
            cand[x] = table[x]
        a = i
        b = j
        while a < b:
            t = cand[a]
            cand[a] = cand[b]
            cand[b] = t
            a += 1
            b -= 1
        gm = 0
        gc = 0
        viable = True
        for oi in range(nrows):
            v = order[oi] + 1
            for x in range(size):
                buf[x] = H[v, cand[x]]
            fwht_inplace(buf)
            m = 0
            for w in range(size):
                val = buf[w]
                if val < 0:
                    val = -val
                if val > m:
                    m = val
            if m > gm:
                gm = m
                gc = 1
            elif m == gm:
                gc += 1
            if gm > bg:
                viable = False
                break
            if use_count:
                if gm == bg and gc >= bc:
                    viable = False
                    break
            elif gm >= bg:
                viable = False
                break
        if viable:
            bg = gm
            bc = gc
            besti = i
            bestj = j
        j += 1
        if j == size:
            i += 1
            j = i + 1
    return besti, bestj, bg, bc


# ---------------------------------------------------------------------------
# Member hashing and LON edge detection.
# ---------------------------------------------------------------------------


@njit(**_JIT)
def zobrist_hashes(members, Z):
    """Position-value XOR hash per member row."""
    m, size = members.shape
    out = np.empty(m, np.uint64)
    for r in range(m):
        h = np.uint64(0)
        for x in range(size):
            h ^= Z[x, members[r, x]]
        out[r] = h
    return out


@njit(**_JIT)
def build_hash_table(hashes, capacity):
    """Open-addressing slot table mapping hash -> member row (linear probing)."""
    slots = np.full(capacity, -1, np.int64)
    mask = np.uint64(capacity - 1)
    for r in range(hashes.shape[0]):
        s = hashes[r] & mask
        while slots[s] >= 0:
            s = (s + np.uint64(1)) & mask
        slots[s] = r
    return slots


@njit(**_JIT)
def _probe_swapped(members, hashes, slots, mask, base, i, j, h):
    """Member row equal to ``base`` with positions i, j exchanged, or -1."""
    size = base.shape[0]
    s = h & mask
    while True:
        idx = slots[s]
        if idx < 0:
            return -1
        if hashes[idx] == h:
            row = members[idx]
            ok = True
            for x in range(size):
                bv = base[x]
                if x == i:
                    bv = base[j]
                elif x == j:
                    bv = base[i]
                if row[x] != bv:
                    ok = False
                    break
            if ok:
                return idx
        s = (s + np.uint64(1)) & mask


@njit(**_JIT)
def _probe_reversed(members, hashes, slots, mask, base, i, j, h):
    """Member row equal to ``base`` with segment [i..j] reversed, or -1."""
    size = base.shape[0]
    s = h & mask
    while True:
        idx = slots[s]
        if idx < 0:
            return -1
        if hashes[idx] == h:
            row = members[idx]
            ok = True
            for x in range(size):
                bv = base[i + j - x] if i <= x <= j else base[x]
                if row[x] != bv:
                    ok = False
                    break
            if ok:
                return idx
        s = (s + np.uint64(1)) & mask


@njit(**_JIT)
def edge_scan_swap(members, ordinals, hashes, slots, Z, out_pairs):
    """Append encoded basin pairs (lo << 32 | hi) for all swap adjacencies."""
    m, size = members.shape
    mask = np.uint64(slots.shape[0] - 1)
    for r in range(m):
        base = members[r]
        h0 = hashes[r]
        o = ordinals[r]
        for i in range(size - 1):
            zia = Z[i, base[i]]
            for j in range(i + 1, size):
                h = h0 ^ zia ^ Z[i, base[j]] ^ Z[j, base[j]] ^ Z[j, base[i]]
                idx = _probe_swapped(members, hashes, slots, mask, base, i, j, h)
                if idx >= 0:
                    oo = ordinals[idx]
                    if oo != o:
                        lohi = (np.uint64(min(o, oo)) << np.uint64(32)) | np.uint64(
                            max(o, oo)
                        )
                        out_pairs.append(lohi)


@njit(**_JIT)
def edge_scan_invert(members, ordinals, hashes, slots, Z, out_pairs):
    """Append encoded basin pairs for all segment-reversal adjacencies.

    Reversal hashes extend outwards around each segment center, so each
    neighbour costs O(1) hash work on top of the probe.
    """
    m, size = members.shape
    mask = np.uint64(slots.shape[0] - 1)
    for r in range(m):
        base = members[r]
        h0 = hashes[r]
        o = ordinals[r]
        for center in range(1, 2 * size - 2):
            if center % 2 == 1:
                i = (center - 1) // 2
                j = (center + 1) // 2
            else:
                i = center // 2 - 1
                j = center // 2 + 1
            h = h0
            while i >= 0 and j < size:
                h ^= (
                    Z[i, base[i]]
                    ^ Z[i, base[j]]
                    ^ Z[j, base[j]]
                    ^ Z[j, base[i]]
                )
                idx = _probe_reversed(members, hashes, slots, mask, base, i, j, h)
                if idx >= 0:
                    oo = ordinals[idx]
                    if oo != o:
                        lohi = (np.uint64(min(o, oo)) << np.uint64(32)) | np.uint64(
                            max(o, oo)
                        )
                        out_pairs.append(lohi)
                i -= 1
                j += 1


# ---------------------------------------------------------------------------
# Graph metrics on CSR adjacency.
# ---------------------------------------------------------------------------


@njit(**_JIT)
def bfs_path_sums(indptr, indices, sources):
    """Sum of BFS distances and count of reached (ordered) pairs."""
    n = indptr.shape[0] - 1
    dist = np.empty(n, np.int32)
    queue = np.empty(n, np.int64)
    total = np.int64(0)
    pairs = np.int64(0)
    for si in range(sources.shape[0]):
        s = sources[si]
        for x in range(n):
            dist[x] = -1
        head = 0
        tail = 0
        dist[s] = 0
        queue[tail] = s
        tail += 1
        while head < tail:
            u = queue[head]
            head += 1
            du = dist[u]
            for p in range(indptr[u], indptr[u + 1]):
                v = indices[p]
                if dist[v] < 0:
                    dist[v] = du + 1
                    queue[tail] = v
                    tail += 1
                    total += du + 1
                    pairs += 1
    return total, pairs


@njit(**_JIT)
def component_labels(indptr, indices):
    """Connected component label per node, labels in discovery order."""
    n = indptr.shape[0] - 1
    labels = np.full(n, -1, np.int64)
    queue = np.empty(n, np.int64)
    current = 0
    for s in range(n):
        if labels[s] >= 0:
            continue
        labels[s] = current
        head = 0
        tail = 0
        queue[tail] = s
        tail += 1
        while head < tail:
            u = queue[head]
            head += 1
            for p in range(indptr[u], indptr[u + 1]):
                v = indices[p]
                if labels[v] < 0:
                    labels[v] = current
                    queue[tail] = v
                    tail += 1
        current += 1
    return labels


@njit(**_JIT)
def triangle_counts(indptr, indices):
    """Twice the number of triangles through each node (adjacency sorted)."""
    n = indptr.shape[0] - 1
    out = np.zeros(n, np.int64)
    for v in range(n):
        acc = np.int64(0)
        for p in range(indptr[v], indptr[v + 1]):
            u = indices[p]
            # two-pointer intersection of sorted neighbour lists
            a = indptr[v]
            b = indptr[u]
            ea = indptr[v + 1]
            eb = indptr[u + 1]
            while a < ea and b < eb:
                x = indices[a]
                y = indices[b]
                if x == y:
                    acc += 1
                    a += 1
                    b += 1
                elif x < y:
                    a += 1
                else:
                    b += 1
        out[v] = acc
    return out
