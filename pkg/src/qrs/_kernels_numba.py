"""Numba kernel implementations.

Scalar-loop twins of ``_kernels_numpy``. Kept free of fastmath so float
accumulation order, and therefore every output bit, matches the numpy
fallback. Importing this module requires numba; compilation happens lazily
on first call and is cached on disk.
"""
from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def radical_inverse(indices, base):
    n = indices.shape[0]
    out = np.zeros(n, dtype=np.float64)
    inv = 1.0 / base
    for p in range(n):
        i = indices[p]
        f = inv
        r = 0.0
        while i > 0:
            r += (i % base) * f
            i //= base
            f *= inv
        out[p] = r
    return out


@njit(cache=True)
def sobol_integers(indices, v):
    n = indices.shape[0]
    d, bits = v.shape
    out = np.zeros((n, d), dtype=np.uint64)
    for p in range(n):
        i = np.uint64(indices[p])
        r = 0
        while i > np.uint64(0) and r < bits:
            if i & np.uint64(1):
                for j in range(d):
                    out[p, j] ^= v[j, r]
            i >>= np.uint64(1)
            r += 1
    return out


@njit(cache=True)
def star_disc_exact_nd(pts, cands, n_cand):
    n_pts, d = pts.shape
    total = 1
    for j in range(d):
        total *= n_cand[j]
    idx = np.zeros(d, dtype=np.int64)
    best = 0.0
    for _ in range(total):
        vol = 1.0
        for j in range(d):
            vol *= cands[j, idx[j]]
        closed = 0
        strict = 0
        for p in range(n_pts):
            inside_closed = True
            inside_strict = True
            for j in range(d):
                x = pts[p, j]
                y = cands[j, idx[j]]
                if x > y:
                    inside_closed = False
                    inside_strict = False
                    break
                if x >= y:
                    inside_strict = False
            if inside_closed:
                closed += 1
                if inside_strict:
                    strict += 1
        dev_closed = closed / n_pts - vol
        dev_open = vol - strict / n_pts
        if dev_closed > best:
            best = dev_closed
        if dev_open > best:
            best = dev_open
        j = d - 1
        while j >= 0:
            idx[j] += 1
            if idx[j] < n_cand[j]:
                break
            idx[j] = 0
            j -= 1
    return best


@njit(cache=True)
def corner_deviations(pts, corners):
    n_pts, d = pts.shape
    m = corners.shape[0]
    out = np.empty(m, dtype=np.float64)
    for c in range(m):
        vol = corners[c, 0]
        for j in range(1, d):
            vol *= corners[c, j]
        closed = 0
        strict = 0
        for p in range(n_pts):
            inside_closed = True
            inside_strict = True
            for j in range(d):
                x = pts[p, j]
                y = corners[c, j]
                if x > y:
                    inside_closed = False
                    inside_strict = False
                    break
                if x >= y:
                    inside_strict = False
            if inside_closed:
                closed += 1
                if inside_strict:
                    strict += 1
        dev_closed = closed / n_pts - vol
        dev_open = vol - strict / n_pts
        out[c] = dev_closed if dev_closed > dev_open else dev_open
    return out


@njit(cache=True)
def fisher_yates_head(n, uniforms):
    m = uniforms.shape[0]
    perm = np.arange(n)
    for j in range(m):
        k = j + int(uniforms[j] * (n - j))
        if k >= n:
            k = n - 1
        tmp = perm[j]
        perm[j] = perm[k]
        perm[k] = tmp
    return perm[:m].copy()


@njit(cache=True)
def weighted_draw(weights, uniforms):
    n = weights.shape[0]
    m = uniforms.shape[0]
    w = weights.astype(np.float64)
    cs = np.empty(n, dtype=np.float64)
    out = np.empty(m, dtype=np.int64)
    for t in range(m):
        acc = 0.0
        for i in range(n):
            acc += w[i]
            cs[i] = acc
        target = uniforms[t] * acc
        # first index with cs > target, i.e. searchsorted side="right"
        lo = 0
        hi = n
        while lo < hi:
            mid = (lo + hi) // 2
            if cs[mid] > target:
                hi = mid
            else:
                lo = mid + 1
        idx = lo
        if idx >= n:
            idx = n - 1
        out[t] = idx
        w[idx] = 0.0
    return out


@njit(cache=True)
def jet_act_fwd(Z, S, s, tpp, d, n, has_v2):
    out = Z.shape[1]
    for j in range(d):
        r1 = n + j * n
        r2 = n + d * n + j * n
        for i in range(n):
            for o in range(out):
                v1 = Z[r1 + i, o]
                S[r1 + i, o] = v1 * s[i, o]
                acc = (v1 * v1) * tpp[i, o]
                if has_v2:
                    acc += s[i, o] * Z[r2 + i, o]
                S[r2 + i, o] = acc


@njit(cache=True)
def jet_act_bwd(C, Z, Zb, s, tpp, tppp, sum1, sum2, sum3, d, n, has_v2):
    out = C.shape[1]
    for i in range(n):
        for o in range(out):
            sum1[i, o] = 0.0
            sum2[i, o] = 0.0
            sum3[i, o] = 0.0
    for j in range(d):
        r1 = n + j * n
        r2 = n + d * n + j * n
        for i in range(n):
            for o in range(out):
                a1 = C[r1 + i, o]
                a2 = C[r2 + i, o]
                v1 = Z[r1 + i, o]
                sum1[i, o] += a1 * v1
                av = a2 * v1
                sum2[i, o] += av * v1
                if has_v2:
                    sum3[i, o] += a2 * Z[r2 + i, o]
                Zb[r1 + i, o] = a1 * s[i, o] + (av * tpp[i, o]) * 2.0
                Zb[r2 + i, o] = a2 * s[i, o]
    for i in range(n):
        for o in range(out):
            acc = C[i, o] * s[i, o]
            acc += sum1[i, o] * tpp[i, o]
            acc += sum2[i, o] * tppp[i, o]
            if has_v2:
                acc += sum3[i, o] * tpp[i, o]
            Zb[i, o] = acc


@njit(cache=True)
def coverage_trials(uniforms, n_pool):
    n_trials, s, n_b = uniforms.shape
    perm = np.empty(n_pool, dtype=np.int64)
    seen = np.empty(n_pool, dtype=np.bool_)
    covered = 0
    for t in range(n_trials):
        for i in range(n_pool):
            seen[i] = False
        for e in range(s):
            for i in range(n_pool):
                perm[i] = i
            for j in range(n_b):
                k = j + int(uniforms[t, e, j] * (n_pool - j))
                if k >= n_pool:
                    k = n_pool - 1
                tmp = perm[j]
                perm[j] = perm[k]
                perm[k] = tmp
                seen[perm[j]] = True
        ok = True
        for i in range(n_pool):
            if not seen[i]:
                ok = False
                break
        if ok:
            covered += 1
    return covered
