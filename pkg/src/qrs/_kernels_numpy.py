"""Pure-numpy kernel implementations.

These are the fallback twins of the numba kernels in ``_kernels_numba``.
Both backends must return bit-identical results: every accumulation runs
in the same order, and all randomness is consumed from uniforms drawn by
the caller, never generated inside a kernel.
"""
from __future__ import annotations

import numpy as np


def radical_inverse(indices: np.ndarray, base: int) -> np.ndarray:
    """Van der Corput radical inverse of each index in the given base.

    Digits are consumed least-significant first, so the accumulation order
    matches the scalar loop in the numba twin exactly.
    """
    idx = indices.astype(np.int64, copy=True)
    out = np.zeros(idx.shape[0], dtype=np.float64)
    inv = 1.0 / base
    f = inv
    while (idx > 0).any():
        out += (idx % base) * f
        idx //= base
        f *= inv
    return out


def sobol_integers(indices: np.ndarray, v: np.ndarray) -> np.ndarray:
    """XOR-fold direction integers selected by the binary digits of each index.

    ``v`` has shape (dim, max_bits), entries are direction integers scaled to
    2**max_bits. Output shape (n, dim), dtype uint64. Integer arithmetic only,
    so backend parity is exact by construction.
    """
    idx = indices.astype(np.uint64, copy=True)
    n = idx.shape[0]
    d, bits = v.shape
    out = np.zeros((n, d), dtype=np.uint64)
    one = np.uint64(1)
    for r in range(bits):
        if not idx.any():
            break
        sel = (idx & one).astype(bool)
        if sel.any():
            out[sel] ^= v[:, r]
        idx >>= one
    return out


def star_disc_exact_nd(pts: np.ndarray, cands: np.ndarray, n_cand: np.ndarray) -> float:
    """Exact star discrepancy by corner enumeration.

    ``cands[j, :n_cand[j]]`` are the candidate corner coordinates for axis j
    (sorted point values plus 1.0). Evaluates closed and strict counts at every
    grid corner; the sup is attained there. Cost O(prod(n_cand) * N * d).
    """
    n_pts, d = pts.shape
    # per-axis membership matrices, float64 so the counting matmul hits BLAS
    le = [
        (pts[None, :, j] <= cands[j, : n_cand[j], None]).astype(np.float64)
        for j in range(d)
    ]
    lt = [
        (pts[None, :, j] < cands[j, : n_cand[j], None]).astype(np.float64)
        for j in range(d)
    ]
    best = 0.0
    idx = np.zeros(d - 1, dtype=np.int64) if d > 1 else None
    n_prefix = 1
    for j in range(d - 1):
        n_prefix *= int(n_cand[j])
    last = d - 1
    c_last = cands[last, : n_cand[last]]
    for _ in range(n_prefix):
        vol_prefix = 1.0
        if d > 1:
            prefix_le = le[0][idx[0]]
            prefix_lt = lt[0][idx[0]]
            vol_prefix = vol_prefix * cands[0, idx[0]]
            for j in range(1, d - 1):
                prefix_le = prefix_le * le[j][idx[j]]
                prefix_lt = prefix_lt * lt[j][idx[j]]
                vol_prefix = vol_prefix * cands[j, idx[j]]
            closed = le[last] @ prefix_le
            strict = lt[last] @ prefix_lt
        else:
            closed = le[last].sum(axis=1)
            strict = lt[last].sum(axis=1)
        vols = vol_prefix * c_last
        best = max(
            best,
            float(np.max(closed / n_pts - vols)),
            float(np.max(vols - strict / n_pts)),
        )
        if d > 1:
            j = d - 2
            while j >= 0:
                idx[j] += 1
                if idx[j] < n_cand[j]:
                    break
                idx[j] = 0
                j -= 1
    return best


def corner_deviations(pts: np.ndarray, corners: np.ndarray) -> np.ndarray:
    """Local star-discrepancy deviation at each corner (max of both one-sided gaps)."""
    n_pts, d = pts.shape
    le = (pts[None, :, :] <= corners[:, None, :]).all(axis=2)
    lt = (pts[None, :, :] < corners[:, None, :]).all(axis=2)
    closed = le.sum(axis=1).astype(np.float64)
    strict = lt.sum(axis=1).astype(np.float64)
    vol = corners[:, 0].astype(np.float64, copy=True)
    for j in range(1, d):
        vol *= corners[:, j]
    return np.maximum(closed / n_pts - vol, vol - strict / n_pts)


def fisher_yates_head(n: int, uniforms: np.ndarray) -> np.ndarray:
    """First len(uniforms) entries of a Fisher-Yates shuffle of range(n)."""
    m = uniforms.shape[0]
    perm = np.arange(n, dtype=np.int64)
    for j in range(m):
        k = j + int(uniforms[j] * (n - j))
        if k >= n:
            k = n - 1
        perm[j], perm[k] = perm[k], perm[j]
    return perm[:m].copy()


def weighted_draw(weights: np.ndarray, uniforms: np.ndarray) -> np.ndarray:
    """Sequential weighted draw without replacement.

    Each draw rebuilds the cumulative sum of the remaining weights and inverts
    one uniform through it, then zeroes the chosen weight. Weights must be
    nonnegative with at least len(uniforms) strictly positive entries.
    """
    w = weights.astype(np.float64, copy=True)
    m = uniforms.shape[0]
    n = w.shape[0]
    out = np.empty(m, dtype=np.int64)
    for t in range(m):
        cs = np.cumsum(w)
        target = uniforms[t] * cs[-1]
        idx = int(np.searchsorted(cs, target, side="right"))
        if idx >= n:
            idx = n - 1
        out[t] = idx
        w[idx] = 0.0
    return out


def coverage_trials(uniforms: np.ndarray, n_pool: int) -> int:
    """Count trials in which s batches of n_b draws covered every pool index.

    ``uniforms`` has shape (trials, s, n_b); each batch is a partial
    Fisher-Yates draw without replacement, restarted from the full pool.
    """
    n_trials, s, n_b = uniforms.shape
    seen = np.zeros((n_trials, n_pool), dtype=bool)
    rows = np.arange(n_trials)
    base = np.arange(n_pool, dtype=np.int64)
    for e in range(s):
        perm = np.tile(base, (n_trials, 1))
        for j in range(n_b):
            k = j + (uniforms[:, e, j] * (n_pool - j)).astype(np.int64)
            np.minimum(k, n_pool - 1, out=k)
            pj = perm[rows, j].copy()
            pk = perm[rows, k]
            perm[rows, j] = pk
            perm[rows, k] = pj
            seen[rows, pk] = True
    return int(seen.all(axis=1).sum())


def jet_act_fwd(
    Z: np.ndarray,
    S: np.ndarray,
    s: np.ndarray,
    tpp: np.ndarray,
    d: int,
    n: int,
    has_v2: bool,
) -> None:
    out = Z.shape[1]
    head = n + d * n
    V1 = Z[n:head].reshape(d, n, out)
    O1 = S[n:head].reshape(d, n, out)
    O2 = S[head:].reshape(d, n, out)
    np.multiply(V1, s, out=O1)
    np.multiply(V1, V1, out=O2)
    O2 *= tpp
    if has_v2:
        O2 += s * Z[head:].reshape(d, n, out)


def jet_act_bwd(
    C: np.ndarray,
    Z: np.ndarray,
    Zb: np.ndarray,
    s: np.ndarray,
    tpp: np.ndarray,
    tppp: np.ndarray,
    sum1: np.ndarray,
    sum2: np.ndarray,
    sum3: np.ndarray,
    d: int,
    n: int,
    has_v2: bool,
) -> None:
    out = C.shape[1]
    head = n + d * n
    A1 = C[n:head].reshape(d, n, out)
    A2 = C[head:].reshape(d, n, out)
    V1 = Z[n:head].reshape(d, n, out)
    tmp = np.multiply(A1, V1)
    tmp.sum(axis=0, out=sum1)
    AV = np.multiply(A2, V1)
    np.multiply(AV, V1, out=tmp)
    tmp.sum(axis=0, out=sum2)
    if has_v2:
        np.multiply(A2, Z[head:].reshape(d, n, out), out=tmp)
        tmp.sum(axis=0, out=sum3)
    zb = Zb[:n]
    np.multiply(C[:n], s, out=zb)
    sum1 *= tpp
    zb += sum1
    sum2 *= tppp
    zb += sum2
    if has_v2:
        sum3 *= tpp
        zb += sum3
    B1 = Zb[n:head].reshape(d, n, out)
    np.multiply(A1, s, out=B1)
    AV *= tpp
    AV *= 2.0
    B1 += AV
    np.multiply(A2, s, out=Zb[head:].reshape(d, n, out))
