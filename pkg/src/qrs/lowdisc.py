"""Low-discrepancy and uniform point generation on the unit cube.

Halton points come from per-axis radical inverses over the first ``dim``
primes. Sobol points XOR direction integers selected by the binary digits
of the point index (natural indexing, not Gray code), with direction
numbers expanded from the bundled new-joe-kuo-6 initialisation data.
Uniform points come from a counter-based Philox stream, so every generator
kind supports deterministic offset/seek semantics.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from . import _kernels

KINDS = ("halton", "sobol", "uniform")

DEFAULT_MAX_BITS = 30

_DIRECTION_DATA_FILE = "new-joe-kuo-6.txt"


@dataclass(frozen=True)
class GeneratorSpec:
    """Identity of a point stream: kind, dimension, seed and start offset.

    ``seed`` only affects the uniform kind; ``offset`` skips that many
    points from the start of the stream for every kind.
    """

    kind: str
    dim: int
    seed: int = 0
    offset: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.dim < 1:
            raise ValueError(f"dim must be >= 1, got {self.dim}")
        if self.offset < 0:
            raise ValueError(f"offset must be >= 0, got {self.offset}")
        if self.seed < 0:
            raise ValueError(f"seed must be >= 0, got {self.seed}")

    def advanced(self, n: int) -> "GeneratorSpec":
        """Spec for the same stream with the first ``n`` further points skipped."""
        return GeneratorSpec(self.kind, self.dim, self.seed, self.offset + n)


@dataclass(frozen=True)
class PointSet:
    """An (n, dim) float64 array of points plus the spec that produced it.

    ``lower``/``upper`` record the box the points live in; None means the
    unit cube [0, 1)^dim straight from the generator.
    """

    points: np.ndarray
    spec: GeneratorSpec
    lower: np.ndarray | None = None
    upper: np.ndarray | None = None

    def __post_init__(self):
        pts = np.ascontiguousarray(self.points, dtype=np.float64)
        if pts.ndim != 2:
            raise ValueError("points must be a 2-d array")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class SobolDirectionTable:
    """Direction integers v[j, k-1] = m_{k,j} * 2**(max_bits - k), uint64."""

    dim: int
    max_bits: int
    v: np.ndarray
    m_initial: tuple = field(repr=False, default=())

    def __post_init__(self):
        if self.v.shape != (self.dim, self.max_bits):
            raise ValueError("direction table shape mismatch")


def first_primes(k: int) -> np.ndarray:
    """The first k primes, ascending, starting at 2."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if k < 6:
        hi = 13
    else:
        # p_k < k (ln k + ln ln k) for k >= 6
        hi = int(k * (math.log(k) + math.log(math.log(k)))) + 1
    sieve = np.ones(hi + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, int(hi ** 0.5) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    primes = np.flatnonzero(sieve)
    if primes.shape[0] < k:
        raise RuntimeError("prime sieve bound too small")
    return primes[:k].astype(np.int64)


def radical_inverse(indices, base: int) -> np.ndarray:
    """Reflect the base-b digits of nonnegative indices about the radix point.

    Parameters
    ----------
    indices : int or array of int
        Nonnegative point indices.
    base : int
        Radix, at least 2.

    Returns
    -------
    ndarray of float64 in [0, 1), one value per index.
    """
    if base < 2:
        raise ValueError(f"base must be >= 2, got {base}")
    idx = np.atleast_1d(np.asarray(indices, dtype=np.int64))
    if idx.ndim != 1:
        raise ValueError("indices must be scalar or 1-d")
    if (idx < 0).any():
        raise ValueError("indices must be nonnegative")
    return _kernels.radical_inverse(idx, base)


def halton(n: int, dim: int, offset: int = 0) -> np.ndarray:
    """First ``n`` Halton points of the given dimension, starting at ``offset``.

    Axis j uses the radical inverse in the j-th prime base; index 0 maps to
    the origin.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if dim < 1:
        raise ValueError("dim must be >= 1")
    if offset < 0:
        raise ValueError("offset must be >= 0")
    idx = offset + np.arange(n, dtype=np.int64)
    out = np.empty((n, dim), dtype=np.float64)
    for j, base in enumerate(first_primes(dim)):
        out[:, j] = _kernels.radical_inverse(idx, int(base))
    return out


_direction_rows_cache: dict[int, tuple[int, int, tuple[int, ...]]] = {}
_table_cache: dict[tuple[int, int], SobolDirectionTable] = {}
_cache_lock = threading.Lock()


def _direction_rows() -> dict[int, tuple[int, int, tuple[int, ...]]]:
    """Parse the bundled direction-number file once: dim -> (s, a, m values)."""
    if _direction_rows_cache:
        return _direction_rows_cache
    text = (
        resources.files("qrs").joinpath("data").joinpath(_DIRECTION_DATA_FILE).read_text()
    )
    rows: dict[int, tuple[int, int, tuple[int, ...]]] = {}
    for line in text.splitlines()[1:]:
        parts = line.split()
        if not parts:
            continue
        d, s, a = int(parts[0]), int(parts[1]), int(parts[2])
        m = tuple(int(t) for t in parts[3 : 3 + s])
        if len(m) != s:
            raise ValueError(f"malformed direction-number row for d={d}")
        rows[d] = (s, a, m)
    _direction_rows_cache.update(rows)
    return _direction_rows_cache


def max_sobol_dim() -> int:
    return max(_direction_rows()) if _direction_rows() else 1


def build_sobol_table(dim: int, max_bits: int = DEFAULT_MAX_BITS) -> SobolDirectionTable:
    """Expand direction integers for ``dim`` axes up to ``max_bits`` bits.

    Axis 1 is the degenerate van der Corput column (all m = 1). Higher axes
    expand the bundled initial m values through the primitive-polynomial
    recursion m_k = 2 a_1 m_{k-1} xor ... xor 2^s m_{k-s} xor m_{k-s};
    every m_k must stay odd and below 2**k.
    """
    if dim < 1:
        raise ValueError("dim must be >= 1")
    if not 1 <= max_bits <= 62:
        raise ValueError("max_bits must be in [1, 62]")
    key = (dim, max_bits)
    with _cache_lock:
        cached = _table_cache.get(key)
    if cached is not None:
        return cached

    rows = _direction_rows()
    if dim > 1 and dim > max(rows):
        raise ValueError(
            f"dim {dim} exceeds the bundled direction-number data (max {max(rows)})"
        )
    v = np.zeros((dim, max_bits), dtype=np.uint64)
    m_initial = []
    for j in range(1, dim + 1):
        if j == 1:
            m = [1] * max_bits
        else:
            s, a, m_init = rows[j]
            m = list(m_init[:max_bits])
            for k in range(len(m), max_bits):
                # k is 0-based here: computing m_{k+1}
                new = m[k - s] ^ (m[k - s] << s)
                for i in range(1, s):
                    if (a >> (s - 1 - i)) & 1:
                        new ^= m[k - i] << i
                m.append(new)
        for k, mk in enumerate(m, start=1):
            if mk % 2 == 0 or mk >= (1 << k):
                raise ValueError(
                    f"invalid direction number m_{k} = {mk} for axis {j}"
                )
            v[j - 1, k - 1] = np.uint64(mk) << np.uint64(max_bits - k)
        m_initial.append(tuple(m[: min(8, max_bits)]))
    table = SobolDirectionTable(dim, max_bits, v, tuple(m_initial))
    with _cache_lock:
        _table_cache[key] = table
    return table


def sobol(
    n: int,
    dim: int,
    offset: int = 0,
    max_bits: int = DEFAULT_MAX_BITS,
    table: SobolDirectionTable | None = None,
) -> np.ndarray:
    """First ``n`` Sobol points of the given dimension, starting at ``offset``.

    Point i is the XOR of the direction integers at the set bits of i,
    scaled by 2**-max_bits. Natural index order: index 0 is the origin.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if offset < 0:
        raise ValueError("offset must be >= 0")
    if table is None:
        table = build_sobol_table(dim, max_bits)
    elif table.dim < dim or table.max_bits != max_bits:
        raise ValueError("supplied table does not cover dim/max_bits")
    if n + offset > (1 << max_bits):
        raise ValueError(
            f"n + offset = {n + offset} exceeds 2**max_bits = {1 << max_bits}"
        )
    idx = offset + np.arange(n, dtype=np.int64)
    ints = _kernels.sobol_integers(idx, table.v[:dim])
    return ints.astype(np.float64) * (2.0 ** -max_bits)


def uniform_random(n: int, dim: int, seed: int = 0, offset: int = 0) -> np.ndarray:
    """Pseudo-uniform points from a counter-based Philox stream.

    The stream is keyed by ``seed``; ``offset`` skips whole points, so
    generating N then M points with an advanced offset reproduces a single
    N+M generation bit for bit.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if dim < 1:
        raise ValueError("dim must be >= 1")
    if offset < 0:
        raise ValueError("offset must be >= 0")
    total = n * dim
    if total == 0:
        return np.empty((n, dim), dtype=np.float64)
    # draw t of the stream lives in Philox block t // 4, lane t % 4
    start = offset * dim
    block, lane = divmod(start, 4)
    n_blocks = (lane + total + 3) // 4
    bg = np.random.Philox(key=seed, counter=block)
    raw = np.random.Generator(bg).random(n_blocks * 4)
    return raw[lane : lane + total].reshape(n, dim)


def generate(spec: GeneratorSpec, n: int) -> PointSet:
    """Materialise ``n`` points of the stream described by ``spec``."""
    if spec.kind == "halton":
        pts = halton(n, spec.dim, spec.offset)
    elif spec.kind == "sobol":
        pts = sobol(n, spec.dim, spec.offset)
    else:
        pts = uniform_random(n, spec.dim, spec.seed, spec.offset)
    return PointSet(pts, spec)


def scale_to_box(ps: PointSet, lower, upper) -> PointSet:
    """Affinely map a unit-cube point set onto the box [lower, upper)."""
    lo = np.broadcast_to(np.asarray(lower, dtype=np.float64), (ps.dim,)).copy()
    hi = np.broadcast_to(np.asarray(upper, dtype=np.float64), (ps.dim,)).copy()
    if not (hi > lo).all():
        raise ValueError("upper must exceed lower on every axis")
    return PointSet(lo + ps.points * (hi - lo), ps.spec, lower=lo, upper=hi)


def write_csv(ps: PointSet, path) -> None:
    """Write points as CSV with header ``i,x1,...,xd`` and %.17g floats."""
    header = "i," + ",".join(f"x{j + 1}" for j in range(ps.dim))
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for i in range(ps.n):
            row = ",".join(f"{x:.17g}" for x in ps.points[i])
            fh.write(f"{i},{row}\n")
