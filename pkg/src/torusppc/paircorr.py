"""Pair correlation statistics on the d-torus.

Two counters produce the statistic: ppc_naive scans all ordered pairs in
O(N^2) and is the reference; ppc_grid buckets points into toroidal cells of
side >= threshold and only examines same-and-adjacent cells.  Both call the
same exact comparison predicate, so their counts agree pair for pair, not
just statistically.

The predicate is exact: with threshold t (a binary64 value), a pair is
"near" iff its torus distance is <= t as real numbers.  Sup-norm compares
integer numerators against floor(t * 2**64); 2-norm compares the integer
sum of squared coordinate numerators against floor(t**2 * 2**128), using a
float64 filter plus an exact big-integer re-check for the rare borderline
pairs.  Boundary ties (distance exactly t) count as inside.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import numpy as np

from .fixedpoint import SCALE, points_to_array

_CHUNK_PAIRS = 1 << 22          # pair-predicate evaluations per vectorized chunk
_BORDER_BAND = 1e-11            # relative width of the exact-recheck band (2-norm)


class NormKind(Enum):
    SUP = "sup"
    TWO = "two"

    @classmethod
    def parse(cls, text: str) -> "NormKind":
        t = text.strip().lower()
        if t in ("sup", "inf", "max"):
            return cls.SUP
        if t in ("two", "2", "euclidean"):
            return cls.TWO
        raise ValueError(f"unknown norm {text!r}")


def unit_ball_volume(d: int) -> float:
    """Volume of the d-dimensional Euclidean unit ball."""
    return math.pi ** (d / 2) / math.gamma(d / 2 + 1)


def ppc_limit(s: float, d: int, norm: NormKind) -> float:
    """Poissonian limit of the statistic: (2s)^d for boxes, w_d s^d for balls."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    if norm is NormKind.SUP:
        return (2.0 * s) ** d
    return unit_ball_volume(d) * s ** d


@dataclass(frozen=True)
class PairCountResult:
    near_pairs: int            # ordered pairs m != n within the threshold
    N: int
    s: float
    statistic: float           # near_pairs / N
    limit: float               # Poissonian limit for (s, d, norm)
    expectation: float         # finite-size expectation limit * (N-1)/N
    norm: NormKind


@dataclass(frozen=True)
class _Threshold:
    """Exact comparison data for one threshold value t = s / N^(1/d)."""

    t: float
    sup_num: int               # floor(t * 2**64)
    two_num: int               # floor(t**2 * 2**128)
    two_num_f: float

    @classmethod
    def make(cls, t: float) -> "_Threshold":
        fr = Fraction(t)
        sup_num = int(fr * SCALE)
        two_num = int(fr * fr * SCALE * SCALE)
        return cls(t=t, sup_num=sup_num, two_num=two_num, two_num_f=float(two_num))


def _threshold_for(s: float, N: int, d: int) -> _Threshold:
    if s <= 0:
        raise ValueError("s must be > 0")
    t = s * N ** (-1.0 / d)
    if t >= 0.5:
        raise ValueError(
            f"threshold s/N^(1/d) = {t:.6g} >= 1/2: torus distances are capped "
            f"at 1/2, so the statistic would saturate (check s and N)"
        )
    return _Threshold.make(t)


def _count_near(pts: np.ndarray, ia: np.ndarray, ib: np.ndarray,
                norm: NormKind, thr: _Threshold) -> int:
    """Number of index pairs (ia[j], ib[j]) with torus distance <= t, exactly.

    This is the single comparison predicate shared by both counters.
    """
    if ia.size == 0:
        return 0
    d = pts.shape[1]
    if norm is NormKind.SUP:
        lim = np.uint64(thr.sup_num)    # < 2**63 since t < 1/2
        dmax = np.zeros(ia.size, dtype=np.uint64)
        for k in range(d):
            du = pts[ia, k] - pts[ib, k]
            dn = np.minimum(du, -du)
            np.maximum(dmax, dn, out=dmax)
        return int(np.count_nonzero(dmax <= lim))

    acc = np.zeros(ia.size, dtype=np.float64)
    for k in range(d):
        du = pts[ia, k] - pts[ib, k]
        dn = np.minimum(du, -du).astype(np.float64)
        acc += dn * dn
    bound = thr.two_num_f
    if bound == 0.0:
        inside = acc == 0.0
        return int(np.count_nonzero(inside))
    sure_in = acc <= bound * (1.0 - _BORDER_BAND)
    count = int(np.count_nonzero(sure_in))
    border = np.flatnonzero(~sure_in & (acc <= bound * (1.0 + _BORDER_BAND)))
    for j in border:
        ssq = 0
        for k in range(d):
            u = int(pts[ia[j], k])
            v = int(pts[ib[j], k])
            dd = (u - v) % SCALE
            dn = min(dd, SCALE - dd)
            ssq += dn * dn
        if ssq <= thr.two_num:
            count += 1
    return count


def pair_within(p, q, s: float, N: int, norm: NormKind) -> bool:
    """Scalar form of the shared predicate, for two TorusPoints."""
    pts = points_to_array([p, q])
    thr = _threshold_for(s, N, pts.shape[1])
    return _count_near(pts, np.array([0]), np.array([1]), norm, thr) == 1


def _result(near: int, N: int, s: float, d: int, norm: NormKind) -> PairCountResult:
    limit = ppc_limit(s, d, norm)
    return PairCountResult(
        near_pairs=near,
        N=N,
        s=s,
        statistic=near / N,
        limit=limit,
        expectation=limit * (N - 1) / N,
        norm=norm,
    )


def ppc_naive(points, s: float, norm: NormKind) -> PairCountResult:
    """Reference O(N^2) counter over all ordered pairs m != n."""
    pts = points_to_array(points)
    N, d = pts.shape
    if N < 2:
        raise ValueError("need at least 2 points")
    thr = _threshold_for(s, N, d)
    rows_per_chunk = max(1, _CHUNK_PAIRS // N)
    near = 0
    all_idx = np.arange(N)
    for lo in range(0, N, rows_per_chunk):
        hi = min(N, lo + rows_per_chunk)
        ia = np.repeat(np.arange(lo, hi), N)
        ib = np.tile(all_idx, hi - lo)
        near += _count_near(pts, ia, ib, norm, thr)
    near -= N  # diagonal pairs m == n are always within threshold
    return _result(near, N, s, d, norm)


def _cells_per_axis(t: float, d: int) -> int:
    """floor(1/t) capped so flattened cell ids fit a uint64 (cap keeps side >= t)."""
    m_exact = int(1 / Fraction(t))
    cap = min((1 << 31) - 1, int((1 << 62) ** (1.0 / d)))
    return max(2, min(m_exact, cap))


def _cell_coords(pts: np.ndarray, m: int) -> np.ndarray:
    """Exact cell index per coordinate: (numerator * m) >> 64, via 32-bit split."""
    m64 = np.uint64(m)
    lo32 = np.uint64(0xFFFFFFFF)
    hi = pts >> np.uint64(32)
    lo = pts & lo32
    a = hi * m64
    b = lo * m64
    return (a + (b >> np.uint64(32))) >> np.uint64(32)


def _expand_group_pairs(starts_a, counts_a, starts_b, counts_b, order):
    """Yield (ia, ib) chunks enumerating group(A_i) x group(B_i) for each i.

    Group sizes vary, so blocks are flattened with a segmented arange and
    emitted in chunks of at most _CHUNK_PAIRS pairs.
    """
    block = counts_a.astype(np.int64) * counts_b.astype(np.int64)
    total = int(block.sum())
    if total == 0:
        return
    cum = np.concatenate(([0], np.cumsum(block)))
    for lo in range(0, total, _CHUNK_PAIRS):
        hi = min(total, lo + _CHUNK_PAIRS)
        k = np.arange(lo, hi, dtype=np.int64)
        blk = np.searchsorted(cum, k, side="right") - 1
        k_local = k - cum[blk]
        nb = counts_b[blk]
        a_local = k_local // nb
        b_local = k_local % nb
        ia = order[starts_a[blk] + a_local]
        ib = order[starts_b[blk] + b_local]
        yield ia, ib


def ppc_grid(points, s: float, norm: NormKind) -> PairCountResult:
    """Cell-grid counter; identical count to ppc_naive by construction.

    [0,1)^d is split into m^d congruent toroidal cells with side 1/m >= t,
    so any pair within distance t (either norm) lies in the same or in
    coordinate-adjacent cells.  Only occupied cells are materialized; cell
    pairs reached through several wrap offsets (m <= 2 per axis) are
    deduplicated so no pair is tested twice.
    """
    pts = points_to_array(points)
    N, d = pts.shape
    if N < 2:
        raise ValueError("need at least 2 points")
    thr = _threshold_for(s, N, d)
    m = _cells_per_axis(thr.t, d)

    coords = _cell_coords(pts, m)
    weights = (np.uint64(m) ** np.arange(d, dtype=np.uint64))[::-1]
    ids = coords @ weights

    uniq, inv, counts = np.unique(ids, return_inverse=True, return_counts=True)
    order = np.argsort(inv, kind="stable")
    starts = np.concatenate(([0], np.cumsum(counts)))[:-1]
    n_occ = uniq.size
    occ_coords = coords[order[starts]]

    # candidate cell pairs: every occupied cell against each occupied neighbor
    pair_keys = []
    m_u = np.uint64(m)
    for delta in itertools.product((-1, 0, 1), repeat=d):
        if all(o == 0 for o in delta):
            continue
        ncoords = occ_coords.copy()
        for k, off in enumerate(delta):
            if off == 1:
                ncoords[:, k] += np.uint64(1)
                ncoords[ncoords[:, k] == m_u, k] = np.uint64(0)
            elif off == -1:
                wrap = ncoords[:, k] == np.uint64(0)
                ncoords[:, k] -= np.uint64(1)
                ncoords[wrap, k] = m_u - np.uint64(1)
        nids = ncoords @ weights
        j = np.searchsorted(uniq, nids)
        j[j >= n_occ] = 0
        hit = uniq[j] == nids
        a_idx = np.flatnonzero(hit).astype(np.uint64)
        b_idx = j[hit].astype(np.uint64)
        lo = np.minimum(a_idx, b_idx)
        hi = np.maximum(a_idx, b_idx)
        keep = lo != hi  # same-cell handled once below
        pair_keys.append(lo[keep] * np.uint64(n_occ) + hi[keep])

    near = 0

    # same-cell contribution: ordered pairs within each cell, diagonal removed
    multi = np.flatnonzero(counts >= 2)
    if multi.size:
        for ia, ib in _expand_group_pairs(starts[multi], counts[multi],
                                          starts[multi], counts[multi], order):
            near += _count_near(pts, ia, ib, norm, thr)
        near -= int(counts[multi].sum())

    # cross-cell contribution: each unordered cell pair once, ordered pairs = 2x
    if pair_keys:
        keys = np.unique(np.concatenate(pair_keys))
        if keys.size:
            a_cells = (keys // np.uint64(n_occ)).astype(np.int64)
            b_cells = (keys % np.uint64(n_occ)).astype(np.int64)
            cross = 0
            for ia, ib in _expand_group_pairs(starts[a_cells], counts[a_cells],
                                              starts[b_cells], counts[b_cells], order):
                cross += _count_near(pts, ia, ib, norm, thr)
            near += 2 * cross

    return _result(near, N, s, d, norm)
