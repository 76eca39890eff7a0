"""Classical and d-dimensional GCD sums, plus a random multiplicative model.

The Hermitian form S_f(d; alpha) = sum f(a) conj(f(b)) prod_i
gcd(a_i,b_i)^(2 alpha) / (a_i b_i)^alpha is evaluated directly in O(K^2)
over the support.  A seeded random completely multiplicative function with
uniform unit-circle values at primes drives Monte Carlo checks of the
second-moment identity E|zeta_X zeta_Y D|^2 = zeta(2a)^2 S_f(2; a): under a
cutoff M the identity becomes exact and finite (the h-sums truncate), which
is what verify_eq0 tests against simulation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .energy import RepresentationTable, _unique_counts_rows_with_sum

DEFAULT_MAX_SUPPORT = 20_000    # O(K^2) kernel guard


@dataclass
class WeightedSupport:
    """Finitely supported complex weight function on N^d.

    entries maps support tuples (all components >= 1) to complex weights;
    the canonical array form plus both norms are cached at construction.
    """

    d: int
    entries: Mapping[tuple[int, ...], complex]
    points: np.ndarray = field(init=False, repr=False)
    weights: np.ndarray = field(init=False, repr=False)
    norm_l1: float = field(init=False)
    norm_l2_sq: float = field(init=False)

    def __post_init__(self) -> None:
        if not self.entries:
            raise ValueError("support must be nonempty")
        keys = sorted(self.entries)
        for key in keys:
            if len(key) != self.d:
                raise ValueError(f"support point {key} has wrong dimension")
            if any(c < 1 for c in key):
                raise ValueError(f"support point {key} has a component < 1")
        self.points = np.array(keys, dtype=np.int64)
        self.weights = np.array([complex(self.entries[k]) for k in keys], dtype=np.complex128)
        self.norm_l1 = float(np.abs(self.weights).sum())
        self.norm_l2_sq = float((np.abs(self.weights) ** 2).sum())

    @property
    def K(self) -> int:
        return self.points.shape[0]

    def verify_cached_norms(self, tol: float = 1e-12) -> bool:
        l1 = sum(abs(complex(w)) for w in self.entries.values())
        l2 = sum(abs(complex(w)) ** 2 for w in self.entries.values())
        return abs(l1 - self.norm_l1) <= tol * (1 + l1) and abs(l2 - self.norm_l2_sq) <= tol * (1 + l2)

    @classmethod
    def ones(cls, points: Sequence[Sequence[int]]) -> "WeightedSupport":
        pts = [tuple(int(c) for c in p) for p in points]
        return cls(d=len(pts[0]), entries={p: 1.0 for p in pts})


def gcd_sum(f: WeightedSupport, alpha: float, block: int = 2048,
            max_support: int = DEFAULT_MAX_SUPPORT) -> float:
    """S_f(d; alpha): real and >= 0 for any complex weights (PSD Gram kernel)."""
    if not 0 < alpha <= 1:
        raise ValueError("alpha must lie in (0, 1]")
    if f.K > max_support:
        raise ValueError(f"support size {f.K} exceeds O(K^2) guard {max_support}")
    pts = f.points
    w = f.weights
    powers = pts.astype(np.float64) ** (-alpha)      # a_i^(-alpha) per coordinate
    acc = 0.0 + 0.0j
    for lo in range(0, f.K, block):
        hi = min(f.K, lo + block)
        kern = np.ones((hi - lo, f.K))
        for i in range(f.d):
            g = np.gcd(pts[lo:hi, i:i + 1], pts[None, :, i])
            kern *= g.astype(np.float64) ** (2.0 * alpha)
            kern *= powers[lo:hi, i:i + 1] * powers[None, :, i]
        acc += w[lo:hi] @ (kern @ np.conj(w))
    if abs(acc.imag) > 1e-9 * (abs(acc.real) + 1):
        raise AssertionError(f"GCD sum came out non-real: {acc}")
    return float(acc.real)


def gcd_sum_enumerate(f: WeightedSupport, alpha: float) -> float:
    """Direct double-loop evaluation (test oracle for gcd_sum)."""
    total = 0.0 + 0.0j
    items = [(k, complex(v)) for k, v in sorted(f.entries.items())]
    for a, fa in items:
        for b, fb in items:
            kern = 1.0
            for ai, bi in zip(a, b):
                kern *= math.gcd(ai, bi) ** (2 * alpha) / (ai * bi) ** alpha
            total += fa * fb.conjugate() * kern
    return total.real


def support_from_representations(table: RepresentationTable) -> WeightedSupport:
    """Fold the nonzero difference vectors of a table onto N^d by absolute value.

    gcd and |v_i| ignore signs, so the double sum over signed vectors equals
    the folded sum with weights f(|v|) accumulating the counts of every sign
    pattern mapping to |v|.
    """
    vectors, counts = table.restrict_nonzero()
    if vectors.shape[0] == 0:
        raise ValueError(
            "no all-nonzero difference vectors: the sequences share no repeated "
            "differences beyond the diagonal"
        )
    folded, summed = _unique_counts_rows_with_sum(np.abs(vectors), counts)
    entries = {tuple(int(c) for c in row): float(cnt) for row, cnt in zip(folded, summed)}
    return WeightedSupport(d=table.d, entries=entries)


def gcd_sum_from_representations(table: RepresentationTable, alpha: float,
                                 max_support: int = DEFAULT_MAX_SUPPORT) -> float:
    """The variance-proxy GCD sum S_f(d; alpha) with f built from R_N."""
    f = support_from_representations(table)
    return gcd_sum(f, alpha, max_support=max_support)


# ---------------------------------------------------------------------------
# random multiplicative model
# ---------------------------------------------------------------------------

def _sieve_spf(m: int) -> np.ndarray:
    """Smallest prime factor for 0..m (spf[0] = spf[1] = 0)."""
    spf = np.zeros(m + 1, dtype=np.int64)
    for p in range(2, m + 1):
        if spf[p] == 0:
            spf[p::p][spf[p::p] == 0] = p
    return spf


def primes_up_to(m: int) -> list[int]:
    spf = _sieve_spf(m)
    return [p for p in range(2, m + 1) if spf[p] == p]


@dataclass(frozen=True)
class RandomMultiplicativeSample:
    """One realization X of a random completely multiplicative function.

    X(p) is uniform on the unit circle, independently per prime <= cutoff;
    X(n) extends by X(p^a || n) -> X(p)^a, so |X(n)| = 1 and
    X(mn) = X(m) X(n) whenever mn <= cutoff.
    """

    cutoff: int
    prime_phases: dict[int, complex]
    values: np.ndarray          # complex128, index n in [0, cutoff]; values[0] unused

    def value(self, n: int) -> complex:
        if not 1 <= n <= self.cutoff:
            raise ValueError(f"n = {n} outside cutoff {self.cutoff}")
        return complex(self.values[n])


def _phases_to_values(phases: np.ndarray, spf: np.ndarray, m: int,
                      prime_index: dict[int, int]) -> np.ndarray:
    """Extend per-prime unit phases multiplicatively to all n <= m.

    phases has shape (..., n_primes); the result has shape (..., m+1).
    """
    out = np.zeros(phases.shape[:-1] + (m + 1,), dtype=np.complex128)
    out[..., 1] = 1.0
    for n in range(2, m + 1):
        p = int(spf[n])
        out[..., n] = out[..., n // p] * phases[..., prime_index[p]]
    return out


def sample_random_multiplicative(seed: int, M: int) -> RandomMultiplicativeSample:
    """Deterministic-in-seed sample with independent uniform phases per prime."""
    if M < 1:
        raise ValueError("cutoff must be >= 1")
    spf = _sieve_spf(M)
    primes = [p for p in range(2, M + 1) if spf[p] == p]
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed))))
    u = rng.uniform(0.0, 1.0, size=len(primes))
    phases = np.exp(2j * np.pi * u)
    prime_index = {p: i for i, p in enumerate(primes)}
    values = _phases_to_values(phases, spf, M, prime_index)
    return RandomMultiplicativeSample(
        cutoff=M,
        prime_phases={p: complex(phases[i]) for i, p in enumerate(primes)},
        values=values,
    )


def zeta_trunc(sample: RandomMultiplicativeSample, alpha: float, M: int) -> complex:
    """Truncated random zeta value sum_{n <= M} X(n) / n^alpha."""
    if alpha <= 0.5:
        raise ValueError("alpha must exceed 1/2")
    if M > sample.cutoff:
        raise ValueError(f"M = {M} exceeds sample cutoff {sample.cutoff}")
    n = np.arange(1, M + 1, dtype=np.float64)
    return complex(sample.values[1:M + 1] @ (n ** -alpha))


def zeta_riemann(s: float, cutoff: int = 64) -> float:
    """zeta(s) for s > 1 by Euler-Maclaurin with absolute error < 1e-10.

    Partial sum to cutoff plus tail corrections through the B_8 term; for
    s in (1, 2] and cutoff 64 the first omitted term is below 1e-16.
    """
    if s <= 1:
        raise ValueError("need s > 1")
    k = float(cutoff)
    total = sum(n ** -s for n in range(1, cutoff))
    total += k ** (1 - s) / (s - 1) + 0.5 * k ** -s
    # Bernoulli corrections B_2/2!, B_4/4!, B_6/6!, B_8/8! times rising factorials
    coeffs = [(1.0 / 12.0, 1), (-1.0 / 720.0, 3), (1.0 / 30240.0, 5), (-1.0 / 1209600.0, 7)]
    for c, depth in coeffs:
        rising = 1.0
        for j in range(depth):
            rising *= s + j
        total += c * rising * k ** (-s - depth)
    return total


@dataclass(frozen=True)
class Eq0Record:
    """Simulation-versus-identity record for the truncated second moment."""

    estimate: float             # Monte Carlo E|zeta_X zeta_Y D|^2
    std_error: float
    exact_truncated_rhs: float
    untruncated_rhs: float      # zeta(2 alpha)^2 * S_f(2; alpha)
    d_sq_estimate: float        # Monte Carlo E|D|^2
    d_sq_std_error: float
    d_sq_exact: float           # ||f||_2^2
    samples: int
    M: int
    alpha: float
    seed: int

    def to_json_dict(self) -> dict:
        return {
            "estimate": self.estimate,
            "std_error": self.std_error,
            "exact_truncated_rhs": self.exact_truncated_rhs,
            "untruncated_rhs": self.untruncated_rhs,
            "d_sq_estimate": self.d_sq_estimate,
            "d_sq_std_error": self.d_sq_std_error,
            "d_sq_exact": self.d_sq_exact,
            "samples": self.samples,
            "M": self.M,
            "alpha": self.alpha,
            "seed": self.seed,
        }


def truncated_rhs(f: WeightedSupport, alpha: float, M: int) -> float:
    """Exact finite form of the second-moment identity under cutoff M.

    Expanding E|zeta_X^(M) zeta_Y^(M) D|^2 and matching n1*a = n2*c forces
    n1 = h c/(a,c), n2 = h a/(a,c); the truncation n1, n2 <= M caps h at
    floor(M (a,c) / max(a,c)).  Each coordinate pair contributes
        G(a,c) = (a,c)^(2 alpha) / (a c)^alpha * sum_{h <= cap} h^(-2 alpha),
    and the total is sum f(a,b) conj(f(c,d)) G(a,c) G(b,d).
    """
    if f.d != 2:
        raise ValueError("identity check is two-dimensional")
    h = np.arange(1, M + 1, dtype=np.float64)
    h_cum = np.concatenate(([0.0], np.cumsum(h ** (-2.0 * alpha))))

    def g_factor(a: int, c: int) -> float:
        g = math.gcd(a, c)
        cap = (M * g) // max(a, c)
        return g ** (2 * alpha) / (a * c) ** alpha * h_cum[cap]

    items = [(k, complex(v)) for k, v in sorted(f.entries.items())]
    total = 0.0 + 0.0j
    for (a, b), fab in items:
        for (c, dd), fcd in items:
            total += fab * fcd.conjugate() * g_factor(a, c) * g_factor(b, dd)
    return total.real


def _batched_mc_moments(f: WeightedSupport, alpha: float, M: int, samples: int,
                        seed: int, batch: int = 512):
    """Per-sample |zeta_X zeta_Y D|^2 and |D|^2, deterministically seeded.

    Sample i draws its phases from stream (seed, i): X phases first, then Y,
    so serial and parallel evaluation orders agree.
    """
    spf = _sieve_spf(M)
    primes = [p for p in range(2, M + 1) if spf[p] == p]
    prime_index = {p: i for i, p in enumerate(primes)}
    n_pow = np.arange(1, M + 1, dtype=np.float64) ** -alpha
    a_idx = f.points[:, 0]
    b_idx = f.points[:, 1]
    w = f.weights
    zd_sq = np.empty(samples, dtype=np.float64)
    d_sq = np.empty(samples, dtype=np.float64)
    for lo in range(0, samples, batch):
        hi = min(samples, lo + batch)
        nb = hi - lo
        u = np.empty((nb, 2 * len(primes)))
        for i in range(nb):
            rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence((int(seed), lo + i))))
            u[i] = rng.uniform(0.0, 1.0, size=2 * len(primes))
        phases = np.exp(2j * np.pi * u)
        x_vals = _phases_to_values(phases[:, :len(primes)], spf, M, prime_index)
        y_vals = _phases_to_values(phases[:, len(primes):], spf, M, prime_index)
        zx = x_vals[:, 1:] @ n_pow
        zy = y_vals[:, 1:] @ n_pow
        d = (x_vals[:, a_idx] * y_vals[:, b_idx]) @ w
        zd_sq[lo:hi] = np.abs(zx * zy * d) ** 2
        d_sq[lo:hi] = np.abs(d) ** 2
    return zd_sq, d_sq


def verify_eq0(f: WeightedSupport, alpha: float, M: int, samples: int, seed: int) -> Eq0Record:
    """Monte Carlo versus the exact truncated identity; see Eq0Record."""
    if f.d != 2:
        raise ValueError("verify_eq0 needs a two-dimensional support")
    if alpha <= 0.5:
        raise ValueError("alpha must exceed 1/2")
    if samples < 100:
        raise ValueError("need at least 100 samples for meaningful error bars")
    if int(f.points.max()) > M // 2:
        raise ValueError("support components must stay <= M/2 for the truncated identity")
    zd_sq, d_sq = _batched_mc_moments(f, alpha, M, samples, seed)
    exact = truncated_rhs(f, alpha, M)
    untrunc = zeta_riemann(2 * alpha) ** 2 * gcd_sum(f, alpha)
    return Eq0Record(
        estimate=float(zd_sq.mean()),
        std_error=float(zd_sq.std(ddof=1) / math.sqrt(samples)),
        exact_truncated_rhs=float(exact),
        untruncated_rhs=float(untrunc),
        d_sq_estimate=float(d_sq.mean()),
        d_sq_std_error=float(d_sq.std(ddof=1) / math.sqrt(samples)),
        d_sq_exact=f.norm_l2_sq,
        samples=samples,
        M=M,
        alpha=alpha,
        seed=seed,
    )


def moment_growth_probe(alpha: float, l_values: Sequence[float], samples: int,
                        M: int, seed: int) -> list[dict]:
    """Monte Carlo E|zeta_X^(M)(alpha)|^(2l) for each l; observational only."""
    if alpha <= 0.5:
        raise ValueError("alpha must exceed 1/2")
    spf = _sieve_spf(M)
    primes = [p for p in range(2, M + 1) if spf[p] == p]
    prime_index = {p: i for i, p in enumerate(primes)}
    n_pow = np.arange(1, M + 1, dtype=np.float64) ** -alpha
    z_abs_sq = np.empty(samples, dtype=np.float64)
    batch = 512
    for lo in range(0, samples, batch):
        hi = min(samples, lo + batch)
        u = np.empty((hi - lo, len(primes)))
        for i in range(hi - lo):
            rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence((int(seed), lo + i))))
            u[i] = rng.uniform(0.0, 1.0, size=len(primes))
        vals = _phases_to_values(np.exp(2j * np.pi * u), spf, M, prime_index)
        z_abs_sq[lo:hi] = np.abs(vals[:, 1:] @ n_pow) ** 2
    rows = []
    for l in l_values:
        powered = z_abs_sq ** float(l)
        rows.append({
            "l": float(l),
            "estimate": float(powered.mean()),
            "std_error": float(powered.std(ddof=1) / math.sqrt(samples)),
        })
    return rows
