"""Number-theoretic primitives: primality, CRT splitting, and a pinned PRNG.

Residues are always represented canonically in ``[0, m)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

import numpy as np

MASK64 = 0xFFFF_FFFF_FFFF_FFFF

# Witness set proven sufficient for every n < 3.3e24, so in particular all 64-bit n.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for 1 <= n < 2**63."""
    if n < 2:
        return False
    for q in _MR_WITNESSES:
        if n % q == 0:
            return n == q
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def prev_prime(k: int) -> int:
    """Largest prime p <= k."""
    if k < 2:
        raise ValueError(f"prev_prime needs k >= 2, got {k}")
    p = k
    while not is_prime(p):
        p -= 1
    return p


def next_prime(k: int) -> int:
    """Smallest prime p >= k."""
    p = max(k, 2)
    while not is_prime(p):
        p += 1
    return p


def primes_between(lo: int, hi: int) -> list[int]:
    return [n for n in range(max(lo, 2), hi + 1) if is_prime(n)]


@dataclass(frozen=True)
class CrtPair:
    a: int
    b: int
    n: int
    m: int

    def __post_init__(self):
        _check_coprime(self.n, self.m)
        if not (0 <= self.a < self.n and 0 <= self.b < self.m):
            raise ValueError(f"residues out of range: {self}")


def _check_coprime(n: int, m: int) -> None:
    if n < 2 or m < 2:
        raise ValueError(f"moduli must be >= 2, got {n}, {m}")
    if gcd(n, m) != 1:
        raise ValueError(f"moduli {n} and {m} are not coprime")


def crt_split(x: int, n: int, m: int) -> CrtPair:
    """Image of x + nm*Z under Z/nmZ -> Z/nZ x Z/mZ."""
    _check_coprime(n, m)
    if not 0 <= x < n * m:
        raise ValueError(f"{x} is not a residue mod {n * m}")
    return CrtPair(x % n, x % m, n, m)


def crt_combine(pair: CrtPair) -> int:
    """Inverse of crt_split."""
    n, m = pair.n, pair.m
    _check_coprime(n, m)
    return crt_combine_raw(pair.a, pair.b, n, m, pow(n, -1, m))


def crt_combine_raw(a: int, b: int, n: int, m: int, n_inv_mod_m: int) -> int:
    # Unchecked fast path for bulk use; caller supplies n^{-1} mod m.
    return a + n * ((b - a) * n_inv_mod_m % m)


def crt_split_array(xs: np.ndarray, n: int, m: int) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized crt_split over an int64 array of residues mod n*m."""
    _check_coprime(n, m)
    xs = np.asarray(xs, dtype=np.int64)
    if xs.size and (xs.min() < 0 or xs.max() >= n * m):
        raise ValueError(f"values must be residues mod {n * m}")
    return xs % n, xs % m


def crt_combine_array(a: np.ndarray, b: np.ndarray, n: int, m: int) -> np.ndarray:
    """Vectorized crt_combine; requires n*m < 2**31 so products stay in int64."""
    _check_coprime(n, m)
    if n * m >= 1 << 31:
        raise ValueError("crt_combine_array needs n*m < 2**31")
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    return a + n * (((b - a) % m) * pow(n, -1, m) % m)


# -- splitmix64 ---------------------------------------------------------------

@dataclass(frozen=True)
class PrngState:
    state: int

    def __post_init__(self):
        if not 0 <= self.state <= MASK64:
            raise ValueError("PRNG state must fit in 64 bits")


def _splitmix(state: int) -> tuple[int, int]:
    state = (state + 0x9E3779B97F4A7C15) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return state, z ^ (z >> 31)


def prng_next(s: PrngState) -> tuple[PrngState, int]:
    state, out = _splitmix(s.state)
    return PrngState(state), out


def _uniform(state: int, n: int) -> tuple[int, int]:
    limit = ((1 << 64) // n) * n
    while True:
        state, out = _splitmix(state)
        if out < limit:
            return state, out % n


def uniform_below(s: PrngState, n: int) -> tuple[PrngState, int]:
    """Exactly uniform draw from [0, n) by rejection."""
    if not 1 <= n < (1 << 63):
        raise ValueError(f"uniform_below needs 1 <= n < 2**63, got {n}")
    state, v = _uniform(s.state, n)
    return PrngState(state), v


def uniform_sequence(seed: int, n: int, count: int) -> list[int]:
    """``count`` successive uniform_below(n) draws starting from ``seed``."""
    if not 1 <= n < (1 << 63):
        raise ValueError(f"uniform_below needs 1 <= n < 2**63, got {n}")
    state = seed & MASK64
    out = []
    for _ in range(count):
        state, v = _uniform(state, n)
        out.append(v)
    return out
