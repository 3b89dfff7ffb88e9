"""Arithmetic-progression detection and 3-AP-free sets.

Sets over the integers are stored as sorted tuples plus a Python-int bitset
(bit i set iff i is a member); AP scans work on whole bitsets at once.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Iterable, Optional


@dataclass(frozen=True)
class IntegerSet:
    """A subset of [1, ambient]."""

    ambient: int
    members: tuple[int, ...]

    def __post_init__(self):
        if self.ambient < 0:
            raise ValueError("ambient must be nonnegative")
        prev = 0
        for x in self.members:
            if x <= prev:
                raise ValueError("members must be strictly increasing and positive")
            prev = x
        if prev > self.ambient:
            raise ValueError(f"member {prev} outside [1, {self.ambient}]")

    @classmethod
    def of(cls, members: Iterable[int], ambient: Optional[int] = None) -> "IntegerSet":
        ms = tuple(sorted(set(members)))
        if ambient is None:
            ambient = ms[-1] if ms else 0
        return cls(ambient, ms)

    @property
    def bits(self) -> int:
        b = 0
        for x in self.members:
            b |= 1 << x
        return b

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __contains__(self, x):
        return x in self._lookup

    @property
    def _lookup(self) -> frozenset:
        # frozen dataclass: cache via object.__setattr__
        try:
            return self.__dict__["_set"]
        except KeyError:
            s = frozenset(self.members)
            object.__setattr__(self, "_set", s)
            return s


@dataclass(frozen=True)
class ResidueSet:
    """A subset of Z/modulus Z with members in [0, modulus)."""

    modulus: int
    members: tuple[int, ...]

    def __post_init__(self):
        if self.modulus < 1:
            raise ValueError("modulus must be positive")
        prev = -1
        for x in self.members:
            if x <= prev:
                raise ValueError("members must be strictly increasing")
            prev = x
        if prev >= self.modulus:
            raise ValueError(f"residue {prev} not reduced mod {self.modulus}")

    @classmethod
    def of(cls, members: Iterable[int], modulus: int) -> "ResidueSet":
        return cls(modulus, tuple(sorted({x % modulus for x in members})))

    def translate(self, t: int) -> "ResidueSet":
        return ResidueSet.of((x + t for x in self.members), self.modulus)

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)


@dataclass(frozen=True)
class APDescriptor:
    """start, start+diff, ..., start+(length-1)*diff; modulus None means over Z."""

    start: int
    diff: int
    length: int
    modulus: Optional[int] = None

    def __post_init__(self):
        if self.length < 3:
            raise ValueError("APs have length >= 3")
        if self.modulus is None:
            if self.diff == 0:
                raise ValueError("difference must be nonzero")
        elif self.diff % self.modulus == 0:
            raise ValueError("difference must be nonzero mod m")

    def terms(self) -> list[int]:
        ts = [self.start + j * self.diff for j in range(self.length)]
        if self.modulus is not None:
            ts = [t % self.modulus for t in ts]
        return ts

    def within(self, n: int) -> bool:
        """True if every term lies in [1, n] (integer APs only)."""
        ts = self.terms()
        return self.modulus is None and min(ts) >= 1 and max(ts) <= n


def _reverse_bits(bits: int, n: int) -> int:
    """Map bit i to bit n+1-i for 1 <= i <= n (bit 0 must be clear)."""
    return int(format(bits, f"0{n + 1}b")[::-1], 2) << 1


def find_3ap_int(S: IntegerSet) -> Optional[APDescriptor]:
    """A 3-AP inside S (smallest start, then smallest difference), or None."""
    if len(S) < 3:
        return None
    n = S.members[-1]
    fwd = S.bits
    rev = _reverse_bits(fwd, n)
    best = None
    for y in S.members[1:-1]:
        # bit j of `hit` (j >= 1) <=> y-j and y+j both in S
        hit = ((fwd >> y) & (rev >> (n + 1 - y))) >> 1
        if hit:
            d = hit.bit_length()
            if best is None or y - d < best[0]:
                best = (y - d, d)
    if best is None:
        return None
    return APDescriptor(best[0], best[1], 3)


def has_3ap_triple(members: Iterable[int]) -> bool:
    """Plain criterion: some x != y, z in the set with x + z = 2y."""
    s = set(members)
    return any(2 * y - x in s for x in s for y in s if x != y)


def find_kap_int(S: IntegerSet, k: int) -> Optional[APDescriptor]:
    """A k-AP inside S (smallest start, then smallest difference), or None."""
    if k < 3:
        raise ValueError(f"k must be >= 3, got {k}")
    if k == 3:
        return find_3ap_int(S)
    return _first_kap(S.bits, S.members[-1] if S.members else 0, k)


def _kap_starts(bits: int, d: int, k: int) -> int:
    acc = bits
    for j in range(1, k):
        acc &= bits >> (j * d)
        if not acc:
            break
    return acc


def _first_kap(bits: int, top: int, k: int) -> Optional[APDescriptor]:
    best = None
    for d in range(1, (top - 1) // (k - 1) + 1):
        starts = _kap_starts(bits, d, k)
        if starts:
            x = (starts & -starts).bit_length() - 1
            if best is None or x < best[0]:
                best = (x, d)
    return None if best is None else APDescriptor(best[0], best[1], k)


def kaps_in_bits(bits: int, n: int, k: int) -> list[APDescriptor]:
    """Every k-AP with positive difference inside the bitset, sorted by (start, diff)."""
    found = []
    for d in range(1, (n - 1) // (k - 1) + 1):
        starts = _kap_starts(bits, d, k)
        while starts:
            low = starts & -starts
            found.append((low.bit_length() - 1, d))
            starts ^= low
    found.sort()
    return [APDescriptor(x, d, k) for x, d in found]


def count_kaps_in_bits(bits: int, n: int, k: int) -> int:
    return sum(_kap_starts(bits, d, k).bit_count() for d in range(1, (n - 1) // (k - 1) + 1))


def find_3ap_mod(S: ResidueSet) -> Optional[APDescriptor]:
    """A 3-AP of Z/mZ inside S, using x + z = 2y with x != y.

    Degenerate progressions (2d = 0 mod m, so the third term repeats the
    first) count, since {g, g+d, g+2d} is then still a subset of S.
    """
    m = S.modulus
    members = S.members
    lookup = set(members)
    for x in members:
        best_d = None
        for y in members:
            if y == x:
                continue
            if (2 * y - x) % m in lookup:
                d = (y - x) % m
                if best_d is None or d < best_d:
                    best_d = d
        if best_d is not None:
            return APDescriptor(x, best_d, 3, m)
    return None


# -- Erdos-Turan ternary family ------------------------------------------------
#
# The 3-AP-free family is {x >= 0 : base-3 digits of x in {0, 1}}; adding 1
# moves it into [1, N]. (Digits {1, 2} would not do: 1, 4, 7 = 1, 11, 21 in
# base 3 is a progression.)

def erdos_turan_set(N: int) -> IntegerSet:
    """All n in [1, N] such that n - 1 has only digits 0 and 1 in base 3."""
    if N < 0:
        raise ValueError("N must be nonnegative")
    xs = [0]
    power = 1
    while power <= N - 1:
        xs += [x + power for x in xs if x + power <= N - 1]
        power *= 3
    return IntegerSet(N, tuple(sorted(x + 1 for x in xs if x + 1 <= N)))


def erdos_turan_count(N: int) -> int:
    """|erdos_turan_set(N)| by a digit walk over N - 1 in base 3."""
    if N < 0:
        raise ValueError("N must be nonnegative")
    if N == 0:
        return 0
    digits = []
    x = N - 1
    while x:
        digits.append(x % 3)
        x //= 3
    total = 0
    for rest in range(len(digits) - 1, -1, -1):
        d = digits[rest]
        if d == 1:
            total += 1 << rest  # put 0 here, anything below
        elif d == 2:
            return total + (2 << rest)  # 0 or 1 here, anything below
    return total + 1


# -- exact r_3 -----------------------------------------------------------------

R3_CEILING = 64

_r3_lock = threading.Lock()
_r3_values = [0]
_r3_witness: list[tuple[int, ...]] = [()]


def _greedy_3ap_free(n: int) -> tuple[int, ...]:
    chosen: list[int] = []
    blocked = set()
    for z in range(1, n + 1):
        if z in blocked:
            continue
        for x in chosen:
            blocked.add(2 * z - x)
        chosen.append(z)
    return tuple(chosen)


def _extend_r3(n: int) -> None:
    """Compute r3(n) given r3(1..n-1) already tabulated."""
    r = _r3_values
    target = r[n - 1] + 1

    for cand in (_greedy_3ap_free(n), erdos_turan_set(n).members):
        if len(cand) >= target and find_3ap_int(IntegerSet(n, cand)) is None:
            _r3_values.append(len(cand))
            _r3_witness.append(cand)
            return

    # Any set of size r3(n-1)+1 must use both 1 and n, otherwise it is a
    # translate of a subset of [n-1].
    found: list[int] = []

    def dfs(i: int, chosen: int, blocked: int, size: int) -> bool:
        if size == target:
            if chosen >> n & 1:
                found.append(chosen)
                return True
            return False
        if i > n:
            return False
        rem = n - i + 1
        cap = r[rem] if rem < n else target
        if size + cap < target:
            return False
        if not blocked >> i & 1:
            nb = blocked
            c = chosen
            while c:
                low = c & -c
                z = 2 * i - (low.bit_length() - 1)
                if z <= n:
                    nb |= 1 << z
                c ^= low
            if dfs(i + 1, chosen | (1 << i), nb, size + 1):
                return True
        if i == 1 or i == n:
            return False
        return dfs(i + 1, chosen, blocked, size)

    if dfs(1, 0, 0, 0):
        bits = found[0]
        _r3_values.append(target)
        _r3_witness.append(tuple(i for i in range(1, n + 1) if bits >> i & 1))
    else:
        _r3_values.append(r[n - 1])
        _r3_witness.append(_r3_witness[n - 1])


def r3_exact(N: int, ceiling: int = R3_CEILING) -> tuple[int, IntegerSet]:
    """Exact r3(N) with a maximum 3-AP-free witness in [1, N].

    Branch and bound over [1, N] in increasing order; the bound on a suffix
    of length L is r3(L), taken from the values already computed for smaller
    N. Around N = 60 this takes a few seconds.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    if N > ceiling:
        raise ValueError(f"r3_exact limited to N <= {ceiling}, got {N}")
    with _r3_lock:
        while len(_r3_values) <= N:
            _extend_r3(len(_r3_values))
        return _r3_values[N], IntegerSet(N, _r3_witness[N])


# -- Freiman transport ---------------------------------------------------------

def freiman_pushforward(S: IntegerSet, m: int, check: bool = False) -> ResidueSet:
    """Reduce S (a subset of [n], n = S.ambient) mod m, requiring m >= 2n - 1.

    For 3-AP-free S the image is 3-AP-free in Z/mZ.
    """
    n = S.ambient
    if m < 2 * n - 1:
        raise ValueError(f"modulus {m} < 2n-1 = {2 * n - 1}")
    if m < 1:
        raise ValueError("modulus must be positive")
    if check:
        ap = find_3ap_int(S)
        if ap is not None:
            raise ValueError(f"input contains a 3-AP: {ap.terms()}")
    out = ResidueSet.of(S.members, m)
    assert len(out) == len(S)
    return out
