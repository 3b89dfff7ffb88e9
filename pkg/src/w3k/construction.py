"""Randomized 3-AP-free sets in [p^2 - p] built through Z/pZ x Z/(p-1)Z.

A 3-AP-free base set S in [p // 2] is placed in the first factor; over each
of its points x_i sits a random translate t_i + S of the same set in the
second factor. The union is 3-AP-free in the product group, and pulling it
back through the CRT bijection gives a 3-AP-free subset A of [p^2 - p] that
meets any fixed p-AP with probability 1 - (1 - m/(p-1))^m.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Optional, Sequence

from .apfree import (
    APDescriptor,
    IntegerSet,
    ResidueSet,
    erdos_turan_count,
    erdos_turan_set,
    find_3ap_int,
    find_3ap_mod,
    freiman_pushforward,
    r3_exact,
    R3_CEILING,
)
from .arith import MASK64, crt_combine_raw, is_prime, primes_between, uniform_sequence

STRATEGIES = ("exact-r3", "erdos-turan", "provided")
_ALIASES = {"exact": "exact-r3", "r3": "exact-r3", "et": "erdos-turan"}


class ConstructionError(RuntimeError):
    """Raised when a built set fails re-verification."""


def normalize_strategy(name: str) -> str:
    name = _ALIASES.get(name, name)
    if name not in STRATEGIES:
        raise ValueError(f"unknown strategy {name!r}; expected one of {STRATEGIES}")
    return name


@dataclass(frozen=True)
class ProductSet:
    mod1: int
    mod2: int
    members: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if len(set(self.members)) != len(self.members):
            raise ValueError("duplicate pairs")
        for a, b in self.members:
            if not (0 <= a < self.mod1 and 0 <= b < self.mod2):
                raise ValueError(f"pair {(a, b)} out of range")

    def __len__(self):
        return len(self.members)


def find_3ap_product(P: ProductSet) -> Optional[tuple[tuple[int, int], tuple[int, int]]]:
    """Some (g, d), d != 0, with {g, g+d, g+2d} inside P, found via x + z = 2y, x != y."""
    n1, n2 = P.mod1, P.mod2
    lookup = set(P.members)
    for x in P.members:
        for y in P.members:
            if x == y:
                continue
            z = ((2 * y[0] - x[0]) % n1, (2 * y[1] - x[1]) % n2)
            if z in lookup:
                return x, ((y[0] - x[0]) % n1, (y[1] - x[1]) % n2)
    return None


def product_union(S: ResidueSet, Ts: Sequence[ResidueSet], check: bool = True) -> ProductSet:
    """Union over i of {(x_i, y) : y in T_i}, with x_1 < ... < x_m the members of S."""
    if len(Ts) != len(S):
        raise ValueError(f"need one fibre set per base point: {len(S)} != {len(Ts)}")
    mods = {T.modulus for T in Ts}
    if len(mods) > 1:
        raise ValueError("fibre sets must share a modulus")
    mod2 = mods.pop() if mods else 1
    if check:
        ap = find_3ap_mod(S)
        if ap is not None:
            raise ValueError(f"base set contains a 3-AP mod {S.modulus}: {ap.terms()}")
        for i, T in enumerate(Ts):
            ap = find_3ap_mod(T)
            if ap is not None:
                raise ValueError(f"fibre set {i} contains a 3-AP mod {mod2}: {ap.terms()}")
    pairs = tuple(sorted((x, y) for x, T in zip(S.members, Ts) for y in T.members))
    return ProductSet(S.modulus, mod2, pairs)


@dataclass(frozen=True)
class ConstructionRecipe:
    """Everything needed to rebuild A deterministically.

    Either ``translates`` (one residue mod p-1 per base point) or ``seed``
    must be given; explicit translates win when both are present.
    """

    p: int
    strategy: str = "exact-r3"
    base: Optional[tuple[int, ...]] = None
    translates: Optional[tuple[int, ...]] = None
    seed: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "strategy", normalize_strategy(self.strategy))
        if self.p < 5 or not is_prime(self.p):
            raise ValueError(f"p must be a prime >= 5, got {self.p}")
        if self.strategy == "provided" and self.base is None:
            raise ValueError("strategy 'provided' needs a base set")
        if self.strategy == "exact-r3" and self.p // 2 > R3_CEILING:
            raise ValueError(f"exact-r3 needs p // 2 <= {R3_CEILING}")
        if self.translates is None and self.seed is None:
            raise ValueError("need translates or a seed")
        if self.seed is not None and not 0 <= self.seed <= MASK64:
            raise ValueError("seed must fit in 64 bits")


def base_set(p: int, strategy: str, provided: Optional[Sequence[int]] = None) -> IntegerSet:
    """The 3-AP-free set S in [p // 2] used by the given strategy."""
    n = p // 2
    strategy = normalize_strategy(strategy)
    if strategy == "exact-r3":
        return r3_exact(n)[1]
    if strategy == "erdos-turan":
        return erdos_turan_set(n)
    S = IntegerSet.of(provided or (), n)
    if not S.members:
        raise ValueError("provided base set is empty")
    ap = find_3ap_int(S)
    if ap is not None:
        raise ValueError(f"provided base set contains a 3-AP: {ap.terms()}")
    return S


def base_size(p: int, strategy: str) -> int:
    strategy = normalize_strategy(strategy)
    if strategy == "erdos-turan":
        return erdos_turan_count(p // 2)
    if strategy == "exact-r3":
        return r3_exact(p // 2)[0]
    raise ValueError("base size of a provided set is len(base)")


def recipe_translates(recipe: ConstructionRecipe, m: int) -> tuple[int, ...]:
    if recipe.translates is not None:
        ts = tuple(recipe.translates)
        if len(ts) != m:
            raise ValueError(f"expected {m} translates, got {len(ts)}")
        if any(not 0 <= t < recipe.p - 1 for t in ts):
            raise ValueError("translates must be residues mod p-1")
        return ts
    return tuple(uniform_sequence(recipe.seed, recipe.p - 1, m))


@dataclass(frozen=True)
class ConstructionResult:
    recipe: ConstructionRecipe
    base: IntegerSet
    translates: tuple[int, ...]
    A: IntegerSet
    product_form: ProductSet = field(repr=False)
    verified_3ap_free: bool

    @property
    def m(self) -> int:
        return len(self.base)


def pullback(P: ProductSet) -> IntegerSet:
    """Map Z/pZ x Z/(p-1)Z pairs to their representatives in [1, p(p-1)]."""
    p, q = P.mod1, P.mod2
    N = p * q
    inv = pow(p, -1, q)
    out = []
    for a, b in P.members:
        r = crt_combine_raw(a, b, p, q, inv)
        out.append(r if r else N)
    return IntegerSet.of(out, N)


def build_A(recipe: ConstructionRecipe, verify: bool = True) -> ConstructionResult:
    p = recipe.p
    S = base_set(p, recipe.strategy, recipe.base)
    in_h1 = freiman_pushforward(S, p)
    in_h2 = freiman_pushforward(S, p - 1)
    # translates preserve 3-AP-freeness, so checking the untranslated fibre suffices
    if find_3ap_mod(in_h1) is not None or find_3ap_mod(in_h2) is not None:
        raise ConstructionError("pushforward of the base set contains a 3-AP")
    ts = recipe_translates(recipe, len(S))
    fibres = [in_h2.translate(t) for t in ts]
    A0 = product_union(in_h1, fibres, check=False)
    A = pullback(A0)
    if len(A) != len(S) ** 2:
        raise ConstructionError(f"|A| = {len(A)} but m^2 = {len(S) ** 2}")
    if verify:
        ap = find_3ap_int(A)
        if ap is not None:
            raise ConstructionError(f"constructed set contains 3-AP {ap.terms()} (recipe {recipe})")
    return ConstructionResult(recipe, S, ts, A, A0, verify)


# -- probabilities and counting ------------------------------------------------

def _check_pm(p: int, m: int) -> None:
    if p < 2:
        raise ValueError("p must be >= 2")
    if not 1 <= m <= p - 1:
        raise ValueError(f"need 1 <= m <= p-1, got m={m}, p={p}")


def log_miss_probability(p: int, m: int) -> float:
    """m * log(1 - m/(p-1)); -inf when m = p-1."""
    _check_pm(p, m)
    if m == p - 1:
        return -math.inf
    return m * math.log1p(-m / (p - 1))


def miss_probability(p: int, m: int) -> float:
    """(1 - m/(p-1))^m, the chance a fixed p-AP avoids A."""
    return math.exp(log_miss_probability(p, m))


def miss_probability_exact(p: int, m: int) -> Fraction:
    _check_pm(p, m)
    return Fraction(p - 1 - m, p - 1) ** m


def count_kaps(N: int, k: int) -> int:
    """Number of k-APs with positive difference inside [N]."""
    if k < 3:
        raise ValueError("k must be >= 3")
    if N < k:
        return 0
    D = (N - 1) // (k - 1)
    return D * N - (k - 1) * D * (D + 1) // 2


def union_bound_certifies(p: int, m: int) -> tuple[bool, bool]:
    """(miss <= p^-3, miss * #p-APs in [p^2-p] < 1), compared in log space."""
    lq = log_miss_probability(p, m)
    paper = lq <= -3 * math.log(p)
    count = count_kaps(p * p - p, p)
    expectation = count == 0 or lq + math.log(count) < 0
    return paper, expectation


def union_bound_certifies_exact(p: int, m: int) -> tuple[bool, bool]:
    """Same criteria decided with integer arithmetic only."""
    _check_pm(p, m)
    num = (p - 1 - m) ** m
    den = (p - 1) ** m
    count = count_kaps(p * p - p, p)
    return num * p ** 3 <= den, num * count < den


class ScanRow(NamedTuple):
    p: int
    m: int
    paper_criterion: bool
    expectation_criterion: bool


def threshold_scan(strategy: str, p_low: int, p_high: int, exact: bool = False) -> list[ScanRow]:
    """Both union-bound criteria for every prime p >= 5 in [p_low, p_high].

    Primes below 5 are skipped: the construction needs p odd with p // 2 >= 2.
    """
    strategy = normalize_strategy(strategy)
    if strategy == "provided":
        raise ValueError("scan needs a size rule: exact-r3 or erdos-turan")
    if p_low > p_high:
        raise ValueError("empty range: p_low > p_high")
    if strategy == "exact-r3" and p_high // 2 > R3_CEILING:
        raise ValueError(f"exact-r3 scan limited to p <= {2 * R3_CEILING + 1}")
    decide = union_bound_certifies_exact if exact else union_bound_certifies
    rows = []
    for p in primes_between(max(p_low, 5), p_high):
        m = base_size(p, strategy)
        rows.append(ScanRow(p, m, *decide(p, m)))
    return rows


# -- Monte Carlo ---------------------------------------------------------------

def _hit_tables(p: int, S: IntegerSet, ap: APDescriptor) -> list[frozenset]:
    """For each base point x_i, the translates t_i that put some AP term into A."""
    q = p - 1
    N = p * q
    index = {x % p: i for i, x in enumerate(S.members)}
    fibre = [x % q for x in S.members]
    tables: list[set] = [set() for _ in S.members]
    for term in ap.terms():
        r = term % N
        i = index.get(r % p)
        if i is None:
            continue
        b = r % q
        # term in A  <=>  b - t_i in S mod q
        tables[i].update((b - s) % q for s in fibre)
    return [frozenset(t) for t in tables]


def _count_misses(p: int, tables: list[frozenset], seed: int, lo: int, hi: int) -> int:
    q = p - 1
    m = len(tables)
    misses = 0
    for trial in range(lo, hi):
        ts = uniform_sequence((seed + trial) & MASK64, q, m)
        if not any(t in tab for t, tab in zip(ts, tables)):
            misses += 1
    return misses


def trial_seed(seed: int, trial: int) -> int:
    """Recipe seed of Monte Carlo trial ``trial``; build_A with it reproduces the trial."""
    return (seed + trial) & MASK64


def estimate_miss_probability(
    p: int,
    strategy: str,
    ap: APDescriptor,
    trials: int,
    seed: int = 0,
    workers: int = 1,
) -> tuple[float, float, float]:
    """(empirical, analytic, standard error) for the event A & P = empty.

    Trial j uses the recipe seed ``seed + j``; the count does not depend on
    how trials are split across workers.
    """
    N = p * p - p
    if ap.modulus is not None or not ap.within(N):
        raise ValueError(f"AP {ap} is not inside [1, {N}]")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    S = base_set(p, strategy)
    tables = _hit_tables(p, S, ap)
    if workers <= 1:
        misses = _count_misses(p, tables, seed, 0, trials)
    else:
        step = -(-trials // workers)
        bounds = [(lo, min(lo + step, trials)) for lo in range(0, trials, step)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futs = [pool.submit(_count_misses, p, tables, seed, lo, hi) for lo, hi in bounds]
            misses = sum(f.result() for f in futs)
    q = miss_probability(p, len(S))
    return misses / trials, q, math.sqrt(q * (1 - q) / trials)
