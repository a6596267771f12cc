"""Dirichlet coefficients a_m of L(E_n, s) for y^2 = x^3 - n^2 x.

Good primes are handled by counting points with the quadratic character
(vectorised with numpy).  Above ``CM_THRESHOLD`` a faster route writes
p = a^2 + b^2 and uses the CM formula a_p = (n/p) * 2a; the two routes are
cross-checked by the test suite.  Prime powers follow the Hecke recurrence and
everything else is assembled multiplicatively.
"""

from __future__ import annotations

import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .arith import cornacchia_two_squares, is_prime, legendre_symbol

log = logging.getLogger(__name__)

#: primes above this use the two-squares formula instead of counting
CM_THRESHOLD = 10_000

CACHE_MAGIC = "CNVC"
CACHE_VERSION = 1


class CacheFormatError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class CoefficientTable:
    """a_m for 1 <= m <= limit; ``values[0]`` is unused and zero."""

    n: int
    limit: int
    values: np.ndarray

    def __post_init__(self):
        self.values.setflags(write=False)

    def __getitem__(self, m: int) -> int:
        if not 1 <= m <= self.limit:
            raise IndexError(f"a_{m} outside table of limit {self.limit}")
        return int(self.values[m])

    def __eq__(self, other):
        if not isinstance(other, CoefficientTable):
            return NotImplemented
        return (self.n, self.limit) == (other.n, other.limit) and np.array_equal(
            self.values, other.values)

    def nonzero(self) -> dict[int, int]:
        idx = np.flatnonzero(self.values)
        return {int(m): int(self.values[m]) for m in idx}

    def truncate(self, limit: int) -> "CoefficientTable":
        if limit > self.limit:
            raise ValueError("cannot truncate upwards")
        return CoefficientTable(self.n, limit, self.values[: limit + 1].copy())


# ---------------------------------------------------------------------------
# primes and point counts

def primes_up_to(M: int) -> np.ndarray:
    if M < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(M + 1, dtype=bool)
    sieve[:2] = False
    for i in range(2, int(M**0.5) + 1):
        if sieve[i]:
            sieve[i * i :: i] = False
    return np.flatnonzero(sieve)


def _character_sum(n: int, p: int) -> int:
    """sum over x mod p of chi(x^3 - n^2 x), chi the quadratic character."""
    x = np.arange(p, dtype=np.int64)
    is_sq = np.zeros(p, dtype=bool)
    is_sq[(x * x) % p] = True
    v = ((x * x % p) * x - (n * n % p) * x) % p
    nz = v != 0
    return int(2 * np.count_nonzero(is_sq[v] & nz) - np.count_nonzero(nz))


def count_points_mod_p(n: int, p: int) -> int:
    """#E(F_p), point at infinity included, for a good prime ``p``."""
    if (2 * n) % p == 0:
        raise ValueError(f"p = {p} divides 2n: bad reduction")
    return p + 1 + _character_sum(n, p)


def _ap_counting(n: int, p: int) -> int:
    return p + 1 - count_points_mod_p(n, p)


def _ap_cm(n: int, p: int) -> int:
    # y^2 = x^3 - x: a_p = 2a with p = a^2 + b^2, a + b = 1 mod 4; twist by (n/p)
    a, b = cornacchia_two_squares(p)
    if (a + b) % 4 != 1:
        a = -a
    return legendre_symbol(n, p) * 2 * a


def ap(n: int, p: int, method: str = "auto") -> int:
    """a_p of E_n.  ``method`` is ``"count"``, ``"cm"`` or ``"auto"``."""
    if (2 * n) % p == 0:
        return 0
    if p % 4 == 3:
        return 0
    if method == "count" or (method == "auto" and p <= CM_THRESHOLD):
        return _ap_counting(n, p)
    return _ap_cm(n, p)


def a_prime_power(a_p: int, p: int, r: int, bad: bool = False) -> int:
    """a_{p^r} from a_p: (a_p)^r at bad primes, the Hecke recurrence otherwise."""
    if r < 0:
        raise ValueError("r must be nonnegative")
    if bad:
        return a_p**r
    prev, cur = 1, a_p
    if r == 0:
        return 1
    for _ in range(r - 1):
        prev, cur = cur, a_p * cur - p * prev
    return cur


# ---------------------------------------------------------------------------
# tables

def _prime_chunk(args) -> list[tuple[int, int]]:
    n, primes, method = args
    return [(int(p), ap(n, int(p), method)) for p in primes]


def _compute_ap(n: int, primes: np.ndarray, method: str, workers: int) -> dict[int, int]:
    if workers <= 1 or len(primes) < 1000:
        return dict(_prime_chunk((n, primes, method)))
    chunks = np.array_split(primes, workers * 4)
    out: dict[int, int] = {}
    with ProcessPoolExecutor(max_workers=workers) as ex:
        for part in ex.map(_prime_chunk, [(n, c, method) for c in chunks]):
            out.update(part)
    return out


def _smallest_prime_factor(M: int) -> np.ndarray:
    spf = np.arange(M + 1, dtype=np.int64)
    for p in range(2, int(M**0.5) + 1):
        if spf[p] == p:
            block = spf[p * p :: p]
            mask = block == np.arange(p * p, M + 1, p)
            block[mask] = p
    return spf


def _fill(n: int, values: np.ndarray, start: int, method: str, workers: int):
    """Fill ``values[start:]`` in place; entries below ``start`` must be valid."""
    M = len(values) - 1
    if start > M:
        return
    spf = _smallest_prime_factor(M).tolist()
    primes = primes_up_to(M)
    aps = _compute_ap(n, primes[primes >= start], method, workers)
    vals = values.tolist()
    two_n = 2 * n
    for m in range(max(start, 2), M + 1):
        p = spf[m]
        if p == m:
            vals[m] = aps[m]
            continue
        pk, rest, k = p, m // p, 1
        while rest % p == 0:
            rest //= p
            pk *= p
            k += 1
        if rest > 1:
            vals[m] = vals[pk] * vals[rest]
        elif two_n % p == 0:
            vals[m] = vals[p] ** k
        else:
            vals[m] = vals[p] * vals[m // p] - p * vals[m // (p * p)]
    values[:] = vals


def coefficients(n: int, M: int, method: str = "auto", workers: int | None = 1,
                 base: CoefficientTable | None = None) -> CoefficientTable:
    """Table of a_m for m <= M.

    ``workers > 1`` spreads the per-prime work over processes; the result does
    not depend on it.  ``base`` is a smaller table for the same ``n`` to extend.
    """
    if M < 1:
        raise ValueError("M must be at least 1")
    if workers is None:
        workers = os.cpu_count() or 1
    values = np.zeros(M + 1, dtype=np.int64)
    values[1] = 1
    start = 2
    if base is not None:
        if base.n != n:
            raise ValueError("base table is for a different curve")
        if base.limit >= M:
            return base.truncate(M)
        values[: base.limit + 1] = base.values
        start = base.limit + 1
    _fill(n, values, start, method, workers)
    log.debug("a_m table for n=%d up to %d (from %d)", n, M, start)
    return CoefficientTable(n, M, values)


# ---------------------------------------------------------------------------
# cache file

def format_cache(table: CoefficientTable) -> str:
    lines = [f"{CACHE_MAGIC} {CACHE_VERSION} n={table.n} M={table.limit}"]
    lines += [f"{m} {v}" for m, v in table.nonzero().items()]
    return "\n".join(lines) + "\n"


def parse_cache(text: str) -> CoefficientTable:
    lines = text.splitlines()
    if not lines:
        raise CacheFormatError("empty cache file")
    head = lines[0].split()
    if len(head) != 4 or head[0] != CACHE_MAGIC:
        raise CacheFormatError(f"not a coefficient cache: {lines[0]!r}")
    if head[1] != str(CACHE_VERSION):
        raise CacheFormatError(f"unsupported cache version {head[1]}")
    try:
        if not (head[2].startswith("n=") and head[3].startswith("M=")):
            raise ValueError
        n, M = int(head[2][2:]), int(head[3][2:])
    except ValueError:
        raise CacheFormatError(f"malformed header {lines[0]!r}") from None
    values = np.zeros(M + 1, dtype=np.int64)
    last = 0
    for i, line in enumerate(lines[1:], start=2):
        try:
            m_s, v_s = line.split()
            m, v = int(m_s), int(v_s)
        except ValueError:
            raise CacheFormatError(f"line {i}: malformed entry {line!r}") from None
        if not last < m <= M or v == 0:
            raise CacheFormatError(f"line {i}: entry {line!r} out of order or range")
        values[m] = v
        last = m
    if M >= 1 and values[1] != 1:
        raise CacheFormatError("a_1 must be 1")
    return CoefficientTable(n, M, values)


def read_cache(path) -> CoefficientTable:
    with open(path, encoding="ascii") as fh:
        return parse_cache(fh.read())


def write_cache(path, table: CoefficientTable) -> None:
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="ascii", newline="\n") as fh:
        fh.write(format_cache(table))
    os.replace(tmp, path)


def load_or_compute(n: int, M: int, path=None, workers: int | None = 1) -> CoefficientTable:
    """Coefficients up to ``M``, reusing and extending the cache at ``path``."""
    base = None
    if path is not None and os.path.exists(path):
        base = read_cache(path)
        if base.n != n:
            raise CacheFormatError(f"cache {path} is for n={base.n}, not n={n}")
        if base.limit >= M:
            return base
    table = coefficients(n, M, workers=workers, base=base)
    if path is not None:
        write_cache(path, table)
    return table


def is_good(n: int, p: int) -> bool:
    return is_prime(p) and (2 * n) % p != 0
