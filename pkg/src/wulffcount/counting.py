"""Exact counts of partitions and plane partitions, brute-force oracles,
and comparison of log-counts with the leading asymptotic exponents."""

import math
from dataclasses import dataclass
from operator import mul
from typing import List, Sequence

from .special_fns import CONSTANTS, sigma2_table

KINDS = ("young", "skyscraper")
MAX_BRUTE_PARTITIONS = 60
MAX_BRUTE_PLANE = 12


@dataclass(frozen=True)
class CountTable:
    kind: str
    values: tuple

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError("kind must be 'young' or 'skyscraper'")

    @property
    def nmax(self) -> int:
        return len(self.values) - 1

    def __getitem__(self, n):
        return self.values[n]


def partition_table(nmax: int) -> CountTable:
    """p(0..nmax) by Euler's pentagonal-number recurrence."""
    nmax = int(nmax)
    if nmax < 0:
        raise ValueError("nmax must be nonnegative")
    p = [1] + [0] * nmax
    for n in range(1, nmax + 1):
        total = 0
        k = 1
        while True:
            g1 = k * (3 * k - 1) // 2
            if g1 > n:
                break
            g2 = g1 + k  # k(3k+1)/2
            term = p[n - g1] + (p[n - g2] if g2 <= n else 0)
            total += term if k % 2 else -term
            k += 1
        p[n] = total
    return CountTable("young", tuple(p))


def plane_partition_table(nmax: int) -> CountTable:
    """pp(0..nmax) from n pp(n) = sum_{k=1}^n sigma2(k) pp(n-k); every
    division by n is checked to be exact."""
    nmax = int(nmax)
    if nmax < 0:
        raise ValueError("nmax must be nonnegative")
    sig = sigma2_table(nmax)
    pp = [1]
    for n in range(1, nmax + 1):
        # sigma2(1..n) against pp(n-1..0)
        s = sum(map(mul, sig[1:n + 1], reversed(pp)))
        q, r = divmod(s, n)
        if r:
            raise ArithmeticError("inexact division at n = %d" % n)
        pp.append(q)
    return CountTable("skyscraper", tuple(pp))


def count_table(kind: str, nmax: int) -> CountTable:
    if kind == "young":
        return partition_table(nmax)
    if kind == "skyscraper":
        return plane_partition_table(nmax)
    raise ValueError("kind must be 'young' or 'skyscraper'")


def _partitions(n, largest):
    """Yield the partitions of n with parts at most `largest`."""
    if n == 0:
        yield ()
        return
    for first in range(min(n, largest), 0, -1):
        for rest in _partitions(n - first, first):
            yield (first,) + rest


def brute_force_partitions(N: int) -> int:
    """Number of nonincreasing positive sequences summing to N, by listing
    them all."""
    N = int(N)
    if not 0 <= N <= MAX_BRUTE_PARTITIONS:
        raise ValueError("brute force is limited to 0 <= N <= %d" % MAX_BRUTE_PARTITIONS)
    return sum(1 for _ in _partitions(N, N))


def _bounded_rows(n, above):
    """Partitions of n dominated entrywise by the row `above`."""
    if n == 0:
        yield ()
        return
    if not above:
        return
    cap = above[0]
    for first in range(min(n, cap), 0, -1):
        for rest in _bounded_rows(n - first, tuple(min(a, first) for a in above[1:])):
            yield (first,) + rest


def _plane(n, above):
    if n == 0:
        yield ()
        return
    for size in range(n, 0, -1):
        for row in _bounded_rows(size, above):
            for rest in _plane(n - size, row):
                yield (row,) + rest


def brute_force_plane_partitions(N: int) -> int:
    """Number of arrays of positive integers, nonincreasing along rows and
    columns, summing to N, by listing them all."""
    N = int(N)
    if not 0 <= N <= MAX_BRUTE_PLANE:
        raise ValueError("brute force is limited to 0 <= N <= %d" % MAX_BRUTE_PLANE)
    return sum(1 for _ in _plane(N, (N,) * N))


def log_bigint(n: int) -> float:
    """Natural log of a positive integer from its top 64 bits and its bit
    length."""
    n = int(n)
    if n <= 0:
        raise ValueError("log of a nonpositive integer")
    shift = n.bit_length() - 64
    if shift <= 0:
        return math.log(n)
    return math.log(n >> shift) + shift * math.log(2.0)


def predicted_exponent(kind: str, N: float) -> float:
    if kind == "young":
        return CONSTANTS.young_exponent * math.sqrt(N)
    if kind == "skyscraper":
        return CONSTANTS.skyscraper_exponent * N ** (2.0 / 3.0)
    raise ValueError("kind must be 'young' or 'skyscraper'")


@dataclass(frozen=True)
class ReportRow:
    N: int
    log_count: float
    predicted: float
    ratio: float


@dataclass(frozen=True)
class AsymptoticsReport:
    kind: str
    rows: tuple

    def ratios(self) -> List[float]:
        return [r.ratio for r in self.rows]


def asymptotic_report(kind: str, Ns: Sequence[int], table: CountTable) -> AsymptoticsReport:
    """Rows (N, ln count, leading exponent, ratio) for each N."""
    if kind != table.kind:
        raise ValueError("table kind does not match")
    rows = []
    for N in Ns:
        N = int(N)
        if N < 1 or N > table.nmax:
            raise IndexError("N = %d is outside the table (1..%d)" % (N, table.nmax))
        lc = log_bigint(table[N])
        pr = predicted_exponent(kind, N)
        rows.append(ReportRow(N, lc, pr, lc / pr))
    return AsymptoticsReport(kind, tuple(rows))
