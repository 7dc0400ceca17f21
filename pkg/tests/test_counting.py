import math

import pytest

from wulffcount import (
    asymptotic_report,
    brute_force_partitions,
    brute_force_plane_partitions,
    partition_table,
    plane_partition_table,
)
from wulffcount.counting import CountTable, count_table, log_bigint

# mpmath, 30 digits
LOG_P100 = 19.0655264239273788270
PRED_Y100 = 25.6509966032372819109
RATIO_Y100 = 0.743266498328615257
PRED_S6 = 6.63504338282288300
RATIO_S6 = 0.583447731619937992


def dp_partitions(n):
    """p(n) by the coin-change recurrence over part sizes."""
    ways = [1] + [0] * n
    for part in range(1, n + 1):
        for m in range(part, n + 1):
            ways[m] += ways[m - part]
    return ways[n]


def test_partition_examples():
    t = partition_table(100)
    assert t[0] == 1 and t[5] == 7 and t[10] == 42
    assert t[100] == 190569292 == dp_partitions(100)


def test_partition_table_matches_dp():
    t = partition_table(500)
    assert t[500] == dp_partitions(500)
    assert t[500] == 2300165032574323995027


def test_plane_partition_examples():
    t = plane_partition_table(20)
    assert [t[n] for n in range(7)] == [1, 1, 3, 6, 13, 24, 48]
    # OEIS A000219
    assert t[20] == 75278


def test_table_invariants():
    for t in (partition_table(300), plane_partition_table(300)):
        assert t[0] == 1
        assert all(b >= a for a, b in zip(t.values[1:], t.values[2:]))
        assert all(isinstance(v, int) for v in t.values)


def test_bigint_sizes():
    assert len(str(partition_table(10000)[10000])) > 100
    assert len(str(plane_partition_table(2000)[2000])) > 50


def test_brute_force_examples():
    assert brute_force_partitions(0) == 1
    assert brute_force_partitions(4) == 5
    assert brute_force_partitions(7) == 15
    assert brute_force_plane_partitions(0) == 1
    assert brute_force_plane_partitions(3) == 6
    assert brute_force_plane_partitions(5) == 24


def test_oracle_equivalence():
    p = partition_table(40)
    assert all(p[n] == brute_force_partitions(n) for n in range(41))
    pp = plane_partition_table(12)
    assert all(pp[n] == brute_force_plane_partitions(n) for n in range(13))


def test_brute_force_guards():
    with pytest.raises(ValueError):
        brute_force_partitions(61)
    with pytest.raises(ValueError):
        brute_force_plane_partitions(13)
    with pytest.raises(ValueError):
        brute_force_partitions(-1)


def test_count_table_dispatch():
    assert count_table("young", 5)[5] == 7
    assert count_table("skyscraper", 4)[4] == 13
    with pytest.raises(ValueError):
        count_table("cubes", 4)
    with pytest.raises(ValueError):
        CountTable("cubes", (1,))


def test_log_bigint():
    for n in (1, 2, 10 ** 18, 2 ** 64 + 12345, 3 ** 400):
        assert log_bigint(n) == pytest.approx(math.log(n), rel=1e-12)
    # beyond float range
    assert log_bigint(7 ** 5000) == pytest.approx(5000 * math.log(7), rel=1e-12)
    with pytest.raises(ValueError):
        log_bigint(0)


def test_report_examples():
    r = asymptotic_report("young", [1, 100], partition_table(100))
    one, hundred = r.rows
    assert one.log_count == 0.0 and one.ratio == 0.0
    assert hundred.log_count == pytest.approx(LOG_P100, abs=1e-12)
    assert hundred.predicted == pytest.approx(PRED_Y100, abs=1e-12)
    assert hundred.ratio == pytest.approx(RATIO_Y100, abs=1e-12)
    s = asymptotic_report("skyscraper", [6], plane_partition_table(6)).rows[0]
    assert s.log_count == pytest.approx(math.log(48), abs=1e-15)
    assert s.predicted == pytest.approx(PRED_S6, abs=1e-12)
    assert s.ratio == pytest.approx(RATIO_S6, abs=1e-12)


def test_report_invariants():
    r = asymptotic_report("skyscraper", [10, 50, 100], plane_partition_table(100))
    for row in r.rows:
        assert row.predicted > 0
        assert row.ratio == row.log_count / row.predicted
    assert r.ratios() == [row.ratio for row in r.rows]


def test_report_errors():
    t = partition_table(10)
    with pytest.raises(IndexError):
        asymptotic_report("young", [11], t)
    with pytest.raises(IndexError):
        asymptotic_report("young", [0], t)
    with pytest.raises(ValueError):
        asymptotic_report("skyscraper", [5], t)


def test_young_ratio_bracket(p_table):
    ratios = asymptotic_report("young", [100, 1000, 10000], p_table).ratios()
    assert ratios[0] < ratios[1] < ratios[2]
    assert 0.95 <= ratios[2] <= 1.0
    # Hardy-Ramanujan: 1 - ratio is about ln(4 sqrt(3) N) / (pi sqrt(2N/3))
    hr = math.log(4 * math.sqrt(3) * 1e4) / (math.pi * math.sqrt(2e4 / 3))
    assert abs((1 - ratios[2]) - hr) <= 2e-3


def test_plane_ratio_bracket(pp_table):
    ratios = asymptotic_report("skyscraper", [500, 1000, 5000], pp_table).ratios()
    assert ratios[0] < ratios[1] < ratios[2]
    assert 0.97 <= ratios[2] <= 1.0


def test_exactness_sentinel(monkeypatch):
    import wulffcount.counting as counting

    plane_partition_table(300)  # every division exact
    # a corrupted divisor sum breaks exact divisibility and must be caught
    bad = counting.sigma2_table(10)
    bad[3] += 1
    monkeypatch.setattr(counting, "sigma2_table", lambda n: bad[: n + 1])
    with pytest.raises(ArithmeticError):
        plane_partition_table(10)
