import math

import numpy as np
import pytest

from dpbox.noise import make_rng
from dpbox.sketches import (AmsSketch, KmvSketch, ams_estimate, ams_update,
                            kmv_estimate, kmv_update)
from dpbox.streams import UpdateStream, exact_distinct, exact_f2
from helpers import random_stream


# ---------------------------------------------------------------- AMS


def test_ams_sizing():
    sk = AmsSketch.from_accuracy(0.2, 0.05, 100, make_rng(0))
    assert sk.rows == 178          # ceil(48 * ln(2/0.05))
    assert sk.cols == 400          # ceil(16 / 0.2^2)
    sk2 = AmsSketch.from_accuracy(0.5, 1.0 / 3.0, 100, make_rng(0))
    assert sk2.rows == 87
    assert sk2.cols == 64
    assert sk2.space_words == 87 * 64 + 4 * 87 * 64


def test_ams_validation():
    rng = make_rng(0)
    with pytest.raises(ValueError):
        AmsSketch(0, 4, 10, rng)
    with pytest.raises(ValueError):
        AmsSketch(4, 4, 2 ** 31 - 1, rng)  # universe must stay below the prime
    AmsSketch(4, 4, 2 ** 31 - 2, rng)
    sk = AmsSketch(4, 4, 10, rng)
    with pytest.raises(ValueError):
        sk.update(10, 1)
    with pytest.raises(ValueError):
        sk.update_bulk([1, 2], [1])
    with pytest.raises(ValueError):
        sk.update_bulk([1, 12], [1, 1])


def test_ams_empty_estimate_zero():
    sk = AmsSketch(8, 16, 50, make_rng(1))
    assert sk.estimate() == 0.0


def test_ams_single_item_is_exact():
    # One item with frequency c makes every counter +/- c, so every squared
    # counter is exactly c^2 and so is the estimate.
    sk = AmsSketch(8, 16, 50, make_rng(2))
    for _ in range(5):
        sk.update(7, 1)
    assert np.all(np.abs(sk.counters) == 5)
    assert sk.estimate() == 25.0


def test_ams_insert_delete_cancellation_bitwise():
    sk = AmsSketch(16, 32, 64, make_rng(3))
    rng = make_rng(4)
    items = rng.integers(0, 64, size=300)
    for it in items:
        sk.update(int(it), 1)
    for it in items[::-1]:
        sk.update(int(it), -1)
    assert np.all(sk.counters == 0)
    assert sk.estimate() == 0.0


def test_ams_bulk_equals_sequential_bitwise():
    s = random_stream(40, 500, "turnstile", make_rng(5))
    a = AmsSketch(16, 32, 40, make_rng(6))
    b = AmsSketch(16, 32, 40, make_rng(6))
    for item, delta in s.updates:
        a.update(item, delta)
    b.consume(s)
    assert np.array_equal(a.counters, b.counters)
    assert a.estimate() == b.estimate()


def test_ams_estimate_two_items():
    # Frequencies (3, 4): F2 = 25. At alpha=0.2, delta=0.05 the estimate must
    # land within (1 +/- 0.2) * 25 in at least 95% of trials; the observed
    # rate over 500 seeded trials is checked against that with 3 binomial
    # sigma of slack.
    hits = 0
    trials = 500
    for t in range(trials):
        sk = AmsSketch.from_accuracy(0.2, 0.05, 10, make_rng(7, t))
        sk.update_bulk([0] * 3 + [1] * 4, [1] * 7)
        if abs(sk.estimate() - 25.0) <= 0.2 * 25.0:
            hits += 1
    sigma = math.sqrt(0.95 * 0.05 / trials)
    assert hits / trials >= 0.95 - 3 * sigma


def test_ams_counter_unbiasedness_and_fourth_moment():
    # With one column per row, each row mean is a single Z^2; across 100k
    # rows the average must match F2 = 6 within 3 sigma, where
    # Var(Z^2) = 3*F2^2 - 2*F4 - F2^2 = 36 for frequencies (2, 1, 1).
    # This exercises the 4-wise independence of the sign polynomials.
    sk = AmsSketch(100_000, 1, 3, make_rng(8))
    sk.update_bulk([0, 0, 1, 2], [1, 1, 1, 1])
    z = sk.counters.astype(np.float64)[:, 0]
    mean = float((z * z).mean())
    sigma = 6.0 / math.sqrt(100_000)
    assert abs(mean - 6.0) < 3 * sigma


def test_ams_accuracy_on_random_stream():
    s = random_stream(200, 5000, "insert", make_rng(9))
    truth = exact_f2(s)
    sk = AmsSketch.from_accuracy(0.2, 0.05, 200, make_rng(10))
    sk.consume(s)
    assert abs(sk.estimate() - truth) <= 0.2 * truth


def test_ams_wrappers():
    sk = AmsSketch(4, 4, 10, make_rng(11))
    ams_update(sk, 3, 1)
    assert ams_estimate(sk) == sk.estimate()


# ---------------------------------------------------------------- KMV


def test_kmv_sizing():
    sk = KmvSketch.from_accuracy(0.1, 1.0 / 3.0, make_rng(0))
    assert sk.k == 1600
    assert sk.reps == 22
    sk2 = KmvSketch.from_accuracy(0.2, 0.05, make_rng(0))
    assert sk2.k == 400 and sk2.reps == 45
    assert sk2.space_words == 45 * 400 + 45
    with pytest.raises(ValueError):
        KmvSketch(0, 4, make_rng(0))
    with pytest.raises(ValueError):
        KmvSketch.from_accuracy(0.0, 0.1, make_rng(0))


def test_kmv_empty_and_sub_threshold_exact():
    sk = KmvSketch(k=64, reps=9, rng=make_rng(12))
    assert sk.estimate() == 0.0
    items = list(range(40)) * 3  # 40 distinct, repeated arrivals
    rng = make_rng(13)
    rng.shuffle(items)
    for it in items:
        sk.update(int(it))
    # Below k distinct hashes every copy stores them all and counts exactly.
    assert sk.estimate() == 40.0


def test_kmv_estimate_monotone_under_insertions():
    sk = KmvSketch(k=8, reps=5, rng=make_rng(14))
    rng = make_rng(15)
    prev = 0.0
    for _ in range(300):
        sk.update(int(rng.integers(0, 500)))
        est = sk.estimate()
        assert est >= prev - 1e-12
        prev = est


def test_kmv_bulk_equals_sequential():
    items = make_rng(16).integers(0, 2000, size=1500)
    a = KmvSketch(k=32, reps=7, rng=make_rng(17))
    b = KmvSketch(k=32, reps=7, rng=make_rng(17))
    for it in items:
        a.update(int(it))
    b.update_bulk(items)
    for r in range(7):
        assert sorted(a._retained[r]) == sorted(b._retained[r])
    assert a.estimate() == b.estimate()


def test_kmv_rejects_turnstile():
    sk = KmvSketch(k=8, reps=3, rng=make_rng(18))
    s = UpdateStream(universe_size=4, updates=[(0, 1), (0, -1)],
                     mode="turnstile")
    with pytest.raises(ValueError):
        sk.consume(s)


def test_kmv_accuracy_above_threshold():
    s = random_stream(8000, 12_000, "insert", make_rng(19))
    truth = exact_distinct(s)
    sk = KmvSketch.from_accuracy(0.1, 1.0 / 3.0, make_rng(20))
    sk.consume(s)
    assert truth > sk.k  # actually in the estimating regime
    assert abs(sk.estimate() - truth) <= 0.1 * truth


def test_kmv_repeated_trials_mostly_accurate():
    s = random_stream(3000, 4000, "insert", make_rng(21))
    truth = exact_distinct(s)
    hits = 0
    trials = 30
    for t in range(trials):
        sk = KmvSketch.from_accuracy(0.25, 1.0 / 3.0, make_rng(22, t))
        sk.consume(s)
        if abs(sk.estimate() - truth) <= 0.25 * truth:
            hits += 1
    assert hits >= 27


def test_kmv_hash_deterministic_in_salt():
    from dpbox.sketches import _kmv_hash
    items = np.arange(100)
    h1 = _kmv_hash(items, np.uint64(12345))
    h2 = _kmv_hash(items, np.uint64(12345))
    h3 = _kmv_hash(items, np.uint64(54321))
    assert np.array_equal(h1, h2)
    assert not np.array_equal(h1, h3)
    assert np.all(h1 > 0.0) and np.all(h1 <= 1.0)


def test_kmv_wrappers():
    sk = KmvSketch(k=4, reps=3, rng=make_rng(23))
    kmv_update(sk, 9)
    assert kmv_estimate(sk) == sk.estimate() == 1.0
