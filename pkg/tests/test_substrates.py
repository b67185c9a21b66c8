import pytest

from dpbox.graphs import load_graph
from dpbox.knapsack import knapsack_exact, load_knapsack
from dpbox.mechanisms import ApproxParams, WrapConfig, wrap_cauchy
from dpbox.noise import make_rng
from dpbox.streams import exact_distinct, exact_l2, load_stream
from dpbox.substrates import (
    SUBSTRATE_NAMES,
    dataset_kind,
    exact_value,
    make_substrate,
)

PARAMS = ApproxParams(alpha=0.3, kappa=0.0, fail_prob=1 / 3)


@pytest.fixture(scope="module")
def demo_cc():
    return load_graph("data/demo_cc.graph")


@pytest.fixture(scope="module")
def demo_mst():
    return load_graph("data/demo_mst.graph")


@pytest.fixture(scope="module")
def demo_knapsack():
    return load_knapsack("data/demo_knapsack.txt")


@pytest.fixture(scope="module")
def demo_insert():
    return load_stream("data/demo_stream_insert.txt")


@pytest.fixture(scope="module")
def demo_turnstile():
    return load_stream("data/demo_stream_turnstile.txt")


def test_substrate_names_are_stable():
    assert SUBSTRATE_NAMES == (
        "cc_estimate",
        "cc_exact",
        "f0_exact",
        "f0_kmv",
        "knapsack",
        "l2_ams",
        "l2_exact",
        "mst_estimate",
        "mst_exact",
        "sw_de",
    )


def test_dataset_kinds():
    assert dataset_kind("cc_exact") == "graph"
    assert dataset_kind("cc_estimate") == "graph"
    assert dataset_kind("mst_exact") == "graph"
    assert dataset_kind("mst_estimate") == "graph"
    assert dataset_kind("knapsack") == "knapsack"
    for name in ("l2_exact", "l2_ams", "f0_exact", "f0_kmv", "sw_de"):
        assert dataset_kind(name) == "stream"
    with pytest.raises(ValueError):
        dataset_kind("nope")
    with pytest.raises(ValueError):
        make_substrate("nope")


def test_cc_exact_substrate(demo_cc):
    sub = make_substrate("cc_exact")
    assert sub.is_deterministic
    value = sub.evaluate(demo_cc, PARAMS, make_rng(0))
    assert value == 3.0
    assert sub.calls == 1


def test_cc_estimate_substrate_uses_kappa(demo_cc):
    sub = make_substrate("cc_estimate")
    assert not sub.is_deterministic
    params = ApproxParams(alpha=0.0, kappa=6.0, fail_prob=1 / 3)
    value = sub.evaluate(demo_cc, params, make_rng(3))
    assert 0.0 < value <= demo_cc.n
    assert sub.meter["queries"] > 0
    with pytest.raises(ValueError):
        sub.evaluate(demo_cc, ApproxParams(0.0, 0.0, 1 / 3), make_rng(0))


def test_cc_estimate_boosts_on_small_fail_prob(demo_cc):
    relaxed = make_substrate("cc_estimate")
    relaxed.evaluate(demo_cc, ApproxParams(0.0, 6.0, 1 / 3), make_rng(5))
    boosted = make_substrate("cc_estimate")
    boosted.evaluate(demo_cc, ApproxParams(0.0, 6.0, 0.05), make_rng(5))
    # 0.05 needs 67 replicas, so the probe meter grows accordingly.
    assert boosted.meter["queries"] >= 50 * relaxed.meter["queries"]


def test_mst_substrates(demo_mst):
    exact = make_substrate("mst_exact")
    assert exact.evaluate(demo_mst, PARAMS, make_rng(0)) == 10.0
    est = make_substrate("mst_estimate")
    truth = 10.0
    value = est.evaluate(demo_mst, ApproxParams(0.5, 0.0, 0.7), make_rng(2))
    assert abs(value - truth) <= 0.5 * truth
    assert est.meter["queries"] > 0
    with pytest.raises(ValueError):
        est.evaluate(demo_mst, ApproxParams(0.0, 0.0, 0.7), make_rng(0))


def test_knapsack_substrate(demo_knapsack):
    sub = make_substrate("knapsack")
    assert sub.is_deterministic
    opt = knapsack_exact(demo_knapsack)
    value = sub.evaluate(demo_knapsack, ApproxParams(0.1, 0.0, 1 / 3),
                         make_rng(0))
    assert (1 - 0.1) * opt <= value <= opt


def test_l2_substrates(demo_turnstile):
    truth = exact_l2(demo_turnstile)
    exact = make_substrate("l2_exact")
    assert exact.evaluate(demo_turnstile, PARAMS, make_rng(0)) == truth
    sketched = make_substrate("l2_ams")
    value = sketched.evaluate(demo_turnstile,
                              ApproxParams(0.3, 0.0, 0.05), make_rng(11))
    assert abs(value - truth) <= 0.3 * truth
    assert sketched.meter["space_words"] > 0
    # alpha=0 falls back to the exact accumulator and meters the items seen.
    brute = make_substrate("l2_ams")
    assert brute.evaluate(demo_turnstile, ApproxParams(0.0, 0.0, 0.05),
                          make_rng(0)) == truth
    assert brute.meter["items"] == demo_turnstile.length


def test_f0_substrates(demo_insert):
    truth = float(exact_distinct(demo_insert))
    exact = make_substrate("f0_exact")
    assert exact.evaluate(demo_insert, PARAMS, make_rng(0)) == truth
    sketched = make_substrate("f0_kmv")
    value = sketched.evaluate(demo_insert, ApproxParams(0.3, 0.0, 0.05),
                              make_rng(4))
    assert abs(value - truth) <= 0.3 * truth
    assert sketched.meter["space_words"] > 0


def test_sw_de_substrate(demo_insert):
    sub = make_substrate("sw_de", {"window": 50})
    truth = float(len(set(demo_insert.items()[-50:])))
    brute = sub.evaluate(demo_insert, ApproxParams(0.0, 0.0, 0.05),
                         make_rng(0))
    assert brute == truth
    approx = sub.evaluate(demo_insert, ApproxParams(0.5, 0.0, 0.05),
                          make_rng(8))
    assert abs(approx - truth) <= 0.5 * truth


def test_sw_de_rejects_turnstile(demo_turnstile):
    sub = make_substrate("sw_de", {"window": 10})
    with pytest.raises(ValueError):
        sub.evaluate(demo_turnstile, PARAMS, make_rng(0))


def test_exact_values_match_demos(demo_cc, demo_mst, demo_knapsack,
                                  demo_insert, demo_turnstile):
    assert exact_value("cc_exact", demo_cc) == 3.0
    assert exact_value("cc_estimate", demo_cc) == 3.0
    assert exact_value("mst_exact", demo_mst) == 10.0
    assert exact_value("knapsack", demo_knapsack) == knapsack_exact(
        demo_knapsack)
    assert exact_value("l2_exact", demo_turnstile) == exact_l2(demo_turnstile)
    assert exact_value("f0_exact", demo_insert) == 30.0
    assert exact_value("sw_de", demo_insert, {"window": 50}) == float(
        len(set(demo_insert.items()[-50:])))


def test_cauchy_route_rejects_randomized_substrates(demo_cc, demo_turnstile):
    cfg = WrapConfig(epsilon=1.0, delta=0.01, alpha=0.5, kappa=1.0,
                     delta_f=2.0, gamma=3.0)
    out, trace = wrap_cauchy(make_substrate("cc_exact"), demo_cc, cfg,
                             make_rng(0))
    assert trace.substrate_value == 3.0
    with pytest.raises(ValueError):
        wrap_cauchy(make_substrate("cc_estimate"), demo_cc, cfg, make_rng(0))
    with pytest.raises(ValueError):
        wrap_cauchy(make_substrate("l2_ams"), demo_turnstile, cfg,
                    make_rng(0))
