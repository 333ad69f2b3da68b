from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from binpart.configs import (
    SizeSet,
    build_kpg,
    coverable_types,
    delta_feasible,
    enumerate_configs,
    min_delta,
    prune_useless,
    sample_configs,
    size_set,
)
from binpart.core import Instance, SizeGrid
from oracles import configs_oracle

EX1 = ["0.21", "0.27", "0.29", "0.52"]
EX2 = ["0.60", "0.65", "0.75"]


def test_enumerate_examples():
    assert len(enumerate_configs(EX2, "0.2")) == 0
    assert enumerate_configs(EX2, "0.25").as_set() == {(0, 0, 1)}
    assert enumerate_configs(["0.5", "0.3"], "0.1").as_set() == {(2, 0), (0, 3)}


def test_configuration_properties():
    (cfg,) = [c for c in enumerate_configs(["0.5", "0.3"], "0.1") if c.counts == (0, 3)]
    assert cfg.fill == F(9, 10)
    assert cfg.waste == F(1, 10)
    assert cfg.size_vector == (0, F(9, 10))
    assert cfg.n_items == 3


@pytest.mark.parametrize("delta,ok", [("0.1", False), ("0.2", False), ("0.3", False), ("0.4", True)])
def test_example3_feasibility(delta, ok):
    assert delta_feasible(EX2, delta) is ok


def test_coverable_types_at_0_3():
    # 0.75 (waste 0.25) qualifies, 0.60 and 0.65 do not
    assert coverable_types(EX2, "0.3") == [False, False, True]
    assert delta_feasible(EX2, "0.3", types=[2])


def test_min_delta_examples():
    assert min_delta(EX2, "0.1") == F(2, 5)
    assert min_delta(EX1, "0.1") == F(1, 10)
    assert min_delta(["1"], "0.1") == F(1, 10)
    with pytest.raises(ValueError):
        min_delta(EX1, "0.5")


@settings(max_examples=80, deadline=None)
@given(st.lists(st.integers(1, 100), min_size=1, max_size=6, unique=True))
def test_half_is_always_feasible(units):
    assert delta_feasible([F(u, 100) for u in units], "0.5")


def _fills(g, ws):
    return {F(w, g.sizeset.capacity) for w in ws}


def test_kpg_small_example():
    g = build_kpg(["0.5", "0.3"], "0.1", order="increasing")
    assert g.k == 2
    # layer 1 places the 0.3 type here
    assert _fills(g, g.layers[1]) == {0, F(3, 10), F(3, 5), F(9, 10)}
    g2 = build_kpg(["0.5", "0.3"], "0.1")
    assert _fills(g2, g2.layers[1]) == {0, F(1, 2), 1}
    assert g2.count_paths() == 2
    p = prune_useless(g2)
    assert _fills(p, p.accepting()) == {F(9, 10), 1}
    assert p.configurations().as_set() == {(2, 0), (0, 3)}


def test_kpg_full_item():
    g = build_kpg(["1"], "0")
    assert [(m, F(v, g.sizeset.capacity)) for m, v in g.edges[0][0]] == [(0, 0), (1, 1)]
    assert prune_useless(g).configurations().as_set() == {(1,)}


def test_kpg_example2():
    g = prune_useless(build_kpg(EX2, "0.25"))
    assert g.configurations().as_set() == {(0, 0, 1)}
    assert prune_useless(build_kpg(EX2, "0.2")).is_empty


def test_prune_is_idempotent():
    g = prune_useless(build_kpg(EX1, "0.1"))
    again = prune_useless(g)
    assert again.layers == g.layers and again.edges == g.edges


def test_orders_give_same_paths():
    a = prune_useless(build_kpg(EX1, "0.2", order="increasing")).configurations().as_set()
    b = prune_useless(build_kpg(EX1, "0.2", order="decreasing")).configurations().as_set()
    assert a == b == enumerate_configs(EX1, "0.2").as_set()


def _random_instance(rng, u=20):
    k = int(rng.integers(1, 5))
    units = sorted(rng.choice(np.arange(1, u + 1), size=k, replace=False).tolist())
    counts = [int(c) for c in rng.integers(1, 6, size=k)]
    return Instance(SizeGrid(u), tuple(units), tuple(counts))


def test_pruned_paths_match_brute_force():
    """200 random instances, u = 20, k <= 4, every delta in 0.1 .. 0.5."""
    rng = np.random.default_rng(2024)
    for _ in range(200):
        inst = _random_instance(rng)
        for d in range(1, 6):
            delta = F(d, 10)
            want = configs_oracle(list(inst.sizes), list(inst.caps), delta)
            got = prune_useless(build_kpg(inst, delta)).configurations().as_set()
            assert got == want, (inst, delta)
            assert enumerate_configs(inst, delta).as_set() == want


def test_size_set_caps():
    assert size_set(["0.3", "0.5"]).caps == (3, 2)
    inst = Instance(SizeGrid(10), (3, 5), (1, 4))
    assert size_set(inst).caps == (1, 2)
    ss = SizeSet((3,), 10, (2,))
    assert size_set(ss) is ss
    assert ss.min_fill_units(F(1, 10)) == 9


def test_sample_example2_singletons():
    g = prune_useless(build_kpg(EX2, "0.4"))
    s = sample_configs(g, 5, 0)
    assert s.as_set() <= {(1, 0, 0), (0, 1, 0), (0, 0, 1)}
    assert 1 <= len(s) <= 5


@pytest.mark.parametrize("weighted", [False, True])
def test_samples_are_valid_and_deterministic(weighted):
    g = prune_useless(build_kpg(EX1, "0.1"))
    a = sample_configs(g, 17, 7, weighted=weighted)
    b = sample_configs(g, 17, 7, weighted=weighted)
    assert a.as_set() == b.as_set()
    allowed = enumerate_configs(EX1, "0.1").as_set()
    assert a.as_set() <= allowed
    one = sample_configs(g, 1, 3, weighted=weighted)
    assert len(one) == 1 and F(9, 10) <= one[0].fill <= 1


def test_required_types_are_present():
    g = prune_useless(build_kpg(EX1, "0.1"))
    for seed in range(10):
        s = sample_configs(g, 4, seed, require=[0, 1, 2, 3])
        for t in range(4):
            assert any(c.counts[t] for c in s)


def test_weighted_walk_is_uniform_over_configurations():
    g = prune_useless(build_kpg(["0.1", "0.2", "0.5"], "0.1"))
    allowed = sorted(g.configurations().as_set())
    gen = np.random.default_rng(5)
    from collections import Counter

    tally = Counter()
    for _ in range(3000):
        tally.update(c.counts for c in sample_configs(g, 1, gen, weighted=True))
    assert set(tally) == set(allowed)
    expect = 3000 / len(allowed)
    # chi-square with generous slack
    chi = sum((tally[c] - expect) ** 2 / expect for c in allowed)
    assert chi < 3 * len(allowed) + 30


def test_sample_errors():
    with pytest.raises(ValueError):
        sample_configs(build_kpg(EX2, "0.1"), 3, 0)
    with pytest.raises(ValueError):
        sample_configs(build_kpg(EX1, "0.1"), 0, 0)
