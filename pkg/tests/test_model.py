import math
from collections import Counter

from effinfer.components import trace_log_probs
from effinfer.distributions import Bernoulli, Normal, Uniform
from effinfer.effects import Random, Value, for_each, run_random
from effinfer.model import (
    Addr,
    Observe,
    Sample,
    assign_addresses,
    default_observe,
    default_sample,
    observe,
    sample,
    simulate,
)
from effinfer.models import coin_flip, hmm_series, lin_gauss_hmm, lin_regr, line_data, HMMData
from effinfer.rng import RandomSource

from _support import ScriptedSource, counting


def test_point_mass_sample():
    assert simulate(sample(Bernoulli(1.0), "x"), 0) is True


def test_observe_returns_observed_value():
    assert simulate(observe(Normal(0, 1), 2.5, "y"), 0) == 2.5
    assert simulate(observe(Normal(0, 1), 7, "y").bind(lambda v: Value(v + 1)), 0) == 8


def _addresses(model):
    seen = []

    def walk(c):
        while type(c) is not Value:
            if isinstance(c.op, (Sample, Observe)):
                seen.append(c.op.addr)
            if isinstance(c.op, Observe):
                c = c.resume(c.op.value)
            elif isinstance(c.op, Sample):
                c = c.resume(c.op.dist.draw(0.5))
            else:
                c = c.resume(0.5)

    walk(assign_addresses(model))
    return seen


def test_occurrences_count_per_tag():
    m = for_each(range(3), lambda _: sample(Normal(0, 1), "x")).bind(
        lambda _: observe(Normal(0, 1), 0.0, "y")
    )
    assert _addresses(m) == [Addr("x", 0), Addr("x", 1), Addr("x", 2), Addr("y", 0)]


def test_assign_addresses_is_idempotent():
    m = lin_regr(line_data(3))
    assert _addresses(assign_addresses(m)) == _addresses(m)


def test_addresses_independent_per_branch():
    # resuming the same residual twice numbers both branches from the same point
    m = assign_addresses(
        sample(Normal(0, 1), "x").bind(lambda _: sample(Normal(0, 1), "x"))
    )
    rest = m.resume(0.0)
    assert rest.op.addr == Addr("x", 1)
    assert m.resume(1.0).op.addr == Addr("x", 1)


def test_addr_str():
    assert str(Addr("p", 3)) == "p#3"


def test_default_observe_feeds_values_in_order():
    ys = [0.1, -2.0, 3.0, 4.5, 0.0]
    got = []
    m = for_each(ys, lambda y: observe(Normal(0, 1), y, "y").bind(lambda v: Value(got.append(v))))
    assert default_observe()(m) == Value(None)
    assert got == ys


def test_observe_free_model_unchanged_by_default_observe():
    m = sample(Normal(0, 1), "x")
    out = default_observe()(m)
    assert isinstance(out.op, Sample)


def test_default_sample_uses_one_uniform_per_sample():
    counts = Counter()
    m = for_each(range(4), lambda _: sample(Uniform(0, 1), "u"))
    handled = counting(Random, counts)(default_sample()(m))
    run_random(handled, RandomSource(0))
    assert counts["RandomUniform"] == 4


def test_default_sample_maps_uniform_stream():
    m = sample(Uniform(0, 10), "a").bind(lambda a: sample(Normal(0, 1), "b").bind(lambda b: Value((a, b))))
    src = ScriptedSource([0.25, 0.5])
    assert run_random(default_sample()(m), src) == (2.5, 0.0)


def test_simulate_deterministic_for_example_models():
    models = [coin_flip(8, 2), lin_regr(line_data()), lin_gauss_hmm(HMMData(hmm_series(6)))]
    for m in models:
        assert simulate(m, 17) == simulate(m, 17)


def test_addresses_unique_in_example_models():
    for m in [coin_flip(3, 4), lin_regr(line_data(5)), lin_gauss_hmm(HMMData(hmm_series(7)))]:
        sites = _addresses(m)
        h = default_sample()(default_observe()(trace_log_probs()(assign_addresses(m))))
        _, lp = run_random(h, RandomSource(2))
        assert len(lp) == len(sites) == len(set(sites))
        assert all(math.isfinite(v) for v in lp.values())
