import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate, stats

from effinfer.distributions import Bernoulli, Normal, Uniform, normal_quantile
from effinfer.rng import RandomSource, as_source


def test_source_is_deterministic_and_seed_sensitive():
    a, b = RandomSource(42), RandomSource(42)
    assert [a.next_uint64() for _ in range(5)] == [b.next_uint64() for _ in range(5)]
    assert RandomSource(1).next_uniform() != RandomSource(2).next_uniform()


def test_uniforms_in_unit_interval_and_roughly_uniform():
    src = RandomSource(9)
    us = np.array([src.next_uniform() for _ in range(20000)])
    assert us.min() >= 0.0 and us.max() < 1.0
    assert stats.kstest(us, "uniform").pvalue > 1e-3


def test_split_children_differ_and_are_reproducible():
    kids = RandomSource(3).split(4)
    firsts = [k.next_uniform() for k in kids]
    assert len(set(firsts)) == 4
    assert firsts == [k.next_uniform() for k in RandomSource(3).split(4)]


def test_as_source_passthrough():
    s = RandomSource(0)
    assert as_source(s) is s
    assert as_source(5).next_uint64() == RandomSource(5).next_uint64()


def test_draw_examples():
    assert Bernoulli(0.5).draw(0.3) is True
    assert Bernoulli(0.5).draw(0.7) is False
    assert Normal(0, 1).draw(0.5) == 0.0
    assert Normal(0, 1).draw(0.975) == pytest.approx(1.959964, abs=1e-5)
    assert Uniform(2, 4).draw(0.25) == 2.5


def test_log_prob_examples():
    assert Bernoulli(0.5).log_prob(True) == pytest.approx(-0.693147, abs=1e-6)
    assert Normal(0, 1).log_prob(0) == pytest.approx(-0.918939, abs=1e-6)
    assert Uniform(0, 1).log_prob(1.5) == -math.inf
    assert Bernoulli(0.0).log_prob(True) == -math.inf
    assert Bernoulli(1.0).log_prob(False) == -math.inf


@pytest.mark.parametrize("bad", [-0.1, 1.0, math.nan])
def test_draw_rejects_out_of_range_uniform(bad):
    with pytest.raises(ValueError):
        Normal(0, 1).draw(bad)


@pytest.mark.parametrize("ctor", [lambda: Normal(0, 0), lambda: Uniform(1, 1), lambda: Bernoulli(1.5)])
def test_invalid_parameters(ctor):
    with pytest.raises(ValueError):
        ctor()


@given(st.floats(min_value=1e-300, max_value=1 - 1e-16))
def test_quantile_against_high_precision_oracle(p):
    mpmath.mp.dps = 50
    got = normal_quantile(p)
    # Newton on the 50-digit normal CDF, started from a crude guess
    start = float(stats.norm.ppf(p)) if 0 < p < 1 else 0.0
    exact = float(mpmath.findroot(lambda x: mpmath.ncdf(x) - mpmath.mpf(p), start))
    assert got == pytest.approx(exact, rel=1e-13, abs=1e-13)


def test_quantile_matches_scipy_grid():
    ps = np.linspace(1e-6, 1 - 1e-6, 2001)
    ours = np.array([normal_quantile(p) for p in ps])
    assert np.max(np.abs(ours - stats.norm.ppf(ps))) < 1e-12


def test_draw_pushes_uniforms_to_target_cdf():
    src = RandomSource(11)
    d = Normal(1.5, 2.0)
    xs = [d.draw(src.next_uniform()) for _ in range(20000)]
    assert stats.kstest(xs, "norm", args=(1.5, 2.0)).statistic < 0.015


@pytest.mark.parametrize("d", [Normal(-1, 0.5), Normal(3, 4)])
def test_normal_density_integrates_to_one(d):
    total, _ = integrate.quad(lambda x: math.exp(d.log_prob(x)), -np.inf, np.inf)
    assert total == pytest.approx(1.0, abs=1e-9)


def test_uniform_density_integrates_to_one():
    d = Uniform(-2, 5)
    total, _ = integrate.quad(lambda x: math.exp(d.log_prob(x)), -3, 6, points=[-2, 5])
    assert total == pytest.approx(1.0, abs=1e-9)


def test_bernoulli_mass_sums_to_one():
    for p in (0.0, 0.2, 0.9, 1.0):
        d = Bernoulli(p)
        assert math.exp(d.log_prob(True)) + math.exp(d.log_prob(False)) == pytest.approx(1.0)
