import math
import random
from collections import Counter

import pytest

from effinfer.components import EmptyTraceError
from effinfer.distributions import Bernoulli, Normal
from effinfer.effects import Perform, Request, Value, run_random
from effinfer.metropolis import (
    Accept,
    Propose,
    ProposeEffect,
    accept_im,
    acceptance_rate,
    exec_model_im,
    exec_model_ssmh,
    handle_propose_im,
    handle_propose_ssmh,
    im,
    mh,
    ssmh,
    ssmh_log_ratio,
)
from effinfer.model import Addr, observe, sample
from effinfer.models import coin_flip, lin_regr, line_data
from effinfer.rng import RandomSource

from _support import counting

P = Addr("p", 0)
COIN = coin_flip(8, 2)


def coin_weight(p):
    return 8 * math.log(p) + 2 * math.log(1 - p)


@pytest.mark.parametrize("n", [0, 3, 10])
@pytest.mark.parametrize("handler", [handle_propose_im, handle_propose_ssmh])
def test_request_counts(n, handler):
    counts = Counter()
    c = mh(n, {}, exec_model_im if handler is handle_propose_im else exec_model_ssmh, COIN)
    c = counting((ProposeEffect, Perform), counts)(c)
    chain = run_random(handler()(c), RandomSource(1))
    assert len(chain) == n + 1
    assert counts == Counter({"Perform": n + 1, "Propose": n, "Accept": n}) - Counter()


def test_negative_iterations_rejected():
    with pytest.raises(ValueError):
        mh(-1, {}, exec_model_im, COIN)


def test_chain_validity_per_step():
    log = []
    c = counting(ProposeEffect, Counter(), log)(mh(50, {}, exec_model_ssmh, COIN))
    chain = run_random(handle_propose_ssmh()(c), RandomSource(4))[::-1]
    accepts = [(op, x) for op, x in log if isinstance(op, Accept)]
    for (op, nxt), prev, cur in zip(accepts, chain, chain[1:]):
        assert op.current is prev
        assert nxt is cur and (cur is op.current or cur is op.proposed)


def test_accept_im_examples():
    assert accept_im(-3.0, -2.0, 0.9)
    assert not accept_im(-2.0, -5.0, 0.1)
    assert accept_im(-4.0, -4.0, 0.999999)
    assert not accept_im(0.0, math.nan, 0.0)


def test_accept_im_table_against_formula():
    rng = random.Random(0)
    for _ in range(50):
        w, w2, u = rng.uniform(-10, 0), rng.uniform(-10, 0), rng.random()
        assert accept_im(w, w2, u) == (math.exp(w2 - w) >= u)


def test_ssmh_ratio_example():
    a, b, o = Addr("a"), Addr("b"), Addr("o")
    w = {a: -1.0, b: -2.0, o: -0.5}
    w2 = {a: -1.0, b: -1.5, o: -0.3}
    r = ssmh_log_ratio(w, w2, b, 2, 2)
    assert r == pytest.approx(0.2)
    assert math.exp(r) >= 0.5
    assert ssmh_log_ratio(w, w, a, 3, 3) == 0.0


def test_ssmh_ratio_table_against_formula():
    rng = random.Random(1)
    addrs = [Addr("s", i) for i in range(4)]
    for _ in range(50):
        w = {a: rng.uniform(-5, 0) for a in addrs}
        w2 = {a: rng.uniform(-5, 0) for a in addrs[: rng.randint(1, 4)]}
        site = rng.choice(list(w2))
        n, n2 = rng.randint(1, 4), rng.randint(1, 4)
        expect = sum(w2[a] - w[a] for a in w2 if a != site) + math.log(n / n2)
        assert ssmh_log_ratio(w, w2, site, n, n2) == pytest.approx(expect, abs=1e-12)


def propose_request(tau):
    return Request(Propose(tau), Value)


def test_im_proposal_redraws_every_key():
    tau = {Addr("a"): 0.1, Addr("b"): 0.2}
    c = propose_request(tau)
    new = run_random(handle_propose_im()(c), RandomSource(3))
    assert set(new) == set(tau) and all(new[k] != tau[k] for k in tau)


def test_ssmh_proposal_changes_exactly_one_key():
    tau = {Addr("s", i): i / 10 for i in range(6)}
    for seed in range(30):
        new = run_random(handle_propose_ssmh()(propose_request(tau)), RandomSource(seed))
        assert set(new) == set(tau)
        assert sum(new[k] != tau[k] for k in tau) == 1


def test_ssmh_empty_trace_is_an_error():
    with pytest.raises(EmptyTraceError):
        run_random(handle_propose_ssmh()(propose_request({})), RandomSource(0))


def test_exec_im_examples():
    x, (w, tau) = exec_model_im({}, observe(Normal(0, 1), 0.0, "y").bind(lambda _: Value(1)))(RandomSource(0))
    assert w == 0.0 - 0.5 * math.log(2 * math.pi) and tau == {}
    free = sample(Normal(0, 1), "x")
    assert exec_model_im({}, free)(RandomSource(0))[1][0] == 0.0
    node = exec_model_im({P: 0.75}, COIN)(RandomSource(0))
    assert node[0] == 0.75 and node[1][0] == pytest.approx(coin_weight(0.75), abs=1e-12)
    again = exec_model_im(node[1][1], COIN)(RandomSource(99))
    assert again == node


def test_im_zero_iterations():
    chain = im(0, COIN, 5)
    assert len(chain) == 1
    p = chain[0][0]
    assert chain[0][1][0] == pytest.approx(coin_weight(p))


def test_exec_ssmh_lptrace():
    m = sample(Normal(0, 1), "x").bind(lambda x: observe(Normal(x, 1), 0.3, "y"))
    _, (lp, tau) = exec_model_ssmh({}, m)(RandomSource(2))
    assert len(lp) == 2 and set(tau) == {Addr("x")}


def test_ssmh_prunes_stale_sites():
    # proposals over a trace carrying an unused site drop it on acceptance
    tau = {P: 0.5, Addr("ghost", 0): 0.4}
    chain = ssmh(30, tau, COIN, 3)
    moved = [node for node in chain if node[1][1] is not tau and Addr("ghost", 0) not in node[1][1]]
    assert moved


def test_ssmh_detailed_balance_on_discrete_prior():
    m = sample(Bernoulli(0.3), "b")
    chain = ssmh(50_000, {}, m, 12)
    freq = sum(1 for x, _ in chain if x) / len(chain)
    assert abs(freq - 0.3) < 0.02


def test_acceptance_rate_counts_moves():
    a, b = ("a", None), ("b", None)
    assert acceptance_rate([a, a, b, b]) == pytest.approx(1 / 3)
    assert math.isnan(acceptance_rate([a]))


def test_ssmh_linregr_runs_with_continuous_sites():
    chain = ssmh(200, {}, lin_regr(line_data()), 1)
    assert len(chain) == 201
    assert all(set(node[1][1]) == {Addr("m"), Addr("c")} for node in chain)
