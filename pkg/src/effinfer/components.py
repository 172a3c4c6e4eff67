"""Reusable pieces shared by the inference patterns.

Model instrumentation (trace reuse, likelihood weighting, per-site log-prob
tracing), the two shallow walkers used to suspend particles, and log-space
weight arithmetic.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from contextvars import ContextVar
from typing import Any, Sequence, TypeVar

from ._debug import debug_enabled
from .effects import Computation, Request, Value, handle_stateful, random_uniform
from .model import Model, Observe, Sample
from .rng import RandomSource

__all__ = [
    "Trace",
    "LPTrace",
    "DegenerateWeightsError",
    "EmptyTraceError",
    "reuse_trace",
    "likelihood",
    "trace_log_probs",
    "advance",
    "suspend_after",
    "done",
    "normalise",
    "log_mean_exp",
    "log_sum_exp",
    "categorical",
    "categorical_many",
    "random_from",
    "pick_uniform",
]

A = TypeVar("A")

Trace = dict  # Addr -> uniform in [0, 1)
LPTrace = dict  # Addr -> log-probability


class DegenerateWeightsError(ValueError):
    """Every weight is zero-probability; there is nothing to resample from."""


class EmptyTraceError(ValueError):
    """A single-site proposal was asked for on a trace with no sample sites."""


# -- model instrumentation --------------------------------------------------


def _build(base: dict, entries) -> dict:
    # entries: persistent cons list (key, value, rest), newest first
    items = []
    while entries is not None:
        key, val, entries = entries
        items.append((key, val))
    out = dict(base)
    for key, val in reversed(items):
        out[key] = val
    return out


def reuse_trace(tau0: Trace):
    """Handler for Sample that replays stored uniforms and records fresh ones.

    The result is ``(value, trace)`` where the trace is ``tau0`` plus an
    entry for every visited address it lacked; ``tau0`` is never mutated.
    """

    def hop(fresh, op, k):
        r = tau0.get(op.addr)
        if r is not None:
            return k(fresh, op.dist.draw(r))
        return random_uniform().bind(lambda r: k((op.addr, r, fresh), op.dist.draw(r)))

    return handle_stateful(Sample, None, lambda fresh, x: Value((x, _build(tau0, fresh))), hop)


def _pair_with_state(s, x):
    return Value((x, s))


def _likelihood_hop(w, op, k):
    return k(w + op.dist.log_prob(op.value), op.value)


_likelihood_h = handle_stateful(Observe, 0.0, _pair_with_state, _likelihood_hop)


def likelihood():
    """Handler for Observe summing observation log-probs; result ``(value, w)``."""
    return _likelihood_h


def trace_log_probs():
    """Pass-through instrumentation recording ``log_prob`` at every site.

    Requests are re-emitted untouched; once a Sample or Observe resolves to
    ``x`` its address maps to ``dist.log_prob(x)``. Result ``(value, lptrace)``.
    """
    check = debug_enabled()

    def finish(x, acc):
        lp = _build({}, acc)
        if check:
            n = 0
            while acc is not None:
                acc = acc[2]
                n += 1
            if n != len(lp):
                raise AssertionError("an address was visited twice in one run")
        return Value((x, lp))

    def loop(acc, c):
        if type(c) is Value:
            return finish(c.value, acc)
        op = c.op
        k = c.resume
        if type(op) is Sample or type(op) is Observe:
            return Request(op, lambda x: loop((op.addr, op.dist.log_prob(x), acc), k(x)))
        return Request(op, lambda x: loop(acc, k(x)))

    return lambda c: loop(None, c)


# -- shallow walkers --------------------------------------------------------

# Debug-mode side channel: addresses at which ``advance`` stopped.
_advance_stops: ContextVar[list | None] = ContextVar("_advance_stops", default=None)


def advance(w: float, c: Model[A]) -> Computation[tuple[Model[A], float]]:
    """Run up to and through the next Observe, then stop.

    Returns ``(rest, w + log_prob)`` where ``rest`` is the model resumed with
    the observed value and still unhandled; a finished model gives
    ``(Value(x), w)``. Other requests pass through.
    """
    if type(c) is Value:
        return Value((c, w))
    op = c.op
    k = c.resume
    if type(op) is Observe:
        stops = _advance_stops.get()
        if stops is not None:
            stops.append(op.addr)
        return Value((k(op.value), w + op.dist.log_prob(op.value)))
    return Request(op, lambda x: advance(w, k(x)))


def suspend_after(t: int, c: Model[A], inclusive: bool = False) -> Model[Model[A]]:
    """Re-emit the first ``t`` Observes, then stop right after the next one.

    The result is the remaining model (resumed with the observed value).
    With ``inclusive`` the Observe at which it stops is re-emitted as well,
    so handlers of the suspended model still see (and weight) it.
    """
    if type(c) is Value:
        return Value(c)
    op = c.op
    k = c.resume
    if type(op) is Observe:
        if t <= 0:
            if inclusive:
                return Request(op, lambda x: Value(k(x)))
            return Value(k(op.value))
        return Request(op, lambda x: suspend_after(t - 1, k(x), inclusive))
    return Request(op, lambda x: suspend_after(t, k(x), inclusive))


def done(pws: Sequence[tuple[Model[A], Any]]) -> list[tuple[A, Any]] | None:
    out = []
    for p, w in pws:
        if type(p) is not Value:
            return None
        out.append((p.value, w))
    return out


# -- log-space weights ------------------------------------------------------


def log_sum_exp(ws: Sequence[float]) -> float:
    if not ws:
        raise ValueError("log_sum_exp of an empty sequence")
    m = max(ws)
    if m == -math.inf:
        return -math.inf
    if m == math.inf:
        return math.inf
    return m + math.log(math.fsum([math.exp(w - m) for w in ws]))


def log_mean_exp(ws: Sequence[float]) -> float:
    if not ws:
        raise ValueError("log_mean_exp of an empty sequence")
    m = max(ws)
    if m == -math.inf or m == math.inf:
        return m
    s = math.fsum([math.exp(w - m) for w in ws])
    # log(s / n) is exactly 0 for equal weights
    return m + math.log(s / len(ws))


def normalise(ws: Sequence[float]) -> list[float]:
    if not ws:
        raise ValueError("normalise of an empty sequence")
    m = max(ws)
    if m == -math.inf:
        raise DegenerateWeightsError("all weights are -inf")
    if math.isnan(m) or m == math.inf or any(w != w for w in ws):
        raise DegenerateWeightsError(f"weights do not normalise (max {m})")
    # subtract the max first: w - (m + log s) would round at large |m|
    shifted = [w - m for w in ws]
    log_s = math.log(math.fsum([math.exp(d) for d in shifted]))
    return [d - log_s for d in shifted]


def _cdf(log_ws_norm: Sequence[float]) -> list[float]:
    acc = 0.0
    cdf = []
    for lw in log_ws_norm:
        acc += math.exp(lw)
        cdf.append(acc)
    if not acc > 0.0:
        raise DegenerateWeightsError("categorical over zero-probability entries")
    return cdf


def _pick(cdf: list[float], u: float) -> int:
    # first index whose cumulative mass exceeds u*total; zero-mass entries
    # never satisfy this strictly
    i = bisect_right(cdf, u * cdf[-1])
    if i == len(cdf):
        i -= 1
        while i > 0 and cdf[i] == cdf[i - 1]:
            i -= 1
    return i


def categorical(log_ws_norm: Sequence[float], src: RandomSource) -> int:
    """Index ``i`` with probability ``exp(log_ws_norm[i])``; one uniform."""
    return _pick(_cdf(log_ws_norm), src.next_uniform())


def categorical_many(log_ws_norm: Sequence[float], k: int, src: RandomSource) -> list[int]:
    """``k`` independent :func:`categorical` draws sharing one cumulative table."""
    cdf = _cdf(log_ws_norm)
    return [_pick(cdf, src.next_uniform()) for _ in range(k)]


def pick_uniform(xs: Sequence[A], r: float) -> A:
    """Element ``floor(r * len(xs))`` of ``xs``, for ``r`` in ``[0, 1)``."""
    if not xs:
        raise EmptyTraceError("cannot choose from an empty sequence")
    return xs[int(r * len(xs))]


def random_from(xs: Sequence[A], src: RandomSource) -> A:
    return pick_uniform(xs, src.next_uniform())

