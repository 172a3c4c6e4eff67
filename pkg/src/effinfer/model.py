"""Probabilistic models: Sample and Observe requests over addressed sites.

A model is a :class:`~effinfer.effects.Computation` whose requests are
:class:`Observe`, :class:`Sample` or Random operations.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, NamedTuple, TypeVar

from .distributions import Distribution
from .effects import (
    Computation,
    Effect,
    Request,
    Value,
    handle_deep,
    random_uniform,
    run_random,
)
from .rng import RandomSource, as_source

__all__ = [
    "Addr",
    "Sample",
    "Observe",
    "Model",
    "sample",
    "observe",
    "assign_addresses",
    "default_observe",
    "default_sample",
    "simulate",
]

A = TypeVar("A")

Model = Computation


class Addr(NamedTuple):
    tag: str
    occurrence: int = 0

    def __str__(self) -> str:
        return f"{self.tag}#{self.occurrence}"


# Not frozen: frozen-dataclass construction is measurably slower on the hot
# path. Treat instances as immutable.
@dataclass(slots=True)
class Sample(Effect):
    dist: Distribution
    addr: Addr


@dataclass(slots=True)
class Observe(Effect):
    dist: Distribution
    value: Any
    addr: Addr


def sample(dist: Distribution, tag: str) -> Model[Any]:
    return Request(Sample(dist, Addr(tag, 0)), Value)


def observe(dist: Distribution, y: Any, tag: str) -> Model[Any]:
    return Request(Observe(dist, y, Addr(tag, 0)), Value)


def assign_addresses(model: Model[A]) -> Model[A]:
    """Number each site by how many earlier sites in the run share its tag.

    The per-tag counters are copied on write, so a residual model resumed more
    than once (e.g. a particle duplicated by resampling) numbers each branch
    independently.
    """

    def walk(counts, c):
        if type(c) is Value:
            return c
        op = c.op
        k = c.resume
        if type(op) is Sample or type(op) is Observe:
            tag = op.addr.tag
            n = counts.get(tag, 0)
            if op.addr.occurrence != n:
                if type(op) is Sample:
                    op = Sample(op.dist, Addr(tag, n))
                else:
                    op = Observe(op.dist, op.value, Addr(tag, n))
            after = {**counts, tag: n + 1}
            return Request(op, lambda x: walk(after, k(x)))
        return Request(op, lambda x: walk(counts, k(x)))

    return walk({}, model)


def default_observe():
    """Handler resuming every Observe with its observed value."""
    return handle_deep(Observe, Value, lambda op, k: k(op.value))


def default_sample():
    """Handler drawing every Sample by inverse CDF of a fresh uniform."""
    return handle_deep(
        Sample,
        Value,
        lambda op, k: random_uniform().bind(lambda r: k(op.dist.draw(r))),
    )


_observe_h = default_observe()
_sample_h = default_sample()


def simulate(model: Model[A], seed: int | RandomSource) -> A:
    """Run ``model`` generatively, ignoring conditioning."""
    return run_random(_sample_h(_observe_h(assign_addresses(model))), as_source(seed))
