"""Computation trees, effect requests and handlers.

A :class:`Computation` is either a :class:`Value` leaf or a :class:`Request`
node pairing an effect operation with a resumption. Effect kinds are classes
deriving directly from :class:`Effect`; their operations are subclasses of
the kind, so ``isinstance(op, Kind)`` is the membership test.

Handlers discharge one effect kind and pass every other request through
unchanged. They are deep: the resumption handed to ``hop`` keeps handling.

Models must be built right-associatively (``call(op).bind(rest)``) for long
sequences; a left-nested tower of ``bind`` calls resumes through one Python
frame per level.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Generic, Sequence, TypeVar

from .rng import RandomSource

__all__ = [
    "Effect",
    "Computation",
    "Value",
    "Request",
    "chain",
    "fmap",
    "call",
    "pure",
    "for_each",
    "handle_deep",
    "handle_stateful",
    "Signature",
    "EffectSum",
    "effect_of",
    "decompose",
    "Random",
    "RandomUniform",
    "Perform",
    "random_uniform",
    "perform",
    "run_random",
    "UnhandledEffectError",
]

A = TypeVar("A")
B = TypeVar("B")
S = TypeVar("S")


class UnhandledEffectError(RuntimeError):
    pass


class Effect:
    """Base of all effect kinds.

    A class inheriting directly from ``Effect`` names an effect kind;
    operation classes inherit from their kind.
    """

    __slots__ = ()
    effect: type[Effect]

    def __init_subclass__(cls, **kw):
        super().__init_subclass__(**kw)
        if Effect in cls.__bases__:
            cls.effect = cls


def effect_of(op: Effect) -> type[Effect]:
    return type(op).effect


class Computation(Generic[A]):
    __slots__ = ()

    def bind(self, f: Callable[[A], Computation[B]]) -> Computation[B]:
        return chain(self, f)

    def map(self, f: Callable[[A], B]) -> Computation[B]:
        return fmap(self, f)


class Value(Computation[A]):
    __slots__ = ("value",)

    def __init__(self, value: A):
        self.value = value

    def __repr__(self) -> str:
        return f"Value({self.value!r})"

    def __eq__(self, other):
        return type(other) is Value and self.value == other.value

    __hash__ = None  # type: ignore[assignment]


class Request(Computation[A]):
    __slots__ = ("op", "resume")

    def __init__(self, op: Effect, resume: Callable[[Any], Computation[A]]):
        self.op = op
        self.resume = resume

    def __repr__(self) -> str:
        return f"Request({self.op!r}, ...)"


pure = Value


def chain(c: Computation[A], f: Callable[[A], Computation[B]]) -> Computation[B]:
    if type(c) is Value:
        return f(c.value)
    k = c.resume
    return Request(c.op, lambda x: chain(k(x), f))


def fmap(c: Computation[A], f: Callable[[A], B]) -> Computation[B]:
    return chain(c, lambda x: Value(f(x)))


def call(op: Effect) -> Computation[Any]:
    return Request(op, Value)


def for_each(items: Sequence[A], f: Callable[[A], Computation[Any]]) -> Computation[None]:
    """Run ``f`` over ``items`` in order, discarding results."""
    n = len(items)

    def go(i):
        if i == n:
            return Value(None)
        return chain(f(items[i]), lambda _: go(i + 1))

    return go(0)


# -- handlers ---------------------------------------------------------------


class _Tail(Request):
    """Marker returned by a resumption invoked synchronously inside ``hop``.

    Lets the handler loop continue in place instead of recursing, so long
    runs of consecutively handled requests do not grow the Python stack.
    """

    __slots__ = ()

    def __init__(self):
        super().__init__(None, _no_resume)


def _no_resume(_):
    raise RuntimeError("tail marker escaped its handler")


def handle_stateful(
    effect: type[Effect],
    s0: S,
    hval: Callable[[S, A], Computation[B]],
    hop: Callable[[S, Any, Callable[[S, Any], Computation[B]]], Computation[B]],
) -> Callable[[Computation[A]], Computation[B]]:
    """Deep handler for ``effect`` threading state from ``s0``.

    ``hop(s, op, resume)`` interprets one request; ``resume(s', x)`` continues
    the handled computation with result ``x`` and state ``s'``. Requests of
    other kinds are re-emitted with the state held fixed.
    """

    def run(s, c):
        while True:
            if type(c) is Value:
                return hval(s, c.value)
            op = c.op
            k = c.resume
            if not isinstance(op, effect):
                return Request(op, lambda x, s=s, k=k: run(s, k(x)))

            # frame = [hop still running, tail marker, deferred (state, result)]
            frame = [True, _Tail(), None]

            def resume(s2, x, k=k, frame=frame):
                if frame[0] and frame[2] is None:
                    frame[2] = (s2, x)
                    return frame[1]
                return run(s2, k(x))

            out = hop(s, op, resume)
            frame[0] = False
            if frame[2] is not None:
                if out is frame[1]:
                    s, x = frame[2]
                    c = k(x)
                    continue
                # hop consumed the marker instead of returning it; replay
                # with an eager resumption (hops are pure)
                out = hop(s, op, lambda s2, x, k=k: run(s2, k(x)))
            return out

    return lambda c: run(s0, c)


def handle_deep(
    effect: type[Effect],
    hval: Callable[[A], Computation[B]],
    hop: Callable[[Any, Callable[[Any], Computation[B]]], Computation[B]],
) -> Callable[[Computation[A]], Computation[B]]:
    """Stateless deep handler; ``hop(op, resume)`` with ``resume(x)``."""
    return handle_stateful(
        effect,
        None,
        lambda _, x: hval(x),
        lambda _, op, k: hop(op, lambda x: k(None, x)),
    )


# -- explicit signatures ----------------------------------------------------


@dataclass(frozen=True)
class EffectSum:
    """An operation tagged with its position in a signature."""

    tag: int
    op: Effect


@dataclass(frozen=True)
class Signature:
    """Ordered list of effect kinds; handlers discharge the head."""

    effects: tuple[type[Effect], ...]

    def __init__(self, *effects: type[Effect]):
        object.__setattr__(self, "effects", tuple(effects))

    def __len__(self):
        return len(self.effects)

    def __contains__(self, kind):
        return kind in self.effects

    @property
    def head(self) -> type[Effect]:
        return self.effects[0]

    @property
    def tail(self) -> Signature:
        return Signature(*self.effects[1:])

    def inject(self, op: Effect) -> EffectSum:
        try:
            return EffectSum(self.effects.index(effect_of(op)), op)
        except ValueError:
            raise TypeError(f"{type(op).__name__} is not in {self}") from None

    def project(self, es: EffectSum, kind: type[Effect]) -> Effect | None:
        if self.effects[es.tag] is kind:
            return es.op
        return None

    def lift(self, kind: type[Effect]) -> Signature:
        """Reorder so ``kind`` is the head."""
        if kind not in self.effects:
            raise TypeError(f"{kind.__name__} is not in {self}")
        return Signature(kind, *(e for e in self.effects if e is not kind))

    def __repr__(self):
        return "Signature[" + ", ".join(e.__name__ for e in self.effects) + "]"


def decompose(es: EffectSum) -> tuple[Effect | None, EffectSum | None]:
    """Split a request tagged in ``e : rest``.

    Returns ``(op, None)`` when it belongs to the head effect, otherwise
    ``(None, es')`` re-tagged for ``rest``.
    """
    if es.tag == 0:
        return es.op, None
    return None, EffectSum(es.tag - 1, es.op)


# -- randomness at the outer boundary ---------------------------------------


class Random(Effect):
    __slots__ = ()


class RandomUniform(Random):
    """Request one uniform draw from ``[0, 1)``."""

    __slots__ = ()

    def __repr__(self):
        return "RandomUniform()"


class Perform(Random):
    """Run ``action(source)`` on a child source split from the outer one."""

    __slots__ = ("action",)

    def __init__(self, action: Callable[[RandomSource], Any]):
        self.action = action

    def __repr__(self):
        return f"Perform({self.action!r})"


_UNIFORM = RandomUniform()


def random_uniform() -> Computation[float]:
    return Request(_UNIFORM, Value)


def perform(action: Callable[[RandomSource], A]) -> Computation[A]:
    return Request(Perform(action), Value)


def run_random(c: Computation[A], src: RandomSource) -> A:
    """Discharge the final Random effect, drawing from ``src`` in tree order."""
    while type(c) is not Value:
        op = c.op
        if type(op) is RandomUniform:
            c = c.resume(src.next_uniform())
        elif type(op) is Perform:
            c = c.resume(op.action(src.spawn()))
        else:
            raise UnhandledEffectError(f"unhandled request {op!r} reached run_random")
    return c.value
