"""Validation models: Beta-Bernoulli coin, Bayesian linear regression and a
linear-Gaussian hidden Markov model. Each has a closed-form counterpart in
:mod:`effinfer.oracles`."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .distributions import Bernoulli, Normal, Uniform
from .effects import Value, for_each
from .model import Model, observe, sample

__all__ = [
    "LinRegrData",
    "HMMData",
    "coin_flip",
    "lin_regr",
    "lin_gauss_hmm",
    "gaussian_pair",
    "line_data",
    "hmm_series",
    "LINREGR_PRIOR_STD",
    "HMM_PRIOR_STD",
]

LINREGR_PRIOR_STD = (3.0, 2.0)  # slope, intercept
HMM_PRIOR_STD = 1.0


@dataclass(frozen=True)
class LinRegrData:
    xs: tuple[float, ...]
    ys: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "xs", tuple(self.xs))
        object.__setattr__(self, "ys", tuple(self.ys))
        if len(self.xs) != len(self.ys):
            raise ValueError(f"xs and ys differ in length ({len(self.xs)} vs {len(self.ys)})")
        if not self.xs:
            raise ValueError("linear regression needs at least one point")


@dataclass(frozen=True)
class HMMData:
    ys: tuple[float, ...]
    q_std: float = 1.0
    r_std: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "ys", tuple(self.ys))
        if not (self.q_std > 0 and self.r_std > 0):
            raise ValueError("HMM noise scales must be positive")


def coin_flip(heads: int, tails: int) -> Model[float]:
    """``p ~ Uniform(0, 1)`` then ``heads`` true and ``tails`` false flips."""
    if heads < 0 or tails < 0:
        raise ValueError("flip counts must be non-negative")
    flips = [True] * heads + [False] * tails

    def given(p):
        coin = Bernoulli(p)
        return for_each(flips, lambda b: observe(coin, b, "flip")).bind(lambda _: Value(p))

    return sample(Uniform(0.0, 1.0), "p").bind(given)


def lin_regr(data: LinRegrData) -> Model[tuple[float, float]]:
    sd_m, sd_c = LINREGR_PRIOR_STD
    points = list(zip(data.xs, data.ys))

    def given(m, c):
        return for_each(points, lambda xy: observe(Normal(m * xy[0] + c, 1.0), xy[1], "y")).bind(
            lambda _: Value((m, c))
        )

    return sample(Normal(0.0, sd_m), "m").bind(
        lambda m: sample(Normal(0.0, sd_c), "c").bind(lambda c: given(m, c))
    )


def lin_gauss_hmm(data: HMMData) -> Model[list[float]]:
    """Random-walk latent observed with Gaussian noise.

    ``x0 ~ N(0, 1)``; at each step ``y_t ~ N(x_t, r_std)`` is observed and
    then ``x_{t+1} ~ N(x_t, q_std)`` is drawn, so ``T`` observations give
    ``T + 1`` latents and the model ends on a transition.
    """
    ys = data.ys
    q, r = data.q_std, data.r_std

    def at(t, path):
        # path is a cons list (x_t, (x_{t-1}, ...)), newest first
        if t == len(ys):
            out = []
            while path is not None:
                x, path = path
                out.append(x)
            return Value(out[::-1])
        x = path[0]
        return observe(Normal(x, r), ys[t], "y").bind(
            lambda _: sample(Normal(x, q), "x").bind(lambda x_next: at(t + 1, (x_next, path)))
        )

    return sample(Normal(0.0, HMM_PRIOR_STD), "x0").bind(lambda x0: at(0, (x0, None)))


def gaussian_pair(y: float = 0.5) -> Model[list[float]]:
    """``x ~ N(0, 1)``, ``y | x ~ N(x, 1)``: the one-step HMM."""
    return lin_gauss_hmm(HMMData((y,), 1.0, 1.0))


def line_data(n: int = 8, slope: float = 3.0, intercept: float = 0.0) -> LinRegrData:
    """Noise-free points ``(x, slope * x + intercept)`` for ``x = 0 .. n-1``."""
    xs = [float(i) for i in range(n)]
    return LinRegrData(xs, [slope * x + intercept for x in xs])


def hmm_series(T: int) -> tuple[float, ...]:
    """Fixed observation series ``0.5 + 0.5 sin(0.3 t)``; starts at 0.5."""
    return tuple(0.5 + 0.5 * math.sin(0.3 * t) for t in range(T))
