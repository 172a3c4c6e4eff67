"""Programmable inference with effect handlers.

Models are computation trees issuing Sample and Observe requests; inference
algorithms are skeletons (:func:`mh`, :func:`pfilter`) specialised by
handlers for their own abstract operations.
"""

from .components import (
    DegenerateWeightsError,
    EmptyTraceError,
    advance,
    categorical,
    done,
    likelihood,
    log_mean_exp,
    normalise,
    random_from,
    reuse_trace,
    suspend_after,
    trace_log_probs,
)
from .distributions import Bernoulli, Distribution, Normal, Uniform
from .effects import (
    Computation,
    Effect,
    Request,
    Value,
    call,
    chain,
    for_each,
    handle_deep,
    handle_stateful,
    perform,
    random_uniform,
    run_random,
)
from .metropolis import Accept, Propose, im, mh, ssmh
from .model import Addr, Model, Observe, Sample, observe, sample, simulate
from .particle import Resample, log_evidence, mulpfilter, pfilter, pmh, rmpf
from .rng import RandomSource

__all__ = [
    "Accept",
    "Addr",
    "Bernoulli",
    "Computation",
    "DegenerateWeightsError",
    "Distribution",
    "Effect",
    "EmptyTraceError",
    "Model",
    "Normal",
    "Observe",
    "Propose",
    "RandomSource",
    "Request",
    "Resample",
    "Sample",
    "Uniform",
    "Value",
    "advance",
    "call",
    "categorical",
    "chain",
    "done",
    "for_each",
    "handle_deep",
    "handle_stateful",
    "im",
    "likelihood",
    "log_evidence",
    "log_mean_exp",
    "mh",
    "mulpfilter",
    "normalise",
    "observe",
    "perform",
    "pfilter",
    "pmh",
    "random_from",
    "random_uniform",
    "reuse_trace",
    "rmpf",
    "run_random",
    "sample",
    "simulate",
    "ssmh",
    "suspend_after",
    "trace_log_probs",
]
