"""
Writing a handler
=================

Models are plain computation trees, so new interpretations are just new
handlers. Here one counts Observe requests and another replaces every
observation with a tempered likelihood.
"""

from effinfer import Normal, Observe, Value, handle_stateful, observe, run_random, sample
from effinfer.components import likelihood
from effinfer.model import assign_addresses, default_sample
from effinfer.rng import RandomSource


def model():
    return sample(Normal(0, 1), "mu").bind(
        lambda mu: observe(Normal(mu, 1), 0.4, "y").bind(
            lambda _: observe(Normal(mu, 1), 1.1, "y").bind(lambda _: Value(mu))
        )
    )


# A stateful handler: count Observes and answer each with its data value
count_observes = handle_stateful(
    Observe,
    0,
    lambda n, x: Value((x, n)),
    lambda n, op, k: k(n + 1, op.value),
)
mu, n = run_random(default_sample()(count_observes(model())), RandomSource(3))
print(f"mu={mu:.3f} after {n} observes")


# Tempering: scale every observation's log-probability by beta
def tempered(beta):
    return handle_stateful(
        Observe,
        0.0,
        lambda w, x: Value((x, w)),
        lambda w, op, k: k(w + beta * op.dist.log_prob(op.value), op.value),
    )


m = assign_addresses(model())
for beta in (0.0, 0.5, 1.0):
    mu, w = run_random(default_sample()(tempered(beta)(m)), RandomSource(3))
    print(f"beta={beta}: mu={mu:.3f} weight={w:.4f}")

# beta = 1 agrees with the library's likelihood handler
print("likelihood():", run_random(default_sample()(likelihood()(m)), RandomSource(3)))
