"""
Coin bias three ways
====================

One model, three inference algorithms. Each estimate is compared with the
exact Beta(9, 3) posterior mean.
"""

from effinfer import im, pmh, ssmh
from effinfer.models import coin_flip
from effinfer.oracles import beta_bernoulli

# p ~ Uniform(0, 1), then 8 heads and 2 tails are observed
model = coin_flip(8, 2)
exact_mean, exact_var = beta_bernoulli(8, 2)
print(f"exact posterior mean {exact_mean:.4f}, sd {exact_var ** 0.5:.4f}")

# Independence Metropolis: every proposal redraws the whole trace from the prior
chain = im(5000, model, seed=1)
print("im    ", sum(p for p, _ in chain) / len(chain))

# Single-site MH redraws one site per step; with a single latent this is
# close to IM, but the chain nodes carry per-site log-probabilities
chain = ssmh(5000, {}, model, seed=1)
print("ssmh  ", sum(p for p, _ in chain) / len(chain))
p, (lp, trace) = chain[0]
print("newest node's sites:", ", ".join(str(a) for a in lp))

# Particle MH proposes only "p" and weights each proposal with a small
# particle filter over everything else
chain = pmh(300, 20, ["p"], model, seed=1)
print("pmh   ", sum(p for p, _ in chain) / len(chain))
