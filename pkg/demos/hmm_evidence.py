"""
Filtering a random walk
=======================

Estimate the marginal likelihood of a linear-Gaussian hidden Markov model
with particle filters and check it against the Kalman filter.
"""

import numpy as np

from effinfer import log_evidence, mulpfilter, rmpf
from effinfer.models import HMMData, hmm_series, lin_gauss_hmm
from effinfer.oracles import kalman_log_evidence

data = HMMData(hmm_series(10), q_std=1.0, r_std=1.0)
model = lin_gauss_hmm(data)
exact = kalman_log_evidence(data)
print(f"Kalman log evidence {exact:.4f}")

# Plain multinomial filter: each run gives one noisy estimate
estimates = [log_evidence(mulpfilter(500, model, seed)) for seed in range(10)]
print(f"mpf   mean {np.mean(estimates):.4f}  sd {np.std(estimates):.4f}")

# Resample-move: after each resample every particle takes one single-site
# MH step over its history, which costs time quadratic in the series length
estimates = [log_evidence(rmpf(100, 1, model, seed)) for seed in range(5)]
print(f"rmpf  mean {np.mean(estimates):.4f}  sd {np.std(estimates):.4f}")

# The filtered path: weighted average of the final particles' latents
out = mulpfilter(2000, model, seed=0)
paths = np.array([path for path, _ in out])
print("posterior mean path:", np.round(paths.mean(axis=0), 2))
