"""Gaussian entanglement of formation, and how it is found.

The state is brought to standard form by local symplectics. The best pure
state below it then has position block P between two 2x2 bounds, and the
search runs over that matrix interval.
"""

import math

import numpy as np

from gaussent import (
    GaussianState,
    beamsplitter_channel,
    channel_output,
    geof,
    geof_result,
    log_negativity,
    squeeze_u,
    standard_form,
    tmss_state,
)

# pure states: geof is the amplitude squared
for q in (0.3, 0.9, 0.99):
    print(f"TMSS({q}): geof {geof(tmss_state(q)):.12f}  q^2 {q * q:.12f}")

# a mixed output of the beamsplitter channel
state = channel_output(beamsplitter_channel(math.pi / 6, 3.0, 1.0), squeeze_u(2.0), 2 / 3)
a, b, c1, c2, L = standard_form(state)
print(f"\nstandard form a={a:.4f} b={b:.4f} c1={c1:.4f} c2={c2:.4f}")

res = geof_result(state, starts=6)
print("geof", res.value, "| log-negativity", log_negativity(state))
print("start values spread", max(res.start_values) - min(res.start_values))

# the optimal pure state is physical and lies below the state
pure = GaussianState(res.pure_cov)
print("pure part symplectic eigenvalues", pure.symplectic_eigenvalues())
print("min eig(cov - pure cov)", res.feasibility)

# an independent seven-parameter search cannot do better
euler = geof_result(state, starts=4, method="euler")
print("seven-parameter search", euler.value, "difference", euler.value - res.value)

# a lossy channel on a strongly squeezed input: one symplectic eigenvalue stays 1/2
lossy = channel_output(beamsplitter_channel(0.6, 1.0, 0.5), squeeze_u(1.0), 0.999)
print("\npure-loss output eigenvalues", np.round(lossy.symplectic_eigenvalues(), 6), "geof", geof(lossy))
