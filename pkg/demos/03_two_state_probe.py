"""Certifying a pre-processing choice with two probe states.

Send TMSS(q) and TMSS(qb) through V then the channel. The output ratio
E(q)/E(qb) never exceeds q^2/qb^2; reaching it means V is already optimal
for every input at least as entangled as TMSS(q).
"""

import math

import numpy as np

from gaussent import SymplecticOp, beamsplitter_channel, probe_channel, squeeze_u
from gaussent.protocol import u_grid
from gaussent.verification import ratio_bound_samples

ch = beamsplitter_channel(math.pi / 6, 3.0, 1.0)

for u in (1.0, 2.0, 3.0, 4.0):
    rep = probe_channel(ch, squeeze_u(u), 0.02, 0.5, tol=1e-6)
    print(f"u2={u}: gap {rep.gap: .3e}  {rep.verdict}")

gaps = [probe_channel(ch, squeeze_u(u), 0.02, 0.5).gap for u in u_grid(1, 9, 0.05)]
print("smallest gap on the grid at u2 =", u_grid(1, 9, 0.05)[int(np.argmin(gaps))])

# a larger weak-probe amplitude makes the suboptimal case stand out
print("q=0.2, V=I:", probe_channel(ch, SymplecticOp(np.eye(2)), 0.2, 0.5).verdict)

# the bound itself, over random channels and pre-processing
res = ratio_bound_samples(30, seed=1)
print(f"\n{sum(h for *_, h in res)}/30 random samples respect the bound;",
      f"largest lhs - rhs {max(l - r for l, r, _ in res):.2e}")
