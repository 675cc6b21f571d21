"""Which local squeezing before a noisy beamsplitter channel keeps the most entanglement.

The channel mixes mode 2 with an ancilla squeezed by u3 = 3 at angle pi/6.
Pre-squeezing the signal by the same u2 = u3 is best, whatever the input.
"""

import math
import time

from gaussent import beamsplitter_channel, optimize_preprocessing, sweep_entanglement
from gaussent.protocol import u_grid

ch = beamsplitter_channel(math.pi / 6, 3.0, 1.0)

t = time.perf_counter()
res = sweep_entanglement(ch, 2 / 3, u_grid(1.0, 9.0, 0.05))
print(f"161-point sweep in {time.perf_counter() - t:.1f}s")
print(f"{'u2':>5} {'log-neg':>10} {'geof q0^2':>10}")
for u, ln, g in res.rows[::20]:
    print(f"{u:5.2f} {ln:10.6f} {g:10.6f}")
print("argmax:", res.argmax_u2)

# at the optimum the output is the input with a rescaled amplitude
u, ln, g = next(row for row in res.rows if row[0] == 3.0)
print(f"geof at u2=3: {g:.12f} (4/27 = {4 / 27:.12f})")

print("\nbest u2 for other inputs")
for qp in (0.1, 1 / 3, 0.9):
    V, E, _ = optimize_preprocessing(ch, qp, 2.0, 4.0, 0.05)
    print(f"  q'={qp:.3f}: u*={V.params['u']:.2f}, E*={E:.6f}")

# a noisier ancilla never helps
for b3 in (0.5, 1.0, 2.0):
    r = sweep_entanglement(beamsplitter_channel(math.pi / 6, 3.0, b3), 2 / 3, [3.0])
    print(f"b3={b3}: geof at u2=3 is {r.rows[0][2]:.6f}")
