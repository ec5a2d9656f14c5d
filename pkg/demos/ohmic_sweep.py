"""
Measures of non-Markovianity across the ohmicity parameter
==========================================================

N_Q (heat) and N_C (coherence) from the closed forms, for s in [0, 8].
Both vanish for s <= 2, peak near s = 3.2 and are negligible past s = 5.
"""
import numpy as np

from nmthermo import sweep
from nmthermo.nonmarkov import s_grid

table = sweep(s_grid(0, 8, 0.05))

for k in range(0, len(table.s), 10):
    print(f"s = {table.s[k]:4.2f}  N_Q = {table.N_Q[k]:.5f}  N_C = {table.N_C[k]:.5f}  "
          f"log z_max = {table.log_z_max[k]:9.3f}")

i = int(np.argmax(table.N_Q))
print("peak at s =", table.s[i], "ratio N_C/N_Q there:", table.N_C[i] / table.N_Q[i])
