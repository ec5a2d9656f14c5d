"""
Heat and coherence flows of a damped qubit
==========================================

A qubit at r0 = (0.5, 0, 0.5) in the field H = sigma_z relaxes under
sigma_minus damping with gamma = 0.1. Under this Markovian channel both the
entropy-based heat and the l1 coherence only decrease.
"""
import numpy as np

from nmthermo import FieldVector, accumulate, dissipative_flows, dissipative_trajectory

t = np.linspace(0, 50, 2000)
th = accumulate(dissipative_trajectory((0.5, 0.0, 0.5), t, gamma=0.1, omega0=1.0),
                FieldVector.along_z(1.0))
qdot, cdot = dissipative_flows(t, 0.1, 1.0)

# %%
# A few samples of the accumulated quantities and the closed-form flows.
print(f"{'t':>6} {'Q_ent':>10} {'C':>8} {'dQ/dt':>11} {'dC/dt':>11}")
for k in range(0, len(t), 250):
    print(f"{t[k]:6.2f} {th.Q_ent[k]:10.5f} {th.C[k]:8.5f} {qdot[k]:11.3e} {cdot[k]:11.3e}")

print("max flow, heat:", qdot.max(), " coherence:", cdot.max())

# %%
# First law for both splits, to round-off.
dU = th.U - th.U[0]
print("first law residuals:",
      np.abs(th.Q_std + th.W_std - dU).max(), np.abs(th.Q_ent + th.W_ent - dU).max())
