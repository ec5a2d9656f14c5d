"""
Heat backflow under ohmic dephasing
===================================

Pure dephasing with the ohmic rate gamma(t, s). For s <= 2 the rate stays
non-negative and the heat only decreases. For s = 3.5 the rate turns
negative after tan(2 pi / 7) and heat flows back.
"""
import math

import numpy as np

from nmthermo import (
    FieldVector, OhmicParams, accumulate, dephasing_trajectory, detect_intervals,
    negative_rate_windows,
)

z0 = 0.05
r0 = (math.sqrt(1 - z0**2), 0.0, z0)
t = np.linspace(0, 10, 2000)

for s in (1.5, 3.5):
    p = OhmicParams(s)
    th = accumulate(dephasing_trajectory(r0, t, p), FieldVector.along_z(1.0))
    rising = detect_intervals(t, th.Q_ent, alpha=-1)
    print(f"s = {s}: Q(10) = {th.Q_ent[-1]:.5f}, rising on {rising}, "
          f"negative-rate windows {negative_rate_windows(p)}")

# %%
# The first zero of the rate for comparison.
print("tan(pi/7) =", math.tan(math.pi / 7), " tan(2 pi/7) =", math.tan(2 * math.pi / 7))
