"""
The full measure against its closed form
========================================

measure_general searches initial states, runs each trajectory, finds the
intervals where the heat flows back and sums the backflow. For dephasing
this reproduces the closed-form N_Q. A Markovian channel gives exactly zero.
"""
import warnings

from nmthermo import (
    FieldVector, OhmicParams, SearchGrid, SignAmbiguousWarning, dephasing_channel,
    dissipative_channel, measure_general, nq_of_s,
)

warnings.simplefilter("ignore", SignAmbiguousWarning)
field = FieldVector.along_z(1.0)

for s in (2.5, 3.5, 4.5):
    p = OhmicParams(s)
    res = measure_general(dephasing_channel(p), "Q_ent", search=SearchGrid(refine_levels=12), field=field)
    print(f"s = {s}: pipeline {res.value:.6g}, closed form {nq_of_s(p)[0]:.6g}, "
          f"optimiser {tuple(round(float(v), 4) for v in res.optimizer['bloch'])}")

print("dissipative:", measure_general(dissipative_channel(), "Q_ent", field=field).value)
