"""
Which dissipators keep heat and coherence monotone?
===================================================

Unital terms (L L^dag = L^dag L) make the entropy monotone; incoherent
terms preserve energy-diagonal states. Together they give a monotone
heat. Here a few standard operators are checked in the sigma_z basis.
"""
import numpy as np

from nmthermo import FieldVector, LindbladTerm, is_incoherent_sufficient, is_unital_sufficient
from nmthermo.qubit import SIGMA_MINUS, SIGMA_X, SIGMA_Z

field = FieldVector.along_z(1.0)
ops = {"sigma_z": SIGMA_Z, "sigma_minus": SIGMA_MINUS, "sigma_x": SIGMA_X,
       "tilted": (SIGMA_Z + SIGMA_X) / np.sqrt(2)}
for name, op in ops.items():
    terms = [LindbladTerm(op, 0.2)]
    print(f"{name:12s} unital {is_unital_sufficient(terms)!s:5}  "
          f"incoherent {is_incoherent_sufficient(terms, field)}")
