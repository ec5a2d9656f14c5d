"""Heat, work and coherence of a driven qubit under time-local open dynamics,
and non-Markovianity measures built on their monotonicity."""
from .dynamics import (
    DEPHASING_EXPONENT, DecoherenceTable, OhmicParams, OhmicRate, Trajectory, arctan_grid,
    coherence_factor, decoherence_factor, dephasing_bloch, dephasing_channel, dephasing_terms,
    dephasing_trajectory, dissipative_bloch, dissipative_channel, dissipative_flows,
    dissipative_terms, dissipative_trajectory, integrate_master, ohmic_rate, rate_integral,
)
from .errors import (
    DegenerateHamiltonian, GridTooCoarse, NMThermoError, NotAState, PurityZero,
    QuadratureFailure, SignAmbiguousWarning, StepSizeUnderflow, UndefinedLimit,
)
from .io import load_operators, parse_operators
from .nonmarkov import (
    MeasureResult, SearchGrid, SweepTable, detect_intervals, gamma_zero_crossings,
    heat_optimum, measure_from_intervals, measure_general, nc_of_s, negative_rate_windows,
    nq_of_s, sweep,
)
from .qubit import (
    BlochState, FieldVector, LindbladTerm, bloch_from_density, density_from_bloch,
    energy_eigenbasis, hamiltonian, is_incoherent_sufficient, is_unital_sufficient,
)
from .thermo import (
    ThermoTrajectory, accumulate, coherence, dephasing_heat, entropy, flow_rates,
    internal_energy, isochoric_heat, nondissipative_heat,
)

__version__ = "0.1.0"
