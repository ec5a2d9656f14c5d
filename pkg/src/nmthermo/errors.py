"""Exception and warning types raised across the package."""


class NMThermoError(Exception):
    """Base class for all package errors."""


class NotAState(NMThermoError, ValueError):
    """Input is not a valid qubit density operator / Bloch vector."""


class DegenerateHamiltonian(NMThermoError, ValueError):
    """The field vanishes, so the energy eigenbasis is undefined."""


class PurityZero(NMThermoError, ValueError):
    """An entropy-based quantity was requested at the maximally mixed state."""


class UndefinedLimit(NMThermoError, ValueError):
    pass


class GridTooCoarse(NMThermoError, ValueError):
    pass


class QuadratureFailure(NMThermoError, RuntimeError):
    pass


class StepSizeUnderflow(NMThermoError, RuntimeError):
    """The integrator needed more substeps than its budget allows."""


class SignAmbiguousWarning(UserWarning):
    """Initial states skipped because the monotonicity direction is undefined."""
