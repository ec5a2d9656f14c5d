"""Qubit state and operator algebra.

States are Bloch vectors ``r = (x, y, z)`` with ``rho = (I + r.sigma) / 2`` and
Hamiltonians are written ``H = -h.sigma``.  A field ``h = (0, 0, -w0)`` gives
``H = w0 * sigma_z``.  Units are hbar = k_B = 1.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence, Union

import numpy as np

from .errors import DegenerateHamiltonian, NotAState

IDENTITY = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
SIGMA_MINUS = np.array([[0, 0], [1, 0]], dtype=complex)
PAULIS = np.stack([SIGMA_X, SIGMA_Y, SIGMA_Z])

PURITY_SLACK = 1e-12
DEFAULT_TOL = 1e-10


class BlochState(NamedTuple):
    x: float
    y: float
    z: float

    @property
    def r(self) -> float:
        """Purity |r|."""
        return float(np.sqrt(self.x**2 + self.y**2 + self.z**2))

    @property
    def z_r(self) -> float:
        """Cosine of the polar angle, z / r."""
        r = self.r
        return self.z / r if r > 0 else 0.0

    @classmethod
    def validated(cls, vec: Sequence[float], slack: float = PURITY_SLACK) -> "BlochState":
        x, y, z = (float(v) for v in vec)
        if not all(np.isfinite((x, y, z))):
            raise NotAState(f"non-finite Bloch vector {vec!r}")
        if np.sqrt(x * x + y * y + z * z) > 1.0 + slack:
            raise NotAState(f"Bloch vector {vec!r} lies outside the unit ball")
        return cls(x, y, z)

    @classmethod
    def from_spherical(cls, r: float, theta: float, phi: float) -> "BlochState":
        st = np.sin(theta)
        return cls(r * st * np.cos(phi), r * st * np.sin(phi), r * np.cos(theta))


class FieldVector(NamedTuple):
    hx: float
    hy: float
    hz: float

    @property
    def h(self) -> float:
        return float(np.sqrt(self.hx**2 + self.hy**2 + self.hz**2))

    @classmethod
    def along_z(cls, omega0: float) -> "FieldVector":
        """Field giving ``H = omega0 * sigma_z``."""
        return cls(0.0, 0.0, -float(omega0))


Rate = Union[float, Callable[[float], float]]


@dataclass(frozen=True)
class LindbladTerm:
    """A Lindblad operator paired with its (possibly negative) rate."""

    operator: np.ndarray
    rate: Rate = 1.0

    def __post_init__(self):
        op = np.asarray(self.operator, dtype=complex)
        if op.shape != (2, 2) or not np.all(np.isfinite(op)):
            raise ValueError("Lindblad operator must be a finite 2x2 matrix")
        object.__setattr__(self, "operator", op)

    def rate_at(self, t: float) -> float:
        if callable(self.rate):
            return float(self.rate(t))
        return float(self.rate)


def density_from_bloch(state: Sequence[float]) -> np.ndarray:
    r = np.asarray(state, dtype=float)
    return 0.5 * (IDENTITY + np.tensordot(r, PAULIS, axes=1))


def bloch_from_density(rho: np.ndarray, tol: float = DEFAULT_TOL) -> BlochState:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2, 2):
        raise NotAState(f"expected a 2x2 matrix, got shape {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > tol:
        raise NotAState("density operator is not Hermitian")
    if abs(np.trace(rho) - 1.0) > tol:
        raise NotAState(f"density operator has trace {np.trace(rho).real:.3g}")
    # tr(rho sigma_k) = r_k
    x = 2.0 * rho[0, 1].real
    y = -2.0 * rho[0, 1].imag
    z = (rho[0, 0] - rho[1, 1]).real
    return BlochState(float(x), float(y), float(z))


def hamiltonian(field: Sequence[float]) -> np.ndarray:
    return -np.tensordot(np.asarray(field, dtype=float), PAULIS, axes=1)


def energy_eigenbasis(field: Sequence[float], tol: float = DEFAULT_TOL) -> np.ndarray:
    """Columns are the eigenvectors of ``H = -h.sigma``, lower energy first.

    Each eigenvector's first nonzero component is made real and positive.
    """
    h = float(np.linalg.norm(np.asarray(field, dtype=float)))
    if h < tol:
        raise DegenerateHamiltonian(f"|h| = {h:.3g} is below {tol:g}")
    _, vecs = np.linalg.eigh(hamiltonian(field))
    for k in range(2):
        v = vecs[:, k]
        lead = v[np.argmax(np.abs(v) > 1e-12)]
        vecs[:, k] = v * (abs(lead) / lead)
    return vecs


def _scale(op: np.ndarray) -> float:
    return float(np.max(np.abs(op)))


def is_unital_sufficient(terms: Sequence[LindbladTerm], tol: float = DEFAULT_TOL) -> bool:
    """True when every ``[A, A^dagger]`` vanishes (normal Lindblad operators).

    A False verdict does not prove the map is non-unital.  The commutator is
    compared against ``tol * max|A|^2`` so the verdict does not depend on how
    the operator is normalised.
    """
    if not terms:
        raise ValueError("need at least one Lindblad term")
    for term in terms:
        a = term.operator
        scale = _scale(a)
        if scale == 0.0:
            continue
        comm = a @ a.conj().T - a.conj().T @ a
        if np.max(np.abs(comm)) >= tol * scale**2:
            return False
    return True


def is_incoherent_sufficient(
    terms: Sequence[LindbladTerm], field: Sequence[float], tol: float = DEFAULT_TOL
) -> bool:
    """Check <h_n|A|h_k><h_k|A^dagger|h_m> = 0 for every k and n != m.

    Evaluated in the energy eigenbasis of ``H = -h.sigma``; a sufficiency
    verdict only.
    """
    if not terms:
        raise ValueError("need at least one Lindblad term")
    basis = energy_eigenbasis(field, tol)
    for term in terms:
        scale = _scale(term.operator)
        if scale == 0.0:
            continue
        a = basis.conj().T @ term.operator @ basis
        # prod[n, k, m] = a[n, k] * conj(a[m, k])
        prod = a[:, :, None] * a.conj().T[None, :, :]
        off = ~np.eye(2, dtype=bool)
        if np.max(np.abs(prod.transpose(0, 2, 1)[off])) >= tol * scale**2:
            return False
    return True
