"""Thermodynamic functionals of a qubit in a field.

Two splittings of the internal-energy change are tracked: the standard one
(heat from moving the state, work from moving the field) and the
entropy-based one, where heat is tied to purity changes only,
``dQ_ent = U_r dr``, and work to changes in the energy per unit purity,
``dW_ent = r dU_r``.  The difference is the extra work ``dW_star`` spent
rotating the state's eigenvectors.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Callable, NamedTuple, Sequence, Union

import numpy as np
from scipy.special import xlogy

from .errors import DegenerateHamiltonian, GridTooCoarse, PurityZero, UndefinedLimit

PURITY_FLOOR = 1e-14

FieldLike = Union[Sequence[float], Callable[[float], Sequence[float]]]

CSV_COLUMNS = ("t", "x", "y", "z", "r", "U", "Q_std", "W_std", "Q_ent", "W_ent", "W_star", "C", "S")


def internal_energy(state, field) -> np.ndarray | float:
    """``U = -h.r``; broadcasts over leading axes."""
    r = np.asarray(state, dtype=float)
    h = np.asarray(field, dtype=float)
    u = -np.sum(h * r, axis=-1)
    return float(u) if np.ndim(u) == 0 else u


def _entropy_of_purity(r):
    p = 0.5 * (1.0 + np.asarray(r, dtype=float))
    q = np.clip(1.0 - p, 0.0, None)
    return -xlogy(p, p) - xlogy(q, q)


def entropy(state) -> np.ndarray | float:
    """Von Neumann entropy (nats) from the eigenvalues ``(1 +- r)/2``."""
    r = np.linalg.norm(np.asarray(state, dtype=float), axis=-1)
    s = _entropy_of_purity(np.clip(r, 0.0, 1.0))
    return float(s) if np.ndim(s) == 0 else s


def coherence(state, field) -> np.ndarray | float:
    """l1-norm coherence in the energy eigenbasis, ``r sqrt(1 - U_r^2/h^2)``."""
    vec = np.asarray(state, dtype=float)
    h = float(np.linalg.norm(np.asarray(field, dtype=float)))
    if h == 0.0:
        raise DegenerateHamiltonian("coherence needs a non-vanishing field")
    r = np.linalg.norm(vec, axis=-1)
    u = internal_energy(vec, field)
    with np.errstate(invalid="ignore", divide="ignore"):
        u_r = np.where(r > 0, u / np.where(r > 0, r, 1.0), 0.0)
    c = r * np.sqrt(np.clip(1.0 - (u_r / h) ** 2, 0.0, None))
    return float(c) if np.ndim(c) == 0 else c


class FlowRates(NamedTuple):
    dU: float
    dQ_std: float
    dW_std: float
    dQ_ent: float
    dW_ent: float
    dW_star: float


def flow_rates(state, dstate, field, dfield=(0.0, 0.0, 0.0)) -> FlowRates:
    """Instantaneous energy, heat and work rates for both splittings."""
    r_vec = np.asarray(state, dtype=float)
    dr_vec = np.asarray(dstate, dtype=float)
    h_vec = np.asarray(field, dtype=float)
    dh_vec = np.asarray(dfield, dtype=float)

    dq_std = -float(h_vec @ dr_vec)
    dw_std = -float(r_vec @ dh_vec)
    du = dq_std + dw_std

    r = float(np.linalg.norm(r_vec))
    if r < PURITY_FLOOR:
        raise PurityZero("entropy-based rates are undefined at r = 0")
    n = r_vec / r
    dr = float(n @ dr_vec)
    dn = (dr_vec - n * dr) / r
    u_r = -float(h_vec @ n)
    du_r = -float(dh_vec @ n) - float(h_vec @ dn)
    dw_star = -r * float(h_vec @ dn)
    return FlowRates(du, dq_std, dw_std, u_r * dr, r * du_r, dw_star)


def isochoric_heat(r, r0, U_r):
    """Heat at fixed energy per unit purity: ``U_r (r - r0)``."""
    return U_r * (np.asarray(r) - r0)


def nondissipative_heat(C, C0, U, h):
    """Heat (= minus work) at fixed internal energy, as a function of coherence."""
    if h <= 0:
        raise DegenerateHamiltonian("h must be positive")
    C = np.asarray(C, dtype=float)
    if U == 0:
        if C0 == 0 and np.any(C == 0):
            raise UndefinedLimit("C = C0 = 0 with U = 0")
        out = np.zeros_like(C)
        return float(out) if out.ndim == 0 else out
    # ln sqrt(C^2 + (U/h)^2) via hypot, which does not underflow
    a, a0 = np.hypot(C, U / h), math.hypot(C0, U / h)
    if a0 == 0 or np.any(a == 0):
        raise UndefinedLimit("C^2 + U^2/h^2 vanishes")
    out = U * (np.log(a) - math.log(a0))
    return float(out) if np.ndim(out) == 0 else out


def dephasing_heat(t, decoherence: Callable, z_r0: float, r0: float, omega0: float):
    """Closed-form entropy-based heat for pure dephasing at fixed ``U = omega0 z0``.

    ``decoherence(t)`` is the factor multiplying the transverse Bloch components.
    """
    g2 = np.asarray(decoherence(t), dtype=float) ** 2
    out = omega0 * z_r0 * r0 * 0.5 * np.log(g2 + (1.0 - g2) * z_r0**2)
    return float(out) if np.ndim(out) == 0 else out


def _field_samples(field_of_t: FieldLike, t: np.ndarray) -> np.ndarray:
    if callable(field_of_t):
        try:
            h = np.asarray(field_of_t(t), dtype=float)
            if h.shape == (len(t), 3):
                return h
        except (TypeError, ValueError):
            pass
        return np.array([field_of_t(ti) for ti in t], dtype=float)
    h = np.asarray(field_of_t, dtype=float)
    return np.broadcast_to(h, (len(t), 3)).copy()


@dataclass(frozen=True)
class ThermoSample:
    t: float
    U: float
    Q_std: float
    W_std: float
    Q_ent: float
    W_ent: float
    W_star: float
    C: float
    S: float
    r: float


@dataclass
class ThermoTrajectory:
    """Pointwise and cumulative thermodynamic series on a time grid.

    ``singular`` marks samples at the maximally mixed state, where the
    entropy-based increments are set to zero.
    """

    t: np.ndarray
    bloch: np.ndarray
    field: np.ndarray
    U: np.ndarray
    Q_std: np.ndarray
    W_std: np.ndarray
    Q_ent: np.ndarray
    W_ent: np.ndarray
    W_star: np.ndarray
    C: np.ndarray
    S: np.ndarray
    singular: np.ndarray = dc_field(default=None)

    @property
    def r(self) -> np.ndarray:
        return np.linalg.norm(self.bloch, axis=1)

    def __len__(self):
        return len(self.t)

    def __getitem__(self, i) -> ThermoSample:
        return ThermoSample(
            float(self.t[i]), float(self.U[i]), float(self.Q_std[i]), float(self.W_std[i]),
            float(self.Q_ent[i]), float(self.W_ent[i]), float(self.W_star[i]),
            float(self.C[i]), float(self.S[i]), float(self.r[i]),
        )

    def columns(self) -> dict[str, np.ndarray]:
        x, y, z = self.bloch.T
        cols = dict(t=self.t, x=x, y=y, z=z, r=self.r, U=self.U)
        for name in CSV_COLUMNS[6:]:
            cols[name] = getattr(self, name)
        return cols

    def rates(self) -> FlowRates:
        """Flow rates from central differences of the stored state and field."""
        dr = np.gradient(self.bloch, self.t, axis=0)
        dh = np.gradient(self.field, self.t, axis=0)
        out = np.zeros((len(self.t), 6))
        for i in range(len(self.t)):
            if self.singular[i]:
                out[i, :3] = _std_only(self.bloch[i], dr[i], self.field[i], dh[i])
                continue
            out[i] = flow_rates(self.bloch[i], dr[i], self.field[i], dh[i])
        return FlowRates(*out.T)


def _std_only(r, dr, h, dh):
    dq = -float(h @ dr)
    dw = -float(r @ dh)
    return dq + dw, dq, dw


def _purity_weight(r0: np.ndarray, r1: np.ndarray) -> np.ndarray:
    """``r0 r1 ln(r1/r0) / (r1 - r0)``: the weight of ``dU_r`` in ``int r dU_r``
    when ``U_r`` is interpolated as ``a + b/r`` across the step."""
    with np.errstate(invalid="ignore", divide="ignore"):
        rho = (r1 - r0) / r0
        small = np.abs(rho) < 1e-6
        ratio = np.where(small, 1.0 - rho / 2 + rho**2 / 3, np.log1p(rho) / np.where(small, 1.0, rho))
    return r1 * ratio


def accumulate(traj, field_of_t: FieldLike) -> ThermoTrajectory:
    """Integrate the heat and work increments along a sampled trajectory.

    Across each step the energy per unit purity is interpolated as
    ``U_r = a + b/r``, which makes the entropy-based increments exact
    whenever ``U_r`` (isochoric) or ``U`` (non-dissipative) is constant over
    the step.  The work ``int r dU_r`` then becomes ``w * dU_r`` with a mean
    purity ``w`` between the endpoints, and the same ``w`` weights the
    eigenvector-rotation work, so ``W_ent == W_star`` for a fixed field.
    Standard heat and work use midpoint (trapezoidal) factors.  Both
    first-law splittings close to round-off on any grid.
    """
    t = np.asarray(traj.t, dtype=float)
    rv = np.asarray(traj.bloch, dtype=float)
    if len(t) < 2:
        raise GridTooCoarse("need at least two samples")
    if np.any(np.diff(t) <= 0):
        raise ValueError("time grid must be strictly increasing")
    hv = _field_samples(field_of_t, t)

    r = np.linalg.norm(rv, axis=1)
    singular = r < PURITY_FLOOR
    safe_r = np.where(singular, 1.0, r)
    n = np.where(singular[:, None], 0.0, rv / safe_r[:, None])
    U = -np.sum(hv * rv, axis=1)
    U_r = -np.sum(hv * n, axis=1)

    h_mid = 0.5 * (hv[1:] + hv[:-1])
    dQ_std = -np.sum(h_mid * np.diff(rv, axis=0), axis=1)
    dW_std = -np.sum(0.5 * (rv[1:] + rv[:-1]) * np.diff(hv, axis=0), axis=1)

    w = _purity_weight(safe_r[:-1], safe_r[1:])
    dW_ent = w * np.diff(U_r)
    dW_star = -w * np.sum(h_mid * np.diff(n, axis=0), axis=1)
    dQ_ent = np.diff(U) - dW_ent

    bad = singular[1:] | singular[:-1]
    for inc in (dQ_ent, dW_ent, dW_star):
        inc[bad] = 0.0

    def cum(inc):
        return np.concatenate([[0.0], np.cumsum(inc)])

    h_norm = np.linalg.norm(hv, axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = np.where(h_norm > 0, U_r / np.where(h_norm > 0, h_norm, 1.0), 0.0)
    C = r * np.sqrt(np.clip(1.0 - ratio**2, 0.0, None))

    return ThermoTrajectory(
        t=t, bloch=rv, field=hv, U=U,
        Q_std=cum(dQ_std), W_std=cum(dW_std),
        Q_ent=cum(dQ_ent), W_ent=cum(dW_ent), W_star=cum(dW_star),
        C=C, S=_entropy_of_purity(np.clip(r, 0.0, 1.0)), singular=singular,
    )
