"""Trajectory generators for single-qubit open dynamics.

Closed forms cover the two reference channels:

* dissipative: ``H = w0 sigma_z`` with a ``sigma_x`` Lindblad operator at a
  constant rate ``gamma`` (unital, incoherent, Markovian);
* dephasing: ``H = w0 sigma_z`` with a ``sigma_z`` Lindblad operator at the
  zero-temperature Ohmic-like rate ``gamma(t, s)``.

``integrate_master`` handles arbitrary time-local generators and serves as
the independent check on both.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.interpolate import CubicHermiteSpline

from .errors import NotAState, QuadratureFailure, StepSizeUnderflow
from .qubit import (
    SIGMA_X, SIGMA_Z, BlochState, LindbladTerm, bloch_from_density, density_from_bloch,
)

QUAD_TOL = 1e-10
# sigma_z dephasing at rate gamma shrinks the transverse components by
# exp(-2 * int gamma); decoherence_factor itself is exp(-int gamma).
DEPHASING_EXPONENT = 2.0


@dataclass(frozen=True)
class OhmicParams:
    s: float
    omega_c: float = 1.0

    def __post_init__(self):
        if not (self.s >= 0 and math.isfinite(self.s)):
            raise ValueError(f"ohmicity s must be >= 0, got {self.s}")
        if not (self.omega_c > 0 and math.isfinite(self.omega_c)):
            raise ValueError(f"cutoff omega_c must be > 0, got {self.omega_c}")


@dataclass
class Trajectory:
    """Bloch vectors sampled on a strictly increasing time grid."""

    t: np.ndarray
    bloch: np.ndarray
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        self.bloch = np.asarray(self.bloch, dtype=float).reshape(len(self.t), 3)

    @property
    def purity(self) -> np.ndarray:
        return np.linalg.norm(self.bloch, axis=1)

    def state(self, i: int) -> BlochState:
        return BlochState(*map(float, self.bloch[i]))

    def __len__(self):
        return len(self.t)


# --- Ohmic dephasing rate -------------------------------------------------

def ohmic_rate(t, p: OhmicParams):
    """``gamma(t, s) = [1 + (wc t)^2]^(-s/2) Gamma(s) sin(s arctan(wc t))``.

    At ``s = 0`` the pole of Gamma(s) cancels the vanishing sine and the
    continuous limit ``arctan(wc t)`` is returned.
    """
    theta = np.arctan(p.omega_c * np.asarray(t, dtype=float))
    if p.s == 0:
        out = theta
    else:
        out = np.cos(theta) ** p.s * math.gamma(p.s) * np.sin(p.s * theta)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class OhmicRate:
    """Callable rate ``t -> gamma(t, s)`` usable in a LindbladTerm."""

    params: OhmicParams
    scale: float = 1.0

    def __call__(self, t):
        return self.scale * ohmic_rate(t, self.params)


def _angle_integrand(phi: float, s: float) -> float:
    # d/dphi of int gamma dt after t = tan(phi) / wc, without the 1/wc factor
    if s == 0:
        return phi / math.cos(phi) ** 2
    return math.gamma(s) * math.cos(phi) ** (s - 2.0) * math.sin(s * phi)


def _quad(fun, a, b, args=(), tol=QUAD_TOL, limit=500):
    with warnings.catch_warnings():
        warnings.simplefilter("error", IntegrationWarning)
        try:
            val, err = quad(fun, a, b, args=args, epsabs=tol, epsrel=0.0, limit=limit)
        except IntegrationWarning as exc:
            raise QuadratureFailure(str(exc).splitlines()[0]) from exc
    if not math.isfinite(val) or err > 10 * tol:
        raise QuadratureFailure(f"quadrature error estimate {err:.2e} exceeds {tol:.1e}")
    return val


def rate_integral(t, p: OhmicParams, tol: float = QUAD_TOL):
    """``int_0^t gamma(t', s) dt'`` by adaptive Gauss-Kronrod quadrature.

    The substitution ``t = tan(phi)/wc`` maps ``[0, inf]`` onto
    ``[0, pi/2]``, so ``t = inf`` is evaluated without truncation (it
    diverges for ``s <= 1``).  Array input is integrated segment by segment
    between sorted points and accumulated.
    """
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0) or np.any(np.isnan(t_arr)):
        raise ValueError("rate_integral needs t >= 0")
    flat = t_arr.ravel()
    order = np.argsort(flat)
    phis = np.arctan(p.omega_c * flat[order])
    out = np.empty_like(flat)
    acc, prev = 0.0, 0.0
    for idx, phi in zip(order, phis):
        if phi > prev:
            if phi == math.pi / 2 and p.s <= 1:
                acc = math.inf
            elif math.isfinite(acc):
                acc += _quad(_angle_integrand, prev, phi, args=(p.s,), tol=tol)
            prev = phi
        out[idx] = acc / p.omega_c
    out = out.reshape(t_arr.shape)
    return float(out) if out.ndim == 0 else out


def decoherence_factor(t, p: OhmicParams, tol: float = QUAD_TOL):
    """``exp(-int_0^t gamma)``; equals 1 at t = 0."""
    return np.exp(-np.asarray(rate_integral(t, p, tol)))[()]


def coherence_factor(t, p: OhmicParams, tol: float = QUAD_TOL):
    """Transverse Bloch shrink factor of the sigma_z dephasing channel.

    The Lindblad dissipator ``gamma (sigma_z rho sigma_z - rho)`` damps the
    off-diagonal elements at rate ``2 gamma``, so this is
    ``decoherence_factor(t)**2``.
    """
    return np.exp(-DEPHASING_EXPONENT * np.asarray(rate_integral(t, p, tol)))[()]


class DecoherenceTable:
    """Cached ``int_0^t gamma`` on a dense grid for repeated queries.

    Nodes are uniform in ``phi = arctan(wc t)`` up to ``t_max`` (which may
    be ``inf``).  Between nodes a cubic Hermite interpolant is used with the
    exact derivative ``gamma`` at each node.  Immutable once built.
    """

    def __init__(self, p: OhmicParams, t_max: float = math.inf, n_nodes: int = 10_000,
                 exponent: float = DEPHASING_EXPONENT, tol: float = QUAD_TOL):
        if n_nodes < 2:
            raise ValueError("n_nodes must be >= 2")
        self.params = p
        self.exponent = exponent
        if not math.isfinite(t_max) and p.s < 2:
            raise ValueError("an infinite span needs s >= 2 (the phi-integrand is unbounded at pi/2)")
        phi_max = math.atan(p.omega_c * t_max) if math.isfinite(t_max) else math.pi / 2
        self.phi_max = phi_max
        nodes = np.linspace(0.0, phi_max, n_nodes)
        pieces = [_quad(_angle_integrand, a, b, args=(p.s,), tol=tol / n_nodes)
                  for a, b in zip(nodes[:-1], nodes[1:])]
        values = np.concatenate([[0.0], np.cumsum(pieces)])
        # at phi = pi/2 (only reached for s >= 2) cos^(s-2) sin(s phi) is finite
        slopes = np.array([_angle_integrand(ph, p.s) if ph < math.pi / 2
                           else math.gamma(p.s) * math.sin(p.s * ph) * float(p.s == 2)
                           for ph in nodes])
        self._spline = CubicHermiteSpline(nodes, values, slopes)

    def integral(self, t):
        phi = np.arctan(self.params.omega_c * np.asarray(t, dtype=float))
        if np.any(phi > self.phi_max * (1 + 1e-15)):
            raise ValueError("query beyond the tabulated span")
        out = self._spline(np.minimum(phi, self.phi_max)) / self.params.omega_c
        return out[()]

    def __call__(self, t):
        return np.exp(-self.exponent * np.asarray(self.integral(t)))[()]


# --- Closed-form channels -------------------------------------------------

def _sinhc(w: complex, t: np.ndarray) -> np.ndarray:
    """``sinh(w t) / w`` with the removable singularity at ``w = 0``."""
    if abs(w) < 1e-8:
        return t * (1.0 + (w * t) ** 2 / 6.0)
    return np.sinh(w * t) / w


def dissipative_bloch(t, r0: Sequence[float], gamma: float, omega0: float, *, degenerate_tol: float = 1e-8):
    """Closed-form Bloch vector for the sigma_x channel at constant rate.

    Evaluated in complex arithmetic with ``w = sqrt(gamma^2 - 4 w0^2)``;
    below critical damping ``w`` is imaginary and the hyperbolic functions
    turn trigonometric.  Returns shape ``(3,)`` for scalar ``t`` and
    ``(n, 3)`` otherwise.
    """
    x0, y0, z0 = (float(v) for v in r0)
    t_arr = np.asarray(t, dtype=float)
    w = complex(np.sqrt(complex(gamma * gamma - 4.0 * omega0 * omega0)))
    if abs(w) < degenerate_tol * max(omega0, 1.0):
        w = 0j
    ch = np.cosh(w * t_arr)
    sh = _sinhc(w, t_arr)
    damp = np.exp(-gamma * t_arr)
    x = damp * (x0 * ch + (gamma * x0 - 2.0 * omega0 * y0) * sh)
    y = damp * (y0 * ch + (2.0 * omega0 * x0 - gamma * y0) * sh)
    resid = max(np.max(np.abs(np.imag(x)), initial=0.0), np.max(np.abs(np.imag(y)), initial=0.0))
    if resid > 1e-12 * max(1.0, np.max(np.abs(x)), np.max(np.abs(y))):
        raise ArithmeticError(f"imaginary residue {resid:.2e} in dissipative solution")
    z = z0 * np.exp(-2.0 * gamma * t_arr)
    out = np.stack([np.real(x), np.real(y), np.broadcast_to(z, np.shape(x))], axis=-1)
    return out


def dissipative_flows(t, gamma: float = 0.1, omega0: float = 1.0):
    """Entropy-based heat flow and coherence flow for ``r0 = (1/2, 0, 1/2)``.

    Returns ``(Qdot_ent, Cdot)``; both are non-positive for all ``t``.
    """
    t = np.asarray(t, dtype=float)
    w = complex(np.sqrt(complex(gamma * gamma - 4.0 * omega0 * omega0)))
    ch = np.cosh(2 * w * t)
    sh = np.sinh(2 * w * t)
    e2 = np.exp(-2 * gamma * t)
    num = omega0 * gamma * (2 * omega0**2 * (1 - ch) - w**2 * e2) * e2
    den = w**2 * e2 + gamma**2 * ch + w * gamma * sh - 4 * omega0**2
    qdot = num / den
    cdot = (2 * omega0**2 * gamma * np.exp(-gamma * t) * (1 - ch)
            / (w * np.sqrt(gamma**2 * ch + w * gamma * sh - 4 * omega0**2 + 0j)))
    # at t = 0 the coherence flow is 0/0 in the overdamped branch only if w = 0
    return np.real(qdot)[()], np.real(cdot)[()]


def dephasing_bloch(t, r0: Sequence[float], p: OhmicParams, *, omega0: float = 0.0,
                    factor: Callable | None = None):
    """Bloch vector under Ohmic dephasing: ``[x0 c(t), y0 c(t), z0]``.

    ``c`` is :func:`coherence_factor` unless ``factor`` is given.  With the
    default ``omega0 = 0`` the result is in the frame co-rotating with the
    Hamiltonian; a nonzero ``omega0`` adds the lab-frame precession at
    angular frequency ``2 omega0``.  Thermodynamic quantities are the same in
    both frames.
    """
    x0, y0, z0 = (float(v) for v in r0)
    t_arr = np.asarray(t, dtype=float)
    c = np.asarray(factor(t_arr) if factor is not None else coherence_factor(t_arr, p))
    if omega0:
        cs, sn = np.cos(2 * omega0 * t_arr), np.sin(2 * omega0 * t_arr)
        x, y = c * (x0 * cs - y0 * sn), c * (x0 * sn + y0 * cs)
    else:
        x, y = c * x0, c * y0
    return np.stack([x, y, np.broadcast_to(z0, np.shape(x)).astype(float)], axis=-1)


def dissipative_terms(gamma: float) -> list[LindbladTerm]:
    return [LindbladTerm(SIGMA_X, float(gamma))]


def dephasing_terms(p: OhmicParams) -> list[LindbladTerm]:
    return [LindbladTerm(SIGMA_Z, OhmicRate(p))]


def dissipative_trajectory(r0, grid, gamma: float = 0.1, omega0: float = 1.0) -> Trajectory:
    grid = np.asarray(grid, dtype=float)
    return Trajectory(grid, dissipative_bloch(grid, r0, gamma, omega0))


def dephasing_trajectory(r0, grid, p: OhmicParams, *, omega0: float = 0.0,
                         factor: Callable | None = None) -> Trajectory:
    grid = np.asarray(grid, dtype=float)
    return Trajectory(grid, dephasing_bloch(grid, r0, p, omega0=omega0, factor=factor))


# --- Generic time-local master equation -----------------------------------

def _as_hamiltonian(hamiltonian_of_t) -> Callable[[float], np.ndarray]:
    if callable(hamiltonian_of_t):
        return lambda t: np.asarray(hamiltonian_of_t(t), dtype=complex)
    h = np.asarray(hamiltonian_of_t, dtype=complex)
    return lambda t: h


def lindblad_rhs(t: float, rho: np.ndarray, ham: Callable, terms: Sequence[LindbladTerm]) -> np.ndarray:
    h = ham(t)
    out = -1j * (h @ rho - rho @ h)
    for term in terms:
        g = term.rate_at(t)
        if g == 0.0:
            continue
        a = term.operator
        ad = a.conj().T
        ada = ad @ a
        out += g * (a @ rho @ ad - 0.5 * (ada @ rho + rho @ ada))
    return out


def _rk4(f, t0: float, rho: np.ndarray, dt: float, n: int) -> np.ndarray:
    t = t0
    for _ in range(n):
        k1 = f(t, rho)
        k2 = f(t + 0.5 * dt, rho + 0.5 * dt * k1)
        k3 = f(t + 0.5 * dt, rho + 0.5 * dt * k2)
        k4 = f(t + dt, rho + dt * k3)
        rho = rho + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        t += dt
    return rho


def integrate_master(hamiltonian_of_t, terms: Sequence[LindbladTerm], rho0, grid,
                     tol: float = 1e-10, max_substeps: int = 1 << 18) -> Trajectory:
    """Integrate ``rho' = -i[H, rho] + sum_i g_i(t) D[A_i] rho`` with RK4.

    Each grid interval is split into ``n`` equal substeps; ``n`` is doubled
    until the step-doubling error estimate ``|rho_2n - rho_n| / 15`` drops
    below ``tol``.  ``rho0`` may be a 2x2 density matrix or a Bloch vector.
    Samples are re-Hermitised and trace-renormalised before conversion;
    the largest trace and Hermiticity defects seen are stored in ``info``.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or len(grid) < 1 or np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be a strictly increasing 1-d array")
    rho = np.asarray(rho0, dtype=complex)
    if rho.shape == (3,):
        rho = density_from_bloch(BlochState.validated(rho.real))
    state = bloch_from_density(rho)
    if state.r > 1 + 1e-10:
        raise NotAState("initial density operator is not positive")

    ham = _as_hamiltonian(hamiltonian_of_t)
    terms = list(terms)

    def f(t, r):
        return lindblad_rhs(t, r, ham, terms)

    out = np.empty((len(grid), 3))
    out[0] = state
    n = 1
    max_trace, max_herm, total = 0.0, 0.0, 0
    for i in range(len(grid) - 1):
        t0, dt = grid[i], grid[i + 1] - grid[i]
        while True:
            if 2 * n > max_substeps:
                raise StepSizeUnderflow(
                    f"more than {max_substeps} substeps needed on [{t0:g}, {t0 + dt:g}]")
            coarse = _rk4(f, t0, rho, dt / n, n)
            fine = _rk4(f, t0, rho, dt / (2 * n), 2 * n)
            err = np.max(np.abs(fine - coarse)) / 15.0
            if err < tol:
                break
            n *= 2
        total += 2 * n
        max_trace = max(max_trace, abs(np.trace(fine) - 1.0))
        max_herm = max(max_herm, float(np.max(np.abs(fine - fine.conj().T))))
        rho = 0.5 * (fine + fine.conj().T)
        rho = rho / np.trace(rho).real
        out[i + 1] = bloch_from_density(rho)
        if n > 1 and err < tol / 64:
            n //= 2
    return Trajectory(grid, out, info=dict(max_trace_error=max_trace,
                                           max_hermiticity_error=max_herm,
                                           substeps=total))


def arctan_grid(t_max: float, n: int, omega_c: float = 1.0) -> np.ndarray:
    """Grid uniform in ``arctan(wc t)``: dense early, sparse in the slow tail."""
    phi = np.linspace(0.0, math.atan(omega_c * t_max), n)
    return np.tan(phi) / omega_c


def dissipative_channel(gamma: float = 0.1, omega0: float = 1.0, grid=None) -> Callable[[Sequence[float]], Trajectory]:
    """Initial state -> closed-form trajectory, on ``grid`` (default 2000 points on [0, 50])."""
    grid = np.linspace(0.0, 50.0, 2000) if grid is None else np.asarray(grid, dtype=float)
    return lambda r0: dissipative_trajectory(r0, grid, gamma, omega0)


def dephasing_channel(p: OhmicParams, grid=None, omega0: float = 0.0) -> Callable[[Sequence[float]], Trajectory]:
    """Initial state -> closed-form dephasing trajectory sharing one cached factor table.

    The default grid is 4000 points uniform in ``arctan(wc t)`` up to
    ``wc t = 1000``, long enough for the slow algebraic tail of the rate.
    """
    grid = arctan_grid(1e3, 4000, p.omega_c) if grid is None else np.asarray(grid, dtype=float)
    table = DecoherenceTable(p, t_max=float(grid[-1]))
    factor = table(grid)
    return lambda r0: dephasing_trajectory(r0, grid, p, omega0=omega0, factor=lambda _t: factor)
