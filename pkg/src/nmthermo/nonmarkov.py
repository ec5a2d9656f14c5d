"""Non-Markovianity from broken monotonicity of a thermodynamic function.

A function ``F(t)`` that is monotone under divisible (Markovian) dynamics,
increasing for ``alpha = +1`` and decreasing for ``alpha = -1``, witnesses
memory effects wherever ``sgn dF/dt = -alpha``.  The measure sums the
excursions ``|F(t_f) - F(t_i)|`` over those windows and maximises over
initial states.
"""
from __future__ import annotations

import logging
import math
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from .dynamics import DEPHASING_EXPONENT, OhmicParams, Trajectory, rate_integral
from .errors import GridTooCoarse, SignAmbiguousWarning
from .qubit import BlochState, FieldVector
from .thermo import ThermoTrajectory, accumulate

log = logging.getLogger(__name__)

Interval = tuple[float, float]
ENERGY_ZERO_TOL = 1e-12
AlphaRule = Union[int, Callable[[ThermoTrajectory], int]]


@dataclass
class MeasureResult:
    value: float
    optimizer: dict
    intervals: list[Interval]
    alpha: int
    evaluated: int = 0

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "optimizer": self.optimizer,
            "intervals": [[a, b] for a, b in self.intervals],
            "alpha": self.alpha,
        }


# --- interval detection ---------------------------------------------------

def _refine_edge(spline_d, lo: float, hi: float, g_lo: float, g_hi: float, target) -> float:
    """Locate where ``target(t) = 0`` between a non-violating and a violating sample."""
    try:
        a, b = target(spline_d, lo), target(spline_d, hi)
        if a * b < 0:
            return brentq(lambda s: target(spline_d, s), lo, hi, xtol=1e-13, rtol=1e-14)
    except ValueError:
        pass
    # the spline disagrees with the sampled derivative; fall back to linear
    return lo + (hi - lo) * g_lo / (g_lo - g_hi)


def detect_intervals(t, F, alpha: int, eps_flow: float | None = None,
                     min_width: float = 0.0) -> list[Interval]:
    """Windows where the central-difference derivative of ``F`` has sign ``-alpha``.

    Derivative values within ``eps_flow`` of zero count as no violation
    (default ``1e-9 * max|F|``).  Edges are refined with a bracketing root
    search on the derivative of a cubic spline through ``F``.
    """
    t = np.asarray(t, dtype=float)
    F = np.asarray(F, dtype=float)
    if len(t) < 3:
        raise GridTooCoarse("need at least three samples to detect intervals")
    if alpha not in (1, -1):
        raise ValueError("alpha must be +1 or -1")
    if eps_flow is None:
        eps_flow = 1e-9 * float(np.max(np.abs(F)))
    g = -alpha * np.gradient(F, t) - eps_flow
    bad = g > 0
    if not bad.any():
        return []

    spline_d = CubicSpline(t, F).derivative()

    def target(d, s):
        return -alpha * float(d(s)) - eps_flow

    edges = np.flatnonzero(np.diff(bad.astype(np.int8)))
    starts = [0] if bad[0] else []
    ends = []
    for e in edges:
        (starts if bad[e + 1] else ends).append(e + 1 if bad[e + 1] else e)
    if bad[-1]:
        ends.append(len(t) - 1)

    out = []
    for i0, i1 in zip(starts, ends):
        ti = t[0] if i0 == 0 else _refine_edge(spline_d, t[i0 - 1], t[i0], g[i0 - 1], g[i0], target)
        tf = t[-1] if i1 == len(t) - 1 else _refine_edge(spline_d, t[i1], t[i1 + 1], g[i1], g[i1 + 1], target)
        if tf - ti > min_width and tf > ti:
            out.append((float(ti), float(tf)))
    return out


def measure_from_intervals(t, F, intervals: Sequence[Interval]) -> float:
    """``sum_k |F(t_f) - F(t_i)|`` with cubic-spline interpolation at the edges."""
    if not intervals:
        return 0.0
    spline = CubicSpline(np.asarray(t, dtype=float), np.asarray(F, dtype=float))
    return float(sum(abs(float(spline(b)) - float(spline(a))) for a, b in intervals))


# --- monotonicity directions ----------------------------------------------

def heat_alpha(thermo: ThermoTrajectory) -> int:
    """Direction of the entropy-based heat under Markovian unital dynamics.

    ``dQ = U_r dr`` with non-increasing purity, so heat decreases for
    ``U > 0`` and increases for ``U < 0``.  Energies within round-off of zero
    (relative to ``|h|``) give 0, i.e. undefined.
    """
    u0 = float(thermo.U[0])
    if abs(u0) <= ENERGY_ZERO_TOL * float(np.linalg.norm(thermo.field[0])):
        return 0
    return -int(np.sign(u0))


ALPHA_RULES: dict[str, AlphaRule] = {
    "Q_ent": heat_alpha,
    "U": heat_alpha,
    "C": -1,
    "S": +1,
}


def _functional(functional) -> Callable[[ThermoTrajectory], np.ndarray]:
    if callable(functional):
        return functional
    return lambda thermo: getattr(thermo, functional)


# --- initial-state search -------------------------------------------------

@dataclass(frozen=True)
class SearchGrid:
    """Bloch-ball grid: purity shells x polar steps x azimuthal steps.

    After the coarse pass, ``refine_levels`` rounds of local subdivision
    halve the step sizes around the incumbent.
    """

    radii: tuple[float, ...] = (0.25, 0.5, 0.75, 1.0)
    n_theta: int = 25
    n_phi: int = 12
    refine_levels: int = 1

    def coarse(self):
        thetas = np.linspace(0.0, math.pi, self.n_theta)
        phis = np.arange(self.n_phi) * (2 * math.pi / self.n_phi)
        for r in self.radii:
            for th in thetas:
                for ph in phis:
                    yield float(r), float(th), float(ph)

    @property
    def steps(self) -> tuple[float, float, float]:
        dr = min(np.diff((0.0,) + tuple(sorted(self.radii))))
        return float(dr), math.pi / (self.n_theta - 1), 2 * math.pi / self.n_phi


@dataclass
class _Candidate:
    value: float
    coords: tuple[float, float, float]
    intervals: list = field(default_factory=list)
    alpha: int = 0


def _evaluate(channel, fun, alpha_rule, field_of_t, coords, eps_flow, min_width):
    r, th, ph = coords
    state = BlochState.from_spherical(r, th, ph)
    thermo = accumulate(channel(state), field_of_t)
    alpha = alpha_rule(thermo) if callable(alpha_rule) else int(alpha_rule)
    if alpha == 0:
        return None
    F = fun(thermo)
    iv = detect_intervals(thermo.t, F, alpha, eps_flow, min_width)
    return _Candidate(measure_from_intervals(thermo.t, F, iv), coords, iv, alpha)


def measure_general(channel: Callable[[BlochState], Trajectory], functional,
                    alpha_rule: AlphaRule | None = None, search: SearchGrid | None = None,
                    field=None, eps_flow: float | None = None,
                    min_width: float = 1e-6) -> MeasureResult:
    """Maximise the monotonicity-violation measure over initial states.

    ``channel`` maps an initial Bloch state to a :class:`Trajectory`;
    ``functional`` is a ThermoTrajectory attribute name (``"Q_ent"``,
    ``"C"``, ``"S"``, ...) or a callable returning the series.  States where
    the direction rule yields 0 are skipped with a
    :class:`SignAmbiguousWarning`.
    """
    search = search or SearchGrid()
    field_of_t = FieldVector.along_z(1.0) if field is None else field
    if alpha_rule is None:
        if not isinstance(functional, str) or functional not in ALPHA_RULES:
            raise ValueError(f"no default monotonicity rule for {functional!r}")
        alpha_rule = ALPHA_RULES[functional]
    fun = _functional(functional)

    best: _Candidate | None = None
    skipped = evaluated = 0

    def consider(coords):
        nonlocal best, skipped, evaluated
        cand = _evaluate(channel, fun, alpha_rule, field_of_t, coords, eps_flow, min_width)
        evaluated += 1
        if cand is None:
            skipped += 1
        elif best is None or cand.value > best.value:
            best = cand

    for coords in search.coarse():
        consider(coords)
    if best is None:
        raise ValueError("every searched initial state was skipped")

    dr, dth, dph = search.steps
    for _ in range(search.refine_levels):
        dr, dth, dph = dr / 2, dth / 2, dph / 2
        r0, th0, ph0 = best.coords
        for r in (r0 - dr, r0, r0 + dr):
            if not 0.0 < r <= 1.0:
                continue
            for th in (th0 - dth, th0, th0 + dth):
                if not 0.0 <= th <= math.pi:
                    continue
                for ph in (ph0 - dph, ph0, ph0 + dph):
                    if (r, th, ph) != (r0, th0, ph0):
                        consider((r, th, ph % (2 * math.pi)))

    if skipped:
        warnings.warn(f"{skipped} initial states skipped: monotonicity direction undefined (U = 0)",
                      SignAmbiguousWarning, stacklevel=2)
    r, th, ph = best.coords
    state = BlochState.from_spherical(r, th, ph)
    return MeasureResult(
        value=best.value,
        optimizer=dict(bloch=list(state), r=r, theta=th, phi=ph),
        intervals=best.intervals,
        alpha=best.alpha,
        evaluated=evaluated,
    )


# --- Ohmic dephasing: closed forms ----------------------------------------

def gamma_zero_crossings(p: OhmicParams) -> list[float]:
    """Zeros of ``gamma(t, s)``: ``t_k = tan(k pi / s) / wc`` for ``k pi / s <= pi/2``.

    ``t_0 = 0`` is included.  When ``k pi / s`` hits ``pi/2`` exactly
    (even integer ``s``) the crossing is at infinity and ``math.inf`` is
    returned in its place.
    """
    if p.s <= 0:
        raise ValueError("s must be positive")
    out = []
    k = 0
    while True:
        angle = k * math.pi / p.s
        if angle > math.pi / 2 * (1 + 1e-15):
            break
        out.append(math.inf if math.isclose(angle, math.pi / 2, rel_tol=1e-15)
                   else math.tan(angle) / p.omega_c)
        k += 1
    return out


def negative_rate_windows(p: OhmicParams) -> list[Interval]:
    """Open windows on which ``gamma(t, s) < 0``.

    ``sin(s arctan(wc t))`` is negative for ``s arctan(wc t)`` in
    ``((2j-1) pi, 2j pi)``; a window whose upper edge lies beyond
    ``arctan = pi/2`` extends to ``t = inf``.  Empty for ``s <= 2``.
    """
    out = []
    if p.s <= 2:
        return out
    j = 1
    while (2 * j - 1) * math.pi / p.s < math.pi / 2:
        lo = math.tan((2 * j - 1) * math.pi / p.s) / p.omega_c
        hi_angle = 2 * j * math.pi / p.s
        hi = math.tan(hi_angle) / p.omega_c if hi_angle < math.pi / 2 else math.inf
        out.append((lo, hi))
        j += 1
    return out


def _log_factors(p: OhmicParams) -> list[tuple[float, float]]:
    """``(ln c(t_i), ln c(t_f))`` per window, with ``c`` the coherence factor."""
    out = []
    for a, b in negative_rate_windows(p):
        fa, fb = rate_integral([a, b], p)
        out.append((-DEPHASING_EXPONENT * fa, -DEPHASING_EXPONENT * fb))
    return out


def nc_of_s(p: OhmicParams) -> float:
    """Coherence-based measure: total rise of the coherence factor on the windows."""
    return float(sum(math.exp(b) - math.exp(a) for a, b in _log_factors(p)))


def _golden_max(f, a: float, b: float, tol: float = 1e-12, max_iter: int = 400):
    inv_phi = (math.sqrt(5) - 1) / 2
    c, d = b - inv_phi * (b - a), a + inv_phi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if abs(b - a) <= tol * max(1.0, abs(a), abs(b)):
            break
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = f(d)
    return (c, fc) if fc > fd else (d, fd)


def heat_objective_log(u: float, log_factors) -> float:
    """Log of the pure-state heat measure divided by ``omega0`` at ``|z0| = exp(u)``.

    Per window the excursion is ``|z0| ln sqrt((c_f^2 + (1 - c_f^2) z0^2) /
    (c_i^2 + (1 - c_i^2) z0^2))``.  Everything is carried in logarithms so
    factors far below the double-precision range stay usable.
    """
    if u >= 0.0:
        return -math.inf
    total = 0.0
    for la, lb in log_factors:
        total += 0.5 * (_log_mix(lb, u) - _log_mix(la, u))
    return u + math.log(total) if total > 0 else -math.inf


def _log_mix(log_c: float, u: float) -> float:
    # ln(c^2 + (1 - c^2) z^2) with ln c and ln z given
    two_a = 2.0 * log_c
    rest = math.log1p(-math.exp(two_a)) if two_a < 0 else -math.inf
    return float(np.logaddexp(two_a, rest + 2.0 * u))


@dataclass(frozen=True)
class HeatOptimum:
    value: float
    z_max: float
    log_z_max: float


def heat_optimum(p: OhmicParams, omega0: float = 1.0, n_scan: int = 200) -> HeatOptimum:
    """Closed-form heat measure and its optimal ``|z0|`` (pure initial state).

    The objective is scanned on ``n_scan`` points in ``u = ln|z0|`` and then
    refined by golden-section search inside the best bracket.  For ``s <= 2``
    there is nothing to maximise and ``z_max`` is NaN.
    """
    logs = _log_factors(p)
    if not logs:
        return HeatOptimum(0.0, math.nan, math.nan)
    u_lo = min(min(a, b) for a, b in logs) - 20.0
    grid = np.linspace(u_lo, 0.0, n_scan)
    vals = [heat_objective_log(u, logs) for u in grid]
    i = int(np.argmax(vals))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, n_scan - 1)]
    u_star, g_star = _golden_max(lambda u: heat_objective_log(u, logs), lo, hi)
    return HeatOptimum(omega0 * math.exp(g_star), math.exp(u_star), u_star)


def nq_of_s(p: OhmicParams, omega0: float = 1.0) -> tuple[float, float]:
    """Heat-based measure ``N_Q(s)`` and ``z_max``; ``(0.0, nan)`` for ``s <= 2``."""
    opt = heat_optimum(p, omega0)
    return opt.value, opt.z_max


@dataclass
class SweepTable:
    s: np.ndarray
    N_Q: np.ndarray
    N_C: np.ndarray
    z_max: np.ndarray
    log_z_max: np.ndarray

    def rows(self):
        return zip(self.s, self.N_Q, self.N_C, self.z_max)


def _sweep_point(args):
    s, omega0, omega_c = args
    p = OhmicParams(s, omega_c)
    opt = heat_optimum(p, omega0)
    return s, opt.value, nc_of_s(p), opt.z_max, opt.log_z_max


def s_grid(s_min: float, s_max: float, step: float) -> np.ndarray:
    if step <= 0:
        raise ValueError("step must be positive")
    n = int(math.floor((s_max - s_min) / step + 1e-9)) + 1
    return np.round(s_min + step * np.arange(n), 12)


def sweep(s_values, omega0: float = 1.0, omega_c: float = 1.0, jobs: int | None = 1) -> SweepTable:
    """``N_Q``, ``N_C`` and ``z_max`` over a grid of ohmicity values.

    ``jobs > 1`` fans points out to worker processes; rows are sorted by
    ``s`` so the result does not depend on scheduling.
    """
    tasks = [(float(s), omega0, omega_c) for s in np.asarray(s_values, dtype=float)]
    jobs = jobs or os.cpu_count() or 1
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_sweep_point, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        rows = [_sweep_point(t) for t in tasks]
    rows.sort(key=lambda row: row[0])
    cols = np.array(rows, dtype=float).reshape(-1, 5).T
    return SweepTable(*cols)
