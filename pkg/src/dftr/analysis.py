"""Weighted-energy machinery, decay-rate estimation, and the (n, alpha) sweep.

The Lyapunov weight rho(x) = rho0 * e^{-gamma x} with gamma in (0, v/d_ax)
certifies exponential decay of the energy E(t) = 1/2 * int rho w^2 dx at
rate at least lambda_t = v^2/(16 d_ax) (attained at gamma = v/(2 d_ax)).
The numerical rate lambda_n is fitted from the simulated norm history.
"""

from __future__ import annotations

import hashlib
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .errors import ContractError, EstimationError, ParameterError
from .model import (FeedbackLaw, Profile, ReactorParams, SpatialGrid,
                    default_saturation_bound, initial_profile, lambda_theoretical)

DEFAULT_WINDOW_FRACTION = 0.5
DEFAULT_FLOOR_FACTOR = 1e-12  # floor = factor * ||w(0)||_rho
THREADS_ENV_VAR = "DFTR_THREADS"


@dataclass(frozen=True)
class WeightFunction:
    """Exponential Lyapunov weight sampled on a grid."""

    rho0: float
    gamma: float
    profile: Profile


def weight_profile(grid: SpatialGrid, rho0: float, gamma: float) -> WeightFunction:
    """rho(x_i) = rho0 * e^{-gamma x_i} exactly at the nodes.

    gamma = 0 is accepted as the constant-weight limit (plain L^2 energy);
    callers enforcing the decay theorem pass 0 < gamma < v/d_ax.
    """
    if not (np.isfinite(rho0) and rho0 > 0):
        raise ParameterError(f"rho0 must be > 0, got {rho0}")
    if not (np.isfinite(gamma) and gamma >= 0):
        raise ParameterError(f"gamma must be >= 0, got {gamma}")
    vals = rho0 * np.exp(-gamma * grid.nodes)
    return WeightFunction(rho0=rho0, gamma=gamma, profile=Profile(grid, vals))


def default_weight(grid: SpatialGrid, params: ReactorParams) -> WeightFunction:
    """Weight at the rate-optimal decay gamma = v/(2 d_ax), rho0 = 1."""
    return weight_profile(grid, 1.0, params.v / (2.0 * params.d_ax))


def energy(w: Profile, weight: WeightFunction) -> float:
    """E = 1/2 * trapezoid(rho * w^2) over [0, l]."""
    if w.grid != weight.profile.grid:
        raise ContractError("profile and weight grids do not match")
    quad = w.grid.quad_weights
    return 0.5 * float(np.sum(quad * weight.profile.values * w.values ** 2))


def norm_rho(w: Profile, weight: WeightFunction) -> float:
    return math.sqrt(2.0 * energy(w, weight))


@dataclass(frozen=True)
class DecayEstimate:
    """Fitted decay rate with diagnostics.

    lambda_n is None when the trajectory sat at the numerical floor (an
    identically zero run); floor_hit flags any record at or below the floor.
    """

    lambda_n: float | None
    lambda_t: float
    fit_window: tuple
    fit_r2: float
    floor_hit: bool


def estimate_decay_rate(traj, weight: WeightFunction,
                        window_fraction: float = DEFAULT_WINDOW_FRACTION,
                        floor: float | None = None) -> DecayEstimate:
    """Least-squares decay rate of log ||w(t)||_rho over the trailing window.

    Norms are computed with the unit-scale weight e^{-gamma x} so the
    result is bit-identical under any rescaling of rho0 (only the decay
    shape of the weight matters to a rate). Records at or below the floor
    are excluded; the fit needs at least 10 usable records.
    """
    if not (0.0 < window_fraction <= 1.0):
        raise ParameterError(f"window_fraction must lie in (0, 1], got {window_fraction}")

    grid = traj.grid
    unit_vals = np.exp(-weight.gamma * grid.nodes)
    quad = grid.quad_weights
    norms = np.sqrt(np.sum(quad * unit_vals * traj.states ** 2, axis=1))
    lam_t = lambda_theoretical(traj.params)

    if floor is None:
        floor = DEFAULT_FLOOR_FACTOR * norms[0]
    if norms[0] <= floor:
        # identically-zero (or floor-level) run: no rate to report
        return DecayEstimate(lambda_n=None, lambda_t=lam_t, fit_window=(0.0, 0.0),
                             fit_r2=0.0, floor_hit=True)

    usable = np.flatnonzero(norms > floor)
    floor_hit = usable.size < norms.size
    if usable.size < 10:
        raise EstimationError(f"only {usable.size} records above the floor (need 10)",
                              usable_records=int(usable.size))

    tail = usable[-max(2, math.ceil(window_fraction * usable.size)):]
    t = traj.times[tail]
    y = np.log(norms[tail] / norms[0])
    slope, intercept = np.polyfit(t, y, 1)
    fitted = slope * t + intercept
    ss_res = float(np.sum((y - fitted) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else max(0.0, min(1.0, 1.0 - ss_res / ss_tot))
    return DecayEstimate(lambda_n=float(-slope), lambda_t=lam_t,
                         fit_window=(float(t[0]), float(t[-1])),
                         fit_r2=r2, floor_hit=floor_hit)


@dataclass(frozen=True)
class SweepCell:
    """One (n, alpha) cell of the sweep with full diagnostics."""

    n: float
    alpha: float
    estimate: DecayEstimate | None
    error: str | None
    provenance: dict


@dataclass(frozen=True)
class SweepResult:
    """Decay-rate table over reaction orders and feedback gains."""

    n_values: tuple
    alpha_values: tuple
    cells: dict

    def cell(self, n: float, alpha: float) -> SweepCell:
        return self.cells[(n, alpha)]

    @property
    def table(self) -> np.ndarray:
        """lambda_n per cell (NaN for failed or floor-limited cells)."""
        out = np.full((len(self.n_values), len(self.alpha_values)), np.nan)
        for i, n in enumerate(self.n_values):
            for j, a in enumerate(self.alpha_values):
                c = self.cells[(n, a)]
                if c.estimate is not None and c.estimate.lambda_n is not None:
                    out[i, j] = c.estimate.lambda_n
        return out


def _provenance(params: ReactorParams, law: FeedbackLaw, grid: SpatialGrid,
                dt: float, record_every: int, weight: WeightFunction,
                window_fraction: float, floor, extra: dict) -> dict:
    settings = {
        "d_ax": params.d_ax, "v": params.v, "k": params.k, "n": params.n,
        "l": params.l, "t_final": params.t_final, "sat_m": params.sat_m,
        "alpha": law.alpha, "u_bar": law.u_bar,
        "num_nodes": grid.num_nodes, "dt": dt, "record_every": record_every,
        "rho0": weight.rho0, "gamma": weight.gamma,
        "window_fraction": window_fraction,
        "floor": "default" if floor is None else floor,
    }
    canon = ";".join(f"{k}={settings[k]!r}" for k in sorted(settings))
    digest = hashlib.sha256(canon.encode()).hexdigest()[:16]
    return {"hash": digest, **settings, **extra}


def _run_cell(base_config, n: float, alpha: float, sat_m, weight,
              window_fraction: float, floor) -> SweepCell:
    from .integrator import SimulationConfig, simulate
    from .steady_state import steady_state_numeric

    base = base_config.params
    cell_sat = sat_m if sat_m is not None else default_saturation_bound(
        base.d_ax, base.v, base.l, alpha)
    params = replace(base, n=n, sat_m=cell_sat)
    law = replace(base_config.law, alpha=alpha)
    config = SimulationConfig(params=params, law=law, grid=base_config.grid,
                              dt=base_config.dt,
                              record_every=base_config.record_every,
                              clamp_monitor=base_config.clamp_monitor)
    w = weight if weight is not None else default_weight(config.grid, params)

    extra: dict = {}
    try:
        steady = steady_state_numeric(params, law.u_bar, config.grid)
        extra["newton_iterations"] = steady.iterations
        w0 = initial_profile(config.grid, params, law)
        traj = simulate(config, steady, w0)
        extra["substeps"] = traj.substeps
        est = estimate_decay_rate(traj, w, window_fraction, floor)
        err = None
    except Exception as exc:  # per-cell isolation: record, keep sweeping
        est = None
        err = f"{type(exc).__name__}: {exc}"
    prov = _provenance(params, law, config.grid, config.dt, config.record_every,
                       w if w is not None else default_weight(config.grid, params),
                       window_fraction, floor, extra)
    return SweepCell(n=n, alpha=alpha, estimate=est, error=err, provenance=prov)


def max_workers() -> int:
    cap = os.environ.get(THREADS_ENV_VAR)
    if cap is not None:
        try:
            return max(1, int(cap))
        except ValueError:
            raise ParameterError(f"{THREADS_ENV_VAR} must be an integer, got {cap!r}")
    return os.cpu_count() or 1


def sweep(base_config, n_values, alpha_values, sat_m: float | None = None,
          weight: WeightFunction | None = None,
          window_fraction: float = DEFAULT_WINDOW_FRACTION,
          floor: float | None = None) -> SweepResult:
    """Decay-rate table over all (n, alpha) cells.

    Each cell solves its own steady state, builds the alpha-dependent
    initial profile, simulates to the horizon, and fits lambda_n. Cells are
    independent; failures are recorded per cell without aborting. sat_m
    defaults per cell to ten times the peak of that cell's initial profile.
    Worker count is capped by the DFTR_THREADS environment variable.
    """
    n_values = tuple(float(n) for n in n_values)
    alpha_values = tuple(float(a) for a in alpha_values)
    if not n_values or not alpha_values:
        raise ParameterError("n_values and alpha_values must be non-empty")

    pairs = [(n, a) for n in n_values for a in alpha_values]
    workers = min(max_workers(), len(pairs))
    if workers == 1:
        results = [_run_cell(base_config, n, a, sat_m, weight,
                             window_fraction, floor) for n, a in pairs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(
                lambda na: _run_cell(base_config, na[0], na[1], sat_m, weight,
                                     window_fraction, floor), pairs))
    cells = {(c.n, c.alpha): c for c in results}
    return SweepResult(n_values=n_values, alpha_values=alpha_values, cells=cells)
