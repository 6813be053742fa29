"""Core types for the tubular-reactor toolkit.

Physical parameters, uniform spatial grids, node-sampled profiles, the
saturation nonlinearity, the boundary-compatible initial condition, and the
theoretical decay constant. Everything here is immutable after construction
and safe to share across worker threads.

Units are documentation only (SI: m, s, mol/m^3); the code enforces
positivity and finiteness, not dimensions.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ContractError, ParameterError


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ParameterError(msg)


@dataclass(frozen=True)
class ReactorParams:
    """Physical constants of the reactor model.

    d_ax: axial dispersion coefficient, m^2/s (> 0)
    v: superficial flow velocity, m/s (> 0)
    k: reaction rate constant (>= 0; zero disables the reaction for
       linear cross-checks)
    n: reaction order (> 0)
    l: reactor length, m (> 0)
    t_final: nominal simulation horizon, s (>= 0)
    sat_m: saturation bound applied to the deviation inside the
       reaction term (> 0, finite)
    """

    d_ax: float
    v: float
    k: float
    n: float
    l: float
    t_final: float
    sat_m: float

    def __post_init__(self):
        _require(np.isfinite(self.d_ax) and self.d_ax > 0, f"d_ax must be > 0, got {self.d_ax}")
        _require(np.isfinite(self.v) and self.v > 0, f"v must be > 0, got {self.v}")
        _require(np.isfinite(self.k) and self.k >= 0, f"k must be >= 0, got {self.k}")
        _require(np.isfinite(self.n) and self.n > 0, f"n must be > 0, got {self.n}")
        _require(np.isfinite(self.l) and self.l > 0, f"l must be > 0, got {self.l}")
        _require(np.isfinite(self.t_final) and self.t_final >= 0,
                 f"t_final must be >= 0, got {self.t_final}")
        _require(np.isfinite(self.sat_m) and self.sat_m > 0,
                 f"sat_m must be > 0 and finite, got {self.sat_m}")

    @property
    def peclet(self) -> float:
        return self.v * self.l / self.d_ax


@dataclass(frozen=True)
class FeedbackLaw:
    """Boundary feedback u_w(t) = alpha * w(0, t) around the inlet value u_bar."""

    alpha: float
    u_bar: float = 1.0

    def __post_init__(self):
        _require(np.isfinite(self.alpha) and 0.0 <= self.alpha <= 0.5,
                 f"alpha must lie in [0, 1/2], got {self.alpha}")
        _require(np.isfinite(self.u_bar) and self.u_bar > 0,
                 f"u_bar must be > 0, got {self.u_bar}")


@dataclass(frozen=True)
class SpatialGrid:
    """Uniform grid x_i = i*h on [0, l] with h = l/(num_nodes - 1)."""

    l: float
    num_nodes: int

    def __post_init__(self):
        _require(np.isfinite(self.l) and self.l > 0, f"l must be > 0, got {self.l}")
        _require(int(self.num_nodes) == self.num_nodes and self.num_nodes >= 3,
                 f"num_nodes must be an integer >= 3, got {self.num_nodes}")

    @property
    def h(self) -> float:
        return self.l / (self.num_nodes - 1)

    @cached_property
    def nodes(self) -> np.ndarray:
        x = np.linspace(0.0, self.l, self.num_nodes)
        x.flags.writeable = False
        return x

    @cached_property
    def quad_weights(self) -> np.ndarray:
        # trapezoid weights: h/2 at the ends, h inside
        w = np.full(self.num_nodes, self.h)
        w[0] = w[-1] = 0.5 * self.h
        w.flags.writeable = False
        return w


@dataclass(frozen=True)
class Profile:
    """A spatial field sampled at the grid nodes (node values only)."""

    grid: SpatialGrid
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=float, copy=True)
        if vals.shape != (self.grid.num_nodes,):
            raise ContractError(
                f"profile length {vals.shape} does not match grid ({self.grid.num_nodes},)")
        if not np.all(np.isfinite(vals)):
            raise ContractError("profile contains non-finite values")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    def with_values(self, values) -> "Profile":
        return Profile(self.grid, values)


def d_ax_from_peclet(v: float, l: float, pe: float) -> float:
    """Dispersion coefficient from the Peclet number Pe = v*l/d_ax."""
    _require(np.isfinite(v) and v > 0, f"v must be > 0, got {v}")
    _require(np.isfinite(l) and l > 0, f"l must be > 0, got {l}")
    _require(np.isfinite(pe) and pe > 0, f"pe must be > 0, got {pe}")
    return v * l / pe


def saturate(w, m: float):
    """Clamp w to [-m, m]; elementwise on arrays, total for finite inputs."""
    _require(np.isfinite(m) and m > 0, f"saturation bound must be > 0, got {m}")
    return np.clip(w, -m, m)


def clamped_power(c, n: float):
    """max(c, 0)**n, the reaction-rate power law extended to negative arguments.

    Physical concentrations are nonnegative; the clamp keeps fractional
    orders total and preserves rate(0) = 0.
    """
    return np.maximum(c, 0.0) ** n


def reaction_rate(w, c_bar, params: ReactorParams):
    """Deviation-form reaction term r(w) = k*c_bar^n - k*(Sat_M(w) + c_bar)^n."""
    ws = saturate(w, params.sat_m)
    return params.k * (clamped_power(c_bar, params.n)
                       - clamped_power(ws + c_bar, params.n))


def initial_profile(grid: SpatialGrid, params: ReactorParams, law: FeedbackLaw) -> Profile:
    """Quadratic initial deviation compatible with both boundary conditions.

    w(x,0) = -(x-l)^2/2 + l*(l*v*(1-alpha) + 2*d_ax) / (2*v*(1-alpha)),
    which satisfies (1-alpha)*w(0,0) = (d_ax/v)*w_x(0,0) and w_x(l,0) = 0
    exactly.
    """
    if not law.alpha < 1.0:
        raise ParameterError(f"initial profile requires alpha < 1, got {law.alpha}")
    x = grid.nodes
    l, v, d = params.l, params.v, params.d_ax
    offset = l * (l * v * (1.0 - law.alpha) + 2.0 * d) / (2.0 * v * (1.0 - law.alpha))
    return Profile(grid, -0.5 * (x - l) ** 2 + offset)


def default_saturation_bound(d_ax: float, v: float, l: float, alpha: float) -> float:
    """Saturation bound 10x the peak of the default initial deviation.

    The initial profile is increasing in x, so its maximum is w(l,0); a
    bound of ten times that keeps the clamp inactive on nominal runs while
    the reaction term stays globally Lipschitz.
    """
    _require(np.isfinite(alpha) and alpha < 1.0, f"alpha must be < 1, got {alpha}")
    w_outlet = l * (l * v * (1.0 - alpha) + 2.0 * d_ax) / (2.0 * v * (1.0 - alpha))
    return 10.0 * w_outlet


def lambda_theoretical(params: ReactorParams) -> float:
    """Theoretical exponential decay rate v^2 / (16 * d_ax)."""
    return params.v ** 2 / (16.0 * params.d_ax)
