"""Hydrostatic structure integration: relativistic stars and polytropes.

Two integrators live here.  ``integrate_tov`` solves the relativistic
hydrostatic system

    p'(r) = -(rho + p) (m + 4 pi r^3 p) / (r^2 (1 - 2 m / r))
    m'(r) = 4 pi r^2 rho

for an equation of state rho(p), from a series-regularized start near
r = 0 out to the surface where the pressure drops to a small fraction of
its central value.  ``integrate_lane_emden`` solves the dimensionless
Newtonian polytrope equation

    theta'' + (2/xi) theta' + theta^n = 0,  theta(0) = 1, theta'(0) = 0

to its first zero xi1, and ``newtonian_star`` turns that solution into a
physical profile through the standard scaling

    r = alpha xi,  rho = rho_c theta^n,  alpha^2 = (n+1) k rho_c^{(1-n)/n} / (4 pi)
    R = alpha xi1,  M = 4 pi alpha^3 rho_c xi1^2 |theta'(xi1)|.

Both use an adaptive embedded Runge-Kutta 4(5) pair (Dormand-Prince via
scipy) with terminal events for the surface / first zero, so the
boundary is located by root-finding on the dense output rather than by
grid inspection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import IO, Optional, Union

import numpy as np
from scipy.integrate import solve_ivp

from .eos import ConstantDensityEos, PolytropicEos
from .errors import (
    DomainError,
    HorizonApproachError,
    NoFiniteRadiusError,
    NonConvergenceError,
)

# Fractional pressure drop absorbed into the series start, so the first
# integrated point sits harmlessly close to the center.
_SERIES_START_DROP = 1e-10


@dataclass(frozen=True)
class IntegrationOptions:
    """Knobs shared by the structure integrators.

    rtol is the per-step relative tolerance of the embedded pair.
    surface_fraction defines the surface: the first radius where the
    pressure falls to max(k0, 0) + surface_fraction * p_c.  grid_points
    controls how densely the dense output is resampled into the stored
    profile (solver steps are kept as well).
    """

    rtol: float = 1e-10
    surface_fraction: float = 1e-10
    grid_points: int = 8001
    xi_max: float = 1e6
    r_max: Optional[float] = None
    # integration stops with a horizon-approach error once 1 - 2m/r drops
    # below this; stars with density nonincreasing outward keep 2m/r <= 8/9
    # everywhere (Buchdahl), so the default cannot reject a physical profile
    horizon_margin: float = 1e-2

    def __post_init__(self) -> None:
        if not (0.0 < self.rtol < 1e-2):
            raise DomainError(f"rtol out of range: {self.rtol}")
        if not (0.0 < self.surface_fraction < 1e-2):
            raise DomainError(f"surface_fraction out of range: {self.surface_fraction}")
        if self.grid_points < 16:
            raise DomainError("grid_points must be at least 16")
        if not (0.0 < self.horizon_margin < 1.0):
            raise DomainError(f"horizon_margin out of range: {self.horizon_margin}")


@dataclass(frozen=True)
class StellarProfile:
    """Radial structure of one star in geometrized units.

    Arrays share a strictly increasing radius grid running from the
    center to the surface.  rho_rel_limit holds the finite limit of
    |p'(R)| / (rho(R)/rho_c): the raw ratio is 0/0 for a polytrope whose
    surface density vanishes, while Newtonian hydrostatics gives the
    limit rho_c * M / R^2, which is what is stored.
    """

    r: np.ndarray = field(repr=False)
    p: np.ndarray = field(repr=False)
    rho: np.ndarray = field(repr=False)
    m: np.ndarray = field(repr=False)
    surface_radius: float
    total_mass: float
    central_density: float
    central_pressure: float
    surface_pressure_gradient: float
    rho_rel_limit: float


@dataclass(frozen=True)
class LaneEmdenSolution:
    """First-zero data and samples of the dimensionless polytrope.

    For n >= 5 there is no finite first zero; xi1 is +inf, the derivative
    slot is NaN and the grids are empty.
    """

    n: float
    xi1: float
    theta_prime_at_xi1: float
    xi: np.ndarray = field(repr=False)
    theta: np.ndarray = field(repr=False)
    theta_prime: np.ndarray = field(repr=False)

    @property
    def has_finite_radius(self) -> bool:
        return math.isfinite(self.xi1)


def _merged_grid(steps: np.ndarray, lo: float, hi: float, count: int) -> np.ndarray:
    """Union of solver steps, a uniform fill and a surface-clustered fill.

    The clustered points (log-spaced distances from hi between 1e-5 and
    0.5 of the span) keep finite differencing of the profile accurate
    next to the surface, where fractional-index densities lose
    smoothness and the solver's own steps can be coarse.
    """
    span = hi - lo
    fill = np.linspace(lo, hi, count)
    # distances below 1e-5 span would put dense-output interpolation noise
    # above the differencing truncation error they are meant to reduce
    clustered = hi - np.geomspace(1e-5 * span, 0.5 * span, max(count // 5, 64))
    grid = np.union1d(steps, np.union1d(fill, clustered))
    grid = grid[(grid >= lo) & (grid <= hi)]
    # drop near-coincident points; they would poison finite differencing
    keep = np.empty(grid.shape, dtype=bool)
    keep[0] = True
    keep[1:] = np.diff(grid) > 1e-13 * max(abs(hi), 1.0)
    keep[-1] = True
    grid = grid[keep]
    if grid[-1] != hi:
        grid = np.append(grid, hi)
    return grid


def integrate_tov(
    eos: Union[PolytropicEos, ConstantDensityEos],
    rho_c: float,
    opts: Optional[IntegrationOptions] = None,
    *,
    central_pressure: Optional[float] = None,
) -> StellarProfile:
    """Integrate the relativistic structure equations for one star.

    Parameters
    ----------
    eos : PolytropicEos or ConstantDensityEos
        Supplies rho(p).  For the incompressible branch the central
        pressure cannot be derived from rho_c and must be passed in.
    rho_c : float
        Central density (geometrized).
    opts : IntegrationOptions, optional
    central_pressure : float, optional
        Overrides eos.pressure(rho_c); required for ConstantDensityEos.

    Returns
    -------
    StellarProfile

    Raises
    ------
    DomainError
        Nonpositive central density, or central pressure at or below the
        surface threshold.
    HorizonApproachError
        2m/r approached 1 before the pressure reached the surface value.
    NonConvergenceError
        No surface within the radial budget, or the stepper stalled.
    """
    if opts is None:
        opts = IntegrationOptions()
    if not (rho_c > 0.0 and math.isfinite(rho_c)):
        raise DomainError(f"central density must be positive, got {rho_c}")

    if central_pressure is not None:
        p_c = float(central_pressure)
    elif isinstance(eos, ConstantDensityEos):
        raise DomainError("ConstantDensityEos needs an explicit central_pressure")
    else:
        p_c = eos.pressure(rho_c)

    k0 = getattr(eos, "k0", 0.0)
    p_stop = max(k0, 0.0) + opts.surface_fraction * p_c
    if not p_c > p_stop:
        raise DomainError(
            f"central pressure {p_c} does not exceed the surface threshold {p_stop}"
        )

    def rho_of(p: float) -> float:
        if p <= k0:
            return 0.0 if not isinstance(eos, ConstantDensityEos) else eos.rho0
        return eos.density_from_pressure(p)

    def rhs(r, y):
        p, m = float(y[0]), float(y[1])
        rho = rho_of(p)
        denom = r * r * (1.0 - 2.0 * m / r)
        dp = -(rho + p) * (m + 4.0 * math.pi * r**3 * p) / denom
        dm = 4.0 * math.pi * r * r * rho
        return (dp, dm)

    def surface_event(r, y):
        return y[0] - p_stop

    surface_event.terminal = True
    surface_event.direction = -1

    def horizon_event(r, y):
        return 1.0 - 2.0 * y[1] / r - opts.horizon_margin

    horizon_event.terminal = True
    horizon_event.direction = -1

    # Series-regularized start: p(r) ~ p_c - (2 pi / 3)(rho_c + p_c)(rho_c + 3 p_c) r^2
    quad = (2.0 * math.pi / 3.0) * (rho_c + p_c) * (rho_c + 3.0 * p_c)
    r_scale = math.sqrt(p_c / quad)
    r0 = math.sqrt(_SERIES_START_DROP) * r_scale
    y0 = [p_c - quad * r0 * r0, (4.0 * math.pi / 3.0) * rho_c * r0**3]
    r_max = opts.r_max if opts.r_max is not None else 1e5 * r_scale

    sol = solve_ivp(
        rhs,
        (r0, r_max),
        y0,
        method="RK45",
        rtol=opts.rtol,
        atol=[p_stop * 1e-3, 0.0],
        events=(surface_event, horizon_event),
        dense_output=True,
    )
    if sol.t_events[1].size > 0:
        r_h = sol.t_events[1][0]
        raise HorizonApproachError(
            f"2m/r reached {1.0 - opts.horizon_margin:.6f} at r={r_h:.6e} before a surface formed"
        )
    if sol.t_events[0].size == 0:
        raise NonConvergenceError(
            f"no surface found within r <= {r_max:.3e} (solver status {sol.status})"
        )

    surface_radius = float(sol.t_events[0][0])
    total_mass = float(sol.y_events[0][0][1])

    grid = _merged_grid(sol.t[sol.t < surface_radius], r0, surface_radius, opts.grid_points)
    dense = sol.sol(grid)
    p_grid = dense[0]
    m_grid = dense[1]
    # prepend the exact center, pin the exact surface point
    r_grid = np.concatenate(([0.0], grid))
    p_grid = np.concatenate(([p_c], p_grid))
    m_grid = np.concatenate(([0.0], m_grid))
    p_grid[-1] = p_stop
    m_grid[-1] = total_mass
    rho_grid = np.array([rho_of(p) for p in p_grid])

    dp_surface, _ = rhs(surface_radius, (p_stop, total_mass))
    return StellarProfile(
        r=r_grid,
        p=p_grid,
        rho=rho_grid,
        m=m_grid,
        surface_radius=surface_radius,
        total_mass=total_mass,
        central_density=rho_c,
        central_pressure=p_c,
        surface_pressure_gradient=abs(dp_surface),
        rho_rel_limit=rho_c * total_mass / surface_radius**2,
    )


def integrate_lane_emden(
    n: float, opts: Optional[IntegrationOptions] = None
) -> LaneEmdenSolution:
    """Solve the dimensionless polytrope equation to its first zero.

    For n >= 5 the solution stays positive for all xi (n = 5 has the
    closed form (1 + xi^2/3)^(-1/2)), so a no-finite-radius solution is
    returned instead of integrating.
    """
    if opts is None:
        opts = IntegrationOptions()
    if n < 0.0 or not math.isfinite(n):
        raise DomainError(f"polytropic index must be nonnegative, got n={n}")
    if n >= 5.0:
        empty = np.array([])
        return LaneEmdenSolution(
            n=n, xi1=math.inf, theta_prime_at_xi1=math.nan,
            xi=empty, theta=empty, theta_prime=empty,
        )

    def rhs(xi, y):
        theta = max(float(y[0]), 0.0)  # trial stages can overshoot past zero
        return (y[1], -2.0 * y[1] / xi - theta**n)

    def zero_event(xi, y):
        return y[0]

    zero_event.terminal = True
    zero_event.direction = -1

    # Series start: theta = 1 - xi^2/6 + n xi^4 / 120 + O(xi^6)
    xi0 = 1e-4
    y0 = [1.0 - xi0**2 / 6.0 + n * xi0**4 / 120.0, -xi0 / 3.0 + n * xi0**3 / 30.0]

    sol = solve_ivp(
        rhs,
        (xi0, opts.xi_max),
        y0,
        method="RK45",
        rtol=opts.rtol,
        atol=1e-14,
        events=zero_event,
        dense_output=True,
    )
    if sol.t_events[0].size == 0:
        raise NonConvergenceError(
            f"no first zero found below xi={opts.xi_max:g} for n={n}"
        )
    xi1 = float(sol.t_events[0][0])
    theta_prime_1 = float(sol.y_events[0][0][1])

    grid = _merged_grid(sol.t[sol.t < xi1], xi0, xi1, opts.grid_points)
    dense = sol.sol(grid)
    xi_grid = np.concatenate(([0.0], grid))
    theta_grid = np.concatenate(([1.0], np.maximum(dense[0], 0.0)))
    prime_grid = np.concatenate(([0.0], dense[1]))
    theta_grid[-1] = 0.0
    prime_grid[-1] = theta_prime_1

    return LaneEmdenSolution(
        n=n,
        xi1=xi1,
        theta_prime_at_xi1=theta_prime_1,
        xi=xi_grid,
        theta=theta_grid,
        theta_prime=prime_grid,
    )


def newtonian_star(
    eos: PolytropicEos,
    rho_c: float,
    opts: Optional[IntegrationOptions] = None,
) -> StellarProfile:
    """Build a Newtonian polytrope profile from the Lane-Emden solution.

    Raises NoFiniteRadiusError when the index n = 1/(gamma-1) is 5 or
    larger, since the dimensionless solution never reaches zero.
    """
    if opts is None:
        opts = IntegrationOptions()
    if not (rho_c > 0.0 and math.isfinite(rho_c)):
        raise DomainError(f"central density must be positive, got {rho_c}")
    n = eos.n
    if n >= 5.0:
        raise NoFiniteRadiusError(
            f"index n={n:.6g} (gamma={eos.gamma:.6g}) has no finite radius"
        )
    le = integrate_lane_emden(n, opts)

    alpha = math.sqrt((n + 1.0) * eos.k * rho_c ** ((1.0 - n) / n) / (4.0 * math.pi))
    radius = alpha * le.xi1
    mass = 4.0 * math.pi * alpha**3 * rho_c * le.xi1**2 * abs(le.theta_prime_at_xi1)

    r_grid = alpha * le.xi
    rho_grid = rho_c * le.theta**n
    p_grid = eos.k * rho_grid**eos.gamma + eos.k0
    m_grid = -4.0 * math.pi * alpha**3 * rho_c * le.xi**2 * le.theta_prime
    m_grid[0] = 0.0
    m_grid[-1] = mass

    return StellarProfile(
        r=r_grid,
        p=p_grid,
        rho=rho_grid,
        m=m_grid,
        surface_radius=radius,
        total_mass=mass,
        central_density=rho_c,
        central_pressure=eos.k * rho_c**eos.gamma + eos.k0,
        surface_pressure_gradient=rho_grid[-1] * mass / radius**2,
        rho_rel_limit=rho_c * mass / radius**2,
    )


def surface_data(profile: StellarProfile) -> tuple[float, float]:
    """Surface gradient |p'(R)| and the limiting |p'(R)| / rho_rel value.

    The second element is the finite limit rho_c * M / R^2 rather than
    the raw 0/0 ratio (the surface density of a polytrope vanishes).
    """
    if not math.isfinite(profile.surface_radius):
        raise DomainError("profile has no finite surface")
    return profile.surface_pressure_gradient, profile.rho_rel_limit


def profile_to_csv(profile: StellarProfile, destination: Union[str, IO[str]]) -> None:
    """Write the radial grid as CSV with a one-line header r,p,rho,m."""
    def _write(stream: IO[str]) -> None:
        stream.write("r,p,rho,m\n")
        for r, p, rho, m in zip(profile.r, profile.p, profile.rho, profile.m):
            stream.write(f"{r:.17g},{p:.17g},{rho:.17g},{m:.17g}\n")

    if isinstance(destination, str):
        with open(destination, "w", encoding="ascii") as stream:
            _write(stream)
    else:
        _write(destination)
