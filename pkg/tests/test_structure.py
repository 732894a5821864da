import io
import math

import numpy as np
import pytest

from tovkit import (
    ConstantDensityEos,
    DomainError,
    HorizonApproachError,
    IntegrationOptions,
    NoFiniteRadiusError,
    PolytropicEos,
    integrate_lane_emden,
    integrate_tov,
    newtonian_star,
    profile_to_csv,
    surface_data,
)
from conftest import nonuniform_derivative


def uniform_density_star(compactness, rho0=1.0):
    """Closed-form interior solution for constant density (the oracle)."""
    radius = math.sqrt(3.0 * compactness / (8.0 * math.pi * rho0))
    mass = 0.5 * compactness * radius
    s = math.sqrt(1.0 - compactness)

    def pressure(r):
        f = np.sqrt(1.0 - compactness * (r / radius) ** 2)
        return rho0 * (f - s) / (3.0 * s - f)

    return radius, mass, pressure


class TestLaneEmden:
    def test_n0_analytic(self):
        sol = integrate_lane_emden(0.0)
        assert sol.xi1 == pytest.approx(math.sqrt(6.0), abs=1e-8)
        # theta = 1 - xi^2/6 pointwise on the whole grid
        assert np.max(np.abs(sol.theta - (1.0 - sol.xi**2 / 6.0))) < 1e-8

    def test_n1_analytic(self):
        sol = integrate_lane_emden(1.0)
        assert sol.xi1 == pytest.approx(math.pi, abs=1e-8)
        assert sol.theta_prime_at_xi1 == pytest.approx(-1.0 / math.pi, abs=1e-8)
        # theta = sin(xi)/xi away from the center point
        xi = sol.xi[1:]
        assert np.max(np.abs(sol.theta[1:] - np.sin(xi) / xi)) < 1e-8

    def test_n3_against_tighter_oracle(self):
        sol = integrate_lane_emden(3.0)
        oracle = integrate_lane_emden(3.0, IntegrationOptions(rtol=1e-11, grid_points=64))
        assert sol.xi1 == pytest.approx(oracle.xi1, rel=1e-6)
        mine = -sol.xi1**2 * sol.theta_prime_at_xi1
        ref = -oracle.xi1**2 * oracle.theta_prime_at_xi1
        assert mine == pytest.approx(ref, rel=1e-6)
        assert sol.xi1 == pytest.approx(6.8968, abs=1e-3)
        assert mine == pytest.approx(2.0182, abs=1e-3)

    def test_n5_has_no_finite_radius(self):
        sol = integrate_lane_emden(5.0)
        assert not sol.has_finite_radius
        assert math.isinf(sol.xi1)

    def test_n_above_five_has_no_finite_radius(self):
        assert not integrate_lane_emden(7.0).has_finite_radius

    def test_negative_index_rejected(self):
        with pytest.raises(DomainError):
            integrate_lane_emden(-0.5)

    def test_center_conditions(self):
        sol = integrate_lane_emden(1.5)
        assert sol.theta[0] == 1.0
        assert sol.theta_prime[0] == 0.0
        assert sol.theta[-1] == pytest.approx(0.0, abs=1e-9)
        assert np.all(sol.theta[:-1] > 0.0)

    def test_halve_step_convergence(self):
        tau = 1e-8
        a = integrate_lane_emden(2.0, IntegrationOptions(rtol=tau, grid_points=64))
        b = integrate_lane_emden(2.0, IntegrationOptions(rtol=tau / 10.0, grid_points=64))
        assert abs(a.xi1 - b.xi1) / b.xi1 < 10.0 * tau


class TestTovConstantDensity:
    def test_enclosed_mass_exact(self):
        rho0 = 1.0
        _, _, _ = uniform_density_star(0.3, rho0)
        prof = integrate_tov(
            ConstantDensityEos(rho0), rho0,
            IntegrationOptions(rtol=1e-9, grid_points=256),
            central_pressure=uniform_density_star(0.3, rho0)[2](0.0),
        )
        exact = 4.0 * math.pi * prof.r**3 * rho0 / 3.0
        assert np.max(np.abs(prof.m - exact)) < 1e-12 * prof.total_mass

    def test_pressure_profile_matches_closed_form(self):
        rho0 = 1.0
        radius, mass, pressure = uniform_density_star(0.3, rho0)
        p_c = pressure(0.0)
        prof = integrate_tov(ConstantDensityEos(rho0), rho0, central_pressure=p_c)
        assert prof.surface_radius == pytest.approx(radius, rel=1e-8)
        assert prof.total_mass == pytest.approx(mass, rel=1e-8)
        exact = pressure(prof.r)
        # scale-relative everywhere, pointwise-relative through the bulk
        assert np.max(np.abs(prof.p - exact)) / p_c < 1e-6
        bulk = exact >= 1e-6 * p_c
        assert np.max(np.abs(prof.p - exact)[bulk] / exact[bulk]) < 1e-6

    def test_needs_explicit_central_pressure(self):
        with pytest.raises(DomainError):
            integrate_tov(ConstantDensityEos(1.0), 1.0)


class TestTovPolytrope:
    def test_rejects_nonpositive_central_density(self):
        with pytest.raises(DomainError):
            integrate_tov(PolytropicEos(k=1.0, gamma=2.0), 0.0)

    def test_mass_radius_curve_has_turning_point(self, fast_opts):
        # brute-force sweep: total mass rises then falls along rho_c
        eos = PolytropicEos(k=100.0, gamma=2.0)
        rho_grid = np.geomspace(3e-4, 3e-2, 15)
        masses = [integrate_tov(eos, r, fast_opts).total_mass for r in rho_grid]
        peak = int(np.argmax(masses))
        assert 0 < peak < len(masses) - 1
        assert masses[peak] > masses[0] and masses[peak] > masses[-1]

    def test_profile_invariants(self):
        eos = PolytropicEos(k=1.0, gamma=5.0 / 3.0)
        prof = integrate_tov(eos, 1.0)
        assert np.all(np.diff(prof.p) <= 0.0)
        assert np.all(np.diff(prof.m) >= -1e-10 * prof.total_mass)
        assert prof.m[0] == 0.0
        assert np.all(2.0 * prof.m[1:] / prof.r[1:] < 1.0)
        assert prof.p[-1] <= 1e-10 * prof.central_pressure * (1.0 + 1e-9)

    @pytest.mark.parametrize("gamma,rho_c", [(2.0, 0.01), (5.0 / 3.0, 1.0), (3.0, 0.5)])
    def test_continuity_residual(self, gamma, rho_c):
        eos = PolytropicEos(k=1.0, gamma=gamma)
        prof = integrate_tov(eos, rho_c)
        m_prime = nonuniform_derivative(prof.r, prof.m)
        target = 4.0 * math.pi * prof.r[1:-1] ** 2 * prof.rho[1:-1]
        residual = np.abs(m_prime - target) / np.maximum(1.0, m_prime)
        interior = prof.p[1:-1] >= 1e-3 * prof.central_pressure
        assert np.max(residual[interior]) < 1e-6

    def test_halve_step_convergence(self):
        eos = PolytropicEos(k=1.0, gamma=5.0 / 3.0)
        tau = 1e-8
        a = integrate_tov(eos, 1.0, IntegrationOptions(rtol=tau, grid_points=64))
        b = integrate_tov(eos, 1.0, IntegrationOptions(rtol=tau / 10.0, grid_points=64))
        assert abs(a.surface_radius - b.surface_radius) / b.surface_radius < 10.0 * tau
        assert abs(a.total_mass - b.total_mass) / b.total_mass < 10.0 * tau

    def test_horizon_approach_error(self, fast_opts):
        # interior 2m/r of this star tops 0.6; a raised margin must trip the guard
        opts = IntegrationOptions(rtol=1e-8, grid_points=64, horizon_margin=0.5)
        with pytest.raises(HorizonApproachError):
            integrate_tov(PolytropicEos(k=100.0, gamma=2.0), 0.01, opts)
        # and the same star integrates cleanly at the default margin
        prof = integrate_tov(PolytropicEos(k=100.0, gamma=2.0), 0.01, fast_opts)
        assert 2.0 * prof.total_mass / prof.surface_radius < 0.75

    def test_radial_budget_exhaustion(self, fast_opts):
        from tovkit import NonConvergenceError

        eos = PolytropicEos(k=1.0, gamma=2.0)
        reference = integrate_tov(eos, 0.01, fast_opts)
        opts = IntegrationOptions(rtol=1e-8, grid_points=64,
                                  r_max=0.5 * reference.surface_radius)
        with pytest.raises(NonConvergenceError):
            integrate_tov(eos, 0.01, opts)

    def test_central_pressure_must_clear_surface_threshold(self):
        # a large stiffness offset can swallow the whole pressure budget
        eos = PolytropicEos(k=1.0, gamma=2.0, k0=1e3)
        with pytest.raises(DomainError):
            integrate_tov(eos, 1e-6)

    def test_nonzero_stiffness_offsets_surface(self):
        eos = PolytropicEos(k=1.0, gamma=2.0, k0=1e-4)
        prof = integrate_tov(eos, 0.5, IntegrationOptions(rtol=1e-9, grid_points=256))
        # surface pressure approaches the offset, not zero
        assert prof.p[-1] == pytest.approx(1e-4, rel=1e-3)
        assert prof.p[-1] >= 1e-4


class TestNewtonianStar:
    def test_n1_radius_independent_of_density(self):
        eos = PolytropicEos(k=1.0, gamma=2.0)
        r1 = newtonian_star(eos, 1.0).surface_radius
        r2 = newtonian_star(eos, 4.0).surface_radius
        assert r1 == pytest.approx(r2, rel=1e-8)
        alpha = math.sqrt(2.0 * 1.0 / (4.0 * math.pi))
        assert r1 == pytest.approx(math.pi * alpha, rel=1e-8)

    def test_n3_mass_independent_of_density(self):
        eos = PolytropicEos.from_index(k=1.0, n=3.0)
        m1 = newtonian_star(eos, 1.0).total_mass
        m2 = newtonian_star(eos, 5.0).total_mass
        assert m1 == pytest.approx(m2, rel=1e-6)

    def test_against_tighter_oracle(self):
        eos = PolytropicEos.from_index(k=1.0, n=1.5)
        prof = newtonian_star(eos, 1.0)
        oracle = newtonian_star(eos, 1.0, IntegrationOptions(rtol=1e-11, grid_points=64))
        assert prof.total_mass == pytest.approx(oracle.total_mass, rel=1e-6)
        assert prof.surface_radius == pytest.approx(oracle.surface_radius, rel=1e-6)

    def test_no_finite_radius_for_n5(self):
        with pytest.raises(NoFiniteRadiusError):
            newtonian_star(PolytropicEos(k=1.0, gamma=1.2), 1e-3)

    def test_continuity_residual(self):
        prof = newtonian_star(PolytropicEos(k=1.0, gamma=5.0 / 3.0), 1.0)
        m_prime = nonuniform_derivative(prof.r, prof.m)
        target = 4.0 * math.pi * prof.r[1:-1] ** 2 * prof.rho[1:-1]
        residual = np.abs(m_prime - target) / np.maximum(1.0, m_prime)
        interior = prof.p[1:-1] >= 1e-3 * prof.central_pressure
        assert np.max(residual[interior]) < 1e-6

    def test_matches_tov_in_weak_field(self):
        # max p/rho = 1e-6 here, safely inside the weak-field regime
        eos = PolytropicEos(k=1.0, gamma=2.0)
        rho_c = 1e-6
        tov = integrate_tov(eos, rho_c)
        newt = newtonian_star(eos, rho_c)
        assert tov.surface_radius == pytest.approx(newt.surface_radius, rel=1e-3)
        assert tov.total_mass == pytest.approx(newt.total_mass, rel=1e-3)


class TestSurfaceData:
    def test_newtonian_combination_equals_central_density_times_gravity(self):
        prof = newtonian_star(PolytropicEos(k=1.0, gamma=2.0), 1.0)
        _, combination = surface_data(prof)
        oracle = prof.central_density * prof.total_mass / prof.surface_radius**2
        assert combination == pytest.approx(oracle, rel=1e-6)

    def test_scaling_with_central_density(self):
        eos = PolytropicEos(k=1.0, gamma=2.0)
        p1 = newtonian_star(eos, 1.0)
        p2 = newtonian_star(eos, 2.0)
        ratio = p2.rho_rel_limit / p1.rho_rel_limit
        mass_gravity_change = (p2.total_mass / p2.surface_radius**2) / (
            p1.total_mass / p1.surface_radius**2
        )
        assert ratio == pytest.approx(2.0 * mass_gravity_change, rel=1e-8)

    def test_constant_density_gradient_equals_combination(self):
        # rho_rel = 1 for uniform density, so |p'(R)| itself is the limit;
        # checked in the weak-field regime where hydrostatics is Newtonian
        rho0 = 1.0
        radius, mass, pressure = uniform_density_star(1e-6, rho0)
        prof = integrate_tov(
            ConstantDensityEos(rho0), rho0,
            IntegrationOptions(rtol=1e-9, grid_points=128),
            central_pressure=pressure(0.0),
        )
        gradient, combination = surface_data(prof)
        assert gradient == pytest.approx(combination, rel=3e-6)


class TestProfileExport:
    def test_csv_round_trip(self):
        prof = newtonian_star(PolytropicEos(k=1.0, gamma=2.0), 1.0,
                              IntegrationOptions(rtol=1e-9, grid_points=64))
        buf = io.StringIO()
        profile_to_csv(prof, buf)
        lines = buf.getvalue().splitlines()
        assert lines[0] == "r,p,rho,m"
        data = np.loadtxt(lines[1:], delimiter=",")
        assert data.shape[0] == len(prof.r)
        assert data[0, 0] == 0.0
        assert data[-1, 0] == pytest.approx(prof.surface_radius, rel=1e-15)
        assert data[-1, 3] == pytest.approx(prof.total_mass, rel=1e-15)
