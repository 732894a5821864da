"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line (visible with ``pytest -s`` or in captured output).
Criteria with a runtime budget assert it on a wall-clock measurement.
"""

import json
import math
import os
import subprocess
import sys
import time
from contextlib import contextmanager

import mpmath
import numpy as np
import pytest

from tovkit import (
    CatalogRecord,
    ConstantDensityEos,
    IntegrationOptions,
    MonomialRelation,
    PolytropicEos,
    RationalRelation,
    causal_k_bound_monomial,
    causal_k_bound_rational,
    central_density_from_newtonian_relation,
    density_bound_from_mass_derivative,
    fit_monomial,
    fit_rational,
    integrate_lane_emden,
    integrate_tov,
    mass_radius_curve,
    monomial_density,
    newtonian_causal_k_bound,
    verify_bound_by_bruteforce,
)
from conftest import SRC_DIR, loglog_slope


@contextmanager
def criterion(number, title):
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {number:2d} FAIL - {title}")
        raise
    print(f"ACCEPTANCE {number:2d} PASS - {title}")


def test_criterion_1_lane_emden_analytic_cases():
    with criterion(1, "analytic polytrope first zeros (n=0, n=1, n=5)"):
        start = time.perf_counter()
        n0 = integrate_lane_emden(0.0)
        n1 = integrate_lane_emden(1.0)
        n5 = integrate_lane_emden(5.0)
        elapsed = time.perf_counter() - start
        assert abs(n0.xi1 - math.sqrt(6.0)) < 1e-8
        assert abs(n1.xi1 - math.pi) < 1e-8
        assert not n5.has_finite_radius
        assert elapsed < 1.0, f"took {elapsed:.2f} s"


def test_criterion_2_lane_emden_n3_vs_tighter_oracle():
    with criterion(2, "n=3 polytrope against a 10x tighter integration"):
        sol = integrate_lane_emden(3.0)
        oracle = integrate_lane_emden(3.0, IntegrationOptions(rtol=1e-11, grid_points=64))
        assert abs(sol.xi1 - oracle.xi1) / oracle.xi1 < 1e-6
        mine = -sol.xi1**2 * sol.theta_prime_at_xi1
        ref = -oracle.xi1**2 * oracle.theta_prime_at_xi1
        assert abs(mine - ref) / ref < 1e-6


def test_criterion_3_uniform_density_interior_solution():
    with criterion(3, "relativistic uniform-density star vs closed form at 2M/R=0.3"):
        rho0, compactness = 1.0, 0.3
        radius = math.sqrt(3.0 * compactness / (8.0 * math.pi * rho0))
        s = math.sqrt(1.0 - compactness)

        def pressure(r):
            f = np.sqrt(1.0 - compactness * (r / radius) ** 2)
            return rho0 * (f - s) / (3.0 * s - f)

        p_c = float(pressure(0.0))
        start = time.perf_counter()
        prof = integrate_tov(ConstantDensityEos(rho0), rho0, central_pressure=p_c)
        elapsed = time.perf_counter() - start
        exact = pressure(prof.r)
        assert np.max(np.abs(prof.p - exact)) / p_c < 1e-6
        bulk = exact >= 1e-6 * p_c
        assert np.max(np.abs(prof.p - exact)[bulk] / exact[bulk]) < 1e-6
        assert elapsed < 1.0, f"took {elapsed:.2f} s"


def test_criterion_4_newtonian_scaling_exponents():
    with criterion(4, "Newtonian scaling slopes for n in {0.5, 1.5, 2, 3}"):
        start = time.perf_counter()
        opts = IntegrationOptions(rtol=1e-10, grid_points=64)
        for n in (0.5, 1.5, 2.0, 3.0):
            eos = PolytropicEos.from_index(k=1.0, n=n)
            rho_grid = np.geomspace(1e-4, 1e-2, 7)
            curve = mass_radius_curve(eos, rho_grid, "newtonian", opts)
            rho = [c[0] for c in curve]
            mass = [c[1] for c in curve]
            radius = [c[2] for c in curve]
            assert loglog_slope(rho, radius) == pytest.approx((1.0 - n) / (2.0 * n), abs=1e-3)
            assert loglog_slope(rho, mass) == pytest.approx((3.0 - n) / (2.0 * n), abs=1e-3)
            expected_mr = (3.0 - n) / (1.0 - n)
            if n == 3.0:
                # mass is density-independent at n = 3; regression returns ~0
                assert abs(loglog_slope(radius, mass) - 0.0) < 1e-3
            else:
                assert loglog_slope(radius, mass) == pytest.approx(expected_mr, abs=1e-3)
        elapsed = time.perf_counter() - start
        assert elapsed < 30.0, f"took {elapsed:.2f} s"


def test_criterion_5_newtonian_causal_bound_sound_and_sharp():
    with criterion(5, "polytrope-relation causal cap on k: sound and sharp on a 1000-tuple grid"):
        start = time.perf_counter()
        tuples = [
            (n, m, r, s)
            for n in (0.5, 1.0, 1.5, 2.0, 2.5, 4.0, 5.0, 6.0)
            for m in np.geomspace(0.3, 3.0, 5)
            for r in np.geomspace(0.5, 5.0, 5)
            for s in np.geomspace(0.2, 2.0, 5)
        ]
        assert len(tuples) == 1000
        total_violations = 0
        for n, mass, radius, s in tuples:
            bound = newtonian_causal_k_bound(n, mass, radius, s)
            grid = [bound.value / 100.0, bound.value / 3.0, bound.value * 0.999]
            report = verify_bound_by_bruteforce(bound, grid)
            total_violations += report.violations
            assert report.skipped == 0
            # sharpness: just outside the cap the marginal star turns acausal
            rho_star = central_density_from_newtonian_relation(mass, radius, bound.value, n, s)
            eos = PolytropicEos(k=bound.value * 1.001, gamma=(n + 1.0) / n)
            assert not eos.is_causal_at_center(rho_star).causal
        elapsed = time.perf_counter() - start
        assert total_violations == 0
        assert elapsed < 10.0, f"took {elapsed:.2f} s"


def test_criterion_6_continuity_density_identity():
    with criterion(6, "monomial continuity density equals differenced mass law"):
        a_values = (0.3, 0.85, 2.0)
        b_values = (-1.2, 0.67, 1.78, 2.5)
        radii = np.geomspace(0.1, 10.0, 9)
        for a in a_values:
            for b in b_values:
                for radius in radii:
                    h = 1e-6 * radius
                    m_prime = (a * (radius + h) ** b - a * (radius - h) ** b) / (2.0 * h)
                    oracle = m_prime / (4.0 * math.pi * radius**2)
                    assert monomial_density(radius, a, b) == pytest.approx(oracle, rel=1e-7)


def test_criterion_7_radius_regime_classification():
    with criterion(7, "early/late main-sequence radius regimes at 120 solar masses"):
        m0 = 120.0
        early = density_bound_from_mass_derivative(MonomialRelation(0.85, 0.67), m0, 1.0, 3.0)
        early_radius = [b for b in early if b.quantity == "R0"]
        assert len(early_radius) == 1
        assert early_radius[0].note == "small-radius"
        late = density_bound_from_mass_derivative(MonomialRelation(0.85, 1.78), m0, 1.0, 3.0)
        late_radius = [b for b in late if b.quantity == "R0"]
        assert late_radius[0].note == "large-radius"


def test_criterion_8_causal_cap_values_and_bruteforce():
    with criterion(8, "monomial and rational causal caps: high-precision values, zero violations"):
        # monomial cap against 60-digit re-evaluation
        a, b, gamma, r0 = 0.85, 0.67, 3.0, 1.4
        mono = causal_k_bound_monomial(a, b, gamma, r0)
        with mpmath.workdps(60):
            beta = mpmath.mpf(repr(gamma)) * (mpmath.mpf(repr(b)) - 3)
            expected = float(
                1 / (
                    (mpmath.mpf(repr(a)) * mpmath.mpf(repr(b)) / (4 * mpmath.pi)) ** beta
                    * mpmath.mpf(repr(r0)) ** (beta - 1)
                )
            )
        assert abs(mono.value - expected) / expected < 1e-12

        # rational cap (quadratic-over-linear relation) against the same oracle
        relation = RationalRelation(p_terms=((1.0, 2.0), (1.0, 0.0)), q_terms=((1.0, 1.0),))
        rat = causal_k_bound_rational(relation, 5.0 / 3.0, 2.5, 1.9)
        with mpmath.workdps(60):
            rho0 = (mpmath.mpf(4) / 3) / (4 * mpmath.pi * mpmath.mpf("2.5") ** 2)
            g = mpmath.mpf(5) / 3
            expected_rat = float(1 / (g * rho0 ** (g - 1)))
        assert abs(rat.value - expected_rat) / expected_rat < 1e-12

        for bound, rel in ((mono, None), (rat, relation)):
            grid = np.geomspace(bound.value / 1e3, bound.value * 0.999, 1000)
            report = verify_bound_by_bruteforce(bound, grid, relation=rel)
            assert report.grid_size == 1000
            assert report.violations == 0


def test_criterion_9_catalog_fit_recovery():
    with criterion(9, "catalog fits: exact recovery and radius-rescaling covariance"):
        radii = [0.4, 1.0, 2.5, 7.0]
        records = [CatalogRecord(mass=0.85 * r**0.67, radius=r) for r in radii]
        fit = fit_monomial(records)
        assert fit.parameters["a"] == pytest.approx(0.85, rel=1e-8)
        assert fit.parameters["b"] == pytest.approx(0.67, rel=1e-8)

        scale = 3.0
        scaled = [CatalogRecord(mass=r.mass, radius=r.radius * scale) for r in records]
        refit = fit_monomial(scaled)
        assert refit.parameters["b"] == pytest.approx(fit.parameters["b"], rel=1e-12)
        assert refit.parameters["a"] == pytest.approx(
            fit.parameters["a"] * scale ** (-fit.parameters["b"]), rel=1e-12
        )

        masses = (0.5, 0.8, 1.5, 2.0, 3.0)
        rational_records = [CatalogRecord(mass=m, radius=(m * m + 1.0) / m) for m in masses]
        rational_fit = fit_rational(rational_records, [2.0, 0.0], [1.0])
        (c2, _), (c0, _) = rational_fit.parameters["p"]
        assert c2 == pytest.approx(1.0, rel=1e-8)
        assert c0 == pytest.approx(1.0, rel=1e-8)
        assert rational_fit.parameters["q"][0][0] == 1.0


def test_criterion_10_cli_pipeline_deterministic(tmp_path):
    with criterion(10, "solve -> bound -> verify pipeline, byte-identical across runs"):
        base = [sys.executable, "-m", "tovkit"]
        env = os.environ.copy()
        env["PYTHONPATH"] = str(SRC_DIR) + os.pathsep + env.get("PYTHONPATH", "")

        def pipeline():
            solve = subprocess.run(
                base + ["solve", "--k", "100", "--gamma", "2", "--rho-c", "5e-4",
                        "--rtol", "1e-8", "--out", str(tmp_path / "profile.csv")],
                capture_output=True, text=True, env=env,
            )
            assert solve.returncode == 0
            summary = json.loads(solve.stdout)
            args = [
                "--route", "newtonian-causal", "--n", "1",
                "--mass", repr(summary["mass"]),
                "--radius", repr(summary["radius"]),
                "--surface-combination", repr(summary["surface_combination"]),
                "--geometrized",
            ]
            bound = subprocess.run(base + ["bound"] + args, capture_output=True,
                                   text=True, env=env)
            assert bound.returncode == 0
            verify = subprocess.run(
                base + ["verify"] + args + ["--grid-points", "200"],
                capture_output=True, text=True, env=env,
            )
            assert verify.returncode == 0
            assert json.loads(verify.stdout)["violations"] == 0
            return solve.stdout + bound.stdout + verify.stdout

        assert pipeline() == pipeline()
