"""Bound propagation: mass/radius/causality caps turned into parameter bounds.

Each derivation takes observable-side constraints (a mass cap, a radius
cap, a cap on M', or the causal condition v^2 < 1) and emits the bound
they induce on a state-function or relation parameter:

* ``newtonian_causal_k_bound`` - for a Newtonian polytrope obeying
  M = A(k, n, rho_c) R^2, causality at the center caps the polytropic
  constant at (n/(n+1)) (R^4 beta / (n^3 M^2))^{1/n} with
  beta = 64 pi^3 s^2 (s the finite surface combination).  The cap is
  exactly the k at which the relation-consistent central density turns
  marginally causal.
* ``amplitude_bound_from_mass_radius`` - corner evaluation of a = M/R^b
  under M <= m, R <= r.
* ``density_bound_from_mass_derivative`` - M' <= M0 pushed through mass
  continuity to rho <= M0/(4 pi R0^2), plus the companion constraints it
  induces on gamma and on the admissible radius for the monomial family.
* ``causal_k_bound_monomial`` / ``causal_k_bound_rational`` - the causal
  condition composed with the continuity-equation density of each
  relation family.

``verify_bound_by_bruteforce`` replays a bound's own derivation route
pointwise over a parameter grid and counts disagreements, which is the
package's soundness/sharpness oracle for every route.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .eos import PolytropicEos
from .errors import DomainError, FoldPointError, SingularPointError
from .relations import MonomialRelation, RationalRelation, rational_density

ROUTES = (
    "newtonian-causal",
    "monomial-amplitude",
    "mass-derivative",
    "causal-monomial",
    "causal-rational",
)


@dataclass(frozen=True)
class BoundResult:
    """One derived scalar constraint on a named parameter."""

    quantity: str
    direction: str            # "upper" | "lower"
    value: float
    strict: bool
    route: str
    inputs: dict = field(default_factory=dict)
    note: Optional[str] = None

    def __post_init__(self) -> None:
        if self.direction not in ("upper", "lower"):
            raise DomainError(f"direction must be upper or lower, got {self.direction!r}")
        if self.route not in ROUTES:
            raise DomainError(f"unknown derivation route {self.route!r}")
        if not math.isfinite(self.value):
            raise DomainError(f"bound value must be finite, got {self.value}")

    def admits(self, candidate: float) -> bool:
        """Whether ``candidate`` strictly satisfies the bound."""
        if self.direction == "upper":
            return candidate < self.value
        return candidate > self.value

    def to_dict(self) -> dict:
        out = {
            "quantity": self.quantity,
            "direction": self.direction,
            "value": self.value,
            "strict": self.strict,
            "route": self.route,
            "inputs": dict(self.inputs),
        }
        if self.note is not None:
            out["note"] = self.note
        return out


@dataclass(frozen=True)
class VerificationReport:
    """Tally of a brute-force check of one bound over a grid."""

    grid_size: int
    violations: int
    worst_margin: float
    skipped: int = 0

    def to_dict(self) -> dict:
        return {
            "grid_size": self.grid_size,
            "violations": self.violations,
            "worst_margin": self.worst_margin,
            "skipped": self.skipped,
        }


def _require_positive(**values: float) -> None:
    for name, value in values.items():
        if not (value > 0.0 and math.isfinite(value)):
            raise DomainError(f"{name} must be positive and finite, got {value}")


def central_density_from_newtonian_relation(
    mass: float, radius: float, k: float, n: float, surface_combination: float
) -> float:
    """Isolate rho_c from M = A(k, n, rho_c) R^2.

    rho_c = [ (M / (R^2 s)) ((n+1) k / 4 pi)^{3/2} ]^{2n/(n-3)}.
    At n = 3 the coefficient A is rho_c-independent and the isolation is
    impossible.
    """
    _require_positive(mass=mass, radius=radius, k=k, n=n,
                      surface_combination=surface_combination)
    if n == 3.0:
        raise DomainError("at n=3 the relation coefficient does not depend on rho_c")
    base = (mass / (radius**2 * surface_combination)) * ((n + 1.0) * k / (4.0 * math.pi)) ** 1.5
    return base ** (2.0 * n / (n - 3.0))


def newtonian_causal_k_bound(
    n: float, mass: float, radius: float, surface_combination: float
) -> BoundResult:
    """Cap on k from central causality of the Newtonian polytrope relation.

    value = (n/(n+1)) * (R^4 beta / (n^3 M^2))^{1/n},
    beta  = 64 pi^3 * surface_combination^2.

    The value is the unique k at which the rho_c isolated from the
    relation makes k gamma rho_c^{gamma-1} equal 1; see
    ``verify_bound_by_bruteforce`` for the equivalence check.
    """
    _require_positive(n=n, mass=mass, radius=radius,
                      surface_combination=surface_combination)
    beta = 64.0 * math.pi**3 * surface_combination**2
    value = (n / (n + 1.0)) * (radius**4 * beta / (n**3 * mass**2)) ** (1.0 / n)
    return BoundResult(
        quantity="k",
        direction="upper",
        value=value,
        strict=True,
        route="newtonian-causal",
        inputs={"n": n, "mass": mass, "radius": radius,
                "surface_combination": surface_combination},
    )


def amplitude_bound_from_mass_radius(mass_max: float, radius_max: float, b: float) -> BoundResult:
    """Corner bound on the monomial amplitude under M <= m and R <= r.

    a = M/R^b is increasing in M, so M sits at the cap.  It is
    decreasing in R exactly when b > 0, in which case the corner value
    m/r^b is not a supremum over all R <= r (small radii push a up
    without limit) and the emitted bound is only binding for systems at
    R = r; the note records that caveat.
    """
    _require_positive(mass_max=mass_max, radius_max=radius_max)
    if b == 0.0:
        raise DomainError("exponent b = 0 is excluded")
    note = None
    if b > 0.0:
        note = ("a = M/R^b decreases in R for b > 0; corner value is binding "
                "for systems with R equal to the radius cap, not for all R below it")
    return BoundResult(
        quantity="a",
        direction="upper",
        value=mass_max / radius_max**b,
        strict=False,
        route="monomial-amplitude",
        inputs={"mass_max": mass_max, "radius_max": radius_max, "b": b},
        note=note,
    )


def radius_regime(b: float) -> str:
    """Qualitative radius classification from the monomial exponent.

    The admissible-radius constraint R0 <= (M0^{1/gamma}/(ab))^{1/(b-1)}
    changes character with the sign of b - 1: for b < 1 the exponent is
    negative and the family is confined to small radii; for b > 1 large
    radii are admitted.
    """
    if b == 1.0:
        raise DomainError("b = 1 leaves the radius unconstrained")
    return "small-radius" if b < 1.0 else "large-radius"


def _gamma_companion(relation: MonomialRelation, m0: float, r0: float) -> Optional[BoundResult]:
    """Bound on gamma from the constraint M0^{1/gamma} >= a b R0^{b-1}.

    The direction depends on the signs of ln(M0) and ln(a b R0^{b-1});
    vacuous combinations (every gamma > 0 satisfies the constraint)
    yield None.
    """
    x = relation.a * relation.b * r0 ** (relation.b - 1.0)
    inputs = {"a": relation.a, "b": relation.b, "m0": m0, "r0": r0}
    if x <= 0.0:
        return None  # right side nonpositive: constraint holds for every gamma
    log_m0 = math.log(m0)
    log_x = math.log(x)
    if log_x > 0.0 and log_m0 > 0.0:
        direction, value, note = "upper", log_m0 / log_x, None
    elif log_x < 0.0 and log_m0 < 0.0:
        direction, value, note = "lower", log_m0 / log_x, None
    elif log_x <= 0.0 and log_m0 >= 0.0:
        return None  # constraint satisfied by every gamma
    else:
        # ln M0 <= 0 < ln X: no positive gamma satisfies the constraint
        direction, value = "upper", 0.0
        note = "infeasible: M0^{1/gamma} < a b R0^{b-1} for every gamma > 0"
    return BoundResult(
        quantity="gamma",
        direction=direction,
        value=value,
        strict=False,
        route="mass-derivative",
        inputs=inputs,
        note=note,
    )


def _radius_companion(
    relation: MonomialRelation, m0: float, r0: float, gamma: float
) -> Optional[BoundResult]:
    """Admissible-radius form R0 <= (M0^{1/gamma}/(ab))^{1/(b-1)}.

    The b - 1 < 0 case flips the direction to a lower bound (the same
    inequality read for R0), which is the small-radius regime.
    """
    b = relation.b
    if b == 1.0:
        return None  # radius drops out of the constraint entirely
    base = m0 ** (1.0 / gamma) / (relation.a * b)
    if base <= 0.0:
        return None
    value = base ** (1.0 / (b - 1.0))
    regime = radius_regime(b)
    return BoundResult(
        quantity="R0",
        direction="upper" if b > 1.0 else "lower",
        value=value,
        strict=False,
        route="mass-derivative",
        inputs={"a": relation.a, "b": b, "m0": m0, "gamma": gamma},
        note=regime,
    )


def density_bound_from_mass_derivative(
    relation: MonomialRelation, m0: float, r0: float, gamma: float
) -> list[BoundResult]:
    """Bounds induced by M' <= M0 at radius R0 via mass continuity.

    Returns the primary density bound rho <= M0/(4 pi R0^2) first,
    followed by the companions the monomial family adds: the gamma
    constraint M0^{1/gamma} >= a b R0^{b-1} and the admissible
    radius it implies.  Companions that are vacuous for the given inputs
    are omitted.
    """
    _require_positive(m0=m0, r0=r0, gamma=gamma)
    primary = BoundResult(
        quantity="rho",
        direction="upper",
        value=m0 / (4.0 * math.pi * r0**2),
        strict=False,
        route="mass-derivative",
        inputs={"m0": m0, "r0": r0, "a": relation.a, "b": relation.b},
    )
    results = [primary]
    gamma_bound = _gamma_companion(relation, m0, r0)
    if gamma_bound is not None:
        results.append(gamma_bound)
    radius_bound = _radius_companion(relation, m0, r0, gamma)
    if radius_bound is not None:
        results.append(radius_bound)
    return results


def causal_k_bound_monomial(a: float, b: float, gamma: float, r0: float) -> BoundResult:
    """Causal cap on k for the monomial family.

    value = [ (a b / 4 pi)^beta R0^{beta-1} ]^{-1},  beta = gamma (b - 3).

    At b = 3 the density is radius-free and beta vanishes, collapsing
    the cap to R0.
    """
    _require_positive(a=a, r0=r0, gamma=gamma)
    if b == 0.0:
        raise DomainError("exponent b = 0 is excluded")
    if a * b <= 0.0:
        raise DomainError("a b must be positive for a positive induced density")
    beta = gamma * (b - 3.0)
    value = 1.0 / ((a * b / (4.0 * math.pi)) ** beta * r0 ** (beta - 1.0))
    if not math.isfinite(value):
        raise DomainError("bound overflowed for these parameters")
    return BoundResult(
        quantity="k",
        direction="upper",
        value=value,
        strict=True,
        route="causal-monomial",
        inputs={"a": a, "b": b, "gamma": gamma, "r0": r0, "beta": beta},
    )


def causal_k_bound_rational(
    relation: RationalRelation, gamma: float, r0: float, seed_mass: float
) -> BoundResult:
    """Causal cap on k for the rational family: k < 1/(gamma rho0^{gamma-1}).

    rho0 is the continuity-equation density of the relation at R0 on the
    branch selected by seed_mass.  gamma = 1 is degenerate: the cap is 1
    regardless of the density.
    """
    _require_positive(gamma=gamma, r0=r0)
    rho0 = rational_density(r0, relation, seed_mass)
    if rho0 <= 0.0:
        raise DomainError(f"induced density must be positive, got {rho0}")
    value = 1.0 / (gamma * rho0 ** (gamma - 1.0))
    return BoundResult(
        quantity="k",
        direction="upper",
        value=value,
        strict=True,
        route="causal-rational",
        inputs={"gamma": gamma, "r0": r0, "seed_mass": seed_mass, "rho0": rho0},
    )


def _direct_check(bound: BoundResult, relation) -> Optional[callable]:
    """Build the per-point direct check for a bound's derivation route.

    The check maps a candidate parameter value to a margin: <= 0 passes,
    > 0 is the amount by which the direct condition fails.  Returns None
    when the check is undefined for these inputs (the n = 3 degeneracy,
    a fold/pole of the rational relation at r0), in which case every
    grid point is skipped.  A missing relation for the rational route is
    a precondition violation, not an undefined check.
    """
    ins = bound.inputs
    if bound.route == "newtonian-causal":
        n = ins["n"]
        if n == 3.0:
            return None  # rho_c cannot be recovered from the relation at n=3
        # the marginal star: central density consistent with the relation at
        # the bound value itself; causality of a candidate k is then checked
        # against that fixed configuration
        rho_star = central_density_from_newtonian_relation(
            ins["mass"], ins["radius"], bound.value, n, ins["surface_combination"]
        )
        gamma = (n + 1.0) / n

        def check(k: float) -> float:
            verdict = PolytropicEos(k=k, gamma=gamma).is_causal_at_center(rho_star)
            return verdict.v2_max - 1.0

        return check
    if bound.route == "causal-monomial":
        a, b, gamma, r0, beta = (ins[key] for key in ("a", "b", "gamma", "r0", "beta"))
        coeff = (a * b / (4.0 * math.pi)) ** beta * r0 ** (beta - 1.0)

        # the route's own speed expression, i.e. exactly what this cap
        # inverts; the package's dp/drho-consistent speed lives in
        # relations.monomial_sound_speed_squared and caps k differently
        def check(k: float) -> float:
            return k * coeff - 1.0

        return check
    if bound.route == "causal-rational":
        if relation is None:
            raise DomainError("verifying a causal-rational bound needs the relation")
        gamma = ins["gamma"]
        try:
            rho0 = rational_density(ins["r0"], relation, ins["seed_mass"])
        except (FoldPointError, SingularPointError):
            return None
        if rho0 <= 0.0:
            return None

        def check(k: float) -> float:
            return k * gamma * rho0 ** (gamma - 1.0) - 1.0

        return check
    if bound.route == "monomial-amplitude":
        mass_max, radius_max, b = ins["mass_max"], ins["radius_max"], ins["b"]

        def check(a: float) -> float:
            return a * radius_max**b - mass_max

        return check
    # mass-derivative: primary density bound and both companions
    if bound.quantity == "rho":
        m0, r0 = ins["m0"], ins["r0"]

        def check(rho: float) -> float:
            return 4.0 * math.pi * r0**2 * rho - m0

        return check
    if bound.quantity == "gamma":
        a, b, m0, r0 = ins["a"], ins["b"], ins["m0"], ins["r0"]

        def check(gamma: float) -> float:
            return a * b * r0 ** (b - 1.0) - m0 ** (1.0 / gamma)

        return check
    if bound.quantity == "R0":
        a, b, m0, gamma = ins["a"], ins["b"], ins["m0"], ins["gamma"]

        def check(r0: float) -> float:
            return a * b * r0 ** (b - 1.0) - m0 ** (1.0 / gamma)

        return check
    raise DomainError(f"no direct check for route {bound.route!r} / {bound.quantity!r}")


def verify_bound_by_bruteforce(
    bound: BoundResult,
    grid: Sequence[float],
    relation: Optional[RationalRelation] = None,
) -> VerificationReport:
    """Replay a bound's derivation route over a grid of candidate values.

    Every grid point strictly inside the bound region is run through the
    route's direct check (central causality for the causal routes, the
    capped observable for the mass/radius/derivative routes); points
    that fail it count as violations and the largest failure margin is
    reported.  Points outside the bound region, and points where the
    direct check is undefined (e.g. the n = 3 degeneracy), are counted
    as skipped.
    """
    points = [float(g) for g in grid]
    if not points:
        raise DomainError("verification grid must be nonempty")

    check = _direct_check(bound, relation)
    if check is None:
        return VerificationReport(
            grid_size=len(points), violations=0, worst_margin=0.0,
            skipped=len(points),
        )

    violations = 0
    skipped = 0
    worst = 0.0
    for candidate in points:
        if not bound.admits(candidate):
            skipped += 1
            continue
        margin = check(candidate)
        if margin > 0.0:
            violations += 1
            worst = max(worst, margin)
    return VerificationReport(
        grid_size=len(points), violations=violations, worst_margin=worst,
        skipped=skipped,
    )
