"""Mass-radius relation families and their local solvability.

Three concrete families are supported:

* monomial, M = a R^b;
* rational, R = p(M)/q(M) with p and q sums of real-exponent monomial
  terms;
* the Newtonian polytrope relation M = A R^2 with

      A = (4 pi / ((n+1) k))^{3/2} rho_c^{(n-3)/(2n)} * s,

  where s is the finite surface limit of |p'(R)| / (rho(R)/rho_c).

Each family also carries the density the mass-continuity equation
M'(R) = 4 pi R^2 rho induces on it, which is what the bound derivations
consume.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .eos import PolytropicEos
from .errors import (
    DomainError,
    FoldPointError,
    InversionError,
    SingularPointError,
)

# |q(M)| below this (relative to p) counts as a pole of p/q.
_SINGULAR_FRACTION = 1e-12
_INVERT_TOL = 1e-10
_INVERT_MAX_ITER = 100
_BRACKET_SCAN = 400
_FOLD_TOL = 1e-12


@dataclass(frozen=True)
class MonomialRelation:
    """M = a R^b with amplitude a > 0 and exponent b != 0."""

    a: float
    b: float

    def __post_init__(self) -> None:
        if not (self.a > 0.0 and math.isfinite(self.a)):
            raise DomainError(f"amplitude must be positive, got a={self.a}")
        if self.b == 0.0 or not math.isfinite(self.b):
            raise DomainError("exponent b = 0 is excluded")

    def mass(self, radius: float) -> float:
        if radius <= 0.0:
            raise DomainError(f"radius must be positive, got {radius}")
        return self.a * radius**self.b

    def density(self, radius: float) -> float:
        return monomial_density(radius, self.a, self.b)


@dataclass(frozen=True)
class RationalRelation:
    """R = p(M)/q(M); both sides are lists of (coefficient, exponent)."""

    p_terms: tuple[tuple[float, float], ...]
    q_terms: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        if not self.p_terms or not self.q_terms:
            raise DomainError("term lists must be nonempty")
        object.__setattr__(self, "p_terms", tuple((float(c), float(e)) for c, e in self.p_terms))
        object.__setattr__(self, "q_terms", tuple((float(c), float(e)) for c, e in self.q_terms))
        if all(c == 0.0 for c, _ in self.q_terms):
            raise DomainError("q must not be identically zero")

    def p_of(self, mass: float) -> float:
        return _eval_terms(self.p_terms, mass)

    def q_of(self, mass: float) -> float:
        return _eval_terms(self.q_terms, mass)

    def radius(self, mass: float) -> float:
        return rational_radius(mass, self)

    def drdm(self, mass: float) -> float:
        """d(p/q)/dM by the quotient rule on the monomial-term sums."""
        p = self.p_of(mass)
        q = self.q_of(mass)
        if abs(q) < _SINGULAR_FRACTION * (1.0 + abs(p)):
            raise SingularPointError(f"q(M) vanishes near M={mass}")
        dp = _eval_terms(_derivative(self.p_terms), mass)
        dq = _eval_terms(_derivative(self.q_terms), mass)
        return (dp * q - p * dq) / (q * q)


@dataclass(frozen=True)
class NewtonianPolytropeRelation:
    """M = A(k, n, rho_c, s) R^2 for a Newtonian polytrope."""

    k: float
    n: float
    rho_c: float
    surface_combination: float

    @property
    def coefficient(self) -> float:
        return newtonian_A(self.k, self.n, self.rho_c, self.surface_combination)

    def mass(self, radius: float) -> float:
        if radius <= 0.0:
            raise DomainError(f"radius must be positive, got {radius}")
        return self.coefficient * radius**2


def _eval_terms(terms: tuple[tuple[float, float], ...], mass: float) -> float:
    if mass <= 0.0:
        raise DomainError(f"mass must be positive, got {mass}")
    return sum(c * mass**e for c, e in terms)


def _derivative(terms: tuple[tuple[float, float], ...]) -> tuple[tuple[float, float], ...]:
    return tuple((c * e, e - 1.0) for c, e in terms if e != 0.0) or ((0.0, 0.0),)


def newtonian_A(k: float, n: float, rho_c: float, surface_combination: float) -> float:
    """Coefficient of the Newtonian polytrope relation M = A R^2.

    A = (4 pi / ((n+1) k))^{3/2} * rho_c^{(n-3)/(2n)} * surface_combination.
    Exact power laws: A scales as k^{-3/2} and rho_c^{(n-3)/(2n)}; at
    n = 3 the rho_c dependence drops out entirely.
    """
    for name, value in (("k", k), ("n", n), ("rho_c", rho_c),
                        ("surface_combination", surface_combination)):
        if not (value > 0.0 and math.isfinite(value)):
            raise DomainError(f"{name} must be positive, got {value}")
    return (4.0 * math.pi / ((n + 1.0) * k)) ** 1.5 * rho_c ** ((n - 3.0) / (2.0 * n)) * surface_combination


def solve_monomial_for_a(mass: float, radius: float, b: float) -> float:
    """Amplitude that puts (mass, radius) exactly on M = a R^b."""
    if radius <= 0.0:
        raise DomainError(f"radius must be positive, got {radius}")
    return mass / radius**b


def monomial_density(radius: float, a: float, b: float) -> float:
    """Density induced by mass continuity on M = a R^b.

    M'(R) = a b R^{b-1}, so rho = M'/(4 pi R^2) = a b R^{b-3} / (4 pi).
    """
    if radius <= 0.0:
        raise DomainError(f"radius must be positive, got {radius}")
    if a <= 0.0:
        raise DomainError(f"amplitude must be positive, got a={a}")
    return a * b * radius ** (b - 3.0) / (4.0 * math.pi)


def monomial_sound_speed_squared(radius: float, a: float, b: float, eos: PolytropicEos) -> float:
    """Squared sound speed at the continuity-equation density.

    This is eos.sound_speed_squared evaluated at monomial_density, i.e.
    k gamma (a b R^{b-3} / 4 pi)^{gamma - 1}.
    """
    rho = monomial_density(radius, a, b)
    if rho <= 0.0:
        raise DomainError(f"induced density must be positive, got {rho}")
    return eos.sound_speed_squared(rho)


def rational_radius(mass: float, relation: RationalRelation) -> float:
    """R = p(M)/q(M); raises SingularPointError at poles of the quotient."""
    p = relation.p_of(mass)
    q = relation.q_of(mass)
    if abs(q) < _SINGULAR_FRACTION * (1.0 + abs(p)):
        raise SingularPointError(f"q(M) vanishes near M={mass}")
    return p / q


def rational_invert_for_mass(radius: float, relation: RationalRelation, seed_mass: float) -> float:
    """Invert R = p(M)/q(M) for M on the branch containing the seed.

    Runs safeguarded Newton iteration on h(M) = p(M) - R q(M) inside a
    bracket found by scanning +/-50% around the seed; when several sign
    changes exist the one nearest the seed wins, which is what selects
    the branch.
    """
    if seed_mass <= 0.0:
        raise DomainError(f"seed mass must be positive, got {seed_mass}")

    def h(m: float) -> float:
        return relation.p_of(m) - radius * relation.q_of(m)

    def h_prime(m: float) -> float:
        return _eval_terms(_derivative(relation.p_terms), m) - radius * _eval_terms(
            _derivative(relation.q_terms), m
        )

    def converged(m: float) -> bool:
        # |R(m) - R| < tol * max(1, R), written as |h| < tol * max(1,R) * |q|
        # so a pole elsewhere in the bracket cannot blow up the test
        q = relation.q_of(m)
        return abs(q) > _SINGULAR_FRACTION * (1.0 + abs(relation.p_of(m))) and abs(
            h(m)
        ) < _INVERT_TOL * max(1.0, abs(radius)) * abs(q)

    # bracket scan, nearest sign change to the seed wins (branch selection)
    scan = [seed_mass * (0.5 + i / _BRACKET_SCAN) for i in range(_BRACKET_SCAN + 1)]
    values = [h(m) for m in scan]
    best: tuple[float, float] | None = None
    best_dist = math.inf
    for (m_lo, f_lo), (m_hi, f_hi) in zip(zip(scan, values), zip(scan[1:], values[1:])):
        if f_lo * f_hi <= 0.0:
            dist = min(abs(m_lo - seed_mass), abs(m_hi - seed_mass))
            if dist < best_dist:
                best, best_dist = (m_lo, m_hi), dist
    if best is None:
        raise InversionError(
            f"no sign change of p(M) - R q(M) within 50% of seed {seed_mass}"
        )
    lo, hi = best
    f_lo = h(lo)

    m = min(max(seed_mass, lo), hi)
    for _ in range(_INVERT_MAX_ITER):
        if converged(m):
            drdm = relation.drdm(m)
            if abs(drdm) < _FOLD_TOL * (1.0 + abs(radius / m)):
                raise FoldPointError(f"dR/dM vanishes at the solution M={m}")
            return m
        f = h(m)
        df = h_prime(m)
        step_ok = df != 0.0
        if step_ok:
            m_new = m - f / df
            step_ok = lo < m_new < hi
        if not step_ok:
            m_new = 0.5 * (lo + hi)  # bisection fallback keeps the bracket
        f_new = h(m_new)
        if (f_new < 0.0) == (f_lo < 0.0):
            lo, f_lo = m_new, f_new
        else:
            hi = m_new
        m = m_new
    raise InversionError(f"mass inversion did not converge near seed {seed_mass}")


def rational_density(radius: float, relation: RationalRelation, seed_mass: float) -> float:
    """Continuity-equation density on the rational family.

    Inverts R = p/q for M on the seed's branch, differentiates the local
    inverse (M' = 1/(dR/dM)) and returns M'/(4 pi R^2).
    """
    if radius <= 0.0:
        raise DomainError(f"radius must be positive, got {radius}")
    mass = rational_invert_for_mass(radius, relation, seed_mass)
    drdm = relation.drdm(mass)
    if abs(drdm) < _FOLD_TOL * (1.0 + abs(radius / mass)):
        raise FoldPointError(f"dR/dM vanishes at M={mass}; density undefined")
    m_prime = 1.0 / drdm
    return m_prime / (4.0 * math.pi * radius**2)


def monomial_to_text(relation: MonomialRelation) -> str:
    return f"{relation.a!r} {relation.b!r}\n"


def monomial_from_text(text: str) -> MonomialRelation:
    parts = text.split()
    if len(parts) != 2:
        raise DomainError(f"expected 'a b', got {text!r}")
    return MonomialRelation(a=float(parts[0]), b=float(parts[1]))


def rational_to_text(relation: RationalRelation) -> str:
    rows = [f"p,{c!r},{e!r}" for c, e in relation.p_terms]
    rows += [f"q,{c!r},{e!r}" for c, e in relation.q_terms]
    return "\n".join(rows) + "\n"


def rational_from_text(text: str) -> RationalRelation:
    p_terms: list[tuple[float, float]] = []
    q_terms: list[tuple[float, float]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = [f.strip() for f in line.split(",")]
        if len(fields) != 3 or fields[0] not in ("p", "q"):
            raise DomainError(f"line {lineno}: expected 'p|q,coef,exponent', got {raw!r}")
        try:
            coef, exp = float(fields[1]), float(fields[2])
        except ValueError:
            raise DomainError(f"line {lineno}: not numeric: {raw!r}") from None
        (p_terms if fields[0] == "p" else q_terms).append((coef, exp))
    return RationalRelation(p_terms=tuple(p_terms), q_terms=tuple(q_terms))
