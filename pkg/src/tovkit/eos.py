"""Polytropic equations of state and the central causality check.

The state function is p = k rho^gamma + k0 with polytropic constant k,
stiffness offset k0 and exponent gamma = (n+1)/n.  The squared sound
speed is dp/drho = k gamma rho^(gamma-1); a configuration is causal when
it stays below 1 (geometrized units, speed of light = 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, OutOfBranchError

_INVERSE_TOL = 1e-10


@dataclass(frozen=True)
class CausalityVerdict:
    """Outcome of the sound-speed check at one density."""

    causal: bool
    v2_max: float
    evaluation_density: float


@dataclass(frozen=True)
class PolytropicEos:
    """Polytrope p = k rho^gamma + k0.

    Parameters
    ----------
    k : float
        Polytropic constant, k > 0.
    gamma : float
        Polytrope exponent, gamma > 1.  The polytropic index n satisfies
        gamma = (n+1)/n, i.e. n = 1/(gamma-1).
    k0 : float
        Stiffness offset; shifts the zero-pressure point.
    """

    k: float
    gamma: float
    k0: float = 0.0

    def __post_init__(self) -> None:
        if not (self.k > 0.0 and math.isfinite(self.k)):
            raise DomainError(f"polytropic constant must be positive, got k={self.k}")
        if not (self.gamma > 1.0 and math.isfinite(self.gamma)):
            raise DomainError(f"polytrope exponent must exceed 1, got gamma={self.gamma}")
        if not math.isfinite(self.k0):
            raise DomainError("stiffness constant must be finite")

    @classmethod
    def from_index(cls, k: float, n: float, k0: float = 0.0) -> "PolytropicEos":
        """Build from the polytropic index n instead of gamma."""
        if not (n > 0.0 and math.isfinite(n)):
            raise DomainError(f"polytropic index must be positive and finite, got n={n}")
        return cls(k=k, gamma=(n + 1.0) / n, k0=k0)

    @property
    def n(self) -> float:
        """Polytropic index, gamma = (n+1)/n."""
        return 1.0 / (self.gamma - 1.0)

    def pressure(self, rho: float) -> float:
        """Pressure at density rho >= 0."""
        if rho < 0.0:
            raise DomainError(f"density must be nonnegative, got rho={rho}")
        return self.k * rho**self.gamma + self.k0

    def density_from_pressure(self, p: float) -> float:
        """Invert the state function for density; requires p >= k0."""
        if p < self.k0:
            raise OutOfBranchError(
                f"pressure {p} below stiffness offset {self.k0}: no nonnegative density"
            )
        return ((p - self.k0) / self.k) ** (1.0 / self.gamma)

    def sound_speed_squared(self, rho: float) -> float:
        """dp/drho = k gamma rho^(gamma-1) at density rho > 0.

        Independent of k0 exactly, since the offset drops out of the
        derivative.
        """
        if rho <= 0.0:
            raise DomainError(f"density must be positive, got rho={rho}")
        return self.k * self.gamma * rho ** (self.gamma - 1.0)

    def is_causal_at_center(self, rho_c: float) -> CausalityVerdict:
        """Check k gamma rho_c^(gamma-1) < 1 at the central density.

        The inequality is strict: a marginal configuration with v^2
        exactly 1 is classified as not causal.
        """
        v2 = self.sound_speed_squared(rho_c)
        return CausalityVerdict(causal=v2 < 1.0, v2_max=v2, evaluation_density=rho_c)


@dataclass(frozen=True)
class ConstantDensityEos:
    """Incompressible matter: rho(p) = rho0 for every pressure.

    An artificial branch used to exercise the structure integrator
    against the closed-form uniform-density interior solution.  It has
    no pressure(rho) map, so the central pressure must be supplied to
    the integrator explicitly.
    """

    rho0: float
    k0: float = 0.0

    def __post_init__(self) -> None:
        if not (self.rho0 > 0.0 and math.isfinite(self.rho0)):
            raise DomainError(f"density must be positive, got rho0={self.rho0}")

    def density_from_pressure(self, p: float) -> float:
        return self.rho0


def eos_to_text(eos: PolytropicEos) -> str:
    """Serialize to the plain key-value block the CLI consumes."""
    return f"k = {eos.k!r}\nk0 = {eos.k0!r}\ngamma = {eos.gamma!r}\n"


def eos_from_text(text: str) -> PolytropicEos:
    """Parse the key-value block written by :func:`eos_to_text`."""
    values: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DomainError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, rhs = line.partition("=")
        key = key.strip().lower()
        if key not in ("k", "k0", "gamma"):
            raise DomainError(f"line {lineno}: unknown key {key!r}")
        try:
            values[key] = float(rhs)
        except ValueError:
            raise DomainError(f"line {lineno}: not a number: {rhs.strip()!r}") from None
    missing = {"k", "gamma"} - values.keys()
    if missing:
        raise DomainError(f"missing keys: {sorted(missing)}")
    return PolytropicEos(k=values["k"], gamma=values["gamma"], k0=values.get("k0", 0.0))
