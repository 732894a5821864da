"""Batch parameter sweeps over (k, gamma, rho_c) grids.

Each grid cell integrates one star (relativistic or Newtonian), records
mass, radius and the central causality flag, and never aborts the sweep:
pathological cells (no finite radius, horizon approach, non-convergence)
are carried as statuses.  Cells are evaluated independently with no
shared caches, so results are deterministic and order-independent and
the sweep parallelizes trivially.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import product
from pathlib import Path
from typing import IO, Optional, Sequence, Union

import numpy as np

from .eos import PolytropicEos
from .errors import (
    DomainError,
    HorizonApproachError,
    NoFiniteRadiusError,
    NonConvergenceError,
)
from .structure import IntegrationOptions, integrate_tov, newtonian_star

STATUS_OK = "ok"
STATUS_HORIZON = "horizon-approach"
STATUS_NO_FINITE_RADIUS = "no-finite-radius"
STATUS_FAILED = "failed"


@dataclass(frozen=True)
class AxisSpec:
    """One scan axis: (lo, hi, count) plus linear or log spacing."""

    lo: float
    hi: float
    count: int
    spacing: str = "linear"

    def __post_init__(self) -> None:
        if self.count < 1:
            raise DomainError(f"axis count must be at least 1, got {self.count}")
        if not (math.isfinite(self.lo) and math.isfinite(self.hi) and self.lo <= self.hi):
            raise DomainError(f"axis needs lo <= hi, got [{self.lo}, {self.hi}]")
        if self.spacing not in ("linear", "log"):
            raise DomainError(f"spacing must be linear or log, got {self.spacing!r}")
        if self.spacing == "log" and self.lo <= 0.0:
            raise DomainError("log spacing requires lo > 0")

    def values(self) -> np.ndarray:
        if self.spacing == "log":
            return np.geomspace(self.lo, self.hi, self.count)
        return np.linspace(self.lo, self.hi, self.count)


@dataclass(frozen=True)
class ScanSpec:
    k: AxisSpec
    gamma: AxisSpec
    rho_c: AxisSpec
    mode: str = "tov"

    def __post_init__(self) -> None:
        if self.mode not in ("tov", "newtonian"):
            raise DomainError(f"mode must be tov or newtonian, got {self.mode!r}")
        if self.gamma.lo <= 1.0:
            raise DomainError("gamma axis must stay above 1")


@dataclass(frozen=True)
class ScanPoint:
    k: float
    gamma: float
    rho_c: float
    mass: float       # NaN unless status == ok
    radius: float     # NaN unless status == ok
    causal: bool
    status: str


def _evaluate_point(args: tuple[float, float, float, str, IntegrationOptions]) -> ScanPoint:
    k, gamma, rho_c, mode, opts = args
    eos = PolytropicEos(k=k, gamma=gamma)
    causal = eos.is_causal_at_center(rho_c).causal
    try:
        if mode == "tov":
            profile = integrate_tov(eos, rho_c, opts)
        else:
            profile = newtonian_star(eos, rho_c, opts)
    except NoFiniteRadiusError:
        return ScanPoint(k, gamma, rho_c, math.nan, math.nan, causal, STATUS_NO_FINITE_RADIUS)
    except HorizonApproachError:
        return ScanPoint(k, gamma, rho_c, math.nan, math.nan, causal, STATUS_HORIZON)
    except NonConvergenceError:
        return ScanPoint(k, gamma, rho_c, math.nan, math.nan, causal, STATUS_FAILED)
    return ScanPoint(k, gamma, rho_c, profile.total_mass, profile.surface_radius, causal, STATUS_OK)


def run_scan(
    spec: ScanSpec,
    opts: Optional[IntegrationOptions] = None,
    jobs: int = 1,
) -> list[ScanPoint]:
    """Evaluate every grid cell of the spec, k-major ordering.

    jobs > 1 spreads cells over a process pool; the result order and the
    per-cell numbers are identical to a serial run.
    """
    if opts is None:
        opts = IntegrationOptions()
    tasks = [
        (float(k), float(g), float(rho), spec.mode, opts)
        for k, g, rho in product(spec.k.values(), spec.gamma.values(), spec.rho_c.values())
    ]
    if not tasks:
        raise DomainError("scan grid is empty")
    if jobs <= 1 or len(tasks) == 1:
        return [_evaluate_point(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        chunk = max(1, len(tasks) // (4 * jobs))
        return list(pool.map(_evaluate_point, tasks, chunksize=chunk))


def mass_radius_curve(
    eos: PolytropicEos,
    rho_c_values: Sequence[float],
    mode: str = "tov",
    opts: Optional[IntegrationOptions] = None,
) -> list[tuple[float, float, float]]:
    """Sample (rho_c, M, R) along a central-density sweep of one EOS.

    Integration errors propagate per point (this is the overlay curve
    for comparing against relation models, not a sweep that tolerates
    failures).
    """
    if mode not in ("tov", "newtonian"):
        raise DomainError(f"mode must be tov or newtonian, got {mode!r}")
    if opts is None:
        opts = IntegrationOptions()
    curve = []
    for rho_c in rho_c_values:
        if mode == "tov":
            profile = integrate_tov(eos, float(rho_c), opts)
        else:
            profile = newtonian_star(eos, float(rho_c), opts)
        curve.append((float(rho_c), profile.total_mass, profile.surface_radius))
    return curve


_AXIS_KEYS = ("min", "max", "count", "spacing")


def parse_scan_config(text: str) -> ScanSpec:
    """Parse the plain ``key = value`` scan configuration format.

    Recognized keys: ``mode`` plus ``<axis>_min``, ``<axis>_max``,
    ``<axis>_count``, ``<axis>_spacing`` for axes k, gamma, rho_c.
    """
    entries: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DomainError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        entries[key.strip().lower()] = value.strip()

    def axis(name: str) -> AxisSpec:
        try:
            lo = float(entries[f"{name}_min"])
            hi = float(entries[f"{name}_max"])
            count = int(entries[f"{name}_count"])
        except KeyError as exc:
            raise DomainError(f"missing scan key {exc.args[0]!r}") from None
        except ValueError as exc:
            raise DomainError(f"bad scan value for axis {name}: {exc}") from None
        return AxisSpec(lo=lo, hi=hi, count=count,
                        spacing=entries.get(f"{name}_spacing", "linear"))

    return ScanSpec(
        k=axis("k"),
        gamma=axis("gamma"),
        rho_c=axis("rho_c"),
        mode=entries.get("mode", "tov"),
    )


def scan_points_to_csv(points: Sequence[ScanPoint], destination: Union[str, Path, IO[str]]) -> None:
    """One row per point: k,gamma,rho_c,mass,radius,causal,status."""
    def _write(stream: IO[str]) -> None:
        stream.write("k,gamma,rho_c,mass,radius,causal,status\n")
        for pt in points:
            stream.write(
                f"{pt.k:.17g},{pt.gamma:.17g},{pt.rho_c:.17g},"
                f"{pt.mass:.17g},{pt.radius:.17g},"
                f"{str(pt.causal).lower()},{pt.status}\n"
            )

    if isinstance(destination, (str, Path)):
        with open(destination, "w", encoding="ascii") as stream:
            _write(stream)
    else:
        _write(destination)


def scan_points_to_json(points: Sequence[ScanPoint]) -> str:
    """JSON array of point objects; NaN mass/radius become null."""
    def value_or_null(x: float):
        return x if math.isfinite(x) else None

    payload = [
        {
            "k": pt.k,
            "gamma": pt.gamma,
            "rho_c": pt.rho_c,
            "mass": value_or_null(pt.mass),
            "radius": value_or_null(pt.radius),
            "causal": pt.causal,
            "status": pt.status,
        }
        for pt in points
    ]
    return json.dumps(payload)
