"""Observation catalogs and least-squares fits of mass-radius relations.

Catalogs are CSV with a ``mass,radius[,label][,weight]`` header, masses
in solar masses and radii in solar radii.  Fitting is unit-agnostic: the
monomial model is fit in log-log space (where it is linear and the
radius-rescaling covariance b -> b, a -> a s^{-b} is exact), and the
rational model is linearized as p(M) - R q(M) = 0 with the leading q
coefficient pinned to one.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Sequence, Union

import numpy as np

from .errors import CatalogError, DomainError, UnderdeterminedError

MASS_FLOOR_MSUN = 0.1  # main-sequence hydrogen burning needs at least this


@dataclass(frozen=True)
class CatalogRecord:
    mass: float
    radius: float
    label: str | None = None
    weight: float = 1.0


@dataclass(frozen=True)
class FitResult:
    """Fitted relation parameters plus the fit-space residual scale."""

    model: str
    parameters: dict
    residual_rms: float
    n_points: int

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "parameters": dict(self.parameters),
            "residual_rms": self.residual_rms,
            "n_points": self.n_points,
        }


def load_catalog(
    source: Union[str, Path, IO[str]], mass_floor: float = MASS_FLOOR_MSUN
) -> list[CatalogRecord]:
    """Read and validate catalog records from CSV.

    Raises CatalogError naming the offending data row for malformed
    numbers, nonpositive radii or weights, and masses below the floor.
    """
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8", newline="") as stream:
            return load_catalog(stream, mass_floor=mass_floor)

    reader = csv.reader(source)
    try:
        header = next(reader)
    except StopIteration:
        raise CatalogError("empty catalog: missing header") from None
    columns = [c.strip().lower() for c in header]
    if columns[:2] != ["mass", "radius"] or not set(columns[2:]) <= {"label", "weight"}:
        raise CatalogError(
            f"header must be mass,radius[,label][,weight], got {','.join(columns)}"
        )

    records: list[CatalogRecord] = []
    for row_index, row in enumerate(reader, start=1):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(columns):
            raise CatalogError(f"row {row_index}: expected {len(columns)} fields, got {len(row)}")
        fields = dict(zip(columns, (cell.strip() for cell in row)))
        try:
            mass = float(fields["mass"])
            radius = float(fields["radius"])
            weight = float(fields["weight"]) if "weight" in fields and fields["weight"] else 1.0
        except ValueError as exc:
            raise CatalogError(f"row {row_index}: {exc}") from None
        if not math.isfinite(mass) or not math.isfinite(radius):
            raise CatalogError(f"row {row_index}: non-finite mass or radius")
        if mass < mass_floor:
            raise CatalogError(
                f"row {row_index}: mass {mass} below the {mass_floor} M_sun floor "
                "for main-sequence records"
            )
        if radius <= 0.0:
            raise CatalogError(f"row {row_index}: radius must be positive, got {radius}")
        if weight <= 0.0:
            raise CatalogError(f"row {row_index}: weight must be positive, got {weight}")
        label = fields.get("label") or None
        records.append(CatalogRecord(mass=mass, radius=radius, label=label, weight=weight))
    return records


def _weights(records: Sequence[CatalogRecord]) -> np.ndarray:
    return np.array([rec.weight for rec in records], dtype=float)


def fit_monomial(records: Sequence[CatalogRecord]) -> FitResult:
    """Weighted least-squares fit of log M = log a + b log R.

    Needs at least two records with distinct radii; exact on noiseless
    power-law data.
    """
    if any(rec.mass <= 0.0 or rec.radius <= 0.0 for rec in records):
        raise DomainError("monomial fitting needs positive masses and radii")
    radii = np.array([rec.radius for rec in records], dtype=float)
    if len(records) < 2 or np.unique(radii).size < 2:
        raise UnderdeterminedError("need at least two records with distinct radii")

    log_r = np.log(radii)
    log_m = np.log(np.array([rec.mass for rec in records], dtype=float))
    sqrt_w = np.sqrt(_weights(records))
    design = np.column_stack([np.ones_like(log_r), log_r]) * sqrt_w[:, None]
    target = log_m * sqrt_w
    coeffs, *_ = np.linalg.lstsq(design, target, rcond=None)
    log_a, b = float(coeffs[0]), float(coeffs[1])

    residuals = log_m - (log_a + b * log_r)
    rms = math.sqrt(float(np.sum(sqrt_w**2 * residuals**2) / np.sum(sqrt_w**2)))
    return FitResult(
        model="monomial",
        parameters={"a": math.exp(log_a), "b": b},
        residual_rms=rms,
        n_points=len(records),
    )


def fit_rational(
    records: Sequence[CatalogRecord],
    p_exponents: Sequence[float],
    q_exponents: Sequence[float],
) -> FitResult:
    """Linear fit of p(M) - R q(M) = 0 with fixed exponent lists.

    The leading q coefficient is pinned to 1, which both removes the
    overall-scale degeneracy and linearizes the problem; the remaining
    coefficients come from weighted least squares on
    sum_i a_i M^{b_i} - R sum_{j>0} c_j M^{d_j} = R M^{d_0}.
    """
    if not q_exponents:
        raise DomainError("q exponent list must be nonempty")
    if not p_exponents:
        raise DomainError("p exponent list must be nonempty")
    if any(rec.mass <= 0.0 for rec in records):
        raise DomainError("rational fitting needs positive masses")
    n_unknowns = len(p_exponents) + len(q_exponents) - 1
    if len(records) < n_unknowns:
        raise UnderdeterminedError(
            f"{n_unknowns} coefficients need at least {n_unknowns} records, got {len(records)}"
        )

    masses = np.array([rec.mass for rec in records], dtype=float)
    radii = np.array([rec.radius for rec in records], dtype=float)
    if not np.all(np.isfinite(radii)):
        raise DomainError("rational fitting needs finite radii")
    sqrt_w = np.sqrt(_weights(records))

    p_cols = [masses**e for e in p_exponents]
    q_cols = [-radii * masses**e for e in q_exponents[1:]]
    design = np.column_stack(p_cols + q_cols) * sqrt_w[:, None]
    target = radii * masses ** q_exponents[0] * sqrt_w

    coeffs, _, rank, _ = np.linalg.lstsq(design, target, rcond=None)
    if rank < n_unknowns:
        raise UnderdeterminedError(
            f"design matrix rank {rank} below the {n_unknowns} coefficients"
        )

    p_coeffs = [float(c) for c in coeffs[: len(p_exponents)]]
    q_coeffs = [1.0] + [float(c) for c in coeffs[len(p_exponents):]]

    p_vals = sum(c * masses**e for c, e in zip(p_coeffs, p_exponents))
    q_vals = sum(c * masses**e for c, e in zip(q_coeffs, q_exponents))
    residuals = p_vals - radii * q_vals
    rms = math.sqrt(float(np.sum(sqrt_w**2 * residuals**2) / np.sum(sqrt_w**2)))
    return FitResult(
        model="rational",
        parameters={
            "p": [(c, float(e)) for c, e in zip(p_coeffs, p_exponents)],
            "q": [(c, float(e)) for c, e in zip(q_coeffs, q_exponents)],
        },
        residual_rms=rms,
        n_points=len(records),
    )
