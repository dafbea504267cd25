"""Pydantic request/response models for the HTTP service.

Lattices travel as the same JSON object the file format uses: exact entries
as "p/q" strings or integers, float entries as decimals.
"""

from __future__ import annotations

from fractions import Fraction

from pydantic import BaseModel, Field, field_validator

from ..lattices import Lattice, from_rows


class LatticeModel(BaseModel):
    n: int = Field(ge=1)
    basis: list[list[str | int | float]]

    @field_validator("basis")
    @classmethod
    def _square(cls, v, info):
        n = info.data.get("n")
        if n is not None and (len(v) != n or any(len(row) != n for row in v)):
            raise ValueError("basis must be n rows of n entries")
        return v

    def to_lattice(self) -> Lattice:
        rows = []
        exact = True
        for row in self.basis:
            parsed = []
            for cell in row:
                if isinstance(cell, float):
                    parsed.append(cell)
                    exact = False
                elif isinstance(cell, str) and ("." in cell or "e" in cell.lower()):
                    parsed.append(float(cell))
                    exact = False
                else:
                    parsed.append(Fraction(cell))
            rows.append(parsed)
        return from_rows(rows) if exact else Lattice(rows, exact=False)

    @classmethod
    def from_lattice(cls, lat: Lattice) -> "LatticeModel":
        if lat.exact:
            basis = [[str(x) if x.denominator != 1 else int(x) for x in row]
                     for row in lat.rows]
        else:
            basis = [[float(x) for x in row] for row in lat.basis_float]
        return cls(n=lat.n, basis=basis)


class ThetaRequest(BaseModel):
    lattice: LatticeModel
    order: int = Field(default=8, ge=0, le=64)
    rational: bool = False


class ThetaTerm(BaseModel):
    exponent: str      # exact rational exponent in q, e.g. "3/2"
    coefficient: str   # exact integer


class ThetaResponse(BaseModel):
    scale: int
    terms: list[ThetaTerm]
    rational_form: str | None = None


class SvpRequest(BaseModel):
    lattice: LatticeModel
    norm: str = "l1"
    report: bool = True


class SvpResponse(BaseModel):
    n: int
    lambda1: float
    lambda1_exact: str | None = None
    volume: float
    density: float
    kissing: int
    well_rounded: bool
    strongly_well_rounded: bool
    has_minimal_basis: bool


class BoundsRequest(BaseModel):
    lattice_b: LatticeModel
    lattice_e: LatticeModel
    gamma_db: list[float]
    check_identities: bool = False


class BoundsRow(BaseModel):
    gamma_db: float
    F_exact: float
    G_upper: float
    Pce_bound: float
    Peb_bound: float


class BoundsResponse(BaseModel):
    rows: list[BoundsRow]


class PackRequest(BaseModel):
    dim: int = Field(ge=1, le=6)
    coeff_cap: int = Field(default=2, ge=1)
    half_box: bool = False
    multistarts: int = Field(default=3, ge=1)
    count_target: int = Field(default=40, ge=1)
    seed: int = 0
    keep: int = Field(default=10, ge=1)
    threads: int = Field(default=1, ge=1)


class PackDiagnostics(BaseModel):
    well_rounded: bool
    kissing_lower_ok: bool
    kissing_upper_ok: bool
    halfnorm_pairs_ok: bool
    perturbation_stable: bool
    kissing: int
    halfnorm_pairs: int
    worst_perturbed_det_drop: float


class PackSolutionModel(BaseModel):
    basis: list[list[float]]
    determinant: float
    density: float
    lambda1: float
    kissing: int
    kkt_residual: float
    configuration: list[list[int]]
    diagnostics: PackDiagnostics


class PackResponse(BaseModel):
    dim: int
    solutions: list[PackSolutionModel]


class SimulateRequest(BaseModel):
    lattice_b: LatticeModel
    lattice_e: LatticeModel
    pam: int = Field(ge=2)
    snr_db: list[float]
    rounds: int = Field(default=100000, ge=1)
    seed: int = 0
    who: str = "eve"
    snr_definition: str = "gamma"
    threads: int = Field(default=1, ge=1)

    @field_validator("who")
    @classmethod
    def _who(cls, v):
        if v not in ("eve", "bob"):
            raise ValueError("who must be 'eve' or 'bob'")
        return v

    @field_validator("snr_definition")
    @classmethod
    def _snr_def(cls, v):
        if v not in ("gamma", "es_n0"):
            raise ValueError("snr_definition must be 'gamma' or 'es_n0'")
        return v


class SimulateResponse(BaseModel):
    who: str
    n_cosets: int
    snr_db: list[float]
    estimates: list[float]
    ci_halfwidths: list[float]
