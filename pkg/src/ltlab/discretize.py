"""Potentials, grids and dense operator matrices.

Domain is the box [-L, L]^d.  Dirichlet grids use the n interior nodes
x_k = -L + (k+1) h per axis with h = 2L/(n+1); periodic grids use
x_k = -L + k h with h = 2L/n.  Multi-dimensional lattices are ordered
row-major (C order) over the axes, so CSV dumps are reproducible
bit-for-bit.

The kinetic part of every operator matrix is real symmetric by
construction and the potential enters as a diagonal, which makes Hermitian
part extraction exact rather than approximate.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

DEFAULT_DIMENSION_CAP = 5000


class GridError(ValueError):
    pass


class PotentialFormatError(ValueError):
    pass


@dataclass(frozen=True)
class GridSpec:
    dim: int
    half_length: float
    points_per_dim: int
    boundary: str = "dirichlet"
    dimension_cap: int = DEFAULT_DIMENSION_CAP

    def __post_init__(self) -> None:
        if self.dim not in (1, 2, 3):
            raise GridError(f"dim must be 1, 2 or 3, got {self.dim}")
        if not self.half_length > 0:
            raise GridError(f"half_length must be positive, got {self.half_length}")
        if self.points_per_dim < 2:
            raise GridError(f"need at least 2 points per axis, got {self.points_per_dim}")
        if self.boundary not in ("dirichlet", "periodic"):
            raise GridError(f"boundary must be 'dirichlet' or 'periodic', got {self.boundary!r}")
        if self.total_dim > self.dimension_cap:
            raise GridError(
                f"matrix dimension {self.total_dim} exceeds cap {self.dimension_cap}; "
                "raise dimension_cap explicitly if the dense solve cost is acceptable"
            )

    @property
    def mesh(self) -> float:
        n = self.points_per_dim
        if self.boundary == "dirichlet":
            return 2.0 * self.half_length / (n + 1)
        return 2.0 * self.half_length / n

    @property
    def total_dim(self) -> int:
        return self.points_per_dim ** self.dim

    def axis_nodes(self) -> np.ndarray:
        n, h, L = self.points_per_dim, self.mesh, self.half_length
        if self.boundary == "dirichlet":
            return -L + h * np.arange(1, n + 1)
        return -L + h * np.arange(n)

    def nodes(self) -> np.ndarray:
        """All lattice nodes, shape (N, dim), row-major over the axes."""
        axes = [self.axis_nodes()] * self.dim
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel(order="C") for m in mesh], axis=1)

    def enlarged(self, factor: float) -> "GridSpec":
        """Larger box at (nearly) fixed mesh: scale half_length and the
        per-axis point count together."""
        n = self.points_per_dim
        if self.boundary == "dirichlet":
            new_n = int(round(factor * (n + 1))) - 1
        else:
            new_n = int(round(factor * n))
        return GridSpec(
            dim=self.dim,
            half_length=factor * self.half_length,
            points_per_dim=new_n,
            boundary=self.boundary,
            dimension_cap=max(self.dimension_cap, new_n ** self.dim),
        )

    def to_json_dict(self) -> dict:
        return {
            "dim": self.dim,
            "half_length": self.half_length,
            "points_per_dim": self.points_per_dim,
            "boundary": self.boundary,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "GridSpec":
        try:
            return cls(
                dim=int(data["dim"]),
                half_length=float(data["half_length"]),
                points_per_dim=int(data["points_per_dim"]),
                boundary=str(data.get("boundary", "dirichlet")).lower(),
                dimension_cap=int(data.get("dimension_cap", DEFAULT_DIMENSION_CAP)),
            )
        except KeyError as exc:
            raise GridError(f"grid JSON missing field {exc}") from exc


@dataclass(frozen=True)
class PotentialTerm:
    """One additive term of an analytic potential.

    gaussian: amp * exp(-sum_i (x_i-c_i)^2 / (2 w_i^2))
    box:      amp * indicator(|x_i - c_i| <= a_i for all i)
    sampled:  tabulated values on the target grid (length must match)
    """

    kind: str
    amplitude: complex = 0j
    center: tuple[float, ...] = ()
    width: tuple[float, ...] = ()
    values: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        if self.kind not in ("gaussian", "box", "sampled"):
            raise PotentialFormatError(f"unknown term kind {self.kind!r}")
        if self.kind != "sampled" and any(w <= 0 for w in self.width):
            raise PotentialFormatError(f"widths must be positive, got {self.width}")


@dataclass(frozen=True)
class PotentialSpec:
    dim: int
    terms: tuple[PotentialTerm, ...] = ()

    def to_json_dict(self) -> dict:
        out: list[dict] = []
        for t in self.terms:
            entry: dict = {"kind": t.kind, "amp": [t.amplitude.real, t.amplitude.imag]}
            if t.kind == "gaussian":
                entry["center"] = list(t.center)
                entry["width"] = list(t.width)
            elif t.kind == "box":
                entry["center"] = list(t.center)
                entry["half_width"] = list(t.width)
            else:
                entry["values"] = [[v.real, v.imag] for v in np.asarray(t.values)]
            out.append(entry)
        return {"dim": self.dim, "terms": out}

    @classmethod
    def from_json_dict(cls, data: dict, base_dir: Optional[Path] = None) -> "PotentialSpec":
        try:
            dim = int(data["dim"])
            terms = []
            for raw in data.get("terms", []):
                kind = str(raw["kind"]).lower()
                amp = complex(*raw["amp"]) if "amp" in raw else 0j
                if kind == "sampled":
                    if "path" in raw:
                        path = Path(raw["path"])
                        if base_dir is not None and not path.is_absolute():
                            path = base_dir / path
                        values = load_sampled_csv(path)
                    else:
                        values = np.array([complex(re, im) for re, im in raw["values"]])
                    terms.append(PotentialTerm(kind="sampled", values=values))
                    continue
                center = tuple(float(c) for c in raw.get("center", (0.0,) * dim))
                width_key = "width" if kind == "gaussian" else "half_width"
                width = raw[width_key]
                if np.isscalar(width):
                    width = (float(width),) * dim
                else:
                    width = tuple(float(w) for w in width)
                terms.append(PotentialTerm(kind=kind, amplitude=amp, center=center, width=width))
            return cls(dim=dim, terms=tuple(terms))
        except (KeyError, TypeError) as exc:
            raise PotentialFormatError(f"bad potential JSON: {exc}") from exc


def load_sampled_csv(path: str | Path) -> np.ndarray:
    """Sampled-potential file: CSV rows `index,re,im`."""
    rows: list[tuple[int, complex]] = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or row[0].startswith("#") or row[0] == "index":
                continue
            if len(row) != 3:
                raise PotentialFormatError(f"{path}:{lineno}: expected index,re,im")
            rows.append((int(row[0]), complex(float(row[1]), float(row[2]))))
    rows.sort()
    if [i for i, _ in rows] != list(range(len(rows))):
        raise PotentialFormatError(f"{path}: indices must be 0..N-1 without gaps")
    return np.array([v for _, v in rows], dtype=complex)


@dataclass(frozen=True)
class SampledPotential:
    grid: GridSpec
    values: np.ndarray  # complex, shape (N,), row-major lattice order

    def __post_init__(self) -> None:
        if self.values.shape != (self.grid.total_dim,):
            raise PotentialFormatError(
                f"sampled values have length {self.values.shape}, grid needs {self.grid.total_dim}"
            )

    def conjugated(self) -> "SampledPotential":
        return SampledPotential(self.grid, np.conj(self.values))

    @property
    def scale(self) -> float:
        return float(np.max(np.abs(self.values))) if self.values.size else 0.0


def sample_potential(spec: PotentialSpec, grid: GridSpec) -> SampledPotential:
    if spec.dim != grid.dim:
        raise PotentialFormatError(
            f"potential dim {spec.dim} does not match grid dim {grid.dim}"
        )
    nodes = grid.nodes()
    values = np.zeros(grid.total_dim, dtype=complex)
    for term in spec.terms:
        if term.kind == "sampled":
            vals = np.asarray(term.values, dtype=complex)
            if vals.shape != (grid.total_dim,):
                raise PotentialFormatError(
                    f"sampled term has {vals.shape[0]} values, grid needs {grid.total_dim}"
                )
            values += vals
        elif term.kind == "gaussian":
            d2 = np.zeros(grid.total_dim)
            for i in range(grid.dim):
                d2 += (nodes[:, i] - term.center[i]) ** 2 / (2.0 * term.width[i] ** 2)
            values += term.amplitude * np.exp(-d2)
        else:  # box
            inside = np.ones(grid.total_dim, dtype=bool)
            for i in range(grid.dim):
                inside &= np.abs(nodes[:, i] - term.center[i]) <= term.width[i]
            values += term.amplitude * inside
    return SampledPotential(grid, values)


def potential_integral(v: SampledPotential, p: float, part: str) -> float:
    """h^d-weighted lattice sum of an integrand power.

    part: 'abs'     -> |V|^p
          'reneg'   -> ((Re V)_-)^p
          'refined' -> (((Re V)_- + |Im V|) / sqrt(2))^p
    """
    if not p > 0:
        raise ValueError(f"exponent must be positive, got {p}")
    vals = v.values
    if part == "abs":
        integrand = np.abs(vals)
    elif part == "reneg":
        integrand = np.maximum(0.0, -vals.real)
    elif part == "refined":
        integrand = (np.maximum(0.0, -vals.real) + np.abs(vals.imag)) / np.sqrt(2.0)
    else:
        raise ValueError(f"unknown integrand part {part!r}")
    weight = v.grid.mesh ** v.grid.dim
    return float(weight * np.sum(integrand ** p))


def _dirichlet_1d_kinetic(n: int, h: float) -> np.ndarray:
    k = (2.0 / h**2) * np.eye(n)
    off = (-1.0 / h**2) * np.eye(n, k=1)
    return k + off + off.T


def _relativistic_1d_kinetic(n: int, half_length: float) -> np.ndarray:
    """|p| on the periodic grid via the unitary DFT: K = F* diag(|k_m|) F
    with k_m = pi m / L, m = -n/2 .. n/2 - 1.  Real symmetric because the
    multiplier is even in m (the unpaired m = -n/2 mode contributes a real
    alternating-sign rank pattern)."""
    if n % 2 != 0:
        raise GridError("relativistic kinetic needs an even point count")
    j = np.arange(n)
    F = np.exp(-2j * np.pi * np.outer(j, j) / n) / np.sqrt(n)
    m = np.concatenate([np.arange(0, n // 2), np.arange(-n // 2, 0)])
    mags = np.abs(np.pi * m / half_length)
    K = F.conj().T @ (mags[:, None] * F)
    K = K.real  # imaginary part is zero up to rounding
    return 0.5 * (K + K.T)


@dataclass(frozen=True)
class OperatorMatrix:
    grid: GridSpec
    kinetic_kind: str  # 'laplacian' | 'relativistic'
    kinetic: np.ndarray  # real symmetric (N, N)
    potential: np.ndarray  # complex diagonal values (N,)

    @property
    def dimension(self) -> int:
        return self.kinetic.shape[0]

    @property
    def matrix(self) -> np.ndarray:
        return self.kinetic + np.diag(self.potential)

    @property
    def is_real(self) -> bool:
        return bool(np.all(self.potential.imag == 0.0))

    def conjugated(self) -> "OperatorMatrix":
        return OperatorMatrix(self.grid, self.kinetic_kind, self.kinetic, np.conj(self.potential))

    def shifted(self, t: float) -> "OperatorMatrix":
        """Operator with constant t added to the potential (spectrum shifts by t)."""
        return OperatorMatrix(self.grid, self.kinetic_kind, self.kinetic, self.potential + t)


def build_operator(
    grid: GridSpec, v: SampledPotential, kinetic: str = "laplacian"
) -> OperatorMatrix:
    if v.grid != grid:
        raise GridError("potential was sampled on a different grid")
    if kinetic == "laplacian":
        if grid.boundary != "dirichlet":
            raise GridError("laplacian kinetic requires a dirichlet grid")
        n, h = grid.points_per_dim, grid.mesh
        t1 = _dirichlet_1d_kinetic(n, h)
        eyes = [np.eye(n) for _ in range(grid.dim)]
        K = np.zeros((grid.total_dim, grid.total_dim))
        for axis in range(grid.dim):
            factors = list(eyes)
            factors[axis] = t1
            term = factors[0]
            for f in factors[1:]:
                term = np.kron(term, f)
            K += term
    elif kinetic == "relativistic":
        if grid.dim != 1 or grid.boundary != "periodic":
            raise GridError("relativistic kinetic requires dim=1 on a periodic grid")
        K = _relativistic_1d_kinetic(grid.points_per_dim, grid.half_length)
    else:
        raise GridError(f"unknown kinetic kind {kinetic!r}")
    return OperatorMatrix(grid=grid, kinetic_kind=kinetic, kinetic=K, potential=v.values.copy())


def hermitian_combination(m: OperatorMatrix, alpha: float) -> np.ndarray:
    """K + diag(Re V + alpha Im V); exactly the tilted Hermitian part
    (M+M*)/2 + alpha (M-M*)/(2i) because K is real symmetric and V diagonal."""
    return m.kinetic + np.diag(m.potential.real + alpha * m.potential.imag)


def load_grid_json(path: str | Path) -> GridSpec:
    with open(path, "r", encoding="utf-8") as fh:
        return GridSpec.from_json_dict(json.load(fh))


def load_potential_json(path: str | Path) -> PotentialSpec:
    path = Path(path)
    with open(path, "r", encoding="utf-8") as fh:
        return PotentialSpec.from_json_dict(json.load(fh), base_dir=path.parent)
