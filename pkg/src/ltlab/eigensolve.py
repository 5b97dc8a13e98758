"""Dense spectra and physical-eigenvalue filtering.

The general solver is LAPACK's balanced Hessenberg + shifted-QR path
(via numpy); the Hermitian solver is symmetric tridiagonalization.  Every
general solve is trace-checked.  Filtering separates genuine discrete
eigenvalues of the truncated problem from box-discretized continuum
states by distance to [0, inf), eigenvector boundary mass, and optional
box-enlargement stability.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .discretize import GridSpec, OperatorMatrix


class SolverError(RuntimeError):
    pass


class ContractViolation(ValueError):
    pass


@dataclass(frozen=True)
class ComplexSpectrum:
    values: np.ndarray  # complex (N,)
    residual_bound: float
    vectors: Optional[np.ndarray] = None  # columns, aligned with values

    @property
    def scale(self) -> float:
        return float(np.max(np.abs(self.values))) if self.values.size else 0.0

    def conjugated_values(self) -> np.ndarray:
        return np.conj(self.values)


@dataclass(frozen=True)
class FilterPolicy:
    """Defaults: tau is derived per spectrum (see filter_spectrum);
    boundary-mass filtering on at 1%; stability re-solve off (costly)."""

    tau: Optional[float] = None
    boundary_fraction_max: Optional[float] = 0.01
    stability_check: bool = False
    stability_rel_tol: float = 0.05
    # lattice kinetic spectra are bounded above; localized states pinned
    # near the band top are discretization artifacts with no continuum
    # counterpart and are rejected above this fraction of the band top
    band_fraction_max: Optional[float] = 0.5


@dataclass(frozen=True)
class RejectedEigenvalue:
    value: complex
    reason: str  # 'near_half_line' | 'band_edge' | 'delocalized' | 'unstable'


@dataclass(frozen=True)
class FilteredSpectrum:
    kept: np.ndarray  # complex
    rejected: tuple[RejectedEigenvalue, ...]
    policy: FilterPolicy
    tau_used: float

    @property
    def all_values(self) -> np.ndarray:
        rej = np.array([r.value for r in self.rejected], dtype=complex)
        return np.concatenate([self.kept, rej])


def eigenvalues_dense(m: np.ndarray, want_vectors: bool = False) -> ComplexSpectrum:
    """All eigenvalues of a dense complex matrix, trace-checked."""
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise ContractViolation(f"need a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ContractViolation("matrix entries must be finite")
    scale = float(np.linalg.norm(m, "fro"))
    try:
        if want_vectors:
            values, vectors = np.linalg.eig(m)
        else:
            values = np.linalg.eigvals(m)
            vectors = None
    except np.linalg.LinAlgError as exc:
        raise SolverError(f"dense eigensolve failed to converge: {exc}") from exc
    n = m.shape[0]
    eps = np.finfo(float).eps
    residual_bound = 10.0 * n * eps * scale
    trace_err = abs(np.sum(values) - np.trace(m))
    if trace_err > 1e-9 * max(scale * np.sqrt(n), 1e-300):
        raise SolverError(
            f"trace check failed: |sum(eig) - tr| = {trace_err:.3e} at scale {scale:.3e}"
        )
    return ComplexSpectrum(values=values, residual_bound=residual_bound, vectors=vectors)


def hermitian_eigenvalues(h: np.ndarray) -> np.ndarray:
    """Ascending eigenvalues of a real symmetric matrix; asymmetry beyond
    1e-12 * scale is a contract violation."""
    h = np.asarray(h)
    if np.iscomplexobj(h):
        if np.max(np.abs(h.imag)) != 0.0:
            raise ContractViolation("hermitian solver got a matrix with imaginary entries")
        h = h.real
    scale = max(float(np.max(np.abs(h))), 1e-300)
    asym = float(np.max(np.abs(h - h.T)))
    if asym > 1e-12 * scale:
        raise ContractViolation(f"matrix asymmetry {asym:.3e} exceeds 1e-12 * scale")
    return np.linalg.eigvalsh(0.5 * (h + h.T))


def dist_half_line(values: np.ndarray) -> np.ndarray:
    """Distance from each complex value to the half-line [0, inf)."""
    values = np.atleast_1d(np.asarray(values, dtype=complex))
    return np.where(values.real >= 0.0, np.abs(values.imag), np.abs(values))


def riesz_mean_neg(values: Sequence[float] | np.ndarray, gamma: float) -> float:
    """Power sum of negative parts, sum (v)_-^gamma; gamma = 0 counts
    strictly negative entries."""
    if gamma < 0:
        raise ValueError(f"gamma must be nonnegative, got {gamma}")
    neg = np.maximum(0.0, -np.asarray(values, dtype=float))
    if gamma == 0.0:
        return float(np.count_nonzero(neg > 0.0))
    return float(np.sum(neg[neg > 0.0] ** gamma))


def pair_greedy(a: np.ndarray, b: np.ndarray) -> float:
    """Greedy nearest-neighbor matching of two equal-length complex
    multisets; returns the largest matched distance.  Ties break by index
    order, adequate when tolerances sit far below spectral gaps."""
    a = np.asarray(a, dtype=complex)
    b = list(np.asarray(b, dtype=complex))
    if len(a) != len(b):
        raise ValueError("multisets must have equal size")
    worst = 0.0
    for x in a:
        dists = [abs(x - y) for y in b]
        j = int(np.argmin(dists))
        worst = max(worst, dists[j])
        b.pop(j)
    return worst


def _boundary_mass_fraction(vec: np.ndarray, grid: GridSpec) -> float:
    nodes = grid.nodes()
    shell = np.any(np.abs(nodes) >= 0.9 * grid.half_length, axis=1)
    total = float(np.sum(np.abs(vec) ** 2))
    if total == 0.0:
        return 1.0
    return float(np.sum(np.abs(vec[shell]) ** 2)) / total


def default_tau(spectrum: ComplexSpectrum, potential_scale: float) -> float:
    """Half-line rejection threshold: well above the solver's backward
    error, and a small fraction of the potential's amplitude scale (the
    scale genuine discrete eigenvalues live on; continuum artifacts drift
    off [0, inf) by at most discretization-error amounts)."""
    return max(10.0 * spectrum.residual_bound, 1e-3 * max(potential_scale, 1.0))


def filter_spectrum(
    spectrum: ComplexSpectrum,
    grid: GridSpec,
    policy: FilterPolicy = FilterPolicy(),
    rebuild: Optional[Callable[[float], OperatorMatrix]] = None,
    potential_scale: Optional[float] = None,
    band_top: Optional[float] = None,
) -> FilteredSpectrum:
    """Split a spectrum into discrete-eigenvalue candidates and
    continuum-artifact rejects.

    Rejection reasons, applied in order: 'near_half_line' for
    dist(lambda, [0,inf)) <= tau; 'delocalized' for eigenvector mass in
    the outer 10% of the box above policy.boundary_fraction_max;
    'unstable' for eigenvalues moving more than stability_rel_tol
    (relatively) when the box is enlarged by 1.25 at fixed mesh.
    """
    values = spectrum.values
    if policy.tau is not None:
        tau = policy.tau
    else:
        if potential_scale is None:
            potential_scale = spectrum.scale
        tau = default_tau(spectrum, potential_scale)

    rejected: list[RejectedEigenvalue] = []
    candidates: list[int] = []
    dists = dist_half_line(values)
    band_cut = None
    if policy.band_fraction_max is not None and band_top is not None:
        band_cut = policy.band_fraction_max * band_top
    for i, lam in enumerate(values):
        if dists[i] <= tau:
            rejected.append(RejectedEigenvalue(complex(lam), "near_half_line"))
        elif band_cut is not None and lam.real > band_cut:
            rejected.append(RejectedEigenvalue(complex(lam), "band_edge"))
        else:
            candidates.append(i)

    if policy.boundary_fraction_max is not None and candidates:
        if spectrum.vectors is None:
            raise ContractViolation(
                "boundary-mass filtering requires eigenvectors; solve with want_vectors=True"
            )
        survivors = []
        for i in candidates:
            frac = _boundary_mass_fraction(spectrum.vectors[:, i], grid)
            if frac > policy.boundary_fraction_max:
                rejected.append(RejectedEigenvalue(complex(values[i]), "delocalized"))
            else:
                survivors.append(i)
        candidates = survivors

    if policy.stability_check and candidates:
        if rebuild is None:
            raise ContractViolation("stability filtering requires a rebuild factory")
        big = rebuild(1.25)
        big_values = eigenvalues_dense(big.matrix).values
        survivors = []
        for i in candidates:
            lam = values[i]
            move = float(np.min(np.abs(big_values - lam)))
            if move > policy.stability_rel_tol * max(abs(lam), tau):
                rejected.append(RejectedEigenvalue(complex(lam), "unstable"))
            else:
                survivors.append(i)
        candidates = survivors

    kept = values[candidates] if candidates else np.array([], dtype=complex)
    return FilteredSpectrum(
        kept=kept, rejected=tuple(rejected), policy=policy, tau_used=tau
    )
