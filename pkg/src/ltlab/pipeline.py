"""Composition helpers: potential spec -> operator -> filtered spectrum.

Real potentials ride the symmetric solver (much cheaper and exactly real
output); complex potentials use the general dense solver.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .discretize import (
    GridSpec,
    OperatorMatrix,
    PotentialSpec,
    SampledPotential,
    build_operator,
    sample_potential,
)
from .eigensolve import (
    ComplexSpectrum,
    FilterPolicy,
    FilteredSpectrum,
    eigenvalues_dense,
    filter_spectrum,
)


def solve_operator(m: OperatorMatrix, want_vectors: bool = False) -> ComplexSpectrum:
    """Full spectrum of an operator matrix, routed by symmetry."""
    if m.is_real:
        h = m.kinetic + np.diag(m.potential.real)
        scale = float(np.linalg.norm(h, "fro"))
        eps = np.finfo(float).eps
        if want_vectors:
            values, vectors = np.linalg.eigh(h)
        else:
            values = np.linalg.eigvalsh(h)
            vectors = None
        # vectors stay real; downstream only takes |entries|
        return ComplexSpectrum(
            values=values.astype(complex),
            residual_bound=10.0 * h.shape[0] * eps * scale,
            vectors=vectors,
        )
    return eigenvalues_dense(m.matrix, want_vectors=want_vectors)


@dataclass(frozen=True)
class SpectrumResult:
    operator: OperatorMatrix
    potential: SampledPotential
    spectrum: ComplexSpectrum
    filtered: FilteredSpectrum


def compute_spectrum(
    grid: GridSpec,
    potential: PotentialSpec,
    policy: FilterPolicy = FilterPolicy(),
    kinetic: str = "laplacian",
) -> SpectrumResult:
    """End-to-end: sample, assemble, solve (with vectors when the policy
    filters on boundary mass), filter."""
    v = sample_potential(potential, grid)
    m = build_operator(grid, v, kinetic=kinetic)
    want_vectors = policy.boundary_fraction_max is not None
    spec = solve_operator(m, want_vectors=want_vectors)

    rebuild = None
    if policy.stability_check:
        def rebuild(factor: float) -> OperatorMatrix:
            big_grid = grid.enlarged(factor)
            return build_operator(big_grid, sample_potential(potential, big_grid), kinetic=kinetic)

    if kinetic == "laplacian":
        band_top = 4.0 * grid.dim / grid.mesh**2
    else:
        band_top = np.pi / grid.mesh
    filtered = filter_spectrum(
        spec, grid, policy=policy, rebuild=rebuild, potential_scale=v.scale,
        band_top=band_top,
    )
    return SpectrumResult(operator=m, potential=v, spectrum=spec, filtered=filtered)
