"""Seeded random potential corpora for fuzz runs and acceptance checks."""

from __future__ import annotations

import numpy as np

from .discretize import PotentialSpec, PotentialTerm


def random_gaussian_potential(
    rng: np.random.Generator,
    half_length: float,
    n_terms: int = 3,
    amp_re_range: tuple[float, float] = (-5.0, 1.0),
    amp_im_range: tuple[float, float] = (-3.0, 3.0),
    width_range: tuple[float, float] = (0.5, 3.0),
) -> PotentialSpec:
    """Sum of complex Gaussian bumps supported well inside [-L, L]."""
    terms = []
    for _ in range(n_terms):
        amp = complex(rng.uniform(*amp_re_range), rng.uniform(*amp_im_range))
        center = rng.uniform(-half_length / 2.0, half_length / 2.0)
        width = rng.uniform(*width_range)
        terms.append(PotentialTerm("gaussian", amp, (center,), (width,)))
    return PotentialSpec(dim=1, terms=tuple(terms))


def corpus_rng(seed: int, index: int) -> np.random.Generator:
    """Counter-based per-item generator so corpus items are independent of
    iteration order."""
    return np.random.Generator(np.random.Philox(key=[seed, index]))
