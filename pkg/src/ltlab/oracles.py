"""Analytic and semi-analytic reference spectra.

Delta well: -psi'' - c delta(x) psi has the single eigenvalue -c^2/4
(eigenfunction exp(-c|x|/2)), valid for complex c with Re c > 0; it
saturates the d=1 modulus bound |lambda| <= (1/4)(int |V|)^2 exactly.

Square well: bound states of -psi'' - V0 1_{[-a,a]} psi = lambda psi obey
the matching conditions k tan(ka) = kappa (even) and -k cot(ka) = kappa
(odd) with lambda = -kappa^2, k^2 = V0 - kappa^2, Re kappa > 0.  Real
depths are solved by bracketing; complex depths by Newton continuation in
the imaginary part of the depth.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass

import numpy as np

from .discretize import GridSpec

log = logging.getLogger(__name__)


class OracleDomainError(ValueError):
    pass


class ContinuationError(RuntimeError):
    pass


@dataclass(frozen=True)
class WellSpec:
    """Potential -depth on [-half_width, half_width], zero outside."""

    depth: complex
    half_width: float

    def __post_init__(self) -> None:
        if not self.depth.real > 0:
            raise OracleDomainError(
                f"homotopy start needs Re depth > 0, got {self.depth}"
            )
        if not self.half_width > 0:
            raise OracleDomainError(f"half_width must be positive, got {self.half_width}")


def delta_eigenvalue(c: complex) -> complex:
    """The unique eigenvalue -c^2/4 of -d^2/dx^2 - c delta(x), Re c > 0."""
    c = complex(c)
    if not c.real > 0:
        raise OracleDomainError(f"delta well needs Re c > 0, got {c}")
    return -(c * c) / 4.0


def dirichlet_laplacian_spectrum(grid: GridSpec) -> np.ndarray:
    """Closed-form eigenvalues of the discrete Dirichlet Laplacian:
    per-axis (2/h^2)(1 - cos(k pi/(n+1))), tensor-summed, ascending."""
    if grid.boundary != "dirichlet":
        raise OracleDomainError("closed form is for dirichlet grids")
    n, h = grid.points_per_dim, grid.mesh
    axis = (2.0 / h**2) * (1.0 - np.cos(np.arange(1, n + 1) * np.pi / (n + 1)))
    total = axis
    for _ in range(grid.dim - 1):
        total = np.add.outer(total, axis).ravel()
    return np.sort(total)


def _sinc(z: complex, a: float) -> complex:
    """sin(a z)/z, even in z (safe on either branch of z = sqrt(...))."""
    if abs(z) < 1e-8:
        return a - (a**3) * z * z / 6.0
    return cmath.sin(a * z) / z


def _matching_residual(kappa: complex, depth: complex, a: float, branch: str) -> complex:
    """Branch-safe matching residuals, written as functions of k^2 only:
    even:  (depth - kappa^2) sin(ka)/k - kappa cos(ka)
    odd:   cos(ka) + kappa sin(ka)/k
    """
    k2 = depth - kappa * kappa
    k = cmath.sqrt(k2)
    if branch == "even":
        return k2 * _sinc(k, a) - kappa * cmath.cos(k * a)
    return cmath.cos(k * a) + kappa * _sinc(k, a)


def _newton_root(kappa: complex, depth: complex, a: float, branch: str,
                 tol: float = 1e-12, max_iter: int = 50) -> complex:
    for _ in range(max_iter):
        f = _matching_residual(kappa, depth, a, branch)
        if abs(f) < tol:
            return kappa
        h = 1e-7 * (1.0 + abs(kappa))
        df = (
            _matching_residual(kappa + h, depth, a, branch)
            - _matching_residual(kappa - h, depth, a, branch)
        ) / (2.0 * h)
        if df == 0:
            break
        step = f / df
        kappa = kappa - step
    f = _matching_residual(kappa, depth, a, branch)
    if abs(f) < tol:
        return kappa
    raise ContinuationError(f"Newton stalled on {branch} branch, residual {abs(f):.2e}")


def _real_well_roots(depth: float, a: float) -> list[tuple[str, float]]:
    """All bound-state kappa values of a real well by bisection in
    u = k a on the circle u^2 + v^2 = depth * a^2."""
    R = math.sqrt(depth) * a
    roots: list[tuple[str, float]] = []

    def circle_v(u: float) -> float:
        return math.sqrt(max(R * R - u * u, 0.0))

    def bisect(f, lo: float, hi: float) -> float | None:
        flo, fhi = f(lo), f(hi)
        if flo == 0.0:
            return lo
        if flo * fhi > 0:
            return None
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            fm = f(mid)
            if fm == 0.0 or hi - lo < 1e-15 * max(1.0, R):
                return mid
            if flo * fm < 0:
                hi, fhi = mid, fm
            else:
                lo, flo = mid, fm
        return 0.5 * (lo + hi)

    eps = 1e-12
    # even branch: u tan u = v, u in (m pi, m pi + pi/2)
    m = 0
    while m * math.pi < R:
        lo = m * math.pi + eps
        hi = min(m * math.pi + math.pi / 2.0 - eps, R - eps)
        if hi > lo:
            u = bisect(lambda u: u * math.tan(u) - circle_v(u), lo, hi)
            if u is not None:
                roots.append(("even", circle_v(u) / a))
        m += 1
    # odd branch: -u cot u = v, u in (m pi + pi/2, (m+1) pi)
    m = 0
    while m * math.pi + math.pi / 2.0 < R:
        lo = m * math.pi + math.pi / 2.0 + eps
        hi = min((m + 1) * math.pi - eps, R - eps)
        if hi > lo:
            u = bisect(lambda u: -u / math.tan(u) - circle_v(u), lo, hi)
            if u is not None:
                roots.append(("odd", circle_v(u) / a))
        m += 1
    return [(b, k) for b, k in roots if k > 0.0]


def square_well_eigenvalues(
    well: WellSpec, max_count: int = 8, with_branches: bool = False
):
    """Bound-state eigenvalues lambda = -kappa^2 of the (possibly complex)
    square well, at most max_count, ordered by |lambda| descending in depth
    of binding (largest |lambda| first).

    Roots are found at real depth and continued to the target depth by
    Newton homotopy in Im(depth): initial step |depth|/20, halved on Newton
    failure, floor |depth| * 1e-6.  Two roots approaching within 1e-8
    abort the continuation (collision); roots continued onto the
    non-physical sheet (Re kappa <= 0) are dropped with a log entry.
    """
    a = well.half_width
    depth = complex(well.depth)
    real_roots = _real_well_roots(depth.real, a)
    kappas = [complex(k) for _, k in real_roots]
    branches = [b for b, _ in real_roots]

    target_im = depth.imag
    if target_im != 0.0 and kappas:
        scale = abs(depth)
        step = scale / 20.0
        floor = scale * 1e-6
        s = 0.0
        sign = 1.0 if target_im > 0 else -1.0
        while s < abs(target_im):
            ds = min(step, abs(target_im) - s)
            trial = depth.real + 1j * sign * (s + ds)
            try:
                new_kappas = [
                    _newton_root(k, trial, a, b) for k, b in zip(kappas, branches)
                ]
            except ContinuationError:
                step /= 2.0
                if step < floor:
                    raise ContinuationError(
                        f"homotopy stalled at Im depth = {sign * s:.6g} "
                        f"(target {target_im:.6g})"
                    )
                continue
            for i in range(len(new_kappas)):
                for j in range(i + 1, len(new_kappas)):
                    if abs(new_kappas[i] - new_kappas[j]) < 1e-8:
                        raise ContinuationError(
                            f"root collision near Im depth = {sign * (s + ds):.6g}"
                        )
            kappas = new_kappas
            s += ds

    physical = []
    for k, b in zip(kappas, branches):
        if k.real > 0:
            physical.append((b, k))
        else:
            log.info("dropping root continued to Re kappa <= 0: %s", k)

    lambdas = [(-k * k, b) for b, k in physical]
    lambdas.sort(key=lambda t: -abs(t[0]))
    lambdas = lambdas[:max_count]
    if with_branches:
        return [(b, lam) for lam, b in lambdas]
    return np.array([lam for lam, _ in lambdas], dtype=complex)
