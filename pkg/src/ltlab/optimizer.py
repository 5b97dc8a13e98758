"""Derivative-free saturation search over parametrized potential families.

The objective is the lhs/rhs ratio of a chosen bound; maximizing it hunts
for near-equality cases (delta-like wells for the d=1 modulus bound) and
explores the gamma < 1 range where the sum bounds are conjectural.
Nelder-Mead with seeded restarts keeps the eigensolve budget low and the
trajectory bit-reproducible.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .constants import ConstantDomainError, check_admissible
from .discretize import GridSpec, PotentialSpec, PotentialTerm
from .eigensolve import FilterPolicy
from .inequalities import InequalityReport, InequalityRequest, check_single, check_sum
from .pipeline import compute_spectrum

log = logging.getLogger(__name__)


class TheoremViolationError(AssertionError):
    """A guaranteed bound came out violated beyond slack: build error."""


@dataclass(frozen=True)
class FamilySpec:
    """Parametrized potential family.

    gaussian_sum: per term (amp_re, amp_im, center, log_width), d=1.
    box_sum:      per term (amp_re, amp_im, center, log_half_width), d=1.
    delta_like:   single parameter log_width; a box of fixed integrated
                  strength `strength`, amplitude -strength/(2 width).

    Widths are log-parametrized so the simplex moves multiplicatively in
    the narrow-well regime.
    """

    kind: str
    dim: int = 1
    n_terms: int = 1
    strength: float = 4.0
    bounds: tuple[tuple[float, float], ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in ("gaussian_sum", "box_sum", "delta_like"):
            raise ValueError(f"unknown family kind {self.kind!r}")
        if self.dim != 1:
            raise ValueError("optimization families are d=1 only")
        if len(self.bounds) != self.arity:
            raise ValueError(
                f"family {self.kind} needs {self.arity} bounds, got {len(self.bounds)}"
            )
        for lo, hi in self.bounds:
            if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
                raise ValueError(f"bounds must be finite with lo < hi, got ({lo}, {hi})")

    @property
    def arity(self) -> int:
        return 1 if self.kind == "delta_like" else 4 * self.n_terms

    def build_potential(self, theta: Sequence[float]) -> PotentialSpec:
        theta = list(theta)
        if len(theta) != self.arity:
            raise ValueError(f"theta has {len(theta)} entries, expected {self.arity}")
        if self.kind == "delta_like":
            width = math.exp(theta[0])
            amp = -self.strength / (2.0 * width)
            return PotentialSpec(
                dim=1,
                terms=(PotentialTerm("box", complex(amp), (0.0,), (width,)),),
            )
        terms = []
        term_kind = "gaussian" if self.kind == "gaussian_sum" else "box"
        for i in range(self.n_terms):
            amp_re, amp_im, center, log_w = theta[4 * i : 4 * i + 4]
            terms.append(
                PotentialTerm(
                    term_kind, complex(amp_re, amp_im), (center,), (math.exp(log_w),)
                )
            )
        return PotentialSpec(dim=1, terms=tuple(terms))

    @classmethod
    def from_json_dict(cls, data: dict) -> "FamilySpec":
        return cls(
            kind=str(data["kind"]),
            dim=int(data.get("dim", 1)),
            n_terms=int(data.get("n_terms", 1)),
            strength=float(data.get("strength", 4.0)),
            bounds=tuple((float(lo), float(hi)) for lo, hi in data["bounds"]),
        )


@dataclass(frozen=True)
class PipelineConfig:
    grid: GridSpec
    policy: FilterPolicy = field(default_factory=FilterPolicy)
    slack: float = 0.05


@dataclass(frozen=True)
class OptimizerConfig:
    pipeline: PipelineConfig
    restarts: int = 5
    max_evals: int = 200
    seed: int = 0
    init_scale: float = 0.25  # simplex edge as a fraction of each bound range
    tol_obj: float = 1e-6
    tol_simplex: float = 1e-8


@dataclass(frozen=True)
class RestartResult:
    index: int
    best_params: tuple[float, ...]
    best_ratio: float
    eval_count: int
    history: tuple[float, ...]  # running best per evaluation


@dataclass(frozen=True)
class OptResult:
    best_params: tuple[float, ...]
    best_ratio: float
    eval_count: int
    restarts: tuple[RestartResult, ...]
    seed: int
    gamma: float
    which: str
    conjectural: bool = False

    def to_json_dict(self) -> dict:
        return {
            "best_ratio": self.best_ratio,
            "best_params": list(self.best_params),
            "gamma": self.gamma,
            "which": self.which,
            "conjectural": self.conjectural,
            "eval_count": self.eval_count,
            "seed": self.seed,
            "restarts": [
                {
                    "index": r.index,
                    "best_ratio": r.best_ratio,
                    "best_params": list(r.best_params),
                    "eval_count": r.eval_count,
                    "history": list(r.history),
                }
                for r in self.restarts
            ],
        }


def _clamp_penalty(theta: np.ndarray, bounds) -> tuple[np.ndarray, float]:
    """Clamp out-of-bounds parameters; penalty 10 * (normalized overshoot)^2."""
    clamped = theta.copy()
    penalty = 0.0
    for i, (lo, hi) in enumerate(bounds):
        span = hi - lo
        if theta[i] < lo:
            penalty += 10.0 * ((lo - theta[i]) / span) ** 2
            clamped[i] = lo
        elif theta[i] > hi:
            penalty += 10.0 * ((theta[i] - hi) / span) ** 2
            clamped[i] = hi
    return clamped, penalty


def _evaluate(
    theta: np.ndarray,
    family: FamilySpec,
    request: InequalityRequest,
    pipeline: PipelineConfig,
) -> tuple[float, Optional[str], Optional[InequalityReport]]:
    clamped, penalty = _clamp_penalty(theta, family.bounds)
    try:
        pot = family.build_potential(clamped)
        result = compute_spectrum(pipeline.grid, pot, policy=pipeline.policy)
        if result.filtered.kept.size == 0:
            return 0.0 - penalty, None, None
        if request.which in ("davies2", "single_9", "single_10", "single_11"):
            # most binding candidate across kept eigenvalues
            candidates = []
            for mu in result.filtered.kept:
                mu = complex(mu)
                if request.which in ("single_9", "single_10") and mu.real > 0:
                    continue
                if request.which == "single_11" and (mu.real < 0 or mu.imag == 0):
                    continue
                if request.which == "davies2" and (mu.imag == 0 and mu.real >= 0):
                    continue
                candidates.append(check_single(mu, request, result.potential))
            if not candidates:
                return 0.0 - penalty, None, None
            report = max(candidates, key=lambda r: r.ratio)
        else:
            report = check_sum(request, result.filtered, result.potential)
        ratio = report.ratio if math.isfinite(report.ratio) else 0.0
        return ratio - penalty, None, report
    except Exception as exc:  # surfaced, never swallowed
        return -1.0, f"{type(exc).__name__}: {exc}", None


def objective_ratio(
    theta: Sequence[float],
    family: FamilySpec,
    request: InequalityRequest,
    pipeline: PipelineConfig,
) -> float:
    """Ratio of the requested bound at parameters theta; 0 when the filtered
    spectrum is empty, -1 (with a logged diagnostic) on pipeline failure."""
    value, diag, _ = _evaluate(np.asarray(theta, dtype=float), family, request, pipeline)
    if diag is not None:
        log.warning("objective failure at theta=%s: %s", list(theta), diag)
    return value


def _nelder_mead(objective, x0: np.ndarray, scale: np.ndarray, config: OptimizerConfig):
    """Maximize objective by the standard simplex method
    (reflect 1, expand 2, contract 1/2, shrink 1/2)."""
    n = x0.size
    simplex = [x0.copy()]
    for i in range(n):
        pt = x0.copy()
        pt[i] += scale[i]
        simplex.append(pt)
    evals = 0
    history: list[float] = []
    best_seen = -math.inf
    best_x = x0.copy()

    def f(x):
        nonlocal evals, best_seen, best_x
        val = objective(x)
        evals += 1
        if val > best_seen:
            best_seen = val
            best_x = x.copy()
        history.append(best_seen)
        return val

    values = [f(p) for p in simplex]
    while evals < config.max_evals:
        order = sorted(range(n + 1), key=lambda i: -values[i])
        simplex = [simplex[i] for i in order]
        values = [values[i] for i in order]
        spread = abs(values[0] - values[-1])
        size = max(float(np.max(np.abs(p - simplex[0]))) for p in simplex[1:])
        if spread <= config.tol_obj * (1.0 + abs(values[0])) and size <= max(
            config.tol_simplex, 1e-12
        ):
            break
        centroid = np.mean(simplex[:-1], axis=0)
        worst = simplex[-1]
        refl = centroid + (centroid - worst)
        f_refl = f(refl)
        if f_refl > values[0]:
            exp = centroid + 2.0 * (centroid - worst)
            f_exp = f(exp)
            if f_exp > f_refl:
                simplex[-1], values[-1] = exp, f_exp
            else:
                simplex[-1], values[-1] = refl, f_refl
        elif f_refl > values[-2]:
            simplex[-1], values[-1] = refl, f_refl
        else:
            contr = centroid + 0.5 * (worst - centroid)
            f_contr = f(contr)
            if f_contr > values[-1]:
                simplex[-1], values[-1] = contr, f_contr
            else:
                for i in range(1, n + 1):
                    simplex[i] = simplex[0] + 0.5 * (simplex[i] - simplex[0])
                    values[i] = f(simplex[i])
                    if evals >= config.max_evals:
                        break
    return best_x, best_seen, evals, history


def _run_restart(
    index: int,
    family: FamilySpec,
    request: InequalityRequest,
    config: OptimizerConfig,
) -> RestartResult:
    rng = np.random.Generator(np.random.Philox(key=[config.seed, index]))
    lows = np.array([lo for lo, _ in family.bounds])
    highs = np.array([hi for _, hi in family.bounds])
    x0 = lows + rng.random(family.arity) * (highs - lows)
    scale = config.init_scale * (highs - lows)

    def objective(theta: np.ndarray) -> float:
        value, diag, _ = _evaluate(theta, family, request, config.pipeline)
        if diag is not None:
            log.warning("restart %d: objective failure: %s", index, diag)
        return value

    best_x, best_val, evals, history = _nelder_mead(objective, x0, scale, config)
    return RestartResult(
        index=index,
        best_params=tuple(float(x) for x in best_x),
        best_ratio=float(best_val),
        eval_count=evals,
        history=tuple(history),
    )


def maximize_ratio(
    family: FamilySpec, request: InequalityRequest, config: OptimizerConfig
) -> OptResult:
    """Best lhs/rhs ratio over the family: Nelder-Mead per restart with
    per-restart counter-based sub-seeds, merged by maximum ratio (ties to
    the lowest restart index).  Deterministic given the seed."""
    threads = max(1, int(os.environ.get("LTLAB_THREADS", "1")))
    indices = list(range(config.restarts))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(
                pool.map(lambda i: _run_restart(i, family, request, config), indices)
            )
    else:
        results = [_run_restart(i, family, request, config) for i in indices]

    best = max(results, key=lambda r: (r.best_ratio, -r.index))
    conjectural = request.conjectural and request.gamma < 1
    out = OptResult(
        best_params=best.best_params,
        best_ratio=best.best_ratio,
        eval_count=sum(r.eval_count for r in results),
        restarts=tuple(results),
        seed=config.seed,
        gamma=request.gamma,
        which=request.which,
        conjectural=conjectural,
    )

    if not conjectural and request.gamma >= 1 and request.which not in ("davies2",):
        _, _, report = _evaluate(
            np.asarray(best.best_params), family, request, config.pipeline
        )
        if (
            report is not None
            and report.constant is not None
            and report.constant.guaranteed
            and out.best_ratio > 1.0 + config.pipeline.slack
        ):
            pot = family.build_potential(
                _clamp_penalty(np.asarray(best.best_params), family.bounds)[0]
            )
            raise TheoremViolationError(
                f"guaranteed bound {request.which} violated: ratio {out.best_ratio} "
                f"at potential {pot.to_json_dict()}"
            )
    return out


def gamma_sweep(
    family: FamilySpec,
    gammas: Sequence[float],
    request_template: InequalityRequest,
    config: OptimizerConfig,
) -> list[dict]:
    """maximize_ratio per gamma.  Gammas below 1 run in conjectural mode
    (reported, no verdict); inadmissible gammas produce an error row and the
    sweep continues."""
    rows: list[dict] = []
    for gamma in gammas:
        try:
            check_admissible(gamma, family.dim)
        except ConstantDomainError as exc:
            rows.append({"gamma": gamma, "error": str(exc)})
            continue
        request = replace(request_template, gamma=gamma, conjectural=gamma < 1)
        result = maximize_ratio(family, request, config)
        rows.append(
            {
                "gamma": gamma,
                "best_ratio": result.best_ratio,
                "best_params": list(result.best_params),
                "conjectural": result.conjectural,
            }
        )
    return rows
