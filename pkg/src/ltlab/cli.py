"""Command-line front end.

Exit codes: 0 success / bound satisfied, 1 bound violated, 2 usage or
malformed configuration, 3 numeric failure.  Every command writes a
manifest (<out>.manifest.json) recording input hashes, seed, version and
wall time; rerunning with the recorded inputs reproduces the primary
outputs byte for byte.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .constants import ConstantDomainError, ConstantMode, SharpUnknownError
from .corpus import corpus_rng, random_gaussian_potential
from .discretize import (
    GridError,
    PotentialFormatError,
    build_operator,
    load_grid_json,
    load_potential_json,
    sample_potential,
)
from .eigensolve import FilterPolicy, SolverError, ContractViolation
from .inequalities import (
    InequalityRequest,
    RequestError,
    check_single,
    check_sum,
    exclusion_region,
    lemma_check,
)
from .optimizer import (
    FamilySpec,
    OptimizerConfig,
    PipelineConfig,
    gamma_sweep,
    maximize_ratio,
)
from .oracles import ContinuationError, OracleDomainError, WellSpec, square_well_eigenvalues
from .pipeline import compute_spectrum
from .reportio import (
    RunManifest,
    Stopwatch,
    atomic_write_text,
    json_dumps,
    raster_sidecar,
    spectrum_csv,
    write_pgm,
)

EXIT_OK = 0
EXIT_VIOLATED = 1
EXIT_USAGE = 2
EXIT_NUMERIC = 3

CONFIG_ERRORS = (
    GridError,
    PotentialFormatError,
    RequestError,
    ConstantDomainError,
    SharpUnknownError,
    OracleDomainError,
    FileNotFoundError,
    json.JSONDecodeError,
    ValueError,
)
NUMERIC_ERRORS = (SolverError, ContractViolation, ContinuationError)


def _policy_from_args(args) -> FilterPolicy:
    return FilterPolicy(
        tau=args.tau,
        boundary_fraction_max=None if args.no_vec_filter else args.boundary_fraction,
        stability_check=args.stability,
    )


def _add_filter_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tau", type=float, default=None,
                   help="half-line rejection distance (default: auto)")
    p.add_argument("--boundary-fraction", type=float, default=0.01,
                   help="max eigenvector mass in the outer 10%% shell")
    p.add_argument("--no-vec-filter", action="store_true",
                   help="skip the eigenvector boundary-mass filter")
    p.add_argument("--stability", action="store_true",
                   help="also reject eigenvalues unstable under box enlargement")


def _manifest(args, command: str, inputs: list[Path], seed=None) -> RunManifest:
    m = RunManifest(command=command, seed=seed, version=__version__)
    for p in inputs:
        m.add_input(p)
    return m


def _finish(manifest: RunManifest, out_base: Path, watch: Stopwatch) -> None:
    manifest.wall_time_s = watch.elapsed
    manifest.write(out_base.with_suffix(out_base.suffix + ".manifest.json"))


def cmd_spectrum(args) -> int:
    grid = load_grid_json(args.grid)
    pot = load_potential_json(args.potential)
    policy = _policy_from_args(args)
    with Stopwatch() as watch:
        result = compute_spectrum(grid, pot, policy=policy, kinetic=args.kinetic)
    out = Path(args.out)
    atomic_write_text(out, spectrum_csv(result.filtered))
    manifest = _manifest(args, "spectrum", [Path(args.grid), Path(args.potential)])
    manifest.outputs.append(out)
    if args.plot:
        from .plots import plot_spectrum

        png = out.with_suffix(".png")
        plot_spectrum(result.filtered, png, title=f"spectrum ({out.name})")
        manifest.outputs.append(png)
    _finish(manifest, out, watch)
    return EXIT_OK


def _request_from_args(args) -> InequalityRequest:
    return InequalityRequest(
        which=args.ineq,
        gamma=args.gamma,
        kappa=args.kappa,
        alpha=args.alpha,
        refined=args.refined,
        constant_mode=ConstantMode.parse(args.mode),
        slack=args.slack,
        conjectural=args.conjectural,
    )


def cmd_check(args) -> int:
    grid = load_grid_json(args.grid)
    pot = load_potential_json(args.potential)
    request = _request_from_args(args)
    policy = _policy_from_args(args)
    with Stopwatch() as watch:
        if request.which == "lemma":
            v = sample_potential(pot, grid)
            m = build_operator(grid, v, kinetic=args.kinetic)
            report = lemma_check(m, alpha=request.alpha, gamma=request.gamma)
        else:
            result = compute_spectrum(grid, pot, policy=policy, kinetic=args.kinetic)
            if request.which in ("single_9", "single_10", "single_11", "davies2"):
                if args.mu_re is None:
                    kept = result.filtered.kept
                    if kept.size == 0:
                        print("no kept eigenvalue to check", file=sys.stderr)
                        return EXIT_NUMERIC
                    # most negative real part is the natural default candidate
                    mu = complex(kept[int(np.argmin(kept.real))])
                else:
                    mu = complex(args.mu_re, args.mu_im)
                report = check_single(mu, request, result.potential)
            else:
                report = check_sum(
                    request, result.filtered, result.potential, kinetic=args.kinetic
                )
    payload = json_dumps(report.to_json_dict())
    sys.stdout.write(payload)
    if args.out:
        out = Path(args.out)
        atomic_write_text(out, payload)
        manifest = _manifest(args, "check", [Path(args.grid), Path(args.potential)])
        manifest.outputs.append(out)
        _finish(manifest, out, watch)
    return EXIT_OK if report.satisfied or report.conjectural else EXIT_VIOLATED


def cmd_region(args) -> int:
    grid = load_grid_json(args.grid)
    pot = load_potential_json(args.potential)
    v = sample_potential(pot, grid)
    window = tuple(float(x) for x in args.window.split(","))
    if len(window) != 4:
        raise RequestError("--window needs re_min,re_max,im_min,im_max")
    nx, ny = (int(x) for x in args.resolution.split(","))
    with Stopwatch() as watch:
        raster = exclusion_region(
            v,
            gamma=args.gamma,
            constant_mode=ConstantMode.parse(args.mode),
            window=window,
            resolution=(nx, ny),
            include_davies=not args.no_davies,
        )
    out = Path(args.out)
    write_pgm(out, raster)
    sidecar = out.with_suffix(out.suffix + ".json")
    atomic_write_text(sidecar, json_dumps(raster_sidecar(raster)))
    manifest = _manifest(args, "region", [Path(args.grid), Path(args.potential)])
    manifest.outputs += [out, sidecar]
    if args.plot:
        from .plots import plot_region

        png = out.with_suffix(".png")
        plot_region(raster, png)
        manifest.outputs.append(png)
    _finish(manifest, out, watch)
    return EXIT_OK


def cmd_oracle(args) -> int:
    well = WellSpec(depth=complex(args.depth_re, args.depth_im), half_width=args.half_width)
    with Stopwatch() as watch:
        roots = square_well_eigenvalues(well, max_count=args.max_count, with_branches=True)
    lines = ["branch,re_lambda,im_lambda"]
    for branch, lam in roots:
        lines.append(f"{branch},{lam.real!r},{lam.imag!r}")
    payload = "\n".join(lines) + "\n"
    sys.stdout.write(payload)
    if args.out:
        out = Path(args.out)
        atomic_write_text(out, payload)
        manifest = _manifest(args, "oracle", [])
        manifest.outputs.append(out)
        _finish(manifest, out, watch)
    return EXIT_OK


def _optimizer_config(args, grid) -> OptimizerConfig:
    policy = _policy_from_args(args)
    return OptimizerConfig(
        pipeline=PipelineConfig(grid=grid, policy=policy, slack=args.slack),
        restarts=args.restarts,
        max_evals=args.max_evals,
        seed=args.seed,
    )


def cmd_saturate(args) -> int:
    grid = load_grid_json(args.grid)
    with open(args.family, "r", encoding="utf-8") as fh:
        family = FamilySpec.from_json_dict(json.load(fh))
    request = _request_from_args(args)
    config = _optimizer_config(args, grid)
    with Stopwatch() as watch:
        result = maximize_ratio(family, request, config)
    payload = json_dumps(result.to_json_dict())
    sys.stdout.write(payload)
    out = Path(args.out)
    atomic_write_text(out, payload)
    manifest = _manifest(args, "saturate", [Path(args.grid), Path(args.family)], seed=args.seed)
    manifest.outputs.append(out)
    _finish(manifest, out, watch)
    return EXIT_OK


def cmd_sweep(args) -> int:
    grid = load_grid_json(args.grid)
    with open(args.family, "r", encoding="utf-8") as fh:
        family = FamilySpec.from_json_dict(json.load(fh))
    gammas = [float(g) for g in args.gammas.split(",")]
    template = _request_from_args(args)
    config = _optimizer_config(args, grid)
    with Stopwatch() as watch:
        rows = gamma_sweep(family, gammas, template, config)
    payload = json_dumps(rows)
    sys.stdout.write(payload)
    out = Path(args.out)
    atomic_write_text(out, payload)
    manifest = _manifest(args, "sweep", [Path(args.grid), Path(args.family)], seed=args.seed)
    manifest.outputs.append(out)
    if args.plot:
        from .plots import plot_sweep

        png = out.with_suffix(".png")
        plot_sweep(rows, png)
        manifest.outputs.append(png)
    _finish(manifest, out, watch)
    return EXIT_OK


def cmd_lemma_fuzz(args) -> int:
    from .discretize import GridSpec

    grid = GridSpec(dim=1, half_length=args.half_length, points_per_dim=args.n)
    alphas = [float(a) for a in args.alphas.split(",")]
    gammas = [float(g) for g in args.gammas.split(",")]
    worst = 0.0
    failures = 0
    lines = ["index,alpha,gamma,ratio"]
    with Stopwatch() as watch:
        for i in range(args.count):
            pot = random_gaussian_potential(corpus_rng(args.seed, i), grid.half_length)
            v = sample_potential(pot, grid)
            m = build_operator(grid, v)
            for alpha in alphas:
                for gamma in gammas:
                    report = lemma_check(m, alpha=alpha, gamma=gamma)
                    ratio = report.ratio
                    worst = max(worst, ratio)
                    if not report.satisfied:
                        failures += 1
                    lines.append(f"{i},{alpha!r},{gamma!r},{ratio!r}")
    payload = "\n".join(lines) + "\n"
    if args.out:
        out = Path(args.out)
        atomic_write_text(out, payload)
        manifest = _manifest(args, "lemma-fuzz", [], seed=args.seed)
        manifest.outputs.append(out)
        _finish(manifest, out, watch)
    print(f"lemma-fuzz: {args.count} operators, worst ratio {worst!r}, "
          f"{failures} failures", file=sys.stderr)
    return EXIT_OK if failures == 0 else EXIT_VIOLATED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ltlab",
        description="Spectra of Schrodinger operators with complex potentials "
        "and the eigenvalue bounds they satisfy.",
    )
    parser.add_argument("--version", action="version", version=f"ltlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="compute and filter a spectrum, write CSV")
    p.add_argument("--grid", required=True)
    p.add_argument("--potential", required=True)
    p.add_argument("--kinetic", choices=("laplacian", "relativistic"), default="laplacian")
    p.add_argument("--out", required=True)
    p.add_argument("--plot", action="store_true", help="also render a PNG figure")
    _add_filter_flags(p)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("check", help="evaluate one bound, exit 0 if satisfied")
    p.add_argument("--grid", required=True)
    p.add_argument("--potential", required=True)
    p.add_argument("--ineq", required=True,
                   choices=("thm1_i", "thm1_ii", "cor_i", "cor_ii", "lemma",
                            "single_9", "single_10", "single_11", "davies2"))
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--kappa", type=float, default=None)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--refined", action="store_true")
    p.add_argument("--conjectural", action="store_true",
                   help="allow gamma < 1 sum checks (exploration, no verdict)")
    p.add_argument("--mode", default="classical",
                   help="constant mode: classical | sharp | unit | scaled[:factor]")
    p.add_argument("--slack", type=float, default=0.05)
    p.add_argument("--kinetic", choices=("laplacian", "relativistic"), default="laplacian")
    p.add_argument("--mu-re", type=float, default=None,
                   help="candidate eigenvalue for single_* checks (default: computed)")
    p.add_argument("--mu-im", type=float, default=0.0)
    p.add_argument("--out", default=None)
    _add_filter_flags(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("region", help="raster the no-eigenvalue region, write PGM")
    p.add_argument("--grid", required=True)
    p.add_argument("--potential", required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--mode", default="classical")
    p.add_argument("--window", required=True, help="re_min,re_max,im_min,im_max")
    p.add_argument("--resolution", default="400,400", help="nx,ny")
    p.add_argument("--no-davies", action="store_true")
    p.add_argument("--out", required=True)
    p.add_argument("--plot", action="store_true")
    p.set_defaults(func=cmd_region)

    p = sub.add_parser("oracle", help="square-well bound states by continuation")
    p.add_argument("--depth-re", type=float, required=True)
    p.add_argument("--depth-im", type=float, default=0.0)
    p.add_argument("--half-width", type=float, required=True)
    p.add_argument("--max-count", type=int, default=8)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_oracle)

    for name, help_text in (
        ("saturate", "maximize a bound's lhs/rhs ratio over a family"),
        ("sweep", "saturation search per gamma"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--grid", required=True)
        p.add_argument("--family", required=True)
        p.add_argument("--ineq", required=True,
                       choices=("thm1_i", "thm1_ii", "cor_i", "cor_ii",
                                "single_9", "single_10", "single_11", "davies2"))
        p.add_argument("--gamma", type=float, required=True)
        p.add_argument("--kappa", type=float, default=None)
        p.add_argument("--alpha", type=float, default=None)
        p.add_argument("--refined", action="store_true")
        p.add_argument("--conjectural", action="store_true")
        p.add_argument("--mode", default="classical")
        p.add_argument("--slack", type=float, default=0.05)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--restarts", type=int, default=5)
        p.add_argument("--max-evals", type=int, default=200)
        p.add_argument("--out", required=True)
        _add_filter_flags(p)
        if name == "sweep":
            p.add_argument("--gammas", required=True, help="comma-separated gamma list")
            p.add_argument("--plot", action="store_true")
            p.set_defaults(func=cmd_sweep)
        else:
            p.set_defaults(func=cmd_saturate)

    p = sub.add_parser("lemma-fuzz", help="exact matrix invariant over a random corpus")
    p.add_argument("--count", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=60)
    p.add_argument("--half-length", type=float, default=8.0)
    p.add_argument("--alphas", default="0,1,-1,3,-3")
    p.add_argument("--gammas", default="1,1.5,2")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_lemma_fuzz)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors already; normalize other codes
        return int(exc.code) if exc.code else 0
    try:
        return args.func(args)
    except NUMERIC_ERRORS as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except CONFIG_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
