"""
Command-line front end.

    eigenbath lambda-dist --family gue --g 91 --g-prime 364 --samples 400
    eigenbath report --config figures/fig04_degenerate_report.toml

Every task writes its data as CSV (plus an SVG view) into --out.
"""

import argparse
from pathlib import Path
import sys
from typing import Optional

from atomicwrites import atomic_write
import colorama
import numpy as np
import pytablewriter
from pytablewriter.style import Style
from termcolor import colored
import toml

from eigenbath.analysis import (
    SweepPoint,
    classify_lambdas,
    degenerate_peak_counts,
    eigendecompose,
    gue_lambda_cdf,
    gue_lambda_pdf,
    gue_variance_closed_form,
    ks_distance,
    lambda_distribution,
    locate_minimum,
    predicted_equilibrium_inversion,
    relative_strength,
    run_tasks,
    sweep_variance_vs_vr,
    vr_gue,
)
from eigenbath.config import TASKS, RunConfig, load_config
from eigenbath.dynamics import (
    INITIAL_STATES,
    default_times,
    diagonal_ensemble_inversion,
    evolve_bloch_z,
    finite_window_average,
    initial_state,
    predicted_plateau,
)
from eigenbath.families import band_pair_for, builder_for, member_seeds
from eigenbath.lib.errors import ConfigError, DomainError, ResourceError
from eigenbath.output.csv_table import emit_csv
from eigenbath.output.svg import Series, emit_svg, render_histogram, render_lines
from eigenbath.subspace import canonical_inversion

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_CONFIG = 2
EXIT_RESOURCE = 3
EXIT_IO = 4

# Families whose λ histogram is compared against the GUE density.
GUE_LIKE_FAMILIES = ("gue", "structured_equidistant")

GUE_PDF_POINTS = 401


def __status(task: str, message: str, color: Optional[str] = None):
    line = f"[{task}] {message}"
    print(colored(line, color) if color else line)


def __fail(tag: str, message: str):
    print(colored(f"[{tag}] {message}", "red", attrs=["bold"]), file=sys.stderr)


def __print_table(rows: list[list]):
    writer = pytablewriter.BorderlessTableWriter(
        headers=["quantity", "value"],
        column_styles=[Style(align="left"), Style(align="right")],
        margin=1,
        value_matrix=rows,
    )
    writer.write_table()


def __stem(config: RunConfig) -> str:
    if config.family is None:
        return config.task
    return f"{config.task}_{config.family}"


def __operators(config: RunConfig) -> list:
    return run_tasks(builder_for(config), member_seeds(config), config.jobs)


def lambda_dist(config: RunConfig) -> dict:
    """Histogram of the pooled λ values of the ensemble."""
    ops = __operators(config)
    systems = run_tasks(eigendecompose, ops, config.jobs)
    dist = lambda_distribution(systems, config.bins)
    g, g_prime = dist.band_pair.g, dist.band_pair.g_prime
    density = dist.density()
    analytic = gue_lambda_pdf(dist.bin_centers, g, g_prime)
    meta = config.metadata()
    stem = __stem(config)
    emit_csv(
        config.out / f"{stem}.csv",
        ["bin_center", "count", "density", "gue_pdf"],
        zip(dist.bin_centers, dist.counts, density, analytic),
        meta,
    )
    curve = None
    if config.family in GUE_LIKE_FAMILIES:
        grid = np.linspace(-1.0, 1.0, GUE_PDF_POINTS)
        curve = Series("GUE density", grid, gue_lambda_pdf(grid, g, g_prime))
    emit_svg(
        config.out / f"{stem}.svg",
        render_histogram(
            dist.bin_edges,
            density,
            f"{config.family}: g={g} g'={g_prime}, {len(dist.samples)} eigenvectors",
            curve,
        ),
    )
    summary = {
        "samples": len(dist.samples),
        "mean": dist.mean,
        "variance": dist.variance,
        "gue_variance": gue_variance_closed_form(g, g_prime),
    }
    if config.family in GUE_LIKE_FAMILIES:
        summary["ks_distance"] = ks_distance(dist.samples, g, g_prime)
    return summary


def evolve(config: RunConfig) -> dict:
    """Trajectory of the central-system inversion for the first ensemble member."""
    seed = member_seeds(config)[0]
    eig = eigendecompose(builder_for(config)(seed))
    rho0 = initial_state(eig.basis, config.initial, seed)
    if config.t_max is None:
        times = default_times(eig, config.time_samples)
    else:
        times = np.linspace(0.0, config.t_max, config.time_samples)
    traj = evolve_bloch_z(eig, rho0, times)
    band_pair = eig.band_pair
    canonical = canonical_inversion(band_pair.g, band_pair.g_prime)
    diagonal = diagonal_ensemble_inversion(eig, rho0)
    stem = __stem(config)
    emit_csv(
        config.out / f"{stem}.csv",
        ["t", "bloch_z", "running_average"],
        zip(traj.times, traj.bloch_z, traj.window_average),
        config.metadata(),
    )
    emit_svg(
        config.out / f"{stem}.svg",
        render_lines(
            [
                Series("<σz>(t)", traj.times, traj.bloch_z),
                Series("running average", traj.times, traj.window_average),
            ],
            f"{config.family}: g={band_pair.g} g'={band_pair.g_prime}",
            "t",
            "<σz>",
            h_refs=[(canonical, "canonical"), (diagonal, "diagonal ensemble")],
        ),
    )
    t_end = float(times[-1])
    return {
        "initial": config.initial,
        "t_max": t_end,
        "window_average": finite_window_average(traj, t_end / 2, t_end),
        "diagonal_ensemble": diagonal,
        "predicted_inversion": predicted_plateau(eig),
        "canonical_inversion": canonical,
    }


def sweep(config: RunConfig) -> dict:
    """Variance of λ against V_R, median over ensemble members."""
    sweeps = [
        sweep_variance_vs_vr(h, config.scales, config.jobs) for h in __operators(config)
    ]
    scales = [p.scale for p in sweeps[0]]
    vr = np.median([[p.relative_strength for p in s] for s in sweeps], axis=0)
    variance = np.median([[p.variance for p in s] for s in sweeps], axis=0)
    points = [SweepPoint(*row) for row in zip(scales, vr, variance)]
    band_pair = band_pair_for(config)
    reference = vr_gue(band_pair.g, band_pair.g_prime)
    stem = __stem(config)
    emit_csv(
        config.out / f"{stem}.csv",
        ["s", "v_r", "variance"],
        points,
        config.metadata(),
    )
    emit_svg(
        config.out / f"{stem}.svg",
        render_lines(
            [Series("Δλ²", vr, variance)],
            f"{config.family}: g={band_pair.g} g'={band_pair.g_prime}, "
            f"median of {len(sweeps)}",
            "V_R",
            "Δλ²",
            v_refs=[(reference, "V_R,GUE")],
        ),
    )
    minimum = locate_minimum(points)
    return {
        "points": len(points),
        "minimum_scale": minimum.scale,
        "minimum_v_r": minimum.relative_strength,
        "minimum_variance": minimum.variance,
        "vr_gue": reference,
    }


def gue_pdf(config: RunConfig) -> dict:
    """Tabulates the analytic GUE λ density and its CDF."""
    g, g_prime = config.g, config.g_prime
    grid = np.linspace(-1.0, 1.0, GUE_PDF_POINTS)
    pdf = gue_lambda_pdf(grid, g, g_prime)
    meta = {"task": config.task, "g": g, "g_prime": g_prime}
    emit_csv(
        config.out / "gue_pdf.csv",
        ["lambda", "pdf", "cdf"],
        zip(grid, pdf, gue_lambda_cdf(grid, g, g_prime)),
        meta,
    )
    emit_svg(
        config.out / "gue_pdf.svg",
        render_lines([Series("P(λ)", grid, pdf)], f"GUE density, g={g} g'={g_prime}", "λ", "P(λ)"),
    )
    return {
        "variance": gue_variance_closed_form(g, g_prime),
        "vr_gue": vr_gue(g, g_prime),
    }


def report(config: RunConfig) -> dict:
    """Summary statistics of the ensemble as a TOML record."""
    ops = __operators(config)
    systems = run_tasks(eigendecompose, ops, config.jobs)
    dist = lambda_distribution(systems, config.bins)
    g, g_prime = dist.band_pair.g, dist.band_pair.g_prime
    summary = {
        "mean": dist.mean,
        "variance": dist.variance,
        "canonical_inversion": canonical_inversion(g, g_prime),
        "predicted_inversion": predicted_equilibrium_inversion(g, g_prime, dist.variance),
        "v_r": float(np.median([relative_strength(h) for h in ops])),
        "vr_gue": vr_gue(g, g_prime),
        "gue_variance": gue_variance_closed_form(g, g_prime),
    }
    if config.family == "structured_degenerate" and config.delta_s == config.delta_c:
        ranked = [degenerate_peak_counts(h.coupling_block()) for h in ops]
        summary["peaks_minus_one"] = sum(p.minus_one for p in ranked)
        summary["peaks_zero"] = sum(p.zero for p in ranked)
        summary["peaks_plus_one"] = sum(p.plus_one for p in ranked)
        classified = classify_lambdas(dist.samples)
        summary["classified_minus_one"] = classified.minus_one
        summary["classified_zero"] = classified.zero
    record = {"run": {k: v for k, v in config.metadata().items() if v is not None}}
    record["summary"] = summary
    with atomic_write(config.out / f"{__stem(config)}.toml", overwrite=True, encoding="utf-8") as file:
        toml.dump(record, file)
    return summary


TASK_RUNNERS = {
    "lambda-dist": lambda_dist,
    "evolve": evolve,
    "sweep": sweep,
    "gue-pdf": gue_pdf,
    "report": report,
}


def run(config: RunConfig) -> int:
    """Executes one validated configuration and returns the exit status."""
    try:
        config.out.mkdir(parents=True, exist_ok=True)
        __status(config.task, ", ".join(f"{k}={v}" for k, v in config.metadata().items()))
        summary = TASK_RUNNERS[config.task](config)
    except ResourceError as e:
        __fail("resource", str(e))
        return EXIT_RESOURCE
    except DomainError as e:
        __fail("domain", str(e))
        return EXIT_DOMAIN
    except OSError as e:
        __fail("io", f"{e.filename or config.out}: {e.strerror}")
        return EXIT_IO
    __print_table([[k, "%.10g" % v if isinstance(v, float) else v] for k, v in summary.items()])
    __status(config.task, f"Wrote outputs to {config.out}", "green")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eigenbath", description="Eigenvector inversions of system-bath Hamiltonians"
    )
    parser.add_argument("task", choices=TASKS)
    parser.add_argument("--config", type=Path, help="TOML run configuration")
    parser.add_argument("--family")
    parser.add_argument("--g", type=int)
    parser.add_argument("--g-prime", type=int)
    parser.add_argument("--n-env", type=int, help="Number of environment spins")
    parser.add_argument("--band-k", type=int)
    parser.add_argument("--samples", type=int, help="Ensemble members")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--scale", type=float, help="Coupling strength")
    parser.add_argument("--delta-eps", type=float, help="Band width")
    parser.add_argument("--spread", type=float, help="Zeeman spread")
    parser.add_argument("--coupling-kind", choices=["random", "flip_flop"])
    parser.add_argument("--intra-kind")
    parser.add_argument("--intra-strength", type=float)
    parser.add_argument(
        "--detuned",
        dest="resonant",
        action="store_const",
        const=False,
        help="Keep the configured central splitting instead of tuning it to resonance",
    )
    parser.add_argument("--bins", type=int)
    parser.add_argument("--t-max", type=float)
    parser.add_argument("--initial", choices=INITIAL_STATES, help="Initial environment state")
    parser.add_argument("--jobs", type=int, help="Worker threads")
    parser.add_argument("--out", type=Path, help="Output directory")
    return parser


def overrides_from(args: argparse.Namespace) -> dict:
    return {
        "task": args.task,
        "family": args.family,
        "g": args.g,
        "g_prime": args.g_prime,
        "n_env": args.n_env,
        "band_k": args.band_k,
        "samples": args.samples,
        "seed": args.seed,
        "scale": args.scale,
        "delta_eps": args.delta_eps,
        "zeeman_spread": args.spread,
        "coupling_kind": args.coupling_kind,
        "intra_kind": args.intra_kind,
        "intra_strength": args.intra_strength,
        "resonant": args.resonant,
        "bins": args.bins,
        "t_max": args.t_max,
        "initial": args.initial,
        "jobs": args.jobs,
        "out": args.out,
    }


def main(argv: Optional[list[str]] = None) -> int:
    colorama.init()
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config, overrides_from(args))
    except ConfigError as e:
        __fail("config", str(e))
        return EXIT_CONFIG
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
