"""Command-line interface for the RALS benchmark toolkit."""

import glob
import json
from pathlib import Path
from typing import List, Optional

import click
from rich.console import Console
from rich.table import Table

from src.bench.artifacts import apply_overrides, load_experiment_config, plot_data
from src.bench.experiment import ExperimentRunner, run_experiment
from src.bench.timing import timing_table
from src.config import settings
from src.diagnostics.summary import summarize
from src.models import (
    ExperimentConfig,
    ExperimentReport,
    ProblemKind,
    ProblemSpec,
    SolverOptions,
    TimingTable,
)
from src.solvers.runner import run as solve
from src.tensor.io import write_tensor
from src.tensor.problems import random_cp_problem
from src.utils.errors import RalsBenchError
from src.utils.log import setup_logging

console = Console()

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NUMERICAL_FAILURE = 2

DIAGNOSTICS_FILE = "diagnostics.json"


def _override_options(func):
    """--seed / --out-dir / --max-iter / --tol, shared by every config-driven command."""
    func = click.option('--tol', type=float, default=None, help='Override solver tolerance')(func)
    func = click.option('--max-iter', type=int, default=None, help='Override iteration cap')(func)
    func = click.option('--out-dir', type=click.Path(file_okay=False), default=None,
                        help='Override output directory')(func)
    func = click.option('--seed', type=int, default=None, help='Override base seed')(func)
    func = click.option('--config', 'config_path', required=True,
                        type=click.Path(exists=True, dir_okay=False),
                        help='Experiment config (JSON or YAML)')(func)
    return func


def _load(config_path: str, seed, out_dir, max_iter, tol) -> ExperimentConfig:
    cfg = load_experiment_config(config_path)
    return apply_overrides(cfg, seed=seed, out_dir=out_dir, max_iter=max_iter, tol=tol)


def _fmt(value: Optional[float], spec: str = ".4g") -> str:
    return "-" if value is None else format(value, spec)


@click.group()
@click.option('--log-level', default=None, help='DEBUG, INFO, WARNING or ERROR')
def cli(log_level):
    """RALS benchmark: CP approximation with ALS, RALS and acceleration."""
    setup_logging(log_level or settings.log_level, settings.log_file or None)


@cli.command()
@click.option('--path', 'out_path', default='config/experiment.json', show_default=True,
              type=click.Path(dir_okay=False), help='Where to write the example config')
@click.option('--force', is_flag=True, help='Overwrite an existing file')
def init(out_path, force):
    """Write an example experiment config."""
    path = Path(out_path)
    if path.exists() and not force:
        console.print(f"[yellow]⚠️  {path} already exists (use --force to overwrite)[/yellow]")
        return

    cfg = ExperimentConfig(
        problem=ProblemSpec(kind=ProblemKind.SWAMP),
        solver=SolverOptions(
            tol=settings.tol,
            max_iter=settings.max_iter,
            lambda0=settings.lambda0,
            accel_alpha=settings.accel_alpha,
            accel_q=settings.accel_q,
            pinv_threshold=settings.pinv_threshold,
            accel_safeguard=settings.accel_safeguard,
        ),
        trials=settings.trials,
        output_dir=settings.output_dir,
        workers=settings.workers,
    )
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8') as f:
        f.write(cfg.model_dump_json(indent=2, exclude_none=True))
        f.write("\n")
    console.print(f"[bold green]✅ Example config written to {path}[/bold green]")


@cli.command()
@click.option('--kind', type=click.Choice([k.value for k in ProblemKind]),
              default=ProblemKind.RANDOM_DENSE.value, show_default=True)
@click.option('--dims', type=int, nargs=3, default=(10, 10, 10), show_default=True, help='I J K')
@click.option('--rank', 'r', type=int, default=10, show_default=True)
@click.option('--seed', type=int, default=0, show_default=True)
@click.option('--collinearity', type=float, default=None,
              help='Pairwise |cos| of swamp generating columns (default from settings)')
@click.option('--out', 'out_path', required=True, type=click.Path(dir_okay=False))
def generate(kind, dims, r, seed, collinearity, out_path):
    """Write a generated tensor in the text format."""
    problem = random_cp_problem(dims, r, ProblemKind(kind), seed, collinearity)
    path = write_tensor(problem.tensor, out_path)
    console.print(f"[green]✅ {kind} tensor {dims[0]}x{dims[1]}x{dims[2]} written to {path}[/green]")


@cli.command()
@_override_options
@click.pass_context
def run(ctx, config_path, seed, out_dir, max_iter, tol):
    """Run every algorithm on every trial and write traces plus report.json."""
    cfg = _load(config_path, seed, out_dir, max_iter, tol)
    console.print(f"[bold]🔬 Running {cfg.trials} trial(s) of "
                  f"{', '.join(a.value for a in cfg.algorithms)}...[/bold]\n")

    report = run_experiment(cfg)
    _print_report(report)
    console.print(f"\n[dim]Artifacts in {cfg.output_dir}[/dim]")

    if report.failed:
        console.print("[red]❌ At least one trial ended in numerical failure[/red]")
        ctx.exit(EXIT_NUMERICAL_FAILURE)


def _print_report(report: ExperimentReport) -> None:
    table = Table(title=f"Experiment Summary (seed {report.seed})")
    table.add_column("Algorithm", style="cyan")
    table.add_column("Converged", justify="right")
    table.add_column("Median iters", justify="right", style="green")
    table.add_column("Median time (s)", justify="right", style="green")
    table.add_column("Median q", justify="right")
    table.add_column("Plateaus", justify="right", style="yellow")
    table.add_column("Status")

    for s in report.summaries:
        counts = ", ".join(f"{k}={v}" for k, v in s.status_counts.items() if v)
        table.add_row(
            s.algorithm.value,
            f"{s.trials_converged}/{report.config.trials}",
            _fmt(s.median_iterations, ".0f"),
            _fmt(s.median_wall_time_s, ".3f"),
            _fmt(s.median_q_fit, ".6f"),
            f"{s.plateau_count} ({s.plateau_total_length} it)",
            counts,
        )
    console.print(table)


@cli.command()
@_override_options
@click.pass_context
def timing(ctx, config_path, seed, out_dir, max_iter, tol):
    """Median wall time and iteration count per algorithm (and size)."""
    cfg = _load(config_path, seed, out_dir, max_iter, tol)
    console.print("[bold]⏱️  Building timing table...[/bold]\n")

    table = timing_table(cfg)
    _print_timing(table)
    for message in table.warnings:
        console.print(f"[yellow]⚠️  {message}[/yellow]")

    if table.failed:
        console.print("[red]❌ At least one trial ended in numerical failure[/red]")
        ctx.exit(EXIT_NUMERICAL_FAILURE)


def _print_timing(table: TimingTable) -> None:
    out = Table(title="Median wall time in seconds (median iterations)")
    out.add_column("Size", style="cyan")
    for algorithm in table.algorithms:
        out.add_column(algorithm.value.upper(), justify="right")

    sizes = []
    for row in table.rows:
        if row.size not in sizes:
            sizes.append(row.size)
    for size in sizes:
        cells = {row.algorithm: row for row in table.rows if row.size == size}
        out.add_row(
            "x".join(str(d) for d in size),
            *(f"{_fmt(cells[a].median_wall_time_s, '.3f')} ({_fmt(cells[a].median_iterations, '.0f')})"
              for a in table.algorithms),
        )
    console.print(out)


@cli.command('plot-data')
@click.option('--glob', 'pattern', required=True, help='Trace files, e.g. "data/results/trace_*.csv"')
@click.option('--out', 'out_path', required=True, type=click.Path(dir_okay=False))
def plot_data_cmd(pattern, out_path):
    """Combine trace CSVs into one long-format CSV (algorithm, iteration, err_sq)."""
    files = glob.glob(pattern)
    if not files:
        raise FileNotFoundError(f"no trace files match {pattern!r}")
    path = plot_data(files, out_path)
    console.print(f"[green]✅ {len(files)} trace(s) combined into {path}[/green]")


@cli.command()
@_override_options
@click.option('--spectral', is_flag=True, help='Also predict the local rate from the Hessian')
@click.pass_context
def diagnose(ctx, config_path, seed, out_dir, max_iter, tol, spectral):
    """Run trial 0 of every algorithm and write diagnostics.json."""
    cfg = _load(config_path, seed, out_dir, max_iter, tol)
    runner = ExperimentRunner(cfg)
    problem = runner.problem_for(0)

    results = []
    for algorithm in cfg.algorithms:
        solver_cfg = runner.solver_config(algorithm, runner.trial_seed(0)).model_copy(
            update={"keep_iterates": True})
        trace = solve(problem.tensor, problem.initial, solver_cfg)
        results.append(summarize(problem.tensor, trace, solver_cfg, spectral=spectral))

    path = Path(cfg.output_dir) / DIAGNOSTICS_FILE
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(results, f, indent=2)
        f.write("\n")

    table = Table(title="Diagnostics (trial 0)")
    table.add_column("Algorithm", style="cyan")
    table.add_column("Status")
    table.add_column("Iters", justify="right")
    table.add_column("Descent", justify="center")
    table.add_column("q_fit", justify="right")
    table.add_column("Plateaus", justify="right")
    table.add_column("Grad bound", justify="center")
    table.add_column("rho", justify="right")
    for item in results:
        descent = item.get("descent")
        bound = item.get("gradient_bound")
        table.add_row(
            item["algorithm"],
            item["status"],
            str(item["iterations"]),
            "-" if descent is None else ("✅" if descent["holds"] else f"❌ {len(descent['violations'])}"),
            _fmt(item["rate"].get("q_fit"), ".6f"),
            str(len(item["plateaus"])),
            "-" if bound is None else ("✅" if bound["bounded"] else "❌"),
            _fmt(item.get("spectral", {}).get("rho"), ".6f"),
        )
    console.print(table)
    console.print(f"\n[dim]Diagnostics written to {path}[/dim]")

    if any(item["status"] == "numerical-failure" for item in results):
        ctx.exit(EXIT_NUMERICAL_FAILURE)


def main(argv: Optional[List[str]] = None) -> int:
    """Run the CLI and map outcomes to exit codes.

    Returns:
        0 on success, 2 when a trial ended in numerical failure, 1 on usage,
        configuration or I/O errors
    """
    try:
        rv = cli.main(args=argv, prog_name="ralsbench", standalone_mode=False)
    except click.ClickException as e:
        e.show()
        return EXIT_ERROR
    except click.Abort:
        return EXIT_ERROR
    except (OSError, RalsBenchError) as e:
        console.print(f"[red]❌ {e}[/red]")
        return EXIT_ERROR
    return rv if isinstance(rv, int) else EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
