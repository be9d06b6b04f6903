"""arbvol CLI -- the `python main.py` command.

Usage:
    python main.py simulate       --family subset --N 3 --Omega 2 --K 1 --seed 1
    python main.py phase-diagram  --family subset --N 64 --R 50 --n 0.05:1.1:0.05 --kappa 0.05:1.0:0.05 --seed 7
    python main.py critical-line  --family subset --kappa 0.5
    python main.py compare        --family subset --N 64 --R 50 --n 0.1:1.0:0.05 --kappa 0.1:1.0:0.1
    python main.py calibrate      --family subset --N 64 --R 50 --n 0.1:1.0:0.05 --kappa 0.1:1.0:0.1
    python main.py pneg           --family perturbed --alpha 1.5:3.5:0.25 --n 0.1:1.1:0.2 --N 200
    python main.py families       List measure-family plugins

Grids are `start:stop:step` (stop included within half a step), comma
lists, or single values. Exit codes: 0 success, 1 numerical or I/O
failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pydantic import ValidationError

from core.config import AppConfig, load_config
from core.data.store import Store, StoreError
from core.models.market import FREE_PARAMETERS, MarketParams, PerturbedUniform, SubsetUniform
from core.models.runs import CompareRequest, CriticalLineRequest, PnegRequest, RunConfig, SimulateRequest
from core.models.sweeps import PhaseGrid, SweepSpec
from core.models.theory import CriticalLine
from core.registry import PluginRegistry
from detect.simplex import UndecidedError
from market.generator import sample_market
from render.heatmap import render_heatmap
from simulator.engine import SweepEngine
from simulator.metrics import analytic_line_for, calibrate_interpretations, compare_lines, extract_transition
from theory.lines import critical_line, critical_line_finite_n
from theory.saddle import SaddleConvergenceError

logger = logging.getLogger("arbvol.cli")


class UsageError(Exception):
    """Bad combination of command-line options (exit code 2)."""


# ---------------------------------------------------------------------------
# Argument parsing helpers
# ---------------------------------------------------------------------------

def parse_grid(text: str) -> list[float]:
    """`start:stop:step`, `a,b,c` or a single number."""
    try:
        if ":" in text:
            parts = [float(p) for p in text.split(":")]
            if len(parts) != 3:
                raise ValueError
            start, stop, step = parts
            if step <= 0 or stop < start:
                raise argparse.ArgumentTypeError(f"Grid '{text}' needs step > 0 and stop >= start")
            count = math.floor((stop - start) / step + 0.5) + 1
            return [round(start + k * step, 12) for k in range(count)]
        values = [float(p) for p in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"Cannot parse grid '{text}' (use start:stop:step, a,b,c or a number)") from None
    if any(b <= a for a, b in zip(values, values[1:])):
        raise argparse.ArgumentTypeError(f"Grid '{text}' must be strictly increasing")
    return values


def _add_family_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--family", choices=["subset", "perturbed"], required=True, help="Measure family")
    parser.add_argument("--K", type=int, default=None, help="Subset size (subset family, absolute)")
    parser.add_argument("--kappa", type=parse_grid, default=None, help="K / Omega (subset family), value or grid")
    parser.add_argument("--bernoulli", action="store_true", help="Independent state inclusion (subset family)")
    parser.add_argument("--delta", type=parse_grid, default=None, help="Noise amplitude (perturbed family), value or grid")
    parser.add_argument("--alpha", type=parse_grid, default=None, help="Noise size exponent (perturbed family), value or grid")
    parser.add_argument("--hard-constraint", action="store_true", help="Clip negative measures (perturbed family)")


def _add_sweep_args(parser: argparse.ArgumentParser) -> None:
    _add_family_args(parser)
    parser.add_argument("--n", dest="n_grid", type=parse_grid, required=True, help="Asset density grid n = N / Omega")
    parser.add_argument("--N", type=int, default=None, help="Assets per instance (default: config sweep.N)")
    parser.add_argument("--R", type=int, default=None, help="Realizations per cell (default: config sweep.realizations)")
    parser.add_argument("--seed", type=int, default=None, help="Master seed (default: config sweep.master_seed)")
    parser.add_argument("--workers", type=int, default=None, help="Worker processes (default: config sweep.parallelism)")
    parser.add_argument("--interpretation", choices=["direct", "sqrt"], default=None)


def _family_and_parameter(
    args: argparse.Namespace,
    need_parameter: bool = True,
) -> tuple[SubsetUniform | PerturbedUniform, str | None, list[float] | None]:
    """Build the family template and pick the swept parameter.

    The swept parameter is the one given as a multi-value grid; failing
    that, the first free parameter given at all.
    """
    supplied = {
        name: getattr(args, name)
        for name in FREE_PARAMETERS[args.family]
        if getattr(args, name, None) is not None
    }
    grids = [name for name, values in supplied.items() if len(values) > 1]
    if len(grids) > 1:
        raise UsageError(f"Only one parameter may be a grid, got {grids}")
    param_name = grids[0] if grids else next(iter(supplied), None)
    if need_parameter and param_name is None:
        raise UsageError(f"Give a value or grid for one of {list(FREE_PARAMETERS[args.family])}")

    scalars = {name: values[0] for name, values in supplied.items()}
    if args.family == "subset":
        if args.K is not None and "kappa" in scalars:
            raise UsageError("Give either --K or --kappa, not both")
        if args.K is not None:
            family = SubsetUniform(K=args.K, bernoulli=args.bernoulli)
        else:
            family = SubsetUniform(kappa=scalars.get("kappa", 0.5), bernoulli=args.bernoulli)
    else:
        family = PerturbedUniform(
            delta=scalars.get("delta", 1.0),
            alpha=scalars.get("alpha", 2.0),
            hard_constraint=args.hard_constraint,
        )
    grid = supplied[param_name] if param_name else None
    return family, param_name, grid


def _sweep_spec(args: argparse.Namespace, config: AppConfig) -> SweepSpec:
    family, param_name, grid = _family_and_parameter(args)
    return SweepSpec(
        family=family,
        param_name=param_name,
        param_grid=grid,
        n_grid=args.n_grid,
        N=args.N if args.N is not None else config.sweep.N,
        realizations=args.R if args.R is not None else config.sweep.realizations,
        master_seed=args.seed if args.seed is not None else config.sweep.master_seed,
        parallelism=args.workers if args.workers is not None else config.sweep.parallelism,
    )


# ---------------------------------------------------------------------------
# Shared output steps
# ---------------------------------------------------------------------------

def _echo(run: RunConfig) -> dict:
    echo = run.model_dump(mode="json")
    print("config: " + json.dumps(echo, sort_keys=True))
    return echo


def _stem(spec: SweepSpec, prefix: str) -> str:
    return f"{prefix}_{spec.family.kind}_{spec.param_name}_N{spec.N}_R{spec.realizations}_s{spec.master_seed}"


def _run_sweep(engine: SweepEngine, spec: SweepSpec) -> PhaseGrid:
    run = engine.run(spec)
    if run.status != "completed" or run.grid is None:
        raise RuntimeError(f"Sweep {run.name} failed: {run.error}")
    for failure in run.grid.failures:
        print(f"failed cell: {failure}", file=sys.stderr)
    return run.grid


def _analytic_overlay(grid: PhaseGrid, interpretation: str) -> CriticalLine | None:
    try:
        return analytic_line_for(grid, interpretation)
    except (SaddleConvergenceError, ValueError) as e:
        logger.warning("No analytic overlay: %s", e)
        return None


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_simulate(args: argparse.Namespace, config: AppConfig, registry: PluginRegistry) -> int:
    """Sample one instance and print its verdict."""
    family, _, _ = _family_and_parameter(args, need_parameter=False)
    request = SimulateRequest(family=family, N=args.N, Omega=args.Omega, seed=args.seed, detector=args.detector)
    _echo(RunConfig(command="simulate", payload=request, output_dir=config.output_path, formats=config.output.formats))

    params = MarketParams(N=request.N, Omega=request.Omega, seed=request.seed)
    sampler = registry.get("measure_family", family.kind)
    instance = sample_market(params, family, sampler)
    verdict = registry.get("detector", request.detector).detect(instance.excess_returns)

    print(f"verdict: {verdict.label}")
    print(f"t_star: {verdict.t_star:.9g}")
    if verdict.witness is not None:
        print("witness: " + " ".join(f"{z:.9g}" for z in verdict.witness))
        print(f"margin: {verdict.margin:.9g}")
    if verdict.marginal:
        print("marginal: true")
    return 0


def cmd_phase_diagram(args: argparse.Namespace, config: AppConfig, registry: PluginRegistry) -> int:
    """Run a grid and write CSV / JSON / SVG."""
    spec = _sweep_spec(args, config)
    interpretation = args.interpretation or config.theory.interpretation
    echo = _echo(RunConfig(command="phase-diagram", payload=spec, output_dir=config.output_path, formats=config.output.formats))

    grid = _run_sweep(SweepEngine(registry), spec)
    transition = extract_transition(grid)
    analytic = _analytic_overlay(grid, interpretation)

    store = Store(config.output_path)
    stem = _stem(spec, "phase")
    if "csv" in config.output.formats:
        store.write_grid_csv(f"{stem}.csv", grid)
        store.write_line_csv(f"{stem}_transition.csv", transition)
        if analytic is not None:
            store.write_line_csv(f"{stem}_analytic.csv", analytic)
    if "json" in config.output.formats:
        store.write_json(f"{stem}.json", grid, {"run": echo, "seed_rule": grid.cell_seeds})
    if "svg" in config.output.formats:
        store.write_svg(f"{stem}.svg", render_heatmap(grid, analytic, transition))

    for param, n in transition.points:
        print(f"{spec.param_name}={param:.9g} n_transition={n:.9g}")
    for param, side in transition.censored:
        print(f"{spec.param_name}={param:.9g} censored ({side})")
    return 0


def cmd_critical_line(args: argparse.Namespace, config: AppConfig, registry: PluginRegistry) -> int:
    """Print (and write) the analytic critical line."""
    family, param_name, grid = _family_and_parameter(args)
    if args.Omega in (None, "thermodynamic"):
        omega = "thermodynamic"
    elif args.Omega.isdigit():
        omega = int(args.Omega)
    else:
        raise UsageError(f"--Omega must be a positive integer or 'thermodynamic', got {args.Omega!r}")
    request = CriticalLineRequest(
        family=family,
        param_name=param_name,
        grid=grid,
        Omega=omega,
        N=args.N,
        interpretation=args.interpretation or config.theory.interpretation,
    )
    _echo(RunConfig(command="critical-line", payload=request, output_dir=config.output_path, formats=config.output.formats))

    if request.N is not None:
        line = critical_line_finite_n(family, param_name, request.grid, request.N, request.interpretation)
    else:
        line = critical_line(
            family, param_name, request.grid, request.Omega, request.interpretation, config.theory.saddle,
        )
    for param, n_c in line.points:
        print(f"{param_name}={param:.9g} n_c={n_c:.9g}")

    if args.write:
        store = Store(config.output_path)
        stem = f"critical_{family.kind}_{param_name}_{request.interpretation}"
        if "csv" in config.output.formats:
            store.write_line_csv(f"{stem}.csv", line)
        if "json" in config.output.formats:
            store.write_json(f"{stem}.json", line)
    return 0


def cmd_compare(args: argparse.Namespace, config: AppConfig, registry: PluginRegistry) -> int:
    """Sweep, extract the transition and compare it with the analytic line."""
    request = CompareRequest(
        sweep=_sweep_spec(args, config),
        level=args.level,
        interpretation=args.interpretation or config.theory.interpretation,
    )
    echo = _echo(RunConfig(command="compare", payload=request, output_dir=config.output_path, formats=config.output.formats))

    grid = _run_sweep(SweepEngine(registry), request.sweep)
    transition = extract_transition(grid, request.level)
    analytic = analytic_line_for(grid, request.interpretation)
    comparison = compare_lines(transition, analytic)

    store = Store(config.output_path)
    stem = _stem(request.sweep, "compare")
    if "csv" in config.output.formats:
        store.write_grid_csv(f"{stem}_grid.csv", grid)
        store.write_comparison_csv(f"{stem}.csv", comparison)
    if "json" in config.output.formats:
        store.write_json(f"{stem}.json", comparison, {"run": echo, "seed_rule": grid.cell_seeds})
    if "svg" in config.output.formats:
        store.write_svg(f"{stem}.svg", render_heatmap(grid, analytic, transition))

    print(f"interpretation: {comparison.interpretation}")
    print(f"max_abs_dev: {comparison.max_abs_dev:.9g}")
    print(f"mean_abs_dev: {comparison.mean_abs_dev:.9g}")
    return 0


def cmd_calibrate(args: argparse.Namespace, config: AppConfig, registry: PluginRegistry) -> int:
    """Compare both covariance interpretations against one sweep."""
    spec = _sweep_spec(args, config)
    echo = _echo(RunConfig(command="calibrate", payload=spec, output_dir=config.output_path, formats=config.output.formats))

    grid = _run_sweep(SweepEngine(registry), spec)
    report = calibrate_interpretations(grid, args.level)

    store = Store(config.output_path)
    stem = _stem(spec, "calibrate")
    if "csv" in config.output.formats:
        for name, comparison in report.comparisons.items():
            store.write_comparison_csv(f"{stem}_{name}.csv", comparison)
    if "json" in config.output.formats:
        store.write_json(f"{stem}.json", report, {"run": echo, "seed_rule": grid.cell_seeds})

    for name, comparison in report.comparisons.items():
        print(f"{name}: max_abs_dev={comparison.max_abs_dev:.9g} mean_abs_dev={comparison.mean_abs_dev:.9g}")
    print(f"preferred: {report.preferred}")
    return 0


def cmd_pneg(args: argparse.Namespace, config: AppConfig, registry: PluginRegistry) -> int:
    """Fraction of negative perturbed-family measures vs alpha or delta."""
    family, param_name, grid = _family_and_parameter(args)
    request = PnegRequest(
        family=family,
        param_name=param_name,
        grid=grid,
        n_grid=args.n_grid,
        N=args.N if args.N is not None else config.sweep.N,
        realizations=args.R if args.R is not None else 20,
        master_seed=args.seed if args.seed is not None else config.sweep.master_seed,
    )
    echo = _echo(RunConfig(command="pneg", payload=request, output_dir=config.output_path, formats=config.output.formats))

    curve = SweepEngine(registry).pneg_curve(
        request.family, param_name, request.grid, request.n_grid, request.N, request.master_seed, request.realizations,
    )
    store = Store(config.output_path)
    stem = f"pneg_{param_name}_N{request.N}_R{request.realizations}_s{request.master_seed}"
    if "csv" in config.output.formats:
        store.write_pneg_csv(f"{stem}.csv", curve)
    if "json" in config.output.formats:
        store.write_json(f"{stem}.json", curve, {"run": echo})

    for i, param in enumerate(curve.params):
        cells = " ".join(f"{v:.4g}" for v in curve.empirical[i])
        print(f"{param_name}={param:.9g} p_neg=[{cells}]")
    return 0


def cmd_families(args: argparse.Namespace, config: AppConfig, registry: PluginRegistry) -> int:
    """List measure-family plugins."""
    from cli.scanner import CATEGORY_LABELS, discover_plugins

    for cat, items in discover_plugins().items():
        print(f"{CATEGORY_LABELS.get(cat, cat)}:")
        for p in items:
            params = ", ".join(p.free_parameters)
            print(f"  {p.name:12s} {p.display_name} (free parameters: {params})")
    print(f"Detectors: {', '.join(registry.names('detector'))}")
    return 0


# ---------------------------------------------------------------------------
# Parser and dispatch
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    """Build the argument parser."""
    parser = argparse.ArgumentParser(
        prog="arbvol",
        description="arbvol -- arbitrage-volume phase transitions in random one-period markets",
    )
    parser.add_argument("--config", "-c", type=str, default=None, help="Path to config.yaml (default: ~/.arbvol/config.yaml)")
    parser.add_argument("--env", type=str, default=None, help="Path to .env file (default: ~/.arbvol/.env)")
    parser.add_argument("--log-level", type=str, default=None, help="Logging level (default: config logging.level)")
    parser.add_argument("--output-dir", type=str, default=None, help="Output directory (default: $ARBVOL_OUTPUT_DIR or <home>/output)")
    parser.add_argument(
        "--formats", type=str, default=None,
        help="Comma-separated subset of csv,json,svg (default: config output.formats)",
    )

    sub = parser.add_subparsers(dest="command")

    simulate = sub.add_parser("simulate", help="Classify one random market")
    _add_family_args(simulate)
    simulate.add_argument("--N", type=int, required=True, help="Number of assets")
    simulate.add_argument("--Omega", type=int, required=True, help="Number of states")
    simulate.add_argument("--seed", type=int, default=0)
    simulate.add_argument("--detector", choices=["simplex", "hull_oracle"], default="simplex")

    phase = sub.add_parser("phase-diagram", help="Monte Carlo phase diagram")
    _add_sweep_args(phase)

    line = sub.add_parser("critical-line", help="Analytic critical line")
    _add_family_args(line)
    line.add_argument("--Omega", type=str, default=None, help="Finite number of states, or 'thermodynamic' (default)")
    line.add_argument("--N", type=int, default=None, help="Finite-size line at N assets (Omega follows N / n)")
    line.add_argument("--interpretation", choices=["direct", "sqrt"], default=None)
    line.add_argument("--write", action="store_true", help="Also write CSV / JSON to the output directory")

    compare = sub.add_parser("compare", help="Empirical vs analytic transition")
    _add_sweep_args(compare)
    compare.add_argument("--level", type=float, default=0.5)

    calibrate = sub.add_parser("calibrate", help="Compare both covariance interpretations")
    _add_sweep_args(calibrate)
    calibrate.add_argument("--level", type=float, default=0.5)

    pneg = sub.add_parser("pneg", help="Fraction of negative perturbed measures")
    _add_family_args(pneg)
    pneg.add_argument("--n", dest="n_grid", type=parse_grid, required=True)
    pneg.add_argument("--N", type=int, default=None)
    pneg.add_argument("--R", type=int, default=None)
    pneg.add_argument("--seed", type=int, default=None)

    sub.add_parser("families", help="List measure families and detectors")

    return parser


COMMANDS = {
    "simulate": cmd_simulate,
    "phase-diagram": cmd_phase_diagram,
    "critical-line": cmd_critical_line,
    "compare": cmd_compare,
    "calibrate": cmd_calibrate,
    "pneg": cmd_pneg,
    "families": cmd_families,
}


def _resolve_config(args: argparse.Namespace) -> AppConfig:
    config = load_config(config_path=args.config, env_path=args.env, create_dirs=False)
    updates: dict = {}
    if args.output_dir:
        updates["output_dir"] = args.output_dir
    if args.formats:
        updates["formats"] = [f.strip() for f in args.formats.split(",") if f.strip()]
    if updates:
        output = config.output.model_validate({**config.output.model_dump(), **updates})
        config = config.model_copy(update={"output": output})
    config.output_path.mkdir(parents=True, exist_ok=True)
    return config


def main(argv: list[str] | None = None) -> int:
    """CLI entrypoint; returns the process exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.command is None:
        from cli.banner import print_banner
        print_banner()
        parser.print_help()
        return 0

    from main import build_registry, setup_logging

    try:
        config = _resolve_config(args)
    except (ValidationError, ValueError) as e:
        print(f"error: invalid configuration: {e}", file=sys.stderr)
        return 2
    setup_logging(args.log_level or config.logging.level)

    try:
        registry = build_registry(config)
        return COMMANDS[args.command](args, config, registry)
    except (UsageError, ValidationError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (SaddleConvergenceError, UndecidedError, StoreError, RuntimeError, ValueError) as e:
        logger.debug("Command %s failed", args.command, exc_info=True)
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
