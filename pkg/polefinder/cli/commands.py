"""
Command-line front end of polefinder.
"""
import dataclasses
import json
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional, TextIO

import pandas as pd

from polefinder.errors import ConfigError, DegenerateBand, PoleFinderError, SeriesTooShort
from polefinder.estimation.bandwidth import MIN_PIPELINE_LENGTH, EstimatorConfig, bandwidth_defaults
from polefinder.estimation.estimators import (
    alpha_profile,
    estimate_pipeline,
    first_stage_alpha,
    log_periodogram_alpha,
    log_periodogram_pole,
)
from polefinder.estimation.inference import BiasInputs, alpha_ci, pole_ci
from polefinder.iohandling.files import (
    FLOAT_FORMAT,
    default_output_dir,
    load_weight_table,
    read_series,
    write_profile,
    write_series,
)
from polefinder.iohandling.manifest import RunManifest, manifest_path_for
from polefinder.iohandling.parsing import create_args_parser, default_workers
from polefinder.montecarlo.engine import load_config, run_mc
from polefinder.montecarlo.reference_tables import compare_to_reference, comparison_frame
from polefinder.simulation.models import SimFamily, SimModel, simulate
from polefinder.spectral.periodogram import averaged_periodogram, periodogram
from polefinder.spectral.weights import PSI_PAPER, W_PAPER

log = logging.getLogger(__name__)

ESTIMATE_SCHEMA_VERSION = 1


def configure_logging(verbose: bool = False, quiet: bool = False):
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    logging.basicConfig(
        level=level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


class PoleFinderCLI:
    def __init__(self, stdout: Optional[TextIO] = None):
        """
        Parameters
        ----------
        stdout : file-like, optional
            Where results that are not written to a file go; sys.stdout by default.
        """
        self.stdout = stdout if stdout is not None else sys.stdout
        self.parser = create_args_parser()

    def run(self, argv: List[str]) -> int:
        """Parse ``argv`` and execute the selected subcommand; returns the exit code."""
        return self.dispatch(self.parser.parse_args(argv), argv)

    def dispatch(self, args, argv: List[str]) -> int:
        handler = getattr(self, args.command)
        handler(args, self._command_argv(argv))
        return 0

    @staticmethod
    def _command_argv(argv: List[str]) -> List[str]:
        # Logging flags are not part of what a manifest replays.
        return [a for a in argv if a not in ("-v", "--verbose", "-q", "--quiet")]

    def _write_manifest(self, args, argv: List[str], parameters: Dict, default_target):
        manifest = RunManifest(command=args.command, parameters=parameters, argv=argv)
        target = args.manifest or manifest_path_for(default_target)
        return manifest.to_json(target)

    def simulate(self, args, argv: List[str]):
        """Simulate one series and write it as a single-column CSV."""
        model = SimModel(
            family=SimFamily.parse(args.model),
            alpha=args.alpha,
            n=args.n,
            seed=args.seed,
            replication=args.replication,
        )
        series = simulate(model)
        out = write_series(args.out, series.values)
        log.info("Successfully wrote %s observations to %s", series.n, out)
        self._write_manifest(
            args,
            argv,
            {
                "model": model.family.value,
                "alpha": model.alpha,
                "n": model.n,
                "seed": model.seed,
                "replication": model.replication,
            },
            out,
        )

    def _estimator_config(self, args, n: int) -> EstimatorConfig:
        explicit = {name: getattr(args, name) for name in ("k", "k1", "m", "m1")}
        if args.auto_bandwidth and any(v is not None for v in explicit.values()):
            raise ConfigError("--auto-bandwidth cannot be combined with --k/--k1/--m/--m1.")
        if n < MIN_PIPELINE_LENGTH:
            raise SeriesTooShort(
                f"At least {MIN_PIPELINE_LENGTH} observations are needed, got n = {n}."
            )
        psi = load_weight_table(args.psi_table) if args.psi_table else PSI_PAPER
        w = load_weight_table(args.w_table) if getattr(args, "w_table", None) else W_PAPER
        cfg = bandwidth_defaults(n, m_rule=args.m_rule, m_scale=args.m_scale, psi=psi, w=w)
        return cfg.with_overrides(**explicit).validate(n)

    def estimate(self, args, argv: List[str]):
        """Pole search, two-step memory estimate and both confidence intervals."""
        series = read_series(args.input, args.column)
        cfg = self._estimator_config(args, series.n)
        result = estimate_pipeline(series, cfg, known_pole=args.known_pole)

        bias_inputs = None
        if (args.bias_c is None) != (args.bias_log_g_dd is None):
            raise ConfigError("--bias-c and --bias-log-g-dd must be given together.")
        if args.bias_c is not None:
            bias_inputs = BiasInputs(c=args.bias_c, log_g_dd=args.bias_log_g_dd)

        memory = result.memory
        output = {
            "schema_version": ESTIMATE_SCHEMA_VERSION,
            "n": series.n,
            "known_pole": args.known_pole,
            "anchor_q": result.anchor_q,
            "q_hat": None,
            "lambda_hat": None,
            "regime": result.regime.value,
            "alpha_two_step": memory.alpha,
            "alpha_out_of_range": memory.out_of_range,
            "alpha_first_stage": None,
            "pole_ci": None,
            "alpha_ci": alpha_ci(
                memory,
                w_constants=cfg.w.constants,
                level=args.level,
                bias_inputs=bias_inputs,
                regime=result.regime,
            ).as_dict(),
            "bandwidths": cfg.as_dict(),
        }
        if result.pole is not None:
            output["q_hat"] = result.pole.q_hat
            output["lambda_hat"] = result.pole.lambda_hat
            output["alpha_first_stage"] = first_stage_alpha(result.pole).alpha
            if memory.alpha > 0.0:
                output["pole_ci"] = pole_ci(
                    result.pole, memory.alpha, psi_constants=cfg.psi.constants, level=args.level
                ).as_dict()
            else:
                log.warning("No pole interval: the memory estimate %s is not positive", memory.alpha)

        if args.with_log_periodogram:
            log_pole = log_periodogram_pole(result.grid, cfg.k)
            output["comparators"] = {
                "q_tilde": log_pole.q_hat,
                "lambda_tilde": log_pole.lambda_hat,
                "alpha_log_at_tilde": log_periodogram_alpha(log_pole.q_hat, result.grid, cfg.m).alpha,
                "alpha_log_at_anchor": log_periodogram_alpha(result.anchor_q, result.grid, cfg.m).alpha,
            }

        text = self._render(output, args.format)
        if args.out:
            Path(args.out).write_text(text)
            log.info("Successfully wrote estimates to %s", args.out)
        else:
            self.stdout.write(text)
            if not args.manifest:
                log.info("Estimates went to stdout; pass --manifest to record the run")
                return output
        self._write_manifest(
            args,
            argv,
            {"input": args.input, "column": args.column, "bandwidths": cfg.as_dict(),
             "level": args.level, "known_pole": args.known_pole},
            args.out,
        )
        return output

    @staticmethod
    def _render(output: Dict, fmt: str) -> str:
        if fmt == "json":
            return json.dumps(output, indent=2) + "\n"
        return pd.json_normalize(output).to_csv(index=False, float_format=FLOAT_FORMAT)

    def profile(self, args, argv: List[str]):
        """Write the memory-estimate profile over q = 0..n//2."""
        series = read_series(args.input, args.column)
        cfg = self._estimator_config(args, series.n)
        grid = periodogram(series)
        if grid.is_degenerate:
            raise DegenerateBand(
                "The periodogram has no power at nonzero frequencies; is the series constant?"
            )
        profile = alpha_profile(averaged_periodogram(grid, cfg.k1), cfg.k, cfg.psi)
        out = write_profile(args.out, profile)
        log.info("Successfully wrote a %s-row profile to %s", profile.values.size, out)
        self._write_manifest(
            args, argv, {"input": args.input, "column": args.column, "bandwidths": cfg.as_dict()}, out
        )

    def montecarlo(self, args, argv: List[str]):
        """Run a Monte Carlo study and write its report, reference comparison and manifest."""
        cfg = load_config(args.config)
        overrides = {}
        if args.reps is not None:
            overrides["reps"] = args.reps
        if args.base_seed is not None:
            overrides["base_seed"] = args.base_seed
        if overrides:
            cfg = dataclasses.replace(cfg, **overrides)
        workers = args.workers if args.workers is not None else default_workers()

        out_dir = Path(args.out) if args.out else Path(default_output_dir("polefinder_mc_"))
        out_dir.mkdir(parents=True, exist_ok=True)

        report = run_mc(cfg, workers=workers)
        for line in report.summary_lines():
            log.info(line)
        report.to_csv(out_dir / "report.csv")
        report.to_json(out_dir / "report.json")

        comparisons = compare_to_reference(report)
        if comparisons:
            frame = comparison_frame(comparisons)
            frame.to_csv(out_dir / "reference_comparison.csv", index=False, float_format=FLOAT_FORMAT)
            failed = int((~frame["passed"]).sum())
            if failed:
                log.warning(
                    "%s of %s cells fall outside the reference tolerances", failed, len(comparisons)
                )
        if report.aborted:
            log.warning("%s cell(s) aborted; see report.json", len(report.aborted))
        log.info("Successfully wrote Monte Carlo report to %s", out_dir)

        manifest = RunManifest(
            command=args.command,
            parameters={"config": cfg.to_dict(), "workers": workers},
            argv=argv,
        )
        manifest.to_json(out_dir / "manifest.json")
        return report

    def replay(self, args, argv: List[str]):
        """Re-execute the argument vector recorded in a manifest."""
        manifest = RunManifest.from_json(args.manifest)
        if not manifest.argv or manifest.argv[0] == "replay":
            raise ConfigError(f"Manifest {args.manifest} does not record a replayable command.")
        log.info("Replaying %s from %s", manifest.command, args.manifest)
        self.run(manifest.argv)


def main(argv: Optional[List[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    cli = PoleFinderCLI()
    args = cli.parser.parse_args(argv)
    configure_logging(verbose=args.verbose, quiet=args.quiet)
    try:
        return cli.dispatch(args, argv)
    except PoleFinderError as e:
        log.error("%s", e)
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
