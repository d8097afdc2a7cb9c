import argparse
import os

import polefinder
from polefinder.errors import ConfigError

WORKERS_ENV = "POLEFINDER_WORKERS"
MODELS = ("farima", "gegenbauer", "flipped-pi")


def open_unit_float(value: str) -> float:
    try:
        alpha = float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{value!r} is not a number.")
    if not 0.0 < alpha < 1.0:
        raise argparse.ArgumentTypeError(
            f"alpha must lie in the open interval (0, 1), got {value}."
        )
    return alpha


def positive_int(value: str) -> int:
    try:
        number = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{value!r} is not an integer.")
    if number < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}.")
    return number


def nonnegative_int(value: str) -> int:
    try:
        number = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{value!r} is not an integer.")
    if number < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {value}.")
    return number


def default_workers() -> int:
    """Worker count from POLEFINDER_WORKERS, or 1 when it is unset."""
    raw = os.environ.get(WORKERS_ENV)
    if raw is None or raw.strip() == "":
        return 1
    try:
        workers = int(raw)
    except ValueError:
        raise ConfigError(f"{WORKERS_ENV} must be a positive integer, got {raw!r}.")
    if workers < 1:
        raise ConfigError(f"{WORKERS_ENV} must be a positive integer, got {raw!r}.")
    return workers


def _add_input_arguments(parser: argparse.ArgumentParser):
    parser.add_argument("--input", required=True, help="CSV file holding the series.")
    parser.add_argument(
        "--column",
        default=None,
        help="Column to read when the CSV has several; a name, or a 0-based "
        "position for headerless files.",
    )


def _add_bandwidth_arguments(parser: argparse.ArgumentParser):
    group = parser.add_argument_group("bandwidths")
    group.add_argument("--k", type=positive_int, help="Pole-search band count.")
    group.add_argument("--k1", type=positive_int, help="Pole-search smoothing span.")
    group.add_argument("--m", type=positive_int, help="Two-step band count.")
    group.add_argument("--m1", type=positive_int, help="Two-step smoothing span.")
    group.add_argument(
        "--auto-bandwidth",
        action="store_true",
        help="Use the default bandwidth rules for the series length; cannot be "
        "combined with explicit bandwidths.",
    )
    group.add_argument(
        "--m-rule",
        choices=("quarter", "power"),
        default="quarter",
        help="Default rule for m: n // 4, or m-scale * n^(4/5).",
    )
    group.add_argument("--m-scale", type=float, default=1.0, help="Constant of the power rule.")
    group.add_argument(
        "--psi-table",
        default=None,
        help="CSV of (u, value) nodes replacing the pole-search weight.",
    )


def _add_manifest_argument(parser: argparse.ArgumentParser):
    parser.add_argument(
        "--manifest",
        default=None,
        help=(
            "Where to write the run manifest; defaults to a file next to the output. "
            "Output printed to stdout gets no manifest unless this is given."
        ),
    )


def create_args_parser():
    """
    Returns the parser of the ``polefinder`` command.

    Global options go before the subcommand:

        >>> parser = create_args_parser()
        >>> args = parser.parse_args(["-v", "simulate", "--model", "farima",
        ...                           "--alpha", "0.4", "--n", "256", "--out", "x.csv"])

    Invalid values make argparse exit with status 2.
    """
    parser = argparse.ArgumentParser(
        prog="polefinder",
        description="Estimate the location of a spectral pole and the memory "
        "parameter of a long-memory series.",
    )
    parser.add_argument("--version", action="version", version=polefinder.__version__)
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="Log debug messages.")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="Log warnings and errors only.")
    commands = parser.add_subparsers(dest="command", required=True)

    simulate = commands.add_parser("simulate", help="Simulate a Gaussian long-memory series.")
    simulate.add_argument("--model", choices=MODELS, required=True)
    simulate.add_argument("--alpha", type=open_unit_float, required=True)
    simulate.add_argument("--n", type=positive_int, required=True)
    simulate.add_argument("--seed", type=nonnegative_int, default=0)
    simulate.add_argument("--replication", type=nonnegative_int, default=0)
    simulate.add_argument("--out", required=True, help="CSV file to write.")
    _add_manifest_argument(simulate)

    estimate = commands.add_parser("estimate", help="Estimate the pole and the memory parameter.")
    _add_input_arguments(estimate)
    _add_bandwidth_arguments(estimate)
    estimate.add_argument("--w-table", default=None, help="CSV of (u, value) nodes replacing w.")
    estimate.add_argument("--level", type=float, default=0.95, help="Confidence level.")
    estimate.add_argument("--format", choices=("json", "csv"), default="json")
    estimate.add_argument(
        "--known-pole",
        type=float,
        default=None,
        help="Pole frequency in radians; skips the search.",
    )
    estimate.add_argument(
        "--with-log-periodogram",
        action="store_true",
        help="Also report the log-periodogram pole and memory estimates.",
    )
    estimate.add_argument("--bias-c", type=float, default=None, help="c in m = c n^(4/5).")
    estimate.add_argument(
        "--bias-log-g-dd",
        type=float,
        default=None,
        help="Second derivative of log g at the pole, for bias removal.",
    )
    estimate.add_argument("--out", default=None, help="Write the result here instead of stdout.")
    _add_manifest_argument(estimate)

    profile = commands.add_parser("profile", help="Export the memory-estimate profile.")
    _add_input_arguments(profile)
    _add_bandwidth_arguments(profile)
    profile.add_argument("--out", required=True, help="CSV file to write.")
    _add_manifest_argument(profile)

    montecarlo = commands.add_parser("montecarlo", help="Run a Monte Carlo study.")
    montecarlo.add_argument(
        "--config",
        required=True,
        help="JSON config file, or the name of a bundled config such as table1_reduced.",
    )
    montecarlo.add_argument(
        "--out",
        default=None,
        help="Output directory; a temporary directory is created when omitted.",
    )
    montecarlo.add_argument(
        "--workers",
        type=positive_int,
        default=None,
        help=f"Worker processes; defaults to ${WORKERS_ENV} or 1.",
    )
    montecarlo.add_argument("--reps", type=positive_int, default=None, help="Override the config's reps.")
    montecarlo.add_argument(
        "--base-seed", type=nonnegative_int, default=None, help="Override the config's base_seed."
    )

    replay = commands.add_parser("replay", help="Re-run the command recorded in a manifest.")
    replay.add_argument("manifest", help="Manifest JSON written by an earlier run.")

    return parser
