"""
Replication engine for the pole and memory estimators on simulated series.

Every replication r of a design cell (family, alpha, n) draws its series from
a generator keyed by (cell seed, r), where the cell seed is derived from the
base seed and the cell's own parameters. Replications can therefore run in
any order and on any number of worker processes, and a cell re-run on its own
reproduces its numbers. All requested estimators of a replication share the
same simulated series.
"""
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

import polefinder
from polefinder.errors import ConfigError, PoleFinderError
from polefinder.estimation.bandwidth import EstimatorConfig, bandwidth_defaults
from polefinder.estimation.estimators import (
    log_periodogram_alpha,
    log_periodogram_pole,
    pole_search,
    two_step_from_spectrum,
)
from polefinder.montecarlo.report import MCReport, summarize
from polefinder.simulation.davies_harte import replication_rng, synthesize
from polefinder.simulation.models import SimFamily, model_spectrum, true_pole_index
from polefinder.spectral.periodogram import averaged_periodogram, periodogram

log = logging.getLogger(__name__)

CHUNK_SIZE = 50


class Estimator(Enum):
    POLE_PSI = "POLE_PSI"
    POLE_LOG = "POLE_LOG"
    TWO_STEP_AT_HAT = "TWO_STEP_AT_HAT"
    TWO_STEP_AT_TRUE = "TWO_STEP_AT_TRUE"
    LOG_AT_TRUE = "LOG_AT_TRUE"
    LOG_AT_TILDE = "LOG_AT_TILDE"
    FIRST_STAGE_AT_HAT = "FIRST_STAGE_AT_HAT"
    LOG_AT_HAT = "LOG_AT_HAT"

    @property
    def is_pole(self) -> bool:
        return self in (Estimator.POLE_PSI, Estimator.POLE_LOG)


_OVERRIDE_KEYS = ("k", "k1", "m", "m1")


@dataclass(frozen=True)
class MCConfig:
    families: Tuple[SimFamily, ...]
    alphas: Tuple[float, ...]
    ns: Tuple[int, ...]
    reps: int
    base_seed: int = 0
    overrides: Dict[str, int] = field(default_factory=dict)
    estimators: Tuple[Estimator, ...] = tuple(Estimator)

    def __post_init__(self):
        if self.reps < 1:
            raise ConfigError(f"reps must be at least 1, got {self.reps}.")
        if not self.families or not self.alphas or not self.ns or not self.estimators:
            raise ConfigError("families, alphas, ns and estimators must be non-empty.")
        if any(not 0.0 < a < 1.0 for a in self.alphas):
            raise ConfigError(f"Every alpha must lie in (0, 1), got {list(self.alphas)}.")
        if any(n < 64 for n in self.ns):
            raise ConfigError(f"Every n must be at least 64, got {list(self.ns)}.")
        if self.base_seed < 0:
            raise ConfigError("base_seed must be nonnegative.")
        unknown = set(self.overrides) - set(_OVERRIDE_KEYS)
        if unknown:
            raise ConfigError(f"Unknown bandwidth override(s): {sorted(unknown)}.")

    @classmethod
    def from_dict(cls, data: Dict) -> "MCConfig":
        try:
            return cls(
                families=tuple(SimFamily.parse(f) for f in data["families"]),
                alphas=tuple(float(a) for a in data["alphas"]),
                ns=tuple(int(n) for n in data["ns"]),
                reps=int(data["reps"]),
                base_seed=int(data.get("base_seed", 0)),
                overrides={k: int(v) for k, v in (data.get("overrides") or {}).items()},
                estimators=tuple(
                    Estimator(e) for e in data.get("estimators", [e.value for e in Estimator])
                ),
            )
        except ConfigError:
            raise
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigError(f"Malformed Monte Carlo config: {e}")

    @classmethod
    def from_json(cls, path: Union[str, Path]) -> "MCConfig":
        try:
            with open(path) as f:
                data = json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigError(f"Config {path} is not valid JSON: {e}")
        return cls.from_dict(data)

    def to_dict(self) -> Dict:
        return {
            "families": [f.value for f in self.families],
            "alphas": list(self.alphas),
            "ns": list(self.ns),
            "reps": self.reps,
            "base_seed": self.base_seed,
            "overrides": dict(self.overrides),
            "estimators": [e.value for e in self.estimators],
        }

    def estimator_config(self, n: int) -> EstimatorConfig:
        return bandwidth_defaults(n).with_overrides(**self.overrides).validate(n)


def bundled_config_names() -> List[str]:
    configs = resources.files("polefinder.montecarlo") / "configs"
    return sorted(p.name for p in configs.iterdir() if p.name.endswith(".json"))


def load_config(name_or_path: Union[str, Path]) -> MCConfig:
    """Load a config from a file path, or from a bundled config by name."""
    path = Path(name_or_path)
    if path.is_file():
        return MCConfig.from_json(path)
    name = path.name if path.suffix == ".json" else f"{path.name}.json"
    bundled = resources.files("polefinder.montecarlo") / "configs" / name
    if bundled.is_file():
        with resources.as_file(bundled) as bundled_path:
            return MCConfig.from_json(bundled_path)
    raise ConfigError(
        f"No config file {name_or_path!s}; bundled configs are {bundled_config_names()}."
    )


def cell_seed(base_seed: int, family: SimFamily, alpha: float, n: int) -> int:
    """64-bit seed of one design cell, independent of the cell's position in a run."""
    family_code = list(SimFamily).index(family)
    sequence = np.random.SeedSequence([base_seed, family_code, int(round(alpha * 1e6)), n])
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True)
class CellTask:
    family: SimFamily
    alpha: float
    n: int
    seed: int
    config: EstimatorConfig
    estimators: Tuple[Estimator, ...]
    start: int
    stop: int


def estimate_replication(
    values: np.ndarray,
    family: SimFamily,
    alpha: float,
    cfg: EstimatorConfig,
    estimators: Sequence[Estimator],
) -> np.ndarray:
    """Errors (estimate minus truth) of the requested estimators on one series."""
    n = values.size
    s = true_pole_index(family, n)
    grid = periodogram(values)
    wanted = set(estimators)

    pole = log_pole = f_two_step = None
    if wanted & {Estimator.POLE_PSI, Estimator.TWO_STEP_AT_HAT,
                 Estimator.FIRST_STAGE_AT_HAT, Estimator.LOG_AT_HAT}:
        pole = pole_search(averaged_periodogram(grid, cfg.k1), cfg.k, cfg.psi)
    if wanted & {Estimator.POLE_LOG, Estimator.LOG_AT_TILDE}:
        log_pole = log_periodogram_pole(grid, cfg.k)
    if wanted & {Estimator.TWO_STEP_AT_HAT, Estimator.TWO_STEP_AT_TRUE}:
        f_two_step = averaged_periodogram(grid, cfg.m1)

    out = np.empty(len(estimators))
    for i, estimator in enumerate(estimators):
        if estimator is Estimator.POLE_PSI:
            out[i] = pole.q_hat - s
        elif estimator is Estimator.POLE_LOG:
            out[i] = log_pole.q_hat - s
        elif estimator is Estimator.TWO_STEP_AT_HAT:
            out[i] = two_step_from_spectrum(pole.q_hat, f_two_step, cfg.m, cfg.w).alpha - alpha
        elif estimator is Estimator.TWO_STEP_AT_TRUE:
            out[i] = two_step_from_spectrum(s, f_two_step, cfg.m, cfg.w).alpha - alpha
        elif estimator is Estimator.FIRST_STAGE_AT_HAT:
            out[i] = pole.profile.values[pole.q_hat] - alpha
        elif estimator is Estimator.LOG_AT_TRUE:
            out[i] = log_periodogram_alpha(s, grid, cfg.m).alpha - alpha
        elif estimator is Estimator.LOG_AT_TILDE:
            out[i] = log_periodogram_alpha(log_pole.q_hat, grid, cfg.m).alpha - alpha
        else:
            out[i] = log_periodogram_alpha(pole.q_hat, grid, cfg.m).alpha - alpha
    return out


def run_chunk(task: CellTask) -> np.ndarray:
    """Replications start..stop-1 of one cell; rows are in replication order."""
    spectrum = model_spectrum(task.family, task.alpha, task.n)
    rows = np.empty((task.stop - task.start, len(task.estimators)))
    for row, r in enumerate(range(task.start, task.stop)):
        values = synthesize(spectrum, replication_rng(task.seed, r))
        rows[row] = estimate_replication(
            values, task.family, task.alpha, task.config, task.estimators
        )
    return rows


def _cells(cfg: MCConfig):
    for family in cfg.families:
        for n in cfg.ns:
            for alpha in cfg.alphas:
                yield family, alpha, n


def run_mc(cfg: MCConfig, workers: int = 1) -> MCReport:
    """
    Run every (family, alpha, n) cell of ``cfg`` and aggregate bias, sd and MSE.

    Numeric results do not depend on ``workers``: replications are seeded
    individually and aggregated sequentially in (cell, replication) order. A
    cell whose model cannot be simulated is recorded under ``aborted``.
    """
    if workers < 1:
        raise ConfigError(f"workers must be at least 1, got {workers}.")
    report = MCReport(
        provenance={
            "base_seed": cfg.base_seed,
            "config": cfg.to_dict(),
            "bandwidths": {},
            "version": polefinder.__version__,
            "sd_convention": "sample standard deviation, reps - 1 divisor",
            "mse_convention": "bias^2 + sd^2 (reps - 1) / reps",
            "pole_units": "Fourier index",
        }
    )
    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for family, alpha, n in _cells(cfg):
            est_cfg = cfg.estimator_config(n)
            report.provenance["bandwidths"][str(n)] = est_cfg.as_dict()
            started = time.perf_counter()
            try:
                errors = _run_cell(family, alpha, n, cfg, est_cfg, pool)
            except PoleFinderError as e:
                log.error("Aborted cell %s alpha=%s n=%s: %s", family.value, alpha, n, e)
                report.aborted.append(
                    {"family": family.value, "alpha": alpha, "n": n, "reason": str(e)}
                )
                continue
            elapsed = time.perf_counter() - started
            for column, estimator in enumerate(cfg.estimators):
                report.records.append(
                    summarize(
                        errors[:, column],
                        family=family.value,
                        lambda0=family.pole,
                        alpha=alpha,
                        n=n,
                        estimator=estimator.value,
                        wall_time=elapsed,
                    )
                )
            log.info(
                "Finished cell %s alpha=%s n=%s (%s reps, %.1fs)",
                family.value, alpha, n, cfg.reps, elapsed,
            )
    finally:
        if pool is not None:
            pool.shutdown()
    return report


def _run_cell(
    family: SimFamily,
    alpha: float,
    n: int,
    cfg: MCConfig,
    est_cfg: EstimatorConfig,
    pool: Optional[ProcessPoolExecutor],
) -> np.ndarray:
    # Fails early with NotEmbeddable before any work is scheduled.
    model_spectrum(family, alpha, n)
    seed = cell_seed(cfg.base_seed, family, alpha, n)
    tasks = [
        CellTask(family, alpha, n, seed, est_cfg, tuple(cfg.estimators), start, min(start + CHUNK_SIZE, cfg.reps))
        for start in range(0, cfg.reps, CHUNK_SIZE)
    ]
    if pool is None:
        chunks = [run_chunk(task) for task in tasks]
    else:
        chunks = list(pool.map(run_chunk, tasks))
    return np.vstack(chunks)
