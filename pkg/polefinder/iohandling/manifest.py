"""
Run manifests: the resolved parameters and argument vector of a command,
written next to its results so the run can be repeated from the manifest alone.
"""
import json
import logging
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Dict, List, Union

import polefinder
from polefinder.errors import ConfigError

log = logging.getLogger(__name__)

MANIFEST_SCHEMA_VERSION = 1
MANIFEST_SUFFIX = ".manifest.json"


@dataclass(frozen=True)
class RunManifest:
    command: str
    parameters: Dict
    argv: List[str]
    version: str = polefinder.__version__
    timestamp: str = field(
        default_factory=lambda: datetime.now(timezone.utc).isoformat(timespec="seconds")
    )
    schema_version: int = MANIFEST_SCHEMA_VERSION

    def to_json(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        with open(path, "w") as f:
            json.dump(asdict(self), f, indent=2)
        log.info("Successfully wrote manifest %s", path)
        return path

    @classmethod
    def from_json(cls, path: Union[str, Path]) -> "RunManifest":
        try:
            with open(path) as f:
                data = json.load(f)
        except FileNotFoundError:
            raise ConfigError(f"Manifest {path} does not exist.")
        except json.JSONDecodeError as e:
            raise ConfigError(f"Manifest {path} is not valid JSON: {e}")
        try:
            manifest = cls(**data)
        except TypeError as e:
            raise ConfigError(f"Manifest {path} is malformed: {e}")
        if manifest.version != polefinder.__version__:
            log.warning(
                "Manifest was written by polefinder %s, running %s",
                manifest.version,
                polefinder.__version__,
            )
        return manifest


def manifest_path_for(output: Union[str, Path]) -> Path:
    """x.csv -> x.csv.manifest.json; a directory gets manifest.json inside it."""
    output = Path(output)
    if output.is_dir():
        return output / "manifest.json"
    return output.with_name(output.name + MANIFEST_SUFFIX)
