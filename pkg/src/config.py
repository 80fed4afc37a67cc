"""Configuration for the triangle-jacobi command line."""
# Copyright 2023 Canonical Ltd.
# See LICENSE file for licensing details.

import logging
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Mapping, Optional

import yaml
from jsonschema import exceptions, validate
from triangle_jacobi.v0.relations import AUTO
from triangle_jacobi.v0.report import BOTH, DEGREE, SAMPLED, SYMBOLIC, VARIABLE

from exceptions import ConfigError

logger = logging.getLogger(__name__)


class Config:
    """Constants of the triangle-jacobi command line."""

    ROOT_DIR = Path(__file__).resolve().parents[1]
    OPTIONS_PATH = ROOT_DIR / "config.yaml"
    CATALOGUE_ENV = "TRIANGLE_JACOBI_CATALOGUE"
    DEFAULT_CATALOGUE = Path(__file__).resolve().parent / "catalogue" / "rank_two_jacobi.txt"
    SEED_MAX = 2**64 - 1

    class ExitCode:
        """Process exit statuses."""

        PASSED = 0
        FAILED = 1
        USAGE = 2

    class Modes:
        """Command-line mode names and the report mode each one selects."""

        NAMES = {"symbolic": SYMBOLIC, "sampled": SAMPLED, "auto": AUTO}

    class Representations:
        """Command-line representation names."""

        NAMES = (VARIABLE, DEGREE, BOTH)

    class Suites:
        """Verification suites selectable with --suite."""

        RELATIONS = "relations"
        STRUCTURE = "structure"
        SUBALGEBRAS = "subalgebras"
        SYMMETRY = "symmetry"
        JACOBI_IDENTITY = "jacobi-identity"
        UNIVARIATE = "univariate"
        DIFFERENTIAL = "differential"
        BISPECTRAL = "bispectral"
        ORTHOGONALITY = "orthogonality"
        MUTATIONS = "mutations"
        ALL = "all"
        ORDER = (
            RELATIONS,
            STRUCTURE,
            SUBALGEBRAS,
            SYMMETRY,
            JACOBI_IDENTITY,
            UNIVARIATE,
            DIFFERENTIAL,
            BISPECTRAL,
            ORTHOGONALITY,
            MUTATIONS,
        )
        APPENDIX_A = "appendixA"
        ALIASES = {APPENDIX_A: UNIVARIATE}
        NAMES = ORDER + (ALL,) + tuple(ALIASES)

    class Gram:
        """Gram matrix mode selection."""

        SYMBOLIC_N_MAX = 3

    class Logging:
        """Root logger settings."""

        LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")
        FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


OPTIONS_JSON_SCHEMA = {
    "$schema": "http://json-schema.org/draft-04/schema#",
    "type": "object",
    "title": "run configuration",
    "properties": {
        "nmax": {"type": "integer", "minimum": 0},
        "mode": {"type": "string", "enum": list(Config.Modes.NAMES)},
        "samples": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer", "minimum": 0, "maximum": Config.SEED_MAX},
        "rep": {"type": "string", "enum": list(Config.Representations.NAMES)},
        "suite": {"type": "string", "enum": list(Config.Suites.NAMES)},
        "out": {"type": "string"},
        "catalogue": {"type": "string"},
        "workers": {"type": "integer", "minimum": 1},
        "timing": {"type": "boolean"},
        "log-level": {"type": "string", "enum": list(Config.Logging.LEVELS)},
    },
    "required": [
        "nmax",
        "mode",
        "samples",
        "seed",
        "rep",
        "suite",
        "out",
        "catalogue",
        "workers",
        "timing",
        "log-level",
    ],
    "additionalProperties": False,
}


@dataclass(frozen=True)
class RunConfig:
    """Settings of one verification run.

    mode holds the report mode (symbolic, sampled-exact or auto), not the command-line word.
    """

    n_max: int
    mode: str
    samples: int
    seed: int
    representation: str
    suite: str
    output: Optional[Path]
    catalogue: Optional[Path]
    workers: int = 1
    timing: bool = False
    log_level: str = "INFO"

    @classmethod
    def from_options(cls, options: Mapping[str, Any]) -> "RunConfig":
        """Validate a merged option mapping and build the run configuration."""
        try:
            validate(instance=dict(options), schema=OPTIONS_JSON_SCHEMA)
        except exceptions.ValidationError as e:
            raise ConfigError(f"invalid configuration: {e.message}") from e
        return cls(
            n_max=options["nmax"],
            mode=Config.Modes.NAMES[options["mode"]],
            samples=options["samples"],
            seed=options["seed"],
            representation=options["rep"],
            suite=Config.Suites.ALIASES.get(options["suite"], options["suite"]),
            output=Path(options["out"]) if options["out"] else None,
            catalogue=Path(options["catalogue"]) if options["catalogue"] else None,
            workers=options["workers"],
            timing=options["timing"],
            log_level=options["log-level"],
        )

    def provenance(self) -> Dict[str, Any]:
        """The settings that determine report content, as recorded in the report document."""
        return {
            "n_max": self.n_max,
            "mode": self.mode,
            "samples": self.samples,
            "seed": self.seed,
            "representation": self.representation,
            "suite": self.suite,
        }

    def catalogue_path(self) -> Path:
        """Catalogue from the configuration, else the environment, else the bundled one."""
        if self.catalogue is not None:
            return self.catalogue
        from_env = os.environ.get(Config.CATALOGUE_ENV)
        if from_env:
            return Path(from_env)
        return Config.DEFAULT_CATALOGUE


def _read_yaml(path: Path) -> Any:
    try:
        return yaml.safe_load(path.read_text())
    except OSError as e:
        raise ConfigError(f"cannot read configuration {path}: {e.strerror}") from e
    except yaml.YAMLError as e:
        raise ConfigError(f"cannot parse configuration {path}: {e}") from e


def default_options(path: Path = Config.OPTIONS_PATH) -> Dict[str, Any]:
    """Defaults declared under `options:` in config.yaml."""
    declared = _read_yaml(path)
    if not isinstance(declared, dict) or not isinstance(declared.get("options"), dict):
        raise ConfigError(f"{path} has no options mapping")
    return {name: option["default"] for name, option in declared["options"].items()}


def user_options(path: Path) -> Dict[str, Any]:
    """Options from a user YAML file, a flat mapping of option names to values."""
    content = _read_yaml(path)
    if content is None:
        return {}
    if not isinstance(content, dict):
        raise ConfigError(f"{path} must hold a mapping of option names to values")
    return content


def load_run_config(
    flags: Mapping[str, Any],
    config_file: Optional[Path] = None,
    options_path: Path = Config.OPTIONS_PATH,
) -> RunConfig:
    """Merge config.yaml defaults, the user file and the flags given, in that precedence."""
    options = default_options(options_path)
    if config_file is not None:
        options.update(user_options(config_file))
        logger.debug("loaded configuration file %s", config_file)
    options.update({name: value for name, value in flags.items() if value is not None})
    return RunConfig.from_options(options)
