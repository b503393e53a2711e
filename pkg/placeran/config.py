"""Run settings shared by the subcommands

Values are layered: the dataclass defaults, then a JSON file, then
`PLACERAN_<FIELD>` environment variables, then explicit flags. A layer only
overrides the fields it actually sets.
"""

from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any, Callable, Mapping, Optional, Union

from placeran.domain import DrcCatalog, Topology, catalog_for, default_catalog, load_catalog
from placeran.errors import ConfigError
from placeran.pathgen import PathMetric
from placeran.program import ObjectiveMode
from placeran.solve import Backend, SolveLimits

logger = logging.getLogger(__name__)

ENV_PREFIX = "PLACERAN_"

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


@dataclass(frozen=True)
class RunConfig:
    """Settings of one command

    Attributes:
        k: Routes kept per RU.
        path_metric: `latency` or `hops`.
        time_limit: Wall seconds per stage, None for no limit.
        node_limit: Branching nodes per stage, None for no limit.
        solver: `highs` or `bnb`, the engine solving each stage.
        workers: Search threads.
        require_optimal: Fail with exit code 3 on an uncertified stage.
        objective_mode: `indicator` or `literal`.
        gap: Relative gap accepted from a stopped search.
        catalog: Path of a DRC catalog, the packaged one of the topology when None.
        seed: Scenario seed.
        log_level: Name of a logging level.
        reference_latency: Average link latency reported as 100%.
    """

    k: int = 4
    path_metric: str = "latency"
    time_limit: Optional[float] = None
    node_limit: Optional[int] = None
    solver: str = "highs"
    workers: int = 1
    require_optimal: bool = False
    objective_mode: str = "indicator"
    gap: float = 0.0
    catalog: Optional[str] = None
    seed: int = 0
    log_level: str = "WARNING"
    reference_latency: Optional[float] = None

    def validate(self):
        if self.k < 1:
            raise ConfigError("k must be at least 1", k=self.k)
        if self.workers < 1:
            raise ConfigError("workers must be at least 1", workers=self.workers)
        if self.time_limit is not None and self.time_limit <= 0:
            raise ConfigError("time limit must be positive", time_limit=self.time_limit)
        if self.node_limit is not None and self.node_limit <= 0:
            raise ConfigError("node limit must be positive", node_limit=self.node_limit)
        if self.gap < 0:
            raise ConfigError("gap cannot be negative", gap=self.gap)
        if self.seed < 0:
            raise ConfigError("seed must be non-negative", seed=self.seed)
        if self.reference_latency is not None and self.reference_latency <= 0:
            raise ConfigError(
                "reference latency must be positive", reference_latency=self.reference_latency
            )

    def limits(self) -> SolveLimits:
        return SolveLimits(
            time_budget=self.time_limit,
            node_budget=self.node_limit,
            require_optimal=self.require_optimal,
            workers=self.workers,
            gap_tolerance=self.gap,
            backend=Backend(self.solver),
        )

    def metric(self) -> PathMetric:
        return PathMetric(self.path_metric)

    def mode(self) -> ObjectiveMode:
        return ObjectiveMode(self.objective_mode)

    def load_catalog(self, topology: Optional[Topology] = None) -> DrcCatalog:
        """The configured catalog, else the packaged one matching `topology`"""

        if self.catalog is not None:
            return load_catalog(self.catalog)
        return catalog_for(topology) if topology is not None else default_catalog()


def _integer(value: Any) -> int:
    if isinstance(value, bool):
        raise ValueError("expected an integer")
    if isinstance(value, float):
        if not value.is_integer():
            raise ValueError("expected an integer")
        return int(value)
    return int(value)


def _real(value: Any) -> float:
    if isinstance(value, bool):
        raise ValueError("expected a number")
    return float(value)


def _flag(value: Any) -> bool:
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in ("1", "true", "yes", "on"):
        return True
    if text in ("0", "false", "no", "off"):
        return False
    raise ValueError("expected a boolean")


def _optional(parse: Callable[[Any], Any]) -> Callable[[Any], Any]:
    def parse_optional(value: Any) -> Any:
        if value is None or (isinstance(value, str) and value.strip().lower() in ("", "none")):
            return None
        return parse(value)

    return parse_optional


def _choice(*allowed: str) -> Callable[[Any], str]:
    def parse_choice(value: Any) -> str:
        text = str(value)
        if text not in allowed:
            raise ValueError(f"expected one of {', '.join(allowed)}")
        return text

    return parse_choice


def _level(value: Any) -> str:
    return _choice(*LOG_LEVELS)(str(value).upper())


# One parser per field, applied to values coming from any layer
PARSERS: dict[str, Callable[[Any], Any]] = {
    "k": _integer,
    "path_metric": _choice(*(m.value for m in PathMetric)),
    "time_limit": _optional(_real),
    "node_limit": _optional(_integer),
    "solver": _choice(*(b.value for b in Backend)),
    "workers": _integer,
    "require_optimal": _flag,
    "objective_mode": _choice(*(m.value for m in ObjectiveMode)),
    "gap": _real,
    "catalog": _optional(str),
    "seed": _integer,
    "log_level": _level,
    "reference_latency": _optional(_real),
}

FIELD_NAMES = tuple(f.name for f in fields(RunConfig))


def _coerce(values: Mapping[str, Any], origin: str) -> dict[str, Any]:
    coerced = {}
    for name, value in values.items():
        if name not in PARSERS:
            raise ConfigError(f"unknown setting '{name}' in {origin}", setting=name)
        try:
            coerced[name] = PARSERS[name](value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(
                f"bad value {value!r} for '{name}' in {origin}: {exc}", setting=name
            ) from exc
    return coerced


def read_config_file(path: Union[str, Path]) -> dict[str, Any]:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}", path=str(path)) from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config {path} must hold a JSON object", path=str(path))
    return _coerce(data, str(path))


def read_environment(environ: Mapping[str, str]) -> dict[str, Any]:
    """Settings given as `PLACERAN_<FIELD>` variables, other variables are ignored"""

    values = {
        name: environ[ENV_PREFIX + name.upper()]
        for name in FIELD_NAMES
        if ENV_PREFIX + name.upper() in environ
    }
    return _coerce(values, "environment")


def resolve_config(
    flags: Mapping[str, Any],
    config_path: Optional[Union[str, Path]] = None,
    environ: Optional[Mapping[str, str]] = None,
) -> RunConfig:
    """Merges the layers into one validated `RunConfig`

    Args:
        flags: Values given on the command line, None meaning not given.
        config_path: JSON file of settings.
        environ: Environment to read, `os.environ` when None.

    Raises:
        ConfigError: Unknown setting, unparsable value or invalid result.
    """

    config = RunConfig()
    layers = []
    if config_path is not None:
        layers.append(read_config_file(config_path))
    layers.append(read_environment(os.environ if environ is None else environ))
    layers.append(
        _coerce({name: value for name, value in flags.items() if value is not None}, "flags")
    )

    for layer in layers:
        config = replace(config, **layer)

    config.validate()
    logger.debug("resolved %s", config)
    return config
