from __future__ import annotations

import hashlib
import json
import logging
from pathlib import Path
from typing import Any, List, Mapping, Optional, Tuple, Union

import yaml
from pydantic import ValidationError

from ..exceptions import ConfigError
from ..models.experiment import ExperimentConfig
from .settings import get_settings

logger = logging.getLogger(__name__)


def _errors_from_validation(exc: ValidationError) -> List[Tuple[str, str]]:
    errors = []
    for err in exc.errors():
        loc = ".".join(str(part) for part in err.get("loc", ())) or "<root>"
        errors.append((loc, err.get("msg", "invalid value")))
    return errors


def _check_widths(cfg: ExperimentConfig) -> List[Tuple[str, str]]:
    limit = get_settings().max_qubits
    errors = []
    for i, spec in enumerate(cfg.channels):
        if spec.n > limit:
            errors.append((f"channels.{i}.n", f"width {spec.n} exceeds QFTV_MAX_QUBITS={limit}"))
    for i, inst in enumerate(cfg.instances):
        if inst.n > limit:
            errors.append((f"instances.{i}.n", f"width {inst.n} exceeds QFTV_MAX_QUBITS={limit}"))
    if cfg.population is not None:
        for n in cfg.population.n:
            if n > limit:
                errors.append(("population.n", f"width {n} exceeds QFTV_MAX_QUBITS={limit}"))
    return errors


def parse_config(data: Any, source: str = "<config>") -> ExperimentConfig:
    """Validate an already-decoded document; every problem is reported at once."""
    if not isinstance(data, Mapping):
        raise ConfigError(f"{source}: top level must be a mapping", [("<root>", "expected a mapping")])
    try:
        cfg = ExperimentConfig.model_validate(dict(data))
    except ValidationError as exc:
        errors = _errors_from_validation(exc)
        raise ConfigError(f"{source}: {len(errors)} validation error(s)", errors) from exc
    width_errors = _check_widths(cfg)
    if width_errors:
        raise ConfigError(f"{source}: register width limit exceeded", width_errors)
    return cfg


def load_config(path: Union[str, Path], seed_override: Optional[int] = None) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}", [("<file>", str(exc))]) from exc
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: not valid YAML", [("<yaml>", str(exc))]) from exc
    cfg = parse_config(data, str(path))
    if seed_override is not None:
        cfg = with_seed(cfg, seed_override)
    logger.info("Loaded %s config from %s (seed %d)", cfg.suite, path, cfg.seed)
    return cfg


def with_seed(cfg: ExperimentConfig, seed: int) -> ExperimentConfig:
    # Revalidate so an out-of-range override is reported like any other field.
    data = cfg.model_dump(mode="json")
    data["seed"] = seed
    return parse_config(data, "<seed override>")


def config_hash(cfg: ExperimentConfig) -> str:
    """sha256 of the canonical JSON form of the validated config."""
    canonical = json.dumps(cfg.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


__all__ = [
    "parse_config",
    "load_config",
    "with_seed",
    "config_hash",
]
