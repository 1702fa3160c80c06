from __future__ import annotations

import os
from dataclasses import dataclass, field, fields
from dataclasses import replace as dc_replace
from importlib import resources
from importlib.abc import Traversable
from pathlib import Path
from typing import Any, Dict, Optional

from dotenv import dotenv_values, load_dotenv

from core.constants.constants import Constants
from core.logging.logging import Logger
from povm_coherence.enums.extension_kind import ExtensionKind
from povm_coherence.enums.output import OutputFormat
from povm_coherence.errors import ConfigurationError

load_dotenv()

# ================================
#          HELPER
# ================================


def env_int(key: str, default: int | None) -> Optional[int]:
    raw = os.getenv(key, None if default is None else str(default))
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError as e:
        raise ConfigurationError(f"Invalid integer for {key}={raw!r}") from e


def env_float(key: str, default: float) -> float:
    raw = os.getenv(key)
    if raw is None or raw.strip() == "":
        return default
    try:
        return float(raw)
    except ValueError as e:
        raise ConfigurationError(f"Invalid number for {key}={raw!r}") from e


def env_str(key: str, default: str) -> str:
    raw = os.getenv(key)
    return default if raw is None or raw.strip() == "" else raw.strip().lower()


def _coerce(name: str, raw: Any, like: Any) -> Any:
    """Convert a config-file string to the type of the current field value."""
    if raw is None:
        return like
    try:
        if isinstance(like, bool):
            return str(raw).strip().lower() in {"1", "true", "t", "yes", "y", "on"}
        if isinstance(like, int):
            return int(raw)
        if isinstance(like, float):
            return float(raw)
    except ValueError as e:
        raise ConfigurationError(f"Invalid value for {name}: {raw!r}") from e
    return str(raw).strip().lower()


# ================================
#          CONFIGURATION
# ================================


@dataclass
class Configuration:
    tol: float = field(default_factory=lambda: env_float("POVM_TOL", Constants.COMPLETENESS_TOL))
    incoherence_tol: float = field(default_factory=lambda: env_float("POVM_INCOHERENCE_TOL",
                                                                      Constants.INCOHERENCE_TOL))
    feas_threshold: float = field(default_factory=lambda: env_float("POVM_FEAS_THRESHOLD", Constants.FEAS_THRESHOLD))
    solver_tol: float = field(default_factory=lambda: env_float("POVM_SOLVER_TOL", Constants.SOLVER_TOL))
    max_iters: int = field(default_factory=lambda: env_int("POVM_MAX_ITERS", Constants.SOLVER_MAX_ITERS))
    seed: int = field(default_factory=lambda: env_int("POVM_SEED", 0))
    threads: int = field(default_factory=lambda: env_int("POVM_THREADS", os.cpu_count() or 1))
    grid: str = field(default_factory=lambda: env_str("POVM_GRID", Constants.DEFAULT_GRID))
    kind: str = field(default_factory=lambda: env_str("POVM_KIND", ExtensionKind.MINIMAL.value))
    output_format: str = field(default_factory=lambda: env_str("POVM_FORMAT", OutputFormat.JSON.value))
    sphere_points: int = field(default_factory=lambda: env_int("POVM_SPHERE_POINTS", Constants.SPHERE_POINTS))
    suite_budget: float = field(default_factory=lambda: env_float("POVM_SUITE_BUDGET", Constants.SUITE_BUDGET_SECONDS))

    # ================================
    #          FACTORIES
    # ================================

    @classmethod
    def config_source_detection(cls, cli_path: Optional[str] = None) -> Optional[Path | Traversable]:
        """
        Precedence:
        1) CLI --config / --povm-config
        2) ENV POVM_CONFIG_PATH
        3) Package resource: resources/povm_coherence/defaults.env
        """
        if cli_path:
            p = Path(cli_path).expanduser()
            if not p.exists():
                raise ConfigurationError(f"Config file {cli_path} does not exist")
            Logger.info(f"Loading config from {cli_path}")
            return p

        path_from_env = os.getenv("POVM_CONFIG_PATH")
        if path_from_env:
            p = Path(path_from_env).expanduser()
            if not p.exists():
                raise ConfigurationError(f"POVM_CONFIG_PATH points to missing file {path_from_env}")
            Logger.info(f"Loading config from env {path_from_env}")
            return p

        try:
            p = resources.files(Constants.RESOURCE_PACKAGE) / "defaults.env"
            if p.is_file():
                Logger.debug("Loading default config from resources")
                return p
        except ModuleNotFoundError:
            Logger.debug("No default configuration file")
        return None

    @classmethod
    def from_sources(cls, *, cli_config_path: Optional[str] = None, **overrides) -> "Configuration":
        """
        Defaults < ENV/.env < config file < explicit overrides (None overrides are ignored).

        Keys in the config file are field names, case-insensitive, with or without the POVM_ prefix.
        """
        cfg = cls()
        p = cls.config_source_detection(cli_config_path)
        if p is not None:
            with p.open("r", encoding="utf-8") as stream:
                file_values = dotenv_values(stream=stream)
            cfg = cfg._merge_file(file_values)

        cfg = cfg.replace(**overrides)
        cfg.validate()
        Logger.debug(f"Configuration: {cfg.to_dict()}")
        return cfg

    def _merge_file(self, values: Dict[str, Optional[str]]) -> "Configuration":
        known = {f.name for f in fields(self)}
        updates: Dict[str, Any] = {}
        for key, raw in values.items():
            name = key.strip().lower()
            name = name[len("povm_"):] if name.startswith("povm_") else name
            name = "output_format" if name == "format" else name
            if name not in known:
                Logger.warning(f"Ignoring unknown config key {key!r}")
                continue
            updates[name] = _coerce(name, raw, getattr(self, name))
        return dc_replace(self, **updates)

    def replace(self, **overrides) -> "Configuration":
        """Return a new configuration with non-None overrides applied."""
        updates = {k: v for k, v in overrides.items() if v is not None}
        for key in ("grid", "kind", "output_format"):
            if key in updates:
                updates[key] = str(updates[key]).strip().lower()
        return dc_replace(self, **updates)

    def validate(self) -> "Configuration":
        for name in ("tol", "incoherence_tol", "feas_threshold", "solver_tol", "suite_budget"):
            if not getattr(self, name) > 0:
                raise ConfigurationError(f"{name} must be positive, got {getattr(self, name)!r}")
        if self.max_iters < 1:
            raise ConfigurationError(f"max_iters must be positive, got {self.max_iters}")
        if self.threads < 1:
            raise ConfigurationError(f"threads must be at least 1, got {self.threads}")
        if self.sphere_points < 1:
            raise ConfigurationError(f"sphere_points must be positive, got {self.sphere_points}")
        if self.kind not in {k.value for k in ExtensionKind}:
            raise ConfigurationError(f"Unknown extension kind {self.kind!r}")
        if self.output_format not in {f.value for f in OutputFormat}:
            raise ConfigurationError(f"Unknown output format {self.output_format!r}")
        parts = self.grid.split("x")
        if len(parts) != 2 or not all(s.isdigit() and int(s) >= 2 for s in parts):
            raise ConfigurationError(f"Grid must look like NxM with N, M >= 2, got {self.grid!r}")
        return self

    # ================================
    #          DEBUG / LOGGING
    # ================================

    def to_dict(self) -> Dict[str, Any]:
        return {f.name: getattr(self, f.name) for f in fields(self)}
