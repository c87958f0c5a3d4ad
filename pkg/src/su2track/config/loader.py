from __future__ import annotations

import json
import os
from copy import deepcopy
from functools import lru_cache
from pathlib import Path
from typing import Any, Mapping

import yaml

_CONFIG_ROOT = Path(__file__).resolve().parents[3] / "config"


def _load_yaml(path: Path) -> dict[str, Any]:
    if not path.exists():
        raise FileNotFoundError(f"Config file not found: {path}")

    with path.open("r", encoding="utf-8") as fh:
        data = yaml.safe_load(fh) or {}
    if not isinstance(data, dict):
        raise ValueError(f"Expected mapping in config file {path}")
    return data


def _coerce_env_value(value: str) -> Any:
    lowered = value.lower()
    if lowered in {"true", "false"}:
        return lowered == "true"
    if lowered in {"null", "none"}:
        return None
    for cast in (int, float):
        try:
            return cast(value)
        except ValueError:
            pass
    if value.startswith("[") and value.endswith("]"):
        try:
            return json.loads(value)
        except json.JSONDecodeError:  # lenient: keep the raw string
            return value
    return value


def _apply_env_overrides(config: dict[str, Any], environ: Mapping[str, str] | None = None) -> dict[str, Any]:
    """Apply ``SECTION__KEY[__SUB]=value`` variables whose first segment names a top-level section."""

    result = deepcopy(config)
    environ = os.environ if environ is None else environ

    def _resolve_key(mapping: dict[str, Any], key: str) -> str:
        for existing in mapping:
            if existing.lower() == key:
                return existing
        return key

    for env_key, env_value in environ.items():
        if "__" not in env_key:
            continue
        parts = [p.lower() for p in env_key.split("__") if p]
        if len(parts) < 2:
            continue
        if not any(existing.lower() == parts[0] for existing in result):
            continue
        cursor: Any = result
        for segment in parts[:-1]:
            actual = _resolve_key(cursor, segment)
            if actual not in cursor or not isinstance(cursor[actual], dict):
                cursor[actual] = {}
            cursor = cursor[actual]
        cursor[_resolve_key(cursor, parts[-1])] = _coerce_env_value(env_value)
    return result


def merge_config(base: Mapping[str, Any], override: Mapping[str, Any]) -> dict[str, Any]:
    """Recursive merge; mappings merge key by key, everything else is replaced."""

    result = deepcopy(dict(base))
    for key, value in override.items():
        if isinstance(value, Mapping) and isinstance(result.get(key), Mapping):
            result[key] = merge_config(result[key], value)
        else:
            result[key] = deepcopy(value)
    return result


def config_path(name: str) -> Path:
    return _CONFIG_ROOT / name


@lru_cache(maxsize=None)
def _cached(name: str) -> dict[str, Any]:
    return _load_yaml(config_path(name))


def load_config(name: str) -> dict[str, Any]:
    """Load a YAML config by filename relative to the ``config`` directory."""

    return _apply_env_overrides(_cached(name))


def load_defaults() -> dict[str, Any]:
    return load_config("defaults.yaml")


def load_config_file(path: str | Path | None = None) -> dict[str, Any]:
    """Defaults merged with ``path`` (when given), then environment overrides."""

    base = _cached("defaults.yaml")
    if path is not None:
        base = merge_config(base, _load_yaml(Path(path)))
    return _apply_env_overrides(base)


__all__ = ["config_path", "load_config", "load_defaults", "load_config_file", "merge_config"]
