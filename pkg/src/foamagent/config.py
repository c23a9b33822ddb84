"""Connection settings and their resolution order.

Each field resolves independently: an explicit CLI flag wins, then the
process environment, then the JSON config file, then the built-in
default.  The config file is plain JSON so the package runs on Python
3.10 without extra parsers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

from foamagent.errors import ConfigError

ENV_VARS = {
    "api_key": "FOAMAGENT_API_KEY",
    "endpoint": "FOAMAGENT_ENDPOINT",
    "model": "FOAMAGENT_MODEL",
}

DEFAULT_MODEL = "default-model"

_ALLOWED_KEYS = frozenset(ENV_VARS)


@dataclass(frozen=True)
class Settings:
    """Resolved backend connection settings."""

    api_key: str | None = None
    endpoint: str | None = None
    model: str = DEFAULT_MODEL


def load_config_file(path: str | Path) -> dict:
    """Read a JSON config file holding connection settings.

    Raises:
        ConfigError: Unreadable file, invalid JSON, a non-object top
            level, or a key that is not a known setting.
    """
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")
    unknown = set(data) - _ALLOWED_KEYS
    if unknown:
        raise ConfigError(
            f"config file {path} has unknown keys {sorted(unknown)}; "
            f"known keys are {sorted(_ALLOWED_KEYS)}"
        )
    for key, value in data.items():
        if value is not None and not isinstance(value, str):
            raise ConfigError(f"config file {path}: {key} must be a string")
    return data


def resolve_settings(
    flags: Mapping[str, str | None] | None = None,
    env: Mapping[str, str] | None = None,
    config_path: str | Path | None = None,
) -> Settings:
    """Resolve each connection setting: flag, then env, then file, then default."""
    flags = flags or {}
    env = env or {}
    file_values = load_config_file(config_path) if config_path is not None else {}

    def pick(field: str, default: str | None) -> str | None:
        flag = flags.get(field)
        if flag is not None:
            return flag
        env_value = env.get(ENV_VARS[field])
        if env_value is not None and env_value != "":
            return env_value
        file_value = file_values.get(field)
        if file_value is not None:
            return file_value
        return default

    return Settings(
        api_key=pick("api_key", None),
        endpoint=pick("endpoint", None),
        model=pick("model", DEFAULT_MODEL),
    )
