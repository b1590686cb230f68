"""Minimal key-value config files: ``key = value`` lines, ``#`` comments.

Used for design files and scenario files.  Parsing is strict: unknown keys
and malformed lines are rejected with the offending line number.
"""

from __future__ import annotations

import os


class ConfigError(ValueError):
    """Config file rejected; message carries file and line context."""


def _convert(raw: str, caster, path, lineno):
    try:
        if caster is bool:
            low = raw.strip().lower()
            if low in ("true", "yes", "1", "on"):
                return True
            if low in ("false", "no", "0", "off"):
                return False
            raise ValueError(raw)
        return caster(raw.strip())
    except ValueError:
        raise ConfigError(
            f"{path}:{lineno}: cannot parse {raw!r} as {caster.__name__}")


def parse_kv_file(path, allowed: dict | None = None) -> dict:
    """Parse a key-value file.

    ``allowed`` maps key -> type; when given, unknown keys are an error and
    values are converted.  Without it values stay strings.
    """
    result = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            if "=" not in stripped:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, _, raw = stripped.partition("=")
            key = key.strip()
            if not key:
                raise ConfigError(f"{path}:{lineno}: empty key")
            if key in result:
                raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
            if allowed is not None:
                if key not in allowed:
                    raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
                result[key] = _convert(raw, allowed[key], path, lineno)
            else:
                result[key] = raw.strip()
    return result


def parse_list(raw: str, caster=float) -> list:
    return [caster(part.strip()) for part in raw.split(",") if part.strip()]


def output_dir() -> str:
    """Output directory for traces and reports (SPOKESIM_OUT, default ./out)."""
    return os.environ.get("SPOKESIM_OUT", "out")
