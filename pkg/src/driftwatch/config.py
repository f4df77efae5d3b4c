"""Presets, config-file parsing, and run manifests.

Config files are flat text: one `section.key = value` per line, values as
JSON literals, `#` starts a comment. Example::

    # tuned for sharp level shifts
    detector.window_size = 15
    detector.bin_threshold = 0.65
    simulate.noise_sd = 1.0

Unknown keys inside a section the running command consumes are an error;
sections aimed at other subcommands are left alone.

Every output directory gets a `manifest.json` capturing tool version, the
exact argv, the resolved seed, and every parameter that shaped the run —
enough to reproduce the outputs bit-for-bit by replaying the argv. The
manifest is the only place a wall-clock timestamp appears.
"""

from __future__ import annotations

import json
from datetime import datetime, timezone
from pathlib import Path

from .errors import ConfigError

MANIFEST_NAME = "manifest.json"

_SPRT_COMMON = {
    "bin_threshold": 0.65,
    "p_null": 0.45,
    "p_alt": 0.5,
    "alpha": 0.05,
    "beta": 0.005,
    "k": 1.0,
}

#: Named starting points for the detector; keys match detector parameters.
PRESETS = {
    "shock": {"window_size": 15, **_SPRT_COMMON},
    "slow-mean": {"window_size": 35, **_SPRT_COMMON},
    "periodic": {"window_size": 25, **_SPRT_COMMON},
    "alt-65": {"window_size": 15, **{**_SPRT_COMMON, "p_alt": 0.65}},
}


def preset_params(name: str) -> dict:
    """A copy of the named preset's parameter dict."""
    try:
        return dict(PRESETS[name])
    except KeyError:
        raise ConfigError(
            f"unknown preset {name!r}; available: {', '.join(sorted(PRESETS))}"
        ) from None


def parse_config_text(text: str) -> dict:
    """Parse `section.key = value` lines into {section: {key: value}}.

    Values are JSON literals (numbers, strings, booleans, null, lists).
    Blank lines and `#` comments are skipped. Malformed lines raise
    ConfigError with their line number.
    """
    sections: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {lineno}: expected 'section.key = value'")
        dotted, _, literal = line.partition("=")
        dotted = dotted.strip()
        literal = literal.strip()
        if "." not in dotted:
            raise ConfigError(
                f"config line {lineno}: key {dotted!r} needs a 'section.' prefix"
            )
        section, _, key = dotted.partition(".")
        if not section or not key:
            raise ConfigError(f"config line {lineno}: malformed key {dotted!r}")
        try:
            value = json.loads(literal)
        except json.JSONDecodeError:
            raise ConfigError(
                f"config line {lineno}: value {literal!r} is not a JSON literal"
            ) from None
        sections.setdefault(section, {})[key] = value
    return sections


def load_config(path) -> dict:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {p}: {exc}") from None
    return parse_config_text(text)


def section_params(config: dict, section: str, allowed) -> dict:
    """The section's key/value pairs, rejecting keys not in `allowed`."""
    params = dict(config.get(section, {}))
    allowed = set(allowed)
    for key in params:
        if key not in allowed:
            dotted = f"{section}.{key}"
            raise ConfigError(f"unknown key {dotted!r} in config file")
    return params


def resolve_seed(
    cli_seed: int | None,
    config_seed: int | None,
    env_seed: str | None,
    default: int = 0,
) -> int:
    """Seed precedence: command line, then config file, then environment."""
    if cli_seed is not None:
        return int(cli_seed)
    if config_seed is not None:
        return int(config_seed)
    if env_seed is not None:
        try:
            return int(env_seed)
        except ValueError:
            raise ConfigError(
                f"environment seed must be an integer, got {env_seed!r}"
            ) from None
    return default


def build_manifest(
    command: str,
    argv: list,
    seed: int,
    parameters: dict,
    outputs: list,
    defaults_applied: dict | None = None,
) -> dict:
    from . import __version__

    manifest = {
        "tool": "driftwatch",
        "version": __version__,
        "command": command,
        "argv": list(argv),
        "seed": seed,
        "parameters": parameters,
        "outputs": sorted(outputs),
        "created_utc": datetime.now(timezone.utc).isoformat(),
    }
    if defaults_applied:
        manifest["defaults_applied"] = defaults_applied
    return manifest


def write_manifest(out_dir, manifest: dict) -> Path:
    path = Path(out_dir) / MANIFEST_NAME
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def read_manifest(out_dir) -> dict:
    path = Path(out_dir) / MANIFEST_NAME
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read manifest {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"manifest {path} is not valid JSON: {exc}") from None
