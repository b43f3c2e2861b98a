"""Preset experiment configs shipped as YAML files next to this module."""

import logging
from pathlib import Path

import yaml

from gchains.errors import ConfigError

logger = logging.getLogger(__name__)


def get_preset_dir() -> Path:
    """Get the path to the presets directory."""
    return Path(__file__).parent


def load_yaml_file(filename: str) -> dict:
    """Load a single YAML file from the presets directory."""
    filepath = get_preset_dir() / filename
    if not filepath.exists():
        return {}
    with open(filepath, 'r') as f:
        return yaml.safe_load(f) or {}


def preset_names() -> list:
    return sorted(p.stem for p in get_preset_dir().glob('*.yaml'))


def load_preset(name: str) -> dict:
    """The config document of a preset; unknown names raise ConfigError."""
    doc = load_yaml_file(f"{name}.yaml")
    if not doc:
        raise ConfigError('preset', f"unknown preset {name!r} (one of {', '.join(preset_names())})")
    return doc


def list_presets() -> list:
    """
    Catalog of presets in name order.

    Returns:
        list: dicts with keys name, anchor, description, experiments
    """
    catalog = []
    for name in preset_names():
        doc = load_yaml_file(f"{name}.yaml")
        catalog.append({
            'name': name,
            'anchor': doc.get('anchor', ''),
            'description': doc.get('description', ''),
            'experiments': [e.get('label', e.get('kind')) for e in doc.get('experiments', [])],
        })
    logger.debug("[presets] %d presets in %s", len(catalog), get_preset_dir())
    return catalog
