"""Shipped per-dataset defaults: category maps and contrastive hyperparameters.

Category descriptions follow a mechanical rule reviewed by hand: lowercase
the raw label, turn ``#`` and ``_`` into spaces, prefix "the"; the attribute
GENERAL becomes an "overall" suffix in the laptop domain and is dropped in
the restaurant domain; OS reads "operating system", HARD_DISC "hard drive",
DESIGN_FEATURES "features". The laptop maps cover every entity#attribute
combination of the domain taxonomy (a superset of what any one data release
uses), which is harmless: unused entries never collide, and stats count
categories from data, not from the map.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from ..linearize import CategoryMap
from ..scl import SclConfig, load_scl_config, parse_scl_config

__all__ = [
    "DATASETS",
    "default_category_map",
    "default_scl_config",
    "resolve_category_map",
    "resolve_scl_config",
]

DATASETS = ("rest", "laptop", "laptop-l1")

_FILES = {
    "rest": ("categories_rest.tsv", "scl_rest.cfg"),
    "laptop": ("categories_laptop.tsv", "scl_laptop.cfg"),
    "laptop-l1": ("categories_laptop_l1.tsv", "scl_laptop_l1.cfg"),
}


def _canonical(name: str) -> str:
    key = name.strip().lower().replace("_", "-")
    if key not in _FILES:
        raise KeyError(f"unknown dataset {name!r}; expected one of {DATASETS}")
    return key


def _read(filename: str) -> str:
    return (resources.files(__package__) / filename).read_text(encoding="utf-8")


def default_category_map(dataset: str) -> CategoryMap:
    filename = _FILES[_canonical(dataset)][0]
    return CategoryMap.from_text(_read(filename), source=filename)


def default_scl_config(dataset: str) -> SclConfig:
    filename = _FILES[_canonical(dataset)][1]
    return parse_scl_config(_read(filename), source=filename)


def resolve_category_map(spec: str) -> CategoryMap:
    """Resolve a CLI/category-map argument: shipped dataset name or TSV path."""
    try:
        return default_category_map(spec)
    except KeyError:
        pass
    path = Path(spec)
    if path.exists():
        return CategoryMap.from_tsv(path)
    raise FileNotFoundError(f"category map {spec!r}: not a shipped dataset name or existing file")


def resolve_scl_config(spec: str, base: SclConfig | None = None) -> SclConfig:
    """Resolve an SclConfig argument: shipped dataset name or key=value file."""
    try:
        name = _canonical(spec)
    except KeyError:
        name = None
    if name is not None:
        filename = _FILES[name][1]
        return parse_scl_config(_read(filename), source=filename, base=base)
    path = Path(spec)
    if path.exists():
        return load_scl_config(path, base=base)
    raise FileNotFoundError(f"scl config {spec!r}: not a shipped dataset name or existing file")
