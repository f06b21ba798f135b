"""Bundled data."""
from __future__ import annotations

import csv
from importlib import resources

import numpy as np

from .errors import InputError
from .moments import Dataset

__all__ = ["ANIMALS_FILE", "animals_path", "load_animals", "transform_values"]

ANIMALS_FILE = "animals65.csv"


def animals_path():
    """Path of the 65-species brain/body weight table (columns species, body_kg, brain_g)."""
    return resources.files("rbetel").joinpath("data", ANIMALS_FILE)


def transform_values(values, transform: str):
    values = np.asarray(values, dtype=float)
    if transform == "none":
        return values
    if transform not in ("ln", "log10"):
        raise InputError(f"unknown transform {transform!r}; use none, ln or log10")
    if np.any(values <= 0):
        raise InputError("log transform needs strictly positive values")
    return np.log(values) if transform == "ln" else np.log10(values)


def load_animals(transform: str = "ln"):
    """Return ``(species, Dataset(x=log body, y=log brain))``.

    Natural logs reproduce the usual least-squares fit for this table,
    intercept 2.1717 and slope 0.5915.
    """
    with animals_path().open(newline="") as fh:
        rows = list(csv.DictReader(fh))
    species = [r["species"] for r in rows]
    body = transform_values([float(r["body_kg"]) for r in rows], transform)
    brain = transform_values([float(r["brain_g"]) for r in rows], transform)
    return species, Dataset(body, brain)
