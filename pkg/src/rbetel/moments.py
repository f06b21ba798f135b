"""Moment functions for location and simple linear regression models.

Rows are built for every observation passed in; indicator masking is left
to the caller (selecting active rows is equivalent to multiplying each row
by s_i before forming weighted sums).
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ConfigurationError, DegenerateScaleWarning, InputError

__all__ = [
    "MAD_CONSISTENCY",
    "KEY_CONDITIONS",
    "Dataset",
    "MomentModel",
    "huber",
    "raw_mad",
    "mad_anchor",
    "MAD_RULES",
    "scaled_mad",
    "location_g",
    "regression_g",
    "parse_keys",
]

MAD_CONSISTENCY = 1.4826

# fixed stacking order of key-condition columns
KEY_CONDITIONS = ("third_moment", "huber", "mad_scale", "robust_scale")

_FAMILY_KEYS = {
    "location": {"third_moment", "huber", "mad_scale"},
    "linear_regression": {"third_moment", "huber", "robust_scale"},
    "custom": set(),
}

_ALIASES = {
    "c1": "third_moment",
    "c2": "huber",
    "third": "third_moment",
    "mad": "mad_scale",
    "scale": "robust_scale",
}


def parse_keys(spec, family: str = "location") -> frozenset:
    """Parse key-condition names such as ``"C1,C2,C3"`` or ``["huber"]``.

    ``C3`` means the scale anchor of the family: ``mad_scale`` for location
    models and ``robust_scale`` for regression.
    """
    if spec is None:
        return frozenset()
    if isinstance(spec, str):
        items = [t for t in (p.strip() for p in spec.split(",")) if t and t.lower() != "none"]
    else:
        items = list(spec)
    keys = set()
    for item in items:
        name = str(item).strip().lower()
        if name == "c3":
            name = "robust_scale" if family == "linear_regression" else "mad_scale"
        name = _ALIASES.get(name, name)
        if name not in KEY_CONDITIONS:
            raise ConfigurationError(f"unknown key condition {item!r}")
        keys.add(name)
    return frozenset(keys)


def huber(eps, eps0: float):
    """Clipped identity ``clip(eps / eps0, -1, 1)``.

    Works elementwise on arrays; returns a float for scalar input.
    """
    if not eps0 > 0:
        raise ConfigurationError("eps0 must be positive")
    out = np.clip(np.asarray(eps, dtype=float) / eps0, -1.0, 1.0)
    return float(out) if out.ndim == 0 else out


def raw_mad(x) -> float:
    x = np.asarray(x, dtype=float).ravel()
    if x.size < 2:
        raise InputError("MAD needs at least two observations")
    return float(np.median(np.abs(x - np.median(x))))


MAD_RULES = ("normal", "raw")


def mad_anchor(x, rule: str = "normal") -> float:
    """Scale anchor for the MAD key: ``scaled_mad`` or ``raw_mad``."""
    if rule == "normal":
        return scaled_mad(x)
    if rule == "raw":
        value = raw_mad(x)
        if value == 0.0:
            warnings.warn("median absolute deviation is zero", DegenerateScaleWarning, stacklevel=2)
        return value
    raise ConfigurationError(f"mad_rule must be one of {MAD_RULES}, got {rule!r}")


def scaled_mad(x) -> float:
    """Normal-consistent median absolute deviation, ``1.4826 * MAD``.

    Emits :class:`DegenerateScaleWarning` and returns 0 for constant data.
    """
    value = MAD_CONSISTENCY * raw_mad(x)
    if value == 0.0:
        warnings.warn("median absolute deviation is zero", DegenerateScaleWarning, stacklevel=2)
    return value


@dataclass(frozen=True)
class Dataset:
    """Observations ``x`` (length n) and, for regression, responses ``y``."""

    x: np.ndarray
    y: Optional[np.ndarray] = None

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        if x.ndim == 2 and x.shape[1] == 1:
            x = x[:, 0]
        if x.shape[0] < 2:
            raise InputError("a dataset needs at least two observations")
        if not np.all(np.isfinite(x)):
            raise InputError("x contains non-finite values")
        object.__setattr__(self, "x", np.ascontiguousarray(x))
        if self.y is not None:
            y = np.asarray(self.y, dtype=float).ravel()
            if y.shape[0] != x.shape[0]:
                raise InputError(f"x has {x.shape[0]} rows but y has {y.shape[0]}")
            if not np.all(np.isfinite(y)):
                raise InputError("y contains non-finite values")
            object.__setattr__(self, "y", np.ascontiguousarray(y))

    @property
    def n(self) -> int:
        return self.x.shape[0]

    def subset(self, mask) -> "Dataset":
        mask = np.asarray(mask)
        return Dataset(self.x[mask], None if self.y is None else self.y[mask])


@dataclass(frozen=True)
class MomentModel:
    """A moment-condition specification g(x; theta).

    Parameters
    ----------
    family : {"location", "linear_regression", "custom"}
    key_conditions : iterable of str
        Subset of ``KEY_CONDITIONS`` valid for the family.
    epsilon0 : float
        Huber trimming point.
    mad : float, optional
        Scale anchor for ``mad_scale``; the squared value is subtracted.
    mad_rule : {"normal", "raw"}
        How the anchor is computed from data when filled in automatically:
        normal-consistent (x 1.4826) or the plain median absolute deviation.
    robust_scale_T : float, optional
        Variance-like anchor for ``robust_scale``; subtracted as is.
    custom_g : callable, optional
        ``custom_g(x, y, theta) -> (n, d_g)`` array for the custom family.
    custom_dims : (p, d_g), optional
    """

    family: str
    key_conditions: frozenset = field(default_factory=frozenset)
    epsilon0: float = 1.5
    mad: Optional[float] = None
    robust_scale_T: Optional[float] = None
    custom_g: Optional[Callable] = None
    custom_dims: Optional[tuple] = None
    mad_rule: str = "normal"

    def __post_init__(self):
        if self.family not in _FAMILY_KEYS:
            raise ConfigurationError(f"unknown model family {self.family!r}")
        if self.mad_rule not in MAD_RULES:
            raise ConfigurationError(f"mad_rule must be one of {MAD_RULES}, got {self.mad_rule!r}")
        keys = parse_keys(self.key_conditions, self.family)
        object.__setattr__(self, "key_conditions", keys)
        bad = keys - _FAMILY_KEYS[self.family]
        if bad:
            raise ConfigurationError(
                f"key conditions {sorted(bad)} are not available for family {self.family!r}")
        if "huber" in keys and not self.epsilon0 > 0:
            raise ConfigurationError("epsilon0 must be positive when the huber key is used")
        if "mad_scale" in keys and (self.mad is None or not self.mad >= 0):
            raise ConfigurationError("mad_scale key needs a precomputed nonnegative MAD")
        if "robust_scale" in keys and (self.robust_scale_T is None or not self.robust_scale_T >= 0):
            raise ConfigurationError("robust_scale key needs a precomputed nonnegative T")
        if self.family == "custom":
            if self.custom_g is None or self.custom_dims is None:
                raise ConfigurationError("custom family needs custom_g and custom_dims")
        if self.g_dim < self.theta_dim:
            raise ConfigurationError(
                f"{self.g_dim} moment conditions cannot identify {self.theta_dim} parameters")

    @property
    def theta_dim(self) -> int:
        if self.family == "location":
            return 1
        if self.family == "linear_regression":
            return 2
        return int(self.custom_dims[0])

    @property
    def g_dim(self) -> int:
        keys = self.key_conditions
        if self.family == "location":
            return 1 + len(keys)
        if self.family == "linear_regression":
            return 2 + ("third_moment" in keys) + 2 * ("huber" in keys) + ("robust_scale" in keys)
        return int(self.custom_dims[1])

    @property
    def param_names(self) -> list:
        if self.family == "location":
            return ["mu"]
        if self.family == "linear_regression":
            return ["delta0", "delta1"]
        return [f"theta{i}" for i in range(self.theta_dim)]

    def base_only(self) -> "MomentModel":
        """The same model without key conditions (the plain BETEL moments)."""
        return MomentModel(self.family, frozenset(), self.epsilon0, self.mad,
                           self.robust_scale_T, self.custom_g, self.custom_dims)

    def rows(self, x, y, theta) -> np.ndarray:
        """Moment rows for raw arrays; the hot path used by the sampler."""
        theta = np.atleast_1d(theta)
        if self.family == "location":
            return _location_rows(x, theta[0], self)
        if self.family == "linear_regression":
            return _regression_rows(x, y, theta[0], theta[1], self)
        g = np.asarray(self.custom_g(x, y, theta), dtype=float)
        return g.reshape(len(x), -1)

    def g(self, data: Dataset, theta) -> np.ndarray:
        return self.rows(data.x, data.y, theta)


def _location_rows(x, mu, model):
    keys = model.key_conditions
    e = x - mu
    cols = [e]
    if "third_moment" in keys:
        cols.append(e ** 3)
    if "huber" in keys:
        cols.append(e - np.clip(e / model.epsilon0, -1.0, 1.0))
    if "mad_scale" in keys:
        cols.append(e * e - model.mad ** 2)
    return np.column_stack(cols)


def _regression_rows(x, y, d0, d1, model):
    keys = model.key_conditions
    e = y - d0 - d1 * x
    ex = e * x
    cols = [e, ex]
    if "third_moment" in keys:
        cols.append(e ** 3)
    if "huber" in keys:
        h = np.clip(e / model.epsilon0, -1.0, 1.0)
        cols.append(e - h)
        cols.append(ex - h * x)
    if "robust_scale" in keys:
        cols.append(e * e - model.robust_scale_T)
    return np.column_stack(cols)


def location_g(data: Dataset, mu: float, model: MomentModel) -> np.ndarray:
    """Location moment rows: ``x - mu`` followed by the selected key conditions."""
    if model.family != "location":
        raise ConfigurationError("location_g needs a location-family model")
    return _location_rows(data.x, float(mu), model)


def regression_g(data: Dataset, delta, model: MomentModel) -> np.ndarray:
    """Regression moment rows for residuals ``e = y - delta0 - delta1 x``."""
    if model.family != "linear_regression":
        raise ConfigurationError("regression_g needs a linear_regression-family model")
    if data.y is None:
        raise InputError("regression data needs a response y")
    d0, d1 = np.asarray(delta, dtype=float)
    return _regression_rows(data.x, data.y, d0, d1, model)
