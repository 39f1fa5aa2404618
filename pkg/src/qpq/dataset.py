"""Datasets of quantized integer tuples and the utility functions scored on them."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .rng import make_rng

DEFAULT_N_A = 16
DEFAULT_N_U = 32
CATEGORIES = ("ANTI", "CORR", "INDE")


class _Dummy:
    """Marker stored in a QRAM cell; scores the lowest utility under every f."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "DUMMY"


DUMMY = _Dummy()


def index_bits(N: int) -> int:
    """Qubits needed to address N tuples: ceil(log2 N)."""
    return (N - 1).bit_length() if N > 1 else 0


@dataclass(frozen=True)
class Dataset:
    """N tuples of d attributes, each an ``n_a``-bit unsigned integer.

    Row ``i`` of ``attrs`` is tuple ``p_i``; indices never change.
    """

    attrs: np.ndarray
    n_a: int = DEFAULT_N_A
    name: str = "custom"
    category: str | None = None
    seed: int | None = None

    def __post_init__(self):
        attrs = np.array(self.attrs, dtype=np.int64, copy=True)
        if attrs.ndim != 2 or attrs.shape[0] < 1 or attrs.shape[1] < 1:
            raise ValueError(f"attrs must be a non-empty (N, d) array, got shape {attrs.shape}")
        if attrs.min() < 0 or attrs.max() >= (1 << self.n_a):
            raise ValueError(f"attribute values must lie in [0, 2^{self.n_a})")
        attrs.flags.writeable = False
        object.__setattr__(self, "attrs", attrs)

    @property
    def N(self) -> int:
        return self.attrs.shape[0]

    @property
    def d(self) -> int:
        return self.attrs.shape[1]

    @property
    def n(self) -> int:
        return index_bits(self.N)

    @property
    def meta(self) -> dict:
        return {"name": self.name, "category": self.category, "seed": self.seed}

    def tuple(self, i: int) -> tuple[int, ...]:
        return tuple(int(v) for v in self.attrs[i])

    def __len__(self):
        return self.N


def generate_synthetic(category: str, N: int, d: int, seed: int, n_a: int = DEFAULT_N_A) -> Dataset:
    """Skyline-style synthetic data on the unit cube, quantized to ``n_a`` bits.

    INDE: i.i.d. uniform. CORR: a uniform point on the main diagonal plus
    N(0, 0.05) noise per attribute. ANTI: a plane sum(x) = d*c with
    c ~ N(0.5, 0.05), the point spread uniformly within the plane.
    """
    category = category.upper()
    if category not in CATEGORIES:
        raise ValueError(f"unknown category {category!r}; expected one of {CATEGORIES}")
    if N < 1 or d < 1:
        raise ValueError(f"N and d must be >= 1, got N={N}, d={d}")
    rng = make_rng(seed, "dataset", category, d)
    if category == "INDE":
        x = rng.random((N, d))
    elif category == "CORR":
        x = rng.random((N, 1)) + rng.normal(0.0, 0.05, size=(N, d))
    else:
        c = rng.normal(0.5, 0.05, size=(N, 1))
        offsets = rng.uniform(-0.5, 0.5, size=(N, d))
        x = c + offsets - offsets.mean(axis=1, keepdims=True)
    levels = 1 << n_a
    q = np.clip(np.floor(x * levels), 0, levels - 1).astype(np.int64)
    return Dataset(q, n_a=n_a, name=f"{category}-{N}x{d}", category=category, seed=seed)


def quantize_column(values: np.ndarray, n_a: int) -> np.ndarray:
    """Min-max map onto [0, 2^n_a - 1]; a constant column maps to 0."""
    lo, hi = float(values.min()), float(values.max())
    if hi == lo:
        return np.zeros(values.shape, dtype=np.int64)
    top = (1 << n_a) - 1
    return np.floor((values - lo) / (hi - lo) * top + 0.5).astype(np.int64)


def load_csv(path: str | Path, columns: Sequence[str], n_a: int = DEFAULT_N_A) -> Dataset:
    path = Path(path)
    if not columns:
        raise ValueError("no columns selected")
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        missing = [c for c in columns if c not in (reader.fieldnames or [])]
        if missing:
            raise ValueError(f"{path}: missing columns {missing}")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            try:
                rows.append([float(row[c]) for c in columns])
            except (TypeError, ValueError):
                raise ValueError(f"{path}:{lineno}: non-numeric value in {columns}") from None
    if not rows:
        raise ValueError(f"{path}: no data rows")
    raw = np.asarray(rows, dtype=np.float64)
    if not np.isfinite(raw).all():
        raise ValueError(f"{path}: non-finite value")
    q = np.column_stack([quantize_column(raw[:, j], n_a) for j in range(raw.shape[1])])
    return Dataset(q, n_a=n_a, name=path.stem, category="CSV")


# -- utility functions ------------------------------------------------------

_EXPR_NAMESPACE = {
    "sqrt": np.sqrt,
    "abs": np.abs,
    "log": np.log,
    "exp": np.exp,
    "minimum": np.minimum,
    "maximum": np.maximum,
    "pi": math.pi,
}


def default_scale(n_u: int, n_a: int, d: int) -> float:
    # leaves headroom so a weighted sum of d attributes cannot overflow n_u bits
    return 2.0 ** (n_u - n_a - index_bits(d))


@dataclass(frozen=True)
class UtilityFunction:
    """Maps a tuple to an ``n_u``-bit utility; values saturate at 2^n_u - 1.

    Build with :meth:`linear`, :meth:`l2norm` or :meth:`custom`. Custom
    expressions are Python expressions over ``p[0] .. p[d-1]`` and a few
    numpy functions; they are evaluated, so only pass trusted input.
    """

    kind: str
    scale: float
    n_u: int = DEFAULT_N_U
    weights: tuple[float, ...] | None = None
    expression: str | None = None
    _code: object = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in ("linear", "l2norm", "custom"):
            raise ValueError(f"unknown utility kind {self.kind!r}")
        if not 1 <= self.n_u <= 62:
            raise ValueError("n_u must be in [1, 62]")
        if self.kind == "linear":
            w = self.weights
            if not w or any(x < 0 for x in w) or abs(sum(w) - 1.0) > 1e-9:
                raise ValueError(f"linear weights must be non-negative and sum to 1, got {w}")
        if self.kind == "custom":
            if not self.expression:
                raise ValueError("custom utility needs an expression")
            object.__setattr__(self, "_code", compile(self.expression, "<utility>", "eval"))

    @classmethod
    def linear(cls, weights, n_a=DEFAULT_N_A, n_u=DEFAULT_N_U, scale=None):
        weights = tuple(float(w) for w in weights)
        if scale is None:
            scale = default_scale(n_u, n_a, len(weights))
        return cls("linear", float(scale), n_u, weights=weights)

    @classmethod
    def l2norm(cls, d, n_a=DEFAULT_N_A, n_u=DEFAULT_N_U, scale=None):
        if scale is None:
            scale = default_scale(n_u, n_a, d)
        return cls("l2norm", float(scale), n_u)

    @classmethod
    def custom(cls, expression, scale=1.0, n_u=DEFAULT_N_U):
        return cls("custom", float(scale), n_u, expression=expression)

    @property
    def max_utility(self) -> int:
        return (1 << self.n_u) - 1

    @property
    def d(self) -> int | None:
        return len(self.weights) if self.weights is not None else None

    def _raw(self, attrs: np.ndarray) -> np.ndarray:
        x = attrs.astype(np.float64)
        if self.kind == "linear":
            return x @ np.asarray(self.weights)
        if self.kind == "l2norm":
            return np.sqrt((x * x).sum(axis=1))
        ns = dict(_EXPR_NAMESPACE, p=x.T)
        try:
            out = eval(self._code, {"__builtins__": {}}, ns)
        except IndexError:
            raise ValueError(f"expression {self.expression!r} indexes past d={x.shape[1]}") from None
        return np.broadcast_to(np.asarray(out, dtype=np.float64), (x.shape[0],))

    def evaluate_many(self, attrs: np.ndarray) -> np.ndarray:
        """Utilities of every row of an (N, d) attribute array, as int64."""
        attrs = np.asarray(attrs)
        if attrs.ndim != 2:
            raise ValueError("expected an (N, d) array")
        if self.weights is not None and attrs.shape[1] != len(self.weights):
            raise ValueError(f"tuple has d={attrs.shape[1]}, utility expects d={len(self.weights)}")
        with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
            u = np.floor(self._raw(attrs) * self.scale + 0.5)
        u = np.nan_to_num(u, nan=0.0, posinf=self.max_utility, neginf=0.0)
        return np.clip(u, 0, self.max_utility).astype(np.int64)


def evaluate(f: UtilityFunction, p) -> int:
    """Utility of a single tuple; a DUMMY cell scores 0."""
    if p is DUMMY:
        return 0
    return int(f.evaluate_many(np.asarray([p], dtype=np.int64))[0])


def random_query(d: int, seed: int, trial: int = 0, n_a: int = DEFAULT_N_A,
                 n_u: int = DEFAULT_N_U) -> UtilityFunction:
    """Linear utility with weights drawn uniformly from the probability simplex."""
    if d < 1:
        raise ValueError("d must be >= 1")
    rng = make_rng(seed, "query", trial)
    w = rng.dirichlet(np.ones(d)) if d > 1 else np.ones(1)
    return UtilityFunction.linear(w / w.sum(), n_a=n_a, n_u=n_u)
