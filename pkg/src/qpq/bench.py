"""Parameter sweeps over the query algorithms and baselines; CSV and SVG output."""

from __future__ import annotations

import csv
import functools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

import numpy as np

from . import algorithms as alg
from .baselines import kth_highest, linear_scan, quick_select, top_k_oracle
from .engine import BACKENDS
from .dataset import DEFAULT_N_A, DEFAULT_N_U, Dataset, generate_synthetic, load_csv, random_query
from .qram import IoLedger, IoPolicy, Qram
from .rng import make_rng

ALGORITHMS = ("qqpq_theta", "cqpq_theta", "cqpq_k", "qqpq_k", "linear_scan", "quick_select")
THRESHOLD_ALGORITHMS = ("qqpq_theta", "cqpq_theta", "linear_scan")
SWEEPS = ("k", "theta_rank", "d", "N", "category")

CSV_COLUMNS = ("algorithm", "dataset", "N", "d", "k_or_theta", "trial", "quantum_ios",
               "classical_ios", "pq_ios", "total_ios", "success", "seed")


class ConfigError(ValueError):
    pass


def _split(text: str) -> tuple[str, ...]:
    return tuple(p.strip() for p in str(text).split(",") if p.strip())


@dataclass(frozen=True)
class ExperimentConfig:
    category: str = "ANTI"
    csv: str | None = None
    columns: tuple[str, ...] = ()
    N: int = 500_000
    d: int = 4
    n_a: int = DEFAULT_N_A
    n_u: int = DEFAULT_N_U
    k: int = 10
    algorithms: tuple[str, ...] = ("cqpq_k", "quick_select")
    sweep: str = "k"
    values: tuple = (10,)
    queries: int = 100
    seed: int = 0
    io_policy: str = ""
    retries: int = alg.DEFAULT_RETRIES
    backend: str = "collapsed"
    workers: int = 1

    def __post_init__(self):
        if self.sweep not in SWEEPS:
            raise ConfigError(f"unknown sweep {self.sweep!r}; expected one of {SWEEPS}")
        bad = [a for a in self.algorithms if a not in ALGORITHMS]
        if bad or not self.algorithms:
            raise ConfigError(f"unknown algorithms {bad}; expected some of {ALGORITHMS}")
        if not self.values:
            raise ConfigError("empty sweep")
        if self.backend not in BACKENDS:
            raise ConfigError(f"unknown backend {self.backend!r}; expected one of {BACKENDS}")
        if self.queries < 1 or self.retries < 1 or self.workers < 1:
            raise ConfigError("queries, retries and workers must be >= 1")
        try:
            self.policy
        except ValueError as e:
            raise ConfigError(str(e)) from None
        for v in self.values:
            self._coerce(v)

    @property
    def policy(self) -> IoPolicy:
        return IoPolicy.parse(self.io_policy)

    def _coerce(self, value):
        if self.sweep == "category":
            return str(value).upper()
        try:
            v = int(value)
        except (TypeError, ValueError):
            raise ConfigError(f"sweep {self.sweep} needs integer values, got {value!r}") from None
        if v < 1:
            raise ConfigError(f"sweep value {v} must be >= 1")
        return v

    def at(self, value) -> "ExperimentConfig":
        """The configuration of a single sweep point."""
        v = self._coerce(value)
        key = {"k": "k", "theta_rank": "k", "d": "d", "N": "N", "category": "category"}[self.sweep]
        return replace(self, **{key: v}, values=(v,))

    @classmethod
    def from_text(cls, text: str, **overrides) -> "ExperimentConfig":
        """Flat ``key = value`` lines; ``#`` starts a comment."""
        raw = {}
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ConfigError(f"line {lineno}: expected key=value")
            raw[key.strip()] = value.strip()
        raw.update({k: v for k, v in overrides.items() if v is not None})
        return cls.from_mapping(raw)

    @classmethod
    def from_mapping(cls, raw: dict) -> "ExperimentConfig":
        types = {f.name: f.type for f in fields(cls)}
        kw = {}
        for key, value in raw.items():
            if key not in types:
                raise ConfigError(f"unknown config key {key!r}")
            t = types[key]
            try:
                if key in ("algorithms", "columns"):
                    kw[key] = _split(value) if isinstance(value, str) else tuple(value)
                elif key == "values":
                    kw[key] = _split(value) if isinstance(value, str) else tuple(value)
                elif t == "int":
                    kw[key] = int(value)
                elif key == "csv":
                    kw[key] = str(value) if value not in ("", None) else None
                else:
                    kw[key] = str(value)
            except ValueError:
                raise ConfigError(f"bad value for {key}: {value!r}") from None
        return cls(**kw)


@dataclass
class ResultRow:
    algorithm: str
    dataset: str
    N: int
    d: int
    k_or_theta: int
    trial: int
    quantum_ios: int
    classical_ios: int
    pq_ios: float
    total_ios: float
    success: bool
    seed: int

    @classmethod
    def from_ledger(cls, cfg: ExperimentConfig, ds: Dataset, algorithm: str, trial: int,
                    ledger: IoLedger, success: bool) -> "ResultRow":
        return cls(algorithm, ds.name, ds.N, ds.d, cfg.k, trial, ledger.quantum_reads,
                   ledger.classical_ios, ledger.pq_ops, ledger.total, bool(success), cfg.seed)


@functools.lru_cache(maxsize=8)
def build_dataset(cfg: ExperimentConfig) -> Dataset:
    if cfg.csv:
        if not cfg.columns:
            raise ConfigError("csv datasets need columns")
        return load_csv(cfg.csv, cfg.columns, cfg.n_a)
    return generate_synthetic(cfg.category, cfg.N, cfg.d, cfg.seed, cfg.n_a)


def _dataset_key(cfg: ExperimentConfig) -> ExperimentConfig:
    # normalize fields that do not affect the data so the cache is shared
    return replace(cfg, k=1, algorithms=("cqpq_k",), values=(1,), sweep="k", queries=1, workers=1,
                   io_policy="", retries=1, backend="collapsed")


def run_trial(cfg: ExperimentConfig, point: int, algorithm: str, trial: int) -> ResultRow:
    """One query of one algorithm; ``cfg`` is already the sweep-point config."""
    ds = build_dataset(_dataset_key(cfg))
    if cfg.k > ds.N:
        raise ConfigError(f"k={cfg.k} exceeds N={ds.N}")
    f = random_query(ds.d, cfg.seed, trial, n_a=ds.n_a, n_u=cfg.n_u)
    u = f.evaluate_many(ds.attrs)
    rng = make_rng(cfg.seed, "algo", algorithm, point, trial)
    policy = cfg.policy
    opts = dict(policy=policy, rng=rng, backend=cfg.backend)
    if algorithm in THRESHOLD_ALGORITHMS:
        theta = kth_highest(u, cfg.k)
        expected = set(np.flatnonzero(u >= theta).tolist())
    else:
        expected = set(top_k_oracle(u, cfg.k))

    qram = Qram(ds)
    if algorithm == "qqpq_theta":
        got = alg.qqpq_theta(qram, f, theta, **opts).indices
    elif algorithm == "cqpq_theta":
        got = alg.cqpq_theta(qram, f, theta, retries=cfg.retries, **opts).indices
    elif algorithm == "cqpq_k":
        got = alg.cqpq_k(qram, f, cfg.k, retries=cfg.retries, **opts).indices
    elif algorithm == "qqpq_k":
        got = alg.qqpq_k(qram, f, cfg.k, retries=cfg.retries, **opts).indices
    elif algorithm == "linear_scan":
        got = {i for i, _ in linear_scan(ds, f, theta, qram.ledger, policy)}
    else:
        got = {i for i, _ in quick_select(ds, f, cfg.k, qram.ledger, rng, policy)}
    return ResultRow.from_ledger(cfg, ds, algorithm, trial, qram.ledger, got == expected)


def _run_task(task):
    return run_trial(*task)


def run_experiment(config: ExperimentConfig, workers: int | None = None) -> list[ResultRow]:
    """Q queries per (sweep value, algorithm); rows in (value, algorithm, trial) order.

    Every trial owns its QRAM, ledger and random stream, so the rows do not
    depend on ``workers``.
    """
    tasks = [(config.at(v), p, a, t)
             for p, v in enumerate(config.values)
             for a in config.algorithms
             for t in range(config.queries)]
    workers = config.workers if workers is None else workers
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_run_task, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    return [_run_task(t) for t in tasks]


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return f"{value:.6f}"
    return str(value)


def emit_csv(results: list[ResultRow], path: str | Path) -> Path:
    if not results:
        raise ValueError("no results to write")
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for row in results:
            rec = asdict(row)
            w.writerow([_fmt(rec[c]) for c in CSV_COLUMNS])
    return path


def read_csv(path: str | Path) -> list[dict]:
    with Path(path).open(newline="") as fh:
        return list(csv.DictReader(fh))


def summarize(results: list[ResultRow], x: str = "k_or_theta") -> dict[tuple[str, object], dict]:
    """Per (algorithm, x) means of the IO columns and the success rate."""
    groups: dict[tuple[str, object], list[ResultRow]] = {}
    for r in results:
        groups.setdefault((r.algorithm, getattr(r, x)), []).append(r)
    out = {}
    for key, rows in groups.items():
        out[key] = {
            "trials": len(rows),
            "quantum_ios": float(np.mean([r.quantum_ios for r in rows])),
            "classical_ios": float(np.mean([r.classical_ios for r in rows])),
            "pq_ios": float(np.mean([r.pq_ios for r in rows])),
            "total_ios": float(np.mean([r.total_ios for r in rows])),
            "success_rate": float(np.mean([r.success for r in rows])),
        }
    return out


def sweep_column(sweep: str) -> str:
    return {"k": "k_or_theta", "theta_rank": "k_or_theta", "d": "d", "N": "N", "category": "dataset"}[sweep]


def emit_chart(results: list[ResultRow], path: str | Path, x: str = "k_or_theta",
               metric: str = "total_ios") -> tuple[float, float]:
    """Mean ``metric`` per algorithm against ``x`` on a log IO axis, as SVG.

    Returns the IO-axis limits. The axis spans at least 10^1..10^7 so
    charts of different sweeps line up.
    """
    if not results:
        raise ValueError("no results to plot")
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    summary = summarize(results, x)
    xs = sorted({key[1] for key in summary}, key=lambda v: (isinstance(v, str), v))
    numeric = all(isinstance(v, (int, float)) for v in xs)
    algos = list(dict.fromkeys(r.algorithm for r in results))

    ys = [s[metric] for s in summary.values() if s[metric] > 0]
    lo = min(1, math.floor(math.log10(min(ys)))) if ys else 1
    hi = max(7, math.ceil(math.log10(max(ys)))) if ys else 7
    ylim = (10.0 ** lo, 10.0 ** hi)

    with plt.rc_context({"svg.hashsalt": "qpq", "svg.fonttype": "path"}):
        fig, ax = plt.subplots(figsize=(5, 3.5))
        for a in algos:
            pts = [(v, summary[(a, v)][metric]) for v in xs if (a, v) in summary]
            px = [p[0] if numeric else xs.index(p[0]) for p in pts]
            ax.plot(px, [p[1] for p in pts], marker="o", label=a)
        ax.set_yscale("log")
        ax.set_ylim(*ylim)
        if numeric and len(xs) > 1 and min(xs) > 0 and max(xs) / min(xs) >= 10:
            ax.set_xscale("log")
        if not numeric:
            ax.set_xticks(range(len(xs)), [str(v) for v in xs])
        ax.set_xlabel(x)
        ax.set_ylabel(f"mean {metric}")
        ax.legend(fontsize="small")
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
    return ylim
