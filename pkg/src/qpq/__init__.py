"""Simulation lab for quantum preference queries over an idealized QRAM."""

from .algorithms import QueryOutcome, cqpq_k, cqpq_theta, lemma1_probability, qqpq_k, qqpq_theta
from .baselines import bound, linear_scan, quick_select
from .dataset import DUMMY, Dataset, UtilityFunction, evaluate, generate_synthetic, load_csv, random_query
from .qram import IoLedger, IoPolicy, Qram

__all__ = [
    "DUMMY", "Dataset", "IoLedger", "IoPolicy", "Qram", "QueryOutcome", "UtilityFunction",
    "bound", "cqpq_k", "cqpq_theta", "evaluate", "generate_synthetic", "linear_scan", "load_csv",
    "lemma1_probability", "qqpq_k", "qqpq_theta", "quick_select", "random_query",
]
