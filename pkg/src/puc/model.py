"""Model parameters and the observation likelihoods p(x | z).

A row label z is either a unit of the column dimension (the row is
*regular*), ``MISSING`` (no symbol), or ``ANOMALOUS`` (a symbol no unit
explains).  Log-space versions of each likelihood are provided for the
inference engine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

from .kb import KBError, KnowledgeBase

MISSING = "<missing>"
ANOMALOUS = "<anomalous>"

NEG_INF = float("-inf")


@dataclass(frozen=True)
class MixingProportions:
    w_regular: float = 0.98
    w_missing: float = 0.01
    w_anomalous: float = 0.01

    def __post_init__(self):
        ws = (self.w_regular, self.w_missing, self.w_anomalous)
        if any(not (0.0 <= w <= 1.0) for w in ws):
            raise ValueError(f"mixing proportions must lie in [0, 1], got {ws}")
        if abs(sum(ws) - 1.0) > 1e-12:
            raise ValueError(f"mixing proportions must sum to 1, got {sum(ws)!r}")
        if not (self.w_missing < self.w_regular and self.w_anomalous < self.w_regular):
            raise ValueError("missing and anomalous weights must be below the regular weight")

    def weight(self, kind: str) -> float:
        if kind == MISSING:
            return self.w_missing
        if kind == ANOMALOUS:
            return self.w_anomalous
        return self.w_regular


@dataclass(frozen=True)
class ObservationParams:
    pi: Mapping[str, Mapping[str, float]]
    anomaly_alphabet_size: int = 128

    def __post_init__(self):
        if int(self.anomaly_alphabet_size) != self.anomaly_alphabet_size \
                or self.anomaly_alphabet_size < 1:
            raise ValueError("anomaly_alphabet_size must be a positive integer")
        for unit, dist in self.pi.items():
            if not dist:
                raise ValueError(f"empty symbol distribution for {unit!r}")
            if any(p <= 0 for p in dist.values()):
                raise ValueError(f"symbol probabilities of {unit!r} must be positive")
            if abs(math.fsum(dist.values()) - 1.0) > 1e-12:
                raise ValueError(f"symbol probabilities of {unit!r} must sum to 1")


@dataclass(frozen=True)
class ModelParams:
    mixing: MixingProportions
    obs: ObservationParams
    kb: KnowledgeBase = field(repr=False, compare=False)
    # per-unit mixing overrides; units absent here use `mixing`
    unit_mixing: Mapping[str, MixingProportions] = field(default_factory=dict)

    def __post_init__(self):
        if set(self.obs.pi) != set(self.kb.entries):
            raise ValueError("symbol distributions must cover exactly the KB units")
        for u, dist in self.obs.pi.items():
            if set(dist) != self.kb.entries[u].all_symbols:
                raise ValueError(f"support of {u!r} differs from its KB symbol set")
        unknown = set(self.unit_mixing) - set(self.kb.entries)
        if unknown:
            raise ValueError(f"mixing override for unknown units: {sorted(unknown)}")

    def mixing_for(self, unit: str) -> MixingProportions:
        return self.unit_mixing.get(unit, self.mixing)

    def with_mixing(self, mixing: MixingProportions) -> "ModelParams":
        return ModelParams(mixing, self.obs, self.kb, self.unit_mixing)


def uniform_pi(kb: KnowledgeBase) -> dict[str, dict[str, float]]:
    pi = {}
    for name, entry in kb.entries.items():
        syms = sorted(entry.all_symbols)
        pi[name] = {s: 1.0 / len(syms) for s in syms}
    return pi


def default_params(kb: KnowledgeBase, mixing: MixingProportions | None = None,
                   anomaly_alphabet_size: int = 128) -> ModelParams:
    """Fixed parameters: W = (0.98, 0.01, 0.01), uniform symbol distributions."""
    return ModelParams(
        mixing=mixing or MixingProportions(),
        obs=ObservationParams(uniform_pi(kb), anomaly_alphabet_size),
        kb=kb,
    )


def regular_likelihood(x: str | None, unit: str, params: ModelParams) -> float:
    try:
        dist = params.obs.pi[unit]
    except KeyError:
        raise KBError(f"unknown unit {unit!r}") from None
    if not x:
        return 0.0
    return dist.get(x, 0.0)


def missing_likelihood(x: str | None) -> float:
    return 0.0 if x else 1.0


def anomaly_log_likelihood(x: str | None, params: ModelParams) -> float:
    """Log X-factor: uniform characters over the alphabet, geometric(1/2) length."""
    if not x:
        return NEG_INF
    n = len(x)
    return -n * math.log(params.obs.anomaly_alphabet_size) - (n + 1) * math.log(2.0)


def anomaly_likelihood(x: str | None, params: ModelParams) -> float:
    return math.exp(anomaly_log_likelihood(x, params))


def log_regular_likelihood(x, unit, params) -> float:
    p = regular_likelihood(x, unit, params)
    return math.log(p) if p > 0 else NEG_INF


def log_missing_likelihood(x) -> float:
    return 0.0 if not x else NEG_INF
