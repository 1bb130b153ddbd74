# app/config.py
# Run configuration: one JSON file, every knob optional, rationals as "p/q" strings.
from __future__ import annotations

import dataclasses
import json
import logging
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional

from app.decomp.decompose import DEFAULT_RELAXED_RATIO, SizeSchedule
from app.decomp.families import FAMILY_BUDGET
from app.embed.dense import DEFAULT_DECAY, RETRIES, DenseParams
from app.embed.matching import MatchParams
from app.engine import worker_cap
from app.errors import InputError, ParametersInfeasible
from app.graph.search import BICLIQUE_CAP
from app.oracle.search import DEFAULT_NODE_BUDGET
from app.stability.partition import StabilityParams

logger = logging.getLogger(__name__)

_RATIONAL = ("epsilon", "gamma", "a_ratio", "match_density", "stability_density", "c_gap")


def parse_rational(value: Any, name: str = "value") -> Fraction:
    """JSON number or "p/q" string -> Fraction."""
    if isinstance(value, bool):
        raise InputError(f"{name} must be a number, got a boolean")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(value).limit_denominator(10**9)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"{name}: cannot read {value!r} as a rational") from exc
    raise InputError(f"{name} must be a number or a 'p/q' string", got=type(value).__name__)


@dataclass
class RunConfig:
    seed: int = 0
    s: int = 3
    n: int = 4
    epsilon: Fraction = Fraction(1, 2)
    k: int = 0
    m: int = 2
    gamma: Fraction = Fraction(1, 8)
    d_schedule: Optional[list[int]] = None
    d_top: Optional[int] = None
    decay: int = DEFAULT_DECAY
    c_gap: Fraction = Fraction(1)
    a_schedule: Optional[list[int]] = None
    a_ratio: Fraction = DEFAULT_RELAXED_RATIO
    match_density: Optional[Fraction] = None
    stability_density: Optional[Fraction] = None
    biclique_cap: int = BICLIQUE_CAP
    family_budget: int = FAMILY_BUDGET
    oracle_budget: int = DEFAULT_NODE_BUDGET
    retries: int = RETRIES
    relaxed: bool = True
    relaxed_thresholds: bool = True
    workers: Optional[int] = None
    iso_cutoff: int = 5

    def __post_init__(self):
        for name in _RATIONAL:
            value = getattr(self, name)
            if value is not None:
                setattr(self, name, parse_rational(value, name))
        if self.seed < 0 or self.seed >= 1 << 64:
            raise InputError("seed must be a 64-bit unsigned integer", seed=self.seed)
        if self.s < 2 or self.n < 1:
            raise InputError("need s >= 2 and n >= 1", s=self.s, n=self.n)
        if self.epsilon <= 0:
            raise InputError("epsilon must be positive", epsilon=str(self.epsilon))
        self.workers = worker_cap(self.workers)

    # -------- loading --------
    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "RunConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise InputError(f"unknown config keys: {', '.join(unknown)}", keys=unknown)
        return cls(**data)

    @classmethod
    def load(cls, path: Optional[str | Path]) -> "RunConfig":
        if path is None:
            return cls()
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise InputError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise InputError(f"config {path} is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise InputError("config must be a JSON object")
        return cls.from_dict(data)

    def with_seed(self, seed: Optional[int]) -> "RunConfig":
        return self if seed is None else dataclasses.replace(self, seed=seed)

    # -------- builders --------
    def dense_params(self, n: Optional[int] = None) -> DenseParams:
        n = self.n if n is None else n
        if self.d_schedule is None:
            params = DenseParams.for_dimension(
                n, self.epsilon, self.s, relaxed=self.relaxed, decay=self.decay,
                c_gap=self.c_gap, retries=self.retries,
            )
        else:
            params = DenseParams(
                self.epsilon, self.s, self.k, tuple(self.d_schedule), d_top=self.d_top,
                decay=self.decay, c_gap=self.c_gap, relaxed=self.relaxed, retries=self.retries,
            )
        self._report(params.problems(n), "dense")
        return params

    def match_params(self, n: Optional[int] = None) -> MatchParams:
        n = self.n if n is None else n
        return MatchParams(
            self.epsilon, self.s, k=self.k, m=max(1, min(self.m, n)), gamma=self.gamma,
            match_density=self.match_density, biclique_cap=self.biclique_cap,
            relaxed=self.relaxed_thresholds, workers=self.workers,
        )

    def decompose_epsilon(self) -> Fraction:
        return min(self.epsilon, Fraction(1, 2))

    def size_schedule(self, N: int) -> SizeSchedule:
        eps = self.decompose_epsilon()
        if self.a_schedule is not None:
            schedule = SizeSchedule(tuple(self.a_schedule), eps, self.relaxed)
        else:
            schedule = SizeSchedule.geometric(N, eps, self.a_ratio if self.relaxed else None, self.relaxed)
        self._report(schedule.problems(N), "decompose")
        return schedule

    def stability_params(self, n: Optional[int] = None, N: Optional[int] = None) -> StabilityParams:
        n = self.n if n is None else n
        return StabilityParams(
            self.epsilon, self.s, stability_density=self.stability_density,
            a_ratio=self.a_ratio,
            schedule=None if N is None or self.a_schedule is None else self.size_schedule(N),
            match=self.match_params(n), relaxed=self.relaxed_thresholds,
            family_budget=self.family_budget,
        )

    def _report(self, problems: list[str], stage: str) -> None:
        if not problems:
            return
        if not self.relaxed:
            raise ParametersInfeasible("; ".join(problems), stage=stage)
        for p in problems:
            logger.warning("config: %s: %s", stage, p)
