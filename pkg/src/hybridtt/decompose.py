"""Curriculum increments: how many curricula join the working instance at a time."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

from .construct import ConstructionResult, construct_into
from .evaluator import Evaluator


@dataclass(frozen=True)
class IncrementPolicy:
    """``fixed`` adds ``rho`` curricula per call (or ``rho_fraction`` of them,
    rounded up); ``violations_based`` adds until ``max_violations`` is reached;
    ``none`` adds everything at once."""

    kind: str = "fixed"
    rho: Optional[int] = None
    rho_fraction: Optional[float] = None
    max_violations: Optional[int] = None

    def check(self) -> None:
        if self.kind == "fixed":
            if (self.rho is None) == (self.rho_fraction is None):
                raise ValueError("fixed increments need exactly one of rho, rho_fraction")
            if self.rho is not None and self.rho < 1:
                raise ValueError("rho must be >= 1")
            if self.rho_fraction is not None and not (0 < self.rho_fraction <= 1):
                raise ValueError("rho_fraction must be in (0, 1]")
        elif self.kind == "violations_based":
            if self.max_violations is None or self.max_violations < 0:
                raise ValueError("violations_based needs max_violations >= 0")
        elif self.kind != "none":
            raise ValueError(f"unknown increment kind {self.kind!r}")

    def resolve_rho(self, n_curricula: int) -> int:
        if self.kind == "none":
            return n_curricula
        if self.rho is not None:
            return self.rho
        return max(1, math.ceil(round(self.rho_fraction * n_curricula, 9)))

    def describe(self) -> dict:
        return {"kind": self.kind, "rho": self.rho, "rho_fraction": self.rho_fraction,
                "max_violations": self.max_violations}


NO_DECOMPOSITION = IncrementPolicy("none")


@dataclass
class IncrementStep:
    cursor: int
    added: List[str] = field(default_factory=list)
    constructions: List[ConstructionResult] = field(default_factory=list)

    @property
    def fallback_count(self) -> int:
        return sum(len(c.fallback) for c in self.constructions)


def _add(ev: Evaluator, cid: str, rng: random.Random, step: IncrementStep) -> None:
    res = construct_into(ev, ev.instance.curriculum_index[cid], rng)
    step.added.append(cid)
    step.constructions.append(res)


def fixed_increment(ev: Evaluator, order: Sequence[str], cursor: int, rho: int,
                    rng: random.Random) -> IncrementStep:
    if not 0 <= cursor < len(order):
        raise ValueError("cursor is past the end of the order")
    step = IncrementStep(cursor)
    n = rho if cursor + rho <= len(order) else len(order) - cursor
    for cid in order[cursor:cursor + n]:
        _add(ev, cid, rng, step)
    step.cursor = cursor + n
    return step


def violations_increment(ev: Evaluator, order: Sequence[str], cursor: int, max_violations: float,
                         rng: random.Random) -> IncrementStep:
    """Add curricula while the violation total stays below the threshold.

    At least one curriculum is added per call even when the total already
    reaches the threshold, so every call makes progress.
    """
    if not 0 <= cursor < len(order):
        raise ValueError("cursor is past the end of the order")
    step = IncrementStep(cursor)
    _add(ev, order[cursor], rng, step)
    cursor += 1
    while cursor < len(order) and ev.grand < max_violations:
        _add(ev, order[cursor], rng, step)
        cursor += 1
    step.cursor = cursor
    return step


def increment(ev: Evaluator, policy: IncrementPolicy, order: Sequence[str], cursor: int,
              rng: random.Random) -> IncrementStep:
    if policy.kind == "violations_based":
        return violations_increment(ev, order, cursor, policy.max_violations, rng)
    return fixed_increment(ev, order, cursor, policy.resolve_rho(len(order)), rng)
