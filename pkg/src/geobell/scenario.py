"""Experiment configuration and the outcome value sets of the four strategies."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

INFINITE = math.inf


class ScenarioError(ValueError):
    """Raised for parameter combinations that do not describe a valid experiment."""


class InvalidDimensionError(ScenarioError):
    pass


class State(str, Enum):
    UNBIASED = "unbiased"
    BIASED = "biased"


class Strategy(str, Enum):
    REAL = "real"            # multiply real local outcomes (d-1)/d, -1/d
    COMPLEX = "complex"      # multiply d-th roots of unity
    VECTOR = "vector"        # (d-1)-vector assigned to the label sum mod d
    DICHOTOMIC = "dichotomic"  # (d-1)/d if label sum is 0 mod d, else -1/d


class OffsetConvention(str, Enum):
    HALF_GRID_STEP = "half-step"
    LITERAL = "literal"
    NONE = "none"


@dataclass(frozen=True)
class Scenario:
    n: int
    d: int
    l: float  # int, or INFINITE
    state: State = State.UNBIASED
    strategy: Strategy = Strategy.REAL
    offset: OffsetConvention = OffsetConvention.HALF_GRID_STEP

    def __post_init__(self):
        object.__setattr__(self, "state", State(self.state))
        object.__setattr__(self, "strategy", Strategy(self.strategy))
        object.__setattr__(self, "offset", OffsetConvention(self.offset))
        if self.d < 2:
            raise InvalidDimensionError(f"d must be >= 2, got {self.d}")
        if self.n < 2:
            raise ScenarioError(f"N must be >= 2, got {self.n}")
        if self.state is State.BIASED and self.d < 3:
            raise ScenarioError("biased GHZ state needs d >= 3 (Schmidt rank d-1 >= 2)")
        if self.l != INFINITE:
            if int(self.l) != self.l or self.l < 1:
                raise ScenarioError(f"L must be a positive integer or infinite, got {self.l}")
            object.__setattr__(self, "l", int(self.l))

    @property
    def biased(self) -> bool:
        return self.state is State.BIASED

    @property
    def finite(self) -> bool:
        return self.l != INFINITE

    @property
    def grid_size(self) -> int:
        """Number of settings per observer, d*L."""
        if not self.finite:
            raise ScenarioError("infinite L has no finite grid")
        return self.d * self.l

    def to_record(self) -> dict:
        return {
            "n": self.n,
            "d": self.d,
            "l": "inf" if not self.finite else self.l,
            "state": self.state.value,
            "strategy": self.strategy.value,
            "offset": self.offset.value,
        }

    @classmethod
    def from_record(cls, rec: dict) -> "Scenario":
        l = rec["l"]
        l = INFINITE if l in ("inf", "infinite", INFINITE) else int(l)
        return cls(
            n=int(rec["n"]),
            d=int(rec["d"]),
            l=l,
            state=rec.get("state", "unbiased"),
            strategy=rec.get("strategy", "real"),
            offset=rec.get("offset", "half-step"),
        )


def _check_d(d):
    if d < 2:
        raise InvalidDimensionError(f"d must be >= 2, got {d}")


def _check_index(d, i, what="index"):
    if not 0 <= i < d:
        raise IndexError(f"{what} {i} out of range for d={d}")


def real_outcome_values(d: int) -> np.ndarray:
    """Eigenvalues of the one-projector observable: [(d-1)/d, -1/d, ..., -1/d]."""
    _check_d(d)
    vals = np.full(d, -1.0 / d)
    vals[0] = (d - 1) / d
    return vals


def complex_outcome_value(d: int, a: int) -> complex:
    _check_d(d)
    _check_index(d, a, "label")
    # exact values on the axes keep products of roots free of rounding noise
    if (4 * a) % d == 0:
        return complex(np.round(np.exp(2j * np.pi * a / d)))
    return complex(np.exp(2j * np.pi * a / d))


@lru_cache(maxsize=None)
def _vector_table(d: int) -> np.ndarray:
    if d == 2:
        return np.array([[-1.0], [1.0]])
    prev = _vector_table(d - 1)
    scale = math.sqrt((d - 1) ** 2 - 1) / (d - 1)
    out = np.zeros((d, d - 1))
    out[:-1, 0] = -1.0 / (d - 1)
    out[:-1, 1:] = scale * prev
    out[-1, 0] = 1.0
    return out


def vector_outcome(d: int, i: int) -> np.ndarray:
    """Outcome vector v_{d,i}; v_{d,d-1} = (1, 0, ..., 0), the rest built from v_{d-1,i}."""
    _check_d(d)
    _check_index(d, i)
    return _vector_table(d)[i].copy()


def vector_outcomes(d: int) -> np.ndarray:
    """All outcome vectors as a (d, d-1) array, row i = v_{d,i}."""
    _check_d(d)
    return _vector_table(d).copy()


def dichotomic_value(d: int, s: int) -> float:
    _check_d(d)
    _check_index(d, s, "sum class")
    return (d - 1) / d if s == 0 else -1.0 / d


def dichotomic_values(d: int) -> np.ndarray:
    return np.array([dichotomic_value(d, s) for s in range(d)])
