"""Score-matrix domain types.

Pydantic models for the objects every module exchanges: observation masks,
bounded score matrices, additive parameters, agent labels and pairwise judge
records. Arrays held by these models are read-only copies, so instances can be
shared freely between worker processes.
"""
from __future__ import annotations

from enum import Enum
from typing import Any, Iterable, Sequence

import numpy as np
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    computed_field,
    field_serializer,
    field_validator,
    model_validator,
)

SCORE_BOUND = 1.0


def frozen_array(value: Any, dtype: Any) -> np.ndarray:
    """Copy ``value`` into a read-only numpy array of ``dtype``."""
    arr = np.array(value, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


def default_ids(prefix: str, n: int) -> tuple[str, ...]:
    return tuple(f"{prefix}{k}" for k in range(n))


def _check_unique(ids: Sequence[str], kind: str) -> None:
    seen: set[str] = set()
    for label in ids:
        if label in seen:
            raise ValueError(f"Duplicate {kind} id '{label}'")
        seen.add(label)


class ObservationMask(BaseModel):
    """Boolean K×J observation pattern Ω."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    pattern: np.ndarray

    @field_validator("pattern", mode="before")
    @classmethod
    def _as_bool_matrix(cls, v: Any) -> np.ndarray:
        if isinstance(v, ObservationMask):
            v = v.pattern
        arr = np.asarray(v)
        if arr.ndim != 2:
            raise ValueError(f"Mask must be 2-dimensional, got shape {arr.shape}")
        if arr.dtype != bool and not np.isin(arr, (0, 1)).all():
            raise ValueError("Mask entries must be boolean")
        return frozen_array(arr, bool)

    @field_serializer("pattern")
    def _dump_pattern(self, v: np.ndarray) -> list[list[bool]]:
        return v.tolist()

    @computed_field
    @property
    def observed_count(self) -> int:
        return int(self.pattern.sum())

    @property
    def shape(self) -> tuple[int, int]:
        return self.pattern.shape  # type: ignore[return-value]

    @property
    def coverage(self) -> float:
        """Observed fraction of all K·J pairs."""
        return self.observed_count / self.pattern.size if self.pattern.size else 0.0

    @classmethod
    def full(cls, n_agents: int, n_items: int) -> ObservationMask:
        return cls(pattern=np.ones((n_agents, n_items), dtype=bool))

    @classmethod
    def empty(cls, n_agents: int, n_items: int) -> ObservationMask:
        return cls(pattern=np.zeros((n_agents, n_items), dtype=bool))

    def cells(self) -> tuple[np.ndarray, np.ndarray]:
        """Row and column indices of observed cells in row-major order."""
        rows, cols = np.nonzero(self.pattern)
        return rows, cols

    def union(self, other: ObservationMask) -> ObservationMask:
        self._check_shape(other)
        return ObservationMask(pattern=self.pattern | other.pattern)

    def intersect(self, other: ObservationMask) -> ObservationMask:
        self._check_shape(other)
        return ObservationMask(pattern=self.pattern & other.pattern)

    def complement(self) -> ObservationMask:
        return ObservationMask(pattern=~self.pattern)

    def minus(self, other: ObservationMask) -> ObservationMask:
        self._check_shape(other)
        return ObservationMask(pattern=self.pattern & ~other.pattern)

    def overlaps(self, other: ObservationMask) -> bool:
        self._check_shape(other)
        return bool((self.pattern & other.pattern).any())

    def _check_shape(self, other: ObservationMask) -> None:
        if self.shape != other.shape:
            raise ValueError(f"Mask shapes differ: {self.shape} vs {other.shape}")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ObservationMask):
            return NotImplemented
        return bool(np.array_equal(self.pattern, other.pattern))

    __hash__ = None  # type: ignore[assignment]


class ScoreMatrix(BaseModel):
    """K×J bounded scores with an explicit observation mask.

    Unobserved cells are stored as 0.0 and must never be read without the mask.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    values: np.ndarray
    mask: ObservationMask
    agent_ids: tuple[str, ...]
    item_ids: tuple[str, ...]

    @field_validator("values", mode="before")
    @classmethod
    def _as_float_matrix(cls, v: Any) -> np.ndarray:
        arr = np.array(v, dtype=float)
        if arr.ndim != 2:
            raise ValueError(f"Score values must be 2-dimensional, got shape {arr.shape}")
        return arr

    @field_serializer("values")
    def _dump_values(self, v: np.ndarray) -> list[list[float]]:
        return v.tolist()

    @model_validator(mode="after")
    def _validate_matrix(self) -> ScoreMatrix:
        values = self.values
        if self.mask.shape != values.shape:
            raise ValueError(
                f"Mask shape {self.mask.shape} does not match values shape {values.shape}"
            )
        if len(self.agent_ids) != values.shape[0]:
            raise ValueError(
                f"{len(self.agent_ids)} agent ids for {values.shape[0]} rows"
            )
        if len(self.item_ids) != values.shape[1]:
            raise ValueError(f"{len(self.item_ids)} item ids for {values.shape[1]} columns")
        _check_unique(self.agent_ids, "agent")
        _check_unique(self.item_ids, "item")

        observed = self.mask.pattern
        bad = observed & ~np.isfinite(values)
        if bad.any():
            i, j = map(int, np.argwhere(bad)[0])
            raise ValueError(
                f"Non-finite score at ({self.agent_ids[i]}, {self.item_ids[j]})"
            )
        out_of_range = observed & (np.abs(np.where(observed, values, 0.0)) > SCORE_BOUND)
        if out_of_range.any():
            i, j = map(int, np.argwhere(out_of_range)[0])
            raise ValueError(
                f"Score {values[i, j]!r} at ({self.agent_ids[i]}, {self.item_ids[j]}) "
                f"outside [-1, 1]"
            )

        cleaned = np.where(observed, values, 0.0)
        cleaned.setflags(write=False)
        object.__setattr__(self, "values", cleaned)
        return self

    @classmethod
    def from_array(
        cls,
        values: Any,
        mask: ObservationMask | np.ndarray | None = None,
        agent_ids: Sequence[str] | None = None,
        item_ids: Sequence[str] | None = None,
    ) -> ScoreMatrix:
        """Build a matrix from an array; NaN cells are unobserved when no mask is given."""
        arr = np.array(values, dtype=float)
        if mask is None:
            pattern = ~np.isnan(arr)
        elif isinstance(mask, ObservationMask):
            pattern = mask.pattern
        else:
            pattern = np.asarray(mask, dtype=bool)
        n_agents, n_items = arr.shape
        return cls(
            values=np.where(pattern, np.nan_to_num(arr), 0.0),
            mask=ObservationMask(pattern=pattern),
            agent_ids=tuple(agent_ids) if agent_ids is not None else default_ids("a", n_agents),
            item_ids=tuple(item_ids) if item_ids is not None else default_ids("q", n_items),
        )

    @property
    def n_agents(self) -> int:
        return self.values.shape[0]

    @property
    def n_items(self) -> int:
        return self.values.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape  # type: ignore[return-value]

    def observed_entries(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(rows, cols, values) of observed cells in row-major order."""
        rows, cols = self.mask.cells()
        return rows, cols, self.values[rows, cols]

    def as_masked(self) -> np.ma.MaskedArray:
        return np.ma.MaskedArray(self.values, mask=~self.mask.pattern)

    def restrict(self, mask: ObservationMask) -> ScoreMatrix:
        """Same scores, observed only where both masks are set."""
        return ScoreMatrix(
            values=self.values,
            mask=self.mask.intersect(mask),
            agent_ids=self.agent_ids,
            item_ids=self.item_ids,
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ScoreMatrix):
            return NotImplemented
        return (
            self.mask == other.mask
            and self.agent_ids == other.agent_ids
            and self.item_ids == other.item_ids
            and bool(np.array_equal(self.values, other.values))
        )

    __hash__ = None  # type: ignore[assignment]


class AdditiveParams(BaseModel):
    """Abilities θ and difficulties b of the additive model s_ij = θ_i − b_j."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True, populate_by_name=True)

    theta: np.ndarray
    b: np.ndarray
    ridge: float = Field(default=0.0, ge=0.0, alias="lambda")
    agent_ids: tuple[str, ...] = ()
    item_ids: tuple[str, ...] = ()

    @field_validator("theta", "b", mode="before")
    @classmethod
    def _as_vector(cls, v: Any) -> np.ndarray:
        arr = frozen_array(v, float)
        if arr.ndim != 1:
            raise ValueError(f"Parameters must be 1-dimensional, got shape {arr.shape}")
        if not np.isfinite(arr).all():
            raise ValueError("Parameters must be finite")
        return arr

    @field_serializer("theta", "b")
    def _dump_vector(self, v: np.ndarray) -> list[float]:
        return v.tolist()

    @model_validator(mode="after")
    def _fill_ids(self) -> AdditiveParams:
        if not self.agent_ids:
            object.__setattr__(self, "agent_ids", default_ids("a", len(self.theta)))
        if not self.item_ids:
            object.__setattr__(self, "item_ids", default_ids("q", len(self.b)))
        if len(self.agent_ids) != len(self.theta):
            raise ValueError(f"{len(self.agent_ids)} agent ids for {len(self.theta)} abilities")
        if len(self.item_ids) != len(self.b):
            raise ValueError(f"{len(self.item_ids)} item ids for {len(self.b)} difficulties")
        return self

    @computed_field
    @property
    def gauge_residual(self) -> float:
        return float(abs(self.b.sum()))

    def gauge_fixed(
        self, pinned_agents: Sequence[int] = (), pinned_items: Sequence[int] = ()
    ) -> AdditiveParams:
        """Shift θ and b by the same constant so that ∑ b = 0.

        Pinned entries are excluded from the shift and keep their value, so the
        constant is taken over the free difficulties only. Predictions between free
        agents and free items are unchanged.
        """
        free_a = np.ones(len(self.theta), dtype=bool)
        free_b = np.ones(len(self.b), dtype=bool)
        free_a[list(pinned_agents)] = False
        free_b[list(pinned_items)] = False
        shift = float(self.b.sum()) / int(free_b.sum()) if free_b.any() else 0.0
        return AdditiveParams(
            theta=np.where(free_a, self.theta - shift, self.theta),
            b=np.where(free_b, self.b - shift, self.b),
            ridge=self.ridge,
            agent_ids=self.agent_ids,
            item_ids=self.item_ids,
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AdditiveParams):
            return NotImplemented
        return (
            bool(np.array_equal(self.theta, other.theta))
            and bool(np.array_equal(self.b, other.b))
            and self.ridge == other.ridge
            and self.agent_ids == other.agent_ids
            and self.item_ids == other.item_ids
        )

    __hash__ = None  # type: ignore[assignment]


class AgentTag(str, Enum):
    """Agent quality class used by the ranking AUC."""

    FAITHFUL = "faithful"
    PROBLEMATIC = "problematic"
    UNLABELED = "unlabeled"


class AgentLabels(BaseModel):
    """Per-agent quality tags covering exactly the agents of one matrix."""

    model_config = ConfigDict(frozen=True)

    agent_ids: tuple[str, ...]
    tags: tuple[AgentTag, ...]

    @model_validator(mode="after")
    def _validate_tags(self) -> AgentLabels:
        if len(self.agent_ids) != len(self.tags):
            raise ValueError(f"{len(self.tags)} tags for {len(self.agent_ids)} agents")
        _check_unique(self.agent_ids, "agent")
        return self

    @classmethod
    def from_mapping(
        cls, mapping: dict[str, AgentTag | str], agent_ids: Iterable[str]
    ) -> AgentLabels:
        """Align a label mapping to ``agent_ids``; missing agents are unlabeled."""
        ids = tuple(agent_ids)
        unknown = set(mapping) - set(ids)
        if unknown:
            raise ValueError(f"Labels reference unknown agents: {sorted(unknown)}")
        return cls(
            agent_ids=ids,
            tags=tuple(AgentTag(mapping.get(a, AgentTag.UNLABELED)) for a in ids),
        )

    def covers(self, agent_ids: Sequence[str]) -> bool:
        return tuple(agent_ids) == self.agent_ids

    def index_of(self, tag: AgentTag) -> np.ndarray:
        return np.array([k for k, t in enumerate(self.tags) if t == tag], dtype=int)

    def counts(self) -> dict[str, int]:
        return {tag.value: sum(1 for t in self.tags if t == tag) for tag in AgentTag}


class PairwiseJudgeRecord(BaseModel):
    """One judge measurement: agent_i discriminated against agent_j on one item."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    agent_i: str
    agent_j: str
    item_k: str = Field(alias="item")
    tpr: float = Field(ge=0.0, le=1.0)
    fpr: float = Field(ge=0.0, le=1.0)

    @model_validator(mode="after")
    def _distinct_agents(self) -> PairwiseJudgeRecord:
        if self.agent_i == self.agent_j:
            raise ValueError(f"Record pairs agent '{self.agent_i}' with itself")
        return self

    @property
    def signal(self) -> float:
        """TPR − FPR, the discrimination term in [−1, 1]."""
        return self.tpr - self.fpr
