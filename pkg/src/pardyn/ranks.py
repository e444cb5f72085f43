"""Rank functions: the fibre dimension of the bundle over each domain point."""

from __future__ import annotations

import json
from collections.abc import Mapping
from typing import Dict, Iterator, Union

from .dynamics import FiniteSystem, ValidationError


class RankFunction(Mapping):
    """Positive integer rank on exactly domain(theta)."""

    def __init__(self, sys: FiniteSystem, values: Mapping[str, int]):
        values = dict(values)
        missing = sys.domain - values.keys()
        if missing:
            raise ValidationError(f"rank missing on domain point(s) {sorted(missing)}")
        extra = values.keys() - sys.domain
        if extra:
            raise ValidationError(f"rank given outside domain(theta): {sorted(extra)}")
        for p, d in values.items():
            if isinstance(d, bool) or not isinstance(d, int):
                raise ValidationError(f"rank at {p!r} must be an integer, got {d!r}")
            if d < 1:
                raise ValidationError(f"rank at {p!r} must be >= 1, got {d}")
        self._values: Dict[str, int] = {p: values[p] for p in sys.points if p in values}

    @classmethod
    def constant(cls, sys: FiniteSystem, d: int) -> "RankFunction":
        return cls(sys, {p: d for p in sys.domain})

    def __getitem__(self, x: str) -> int:
        return self._values[x]

    def __iter__(self) -> Iterator[str]:
        return iter(self._values)

    def __len__(self) -> int:
        return len(self._values)

    def __repr__(self) -> str:
        return f"RankFunction({self._values})"

    def __eq__(self, other) -> bool:
        if isinstance(other, Mapping):
            return dict(self.items()) == dict(other.items())
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._values.items()))

    def is_constant(self) -> bool:
        return len(set(self._values.values())) <= 1

    def to_json(self) -> Dict[str, int]:
        return dict(self._values)


RankLike = Union[int, Mapping[str, int], RankFunction]


def as_rank(sys: FiniteSystem, rank: RankLike) -> RankFunction:
    """Accept an integer (constant rank), a mapping, or a RankFunction."""
    if isinstance(rank, RankFunction):
        return RankFunction(sys, rank)
    if isinstance(rank, bool):
        raise ValidationError("rank must be an integer or a mapping")
    if isinstance(rank, int):
        if rank < 1:
            raise ValidationError(f"rank must be >= 1, got {rank}")
        return RankFunction.constant(sys, rank)
    if isinstance(rank, Mapping):
        return RankFunction(sys, rank)
    raise ValidationError(f"cannot interpret {rank!r} as a rank function")


def load_rank(sys: FiniteSystem, text: str) -> RankFunction:
    return as_rank(sys, json.loads(text))
