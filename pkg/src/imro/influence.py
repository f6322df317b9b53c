"""Click-probability models driven by targeted friends (GIM and NIM)."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence, Union


class UserStatus(enum.IntEnum):
    UNTARGETED = 0
    CLICKED = 1
    NOT_CLICKED = 2


def clamp01(x: float) -> float:
    return max(0.0, min(1.0, x))


def _check_common(p0, alpha):
    if not 0.0 <= p0 <= 1.0:
        raise ValueError(f"p0={p0} outside [0, 1]")
    if alpha < 0:
        raise ValueError(f"alpha={alpha} must be non-negative")


@dataclass(frozen=True)
class GIM:
    """Graph influence model: boost ``1 - (1 - min(1, alpha*y/f))**f``."""

    p0: float
    alpha: float

    def __post_init__(self):
        _check_common(self.p0, self.alpha)

    name = "gim"

    def from_counts(self, f: int, y: int, n: int = 0) -> float:
        if f == 0:
            return self.p0
        z = clamp01(self.alpha * y / f)
        return clamp01(self.p0 + (1.0 - (1.0 - z) ** f))


@dataclass(frozen=True)
class NIM:
    """Negative influence model: ``p0 + alpha*y/f - beta*n/f`` clamped to [0, 1]."""

    p0: float
    alpha: float
    beta: float

    def __post_init__(self):
        _check_common(self.p0, self.alpha)
        if self.beta < 0:
            raise ValueError(f"beta={self.beta} must be non-negative")

    name = "nim"

    def from_counts(self, f: int, y: int, n: int = 0) -> float:
        if f == 0:
            return self.p0
        return clamp01(self.p0 + self.alpha * y / f - self.beta * n / f)


InfluenceParams = Union[GIM, NIM]


def make_params(model: str, p0: float, alpha: float, beta: float = 0.0) -> InfluenceParams:
    model = model.lower()
    if model == "gim":
        return GIM(p0, alpha)
    if model == "nim":
        return NIM(p0, alpha, beta)
    raise ValueError(f"unknown influence model {model!r}")


def friend_counts(graph, statuses: Sequence[UserStatus], user: int) -> tuple[int, int, int]:
    """Return (f, y, n): friend count, clicked friends, targeted-but-unclicked friends."""
    y = n = 0
    nbrs = graph.neighbors(user)
    for j in nbrs:
        s = statuses[j]
        if s == UserStatus.CLICKED:
            y += 1
        elif s == UserStatus.NOT_CLICKED:
            n += 1
    return len(nbrs), y, n


def click_probability(params: InfluenceParams, graph, statuses: Sequence[UserStatus], user: int) -> float:
    if len(statuses) != graph.node_count:
        raise ValueError("statuses must cover every node of the graph")
    if statuses[user] != UserStatus.UNTARGETED:
        raise ValueError(f"user {user} has already been targeted")
    return params.from_counts(*friend_counts(graph, statuses, user))
