"""Finite partial dynamical systems.

A partial automorphism of a finite discrete space is an injective partial
self-map.  Every subset is open and closed, so "dense" means "everything".
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple


class ValidationError(ValueError):
    """Invalid system description or violated precondition."""


PointSet = FrozenSet[str]


@dataclass(frozen=True)
class FiniteSystem:
    """Points plus an injective partial map, stored as image indices."""

    points: Tuple[str, ...]
    images: Tuple[Optional[int], ...]

    def __post_init__(self):
        if len(self.points) != len(self.images):
            raise ValidationError("points and images differ in length")
        if len(set(self.points)) != len(self.points):
            raise ValidationError("duplicate point names")
        seen = {}
        for i, j in enumerate(self.images):
            if j is None:
                continue
            if not 0 <= j < len(self.points):
                raise ValidationError(f"image index {j} of {self.points[i]!r} out of range")
            if j in seen:
                raise ValidationError(
                    f"theta is not injective: {self.points[seen[j]]!r} and {self.points[i]!r} "
                    f"both map to {self.points[j]!r}"
                )
            seen[j] = i

    @classmethod
    def from_mapping(cls, points: Iterable[str], theta: Mapping[str, str]) -> "FiniteSystem":
        points = tuple(str(p) for p in points)
        index = {p: i for i, p in enumerate(points)}
        if len(index) != len(points):
            raise ValidationError("duplicate point names")
        images: List[Optional[int]] = [None] * len(points)
        for src, dst in theta.items():
            if src not in index:
                raise ValidationError(f"theta: unknown point {src!r}")
            if dst not in index:
                raise ValidationError(f"theta: unknown image {dst!r} of {src!r}")
            images[index[src]] = index[dst]
        return cls(points, tuple(images))

    @classmethod
    def from_json(cls, data) -> "FiniteSystem":
        if isinstance(data, str):
            data = json.loads(data)
        if not isinstance(data, dict):
            raise ValidationError("system description must be a JSON object")
        if "points" not in data:
            raise ValidationError("missing field 'points'")
        if not isinstance(data["points"], list):
            raise ValidationError("field 'points' must be a list")
        theta = data.get("theta", {})
        if not isinstance(theta, dict):
            raise ValidationError("field 'theta' must be an object")
        return cls.from_mapping(data["points"], theta)

    def to_json(self) -> dict:
        return {"points": list(self.points), "theta": self.theta}

    # -- basic structure -------------------------------------------------

    @cached_property
    def index(self) -> Dict[str, int]:
        return {p: i for i, p in enumerate(self.points)}

    @cached_property
    def preimages(self) -> Tuple[Optional[int], ...]:
        pre: List[Optional[int]] = [None] * len(self.points)
        for i, j in enumerate(self.images):
            if j is not None:
                pre[j] = i
        return tuple(pre)

    @property
    def theta(self) -> Dict[str, str]:
        return {self.points[i]: self.points[j] for i, j in enumerate(self.images) if j is not None}

    def __len__(self) -> int:
        return len(self.points)

    def _idx(self, x: str) -> int:
        try:
            return self.index[x]
        except KeyError:
            raise ValidationError(f"unknown point {x!r}") from None

    def _check_subset(self, ys: Iterable[str]) -> PointSet:
        ys = frozenset(ys)
        for y in ys:
            self._idx(y)
        return ys

    @cached_property
    def domain(self) -> PointSet:
        return frozenset(self.points[i] for i, j in enumerate(self.images) if j is not None)

    @cached_property
    def range(self) -> PointSet:
        return frozenset(self.points[j] for j in self.images if j is not None)

    def apply(self, x: str) -> Optional[str]:
        j = self.images[self._idx(x)]
        return None if j is None else self.points[j]

    def apply_inverse(self, x: str) -> Optional[str]:
        j = self.preimages[self._idx(x)]
        return None if j is None else self.points[j]

    def power(self, x: str, n: int) -> Optional[str]:
        """theta^n(x), or None when x is not in D_{-n}."""
        step = self.images if n >= 0 else self.preimages
        i: Optional[int] = self._idx(x)
        for _ in range(abs(n)):
            i = step[i]
            if i is None:
                return None
        return self.points[i]

    def image_of(self, ys: Iterable[str], n: int = 1) -> PointSet:
        """theta^n applied to the part of ``ys`` where it is defined."""
        out = set()
        for y in ys:
            z = self.power(y, n)
            if z is not None:
                out.add(z)
        return frozenset(out)

    def encoding(self) -> Tuple[int, ...]:
        """Canonical sort key: images with -1 for undefined."""
        return tuple(-1 if j is None else j for j in self.images)


def system(points: Sequence[str], theta: Mapping[str, str]) -> FiniteSystem:
    return FiniteSystem.from_mapping(points, theta)


# -- domains -------------------------------------------------------------


@dataclass(frozen=True)
class DomainTable:
    horizon: int
    sets: Dict[int, PointSet]
    stabilized: bool

    def __getitem__(self, n: int) -> PointSet:
        return self.sets[n]


def compute_domains(sys: FiniteSystem, horizon: Optional[int] = None) -> DomainTable:
    """D_n for |n| <= horizon; D_n is the codomain of theta^n."""
    if horizon is None:
        horizon = max(1, len(sys))
    if horizon < 1:
        raise ValidationError("horizon must be >= 1")
    sets: Dict[int, PointSet] = {0: frozenset(sys.points)}
    # D_{n+1} = theta(D_n ∩ U), D_{-(n+1)} = theta^{-1}(D_{-n} ∩ V)
    for sign in (1, -1):
        cur = sets[0]
        for n in range(1, horizon + 2):
            nxt = sys.image_of(cur, sign)
            sets[sign * n] = nxt
            if nxt == cur:
                for m in range(n + 1, horizon + 2):
                    sets[sign * m] = nxt
                break
            cur = nxt
    stabilized = sets[horizon] == sets[horizon + 1] and sets[-horizon] == sets[-horizon - 1]
    table = {n: s for n, s in sets.items() if abs(n) <= horizon}
    return DomainTable(horizon, table, stabilized)


# -- orbits ---------------------------------------------------------------


def forward_orbit(sys: FiniteSystem, x: str) -> PointSet:
    """{theta^n(x) : n >= 0}."""
    seen = [x]
    i = sys.images[sys._idx(x)]
    start = sys.index[x]
    while i is not None and i != start:
        seen.append(sys.points[i])
        i = sys.images[i]
    return frozenset(seen)


def backward_orbit(sys: FiniteSystem, x: str) -> PointSet:
    """{theta^-n(x) : n >= 0}."""
    seen = [x]
    start = sys._idx(x)
    i = sys.preimages[start]
    while i is not None and i != start:
        seen.append(sys.points[i])
        i = sys.preimages[i]
    return frozenset(seen)


def orbit(sys: FiniteSystem, x: str) -> PointSet:
    return forward_orbit(sys, x) | backward_orbit(sys, x)


@dataclass(frozen=True)
class ChainDecomposition:
    chains: Tuple[Tuple[str, ...], ...]
    cycles: Tuple[Tuple[str, ...], ...]

    @property
    def components(self) -> Tuple[Tuple[str, ...], ...]:
        return self.chains + self.cycles


def chain_decomposition(sys: FiniteSystem) -> ChainDecomposition:
    """Maximal theta-paths (start outside the range) and theta-cycles.

    Chains are ordered by the index of their first point, cycles by their
    smallest index and listed starting there.
    """
    n = len(sys)
    used = [False] * n
    chains = []
    for s in range(n):
        if sys.preimages[s] is not None:
            continue
        path = []
        i: Optional[int] = s
        while i is not None:
            used[i] = True
            path.append(sys.points[i])
            i = sys.images[i]
        chains.append(tuple(path))
    cycles = []
    for s in range(n):
        if used[s]:
            continue
        cyc = []
        i = s
        while not used[i]:
            used[i] = True
            cyc.append(sys.points[i])
            i = sys.images[i]
        cycles.append(tuple(cyc))
    return ChainDecomposition(tuple(chains), tuple(cycles))


class OrbitType(str, Enum):
    FIN = "Fin"
    PLUS = "Plus"
    MINUS = "Minus"
    GLOB = "Glob"


def orbit_decomposition(sys: FiniteSystem, horizon: Optional[int] = None) -> Dict[str, OrbitType]:
    """Classify each point by whether theta / theta^-1 apply indefinitely.

    Computed from domain membership: forward-infinite means x in D_{-n} for
    every n, backward-infinite means x in D_n for every n.  On a finite set
    the domains stabilise by n = |points|, so checking there is exact.
    """
    table = compute_domains(sys, horizon)
    h = table.horizon
    if not table.stabilized:
        table = compute_domains(sys, max(h, len(sys)))
        h = table.horizon
    fwd_all = table[-h]
    bwd_all = table[h]
    labels = {}
    for x in sys.points:
        f, b = x in fwd_all, x in bwd_all
        if f and b:
            labels[x] = OrbitType.GLOB
        elif f:
            labels[x] = OrbitType.PLUS
        elif b:
            labels[x] = OrbitType.MINUS
        else:
            labels[x] = OrbitType.FIN
    return labels


def global_part(sys: FiniteSystem) -> PointSet:
    labels = orbit_decomposition(sys)
    return frozenset(x for x, t in labels.items() if t is OrbitType.GLOB)


# -- invariance, minimality, freeness -------------------------------------


def is_invariant(sys: FiniteSystem, ys: Iterable[str]) -> bool:
    ys = sys._check_subset(ys)
    return sys.image_of(ys, 1) <= ys and sys.image_of(ys, -1) <= ys


def is_minimal(sys: FiniteSystem) -> bool:
    """Every orbit is dense, i.e. equals the whole point set."""
    everything = frozenset(sys.points)
    return all(orbit(sys, x) == everything for x in sys.points)


def is_free(sys: FiniteSystem) -> bool:
    return not chain_decomposition(sys).cycles


def has_proper_invariant_subset(sys: FiniteSystem) -> bool:
    """Literal search over all subsets for a nonempty proper invariant one."""
    pts = sys.points
    for r in range(1, len(pts)):
        for ys in combinations(pts, r):
            if is_invariant(sys, ys):
                return True
    return False


@dataclass(frozen=True)
class MinimalityReport:
    minimal: bool  # (1)
    all_orbits_dense: bool  # (2)
    glob_orbits_dense: Optional[bool]  # (3), None when D_gl is empty
    glob_forward_dense: Optional[bool]  # (4)
    glob_backward_dense: Optional[bool]  # (5)
    invariant_meeting_glob_trivial: bool  # (6)
    forward_closed_meeting_glob_trivial: bool  # (7)
    backward_closed_meeting_glob_trivial: bool  # (8)

    def to_json(self) -> dict:
        return {
            "1": self.minimal,
            "2": self.all_orbits_dense,
            "3": self.glob_orbits_dense,
            "4": self.glob_forward_dense,
            "5": self.glob_backward_dense,
            "6": self.invariant_meeting_glob_trivial,
            "7": self.forward_closed_meeting_glob_trivial,
            "8": self.backward_closed_meeting_glob_trivial,
        }


def _closed_sets_trivial(sys: FiniteSystem, glob: PointSet, step: int, both: bool) -> bool:
    """No proper nonempty Y meeting D_gl with theta^step(Y) in Y (and the
    reverse too when ``both``).

    Such Y exist iff some component other than a whole-space cycle can be
    split off: Y is a union of closed pieces, and any cycle it meets lies
    entirely in it.  Up to 14 points the search is literal.
    """
    pts = sys.points
    if len(pts) <= 14:
        everything = frozenset(pts)
        for r in range(1, len(pts)):
            for combo in combinations(pts, r):
                ys = frozenset(combo)
                if not ys & glob:
                    continue
                ok = sys.image_of(ys, step) <= ys
                if both:
                    ok = ok and sys.image_of(ys, -step) <= ys
                if ok and ys != everything:
                    return False
        return True
    dec = chain_decomposition(sys)
    # a cycle is closed in both directions; it is proper iff something else exists
    return not (dec.cycles and len(dec.components) > 1)


def minimality_report(sys: FiniteSystem) -> MinimalityReport:
    everything = frozenset(sys.points)
    glob = global_part(sys)
    if len(sys) <= 14:
        minimal = not has_proper_invariant_subset(sys)
    else:
        minimal = len(orbit_space(sys)) <= 1
    if glob:
        g3 = all(orbit(sys, x) == everything for x in glob)
        g4 = all(forward_orbit(sys, x) == everything for x in glob)
        g5 = all(backward_orbit(sys, x) == everything for x in glob)
    else:
        g3 = g4 = g5 = None
    return MinimalityReport(
        minimal=minimal,
        all_orbits_dense=is_minimal(sys),
        glob_orbits_dense=g3,
        glob_forward_dense=g4,
        glob_backward_dense=g5,
        invariant_meeting_glob_trivial=_closed_sets_trivial(sys, glob, 1, True),
        forward_closed_meeting_glob_trivial=_closed_sets_trivial(sys, glob, 1, False),
        backward_closed_meeting_glob_trivial=_closed_sets_trivial(sys, glob, -1, False),
    )


# -- restrictions ---------------------------------------------------------


def restrict_domain(sys: FiniteSystem, ws: Iterable[str]) -> FiniteSystem:
    """theta^(W): same points, theta kept exactly on W."""
    ws = sys._check_subset(ws)
    extra = ws - sys.domain
    if extra:
        raise ValidationError(f"W is not contained in domain(theta): {sorted(extra)}")
    images = tuple(j if sys.points[i] in ws else None for i, j in enumerate(sys.images))
    return FiniteSystem(sys.points, images)


def restrict_to_invariant(sys: FiniteSystem, ys: Iterable[str]) -> FiniteSystem:
    ys = sys._check_subset(ys)
    if not is_invariant(sys, ys):
        raise ValidationError("Y is not theta-invariant")
    pts = [p for p in sys.points if p in ys]
    theta = {p: q for p, q in sys.theta.items() if p in ys}
    return FiniteSystem.from_mapping(pts, theta)


def orbit_space(sys: FiniteSystem) -> List[Tuple[PointSet, FiniteSystem]]:
    """Orbits in order of first point, each with its restricted subsystem."""
    out = []
    seen = set()
    for x in sys.points:
        if x in seen:
            continue
        orb = orbit(sys, x)
        seen |= orb
        out.append((orb, restrict_to_invariant(sys, orb)))
    return out


def disjoint_union(systems: Sequence[FiniteSystem], prefixes: Optional[Sequence[str]] = None) -> FiniteSystem:
    """Union with point names ``f"{prefix}{name}"``; default prefixes ``"0."``, ``"1."``..."""
    if prefixes is None:
        prefixes = [f"{i}." for i in range(len(systems))]
    points: List[str] = []
    theta: Dict[str, str] = {}
    for pre, s in zip(prefixes, systems):
        points.extend(pre + p for p in s.points)
        theta.update({pre + a: pre + b for a, b in s.theta.items()})
    return FiniteSystem.from_mapping(points, theta)
