"""Deterministic constructors for example systems and exhaustive enumerators."""

from __future__ import annotations

import os
import random
from dataclasses import dataclass, field
from itertools import combinations, permutations, product
from math import comb, factorial, gcd
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple

from .dynamics import FiniteSystem, ValidationError, disjoint_union
from .ranks import RankFunction

MAX_ENUMERATION = 8


def chain(n: int, prefix: str = "x") -> FiniteSystem:
    """x1 -> x2 -> ... -> xn."""
    if n < 1:
        raise ValidationError("chain size must be >= 1")
    pts = [f"{prefix}{i}" for i in range(1, n + 1)]
    return FiniteSystem.from_mapping(pts, {pts[i]: pts[i + 1] for i in range(n - 1)})


def cycle(n: int, prefix: str = "x") -> FiniteSystem:
    """x0 -> x1 -> ... -> x(n-1) -> x0."""
    if n < 1:
        raise ValidationError("cycle size must be >= 1")
    pts = [f"{prefix}{i}" for i in range(n)]
    return FiniteSystem.from_mapping(pts, {pts[i]: pts[(i + 1) % n] for i in range(n)})


def rotation(q: int, p: int, break_set: Iterable[int] = ()) -> FiniteSystem:
    """x -> x + p mod q on Z/q, with the break set removed from the domain."""
    if q < 1:
        raise ValidationError("modulus must be >= 1")
    if gcd(p, q) != 1:
        raise ValidationError(f"rotation needs gcd(p, q) = 1, got p={p}, q={q}")
    broken = set()
    for b in break_set:
        if not 0 <= b < q:
            raise ValidationError(f"break point {b} outside Z/{q}")
        broken.add(b)
    pts = [f"x{i}" for i in range(q)]
    return FiniteSystem.from_mapping(pts, {pts[i]: pts[(i + p) % q] for i in range(q) if i not in broken})


def random_system(n: int, seed: int, p_defined: float = 0.75) -> FiniteSystem:
    """Random partial injection on x0..x(n-1): a random permutation restricted
    to a random subset."""
    if n < 1:
        raise ValidationError("size must be >= 1")
    rng = random.Random(seed)
    perm = list(range(n))
    rng.shuffle(perm)
    pts = [f"x{i}" for i in range(n)]
    theta = {pts[i]: pts[perm[i]] for i in range(n) if rng.random() < p_defined}
    return FiniteSystem.from_mapping(pts, theta)


def random_rank(sys: FiniteSystem, seed: int, max_rank: int = 3) -> RankFunction:
    rng = random.Random(seed)
    return RankFunction(sys, {u: rng.randint(1, max_rank) for u in sys.points if u in sys.domain})


# -- specs ----------------------------------------------------------------


@dataclass(frozen=True)
class SystemSpec:
    kind: str
    n: Optional[int] = None
    q: Optional[int] = None
    p: Optional[int] = None
    break_set: Tuple[int, ...] = ()
    seed: Optional[int] = None
    parts: Tuple["SystemSpec", ...] = field(default=())
    rank: Optional[int] = None


KINDS = ("chain", "cycle", "disjoint_union", "rotation", "random")


def default_seed() -> int:
    raw = os.environ.get("PARDYN_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        raise ValidationError(f"PARDYN_SEED must be an integer, got {raw!r}") from None


def _ints(text: str, what: str) -> List[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip() != ""]
    except ValueError:
        raise ValidationError(f"bad integer list in {what!r}") from None


def parse_spec(text: str) -> SystemSpec:
    """Parse ``chain:3``, ``cycle:5``, ``rotation:Q,P[,b1,b2...]``,
    ``random:N[,SEED]`` or a ``+``-joined disjoint union of these."""
    text = text.strip()
    if "+" in text:
        return SystemSpec("disjoint_union", parts=tuple(parse_spec(t) for t in text.split("+")))
    kind, sep, args = text.partition(":")
    if not sep or kind not in KINDS:
        raise ValidationError(f"unknown system spec {text!r}; expected one of chain/cycle/rotation/random")
    vals = _ints(args, text)
    if kind in ("chain", "cycle"):
        if len(vals) != 1:
            raise ValidationError(f"{kind} takes one size, got {text!r}")
        return SystemSpec(kind, n=vals[0])
    if kind == "rotation":
        if len(vals) < 2:
            raise ValidationError(f"rotation needs q and p, got {text!r}")
        return SystemSpec(kind, q=vals[0], p=vals[1], break_set=tuple(vals[2:]))
    if kind == "random":
        if len(vals) not in (1, 2):
            raise ValidationError(f"random takes N[,SEED], got {text!r}")
        return SystemSpec(kind, n=vals[0], seed=vals[1] if len(vals) == 2 else None)
    raise ValidationError(f"cannot parse {text!r}")


def make(spec: SystemSpec) -> Tuple[FiniteSystem, Optional[RankFunction]]:
    if spec.kind == "chain":
        sys = chain(spec.n or 0)
    elif spec.kind == "cycle":
        sys = cycle(spec.n or 0)
    elif spec.kind == "rotation":
        sys = rotation(spec.q or 0, spec.p or 0, spec.break_set)
    elif spec.kind == "random":
        seed = default_seed() if spec.seed is None else spec.seed
        sys = random_system(spec.n or 0, seed)
    elif spec.kind == "disjoint_union":
        if not spec.parts:
            raise ValidationError("disjoint union needs at least one part")
        sys = disjoint_union([make(p)[0] for p in spec.parts])
    else:
        raise ValidationError(f"unknown kind {spec.kind!r}")
    if spec.rank is None:
        return sys, None
    if spec.rank < 1:
        raise ValidationError("rank must be >= 1")
    return sys, RankFunction.constant(sys, spec.rank)


# -- exhaustive enumeration -----------------------------------------------


def count_partial_injections(n: int) -> int:
    return sum(comb(n, k) ** 2 * factorial(k) for k in range(n + 1))


def _points(n: int) -> Tuple[str, ...]:
    return tuple(f"x{i}" for i in range(n))


def enumerate_partial_injections(n: int) -> Iterator[FiniteSystem]:
    """Every injective partial self-map of {x0..x(n-1)} once, in
    lexicographic order of the image tuple (undefined before 0 < 1 < ...)."""
    if n < 0 or n > MAX_ENUMERATION:
        raise ValidationError(f"enumeration is limited to 0 <= n <= {MAX_ENUMERATION}")
    pts = _points(n)
    images: List[Optional[int]] = [None] * n
    used = [False] * n

    def rec(i: int) -> Iterator[FiniteSystem]:
        if i == n:
            yield FiniteSystem(pts, tuple(images))
            return
        images[i] = None
        yield from rec(i + 1)
        for j in range(n):
            if not used[j]:
                used[j] = True
                images[i] = j
                yield from rec(i + 1)
                used[j] = False
        images[i] = None

    return rec(0)


def enumerate_permutations(n: int) -> Iterator[FiniteSystem]:
    if n < 0 or n > MAX_ENUMERATION:
        raise ValidationError(f"enumeration is limited to 0 <= n <= {MAX_ENUMERATION}")
    pts = _points(n)
    for perm in permutations(range(n)):
        yield FiniteSystem(pts, tuple(perm))


def systems_up_to(max_size: int, mode: str = "partial", min_size: int = 1) -> Iterator[FiniteSystem]:
    gen = enumerate_partial_injections if mode == "partial" else enumerate_permutations
    if mode not in ("partial", "global"):
        raise ValidationError(f"mode must be 'partial' or 'global', got {mode!r}")
    for n in range(min_size, max_size + 1):
        yield from gen(n)


def all_rank_functions(sys: FiniteSystem, max_rank: int) -> Iterator[RankFunction]:
    dom = [u for u in sys.points if u in sys.domain]
    for vals in product(range(1, max_rank + 1), repeat=len(dom)):
        yield RankFunction(sys, dict(zip(dom, vals)))


def subsets(items: Sequence[str]) -> Iterator[frozenset]:
    """All subsets, by size then lexicographically."""
    for r in range(len(items) + 1):
        for c in combinations(items, r):
            yield frozenset(c)
