"""Invariant and conformal probability measures on finite systems.

A measure on a finite discrete space is a weight per point.  Invariance
(mu(theta^-1 Y) = mu(Y)) and rank-conformality (mu(theta Y) = sum_{u in Y}
d(u) mu(u)) reduce to one equation per domain point, so each chain or cycle
carries at most one free scalar.  The polytopes are built from that
structure and cross-checked against a brute-force oracle in the tests.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .dynamics import (
    FiniteSystem,
    OrbitType,
    ValidationError,
    chain_decomposition,
    orbit_decomposition,
)
from .exact import format_fraction, parse_fraction, rank as exact_rank
from .ranks import RankFunction, RankLike, as_rank


@dataclass(frozen=True)
class Measure:
    """Nonnegative rational weights, one per point, in system order."""

    points: Tuple[str, ...]
    weights: Tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.points) != len(self.weights):
            raise ValidationError("one weight per point required")
        for p, w in zip(self.points, self.weights):
            if w.numerator < 0:
                raise ValidationError(f"negative weight {w} at {p!r}")

    @classmethod
    def from_mapping(cls, sys: FiniteSystem, weights: Mapping[str, object]) -> "Measure":
        unknown = set(weights) - set(sys.points)
        if unknown:
            raise ValidationError(f"measure on unknown point(s) {sorted(unknown)}")
        return cls(sys.points, tuple(parse_fraction(weights.get(p, 0)) for p in sys.points))

    @classmethod
    def from_json(cls, sys: FiniteSystem, data: Mapping[str, str]) -> "Measure":
        return cls.from_mapping(sys, data)

    @property
    def total(self) -> Fraction:
        return sum(self.weights, Fraction(0))

    def __getitem__(self, x: str) -> Fraction:
        try:
            return self.weights[self.points.index(x)]
        except ValueError:
            raise ValidationError(f"unknown point {x!r}") from None

    def mass(self, ys: Iterable[str]) -> Fraction:
        ys = set(ys)
        return sum((w for p, w in zip(self.points, self.weights) if p in ys), Fraction(0))

    def as_dict(self) -> Dict[str, Fraction]:
        return dict(zip(self.points, self.weights))

    def support(self) -> frozenset:
        return frozenset(p for p, w in zip(self.points, self.weights) if w)

    def to_json(self) -> Dict[str, str]:
        return {p: format_fraction(w) for p, w in zip(self.points, self.weights)}

    def __str__(self) -> str:
        return "(" + ", ".join(str(w) for w in self.weights) + ")"


@dataclass(frozen=True)
class Constraint:
    """sum_x coefficient[x] * mu(x) == 0"""

    coefficients: Tuple[Tuple[str, Fraction], ...]
    label: str

    def evaluate(self, mu: Measure) -> Fraction:
        w = mu.as_dict()
        return sum((c * w[x] for x, c in self.coefficients), Fraction(0))

    def holds(self, mu: Measure) -> bool:
        return self.evaluate(mu) == 0

    def row(self, points: Sequence[str]) -> List[Fraction]:
        coeff = dict(self.coefficients)
        return [coeff.get(p, Fraction(0)) for p in points]

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "coefficients": {x: format_fraction(c) for x, c in self.coefficients},
            "rhs": "0/1",
        }


@dataclass(frozen=True)
class MeasurePolytope:
    """Vertices are computed eagerly; the constraint list and the affine
    dimension on first use."""

    points: Tuple[str, ...]
    vertices: Tuple[Measure, ...]
    _make_constraints: Callable[[], Tuple[Constraint, ...]] = field(repr=False, compare=False)

    @cached_property
    def constraints(self) -> Tuple[Constraint, ...]:
        return self._make_constraints()

    @cached_property
    def affine_dimension(self) -> int:
        return _affine_dimension(self.vertices)

    @property
    def is_empty(self) -> bool:
        return not self.vertices

    def contains(self, mu: Measure) -> bool:
        return first_violation(self, mu) is None

    def vertex_set(self) -> frozenset:
        return frozenset(v.weights for v in self.vertices)

    def to_json(self) -> dict:
        return {
            "constraints": [c.to_json() for c in self.constraints],
            "vertices": [v.to_json() for v in self.vertices],
            "affine_dimension": self.affine_dimension,
        }


def first_violation(polytope: MeasurePolytope, mu: Measure) -> Optional[str]:
    """Label of the first failed condition, or None when mu lies in the polytope."""
    if mu.points != polytope.points:
        return "measure lives on a different point set"
    if mu.total != 1:
        return f"total mass is {mu.total}, not 1"
    for c in polytope.constraints:
        if not c.holds(mu):
            return c.label
    return None


def _affine_dimension(vertices: Sequence[Measure]) -> int:
    if not vertices:
        return -1
    base = vertices[0].weights
    diffs = [[a - b for a, b in zip(v.weights, base)] for v in vertices[1:]]
    return exact_rank(diffs)


def _polytope(sys: FiniteSystem, factor: Mapping[str, int], constraints: Callable[[], Tuple[Constraint, ...]]) -> MeasurePolytope:
    """Vertices from the chain/cycle structure of mu(theta u) = factor(u) mu(u)."""
    dec = chain_decomposition(sys)
    index = sys.index
    vertices = []
    for comp in dec.chains + dec.cycles:
        is_cycle = comp in dec.cycles
        if is_cycle:
            loop = 1
            for u in comp:
                loop *= factor[u]
            if loop != 1:
                # mu(x) = loop * mu(x) forces zero mass on the cycle
                continue
        raw = [1]
        for u in comp[:-1]:
            raw.append(raw[-1] * factor[u])
        total = sum(raw)
        weights = [Fraction(0)] * len(sys)
        for p, w in zip(comp, raw):
            weights[index[p]] = Fraction(w, total)
        vertices.append(Measure(sys.points, tuple(weights)))
    return MeasurePolytope(sys.points, tuple(vertices), constraints)


def invariant_constraints(sys: FiniteSystem) -> Tuple[Constraint, ...]:
    out = []
    for v in sys.points:
        u = sys.apply_inverse(v)
        if u is None:
            continue
        # same orientation as the conformal rows, so d = 1 gives identical rows
        coeff = {v: Fraction(1)}
        coeff[u] = coeff.get(u, Fraction(0)) - 1
        coeff = tuple((p, c) for p, c in coeff.items() if c)
        out.append(Constraint(coeff, f"mu({u}) = mu({v})"))
    return tuple(out)


def conformal_constraints(sys: FiniteSystem, rank: RankFunction) -> Tuple[Constraint, ...]:
    out = []
    for u in sys.points:
        v = sys.apply(u)
        if v is None:
            continue
        d = rank[u]
        coeff = {v: Fraction(1)}
        coeff[u] = coeff.get(u, Fraction(0)) - d
        coeff = tuple((p, c) for p, c in coeff.items() if c)
        out.append(Constraint(coeff, f"mu({v}) = {d}*mu({u})"))
    return tuple(out)


def invariant_measure_polytope(sys: FiniteSystem) -> MeasurePolytope:
    factor = {u: 1 for u in sys.domain}
    return _polytope(sys, factor, lambda: invariant_constraints(sys))


def conformal_measure_polytope(sys: FiniteSystem, rank: RankLike) -> MeasurePolytope:
    rank = as_rank(sys, rank)
    return _polytope(sys, dict(rank), lambda: conformal_constraints(sys, rank))


# -- vanishing statements -------------------------------------------------


@dataclass(frozen=True)
class VanishingReport:
    ok: bool
    in_polytope: bool
    violated: Optional[str]
    d: int
    mass_plus: Fraction
    mass_minus: Fraction
    mass_glob: Fraction

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "in_polytope": self.in_polytope,
            "violated": self.violated,
            "d": self.d,
            "mass_plus": format_fraction(self.mass_plus),
            "mass_minus": format_fraction(self.mass_minus),
            "mass_glob": format_fraction(self.mass_glob),
        }


def verify_vanishing(sys: FiniteSystem, mu: Measure, d: int) -> VanishingReport:
    """Check mu against the d-conformal (d = 1: invariant) polytope and the
    forced zero masses: mu(D_+) = mu(D_-) = 0 for invariant mu, and
    mu(D_gl) = mu(D_+) = 0 for d > 1."""
    if d < 1:
        raise ValidationError("d must be a positive integer")
    poly = invariant_measure_polytope(sys) if d == 1 else conformal_measure_polytope(sys, d)
    violated = first_violation(poly, mu)
    labels = orbit_decomposition(sys)
    by_type = {t: [x for x, l in labels.items() if l is t] for t in OrbitType}
    plus, minus, glob = (mu.mass(by_type[t]) for t in (OrbitType.PLUS, OrbitType.MINUS, OrbitType.GLOB))
    if d == 1:
        vanish = plus == 0 and minus == 0
    else:
        vanish = glob == 0 and plus == 0
    in_poly = violated is None
    return VanishingReport(in_poly and vanish, in_poly, violated, d, plus, minus, glob)


# -- approximating sequence on a truncated ray ---------------------------


def truncated_ray(length: int) -> FiniteSystem:
    """Chain x_{-(N-1)} -> ... -> x_{-1} -> x_0, points listed from x_0 backwards."""
    if length < 1:
        raise ValidationError("ray length must be >= 1")
    points = [f"x{-i}" if i else "x0" for i in range(length)]
    theta = {points[i]: points[i - 1] for i in range(1, length)}
    return FiniteSystem.from_mapping(points, theta)


def conformal_sequence(ray_length: int, d: int, n: int) -> Tuple[Measure, Fraction]:
    """The n-th normalised average of d^-i times the point masses at
    theta^-i(x_0), i = 0..n, and its conformality defect bound
    d^-n / sum_{i<=n} d^-i."""
    if d < 1:
        raise ValidationError("d must be a positive integer")
    if not 0 <= n < ray_length:
        raise ValidationError(f"n must satisfy 0 <= n < {ray_length}, got {n}")
    ray = truncated_ray(ray_length)
    raw = [Fraction(1, d**i) for i in range(n + 1)]
    norm = sum(raw)
    weights = [w / norm for w in raw] + [Fraction(0)] * (ray_length - n - 1)
    bound = Fraction(1, d**n) / norm
    return Measure(ray.points, tuple(weights)), bound


def conformal_defects(sys: FiniteSystem, mu: Measure, rank: RankLike) -> Dict[str, Fraction]:
    """|mu(theta {u}) - d(u) mu({u})| for every domain point u."""
    rank = as_rank(sys, rank)
    return {u: abs(mu[sys.apply(u)] - rank[u] * mu[u]) for u in sys.points if u in sys.domain}
