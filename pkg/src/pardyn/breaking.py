"""Orbit-breaking: removing a set Y from the domain of theta, and exhaustive
checks of what that preserves."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .bundles import build_cp_algebra, trace_measure_pairs
from .dynamics import (
    FiniteSystem,
    ValidationError,
    backward_orbit,
    chain_decomposition,
    forward_orbit,
    global_part,
    has_proper_invariant_subset,
    is_free,
    is_minimal,
    orbit,
    restrict_domain,
)
from .generators import cycle, enumerate_partial_injections, enumerate_permutations, subsets
from .measures import conformal_measure_polytope, invariant_measure_polytope
from .ranks import RankLike, as_rank


def break_orbit(sys: FiniteSystem, ys: Iterable[str]) -> FiniteSystem:
    """theta restricted to domain(theta) minus Y."""
    ys = sys._check_subset(ys)
    extra = ys - sys.domain
    if extra:
        raise ValidationError(f"Y is not contained in domain(theta): {sorted(extra)}")
    return restrict_domain(sys, sys.domain - ys)


def orbit_sizes(sys: FiniteSystem) -> Dict[str, int]:
    out = {}
    for comp in chain_decomposition(sys).components:
        for x in comp:
            out[x] = len(comp)
    return out


def meets_each_orbit_at_most_once(sys: FiniteSystem, ys: Iterable[str]) -> bool:
    """theta^n(y) in Y implies theta^n(y) = y, for every y in Y and n != 0."""
    ys = sys._check_subset(ys)
    for y in ys:
        for step in (1, -1):
            cur = sys.power(y, step)
            while cur is not None and cur != y:
                if cur in ys:
                    return False
                cur = sys.power(cur, step)
    return True


def preserves_orbit_size(sys: FiniteSystem, ys: Iterable[str]) -> bool:
    before = orbit_sizes(sys)
    after = orbit_sizes(break_orbit(sys, ys))
    return before == after


def preserves_dense_orbits(sys: FiniteSystem, ys: Iterable[str]) -> bool:
    broken = break_orbit(sys, ys)
    everything = frozenset(sys.points)
    return all(orbit(broken, x) == everything for x in sys.points if orbit(sys, x) == everything)


def preserves_invariant_measures(sys: FiniteSystem, ys: Iterable[str]) -> bool:
    before = invariant_measure_polytope(sys).vertex_set()
    after = invariant_measure_polytope(break_orbit(sys, ys)).vertex_set()
    return before == after


@dataclass(frozen=True)
class BreakReport:
    preserves_orbit_size: bool
    meets_once_and_in_Dgl: bool
    preserves_measures: bool
    restricted_minimal: bool
    preserves_dense_orbits: bool
    restricted_simple: bool
    restricted: FiniteSystem

    def to_json(self) -> dict:
        return {
            "preserves_orbit_size": self.preserves_orbit_size,
            "meets_once_and_in_Dgl": self.meets_once_and_in_Dgl,
            "preserves_measures": self.preserves_measures,
            "restricted_minimal": self.restricted_minimal,
            "preserves_dense_orbits": self.preserves_dense_orbits,
            "restricted_simple": self.restricted_simple,
            "restricted": self.restricted.to_json(),
        }


def check_conditions(sys: FiniteSystem, ys: Iterable[str]) -> BreakReport:
    """Each field is computed on its own; none is derived from another."""
    ys = sys._check_subset(ys)
    broken = break_orbit(sys, ys)
    minimal = is_minimal(broken)
    return BreakReport(
        preserves_orbit_size=preserves_orbit_size(sys, ys),
        meets_once_and_in_Dgl=ys <= global_part(sys) and meets_each_orbit_at_most_once(sys, ys),
        preserves_measures=preserves_invariant_measures(sys, ys),
        restricted_minimal=minimal,
        preserves_dense_orbits=preserves_dense_orbits(sys, ys),
        restricted_simple=minimal and is_free(broken),
        restricted=broken,
    )


# -- exhaustive verification ----------------------------------------------


@dataclass
class VerifyReport:
    instances: int = 0
    counterexamples: List[dict] = field(default_factory=list)
    skipped_statements: List[str] = field(default_factory=list)

    def merge(self, other: "VerifyReport") -> None:
        self.instances += other.instances
        self.counterexamples.extend(other.counterexamples)

    @property
    def ok(self) -> bool:
        return not self.counterexamples

    def to_json(self) -> dict:
        return {
            "instances": self.instances,
            "counterexamples": self.counterexamples,
            "skipped_statements": list(self.skipped_statements),
        }


def _blurbs_shard(args: Tuple[str, int, int, int]) -> VerifyReport:
    mode, n, shard, nshards = args
    gen = enumerate_partial_injections(n) if mode == "partial" else enumerate_permutations(n)
    report = VerifyReport()
    for idx, sys in enumerate(gen):
        if idx % nshards != shard:
            continue
        glob = global_part(sys)
        sizes = orbit_sizes(sys)
        inv = invariant_measure_polytope(sys).vertex_set()
        for ys in subsets([p for p in sys.points if p in sys.domain]):
            broken = restrict_domain(sys, sys.domain - ys)
            s1 = orbit_sizes(broken) == sizes
            s2 = ys <= glob and meets_each_orbit_at_most_once(sys, ys)
            s3 = invariant_measure_polytope(broken).vertex_set() == inv
            report.instances += 1
            if not (s1 == s2 == s3):
                report.counterexamples.append(
                    {"index": idx, "system": sys.to_json(), "Y": sorted(ys), "statements": [s1, s2, s3]}
                )
    return report


def _run_shards(fn, jobs: Sequence[tuple], workers: int) -> VerifyReport:
    total = VerifyReport()
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(fn, jobs))
    else:
        parts = [fn(j) for j in jobs]
    for p in parts:
        total.merge(p)
    total.counterexamples.sort(key=lambda c: (len(c["system"]["points"]), c["index"], c["Y"]))
    return total


def verify_blurbs(sizes: Iterable[int], mode: str = "partial", workers: int = 1) -> VerifyReport:
    """For every system of the given sizes (partial injections, or
    permutations in global mode) and every Y in domain(theta), the three
    statements agree: orbit size preserved; Y inside D_gl meeting each
    orbit at most once; invariant measures unchanged."""
    if mode not in ("partial", "global"):
        raise ValidationError(f"mode must be 'partial' or 'global', got {mode!r}")
    workers = max(1, workers)
    jobs = [(mode, n, s, workers) for n in sizes for s in range(workers)]
    return _run_shards(_blurbs_shard, jobs, workers)


def verify_minimal_breaks(max_size: int) -> VerifyReport:
    """Single cycles (the minimal global finite systems), all Y.

    Checked: orbit size preserved <=> Y in D_gl meeting each orbit once <=>
    invariant measures unchanged; restricted minimal <=> all restricted
    orbits dense; (orbit size preserved and forward/backward orbits of Y
    dense) => dense orbits preserved.
    """
    report = VerifyReport(
        skipped_statements=[
            "dense orbits preserved => (orbit size preserved and orb+/orb- of Y dense): needs X infinite",
            "restricted minimal <=> orbit size preserved: needs X infinite",
        ]
    )
    for n in range(1, max_size + 1):
        sys = cycle(n)
        glob = global_part(sys)
        everything = frozenset(sys.points)
        for ys in subsets(list(sys.points)):
            c = check_conditions(sys, ys)
            broken = c.restricted
            s4 = c.preserves_orbit_size
            s5 = ys <= glob and meets_each_orbit_at_most_once(sys, ys)
            s6 = c.preserves_measures
            no_proper = not has_proper_invariant_subset(broken)
            dense_y = all(
                orbit(sys, y) == everything
                and forward_orbit(sys, y) == everything
                and backward_orbit(sys, y) == everything
                for y in ys
            )
            s3 = s4 and dense_y
            report.instances += 1
            failures = []
            if not (s4 == s5 == s6):
                failures.append("(4)<=>(5)<=>(6)")
            if no_proper != c.restricted_minimal:
                failures.append("minimal <=> all orbits dense")
            if s3 and not c.preserves_dense_orbits:
                failures.append("(3) => (2)")
            if failures:
                report.counterexamples.append(
                    {"index": n, "system": sys.to_json(), "Y": sorted(ys), "failed": failures}
                )
    return report


def verify_simplicity(max_size: int) -> VerifyReport:
    """Single cycles on <= max_size points, every nonempty Y: the broken
    algebra is one matrix block iff Y is a single point."""
    report = VerifyReport(skipped_statements=["Y = {} (restricted system is a cycle; no finite matrix model)"])
    for n in range(1, max_size + 1):
        sys = cycle(n)
        for ys in subsets(list(sys.points)):
            if not ys:
                continue
            cp = build_cp_algebra(break_orbit(sys, ys), 1, verify=False)
            simple = len(cp.blocks) == 1
            report.instances += 1
            if simple != (len(ys) == 1):
                report.counterexamples.append(
                    {"index": n, "system": sys.to_json(), "Y": sorted(ys), "blocks": list(cp.block_sizes)}
                )
    return report


@dataclass(frozen=True)
class BreakTraceReport:
    meets_once: bool
    block_sizes: Tuple[int, ...]
    trace_measures: Tuple[dict, ...]
    global_invariant_vertices: Optional[Tuple[dict, ...]]
    trace_bijection: Optional[bool]
    consistent: Optional[bool]
    broken_conformal_nonempty: bool
    global_conformal_empty: Optional[bool]

    @property
    def ok(self) -> bool:
        if self.consistent is False:
            return False
        if not self.broken_conformal_nonempty:
            return False
        return self.global_conformal_empty is not False

    def to_json(self) -> dict:
        return {
            "meets_once": self.meets_once,
            "block_sizes": list(self.block_sizes),
            "trace_measures": list(self.trace_measures),
            "global_invariant_vertices": None
            if self.global_invariant_vertices is None
            else list(self.global_invariant_vertices),
            "trace_bijection": self.trace_bijection,
            "consistent": self.consistent,
            "broken_conformal_nonempty": self.broken_conformal_nonempty,
            "global_conformal_empty": self.global_conformal_empty,
            "ok": self.ok,
        }


def is_global(sys: FiniteSystem) -> bool:
    return len(sys.domain) == len(sys)


def verify_break_traces(sys: FiniteSystem, ys: Iterable[str], rank: RankLike = 1, verify: bool = True) -> BreakTraceReport:
    """Compare traces of the broken algebra with measures of the global system.

    Line bundles (rank 1 everywhere): the invariant measures of the global
    system match the traces of the broken algebra exactly when Y meets
    every orbit at most once.  Any rank: the broken conformal set is
    nonempty; for constant rank d >= 2 the global one is empty.
    """
    if not is_global(sys):
        raise ValidationError("verify_break_traces needs a global system (theta a permutation)")
    ys = sys._check_subset(ys)
    broken = break_orbit(sys, ys)
    dec = chain_decomposition(broken)
    if dec.cycles:
        raise ValidationError(f"restricted system still has a cycle through {dec.cycles[0][0]!r}")
    rank = as_rank(broken, rank)
    cp = build_cp_algebra(broken, rank, verify=verify)
    pairs = trace_measure_pairs(cp)
    measures = frozenset(mu.weights for _, mu in pairs)
    once = meets_each_orbit_at_most_once(sys, ys)
    values = set(rank.values())
    line = values <= {1}
    if line:
        inv = invariant_measure_polytope(sys)
        bij = inv.vertex_set() == measures
        global_vertices = tuple(v.to_json() for v in inv.vertices)
        consistent = bij == once
    else:
        bij = consistent = None
        global_vertices = None
    if len(values) == 1 and min(values) >= 2:
        d = min(values)
        global_empty = conformal_measure_polytope(sys, d).is_empty
    else:
        global_empty = None
    return BreakTraceReport(
        meets_once=once,
        block_sizes=cp.block_sizes,
        trace_measures=tuple(mu.to_json() for _, mu in pairs),
        global_invariant_vertices=global_vertices,
        trace_bijection=bij,
        consistent=consistent,
        broken_conformal_nonempty=not conformal_measure_polytope(broken, rank).is_empty,
        global_conformal_empty=global_empty,
    )
