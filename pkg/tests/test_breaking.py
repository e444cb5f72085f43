from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pardyn.breaking import (
    break_orbit,
    check_conditions,
    meets_each_orbit_at_most_once,
    orbit_sizes,
    verify_blurbs,
    verify_break_traces,
    verify_minimal_breaks,
    verify_simplicity,
)
from pardyn.dynamics import ValidationError, chain_decomposition, disjoint_union, restrict_domain
from pardyn.generators import chain, cycle, subsets
from pardyn.measures import conformal_measure_polytope

from . import oracles
from .strategies import systems


def test_break_orbit_examples():
    c5 = cycle(5)
    dec = chain_decomposition(break_orbit(c5, ["x0"]))
    assert dec.chains == (("x1", "x2", "x3", "x4", "x0"),) and not dec.cycles
    assert break_orbit(c5, []) == c5
    dec = chain_decomposition(break_orbit(cycle(4), ["x0", "x2"]))
    assert sorted(len(c) for c in dec.chains) == [2, 2]


def test_break_orbit_outside_domain():
    with pytest.raises(ValidationError, match="domain"):
        break_orbit(chain(3), ["x3"])


@given(systems(max_size=8), st.data())
def test_break_equals_restrict_domain(sys, data):
    dom = sorted(sys.domain)
    ys = data.draw(st.sets(st.sampled_from(dom))) if dom else set()
    assert break_orbit(sys, ys) == restrict_domain(sys, sys.domain - ys)


def test_conditions_single_point_on_five_cycle():
    rep = check_conditions(cycle(5), ["x0"])
    assert rep.preserves_orbit_size and rep.meets_once_and_in_Dgl and rep.preserves_measures
    assert rep.restricted_minimal and rep.restricted_simple and rep.preserves_dense_orbits


def test_conditions_two_points_on_five_cycle():
    rep = check_conditions(cycle(5), ["x0", "x2"])
    assert not rep.preserves_orbit_size
    assert not rep.meets_once_and_in_Dgl
    assert not rep.preserves_measures
    sizes = orbit_sizes(rep.restricted)
    assert 2 in sizes.values()


def test_conditions_one_point_per_cycle():
    sys = disjoint_union([cycle(3), cycle(4)])
    rep = check_conditions(sys, ["0.x0", "1.x0"])
    assert rep.preserves_orbit_size and rep.meets_once_and_in_Dgl and rep.preserves_measures
    assert not rep.restricted_minimal


def oracle_sizes(sys):
    out = {}
    for c in oracles.orbit_classes(sys):
        for i in c:
            out[i] = len(c)
    return out


@settings(max_examples=60)
@given(systems(max_size=7), st.data())
def test_conditions_against_oracles(sys, data):
    dom = sorted(sys.domain)
    ys = data.draw(st.sets(st.sampled_from(dom))) if dom else set()
    rep = check_conditions(sys, ys)
    assert rep.preserves_orbit_size == (oracle_sizes(sys) == oracle_sizes(rep.restricted))
    assert rep.preserves_measures == (oracles.bfs_vertices(sys) == oracles.bfs_vertices(rep.restricted))
    assert rep.restricted_minimal == oracles.minimal_by_subsets(rep.restricted)


@given(systems(max_size=7, global_=True), st.data())
def test_breaking_monotone(sys, data):
    pts = sorted(sys.points)
    small = data.draw(st.sets(st.sampled_from(pts)))
    big = small | data.draw(st.sets(st.sampled_from(pts)))
    a, b = orbit_sizes(break_orbit(sys, small)), orbit_sizes(break_orbit(sys, big))
    assert all(b[x] <= a[x] for x in sys.points)


def test_meets_once_examples():
    assert meets_each_orbit_at_most_once(cycle(6), ["x0"])
    assert not meets_each_orbit_at_most_once(cycle(6), ["x0", "x3"])
    assert meets_each_orbit_at_most_once(disjoint_union([cycle(2), cycle(2)]), ["0.x0", "1.x1"])


# -- exhaustive checks ----------------------------------------------------


def test_blurbs_partial_four_and_permutations_five():
    assert verify_blurbs(range(1, 5), "partial").ok
    rep = verify_blurbs(range(1, 6), "global")
    assert rep.ok and rep.instances == sum(f * 2**n for n, f in [(1, 1), (2, 2), (3, 6), (4, 24), (5, 120)])


def test_blurbs_empty_y_trivial():
    for sys in [cycle(3), chain(3), disjoint_union([cycle(2), chain(2)])]:
        rep = check_conditions(sys, [])
        assert rep.preserves_orbit_size and rep.preserves_measures
        assert rep.meets_once_and_in_Dgl


def test_blurbs_sharded_matches_serial():
    a = verify_blurbs([4], "partial", workers=1)
    b = verify_blurbs([4], "partial", workers=2)
    assert a.instances == b.instances and a.counterexamples == b.counterexamples


def test_blurbs_bad_mode():
    with pytest.raises(ValidationError):
        verify_blurbs([3], "sideways")


def test_minimal_breaks_and_skip_log():
    rep = verify_minimal_breaks(7)
    assert rep.ok and rep.instances == sum(2**n for n in range(1, 8))
    assert rep.skipped_statements and all("infinite" in s for s in rep.skipped_statements)


def test_simplicity_small():
    rep = verify_simplicity(5)
    assert rep.ok and rep.instances == sum(2**n - 1 for n in range(1, 6))


def test_stable_finiteness_single_cycles():
    for n in range(1, 7):
        sys = cycle(n)
        for ys in subsets(list(sys.points)):
            if not ys:
                continue
            broken = break_orbit(sys, ys)
            for d in (1, 2, 3):
                assert not conformal_measure_polytope(broken, d).is_empty


# -- traces after breaking ------------------------------------------------


def test_break_traces_line_bundle():
    rep = verify_break_traces(cycle(5), ["x0"], 1)
    assert rep.block_sizes == (5,)
    assert rep.trace_bijection and rep.consistent and rep.ok
    assert rep.trace_measures == ({f"x{i}": "1/5" for i in range(5)},)


def test_break_traces_rank_two():
    rep = verify_break_traces(cycle(5), ["x0"], 2)
    assert rep.block_sizes == (31,)
    assert rep.global_conformal_empty and rep.broken_conformal_nonempty
    (mu,) = rep.trace_measures
    # chain order after breaking is x1 -> x2 -> x3 -> x4 -> x0
    got = [F(mu[x]) for x in ("x1", "x2", "x3", "x4", "x0")]
    assert got == [F(k, 31) for k in (1, 2, 4, 8, 16)]


def test_break_traces_twice_on_one_orbit():
    rep = verify_break_traces(cycle(6), ["x0", "x3"], 1)
    assert not rep.meets_once
    assert len(rep.trace_measures) == 2 and len(rep.global_invariant_vertices) == 1
    assert rep.trace_bijection is False and rep.consistent


def test_break_traces_preconditions():
    with pytest.raises(ValidationError, match="global"):
        verify_break_traces(chain(3), [], 1)
    with pytest.raises(ValidationError, match="cycle"):
        verify_break_traces(disjoint_union([cycle(2), cycle(2)]), ["0.x0"], 1)


@settings(max_examples=30, deadline=None)
@given(systems(max_size=6, global_=True), st.data())
def test_break_traces_property(sys, data):
    # pick Y hitting every cycle at least once
    ys = set()
    for c in chain_decomposition(sys).cycles:
        ys |= data.draw(st.sets(st.sampled_from(c), min_size=1))
    rep = verify_break_traces(sys, ys, 1, verify=False)
    assert rep.consistent and rep.ok
