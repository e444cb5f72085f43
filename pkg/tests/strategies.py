"""Hypothesis strategies for finite systems and rank functions."""

from hypothesis import strategies as st

from pardyn.dynamics import FiniteSystem
from pardyn.ranks import RankFunction


@st.composite
def systems(draw, min_size=1, max_size=8, cycle_free=False, global_=False):
    n = draw(st.integers(min_size, max_size))
    perm = draw(st.permutations(range(n)))
    if global_:
        defined = [True] * n
    else:
        defined = draw(st.lists(st.booleans(), min_size=n, max_size=n))
    images = [perm[i] if defined[i] else None for i in range(n)]
    if cycle_free:
        # drop one edge on every cycle
        seen = set()
        for s in range(n):
            if s in seen:
                continue
            path, i = [], s
            while i is not None and i not in seen and i not in path:
                path.append(i)
                i = images[i]
            seen.update(path)
            if i is not None and i in path:
                images[path[-1]] = None
    pts = tuple(f"x{i}" for i in range(n))
    return FiniteSystem(pts, tuple(images))


@st.composite
def systems_with_rank(draw, max_rank=3, **kw):
    sys = draw(systems(**kw))
    dom = [u for u in sys.points if u in sys.domain]
    vals = draw(st.lists(st.integers(1, max_rank), min_size=len(dom), max_size=len(dom)))
    return sys, RankFunction(sys, dict(zip(dom, vals)))
