"""Independent brute-force oracles.

Nothing here calls into the library's solvers; systems are read only
through their raw ``points`` and ``images`` arrays.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations, product
from typing import Dict, List, Optional, Sequence, Tuple


def raw_map(sys) -> Dict[int, int]:
    return {i: j for i, j in enumerate(sys.images) if j is not None}


def solve_exact(rows: List[List[Fraction]], rhs: List[Fraction]) -> Optional[List[Fraction]]:
    """Unique solution of a square-or-tall exact system, or None if singular
    or inconsistent."""
    m = [list(r) + [b] for r, b in zip(rows, rhs)]
    ncols = len(rows[0]) if rows else 0
    piv_row = 0
    pivots = []
    for c in range(ncols):
        p = next((r for r in range(piv_row, len(m)) if m[r][c] != 0), None)
        if p is None:
            return None
        m[piv_row], m[p] = m[p], m[piv_row]
        inv = 1 / m[piv_row][c]
        m[piv_row] = [v * inv for v in m[piv_row]]
        for r in range(len(m)):
            if r != piv_row and m[r][c] != 0:
                f = m[r][c]
                m[r] = [a - f * b for a, b in zip(m[r], m[piv_row])]
        pivots.append(c)
        piv_row += 1
    for r in range(piv_row, len(m)):
        if m[r][-1] != 0:
            return None
    return [m[i][-1] for i in range(ncols)]


def measure_rows(sys, factor: Optional[Dict[int, int]] = None) -> List[List[Fraction]]:
    """One row mu(theta u) - f(u) mu(u) = 0 per domain point (f = 1: invariance)."""
    n = len(sys.points)
    rows = []
    for u, v in raw_map(sys).items():
        row = [Fraction(0)] * n
        row[v] += 1
        row[u] -= factor[u] if factor else 1
        rows.append(row)
    return rows


def bfs_vertices(sys, factor: Optional[Dict[int, int]] = None) -> set:
    """Vertices of {A mu = 0, sum mu = 1, mu >= 0} as basic feasible
    solutions: for every support S, solve on S and keep strictly positive
    unique solutions.  A row with exactly one nonzero coefficient on S
    forces that coordinate to zero, so such supports are skipped."""
    n = len(sys.points)
    rows = measure_rows(sys, factor)
    out = set()
    for r in range(1, n + 1):
        for S in combinations(range(n), r):
            bad = False
            for row in rows:
                hits = [i for i in S if row[i] != 0]
                if len(hits) == 1:
                    bad = True
                    break
            if bad:
                continue
            sub = [[row[i] for i in S] for row in rows if any(row[i] for i in S)]
            sub.append([Fraction(1)] * r)
            rhs = [Fraction(0)] * (len(sub) - 1) + [Fraction(1)]
            sol = solve_exact(sub, rhs)
            if sol is None or any(x <= 0 for x in sol):
                continue
            w = [Fraction(0)] * n
            for i, x in zip(S, sol):
                w[i] = x
            # rows touching S from outside must also vanish
            if all(sum(a * b for a, b in zip(row, w)) == 0 for row in rows):
                out.add(tuple(w))
    return out


def invariant_subsets(sys) -> List[frozenset]:
    """All Y with theta(Y cap U) in Y and theta^-1(Y cap V) in Y."""
    m = raw_map(sys)
    inv = {v: u for u, v in m.items()}
    n = len(sys.points)
    out = []
    for mask in range(1 << n):
        Y = {i for i in range(n) if mask >> i & 1}
        if all(m[u] in Y for u in Y if u in m) and all(inv[v] in Y for v in Y if v in inv):
            out.append(frozenset(Y))
    return out


def minimal_by_subsets(sys) -> bool:
    n = len(sys.points)
    return all(len(Y) in (0, n) for Y in invariant_subsets(sys))


def orbit_classes(sys) -> List[frozenset]:
    """Connected components of the undirected graph of theta."""
    n = len(sys.points)
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for u, v in raw_map(sys).items():
        parent[find(u)] = find(v)
    groups: Dict[int, set] = {}
    for i in range(n):
        groups.setdefault(find(i), set()).add(i)
    return [frozenset(g) for g in groups.values()]


def path_count(ranks: Sequence[int]) -> Tuple[int, List[int]]:
    """Enumerate words (e_1, ..., e_{k-1}) explicitly; returns (l, per-position counts)."""
    counts = []
    for k in range(len(ranks) + 1):
        counts.append(sum(1 for _ in product(*(range(d) for d in ranks[:k]))))
    return sum(counts), counts


def power_image(sys, ys: set, n: int) -> set:
    """theta^n applied to the index set ys (n may be negative)."""
    m = raw_map(sys)
    if n < 0:
        m = {v: u for u, v in m.items()}
    cur = set(ys)
    for _ in range(abs(n)):
        cur = {m[x] for x in cur if x in m}
    return cur


def domain_by_paths(sys, n: int) -> set:
    """D_n = {theta^n(x)}: points with a path of length |n| ending (n > 0)
    or starting (n < 0) there."""
    return power_image(sys, set(range(len(sys.points))), n)
