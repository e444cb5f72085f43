"""Correspondences twisted by a rank function, and a concrete matrix model of
their Cuntz-Pimsner algebras over cycle-free finite systems.

Model
-----
For a chain x_1 -> ... -> x_N the Hilbert space has one basis vector
|k, w> for each position k and each word w = (e_1, ..., e_{k-1}) with
1 <= e_j <= d(x_j).  Coordinate functions act diagonally and a section xi
acts as the weighted shift

    t(xi)|k, w> = sum_e xi(x_k)_e |k+1, w.e>      (zero at k = N).

The gauge degree of the matrix unit |k,w><k',w'| is k - k'.  Words are
stored by mixed-radix index, so appending e to a word of index i at
position k gives index i * d(x_k) + (e - 1) at position k + 1.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import product
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .dynamics import FiniteSystem, ValidationError, chain_decomposition, restrict_to_invariant
from .exact import ONE, ZERO, GaussianRational, SparseMatrix, SparseSpan, format_fraction
from .measures import Measure, conformal_measure_polytope, first_violation
from .ranks import RankFunction, RankLike, as_rank

Scalar = GaussianRational
Section = Dict[str, Tuple[GaussianRational, ...]]
Function = Mapping[str, object]

# relations are checked at build time only up to this many basis vectors
VERIFY_LIMIT = 400


class CycleError(ValidationError):
    """The system has a theta-cycle, so its algebra is not finite-dimensional."""


class RelationError(AssertionError):
    """A defining relation failed in the matrix model."""


# -- the correspondence ---------------------------------------------------


def as_section(sys: FiniteSystem, rank: RankFunction, xi: Mapping[str, Sequence[object]]) -> Section:
    """Validate a section; missing domain points are the zero vector."""
    out: Section = {}
    for p in xi:
        if p not in sys.domain:
            raise ValidationError(f"section defined at {p!r}, which is outside domain(theta)")
    for u in sys.points:
        if u not in sys.domain:
            continue
        vec = xi.get(u)
        if vec is None:
            out[u] = (ZERO,) * rank[u]
            continue
        if len(vec) != rank[u]:
            raise ValidationError(f"section at {u!r} has length {len(vec)}, rank is {rank[u]}")
        out[u] = tuple(GaussianRational.coerce(v) for v in vec)
    return out


def _function(sys: FiniteSystem, f: Function) -> Dict[str, GaussianRational]:
    for p in f:
        if p not in sys.index:
            raise ValidationError(f"function defined at unknown point {p!r}")
    return {p: GaussianRational.coerce(f.get(p, 0)) for p in sys.points}


def inner_product(sys: FiniteSystem, rank: RankLike, xi, eta) -> Dict[str, GaussianRational]:
    """<xi, eta>(u) = sum_e conj(xi(u)_e) eta(u)_e, zero off the domain."""
    rank = as_rank(sys, rank)
    xi, eta = as_section(sys, rank, xi), as_section(sys, rank, eta)
    out = {}
    for p in sys.points:
        if p in xi:
            s = ZERO
            for a, b in zip(xi[p], eta[p]):
                s = s + a.conjugate() * b
            out[p] = s
        else:
            out[p] = ZERO
    return out


def left_act(sys: FiniteSystem, rank: RankLike, f: Function, xi) -> Section:
    """phi(f) xi = xi * (f o theta)."""
    rank = as_rank(sys, rank)
    xi = as_section(sys, rank, xi)
    f = _function(sys, f)
    return {u: tuple(v * f[sys.apply(u)] for v in vec) for u, vec in xi.items()}


def right_act(sys: FiniteSystem, rank: RankLike, xi, f: Function) -> Section:
    rank = as_rank(sys, rank)
    xi = as_section(sys, rank, xi)
    f = _function(sys, f)
    return {u: tuple(v * f[u] for v in vec) for u, vec in xi.items()}


def basis_section(sys: FiniteSystem, rank: RankFunction, u: str, e: int) -> Section:
    """The section that is the e-th unit vector (1-based) at u and zero elsewhere."""
    vec = [ZERO] * rank[u]
    vec[e - 1] = ONE
    return as_section(sys, rank, {u: vec})


# -- fibres of the fixed point algebra ------------------------------------


def _backward_ranks(sys: FiniteSystem, rank: RankFunction, x: str, depth: Optional[int]) -> List[int]:
    out = []
    cur = x
    start = x
    while depth is None or len(out) < depth:
        prev = sys.apply_inverse(cur)
        if prev is None:
            break
        if prev == start and depth is None:
            raise CycleError(f"point {x!r} lies on a theta-cycle; its fibre is a UHF algebra")
        out.append(rank[prev])
        cur = prev
    return out


def _prod(values: Iterable[int]) -> int:
    p = 1
    for v in values:
        p *= v
    return p


def fixed_point_fibers(sys: FiniteSystem, rank: RankLike) -> Dict[str, int]:
    """Matrix size of the fixed-point fibre at each point: for x in
    D_j minus D_{j+1}, the product of the ranks along its backward path of
    length j."""
    rank = as_rank(sys, rank)
    return {x: _prod(_backward_ranks(sys, rank, x, None)) for x in sys.points}


def bn_fibers(sys: FiniteSystem, rank: RankLike, n: int) -> Dict[str, int]:
    """Fibre sizes of B_[0,n]: backward depth capped at n."""
    if n < 0:
        raise ValidationError("n must be >= 0")
    rank = as_rank(sys, rank)
    return {x: _prod(_backward_ranks(sys, rank, x, n)) for x in sys.points}


# -- the matrix model -----------------------------------------------------


@dataclass(frozen=True)
class Block:
    chain: Tuple[str, ...]
    ranks: Tuple[int, ...]  # d(x_1), ..., d(x_{N-1})
    offset: int

    @cached_property
    def multiplicities(self) -> Tuple[int, ...]:
        out = [1]
        for d in self.ranks:
            out.append(out[-1] * d)
        return tuple(out)

    @cached_property
    def starts(self) -> Tuple[int, ...]:
        """Global index of the first basis vector at each position."""
        out = [self.offset]
        for m in self.multiplicities[:-1]:
            out.append(out[-1] + m)
        return tuple(out)

    @cached_property
    def size(self) -> int:
        return sum(self.multiplicities)

    def words(self, k: int) -> List[Tuple[int, ...]]:
        """All words at 1-based position k, in index order."""
        return list(product(*(range(1, d + 1) for d in self.ranks[: k - 1])))


@dataclass(frozen=True)
class Trace:
    """Convex weights over the blocks."""

    weights: Tuple[Fraction, ...]

    def __post_init__(self):
        if any(w < 0 for w in self.weights):
            raise ValidationError("trace weights must be nonnegative")
        if sum(self.weights, Fraction(0)) != 1:
            raise ValidationError("trace weights must sum to 1")

    def to_json(self) -> List[str]:
        return [format_fraction(w) for w in self.weights]


class CPAlgebra:
    """Block-diagonal matrix model; one full matrix block per chain."""

    def __init__(self, sys: FiniteSystem, rank: RankFunction):
        dec = chain_decomposition(sys)
        if dec.cycles:
            raise CycleError(
                f"system has a theta-cycle through {dec.cycles[0][0]!r}; "
                "the matrix model needs a cycle-free system"
            )
        self.sys = sys
        self.rank = rank
        blocks = []
        offset = 0
        for chain in dec.chains:
            b = Block(chain, tuple(rank[x] for x in chain[:-1]), offset)
            blocks.append(b)
            offset += b.size
        self.blocks: Tuple[Block, ...] = tuple(blocks)
        self.size = offset
        self._where: Dict[str, Tuple[int, int]] = {}
        for bi, b in enumerate(self.blocks):
            for k, x in enumerate(b.chain, start=1):
                self._where[x] = (bi, k)

    def __repr__(self) -> str:
        return f"CPAlgebra(blocks={self.block_sizes})"

    @property
    def block_sizes(self) -> Tuple[int, ...]:
        return tuple(b.size for b in self.blocks)

    def position(self, x: str) -> Tuple[int, int]:
        """(block index, 1-based position along the chain) of a point."""
        try:
            return self._where[x]
        except KeyError:
            raise ValidationError(f"unknown point {x!r}") from None

    def multiplicity(self, x: str) -> int:
        b, k = self.position(x)
        return self.blocks[b].multiplicities[k - 1]

    def indices_at(self, x: str) -> range:
        b, k = self.position(x)
        blk = self.blocks[b]
        s = blk.starts[k - 1]
        return range(s, s + blk.multiplicities[k - 1])

    @cached_property
    def basis(self) -> List[Tuple[int, int, Tuple[int, ...]]]:
        """(block, position, word) for every basis vector, in index order."""
        out = []
        for bi, b in enumerate(self.blocks):
            for k in range(1, len(b.chain) + 1):
                out.extend((bi, k, w) for w in b.words(k))
        return out

    @cached_property
    def _labels(self) -> Tuple[Tuple[int, int], ...]:
        """(block, position) per global index, without materialising words."""
        out = []
        for bi, b in enumerate(self.blocks):
            for k, m in enumerate(b.multiplicities, start=1):
                out.extend([(bi, k)] * m)
        return tuple(out)

    def block_of(self, i: int) -> int:
        return self._labels[i][0]

    def degree(self, i: int, j: int) -> int:
        (bi, ki), (bj, kj) = self._labels[i], self._labels[j]
        if bi != bj:
            raise ValidationError(f"entry ({i}, {j}) crosses blocks")
        return ki - kj

    def check_conforms(self, a: SparseMatrix) -> None:
        if not isinstance(a, SparseMatrix) or a.n != self.size:
            raise ValidationError(f"shape mismatch: expected a {self.size}x{self.size} block matrix")
        for i, j in a.entries:
            if self._labels[i][0] != self._labels[j][0]:
                raise ValidationError(f"shape mismatch: entry ({i}, {j}) lies outside the blocks")

    # -- generators -------------------------------------------------------

    def identity(self) -> SparseMatrix:
        return SparseMatrix.identity(self.size)

    def pi(self, f: Function) -> SparseMatrix:
        f = _function(self.sys, f)
        entries = {}
        for x, v in f.items():
            if v:
                for i in self.indices_at(x):
                    entries[(i, i)] = v
        return SparseMatrix._trusted(self.size, entries)

    def indicator(self, x: str) -> SparseMatrix:
        return self.pi({x: 1})

    def t(self, xi) -> SparseMatrix:
        xi = as_section(self.sys, self.rank, xi)
        entries = {}
        for u, vec in xi.items():
            bi, k = self.position(u)
            blk = self.blocks[bi]
            src, dst = blk.starts[k - 1], blk.starts[k]
            d = len(vec)
            for widx in range(blk.multiplicities[k - 1]):
                for e, v in enumerate(vec):
                    if v:
                        entries[(dst + widx * d + e, src + widx)] = v
        return SparseMatrix._trusted(self.size, entries)

    def basis_sections(self) -> List[Tuple[str, int]]:
        return [(u, e) for u in self.sys.points if u in self.sys.domain for e in range(1, self.rank[u] + 1)]

    def generators(self) -> Dict[str, SparseMatrix]:
        """pi(1_x) for every point and t(e) for every basis section."""
        gens = {f"pi(1_{x})": self.indicator(x) for x in self.sys.points}
        for u, e in self.basis_sections():
            gens[f"t(e{e}@{u})"] = self.t(basis_section(self.sys, self.rank, u, e))
        return gens

    def block_algebra(self, b: int) -> "CPAlgebra":
        blk = self.blocks[b]
        sub = restrict_to_invariant(self.sys, blk.chain)
        return CPAlgebra(sub, RankFunction(sub, {x: self.rank[x] for x in blk.chain[:-1]}))


def verify_relations(cp: CPAlgebra, xi, eta, f: Function) -> None:
    """t(xi)* t(eta) = pi(<xi,eta>), pi(f) t(xi) = t(phi(f) xi),
    t(xi) pi(f) = t(xi f).  Raises RelationError naming the failure."""
    sys, rank = cp.sys, cp.rank
    tx, te = cp.t(xi), cp.t(eta)
    if tx.adjoint() @ te != cp.pi(inner_product(sys, rank, xi, eta)):
        raise RelationError("t(xi)* t(eta) != pi(<xi, eta>)")
    pf = cp.pi(f)
    if pf @ tx != cp.t(left_act(sys, rank, f, xi)):
        raise RelationError("pi(f) t(xi) != t(phi(f) xi)")
    if tx @ pf != cp.t(right_act(sys, rank, xi, f)):
        raise RelationError("t(xi) pi(f) != t(xi f)")


def verify_covariance(cp: CPAlgebra) -> None:
    """pi(1_v) = sum_e t(e_e@u) t(e_e@u)* for every v = theta(u)."""
    for u in cp.sys.points:
        v = cp.sys.apply(u)
        if v is None:
            continue
        total = SparseMatrix.zero(cp.size)
        for e in range(1, cp.rank[u] + 1):
            s = cp.t(basis_section(cp.sys, cp.rank, u, e))
            total = total + s @ s.adjoint()
        if total != cp.indicator(v):
            raise RelationError(f"covariance fails at {v!r}")


def build_cp_algebra(sys: FiniteSystem, rank: RankLike, verify: bool = True) -> CPAlgebra:
    """Matrix model of O(Gamma(V, theta)) for a cycle-free system.

    With ``verify`` the relations are checked on basis sections against the
    indicators of u, theta(u) and the unit; other indicators annihilate both
    sides by construction.  Pairs of sections at different points are only
    tried on small models.  Above VERIFY_LIMIT basis vectors nothing is
    checked and the model is used for block sizes only.
    """
    cp = CPAlgebra(sys, as_rank(sys, rank))
    if verify and cp.size <= VERIFY_LIMIT:
        secs = [(u, basis_section(sys, cp.rank, u, e)) for u, e in cp.basis_sections()]
        unit = {x: 1 for x in sys.points}
        for u, xi in secs:
            for v, eta in secs:
                if u != v and len(secs) > 24:
                    continue
                for f in ({u: 1}, {sys.apply(u): 1}, unit):
                    verify_relations(cp, xi, eta, f)
        verify_covariance(cp)
    return cp


def expectation(cp: CPAlgebra, a: SparseMatrix) -> SparseMatrix:
    """Projection onto gauge degree zero: keep entries with k == k'."""
    cp.check_conforms(a)
    labels = cp._labels
    return SparseMatrix._trusted(
        a.n, {(i, j): v for (i, j), v in a.entries.items() if labels[i][1] == labels[j][1]}
    )


def homogeneous_part(cp: CPAlgebra, a: SparseMatrix, degree: int) -> SparseMatrix:
    cp.check_conforms(a)
    labels = cp._labels
    return SparseMatrix._trusted(
        a.n, {(i, j): v for (i, j), v in a.entries.items() if labels[i][1] - labels[j][1] == degree}
    )


# -- traces ---------------------------------------------------------------


def traces_of_cp(cp: CPAlgebra) -> List[Trace]:
    """Extreme traces: the normalised trace of a single block."""
    n = len(cp.blocks)
    return [Trace(tuple(Fraction(int(i == b)) for i in range(n))) for b in range(n)]


def evaluate_trace(cp: CPAlgebra, tau: Trace, a: SparseMatrix) -> GaussianRational:
    cp.check_conforms(a)
    if len(tau.weights) != len(cp.blocks):
        raise ValidationError("trace has the wrong number of block weights")
    sums = [ZERO] * len(cp.blocks)
    for (i, j), v in a.entries.items():
        if i == j:
            b = cp._labels[i][0]
            sums[b] = sums[b] + v
    total = ZERO
    for w, s, blk in zip(tau.weights, sums, cp.blocks):
        if w:
            total = total + s * GaussianRational(w / blk.size)
    return total


def measure_from_trace(cp: CPAlgebra, tau: Trace) -> Measure:
    """mu(x) = tau(pi(1_x)).

    pi(1_x) is the identity on the basis vectors at x, so within a block of
    size l the normalised trace gives multiplicity(x) / l; no matrix is formed.
    """
    if len(tau.weights) != len(cp.blocks):
        raise ValidationError("trace has the wrong number of block weights")
    weights = []
    for x in cp.sys.points:
        b, k = cp.position(x)
        blk = cp.blocks[b]
        weights.append(tau.weights[b] * Fraction(blk.multiplicities[k - 1], blk.size))
    return Measure(cp.sys.points, tuple(weights))


def trace_from_measure(cp: CPAlgebra, mu: Measure, a: SparseMatrix) -> GaussianRational:
    """tau_mu(a) = sum_x mu(x) tr(Phi(a) at x), tr normalised on the fibre."""
    poly = conformal_measure_polytope(cp.sys, cp.rank)
    bad = first_violation(poly, mu)
    if bad is not None:
        raise ValidationError(f"measure is not conformal: {bad}")
    phi = expectation(cp, a)
    diag = {i: v for (i, j), v in phi.entries.items() if i == j}
    total = ZERO
    for x, w in mu.as_dict().items():
        if not w:
            continue
        s = ZERO
        for i in cp.indices_at(x):
            if i in diag:
                s = s + diag[i]
        total = total + s * GaussianRational(w / cp.multiplicity(x))
    return total


def trace_measure_pairs(cp: CPAlgebra) -> List[Tuple[Trace, Measure]]:
    return [(tau, measure_from_trace(cp, tau)) for tau in traces_of_cp(cp)]


# -- generated span -------------------------------------------------------


def generated_span(cp: CPAlgebra, limit: Optional[int] = None) -> List[SparseMatrix]:
    """Linearly independent words in the generators and their adjoints,
    closed under left multiplication, starting from the identity.

    Their span is the unital *-algebra generated by pi(f) and t(xi).
    Stops early once ``limit`` elements are found.
    """
    gens = list(cp.generators().values())
    gens += [g.adjoint() for g in gens]
    span = SparseSpan()
    found = [cp.identity()]
    span.add(found[0].entries)
    queue = 0
    while queue < len(found):
        m = found[queue]
        queue += 1
        for g in gens:
            c = g @ m
            if c.is_zero():
                continue
            if span.add(c.entries):
                found.append(c)
                if limit is not None and len(found) >= limit:
                    return found
    return found


def block_span_dimension(cp: CPAlgebra, b: int) -> int:
    """Dimension of the algebra generated inside block b (l^2 when full)."""
    sub = cp.block_algebra(b)
    return len(generated_span(sub, limit=sub.size**2))


def degree_zero_dimension(cp: CPAlgebra, elements: Sequence[SparseMatrix]) -> int:
    span = SparseSpan()
    for a in elements:
        span.add(expectation(cp, a).entries)
    return len(span)


def random_scalar(rng: random.Random, max_num: int = 5, max_den: int = 4, complex_: bool = True) -> GaussianRational:
    re = Fraction(rng.randint(-max_num, max_num), rng.randint(1, max_den))
    im = Fraction(rng.randint(-max_num, max_num), rng.randint(1, max_den)) if complex_ else Fraction(0)
    return GaussianRational(re, im)


def random_section(cp: CPAlgebra, rng: random.Random) -> Section:
    return {u: tuple(random_scalar(rng) for _ in range(d)) for u, d in cp.rank.items()}


def random_function(cp: CPAlgebra, rng: random.Random) -> Dict[str, GaussianRational]:
    return {x: random_scalar(rng) for x in cp.sys.points}


def random_element(cp: CPAlgebra, rng: random.Random, nnz: int = 6) -> SparseMatrix:
    """Random matrix supported inside the blocks (each block is all of M_l)."""
    entries = {}
    for _ in range(nnz):
        b = rng.randrange(len(cp.blocks))
        blk = cp.blocks[b]
        i = blk.offset + rng.randrange(blk.size)
        j = blk.offset + rng.randrange(blk.size)
        entries[(i, j)] = random_scalar(rng)
    return SparseMatrix(cp.size, entries)


def cp_report(cp: CPAlgebra, matrices: bool = False) -> dict:
    fibers = {x: cp.multiplicity(x) for x in cp.sys.points}
    report = {
        "blocks": [
            {"chain": list(b.chain), "size": b.size, "multiplicities": list(b.multiplicities)}
            for b in cp.blocks
        ],
        "block_sizes": list(cp.block_sizes),
        "fibers": fibers,
        "traces": [{"weights": tau.to_json(), "measure": mu.to_json()} for tau, mu in trace_measure_pairs(cp)],
    }
    if matrices:
        report["generators"] = {name: g.to_json() for name, g in cp.generators().items()}
    return report
