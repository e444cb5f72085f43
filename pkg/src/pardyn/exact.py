"""Exact scalars, sparse matrices and rank computations.

Everything here is over the rationals or the Gaussian rationals Q(i); no
floating point is used anywhere.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple, Union

Rational = Union[int, Fraction]


def parse_fraction(text: Union[str, int, Fraction]) -> Fraction:
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not an exact fraction: {text!r}") from exc


def format_fraction(value: Rational) -> str:
    """Always ``p/q``, never a decimal."""
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


class GaussianRational:
    """An element (re + im*i)/den of Q(i), stored as reduced integers."""

    __slots__ = ("re", "im", "den")

    def __init__(self, re: Rational = 0, im: Rational = 0, den: int = 1):
        if isinstance(re, Fraction) or isinstance(im, Fraction):
            re, im = Fraction(re) / den, Fraction(im) / den
            den = re.denominator * im.denominator // gcd(re.denominator, im.denominator)
            re_n = re.numerator * (den // re.denominator)
            im_n = im.numerator * (den // im.denominator)
            self._set(re_n, im_n, den)
        else:
            if den == 0:
                raise ZeroDivisionError("zero denominator")
            self._set(int(re), int(im), int(den))

    def _set(self, re: int, im: int, den: int) -> None:
        if den < 0:
            re, im, den = -re, -im, -den
        g = gcd(gcd(re, im), den)
        if g > 1:
            re, im, den = re // g, im // g, den // g
        self.re, self.im, self.den = re, im, den

    @classmethod
    def _raw(cls, re: int, im: int, den: int) -> "GaussianRational":
        z = cls.__new__(cls)
        z._set(re, im, den)
        return z

    @classmethod
    def coerce(cls, value) -> "GaussianRational":
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, (int, Fraction)):
            value = Fraction(value)
            return cls._raw(value.numerator, 0, value.denominator)
        if isinstance(value, complex):
            raise TypeError("floating complex values are not exact")
        if isinstance(value, (tuple, list)) and len(value) == 2:
            return cls(parse_fraction(value[0]), parse_fraction(value[1]))
        if isinstance(value, str):
            return cls(parse_fraction(value))
        raise TypeError(f"cannot interpret {value!r} as a Gaussian rational")

    @property
    def real(self) -> Fraction:
        return Fraction(self.re, self.den)

    @property
    def imag(self) -> Fraction:
        return Fraction(self.im, self.den)

    def conjugate(self) -> "GaussianRational":
        return GaussianRational._raw(self.re, -self.im, self.den)

    def abs2(self) -> Fraction:
        return Fraction(self.re * self.re + self.im * self.im, self.den * self.den)

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __add__(self, other) -> "GaussianRational":
        o = GaussianRational.coerce(other)
        if self.den == o.den:
            return GaussianRational._raw(self.re + o.re, self.im + o.im, self.den)
        return GaussianRational._raw(
            self.re * o.den + o.re * self.den, self.im * o.den + o.im * self.den, self.den * o.den
        )

    __radd__ = __add__

    def __neg__(self) -> "GaussianRational":
        return GaussianRational._raw(-self.re, -self.im, self.den)

    def __sub__(self, other) -> "GaussianRational":
        return self + (-GaussianRational.coerce(other))

    def __rsub__(self, other) -> "GaussianRational":
        return GaussianRational.coerce(other) - self

    def __mul__(self, other) -> "GaussianRational":
        o = GaussianRational.coerce(other)
        return GaussianRational._raw(
            self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re, self.den * o.den
        )

    __rmul__ = __mul__

    def inverse(self) -> "GaussianRational":
        n = self.re * self.re + self.im * self.im
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        # 1/((a+bi)/q) = q(a-bi)/(a^2+b^2)
        return GaussianRational._raw(self.den * self.re, -self.den * self.im, n)

    def __truediv__(self, other) -> "GaussianRational":
        return self * GaussianRational.coerce(other).inverse()

    def __rtruediv__(self, other) -> "GaussianRational":
        return GaussianRational.coerce(other) * self.inverse()

    def __eq__(self, other) -> bool:
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return self.re == o.re and self.im == o.im and self.den == o.den

    def __hash__(self) -> int:
        return hash((self.re, self.im, self.den))

    def __repr__(self) -> str:
        return f"GaussianRational({self.real}, {self.imag})"

    def __str__(self) -> str:
        if self.im == 0:
            return str(self.real)
        return f"{self.real}+{self.imag}i"

    def to_json(self) -> List[str]:
        return [format_fraction(self.real), format_fraction(self.imag)]


ZERO = GaussianRational(0)
ONE = GaussianRational(1)

Key = Tuple[int, int]


class SparseMatrix:
    """Square matrix over Q(i) holding only its nonzero entries."""

    __slots__ = ("n", "entries")

    def __init__(self, n: int, entries: Mapping[Key, object] = ()):
        self.n = n
        clean: Dict[Key, GaussianRational] = {}
        for (i, j), v in dict(entries).items():
            if not (0 <= i < n and 0 <= j < n):
                raise IndexError(f"entry ({i}, {j}) outside a {n}x{n} matrix")
            v = GaussianRational.coerce(v)
            if v:
                clean[(i, j)] = v
        self.entries = clean

    @classmethod
    def _trusted(cls, n: int, entries: Dict[Key, GaussianRational]) -> "SparseMatrix":
        m = cls.__new__(cls)
        m.n = n
        m.entries = entries
        return m

    @classmethod
    def identity(cls, n: int) -> "SparseMatrix":
        return cls._trusted(n, {(i, i): ONE for i in range(n)})

    @classmethod
    def zero(cls, n: int) -> "SparseMatrix":
        return cls._trusted(n, {})

    @classmethod
    def from_dense(cls, rows: Sequence[Sequence[object]]) -> "SparseMatrix":
        n = len(rows)
        return cls(n, {(i, j): v for i, row in enumerate(rows) for j, v in enumerate(row)})

    def _check(self, other: "SparseMatrix") -> None:
        if not isinstance(other, SparseMatrix):
            raise TypeError("expected a SparseMatrix")
        if other.n != self.n:
            raise ValueError(f"shape mismatch: {self.n} vs {other.n}")

    def __add__(self, other: "SparseMatrix") -> "SparseMatrix":
        self._check(other)
        out = dict(self.entries)
        for k, v in other.entries.items():
            s = out[k] + v if k in out else v
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return SparseMatrix._trusted(self.n, out)

    def __neg__(self) -> "SparseMatrix":
        return SparseMatrix._trusted(self.n, {k: -v for k, v in self.entries.items()})

    def __sub__(self, other: "SparseMatrix") -> "SparseMatrix":
        return self + (-other)

    def scale(self, c) -> "SparseMatrix":
        c = GaussianRational.coerce(c)
        if not c:
            return SparseMatrix.zero(self.n)
        return SparseMatrix._trusted(self.n, {k: v * c for k, v in self.entries.items()})

    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        self._check(other)
        rows: Dict[int, List[Tuple[int, GaussianRational]]] = {}
        for (i, j), v in other.entries.items():
            rows.setdefault(i, []).append((j, v))
        out: Dict[Key, GaussianRational] = {}
        for (i, k), a in self.entries.items():
            for j, b in rows.get(k, ()):
                p = a * b
                key = (i, j)
                if key in out:
                    out[key] = out[key] + p
                else:
                    out[key] = p
        return SparseMatrix._trusted(self.n, {k: v for k, v in out.items() if v})

    def adjoint(self) -> "SparseMatrix":
        return SparseMatrix._trusted(self.n, {(j, i): v.conjugate() for (i, j), v in self.entries.items()})

    @property
    def H(self) -> "SparseMatrix":
        return self.adjoint()

    def __getitem__(self, key: Key) -> GaussianRational:
        return self.entries.get(key, ZERO)

    def trace(self) -> GaussianRational:
        total = ZERO
        for (i, j), v in self.entries.items():
            if i == j:
                total = total + v
        return total

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return self.n == other.n and self.entries == other.entries

    def __hash__(self) -> int:
        return hash((self.n, frozenset(self.entries.items())))

    def is_zero(self) -> bool:
        return not self.entries

    def nnz(self) -> int:
        return len(self.entries)

    def to_dense(self) -> List[List[GaussianRational]]:
        rows = [[ZERO] * self.n for _ in range(self.n)]
        for (i, j), v in self.entries.items():
            rows[i][j] = v
        return rows

    def to_json(self) -> List[List[List[str]]]:
        return [[v.to_json() for v in row] for row in self.to_dense()]

    def __repr__(self) -> str:
        return f"SparseMatrix(n={self.n}, nnz={len(self.entries)})"


def is_positive_semidefinite(m: SparseMatrix) -> bool:
    """Exact PSD test of a Hermitian matrix by symmetric elimination.

    A zero pivot is admissible only if its whole row has already vanished.
    Non-Hermitian input returns False.
    """
    if m.adjoint() != m:
        return False
    a = {i: {} for i in range(m.n)}
    for (i, j), v in m.entries.items():
        a[i][j] = v
    alive = set(range(m.n))
    while alive:
        p = min(alive)
        alive.discard(p)
        row = a[p]
        piv = row.get(p, ZERO)
        if piv.im != 0:
            return False
        if piv.re < 0:
            return False
        others = {j: v for j, v in row.items() if j != p and j in alive}
        if piv.re == 0:
            if others:
                return False
            continue
        inv = piv.inverse()
        # Schur complement: a[i][j] -= a[i][p] * a[p][j] / a[p][p]
        for i in others:
            api = a[i].get(p, ZERO)
            if not api:
                continue
            f = api * inv
            ri = a[i]
            for j, apj in others.items():
                nv = ri.get(j, ZERO) - f * apj
                if nv:
                    ri[j] = nv
                else:
                    ri.pop(j, None)
    return True


def rank(rows: Iterable[Sequence[Rational]]) -> int:
    """Rank over Q of a list of equal-length rational rows."""
    mat = [[Fraction(x) for x in r] for r in rows]
    if not mat:
        return 0
    ncols = len(mat[0])
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(mat)) if mat[i][c] != 0), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        pr = mat[r]
        for i in range(r + 1, len(mat)):
            f = mat[i][c]
            if f:
                f = f / pr[c]
                mat[i] = [x - f * y for x, y in zip(mat[i], pr)]
        r += 1
        if r == len(mat):
            break
    return r


class SparseSpan:
    """Incrementally maintained echelon basis of sparse vectors over Q(i).

    Vectors are dicts from hashable coordinates to scalars; coordinates are
    ordered by ``sorted``.
    """

    def __init__(self):
        self._rows: Dict[object, Dict[object, GaussianRational]] = {}

    def __len__(self) -> int:
        return len(self._rows)

    def reduce(self, vec: Mapping[object, GaussianRational]) -> Dict[object, GaussianRational]:
        v = {k: GaussianRational.coerce(x) for k, x in vec.items() if x}
        while v:
            lead = min(v)
            row = self._rows.get(lead)
            if row is None:
                return v
            f = v[lead]
            for k, x in row.items():
                nv = v.get(k, ZERO) - f * x
                if nv:
                    v[k] = nv
                else:
                    v.pop(k, None)
        return v

    def add(self, vec: Mapping[object, GaussianRational]) -> bool:
        """Insert ``vec``; return True when it enlarged the span."""
        v = self.reduce(vec)
        if not v:
            return False
        lead = min(v)
        inv = v[lead].inverse()
        self._rows[lead] = {k: x * inv for k, x in v.items()}
        return True
