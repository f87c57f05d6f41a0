#!/usr/bin/env python3
"""
Exact arithmetic kernel for Leadterm.

Gaussian rationals Q(i), sparse multivariate polynomials with Gaussian
rational coefficients, multivectors of the exterior algebra with interior
products, and exact elimination over Q and Q(i) through sympy DomainMatrix.

All values are immutable after construction.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from sympy import QQ, QQ_I
from sympy.polys.matrices import DomainMatrix

from exceptions import DimensionMismatchError, GradeUnderflowError, IndexOutOfRangeError

Exponent = Tuple[int, ...]
IndexSet = Tuple[int, ...]

VARIABLE_LETTERS = "xyzw"


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, GaussianRational):
        if value.im != 0:
            raise ValueError(f"{value} is not real")
        return value.re
    if isinstance(value, float):
        raise TypeError("floats are not exact; pass an int, Fraction or string")
    return Fraction(value)


def format_fraction(q: Fraction) -> str:
    """Serialize a rational as "p/q" (or "p" for integers)."""
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


class GaussianRational:
    """An element re + im*i of Q(i), stored as two reduced Fractions."""

    __slots__ = ("_re", "_im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "_re", as_fraction(re))
        object.__setattr__(self, "_im", as_fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    def __reduce__(self):
        return GaussianRational, (self._re, self._im)

    @property
    def re(self) -> Fraction:
        return self._re

    @property
    def im(self) -> Fraction:
        return self._im

    @classmethod
    def of(cls, value) -> "GaussianRational":
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, complex):
            raise TypeError("complex floats are not exact")
        return cls(value, 0)

    @classmethod
    def i(cls) -> "GaussianRational":
        return cls(0, 1)

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self._re, -self._im)

    def norm(self) -> Fraction:
        return self._re * self._re + self._im * self._im

    def is_real(self) -> bool:
        return self._im == 0

    def to_complex(self) -> complex:
        return complex(float(self._re), float(self._im))

    def __add__(self, other):
        try:
            other = GaussianRational.of(other)
        except TypeError:
            return NotImplemented
        return GaussianRational(self._re + other._re, self._im + other._im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self._re, -self._im)

    def __sub__(self, other):
        try:
            other = GaussianRational.of(other)
        except TypeError:
            return NotImplemented
        return GaussianRational(self._re - other._re, self._im - other._im)

    def __rsub__(self, other):
        return GaussianRational.of(other) - self

    def __mul__(self, other):
        try:
            other = GaussianRational.of(other)
        except TypeError:
            return NotImplemented
        return GaussianRational(
            self._re * other._re - self._im * other._im,
            self._re * other._im + self._im * other._re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        try:
            other = GaussianRational.of(other)
        except TypeError:
            return NotImplemented
        d = other.norm()
        if d == 0:
            raise ZeroDivisionError("division by zero in Q(i)")
        num = self * other.conjugate()
        return GaussianRational(num._re / d, num._im / d)

    def __rtruediv__(self, other):
        return GaussianRational.of(other) / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return (GaussianRational(1) / self) ** (-k)
        result, base = GaussianRational(1), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, GaussianRational):
            return self._re == other._re and self._im == other._im
        if isinstance(other, (int, Fraction)):
            return self._im == 0 and self._re == other
        return NotImplemented

    def __hash__(self):
        if self._im == 0:
            return hash(self._re)
        return hash((self._re, self._im))

    def __bool__(self):
        return self._re != 0 or self._im != 0

    def __repr__(self):
        return f"GaussianRational({format_fraction(self._re)!r}, {format_fraction(self._im)!r})"

    def __str__(self):
        re, im = format_fraction(self._re), format_fraction(self._im)
        if self._im == 0:
            return re
        imag = "i" if self._im == 1 else "-i" if self._im == -1 else f"{im}*i"
        if self._re == 0:
            return imag
        sign = "-" if self._im < 0 else "+"
        magnitude = "i" if abs(self._im) == 1 else f"{format_fraction(abs(self._im))}*i"
        return f"{re}{sign}{magnitude}"


ZERO = GaussianRational(0)
ONE = GaussianRational(1)
I_UNIT = GaussianRational(0, 1)


def variable_names(n: int) -> List[str]:
    if n <= len(VARIABLE_LETTERS):
        return list(VARIABLE_LETTERS[:n])
    return [f"x{k}" for k in range(1, n + 1)]


def monomial_text(names: Sequence[str], m: Sequence[int]) -> str:
    return "*".join(v if k == 1 else f"{v}^{k}" for v, k in zip(names, m) if k)


def check_exponent(m: Sequence[int], n: int, nonnegative: bool = True) -> Exponent:
    m = tuple(int(c) for c in m)
    if len(m) != n:
        raise DimensionMismatchError(f"exponent {m} has length {len(m)}, expected {n}")
    if nonnegative and any(c < 0 for c in m):
        raise ValueError(f"exponent {m} has negative entries")
    return m


def add_exponents(a: Exponent, b: Exponent) -> Exponent:
    return tuple(x + y for x, y in zip(a, b))


class SparsePolynomial:
    """Sparse polynomial in n variables with Gaussian rational coefficients.

    Terms are kept in lexicographic order of exponents and zero
    coefficients are never stored.
    """

    __slots__ = ("_n", "_terms")

    def __init__(self, n: int, terms: Optional[Dict[Sequence[int], object]] = None):
        if n < 1:
            raise DimensionMismatchError("a polynomial needs at least one variable")
        accumulated: Dict[Exponent, GaussianRational] = {}
        for m, c in (terms or {}).items():
            m = check_exponent(m, n)
            c = GaussianRational.of(c)
            accumulated[m] = accumulated.get(m, ZERO) + c
        object.__setattr__(self, "_n", n)
        object.__setattr__(
            self, "_terms",
            {m: accumulated[m] for m in sorted(accumulated) if accumulated[m]},
        )

    def __setattr__(self, name, value):
        raise AttributeError("SparsePolynomial is immutable")

    def __reduce__(self):
        return SparsePolynomial, (self._n, self._terms)

    @property
    def n(self) -> int:
        return self._n

    @property
    def terms(self) -> Dict[Exponent, GaussianRational]:
        return dict(self._terms)

    @classmethod
    def constant(cls, n: int, value) -> "SparsePolynomial":
        return cls(n, {(0,) * n: value})

    @classmethod
    def monomial(cls, m: Sequence[int], coeff=1) -> "SparsePolynomial":
        return cls(len(m), {tuple(m): coeff})

    @classmethod
    def variable(cls, n: int, i: int) -> "SparsePolynomial":
        """The coordinate x_i (1-based)."""
        if not 1 <= i <= n:
            raise IndexOutOfRangeError(f"variable index {i} outside [1, {n}]")
        return cls.monomial(tuple(1 if k == i - 1 else 0 for k in range(n)))

    def supp(self) -> List[Exponent]:
        return list(self._terms)

    def coefficient(self, m: Sequence[int]) -> GaussianRational:
        return self._terms.get(tuple(m), ZERO)

    def items(self):
        return self._terms.items()

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(not any(m) for m in self._terms)

    def has_real_coefficients(self) -> bool:
        return all(c.is_real() for c in self._terms.values())

    def restrict(self, keep) -> "SparsePolynomial":
        """Sum of the terms whose exponent satisfies ``keep``."""
        return SparsePolynomial(self._n, {m: c for m, c in self._terms.items() if keep(m)})

    def scale(self, c) -> "SparsePolynomial":
        c = GaussianRational.of(c)
        return SparsePolynomial(self._n, {m: c * v for m, v in self._terms.items()})

    def embed(self, n: int) -> "SparsePolynomial":
        """The same polynomial viewed in n >= self.n variables."""
        if n < self._n:
            raise DimensionMismatchError("cannot embed into fewer variables")
        pad = (0,) * (n - self._n)
        return SparsePolynomial(n, {m + pad: c for m, c in self._terms.items()})

    def _check_same_n(self, other: "SparsePolynomial"):
        if not isinstance(other, SparsePolynomial):
            raise TypeError("expected a SparsePolynomial")
        if other.n != self._n:
            raise DimensionMismatchError(
                f"polynomials in {self._n} and {other.n} variables")

    def __add__(self, other):
        if not isinstance(other, SparsePolynomial):
            other = SparsePolynomial.constant(self._n, other)
        self._check_same_n(other)
        terms = dict(self._terms)
        for m, c in other._terms.items():
            terms[m] = terms.get(m, ZERO) + c
        return SparsePolynomial(self._n, terms)

    __radd__ = __add__

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        if not isinstance(other, SparsePolynomial):
            other = SparsePolynomial.constant(self._n, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, SparsePolynomial):
            return self.scale(other)
        return polynomial_product(self, other)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("polynomial powers must be non-negative integers")
        result = SparsePolynomial.constant(self._n, 1)
        for _ in range(k):
            result = result * self
        return result

    def __eq__(self, other):
        if not isinstance(other, SparsePolynomial):
            return NotImplemented
        return self._n == other._n and self._terms == other._terms

    def __hash__(self):
        return hash((self._n, tuple(self._terms.items())))

    def exponent_matrix(self) -> np.ndarray:
        return np.array(list(self._terms), dtype=np.int64).reshape(len(self._terms), self._n)

    def coefficient_vector(self) -> np.ndarray:
        return np.array([c.to_complex() for c in self._terms.values()], dtype=complex)

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        """Evaluate at complex points of shape (..., n)."""
        points = np.asarray(points, dtype=complex)
        exps = self.exponent_matrix()
        coeffs = self.coefficient_vector()
        monomials = np.prod(points[..., None, :] ** exps, axis=-1)
        return monomials @ coeffs

    def __repr__(self):
        return f"SparsePolynomial({self._n}, {{{', '.join(f'{m}: {c!s}' for m, c in self._terms.items())}}})"

    def __str__(self):
        if not self._terms:
            return "0"
        names = variable_names(self._n)
        parts = []
        # highest total degree first reads naturally
        for m in sorted(self._terms, key=lambda e: (-sum(e), e)):
            c = self._terms[m]
            mono = monomial_text(names, m)
            if not c.is_real():
                coeff = f"({c})" if c.re != 0 else str(c)
            else:
                coeff = format_fraction(c.re)
            if not mono:
                parts.append(coeff)
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append(f"-{mono}")
            else:
                parts.append(f"{coeff}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


def polynomial_product(a: SparsePolynomial, b: SparsePolynomial) -> SparsePolynomial:
    """Exact product; supp(a*b) is contained in supp(a) + supp(b)."""
    if a.n != b.n:
        raise DimensionMismatchError(f"polynomials in {a.n} and {b.n} variables")
    terms: Dict[Exponent, GaussianRational] = {}
    for m1, c1 in a.items():
        for m2, c2 in b.items():
            m = add_exponents(m1, m2)
            terms[m] = terms.get(m, ZERO) + c1 * c2
    return SparsePolynomial(a.n, terms)


def euler_derivative(g: SparsePolynomial, i: int) -> SparsePolynomial:
    """x_i * dg/dx_i for 1-based variable index i."""
    if not 1 <= i <= g.n:
        raise IndexOutOfRangeError(f"variable index {i} outside [1, {g.n}]")
    return SparsePolynomial(g.n, {m: c * m[i - 1] for m, c in g.items()})


# -- exterior algebra -------------------------------------------------------

def merge_sign(left: IndexSet, right: IndexSet) -> Tuple[int, IndexSet]:
    """Sign and sorted index set of e_left ^ e_right (sign 0 on overlap)."""
    if set(left) & set(right):
        return 0, ()
    inversions = sum(1 for a in left for b in right if a > b)
    return (-1) ** inversions, tuple(sorted(left + right))


class MultiVector:
    """Element of Lambda^p Q(i)^n with components on ascending index sets."""

    __slots__ = ("_n", "_grade", "_components")

    def __init__(self, n: int, grade: int, components: Optional[Dict[Sequence[int], object]] = None):
        if not 0 <= grade <= n:
            raise GradeUnderflowError(f"grade {grade} outside [0, {n}]")
        comps: Dict[IndexSet, GaussianRational] = {}
        for idx, c in (components or {}).items():
            idx = tuple(idx)
            if len(idx) != grade or any(not 1 <= k <= n for k in idx):
                raise IndexOutOfRangeError(f"index set {idx} invalid for grade {grade}, n={n}")
            if list(idx) != sorted(set(idx)):
                raise ValueError(f"index set {idx} must be strictly ascending")
            comps[idx] = comps.get(idx, ZERO) + GaussianRational.of(c)
        object.__setattr__(self, "_n", n)
        object.__setattr__(self, "_grade", grade)
        object.__setattr__(self, "_components", {k: comps[k] for k in sorted(comps) if comps[k]})

    def __setattr__(self, name, value):
        raise AttributeError("MultiVector is immutable")

    @property
    def n(self) -> int:
        return self._n

    @property
    def grade(self) -> int:
        return self._grade

    @property
    def components(self) -> Dict[IndexSet, GaussianRational]:
        return dict(self._components)

    @classmethod
    def basis(cls, n: int, indices: Sequence[int]) -> "MultiVector":
        indices = tuple(indices)
        if len(set(indices)) != len(indices):
            return cls(n, len(indices))
        # sign of the permutation sorting ``indices``
        perm_sign = (-1) ** sum(1 for a, b in combinations(indices, 2) if a > b)
        return cls(n, len(indices), {tuple(sorted(indices)): perm_sign})

    def is_zero(self) -> bool:
        return not self._components

    def __add__(self, other: "MultiVector"):
        if (other.n, other.grade) != (self._n, self._grade):
            raise DimensionMismatchError("multivectors of different shape")
        comps = dict(self._components)
        for k, c in other._components.items():
            comps[k] = comps.get(k, ZERO) + c
        return MultiVector(self._n, self._grade, comps)

    def scale(self, c) -> "MultiVector":
        c = GaussianRational.of(c)
        return MultiVector(self._n, self._grade, {k: c * v for k, v in self._components.items()})

    def wedge(self, other: "MultiVector") -> "MultiVector":
        if other.n != self._n:
            raise DimensionMismatchError("multivectors over different spaces")
        if self._grade + other.grade > self._n:
            return MultiVector(self._n, self._n)
        comps: Dict[IndexSet, GaussianRational] = {}
        for i, a in self._components.items():
            for j, b in other._components.items():
                sign, merged = merge_sign(i, j)
                if sign:
                    comps[merged] = comps.get(merged, ZERO) + a * b * sign
        return MultiVector(self._n, self._grade + other.grade, comps)

    def __eq__(self, other):
        if not isinstance(other, MultiVector):
            return NotImplemented
        return (self._n, self._grade, self._components) == (other._n, other._grade, other._components)

    def __hash__(self):
        return hash((self._n, self._grade, tuple(self._components.items())))

    def __repr__(self):
        body = ", ".join(f"{k}: {v}" for k, v in self._components.items())
        return f"MultiVector(n={self._n}, grade={self._grade}, {{{body}}})"


def interior_product(v: Sequence, omega: MultiVector) -> MultiVector:
    """i_v(e_I) = sum_k (-1)^k v[I_k] e_{I without I_k} (k counted from 0)."""
    if len(v) != omega.n:
        raise DimensionMismatchError(f"covector of length {len(v)} on n={omega.n}")
    if omega.grade == 0:
        raise GradeUnderflowError("cannot contract a scalar")
    v = [GaussianRational.of(x) for x in v]
    comps: Dict[IndexSet, GaussianRational] = {}
    for idx, c in omega.components.items():
        for k, j in enumerate(idx):
            if v[j - 1]:
                rest = idx[:k] + idx[k + 1:]
                comps[rest] = comps.get(rest, ZERO) + c * v[j - 1] * (-1) ** k
    return MultiVector(omega.n, omega.grade - 1, comps)


def iterated_contraction(vs: Sequence[Sequence], omega: MultiVector) -> MultiVector:
    """i_{v_1} o ... o i_{v_r} applied to omega; the last covector acts first.

    With this convention [e1*, e2*] on e1^e2 gives -1.
    """
    if len(vs) > omega.grade:
        raise GradeUnderflowError(
            f"{len(vs)} contractions on a multivector of grade {omega.grade}")
    result = omega
    for v in reversed(list(vs)):
        result = interior_product(v, result)
    return result


# -- exact linear algebra ----------------------------------------------------
#
# Elimination runs on sympy DomainMatrix over QQ, or QQ_I when an entry is
# not real. Results come back as Fraction, or GaussianRational when any input
# entry was one.

def _to_domain(entry, domain):
    if domain is QQ_I:
        z = GaussianRational.of(entry)
        return QQ_I(QQ(z.re.numerator, z.re.denominator), QQ(z.im.numerator, z.im.denominator))
    q = as_fraction(entry)
    return QQ(q.numerator, q.denominator)


def _from_domain(value, domain, gaussian: bool):
    if domain is QQ_I:
        re, im = value.x, value.y
    else:
        re, im = value, 0
    re = Fraction(int(re.numerator), int(re.denominator))
    im = Fraction(int(im.numerator), int(im.denominator)) if im else Fraction(0)
    return GaussianRational(re, im) if gaussian else re


def _domain_matrix(rows: Sequence[Sequence], ncols: int):
    entries = [x for r in rows for x in r]
    gaussian = any(isinstance(x, GaussianRational) for x in entries)
    domain = QQ_I if any(isinstance(x, GaussianRational) and x.im != 0 for x in entries) else QQ
    for r in rows:
        if len(r) != ncols:
            raise DimensionMismatchError(f"row of length {len(r)} in a matrix with {ncols} columns")
    matrix = DomainMatrix([[_to_domain(x, domain) for x in r] for r in rows], (len(rows), ncols), domain)
    return matrix, domain, gaussian


def row_echelon(rows: Sequence[Sequence], ncols: Optional[int] = None) -> Tuple[List[list], List[int]]:
    """Reduced row echelon form.

    Works over Fraction or GaussianRational entries. Returns the non-zero
    reduced rows and their pivot columns.
    """
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    if not rows:
        return [], []
    matrix, domain, gaussian = _domain_matrix(rows, ncols)
    reduced, pivots = matrix.rref()
    pivots = list(pivots)
    body = reduced.to_list()[:len(pivots)]
    return [[_from_domain(x, domain, gaussian) for x in r] for r in body], pivots


def matrix_rank(rows: Sequence[Sequence], ncols: Optional[int] = None) -> int:
    if not rows:
        return 0
    matrix, _, _ = _domain_matrix(rows, len(rows[0]) if ncols is None else ncols)
    return int(matrix.rank())


def nullspace(rows: Sequence[Sequence], ncols: int, one=None) -> List[list]:
    """Basis of {x : rows @ x = 0}, one vector per free column, with 1 in that column."""
    one = Fraction(1) if one is None else one
    zero = one - one
    if not rows:
        return [[one if j == k else zero for j in range(ncols)] for k in range(ncols)]
    reduced, pivots = row_echelon(rows, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        x = [zero] * ncols
        x[fc] = one
        for r, pc in enumerate(pivots):
            x[pc] = -reduced[r][fc]
        basis.append(x)
    return basis


def determinant(matrix: Sequence[Sequence]):
    """Exact determinant of a square matrix."""
    size = len(matrix)
    if size == 0:
        return Fraction(1)
    m, domain, gaussian = _domain_matrix(matrix, size)
    return _from_domain(m.det(), domain, gaussian)
