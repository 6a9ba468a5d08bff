"""
Sparse multivariate polynomials over the rationals.

A polynomial in ``n`` variables ``z1 .. zn`` is a map from exponent tuples
to nonzero :class:`fractions.Fraction` coefficients.  Instances are
immutable; every operation returns a fresh polynomial.
"""

from fractions import Fraction
from types import MappingProxyType


class DimensionError(ValueError):
    """Operands live in different ambient dimensions, or an index is out of range."""


def as_rational(c):
    if isinstance(c, Fraction):
        return c
    if isinstance(c, bool) or not isinstance(c, (int, str)):
        raise TypeError(f"expected an exact rational, got {c!r}")
    return Fraction(c)


def check_monomial(exps, n):
    exps = tuple(exps)
    if len(exps) != n:
        raise DimensionError(f"monomial {exps} has length {len(exps)}, expected {n}")
    for e in exps:
        if not isinstance(e, int) or e < 0:
            raise ValueError(f"bad exponent {e!r} in monomial {exps}")
    return exps


class Polynomial:
    __slots__ = ("n", "_terms", "_hash")

    def __init__(self, n, terms=None):
        if n < 0:
            raise DimensionError("dimension must be non-negative")
        self.n = n
        acc = {}
        if terms:
            items = terms.items() if hasattr(terms, "items") else terms
            for exps, c in items:
                exps = check_monomial(exps, n)
                c = as_rational(c)
                if not c:
                    continue
                c = acc.get(exps, 0) + c
                if c:
                    acc[exps] = c
                else:
                    del acc[exps]
        self._terms = acc
        self._hash = None

    @classmethod
    def _raw(cls, n, terms):
        # trusted constructor: terms already canonical (no zero coefficients)
        p = cls.__new__(cls)
        p.n = n
        p._terms = terms
        p._hash = None
        return p

    # constructors

    @classmethod
    def zero(cls, n):
        return cls._raw(n, {})

    @classmethod
    def constant(cls, n, c=1):
        c = as_rational(c)
        return cls._raw(n, {(0,) * n: c} if c else {})

    @classmethod
    def monomial(cls, exps, c=1):
        exps = tuple(exps)
        n = len(exps)
        check_monomial(exps, n)
        c = as_rational(c)
        return cls._raw(n, {exps: c} if c else {})

    @classmethod
    def var(cls, n, i):
        """The coordinate function ``z_i`` (1-based)."""
        if not 1 <= i <= n:
            raise DimensionError(f"variable index {i} out of range 1..{n}")
        exps = [0] * n
        exps[i - 1] = 1
        return cls._raw(n, {tuple(exps): Fraction(1)})

    # inspection

    @property
    def terms(self):
        return MappingProxyType(self._terms)

    def items(self):
        """Terms in canonical (lexicographic exponent) order."""
        return sorted(self._terms.items())

    def is_zero(self):
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def __len__(self):
        return len(self._terms)

    def coeff(self, exps):
        return self._terms.get(tuple(exps), Fraction(0))

    def degree(self):
        if not self._terms:
            return -1
        return max(sum(e) for e in self._terms)

    def degree_in(self, i):
        if not self._terms:
            return -1
        return max(e[i - 1] for e in self._terms)

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.n == other.n and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self == Polynomial.constant(self.n, other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self):
        from .parse import format_poly
        return f"Polynomial({self.n}, {format_poly(self)!r})"

    # arithmetic

    def _check(self, other):
        if isinstance(other, (int, Fraction)):
            return Polynomial.constant(self.n, other)
        if not isinstance(other, Polynomial):
            return None
        if other.n != self.n:
            raise DimensionError(f"dimension mismatch: {self.n} vs {other.n}")
        return other

    def __add__(self, other):
        other = self._check(other)
        if other is None:
            return NotImplemented
        if len(self._terms) < len(other._terms):
            small, big = self._terms, other._terms
        else:
            small, big = other._terms, self._terms
        out = dict(big)
        for e, c in small.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                del out[e]
        return Polynomial._raw(self.n, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw(self.n, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        other = self._check(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        c = as_rational(c)
        if not c:
            return Polynomial.zero(self.n)
        return Polynomial._raw(self.n, {e: c * v for e, v in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.scale(other)
        other = self._check(other)
        if other is None:
            return NotImplemented
        out = {}
        for ea, ca in self._terms.items():
            for eb, cb in other._terms.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                out[e] = out.get(e, 0) + ca * cb
        return Polynomial._raw(self.n, {e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = Polynomial.constant(self.n, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def partial(self, i):
        """Formal partial derivative with respect to ``z_i`` (1-based)."""
        if not 1 <= i <= self.n:
            raise DimensionError(f"variable index {i} out of range 1..{self.n}")
        k = i - 1
        out = {}
        for e, c in self._terms.items():
            ek = e[k]
            if ek:
                out[e[:k] + (ek - 1,) + e[k + 1:]] = c * ek
        return Polynomial._raw(self.n, out)

    def __call__(self, point):
        """Evaluate at a point (any numeric type supporting ``*`` and ``**``)."""
        if len(point) != self.n:
            raise DimensionError("point has wrong length")
        total = 0
        for e, c in self._terms.items():
            v = c
            for x, k in zip(point, e):
                if k:
                    v = v * x**k
            total = total + v
        return total


def add(a, b):
    return a + b


def mul(a, b):
    return a * b


def partial(p, i):
    return p.partial(i)
