"""
Polynomial vector fields on affine n-space and their Lie bracket.

A field ``f1 d1 + ... + fn dn`` is stored as the tuple of its coefficient
polynomials; slot ``i`` (1-based in the public API) holds the coefficient
of the partial derivative with respect to ``z_i``.
"""

from fractions import Fraction

from .algebra import DimensionError, Polynomial, as_rational, check_monomial


class VectorField:
    __slots__ = ("n", "coeffs", "_hash")

    def __init__(self, coeffs):
        coeffs = tuple(coeffs)
        n = len(coeffs)
        for c in coeffs:
            if not isinstance(c, Polynomial):
                raise TypeError(f"coefficient must be a Polynomial, got {type(c).__name__}")
            if c.n != n:
                raise DimensionError(f"coefficient in {c.n} variables for a field on {n}-space")
        self.n = n
        self.coeffs = coeffs
        self._hash = None

    @classmethod
    def zero(cls, n):
        return cls([Polynomial.zero(n)] * n)

    @classmethod
    def basis(cls, exps, i, c=1):
        """The field ``c * z^exps * d_i``."""
        exps = tuple(exps)
        n = len(exps)
        check_monomial(exps, n)
        if not 1 <= i <= n:
            raise DimensionError(f"direction index {i} out of range 1..{n}")
        slots = [Polynomial.zero(n)] * n
        slots[i - 1] = Polynomial.monomial(exps, c)
        return cls(slots)

    @classmethod
    def partial_field(cls, n, i):
        return cls.basis((0,) * n, i)

    def __getitem__(self, i):
        """Coefficient of ``d_i`` (1-based)."""
        if not 1 <= i <= self.n:
            raise DimensionError(f"direction index {i} out of range 1..{self.n}")
        return self.coeffs[i - 1]

    def terms(self):
        """Yield ``(exps, direction, coefficient)`` in canonical order."""
        for i, p in enumerate(self.coeffs, 1):
            for exps, c in p.items():
                yield exps, i, c

    def support(self):
        """Directions with a nonzero coefficient."""
        return [i for i, p in enumerate(self.coeffs, 1) if p]

    def is_zero(self):
        return not any(self.coeffs)

    def __bool__(self):
        return not self.is_zero()

    def degree(self):
        return max(p.degree() for p in self.coeffs) if self.n else -1

    def __eq__(self, other):
        if not isinstance(other, VectorField):
            return NotImplemented
        return self.n == other.n and self.coeffs == other.coeffs

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.coeffs)
        return self._hash

    def __repr__(self):
        from .parse import format_field
        return f"VectorField({self.n}, {format_field(self)!r})"

    def __str__(self):
        from .parse import format_field
        return format_field(self)

    def _same(self, other):
        if not isinstance(other, VectorField):
            return False
        if other.n != self.n:
            raise DimensionError(f"dimension mismatch: {self.n} vs {other.n}")
        return True

    def __add__(self, other):
        if not self._same(other):
            return NotImplemented
        return VectorField(a + b for a, b in zip(self.coeffs, other.coeffs))

    def __sub__(self, other):
        if not self._same(other):
            return NotImplemented
        return VectorField(a - b for a, b in zip(self.coeffs, other.coeffs))

    def __neg__(self):
        return VectorField(-a for a in self.coeffs)

    def scale(self, c):
        c = as_rational(c)
        return VectorField(a.scale(c) for a in self.coeffs)

    def __mul__(self, c):
        if isinstance(c, (int, Fraction)) and not isinstance(c, bool):
            return self.scale(c)
        return NotImplemented

    __rmul__ = __mul__

    def __call__(self, f):
        return apply_to_poly(self, f)


def apply_to_poly(X, f):
    """The derivation ``X`` applied to ``f``: sum of ``X_i * df/dz_i``."""
    if X.n != f.n:
        raise DimensionError(f"dimension mismatch: field on {X.n}-space, polynomial in {f.n} variables")
    out = Polynomial.zero(X.n)
    for i, xi in enumerate(X.coeffs, 1):
        if xi:
            df = f.partial(i)
            if df:
                out = out + xi * df
    return out


def lie_bracket(X, Y):
    """``[X, Y]``, computed slotwise as ``X(Y_k) - Y(X_k)``."""
    if X.n != Y.n:
        raise DimensionError(f"dimension mismatch: {X.n} vs {Y.n}")
    return VectorField(apply_to_poly(X, yk) - apply_to_poly(Y, xk)
                       for xk, yk in zip(X.coeffs, Y.coeffs))


def ad_iter(A, X, m):
    """``ad_A^m (X) = [A, [A, ... [A, X]]]``."""
    if A.n != X.n:
        raise DimensionError(f"dimension mismatch: {A.n} vs {X.n}")
    if m < 0:
        raise ValueError("iteration count must be non-negative")
    for _ in range(m):
        X = lie_bracket(A, X)
    return X


def _v_summands(n):
    # (exponent tuple, direction) for each summand of V, in the order the
    # formula lists them: direction n-1, n-2, ..., 1, then n.
    out = []
    for j in range(n - 1, 0, -1):
        exps = [0] * n
        for v in range(j + 1, n + 1):
            exps[v - 1] = 4 * (j + 1)
        out.append((tuple(exps), j))
    out.append(((4,) * n, n))
    return out


def standard_generators(n):
    """
    The generating pair ``(U, V)`` of the Lie algebra of polynomial vector
    fields on n-space::

        U = d_n
        V = z_n^(4n) d_(n-1) + (z_n z_(n-1))^(4n-4) d_(n-2) + ...
            + (z_n ... z_2)^8 d_1 + (z_n ... z_1)^4 d_n

    At ``n = 1`` only the last summand survives, giving ``V = z1^4 d1``.
    """
    if n < 1:
        raise ValueError("dimension must be at least 1")
    U = VectorField.partial_field(n, n)
    slots = [Polynomial.zero(n)] * n
    for exps, j in _v_summands(n):
        slots[j - 1] = slots[j - 1] + Polynomial.monomial(exps)
    return U, VectorField(slots)
