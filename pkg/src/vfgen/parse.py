"""
Text form of polynomial vector fields.

Grammar (whitespace insignificant)::

    field    := ["+" | "-"] term (("+" | "-") term)*  |  "0"
    term     := [rational] ["*"] [monomial ["*"]] dir
    dir      := "d" nat
    monomial := factor (["*"] factor)*
    factor   := "z" nat ["^" nat]  |  "(" monomial ")" "^" nat
    rational := ["-"] nat ["/" nat]

Indices are 1-based.  ``format_field`` emits the canonical form, which
``parse_field`` reads back exactly, e.g. ``z2^8 d1 + z1^4*z2^4 d2``.
"""

import re
from fractions import Fraction

from .algebra import Polynomial
from .vectorfield import VectorField


class ParseError(ValueError):
    def __init__(self, message, offset):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


class IndexOutOfRange(ParseError):
    def __init__(self, kind, index, n, offset):
        super().__init__(f"{kind} index {index} out of range 1..{n}", offset)
        self.index = index


class ZeroDenominator(ParseError):
    def __init__(self, offset):
        super().__init__("zero denominator", offset)


_TOKEN = re.compile(r"\s*(?:(\d+)|([zd^*/+\-()]))")


def _tokenize(text):
    toks = []
    pos = 0
    raw = text.encode("utf-8")
    # work on bytes so offsets are byte offsets
    s = raw.decode("latin-1")
    while True:
        m = _TOKEN.match(s, pos)
        if m is None:
            rest = s[pos:]
            if rest.strip() == "":
                break
            bad = pos + (len(rest) - len(rest.lstrip()))
            raise ParseError(f"unexpected character {raw[bad:bad + 1]!r}", bad)
        start = m.start(1) if m.group(1) is not None else m.start(2)
        if m.group(1) is not None:
            toks.append(("nat", int(m.group(1)), start))
        else:
            toks.append((m.group(2), None, start))
        pos = m.end()
    toks.append(("end", None, len(raw)))
    return toks


class _Parser:
    def __init__(self, text, n):
        self.toks = _tokenize(text)
        self.i = 0
        self.n = n

    def peek(self, ahead=0):
        return self.toks[min(self.i + ahead, len(self.toks) - 1)]

    def take(self, kind):
        tok = self.peek()
        if tok[0] != kind:
            want = "number" if kind == "nat" else repr(kind)
            got = "end of input" if tok[0] == "end" else repr(tok[0] if tok[1] is None else tok[1])
            raise ParseError(f"expected {want}, got {got}", tok[2])
        self.i += 1
        return tok

    def accept(self, kind):
        if self.peek()[0] == kind:
            self.i += 1
            return True
        return False

    def field(self):
        slots = [dict() for _ in range(self.n)]
        if self.peek()[0] == "nat" and self.peek()[1] == 0 and self.peek(1)[0] == "end":
            self.i += 1
            return VectorField.zero(self.n)
        sign = 1
        if self.accept("-"):
            sign = -1
        else:
            self.accept("+")
        while True:
            c, exps, d = self.term()
            c *= sign
            slot = slots[d - 1]
            slot[exps] = slot.get(exps, 0) + c
            if self.accept("+"):
                sign = 1
            elif self.accept("-"):
                sign = -1
            else:
                break
        self.take("end")
        return VectorField(Polynomial(self.n, s) for s in slots)

    def rational(self):
        neg = False
        if self.peek()[0] == "-" and self.peek(1)[0] == "nat":
            self.i += 1
            neg = True
        elif self.peek()[0] != "nat":
            return Fraction(1)
        num = self.take("nat")[1]
        den = 1
        if self.accept("/"):
            tok = self.take("nat")
            if tok[1] == 0:
                raise ZeroDenominator(tok[2])
            den = tok[1]
        c = Fraction(num, den)
        return -c if neg else c

    def term(self):
        c = self.rational()
        self.accept("*")
        exps = [0] * self.n
        if self.peek()[0] in ("z", "("):
            self.monomial(exps)
        self.take("d")
        tok = self.take("nat")
        if not 1 <= tok[1] <= self.n:
            raise IndexOutOfRange("direction", tok[1], self.n, tok[2])
        return c, tuple(exps), tok[1]

    def monomial(self, exps, power=1):
        self.factor(exps, power)
        while True:
            if self.peek()[0] == "*" and self.peek(1)[0] in ("z", "("):
                self.i += 1
            elif self.peek()[0] not in ("z", "("):
                self.accept("*")  # optional "*" before the direction
                return
            self.factor(exps, power)

    def factor(self, exps, power):
        if self.accept("("):
            inner = [0] * self.n
            self.monomial(inner)
            self.take(")")
            self.take("^")
            k = self.take("nat")[1]
            for v in range(self.n):
                exps[v] += inner[v] * k * power
            return
        self.take("z")
        tok = self.take("nat")
        if not 1 <= tok[1] <= self.n:
            raise IndexOutOfRange("variable", tok[1], self.n, tok[2])
        k = self.take("nat")[1] if self.accept("^") else 1
        exps[tok[1] - 1] += k * power


def parse_field(text, n):
    """Parse ``text`` as a vector field on ``n``-space."""
    if n < 1:
        raise ValueError("dimension must be at least 1")
    return _Parser(text, n).field()


def format_monomial(exps):
    parts = []
    for v, e in enumerate(exps, 1):
        if e == 1:
            parts.append(f"z{v}")
        elif e:
            parts.append(f"z{v}^{e}")
    return "*".join(parts)


def _format_term(c, exps, tail):
    mono = format_monomial(exps)
    body = " ".join(x for x in (mono, tail) if x)
    if c == 1 and body:
        return body
    if not body:
        return str(c)
    return f"{c} {body}"


def format_field(X):
    """Canonical text: directions ascending, terms lexicographic within a direction."""
    parts = [_format_term(c, exps, f"d{i}") for exps, i, c in X.terms()]
    return " + ".join(parts) if parts else "0"


def format_poly(p):
    parts = [_format_term(c, exps, "") for exps, c in p.items()]
    return " + ".join(parts) if parts else "0"
