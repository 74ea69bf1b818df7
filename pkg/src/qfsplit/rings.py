"""Prime fields and sparse multivariate polynomials over F_p.

Everything downstream (Witt vectors, Frobenius splittings, Groebner bases)
works over a polynomial ring S = F_p[x_1, ..., x_N].  Polynomials are stored
sparsely as a hash map from exponent vectors (tuples of machine ints) to
nonzero coefficients in [1, p), with a lazily cached graded-reverse-lex
sorted view used for display and leading-term scans.

Only prime coefficient fields are supported: every criterion implemented in
this package reads or writes coefficients through the identity c^(1/p) = c,
which is special to F_p.
"""

from __future__ import annotations

import re
from typing import Callable, Iterable, Iterator, Mapping, Optional, Sequence

# Exponents are stored as plain ints but kept below 2^31 so that exponent
# arithmetic stays within machine-word range on every platform we target.
EXPONENT_LIMIT = 2**31 - 1


class RingError(ValueError):
    """Base class for ring construction / arithmetic errors."""


class ExponentOverflowError(RingError):
    """An exponent would exceed the 32-bit budget."""


class ParseError(RingError):
    """Polynomial text did not match the expression grammar."""


class HomogeneityError(RingError):
    """A polynomial is not homogeneous for the requested grading."""


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


class PrimeField:
    """The field F_p for a prime 2 <= p < 2^31, with canonical representatives [0, p)."""

    __slots__ = ("p",)

    def __init__(self, p: int):
        if not isinstance(p, int) or not 2 <= p <= EXPONENT_LIMIT:
            raise RingError(f"field characteristic must be an integer in [2, 2^31-1], got {p!r}")
        if not _is_prime(p):
            raise RingError(f"{p} is not prime")
        self.p = p

    def __call__(self, n: int) -> int:
        return n % self.p

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in F_p")
        return pow(a, self.p - 2, self.p)

    def neg(self, a: int) -> int:
        return (-a) % self.p

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self) -> int:
        return hash(("PrimeField", self.p))

    def __repr__(self) -> str:
        return f"PrimeField({self.p})"


def grevlex_key(exps: tuple[int, ...]) -> tuple:
    """Sort key for graded reverse lexicographic order (ascending).

    a > b  iff  deg a > deg b, or degrees tie and the rightmost nonzero
    entry of a - b is negative.  Encoded as (total degree, negated reversed
    exponents) compared lexicographically.
    """
    return (sum(exps), tuple(-e for e in reversed(exps)))


class PolynomialRing:
    """S = F_p[x_1, ..., x_N] with a fixed variable naming."""

    __slots__ = ("field", "variables", "nvars", "_var_index", "_zero", "_one")

    def __init__(self, field: PrimeField, variables: Sequence[str]):
        names = tuple(variables)
        if not names:
            raise RingError("a polynomial ring needs at least one variable")
        if len(set(names)) != len(names):
            raise RingError(f"duplicate variable names in {names}")
        for nm in names:
            if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", nm):
                raise RingError(f"bad variable name {nm!r}")
        self.field = field
        self.variables = names
        self.nvars = len(names)
        self._var_index = {nm: i for i, nm in enumerate(names)}
        self._zero = None
        self._one = None

    # -- constructors --------------------------------------------------

    @property
    def zero(self) -> "Polynomial":
        if self._zero is None:
            self._zero = Polynomial(self, {})
        return self._zero

    @property
    def one(self) -> "Polynomial":
        if self._one is None:
            self._one = Polynomial(self, {(0,) * self.nvars: 1})
        return self._one

    def constant(self, c: int) -> "Polynomial":
        c %= self.field.p
        if c == 0:
            return self.zero
        return Polynomial(self, {(0,) * self.nvars: c})

    def monomial(self, exps: Sequence[int], coeff: int = 1) -> "Polynomial":
        e = tuple(exps)
        if len(e) != self.nvars:
            raise RingError(f"exponent vector {e} has wrong length for {self.nvars} variables")
        if any(x < 0 for x in e):
            raise RingError(f"negative exponent in {e}")
        if any(x > EXPONENT_LIMIT for x in e):
            raise ExponentOverflowError(f"exponent beyond 32-bit budget in {e}")
        c = coeff % self.field.p
        return Polynomial(self, {e: c} if c else {})

    def variable(self, name: str) -> "Polynomial":
        try:
            i = self._var_index[name]
        except KeyError:
            raise RingError(f"unknown variable {name!r}; ring has {self.variables}") from None
        e = [0] * self.nvars
        e[i] = 1
        return Polynomial(self, {tuple(e): 1})

    def gens(self) -> tuple["Polynomial", ...]:
        return tuple(self.variable(nm) for nm in self.variables)

    def from_terms(self, terms: Mapping[tuple[int, ...], int]) -> "Polynomial":
        """Build a polynomial, normalizing coefficients mod p and dropping zeros."""
        p = self.field.p
        out: dict[tuple[int, ...], int] = {}
        for e, c in terms.items():
            c %= p
            if c:
                out[tuple(e)] = c
        return Polynomial(self, out)

    def parse(self, text: str) -> "Polynomial":
        return parse_polynomial(text, self)

    def index_of(self, name: str) -> int:
        return self._var_index[name]

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, PolynomialRing)
            and other.field == self.field
            and other.variables == self.variables
        )

    def __hash__(self) -> int:
        return hash((self.field.p, self.variables))

    def __repr__(self) -> str:
        return f"PolynomialRing(F_{self.field.p}, {list(self.variables)})"


class Polynomial:
    """Sparse polynomial over F_p.  Treat as immutable.

    The term map never stores a zero coefficient; the zero polynomial is the
    empty map.  `sorted_terms()` caches the grevlex-descending view.
    """

    __slots__ = ("ring", "terms", "_sorted", "_maxexp", "_hash")

    def __init__(self, ring: PolynomialRing, terms: dict[tuple[int, ...], int]):
        self.ring = ring
        self.terms = terms
        self._sorted: Optional[list[tuple[tuple[int, ...], int]]] = None
        self._maxexp: Optional[int] = None
        self._hash: Optional[int] = None

    # -- views ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def sorted_terms(self) -> list[tuple[tuple[int, ...], int]]:
        """Terms in descending grevlex order (cached)."""
        if self._sorted is None:
            self._sorted = sorted(
                self.terms.items(), key=lambda t: grevlex_key(t[0]), reverse=True
            )
        return self._sorted

    def max_exponent(self) -> int:
        """Largest single exponent appearing (0 for the zero polynomial); cached."""
        if self._maxexp is None:
            self._maxexp = max((max(e) for e in self.terms), default=0)
        return self._maxexp

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def coefficient_of(self, mono: Sequence[int]) -> int:
        return self.terms.get(tuple(mono), 0)

    def leading_term(self) -> tuple[tuple[int, ...], int]:
        """Largest (exponent, coefficient) pair under grevlex; error on zero."""
        if not self.terms:
            raise RingError("zero polynomial has no leading term")
        return self.sorted_terms()[0]

    def constant_coefficient(self) -> int:
        return self.terms.get((0,) * self.ring.nvars, 0)

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and self.constant_coefficient() != 0)

    # -- arithmetic ----------------------------------------------------

    def _require_same_ring(self, other: "Polynomial") -> None:
        if other.ring is not self.ring and other.ring != self.ring:
            raise RingError(f"mixed rings: {self.ring} vs {other.ring}")

    def __add__(self, other: "Polynomial") -> "Polynomial":
        self._require_same_ring(other)
        p = self.ring.field.p
        if not self.terms:
            return other
        if not other.terms:
            return self
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = (out.get(e, 0) + c) % p
            if s:
                out[e] = s
            elif e in out:
                del out[e]
        return Polynomial(self.ring, out)

    def __neg__(self) -> "Polynomial":
        p = self.ring.field.p
        if p == 2:
            return self
        return Polynomial(self.ring, {e: p - c for e, c in self.terms.items()})

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def scale(self, c: int) -> "Polynomial":
        c %= self.ring.field.p
        if c == 0:
            return self.ring.zero
        if c == 1:
            return self
        p = self.ring.field.p
        return Polynomial(self.ring, {e: (c * v) % p for e, v in self.terms.items()})

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        self._require_same_ring(other)
        if not self.terms or not other.terms:
            return self.ring.zero
        if self.max_exponent() + other.max_exponent() > EXPONENT_LIMIT:
            raise ExponentOverflowError("product would exceed the 32-bit exponent budget")
        p = self.ring.field.p
        # iterate the smaller operand on the outside; accumulate into a dict
        a, b = (self.terms, other.terms) if len(self.terms) <= len(other.terms) else (other.terms, self.terms)
        out: dict[tuple[int, ...], int] = {}
        get = out.get
        bitems = list(b.items())
        for ea, ca in a.items():
            for eb, cb in bitems:
                e = tuple(map(int.__add__, ea, eb))
                s = (get(e, 0) + ca * cb) % p
                if s:
                    out[e] = s
                elif e in out:
                    del out[e]
        return Polynomial(self.ring, out)

    def mul_term(self, exps: Sequence[int], coeff: int = 1) -> "Polynomial":
        """Multiply by a single term coeff * x^exps (cheap path)."""
        e0 = tuple(exps)
        p = self.ring.field.p
        coeff %= p
        if coeff == 0 or not self.terms:
            return self.ring.zero
        if self.max_exponent() + max(e0, default=0) > EXPONENT_LIMIT:
            raise ExponentOverflowError("product would exceed the 32-bit exponent budget")
        out = {}
        for e, c in self.terms.items():
            out[tuple(map(int.__add__, e, e0))] = (c * coeff) % p if coeff != 1 else c
        return Polynomial(self.ring, out)

    def __pow__(self, n: int) -> "Polynomial":
        if n < 0:
            raise RingError("negative power of a polynomial")
        result = self.ring.one
        if n == 0:
            return result
        base = self
        while True:
            if n & 1:
                result = result * base
            n >>= 1
            if not n:
                return result
            base = base * base

    def pth_power(self, k: int = 1) -> "Polynomial":
        """self^(p^k), computed termwise: Frobenius fixes F_p coefficients."""
        if k < 0:
            raise RingError("negative Frobenius power")
        if k == 0 or not self.terms:
            return self
        q = self.ring.field.p**k
        if self.max_exponent() * q > EXPONENT_LIMIT:
            raise ExponentOverflowError("Frobenius power would exceed the 32-bit exponent budget")
        return Polynomial(self.ring, {tuple(x * q for x in e): c for e, c in self.terms.items()})

    def capped_mul(self, other: "Polynomial", cap: Sequence[Optional[int]]) -> "Polynomial":
        """Product with every term exceeding the per-variable cap discarded.

        cap[i] = None means variable i is unbounded.  Sound for any downstream
        query whose exponents all stay within the cap, because exponents only
        grow under multiplication.
        """
        self._require_same_ring(other)
        caps = tuple(cap)
        if len(caps) != self.ring.nvars:
            raise RingError("cap vector length mismatch")
        if not self.terms or not other.terms:
            return self.ring.zero
        if self.max_exponent() + other.max_exponent() > EXPONENT_LIMIT:
            raise ExponentOverflowError("product would exceed the 32-bit exponent budget")
        p = self.ring.field.p
        bounded = [(i, c) for i, c in enumerate(caps) if c is not None]
        out: dict[tuple[int, ...], int] = {}
        get = out.get
        bitems = list(other.terms.items())
        for ea, ca in self.terms.items():
            for eb, cb in bitems:
                e = tuple(map(int.__add__, ea, eb))
                ok = True
                for i, ci in bounded:
                    if e[i] > ci:
                        ok = False
                        break
                if not ok:
                    continue
                s = (get(e, 0) + ca * cb) % p
                if s:
                    out[e] = s
                elif e in out:
                    del out[e]
        return Polynomial(self.ring, out)

    # -- structure -----------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.ring.field.p, self.ring.variables, frozenset(self.terms.items())))
        return self._hash

    def __str__(self) -> str:
        return serialize_polynomial(self)

    def __repr__(self) -> str:
        return f"<{serialize_polynomial(self)} over F_{self.ring.field.p}>"


class Grading:
    """A nonnegative integer weight matrix: one row per grading component.

    Every column must be nonzero, so that each variable has nonzero
    multidegree and the weighted maximal ideal is genuinely maximal.
    """

    __slots__ = ("rows", "nvars")

    def __init__(self, rows: Sequence[Sequence[int]]):
        mat = tuple(tuple(int(w) for w in row) for row in rows)
        if not mat:
            raise RingError("grading needs at least one row")
        n = len(mat[0])
        if any(len(r) != n for r in mat):
            raise RingError("grading rows have inconsistent lengths")
        if any(w < 0 for r in mat for w in r):
            raise RingError("grading weights must be nonnegative")
        for j in range(n):
            if all(r[j] == 0 for r in mat):
                raise RingError(f"grading column {j} is identically zero")
        self.rows = mat
        self.nvars = n

    @classmethod
    def standard(cls, nvars: int) -> "Grading":
        return cls([(1,) * nvars])

    def degree(self, exps: Sequence[int]) -> tuple[int, ...]:
        return tuple(sum(w * e for w, e in zip(row, exps)) for row in self.rows)

    def total_of_variables(self) -> tuple[int, ...]:
        """Sum of the multidegrees of all variables (the anticanonical degree)."""
        return tuple(sum(row) for row in self.rows)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Grading) and other.rows == self.rows

    def __hash__(self) -> int:
        return hash(self.rows)

    def __repr__(self) -> str:
        return f"Grading({[list(r) for r in self.rows]})"


# ---------------------------------------------------------------------------
# functional aliases (free functions over the classes above)
# ---------------------------------------------------------------------------


def multiply(a: Polynomial, b: Polynomial) -> Polynomial:
    return a * b


def power(a: Polynomial, e: int) -> Polynomial:
    return a**e


def capped_multiply(a: Polynomial, b: Polynomial, cap: Sequence[Optional[int]]) -> Polynomial:
    return a.capped_mul(b, cap)


def coefficient_of(a: Polynomial, mono: Sequence[int]) -> int:
    return a.coefficient_of(mono)


def check_homogeneous(a: Polynomial, g: Grading) -> tuple[int, ...]:
    """Return the common multidegree, or raise HomogeneityError naming two
    offending terms."""
    if g.nvars != a.ring.nvars:
        raise RingError("grading does not match ring variable count")
    if not a.terms:
        # the zero polynomial is homogeneous of every degree; report the zero degree
        return (0,) * len(g.rows)
    it = iter(a.sorted_terms())
    e0, _ = next(it)
    d0 = g.degree(e0)
    for e, _ in it:
        d = g.degree(e)
        if d != d0:
            raise HomogeneityError(
                f"not homogeneous: term {_term_str(a.ring, e0, 1)} has degree {d0} "
                f"but term {_term_str(a.ring, e, 1)} has degree {d}"
            )
    return d0


# ---------------------------------------------------------------------------
# parsing / serialization
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<int>\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>\*\*|[-+*^()]))"
)


def _tokenize(text: str) -> list[tuple[str, str]]:
    tokens: list[tuple[str, str]] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r} at position {pos}")
        if m.group("int") is not None:
            tokens.append(("int", m.group("int")))
        elif m.group("name") is not None:
            tokens.append(("name", m.group("name")))
        else:
            tokens.append(("op", m.group("op")))
        pos = m.end()
    tokens.append(("end", ""))
    return tokens


class _Parser:
    """Recursive descent for:

        expr   := ['+'|'-'] term (('+'|'-') term)*
        term   := factor ('*' factor)*
        factor := coefficient | variable (('^'|'**') uint)? | '(' expr ')'

    Whitespace is ignored.  The optional leading sign is a strict superset of
    the grammar kept for convenience; the serializer never emits it.
    """

    def __init__(self, tokens: list[tuple[str, str]], ring: PolynomialRing):
        self.tokens = tokens
        self.i = 0
        self.ring = ring

    def peek(self) -> tuple[str, str]:
        return self.tokens[self.i]

    def take(self) -> tuple[str, str]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expr(self) -> Polynomial:
        sign = 1
        kind, val = self.peek()
        if kind == "op" and val in "+-":
            self.take()
            sign = -1 if val == "-" else 1
        result = self.term().scale(sign)
        while True:
            kind, val = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                t = self.term()
                result = result + (t if val == "+" else -t)
            else:
                return result

    def term(self) -> Polynomial:
        result = self.factor()
        while True:
            kind, val = self.peek()
            if kind == "op" and val == "*":
                self.take()
                result = result * self.factor()
            else:
                return result

    def factor(self) -> Polynomial:
        kind, val = self.take()
        if kind == "int":
            return self.ring.constant(int(val))
        if kind == "name":
            try:
                v = self.ring.variable(val)
            except RingError:
                raise ParseError(
                    f"unknown variable {val!r}; ring has variables {', '.join(self.ring.variables)}"
                ) from None
            kind2, val2 = self.peek()
            if kind2 == "op" and val2 in ("^", "**"):
                self.take()
                kind3, val3 = self.take()
                if kind3 != "int":
                    raise ParseError(f"exponent must be an unsigned integer, got {val3!r}")
                e = int(val3)
                if e > EXPONENT_LIMIT:
                    raise ExponentOverflowError(f"exponent {e} beyond 32-bit budget")
                return v**e
            return v
        if kind == "op" and val == "(":
            inner = self.expr()
            kind2, val2 = self.take()
            if not (kind2 == "op" and val2 == ")"):
                raise ParseError("unbalanced parenthesis")
            return inner
        raise ParseError(f"unexpected token {val!r}")


def parse_polynomial(text: str, ring: PolynomialRing) -> Polynomial:
    """Parse an expression string into a Polynomial over `ring`.

    Grammar (whitespace ignored): expr := term (('+'|'-') term)*;
    term := factor ('*' factor)*; factor := coefficient | variable ('^' uint)?
    | '(' expr ')'.  Multiplication is always explicit.
    """
    parser = _Parser(_tokenize(text), ring)
    result = parser.expr()
    kind, val = parser.peek()
    if kind != "end":
        raise ParseError(f"trailing input starting at {val!r}")
    return result


def _term_str(ring: PolynomialRing, exps: tuple[int, ...], coeff: int) -> str:
    parts = []
    if coeff != 1 or all(e == 0 for e in exps):
        parts.append(str(coeff))
    for name, e in zip(ring.variables, exps):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def serialize_polynomial(a: Polynomial) -> str:
    """Canonical string form: grevlex-descending terms, explicit '*' and '^'.

    parse_polynomial(serialize_polynomial(a), a.ring) == a for every a.
    """
    if not a.terms:
        return "0"
    return " + ".join(_term_str(a.ring, e, c) for e, c in a.sorted_terms())
