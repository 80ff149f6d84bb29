"""Exact fields and standard-graded sparse polynomials."""

from __future__ import annotations

import operator
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


class Field:
    """The rationals (characteristic 0) or a prime field F_p with p < 2**31.

    Elements are ``Fraction`` for Q and ``int`` in ``range(p)`` for F_p.
    Calling the field on an int or Fraction normalizes it.
    """

    def __init__(self, characteristic: int = 0):
        if characteristic != 0:
            if not _is_prime(characteristic):
                raise ValueError(f"characteristic {characteristic} is not prime")
            if characteristic >= 2**31:
                raise ValueError("prime fields are limited to p < 2^31")
        self.characteristic = p = characteristic
        if p == 0:
            self.add = operator.add
            self.sub = operator.sub
            self.mul = operator.mul
            self.neg = operator.neg
            self.zero = Fraction(0)
            self.one = Fraction(1)
        else:
            self.add = lambda a, b: (a + b) % p
            self.sub = lambda a, b: (a - b) % p
            self.mul = lambda a, b: (a * b) % p
            self.neg = lambda a: (-a) % p
            self.zero = 0
            self.one = 1

    @property
    def name(self) -> str:
        return "Q" if self.characteristic == 0 else f"F{self.characteristic}"

    def __call__(self, x) -> Fraction | int:
        p = self.characteristic
        if p == 0:
            return Fraction(x)
        if isinstance(x, Fraction):
            if x.denominator % p == 0:
                raise ZeroDivisionError(f"{x} is not defined in {self.name}")
            return x.numerator * pow(x.denominator, -1, p) % p
        return int(x) % p

    def inv(self, a):
        if not a:
            raise ZeroDivisionError("inverse of zero")
        if self.characteristic == 0:
            return 1 / Fraction(a)
        return pow(a, -1, self.characteristic)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def format(self, a) -> str:
        if self.characteristic == 0:
            return str(a.numerator) if a.denominator == 1 else f"{a.numerator}/{a.denominator}"
        return str(a)

    def signed(self, a) -> tuple[int, object]:
        """Split ``a`` into a printing sign and magnitude (F_p uses the symmetric range)."""
        if self.characteristic == 0:
            return (-1, -a) if a < 0 else (1, a)
        p = self.characteristic
        return (-1, p - a) if a > p // 2 else (1, a)

    def __eq__(self, other):
        return isinstance(other, Field) and other.characteristic == self.characteristic

    def __hash__(self):
        return hash(("Field", self.characteristic))

    def __repr__(self):
        return f"Field({self.name})"


QQ = Field(0)


def sign(k: int) -> int:
    return -1 if k % 2 else 1


class PolyRing:
    """k[x_1, ..., x_d] with every variable in degree 1."""

    def __init__(self, field: Field, variables):
        variables = tuple(variables)
        if not variables:
            raise ValueError("a polynomial ring needs at least one variable")
        if len(set(variables)) != len(variables):
            raise ValueError(f"variable names must be distinct: {variables}")
        self.field = field
        self.variables = variables
        self.nvars = len(variables)

    def __eq__(self, other):
        return (
            isinstance(other, PolyRing)
            and self.field == other.field
            and self.variables == other.variables
        )

    def __hash__(self):
        return hash((self.field, self.variables))

    def __repr__(self):
        return f"{self.field.name}[{','.join(self.variables)}]"

    @property
    def zero(self) -> Poly:
        return Poly(self, {})

    @property
    def one(self) -> Poly:
        return self.const(1)

    def const(self, c) -> Poly:
        return Poly(self, {(0,) * self.nvars: self.field(c)})

    def gen(self, name_or_index) -> Poly:
        i = name_or_index
        if isinstance(i, str):
            i = self.variables.index(i)
        e = [0] * self.nvars
        e[i] = 1
        return Poly(self, {tuple(e): self.field.one})

    def gens(self) -> list[Poly]:
        return [self.gen(i) for i in range(self.nvars)]

    def monomial(self, exps, coeff=1) -> Poly:
        return Poly(self, {tuple(exps): self.field(coeff)})

    def monomials(self, j: int) -> tuple[tuple[int, ...], ...]:
        """Exponent vectors of degree ``j``, lexicographically descending."""
        return _monomials(self.nvars, j)

    def monomial_index(self, j: int) -> dict:
        return _monomial_index(self.nvars, j)

    def piece_dim(self, j: int) -> int:
        return len(_monomials(self.nvars, j))

    def with_field(self, field: Field) -> PolyRing:
        return PolyRing(field, self.variables)

    def parse(self, text: str) -> Poly:
        from .parsing import parse_poly

        return parse_poly(text, self)


@lru_cache(maxsize=None)
def _monomials(n: int, j: int) -> tuple:
    if j < 0:
        return ()
    out = []
    for combo in combinations_with_replacement(range(n), j):
        e = [0] * n
        for v in combo:
            e[v] += 1
        out.append(tuple(e))
    out.sort(reverse=True)
    return tuple(out)


@lru_cache(maxsize=None)
def _monomial_index(n: int, j: int) -> dict:
    return {m: i for i, m in enumerate(_monomials(n, j))}


def graded_piece_basis(ring: PolyRing, j: int) -> list[tuple[int, ...]]:
    return list(ring.monomials(j))


class Poly:
    """Sparse polynomial: a map from exponent tuples to nonzero field elements.

    Treated as immutable once built.
    """

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: PolyRing, terms=None, _clean=False):
        self.ring = ring
        self._hash = None
        if _clean:
            self.terms = terms
            return
        field = ring.field
        clean = {}
        for e, c in (terms or {}).items():
            if len(e) != ring.nvars:
                raise ValueError(f"exponent {e} does not match {ring}")
            c = field(c)
            if c:
                clean[tuple(e)] = c
        self.terms = clean

    def _coerce(self, other) -> Poly:
        if isinstance(other, Poly):
            if other.ring != self.ring:
                raise ValueError(f"ring mismatch: {self.ring} vs {other.ring}")
            return other
        if isinstance(other, (int, Fraction)):
            return self.ring.const(other)
        return NotImplemented

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ring.const(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        add = self.ring.field.add
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = add(out[e], c) if e in out else c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return Poly(self.ring, out, _clean=True)

    __radd__ = __add__

    def __neg__(self):
        neg = self.ring.field.neg
        return Poly(self.ring, {e: neg(c) for e, c in self.terms.items()}, _clean=True)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        f = self.ring.field
        add, mul = f.add, f.mul
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = mul(c1, c2)
                if e in out:
                    v = add(out[e], v)
                out[e] = v
        return Poly(self.ring, {e: c for e, c in out.items() if c}, _clean=True)

    __rmul__ = __mul__

    def scale(self, c) -> Poly:
        f = self.ring.field
        c = f(c)
        if not c:
            return self.ring.zero
        return Poly(self.ring, {e: f.mul(v, c) for e, v in self.terms.items()}, _clean=True)

    def __pow__(self, n: int):
        out = self.ring.one
        for _ in range(n):
            out = out * self
        return out

    def mul_monomial(self, exps, coeff=None) -> Poly:
        f = self.ring.field
        if coeff is None:
            return Poly(
                self.ring,
                {tuple(a + b for a, b in zip(e, exps)): c for e, c in self.terms.items()},
                _clean=True,
            )
        return Poly(
            self.ring,
            {tuple(a + b for a, b in zip(e, exps)): f.mul(c, coeff) for e, c in self.terms.items()},
            _clean=True,
        )

    def degree(self) -> int | None:
        """Largest total degree of a term, or None for the zero polynomial."""
        if not self.terms:
            return None
        return max(sum(e) for e in self.terms)

    def is_homogeneous(self, d: int | None = None) -> bool:
        degs = {sum(e) for e in self.terms}
        if len(degs) > 1:
            return False
        return d is None or not degs or degs == {d}

    def homogeneous_components(self) -> dict[int, Poly]:
        parts: dict[int, dict] = {}
        for e, c in self.terms.items():
            parts.setdefault(sum(e), {})[e] = c
        return {d: Poly(self.ring, t, _clean=True) for d, t in sorted(parts.items())}

    def coefficient(self, exps):
        return self.terms.get(tuple(exps), self.ring.field.zero)

    def is_constant(self) -> bool:
        return not self.terms or list(self.terms) == [(0,) * self.ring.nvars]

    def sorted_terms(self) -> list:
        return sorted(self.terms.items(), reverse=True)

    def __repr__(self):
        return f"Poly({self})"

    def __str__(self):
        return format_poly(self)


def _monomial_str(ring: PolyRing, e) -> str:
    parts = []
    for name, k in zip(ring.variables, e):
        if k == 1:
            parts.append(name)
        elif k > 1:
            parts.append(f"{name}^{k}")
    return "*".join(parts)


def format_poly(p: Poly) -> str:
    """Canonical text: terms in descending lex order, ``3/2*x*y - x^2`` style."""
    if not p.terms:
        return "0"
    field = p.ring.field
    out = []
    for e, c in p.sorted_terms():
        s, mag = field.signed(c)
        mono = _monomial_str(p.ring, e)
        mag_s = field.format(mag)
        if not mono:
            body = mag_s
        elif mag_s == "1":
            body = mono
        else:
            body = f"{mag_s}*{mono}"
        if not out:
            out.append(body if s > 0 else f"-{body}")
        else:
            out.append(f"+ {body}" if s > 0 else f"- {body}")
    return " ".join(out)


def poly_arith(p: Poly, q: Poly, op: str) -> Poly:
    if p.ring != q.ring:
        raise ValueError(f"ring mismatch: {p.ring} vs {q.ring}")
    if op == "add":
        return p + q
    if op == "sub":
        return p - q
    if op == "mul":
        return p * q
    raise ValueError(f"unknown operation {op!r}")


def homogeneous_components(p: Poly) -> dict[int, Poly]:
    return p.homogeneous_components()


def koszul_twist(p: Poly) -> Poly:
    """Multiply each homogeneous component of degree k by (-1)^k."""
    neg = p.ring.field.neg
    return Poly(
        p.ring,
        {e: (neg(c) if sum(e) % 2 else c) for e, c in p.terms.items()},
        _clean=True,
    )
