"""Exact sparse multivariate polynomial arithmetic over the rationals.

A polynomial lives in a :class:`Context` of ``n >= 2`` variables ``x1..xn``
(plus, optionally, a formal deformation variable ``eps`` occupying a trailing
exponent slot) and is stored as a dict mapping exponent tuples to nonzero
rational coefficients::

    3*x1^2*x2 - 1/2   in Context(dim=2)
    -->  {(2, 1): 3, (0, 0): Fraction(-1, 2)}

Coefficients are kept as plain ``int`` whenever the value is integral and as
``fractions.Fraction`` otherwise; the two compare and hash equal, so the term
map itself is the canonical form and two polynomials are equal exactly when
their term maps are equal.  The zero polynomial is the empty map.

The module also provides :class:`UPoly`, a dense univariate polynomial in an
abstract variable ``lam`` with :class:`Polynomial` coefficients, together
with the Euclidean operations (exact division by a monic modulus, truncation
to the polynomial part) used by the even-dimensional bracket construction.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

__all__ = [
    "Coeff",
    "Context",
    "ContextMismatchError",
    "PolyParseError",
    "Polynomial",
    "UPoly",
    "compose_bivariate",
]

# Rational scalar as stored in term maps: int when integral, Fraction otherwise.
Coeff = "int | Fraction"

Monomial = "tuple[int, ...]"


class ContextMismatchError(ValueError):
    """Operands belong to different variable contexts."""


class PolyParseError(ValueError):
    """Polynomial text does not conform to the grammar.

    Carries the 0-based character ``position`` of the offending token.
    """

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


def _norm_coeff(c):
    """Collapse integral Fractions to int; reject non-rational scalars."""
    if isinstance(c, Fraction):
        return c.numerator if c.denominator == 1 else c
    if isinstance(c, int):
        return c
    raise TypeError(f"coefficient must be int or Fraction, got {type(c).__name__}")


@dataclass(frozen=True)
class Context:
    """Variable context: Cartesian coordinates x1..x<dim>, optionally + eps.

    Every Polynomial references exactly one Context; mixing contexts in an
    operation raises :class:`ContextMismatchError`.
    """

    dim: int
    has_epsilon: bool = False

    def __post_init__(self):
        if not isinstance(self.dim, int) or self.dim < 2:
            raise ValueError(f"Context dim must be an integer >= 2, got {self.dim!r}")

    @property
    def nslots(self) -> int:
        """Number of exponent slots (dim, plus one for eps when adjoined)."""
        return self.dim + 1 if self.has_epsilon else self.dim

    def slot_name(self, slot: int) -> str:
        if self.has_epsilon and slot == self.dim:
            return "eps"
        return f"x{slot + 1}"

    def with_epsilon(self) -> "Context":
        return Context(self.dim, True)

    def without_epsilon(self) -> "Context":
        return Context(self.dim, False)


def _require_same_ctx(a: "Polynomial", b: "Polynomial") -> None:
    if a.ctx != b.ctx:
        raise ContextMismatchError(f"context mismatch: {a.ctx} vs {b.ctx}")


class Polynomial:
    """Immutable sparse polynomial in canonical form (no zero terms stored)."""

    __slots__ = ("ctx", "terms")

    def __init__(self, ctx: Context, terms: Mapping[tuple, object] | None = None):
        clean = {}
        if terms:
            ns = ctx.nslots
            for mono, c in terms.items():
                c = _norm_coeff(c)
                if c == 0:
                    continue
                mono = tuple(mono)
                if len(mono) != ns or any(e < 0 or not isinstance(e, int) for e in mono):
                    raise ValueError(f"bad exponent vector {mono!r} for {ctx}")
                clean[mono] = c
        object.__setattr__(self, "ctx", ctx)
        object.__setattr__(self, "terms", clean)

    @staticmethod
    def _raw(ctx: Context, terms: dict) -> "Polynomial":
        # Internal fast path: `terms` must already be canonical.
        p = object.__new__(Polynomial)
        object.__setattr__(p, "ctx", ctx)
        object.__setattr__(p, "terms", terms)
        return p

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, ctx: Context) -> "Polynomial":
        return cls._raw(ctx, {})

    @classmethod
    def constant(cls, ctx: Context, value) -> "Polynomial":
        value = _norm_coeff(value if isinstance(value, (int, Fraction)) else Fraction(value))
        if value == 0:
            return cls.zero(ctx)
        return cls._raw(ctx, {(0,) * ctx.nslots: value})

    @classmethod
    def one(cls, ctx: Context) -> "Polynomial":
        return cls.constant(ctx, 1)

    @classmethod
    def variable(cls, ctx: Context, i: int) -> "Polynomial":
        """The coordinate polynomial x_i (1-based, 1 <= i <= dim)."""
        if not 1 <= i <= ctx.dim:
            raise ValueError(f"variable index {i} out of range 1..{ctx.dim}")
        exps = [0] * ctx.nslots
        exps[i - 1] = 1
        return cls._raw(ctx, {tuple(exps): 1})

    @classmethod
    def epsilon(cls, ctx: Context) -> "Polynomial":
        if not ctx.has_epsilon:
            raise ValueError("context has no eps variable")
        exps = [0] * ctx.nslots
        exps[-1] = 1
        return cls._raw(ctx, {tuple(exps): 1})

    @classmethod
    def monomial(cls, ctx: Context, exps: Sequence[int], coeff=1) -> "Polynomial":
        return cls(ctx, {tuple(exps): coeff})

    # -- queries -----------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def total_degree(self) -> int:
        """Total degree (eps counted); 0 for the zero polynomial."""
        return max((sum(m) for m in self.terms), default=0)

    def coefficient(self, exps: Sequence[int]):
        return self.terms.get(tuple(exps), 0)

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.ctx == other.ctx and self.terms == other.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __hash__(self):
        return hash((self.ctx, frozenset(self.terms.items())))

    # -- ring operations ---------------------------------------------------

    def __add__(self, other: "Polynomial") -> "Polynomial":
        if not isinstance(other, Polynomial):
            return NotImplemented
        _require_same_ctx(self, other)
        if not self.terms:
            return other
        if not other.terms:
            return self
        out = dict(self.terms)
        for mono, c in other.terms.items():
            s = out.get(mono, 0) + c
            if s:
                out[mono] = _norm_coeff(s) if isinstance(s, Fraction) else s
            else:
                out.pop(mono, None)
        return Polynomial._raw(self.ctx, out)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self + (-other)

    def __neg__(self) -> "Polynomial":
        return Polynomial._raw(self.ctx, {m: -c for m, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        _require_same_ctx(self, other)
        a, b = self.terms, other.terms
        if not a or not b:
            return Polynomial.zero(self.ctx)
        if len(a) > len(b):  # fewer outer iterations on the smaller operand
            a, b = b, a
        out: dict = {}
        get = out.get
        for m1, c1 in a.items():
            for m2, c2 in b.items():
                m = tuple(x + y for x, y in zip(m1, m2))
                s = get(m, 0) + c1 * c2
                if s:
                    out[m] = s
                else:
                    del out[m]
        if any(isinstance(c, Fraction) for c in out.values()):
            out = {m: _norm_coeff(c) for m, c in out.items()}
        return Polynomial._raw(self.ctx, out)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def scale(self, c) -> "Polynomial":
        c = _norm_coeff(c if isinstance(c, (int, Fraction)) else Fraction(c))
        if c == 0:
            return Polynomial.zero(self.ctx)
        if c == 1:
            return self
        return Polynomial._raw(
            self.ctx, {m: _norm_coeff(v * c) for m, v in self.terms.items()}
        )

    def __pow__(self, k: int) -> "Polynomial":
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result = Polynomial.one(self.ctx)
        for _ in range(k):
            result = result * self
        return result

    def diff(self, i: int) -> "Polynomial":
        """Partial derivative with respect to x_i (1-based, 1 <= i <= dim)."""
        if not 1 <= i <= self.ctx.dim:
            raise ValueError(f"variable index {i} out of range 1..{self.ctx.dim}")
        slot = i - 1
        out = {}
        for mono, c in self.terms.items():
            e = mono[slot]
            if e:
                m = mono[:slot] + (e - 1,) + mono[slot + 1 :]
                out[m] = _norm_coeff(c * e) if isinstance(c, Fraction) else c * e
        return Polynomial._raw(self.ctx, out)

    # -- eps handling ------------------------------------------------------

    def lift(self, ctx: Context) -> "Polynomial":
        """Embed into `ctx`, which must extend self.ctx by the eps slot."""
        if ctx == self.ctx:
            return self
        if not (ctx.dim == self.ctx.dim and ctx.has_epsilon and not self.ctx.has_epsilon):
            raise ContextMismatchError(f"cannot lift {self.ctx} into {ctx}")
        return Polynomial._raw(ctx, {m + (0,): c for m, c in self.terms.items()})

    def epsilon_split(self) -> "dict[int, Polynomial]":
        """Split by eps-degree: order k -> coefficient polynomial (eps-free ctx)."""
        if not self.ctx.has_epsilon:
            raise ValueError("context has no eps variable")
        base = self.ctx.without_epsilon()
        parts: dict[int, dict] = {}
        for mono, c in self.terms.items():
            parts.setdefault(mono[-1], {})[mono[:-1]] = c
        return {k: Polynomial._raw(base, t) for k, t in sorted(parts.items())}

    # -- text format -------------------------------------------------------

    _TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<name>x\d+|eps)|(?P<op>[-+*/^]))")

    @classmethod
    def parse(cls, text: str, ctx: Context) -> "Polynomial":
        """Parse the bit-exact grammar, e.g. ``-2*x1*x2^3*x3^5*x4``.

        polynomial := term (("+"|"-") term)*
        term       := [sign] [rational "*"] factor ("*" factor)* | [sign] rational
        factor     := var ["^" positive-int];  var := "x" positive-int | "eps"
        rational   := int ["/" positive-int];  whitespace is ignored.
        """
        tokens = cls._tokenize(text)
        pos = 0

        def peek():
            return tokens[pos] if pos < len(tokens) else ("end", "", len(text))

        terms: dict = {}
        ns = ctx.nslots

        def add_term(exps, coeff):
            mono = tuple(exps)
            s = terms.get(mono, 0) + coeff
            if s:
                terms[mono] = s
            else:
                terms.pop(mono, None)

        first = True
        while True:
            kind, val, at = peek()
            if kind == "end":
                if first:
                    raise PolyParseError("empty polynomial", at)
                break
            sign = 1
            if kind == "op" and val in "+-":
                if first and val == "+":
                    pass
                sign = -1 if val == "-" else 1
                pos += 1
                kind, val, at = peek()
            elif not first:
                raise PolyParseError(f"expected '+' or '-', found {val!r}", at)
            first = False

            coeff = None
            if kind == "num":
                pos += 1
                numer = int(val)
                kind, val, at = peek()
                if kind == "op" and val == "/":
                    pos += 1
                    kind, val, at = peek()
                    if kind != "num" or int(val) == 0:
                        raise PolyParseError("expected positive denominator", at)
                    coeff = Fraction(numer, int(val))
                    pos += 1
                    kind, val, at = peek()
                else:
                    coeff = numer
                if kind == "op" and val == "*":
                    pos += 1
                    kind, val, at = peek()
                    if kind != "name":
                        raise PolyParseError("expected variable after '*'", at)
                else:
                    add_term((0,) * ns, sign * coeff)  # constant term
                    continue
            if kind != "name":
                raise PolyParseError(f"expected term, found {val!r}", at)

            exps = [0] * ns
            while True:
                slot = cls._var_slot(val, ctx, at)
                pos += 1
                e = 1
                kind, val, at = peek()
                if kind == "op" and val == "^":
                    pos += 1
                    kind, val, at = peek()
                    if kind != "num" or int(val) == 0:
                        raise PolyParseError("expected positive exponent", at)
                    e = int(val)
                    pos += 1
                    kind, val, at = peek()
                exps[slot] += e
                if kind == "op" and val == "*":
                    pos += 1
                    kind, val, at = peek()
                    if kind != "name":
                        raise PolyParseError("expected variable after '*'", at)
                    continue
                break
            add_term(exps, sign * (1 if coeff is None else coeff))

        return cls(ctx, terms)

    @classmethod
    def _tokenize(cls, text: str):
        tokens = []
        pos = 0
        while pos < len(text):
            m = cls._TOKEN.match(text, pos)
            if m is None:
                stripped = text[pos:].lstrip()
                if not stripped:
                    break
                at = len(text) - len(stripped)
                raise PolyParseError(f"unexpected character {stripped[0]!r}", at)
            for kind in ("num", "name", "op"):
                if m.group(kind) is not None:
                    tokens.append((kind, m.group(kind), m.start(kind)))
                    break
            pos = m.end()
        return tokens

    @staticmethod
    def _var_slot(name: str, ctx: Context, at: int) -> int:
        if name == "eps":
            if not ctx.has_epsilon:
                raise PolyParseError("unknown variable 'eps' (no eps in context)", at)
            return ctx.dim
        idx = int(name[1:])
        if not 1 <= idx <= ctx.dim:
            raise PolyParseError(f"unknown variable {name!r} (dim={ctx.dim})", at)
        return idx - 1

    def render(self) -> str:
        """Deterministic text form: graded-lex monomial order, descending."""
        if not self.terms:
            return "0"
        monos = sorted(self.terms, key=lambda m: (sum(m), m), reverse=True)
        pieces = []
        for mono in monos:
            c = self.terms[mono]
            neg = c < 0
            mag = -c if neg else c
            factors = []
            for slot, e in enumerate(mono):
                if e == 0:
                    continue
                name = self.ctx.slot_name(slot)
                factors.append(name if e == 1 else f"{name}^{e}")
            if not factors:
                body = _coeff_str(mag)
            elif mag == 1:
                body = "*".join(factors)
            else:
                body = _coeff_str(mag) + "*" + "*".join(factors)
            if not pieces:
                pieces.append(("-" if neg else "") + body)
            else:
                pieces.append((" - " if neg else " + ") + body)
        return "".join(pieces)

    def __repr__(self):
        return f"Polynomial({self.render()!r})"


def _coeff_str(c) -> str:
    if isinstance(c, Fraction):
        return f"{c.numerator}/{c.denominator}"
    return str(c)


class UPoly:
    """Univariate polynomial in ``lam`` with Polynomial coefficients.

    ``coeffs[k]`` is the coefficient of lam^k; the leading stored coefficient
    is nonzero (the zero UPoly has an empty coefficient list).
    """

    __slots__ = ("ctx", "coeffs")

    def __init__(self, ctx: Context, coeffs: Iterable[Polynomial] = ()):
        coeffs = list(coeffs)
        for c in coeffs:
            if c.ctx != ctx:
                raise ContextMismatchError("UPoly coefficient from a different context")
        while coeffs and coeffs[-1].is_zero:
            coeffs.pop()
        object.__setattr__(self, "ctx", ctx)
        object.__setattr__(self, "coeffs", tuple(coeffs))

    def __setattr__(self, name, value):
        raise AttributeError("UPoly is immutable")

    @classmethod
    def zero(cls, ctx: Context) -> "UPoly":
        return cls(ctx)

    @classmethod
    def one(cls, ctx: Context) -> "UPoly":
        return cls(ctx, [Polynomial.one(ctx)])

    @classmethod
    def from_scalars(cls, ctx: Context, scalars: Iterable) -> "UPoly":
        return cls(ctx, [Polynomial.constant(ctx, s) for s in scalars])

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def degree(self) -> int:
        """Degree in lam; -1 for the zero UPoly."""
        return len(self.coeffs) - 1

    def coefficient(self, k: int) -> Polynomial:
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return Polynomial.zero(self.ctx)

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == Polynomial.one(self.ctx)

    def __eq__(self, other):
        if not isinstance(other, UPoly):
            return NotImplemented
        return self.ctx == other.ctx and self.coeffs == other.coeffs

    def __add__(self, other: "UPoly") -> "UPoly":
        if not isinstance(other, UPoly):
            return NotImplemented
        if self.ctx != other.ctx:
            raise ContextMismatchError("UPoly context mismatch")
        n = max(len(self.coeffs), len(other.coeffs))
        return UPoly(
            self.ctx,
            [self.coefficient(k) + other.coefficient(k) for k in range(n)],
        )

    def __neg__(self) -> "UPoly":
        return UPoly(self.ctx, [-c for c in self.coeffs])

    def __sub__(self, other: "UPoly") -> "UPoly":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, Polynomial):
            return UPoly(self.ctx, [c * other for c in self.coeffs])
        if not isinstance(other, UPoly):
            return NotImplemented
        if self.ctx != other.ctx:
            raise ContextMismatchError("UPoly context mismatch")
        if self.is_zero or other.is_zero:
            return UPoly.zero(self.ctx)
        out = [Polynomial.zero(self.ctx)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a.is_zero:
                continue
            for j, b in enumerate(other.coeffs):
                if not b.is_zero:
                    out[i + j] = out[i + j] + a * b
        return UPoly(self.ctx, out)

    def shifted(self, k: int) -> "UPoly":
        """Multiply by lam^k (k >= 0)."""
        if self.is_zero or k == 0:
            return self
        return UPoly(self.ctx, [Polynomial.zero(self.ctx)] * k + list(self.coeffs))

    def plus_part(self, k: int) -> "UPoly":
        """Polynomial part of self(lam) / lam^k: drop coefficients below lam^k."""
        return UPoly(self.ctx, self.coeffs[k:])

    def divmod_monic(self, u: "UPoly") -> "tuple[UPoly, UPoly]":
        """Euclidean division by a monic modulus: self = q*u + r, deg r < deg u.

        The division is exact over the coefficient ring (no fractions are
        introduced) precisely because u is monic.
        """
        if self.ctx != u.ctx:
            raise ContextMismatchError("UPoly context mismatch")
        if u.is_zero:
            raise ZeroDivisionError("division by the zero UPoly")
        if not u.is_monic():
            raise ValueError("modulus must be monic")
        d = u.degree()
        rem = list(self.coeffs)
        if len(rem) <= d:
            return UPoly.zero(self.ctx), self
        q = [Polynomial.zero(self.ctx)] * (len(rem) - d)
        for s in range(len(rem) - 1, d - 1, -1):
            c = rem[s]
            if c.is_zero:
                continue
            q[s - d] = c
            for t in range(d + 1):
                rem[s - d + t] = rem[s - d + t] - c * u.coeffs[t]
        return UPoly(self.ctx, q), UPoly(self.ctx, rem[:d])

    def mod_monic(self, u: "UPoly") -> "UPoly":
        """Remainder of Euclidean division by the monic modulus u."""
        return self.divmod_monic(u)[1]

    def __repr__(self):
        if self.is_zero:
            return "UPoly(0)"
        body = " + ".join(
            f"({c.render()})*lam^{k}" for k, c in enumerate(self.coeffs) if not c.is_zero
        )
        return f"UPoly({body})"


def compose_bivariate(
    phi: Sequence[tuple], v: "UPoly", ctx: Context | None = None
) -> "UPoly":
    """Evaluate a bivariate polynomial at (lam, v(lam)).

    `phi` is a list of ``(a, b, coeff)`` triples meaning ``coeff * s^a * t^b``;
    the result is ``sum coeff * lam^a * v(lam)^b`` as a UPoly.  `ctx` is only
    required when `v` is the zero UPoly (its context is otherwise used).
    """
    if ctx is None:
        ctx = v.ctx
    elif v.ctx != ctx:
        raise ContextMismatchError("UPoly context mismatch")
    result = UPoly.zero(ctx)
    powers = {0: UPoly.one(ctx)}

    def v_pow(b: int) -> UPoly:
        if b not in powers:
            powers[b] = v_pow(b - 1) * v
        return powers[b]

    for a, b, coeff in phi:
        if a < 0 or b < 0:
            raise ValueError("phi exponents must be nonnegative")
        term = v_pow(b).shifted(a) * Polynomial.constant(ctx, coeff)
        result = result + term
    return result
