"""Generators of polynomial Poisson bi-vectors.

Three constructions are provided:

* the determinant (Nambu) bracket on R^n, n >= 3:
  {a, b} = det Jac(g_1, ..., g_{n-2}, a, b) for a fixed argument tuple g,
  optionally pre-multiplied by a polynomial factor;
* pre-multiplication of a 3D bi-vector by a polynomial, with the associated
  one-form obstruction test (the coefficient of dx^dy^dz in dP ^ P, which
  vanishes exactly when the bi-vector is Poisson);
* the even-dimensional bracket on the 2d coefficients of a monic u(lam) of
  degree d and a v(lam) of degree d-1, driven by a bivariate polynomial phi
  and Euclidean reduction mod u(lam).

Coordinates for the even-dimensional construction are ordered
u_1..u_d, v_1..v_d and mapped onto x1..x(2d); the resulting matrix has the
block shape (0 U / -U 0).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .multivector import MultiVector, is_poisson
from .polyring import Context, ContextMismatchError, Polynomial, UPoly, compose_bivariate

__all__ = [
    "GeneratorError",
    "DetSpec",
    "VanhaeckeSpec",
    "OneForm",
    "det_bracket",
    "premultiply",
    "to_oneform",
    "form_obstruction",
    "vanhaecke_bracket",
    "generator_from_json_dict",
    "generator_to_json_dict",
    "build_bivector",
]

# Exponent of lam carrying {u_i, v_j} in the reduced remainder: coefficient
# of lam^(d-j).  Calibrated once (d = 2, phi = s^2 t^2) as the unique choice
# of reading that makes the bracket Poisson; re-verified on every instance.
_LAMBDA_POWER_OF_J = "d-j"


class GeneratorError(ValueError):
    """A generator received inconsistent data or produced a non-Poisson result."""


@dataclass(frozen=True)
class DetSpec:
    """Arguments of the determinant bracket: n-2 functions plus optional factor."""

    ctx: Context
    args: tuple
    prefactor: Polynomial | None = None

    def __post_init__(self):
        if self.ctx.dim < 3:
            raise GeneratorError("determinant bracket needs dim >= 3")
        object.__setattr__(self, "args", tuple(self.args))
        if len(self.args) != self.ctx.dim - 2:
            raise GeneratorError(
                f"expected {self.ctx.dim - 2} arguments for dim {self.ctx.dim}, "
                f"got {len(self.args)}"
            )
        for g in self.args:
            if g.ctx != self.ctx:
                raise ContextMismatchError("argument from a different context")
        if self.prefactor is not None and self.prefactor.ctx != self.ctx:
            raise ContextMismatchError("prefactor from a different context")


@dataclass(frozen=True)
class VanhaeckeSpec:
    """Even-dimensional bracket data: degree d and bivariate phi as (a, b, coeff)."""

    d: int
    phi: tuple

    def __post_init__(self):
        if self.d < 1:
            raise GeneratorError("d must be >= 1")
        object.__setattr__(
            self,
            "phi",
            tuple((int(a), int(b), c) for a, b, c in self.phi),
        )

    @property
    def ctx(self) -> Context:
        return Context(2 * self.d)


@dataclass(frozen=True)
class OneForm:
    """3D one-form components (P1, P2, P3) extracted from a bi-vector."""

    ctx: Context
    comps: tuple


def _det(rows: "list[list[Polynomial]]", ctx: Context) -> Polynomial:
    """Exact determinant by cofactor expansion along the sparsest row."""
    n = len(rows)
    cols = tuple(range(n))

    def expand(row_ids, col_ids):
        if len(row_ids) == 1:
            return rows[row_ids[0]][col_ids[0]]
        best = min(
            row_ids,
            key=lambda r: sum(0 if rows[r][c].is_zero else 1 for c in col_ids),
        )
        rest = tuple(r for r in row_ids if r != best)
        acc = Polynomial.zero(ctx)
        for pos, c in enumerate(col_ids):
            e = rows[best][c]
            if e.is_zero:
                continue
            minor = expand(rest, col_ids[:pos] + col_ids[pos + 1 :])
            if minor.is_zero:
                continue
            sign = (-1) ** (row_ids.index(best) + pos)
            acc = acc + (e * minor if sign > 0 else -(e * minor))
        return acc

    return expand(cols, cols)


def det_bracket(spec: DetSpec) -> MultiVector:
    """Nambu-type bracket: comp[(i,j)] = f * det Jac(g_1..g_{n-2}, x_i, x_j)."""
    ctx = spec.ctx
    n = ctx.dim
    grads = [[g.diff(c) for c in range(1, n + 1)] for g in spec.args]
    zero = Polynomial.zero(ctx)
    one = Polynomial.one(ctx)
    comps = {}
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            ei = [zero] * n
            ei[i - 1] = one
            ej = [zero] * n
            ej[j - 1] = one
            p = _det(grads + [ei, ej], ctx)
            if spec.prefactor is not None:
                p = spec.prefactor * p
            if not p.is_zero:
                comps[(i, j)] = p
    return MultiVector(ctx, 2, comps)


def premultiply(p: MultiVector, f: Polynomial) -> MultiVector:
    """Componentwise product f * P.

    In dimension 3 this preserves the Poisson property; in dimension >= 4 it
    generally does not.
    """
    if p.degree != 2:
        raise ValueError("expected a bi-vector (degree 2)")
    return p.mul_poly(f)


def to_oneform(p: MultiVector) -> OneForm:
    """Contract a 3D bi-vector into the one-form (-P^{23}, P^{13}, -P^{12})."""
    if p.degree != 2 or p.ctx.dim != 3:
        raise ValueError("one-form extraction needs a 3D bi-vector")
    return OneForm(p.ctx, (-p.entry(2, 3), p.entry(1, 3), -p.entry(1, 2)))


def form_obstruction(p: MultiVector) -> Polynomial:
    """Coefficient of dx^dy^dz in dP ^ P for the one-form P of a 3D bi-vector.

    Vanishes exactly when the bi-vector is Poisson; proportional to the
    (1,2,3)-component of the Jacobiator (the proportionality constant is 1).
    """
    p1, p2, p3 = to_oneform(p).comps
    c12 = p2.diff(1) - p1.diff(2)
    c13 = p3.diff(1) - p1.diff(3)
    c23 = p3.diff(2) - p2.diff(3)
    return c12 * p3 - c13 * p2 + c23 * p1


def _vanhaecke_u_matrix(spec: VanhaeckeSpec, lam_power) -> "dict[tuple, Polynomial]":
    """Entries U^{ij} = {u_i, v_j} for one lam-coefficient reading."""
    d = spec.d
    ctx = spec.ctx
    # u(lam) = lam^d + u_1 lam^(d-1) + ... + u_d  with u_i = x_i;
    # v(lam) = v_1 lam^(d-1) + ... + v_d          with v_i = x_(d+i).
    u = UPoly(
        ctx,
        [Polynomial.variable(ctx, d - k) for k in range(d)] + [Polynomial.one(ctx)],
    )
    v = UPoly(ctx, [Polynomial.variable(ctx, 2 * d - k) for k in range(d)])
    phi_of_v = compose_bivariate(spec.phi, v)
    entries = {}
    for i in range(1, d + 1):
        prod = phi_of_v * u.plus_part(d - i + 1)
        rem = prod.mod_monic(u)
        for j in range(1, d + 1):
            c = rem.coefficient(lam_power(j, d))
            if not c.is_zero:
                entries[(i, j)] = c
    return entries


def vanhaecke_bracket(spec: VanhaeckeSpec) -> MultiVector:
    """Bracket on R^(2d): {u_i,u_j} = {v_i,v_j} = 0 and

    {u_i, v_j} = coeff of lam^(d-j) in
                 phi(lam, v(lam)) * [u(lam)/lam^(d-i+1)]_+  mod u(lam)

    (the calibrated reading of the lam-coefficient; see _LAMBDA_POWER_OF_J).
    The result is verified to be Poisson; a failure signals an implementation
    bug and raises :class:`GeneratorError`.
    """
    d = spec.d
    entries = _vanhaecke_u_matrix(spec, _LAMBDA_POWER_READINGS[_LAMBDA_POWER_OF_J])
    comps = {
        (i, d + j): poly for (i, j), poly in entries.items()
    }
    mv = MultiVector(spec.ctx, 2, comps)
    if not is_poisson(mv):
        raise GeneratorError(
            "even-dimensional bracket failed the Jacobi identity; "
            "this indicates an implementation bug"
        )
    return mv


_LAMBDA_POWER_READINGS = {
    "j-1": lambda j, d: j - 1,
    "d-j": lambda j, d: d - j,
}


# -- GeneratorSpec serialization ------------------------------------------------


def generator_to_json_dict(spec) -> dict:
    if isinstance(spec, DetSpec):
        doc = {
            "kind": "det",
            "dim": spec.ctx.dim,
            "args": [g.render() for g in spec.args],
        }
        if spec.prefactor is not None:
            doc["prefactor"] = spec.prefactor.render()
        return doc
    if isinstance(spec, VanhaeckeSpec):
        return {
            "kind": "vanhaecke",
            "dim": 2 * spec.d,
            "d": spec.d,
            "phi": [[a, b, _scalar_str(c)] for a, b, c in spec.phi],
        }
    raise TypeError(f"not a generator spec: {type(spec).__name__}")


def generator_from_json_dict(doc: Mapping):
    kind = doc.get("kind")
    if kind == "det":
        ctx = Context(int(doc["dim"]))
        args = [Polynomial.parse(t, ctx) for t in doc["args"]]
        pref = doc.get("prefactor")
        prefactor = Polynomial.parse(pref, ctx) if pref is not None else None
        return DetSpec(ctx, args, prefactor)
    if kind == "vanhaecke":
        d = int(doc["d"])
        if "dim" in doc and int(doc["dim"]) != 2 * d:
            raise GeneratorError(f"dim {doc['dim']} inconsistent with d = {d}")
        phi = [(int(a), int(b), Fraction(str(c))) for a, b, c in doc["phi"]]
        return VanhaeckeSpec(d, phi)
    raise GeneratorError(f"unknown generator kind {kind!r}")


def build_bivector(spec) -> MultiVector:
    """Dispatch a generator spec to its construction."""
    if isinstance(spec, DetSpec):
        return det_bracket(spec)
    if isinstance(spec, VanhaeckeSpec):
        return vanhaecke_bracket(spec)
    raise TypeError(f"not a generator spec: {type(spec).__name__}")


def _scalar_str(c) -> str:
    if isinstance(c, Fraction) and c.denominator != 1:
        return f"{c.numerator}/{c.denominator}"
    return str(int(c))
