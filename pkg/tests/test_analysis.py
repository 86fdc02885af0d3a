import json
import random
from fractions import Fraction

import pytest

from tetraflows.analysis import (
    FLAG_NAMES,
    _nullspace,
    _primitive,
    builtin_rows,
    compat_report,
    find_ratios,
    perturb_probe,
    reproduce_tables,
)
from tetraflows.generators import DetSpec, build_bivector, det_bracket, premultiply
from tetraflows.graphflow import gamma1, gamma2
from tetraflows.multivector import MultiVector, is_poisson, mv_linear_combination, schouten
from tetraflows.polyring import Context, Polynomial

from example4d import ctx4, p0, p0_spec
from helpers import random_bivector

CTX3 = Context(3)


# -- compatibility report ----------------------------------------------------


def test_compat_report_reference_example():
    report = compat_report(p0(), spec=p0_spec())
    assert report.flags == (False, False, False, False, True)
    assert set(report.witnesses) == {
        "bracket_p1_zero",
        "p2_zero",
        "bracket_p2_zero",
        "q_zero",
    }
    assert all(not mv.is_zero for mv in report.witnesses.values())


def test_compat_report_row_with_vanishing_combination():
    ctx = ctx4()
    spec = DetSpec(
        ctx,
        [Polynomial.parse("x1^2*x2^3*x3^4*x4^5", ctx), Polynomial.parse("x1*x2*x3*x4", ctx)],
    )
    report = compat_report(build_bivector(spec), spec=spec)
    assert report.flags == (False, False, False, True, True)
    # Q == 0 here, so both brackets with Q vanish and Q has no witness
    assert "q_zero" not in report.witnesses


def test_compat_report_constant_bracket_all_zero():
    mv = det_bracket(DetSpec(CTX3, [Polynomial.parse("x3", CTX3)]))
    report = compat_report(mv)
    assert report.flags == (True, True, True, True, True)
    assert report.witnesses == {}


def test_compat_report_refuses_non_poisson_input():
    rng = random.Random(41)
    p = random_bivector(rng, ctx4())
    while is_poisson(p):
        p = random_bivector(rng, ctx4())
    with pytest.raises(ValueError):
        compat_report(p)


def test_compat_report_is_pure():
    a = compat_report(p0(), spec=p0_spec()).to_json_dict()
    b = compat_report(p0(), spec=p0_spec()).to_json_dict()
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


# -- ratio solver -------------------------------------------------------------


def test_find_ratios_reference_balance():
    bi = p0()
    sol = find_ratios(bi, [gamma1(bi).skew, gamma2(bi).skew])
    assert sol.solution_dimension == 1
    assert sol.basis == ((1, 6),)


def test_find_ratios_single_element_cases():
    bi = p0()
    q = mv_linear_combination([(1, gamma1(bi).skew), (6, gamma2(bi).skew)])
    compatible = find_ratios(bi, [q])
    assert compatible.solution_dimension == 1
    assert compatible.basis == ((1,),)
    incompatible = find_ratios(bi, [gamma1(bi).skew])
    assert incompatible.solution_dimension == 0
    assert incompatible.basis == ()


def test_find_ratios_rejects_empty_basis_and_non_poisson():
    with pytest.raises(ValueError):
        find_ratios(p0(), [])
    skewed = premultiply(
        MultiVector(ctx4(), 2, {(1, 3): Polynomial.one(ctx4()), (2, 4): Polynomial.one(ctx4())}),
        Polynomial.parse("x1", ctx4()),
    )
    with pytest.raises(ValueError):
        find_ratios(skewed, [skewed])


def test_ratio_consistency_on_builtin_rows():
    for row_id, _table, spec, _expected in builtin_rows():
        if row_id not in (2, 3, 7):  # a cheap sample across the three generators
            continue
        bi = build_bivector(spec)
        p1 = gamma1(bi).skew
        p2 = gamma2(bi).skew
        assert not schouten(bi, p1).is_zero and not schouten(bi, p2).is_zero
        sol = find_ratios(bi, [p1, p2])
        assert sol.solution_dimension == 1
        assert sol.basis == ((1, 6),)


def test_find_ratios_basis_vectors_solve_the_system():
    # every returned basis vector satisfies sum_i c_i [[P, B_i]] = 0 exactly
    bi = p0()
    basis = [gamma1(bi).skew, gamma2(bi).skew, gamma1(bi).skew]
    sol = find_ratios(bi, basis)
    assert sol.solution_dimension == 2  # duplicated element adds one dimension
    for vec in sol.basis:
        combo = mv_linear_combination(list(zip(vec, basis)))
        assert schouten(bi, combo).is_zero


def test_nullspace_and_primitive_scaling():
    rows = [[Fraction(6), Fraction(-1)], [Fraction(12), Fraction(-2)]]
    kernel = _nullspace(rows, 2)
    assert len(kernel) == 1
    assert _primitive(kernel[0]) == (1, 6)
    assert _nullspace([[Fraction(1), Fraction(0)], [Fraction(0), Fraction(1)]], 2) == []
    assert _primitive([Fraction(-2, 3), Fraction(-4, 3)]) == (1, 2)


# -- perturbation probe --------------------------------------------------------


def appendix_instance():
    # 3D bracket from argument g = x3^3 with prefactor f = x1^2; the
    # perturbation has components (y^2 z, y^3 z^2, 0) in (x, y, z) = (x1, x2, x3).
    base = CTX3
    bi = premultiply(
        det_bracket(DetSpec(base, [Polynomial.parse("x3^3", base)])),
        Polynomial.parse("x1^2", base),
    )
    delta = MultiVector(
        base,
        2,
        {
            (1, 2): Polynomial.parse("x2^2*x3", base),
            (1, 3): Polynomial.parse("x2^3*x3^2", base),
        },
    )
    eps_ctx = base.with_epsilon()
    return bi, delta, bi.lift(eps_ctx), delta.lift(eps_ctx)


def test_perturb_probe_zero_delta():
    _, _, p_lifted, delta_lifted = appendix_instance()
    zero = MultiVector.zero(p_lifted.ctx, 2)
    assert perturb_probe(p_lifted, zero) == {}


def test_perturb_probe_scaling_delta_keeps_jacobi_zero():
    # Delta = P makes P~ = (1 + eps) P, which stays Poisson at every order
    # and scales the balanced flow, so both graded brackets vanish.
    _, _, p_lifted, _ = appendix_instance()
    assert perturb_probe(p_lifted, p_lifted) == {}


def test_perturb_probe_appendix_instance():
    bi, delta, p_lifted, delta_lifted = appendix_instance()
    orders = perturb_probe(p_lifted, delta_lifted)
    # first order of [[P~,P~]]: the bracket doubles the Jacobi expansion, so
    # the (1,2,3) part is 2 * f2 * df/dx * dg/dz = 12 x1 x2^3 x3^4
    jac1 = orders[1][0]
    assert dict(jac1.comps) == {(1, 2, 3): Polynomial.parse("12*x1*x2^3*x3^4", CTX3)}
    # cross-check against bilinearity: eps^1 of [[P~,P~]] = 2 [[P, Delta]]
    assert jac1 == schouten(bi, delta).scale(2)
    # first order of [[P~, Q(P~)]]: a single monomial proportional to
    # d^3f2/dy^3 * (df/dx)^4 * (dg/dz)^4 = 6 x3^2 * 16 x1^4 * 81 x3^8
    compat1 = orders[1][1]
    assert dict(compat1.comps) == {(1, 2, 3): Polynomial.parse("-7776*x1^4*x3^10", CTX3)}
    # order zero is absent: P itself is Poisson and compatible
    assert 0 not in orders


def test_perturb_probe_preconditions():
    bi, delta, p_lifted, delta_lifted = appendix_instance()
    with pytest.raises(ValueError):
        perturb_probe(bi, delta)  # eps not adjoined
    eps = Polynomial.epsilon(p_lifted.ctx)
    with pytest.raises(ValueError):
        perturb_probe(p_lifted.mul_poly(eps), delta_lifted)  # P not eps-free
    rng = random.Random(42)
    bad = random_bivector(rng, CTX3)
    while is_poisson(bad):
        bad = random_bivector(rng, CTX3)
    with pytest.raises(ValueError):
        perturb_probe(bad.lift(p_lifted.ctx), delta_lifted)  # P not Poisson


# -- builtin grid --------------------------------------------------------------


def test_builtin_rows_shape():
    rows = builtin_rows()
    assert [r[0] for r in rows] == list(range(1, 12))
    assert [r[1] for r in rows] == [1, 1, 2, 2, 2, 2, 3, 3, 3, 3, 3]
    q_zero_rows = [r[0] for r in rows if r[3][3]]
    assert q_zero_rows == [4, 5]
    assert all(r[3][4] for r in rows)  # the last column is zero in every row


def test_reproduce_tables_subset():
    rows = [r for r in builtin_rows() if r[0] in (2, 3, 4)]
    report = reproduce_tables(rows)
    assert report.all_match
    doc = report.to_json_dict()
    assert [row["id"] for row in doc["rows"]] == [2, 3, 4]
    assert all(set(row["flags"]) == set(FLAG_NAMES) for row in doc["rows"])
    text = report.render_text()
    assert "MISMATCH" not in text
