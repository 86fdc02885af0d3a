"""Shared randomized builders and independent reference evaluators.

The evaluators here are deliberately written from the defining formulas with
plain nested loops and no pruning, caching, or index bookkeeping shared with
the package, so they can serve as independent oracles.
"""

from itertools import product

from tetraflows.multivector import MultiVector
from tetraflows.polyring import Context, Polynomial


def random_polynomial(rng, ctx, max_terms=3, max_degree=4, zero_ok=False):
    """Sparse random polynomial with total degree <= max_degree per monomial."""
    terms = {}
    for _ in range(rng.randint(0 if zero_ok else 1, max_terms)):
        exps = [0] * ctx.nslots
        for _ in range(rng.randint(0, max_degree)):
            exps[rng.randrange(ctx.dim)] += 1
        coeff = rng.choice([-4, -3, -2, -1, 1, 2, 3, 4])
        key = tuple(exps)
        terms[key] = terms.get(key, 0) + coeff
    return Polynomial(ctx, terms)


def random_bivector(rng, ctx, max_terms=2, max_degree=3):
    comps = {}
    for i in range(1, ctx.dim + 1):
        for j in range(i + 1, ctx.dim + 1):
            p = random_polynomial(rng, ctx, max_terms, max_degree, zero_ok=True)
            if not p.is_zero:
                comps[(i, j)] = p
    return MultiVector(ctx, 2, comps)


def brute_jacobi_tensor(p):
    """Eq-style Jacobi tensor over ALL ordered index triples, no shortcuts."""
    n = p.ctx.dim
    tensor = {}
    for i, j, k in product(range(1, n + 1), repeat=3):
        acc = Polynomial.zero(p.ctx)
        for l in range(1, n + 1):
            acc = acc + p.entry(i, j).diff(l) * p.entry(l, k)
            acc = acc + p.entry(j, k).diff(l) * p.entry(l, i)
            acc = acc + p.entry(k, i).diff(l) * p.entry(l, j)
        tensor[(i, j, k)] = acc
    return tensor


def naive_evaluate_kgraph_raw(graph, p):
    """Graph evaluation by full iteration over every edge assignment.

    Enumerates all n^(2k) assignments and recomputes every factor from
    scratch; returns the raw matrix as a nested list of polynomials.
    """
    ctx = p.ctx
    n = ctx.dim
    k = graph.n_internal
    targets = [t for pair in graph.edges for t in pair]
    s1 = targets.index(("S", 1))
    s2 = targets.index(("S", 2))
    zero = Polynomial.zero(ctx)
    result = [[zero for _ in range(n)] for _ in range(n)]
    for assign in product(range(1, n + 1), repeat=2 * k):
        term = Polynomial.one(ctx)
        for v in range(1, k + 1):
            factor = p.entry(assign[2 * (v - 1)], assign[2 * (v - 1) + 1])
            for e, target in enumerate(targets):
                if target == ("V", v):
                    factor = factor.diff(assign[e])
            term = term * factor
            if term.is_zero:
                break
        if not term.is_zero:
            a, b = assign[s1], assign[s2]
            result[a - 1][b - 1] = result[a - 1][b - 1] + term
    return result


def lie_derivative_bracket(p, vector_comps):
    """The bi-vector [[P, X]] for a 1-vector X (ad hoc, for identity tests).

    Components: sum_l ( X^l d_l P^{ij} - P^{lj} d_l X^i - P^{il} d_l X^j ).
    """
    ctx = p.ctx
    n = ctx.dim
    comps = {}
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            acc = Polynomial.zero(ctx)
            for l in range(1, n + 1):
                acc = acc + vector_comps[l - 1] * p.entry(i, j).diff(l)
                acc = acc - p.entry(l, j) * vector_comps[i - 1].diff(l)
                acc = acc - p.entry(i, l) * vector_comps[j - 1].diff(l)
            if not acc.is_zero:
                comps[(i, j)] = acc
    return MultiVector(ctx, 2, comps)
