"""The connection form Omega = sum_H t_H dlog x_H in the charts of the wonderful
model, its restriction to boundary divisors, and primitives on the line.

In a chart U_S every x_H factors as rho(beta(p_H)) * P_H, so

    Omega = sum_{Y in S, Y != V*} t_Y dlog u_Y + sum_H t_H dlog P_H,

with t_Y = sum_{H subset Y} t_H.  Coefficients are kept as degree-1 tensors
and compared in A_1 = T_1 / <sum t_H>.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Mapping, Sequence

from .arrangement import Arrangement
from .charts import Chart, boundary_restriction, make_chart
from .errors import InternalError, PoleOutsideArrangement, ValidationError
from .holonomy import (
    GeneratorMap,
    TVec,
    Word,
    boundary_embeddings,
    degree1_normal_form,
    holonomy_degree,
    letter,
    t_add,
    t_commutator,
    t_flat,
)
from .lattice import BuildingSet
from .nested import NestedSet, adapted_bases
from .poly import Poly, RationalFunction


# ---------------------------------------------------------------------------
# Omega in a chart
# ---------------------------------------------------------------------------
@dataclass
class DlogTerm:
    """coefficient (x) dlog f; ``kind`` is 'u' for a coordinate, 'P' for a chart polynomial."""

    coefficient: TVec
    f: Poly
    kind: str
    label: int  # flat of S for 'u', hyperplane for 'P'


@dataclass
class OmegaExpansion:
    chart: Chart
    terms: list[DlogTerm]
    h0: int
    integrable: bool = False

    def term_count(self) -> int:
        return len(self.terms)

    def to_json(self) -> dict[str, Any]:
        names = self.chart.names()
        A = self.chart.A

        def coeff(v: TVec) -> str:
            nf = degree1_normal_form(v, len(A), self.h0)
            return " + ".join("%s*t%d" % (c, w[0]) for w, c in sorted(nf.items())) or "0"

        return {
            "h0": A.describe_hyperplane(self.h0),
            "terms": [{"coefficient": coeff(t.coefficient), "dlog": t.f.format(names)} for t in self.terms],
            "integrable": self.integrable,
        }


def omega_chart(chart: Chart, check: bool = True) -> OmegaExpansion:
    """Expand Omega in the chart; verified against the direct pullback of every x_H
    and, when ``check`` is set, integrability Omega ^ Omega = 0 modulo R_2."""
    L = chart.L
    n = len(chart.A)
    h0 = chart.beta[L.top]
    terms: list[DlogTerm] = []
    for Y in chart.coords:
        terms.append(DlogTerm(t_flat(L, Y), Poly.var(chart.nvars, chart.var[Y]), "u", Y))
    for h in range(n):
        P = chart.forms[h].P
        if not P.is_constant():
            terms.append(DlogTerm(letter(h), P, "P", h))

    # second route: pull back x_H directly and read off the dlog u_Y coefficients
    from_pullback: dict[int, TVec] = {Y: {} for Y in chart.coords}
    for h, cv in enumerate(chart.A.covectors):
        x = chart.pullback(cv)
        e = x.monomial_content()
        if x.divide_monomial(e) != chart.forms[h].P or e != chart.rho_exponents(chart.forms[h].p):
            raise InternalError("chart factorization of x_H disagrees with the pullback", hyperplane=h)
        for Y in chart.coords:
            if e[chart.var[Y]]:
                from_pullback[Y] = t_add(from_pullback[Y], letter(h), e[chart.var[Y]])
    for t in terms:
        if t.kind == "u" and from_pullback[t.label] != t.coefficient:
            raise InternalError("coefficient of dlog u_Y is not t_Y", flat=L.describe(t.label))

    out = OmegaExpansion(chart, terms, h0)
    if check:
        out.integrable = wedge_square_vanishes(chart, terms)
        if not out.integrable:
            raise InternalError("Omega ^ Omega does not vanish in A_2")
    return out


def _merge_terms(terms: Sequence[tuple[TVec, Poly]]) -> list[tuple[TVec, Poly]]:
    """Combine coefficients of identical normalized dlog arguments."""
    merged: dict[Poly, TVec] = {}
    for a, f in terms:
        g = f.normalized()
        merged[g] = t_add(merged.get(g, {}), a)
    return [(a, f) for f, a in merged.items() if a]


def wedge_square_vanishes(chart: Chart, terms: Sequence[DlogTerm]) -> bool:
    """Omega ^ Omega = sum_{i<j} [a_i, a_j] dlog f_i ^ dlog f_j.

    After multiplying by prod f_k, the coefficient of du_a ^ du_b is a
    polynomial with coefficients in T_2; every such coefficient must lie in R_2.
    """
    L = chart.L
    H2 = holonomy_degree(L, 2)
    items = _merge_terms([(t.coefficient, t.f) for t in terms])
    k = len(items)
    nv = chart.nvars
    grads = [[f.derivative(i) for i in range(nv)] for _, f in items]
    one = Poly.const(nv, Fraction(1))
    acc: dict[tuple[int, int, tuple], TVec] = {}
    for i in range(k):
        for j in range(i + 1, k):
            br = H2.normal_form(t_commutator(items[i][0], items[j][0]))
            if not br:
                continue
            rest = one
            for m in range(k):
                if m not in (i, j):
                    rest = rest * items[m][1]
            for a in range(nv):
                for b in range(a + 1, nv):
                    jac = grads[i][a] * grads[j][b] - grads[i][b] * grads[j][a]
                    if not jac:
                        continue
                    for e, c in (jac * rest).terms.items():
                        key = (a, b, e)
                        acc[key] = t_add(acc.get(key, {}), br, c)
    return all(not H2.normal_form(v) for v in acc.values())


# ---------------------------------------------------------------------------
# restriction of Omega to a boundary divisor
# ---------------------------------------------------------------------------
@dataclass
class BoundaryOmegaResult:
    ok: bool
    diff: list[str] = field(default_factory=list)
    i2_on_S: bool = True

    def __bool__(self) -> bool:
        return self.ok


def _dlog_normal_form(terms: Sequence[tuple[TVec, Poly]], nvars: int, H1: Any) -> dict[Poly, TVec]:
    """sum a_k dlog f_k grouped by normalized non-monomial factors, A_1 coefficients.

    Monomial factors are split into coordinate dlogs; constants are dropped.
    """
    out: dict[Poly, TVec] = {}
    for a, f in terms:
        if f.is_zero():
            raise InternalError("dlog of the zero polynomial")
        e = f.monomial_content()
        for i, k in enumerate(e):
            if k:
                key = Poly.var(nvars, i)
                out[key] = t_add(out.get(key, {}), a, k)
        g = f.divide_monomial(e)
        if not g.is_constant():
            key = g.normalized()
            out[key] = t_add(out.get(key, {}), a)
    return {f: nf for f, v in out.items() if (nf := H1.normal_form(v))}


def _dlog_exact_equal(lhs: Sequence[tuple[TVec, Poly]], rhs: Sequence[tuple[TVec, Poly]], nvars: int, H1: Any) -> bool:
    """Compare sum a_k df_k / f_k coordinate by coordinate as rational functions."""
    pairs = [(H1.normal_form(a), f) for a, f in lhs] + [(H1.normal_form(a), f) for a, f in rhs]
    signs = [1] * len(lhs) + [-1] * len(rhs)
    letters = sorted({w for a, _ in pairs for w in a})
    for i in range(nvars):
        for w in letters:
            total = RationalFunction(Poly(nvars))
            for (a, f), s in zip(pairs, signs):
                c = a.get(w, 0)
                if c:
                    total = total + RationalFunction(f.derivative(i) * (c * s), f)
            if total.num:
                return False
    return True


def verify_boundary_omega(G: BuildingSet, S: NestedSet, X: int, beta: Mapping[int, int] | None = None) -> BoundaryOmegaResult:
    """Omega_1 + Omega_2 = (Omega - t_X dlog u_X)|_{u_X = 0}, with Omega_1, Omega_2 the
    connection forms of the factor charts pushed through i1 and i2."""
    if beta is None:
        beta = adapted_bases(S)[0]
    L = S.L
    chart = make_chart(S, beta)
    H1 = holonomy_degree(L, 1)
    if X == L.top:
        return BoundaryOmegaResult(True)
    bd = boundary_restriction(chart, X)
    emb = boundary_embeddings(S, X, beta, 2)
    if bd.restricted.A is not emb.restricted.A or bd.quotient.A is not emb.quotient.A:
        raise InternalError("factor charts and holonomy embeddings use different arrangements")
    nprod = len(bd.product_names)
    c1, c2 = bd.restricted, bd.quotient

    def pushed(c: Chart, f: GeneratorMap, offset: int) -> list[tuple[TVec, Poly]]:
        om = omega_chart(c, check=False)
        ren = {i: offset + i for i in range(c.nvars)}
        return [(f.apply(t.coefficient), t.f.rename(ren, nprod)) for t in om.terms]

    lhs = pushed(c1, emb.i1.map, 0) + pushed(c2, emb.i2.map, c1.nvars)
    ux = chart.var[X]
    ren = {chart.var[Y]: i for Y, i in bd.product_var.items()}
    rhs: list[tuple[TVec, Poly]] = []
    for t in omega_chart(chart, check=False).terms:
        if t.kind == "u" and t.label == X:
            continue
        rhs.append((t.coefficient, t.f.set_zero(ux).rename(ren, nprod)))

    nl = _dlog_normal_form(lhs, nprod, H1)
    nr = _dlog_normal_form(rhs, nprod, H1)
    diff: list[str] = []
    if nl != nr:
        if not _dlog_exact_equal(lhs, rhs, nprod, H1):
            names = bd.product_names
            for f in sorted(set(nl) | set(nr), key=lambda p: p.format(names)):
                if nl.get(f) != nr.get(f):
                    diff.append("dlog(%s): %s vs %s" % (f.format(names), nl.get(f), nr.get(f)))
    # i2(t_{(Y+X)/X}) = t_Y for Y in S not inside X
    i2_ok = True
    qsub = emb.quotient
    back = {Y: d for d, Y in bd.quotient_source.items()}
    for Y in S:
        if L.leq(Y, X):
            continue
        d = back[Y]
        tq = {(j,): Fraction(1) for j in sorted(qsub.L.hyps[d])}
        if H1.normal_form(t_add(emb.i2.apply(tq), t_flat(L, Y), -1)):
            i2_ok = False
            diff.append("i2(t_(Y+X)/X) != t_Y for Y = %s" % L.describe(Y))
    return BoundaryOmegaResult(not diff, diff, i2_ok)


# ---------------------------------------------------------------------------
# primitives on the projective line
# ---------------------------------------------------------------------------
def line_points(A: Arrangement) -> list[Any]:
    """Affine coordinate of each point of a 1-dimensional arrangement ('inf' for y = 0)."""
    if A.dim != 2:
        raise ValidationError("expected a 1-dimensional (projective line) arrangement", dim=A.dim)
    pts: list[Any] = []
    for c0, c1 in A.covectors:
        pts.append("inf" if c0 == 0 else -c1 / c0)
    return pts


def _upoly(coeffs: Sequence[Any]) -> Poly:
    return Poly(1, {(k,): c for k, c in enumerate(coeffs)})


def _coeffs(p: Poly) -> list[Any]:
    d = max((e[0] for e in p.terms), default=-1)
    return [p.terms.get((k,), Fraction(0)) for k in range(d + 1)]


def _divide_linear(c: list[Any], a: Any) -> tuple[list[Any], Any]:
    """Synthetic division by (t - a): quotient coefficients and remainder."""
    if not c:
        return [], Fraction(0)
    q = [Fraction(0)] * (len(c) - 1)
    acc: Any = Fraction(0)
    for k in range(len(c) - 1, -1, -1):
        acc = c[k] + acc * a
        if k:
            q[k - 1] = acc
    return q, acc


def _shift(c: list[Any], a: Any) -> list[Any]:
    """Coefficients of p(a + s) in s."""
    out: list[Any] = []
    cur = list(c)
    while cur:
        cur, r = _divide_linear(cur, a)
        out.append(r)
    return out


def partial_fractions(f: RationalFunction, points: Sequence[Any]) -> tuple[Poly, dict[tuple[Any, int], Any]]:
    """f = poly + sum c_{a,k} / (t - a)^k with a among ``points``.

    Raises PoleOutsideArrangement if the denominator has another factor.
    """
    num, den = _coeffs(f.num), _coeffs(f.den)
    mult: dict[Any, int] = {}
    rest = den
    for a in points:
        m = 0
        while len(rest) > 1:
            q, r = _divide_linear(rest, a)
            if r:
                break
            rest, m = q, m + 1
        if m:
            mult[a] = m
    if len(rest) != 1:
        raise PoleOutsideArrangement("rational function has a pole outside the arrangement")
    lead = rest[0]
    principal: dict[tuple[Any, int], Any] = {}
    for a, m in mult.items():
        # f = num / (lead * prod (t-b)^m_b); near a, expand g = num / (lead * prod_{b != a}) in s = t - a
        other = [Fraction(1)]
        for b, mb in mult.items():
            if b != a:
                for _ in range(mb):
                    other = _coeffs(_upoly(other) * _upoly([-b, Fraction(1)]))
        ns, ds = _shift(num, a), _shift(other, a)
        ds = [x * lead for x in ds]
        # power series division g = ns / ds up to order m - 1
        g: list[Any] = []
        for k in range(m):
            v = ns[k] if k < len(ns) else Fraction(0)
            for j in range(1, k + 1):
                if j < len(ds):
                    v = v - ds[j] * g[k - j]
            g.append(v / ds[0])
        for k in range(m):
            if g[k]:
                principal[(a, m - k)] = g[k]
    remainder = f
    for (a, k), c in principal.items():
        remainder = remainder - RationalFunction(Poly.const(1, c), _upoly([-a, Fraction(1)]) ** k)
    remainder = remainder.simplified()
    if not remainder.is_polynomial():
        raise InternalError("partial fraction remainder is not a polynomial")
    return remainder.simplified().num, principal


@dataclass
class Primitive:
    """G = sum_w g_w (x) [w] with rational g_w; letters are hyperplane indices."""

    terms: dict[Word, RationalFunction]
    points: list[Any]
    h0: int

    @property
    def weight(self) -> int:
        return max((len(w) for w, g in self.terms.items() if g.num), default=0)


def _integrate_nonlog(poly: Poly, principal: Mapping[tuple[Any, int], Any]) -> RationalFunction:
    """Antiderivative of the polynomial part and the higher-order poles."""
    out = RationalFunction(Poly(1, {(e[0] + 1,): c / (e[0] + 1) for e, c in poly.terms.items()}))
    for (a, k), c in principal.items():
        if k >= 2:
            out = out + RationalFunction(Poly.const(1, -c / (k - 1)), _upoly([-a, Fraction(1)]) ** (k - 1))
    return out


def _add_term(G: dict[Word, RationalFunction], w: Word, g: RationalFunction) -> None:
    G[w] = G[w] + g if w in G else g


def primitive_1d(F: Mapping[Word, RationalFunction], A: Arrangement, h0: int | None = None) -> Primitive:
    """Solve dG = F for F = sum_w f_w(t) dt (x) [w] on the complement of A in P^1.

    The hyperplane at infinity (t = inf) is H0, so omega_a = dt / (t - a) and
    d[w1|...|wn] = omega_w1 (x) [w2|...|wn].
    """
    pts = line_points(A)
    inf = [h for h, p in enumerate(pts) if p == "inf"]
    if not inf:
        raise ValidationError("the arrangement must contain the point at infinity")
    if h0 is not None and h0 != inf[0]:
        raise ValidationError("primitives use the point at infinity as H0")
    h0 = inf[0]
    point_of = {h: p for h, p in enumerate(pts) if h != h0}
    letter_of = {p: h for h, p in point_of.items()}
    finite = list(point_of.values())

    def prim(f: RationalFunction, w: Word) -> dict[Word, RationalFunction]:
        G: dict[Word, RationalFunction] = {}
        if not f.num:
            return G
        poly, principal = partial_fractions(f, finite)
        for (a, k), c in principal.items():
            if k == 1:
                _add_term(G, (letter_of[a],) + w, RationalFunction(Poly.const(1, c)))
        R = _integrate_nonlog(poly, principal)
        if R.num:
            _add_term(G, w, R)
            if w:
                a = point_of[w[0]]
                sub = prim(R / RationalFunction(_upoly([-a, Fraction(1)])), w[1:])
                for v, g in sub.items():
                    _add_term(G, v, -g)
        return G

    G: dict[Word, RationalFunction] = {}
    for w, f in F.items():
        if any(h not in point_of for h in w):
            raise ValidationError("words may only use the letters of finite points", word=list(w))
        for v, g in prim(f, w).items():
            _add_term(G, v, g)
    G = {w: g.simplified() for w, g in G.items() if g.num}
    out = Primitive(G, pts, h0)
    if not differential_equals(out, F):
        raise InternalError("dG differs from F")
    wF = max((len(w) for w in F), default=0)
    if out.weight > wF + 1:
        raise InternalError("primitive has weight above weight(F) + 1")
    return out


def differential(G: Primitive) -> dict[Word, RationalFunction]:
    """The dt-coefficients of dG = sum (g_w' dt (x) w + g_w omega_w1 (x) w[1:])."""
    out: dict[Word, RationalFunction] = {}
    for w, g in G.terms.items():
        _add_term(out, w, g.derivative(0))
        if w:
            a = G.points[w[0]]
            _add_term(out, w[1:], g / RationalFunction(_upoly([-a, Fraction(1)])))
    return out


def differential_equals(G: Primitive, F: Mapping[Word, RationalFunction]) -> bool:
    dG = differential(G)
    zero = RationalFunction(Poly(1))
    return all(dG.get(w, zero) == F.get(w, zero) for w in set(dG) | set(F))
