"""Local charts of the wonderful model: chart polynomials, boundary divisors,
M-adapted bases, retractions onto boundary divisors and Laurent coefficients.

For a maximal nested set S with adapted basis beta, the chart coordinates are
u_Y for Y in S other than V*.  The linear change of variables

    rho: beta(Y) -> prod_{Z in S, Y subset Z, Z != V*} u_Z

turns every linear form x into rho(beta(p_S(x))) * P_x, where P_x is a
polynomial in the u_Z with Z strictly inside p_S(x) and nonzero constant term.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Mapping, Sequence

from .errors import (
    InternalError,
    NoMAdaptedBasis,
    NotAdapted,
    NotEnoughGModular,
    PoleOrderExceeded,
    ValidationError,
)
from .lattice import BuildingSet, IntersectionLattice
from .linalg import mat_vec, solve_in_span
from .modularity import has_enough_g_modular, m_component, modular_complement, restriction_quotient_iso
from .nested import (
    AdaptedBasis,
    NestedSet,
    adapted_bases,
    is_adapted_basis,
    is_maximal_nested,
    nested_quotient,
    nested_restrict,
    p_in_S,
    quotient_basis,
    restrict_basis,
    successor,
)
from .poly import Poly, RationalFunction, taylor_coefficient


@dataclass(frozen=True)
class LinearFormInChart:
    """x = rho(beta(p)) * P, with the adapted-basis expansion that produced P."""

    p: int
    coefficients: dict[int, Any]  # Y in S -> c_Y with x = sum c_Y beta(Y)
    P: Poly
    monomial: tuple[int, ...]  # exponent vector of rho(beta(p))


class Chart:
    """The chart U_S for a maximal nested set S and adapted basis beta.

    ``basis_vectors`` optionally overrides the covector used for beta(Y); this
    is how derived charts keep the scaling inherited from a parent arrangement.
    """

    def __init__(self, S: NestedSet, beta: AdaptedBasis, basis_vectors: Mapping[int, Sequence[Any]] | None = None) -> None:
        L = S.L
        if not is_maximal_nested(S.elements, S.G) or not is_adapted_basis(S, beta):
            raise NotAdapted("beta is not an adapted basis of a maximal nested set", nested=S.describe())
        self.S, self.beta, self.L = S, dict(beta), L
        self.A = L.A
        self.basis = {Y: tuple(basis_vectors[Y]) if basis_vectors else self.A.covectors[beta[Y]] for Y in S}
        for Y in S:
            v = self.basis[Y]
            if self.A.index_of(v) != beta[Y]:
                raise NotAdapted("basis vector does not span the line beta(Y)", flat=L.describe(Y))
        self.coords: list[int] = [Y for Y in S if Y != L.top]
        self.var: dict[int, int] = {Y: i for i, Y in enumerate(self.coords)}
        self.nvars = len(self.coords)
        self._order = [Y for Y in S]
        self._matrix = [list(self.basis[Y]) for Y in self._order]
        self.forms: dict[int, LinearFormInChart] = {h: self.form(cv) for h, cv in enumerate(self.A.covectors)}
        self._check_invariants()

    # -- the change of variables ----------------------------------------------
    def rho_exponents(self, Y: int) -> tuple[int, ...]:
        """Exponent vector of rho(beta(Y)) = prod_{Z in S, Y subset Z, Z != V*} u_Z."""
        e = [0] * self.nvars
        for Z in self.coords:
            if self.L.leq(Y, Z):
                e[self.var[Z]] = 1
        return tuple(e)

    def rho(self, Y: int) -> Poly:
        return Poly.monomial(self.nvars, self.rho_exponents(Y))

    def expand(self, v: Sequence[Any]) -> dict[int, Any]:
        coeffs = solve_in_span(self._matrix, list(v))
        if coeffs is None:
            raise ValidationError("vector is not in the span of the arrangement")
        return {Y: c for Y, c in zip(self._order, coeffs) if c != 0}

    def form(self, v: Sequence[Any]) -> LinearFormInChart:
        """Factor a linear form as rho(beta(p_S(v))) * P_v."""
        L = self.L
        p = p_in_S(v, self.S)
        coeffs = self.expand(v)
        terms: dict[tuple[int, ...], Any] = {}
        for Y, c in coeffs.items():
            if not L.leq(Y, p):
                raise InternalError("adapted expansion uses a flat outside p_S(x)", flat=L.describe(Y))
            e = [0] * self.nvars
            for Z in self.coords:
                if L.leq(Y, Z) and L.lt(Z, p):
                    e[self.var[Z]] = 1
            terms[tuple(e)] = terms.get(tuple(e), 0) + c
        return LinearFormInChart(p, coeffs, Poly(self.nvars, terms), self.rho_exponents(p))

    def pullback(self, v: Sequence[Any]) -> Poly:
        """Independent route: substitute rho into the expansion of v."""
        return sum((self.rho(Y) * c for Y, c in self.expand(v).items()), Poly(self.nvars))

    @property
    def P(self) -> dict[int, Poly]:
        return {h: f.P for h, f in self.forms.items()}

    def p_of(self, h: int) -> int:
        return self.forms[h].p

    def _check_invariants(self) -> None:
        L = self.L
        for h, f in self.forms.items():
            if f.P.constant_term() == 0 or f.P.constant_term() != f.coefficients.get(f.p, 0):
                raise InternalError("P_H has the wrong constant term", hyperplane=self.A.describe_hyperplane(h))
            allowed = {self.var[Z] for Z in self.coords if L.lt(Z, f.p)}
            if not f.P.support() <= allowed:
                raise InternalError("P_H involves a coordinate not strictly inside p_S(x_H)")
        for Y in self.S:
            if self.form(self.basis[Y]).P != 1 or not self.forms[self.beta[Y]].P.is_constant():
                raise InternalError("P_beta(Y) is not 1", flat=L.describe(Y))

    # -- presentation -----------------------------------------------------------
    def names(self, prefix: str = "u") -> list[str]:
        return ["%s%d" % (prefix, i + 1) for i in range(self.nvars)]

    def legend(self, prefix: str = "u") -> dict[str, str]:
        return {n: self.L.describe(Y) for n, Y in zip(self.names(prefix), self.coords)}

    def profile(self) -> dict[int, int]:
        """{H: p_S(x_H)}, independent of the adapted basis."""
        return {h: f.p for h, f in self.forms.items()}

    def to_json(self) -> dict[str, Any]:
        names = self.names()
        return {
            "nested_set": self.S.describe(),
            "adapted_basis": {self.L.describe(Y): self.A.describe_hyperplane(self.beta[Y]) for Y in self.S},
            "coordinates": self.legend(),
            "P": {self.A.describe_hyperplane(h): self.forms[h].P.format(names) for h in range(len(self.A))},
        }


def make_chart(S: NestedSet, beta: AdaptedBasis, basis_vectors: Mapping[int, Sequence[Any]] | None = None) -> Chart:
    return Chart(S, beta, basis_vectors)


# ---------------------------------------------------------------------------
# coordinate maps
# ---------------------------------------------------------------------------
@dataclass
class CoordinateMap:
    """A morphism given by the images of the target coordinates.

    ``images[i]`` is the pullback of target coordinate i, a polynomial in the
    ``source`` variables.
    """

    source: list[str]
    target: list[str]
    images: list[Poly]

    def compose(self, first: "CoordinateMap") -> "CoordinateMap":
        """self o first: pull back through ``self`` and then through ``first``."""
        if first.target != self.source:
            raise ValidationError("coordinate maps are not composable")
        sub = {i: p for i, p in enumerate(first.images)}
        return CoordinateMap(first.source, self.target, [q.substitute(sub, len(first.source)) for q in self.images])

    def is_identity(self) -> bool:
        if self.source != self.target:
            return False
        n = len(self.source)
        return all(p == Poly.var(n, i) for i, p in enumerate(self.images))

    def to_json(self) -> dict[str, str]:
        return {t: p.format(self.source) for t, p in zip(self.target, self.images)}


# ---------------------------------------------------------------------------
# boundary divisors
# ---------------------------------------------------------------------------
@dataclass
class BoundaryDecomposition:
    """{u_X = 0} in U_S, identified with U_{S|X} x U_{S/X}."""

    chart: Chart
    X: int
    restricted: Chart
    quotient: Chart | None
    restricted_source: dict[int, int]  # flat of A|_X -> flat of A
    quotient_source: dict[int, int]  # flat of A/X -> flat of A
    restricted_images: dict[int, tuple]  # hyperplane of A inside X -> raw covector in A|_X
    quotient_images: dict[int, tuple]  # hyperplane of A not inside X -> raw covector in A/X
    f: CoordinateMap  # U_S cap {u_X = 0} -> product of the factor charts
    inclusion: CoordinateMap  # product of the factor charts -> U_S (u_X -> 0)
    product_var: dict[int, int] = field(default_factory=dict)  # flat Y of S -> product-chart variable

    @property
    def product_names(self) -> list[str]:
        return self.f.target


def _product_names(c1: Chart, c2: Chart | None) -> list[str]:
    return c1.names("v") + (c2.names("w") if c2 else [])


def boundary_restriction(chart: Chart, X: int) -> BoundaryDecomposition:
    """Build the factor charts and verify the P-polynomial identities exactly."""
    S, L = chart.S, chart.L
    if X not in S:
        raise ValidationError("X is not a member of the nested set", flat=L.describe(X))
    D1 = nested_restrict(S, X)
    img1 = D1.sub.A.provenance.images
    b1 = restrict_basis(S, chart.beta, D1)
    c1 = Chart(D1.S, b1, {d: img1[chart.beta[y]] for d, y in D1.source.items()})
    c2 = None
    src2: dict[int, int] = {}
    img2: dict[int, tuple] = {}
    if X != L.top:
        D2 = nested_quotient(S, X)
        img2 = D2.sub.A.provenance.images
        b2 = quotient_basis(S, chart.beta, D2)
        c2 = Chart(D2.S, b2, {d: img2[chart.beta[y]] for d, y in D2.source.items()})
        src2 = D2.source

    # product-chart variables: first the S|_X coordinates, then the S/X ones
    pvar: dict[int, int] = {}
    for i, d in enumerate(c1.coords):
        pvar[D1.source[d]] = i
    if c2 is not None:
        for i, d in enumerate(c2.coords):
            pvar[src2[d]] = c1.nvars + i
    others = {Y for Y in chart.coords if Y != X}
    if set(pvar) != others or len(pvar) != len(others):
        raise InternalError("factor coordinates do not partition the coordinates u_Y, Y != X")
    pnames = _product_names(c1, c2)
    n = len(pnames)

    # the map f (pullbacks of product coordinates) and the inclusion u_X -> 0
    f_images = [Poly(chart.nvars)] * n
    for Y, i in pvar.items():
        f_images[i] = Poly.var(chart.nvars, chart.var[Y])
    f = CoordinateMap(chart.names(), pnames, f_images)
    inc_images = []
    for Y in chart.coords:
        inc_images.append(Poly(n) if Y == X else Poly.var(n, pvar[Y]))
    inclusion = CoordinateMap(pnames, chart.names(), inc_images)

    to_product = {chart.var[Y]: Poly.var(n, pvar[Y]) for Y in pvar}
    if X != L.top:
        to_product[chart.var[X]] = Poly(n)
    r1 = {c1.var[d]: pvar[D1.source[d]] for d in c1.coords}
    r2 = {c2.var[d]: pvar[src2[d]] for d in c2.coords} if c2 is not None else {}

    # P-identities
    for h in range(len(chart.A)):
        P = chart.forms[h].P.substitute(to_product, n)
        if h in L.hyps[X]:
            g = c1.form(img1[h])
            if D1.source[g.p] != chart.forms[h].p:
                raise InternalError("p_S(x_H) differs from p_{S|X}(x_H)")
            if g.P.rename(r1, n) != P:
                raise InternalError("P_H does not restrict to P_H on S|_X", hyperplane=chart.A.describe_hyperplane(h))
        else:
            assert c2 is not None
            g = c2.form(img2[h])
            if g.P.rename(r2, n) != P:
                raise InternalError(
                    "P_H at u_X = 0 does not match the quotient chart", hyperplane=chart.A.describe_hyperplane(h)
                )
    return BoundaryDecomposition(chart, X, c1, c2, D1.source, src2, img1, img2, f, inclusion, pvar)


# ---------------------------------------------------------------------------
# M-adapted bases and retractions
# ---------------------------------------------------------------------------
def is_M_adapted(S: NestedSet, beta: AdaptedBasis, X: int, M: int) -> bool:
    """beta(Y) lies in M for every Y in S not contained in X."""
    L = S.L
    return all(beta[Y] in L.hyps[M] for Y in S if not L.leq(Y, X))


def find_M_adapted(S: NestedSet, X: int, M: int) -> AdaptedBasis:
    for beta in adapted_bases(S):
        if is_M_adapted(S, beta, X, M):
            return beta
    raise NoMAdaptedBasis("no adapted basis is M-adapted", X=S.L.describe(X), M=S.L.describe(M))


@dataclass
class Retraction:
    chart: Chart  # chart of S with an M-adapted basis
    X: int
    M: int
    boundary: BoundaryDecomposition
    pi1: CoordinateMap  # U_S -> U_{S|X}
    pi2: CoordinateMap  # U_S -> U_{S/X}
    S_M: list[int]

    def to_json(self) -> dict[str, Any]:
        L = self.chart.L
        return {
            "X": L.describe(self.X),
            "M": L.describe(self.M),
            "chart_coordinates": self.chart.legend(),
            "restricted_coordinates": self.boundary.restricted.legend("v"),
            "quotient_coordinates": self.boundary.quotient.legend("w") if self.boundary.quotient else {},
            "pi1": self.pi1.to_json(),
            "pi2": self.pi2.to_json(),
        }


def _ratio_in_chart(chart: Chart, num: Sequence[Any], den: Sequence[Any]) -> Poly:
    """Pull back the function num/den (linear forms) and require a polynomial."""
    a, b = chart.form(num), chart.form(den)
    n = chart.nvars
    R = RationalFunction(Poly.monomial(n, a.monomial) * a.P, Poly.monomial(n, b.monomial) * b.P).simplified()
    if not R.den.is_constant():
        raise InternalError("coordinate pullback is not a polynomial")
    return R.num


def retraction_maps(G: BuildingSet, S: NestedSet, X: int, beta: AdaptedBasis | None = None) -> Retraction:
    """The coordinate form of the retraction U_S -> U_{S|X} x U_{S/X}.

    pi1 pulls back u^{S|X}_Y = beta(Y)/beta(Y^+) through the chart; pi2 goes
    through the modular complement M: the quotient chart is transported to a
    chart of A|_M by the isomorphism V*/X = M, and its coordinates are pulled
    back as ratios of linear forms in M.  Both must come out as the chart
    coordinates u_Y, and pi o inclusion must be the identity.
    """
    L = S.L
    if X == L.top:
        raise ValidationError("retraction onto V* is not defined; choose a proper X in S")
    if not has_enough_g_modular(L, G):
        raise NotEnoughGModular("the building set does not have enough G-modular elements")
    Gt = S.G
    M = modular_complement(L, Gt, X)
    if beta is None or not is_M_adapted(S, beta, X, M):
        beta = find_M_adapted(S, X, M)
    chart = Chart(S, beta)
    B = boundary_restriction(chart, X)
    assert B.quotient is not None
    n = len(B.product_names)

    # S_M = {(Y+X) cap M}; for an M-adapted basis this is also {Y cap M}
    S_M_of = {Y: L.meet(L.join(Y, X), M) for Y in S if not L.leq(Y, X)}
    if None in S_M_of.values():
        raise InternalError("(Y+X) cap M is not a flat")
    S_M = sorted(set(S_M_of.values()))
    if any(L.meet(Y, M) != W for Y, W in S_M_of.items()):
        raise InternalError("(Y+X) cap M differs from Y cap M")

    # pi1
    c1 = B.restricted
    pi1_images = []
    for d in c1.coords:
        Y = B.restricted_source[d]
        Ysucc = successor(Y, S)
        if B.restricted_source[successor(d, c1.S)] != Ysucc:
            raise InternalError("successor in S|_X differs from successor in S")
        img = _ratio_in_chart(chart, chart.basis[Y], chart.basis[Ysucc])
        if img != Poly.var(chart.nvars, chart.var[Y]):
            raise InternalError("pi1 does not pull back u^{S|X}_Y to u_Y")
        pi1_images.append(img)
    pi1 = CoordinateMap(chart.names(), c1.names("v"), pi1_images)

    # pi2, through the chart of A|_M with the transported adapted basis
    iso = restriction_quotient_iso(L, Gt, X, M)
    rM = iso.restricted
    MF = L.flats[M]
    GM = BuildingSet(rM.L, {rM.translate[Z] for Z in Gt if L.leq(Z, M)})
    back = {rM.translate[S_M_of[Y]]: Y for Y in S_M_of}
    SM = NestedSet.of(GM, back)
    vecM = {d: tuple(MF.coordinates(chart.basis[Y])) for d, Y in back.items()}
    betaM = {d: rM.A.index_of(v) for d, v in vecM.items()}
    cM = Chart(SM, betaM, vecM)
    c2 = B.quotient
    qv = {B.quotient_source[d]: d for d in c2.coords}  # Y -> coordinate flat of S/X
    pi2_images: list[Poly] = [Poly(chart.nvars)] * c2.nvars
    for d in cM.coords:
        Y = back[d]
        dq = qv[Y]
        # the isomorphism V*/X -> M carries the quotient class of beta(Y) to beta(Y)
        qcoords = B.quotient_images[chart.beta[Y]]
        if list(mat_vec(iso.matrix, list(qcoords))) != list(vecM[d]):
            raise InternalError("the isomorphism V*/X = M does not fix beta(Y)")
        if iso.flats[iso.quotient.translate[Y]] != d:
            raise InternalError("lattice isomorphism does not send (Y+X)/X to (Y+X) cap M")
        Ysucc = back[successor(d, SM)]
        img = _ratio_in_chart(chart, chart.basis[Y], chart.basis[Ysucc])
        if img != Poly.var(chart.nvars, chart.var[Y]):
            raise InternalError("pi2 does not pull back u^{S/X}_(Y+X)/X to u_Y")
        pi2_images[c2.var[dq]] = img
    # the transported chart has the same P-polynomials as the quotient chart
    rq = {cM.var[d]: c2.var[qv[back[d]]] for d in cM.coords}
    for h in range(len(chart.A)):
        if h in L.hyps[X]:
            continue
        mh = MF.coordinates(m_component(L, X, M, list(chart.A.covectors[h])))
        if cM.form(mh).P.rename(rq, c2.nvars) != c2.form(B.quotient_images[h]).P:
            raise InternalError("transported chart disagrees with the quotient chart")
    pi2 = CoordinateMap(chart.names(), c2.names("w"), pi2_images)

    # retraction identity: (pi1 x pi2) o inclusion = id on U_{S|X} x U_{S/X}
    pi = CoordinateMap(chart.names(), B.product_names, pi1.images + pi2.images)
    if not pi.compose(B.inclusion).is_identity():
        raise InternalError("pi o inclusion is not the identity")
    return Retraction(chart, X, M, B, pi1, pi2, S_M)


# ---------------------------------------------------------------------------
# Laurent coefficients along a boundary divisor
# ---------------------------------------------------------------------------
def _split_order(p: Poly, i: int) -> tuple[int, Poly]:
    k = p.order_in(i)
    e = [0] * p.nvars
    e[i] = k
    return k, p.divide_monomial(e)


def laurent_coefficients(
    chart: Chart, f: RationalFunction, X: int, N: int, upto: int | None = None
) -> list[tuple[int, RationalFunction]]:
    """Coefficients a_n, n = -N .. upto (default N), of f in u_X around u_X = 0.

    Computed by truncated series division and cross-checked coefficientwise
    against a_n = 1/(n+N)! d^{n+N}/du_X^{n+N} (u_X^N f) at u_X = 0.  The
    coefficients do not involve u_X, and their denominators are powers of the
    restriction of the denominator to {u_X = 0}.
    """
    if X not in chart.var:
        raise ValidationError("X must be a chart coordinate (an element of S other than V*)")
    if N < 0:
        raise ValidationError("N must be nonnegative")
    upto = N if upto is None else upto
    i = chart.var[X]
    n = chart.nvars
    if not f.num.terms:
        return [(m, RationalFunction(Poly(n))) for m in range(-N, upto + 1)]
    j, num = _split_order(f.num, i)
    k, D = _split_order(f.den, i)
    if k - j > N:
        raise PoleOrderExceeded("pole order along u_X exceeds N", order=k - j, N=N)
    shift = N - k + j  # u_X^N f = u_X^shift * num / D
    d = D.coefficients_in(i)
    d0 = d[0]
    top = upto + N - shift
    # 1/D = sum_m g_m / d0^(m+1) u_X^m
    g: list[Poly] = [Poly.const(n, Fraction(1))]
    for m in range(1, top + 1):
        acc = Poly(n)
        for r in range(1, m + 1):
            if r in d:
                acc = acc + d[r] * g[m - r] * d0 ** (r - 1)
        g.append(-acc)
    numc = num.coefficients_in(i)
    out = []
    for a in range(-N, upto + 1):
        t = a + N - shift  # coefficient of u_X^t in num / D
        if t < 0:
            out.append((a, RationalFunction(Poly(n))))
            continue
        total = Poly(n)
        for r, c in numc.items():
            if r <= t:
                total = total + c * g[t - r] * d0 ** (r)
        coeff = RationalFunction(total, d0 ** (t + 1))
        # derivative route
        e = [0] * n
        e[i] = shift
        h = RationalFunction(num * Poly.monomial(n, e), D)
        alt = taylor_coefficient(h, i, a + N)
        if coeff != alt:
            raise InternalError("series and derivative routes disagree", n=a)
        if i in coeff.num.support() or i in coeff.den.support():
            raise InternalError("Laurent coefficient depends on u_X")
        out.append((a, coeff))
    return out


def regular_function(chart: Chart, num: Poly, P_powers: Mapping[int, int] | None = None,
                     u_powers: Mapping[int, int] | None = None) -> RationalFunction:
    """num / (prod_H P_H^e_H * prod_Y u_Y^k_Y), a typical function regular on U_S away from D_S."""
    den = Poly.const(chart.nvars, Fraction(1))
    for h, e in (P_powers or {}).items():
        den = den * chart.forms[h].P ** e
    for Y, k in (u_powers or {}).items():
        den = den * Poly.var(chart.nvars, chart.var[Y]) ** k
    return RationalFunction(num, den)
