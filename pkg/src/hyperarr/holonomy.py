"""The holonomy algebra A(V, A) degree by degree, and the embeddings i1, i2, j.

Elements of the tensor algebra T are sparse dicts ``word -> coefficient`` with
words tuples of hyperplane indices (the letters t_H).  A_n = T_n / R_n, where
R_n is spanned by u r v with r either sum_H t_H or [t_H, t_X] for a rank-2
flat X containing H (t_X = sum of t_K over K inside X).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Any, Iterable, Mapping, Sequence

from .arrangement import Arrangement
from .errors import InternalError, RelationNotPreserved, ValidationError
from .lattice import IntersectionLattice, build_lattice, quotient_lattice, restricted_lattice
from .linalg import SparseSpace, sparse_add, sparse_scale
from .nested import NestedSet, successor

Word = tuple[int, ...]
TVec = dict  # Word -> scalar


# ---------------------------------------------------------------------------
# tensor-algebra helpers
# ---------------------------------------------------------------------------
def t_mul(a: TVec, b: TVec) -> TVec:
    """Concatenation product in T."""
    out: TVec = {}
    for u, c in a.items():
        for v, d in b.items():
            w = u + v
            nv = out.get(w, 0) + c * d
            if nv:
                out[w] = nv
            else:
                out.pop(w, None)
    return out


def t_add(a: TVec, b: TVec, scale: Any = 1) -> TVec:
    return sparse_add(a, b, scale)


def t_commutator(a: TVec, b: TVec) -> TVec:
    return t_add(t_mul(a, b), t_mul(b, a), -1)


def letter(h: int) -> TVec:
    return {(h,): Fraction(1)}


def words(letters: Sequence[int], n: int) -> Iterable[Word]:
    return product(letters, repeat=n)


def t_flat(L: IntersectionLattice, X: int) -> TVec:
    """t_X = sum of t_H over hyperplanes H inside X."""
    return {(h,): Fraction(1) for h in sorted(L.hyps[X])}


def relation_generators(L: IntersectionLattice) -> tuple[TVec, list[TVec]]:
    """The degree-1 relation sum_H t_H and the degree-2 relations [t_H, t_X]."""
    A = L.A
    total = {(h,): Fraction(1) for h in range(len(A))}
    quad = []
    for X in L.of_dim(2):
        tX = t_flat(L, X)
        for h in sorted(L.hyps[X]):
            quad.append(t_commutator(letter(h), tX))
    return total, quad


# ---------------------------------------------------------------------------
# A_n
# ---------------------------------------------------------------------------
class HolonomyDegree:
    """R_n inside T_n and a normal form for A_n = T_n / R_n."""

    def __init__(self, L: IntersectionLattice, n: int) -> None:
        if n < 0:
            raise ValidationError("degree must be nonnegative", n=n)
        self.L, self.n = L, n
        self.letters = list(range(len(L.A)))
        total, quad = relation_generators(L)
        self.R = SparseSpace()
        if n >= 1:
            for k in range(n):
                for u in words(self.letters, k):
                    for v in words(self.letters, n - 1 - k):
                        self.R.add(t_mul(t_mul({u: Fraction(1)}, total), {v: Fraction(1)}))
        if n >= 2:
            for r in quad:
                for k in range(n - 1):
                    for u in words(self.letters, k):
                        for v in words(self.letters, n - 2 - k):
                            self.R.add(t_mul(t_mul({u: Fraction(1)}, r), {v: Fraction(1)}))
        pivots = self.R.pivots
        self.standard: list[Word] = [w for w in words(self.letters, n) if w not in pivots]

    @property
    def dim_T(self) -> int:
        return len(self.letters) ** self.n

    @property
    def dim_R(self) -> int:
        return len(self.R)

    @property
    def dim(self) -> int:
        return len(self.standard)

    def normal_form(self, v: TVec) -> TVec:
        """Canonical representative modulo R_n, supported on standard words."""
        for w in v:
            if len(w) != self.n:
                raise ValidationError("element has the wrong degree", expected=self.n, got=len(w))
        return self.R.reduce(v)

    def contains(self, v: TVec) -> bool:
        return not self.normal_form(v)

    def coordinates(self, v: TVec) -> list:
        nf = self.normal_form(v)
        return [nf.get(s, Fraction(0)) for s in self.standard]


_DEGREE_CACHE: dict[tuple[int, int], HolonomyDegree] = {}


def holonomy_degree(A: Arrangement | IntersectionLattice, n: int) -> HolonomyDegree:
    """A_n for the arrangement (cached per lattice object and degree)."""
    L = A if isinstance(A, IntersectionLattice) else build_lattice(A)
    key = (id(L), n)
    hd = _DEGREE_CACHE.get(key)
    if hd is None or hd.L is not L:
        hd = HolonomyDegree(L, n)
        _DEGREE_CACHE[key] = hd
    return hd


def degree1_normal_form(v: TVec, nletters: int, h0: int) -> TVec:
    """Write a degree-1 element in the basis t_K (K != h0) of A_1."""
    c = v.get((h0,), 0)
    out = {w: x for w, x in v.items() if w != (h0,) and x}
    if c:
        for k in range(nletters):
            if k != h0:
                out = sparse_add(out, {(k,): Fraction(1)}, -c)
    return out


# ---------------------------------------------------------------------------
# algebra maps given on generators
# ---------------------------------------------------------------------------
@dataclass
class GeneratorMap:
    """A homomorphism T(source letters) -> T(target letters) given on letters."""

    images: dict[int, TVec]

    def apply(self, v: TVec) -> TVec:
        out: TVec = {}
        for w, c in v.items():
            img: TVec = {(): Fraction(1)}
            for h in w:
                img = t_mul(img, self.images[h])
                if not img:
                    break
            out = t_add(out, img, c)
        return out


@dataclass
class Embedding:
    """A degree-preserving map between holonomy algebras with its certificates."""

    name: str
    source: IntersectionLattice
    target: IntersectionLattice
    map: GeneratorMap
    checked_degree: int

    def apply(self, v: TVec) -> TVec:
        return self.map.apply(v)


def _check_relations(f: GeneratorMap, src: IntersectionLattice, tgt: IntersectionLattice, what: str) -> None:
    total, quad = relation_generators(src)
    H1, H2 = holonomy_degree(tgt, 1), holonomy_degree(tgt, 2)
    if not H1.contains(f.apply(total)):
        raise RelationNotPreserved("%s does not send sum t_H into the relations" % what)
    for r in quad:
        if not H2.contains(f.apply(r)):
            raise RelationNotPreserved("%s does not preserve a quadratic relation" % what)


def _check_injective(f: GeneratorMap, src: IntersectionLattice, tgt: IntersectionLattice, n: int, what: str) -> None:
    for k in range(1, n + 1):
        Hs, Ht = holonomy_degree(src, k), holonomy_degree(tgt, k)
        space = SparseSpace()
        for s in Hs.standard:
            space.add(Ht.normal_form(f.apply({s: Fraction(1)})))
        if len(space) != Hs.dim:
            raise RelationNotPreserved("%s is not injective in degree %d" % (what, k), rank=len(space), dim=Hs.dim)


def i1_generators(S: NestedSet, X: int, beta: Mapping[int, int], sub_fibers: Sequence[Sequence[int]]) -> GeneratorMap:
    """t_H -> t_H for H != beta(X); t_beta(X) -> t_beta(X) + sum_{K not in X} t_K."""
    L = S.L
    outside = [k for k in range(len(L.A)) if k not in L.hyps[X]]
    images = {}
    for j, fib in enumerate(sub_fibers):
        (h,) = fib
        img = letter(h)
        if h == beta[X]:
            for k in outside:
                img = t_add(img, letter(k))
        images[j] = img
    return GeneratorMap(images)


def i2_generators(S: NestedSet, X: int, beta: Mapping[int, int], sub_fibers: Sequence[Sequence[int]]) -> GeneratorMap:
    """t_{(H+X)/X} -> sum_{K+X=H+X} t_K, plus t_X on the class of beta(X^+)."""
    L = S.L
    Xp = successor(X, S)
    tX = t_flat(L, X)
    images = {}
    for j, fib in enumerate(sub_fibers):
        img: TVec = {}
        for k in fib:
            img = t_add(img, letter(k))
        if beta[Xp] in fib:
            img = t_add(img, tX)
        images[j] = img
    return GeneratorMap(images)


def j_generators(L: IntersectionLattice, sub_fibers: Sequence[Sequence[int]], quotient: IntersectionLattice,
                 limit: int = 1 << 14) -> GeneratorMap:
    """t_{H_i} -> t_{(H_i+X)/X} for a representative H_i of each fiber, other t_K -> 0.

    Not every choice of representatives respects the quadratic relations, so
    choices are searched (in lexicographic order) until one does.
    """
    _, quad = relation_generators(L)
    H2 = holonomy_degree(quotient, 2)
    for count, reps in enumerate(product(*sub_fibers)):
        if count >= limit:
            break
        images: dict[int, TVec] = {k: {} for k in range(len(L.A))}
        for j, h in enumerate(reps):
            images[h] = letter(j)
        f = GeneratorMap(images)
        if all(H2.contains(f.apply(r)) for r in quad):
            return f
    raise RelationNotPreserved("no choice of fiber representatives gives a well-defined left inverse of i2")


@dataclass
class BoundaryEmbeddings:
    i1: Embedding
    i2: Embedding
    j: GeneratorMap
    restricted: Any  # SubLattice of A|_X
    quotient: Any  # SubLattice of A/X


def boundary_embeddings(S: NestedSet, X: int, beta: Mapping[int, int], n: int = 2) -> BoundaryEmbeddings:
    """Build i1, i2 and j for X in S and verify them up to degree n.

    Checks: relations go to relations (well-definedness), injectivity by rank
    in each degree <= n, j o i2 = id, j is well defined, and the images of i1
    and i2 commute modulo R_2.
    """
    L = S.L
    if X == L.top:
        raise ValidationError("X must be a proper element of S")
    rX = restricted_lattice(L, X)
    qX = quotient_lattice(L, X)
    f1 = i1_generators(S, X, beta, rX.A.provenance.fibers)
    f2 = i2_generators(S, X, beta, qX.A.provenance.fibers)
    fj = j_generators(L, qX.A.provenance.fibers, qX.L)
    _check_relations(f1, rX.L, L, "i1")
    _check_relations(f2, qX.L, L, "i2")
    _check_relations(fj, L, qX.L, "j")
    _check_injective(f1, rX.L, L, n, "i1")
    _check_injective(f2, qX.L, L, n, "i2")
    for k in range(1, n + 1):
        Hq = holonomy_degree(qX.L, k)
        for s in Hq.standard:
            if Hq.normal_form(fj.apply(f2.apply({s: Fraction(1)}))) != {s: Fraction(1)}:
                raise RelationNotPreserved("j o i2 is not the identity", degree=k)
    # i1(t_X) = t_{V*} = 0 in A_1
    H1 = holonomy_degree(L, 1)
    if not H1.contains(f1.apply({(j,): Fraction(1) for j in range(len(rX.A))})):
        raise RelationNotPreserved("i1(t_X) is not zero")
    H2 = holonomy_degree(L, 2)
    for a in range(len(rX.A)):
        for b in range(len(qX.A)):
            if not H2.contains(t_commutator(f1.images[a], f2.images[b])):
                raise RelationNotPreserved("images of i1 and i2 do not commute")
    return BoundaryEmbeddings(
        Embedding("i1", rX.L, L, f1, n), Embedding("i2", qX.L, L, f2, n), fj, rX, qX
    )


def embed_i1(S: NestedSet, X: int, beta: Mapping[int, int], n: int = 2) -> Embedding:
    return boundary_embeddings(S, X, beta, n).i1


def embed_i2(S: NestedSet, X: int, beta: Mapping[int, int], n: int = 2) -> Embedding:
    return boundary_embeddings(S, X, beta, n).i2


# ---------------------------------------------------------------------------
# monodromy factors exp(tau t_X)
# ---------------------------------------------------------------------------
@dataclass
class FormalSeries:
    """sum_n tau^n * parts[n], with parts[n] in normal form in A_n."""

    L: IntersectionLattice
    parts: dict[int, TVec]

    @property
    def N(self) -> int:
        return max(self.parts, default=0)

    def to_json(self) -> dict[str, Any]:
        from .field import format_scalar

        return {
            str(n): {"tau_power": n, "terms": {"".join("t%d" % h for h in w) or "1": format_scalar(c)
                                               for w, c in sorted(v.items())}}
            for n, v in sorted(self.parts.items())
        }


def _unshuffle(w: Word) -> dict[tuple[Word, Word], int]:
    """Coproduct of a word of primitive letters: sum over subsets of positions."""
    out: dict[tuple[Word, Word], int] = {}
    n = len(w)
    for mask in range(1 << n):
        a = tuple(w[i] for i in range(n) if mask >> i & 1)
        b = tuple(w[i] for i in range(n) if not mask >> i & 1)
        out[(a, b)] = out.get((a, b), 0) + 1
    return out


def coproduct_nf(L: IntersectionLattice, v: TVec, p: int) -> dict[tuple[Word, Word], Any]:
    """Component in A_p (x) A_q of the coproduct of v (t_H primitive), in normal forms."""
    if not v:
        return {}
    n = len(next(iter(v)))
    q = n - p
    Hp, Hq = holonomy_degree(L, p), holonomy_degree(L, q)
    acc: dict[Word, dict[Word, Any]] = {}
    for w, c in v.items():
        for (a, b), m in _unshuffle(w).items():
            if len(a) == p:
                acc.setdefault(a, {})
                acc[a] = t_add(acc[a], {b: Fraction(1)}, c * m)
    # normalize the right factor, then the left factor
    right: dict[Word, TVec] = {}
    for a, vb in acc.items():
        nb = Hq.normal_form(vb)
        for b, c in nb.items():
            right.setdefault(b, {})
            right[b] = t_add(right[b], {a: Fraction(1)}, c)
    out: dict[tuple[Word, Word], Any] = {}
    for b, va in right.items():
        for a, c in Hp.normal_form(va).items():
            out[(a, b)] = c
    return out


def monodromy_factor(L: IntersectionLattice, X: int, N: int) -> FormalSeries:
    """exp(tau t_X) truncated at weight N (tau = 2 pi i kept formal)."""
    from math import factorial

    tX = t_flat(L, X)
    parts: dict[int, TVec] = {}
    power: TVec = {(): Fraction(1)}
    for n in range(N + 1):
        if n:
            power = t_mul(power, tX)
        parts[n] = holonomy_degree(L, n).normal_form(sparse_scale(power, Fraction(1, factorial(n)))) if n else {(): Fraction(1)}
    series = FormalSeries(L, parts)
    if not is_group_like(series):
        raise InternalError("exp(tau t_X) is not group-like")
    return series


def is_group_like(series: FormalSeries) -> bool:
    """Delta(F) = F (x) F in every bidegree up to the truncation weight."""
    for n in range(series.N + 1):
        for p in range(n + 1):
            lhs = coproduct_nf(series.L, series.parts.get(n, {}), p) if n else {((), ()): series.parts[0].get((), 0)}
            rhs: dict[tuple[Word, Word], Any] = {}
            for a, ca in series.parts.get(p, {}).items():
                for b, cb in series.parts.get(n - p, {}).items():
                    rhs[(a, b)] = rhs.get((a, b), 0) + ca * cb
            rhs = {k: v for k, v in rhs.items() if v}
            lhs = {k: v for k, v in lhs.items() if v}
            if lhs != rhs:
                return False
    return True


def factors_commute(L: IntersectionLattice, X: int, Y: int, N: int) -> bool:
    """exp(tau t_X) exp(tau t_Y) = exp(tau t_Y) exp(tau t_X) up to weight N."""
    a, b = monodromy_factor(L, X, N), monodromy_factor(L, Y, N)
    for n in range(N + 1):
        H = holonomy_degree(L, n)
        ab: TVec = {}
        ba: TVec = {}
        for p in range(n + 1):
            ab = t_add(ab, t_mul(a.parts[p], b.parts[n - p]))
            ba = t_add(ba, t_mul(b.parts[p], a.parts[n - p]))
        if n and H.normal_form(t_add(ab, ba, -1)):
            return False
    return True
