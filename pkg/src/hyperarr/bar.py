"""The reduced bar complex B(V, A) in each weight, and its Hopf structure.

Words are tuples of hyperplane indices standing for the logarithmic forms
omega_H = dlog(x_H / x_H0), where H0 is a fixed hyperplane at infinity (so
omega_H0 = 0 and H0 never occurs as a letter).  B_n is computed twice:

* as the annihilator of R_n, after rewriting the relations in the basis
  t_K (K != H0) of A_1 = T_1 / <sum t_H>;
* as the intersection of the kernels N_j of the maps wedging positions j and
  j+1 into the degree-2 Orlik-Solomon space of the central arrangement.

The two spans must agree (DualityMismatch otherwise), and both have dimension
dim A_n.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Any, Iterable, Sequence

from .errors import DualityMismatch, InternalError, ValidationError
from .holonomy import TVec, Word, holonomy_degree, letter, relation_generators, t_add, t_mul
from .lattice import IntersectionLattice
from .linalg import SparseSpace, inverse, same_span, sparse_add, sparse_nullspace

BVec = dict  # Word over letters != H0 -> scalar


def default_h0(L: IntersectionLattice) -> int:
    """The last hyperplane is used as H0 unless a chart prescribes beta(V*)."""
    return len(L.A) - 1


def bar_letters(L: IntersectionLattice, h0: int) -> list[int]:
    return [h for h in range(len(L.A)) if h != h0]


# ---------------------------------------------------------------------------
# the dual route
# ---------------------------------------------------------------------------
def _rewrite_letter(h: int, h0: int, letters: Sequence[int]) -> TVec:
    """t_h in the basis t_K (K != h0) of T_1 / <sum t>."""
    if h != h0:
        return letter(h)
    return {(k,): Fraction(-1) for k in letters}


def _rewrite(v: TVec, h0: int, letters: Sequence[int]) -> TVec:
    out: TVec = {}
    for w, c in v.items():
        img: TVec = {(): Fraction(1)}
        for h in w:
            img = t_mul(img, _rewrite_letter(h, h0, letters))
        out = t_add(out, img, c)
    return out


def reduced_relations(L: IntersectionLattice, n: int, h0: int) -> SparseSpace:
    """The image of R_n in (T_1 / <sum t>)^{(x) n}, over words avoiding h0."""
    letters = bar_letters(L, h0)
    _, quad = relation_generators(L)
    quad = [_rewrite(r, h0, letters) for r in quad]
    space = SparseSpace()
    for r in quad:
        for k in range(n - 1):
            for u in product(letters, repeat=k):
                for v in product(letters, repeat=n - 2 - k):
                    space.add(t_mul(t_mul({u: Fraction(1)}, r), {v: Fraction(1)}))
    return space


def _nullspace_words(rows: Iterable[dict], all_words: list[Word]) -> list[BVec]:
    idx = {w: i for i, w in enumerate(all_words)}
    int_rows = [{idx[w]: c for w, c in r.items()} for r in rows]
    return [{all_words[i]: c for i, c in v.items()} for v in sparse_nullspace(int_rows, len(all_words))]


def bar_basis_dual(L: IntersectionLattice, n: int, h0: int | None = None) -> list[BVec]:
    """Basis of the annihilator of R_n: functionals sum c_w omega_w vanishing on R_n."""
    h0 = default_h0(L) if h0 is None else h0
    letters = bar_letters(L, h0)
    all_words = list(product(letters, repeat=n))
    if n <= 1:
        return [{w: Fraction(1)} for w in all_words]
    R = reduced_relations(L, n, h0)
    return _nullspace_words(R.basis(), all_words)


# ---------------------------------------------------------------------------
# the kernel route (Orlik-Solomon degree 2)
# ---------------------------------------------------------------------------
class OS2:
    """Degree-2 Orlik-Solomon space: Lambda^2 on e_H modulo Arnold relations."""

    def __init__(self, L: IntersectionLattice) -> None:
        self.L = L
        self.rel = SparseSpace()
        for X in L.of_dim(2):
            for a, b, c in combinations(sorted(L.hyps[X]), 3):
                # d(e_a e_b e_c) = e_b e_c - e_a e_c + e_a e_b
                self.rel.add({(b, c): Fraction(1), (a, c): Fraction(-1), (a, b): Fraction(1)})

    def wedge(self, u: dict[int, Any], v: dict[int, Any]) -> dict:
        """Normal form of u ^ v for degree-1 elements u, v (dicts H -> coefficient)."""
        out: dict = {}
        for a, x in u.items():
            for b, y in v.items():
                if a == b:
                    continue
                key, sgn = ((a, b), 1) if a < b else ((b, a), -1)
                out = sparse_add(out, {key: Fraction(1)}, sgn * x * y)
        return self.rel.reduce(out)


def bar_basis_kernel(L: IntersectionLattice, n: int, h0: int | None = None, check: bool = True) -> list[BVec]:
    """B_n as the intersection of the kernels N_j, cross-checked against the dual route."""
    h0 = default_h0(L) if h0 is None else h0
    letters = bar_letters(L, h0)
    all_words = list(product(letters, repeat=n))
    if n <= 1:
        basis = [{w: Fraction(1)} for w in all_words]
    else:
        os2 = OS2(L)
        omega = {h: {h: Fraction(1), h0: Fraction(-1)} for h in letters}
        pair = {(a, b): os2.wedge(omega[a], omega[b]) for a in letters for b in letters}
        eqs: dict[tuple, dict] = {}
        for w in all_words:
            for j in range(n - 1):
                for key, c in pair[(w[j], w[j + 1])].items():
                    e = (j, w[:j], key, w[j + 2:])
                    eqs.setdefault(e, {})[w] = c
        basis = _nullspace_words(eqs.values(), all_words)
    if check:
        dual = bar_basis_dual(L, n, h0)
        if not same_span(basis, dual):
            raise DualityMismatch("kernel and annihilator descriptions of B_n differ", n=n)
        if len(basis) != holonomy_degree(L, n).dim:
            raise DualityMismatch("dim B_n differs from dim A_n", n=n)
    return basis


def in_bar(L: IntersectionLattice, x: BVec, h0: int | None = None) -> bool:
    """Membership certificate: every adjacent wedge of x vanishes in OS^2."""
    h0 = default_h0(L) if h0 is None else h0
    if not x:
        return True
    n = len(next(iter(x)))
    if any(len(w) != n for w in x) or any(h0 in w for w in x):
        raise ValidationError("bar element must be homogeneous and avoid the letter H0")
    if n <= 1:
        return True
    os2 = OS2(L)
    acc: dict = {}
    for w, c in x.items():
        for j in range(n - 1):
            wedge = os2.wedge({w[j]: Fraction(1), h0: Fraction(-1)}, {w[j + 1]: Fraction(1), h0: Fraction(-1)})
            for key, d in wedge.items():
                e = (j, w[:j], key, w[j + 2:])
                nv = acc.get(e, 0) + c * d
                if nv:
                    acc[e] = nv
                else:
                    acc.pop(e, None)
    return not acc


# ---------------------------------------------------------------------------
# Hopf structure
# ---------------------------------------------------------------------------
def _shuffle_words(u: Word, v: Word) -> dict[Word, int]:
    if not u:
        return {v: 1}
    if not v:
        return {u: 1}
    out: dict[Word, int] = {}
    for w, c in _shuffle_words(u[1:], v).items():
        k = (u[0],) + w
        out[k] = out.get(k, 0) + c
    for w, c in _shuffle_words(u, v[1:]).items():
        k = (v[0],) + w
        out[k] = out.get(k, 0) + c
    return out


def shuffle(x: BVec, y: BVec) -> BVec:
    """Shuffle product, extended bilinearly."""
    out: BVec = {}
    for u, a in x.items():
        for v, b in y.items():
            for w, m in _shuffle_words(u, v).items():
                out = sparse_add(out, {w: Fraction(1)}, a * b * m)
    return out


def deconcat(x: BVec) -> dict[tuple[Word, Word], Any]:
    """Deconcatenation coproduct: [w1|...|wn] -> sum_k [w1..wk] (x) [wk+1..wn]."""
    out: dict[tuple[Word, Word], Any] = {}
    for w, c in x.items():
        for k in range(len(w) + 1):
            key = (w[:k], w[k:])
            nv = out.get(key, 0) + c
            if nv:
                out[key] = nv
            else:
                out.pop(key, None)
    return out


def counit(x: BVec) -> Any:
    return x.get((), 0)


def antipode(x: BVec) -> BVec:
    """S[w1|...|wn] = (-1)^n [wn|...|w1]."""
    out: BVec = {}
    for w, c in x.items():
        out = sparse_add(out, {tuple(reversed(w)): Fraction(1)}, c * (-1) ** len(w))
    return out


def _pair_word(w: Word, v: Word, h0: int) -> int:
    """<omega_w, t_v> with <omega_H, t_K> = delta_HK - delta_{H0,K}."""
    val = 1
    for a, b in zip(w, v):
        if b == h0:
            val = -val
        elif a != b:
            return 0
    return val


def pair(x: BVec, v: TVec, h0: int) -> Any:
    total: Any = Fraction(0)
    for w, c in x.items():
        for u, d in v.items():
            p = _pair_word(w, u, h0)
            if p:
                total = total + c * d * p
    return total


# ---------------------------------------------------------------------------
# the tautological solution L = sum_n sum_i b_i (x) a_i
# ---------------------------------------------------------------------------
@dataclass
class TruncatedSolution:
    """L_n in B_n (x) A_n for n <= N, stored as {(bar word, standard word): coefficient}."""

    L: IntersectionLattice
    h0: int
    N: int
    parts: dict[int, dict[tuple[Word, Word], Any]] = field(default_factory=dict)
    bases: dict[int, list[BVec]] = field(default_factory=dict)
    checks: dict[str, bool] = field(default_factory=dict)

    def coefficient_count(self, n: int) -> int:
        return len(self.bases[n])


def _dual_pair(L: IntersectionLattice, n: int, h0: int, basis: list[BVec]) -> list[TVec]:
    """Elements a_i of A_n (normal forms) with <b_k, a_i> = delta_ki."""
    H = holonomy_degree(L, n)
    std = H.standard
    P = [[pair(b, {s: Fraction(1)}, h0) for s in std] for b in basis]
    if len(P) != len(std):
        raise DualityMismatch("bar basis and A_n have different sizes", n=n)
    if not P:
        return []
    Pinv = inverse(P)
    out = []
    for i in range(len(basis)):
        out.append({s: Pinv[j][i] for j, s in enumerate(std) if Pinv[j][i]})
    return out


def _tensor(basis: list[BVec], duals: list[TVec]) -> dict[tuple[Word, Word], Any]:
    out: dict[tuple[Word, Word], Any] = {}
    for b, a in zip(basis, duals):
        for w, c in b.items():
            for s, d in a.items():
                key = (w, s)
                nv = out.get(key, 0) + c * d
                if nv:
                    out[key] = nv
                else:
                    out.pop(key, None)
    return out


def truncated_solution(L: IntersectionLattice, N: int, h0: int | None = None) -> TruncatedSolution:
    """Build L_0..L_N and verify dL_n = Omega L_{n-1} and Delta L = L (x) L exactly."""
    h0 = default_h0(L) if h0 is None else h0
    letters = bar_letters(L, h0)
    sol = TruncatedSolution(L, h0, N)
    for n in range(N + 1):
        basis = bar_basis_kernel(L, n, h0) if n else [{(): Fraction(1)}]
        duals = _dual_pair(L, n, h0, basis) if n else [{(): Fraction(1)}]
        sol.bases[n] = basis
        sol.parts[n] = _tensor(basis, duals)
    # the tautological element is sum_w omega_w (x) [t_w] over words w avoiding h0
    for n in range(1, N + 1):
        H = holonomy_degree(L, n)
        taut: dict[tuple[Word, Word], Any] = {}
        for w in product(letters, repeat=n):
            for s, c in H.normal_form({w: Fraction(1)}).items():
                taut[(w, s)] = c
        if taut != sol.parts[n]:
            raise InternalError("L_n differs from the tautological element", n=n)
    ok_d = all(_check_dL(sol, n) for n in range(1, N + 1))
    ok_delta = all(_check_coproduct(sol, n) for n in range(N + 1))
    sol.checks = {"dL=Omega*L": ok_d, "Delta(L)=L(x)L": ok_delta}
    if not (ok_d and ok_delta):
        raise InternalError("holonomy solution identities fail", **sol.checks)
    return sol


def _accumulate(acc: dict, key: Any, c: Any) -> None:
    nv = acc.get(key, 0) + c
    if nv:
        acc[key] = nv
    else:
        acc.pop(key, None)


def _check_dL(sol: TruncatedSolution, n: int) -> bool:
    """d[w1|...|wn] = omega_w1 (x) [w2|...|wn]; Omega = sum_{H != H0} omega_H (x) t_H."""
    H = holonomy_degree(sol.L, n)
    lhs: dict = {}
    for (w, s), c in sol.parts[n].items():
        _accumulate(lhs, (w[0], w[1:], s), c)
    rhs: dict = {}
    for (w, s), c in sol.parts[n - 1].items():
        for h in bar_letters(sol.L, sol.h0):
            for s2, d in H.normal_form({(h,) + s: Fraction(1)}).items():
                _accumulate(rhs, (h, w, s2), c * d)
    return lhs == rhs


def _check_coproduct(sol: TruncatedSolution, n: int) -> bool:
    H = holonomy_degree(sol.L, n)
    for p in range(n + 1):
        lhs: dict = {}
        for (w, s), c in sol.parts[n].items():
            _accumulate(lhs, (w[:p], w[p:], s), c)
        rhs: dict = {}
        for (w1, s1), c1 in sol.parts[p].items():
            for (w2, s2), c2 in sol.parts[n - p].items():
                for s, d in H.normal_form({s1 + s2: Fraction(1)}).items():
                    _accumulate(rhs, (w1, w2, s), c1 * c2 * d)
        if lhs != rhs:
            return False
    return True


def format_word(w: Word, names: Sequence[str] | None = None) -> str:
    if not w:
        return "[]"
    return "[" + "|".join(names[h] if names else "w%d" % h for h in w) + "]"
