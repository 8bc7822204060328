"""Exact Gaussian elimination over Q or Q(zeta_q).

Dense routines operate on lists of rows whose entries are exact scalars
(:class:`fractions.Fraction` or :class:`~hyperarr.field.Cyclotomic`).
:class:`SparseSpace` is an incremental echelon basis of sparse rational vectors,
used for the (large but very sparse) tensor spaces of the holonomy algebra and
the bar complex.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Any, Iterable, Sequence

Row = list
Matrix = list


def rref(rows: Sequence[Sequence[Any]], ncols: int | None = None) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    m = [list(r) for r in rows]
    if ncols is None:
        ncols = len(m[0]) if m else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        lead = m[r][c]
        if lead != 1:
            inv = 1 / lead
            m[r] = [x * inv for x in m[r]]
        pr = m[r]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], pr)]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows: Sequence[Sequence[Any]]) -> int:
    return len(rref(rows)[0]) if rows else 0


def nullspace(rows: Sequence[Sequence[Any]], ncols: int, zero: Any = Fraction(0), one: Any = Fraction(1)) -> Matrix:
    """Basis of {v : rows . v = 0}, one vector per free column."""
    red, pivots = rref(rows, ncols) if rows else ([], [])
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [zero] * ncols
        v[f] = one
        for row, p in zip(red, pivots):
            v[p] = -row[f]
        basis.append(v)
    return basis


def solve_in_span(basis: Sequence[Sequence[Any]], v: Sequence[Any]) -> list | None:
    """Coefficients c with sum c_i basis_i == v, or None.  ``basis`` must be independent."""
    k = len(basis)
    n = len(v)
    if k == 0:
        return [] if all(x == 0 for x in v) else None
    # columns = basis vectors; augmented system
    aug = [[basis[i][j] for i in range(k)] + [v[j]] for j in range(n)]
    red, pivots = rref(aug, k + 1)
    if k in pivots:
        return None
    sol = [0 * v[0]] * k if n else [Fraction(0)] * k
    for row, p in zip(red, pivots):
        sol[p] = row[k]
    return sol


def inverse(mat: Sequence[Sequence[Any]], one: Any = Fraction(1), zero: Any = Fraction(0)) -> Matrix:
    n = len(mat)
    aug = [list(mat[i]) + [one if i == j else zero for j in range(n)] for i in range(n)]
    red, pivots = rref(aug, 2 * n)
    if pivots[:n] != list(range(n)) or len(red) < n:
        raise ValueError("matrix is singular")
    return [row[n:] for row in red]


def mat_vec(mat: Sequence[Sequence[Any]], v: Sequence[Any]) -> list:
    return [sum((a * b for a, b in zip(row, v)), 0 * v[0] if v else 0) for row in mat]


def vec_mat(v: Sequence[Any], mat: Sequence[Sequence[Any]]) -> list:
    """Row vector times matrix: sum_i v_i * mat[i]."""
    ncols = len(mat[0]) if mat else 0
    out = [0 * v[0] if v else 0] * ncols
    for c, row in zip(v, mat):
        if c != 0:
            out = [a + c * b for a, b in zip(out, row)]
    return out


# ---------------------------------------------------------------------------
# sparse rational vectors
# ---------------------------------------------------------------------------
SparseVec = dict  # column -> nonzero Fraction


def sparse_add(a: SparseVec, b: SparseVec, scale: Any = 1) -> SparseVec:
    out = dict(a)
    for k, v in b.items():
        nv = out.get(k, 0) + scale * v
        if nv:
            out[k] = nv
        else:
            out.pop(k, None)
    return out


def sparse_scale(a: SparseVec, c: Any) -> SparseVec:
    if not c:
        return {}
    return {k: v * c for k, v in a.items()}


class SparseSpace:
    """Incrementally maintained fully reduced echelon basis of a subspace.

    ``reduce(v)`` returns the canonical normal form of ``v`` modulo the span,
    which is zero exactly when ``v`` lies in the span.
    """

    def __init__(self) -> None:
        self.rows: dict[int, SparseVec] = {}  # pivot column -> row (pivot coefficient 1)

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def pivots(self) -> set[int]:
        return set(self.rows)

    def reduce(self, v: SparseVec) -> SparseVec:
        v = {k: c for k, c in v.items() if c}
        # rows are fully reduced against each other, so one pass suffices
        hits = [k for k in v if k in self.rows]
        for k in hits:
            c = v.get(k)
            if c:
                v = sparse_add(v, self.rows[k], -c)
        return v

    def add(self, v: SparseVec) -> bool:
        """Insert ``v``; returns True if it enlarged the span."""
        v = self.reduce(v)
        if not v:
            return False
        p = min(v)
        c = v[p]
        if c != 1:
            v = {k: x / c for k, x in v.items()}
        for q, row in list(self.rows.items()):
            if p in row:
                self.rows[q] = sparse_add(row, v, -row[p])
        self.rows[p] = v
        return True

    def contains(self, v: SparseVec) -> bool:
        return not self.reduce(v)

    def basis(self) -> list[SparseVec]:
        return [self.rows[p] for p in sorted(self.rows)]


def sparse_nullspace(rows: Iterable[SparseVec], ncols: int) -> list[SparseVec]:
    """Basis of {x : <row, x> = 0 for every row}, returned as sparse vectors."""
    space = SparseSpace()
    for r in rows:
        space.add(r)
    out = []
    piv = space.rows
    for f in range(ncols):
        if f in piv:
            continue
        v = {f: Fraction(1)}
        for p, row in piv.items():
            c = row.get(f)
            if c:
                v[p] = -c
        out.append(v)
    return out


def sparse_rank(rows: Iterable[SparseVec]) -> int:
    space = SparseSpace()
    for r in rows:
        space.add(r)
    return len(space)


def same_span(a: Iterable[SparseVec], b: Iterable[SparseVec]) -> bool:
    sa, sb = SparseSpace(), SparseSpace()
    a, b = list(a), list(b)
    for v in a:
        sa.add(v)
    for v in b:
        sb.add(v)
    if len(sa) != len(sb):
        return False
    return all(sa.contains(v) for v in b)
