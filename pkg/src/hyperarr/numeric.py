"""Numeric iterated integrals on the projective line minus finitely many points.

Letters are the finite points a of the arrangement, with omega_a = dz / (z - a)
(the point at infinity plays the role of H0).  For a path gamma,

    I_gamma(w_1 ... w_n) = int_{0 < t_1 < ... < t_n < 1} omega_{w_1}(t_1) ... omega_{w_n}(t_n),

so the first letter is integrated first, at the start of the path.  Paths are
polylines, cut into straight steps shorter than 0.4 times the distance to the
nearest singular point; on each step all words are computed from truncated
power series and the steps are glued by Chen's formula.

Tangential basepoints are handled exactly: in a local coordinate s at a
singular point, every letter is res/s + (power series), and the regularized
iterated integrals from s = 0 (log s set to zero) are series in s and log s.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from itertools import product
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from .arrangement import Arrangement
from .errors import FitUnstable, PathTooCloseToSingularity, TruncationTooLarge, ValidationError
from .field import embed_numeric

Word = tuple[int, ...]

STEP_RATIO = 0.4
SERIES_TAIL = 1e-14
MAX_WORDS = 200_000
MAX_WEIGHT = 12
MAX_ORDER = 2000


# ---------------------------------------------------------------------------
# letters and series
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class TangentialBasepoint:
    """A singular point (complex, or 'inf') with a nonzero tangent vector.

    The vector points into the path: near a finite point the path is
    a + s * direction, near infinity it is 1 / (s * direction), for small s > 0.
    The regularized value of int dlog(z - a) from this basepoint to z is
    log((z - a) / direction).
    """

    point: Any
    direction: complex = 1.0

    @property
    def at_infinity(self) -> bool:
        return isinstance(self.point, str)

    def local_point(self, s: float) -> complex:
        if self.at_infinity:
            return 1 / (s * complex(self.direction))
        return complex(self.point) + s * complex(self.direction)


@dataclass
class Letters:
    """Finite singular points, labelled by hyperplane index."""

    labels: list[int]
    points: list[complex]

    @classmethod
    def of(cls, A: Arrangement | Mapping[int, complex] | Sequence[complex]) -> "Letters":
        if isinstance(A, Arrangement):
            if A.dim != 2:
                raise ValidationError("expected a 1-dimensional (projective line) arrangement", dim=A.dim)
            labels, pts = [], []
            for h, (c0, c1) in enumerate(A.covectors):
                if c0 != 0:
                    labels.append(h)
                    pts.append(-embed_numeric(c1) / embed_numeric(c0))
            return cls(labels, pts)
        if isinstance(A, Mapping):
            return cls(list(A), [complex(v) for v in A.values()])
        return cls(list(range(len(A))), [complex(v) for v in A])

    def __len__(self) -> int:
        return len(self.labels)

    def index_of_point(self, p: complex, tol: float = 1e-12) -> int | None:
        for i, a in enumerate(self.points):
            if abs(a - p) <= tol:
                return i
        return None


def all_words(k: int, N: int) -> list[Word]:
    """All words of length <= N over letters 0..k-1, by length then lexicographically."""
    count = sum(k ** n for n in range(N + 1))
    if N > MAX_WEIGHT or count > MAX_WORDS:
        raise TruncationTooLarge("too many words", weight=N, letters=k, words=count)
    out: list[Word] = []
    for n in range(N + 1):
        out.extend(product(range(k), repeat=n))
    return out


@dataclass
class NumericSeries:
    """Truncated series sum_w c_w [w]; words use letter positions 0..k-1."""

    N: int
    letters: Letters
    coeffs: dict[Word, complex] = field(default_factory=dict)

    def __getitem__(self, w: Sequence[int]) -> complex:
        return self.coeffs.get(tuple(w), 0j)

    def labelled(self, w: Sequence[int]) -> complex:
        """Coefficient of a word given by hyperplane labels."""
        pos = {h: i for i, h in enumerate(self.letters.labels)}
        return self[tuple(pos[h] for h in w)]

    def concat(self, other: "NumericSeries") -> "NumericSeries":
        """Chen product: the series of the path self followed by other."""
        N = min(self.N, other.N)
        out = {}
        for w in all_words(len(self.letters), N):
            out[w] = sum((self[w[:j]] * other[w[j:]] for j in range(len(w) + 1)), 0j)
        return NumericSeries(N, self.letters, out)

    def reversed_path(self) -> "NumericSeries":
        """Series of the reversed path: (-1)^n times the reversed word."""
        return NumericSeries(self.N, self.letters, {w: (-1) ** len(w) * self[w[::-1]] for w in self.coeffs})

    def max_diff(self, other: "NumericSeries") -> float:
        return max((abs(self[w] - other[w]) for w in set(self.coeffs) | set(other.coeffs)), default=0.0)

    def shuffle_defect(self, max_weight: int | None = None) -> float:
        """max |I(u) I(v) - sum I(u sh v)| over words with |u| + |v| <= max_weight."""
        from .bar import _shuffle_words

        M = self.N if max_weight is None else min(max_weight, self.N)
        words = all_words(len(self.letters), M)
        worst = 0.0
        for u in words:
            for v in words:
                if not u or not v or len(u) + len(v) > M:
                    continue
                s = sum((m * self[w] for w, m in _shuffle_words(u, v).items()), 0j)
                worst = max(worst, abs(self[u] * self[v] - s))
        return worst

    def to_json(self, digits: int = 12) -> dict[str, list[float]]:
        def r(x: float) -> float:
            return float("%.*g" % (digits, x)) + 0.0

        out = {}
        for w in sorted(self.coeffs, key=lambda w: (len(w), w)):
            key = "|".join(str(self.letters.labels[i]) for i in w) or "1"
            c = self.coeffs[w]
            out[key] = [r(c.real), r(c.imag)]
        return out


def identity_series(letters: Letters, N: int) -> NumericSeries:
    return NumericSeries(N, letters, {w: (1 + 0j if not w else 0j) for w in all_words(len(letters), N)})


# ---------------------------------------------------------------------------
# one straight step
# ---------------------------------------------------------------------------
def _series_order(rho: float, N: int) -> int:
    """Smallest M with rho^M (M+1)^N below the per-step tail target."""
    M = 8
    while M < MAX_ORDER and rho ** M * (M + 1) ** N >= SERIES_TAIL * 1e-2:
        M += 4
    return M


def step_series(letters: Letters, N: int, p: complex, q: complex) -> NumericSeries:
    """Iterated integrals along the straight segment p -> q (within the convergence disc)."""
    h = q - p
    k = len(letters)
    if h == 0:
        return identity_series(letters, N)
    C = [(a - p) / h for a in letters.points]
    rho = max((1 / abs(c) for c in C), default=0.0)
    if rho >= 1:
        raise PathTooCloseToSingularity("step leaves the convergence disc", start=str(p), end=str(q))
    M = _series_order(rho, N)
    ks = np.arange(M + 1)
    # omega_x = d sigma / (sigma - C) = -sum_k C^(-k-1) sigma^k d sigma, sigma in [0, 1]
    forms = [-(1 / c) ** (ks + 1) for c in C]
    inv = 1.0 / (ks + 1)
    series: dict[Word, np.ndarray] = {(): np.eye(1, M + 1, 0, dtype=complex)[0]}
    out: dict[Word, complex] = {(): 1 + 0j}
    frontier: list[Word] = [()]
    for _ in range(N):
        nxt = []
        for w in frontier:
            base = series[w]
            for x in range(k):
                prod = np.convolve(base, forms[x])[:M]
                new = np.zeros(M + 1, dtype=complex)
                new[1:] = prod * inv[:M]
                tail = abs(new[-1]) / max(1e-300, 1 - rho)
                if tail > SERIES_TAIL:
                    raise TruncationTooLarge("power series did not converge to the tail target", tail=tail)
                series[w + (x,)] = new
                out[w + (x,)] = complex(new.sum())
                nxt.append(w + (x,))
        frontier = nxt
    return NumericSeries(N, letters, out)


# ---------------------------------------------------------------------------
# paths
# ---------------------------------------------------------------------------
def _segment_distance(p: complex, q: complex, a: complex) -> float:
    d = q - p
    if d == 0:
        return abs(a - p)
    t = ((a - p) * d.conjugate()).real / abs(d) ** 2
    t = min(1.0, max(0.0, t))
    return abs(p + t * d - a)


def subdivide(letters: Letters, path: Sequence[complex], clearance: float = 1e-6) -> list[complex]:
    """Points along the polyline with each step < 0.4 x distance to the nearest singularity."""
    pts = [complex(z) for z in path]
    if len(pts) < 2:
        return pts
    for p, q in zip(pts, pts[1:]):
        for a in letters.points:
            if _segment_distance(p, q, a) < clearance:
                raise PathTooCloseToSingularity("path passes too close to a singular point", point=str(a))
    out = [pts[0]]
    for p, q in zip(pts, pts[1:]):
        z = p
        for _ in range(100_000):
            if z == q:
                break
            d = min((abs(z - a) for a in letters.points), default=math.inf)
            step = STEP_RATIO * 0.95 * d
            if abs(q - z) <= step:
                z = q
            else:
                z = z + (q - z) / abs(q - z) * step
            out.append(z)
        else:  # pragma: no cover - the step count grows only logarithmically
            raise PathTooCloseToSingularity("too many steps")
    return out


def eval_iterated_integrals(A: Any, N: int, path: Sequence[complex], clearance: float = 1e-6) -> NumericSeries:
    """All iterated integrals of weight <= N along a polyline avoiding the singular points."""
    letters = A if isinstance(A, Letters) else Letters.of(A)
    all_words(len(letters), N)
    pts = subdivide(letters, path, clearance)
    result = identity_series(letters, N)
    for p, q in zip(pts, pts[1:]):
        result = result.concat(step_series(letters, N, p, q))
    return result


# ---------------------------------------------------------------------------
# tangential basepoints: exact local log-series
# ---------------------------------------------------------------------------
def _local_forms(letters: Letters, base: TangentialBasepoint, M: int) -> tuple[list[float], list[np.ndarray], float]:
    """Residues, power-series parts and convergence radius of the letters in the
    local coordinate s at the basepoint."""
    v = complex(base.direction)
    ks = np.arange(M + 1)
    res, ana = [], []
    radius = math.inf
    if base.at_infinity:
        # z = 1/(s v): dlog(z - b) = -ds/s + dlog(1 - b v s)
        for b in letters.points:
            res.append(-1.0)
            c = b * v
            ana.append(-c * c ** ks if c != 0 else np.zeros(M + 1, dtype=complex))
            if c != 0:
                radius = min(radius, 1 / abs(c))
    else:
        a = complex(base.point)
        hit = letters.index_of_point(a)
        if hit is None:
            raise ValidationError("tangential basepoint must sit at a singular point", point=str(a))
        for i, b in enumerate(letters.points):
            if i == hit:
                res.append(1.0)
                ana.append(np.zeros(M + 1, dtype=complex))
            else:
                C = (b - a) / v
                res.append(0.0)
                ana.append(-(1 / C) ** (ks + 1))
                radius = min(radius, abs(C))
    return res, ana, radius


def _integrate_log_series(c: np.ndarray) -> np.ndarray:
    """Antiderivative of sum c[j, n] s^(n-1) (log s)^j ds with zero regularized value at 0.

    Column n = 0 holds the ds/s terms: (log s)^j ds / s -> (log s)^(j+1) / (j+1).
    For n >= 1: int s^(n-1) (log s)^j = s^n sum_i (-1)^(j-i) j!/i! (log s)^i / n^(j-i+1).
    """
    J, M1 = c.shape
    out = np.zeros((J + 1, M1), dtype=complex)
    for j in range(J):
        out[j + 1, 0] += c[j, 0] / (j + 1)
    n = np.arange(1, M1, dtype=float)
    for j in range(J):
        row = c[j, 1:]
        if not row.any():
            continue
        for i in range(j + 1):
            coef = (-1) ** (j - i) * math.factorial(j) / math.factorial(i)
            out[i, 1:] += coef * row / n ** (j - i + 1)
    return out


def tangential_series(letters: Letters, N: int, base: TangentialBasepoint, r: float | None = None) -> tuple[NumericSeries, complex, float]:
    """Regularized iterated integrals from the tangential basepoint to the point at s = r.

    Returns (series, endpoint in z, r).
    """
    _, _, radius = _local_forms(letters, base, 4)
    if r is None:
        r = STEP_RATIO * radius if math.isfinite(radius) else 1.0
    rho = r / radius if math.isfinite(radius) else 0.0
    if rho >= 1:
        raise PathTooCloseToSingularity("local ray leaves the convergence disc", r=r)
    M = _series_order(max(rho, 1e-3), N + 2) + 8
    res, ana, _ = _local_forms(letters, base, M)
    k = len(letters)
    # J_w as arrays [log power j, s power m]
    series: dict[Word, np.ndarray] = {(): np.zeros((1, M + 1), dtype=complex)}
    series[()][0, 0] = 1.0
    logr = math.log(r)
    powers = r ** np.arange(M + 1)

    def value(arr: np.ndarray) -> complex:
        return complex(sum((arr[j] * powers).sum() * logr ** j for j in range(arr.shape[0])))

    out: dict[Word, complex] = {(): 1 + 0j}
    frontier: list[Word] = [()]
    for _ in range(N):
        nxt = []
        for w in frontier:
            base_arr = series[w]
            J = base_arr.shape[0]
            for x in range(k):
                # integrand coefficients of s^(n-1) (log s)^j: column n
                integrand = np.zeros((J, M + 1), dtype=complex)
                integrand += res[x] * base_arr  # res * s^m / s -> column m
                for j in range(J):
                    conv = np.convolve(base_arr[j], ana[x])[:M]  # s^(m+k) -> column m+k+1
                    integrand[j, 1:] += conv
                new = _integrate_log_series(integrand)
                series[w + (x,)] = new
                out[w + (x,)] = value(new)
                nxt.append(w + (x,))
        frontier = nxt
    return NumericSeries(N, letters, out), base.local_point(r), r


def regularized_series(
    A: Any,
    N: int,
    a: TangentialBasepoint,
    b: TangentialBasepoint | complex,
    via: Sequence[complex] = (),
    clearance: float = 1e-6,
) -> NumericSeries:
    """Reg of the iterated integrals from the tangential basepoint a to b.

    b is an ordinary point or another tangential basepoint (whose vector points
    back into the path).  The path runs along the tangent ray at a, then through
    the waypoints ``via``, then along the tangent ray at b.
    """
    letters = A if isinstance(A, Letters) else Letters.of(A)
    all_words(len(letters), N)
    start, za, _ = tangential_series(letters, N, a)
    if isinstance(b, TangentialBasepoint):
        end, zb, _ = tangential_series(letters, N, b)
        end = end.reversed_path()
    else:
        zb = complex(b)
        end = identity_series(letters, N)
    middle = eval_iterated_integrals(letters, N, [za, *via, zb], clearance)
    return start.concat(middle).concat(end)


def regularized_series_ladder(
    A: Any,
    N: int,
    a: TangentialBasepoint,
    b: complex,
    via: Sequence[complex] = (),
    exponents: Iterable[int] = range(8, 17),
    max_condition: float = 1e12,
) -> NumericSeries:
    """Cross-check of Reg by sampling eps on a geometric ladder.

    Each coefficient of I(a + eps v -> b) is fitted as P(log eps) + eps Q(log eps)
    with deg P, deg Q <= weight, by least squares; the constant term of P is returned.
    """
    letters = A if isinstance(A, Letters) else Letters.of(A)
    if a.at_infinity:
        raise ValidationError("the ladder cross-check needs a finite basepoint")
    eps = [2.0 ** -e for e in exponents]
    samples = [eval_iterated_integrals(letters, N, [a.local_point(e), *via, b]) for e in eps]
    out: dict[Word, complex] = {}
    for w in all_words(len(letters), N):
        n = len(w)
        if n == 0:
            out[w] = 1 + 0j
            continue
        L = np.log(eps)
        cols = [L ** j for j in range(n + 1)] + [np.array(eps) * L ** j for j in range(n + 1)]
        X = np.stack(cols, axis=1)
        scale = np.abs(X).max(axis=0)
        Xs = X / scale
        cond = np.linalg.cond(Xs)
        if not np.isfinite(cond) or cond > max_condition:
            raise FitUnstable("log-Vandermonde system is ill-conditioned", condition=float(cond), word=list(w))
        y = np.array([s[w] for s in samples])
        coef, *_ = np.linalg.lstsq(Xs.astype(complex), y, rcond=None)
        out[w] = complex(coef[0] / scale[0])
    return NumericSeries(N, letters, out)


# ---------------------------------------------------------------------------
# associators on the line
# ---------------------------------------------------------------------------
def associator_1d(
    A: Any,
    a: TangentialBasepoint,
    b: TangentialBasepoint,
    N: int,
    via: Sequence[complex] = (),
) -> NumericSeries:
    """G(a, b): the regularized series of the path from a to b (both tangential).

    G(a, b) G(b, c) = G(a, c) when the paths compose to a homotopic path and the
    tangent vectors at b agree.
    """
    if N > 4:
        raise TruncationTooLarge("associators are computed up to weight 4", weight=N)
    return regularized_series(A, N, a, b, via)


def default_tangent(p: Any, q: Any) -> TangentialBasepoint:
    """Tangent at p pointing along the straight line towards q (both finite)."""
    d = complex(q) - complex(p)
    return TangentialBasepoint(complex(p), d / abs(d))


def p1_standard_associators(N: int) -> dict[str, NumericSeries]:
    """G(0,1), G(0,inf), G(inf,1) on the line minus {0, 1, inf}.

    Tangents: +1 at 0, -1 at 1, and at infinity the ray z = i R (vector -i in
    the coordinate 1/z).  G(0,inf) runs up to 2.5i, G(inf,1) comes back from 2.5i.
    """
    letters = Letters([0, 1], [0j, 1 + 0j])
    t0 = TangentialBasepoint(0j, 1 + 0j)
    t1 = TangentialBasepoint(1 + 0j, -1 + 0j)
    tinf = TangentialBasepoint("inf", -1j)
    return {
        "G(0,1)": associator_1d(letters, t0, t1, N),
        "G(0,inf)": associator_1d(letters, t0, tinf, N),
        "G(inf,1)": associator_1d(letters, tinf, t1, N),
    }


def complex_log_check(a: complex, p: complex, q: complex) -> complex:
    """Closed form of the weight-one word omega_a along a straight segment p -> q."""
    return cmath.log((q - a) / (p - a))
