"""Command-line front end: every analysis as a subcommand printing JSON.

Exit codes: 0 on success, 2 on invalid input (an error object
``{code, message, context}`` is printed), 1 when an identity that must hold
fails (always a bug).
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

from .arrangement import BUILTINS, Arrangement, parse_builtin_spec
from .bar import bar_basis_dual, bar_basis_kernel, default_h0, truncated_solution
from .charts import make_chart, retraction_maps
from .errors import HyperArrError, InternalError, NotEnoughGModular, ValidationError
from .holonomy import holonomy_degree
from .lattice import BuildingSet, IntersectionLattice, build_lattice, full_building_set, irreducible_building_set
from .modularity import modularity_report, non_modularity_witnesses
from .mzv import mzv_with_bound
from .nested import adapted_bases, maximal_nested_sets
from .numeric import Letters, TangentialBasepoint, associator_1d, default_tangent, p1_standard_associators

MAX_BAR_WEIGHT = 5
DIGITS = 12


def _round(x: float) -> float:
    return float("%.*g" % (DIGITS, x)) + 0.0


# ---------------------------------------------------------------------------
# input
# ---------------------------------------------------------------------------
def load_arrangement(source: str) -> Arrangement:
    """A JSON file path or a builtin spec ``builtin:name:params``."""
    if source.startswith("builtin:"):
        return parse_builtin_spec(source)
    path = Path(source)
    if not path.is_file():
        raise ValidationError("input is neither a file nor a builtin spec", input=source)
    try:
        data = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError("cannot read arrangement JSON", input=source, error=str(exc)) from exc
    if not isinstance(data, dict):
        raise ValidationError("arrangement JSON must be an object", input=source)
    return Arrangement.from_json(data)


def _building(L: IntersectionLattice, kind: str) -> BuildingSet:
    G = irreducible_building_set(L) if kind == "irreducible" else full_building_set(L)
    return G.with_top()


# ---------------------------------------------------------------------------
# summaries (analyze is the union of the first three)
# ---------------------------------------------------------------------------
def lattice_summary(A: Arrangement, L: IntersectionLattice, building: str = "irreducible") -> dict[str, Any]:
    G = _building(L, building)
    return {
        "arrangement": A.to_json(),
        "flats": [{"index": i, "flat": L.describe(i), "dim": L.dims[i]} for i in L],
        "covers": [[i, j] for i, j in L.covers],
        "irreducibles": irreducible_building_set(L).describe(),
        "building_set": {"kind": building, "elements": G.describe()},
    }


def modular_summary(A: Arrangement, L: IntersectionLattice) -> dict[str, Any]:
    report = modularity_report(L)
    witnesses: dict[str, list[dict[str, str]]] = {}
    for X in L:
        found = non_modularity_witnesses(L, X)
        if found:
            witnesses[L.describe(X)] = [{"with": L.describe(Y), "intersection": F.describe()} for Y, F in found]
    chain = report.supersolvable_chain
    return {
        "arrangement": A.to_json(),
        "modular_by_codim": {str(c): [L.describe(M) for M in ms] for c, ms in sorted(report.modular_by_codim.items())},
        "g_modular": [L.describe(M) for M in report.g_modular],
        "has_enough_modular": report.has_enough_modular,
        "has_enough_g_modular": report.has_enough_g_modular,
        "is_supersolvable": chain is not None,
        "supersolvable_chain": [L.describe(M) for M in chain] if chain is not None else None,
        "unavoidable_hyperplanes": {
            A.describe_hyperplane(h): [L.describe(M) for M in ms]
            for h, ms in sorted(report.unavoidable_hyperplanes.items())
        },
        "witnesses": witnesses,
    }


def nested_summary(A: Arrangement, L: IntersectionLattice, building: str = "irreducible") -> dict[str, Any]:
    G = _building(L, building)
    sets = maximal_nested_sets(G)
    return {
        "arrangement": A.to_json(),
        "building_set": {"kind": building, "elements": G.describe()},
        "maximal_nested_sets": [
            {"index": k, "flats": S.describe(), "adapted_bases": len(adapted_bases(S))} for k, S in enumerate(sets)
        ],
    }


def analyze(A: Arrangement, L: IntersectionLattice, building: str = "irreducible") -> dict[str, Any]:
    out: dict[str, Any] = {}
    for part in (lattice_summary(A, L, building), modular_summary(A, L), nested_summary(A, L, building)):
        for k, v in part.items():
            if k in out and out[k] != v:
                raise InternalError("summaries disagree on a shared field", field=k)
            out[k] = v
    return out


def charts_summary(A: Arrangement, L: IntersectionLattice, building: str, nested: int, basis: int) -> dict[str, Any]:
    G = _building(L, building)
    sets = maximal_nested_sets(G)
    if not 0 <= nested < len(sets):
        raise ValidationError("nested-set index out of range", index=nested, count=len(sets))
    S = sets[nested]
    bases = adapted_bases(S)
    if not 0 <= basis < len(bases):
        raise ValidationError("adapted-basis index out of range", index=basis, count=len(bases))
    chart = make_chart(S, bases[basis])
    out = {"arrangement": A.to_json(), "building_set": {"kind": building}, "chart": chart.to_json()}
    retractions: list[dict[str, Any]] = []
    for X in S:
        if X == L.top:
            continue
        try:
            retractions.append(retraction_maps(G, S, X).to_json())
        except NotEnoughGModular as exc:
            retractions.append({"X": L.describe(X), "error": exc.to_json()})
    out["retractions"] = retractions
    return out


def bar_summary(A: Arrangement, L: IntersectionLattice, weight: int) -> dict[str, Any]:
    h0 = default_h0(L)
    rows = []
    for n in range(1, weight + 1):
        dual = bar_basis_dual(L, n, h0)
        kernel = bar_basis_kernel(L, n, h0, check=True)  # raises unless the spans agree
        dim_a = holonomy_degree(L, n).dim
        rows.append({
            "n": n,
            "dim_A": dim_a,
            "dim_B_dual": len(dual),
            "dim_B_kernel": len(kernel),
            "duality": len(dual) == len(kernel) == dim_a,
        })
    sol = truncated_solution(L, weight, h0)
    return {
        "arrangement": A.to_json(),
        "h0": A.describe_hyperplane(h0),
        "weights": rows,
        "identities": dict(sol.checks),
    }


# ---------------------------------------------------------------------------
# numerics
# ---------------------------------------------------------------------------
def _parse_point(s: str) -> Any:
    s = s.strip()
    if s.lower() in ("inf", "oo", "infinity"):
        return "inf"
    try:
        return complex(s.replace("i", "j")) if ("i" in s or "j" in s) else Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValidationError("cannot parse point", point=s) from exc


def _point_str(p: Any) -> str:
    if isinstance(p, str):
        return p
    if isinstance(p, complex):
        return "%s%+si" % (_round(p.real), _round(p.imag)) if p.imag else str(_round(p.real))
    return str(p)


def assoc_summary(points: Sequence[Any], weight: int, start: Any | None, end: Any | None) -> dict[str, Any]:
    finite = [p for p in points if p != "inf"]
    if len(set(map(complex, finite))) != len(finite) or len(finite) < 1:
        raise ValidationError("need distinct finite points", points=[_point_str(p) for p in points])
    letters = Letters(list(range(len(finite))), [complex(p) for p in finite])
    start = finite[0] if start is None else start
    end = (finite[1] if len(finite) > 1 else "inf") if end is None else end
    if start == end:
        raise ValidationError("the endpoints must differ")
    for p in (start, end):
        if p != "inf" and letters.index_of_point(complex(p)) is None:
            raise ValidationError("endpoint is not one of the points", point=_point_str(p))

    # finite-to-finite paths are straight segments with tangents pointing along them;
    # infinity is approached along the ray z = i R (tangent -i in the coordinate 1/z)
    if start != "inf" and end != "inf":
        a, b = default_tangent(start, end), default_tangent(end, start)
    else:
        a = TangentialBasepoint("inf", -1j) if start == "inf" else TangentialBasepoint(complex(start), 1 + 0j)
        b = TangentialBasepoint("inf", -1j) if end == "inf" else TangentialBasepoint(complex(end), 1 + 0j)
    series = associator_1d(letters, a, b, weight)
    out: dict[str, Any] = {
        "weight": weight,
        "from": _point_str(start),
        "to": _point_str(end),
        "letters": {str(i): _point_str(p) for i, p in enumerate(finite)},
        "series": series.to_json(DIGITS),
    }
    if sorted(map(complex, finite), key=lambda z: (z.real, z.imag)) == [0j, 1 + 0j] and weight >= 2:
        std = p1_standard_associators(weight)
        out["composition_defect"] = _round(std["G(0,inf)"].concat(std["G(inf,1)"]).max_diff(std["G(0,1)"]))
    return out


def mzv_summary(index: Sequence[int]) -> dict[str, Any]:
    value, bound = mzv_with_bound(*index)
    return {"index": list(index), "weight": sum(index), "value": [_round(value), 0.0], "tail_bound": float("%.3g" % bound)}


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------
def _points_arg(s: str) -> list[Any]:
    return [_parse_point(p) for p in s.split(",") if p.strip()]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hyperarr", description="Invariants of hyperplane arrangements.")
    p.add_argument("--seed", type=int, default=0, help="seed for randomized checks (never affects results)")
    sub = p.add_subparsers(dest="command", required=True)

    def with_input(name: str, help_: str) -> argparse.ArgumentParser:
        q = sub.add_parser(name, help=help_)
        q.add_argument("input", help="arrangement JSON file or builtin:name:params")
        return q

    for name, help_ in (("analyze", "lattice, modularity and nested-set summary"),
                        ("lattice", "flats, cover relations, irreducibles, building set"),
                        ("nested", "maximal nested sets with adapted-basis counts")):
        q = with_input(name, help_)
        q.add_argument("--building", choices=("irreducible", "full"), default="irreducible")
    with_input("modular", "modular flats, witnesses and supersolvability")
    q = with_input("charts", "chart polynomials and retraction substitutions")
    q.add_argument("--building", choices=("irreducible", "full"), default="irreducible")
    q.add_argument("--nested", type=int, default=0, help="index of the maximal nested set (see 'nested')")
    q.add_argument("--basis", type=int, default=0, help="index of the adapted basis")
    q = with_input("bar", "bar construction dimensions and identities")
    q.add_argument("--weight", type=int, default=2)

    q = sub.add_parser("assoc", help="numerical associator on the projective line")
    src = q.add_mutually_exclusive_group()
    src.add_argument("--points", type=_points_arg, help="finite points, e.g. 0,1 (infinity is implicit)")
    src.add_argument("--arrangement", help="builtin:p1:0,1,inf or the short form p1-0-1-inf")
    q.add_argument("--weight", type=int, default=2)
    q.add_argument("--from", dest="start", type=_parse_point, default=None)
    q.add_argument("--to", dest="end", type=_parse_point, default=None)

    q = sub.add_parser("mzv", help="multiple zeta value with a tail bound")
    q.add_argument("index", type=int, nargs="+")

    sub.add_parser("builtin-list", help="catalog of builtin arrangements")
    return p


def _assoc_points(args: argparse.Namespace) -> list[Any]:
    if args.points is not None:
        return list(args.points)
    spec = args.arrangement or "p1-0-1-inf"
    if spec.startswith("builtin:"):
        spec = spec[len("builtin:"):]
    name, sep, rest = spec.partition(":")
    if not sep:
        name, _, rest = spec.partition("-")
        rest = rest.replace("-", ",")
    if name != "p1":
        raise ValidationError("associators are computed for projective-line arrangements", arrangement=spec)
    return _points_arg(rest)


def run(argv: Sequence[str] | None = None) -> tuple[int, Any]:
    """Parse and execute; returns (exit code, JSON-able result)."""
    args = build_parser().parse_args(argv)
    random.seed(args.seed)
    try:
        cmd = args.command
        if cmd == "builtin-list":
            return 0, dict(sorted(BUILTINS.items()))
        if cmd == "mzv":
            return 0, mzv_summary(args.index)
        if cmd == "assoc":
            if not 1 <= args.weight <= 4:
                raise ValidationError("weight must be between 1 and 4", weight=args.weight)
            return 0, assoc_summary(_assoc_points(args), args.weight, args.start, args.end)
        if cmd == "bar" and not 1 <= args.weight <= MAX_BAR_WEIGHT:
            raise ValidationError("weight must be between 1 and %d" % MAX_BAR_WEIGHT, weight=args.weight)
        A = load_arrangement(args.input)
        L = build_lattice(A)
        if cmd == "analyze":
            return 0, analyze(A, L, args.building)
        if cmd == "lattice":
            return 0, lattice_summary(A, L, args.building)
        if cmd == "nested":
            return 0, nested_summary(A, L, args.building)
        if cmd == "modular":
            return 0, modular_summary(A, L)
        if cmd == "charts":
            return 0, charts_summary(A, L, args.building, args.nested, args.basis)
        if cmd == "bar":
            return 0, bar_summary(A, L, args.weight)
        raise ValidationError("unknown subcommand", command=cmd)  # unreachable with argparse
    except ValidationError as exc:
        return 2, exc.to_json()
    except HyperArrError as exc:
        return 1, exc.to_json()
    except Exception as exc:  # noqa: BLE001 - any other failure is a bug
        return 1, {"code": "InternalError", "message": repr(exc), "context": {}}


def dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False)


def main(argv: Sequence[str] | None = None) -> int:
    code, result = run(argv)
    print(dumps(result))
    return code


if __name__ == "__main__":
    sys.exit(main())
