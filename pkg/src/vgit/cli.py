"""Command-line front end: ``vgit <command> [options]``.

Output is a plain table by default; ``--json`` switches to one JSON record
per line (see docs/records.md).  Exit codes: 0 success, 1 a ``--verify``
mismatch, 2 invalid input, 3 enumeration cap exceeded, 4 a generic
linearization was required but the point lies on a wall.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from .assignments import check_extremal, parse_assignment, realizability_search
from .curves import is_git_stable, parse_curve, z_contract, degree_assignment
from .lincore import (
    CapExceeded,
    Linearization,
    OnWallError,
    as_fraction,
    format_fraction,
    phi,
    require_generic,
    sigma,
)
from .models import boggi_params, hassett_embedding_degree, identify, model_key
from .trees import FCurvePartition, fcurve_sigma_sum, parse_tree
from .wallcross import classify_crossing
from .walls import (
    Wall,
    enumerate_walls,
    exclusive_witness,
    segment_scan,
    signature,
    symmetric_slice_walls,
    wall_witness,
)

SCHEMA_VERSION = 1


class Output:
    def __init__(self, as_json: bool, stream=None):
        self.as_json = as_json
        self.stream = stream or sys.stdout

    def record(self, kind: str, text: str, **fields) -> None:
        if self.as_json:
            payload = {"schema": SCHEMA_VERSION, "kind": kind}
            payload.update(fields)
            self.stream.write(json.dumps(payload, sort_keys=True, default=_jsonable) + "\n")
        else:
            self.stream.write(text + "\n")


def _jsonable(value):
    if isinstance(value, Fraction):
        return format_fraction(value)
    if isinstance(value, (set, frozenset)):
        return sorted(value)
    raise TypeError(f"cannot serialize {type(value).__name__}")


def _fr(q: Fraction) -> str:
    return format_fraction(q)


def _subset_arg(text: str) -> frozenset[int]:
    try:
        return frozenset(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated marks, got {text!r}") from None


def _rational_arg(text: str) -> Fraction:
    try:
        return as_fraction(text)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ValueError(f"cannot read {path}: {exc.strerror}") from None


def _load_lin(path: str) -> Linearization:
    try:
        return Linearization.loads(_read(path))
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: not a JSON linearization record ({exc.msg})") from None


def _load_weights(path: str) -> list[Fraction]:
    text = _read(path)
    try:
        items = json.loads(text)
        if isinstance(items, dict):
            items = items["weights"]
    except json.JSONDecodeError:
        items = text.split()
    if not all(isinstance(x, str) for x in items):
        raise ValueError("weights must be 'p/q' strings")
    return [as_fraction(x) for x in items]


def _lin_from_args(args) -> Linearization:
    if args.lin:
        return _load_lin(args.lin)
    if args.d is None or args.n is None or args.gamma is None:
        raise ValueError("give --lin FILE or --d, --n, --gamma with --symmetric")
    if not args.symmetric:
        raise ValueError("--gamma without --lin needs --symmetric")
    return Linearization.symmetric(args.d, args.n, args.gamma)


# -- commands ------------------------------------------------------------------------


def cmd_sigma(args, out: Output) -> int:
    L = _lin_from_args(args)
    if args.subset:
        subset = args.subset
    elif args.size is not None:
        subset = frozenset(range(1, args.size + 1))
    else:
        raise ValueError("give --size K or --subset i,j,...")
    if not subset <= set(range(1, L.n + 1)):
        raise ValueError(f"subset must lie in 1..{L.n}")
    s = sigma(subset, L)
    p = phi(subset, L)
    out.record("sigma", str(s), subset=sorted(subset), sigma=s, phi=_fr(p), gamma=_fr(L.gamma))
    return 0


def cmd_walls(args, out: Output) -> int:
    if args.symmetric:
        for gamma, pairs in symmetric_slice_walls(args.d, args.n):
            shown = " ".join(f"(|I|={s},k={k})" for s, k in pairs)
            out.record("slice-wall", f"{_fr(gamma):>10}  {shown}", gamma=_fr(gamma), walls=[list(p) for p in pairs])
        return 0
    for wall in enumerate_walls(args.d, args.n, args.cap):
        witness = wall_witness(wall)
        out.record(
            "wall",
            f"{{{','.join(map(str, sorted(wall.subset)))}}}  k={wall.k}  witness gamma={_fr(witness.gamma)}",
            subset=sorted(wall.subset),
            k=wall.k,
            witness_gamma=_fr(witness.gamma),
        )
    return 0


def cmd_scan(args, out: Output) -> int:
    L0, L1 = _load_lin(args.from_file), _load_lin(args.to_file)
    for crossing in segment_scan(L0, L1, args.cap):
        walls = [w.to_dict() | {"count": c} for w, c in zip(crossing.walls, crossing.counts)]
        shown = " ".join(f"{w}x{c}" for w, c in zip(crossing.walls, crossing.counts))
        out.record(
            "crossing",
            f"t={_fr(crossing.t)}  gamma={_fr(crossing.gamma)}  {shown}",
            t=_fr(crossing.t),
            gamma=_fr(crossing.gamma),
            walls=walls,
        )
    return 0


def cmd_signature(args, out: Output) -> int:
    L = _load_lin(args.lin)
    sig = signature(L, args.cap)
    if sig.symmetric:
        for size, value in enumerate(sig.by_size, start=1):
            out.record("sigma", f"|I|={size}  sigma={value}", size=size, sigma=value)
    else:
        for subset, value in sig.table:
            out.record("sigma", f"{{{','.join(map(str, sorted(subset)))}}}  sigma={value}", subset=sorted(subset), sigma=value)
    return 0


def cmd_classify_wall(args, out: Output) -> int:
    wall = Wall.make(args.subset, args.k, args.d, args.n)
    if args.witness:
        L = _load_lin(args.witness)
    else:
        L = exclusive_witness(wall, cap=args.cap)
    report = classify_crossing(wall, L, args.subset, args.cap)

    def blocks(w):
        return "none" if w is None else " + ".join("{" + ",".join(map(str, sorted(b))) + "}" for b in w)

    text = "\n".join(
        [
            f"wall {wall}  presented as I={{{','.join(map(str, sorted(args.subset)))}}}, k={report.k}",
            f"label: {report.label.value}",
            f"forward (phi(I) > k to phi(I) < k) contracts a curve: {report.forward_contracts_curve}  witness {blocks(report.forward_witness)}",
            f"backward contracts a curve: {report.backward_contracts_curve}  witness {blocks(report.backward_witness)}",
            f"forward divisorial: {report.forward_divisorial}  backward divisorial: {report.backward_divisorial}",
            "(regular means no curve is contracted; not a claim that the inverse is a morphism)",
        ]
    )
    out.record("crossing-report", text, **report.to_dict(), witness_point=L.to_dict())
    return 0


def cmd_contract(args, out: Output) -> int:
    T = parse_tree(_read(args.tree))
    L = _load_lin(args.lin)
    require_generic(L, args.cap)
    degrees = degree_assignment(T, L)
    curve = z_contract(T, L)
    assigned = sorted(v for v, e in degrees.items() if e == 0)
    out.record(
        "contraction",
        f"degrees {degrees}\nassigned {assigned}\n{curve.dumps().rstrip()}",
        degrees={str(v): e for v, e in degrees.items()},
        assigned=assigned,
        curve=curve.dumps(),
    )
    return 0


def cmd_stable(args, out: Output) -> int:
    curve = parse_curve(_read(args.curve))
    L = _load_lin(args.lin)
    report = is_git_stable(curve, L)
    lines = ["stable" if report.stable else "unstable"] + [f"  {v}" for v in report.violations]
    out.record("stability", "\n".join(lines), stable=report.stable, violations=list(report.violations))
    return 0


def cmd_check_extremal(args, out: Output) -> int:
    Z = parse_assignment(_read(args.rules))
    report = check_extremal(Z, args.n, args.tree_cap)
    text = f"extremal on {report.trees_checked} trees" if report.ok else f"not extremal: {report.counterexample}"
    out.record("extremal", text, ok=report.ok, trees=report.trees_checked, counterexample=report.counterexample)
    return 0


def cmd_realize(args, out: Output) -> int:
    Z = parse_assignment(_read(args.rules))
    result = realizability_search(Z, args.d, args.n, args.tree_cap, seed=args.seed)
    if result.witness is not None:
        text = f"realized by {json.dumps(result.witness.to_dict())}"
    else:
        text = f"no chamber realizes it ({result.chambers_checked} chambers examined, saturated={result.saturated})"
        if result.certificate:
            text += f"\ncertificate: {result.certificate}"
    out.record(
        "realizability",
        text,
        witness=None if result.witness is None else result.witness.to_dict(),
        chambers=result.chambers_checked,
        samples=result.samples,
        saturated=result.saturated,
        certificate=result.certificate,
    )
    return 0


def cmd_identify(args, out: Output) -> int:
    L = _load_lin(args.lin)
    model = identify(L, args.cap)
    weights = None if model.weights is None else [_fr(w) for w in model.weights]
    out.record("model", str(model), tag=model.tag, weights=weights, summary=model.summary)
    return 0


def cmd_hassett_degree(args, out: Output) -> int:
    result = hassett_embedding_degree(_load_weights(args.weights), args.cap)
    text = f"d={result.d}  gamma={_fr(result.gamma)}"
    if result.perturbation:
        text += f"  (moved off a wall by {_fr(result.perturbation)})"
    out.record(
        "hassett-degree",
        text,
        d=result.d,
        gamma=_fr(result.gamma),
        weights=[_fr(w) for w in result.weights],
        perturbation=_fr(result.perturbation),
    )
    return 0


def cmd_boggi(args, out: Output) -> int:
    L = boggi_params(args.n)
    out.record("linearization", L.dumps(), **L.to_dict())
    return 0


# -- presets ---------------------------------------------------------------------------

FLIP_EXPECTED = {
    "sigma_gamma_above": [0, 0, 0, 0, 1, 1, 1, 2, 2, 3, 3, 4, 4, 4, 5, 5, 5, 5],
    "sigma_gamma_below": [0, 0, 0, 0, 1, 1, 2, 2, 2, 3, 3, 3, 4, 4, 5, 5, 5, 5],
    "label": "Flip",
    "wall": ([1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12], 3),
}

VGIT_EXPECTED = {
    "model_changes": ["2/7", "1/2", "11/16", "7/8", "31/32"],
}


def preset_flip(out: Output, eps: Fraction) -> dict:
    d, n = 5, 19
    gamma0 = Fraction(4, 9)
    found = {}
    for name, gamma in (("sigma_gamma_above", gamma0 + eps), ("sigma_gamma_below", gamma0 - eps)):
        L = Linearization.symmetric(d, n, gamma)
        require_generic(L)
        table = [sigma(range(1, k + 1), L) for k in range(1, n)]
        found[name] = table
        out.record(
            "sigma-table",
            f"gamma={_fr(gamma)}: " + " ".join(f"{k}:{s}" for k, s in enumerate(table, start=1)),
            gamma=_fr(gamma),
            sigma=table,
        )
    I7 = frozenset(range(13, 20))
    wall = Wall.make(I7, 1, d, n)
    found["wall"] = (sorted(wall.subset), wall.k)
    out.record("wall", f"wall (I_7, 1) = {wall}", **wall.to_dict())
    witness = exclusive_witness(wall, base=Linearization.symmetric(d, n, gamma0))
    report = classify_crossing(wall, witness, I7)
    found["label"] = report.label.value
    fw = "+".join(str(len(b)) for b in sorted(report.forward_witness, key=len, reverse=True))
    bw = "+".join(str(len(b)) for b in sorted(report.backward_witness, key=len, reverse=True))
    out.record(
        "crossing-report",
        f"label {report.label.value}; I_7 splits {fw} (sigma-sum 1 = k); I_12 splits {bw} (sigma-sum 3 = d-1-k)",
        **report.to_dict(),
    )
    for sizes in ((10, 7, 1, 1), (12, 5, 1, 1)):
        P = FCurvePartition.from_sizes(sizes)
        sums = {}
        for gamma in (gamma0 - eps, gamma0 + eps):
            sums[_fr(gamma)] = fcurve_sigma_sum(P, Linearization.symmetric(d, n, gamma))
        text = f"F-curve {sizes}: " + ", ".join(
            f"gamma={g}: sum {s}{' (contracted)' if s == d else ''}" for g, s in sums.items()
        )
        out.record("fcurve", text, sizes=list(sizes), sums=sums)
    return found


def preset_vgit(out: Output, eps: Fraction) -> dict:
    d = n = 9
    start = Linearization.symmetric(d, n, Fraction(13, 100))
    end = Linearization.symmetric(d, n, Fraction(999, 1000))
    crossings = segment_scan(start, end)
    cuts = [start.gamma] + [c.gamma for c in crossings] + [end.gamma]
    regions = []
    for a, b in zip(cuts, cuts[1:]):
        L = Linearization.symmetric(d, n, (a + b) / 2)
        regions.append((L, identify(L), model_key(L)))
    out.record(
        "region",
        f"{_fr(cuts[0])} < gamma < {_fr(cuts[1])}: {regions[0][1]}",
        low=_fr(cuts[0]),
        high=_fr(cuts[1]),
        model=str(regions[0][1]),
    )
    changes = []
    for j, crossing in enumerate(crossings):
        changed = regions[j][2] != regions[j + 1][2]
        if changed:
            changes.append(_fr(crossing.gamma))
        pairs = sorted({(min(len(w.subset), n - len(w.subset)), w.k if len(w.subset) <= n - len(w.subset) else d - 1 - w.k) for w in crossing.walls})
        shown = " ".join(f"(|I|={s},k={k})" for s, k in pairs)
        kind = "model change" if changed else "stability-only (same figure region)"
        out.record(
            "crossing",
            f"gamma={_fr(crossing.gamma)}  {shown}  {kind}",
            gamma=_fr(crossing.gamma),
            walls=[list(p) for p in pairs],
            model_change=changed,
        )
        a, b = cuts[j + 1], cuts[j + 2]
        out.record(
            "region",
            f"{_fr(a)} < gamma < {_fr(b)}: {regions[j + 1][1]}",
            low=_fr(a),
            high=_fr(b),
            model=str(regions[j + 1][1]),
        )
    return {"model_changes": changes}


PRESETS = {
    "flip-5-19": (preset_flip, FLIP_EXPECTED),
    "vgit-9-9": (preset_vgit, VGIT_EXPECTED),
}


def cmd_preset(args, out: Output) -> int:
    run, expected = PRESETS[args.name]
    found = run(out, args.epsilon)
    if not args.verify:
        return 0
    mismatches = [key for key, value in expected.items() if found.get(key) != value]
    if mismatches:
        for key in mismatches:
            out.record("verify", f"MISMATCH {key}: expected {expected[key]}, got {found.get(key)}", key=key, ok=False)
        return 1
    out.record("verify", f"verify: all {len(expected)} expected values reproduced", ok=True)
    return 0


# -- parser ------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vgit", description=__doc__.splitlines()[0])
    parser.add_argument("--json", action="store_true", help="emit JSON-lines records")
    parser.add_argument("--cap", type=int, default=None, help="enumeration cap (default from VGIT_ENUM_CAP or 2^20)")
    sub = parser.add_subparsers(dest="command", required=True)

    def lin_options(p):
        p.add_argument("--lin", help="linearization JSON file")
        p.add_argument("--d", type=int)
        p.add_argument("--n", type=int)
        p.add_argument("--gamma", type=_rational_arg, help="gamma as p/q (with --symmetric)")
        p.add_argument("--symmetric", action="store_true")

    p = sub.add_parser("sigma", help="phi and sigma of a subset")
    lin_options(p)
    p.add_argument("--size", type=int, help="use the subset {1..K}")
    p.add_argument("--subset", type=_subset_arg)
    p.set_defaults(func=cmd_sigma)

    p = sub.add_parser("walls", help="enumerate walls")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--symmetric", action="store_true", help="list gamma values on the symmetric slice")
    p.set_defaults(func=cmd_walls)

    p = sub.add_parser("scan", help="walls crossed by a segment")
    p.add_argument("--from", dest="from_file", required=True)
    p.add_argument("--to", dest="to_file", required=True)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("signature", help="sigma table of a chamber")
    p.add_argument("--lin", required=True)
    p.set_defaults(func=cmd_signature)

    p = sub.add_parser("classify-wall", help="classify the crossing of a wall")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--subset", type=_subset_arg, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--witness", help="point on this wall only (default: computed)")
    p.set_defaults(func=cmd_classify_wall)

    p = sub.add_parser("contract", help="stable model of a dual tree")
    p.add_argument("--tree", required=True)
    p.add_argument("--lin", required=True)
    p.set_defaults(func=cmd_contract)

    p = sub.add_parser("stable", help="GIT stability of a curve type")
    p.add_argument("--curve", required=True)
    p.add_argument("--lin", required=True)
    p.set_defaults(func=cmd_stable)

    p = sub.add_parser("check-extremal", help="check the extremal-assignment axioms")
    p.add_argument("--rules", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--tree-cap", type=int, default=7)
    p.set_defaults(func=cmd_check_extremal)

    p = sub.add_parser("realize", help="search for a chamber inducing an assignment")
    p.add_argument("--rules", required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--tree-cap", type=int, default=7)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_realize)

    p = sub.add_parser("identify", help="name the model of a chamber")
    p.add_argument("--lin", required=True)
    p.set_defaults(func=cmd_identify)

    p = sub.add_parser("hassett-degree", help="embedding degree for Hassett weights")
    p.add_argument("--weights", required=True, help="file of p/q weights (JSON list or whitespace separated)")
    p.set_defaults(func=cmd_hassett_degree)

    p = sub.add_parser("boggi", help="a generic Boggi linearization")
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_boggi)

    p = sub.add_parser("preset", help="worked examples")
    p.add_argument("name", choices=sorted(PRESETS))
    p.add_argument("--epsilon", type=_rational_arg, default=Fraction(1, 1000))
    p.add_argument("--verify", action="store_true", help="compare against the expected values")
    p.set_defaults(func=cmd_preset)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse reports usage errors with code 2
        return exc.code
    out = Output(args.json)
    try:
        return args.func(args, out)
    except OnWallError as exc:
        planes = ", ".join(f"({sorted(s)}, {k})" for s, k, _ in exc.hyperplanes) or "?"
        print(f"error: {exc}\noffending hyperplanes (I, k): {planes}", file=sys.stderr)
        return 4
    except CapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, KeyError, TypeError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
