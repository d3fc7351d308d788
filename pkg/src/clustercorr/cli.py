"""Command-line front end: ``clustercorr <verb> ...``.

Exit status is 0 on success, 1 on invalid input or a failed check, 2 on an
internal numerical or consistency failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import catalog, protocols
from .circuits import eval_angle, preparation_circuit, run_circuit
from .cluster import NONZERO_TOL, classify, closed_form_cumulant, correlation_tensor, cumulant
from .errors import NumericalError
from .measures import concurrence_signed, three_tangle, wootters_concurrence
from .qstate import StateVector, partial_trace, random_state, state_from_json
from .tables import reproduce_tables


class CheckFailed(Exception):
    """A reproduction check did not match its reference value."""


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(text)


def load_state(ref: str):
    """A catalog spec such as ``ghz:3:1`` or the path of a state JSON file."""
    path = Path(ref)
    if path.suffix == ".json" or path.is_file():
        return state_from_json(path.read_text(encoding="utf-8"))
    return catalog.make_state(ref)


def cmd_analyze(args) -> int:
    sig = correlation_tensor(load_state(args.state), tol=args.tolerance)
    _emit(args, sig.to_json(), sig.format())
    return 0


def cmd_signature(args) -> int:
    state = load_state(args.state)
    general = cumulant(state, args.key)
    payload = {"key": args.key, "cumulant": general}
    text = f"C_{args.key} = {general:+.12g}"
    try:
        closed = closed_form_cumulant(state, args.key)
    except ValueError:
        closed = None
    if closed is not None:
        payload["closed_form"] = closed
        text += f"  (closed form {closed:+.12g})"
    _emit(args, payload, text)
    return 0


def cmd_compare(args) -> int:
    a = correlation_tensor(load_state(args.a), tol=args.tolerance)
    b = correlation_tensor(load_state(args.b), tol=args.tolerance)
    rel = classify(a, b)
    text = f"{rel.verdict} ({len(a)} vs {len(b)} keys)"
    if rel.permutation:
        text += f"; permutation {list(rel.permutation)}"
    if rel.hadamards:
        text += f"; hadamards on {list(rel.hadamards)}"
    if rel.detail and "nonzero coefficients" not in rel.detail:
        text += f"; {rel.detail}"
    payload = rel.to_json() | {"keys": [len(a), len(b)]}
    _emit(args, payload, text)
    return 0


def cmd_measures(args) -> int:
    state = load_state(args.state)
    n = state.num_qubits
    payload: dict = {"num_qubits": n}
    lines = []
    if n == 2:
        if isinstance(state, StateVector):
            payload["concurrence_signed"] = concurrence_signed(state)
            lines.append(f"signed concurrence  {payload['concurrence_signed']:+.12g}")
        payload["concurrence"] = wootters_concurrence(partial_trace(state, [1, 2]))
        lines.append(f"concurrence         {payload['concurrence']:.12g}")
    elif n == 3 and isinstance(state, StateVector):
        rep = three_tangle(state)
        payload["three_tangle"] = rep.to_json()
        lines.append(f"3-tangle            {rep.tau:.12g}  (lambda form {rep.tau_lambda:.12g})")
        lines.append(f"C^2 A(BC)           {rep.c_sq_A_BC:.12g}")
        lines.append(f"C^2 AB, C^2 AC      {rep.c_sq_AB:.12g}, {rep.c_sq_AC:.12g}")
    if n >= 2:
        pairs = {}
        for i in range(1, n + 1):
            for j in range(i + 1, n + 1):
                pairs[f"{i}{j}"] = wootters_concurrence(partial_trace(state, [i, j]))
        avg = float(np.mean([c**2 for c in pairs.values()]))
        payload["pair_concurrence"] = pairs
        payload["avg_sq_concurrence"] = avg
        lines.append(f"average C^2 (pairs) {avg:.12g}")
    _emit(args, payload, "\n".join(lines))
    return 0


def cmd_catalog(args) -> int:
    if not args.family:
        payload = {k: v for k, v in sorted(catalog.FAMILIES.items())}
        _emit(args, payload, "\n".join(f"{k:12s} {v}" for k, v in payload.items()))
        return 0
    specs = catalog.family_specs(args.family, args.size)
    states = [catalog.make_state(s) for s in specs]
    g = catalog.gram(states)
    orth = bool(np.allclose(g, np.eye(len(states)), atol=1e-10))
    rows = []
    for spec, s in zip(specs, states):
        sig = correlation_tensor(s, tol=args.tolerance) if s.num_qubits <= 8 else None
        rows.append({"index": spec.index, "keys": None if sig is None else len(sig)})
    payload = {"family": specs[0].family, "members": len(states), "orthonormal": orth, "rows": rows}
    text = [f"{specs[0].family}: {len(states)} members, orthonormal={orth}"]
    text += [f"  {r['index']:3d}  {r['keys']} nonzero keys" for r in rows]
    _emit(args, payload, "\n".join(text))
    return 0


def cmd_prepare(args) -> int:
    circ = preparation_circuit(args.state)
    if args.out:
        Path(args.out).write_text(json.dumps(circ.to_json(), indent=2) + "\n", encoding="utf-8")
    target = catalog.make_state(args.state)
    fid = abs(np.vdot(target.amplitudes, run_circuit(circ).amplitudes)) ** 2
    payload = circ.to_json() | {"fidelity": float(fid)}
    _emit(args, payload, f"{circ}\nfidelity {fid:.12f}")
    return 0


def _channel_arg(text: str) -> tuple[int, int]:
    spec = catalog.parse_spec(text)
    if spec.family == "varphi5":
        return 2, spec.index
    if spec.family == "gvarphi":
        return spec.num_particles, spec.index
    raise ValueError("teleportation channel must be varphi5:<i> or gvarphi:<N>:<i>")


def cmd_teleport(args) -> int:
    n, idx = _channel_arg(args.channel)
    rng = np.random.default_rng(args.seed)
    if args.message:
        messages = [state_from_json(Path(args.message).read_text(encoding="utf-8"))]
    else:
        messages = [random_state(n, rng) for _ in range(args.random)]
    reports = [protocols.teleport_generalized(n, m, idx, args.controlled) for m in messages]
    worst = min(o.fidelity for r in reports for o in r.outcomes)
    first = reports[0]
    payload = first.to_json() | {"messages": len(reports), "min_fidelity": worst,
                                 "all_success": all(r.overall_success for r in reports)}
    lines = [f"channel {first.channel}  controlled={first.controlled}  messages={len(reports)}"]
    for o in first.outcomes:
        lines.append(f"  {o.label:14s} p={o.probability:.6f}  correct {' '.join(map(str, o.corrections))}")
    lines.append(f"min fidelity {worst:.12f}  success={payload['all_success']}")
    _emit(args, payload, "\n".join(lines))
    return 0 if payload["all_success"] else 1


def cmd_densecode(args) -> int:
    if args.interface == "direct":
        idx = catalog.parse_spec(args.channel).index if ":" in args.channel else 1
        rep = protocols.direct_dense_run(idx)
    else:
        rep = protocols.controlled_dense_run(args.channel, eval_angle(args.theta), args.interface)
    lines = [f"{rep.channel} theta={rep.theta:.12g} interface={rep.interface}"]
    for b in rep.branches:
        lines.append(
            f"  {b.charlie}: p={b.probability:.6f} aux p=({b.aux_probs[0]:.6f}, {b.aux_probs[1]:.6f}) "
            f"bits=({b.bits[0]:g}, {b.bits[1]:g})"
        )
    lines.append(f"avg_bits {rep.average_bits:.12g}")
    _emit(args, rep.to_json(), "\n".join(lines))
    return 0


def parse_grid(text: str) -> list[float]:
    """``start:stop:count`` with angle expressions, endpoints included."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError("grid must be start:stop:count")
    lo, hi, k = eval_angle(parts[0]), eval_angle(parts[1]), int(parts[2])
    if k < 1:
        raise ValueError("grid needs at least one point")
    return [float(x) for x in np.linspace(lo, hi, k)]


def cmd_sweep(args) -> int:
    grid = parse_grid(args.grid)
    if any(not 0 <= t <= np.pi / 4 + 1e-12 for t in grid):
        raise ValueError("sweep grid must lie in [0, pi/4]")
    kinds = [k.strip() for k in args.channels.split(",") if k.strip()]
    rows = protocols.info_sweep(kinds, grid, args.interface)
    text = protocols.sweep_csv(rows)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"wrote {len(rows)} rows to {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def cmd_reproduce(args) -> int:
    checks = reproduce_tables()
    if args.json:
        payload = [
            {"table": c.table, "name": c.name, "computed": str(c.computed), "expected": str(c.expected),
             "passed": c.passed, "note": c.note}
            for c in checks
        ]
        print(json.dumps(payload, indent=2))
    else:
        for c in checks:
            print(c.line())
        failed = sum(not c.passed for c in checks)
        print(f"{len(checks) - failed}/{len(checks)} checks passed")
    if not all(c.passed for c in checks):
        raise CheckFailed("some tabulated values were not reproduced")
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--seed", type=int, default=0, help="seed for random messages")
    common.add_argument("--tolerance", type=float, default=NONZERO_TOL, help="nonzero cutoff for coefficients")

    p = argparse.ArgumentParser(prog="clustercorr", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="verb", required=True)

    s = sub.add_parser("analyze", parents=[common], help="print the correlation signature")
    s.add_argument("state", help="catalog spec (e.g. ghz:3:1) or state JSON file")
    s.set_defaults(func=cmd_analyze)

    s = sub.add_parser("signature", parents=[common], help="one cluster coefficient")
    s.add_argument("state")
    s.add_argument("key", help="axis string such as xxz")
    s.set_defaults(func=cmd_signature)

    s = sub.add_parser("compare", parents=[common], help="relate two signatures")
    s.add_argument("a")
    s.add_argument("b")
    s.set_defaults(func=cmd_compare)

    s = sub.add_parser("measures", parents=[common], help="concurrence and 3-tangle")
    s.add_argument("state")
    s.set_defaults(func=cmd_measures)

    s = sub.add_parser("catalog", parents=[common], help="list families or one family's members")
    s.add_argument("family", nargs="?")
    s.add_argument("--size", type=int, default=None, help="size for ghz, w, gvarphi, gchi")
    s.set_defaults(func=cmd_catalog)

    s = sub.add_parser("prepare", parents=[common], help="preparation circuit for a catalog state")
    s.add_argument("state")
    s.add_argument("--out", help="write the circuit JSON here")
    s.set_defaults(func=cmd_prepare)

    s = sub.add_parser("teleport", parents=[common], help="teleport through a varphi channel")
    s.add_argument("--channel", default="varphi5:10", help="varphi5:<i> or gvarphi:<N>:<i>")
    s.add_argument("--controlled", action="store_true")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--message", help="message state JSON file")
    g.add_argument("--random", type=int, default=1, help="number of Haar-random messages")
    s.set_defaults(func=cmd_teleport)

    s = sub.add_parser("densecode", parents=[common], help="dense coding run")
    s.add_argument("--channel", default="psi5", help="psi5, phi5, varphi5, ghz5 (or varphi5:<i> for direct)")
    s.add_argument("--theta", default="0", help="Charlie's angle in radians, expressions like pi/8 allowed")
    s.add_argument("--interface", default="ca", type=str.lower, choices=["ca", "cb", "c-a", "c-b", "direct"])
    s.set_defaults(func=cmd_densecode)

    s = sub.add_parser("sweep", parents=[common], help="average bits versus theta as CSV")
    s.add_argument("--grid", default="0:pi/4:50")
    s.add_argument("--channels", default="psi5,phi5,varphi5,ghz5")
    s.add_argument("--interface", default="ca", type=str.lower, choices=["ca", "cb", "c-a", "c-b"])
    s.add_argument("--out")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("reproduce", parents=[common], help="recompute the reference tables")
    s.add_argument("what", choices=["tables"])
    s.set_defaults(func=cmd_reproduce)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, FileNotFoundError, CheckFailed) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (NumericalError, AssertionError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
