"""Command-line interface.

Exit codes: 0 success, 1 domain error (bad circuit, failed precondition),
2 usage error. All results go to stdout, diagnostics to stderr; ``--json``
switches machine-readable output on where it applies.
"""

import argparse
import json
import sys

from . import sim, taxonomy
from .circuit import Circuit
from .cqc import circuit_hash, emit_circuit, parse_circuit
from .derivation import Derivation, replay_trace
from .diagram import render
from .errors import QrewriteError
from .normalize import Strategy, normalize
from .rules import (BarrierPolicy, Match, RuleId, all_rule_info, apply_rule,
                    find_matches)


def circuit_to_json(c: Circuit) -> dict:
    return {
        "cqc": emit_circuit(c),
        "num_qubits": c.num_qubits,
        "num_bits": c.num_bits,
        "hash": circuit_hash(c),
        "gates": [
            {"kind": gate.kind.value,
             "controls": [{"wire": ctl.wire, "polarity": ctl.polarity.value}
                          for ctl in gate.controls],
             "targets": list(gate.targets),
             "bit": gate.bit}
            for gate in c.gates
        ],
    }


def _load(path: str) -> Circuit:
    if path == "-":
        return parse_circuit(sys.stdin.read())
    with open(path, encoding="utf-8") as fh:
        return parse_circuit(fh.read())


def _emit_json(data) -> None:
    print(json.dumps(data, indent=2, sort_keys=True))


def _cmd_parse(args) -> int:
    c = _load(args.file)
    if args.json:
        _emit_json(circuit_to_json(c))
    else:
        print(emit_circuit(c))
    return 0


def _cmd_render(args) -> int:
    c = _load(args.file)
    print(render(c, args.format).payload)
    return 0


def _cmd_simulate(args) -> int:
    c = _load(args.file)
    state = sim.statevector_run(c, args.input, ignore_measurements=True)
    entries = [(sim.index_to_basis(k, c.num_qubits), amp)
               for k, amp in enumerate(state.amplitudes)
               if abs(amp) > 1e-12]
    if args.json:
        _emit_json({"amplitudes": [
            {"basis": basis, "re": amp.real, "im": amp.imag}
            for basis, amp in entries]})
    else:
        for basis, amp in entries:
            print(f"|{basis}>  {amp.real:+.6f}{amp.imag:+.6f}j   "
                  f"p={abs(amp) ** 2:.6f}")
    return 0


def _cmd_sample(args) -> int:
    c = _load(args.file)
    counts = sim.sample(c, args.shots, args.seed)
    if args.json:
        _emit_json(counts)
    else:
        for key in sorted(counts, key=lambda k: -counts[k]):
            print(f"{key}  {counts[key]}")
    return 0


def _cmd_verify_equiv(args) -> int:
    a, b = _load(args.file), _load(args.other)
    if a.has_measurements() and b.has_measurements():
        da = sim.exact_distribution(a)
        db = sim.exact_distribution(b)
        keys = set(da) | set(db)
        deviation = max(abs(da.get(k, 0.0) - db.get(k, 0.0)) for k in keys)
        equivalent = deviation <= args.tol
        payload = {"equivalent": equivalent, "max_deviation": deviation,
                   "compared": "distributions"}
    else:
        report = sim.equivalent_up_to_phase(a.without_measurements(),
                                            b.without_measurements(), args.tol)
        payload = report.to_json()
        payload["compared"] = "unitaries"
        equivalent = report.equivalent
    if args.json:
        _emit_json(payload)
    else:
        print("equivalent" if equivalent else "NOT equivalent",
              f"(max deviation {payload['max_deviation']:.3e})")
    return 0 if equivalent else 1


def _cmd_classify(args) -> int:
    c = _load(args.file)
    verdict = taxonomy.classify(c)
    if args.json:
        _emit_json(verdict.to_json())
    else:
        print(f"family {verdict.family}"
              + ("" if verdict.confirmed else " (unconfirmed)"))
        print(f"witness: {verdict.witness}")
        if verdict.frame is not None:
            print(f"frame:   {verdict.frame}")
        if verdict.rank is not None:
            print(f"rank {verdict.rank} at cut {list(verdict.cut)} "
                  f"on input {verdict.input}")
    return 0


def _cmd_rules(args) -> int:
    infos = all_rule_info()
    if args.json:
        _emit_json([info.to_json() for info in infos])
    else:
        width = max(len(info.rule.value) for info in infos)
        for info in infos:
            print(f"{info.rule.value:<{width}}  {info.pattern}  =>  "
                  f"{info.replacement}")
            if info.notes:
                print(f"{'':<{width}}  ({info.notes})")
    return 0


def _cmd_matches(args) -> int:
    c = _load(args.file)
    matches = find_matches(c, RuleId(args.rule), BarrierPolicy(args.policy),
                           reverse=args.reverse)
    if args.json:
        _emit_json([m.to_json() for m in matches])
    else:
        for m in matches:
            print(m.describe(), f"wires={list(m.wires)}")
        if not matches:
            print("(no matches)")
    return 0


def _cmd_apply(args) -> int:
    c = _load(args.file)
    match = Match(RuleId(args.rule), tuple(args.at), tuple(args.wires),
                  args.reverse, args.variant)
    result = apply_rule(c, match, BarrierPolicy(args.policy))
    if args.json:
        _emit_json(circuit_to_json(result))
    else:
        print(emit_circuit(result))
    return 0


def _cmd_normalize(args) -> int:
    c = _load(args.file)
    result, derivation = normalize(c, Strategy(args.strategy),
                                   BarrierPolicy(args.policy))
    if args.trace:
        print(derivation.to_trace())
    elif args.json:
        payload = circuit_to_json(result)
        payload["steps"] = len(derivation.steps)
        _emit_json(payload)
    else:
        print(emit_circuit(result))
    return 0


def _derivation_payload(derivation: Derivation) -> dict:
    return {
        "snapshots": [{"label": label, "cqc": emit_circuit(c),
                       "hash": circuit_hash(c)}
                      for label, c in derivation.marked_snapshots()],
        "steps": [dict(step.match.to_json(), verified=step.verified)
                  for step in derivation.steps],
        "final_cqc": emit_circuit(derivation.final()),
        "policy": derivation.policy.value,
        "all_verified": derivation.all_verified(),
    }


def _print_derivation(derivation: Derivation) -> None:
    for label, c in derivation.marked_snapshots():
        print(f"--- {label} ---")
        print(emit_circuit(c))
        print()
    if derivation.all_verified():
        print(f"all steps equivalent ({len(derivation.steps)} rewrites)")
    else:
        bad = [s.match.describe() for s in derivation.steps
               if s.verified in ("", "failed")]
        print(f"VERIFICATION FAILED at: {bad}")


def _cmd_derive(args) -> int:
    from . import algorithms

    if args.kind == "bv":
        derivation = algorithms.derive_bv_chain(args.secret, verify=args.verify)
    else:
        derivation = algorithms.derive_dj_reduction(verify=args.verify)
    if args.trace:
        print(derivation.to_trace())
    elif args.json:
        payload = _derivation_payload(derivation)
        if args.kind == "bv":
            payload["secret"] = args.secret
        _emit_json(payload)
    else:
        _print_derivation(derivation)
    return 0 if (not args.verify or derivation.all_verified()) else 1


def _cmd_replay(args) -> int:
    if args.file == "-":
        text = sys.stdin.read()
    else:
        with open(args.file, encoding="utf-8") as fh:
            text = fh.read()
    derivation = replay_trace(text)
    print(f"replayed {len(derivation.steps)} steps; "
          f"final hash {circuit_hash(derivation.final())}")
    return 0


def _cmd_identities(args) -> int:
    checks = sim.check_parity_identities()
    if args.json:
        _emit_json([{"name": chk.name, "deviation": chk.deviation,
                     "tolerance": chk.tolerance, "passed": chk.passed}
                    for chk in checks])
    else:
        for chk in checks:
            status = "ok  " if chk.passed else "FAIL"
            print(f"{status} {chk.deviation:.3e}  {chk.name}")
    return 0 if all(chk.passed for chk in checks) else 1


def _cmd_serve(args) -> int:
    import uvicorn

    from .server import create_app

    try:
        uvicorn.run(create_app(), host=args.host, port=args.port,
                    log_level="warning")
    except SystemExit as exc:  # startup failure, e.g. port already bound
        return 1 if exc.code else 0
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qrewrite",
        description="Clifford circuit rewriting and verification")
    sub = parser.add_subparsers(dest="command", required=True)

    def with_file(p):
        p.add_argument("--file", required=True,
                       help="CQC source path, or - for stdin")
        return p

    p = with_file(sub.add_parser("parse", help="validate and canonicalize"))
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_parse)

    p = with_file(sub.add_parser("render", help="draw a circuit"))
    p.add_argument("--format", choices=["ascii", "svg"], default="ascii")
    p.set_defaults(func=_cmd_render)

    p = with_file(sub.add_parser("simulate", help="statevector amplitudes"))
    p.add_argument("--input", default=None, help="basis input, default zeros")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_simulate)

    p = with_file(sub.add_parser("sample", help="sample measurement counts"))
    p.add_argument("--shots", type=int, default=1024)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_sample)

    p = with_file(sub.add_parser("verify-equiv",
                                 help="equivalence up to global phase"))
    p.add_argument("--other", required=True)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_verify_equiv)

    p = with_file(sub.add_parser("classify", help="family taxonomy verdict"))
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("rules", help="rule catalogue")
    rsub = p.add_subparsers(dest="rules_command", required=True)
    rp = rsub.add_parser("list", help="list rule semantics")
    rp.add_argument("--json", action="store_true")
    rp.set_defaults(func=_cmd_rules)

    p = with_file(sub.add_parser("matches", help="list applicable sites"))
    p.add_argument("--rule", required=True,
                   choices=[r.value for r in RuleId])
    p.add_argument("--policy", choices=["opaque", "transparent"],
                   default="opaque")
    p.add_argument("--reverse", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_matches)

    p = with_file(sub.add_parser("apply", help="apply one rule"))
    p.add_argument("--rule", required=True, choices=[r.value for r in RuleId])
    p.add_argument("--at", required=True,
                   type=lambda s: [int(x) for x in s.split(",") if x],
                   help="comma-separated gate indices")
    p.add_argument("--wires", default=[],
                   type=lambda s: [int(x) for x in s.split(",") if x])
    p.add_argument("--reverse", action="store_true")
    p.add_argument("--variant", default="")
    p.add_argument("--policy", choices=["opaque", "transparent"],
                   default="opaque")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_apply)

    p = with_file(sub.add_parser("normalize", help="rewrite to a fixpoint"))
    p.add_argument("--strategy", choices=[s.value for s in Strategy],
                   default="cancel-only")
    p.add_argument("--policy", choices=["opaque", "transparent"],
                   default="opaque")
    p.add_argument("--trace", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_normalize)

    p = sub.add_parser("derive", help="scripted derivations")
    dsub = p.add_subparsers(dest="kind", required=True)
    bp = dsub.add_parser("bv", help="classical write to canonical form")
    bp.add_argument("--secret", required=True)
    dp = dsub.add_parser("dj", help="quadratic oracle reduction")
    for q in (bp, dp):
        q.add_argument("--verify", action=argparse.BooleanOptionalAction,
                       default=True)
        q.add_argument("--json", action="store_true")
        q.add_argument("--trace", action="store_true")
        q.set_defaults(func=_cmd_derive)

    p = sub.add_parser("replay", help="replay and check a derivation trace")
    p.add_argument("--file", required=True)
    p.set_defaults(func=_cmd_replay)

    p = sub.add_parser("identities", help="matrix identity self-checks")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_identities)

    p = sub.add_parser("serve", help="run the session service")
    p.add_argument("--port", type=int, default=8077)
    p.add_argument("--host", default="127.0.0.1")
    p.set_defaults(func=_cmd_serve)

    return parser


def cli_main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except QrewriteError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
