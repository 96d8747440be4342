"""Command-line entry point.

Exit codes: 0 success, 1 check failure, 2 usage or parse error, 3 invariant
violation.
"""
from __future__ import annotations

import argparse
import csv
import io
import sys
from pathlib import Path

from . import causal_model as cm
from . import circuits as cc
from . import formats as fm
from . import infotheory as it
from . import povm_search as ps
from . import protocols as pr
from . import quantum_sim as qs
from . import reproduce as rp

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INVARIANT = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _emit(obj) -> None:
    sys.stdout.write(fm.dumps(obj) + "\n")


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from exc


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from exc


def _load_source(args):
    if args.preset:
        return fm.preset(args.preset)
    if not args.input:
        raise UsageError("give an input file or --preset")
    return fm.load_measurable(args.input)


def _load_distribution(path: str | None, preset: str | None) -> it.JointDistribution:
    obj = fm.preset(preset) if preset else fm.load_measurable(path) if path else None
    if not isinstance(obj, it.JointDistribution):
        raise UsageError("expected a probability distribution")
    return obj


def _load_density(path: str | None, preset: str | None) -> qs.DensityOperator:
    obj = fm.preset(preset) if preset else fm.load_measurable(path) if path else None
    if isinstance(obj, qs.PureState):
        return qs.density_from_pure(obj)
    if isinstance(obj, qs.DensityOperator):
        return obj
    raise UsageError("expected a quantum state")


def cmd_measures(args) -> int:
    obj = _load_source(args)
    if isinstance(obj, it.JointDistribution):
        report = {
            "kind": "distribution",
            "H_marginals": [it.entropy(obj, [i]) for i in range(obj.parties)],
            "H_joint": it.entropy(obj),
            "C": it.total_correlation(obj),
        }
    else:
        rho = qs.density_from_pure(obj) if isinstance(obj, qs.PureState) else obj
        comp = qs.computational_distribution(rho)
        report = {
            "kind": "state",
            "S_marginals": qs.marginal_entropies(rho),
            "S_joint": qs.von_neumann_entropy(rho),
            "C_er": qs.cerf_monotone(rho),
            "H_marginals": [it.entropy(comp, [i]) for i in range(comp.parties)],
            "C": it.total_correlation(comp),
        }
    _emit(report)
    return EXIT_OK


def cmd_decorrelate(args) -> int:
    rho, bits, history = qs.decorrelate_parity(args.m)
    target = qs.maximally_mixed((2,) * args.m)
    report = {
        "m": args.m,
        "bits_used": bits,
        "C_er": qs.cerf_monotone(qs.density_from_pure(qs.parity_state(args.m))),
        "final_trace_distance": qs.trace_distance(rho, target),
        "cerf_after_each_step": [qs.cerf_monotone(h) for h in history],
    }
    if args.m == 3:
        report["step2_reduced_vs_bell_mixture"] = qs.trace_distance(qs.partial_trace(history[1], [1, 2]), qs.bell_mixture_23())
    _emit(report)
    return EXIT_OK


def _load_model(path: str) -> cm.CausalModel:
    try:
        return cm.CausalModel.from_dict(fm.load_json(path))
    except (KeyError, TypeError, AttributeError) as exc:
        raise fm.FormatError(f"bad model file: {exc}") from exc


def cmd_model(args) -> int:
    if args.model_cmd == "trees":
        order = _int_list(args.order) if args.order else None
        models = cm.spanning_tree_models(args.kind, args.m, order)
        report = {
            "kind": args.kind,
            "m": args.m,
            "count": len(models),
            "models": [
                {
                    "edges": [list(p) for p, s in m.latent.pair_supports.items() if s > 1],
                    "rate": cm.model_rate(m),
                    **({"model": m.to_dict()} if args.full else {}),
                }
                for m in models
            ],
        }
        _emit(report)
        return EXIT_OK
    if args.model_cmd == "redundant":
        model, report = cm.redundant_model_demo(args.m)
        out = report.to_dict()
        if args.full:
            out["model"] = model.to_dict()
        _emit(out)
        return EXIT_OK
    model = _load_model(args.model)
    target = _load_distribution(args.target, args.target_preset)
    if args.model_cmd == "check":
        order = _int_list(args.order) if args.order else cm.find_causal_order(model, args.tol)
        c1 = cm.check_condition1(model, target, args.tol)
        c2 = cm.check_condition2(model, order, args.tol) if order is not None else None
        report = {
            "rate": cm.model_rate(model),
            "condition1": c1.to_dict(),
            "condition2": c2.to_dict() if c2 else {"pass": False, "order": None},
            "compatible": c1.passed and c2 is not None and c2.passed,
        }
        _emit(report)
        return EXIT_OK if report["compatible"] else EXIT_FAIL
    report = cm.theorem1_diagnose(model, target, args.tol)
    _emit(report.to_dict())
    return EXIT_OK


def cmd_cq(args) -> int:
    rho = _load_density(args.state, args.preset)
    report = ps.cq_lower_bound(rho, args.restarts, args.max_iters, args.seed)
    _emit(report.to_dict())
    return EXIT_OK


def cmd_circuit(args) -> int:
    try:
        circuit = cc.Circuit.from_dict(fm.load_json(args.circuit))
    except (KeyError, TypeError) as exc:
        raise fm.FormatError(f"bad circuit file: {exc}") from exc
    state = cc.simulate(circuit)
    if args.circuit_cmd == "simulate":
        _emit({"cnot_count": cc.cnot_count(circuit), "state": fm.state_to_dict(state)})
        return EXIT_OK
    rho = qs.density_from_pure(state)
    if args.bound is not None:
        bound, source = args.bound, "given"
    elif args.optimize:
        if args.seed is None:
            raise UsageError("--optimize needs --seed")
        bound, source = ps.cq_lower_bound(rho, args.restarts, seed=args.seed).best_value, "optimized"
    else:
        bound, source = it.total_correlation(qs.computational_distribution(rho)), "computational"
    report = cc.theorem3_audit(circuit, bound).to_dict()
    report["bound_source"] = source
    _emit(report)
    return EXIT_OK if report["pass"] else EXIT_FAIL


def cmd_protocol(args) -> int:
    if args.protocol_cmd == "xor":
        y = _int_list(args.y)
        if len(y) < 2:
            raise UsageError("--y needs at least two bits")
        _emit(pr.xor_demo_m(y, args.seed).to_dict())
        return EXIT_OK
    if args.protocol_cmd == "run":
        data = fm.load_json(args.config)
        if "seed" not in data:
            raise UsageError("protocol config must declare a seed")
        try:
            config = pr.HybridConfig.from_dict(data)
        except (KeyError, TypeError) as exc:
            raise fm.FormatError(f"bad config: {exc}") from exc
        first = pr.run_hybrid(config, pr.trial_rngs(config.seed, 1)[0])
        p, hw = pr.success_probability(config)
        out = {"trials": config.trials, "success_probability": p, "half_width": hw,
               "C": it.total_correlation(config.target), "total_rate": config.total_rate,
               "first_trial": first.to_dict()}
        if not args.keys:
            out["first_trial"].pop("keys")
        _emit(out)
        return EXIT_OK
    target = _load_distribution(args.target, args.target_preset)
    rows = pr.theorem4_sweep(target, _int_list(args.n), _float_list(args.rates), args.epsilon, args.trials, args.seed)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(pr.SWEEP_COLUMNS)
    for r in rows:
        writer.writerow([r.n, fm.fmt_float(r.total_rate), fm.fmt_float(r.success), fm.fmt_float(r.half_width),
                         fm.fmt_float(r.C), fm.fmt_float(r.threshold)])
    sys.stdout.write(buf.getvalue())
    return EXIT_OK


def cmd_reproduce(args) -> int:
    only = args.only.split(",") if args.only else None
    if only and any(g not in rp.GROUPS for g in only):
        raise UsageError(f"--only takes groups from {','.join(rp.GROUPS)}")
    results = rp.run_script(rp.build_script(), only)
    text = rp.render(results)
    sys.stdout.write(text)
    if args.output:
        Path(args.output).write_text(text)
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="causalcorr", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("measures", help="entropies, total correlation and Cerf monotone")
    p.add_argument("input", nargs="?")
    p.add_argument("--preset", help="ghz:M, parity:M, psi2, P1:M, P2, P3:M")
    p.set_defaults(func=cmd_measures)

    p = sub.add_parser("decorrelate", help="random-unitary decorrelation of the parity state")
    p.add_argument("--m", type=int, default=3)
    p.set_defaults(func=cmd_decorrelate)

    p = sub.add_parser("model", help="causal-model checks")
    msub = p.add_subparsers(dest="model_cmd", required=True)
    for name in ("check", "diagnose"):
        q = msub.add_parser(name)
        q.add_argument("--model", required=True)
        q.add_argument("--target")
        q.add_argument("--target-preset")
        q.add_argument("--tol", type=float, default=cm.DEFAULT_TOL)
        if name == "check":
            q.add_argument("--order", help="comma-separated 0-based party order")
    q = msub.add_parser("trees")
    q.add_argument("--kind", choices=("ghz", "parity"), required=True)
    q.add_argument("--m", type=int, required=True)
    q.add_argument("--order")
    q.add_argument("--full", action="store_true", help="include full model records")
    q = msub.add_parser("redundant")
    q.add_argument("--m", type=int, default=4)
    q.add_argument("--full", action="store_true")
    p.set_defaults(func=cmd_model)

    p = sub.add_parser("cq", help="quantum total correlation lower bound")
    csub = p.add_subparsers(dest="cq_cmd", required=True)
    q = csub.add_parser("optimize")
    q.add_argument("--state")
    q.add_argument("--preset")
    q.add_argument("--restarts", type=int, default=ps.DEFAULT_RESTARTS)
    q.add_argument("--max-iters", type=int, default=ps.DEFAULT_MAX_ITERS)
    q.add_argument("--seed", type=int, required=True)
    p.set_defaults(func=cmd_cq)

    p = sub.add_parser("circuit", help="CNOT circuits")
    ksub = p.add_subparsers(dest="circuit_cmd", required=True)
    q = ksub.add_parser("simulate")
    q.add_argument("--circuit", required=True)
    q = ksub.add_parser("audit")
    q.add_argument("--circuit", required=True)
    q.add_argument("--bound", type=float)
    q.add_argument("--optimize", action="store_true", help="bound from the measurement optimizer")
    q.add_argument("--restarts", type=int, default=ps.DEFAULT_RESTARTS)
    q.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_circuit)

    p = sub.add_parser("protocol", help="key distribution and XOR demos")
    psub = p.add_subparsers(dest="protocol_cmd", required=True)
    q = psub.add_parser("run")
    q.add_argument("--config", required=True)
    q.add_argument("--keys", action="store_true", help="print the first trial's keys")
    q = psub.add_parser("sweep")
    q.add_argument("--target")
    q.add_argument("--target-preset")
    q.add_argument("--n", required=True, help="comma-separated block lengths")
    q.add_argument("--rates", required=True, help="comma-separated total rates")
    q.add_argument("--epsilon", type=float, required=True)
    q.add_argument("--trials", type=int, default=100)
    q.add_argument("--seed", type=int, required=True)
    q = psub.add_parser("xor")
    q.add_argument("--y", required=True, help="comma-separated sender bits")
    q.add_argument("--seed", type=int, required=True)
    p.set_defaults(func=cmd_protocol)

    p = sub.add_parser("reproduce", help="run the bundled reproduction checks")
    p.add_argument("--only", help=f"comma-separated groups from {','.join(rp.GROUPS)}")
    p.add_argument("--output")
    p.set_defaults(func=cmd_reproduce)
    return parser


INVARIANT_ERRORS = (it.DistributionError, qs.QuantumStateError, cm.ModelError, cc.CircuitError, pr.ProtocolError, ValueError)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, fm.FormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except INVARIANT_ERRORS as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
