"""Command-line interface.

Exit codes: 0 success, 1 verification-check failure, 2 usage or input error.
"""

import argparse
import sys

from .errors import GapforgeError, ParseError
from .gap_search import (
    adaptive_gap_decider,
    decide_gap_via_oracle,
    default_search_config,
    make_search_config,
    query_budget,
    rounds_config,
    single_search_machine,
)
from .hamiltonian import KlhInstance, SpectralGapInstance, random_instance
from .harness import (
    Report,
    VerifyConfig,
    generate_instance,
    read_instance,
    read_meta,
    run_verify,
    write_instance,
)
from .promise_oracle import AllNo, AllYes, SeededPolicy
from .query_flatten import (
    check_robustness,
    check_robustness_sampled,
    flatten,
    tree_stats,
)
from .errors import TooManyInvalidError
from .reduction import ReductionVariant, reduce_klh_to_gap
from .spectrum import eigenvalues, lambda_c, spectral_gap


def _parse_policy(text: str):
    if text == "all-yes":
        return AllYes()
    if text == "all-no":
        return AllNo()
    if text.startswith("seed:"):
        try:
            return SeededPolicy(int(text.split(":", 1)[1]))
        except ValueError:
            pass
    raise argparse.ArgumentTypeError(
        f"policy must be 'all-yes', 'all-no', or 'seed:N', got {text!r}"
    )


def _parse_variant(text: str) -> ReductionVariant:
    try:
        return ReductionVariant(text)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"variant must be 'global' or 'hamming', got {text!r}"
        )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gapforge",
        description="Local-Hamiltonian spectral-gap reductions and oracle searches",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a seeded random instance file")
    p.add_argument("-n", type=int, required=True, help="qubit count")
    p.add_argument("-m", "--terms", type=int, default=None, help="term count (default 3n)")
    p.add_argument("-k", type=int, default=2, help="locality (default 2)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--index", type=int, default=None,
                   help="use the banded harness generator with this instance index")
    p.add_argument("--a", type=float, default=1 / 3)
    p.add_argument("--b", type=float, default=2 / 3)
    p.add_argument("--c", type=float, default=2.0)
    p.add_argument("-o", "--output", required=True)

    p = sub.add_parser("spectrum", help="print eigenvalues of an instance")
    p.add_argument("instance")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--all", action="store_true")
    group.add_argument("--gap", action="store_true")
    group.add_argument("--lambda", dest="lambda_c", type=int, metavar="C")

    p = sub.add_parser("reduce", help="map a ground-energy instance to a gap instance")
    p.add_argument("instance")
    p.add_argument("--variant", type=_parse_variant, default=ReductionVariant.GLOBAL_PROJECTOR)
    p.add_argument("-o", "--output", required=True)

    p = sub.add_parser("decide", help="ground-truth verdict by diagonalization")
    p.add_argument("instance")
    p.add_argument("--problem", choices=["klh", "gap"], default=None,
                   help="default: gap when the file has reduction metadata, else klh")

    p = sub.add_parser("search", help="oracle-driven gap decision")
    p.add_argument("instance")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--policy", type=_parse_policy, default=AllYes())
    p.add_argument("--exhaustive", action="store_true",
                   help="also check the decision under every adversary policy")

    p = sub.add_parser("flatten", help="adaptive-to-parallel query conversion demo")
    p.add_argument("instance")
    p.add_argument("--demo", choices=["binary-search"], default="binary-search")
    p.add_argument("--rounds", type=int, default=4)

    p = sub.add_parser("verify", help="run the full verification pipeline")
    p.add_argument("--n", default="2,3,4", help="comma-separated qubit counts")
    p.add_argument("--instances-per-n", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--variant", choices=["global", "hamming", "both"], default="both")
    p.add_argument("--eps", type=float, default=1 / 12)
    p.add_argument("--exhaustive", action="store_true")
    p.add_argument("-o", "--output", default=None, help="write the JSONL report here")

    return parser


def _cmd_gen(args) -> int:
    if args.index is not None:
        inst = generate_instance(args.n, args.index, args.seed, args.a, args.b, args.c)
    else:
        m = args.terms if args.terms is not None else 3 * args.n
        h = random_instance(args.n, args.k, m, args.seed)
        inst = KlhInstance(h, args.a, args.b, args.c)
    write_instance(inst, args.output)
    print(f"wrote {args.output} (n={inst.hamiltonian.n}, terms={len(inst.hamiltonian.terms)})")
    return 0


def _cmd_spectrum(args) -> int:
    inst = read_instance(args.instance)
    h = inst.hamiltonian
    if args.gap:
        print(f"{spectral_gap(h):.12g}")
    elif args.lambda_c is not None:
        print(f"{lambda_c(h, args.lambda_c):.12g}")
    else:
        for value in eigenvalues(h).eigenvalues:
            print(f"{value:.12g}")
    return 0


def _cmd_reduce(args) -> int:
    inst = read_instance(args.instance, kind="klh")
    out = reduce_klh_to_gap(inst, args.variant)
    meta = {"variant": args.variant.value, "ancilla_index": out.ancilla_index,
            "null_state_index": out.null_state_index}
    write_instance(out.instance, args.output, meta=meta)
    print(
        f"wrote {args.output} (n={out.instance.hamiltonian.n}, "
        f"terms={len(out.instance.hamiltonian.terms)}, ancilla={out.ancilla_index})"
    )
    return 0


def _cmd_decide(args) -> int:
    problem = args.problem
    if problem is None:
        problem = "gap" if read_meta(args.instance) else "klh"
    inst = read_instance(args.instance, kind=problem)
    from .spectrum import decide_gap_truth, decide_klh_truth

    if problem == "gap":
        verdict = decide_gap_truth(inst)
    else:
        verdict = decide_klh_truth(inst)
    print(verdict.value.upper())
    return 0


def _cmd_search(args) -> int:
    inst = read_instance(args.instance, kind="gap")
    cfg = default_search_config(inst, args.eps)
    decision = decide_gap_via_oracle(inst, cfg, args.policy)
    print(f"decision      {decision.verdict.value.upper()}")
    print(f"lambda1 in    [{decision.lambda1[0]:.12g}, {decision.lambda1[1]:.12g}]")
    print(f"lambda2 in    [{decision.lambda2[0]:.12g}, {decision.lambda2[1]:.12g}]")
    print(f"gap estimate  <= {decision.gap_upper_estimate:.12g}")
    print(f"queries used  {decision.queries_used} (budget {2 * query_budget(cfg)})")
    if args.exhaustive:
        machine = adaptive_gap_decider(inst, cfg)
        try:
            result = check_robustness(machine)
            mode = "exhaustive"
        except TooManyInvalidError:
            result = check_robustness_sampled(machine)
            mode = f"sampled({result.policies_checked})"
        print(
            f"robustness    {'same answer under every adversary' if result.invariant_holds else 'ADVERSARY-DEPENDENT'}"
            f" [{mode}, {result.policies_checked} policies]"
        )
        if not result.invariant_holds:
            return 1
    return 0


def _cmd_flatten(args) -> int:
    inst = read_instance(args.instance, kind="gap")
    m = len(inst.hamiltonian.terms)
    cfg = rounds_config(0.0, float(max(1, m)), args.rounds)
    machine = single_search_machine(inst.hamiltonian, 1, cfg, inst.b)
    program = flatten(machine)
    internal, leaves, depth = tree_stats(program.root)
    print(f"rounds            {depth}")
    print(f"queries (tree)    {internal}")
    print(f"queries (dedup)   {len(program.queries)}")
    print(f"paths             {leaves}")
    try:
        result = check_robustness(machine)
        mode = "exhaustive"
    except TooManyInvalidError:
        result = check_robustness_sampled(machine)
        mode = f"sampled({result.policies_checked})"
    print(
        f"robustness        {'same answer under every adversary' if result.invariant_holds else 'ADVERSARY-DEPENDENT'}"
        f" [{mode}]"
    )
    return 0


def _cmd_verify(args) -> int:
    try:
        n_list = tuple(int(x) for x in args.n.split(",") if x.strip())
    except ValueError:
        print(f"--n must be comma-separated integers, got {args.n!r}", file=sys.stderr)
        return 2
    if args.variant == "both":
        variants = (ReductionVariant.GLOBAL_PROJECTOR, ReductionVariant.HAMMING_PENALTY)
    else:
        variants = (ReductionVariant(args.variant),)
    cfg = VerifyConfig(
        n_list=n_list,
        instances_per_n=args.instances_per_n,
        seed=args.seed,
        variants=variants,
        eps=args.eps,
        exhaustive_adversaries=args.exhaustive,
    )
    report = run_verify(cfg)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(report.to_jsonl())
    print(report.summary_text())
    return 0 if report.ok else 1


_HANDLERS = {
    "gen": _cmd_gen,
    "spectrum": _cmd_spectrum,
    "reduce": _cmd_reduce,
    "decide": _cmd_decide,
    "search": _cmd_search,
    "flatten": _cmd_flatten,
    "verify": _cmd_verify,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except GapforgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
