#!/usr/bin/env python3

"""
cyclo-slv command-line tool
This script runs divisor profiles, lower bounds, SLV certificates, vanishing-sum
censuses and Favard length tables, and writes their artifacts.
"""

import sys
import argparse
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
import yaml

# Add project root to Python path
sys.path.append(str(Path(__file__).parent))

from cyclo_slv.bounds import lam_leung_check, multi_prime_bound, small_card_candidates, small_card_split, two_prime_bound
from cyclo_slv.certificates import certificate_from_json, certificate_to_json, verify_certificate
from cyclo_slv.constructions import (
    admissible_instance,
    example_two_scale,
    long_fiber,
    long_fiber_divisors,
    one_scale_many_primes,
    random_fiber_sum,
    three_prime_example,
    xi_example,
)
from cyclo_slv.core import ScaleGuards, parse_int_list, parse_rational
from cyclo_slv.cyclo import divisor_profile, good_bad_split, single_prime_split
from cyclo_slv.exceptions import PreconditionError
from cyclo_slv.favard import CantorProductSpec, favard_table, slv_value_check
from cyclo_slv.multiset import Multiset
from cyclo_slv.reports import census_frame, favard_frame, generate_census_summary, gnuplot_columns, minimal_weights
from cyclo_slv.slv import build_gamma_A, multiscale_gamma, naive_single_cluster, split_by_prime_partition
from cyclo_slv.sums import admissible_structures, census, construct_Rp, construct_RpkRq
from utils.command import OperationRunner
from utils.config import Config
from utils.constants import DEFAULT_CONFIG_FILE, EXIT_OK, EXIT_PRECONDITION, SUBCOMMANDS
from utils.filesystem import create_directories, dump_json, read_json, write_csv, write_json, write_jsonl, write_text
from utils.logging_config import setup_logging

EXAMPLE_NAMES = ["two-scale", "long-fiber", "three-prime", "one-scale", "xi", "random-fiber"]


@dataclass
class CommandOutput:
    """Primary output of a subcommand: a JSON payload, optional plain text, and the exit code"""
    payload: Dict[str, Any]
    text: Optional[str] = None
    exit_code: int = EXIT_OK


@dataclass
class RunContext:
    config: Config
    guards: ScaleGuards
    seed: int
    n_jobs: int

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)


def _add_multiset_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--input", help="JSON file holding a multiset, or a construct output")
    parser.add_argument("--modulus", type=int, help="Modulus M when giving residues directly")
    parser.add_argument("--residues", help="Comma-separated residues of a set in Z_M")
    parser.add_argument("--L", dest="L", type=int, help="Copriming modulus L")


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    """Parse command line arguments."""
    parser = argparse.ArgumentParser(prog="cyclo-slv", description="Cyclotomic divisibility and SLV toolkit")
    parser.add_argument("--config", default=DEFAULT_CONFIG_FILE, help="YAML configuration file")
    parser.add_argument("--json", action="store_true", help="Machine-readable JSON on stdout")
    parser.add_argument("--seed", type=int, help="Random seed (overrides run.seed)")
    parser.add_argument("--n-jobs", type=int, help="joblib workers (overrides parallel.n_jobs)")
    parser.add_argument("--log-file", help="Log file; an empty string disables file logging")
    parser.add_argument("--verbose", action="store_true", help="Log at DEBUG level")

    subparsers = parser.add_subparsers(dest="command", required=True, metavar="{" + ",".join(SUBCOMMANDS) + "}")

    profile = subparsers.add_parser("profile", help="Divisor profile and good/bad split")
    _add_multiset_arguments(profile)
    profile.add_argument("--no-split", action="store_true", help="Skip the literal mask factorization")

    bound = subparsers.add_parser("bound", help="Check a lower bound on |A|")
    _add_multiset_arguments(bound)
    kind = bound.add_mutually_exclusive_group(required=True)
    kind.add_argument("--lam-leung", action="store_true", help="Is k a nonnegative combination of the primes?")
    kind.add_argument("--two-prime", action="store_true", help="|A| >= p^E_p from Phi_{m_j} | A")
    kind.add_argument("--multi-prime", action="store_true", help="|A| >= p_1...p_I from Phi_{p_i m} | A")
    kind.add_argument("--small-card", action="store_true", help="Find p_1 with p_1^E_1 < |A|")
    bound.add_argument("--k", type=int, help="Weight for --lam-leung")
    bound.add_argument("--primes", help="Comma-separated primes")
    bound.add_argument("--p", type=int, help="Counted prime for --two-prime")
    bound.add_argument("--q", type=int, help="Other prime for --two-prime")
    bound.add_argument("--divisors", help="Comma-separated m_j for --two-prime")
    bound.add_argument("--m", type=int, help="Base scale for --multi-prime")

    slv = subparsers.add_parser("slv", help="Build and certify Gamma_A")
    _add_multiset_arguments(slv)
    slv.add_argument("--prime", type=int, help="Cluster prime (default: minimizes p^E_p)")
    slv.add_argument("--lambda", dest="lam", help="Rational lambda in (0, 1/p)")
    slv.add_argument("--partition", help="Comma-separated primes for a manual split of S_A")
    slv.add_argument("--naive-q", type=int, help="Also report the single-cluster ceiling at this Q")
    slv.add_argument("--emit-cert", help="Write the certificate to this file")
    slv.add_argument("--multiscale-m", type=int, help="Also build the multiscale set with m scales")
    slv.add_argument("--cert-b", help="Certificate for B (default: the certificate for A)")
    slv.add_argument("--t", default="1", help="Rational t in [1/2, 1]")
    slv.add_argument("--R", dest="R", type=int, help="Integer R > 1/t (default: smallest admissible)")
    slv.add_argument("--value-samples", type=int, default=0, help="Sampled check of the product bound")

    verify = subparsers.add_parser("verify", help="Independently re-check a certificate file")
    verify.add_argument("certificate", help="Certificate JSON file")

    census_parser = subparsers.add_parser("census", help="Enumerate and classify vanishing sums")
    census_parser.add_argument("--N", dest="N", type=int, required=True, help="Order of the roots of unity")
    census_parser.add_argument("--kmax", type=int, required=True, help="Maximum weight")
    census_parser.add_argument("--output-dir", help="Write census.csv, summary.csv and sums.jsonl here")

    favard = subparsers.add_parser("favard", help="Favard length decay table")
    favard.add_argument("--digits-a", default="0,3", help="Digit set A (default: four-corner)")
    favard.add_argument("--digits-b", default="0,3", help="Digit set B (default: four-corner)")
    favard.add_argument("--nmax", type=int, default=6, help="Largest iteration depth")
    favard.add_argument("--nmin", type=int, default=1, help="Smallest iteration depth")
    favard.add_argument("--nodes", type=int, help="Quadrature nodes (overrides favard.nodes)")
    favard.add_argument("--output", help="CSV output file")
    favard.add_argument("--plot-data", action="store_true", help="Print gnuplot-ready columns")
    favard.add_argument("--plot-file", help="Also write gnuplot-ready columns to this file")

    construct = subparsers.add_parser("construct", help="Generate example sets and vanishing sums")
    what = construct.add_mutually_exclusive_group(required=True)
    what.add_argument("--example", choices=EXAMPLE_NAMES, help="Worked example family")
    what.add_argument("--template", choices=["Rp", "RpkRq"], help="Minimal vanishing-sum template")
    what.add_argument("--admissible", type=int, metavar="CARD", help="Small vanishing set with |A| = CARD")
    construct.add_argument("--p", type=int, default=2)
    construct.add_argument("--q", type=int, default=3)
    construct.add_argument("--r", type=int, default=5)
    construct.add_argument("--exp", type=int, default=2, help="Exponent e of the two-scale example")
    construct.add_argument("--alphas", default="1", help="Comma-separated p-exponents of a long fiber")
    construct.add_argument("--beta", type=int, default=1, help="q-exponent of a long fiber")
    construct.add_argument("--M", dest="M", type=int, help="Modulus of the three-prime example")
    construct.add_argument("--N", dest="N", type=int, default=30, help="Modulus for templates and small sets")
    construct.add_argument("--k", type=int, default=1, help="k of (R_p:kR_q)")
    construct.add_argument("--index", type=int, default=0, help="Which admissible structure to instantiate")
    construct.add_argument("--random", action="store_true", help="Place fibers at random (seeded)")
    construct.add_argument("--output", help="Write the construction to this JSON file")

    return parser.parse_args(argv)


def _load_multiset(args: argparse.Namespace) -> Multiset:
    if args.input:
        data = read_json(args.input)
        if data is None:
            raise PreconditionError(f"cannot read multiset from {args.input}")
        if isinstance(data, dict) and "multiset" in data:
            data = data["multiset"]
        return Multiset.from_json(data)
    if args.modulus and args.residues:
        return Multiset.from_residues(args.modulus, parse_int_list(args.residues))
    raise PreconditionError("give --input, or --modulus with --residues")


def _require(value: Any, flag: str) -> Any:
    if value is None:
        raise PreconditionError(f"{flag} is required here")
    return value


def cmd_profile(args: argparse.Namespace, ctx: RunContext) -> CommandOutput:
    A = _load_multiset(args)
    profile = divisor_profile(A, _require(args.L, "--L"), ctx.guards)
    split = single_prime_split(profile)
    payload = {
        "profile": profile.to_json(),
        "single_prime_split": None if split is None else list(split),
    }
    if not args.no_split:
        payload["good_bad_split"] = good_bad_split(A, profile.L, ctx.guards).to_json()
    return CommandOutput(payload)


def cmd_bound(args: argparse.Namespace, ctx: RunContext) -> CommandOutput:
    if args.lam_leung:
        k = _require(args.k, "--k")
        primes = parse_int_list(_require(args.primes, "--primes"))
        representation = lam_leung_check(k, primes)
        return CommandOutput({
            "k": k,
            "primes": primes,
            "representable": representation is not None,
            "representation": None if representation is None else list(representation),
        })

    A = _load_multiset(args)
    if args.two_prime:
        divisors = parse_int_list(_require(args.divisors, "--divisors"))
        report = two_prime_bound(A, _require(args.p, "--p"), _require(args.q, "--q"), divisors)
        return CommandOutput(report.require_satisfied().to_json())
    if args.multi_prime:
        primes = parse_int_list(_require(args.primes, "--primes"))
        report = multi_prime_bound(A, _require(args.m, "--m"), primes, ctx.n_jobs, ctx.guards)
        return CommandOutput(report.require_satisfied().to_json())

    profile = divisor_profile(A, _require(args.L, "--L"), ctx.guards)
    p = small_card_split(A, profile, strict=False)
    split = single_prime_split(profile)
    return CommandOutput({
        "cardinality": profile.cardinality,
        "S_A": list(profile.S_A),
        "p_1": p,
        "E_1": None if p is None else profile.E(p),
        "candidates": [list(c) for c in small_card_candidates(A, profile)],
        "single_prime_split": None if split is None else list(split),
    })


def cmd_slv(args: argparse.Namespace, ctx: RunContext) -> CommandOutput:
    A = _load_multiset(args)
    profile = divisor_profile(A, _require(args.L, "--L"), ctx.guards)
    if args.partition:
        cert = split_by_prime_partition(A, profile, parse_int_list(args.partition), guards=ctx.guards)
    else:
        lam = None if args.lam is None else parse_rational(args.lam)
        cert = build_gamma_A(A, profile, p=args.prime, lam=lam, guards=ctx.guards)
    document = certificate_to_json(cert)
    if args.emit_cert and not write_json(document, args.emit_cert):
        raise PreconditionError(f"cannot write certificate to {args.emit_cert}")
    payload: Dict[str, Any] = {"certificate": document}

    if args.naive_q:
        payload["naive_single_cluster"] = naive_single_cluster(profile, args.naive_q).to_json()

    if args.multiscale_m:
        cert_b = cert
        if args.cert_b:
            data = read_json(args.cert_b)
            if data is None:
                raise PreconditionError(f"cannot read certificate {args.cert_b}")
            cert_b = certificate_from_json(data)
        epsilon = parse_rational(ctx.config.get("slv.epsilon"))
        samples = int(ctx.config.get("slv.phi_samples"))
        result = multiscale_gamma(
            cert, cert_b, parse_rational(args.t), args.multiscale_m, profile.L,
            R=args.R, epsilon=epsilon, samples=samples if args.value_samples else None, guards=ctx.guards
        )
        payload["multiscale"] = result.to_json()
        if args.value_samples:
            report = slv_value_check(cert, cert_b, result, args.value_samples, ctx.rng(), samples)
            payload["value_check"] = report.to_json()
    return CommandOutput(payload)


def cmd_verify(args: argparse.Namespace, ctx: RunContext) -> CommandOutput:
    data = read_json(args.certificate)
    if not isinstance(data, dict):
        raise PreconditionError(f"cannot read certificate {args.certificate}")
    result = verify_certificate(data)
    return CommandOutput(result.to_json(), exit_code=EXIT_OK if result.ok else EXIT_PRECONDITION)


def cmd_census(args: argparse.Namespace, ctx: RunContext) -> CommandOutput:
    entries = census(args.N, args.kmax, n_jobs=ctx.n_jobs, guards=ctx.guards)
    df = census_frame(entries)
    summary = generate_census_summary(df)
    if args.output_dir:
        dirs = create_directories(args.output_dir, {"census": "."})
        written = [
            write_csv(df, str(Path(dirs["census"]) / "census.csv")),
            write_csv(summary, str(Path(dirs["census"]) / "summary.csv")),
            write_jsonl((e.to_json() for e in entries), str(Path(dirs["census"]) / "sums.jsonl")),
        ]
        if not all(written):
            raise PreconditionError(f"cannot write census artifacts to {args.output_dir}")
    payload = {
        "N": args.N,
        "kmax": args.kmax,
        "total": len(entries),
        "minimal_weights": minimal_weights(df),
        "summary": [
            {"weight": int(w), "template": str(t), "count": int(c)}
            for w, t, c in zip(summary["weight"], summary["template"], summary["count"])
        ],
    }
    return CommandOutput(payload, text=summary.to_string(index=False) + "\n")


def cmd_favard(args: argparse.Namespace, ctx: RunContext) -> CommandOutput:
    spec = CantorProductSpec(tuple(parse_int_list(args.digits_a)), tuple(parse_int_list(args.digits_b)))
    if not 0 <= args.nmin <= args.nmax:
        raise PreconditionError(f"need 0 <= nmin <= nmax, got {args.nmin}, {args.nmax}")
    nodes = args.nodes or int(ctx.config.get("favard.nodes"))
    chunk_size = int(ctx.config.get("favard.chunk_size"))
    estimates = favard_table(spec, range(args.nmin, args.nmax + 1), nodes, ctx.n_jobs, chunk_size, ctx.guards)
    df = favard_frame(estimates)
    if args.output and not write_csv(df, args.output):
        raise PreconditionError(f"cannot write {args.output}")
    if args.plot_file and not write_text(gnuplot_columns(df), args.plot_file):
        raise PreconditionError(f"cannot write {args.plot_file}")
    text = gnuplot_columns(df) if args.plot_data else df.to_string(index=False) + "\n"
    payload = {"spec": spec.to_json(), "table": [e.to_json() for e in estimates]}
    return CommandOutput(payload, text=text)


def _construct_example(args: argparse.Namespace, ctx: RunContext) -> Dict[str, Any]:
    name = args.example
    divisors = None
    if name == "two-scale":
        A = example_two_scale(args.p, args.q, args.exp)
    elif name == "long-fiber":
        alphas = parse_int_list(args.alphas)
        A = long_fiber(args.p, args.q, alphas, args.beta)
        divisors = long_fiber_divisors(args.p, args.q, alphas, args.beta)
    elif name == "three-prime":
        A = three_prime_example(args.p, args.q, args.r, args.M)
    elif name == "one-scale":
        A = one_scale_many_primes()
    elif name == "xi":
        A = xi_example(args.N)
    else:
        A, divisors = random_fiber_sum(args.p, args.q, parse_int_list(args.alphas), args.beta, ctx.rng())
    return {"example": name, "multiset": A.to_json(), "cardinality": A.total_weight(), "divisors": divisors}


def cmd_construct(args: argparse.Namespace, ctx: RunContext) -> CommandOutput:
    if args.example:
        payload = _construct_example(args, ctx)
    elif args.template:
        v = construct_Rp(args.N, args.p) if args.template == "Rp" else construct_RpkRq(args.N, args.p, args.q, args.k)
        payload = {"template": args.template, "multiset": v.multiset.to_json(), "cardinality": v.weight}
    else:
        structures = admissible_structures(args.admissible, args.N)
        if not 0 <= args.index < len(structures):
            raise PreconditionError(f"{len(structures)} structures of cardinality {args.admissible} fit Z_{args.N}")
        structure = structures[args.index]
        A = admissible_instance(structure, args.N, ctx.rng() if args.random else None)
        payload = {"structure": structure.to_json(), "multiset": A.to_json(), "cardinality": A.total_weight()}
    if args.output and not write_json(payload, args.output):
        raise PreconditionError(f"cannot write {args.output}")
    return CommandOutput(payload)


COMMANDS = {
    "profile": cmd_profile,
    "bound": cmd_bound,
    "slv": cmd_slv,
    "verify": cmd_verify,
    "census": cmd_census,
    "favard": cmd_favard,
    "construct": cmd_construct,
}


def _render(output: CommandOutput, as_json: bool) -> str:
    if as_json:
        return dump_json(output.payload)
    if output.text is not None:
        return output.text
    return yaml.safe_dump(output.payload, sort_keys=True, default_flow_style=False)


def main(argv: Optional[List[str]] = None) -> int:
    """
    Run one subcommand and return its exit code

    Exit codes: 0 success, 1 precondition violation or rejected certificate,
    2 falsification event.
    """
    args = parse_args(argv)
    config = Config(args.config)

    log_file = args.log_file if args.log_file is not None else config.get("logging.file")
    level = "DEBUG" if args.verbose else config.get("logging.level", "INFO")
    logger = setup_logging(log_file=log_file or None, level=level)

    ok, errors = config.validate()
    if not ok:
        print(dump_json({"error": "ConfigurationError", "message": "; ".join(errors)}), end="")
        return EXIT_PRECONDITION

    seed = args.seed if args.seed is not None else int(config.get("run.seed"))
    n_jobs = args.n_jobs if args.n_jobs is not None else int(config.get("parallel.n_jobs"))
    ctx = RunContext(config, config.scale_guards(), seed, n_jobs)

    runner = OperationRunner({"command": args.command, "seed": seed})
    result = runner.run(COMMANDS[args.command], [args, ctx], {}, f"{args.command} command")
    if not result.ok:
        print(dump_json(result.error), end="")
        return result.exit_code

    output: CommandOutput = result.value
    print(_render(output, args.json), end="")
    if output.exit_code != EXIT_OK:
        logger.error(f"{args.command} finished with exit code {output.exit_code}")
    return output.exit_code


if __name__ == "__main__":
    sys.exit(main())
