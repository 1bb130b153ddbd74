# app/app.py
# Command-line launcher: `python -m app.app <subcommand> ...`.
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from app.config import RunConfig
from app.decomp.decompose import decompose
from app.embed.dense import dense_embed
from app.embed.embedding import CubeEmbedding
from app.embed.matching import PartitionWithException, matching_dichotomy, verdict_matrix
from app.errors import RamseyCubeError
from app.graph.coloured import ColouredGraph, VertexSet
from app.graph.constructions import extremal_colouring
from app.graph.search import CliqueWitness
from app.io.certificates import Certificate, format_certificate, format_family, format_trace, load_certificate
from app.io.decode import format_crg, load_crg, load_h
from app.oracle.search import TARGETS, ramsey_decide
from app.oracle.validators import certify_lower_bound, validate_clique, validate_embedding
from app.stability.general import h_profile, lower_bound_colouring
from app.stability.partition import NoCertificateRequired, StabilityPartition, ramsey_main, validate_stability

logger = logging.getLogger("app")

EXIT_OK, EXIT_INVALID, EXIT_PIPELINE = 0, 1, 3


class JsonLineFormatter(logging.Formatter):
    def format(self, record: logging.LogRecord) -> str:
        entry = {"level": record.levelname, "logger": record.name, "message": record.getMessage()}
        if record.exc_info:
            entry["exception"] = self.formatException(record.exc_info)
        return json.dumps(entry)


def setup_logging(verbose: bool) -> None:
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(JsonLineFormatter())
    logging.basicConfig(level=logging.DEBUG if verbose else logging.WARNING, handlers=[handler], force=True)


def _emit(text: str, path: Optional[str]) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="ascii", newline="\n")


def _config(args) -> RunConfig:
    cfg = RunConfig.load(getattr(args, "config", None)).with_seed(getattr(args, "seed", None))
    overrides = {k: getattr(args, k) for k in ("s", "n") if getattr(args, k, None) is not None}
    if overrides:
        cfg = RunConfig.from_dict({**_as_dict(cfg), **overrides})
    return cfg


def _as_dict(cfg: RunConfig) -> dict:
    return {name: getattr(cfg, name) for name in cfg.__dataclass_fields__}


def _partition_certificate(g: ColouredGraph, P: PartitionWithException) -> list[VertexSet]:
    bodies = [VertexSet(sum(U.mask for U in sets)) - P.X for sets in P.parts]
    placed = 0
    for S in bodies:
        placed |= S.mask
    return [VertexSet(g.full_mask & ~placed)] + bodies


# -------- subcommands --------
def cmd_construct_extremal(args) -> int:
    if args.h_file:
        g = lower_bound_colouring(h_profile(load_h(args.h_file)), args.n)
    else:
        g = extremal_colouring(args.s, args.n)
    _emit(format_crg(g), args.output)
    return EXIT_OK


def cmd_decompose(args) -> int:
    cfg = _config(args)
    g = load_crg(args.input)
    result = decompose(
        g, cfg.decompose_epsilon(), cfg.s, cfg.size_schedule(g.n_vertices),
        cfg.seed, budget=cfg.family_budget,
    )
    _emit(format_family(result.family), args.output)
    if args.trace:
        Path(args.trace).write_text(format_trace(result.trace), encoding="ascii", newline="\n")
    return EXIT_OK


def cmd_embed(args) -> int:
    cfg = _config(args)
    g = load_crg(args.input)
    n = cfg.n
    cert: Certificate
    if args.strategy == "dense":
        cert = dense_embed(g, n, cfg.dense_params(n), cfg.seed)
    elif args.strategy == "path":
        dec = decompose(g, cfg.decompose_epsilon(), cfg.s,
                        cfg.size_schedule(g.n_vertices), cfg.seed, budget=cfg.family_budget)
        params = cfg.match_params(n)
        if args.verdicts:
            matrix = verdict_matrix(g, dec.family.sets, params)
            Path(args.verdicts).write_text(matrix.export(), encoding="ascii", newline="\n")
        result = matching_dichotomy(g, dec.family.sets, n, params, cfg.seed)
        cert = _partition_certificate(g, result) if isinstance(result, PartitionWithException) else result
    else:
        result = ramsey_main(g, cfg.s, n, cfg.stability_params(n, g.n_vertices), cfg.seed, args.any_size)
        if isinstance(result, NoCertificateRequired):
            print(f"no certificate required: {result.n_vertices} < {result.threshold} vertices")
            return EXIT_OK
        cert = result
    _emit(format_certificate(cert), args.output)
    return EXIT_OK


def cmd_verify(args) -> int:
    g = load_crg(args.input)
    if args.cert is None:
        if args.n is None or (args.s is None) == (args.h_file is None):
            raise SystemExit("verify without --cert needs --n and exactly one of --s or --h-file")
        h = load_h(args.h_file) if args.h_file else None
        report = certify_lower_bound(g, args.n, s=args.s, h=h)
        problems = report.problems
    else:
        cert = load_certificate(args.cert)
        if isinstance(cert, CubeEmbedding):
            problems = validate_embedding(g, cert).problems
        elif isinstance(cert, CliqueWitness):
            problems = validate_clique(g, cert, args.s).problems
        else:
            cfg = _config(args)
            P = StabilityPartition(cfg.n, cert)
            problems = validate_stability(g, P, cfg.n, cfg.stability_params(cfg.n))
    if problems:
        for p in problems:
            print(f"invalid: {p}")
        return EXIT_INVALID
    print("valid")
    return EXIT_OK


def cmd_ramsey_search(args) -> int:
    cfg = RunConfig.load(args.config)
    budget = cfg.oracle_budget if args.budget is None else args.budget
    workers = cfg.workers if args.workers is None else args.workers
    iso_cutoff = cfg.iso_cutoff if args.iso_cutoff is None else args.iso_cutoff
    verdict = ramsey_decide(args.s, args.target, args.N, budget, workers, iso_cutoff)
    if verdict.holds:
        print("holds")
        return EXIT_OK
    print("counterexample")
    if args.output:
        Path(args.output).write_text(format_crg(verdict.counterexample), encoding="ascii", newline="\n")
    return EXIT_INVALID


def cmd_profile_h(args) -> int:
    profile = h_profile(load_h(args.h_file))
    print(f"chi {profile.chi}")
    print(f"sigma {profile.sigma}")
    return EXIT_OK


# -------- parser --------
def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ramsey-cube", description="Red hypercubes versus blue cliques.")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct-extremal", help="write the lower-bound colouring")
    p.add_argument("--s", type=int, default=3)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--h-file", help="pattern graph H; builds its lower bound instead of K_s")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_construct_extremal)

    p = sub.add_parser("decompose", help="write the almost-partition family")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--config")
    p.add_argument("--seed", type=int)
    p.add_argument("--s", type=int)
    p.add_argument("-o", "--output")
    p.add_argument("--trace", help="file for the induction trace")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("embed", help="find a red Q_n or a blue K_s")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--config")
    p.add_argument("--seed", type=int)
    p.add_argument("--s", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--strategy", choices=("dense", "path", "full"), default="full")
    p.add_argument("--verdicts", help="write the good/bad pair matrix (path strategy)")
    p.add_argument("--any-size", action="store_true", help="accept colourings of other sizes")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("verify", help="check a certificate or a lower-bound colouring")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--cert")
    p.add_argument("--config")
    p.add_argument("--s", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--h-file")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("ramsey-search", help="exhaustive small Ramsey verdict")
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--target", choices=sorted(TARGETS), required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--config")
    p.add_argument("--budget", type=int, help="search nodes; default from the config")
    p.add_argument("--workers", type=int)
    p.add_argument("--iso-cutoff", type=int)
    p.add_argument("-o", "--output", help="file for a counterexample colouring")
    p.set_defaults(func=cmd_ramsey_search)

    p = sub.add_parser("profile-h", help="chromatic number and smallest colour class of H")
    p.add_argument("--h-file", required=True)
    p.set_defaults(func=cmd_profile_h)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.verbose)
    try:
        return args.func(args)
    except SystemExit as exc:
        if isinstance(exc.code, str):
            parser.error(exc.code)
        raise
    except RamseyCubeError as err:
        sys.stderr.write(json.dumps(err.to_record()) + "\n")
        return EXIT_PIPELINE


if __name__ == "__main__":
    sys.exit(main())
