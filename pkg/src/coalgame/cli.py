"""Command-line surface for batch analyses of game-spec files.

Exit codes are stable API: 0 success, 1 spec error, 2 cap overflow,
3 failed check, 4 rejected certificate, 5 property undefined for the family.
All randomness flows from an explicit --seed flag, so every command is
deterministic given its input bytes and flags.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

from . import fixtures
from .core import Direction, Game, PERMUTATION_CAP, PROFILE_CAP, optimum
from .dynamics import (
    CHAIN_STATE_CAP,
    build_chain,
    empirical_bound_check,
    run_coalitional,
    run_unilateral,
    sink_equilibria,
)
from .equilibria import efficiency_ratios
from .errors import (
    CoalGameError,
    Incomparable,
    MissingOutStrategy,
    MissingPotential,
    NotMultisetExtendable,
    RejectedCertificate,
    SpecError,
    StateSpaceTooLarge,
    UnsupportedProperty,
)
from .games import load_game_file
from .smoothness import (
    SmoothnessCertificate,
    check_coalitional_smoothness,
    check_monotone_participation,
    check_positive_externalities,
    check_potential_submodularity,
    check_unilateral_smoothness,
    fit_coalitional_smoothness,
    fit_unilateral_smoothness,
    marginal_contribution_gamma,
    potential_closeness,
    verify_potential,
)

EXIT_OK = 0
EXIT_SPEC = 1
EXIT_CAPS = 2
EXIT_CHECK_FAILED = 3
EXIT_CERTIFICATE = 4
EXIT_UNDEFINED = 5


def _emit(text: str, output: str | None) -> None:
    if output is None or output == "-":
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        Path(output).write_text(text if text.endswith("\n") else text + "\n", encoding="utf-8")


def _json(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True)


def _parse_profile(text: str) -> tuple[int, ...]:
    parts = text.replace(",", "-").split("-")
    return tuple(int(p) for p in parts if p != "")


def _load(path: str) -> Game:
    return load_game_file(path)


def cmd_analyze(args: argparse.Namespace) -> int:
    game = _load(args.game)
    report = efficiency_ratios(game, cap=args.profile_cap, include_witnesses=args.witnesses)
    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["profile", "welfare", "is_nash", "is_strong_nash"])
        for profile, welfare, is_n, is_s in report.csv_rows():
            writer.writerow([profile, repr(welfare), is_n, is_s])
        _emit(buf.getvalue(), args.output)
    else:
        _emit(_json(report.to_json_dict()), args.output)
    return EXIT_OK


def cmd_smoothness(args: argparse.Namespace) -> int:
    game = _load(args.game)
    anchor = None
    anchor_search = False
    if args.anchor == "search":
        anchor_search = True
    elif args.anchor not in (None, "opt"):
        anchor = _parse_profile(args.anchor)

    if args.fit:
        fit = fit_coalitional_smoothness if args.kind == "coalitional" else fit_unilateral_smoothness
        kwargs = dict(anchor_search=anchor_search, cap=args.profile_cap)
        if args.kind == "coalitional":
            kwargs.update(perm_cap=args.perm_cap, sample_perms=args.sample_perms, seed=args.seed)
        cert = fit(game, anchor, **kwargs)
        _emit(_json(cert.to_json_dict()), args.output)
        return EXIT_OK

    if args.lam is None or args.mu is None:
        raise SpecError("$", "--check needs both --lambda and --mu")
    if args.kind == "coalitional":
        cert = check_coalitional_smoothness(
            game, anchor, args.lam, args.mu,
            cap=args.profile_cap, perm_cap=args.perm_cap,
            sample_perms=args.sample_perms, seed=args.seed,
        )
    else:
        cert = check_unilateral_smoothness(game, anchor, args.lam, args.mu, cap=args.profile_cap)
    _emit(_json(cert.to_json_dict()), args.output)
    return EXIT_OK if cert.verified else EXIT_CHECK_FAILED


def cmd_dynamics(args: argparse.Namespace) -> int:
    game = _load(args.game)
    initial = _parse_profile(args.initial) if args.initial else None
    runner = run_coalitional if args.mode == "coalitional" else run_unilateral
    trace = runner(game, args.steps, args.seed, initial=initial, cap=args.profile_cap)
    _emit(trace.to_csv(), args.output)
    return EXIT_OK


def cmd_sinks(args: argparse.Namespace) -> int:
    game = _load(args.game)
    certificate = None
    if args.cert:
        try:
            doc = json.loads(Path(args.cert).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise SpecError("$", f"cannot read certificate {args.cert}: {exc}") from exc
        certificate = SmoothnessCertificate.from_json_dict(doc)
    chain = build_chain(game, state_cap=args.chain_cap)
    analysis = sink_equilibria(game, certificate=certificate, chain=chain)
    _emit(_json(analysis.to_json_dict()), args.output)
    return EXIT_OK


PROPERTIES = (
    "potential",
    "closeness",
    "monotone",
    "positive-externalities",
    "marginal-gamma",
    "submodular",
)


def cmd_check(args: argparse.Namespace) -> int:
    game = _load(args.game)
    prop = args.property
    doc: dict
    ok = True
    if prop == "potential":
        ok, witness = verify_potential(game, cap=args.profile_cap)
        doc = {"property": prop, "holds": ok}
        if witness is not None:
            profile, player, target, du, dphi = witness
            doc["witness"] = {
                "profile": list(profile), "player": player, "target": target,
                "payoff_delta": du, "potential_delta": dphi,
            }
    elif prop == "closeness":
        lam, mu = potential_closeness(game, cap=args.profile_cap)
        doc = {"property": prop, "lambda": lam, "mu": mu}
    elif prop == "monotone":
        ok, witness = check_monotone_participation(game, cap=args.profile_cap)
        doc = {"property": prop, "holds": ok}
        if witness is not None:
            doc["witness"] = {"profile": list(witness[0]), "player": witness[1]}
    elif prop == "positive-externalities":
        ok, witness = check_positive_externalities(game, cap=args.profile_cap)
        doc = {"property": prop, "holds": ok}
        if witness is not None:
            doc["witness"] = {
                "profile": list(witness[0]), "observer": witness[1], "leaver": witness[2],
            }
    elif prop == "marginal-gamma":
        gamma = marginal_contribution_gamma(game, cap=args.profile_cap)
        doc = {"property": prop, "gamma": "inf" if math.isinf(gamma) else gamma}
    elif prop == "submodular":
        ok, witness = check_potential_submodularity(game, multiplicity_cap=args.cap)
        doc = {"property": prop, "holds": ok}
        if witness is not None:
            doc["witness"] = {
                "condition": witness.condition,
                "s_counts": list(witness.s_counts),
                "t_counts": list(witness.t_counts),
                "atom": None if witness.atom is None else list(witness.atom),
                "gap": witness.gap,
            }
    else:  # pragma: no cover - argparse restricts choices
        raise SpecError("$", f"unknown property {prop!r}")
    _emit(_json(doc), args.output)
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_gen(args: argparse.Namespace) -> int:
    family = args.family
    if family in fixtures.NAMED_FIXTURES:
        spec = fixtures.named_fixture(family, H=args.H)
    elif family == "random-cost-sharing":
        _require_seeded(args)
        spec = fixtures.random_cost_sharing(args.n, args.r, args.seed)
    elif family == "random-congestion":
        _require_seeded(args)
        spec = fixtures.random_congestion(args.n, args.r, args.seed)
    else:
        raise SpecError("$.family", f"unknown fixture family {family!r}")
    _emit(_json(spec), args.output)
    return EXIT_OK


def _require_seeded(args: argparse.Namespace) -> None:
    if args.seed is None or args.n is None or args.r is None:
        raise SpecError("$", "random fixture families need --n, --r, and --seed")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coalgame",
        description="Exact coalitional analysis of finite strategic games.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, game: bool = True) -> None:
        if game:
            p.add_argument("game", help="path to a game-spec JSON file")
        p.add_argument("--output", "-o", default=None, help="output path (default: stdout)")
        p.add_argument("--profile-cap", type=int, default=PROFILE_CAP)

    p = sub.add_parser("analyze", help="enumerate equilibria and efficiency ratios")
    common(p)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--witnesses", action="store_true", help="include blocking witnesses")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("smoothness", help="fit or check a smoothness certificate")
    common(p)
    p.add_argument("--fit", action="store_true", help="fit the best certificate")
    p.add_argument("--check", action="store_true", help="check a supplied certificate")
    p.add_argument("--lambda", dest="lam", type=float, default=None)
    p.add_argument("--mu", type=float, default=None)
    p.add_argument("--kind", choices=("coalitional", "unilateral"), default="coalitional")
    p.add_argument("--anchor", default="opt", help="opt | search | dash-joined profile")
    p.add_argument("--perm-cap", type=int, default=PERMUTATION_CAP)
    p.add_argument("--sample-perms", type=int, default=None,
                   help="sample this many orderings instead of enumerating (non-exact)")
    p.add_argument("--seed", type=int, default=None, help="seed for sampled orderings")
    p.set_defaults(func=cmd_smoothness)

    p = sub.add_parser("dynamics", help="simulate best-response dynamics to a CSV trace")
    common(p)
    p.add_argument("--mode", choices=("coalitional", "unilateral"), default="coalitional")
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--initial", default=None, help="dash-joined starting profile")
    p.set_defaults(func=cmd_dynamics)

    p = sub.add_parser("sinks", help="exact chain, sink equilibria, stationary welfare")
    common(p)
    p.add_argument("--cert", default=None, help="verified certificate JSON for the welfare floor")
    p.add_argument("--chain-cap", type=int, default=CHAIN_STATE_CAP)
    p.set_defaults(func=cmd_sinks)

    p = sub.add_parser("check", help="structural property checks")
    common(p)
    p.add_argument("--property", choices=PROPERTIES, required=True)
    p.add_argument("--cap", type=int, default=2, help="multiset multiplicity cap (submodular)")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("gen", help="emit canonical or seeded random fixture specs")
    p.add_argument("family", help="g1|g2|g3|g4|g5|random-cost-sharing|random-congestion")
    p.add_argument("--output", "-o", default=None)
    p.add_argument("--H", type=float, default=10.0, help="middle-edge value for g3")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--r", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_gen)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except StateSpaceTooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPS
    except RejectedCertificate as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CERTIFICATE
    except (MissingPotential, MissingOutStrategy, NotMultisetExtendable, UnsupportedProperty) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNDEFINED
    except Incomparable as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    except (SpecError, CoalGameError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SPEC


if __name__ == "__main__":
    sys.exit(main())
