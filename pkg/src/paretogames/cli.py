"""Command-line interface.

Exit codes: 0 efficient (or check passed), 10 inefficient (or check
failed), 2 input error, 70 internal disagreement between exact methods.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
from fractions import Fraction
from pathlib import Path

from . import allocation, cheaptalk, efficiency, geometry2d, jsonio, lp, persuasion
from .core import Game, fmt, to_rational
from .efficiency import EfficiencyInternalError

EXIT_OK, EXIT_INEFFICIENT, EXIT_INPUT, EXIT_INTERNAL = 0, 10, 2, 70


class InputError(Exception):
    pass


class InternalError(Exception):
    pass


def _emit(args, text: str) -> None:
    if getattr(args, "out", None):
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _json(args, data) -> None:
    _emit(args, jsonio.dumps(data))


def _parse_prior(text):
    if text is None:
        return None
    try:
        parsed = jsonio.loads(text)
    except json.JSONDecodeError:
        parsed = text.split(",")
    if not isinstance(parsed, list):
        parsed = [parsed]
    return [to_rational(x) for x in parsed]


def _two_state_prior(game: Game, prior):
    """Accept a single number ``p`` as the probability of the second state."""
    if prior is not None and len(prior) == 1 and game.n_states == 2:
        return [1 - prior[0], prior[0]]
    return prior


def _need(args, *names):
    for name in names:
        if getattr(args, name, None) is None:
            raise InputError(f"--{name.replace('_', '-')} is required")


def _load_game(args) -> Game:
    _need(args, "game")
    game = jsonio.game_from_mapping(jsonio.load(args.game))
    prior = _two_state_prior(game, _parse_prior(getattr(args, "prior", None)))
    return game.with_prior(prior) if prior is not None else game


def _load_outcome(args, game: Game):
    _need(args, "outcome")
    outcome, prior = jsonio.outcome_from_data(game, jsonio.load(args.outcome))
    if prior is not None and getattr(args, "prior", None) is None:
        game = game.with_prior(_two_state_prior(game, [to_rational(x) for x in prior]))
    return game, outcome


# -- subcommands ----------------------------------------------------------------


def cmd_check(args) -> int:
    game, outcome = _load_outcome(args, _load_game(args))
    reports = efficiency.check(game, outcome, args.method)
    counting = efficiency.counting_bound(game, outcome)
    verdict = reports[0].verdict
    _json(
        args,
        {
            "verdict": verdict,
            "prior": [fmt(x) for x in game.prior],
            "counting": counting.to_json(),
            "certificates": [r.to_json(game) for r in reports],
        },
    )
    return EXIT_OK if verdict == efficiency.EFFICIENT else EXIT_INEFFICIENT


def cmd_bound(args) -> int:
    game, outcome = _load_outcome(args, _load_game(args))
    cb = efficiency.counting_bound(game, outcome)
    data = cb.to_json()
    data["sizes"] = {s: n for s, n in zip(game.states, cb.sizes)}
    _json(args, data)
    return EXIT_OK if cb.passes else EXIT_INEFFICIENT


def _bp_crosscheck(game: Game, sol) -> str | None:
    if game.n_states != 2:
        return None
    cav = persuasion.concavify_1d(persuasion.value_function_1d(game))
    expected = cav(game.prior[1])
    if expected != sol.value:
        raise InternalError(f"LP value {fmt(sol.value)} differs from Cav V = {fmt(expected)}")
    return fmt(expected)


def cmd_bp(args) -> int:
    game = _load_game(args)
    sol = persuasion.solve_bp(game)
    data = sol.to_json(game)
    cav = _bp_crosscheck(game, sol)
    if cav is not None:
        data["cav_value"] = cav
    reports = efficiency.check(game, sol.outcome, "both")
    data["verdict"] = reports[0].verdict
    data["counting"] = efficiency.counting_bound(game, sol.outcome).to_json()
    _json(args, data)
    return EXIT_OK


SWEEP_TAIL = ("bound", "cone_verdict", "in_R_star", "T_p")


def _sweep_rows(game: Game, priors, env=None):
    for prior in priors:
        g = game.with_prior(prior)
        sol = persuasion.solve_bp(g)
        cb = efficiency.counting_bound(g, sol.outcome)
        verdict = efficiency.ex_ante_efficient_cone(g, sol.outcome).verdict
        r_star = t_p = "NA"
        if env is not None:
            region = persuasion.region_analysis(env, prior)
            r_star = "interior" if region.in_r_star_interior else (
                "boundary" if region.in_r_star else "no"
            )
            t_p = fmt(region.T_p)
        yield (
            [fmt(x) for x in prior]
            + [fmt(sol.value)]
            + list(cb.sizes)
            + ["pass" if cb.passes else "fail", verdict, r_star, t_p]
        )


def cmd_sweep(args) -> int:
    grid = args.grid
    if grid < 2:
        raise InputError("--grid must be at least 2")
    env = None
    if args.game:
        game = _load_game(args)
    else:
        _need(args, "n", "T")
        env = persuasion.build_threshold_env(args.n, to_rational(args.T))
        game = env.game
    denom = grid - 1
    if game.n_states == 2:
        priors = [(1 - Fraction(i, denom), Fraction(i, denom)) for i in range(1, denom)]
    else:
        priors = list(persuasion.simplex_grid(game.n_states, denom, interior=True))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        [f"p_{s}" for s in game.states]
        + ["sender_value"]
        + [f"support_{s}" for s in game.states]
        + list(SWEEP_TAIL)
    )
    for row in _sweep_rows(game, priors, env):
        writer.writerow(row)
    _emit(args, buf.getvalue())
    return EXIT_OK


def cmd_threshold(args) -> int:
    _need(args, "n", "T")
    payoffs = None
    if args.sender_payoffs:
        payoffs = [to_rational(x) for x in args.sender_payoffs.split(",")]
    env = persuasion.build_threshold_env(args.n, to_rational(args.T), payoffs)
    prior = _parse_prior(args.prior) or list(env.game.prior)
    check = persuasion.verify_threshold_inefficiency(env, prior)
    data = {
        "n": env.n,
        "T": fmt(env.T),
        "sender_payoffs": [fmt(x) for x in env.sender_payoffs],
        "hyperplanes": {
            str(i): {"normal": [fmt(x) for x in h], "offset": fmt(c)}
            for i, (h, c) in ((i, env.hyperplane(i)) for i in range(env.n + 1))
        },
        "check": check.to_json(env.game),
        "T_exceeds_T_p": env.T > check.region.T_p,
    }
    _json(args, data)
    return EXIT_INEFFICIENT if check.inefficient else EXIT_OK


def _load_profile(args, game: Game):
    _need(args, "profile")
    data = jsonio.load(args.profile)
    profile = cheaptalk.CheapTalkProfile.from_mapping(game, data)
    prior = _parse_prior(args.prior) if args.prior else data.get("prior")
    if prior is not None:
        game = game.with_prior(_two_state_prior(game, [to_rational(x) for x in prior]))
    return game, profile


def cmd_cheaptalk_verify(args) -> int:
    game, profile = _load_profile(args, _load_game(args))
    report = cheaptalk.verify_pbe(game, profile)
    data = report.to_json(game, profile)
    if report.is_equilibrium:
        data["efficiency"] = cheaptalk.efficiency_predicates(game, profile).to_json(game)
    _json(args, data)
    return EXIT_OK if report.is_equilibrium else EXIT_INEFFICIENT


def cmd_cheaptalk_analyze(args) -> int:
    game = _load_game(args)
    data = {"prior": [fmt(x) for x in game.prior]}
    if cheaptalk.state_independent_sender(game) is not None:
        feasible, a_star = cheaptalk.sender_best_feasible_action(game)
        labels = game.actions[1]
        data["A_star"] = [labels[a] for a in feasible]
        data["a_star"] = labels[a_star]
    if game.n_states == 2:
        V = persuasion.value_function_1d(game)
        p = game.prior[1]
        data["V"] = fmt(V(p))
        data["cav_V"] = fmt(persuasion.concavify_1d(V)(p))
        if V.is_step:
            Q = cheaptalk.quasiconcave_envelope_1d(V)
            data["quasicav_V"] = fmt(Q(p))
            data["quasicav_segments"] = [
                {
                    "value": fmt(seg["y_lo"]),
                    "lo": fmt(seg["lo"]),
                    "hi": fmt(seg["hi"]),
                    "lo_closed": seg["lo_closed"],
                    "hi_closed": seg["hi_closed"],
                }
                for seg in Q.segments()
            ]
    code = EXIT_OK
    if args.profile:
        game, profile = _load_profile(args, game)
        report = cheaptalk.verify_pbe(game, profile)
        if not report.is_equilibrium:
            raise InputError("profile is not an equilibrium: " + "; ".join(report.violations))
        # the a* criterion can miss actions the receiver never plays, so a
        # disagreement is reported rather than treated as an internal error
        pred = cheaptalk.efficiency_predicates(game, profile)
        data["sender_payoff"] = fmt(report.sender_payoff)
        data["efficiency"] = pred.to_json(game)
        code = EXIT_OK if pred.cone_verdict == efficiency.EFFICIENT else EXIT_INEFFICIENT
    _json(args, data)
    return code


def cmd_allocate(args) -> int:
    _need(args, "instance")
    inst = allocation.AllocationInstance.from_mapping(jsonio.load(args.instance))
    if args.t is not None:
        inst = allocation.AllocationInstance(inst.types, inst.prior, inst.values, to_rational(args.t))
    mech = allocation.run_mechanism(inst, args.variant)
    violations = allocation.verify_dic(inst, mech)
    verdict = allocation.ranking_verdict(inst, mech)
    game = allocation.embed(inst)
    label = allocation._profile_label
    data = {
        "t": fmt(inst.t),
        "variant": mech.variant,
        "outcome": mech.outcome.to_mapping(game),
        "informational_size": {label(w): fmt(d) for w, d in mech.delta.items()},
        "agents": [
            {
                "peer_values": {label(w): fmt(mech.peers[i, w]) for w in inst.profiles},
                "ranks": {label(w): fmt(mech.ranks[i, w]) for w in inst.profiles},
                "robust_ranks": {label(w): fmt(mech.robust[i, w]) for w in inst.profiles},
                "eligible": {label(w): mech.eligible[i, w] for w in inst.profiles},
            }
            for i in range(inst.n_agents)
        ],
        "dic": not violations,
        "dic_violations": [str(v) for v in violations],
        "inefficiency": verdict.to_json(),
    }
    if args.draws and not verdict.withheld:
        rng = random.Random(args.seed)
        verdicts = []
        for _ in range(args.draws):
            values = {
                w: [Fraction(rng.randint(-1000, 1000), 1000) for _ in range(inst.n_agents)]
                for w in inst.profiles
            }
            g = allocation.embed(inst, values)
            verdicts.append(efficiency.ex_ante_efficient_cone(g, mech.outcome).verdict)
        data["random_value_draws"] = {
            "seed": args.seed,
            "draws": args.draws,
            "inefficient": sum(v == efficiency.INEFFICIENT for v in verdicts),
        }
    _json(args, data)
    return EXIT_INEFFICIENT if verdict.inefficient else EXIT_OK


def cmd_figure(args) -> int:
    game, outcome = _load_outcome(args, _load_game(args))
    _json(args, geometry2d.figure_data(game, outcome))
    return EXIT_OK


COMMANDS = {
    "check": cmd_check,
    "bound": cmd_bound,
    "bp": cmd_bp,
    "sweep": cmd_sweep,
    "cheaptalk-verify": cmd_cheaptalk_verify,
    "cheaptalk-analyze": cmd_cheaptalk_analyze,
    "threshold": cmd_threshold,
    "allocate": cmd_allocate,
    "figure": cmd_figure,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="paretogames", description="Exact Pareto-efficiency checks for incomplete-information games."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text, *flags):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--out", help="write output here instead of stdout")
        for flag in flags:
            flag(p)
        return p

    game = lambda p: p.add_argument("--game", help="game JSON file")  # noqa: E731
    outcome = lambda p: p.add_argument("--outcome", help="outcome JSON file")  # noqa: E731
    prior = lambda p: p.add_argument(  # noqa: E731
        "--prior", help='prior override: JSON list, comma list, or p for two states'
    )
    profile = lambda p: p.add_argument("--profile", help="cheap-talk profile JSON")  # noqa: E731

    def method(p):
        p.add_argument("--method", choices=["cone", "dominance", "both"], default="both")

    def threshold(p):
        p.add_argument("--n", type=int, help="number of risky actions")
        p.add_argument("--T", help="threshold T in (1/2, 1)")

    add("check", "certify efficiency of an outcome", game, outcome, prior, method)
    add("bound", "evaluate the support counting bound", game, outcome, prior)
    add("bp", "solve the persuasion problem", game, prior)
    sw = add("sweep", "persuasion sweep over a prior grid (CSV)", game, threshold)
    sw.add_argument("--grid", type=int, default=101, help="points per axis, step 1/(grid-1)")
    th = add("threshold", "threshold environment analysis at one prior", threshold, prior)
    th.add_argument("--sender-payoffs", help="comma list u_S(a_1..a_n)")
    add("cheaptalk-verify", "verify a cheap-talk equilibrium", game, profile, prior)
    add("cheaptalk-analyze", "value envelopes and efficiency predicates", game, profile, prior)
    al = add("allocate", "run the ranking mechanism on an instance")
    al.add_argument("--instance", help="allocation instance JSON")
    al.add_argument("--t", help="override the threshold t")
    al.add_argument("--variant", choices=[allocation.UNIFORM, allocation.CAPPED], default="uniform")
    al.add_argument("--draws", type=int, default=0, help="random principal-value draws")
    al.add_argument("--seed", type=int, default=0)
    add("figure", "planar figure data for a two-player game", game, outcome, prior)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (InternalError, EfficiencyInternalError, lp.LpInternalError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (InputError, ValueError, KeyError, TypeError, OSError, json.JSONDecodeError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
