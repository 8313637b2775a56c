"""Command-line interface.

Exit codes: 0 success, 2 input error, 3 infeasible request, 4 numerical
degeneracy, 1 replay mismatch. Every successful command writes its outputs
and a ``manifest.json`` into the output directory (``--out-dir``, else
``$ZDSPECTRUM_OUT``, else ``./zdspectrum-out``).
"""

from __future__ import annotations

import argparse
import datetime as _dt
import os
import re
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__, markov
from .errors import DegenerateError, InfeasibleError, InputError, NotControllableError, ZDError
from .files import (
    SCHEMA_VERSION,
    check_header,
    csv_text,
    dump_document,
    fmt,
    fmt_exact,
    game_document,
    load_document,
    parse_game,
    parse_scenario,
    parse_simulation,
    sha256_file,
    strategy_document,
    to_text,
    write_json,
)
from .game import MemoryOneStrategy, PayoffMatrix, as_number, state_space
from .simulation import convergence_row, power_sweep, rounds_to_band, simulate
from .spectrum import GameParameters, build_game, maxmin_allocation_interfered, maxmin_allocation_solo, sinr
from .synthesis import (
    ZdParameters,
    b_range,
    controllability,
    synthesize_opponent_control,
    synthesize_own,
)

ENV_OUT = "ZDSPECTRUM_OUT"
DEFAULT_OUT = "zdspectrum-out"
MANIFEST = "manifest.json"


# -- helpers ---------------------------------------------------------------

def _numbers(text: str) -> list:
    try:
        return [as_number(t) for t in text.split(",") if t.strip()]
    except InputError as exc:
        raise InputError(f"cannot parse number list {text!r}: {exc}") from None


def _texts(values) -> list:
    return [to_text(v) for v in values]


def _floatify(values, numeric):
    return tuple(float(v) for v in values) if numeric == "float" else tuple(values)


def _matrix(doc, numeric) -> PayoffMatrix:
    matrix, _ = parse_game(doc)
    return matrix.as_float() if numeric == "float" else matrix


def _game_from_args(args, inputs) -> dict | None:
    if getattr(args, "game", None):
        doc = load_document(args.game, "game")
        inputs[str(args.game)] = sha256_file(args.game)
        matrix, params = parse_game(doc, str(args.game))
        return game_document(matrix, params)
    if getattr(args, "R", None) is not None:
        R = _numbers(args.R)
        if args.theta is not None:
            params = GameParameters.two_player(_one_or_many(R), _one_or_many(_numbers(args.theta)))
        elif args.alpha1 is not None and args.alpha2 is not None:
            params = GameParameters.three_player(_one_or_many(R), _one_or_many(_numbers(args.alpha1)),
                                                 _one_or_many(_numbers(args.alpha2)))
        else:
            raise InputError("--R needs --theta (2 providers) or --alpha1/--alpha2 (3 providers)")
        return game_document(params.payoff_matrix(), params)
    return None


def _one_or_many(values):
    return values[0] if len(values) == 1 else tuple(values)


def _emit(out_dir: Path, name: str, text: str, outputs: list) -> None:
    (out_dir / name).write_text(text)
    outputs.append(name)


def _safe(label: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]", "_", label) or "run"


def _out_dir(args) -> Path:
    out = Path(args.out_dir or os.environ.get(ENV_OUT) or DEFAULT_OUT)
    out.mkdir(parents=True, exist_ok=True)
    return out


# -- runners: config dict -> files in out_dir ------------------------------

def run_synthesize(config: dict, out_dir: Path, jobs: int = 1) -> list:
    numeric = config["numeric"]
    vector = _floatify([as_number(x) for x in config["payoffs"]], numeric)
    n = len(vector).bit_length() - 1
    controller = config["player"] - 1
    measured = config["measured"] - 1
    report = controllability(vector, controller)
    print(f"controller: player {config['player']}  pinned: player {config['measured']}  mode: {config['mode']}")
    if not report.controllable:
        raise NotControllableError("payoffs admit no controllable interval")
    lo, hi = report.interval
    shown = f"({fmt_exact(lo)}, {fmt_exact(hi)}]" if report.excludes_zero and lo == 0 else \
        f"[{fmt_exact(lo)}, {fmt_exact(hi)}]"
    print(f"controllable interval: {shown}" + ("  (target 0 excluded)" if report.excludes_zero else ""))
    print(f"sign case: b {'>' if report.sign_case > 0 else '<'} 0 for positive targets")
    target = as_number(config["target"])
    target = float(target) if numeric == "float" else target
    rng = b_range(vector, target, report, player=controller)
    print(f"feasible b: {rng}")
    b = rng.midpoint() if config["b"] == "auto" else as_number(config["b"])
    b = float(b) if numeric == "float" else b
    params = ZdParameters(target, b)
    if config["mode"] == "own":
        strategy = synthesize_own(vector, params, player=controller)
    else:
        strategy = synthesize_opponent_control(vector, params, controller=controller)
    space = state_space(n)
    print(f"b = {fmt_exact(b)}")
    print("strategy (controller's view: own action first):")
    rows = []
    for k, p in enumerate(strategy.probs):
        print(f"  p[{space.label(k)}] = {fmt_exact(p)}")
        rows.append((space.label(k), p, fmt_exact(p)))
    outputs = []
    _emit(out_dir, "strategy.csv", csv_text(["state", "probability", "probability_exact"], rows), outputs)
    report_rows = [
        ("controller", config["player"]),
        ("pinned_player", config["measured"]),
        ("interval_lo", lo),
        ("interval_hi", hi),
        ("excludes_zero", int(report.excludes_zero)),
        ("sign_case", report.sign_case),
        ("b_lo", rng.lo if np.isfinite(float(rng.lo)) else "-inf"),
        ("b_hi", rng.hi if np.isfinite(float(rng.hi)) else "inf"),
        ("target", target),
        ("b", b),
    ]
    _emit(out_dir, "report.csv", csv_text(["key", "value"], report_rows), outputs)
    return outputs


def run_analyze(config: dict, out_dir: Path, jobs: int = 1) -> list:
    numeric = config["numeric"]
    matrix = _matrix(config["game"], numeric)
    n = matrix.n_players
    space = state_space(n)
    strategies = [MemoryOneStrategy(i, _floatify([as_number(p) for p in probs], numeric))
                  for i, probs in enumerate(config["strategies"])]
    if len(strategies) != n:
        raise InputError(f"game has {n} players, got {len(strategies)} strategies")
    M = markov.build_transition_matrix(strategies, space)
    pi = markov.stationary(M, tuple(config["initial_state"]) if config.get("initial_state") else None)
    ergodic = markov.is_ergodic(M)
    print(f"chain: {'ergodic' if ergodic else 'NOT ergodic'}; "
          f"{'unique closed class' if pi.unique else 'several closed classes'}; "
          f"closed classes: {[[space.label(s) for s in c] for c in pi.closed_classes]}")
    if not ergodic:
        print(f"long-run occupancy is the Cesaro average from {space.label(pi.initial_state)}")
    print("stationary distribution:")
    for k in range(len(space)):
        print(f"  pi[{space.label(k)}] = {fmt_exact(pi[k])}")
    rows = []
    for i in range(n):
        f = matrix.per_player_payoffs[i]
        u = markov.long_run_payoff(pi, f)
        try:
            d = markov.determinant_payoff_n(strategies, f) if pi.unique else None
        except DegenerateError:
            d = None
        diff = abs(u - d) if d is not None else None
        acc = markov.access_fraction(pi, i, space)
        print(f"player {i + 1}: payoff {fmt_exact(u)}  determinant {fmt_exact(d) if d is not None else 'n/a'}"
              f"  |diff| {fmt(diff) if diff is not None else 'n/a'}  access {fmt_exact(acc)}")
        rows.append((i + 1, u, "" if d is None else d, "" if diff is None else diff, acc))
    outputs = []
    _emit(out_dir, "stationary.csv",
          csv_text(["state", "pi"], [(space.label(k), pi[k]) for k in range(len(space))]), outputs)
    _emit(out_dir, "players.csv",
          csv_text(["player", "payoff", "payoff_determinant", "abs_diff", "access_fraction"], rows), outputs)
    _emit(out_dir, "chain.csv", csv_text(["key", "value"], [("ergodic", int(ergodic)), ("unique", int(pi.unique)),
                                                             ("initial_state", space.label(pi.initial_state))]),
          outputs)
    return outputs


def _trace_csv(trace, space, header) -> str:
    # payoffs take one value per state, so format them once per state
    states = trace.states[trace.recorded_rounds].astype(np.int64).tolist()
    table = np.zeros((len(space), trace.n_players))
    table[states] = trace.recorded_payoffs
    prefix = [",".join([space.label(k), *(fmt(x) for x in table[k])]) for k in range(len(space))]
    means = [",".join(f"{x:.12g}" for x in row) for row in trace.running_means.tolist()]
    body = [f"{r},{prefix[s]},{m}" for r, s, m in zip(trace.recorded_rounds.tolist(), states, means)]
    return "\n".join([",".join(header), *body, ""])


def run_simulate(config: dict, out_dir: Path, jobs: int = 1) -> list:
    parsed = parse_simulation(check_header(config["simulation"], "simulation", "simulation"))
    configs, targets = parsed["configs"], parsed["targets"]
    eps, player = parsed["epsilon"], parsed["player"]
    n = configs[0].n_players
    space = state_space(n)
    banded = any(t is not None for t in targets)
    outputs, summary, convergence = [], [], []
    header = ["round", "state"] + [f"payoff_{i + 1}" for i in range(n)] + [f"runmean_{i + 1}" for i in range(n)]
    for cfg, target in zip(configs, targets):
        traces = simulate(cfg, jobs=jobs)
        for tr in traces:
            stem = f"trace_{_safe(cfg.label)}_r{tr.replication}"
            _emit(out_dir, stem + ".csv", _trace_csv(tr, space, header), outputs)
            meta = {"schema_version": SCHEMA_VERSION, "seed": tr.seed, "replication": tr.replication,
                    "config_hash": tr.config_hash, "label": cfg.label, "rounds": cfg.rounds,
                    "record_stride": cfg.record_stride}
            write_json(out_dir / (stem + ".meta.json"), meta)
            outputs.append(stem + ".meta.json")
            row = [cfg.label, tr.replication, cfg.seed, *tr.mean_payoffs, *tr.access_fractions,
                   *tr.state_frequencies]
            if banded:
                row.append("" if target is None else rounds_to_band(tr, target, eps, player))
            summary.append(row)
        means = np.mean([t.mean_payoffs for t in traces], axis=0)
        print(f"{cfg.label}: mean payoff {', '.join(fmt(x) for x in means)}"
              f" over {cfg.replications} replication(s) of {cfg.rounds} rounds")
        if target is not None:
            r = convergence_row(cfg, traces, target, eps, player)
            convergence.append((r.label, fmt_exact(target), " ".join(fmt_exact(p) for p in r.strategy),
                                r.mean_rounds, r.censored))
            print(f"{cfg.label}: mean rounds until player {player + 1} stays within "
                  f"{fmt_exact(target)} +/- {fmt(eps)}: {fmt(r.mean_rounds)} ({r.censored} censored)")
    sheader = (["label", "replication", "seed"] + [f"mean_payoff_{i + 1}" for i in range(n)]
               + [f"access_{i + 1}" for i in range(n)] + [f"freq_{space.label(k)}" for k in range(len(space))])
    if banded:
        sheader.append("rounds_to_band")
    _emit(out_dir, "summary.csv", csv_text(sheader, summary), outputs)
    if convergence:
        _emit(out_dir, "convergence.csv", csv_text(
            ["label", "target", "strategy", "mean_rounds_to_band", "censored"], convergence), outputs)
    return outputs


def run_sweep(config: dict, out_dir: Path, jobs: int = 1) -> list:
    numeric = config["numeric"]
    matrix = _matrix(config["game"], numeric)
    if matrix.n_players != 2:
        raise InputError("sweep needs a two-provider game")
    targets = _floatify([as_number(t) for t in config["targets"]], numeric)
    grid = _floatify([as_number(b) for b in config["b_grid"]], numeric)
    opponents, labels = [], []
    for o in config["opponents"]:
        if "probs" in o:
            probs = _floatify([as_number(p) for p in o["probs"]], numeric)
            opponents.append(MemoryOneStrategy(1, probs))
            labels.append("q=" + " ".join(fmt_exact(p) for p in probs))
        else:
            b2 = as_number(o["b"])
            opponents.append(float(b2) if numeric == "float" else b2)
            labels.append(f"b2={fmt_exact(b2)}")
    cap = as_number(config["cap"]) if config.get("cap") is not None else None
    rows = []
    for b in grid:
        try:
            (row,) = power_sweep(matrix, targets, [b], opponents, cap=cap)
        except InfeasibleError as exc:
            print(f"warning: skipping b1={fmt_exact(b)}: {exc}", file=sys.stderr)
            continue
        rows.append((b, *row.strategy, *row.access, *(row.power or ())))
        print(f"b1={fmt_exact(b)}: " + "  ".join(f"{lab}: {fmt(a)}" for lab, a in zip(labels, row.access)))
    header = (["b1"] + [f"p_{s}" for s in ("1-1", "1-2", "2-1", "2-2")]
              + [f"access[{lab}]" for lab in labels])
    if cap is not None:
        header += [f"power_w[{lab}]" for lab in labels]
    outputs = []
    _emit(out_dir, "sweep.csv", csv_text(header, rows), outputs)
    return outputs


def run_spectrum(config: dict, out_dir: Path, jobs: int = 1) -> list:
    scenario, utilities, prices = parse_scenario(check_header(config["scenario"], "scenario", "scenario"))
    n = len(scenario.providers)
    names = [p.name for p in scenario.providers]
    rows = []
    ok = True
    for i, prov in enumerate(scenario.providers):
        others = [j for j in range(n) if j != i]
        contexts = [("solo", maxmin_allocation_solo(scenario, i), [i])]
        for j in others:
            contexts.append((f"with:{names[j]}", maxmin_allocation_interfered(scenario, i, j), [i, j]))
        if n > 2:
            contexts.append(("with:" + "+".join(names[j] for j in others),
                             maxmin_allocation_interfered(scenario, i, others), list(range(n))))
        for ctx, alloc, active in contexts:
            g = [sinr(scenario, i, k, alloc, active) for k in range(len(prov.users))]
            spread = max(g) - min(g)
            budget = abs(sum(alloc.powers) - prov.power_cap_w)
            good = spread <= 1e-9 * (1 + max(g)) and budget <= 1e-9 * prov.power_cap_w \
                and abs(g[0] - alloc.common_sinr) <= 1e-9 * (1 + alloc.common_sinr)
            ok &= good
            print(f"provider {names[i]} [{ctx}]: K={fmt(alloc.constant)} common SINR={fmt(alloc.common_sinr)} "
                  f"spread={fmt(spread)} budget error={fmt(budget)} {'ok' if good else 'FAILED'}")
            for k, (lam, gam) in enumerate(zip(alloc.powers, g)):
                rows.append((names[i], ctx, k + 1, lam, gam, alloc.constant))
    if not ok:
        raise DegenerateError("equal-SINR or power-budget check failed")
    matrix, params = build_game(scenario, utilities, prices)
    for i in range(n):
        line = f"provider {names[i]}: R={fmt(params.rates[i])} bit/s"
        if params.theta is not None:
            line += f" theta={fmt(params.theta[i])}"
        else:
            line += f" alpha1={', '.join(fmt(a) for a in params.alpha1[i])} alpha2={fmt(params.alpha2[i])}"
        if params.targets is not None:
            line += f" target={fmt(params.targets[i])}"
        print(line)
    outputs = []
    _emit(out_dir, "game.yaml", dump_document(game_document(matrix, params)), outputs)
    _emit(out_dir, "allocations.csv",
          csv_text(["provider", "context", "user", "power_w", "sinr", "K"], rows), outputs)
    return outputs


RUNNERS = {
    "synthesize": run_synthesize,
    "analyze": run_analyze,
    "simulate": run_simulate,
    "sweep": run_sweep,
    "spectrum": run_spectrum,
}


def execute(command: str, config: dict, out_dir: Path, jobs: int = 1, inputs: dict | None = None) -> dict:
    outputs = RUNNERS[command](config, out_dir, jobs)
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "config": config,
        "execution": {"jobs": jobs},
        "inputs": inputs or {},
        "outputs": {name: sha256_file(out_dir / name) for name in outputs},
        "tool_version": __version__,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
    }
    write_json(out_dir / MANIFEST, manifest)
    return manifest


# -- argument handling -------------------------------------------------------

def _add_game_args(p, required=True):
    g = p.add_argument_group("game (one of)")
    g.add_argument("--game", help="game document (YAML)")
    g.add_argument("--R", help="solo rate(s), comma separated")
    g.add_argument("--theta", help="two-provider interference discount(s)")
    g.add_argument("--alpha1", help="three-provider discount with one other provider")
    g.add_argument("--alpha2", help="three-provider discount with both others")


def _add_common(p):
    p.add_argument("--out-dir", help=f"output directory (default ${ENV_OUT} or ./{DEFAULT_OUT})")
    p.add_argument("--numeric", choices=("exact", "float"), default="exact",
                   help="rational arithmetic (default) or floating point")


def cmd_synthesize(args) -> int:
    inputs = {}
    mode = args.mode
    player = args.player
    if args.payoffs:
        vector = _numbers(args.payoffs)
        n = len(vector).bit_length() - 1
        game = None
    else:
        game = _game_from_args(args, inputs)
        if game is None:
            raise InputError("give --payoffs, --game or --R with --theta/--alpha*")
        matrix, _ = parse_game(game)
        n = matrix.n_players
        vector = None
    if mode == "own":
        measured = player
    elif args.of is not None:
        measured = args.of
    elif n == 2:
        measured = 3 - player
    else:
        raise InputError("--mode opponent with more than two players needs --of")
    if not 1 <= player <= n or not 1 <= measured <= n:
        raise InputError(f"player indices must lie in 1..{n}")
    if vector is None:
        vector = matrix.per_player_payoffs[measured - 1]
    config = {
        "payoffs": _texts(vector),
        "game": game,
        "player": player,
        "measured": measured,
        "mode": mode,
        "target": args.target,
        "b": args.b,
        "numeric": args.numeric,
    }
    execute("synthesize", config, _out_dir(args), inputs=inputs)
    return 0


def cmd_analyze(args) -> int:
    inputs = {}
    game = _game_from_args(args, inputs)
    if game is None and args.payoffs:
        game = {"schema_version": SCHEMA_VERSION, "kind": "game",
                "payoffs": [_texts(_numbers(v)) for v in args.payoffs]}
    if game is None:
        raise InputError("give --game, --payoffs (one per player) or --R with --theta/--alpha*")
    matrix, _ = parse_game(game)
    n = matrix.n_players
    numeric = args.numeric
    if args.random_seed is not None:
        rng = np.random.default_rng(args.random_seed)
        strategies = [[repr(float(x)) for x in rng.uniform(0.05, 0.95, 2 ** n)] for _ in range(n)]
        numeric = "float"
    else:
        if not args.strategy or len(args.strategy) != n:
            raise InputError(f"give one --strategy per player ({n}) or --random-seed")
        strategies = [_texts(_numbers(s)) for s in args.strategy]
    config = {
        "game": game,
        "strategies": strategies,
        "initial_state": [int(a) for a in args.initial.split(",")] if args.initial else None,
        "numeric": numeric,
    }
    execute("analyze", config, _out_dir(args), inputs=inputs)
    return 0


def cmd_simulate(args) -> int:
    doc = load_document(args.config, "simulation")
    inputs = {str(args.config): sha256_file(args.config)}
    if isinstance(doc.get("game"), str):
        game_path = Path(args.config).parent / doc["game"]
        gdoc = load_document(game_path, "game")
        inputs[str(game_path)] = sha256_file(game_path)
        matrix, params = parse_game(gdoc, str(game_path))
        doc["game"] = game_document(matrix, params)
    for key in ("seed", "rounds", "replications", "record_stride"):
        value = getattr(args, key)
        if value is not None:
            doc[key] = value
    execute("simulate", {"simulation": doc}, _out_dir(args), jobs=args.jobs, inputs=inputs)
    return 0


def _grid(text: str) -> list:
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise InputError("--b-grid range must be start:stop:step")
        start, stop, step = (as_number(x) for x in parts)
        if not step > 0:
            raise InputError("--b-grid step must be positive")
        start, stop, step = Fraction(start), Fraction(stop), Fraction(step)
        count = int((stop - start) / step) + 1
        return [start + k * step for k in range(count)]
    return _numbers(text)


def cmd_sweep(args) -> int:
    inputs = {}
    game = _game_from_args(args, inputs)
    if game is None:
        raise InputError("give --game or --R with --theta")
    targets = _numbers(args.targets)
    if len(targets) != 2:
        raise InputError("--targets needs two values (provider 1, provider 2)")
    opponents = [{"probs": _texts(_numbers(q))} for q in args.opponent or []]
    opponents += [{"b": to_text(as_number(b))} for b in args.opponent_b or []]
    if not opponents:
        raise InputError("give at least one --opponent or --opponent-b")
    config = {
        "game": game,
        "targets": _texts(targets),
        "b_grid": _texts(_grid(args.b_grid)),
        "opponents": opponents,
        "cap": args.cap,
        "numeric": args.numeric,
    }
    execute("sweep", config, _out_dir(args), inputs=inputs)
    return 0


def cmd_spectrum(args) -> int:
    doc = load_document(args.scenario, "scenario")
    inputs = {str(args.scenario): sha256_file(args.scenario)}
    execute("spectrum", {"scenario": doc}, _out_dir(args), inputs=inputs)
    return 0


def cmd_replay(args) -> int:
    import json

    try:
        manifest = json.loads(Path(args.manifest).read_text())
    except (OSError, ValueError) as exc:
        raise InputError(f"{args.manifest}: {exc}") from None
    command = manifest.get("command")
    if command not in RUNNERS:
        raise InputError(f"{args.manifest}: unknown command {command!r}")
    out_dir = _out_dir(args)
    jobs = args.jobs if args.jobs is not None else manifest.get("execution", {}).get("jobs", 1)
    replayed = execute(command, manifest["config"], out_dir, jobs=jobs, inputs=manifest.get("inputs"))
    mismatches = 0
    for name, digest in manifest["outputs"].items():
        same = replayed["outputs"].get(name) == digest
        mismatches += not same
        print(f"{'identical' if same else 'DIFFERS  '}  {name}")
    extra = set(replayed["outputs"]) - set(manifest["outputs"])
    for name in sorted(extra):
        print(f"unexpected {name}")
    return 0 if mismatches == 0 and not extra else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="zdspectrum", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synthesize", help="controllable interval, b-range and pinning strategy")
    _add_game_args(p)
    p.add_argument("--payoffs", help="payoff vector in global state order, comma separated")
    p.add_argument("--target", required=True, help="long-run payoff to pin")
    p.add_argument("--b", default="auto", help="scale parameter, or 'auto' for the range midpoint")
    p.add_argument("--player", type=int, default=1, help="controlling player (1-based)")
    p.add_argument("--mode", choices=("own", "opponent"), default="own")
    p.add_argument("--of", type=int, help="player whose payoff is pinned in opponent mode (1-based)")
    _add_common(p)
    p.set_defaults(func=cmd_synthesize)

    p = sub.add_parser("analyze", help="stationary distribution, long-run payoffs, determinant cross-check")
    _add_game_args(p)
    p.add_argument("--payoffs", action="append", help="one payoff vector per player (repeat)")
    p.add_argument("--strategy", action="append",
                   help="probabilities per player in that player's own view (repeat, player order)")
    p.add_argument("--random-seed", type=int, help="draw random strategies in [0.05, 0.95] instead")
    p.add_argument("--initial", help="initial joint state for non-ergodic chains, e.g. 1,1")
    _add_common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("simulate", help="Monte Carlo traces from a simulation document")
    p.add_argument("config", help="simulation document (YAML)")
    p.add_argument("--seed", type=int)
    p.add_argument("--rounds", type=int)
    p.add_argument("--replications", type=int)
    p.add_argument("--record-stride", dest="record_stride", type=int)
    p.add_argument("--jobs", type=int, default=1, help="worker processes; never changes results")
    p.add_argument("--out-dir")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="access fraction of provider 1 over a grid of b1")
    _add_game_args(p)
    p.add_argument("--targets", required=True, help="target rates of providers 1 and 2, e.g. 0.5,0.25")
    p.add_argument("--b-grid", required=True, help="start:stop:step (inclusive) or comma list")
    p.add_argument("--opponent", action="append", help="provider 2 strategy in its own view (repeat)")
    p.add_argument("--opponent-b", action="append", help="provider 2 pinning strategy with this b (repeat)")
    p.add_argument("--cap", help="power cap of provider 1 in W; adds average power columns")
    _add_common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("spectrum", help="build the power-control game from a downlink scenario")
    p.add_argument("scenario", help="scenario document (YAML)")
    p.add_argument("--out-dir")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("replay", help="re-run a manifest and compare output hashes")
    p.add_argument("manifest")
    p.add_argument("--jobs", type=int)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_replay)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ZDError as exc:
        label = getattr(exc, "label", "")
        print(f"error: {label + ': ' if label else ''}{exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
