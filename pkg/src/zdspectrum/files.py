"""Structured-text documents (YAML) and CSV output.

Every document carries ``schema_version`` and ``kind``. Numbers may be
written as YAML numbers or as strings; strings such as ``"5/9"`` are parsed
exactly. Validation errors name the offending field path.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from fractions import Fraction
from pathlib import Path

import yaml

from .errors import InputError
from .game import MemoryOneStrategy, PayoffMatrix, as_number, state_space
from .spectrum import (
    DownlinkScenario,
    GameParameters,
    Provider,
    User,
    isoelastic_utility,
    log_utility,
)
from .synthesis import ZdParameters, synthesize_own

SCHEMA_VERSION = 1


# -- numbers -------------------------------------------------------------

def fmt(x) -> str:
    """CSV cell text: 12 significant digits for anything numeric."""
    if isinstance(x, str):
        return x
    if isinstance(x, bool):
        return str(int(x))
    if isinstance(x, int):
        return str(x)
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else format(float(x), ".12g")
    return format(float(x), ".12g")


def fmt_exact(x) -> str:
    """Human-facing text: fractions stay fractions, floats get 12 digits."""
    if isinstance(x, (int, Fraction)):
        return str(x)
    return format(float(x), ".12g")


def to_text(x):
    """Lossless JSON/YAML-safe form of a number (used in resolved configs)."""
    if isinstance(x, (int, Fraction)):
        return str(x)
    return repr(float(x))


def parse_cell(text: str):
    """Inverse of ``fmt`` for numeric cells; anything else stays text."""
    for conv in (int, float):
        try:
            return conv(text)
        except ValueError:
            pass
    return text


# -- CSV -----------------------------------------------------------------

def csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(x) for x in row])
    return buf.getvalue()


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    path.write_text(csv_text(header, rows))
    return path


def read_csv(path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        return header, [[parse_cell(c) for c in row] for row in reader]


def write_json(path, doc) -> Path:
    path = Path(path)
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return path


def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


# -- documents -------------------------------------------------------------

def load_document(path, kind: str | None = None) -> dict:
    try:
        doc = yaml.safe_load(Path(path).read_text())
    except (OSError, yaml.YAMLError) as exc:
        raise InputError(f"{path}: {exc}") from None
    return check_header(doc, kind, str(path))


def check_header(doc, kind, where="document") -> dict:
    if not isinstance(doc, dict):
        raise InputError(f"{where}: expected a mapping at top level")
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise InputError(f"{where}.schema_version: expected {SCHEMA_VERSION}, got {version!r}")
    if kind is not None and doc.get("kind", kind) != kind:
        raise InputError(f"{where}.kind: expected {kind!r}, got {doc.get('kind')!r}")
    return doc


def dump_document(doc: dict) -> str:
    return yaml.safe_dump(doc, sort_keys=False, default_flow_style=None)


def _get(doc, key, path, required=True, default=None):
    if not isinstance(doc, dict):
        raise InputError(f"{path}: expected a mapping")
    if key not in doc:
        if required:
            raise InputError(f"{path}.{key}: missing")
        return default
    return doc[key]


def _num(value, path):
    try:
        return as_number(value)
    except InputError:
        raise InputError(f"{path}: not a number ({value!r})") from None


def _nums(values, path, length=None):
    if not isinstance(values, (list, tuple)):
        raise InputError(f"{path}: expected a list")
    if length is not None and len(values) != length:
        raise InputError(f"{path}: expected {length} entries, got {len(values)}")
    return tuple(_num(v, f"{path}[{i}]") for i, v in enumerate(values))


def _scalar_or_list(value, path):
    if isinstance(value, (list, tuple)):
        return tuple(_scalar_or_list(v, f"{path}[{i}]") for i, v in enumerate(value))
    return _num(value, path)


def parse_game(doc: dict, path="game") -> tuple:
    """``(PayoffMatrix, GameParameters | None)`` from a game mapping.

    Explicit ``payoffs`` win over payoffs derived from ``parameters``.
    """
    params = None
    if "parameters" in doc:
        p = _get(doc, "parameters", path)
        ppath = f"{path}.parameters"
        rates = _scalar_or_list(_get(p, "rates", ppath), f"{ppath}.rates")
        extra = {key: _nums(p[key], f"{ppath}.{key}") for key in ("prices", "targets") if key in p}
        try:
            if "theta" in p:
                params = GameParameters.two_player(rates, _scalar_or_list(p["theta"], f"{ppath}.theta"), **extra)
            elif "alpha1" in p:
                params = GameParameters.three_player(
                    rates, _scalar_or_list(p["alpha1"], f"{ppath}.alpha1"),
                    _scalar_or_list(_get(p, "alpha2", ppath), f"{ppath}.alpha2"), **extra)
            else:
                raise InputError(f"{ppath}: need theta (2 providers) or alpha1/alpha2 (3 providers)")
        except InputError as exc:
            raise InputError(f"{ppath}: {exc}") from None
    if "payoffs" in doc:
        rows = _get(doc, "payoffs", path)
        if not isinstance(rows, list):
            raise InputError(f"{path}.payoffs: expected a list of per-player vectors")
        n = len(rows)
        vectors = tuple(_nums(r, f"{path}.payoffs[{i}]", 2 ** n) for i, r in enumerate(rows))
        return PayoffMatrix(vectors), params
    if params is None:
        raise InputError(f"{path}: need payoffs or parameters")
    return params.payoff_matrix(), params


def game_document(matrix: PayoffMatrix, params: GameParameters | None = None) -> dict:
    doc = {"schema_version": SCHEMA_VERSION, "kind": "game"}
    if params is not None:
        p = {"rates": [to_text(r) for r in params.rates]}
        if params.theta is not None:
            p["theta"] = [to_text(t) for t in params.theta]
        if params.alpha1 is not None:
            p["alpha1"] = [[to_text(a) for a in pair] for pair in params.alpha1]
            p["alpha2"] = [to_text(a) for a in params.alpha2]
        if params.prices is not None:
            p["prices"] = [to_text(c) for c in params.prices]
        if params.targets is not None:
            p["targets"] = [to_text(t) for t in params.targets]
        doc["parameters"] = p
    doc["payoffs"] = [[to_text(x) for x in v] for v in matrix.per_player_payoffs]
    return doc


def parse_strategy(spec, owner: int, matrix: PayoffMatrix, path: str) -> MemoryOneStrategy:
    """A probability list (owner's perspective), ``{constant: p}`` or ``{zd: {target, b}}``."""
    n = matrix.n_players
    try:
        if isinstance(spec, dict) and "constant" in spec:
            return MemoryOneStrategy.constant(owner, _num(spec["constant"], f"{path}.constant"), n)
        if isinstance(spec, dict) and "zd" in spec:
            zd = spec["zd"]
            params = ZdParameters(_num(_get(zd, "target", f"{path}.zd"), f"{path}.zd.target"),
                                  _num(_get(zd, "b", f"{path}.zd"), f"{path}.zd.b"))
            return synthesize_own(matrix.per_player_payoffs[owner], params, player=owner)
        return MemoryOneStrategy(owner, _nums(spec, path, 2 ** n))
    except InputError as exc:
        raise InputError(f"{path}: {exc}") from None


def strategy_document(s: MemoryOneStrategy) -> list:
    return [to_text(p) for p in s.probs]


_UTILITIES = {
    "log": lambda d, p: log_utility(float(_num(d.get("weight", 1), f"{p}.weight"))),
    "isoelastic": lambda d, p: isoelastic_utility(float(_num(_get(d, "rho", p), f"{p}.rho"))),
}


def parse_scenario(doc: dict, path="scenario") -> tuple:
    """``(DownlinkScenario, utilities | None, prices | None)``."""
    bandwidth = float(_num(_get(doc, "bandwidth_hz", path), f"{path}.bandwidth_hz"))
    providers_doc = _get(doc, "providers", path)
    if not isinstance(providers_doc, list) or not providers_doc:
        raise InputError(f"{path}.providers: expected a non-empty list")
    names = [str(p.get("name", i + 1)) if isinstance(p, dict) else str(i + 1)
             for i, p in enumerate(providers_doc)]
    if len(set(names)) != len(names):
        raise InputError(f"{path}.providers: provider names must be unique")
    providers, utilities, prices = [], [], []
    for i, pdoc in enumerate(providers_doc):
        ppath = f"{path}.providers[{i}]"
        cap = float(_num(_get(pdoc, "power_cap_w", ppath), f"{ppath}.power_cap_w"))
        users_doc = _get(pdoc, "users", ppath)
        if not isinstance(users_doc, list) or not users_doc:
            raise InputError(f"{ppath}.users: expected a non-empty list")
        users = []
        for k, udoc in enumerate(users_doc):
            upath = f"{ppath}.users[{k}]"
            cross = {}
            for name, h in (_get(udoc, "cross_gains", upath, required=False, default={}) or {}).items():
                if str(name) not in names or names.index(str(name)) == i:
                    raise InputError(f"{upath}.cross_gains: unknown provider {name!r}")
                cross[names.index(str(name))] = float(_num(h, f"{upath}.cross_gains.{name}"))
            try:
                users.append(User(float(_num(_get(udoc, "gain", upath), f"{upath}.gain")),
                                  float(_num(_get(udoc, "noise_w", upath), f"{upath}.noise_w")),
                                  cross))
            except InputError as exc:
                raise InputError(f"{upath}: {exc}") from None
        try:
            providers.append(Provider(cap, tuple(users), names[i]))
        except InputError as exc:
            raise InputError(f"{ppath}: {exc}") from None
        if "price" in pdoc:
            prices.append(float(_num(pdoc["price"], f"{ppath}.price")))
            udoc = _get(pdoc, "utility", ppath)
            kind = _get(udoc, "kind", f"{ppath}.utility")
            if kind not in _UTILITIES:
                raise InputError(f"{ppath}.utility.kind: expected one of {sorted(_UTILITIES)}")
            try:
                utilities.append(_UTILITIES[kind](udoc, f"{ppath}.utility"))
            except InputError as exc:
                raise InputError(f"{ppath}.utility: {exc}") from None
    if prices and len(prices) != len(providers):
        raise InputError(f"{path}.providers: give price and utility for every provider or none")
    scenario = DownlinkScenario(bandwidth, tuple(providers))
    return scenario, (utilities or None), (prices or None)


def parse_simulation(doc: dict, path="simulation") -> dict:
    """Validated simulation document: game, run list and shared settings."""
    from .simulation import SimulationConfig

    matrix, _ = parse_game(_get(doc, "game", path), f"{path}.game")
    n = matrix.n_players

    def _int(key, default):
        v = doc.get(key, default)
        if isinstance(v, bool) or not isinstance(v, int):
            raise InputError(f"{path}.{key}: expected an integer, got {v!r}")
        return v

    _get(doc, "rounds", path)
    shared = dict(
        rounds=_int("rounds", None),
        replications=_int("replications", 1),
        seed=_int("seed", 0),
        record_stride=_int("record_stride", 1),
    )
    init = doc.get("initial_state")
    if init is not None:
        try:
            state_space(n).index(tuple(init))
        except (InputError, TypeError):
            raise InputError(f"{path}.initial_state: expected {n} actions in {{1,2}}") from None
        shared["initial_state"] = tuple(init)
    runs_doc = _get(doc, "runs", path)
    if not isinstance(runs_doc, list) or not runs_doc:
        raise InputError(f"{path}.runs: expected a non-empty list")
    default_target = doc.get("target")
    if default_target is not None:
        default_target = _num(default_target, f"{path}.target")
    configs, targets = [], []
    labels = set()
    for r, run in enumerate(runs_doc):
        rpath = f"{path}.runs[{r}]"
        label = str(_get(run, "label", rpath, required=False, default=f"run{r}"))
        if label in labels:
            raise InputError(f"{rpath}.label: duplicate label {label!r}")
        labels.add(label)
        specs = _get(run, "strategies", rpath)
        if not isinstance(specs, list) or len(specs) != n:
            raise InputError(f"{rpath}.strategies: expected {n} strategies")
        strategies = tuple(parse_strategy(s, i, matrix, f"{rpath}.strategies[{i}]")
                           for i, s in enumerate(specs))
        try:
            configs.append(SimulationConfig(strategies, matrix, label=label, **shared))
        except InputError as exc:
            raise InputError(f"{rpath}: {exc}") from None
        t = run.get("target")
        targets.append(_num(t, f"{rpath}.target") if t is not None else default_target)
    player = _int("player", 1)
    if not 1 <= player <= n:
        raise InputError(f"{path}.player: expected 1..{n}, got {player}")
    return dict(
        configs=configs,
        targets=targets,
        epsilon=float(_num(doc.get("epsilon", 0.05), f"{path}.epsilon")),
        player=player - 1,
    )
