"""Seeded Monte Carlo play of memory-one strategies.

Every (seed, replication, player) triple owns an independent Philox stream;
the uniform consumed by a player in round ``t`` is the ``t``-th draw of its
stream. Results therefore do not depend on how replications are scheduled
across workers.
"""

from __future__ import annotations

import hashlib
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import markov
from .errors import InputError
from .game import MemoryOneStrategy, PayoffMatrix, state_space
from .synthesis import ZdParameters, synthesize_own

CHUNK = 1 << 16
MAX_SEED = 2 ** 64


@dataclass(frozen=True)
class SimulationConfig:
    strategies: tuple
    payoffs: PayoffMatrix
    rounds: int
    replications: int = 1
    seed: int = 0
    initial_state: tuple | None = None
    record_stride: int = 1
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "strategies", tuple(sorted(self.strategies, key=lambda s: s.owner)))
        n = self.payoffs.n_players
        if len(self.strategies) != n or [s.owner for s in self.strategies] != list(range(n)):
            raise InputError(f"need one strategy per player for a {n}-player game")
        if any(s.n_players != n for s in self.strategies):
            raise InputError("strategy dimensions do not match the payoff matrix")
        if not (isinstance(self.rounds, int) and self.rounds >= 1):
            raise InputError(f"rounds must be a positive integer, got {self.rounds!r}")
        if not (isinstance(self.replications, int) and self.replications >= 1):
            raise InputError(f"replications must be a positive integer, got {self.replications!r}")
        if not (isinstance(self.record_stride, int) and self.record_stride >= 1):
            raise InputError(f"record_stride must be a positive integer, got {self.record_stride!r}")
        if not (isinstance(self.seed, int) and 0 <= self.seed < MAX_SEED):
            raise InputError(f"seed must be an integer in [0, 2^64), got {self.seed!r}")
        init = self.initial_state or (1,) * n
        state_space(n).index(init)
        object.__setattr__(self, "initial_state", tuple(init))

    @property
    def n_players(self) -> int:
        return self.payoffs.n_players

    def canonical(self) -> dict:
        return {
            "strategies": [[str(p) for p in s.probs] for s in self.strategies],
            "payoffs": [[str(x) for x in v] for v in self.payoffs.per_player_payoffs],
            "rounds": self.rounds,
            "replications": self.replications,
            "seed": self.seed,
            "initial_state": list(self.initial_state),
            "record_stride": self.record_stride,
            "label": self.label,
        }

    def config_hash(self) -> str:
        blob = json.dumps(self.canonical(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


@dataclass(eq=False)
class SimulationTrace:
    """One replication. ``states`` holds the full joint-state sequence;
    the per-round columns are kept at ``record_stride`` resolution."""

    replication: int
    seed: int
    config_hash: str
    states: np.ndarray
    recorded_rounds: np.ndarray
    recorded_payoffs: np.ndarray
    running_means: np.ndarray
    state_frequencies: np.ndarray
    mean_payoffs: np.ndarray
    access_fractions: np.ndarray
    label: str = ""
    n_players: int = field(default=2)

    @property
    def rounds(self) -> int:
        return len(self.states)


def stream(seed: int, replication: int, player: int) -> np.random.Generator:
    ss = np.random.SeedSequence(seed, spawn_key=(replication, player))
    return np.random.Generator(np.random.Philox(ss))


def _probability_table(strategies) -> np.ndarray:
    n = len(strategies)
    space = state_space(n)
    return np.array([[float(p) for p in s.global_probs(space)] for s in strategies])


def play_states(strategies: Sequence[MemoryOneStrategy], rounds: int, seed: int, replication: int,
                initial_state: Sequence[int]) -> np.ndarray:
    """Joint-state index sequence of one replication (round 0 is ``initial_state``)."""
    n = len(strategies)
    space = state_space(n)
    P = _probability_table(strategies)  # players x states
    gens = [stream(seed, replication, i) for i in range(n)]
    weights = 2 ** np.arange(n - 1, -1, -1)
    dtype = np.int8 if n <= 6 else np.int32
    out = np.empty(rounds, dtype=dtype)
    s = space.index(initial_state)
    out[0] = s
    pos = 1
    while pos < rounds:
        m = min(CHUNK, rounds - pos)
        u = np.stack([g.random(m) for g in gens], axis=1)  # m x players
        # nxt[t, s]: joint state reached at round pos+t from previous state s
        no_access = u[:, None, :] >= P.T[None, :, :]
        nxt = (no_access.astype(np.int64) @ weights).tolist()
        block = []
        append = block.append
        for row in nxt:
            s = row[s]
            append(s)
        out[pos:pos + m] = block
        pos += m
    return out


def running_means(states: np.ndarray, payoffs: PayoffMatrix) -> np.ndarray:
    """Prefix averages of every player's payoff, one column per player."""
    table = np.array([[float(x) for x in v] for v in payoffs.per_player_payoffs]).T  # states x players
    per_round = table[states.astype(np.int64)]
    return np.cumsum(per_round, axis=0) / np.arange(1, len(states) + 1)[:, None]


def _trace(config: SimulationConfig, replication: int) -> SimulationTrace:
    n = config.n_players
    space = state_space(n)
    states = play_states(config.strategies, config.rounds, config.seed, replication, config.initial_state)
    means = running_means(states, config.payoffs)
    table = np.array([[float(x) for x in v] for v in config.payoffs.per_player_payoffs]).T
    idx = np.arange(0, config.rounds, config.record_stride)
    if idx[-1] != config.rounds - 1:
        idx = np.append(idx, config.rounds - 1)
    freq = np.bincount(states.astype(np.int64), minlength=len(space)) / config.rounds
    access = np.array([freq[np.array(space.plays(i, 1))].sum() for i in range(n)])
    return SimulationTrace(
        replication=replication,
        seed=config.seed,
        config_hash=config.config_hash(),
        states=states,
        recorded_rounds=idx,
        recorded_payoffs=table[states[idx].astype(np.int64)],
        running_means=means[idx],
        state_frequencies=freq,
        mean_payoffs=means[-1].copy(),
        access_fractions=access,
        label=config.label,
        n_players=n,
    )


def _trace_job(args):
    return _trace(*args)


def simulate(config: SimulationConfig, jobs: int = 1) -> list:
    """One trace per replication, ordered by replication index."""
    work = [(config, r) for r in range(config.replications)]
    if jobs <= 1 or len(work) == 1:
        return [_trace(*w) for w in work]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_trace_job, work))


def rounds_to_band(trace: SimulationTrace, target: float, epsilon: float = 0.05, player: int = 0) -> int:
    """First recorded round after which the running mean never leaves the band.

    A trace still outside the band at its last round counts as the full horizon.
    """
    dev = np.abs(trace.running_means[:, player] - float(target))
    outside = np.flatnonzero(dev > epsilon)
    if outside.size == 0:
        return int(trace.recorded_rounds[0])
    last = outside[-1]
    if last == len(dev) - 1:
        return trace.rounds
    return int(trace.recorded_rounds[last + 1])


@dataclass(frozen=True)
class ConvergenceRow:
    label: str
    strategy: tuple
    mean_rounds: float
    rounds: tuple
    censored: int


def convergence_study(configs: Sequence[SimulationConfig], target, epsilon: float = 0.05,
                      player: int = 0, jobs: int = 1) -> list:
    """Replication-averaged rounds-to-band for each configuration."""
    if not configs:
        return []
    base = configs[0]
    others = lambda c: [s for s in c.strategies if s.owner != player]
    for c in configs[1:]:
        if c.payoffs != base.payoffs or others(c) != others(base):
            raise InputError("all configurations must share payoffs and opponents")
    return [convergence_row(cfg, simulate(cfg, jobs=jobs), target, epsilon, player) for cfg in configs]


def convergence_row(config: SimulationConfig, traces: Sequence[SimulationTrace], target,
                    epsilon: float = 0.05, player: int = 0) -> ConvergenceRow:
    r = tuple(rounds_to_band(t, target, epsilon, player) for t in traces)
    return ConvergenceRow(
        label=config.label,
        strategy=config.strategies[player].probs,
        mean_rounds=float(np.mean(r)),
        rounds=r,
        censored=sum(1 for t, x in zip(traces, r) if x == t.rounds),
    )


@dataclass(frozen=True)
class SweepRow:
    b: object
    strategy: tuple
    access: tuple                 # analytic, one per opponent
    power: tuple | None = None    # Lambda_avg, when a cap is given
    simulated: tuple | None = None


def power_sweep(payoffs: PayoffMatrix, targets: Sequence, b_grid: Sequence, opponents: Sequence,
                cap: float | None = None, mc_rounds: int | None = None, seed: int = 0) -> list:
    """Analytic access fraction of provider 1 over a grid of ``b`` values.

    ``opponents`` holds memory-one strategies for provider 2, or bare numbers
    read as the ``b`` of provider 2's own pinning strategy at ``targets[1]``.
    ``mc_rounds`` adds a Monte Carlo estimate of every cell.
    """
    if payoffs.n_players != 2:
        raise InputError("power sweep is defined for two providers")
    x, y = payoffs.per_player_payoffs
    opp = []
    for o in opponents:
        if isinstance(o, MemoryOneStrategy):
            if o.owner != 1:
                raise InputError("opponent strategies must belong to provider 2")
            opp.append(o)
        else:
            opp.append(synthesize_own(y, ZdParameters(targets[1], o), player=1))
    rows = []
    for b in b_grid:
        mine = synthesize_own(x, ZdParameters(targets[0], b), player=0)
        access, simulated = [], []
        for q in opp:
            pi = markov.stationary(markov.build_transition_matrix([mine, q]))
            access.append(markov.access_fraction(pi, 0))
            if mc_rounds:
                cfg = SimulationConfig((mine, q), payoffs, mc_rounds, seed=seed)
                simulated.append(float(_trace(cfg, 0).access_fractions[0]))
        power = tuple(float(cap) * float(a) for a in access) if cap is not None else None
        rows.append(SweepRow(b, mine.probs, tuple(access), power, tuple(simulated) if mc_rounds else None))
    return rows
