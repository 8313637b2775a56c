"""Markov-chain view of an iterated game played with memory-one strategies.

Long-run payoffs come from the stationary distribution of the joint-state
chain. The determinant formula (Cramer's rule on M - I with the last column
replaced by a reward vector) gives an independent route to the same number.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from . import _linalg
from .errors import DegenerateError, InputError
from .game import (
    MemoryOneStrategy,
    StateSpace,
    as_number,
    is_exact,
    state_space,
)

ROW_SUM_TOL = 1e-10
SUPPORT_EPS = 1e-14
DIRECT_SOLVE_MAX_DIM = 64


@dataclass(frozen=True, eq=False)
class TransitionMatrix:
    """Row-stochastic matrix; entry ``[l, k]`` is Pr(next = k | previous = l).

    ``entries`` is an object array of Fractions in exact mode and float64
    otherwise.
    """

    entries: np.ndarray
    space: StateSpace

    @property
    def exact(self) -> bool:
        return self.entries.dtype == object

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def as_float(self) -> "TransitionMatrix":
        return TransitionMatrix(self.entries.astype(float), self.space)


@dataclass(frozen=True, eq=False)
class StationaryDistribution:
    pi: np.ndarray
    unique: bool
    closed_classes: tuple
    initial_state: int

    @property
    def exact(self) -> bool:
        return self.pi.dtype == object

    def __getitem__(self, k):
        return self.pi[k]

    def __len__(self):
        return len(self.pi)


def _ordered(strategies: Sequence[MemoryOneStrategy], space: StateSpace | None):
    strategies = sorted(strategies, key=lambda s: s.owner)
    n = len(strategies)
    space = space or state_space(n)
    if space.n_players != n:
        raise InputError(f"{n} strategies supplied for a {space.n_players}-player game")
    for i, s in enumerate(strategies):
        if s.owner != i:
            raise InputError("need exactly one strategy per player")
        if s.n_players != n:
            raise InputError(f"strategy of player {i} is for {s.n_players} players, game has {n}")
    return strategies, space


def _global_tables(strategies, space):
    exact = all(s.exact for s in strategies)
    tables = [s.global_probs(space) for s in strategies]
    if not exact:
        tables = [tuple(float(p) for p in t) for t in tables]
    return tables, exact


def build_transition_matrix(strategies: Sequence[MemoryOneStrategy],
                            space: StateSpace | None = None) -> TransitionMatrix:
    strategies, space = _ordered(strategies, space)
    tables, exact = _global_tables(strategies, space)
    dim = len(space)
    entries = np.empty((dim, dim), dtype=object if exact else float)
    for l in range(dim):
        for k, state in enumerate(space.states):
            v = 1
            for i, a in enumerate(state):
                p = tables[i][l]
                v = v * (p if a == 1 else 1 - p)
            entries[l, k] = v
    return TransitionMatrix(entries, space)


def check_stochastic(M: TransitionMatrix) -> None:
    P = M.entries
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise InputError("transition matrix must be square")
    if M.exact:
        for l, row in enumerate(P):
            if any(x < 0 or x > 1 for x in row) or sum(row) != 1:
                raise InputError(f"row {l} is not a probability vector")
    else:
        if not np.all(np.isfinite(P)) or P.min() < -ROW_SUM_TOL or P.max() > 1 + ROW_SUM_TOL:
            raise InputError("transition matrix entries must lie in [0, 1]")
        bad = np.abs(P.sum(axis=1) - 1) > ROW_SUM_TOL
        if bad.any():
            raise InputError(f"row {int(np.argmax(bad))} does not sum to 1")


def _support(M: TransitionMatrix) -> np.ndarray:
    if M.exact:
        return np.array([[x != 0 for x in row] for row in M.entries], dtype=bool)
    return M.entries > SUPPORT_EPS


def closed_classes(M: TransitionMatrix) -> tuple:
    """Closed communicating classes of the support digraph, ordered by first state."""
    adj = _support(M)
    _, labels = connected_components(csr_matrix(adj), directed=True, connection="strong")
    classes = []
    for lab in np.unique(labels):
        members = np.flatnonzero(labels == lab)
        outside = np.ones(len(labels), dtype=bool)
        outside[members] = False
        if not adj[np.ix_(members, outside)].any():
            classes.append(tuple(int(m) for m in members))
    return tuple(sorted(classes))


def is_ergodic(M: TransitionMatrix) -> bool:
    """Irreducible and aperiodic, i.e. the support is primitive (Wielandt bound)."""
    base = _support(M).astype(np.int64)
    n = len(base)
    k = (n - 1) ** 2 + 1
    reach = np.eye(n, dtype=np.int64)
    while k:
        if k & 1:
            reach = np.minimum(reach @ base, 1)
        base = np.minimum(base @ base, 1)
        k >>= 1
    return bool(reach.all())


def _stationary_direct(P, exact: bool):
    """Solve (P^T - I) pi = 0 with the last equation replaced by sum(pi) = 1."""
    n = len(P)
    rows = [[(P[c][r] - (1 if r == c else 0)) for c in range(n)] for r in range(n)]
    rows[-1] = [1] * n
    rhs = [0] * (n - 1) + [1]
    pi = _linalg.solve(rows, rhs, exact)
    if exact:
        return np.array(pi, dtype=object)
    pi = np.clip(np.asarray(pi, dtype=float), 0.0, None)
    return pi / pi.sum()


def _stationary_power(P: np.ndarray, start: int, tol=1e-15, max_iter=1_000_000):
    # lazy chain: same stationary laws and absorption, no periodicity
    lazy = 0.5 * (P + np.eye(len(P)))
    x = np.zeros(len(P))
    x[start] = 1.0
    for _ in range(max_iter):
        nxt = x @ lazy
        if np.abs(nxt - x).sum() < tol:
            return nxt / nxt.sum()
        x = nxt
    raise DegenerateError("power iteration did not converge")


def _cesaro(M: TransitionMatrix, classes, start: int):
    """Long-run occupancy from ``start``: absorption weights times class laws."""
    P = M.entries
    exact = M.exact
    dim = M.dim
    zero = Fraction(0) if exact else 0.0
    pi = np.array([zero] * dim, dtype=object if exact else float)

    home = next((c for c in classes if start in c), None)
    if home is not None:
        weights = [(home, 1)]
    else:
        closed = {s for c in classes for s in c}
        transient = [s for s in range(dim) if s not in closed]
        pos = transient.index(start)
        A = [[(1 if r == c else 0) - P[r, c] for c in transient] for r in transient]
        weights = []
        for c in classes:
            rhs = [sum(P[r, k] for k in c) for r in transient]
            x = _linalg.solve(A, rhs, exact)
            weights.append((c, x[pos]))

    for c, w in weights:
        sub = [[P[r, k] for k in c] for r in c]
        local = _stationary_direct(sub, exact)
        for j, s in enumerate(c):
            pi[s] += w * local[j]
    return pi


def stationary(M: TransitionMatrix, initial_state=None) -> StationaryDistribution:
    """Stationary distribution, or Cesaro occupancy when the chain is not uniquely ergodic.

    ``initial_state`` (joint action tuple or index, default all players on
    action 1) only matters when there are several closed classes.
    """
    check_stochastic(M)
    if initial_state is None:
        start = 0
    elif isinstance(initial_state, (int, np.integer)):
        start = int(initial_state)
        if not 0 <= start < M.dim:
            raise InputError(f"initial state index {start} out of range")
    else:
        start = M.space.index(initial_state)
    classes = closed_classes(M)
    unique = len(classes) == 1
    if not M.exact and M.dim > DIRECT_SOLVE_MAX_DIM:
        pi = _stationary_power(M.entries, start)
    elif unique:
        pi = _stationary_direct(M.entries.tolist(), M.exact)
    else:
        pi = _cesaro(M, classes, start)
    return StationaryDistribution(pi, unique, classes, start)


def long_run_payoff(pi, payoffs: Sequence):
    values = pi.pi if isinstance(pi, StationaryDistribution) else pi
    values = list(values)
    payoffs = [as_number(x) for x in payoffs]
    if len(values) != len(payoffs):
        raise InputError(f"distribution has {len(values)} states, payoff vector {len(payoffs)}")
    if is_exact(values) and is_exact(payoffs):
        return sum((Fraction(p) * x for p, x in zip(values, payoffs)), Fraction(0))
    return float(np.dot(np.asarray(values, dtype=float), np.asarray(payoffs, dtype=float)))


def access_fraction(pi, player: int, space: StateSpace | None = None):
    """Stationary probability that ``player`` plays action 1."""
    values = pi.pi if isinstance(pi, StationaryDistribution) else pi
    space = space or state_space(len(values).bit_length() - 1)
    mask = space.plays(player, 1)
    return sum((v for v, m in zip(values, mask) if m), 0 * values[0])


def _exclusive_column(table, player, space):
    mask = space.plays(player, 1)
    return [p - (1 if m else 0) for p, m in zip(table, mask)]


def modified_matrix(strategies: Sequence[MemoryOneStrategy], f: Sequence) -> list:
    """M - I with every player-exclusive column collapsed and the last column set to ``f``.

    For two players the columns are (M~ col 1, m~_X, m~_Y, f).
    """
    strategies, space = _ordered(strategies, None)
    M = build_transition_matrix(strategies, space)
    f = [as_number(x) for x in f]
    if len(f) != M.dim:
        raise InputError(f"reward vector has {len(f)} entries, expected {M.dim}")
    exact = M.exact and is_exact(f)
    if not exact:
        f = [float(x) for x in f]
    tables, _ = _global_tables(strategies, space)
    rows = [[M.entries[r, c] - (1 if r == c else 0) for c in range(M.dim)] for r in range(M.dim)]
    if not exact:
        rows = [[float(x) for x in row] for row in rows]
    for i in range(space.n_players):
        only_i = space.index(tuple(1 if j == i else 2 for j in range(space.n_players)))
        col = _exclusive_column(tables[i], i, space)
        for r in range(M.dim):
            rows[r][only_i] = col[r]
    for r in range(M.dim):
        rows[r][-1] = f[r]
    return rows


def determinant_payoff_n(strategies: Sequence[MemoryOneStrategy], f: Sequence):
    """Normalised expected reward pi^T f = D(f) / D(1) via the determinant identity."""
    rows_f = modified_matrix(strategies, f)
    ones = [1] * len(rows_f)
    rows_1 = modified_matrix(strategies, ones)
    exact = is_exact(x for row in rows_f for x in row)
    if not exact:
        rows_1 = [[float(x) for x in row] for row in rows_1]
    d1 = _linalg.det(rows_1, exact)
    if d1 == 0 or (not exact and abs(d1) < 1e-14):
        raise DegenerateError("D(1) vanishes: the chain has no unique stationary distribution")
    return _linalg.det(rows_f, exact) / d1


def determinant_payoff(strategy_x: MemoryOneStrategy, strategy_y: MemoryOneStrategy, f: Sequence):
    if strategy_x.n_players != 2 or strategy_y.n_players != 2:
        raise InputError("determinant_payoff is the two-player form; use determinant_payoff_n")
    return determinant_payoff_n([strategy_x, strategy_y], f)


def gamma(strategies: Sequence[MemoryOneStrategy], player: int) -> tuple:
    """Per-row sum over joint outcomes of the other players; identically 1."""
    strategies, space = _ordered(strategies, None)
    tables, _ = _global_tables(strategies, space)
    out = []
    for k in range(len(space)):
        total = 0
        for state in space.states:
            if state[player] != 1:
                continue
            term = 1
            for j, a in enumerate(state):
                if j != player:
                    p = tables[j][k]
                    term = term * (p if a == 1 else 1 - p)
            total = total + term
        out.append(total)
    return tuple(out)


def collapse_column(strategies: Sequence[MemoryOneStrategy], player: int, verify: bool = True) -> tuple:
    """Player-exclusive column obtained by summing every column of M - I where ``player`` plays 1.

    Returns the closed form (p_i^k - 1 where the player played 1 in k, p_i^k
    otherwise). With ``verify`` the explicit column sum is recomputed and
    compared: exactly in rational mode, to 1e-12 otherwise.
    """
    strategies, space = _ordered(strategies, None)
    if space.n_players < 2:
        raise InputError("column collapse needs at least two players")
    space._check_player(player)
    tables, exact = _global_tables(strategies, space)
    closed = tuple(_exclusive_column(tables[player], player, space))
    if verify:
        M = build_transition_matrix(strategies, space)
        mask = space.plays(player, 1)
        for r in range(M.dim):
            explicit = sum(M.entries[r, c] - (1 if r == c else 0) for c in range(M.dim) if mask[c])
            ok = explicit == closed[r] if exact else abs(explicit - closed[r]) <= 1e-12
            if not ok:
                raise ArithmeticError(f"column collapse mismatch at row {r}: {explicit} != {closed[r]}")
    return closed
