"""Joint-action state spaces, payoff structures and memory-one strategies.

Actions are encoded as 1 (access / play action 1) and 2 (no access). Joint
states are ordered lexicographically, so for two players the order is
(1,1), (1,2), (2,1), (2,2).

A strategy stores its probabilities in the *owner's perspective*: the state
tuple is rearranged so the owner's own action comes first, followed by the
other players in ascending index order. For player 0 this is the global
order. For the column player of a two-player game, entry ``(1,2)`` is the
probability of playing 1 after the column player played 1 and the row player
played 2, which is the indexing used by the transition matrix
(the second row of M pairs p^{1,2} with q^{2,1}).
"""

from __future__ import annotations

import itertools
import numbers
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .errors import InputError

FLOAT_SLACK = 1e-12


def as_number(value):
    """Coerce user input to int, Fraction or float.

    Strings are parsed exactly (``"5/9"`` and ``"0.1"`` both become Fractions),
    Python floats stay floats.
    """
    if isinstance(value, bool):
        raise InputError(f"not a number: {value!r}")
    if isinstance(value, (int, Fraction)):
        return value
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise InputError(f"not a number: {value!r}") from None
    if isinstance(value, numbers.Integral):
        return int(value)
    if isinstance(value, numbers.Real):
        return float(value)
    raise InputError(f"not a number: {value!r}")


def is_exact(values) -> bool:
    return all(isinstance(v, (int, Fraction)) and not isinstance(v, bool) for v in values)


def to_float(values) -> tuple:
    return tuple(float(v) for v in values)


@dataclass(frozen=True)
class StateSpace:
    n_players: int
    states: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.n_players, int) or self.n_players < 1:
            raise InputError(f"n_players must be a positive integer, got {self.n_players!r}")
        object.__setattr__(self, "states", tuple(itertools.product((1, 2), repeat=self.n_players)))

    def __len__(self):
        return len(self.states)

    def index(self, actions: Sequence[int]) -> int:
        actions = tuple(actions)
        if len(actions) != self.n_players:
            raise InputError(f"expected {self.n_players} actions, got {len(actions)}")
        idx = 0
        for a in actions:
            if a not in (1, 2) or isinstance(a, bool):
                raise InputError(f"actions must be 1 or 2, got {a!r}")
            idx = 2 * idx + (a - 1)
        return idx

    def state(self, index: int) -> tuple:
        return self.states[index]

    def own_view(self, state: Sequence[int], player: int) -> tuple:
        """Reorder a global state so ``player``'s action comes first."""
        state = tuple(state)
        return (state[player],) + state[:player] + state[player + 1:]

    @lru_cache(maxsize=None)
    def perspective(self, player: int) -> tuple:
        """``perspective(i)[g]`` is the own-view index of global state ``g``."""
        self._check_player(player)
        return tuple(self.index(self.own_view(s, player)) for s in self.states)

    def plays(self, player: int, action: int = 1) -> tuple:
        """Boolean mask of states in which ``player`` takes ``action``."""
        return tuple(s[player] == action for s in self.states)

    def _check_player(self, player):
        if not (isinstance(player, numbers.Integral) and 0 <= player < self.n_players):
            raise InputError(f"player index {player!r} out of range for {self.n_players} players")

    def label(self, index: int) -> str:
        return "-".join(str(a) for a in self.states[index])


@lru_cache(maxsize=None)
def state_space(n_players: int) -> StateSpace:
    return StateSpace(n_players)


def state_index(actions: Sequence[int], space: StateSpace | None = None) -> int:
    space = space or state_space(len(tuple(actions)))
    return space.index(actions)


def to_global(own_vector: Sequence, player: int, space: StateSpace) -> tuple:
    perm = space.perspective(player)
    return tuple(own_vector[perm[g]] for g in range(len(space)))


def to_own(global_vector: Sequence, player: int, space: StateSpace) -> tuple:
    perm = space.perspective(player)
    out = [None] * len(space)
    for g, o in enumerate(perm):
        out[o] = global_vector[g]
    return tuple(out)


def _check_probability(p, owner, k):
    if isinstance(p, float):
        if p != p or p < -FLOAT_SLACK or p > 1 + FLOAT_SLACK:
            raise InputError(f"player {owner}: probability {p!r} at state {k} outside [0, 1]")
        return min(1.0, max(0.0, p))
    if p < 0 or p > 1:
        raise InputError(f"player {owner}: probability {p} at state {k} outside [0, 1]")
    return p


@dataclass(frozen=True)
class MemoryOneStrategy:
    """Probabilities of playing action 1 given the previous joint state.

    ``probs`` is indexed in the owner's perspective (see module docstring).
    """

    owner: int
    probs: tuple

    def __post_init__(self):
        probs = tuple(as_number(p) for p in self.probs)
        n = len(probs).bit_length() - 1
        if len(probs) < 2 or 2 ** n != len(probs):
            raise InputError(f"a memory-one strategy needs 2^N probabilities, got {len(probs)}")
        if not (isinstance(self.owner, numbers.Integral) and 0 <= self.owner < n):
            raise InputError(f"owner {self.owner!r} out of range for {n} players")
        probs = tuple(_check_probability(p, self.owner, k) for k, p in enumerate(probs))
        object.__setattr__(self, "probs", probs)

    @property
    def n_players(self) -> int:
        return len(self.probs).bit_length() - 1

    @property
    def exact(self) -> bool:
        return is_exact(self.probs)

    def global_probs(self, space: StateSpace | None = None) -> tuple:
        space = space or state_space(self.n_players)
        return to_global(self.probs, self.owner, space)

    def as_float(self) -> "MemoryOneStrategy":
        return MemoryOneStrategy(self.owner, to_float(self.probs))

    @classmethod
    def constant(cls, owner: int, p, n_players: int = 2) -> "MemoryOneStrategy":
        """Memory-less policy accessing with probability ``p`` every round."""
        return cls(owner, (p,) * 2 ** n_players)

    def __str__(self):
        return "(" + ", ".join(str(p) for p in self.probs) + ")"


OpponentPolicy = MemoryOneStrategy


@dataclass(frozen=True)
class PayoffMatrix:
    """Single-round payoffs, one flat vector per player in global state order."""

    per_player_payoffs: tuple

    def __post_init__(self):
        vectors = tuple(tuple(as_number(x) for x in v) for v in self.per_player_payoffs)
        if not vectors:
            raise InputError("payoff matrix needs at least one player")
        n = len(vectors)
        for i, v in enumerate(vectors):
            if len(v) != 2 ** n:
                raise InputError(f"player {i}: expected {2 ** n} payoffs, got {len(v)}")
            for x in v:
                if isinstance(x, float) and not (abs(x) < float("inf")):
                    raise InputError(f"player {i}: non-finite payoff {x!r}")
        object.__setattr__(self, "per_player_payoffs", vectors)

    @property
    def n_players(self) -> int:
        return len(self.per_player_payoffs)

    @property
    def space(self) -> StateSpace:
        return state_space(self.n_players)

    @property
    def exact(self) -> bool:
        return all(is_exact(v) for v in self.per_player_payoffs)

    def as_float(self) -> "PayoffMatrix":
        return PayoffMatrix(tuple(to_float(v) for v in self.per_player_payoffs))


def payoff_vector(matrix: PayoffMatrix, player: int) -> tuple:
    matrix.space._check_player(player)
    return matrix.per_player_payoffs[player]
