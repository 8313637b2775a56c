"""Payoff-pinning zero-determinant strategies.

A player can pin a long-run payoff (its own, or another player's) at a
target ``u`` when, along the player's own action axis, the largest payoff
under one action does not exceed the smallest payoff under the other. The
pinning strategy sets the player-exclusive column of M - I to ``a*U + b``
with ``a = -b/u``:

    p^k = [player plays 1 in k] + (1 - U_k / u) * b

Everything here works in the controller's perspective (own action first),
so the two-player formulas and the N-player formulas share one code path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import (
    BInfeasibleError,
    InputError,
    NotControllableError,
    TargetInfeasibleError,
)
from .game import (
    MemoryOneStrategy,
    StateSpace,
    as_number,
    is_exact,
    state_space,
    to_own,
)
from . import markov

PIN_TOL = 1e-9
N_VERIFY_OPPONENTS = 25


@dataclass(frozen=True)
class ControlReport:
    """Outcome of the controllability test for one payoff vector.

    ``k_min`` is the controller action whose worst payoff bounds the
    interval from above, ``k_max`` the action whose best payoff bounds it from
    below. ``sign_case`` is the sign of ``b`` for positive targets.
    """

    controllable: bool
    k_min: int | None
    k_max: int | None
    interval: tuple | None
    sign_case: int | None
    excludes_zero: bool = False

    @property
    def lo(self):
        return self.interval[0] if self.interval else None

    @property
    def hi(self):
        return self.interval[1] if self.interval else None

    def admits(self, target) -> bool:
        if not self.controllable or target == 0:
            return False
        return self.interval[0] <= target <= self.interval[1]


@dataclass(frozen=True)
class ZdParameters:
    target: object
    b: object

    def __post_init__(self):
        object.__setattr__(self, "target", as_number(self.target))
        object.__setattr__(self, "b", as_number(self.b))
        if self.target == 0:
            raise TargetInfeasibleError("target 0 is excluded (the strategy formula divides by it)")
        if self.b == 0:
            raise BInfeasibleError("b must be non-zero")

    @property
    def a(self):
        return -self.b / self.target


@dataclass(frozen=True)
class BRange:
    """Feasible interval for ``b``; the bound at zero is always open."""

    lo: object
    hi: object
    lo_closed: bool
    hi_closed: bool

    def contains(self, b) -> bool:
        if b == 0:
            return False
        lo_ok = b >= self.lo if self.lo_closed else b > self.lo
        hi_ok = b <= self.hi if self.hi_closed else b < self.hi
        return lo_ok and hi_ok

    @property
    def positive(self) -> bool:
        return self.lo == 0

    def midpoint(self):
        if self.positive:
            return self.hi / 2 if self.hi != math.inf else 1
        return self.lo / 2 if self.lo != -math.inf else -1

    def __str__(self):
        left = "[" if self.lo_closed else "("
        right = "]" if self.hi_closed else ")"
        return f"{left}{self.lo}, {self.hi}{right}"


def _own_payoffs(payoffs: Sequence, controller: int, space: StateSpace | None):
    values = tuple(as_number(x) for x in payoffs)
    n = len(values).bit_length() - 1
    if len(values) < 4 or 2 ** n != len(values):
        raise InputError(f"payoff vector needs 2^N (N >= 2) entries, got {len(values)}")
    space = space or state_space(n)
    if len(space) != len(values):
        raise InputError(f"payoff vector has {len(values)} entries, game has {len(space)} states")
    space._check_player(controller)
    return to_own(values, controller, space), space


def _split(own: Sequence):
    half = len(own) // 2
    return own[:half], own[half:]


def _report(own: Sequence) -> ControlReport:
    groups = dict(zip((1, 2), _split(own)))
    for k_min, k_max in ((1, 2), (2, 1)):
        lo = max(groups[k_max])
        hi = min(groups[k_min])
        if lo <= hi:
            return ControlReport(
                controllable=True,
                k_min=k_min,
                k_max=k_max,
                interval=(lo, hi),
                sign_case=1 if k_min == 1 else -1,
                excludes_zero=lo <= 0 <= hi,
            )
    return ControlReport(False, None, None, None, None)


def controllability(payoffs: Sequence, player: int = 0, space: StateSpace | None = None) -> ControlReport:
    """Controllability of a payoff vector (global state order) by ``player``."""
    own, _ = _own_payoffs(payoffs, player, space)
    return _report(own)


def check_controllability(payoffs: Sequence, axis: str = "rows") -> ControlReport:
    """Two-player form: ``rows`` tests the row player, ``columns`` the column player."""
    if axis not in ("rows", "columns"):
        raise InputError(f"axis must be 'rows' or 'columns', got {axis!r}")
    if len(payoffs) != 4:
        raise InputError("check_controllability expects a 2x2 payoff vector")
    return controllability(payoffs, 0 if axis == "rows" else 1)


def _b_range_positive_target(own, target) -> BRange:
    if _exact(own, target):
        target = Fraction(target)
        ratio = lambda x: Fraction(x) / target
    else:
        target = float(target)
        ratio = lambda x: float(x) / target
    row1, row2 = _split(own)
    report = _report(own)
    if report.k_min == 1:
        # b > 0: action-1 probabilities must stay >= 0, action-2 ones <= 1
        bounds = [-1 / (1 - ratio(max(row1))) if max(row1) != target else None,
                  1 / (1 - ratio(min(row2))) if min(row2) != target else None]
        bounds = [x for x in bounds if x is not None]
        return BRange(0, min(bounds) if bounds else math.inf, False, True)
    bounds = [-1 / (1 - ratio(min(row1))) if min(row1) != target else None,
              1 / (1 - ratio(max(row2))) if max(row2) != target else None]
    bounds = [x for x in bounds if x is not None]
    return BRange(max(bounds) if bounds else -math.inf, 0, True, False)


def _exact(own, target) -> bool:
    return is_exact(own) and is_exact([target])


def _check_target(report: ControlReport, target):
    if not report.controllable:
        raise NotControllableError("no action's worst payoff dominates the other action's best payoff")
    if target == 0:
        raise TargetInfeasibleError(
            f"target 0 is excluded; controllable interval is {_fmt_interval(report)}")
    if not report.interval[0] <= target <= report.interval[1]:
        raise TargetInfeasibleError(
            f"target {target} outside controllable interval {_fmt_interval(report)}")


def _fmt_interval(report: ControlReport) -> str:
    lo, hi = report.interval
    if report.excludes_zero and lo == 0:
        return f"(0, {hi}]"
    if report.excludes_zero and hi == 0:
        return f"[{lo}, 0)"
    if report.excludes_zero:
        return f"[{lo}, {hi}] minus {{0}}"
    return f"[{lo}, {hi}]"


def _b_range_own(own, target) -> BRange:
    if target < 0:
        # only ratios U/u enter the strategy, so negate both
        return _b_range_positive_target(tuple(-x for x in own), -target)
    return _b_range_positive_target(own, target)


def b_range(payoffs: Sequence, target, report: ControlReport | None = None,
            player: int = 0, space: StateSpace | None = None) -> BRange:
    """Feasible ``b`` values for pinning ``payoffs`` (global order) at ``target``.

    A bound whose denominator vanishes (target equal to the corresponding
    payoff extreme) is vacuous and dropped.
    """
    target = as_number(target)
    own, space = _own_payoffs(payoffs, player, space)
    report = report or _report(own)
    _check_target(report, target)
    return _b_range_own(own, target)


def auto_b(payoffs: Sequence, target, player: int = 0, space: StateSpace | None = None):
    """Midpoint of the feasible ``b`` range."""
    return b_range(payoffs, target, player=player, space=space).midpoint()


def zd_probabilities(own_payoffs: Sequence, target, b) -> tuple:
    """Raw strategy formula in the controller's perspective; no range checks."""
    own = tuple(as_number(x) for x in own_payoffs)
    target, b = as_number(target), as_number(b)
    exact = _exact(own, target) and is_exact([b])
    if exact:
        target, b = Fraction(target), Fraction(b)
    else:
        own = tuple(float(x) for x in own)
        target, b = float(target), float(b)
    half = len(own) // 2
    return tuple((1 if k < half else 0) + (1 - x / target) * b for k, x in enumerate(own))


def _synthesize(payoffs, params: ZdParameters, controller: int, space, verify: bool):
    own, space = _own_payoffs(payoffs, controller, space)
    report = _report(own)
    _check_target(report, params.target)
    rng_b = _b_range_own(own, params.target)
    probs = zd_probabilities(own, params.target, params.b)
    escaped = [(space.label(k), p) for k, p in enumerate(probs) if not 0 <= p <= 1]
    if not rng_b.contains(params.b) or escaped:
        detail = ", ".join(f"p[{lab}]={p}" for lab, p in escaped) or "sign of b"
        raise BInfeasibleError(f"b={params.b} outside feasible range {rng_b} ({detail})")
    strategy = MemoryOneStrategy(controller, probs)
    if verify:
        verify_pinning(strategy, payoffs, params.target, space=space)
    return strategy


def synthesize_own(payoffs: Sequence, params: ZdParameters, player: int = 0,
                   space: StateSpace | None = None, verify: bool = True) -> MemoryOneStrategy:
    """Strategy for ``player`` that pins its own long-run payoff at ``params.target``.

    ``payoffs`` is the player's payoff vector in global state order.
    """
    return _synthesize(payoffs, params, player, space, verify)


def synthesize_opponent_control(opponent_payoffs: Sequence, params: ZdParameters,
                                controller: int = 0, space: StateSpace | None = None,
                                verify: bool = True) -> MemoryOneStrategy:
    """Strategy for ``controller`` pinning another player's long-run payoff.

    The opponent's payoffs are read along the controller's own action axis.
    """
    return _synthesize(opponent_payoffs, params, controller, space, verify)


def synthesize_multiplayer(payoffs_i: Sequence, params: ZdParameters, player: int = 0,
                           space: StateSpace | None = None, verify: bool = True) -> MemoryOneStrategy:
    return _synthesize(payoffs_i, params, player, space, verify)


def random_policies(rng: np.random.Generator, controller: int, n_players: int, low=0.05, high=0.95):
    """One random memory-one policy for every player except ``controller``."""
    return [MemoryOneStrategy(j, tuple(rng.uniform(low, high, 2 ** n_players)))
            for j in range(n_players) if j != controller]


def verify_pinning(strategy: MemoryOneStrategy, payoffs: Sequence, target, space=None,
                   n_opponents: int = N_VERIFY_OPPONENTS, seed: int = 0, tol: float = PIN_TOL) -> float:
    """Check the pinned payoff against random opponents; returns the worst deviation."""
    space = space or state_space(strategy.n_players)
    rng = np.random.default_rng(seed)
    f = [float(x) for x in payoffs]
    mine = strategy.as_float()
    worst = 0.0
    for _ in range(n_opponents):
        others = random_policies(rng, strategy.owner, space.n_players)
        M = markov.build_transition_matrix([mine, *others], space)
        achieved = markov.long_run_payoff(markov.stationary(M), f)
        worst = max(worst, abs(achieved - float(target)))
    if worst > tol:
        raise ArithmeticError(f"pinning check failed: deviation {worst:.3g} from target {target}")
    return worst
