"""Downlink spectrum-sharing model: SINR, max-min power allocation, game parameters.

Units are SI throughout: powers and noise in Watts, bandwidth in Hz, rates in
bits/s. Path gains are dimensionless attenuations in (0, 1]. A provider that
accesses the channel always transmits at its full power cap; the
self-interference term of a user is the provider's cap minus that user's own
power.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import DegenerateError, InputError
from .game import PayoffMatrix, state_space


@dataclass(frozen=True)
class User:
    gain: float
    noise_w: float
    # gain from each other provider, keyed by provider index
    cross_gains: dict = field(default_factory=dict)

    def __post_init__(self):
        if not 0 < self.gain <= 1:
            raise InputError(f"path gain must lie in (0, 1], got {self.gain}")
        if not self.noise_w > 0:
            raise InputError(f"noise power must be positive, got {self.noise_w}")
        for j, h in self.cross_gains.items():
            if not 0 <= h <= 1:
                raise InputError(f"cross gain from provider {j} must lie in [0, 1], got {h}")

    def cross_gain(self, j: int) -> float:
        return self.cross_gains.get(j, 0.0)


@dataclass(frozen=True)
class Provider:
    power_cap_w: float
    users: tuple
    name: str = ""

    def __post_init__(self):
        if not self.power_cap_w >= 0:
            raise InputError(f"power cap must be non-negative, got {self.power_cap_w}")
        object.__setattr__(self, "users", tuple(self.users))


@dataclass(frozen=True)
class DownlinkScenario:
    bandwidth_hz: float
    providers: tuple

    def __post_init__(self):
        if not self.bandwidth_hz > 0:
            raise InputError(f"bandwidth must be positive, got {self.bandwidth_hz}")
        object.__setattr__(self, "providers", tuple(self.providers))
        n = len(self.providers)
        for i, prov in enumerate(self.providers):
            for user in prov.users:
                for j in user.cross_gains:
                    if not (isinstance(j, int) and 0 <= j < n and j != i):
                        raise InputError(f"provider {i}: cross gain keyed by invalid provider {j!r}")

    def provider(self, i: int) -> Provider:
        if not 0 <= i < len(self.providers):
            raise InputError(f"provider index {i} out of range")
        return self.providers[i]


@dataclass(frozen=True)
class PowerAllocation:
    provider: int
    powers: tuple
    constant: float  # K or K-tilde

    @property
    def common_sinr(self) -> float:
        return self.constant / (1 - self.constant)


def _interference(scenario, i, user, active) -> float:
    return sum(user.cross_gain(j) * scenario.providers[j].power_cap_w for j in active if j != i)


def sinr(scenario: DownlinkScenario, i: int, k: int, allocation: PowerAllocation | Sequence[float],
         active_set: Iterable[int] = ()) -> float:
    prov = scenario.provider(i)
    if not 0 <= k < len(prov.users):
        raise InputError(f"user {k} does not belong to provider {i}")
    powers = allocation.powers if isinstance(allocation, PowerAllocation) else tuple(allocation)
    if len(powers) != len(prov.users) or min(powers) < 0:
        raise InputError("allocation must give a non-negative power to every user of the provider")
    user = prov.users[k]
    lam = powers[k]
    denom = user.noise_w + user.gain * (prov.power_cap_w - lam) + _interference(scenario, i, user, set(active_set))
    return lam * user.gain / denom


def _allocate(scenario, i, interferers) -> PowerAllocation:
    prov = scenario.provider(i)
    if not prov.users:
        raise InputError(f"provider {i} has no users")
    cap = prov.power_cap_w
    # effective noise-to-gain per user, including full-power interference
    terms = [(u.noise_w + _interference(scenario, i, u, interferers)) / u.gain for u in prov.users]
    K = cap / (sum(terms) + len(terms) * cap)
    powers = tuple(K * (t + cap) for t in terms)
    return PowerAllocation(i, powers, K)


def maxmin_allocation_solo(scenario: DownlinkScenario, i: int) -> PowerAllocation:
    """Equal-SINR allocation when provider ``i`` is alone on the channel."""
    return _allocate(scenario, i, ())


def maxmin_allocation_interfered(scenario: DownlinkScenario, i: int, interferer) -> PowerAllocation:
    """Equal-SINR allocation under full-power interference.

    ``interferer`` is one provider index or an iterable of them; several
    interferers add their terms in the denominator.
    """
    interferers = {interferer} if isinstance(interferer, int) else set(interferer)
    if i in interferers:
        raise InputError("a provider cannot interfere with itself")
    for j in interferers:
        scenario.provider(j)
    return _allocate(scenario, i, interferers)


def _name(scenario, i) -> str:
    return scenario.provider(i).name or str(i + 1)


def _spectral_efficiency(K: float) -> float:
    # log2(1 + K/(1-K)) == -log2(1-K), better conditioned for small K
    return -math.log1p(-K) / math.log(2)


def shared_rate(scenario: DownlinkScenario, i: int, interferers: Iterable[int] = ()) -> float:
    """Aggregate max-min rate of provider ``i`` when ``interferers`` also transmit."""
    interferers = set(interferers)
    alloc = _allocate(scenario, i, interferers)
    if alloc.constant <= 0:
        raise DegenerateError(f"provider {_name(scenario, i)}: K = 0, no achievable rate")
    return len(alloc.powers) * scenario.bandwidth_hz * _spectral_efficiency(alloc.constant)


def rates_and_theta(scenario: DownlinkScenario, i: int, interferer) -> tuple:
    """Solo rate R_i and interference discount theta_i = r~_i / r_i."""
    solo = maxmin_allocation_solo(scenario, i)
    if solo.constant <= 0:
        raise DegenerateError(f"provider {_name(scenario, i)}: K = 0, no achievable rate")
    shared = maxmin_allocation_interfered(scenario, i, interferer)
    R = len(solo.powers) * scenario.bandwidth_hz * _spectral_efficiency(solo.constant)
    theta = _spectral_efficiency(shared.constant) / _spectral_efficiency(solo.constant)
    return R, theta


@dataclass(frozen=True)
class Utility:
    value: Callable[[float], float]
    derivative: Callable[[float], float] | None = None
    name: str = "custom"

    def marginal(self, r: float) -> float:
        if self.derivative is not None:
            return self.derivative(r)
        h = 1e-6 * max(1.0, abs(r))
        lo = max(0.0, r - h)
        return (self.value(r + h) - self.value(lo)) / (r + h - lo)


def log_utility(weight: float = 1.0) -> Utility:
    return Utility(lambda r: weight * math.log1p(r), lambda r: weight / (1 + r), f"log(w={weight})")


def isoelastic_utility(rho: float) -> Utility:
    if not 0 < rho < 1:
        raise InputError(f"iso-elastic exponent must lie in (0, 1), got {rho}")
    return Utility(lambda r: r ** rho / rho,
                   lambda r: r ** (rho - 1) if r > 0 else math.inf,
                   f"isoelastic(rho={rho})")


def optimal_rate(utility: Utility, price: float, rtol: float = 1e-12, max_rate: float = 1e15) -> float:
    """Maximiser of U(R) - c R over R >= 0 for concave increasing U.

    Solved by bisection on the marginal condition U'(R) = c. A flat stretch
    returns its smallest point.
    """
    if not price > 0:
        raise InputError(f"price must be positive, got {price}")
    if utility.marginal(0.0) <= price:
        return 0.0
    hi = 1.0
    while utility.marginal(hi) > price:
        hi *= 2
        if hi > max_rate:
            raise InputError("objective is unbounded: marginal utility never falls to the price")
    _check_concave(utility, hi)
    lo = 0.0
    while hi - lo > rtol * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if utility.marginal(mid) > price:
            lo = mid
        else:
            hi = mid
    return hi


def _check_concave(utility: Utility, hi: float, samples: int = 257) -> None:
    grid = np.linspace(0.0, hi, samples)
    vals = np.array([utility.value(r) for r in grid])
    # midpoint concavity on the sampled bracket
    mid = vals[1:-1] - 0.5 * (vals[:-2] + vals[2:])
    scale = 1e-9 * max(1.0, float(np.max(np.abs(vals))))
    if np.any(mid < -scale):
        raise InputError("utility is not concave on the search bracket")


@dataclass(frozen=True)
class GameParameters:
    """Lumped parameters of the binary power-control game.

    Two providers: ``theta[i]`` is the discount when both access. Three
    providers: ``alpha1[i]`` holds one discount per other provider (ascending
    index) for sharing with that provider alone, ``alpha2[i]`` the discount
    when all three access.
    """

    rates: tuple
    theta: tuple | None = None
    alpha1: tuple | None = None
    alpha2: tuple | None = None
    prices: tuple | None = None
    targets: tuple | None = None

    def __post_init__(self):
        n = len(self.rates)
        if any(not r > 0 for r in self.rates):
            raise InputError("solo rates must be positive")
        if n == 2:
            if self.theta is None or len(self.theta) != 2:
                raise InputError("two-provider game needs theta for both providers")
            for i, t in enumerate(self.theta):
                if not 0 < t < 1:
                    raise DegenerateError(f"provider {i + 1}: theta degenerate ({t}); must lie in (0, 1)")
        elif n == 3:
            if self.alpha1 is None or self.alpha2 is None:
                raise InputError("three-provider game needs alpha1 and alpha2")
            for i in range(3):
                a1, a2 = self.alpha1[i], self.alpha2[i]
                if len(a1) != 2:
                    raise InputError("alpha1 needs one discount per other provider")
                if not all(0 < a < 1 for a in a1) or not 0 < a2 <= min(a1):
                    raise DegenerateError(f"provider {i + 1}: need 0 < alpha2 <= alpha1 < 1, got {a1}, {a2}")
        else:
            raise InputError(f"game parameters cover 2 or 3 providers, got {n}")

    @property
    def n_players(self) -> int:
        return len(self.rates)

    @classmethod
    def two_player(cls, R, theta, **kw) -> "GameParameters":
        return cls(rates=_pair(R, 2), theta=_pair(theta, 2), **kw)

    @classmethod
    def three_player(cls, R, alpha1, alpha2, **kw) -> "GameParameters":
        a1 = _pair(alpha1, 3)
        a1 = tuple(tuple(a) if isinstance(a, (tuple, list)) else (a, a) for a in a1)
        return cls(rates=_pair(R, 3), alpha1=a1, alpha2=_pair(alpha2, 3), **kw)

    def payoff_matrix(self) -> PayoffMatrix:
        """Rate of every provider in every joint state; no access earns 0."""
        n = self.n_players
        space = state_space(n)
        vectors = []
        for i in range(n):
            row = []
            for state in space.states:
                if state[i] != 1:
                    row.append(0)
                    continue
                others = [j for j in range(n) if j != i and state[j] == 1]
                row.append(self.rates[i] * self._discount(i, others))
            vectors.append(tuple(row))
        return PayoffMatrix(tuple(vectors))

    def _discount(self, i, others):
        if not others:
            return 1
        if self.n_players == 2:
            return self.theta[i]
        if len(others) == 2:
            return self.alpha2[i]
        slot = [j for j in range(3) if j != i].index(others[0])
        return self.alpha1[i][slot]


def _pair(value, n):
    if isinstance(value, (tuple, list)):
        if len(value) != n:
            raise InputError(f"expected {n} values, got {len(value)}")
        return tuple(value)
    return (value,) * n


def build_game(scenario: DownlinkScenario, utilities: Sequence[Utility] | None = None,
               prices: Sequence[float] | None = None) -> tuple:
    """Payoff matrix and lumped parameters for a 2- or 3-provider scenario.

    When utilities and prices are given, each provider's utility-maximising
    target rate is attached to the parameters.
    """
    n = len(scenario.providers)
    if n not in (2, 3):
        raise InputError(f"game building supports 2 or 3 providers, got {n}")
    # interference-free pairs make the game degenerate; report that before
    # any provider that cannot transmit at all
    for i in range(n):
        solo = _allocate(scenario, i, ())
        if solo.constant <= 0:
            continue
        for j in range(n):
            if j != i and _allocate(scenario, i, {j}).constant >= solo.constant:
                raise DegenerateError(f"provider {_name(scenario, i)}: theta degenerate "
                                      f"(provider {_name(scenario, j)} causes no interference)")
    rates = tuple(shared_rate(scenario, i) for i in range(n))

    def discount(i, others):
        return shared_rate(scenario, i, others) / rates[i]

    extra = {}
    if prices is not None:
        if utilities is None or len(utilities) != n or len(prices) != n:
            raise InputError("need one utility and one price per provider")
        extra = dict(prices=tuple(prices),
                     targets=tuple(optimal_rate(u, c) for u, c in zip(utilities, prices)))
    if n == 2:
        theta = (discount(0, [1]), discount(1, [0]))
        params = GameParameters(rates=rates, theta=theta, **extra)
    else:
        alpha1 = tuple(tuple(discount(i, [j]) for j in range(3) if j != i) for i in range(3))
        alpha2 = tuple(discount(i, [j for j in range(3) if j != i]) for i in range(3))
        params = GameParameters(rates=rates, alpha1=alpha1, alpha2=alpha2, **extra)
    return params.payoff_matrix(), params
