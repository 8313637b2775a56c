import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import maxmin_oracle, sinr_oracle
from zdspectrum.errors import DegenerateError, InputError
from zdspectrum.spectrum import (
    DownlinkScenario,
    GameParameters,
    Provider,
    User,
    Utility,
    build_game,
    isoelastic_utility,
    log_utility,
    maxmin_allocation_interfered,
    maxmin_allocation_solo,
    optimal_rate,
    rates_and_theta,
    shared_rate,
    sinr,
)


def pair(cap_j=1.0, bandwidth=1.0, h_cross=1.0):
    return DownlinkScenario(bandwidth, (
        Provider(1.0, (User(1.0, 1.0, {1: h_cross}),), "A"),
        Provider(cap_j, (User(1.0, 1.0, {0: h_cross}),), "B"),
    ))


def single(gains, noises, cap, other=None):
    provs = [Provider(cap, tuple(User(g, s, {1: h} if other else {}) for g, s, h in
                                 zip(gains, noises, other or [0] * len(gains))))]
    if other:
        provs.append(Provider(cap, (User(1.0, 1.0),)))
    return DownlinkScenario(1.0, tuple(provs))


def test_sinr_examples():
    sc = single([1.0], [1.0], 1.0)
    assert sinr(sc, 0, 0, [1.0]) == 1
    assert sinr(sc, 0, 0, [0.0]) == 0
    assert sinr(pair(), 0, 0, [1.0], active_set=[0, 1]) == 0.5


def test_solo_examples():
    a = maxmin_allocation_solo(single([1, 1], [1, 1], 2.0), 0)
    assert a.constant == pytest.approx(1 / 3, abs=1e-15)
    assert a.powers == pytest.approx((1, 1), abs=1e-15)
    assert a.common_sinr == pytest.approx(0.5, abs=1e-15)
    a = maxmin_allocation_solo(single([1, 0.5], [1, 1], 2.0), 0)
    assert a.constant == pytest.approx(2 / 7, abs=1e-15)
    assert a.powers == pytest.approx((6 / 7, 8 / 7), abs=1e-15)
    assert a.common_sinr == pytest.approx(0.4, abs=1e-15)
    assert maxmin_allocation_solo(single([0.3], [2.0], 5.0), 0).powers == pytest.approx((5.0,))


def test_interfered_examples():
    a = maxmin_allocation_interfered(pair(), 0, 1)
    assert a.constant == pytest.approx(1 / 3, abs=1e-15)
    assert a.common_sinr == pytest.approx(0.5, abs=1e-15)
    silent = pair(cap_j=0.0)
    assert maxmin_allocation_interfered(silent, 0, 1) == maxmin_allocation_solo(silent, 0)
    sc = single([1, 1], [1, 1], 2.0, other=[0.5, 0.5])
    a = maxmin_allocation_interfered(sc, 0, 1)
    g, powers = maxmin_oracle([1, 1], [1, 1], 2.0, [1.0, 1.0])
    assert a.common_sinr == pytest.approx(g, abs=1e-9)
    assert a.powers == pytest.approx(powers, abs=1e-9)


def test_interferer_validation():
    with pytest.raises(InputError):
        maxmin_allocation_interfered(pair(), 0, 0)
    with pytest.raises(InputError):
        maxmin_allocation_interfered(pair(), 0, 5)


def test_rates_and_theta_examples():
    R, theta = rates_and_theta(pair(), 0, 1)
    assert R == pytest.approx(1, abs=1e-15)
    assert theta == pytest.approx(math.log2(1.5), abs=1e-15)
    R2, theta2 = rates_and_theta(pair(bandwidth=2.0), 0, 1)
    assert R2 == pytest.approx(2 * R) and theta2 == pytest.approx(theta)
    _, theta0 = rates_and_theta(pair(cap_j=0.0), 0, 1)
    assert theta0 == 1
    with pytest.raises(DegenerateError, match="theta degenerate"):
        build_game(pair(cap_j=0.0))
    with pytest.raises(DegenerateError, match="theta degenerate"):
        build_game(pair(h_cross=0.0))


def test_build_game_symmetric():
    matrix, params = build_game(pair())
    t = math.log2(1.5)
    assert params.rates == pytest.approx((1, 1)) and params.theta == pytest.approx((t, t))
    x, y = matrix.per_player_payoffs
    assert x == pytest.approx((t, 1, 0, 0)) and y == pytest.approx((t, 0, 1, 0))


def test_build_game_three_providers():
    users = lambda i: (User(1.0, 1.0, {j: 0.2 * (1 + i + j) for j in range(3) if j != i}),)
    sc = DownlinkScenario(1.0, tuple(Provider(1.0, users(i)) for i in range(3)))
    matrix, params = build_game(sc)
    for i in range(3):
        assert 0 < params.alpha2[i] <= min(params.alpha1[i]) < 1
        others = [j for j in range(3) if j != i]
        assert params.alpha2[i] == pytest.approx(shared_rate(sc, i, others) / shared_rate(sc, i))
    assert matrix.n_players == 3 and matrix.per_player_payoffs[0][-1] == 0


def test_direct_parameters():
    params = GameParameters.two_player(1, F(1, 2))
    assert params.payoff_matrix().per_player_payoffs == ((F(1, 2), 1, 0, 0), (F(1, 2), 0, 1, 0))
    with pytest.raises(DegenerateError):
        GameParameters.two_player(1, 1)
    with pytest.raises(DegenerateError):
        GameParameters.three_player(1, F(1, 3), F(1, 2))


def test_scenario_validation():
    with pytest.raises(InputError):
        User(1.5, 1.0)
    with pytest.raises(InputError):
        User(0.5, 0.0)
    with pytest.raises(InputError):
        User(0.5, 1.0, {1: 2.0})
    with pytest.raises(InputError):
        DownlinkScenario(1.0, (Provider(1.0, (User(1.0, 1.0, {0: 0.5}),)),))
    with pytest.raises(InputError):
        DownlinkScenario(0.0, ())


# -- utility optimum ------------------------------------------------------------

def test_optimal_rate_examples():
    assert optimal_rate(log_utility(2.0), 1.0) == pytest.approx(1.0, abs=1e-9)
    linear = Utility(lambda r: r, lambda r: 1.0, "linear")
    assert optimal_rate(linear, 1.0) == 0
    assert optimal_rate(log_utility(2.0), 10.0) == 0


@given(st.floats(0.5, 20), st.floats(0.05, 0.45))
def test_optimal_rate_first_order(w, c):
    r = optimal_rate(log_utility(w), c)
    assert abs(w / (1 + r) - c) <= 1e-6


@given(st.floats(0.1, 0.9), st.floats(0.05, 5))
def test_optimal_rate_isoelastic(rho, c):
    r = optimal_rate(isoelastic_utility(rho), c)
    assert abs(r ** (rho - 1) - c) <= 1e-6 * max(1, c)


def test_optimal_rate_rejects_convex():
    convex = Utility(lambda r: r * r + r, lambda r: 2 * r + 1, "convex")
    with pytest.raises(InputError):
        optimal_rate(convex, 0.5)


# -- allocation invariants on random scenarios ---------------------------------------

gain = st.floats(0.05, 1.0)
noise = st.floats(0.01, 5.0)


@st.composite
def scenarios(draw):
    n_prov = draw(st.integers(2, 3))
    provs = []
    for i in range(n_prov):
        k = draw(st.integers(1, 3))
        users = tuple(User(draw(gain), draw(noise),
                           {j: draw(st.floats(0.0, 1.0)) for j in range(n_prov) if j != i})
                      for _ in range(k))
        provs.append(Provider(draw(st.floats(0.1, 10.0)), users))
    return DownlinkScenario(1.0, tuple(provs))


def _check(sc, i, alloc, active):
    prov = sc.providers[i]
    g = [sinr(sc, i, k, alloc, active) for k in range(len(prov.users))]
    assert max(g) - min(g) <= 1e-9 * (1 + max(g))
    assert abs(g[0] - alloc.common_sinr) <= 1e-9 * (1 + alloc.common_sinr)
    assert abs(sum(alloc.powers) - prov.power_cap_w) <= 1e-9 * prov.power_cap_w
    assert min(alloc.powers) >= 0
    interference = [sum(u.cross_gain(j) * sc.providers[j].power_cap_w for j in active if j != i)
                    for u in prov.users]
    common, powers = maxmin_oracle([u.gain for u in prov.users], [u.noise_w for u in prov.users],
                                   prov.power_cap_w, interference)
    assert abs(common - alloc.common_sinr) <= 1e-6 * (1 + common)
    np.testing.assert_allclose(alloc.powers, powers, rtol=1e-6, atol=1e-9)
    for u, lam, want in zip(prov.users, powers, g):
        assert abs(sinr_oracle(u.gain, u.noise_w, prov.power_cap_w, lam, interference[prov.users.index(u)])
                   - want) <= 1e-6 * (1 + want)


@given(scenarios())
def test_maxmin_invariants(sc):
    n = len(sc.providers)
    for i in range(n):
        _check(sc, i, maxmin_allocation_solo(sc, i), [i])
        others = [j for j in range(n) if j != i]
        for j in others:
            _check(sc, i, maxmin_allocation_interfered(sc, i, j), [i, j])
        _check(sc, i, maxmin_allocation_interfered(sc, i, others), list(range(n)))


# caps on a 0.1 W grid: caps one ulp apart are not resolvable in float
@given(st.lists(st.integers(1, 100), min_size=2, max_size=6, unique=True))
def test_theta_decreases_with_interferer_cap(tenths):
    thetas = [rates_and_theta(pair(cap_j=c / 10), 0, 1)[1] for c in sorted(tenths)]
    assert all(a > b for a, b in zip(thetas, thetas[1:]))


def test_maxmin_beats_perturbations():
    """Shifting power between users never raises the minimum SINR."""
    sc = single([1.0, 0.4, 0.7], [1.0, 0.5, 2.0], 3.0)
    a = maxmin_allocation_solo(sc, 0)
    best = min(sinr(sc, 0, k, a) for k in range(3))
    rng = np.random.default_rng(0)
    for _ in range(500):
        w = rng.dirichlet(np.ones(3)) * 3.0
        assert min(sinr(sc, 0, k, w) for k in range(3)) <= best + 1e-12
