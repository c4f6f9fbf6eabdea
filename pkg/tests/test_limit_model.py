import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chlandscape.limit_model import (
    C0,
    DomainError,
    LimitParams,
    ball_perimeter,
    c1_bar,
    critical_constants,
    f_xi,
    f_xi_prime,
    f_xi_second,
    inflection_volume,
    limit_energy_set,
    solve_extrema,
    sphere_area,
)

mp.mp.dps = 30
P = LimitParams(2, 1.5)


def _mp_c1(d):
    sig = 2 * mp.pi ** (mp.mpf(d) / 2) / mp.gamma(mp.mpf(d) / 2)
    return (2 * mp.sqrt(2) / 3) * sig ** (mp.mpf(1) / d) * mp.mpf(d) ** (mp.mpf(d - 1) / d)


def _mp_derivs(d):
    c1, a = _mp_c1(d), mp.mpf(d - 1) / d
    f = lambda nu, xi: c1 * nu**a - 4 * nu + 4 * xi ** (-(d + 1)) * nu**2  # noqa: E731
    f1 = lambda nu, xi: a * c1 * nu ** (a - 1) - 4 + 8 * xi ** (-(d + 1)) * nu  # noqa: E731
    f2 = lambda nu, xi: a * (a - 1) * c1 * nu ** (a - 2) + 8 * xi ** (-(d + 1))  # noqa: E731
    return f, f1, f2


def _mp_root(fn, lo, hi, iters=110):
    """Plain bisection in mpmath arithmetic; the bracket must change sign."""
    lo, hi = mp.mpf(lo), mp.mpf(hi)
    flo = fn(lo)
    assert flo * fn(hi) < 0
    for _ in range(iters):
        mid = (lo + hi) / 2
        fm = fn(mid)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return (lo + hi) / 2


def _mp_inflection(d, xi):
    _, _, f2 = _mp_derivs(d)
    return _mp_root(lambda v: f2(v, xi), mp.mpf(10) ** -6, xi ** (d + 1))


def mp_crossover(d):
    """xi at which the positive local minimum of f has value 0 (nested 1-D roots)."""
    f, f1, _ = _mp_derivs(d)

    def min_value(xi):
        lo = _mp_inflection(d, xi)
        return f(_mp_root(lambda v: f1(v, xi), lo, xi ** (d + 1) / 2), xi)

    return _mp_root(min_value, mp_saddle_node(d) * mp.mpf(1.001), 5)


def mp_saddle_node(d):
    """xi at which min over nu of f' touches 0."""
    _, f1, _ = _mp_derivs(d)
    return _mp_root(lambda xi: f1(_mp_inflection(d, xi), xi), 0.5, 5)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_critical_constants_match_high_precision_roots(d):
    xt, xd = critical_constants(d)
    assert abs(xd - float(mp_crossover(d))) < 1e-9
    assert abs(xt - float(mp_saddle_node(d))) < 1e-9


def test_constants_d2_values():
    xt, xd = critical_constants(2)
    assert xd == pytest.approx(1.6765, abs=1e-4)
    assert xt == pytest.approx(1.3307, abs=1e-4)
    assert xt == pytest.approx(xd * 2 ** (-1 / 3), rel=1e-14)


@pytest.mark.parametrize("d", range(2, 7))
def test_constant_ratio(d):
    xt, xd = critical_constants(d)
    assert xt / xd == pytest.approx(2 ** (1 / (d + 1)) * (1 - 1 / d) ** (d / (d + 1)), rel=1e-14)
    assert xt < xd


def test_sphere_area_and_c0():
    assert C0 == pytest.approx(2 * math.sqrt(2) / 3, rel=1e-15)
    assert sphere_area(2) == pytest.approx(2 * math.pi, rel=1e-15)
    assert sphere_area(3) == pytest.approx(4 * math.pi, rel=1e-15)
    for d in range(1, 9):
        ref = float(2 * mp.pi ** (mp.mpf(d) / 2) / mp.gamma(mp.mpf(d) / 2))
        assert sphere_area(d) == pytest.approx(ref, rel=1e-13)


def test_domain_errors():
    with pytest.raises(DomainError):
        LimitParams(1, 1.5)
    with pytest.raises(DomainError):
        LimitParams(2, 0.0)
    with pytest.raises(DomainError):
        f_xi(-0.1, P)
    with pytest.raises(DomainError):
        f_xi_prime(0.0, P)
    with pytest.raises(DomainError):
        critical_constants(1)
    with pytest.raises(DomainError):
        limit_energy_set(-1.0, 1.0, P)


def test_f_zero():
    for xi in (0.5, 1.5, 3.0):
        assert f_xi(0.0, LimitParams(2, xi)) == 0.0
        assert f_xi(0.0, LimitParams(3, xi)) == 0.0


def test_extrema_d2_xi15():
    ex = solve_extrema(P).extrema
    # high-precision roots of f' as oracle
    fp = lambda v: _mp_derivs(2)[1](v, mp.mpf(1.5))  # noqa: E731
    assert ex.nu_s == pytest.approx(float(mp.findroot(fp, 0.24)), abs=1e-10)
    assert ex.nu_m == pytest.approx(float(mp.findroot(fp, 0.97)), abs=1e-10)
    assert ex.nu_s == pytest.approx(0.236, abs=1e-3)
    assert ex.c_s == pytest.approx(0.746, abs=1e-3)
    assert ex.c_m == pytest.approx(0.527, abs=1e-3)
    # the precise values are nu_m = 0.97268 and gamma0 = 1.71677
    assert ex.nu_m == pytest.approx(0.972678, abs=1e-6)
    assert ex.gamma0 == pytest.approx(1.716769, abs=1e-6)
    assert abs(f_xi_prime(ex.nu_s, P)) < 1e-8
    assert abs(f_xi_prime(ex.nu_m, P)) < 1e-8
    assert ex.gamma0**2 == pytest.approx(4 * (ex.nu_m - ex.nu_s), rel=1e-14)
    assert 0 < ex.nu_s < ex.nu_m < 1.5**3 / 2
    assert ex.c_m < ex.c_s


def test_no_extrema_below_saddle_node():
    p = LimitParams(2, 1.0)
    assert solve_extrema(p).extrema is None
    grid = np.linspace(1e-6, 1.0 / 2, 20001)
    assert all(f_xi_prime(v, p) > 0 for v in grid)


def test_crossover_value_vanishes():
    _, xd = critical_constants(2)
    ex = solve_extrema(LimitParams(2, xd)).extrema
    assert abs(f_xi(ex.nu_m, LimitParams(2, xd))) <= 1e-8


def test_saddle_node_double_root():
    xt, _ = critical_constants(2)
    p = LimitParams(2, xt)
    v = inflection_volume(p)
    assert abs(f_xi_prime(v, p)) <= 1e-6
    assert abs(f_xi_second(v, p)) <= 1e-6
    # just above the saddle-node both extrema exist and are close together
    ex = solve_extrema(LimitParams(2, xt * (1 + 1e-6))).extrema
    assert ex is not None and ex.nu_m - ex.nu_s < 0.05


def test_inflection_is_zero_of_second_derivative():
    for d in (2, 3, 5):
        p = LimitParams(d, 1.7)
        assert abs(f_xi_second(inflection_volume(p), p)) < 1e-10


def test_derivative_matches_finite_difference():
    rng = np.random.default_rng(7)
    for v in rng.uniform(0.01, 3.0, 20):
        hstep = 1e-6 * v
        fd = (f_xi(v + hstep, P) - f_xi(v - hstep, P)) / (2 * hstep)
        assert f_xi_prime(v, P) == pytest.approx(fd, rel=1e-6, abs=1e-9)


def test_limit_energy_square():
    assert limit_energy_set(0.0, 0.0, P) == 0.0
    assert limit_energy_set(4.0, 1.0, P) == pytest.approx(C0 * 4 - 4 + 4 / 3.375, rel=1e-15)


def test_limit_energy_ball_equals_f():
    rng = np.random.default_rng(3)
    for d in (2, 3):
        p = LimitParams(d, 1.5)
        for v in rng.uniform(0.0, 1.5, 25):
            assert limit_energy_set(ball_perimeter(v, d), v, p) == pytest.approx(f_xi(v, p), rel=1e-13, abs=1e-14)


def test_c1_bar_is_ball_perimeter_constant():
    for d in (2, 3, 4):
        assert C0 * ball_perimeter(1.0, d) == pytest.approx(c1_bar(d), rel=1e-14)


@settings(max_examples=40, deadline=None)
@given(st.floats(min_value=1.34, max_value=1.6765))
def test_nu_m_is_local_minimum_on_gamma0_window(xi):
    p = LimitParams(2, xi)
    ex = solve_extrema(p).extrema
    assert ex is not None
    half = ex.gamma0**2 / 4
    vs = np.linspace(max(ex.nu_m - half, 0.0), ex.nu_m + half, 801)
    assert all(f_xi(v, p) >= ex.c_m - 1e-12 for v in vs)


def test_crossover_sign():
    _, xd = critical_constants(2)
    for xi in np.linspace(1.4, 2.2, 33):
        ex = solve_extrema(LimitParams(2, float(xi))).extrema
        if abs(xi - xd) < 1e-6:
            continue
        assert (ex.c_m <= 0) == (xi >= xd)


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 5), st.floats(0.5, 3.0))
def test_extrema_invariants(d, xi):
    p = LimitParams(d, xi)
    land = solve_extrema(p)
    assert (land.extrema is not None) == (xi > land.xi_tilde)
    if land.extrema:
        ex = land.extrema
        assert 0 < ex.nu_s < ex.nu_m < xi ** (d + 1) / 2
        assert ex.c_m < ex.c_s
        assert abs(f_xi_prime(ex.nu_s, p)) < 1e-6
        assert abs(f_xi_prime(ex.nu_m, p)) < 1e-6


def test_solve_extrema_deterministic():
    assert solve_extrema(P) == solve_extrema(P)
