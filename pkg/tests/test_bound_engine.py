import json
import math
import warnings

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gronwall2d.bound_engine import (
    AugmentedStateBoussinesq,
    AugmentedStateNhEuler,
    ModelConstants,
    Trajectory,
    boussinesq_functional,
    closed_form_eps0,
    comparison_verify,
    constant_functional,
    eval_F_boussinesq,
    integrate_bound,
    log_growth,
    nh_euler_functional,
    picard_solve,
    predict_horizon,
    rhs_boussinesq_augmented,
    rhs_nheuler_augmented,
    solve_abstract,
    thresholds,
    w_to_z,
    z_to_w,
)
from gronwall2d.errors import BlowUpError, HistoryGapError, RegimeWarning

mp.mp.dps = 50
E = math.e
B = math.exp(-1.0)

# e^{-1} exp(e^{-1})
F_ZERO_HISTORY = 0.53146360538661567
# log 2 - log 6 - exp(2e)
LOG_EPS1_C1_T1_M2 = -230.75027637219224
LOG_EPS2_C1_T1_M2 = -91.02075221398


def mp_thresholds(c, t, m, b=B):
    """Independent arbitrary-precision evaluation of (log ε1, log ε2, log L)."""
    c, t, m, b = map(mp.mpf, (c, t, m, b))
    tau = m * mp.e ** (c * t)
    log_eps1 = mp.log(m) - mp.log(2 * c * t * (1 + t * m)) - t * mp.e ** tau
    lip = c * t * mp.e ** (b * t * mp.e ** tau) + b * t * mp.e ** (
        b * t * mp.e ** tau + c * t + tau) * (c * m * t + 1)
    log_lip = mp.log(lip)
    return float(log_eps1), float(-mp.log(t) - log_lip), float(log_lip)


# ---------------------------------------------------------------- types

def test_model_constants_validation():
    with pytest.raises(ValueError):
        ModelConstants(-1.0, 1.0)
    with pytest.raises(ValueError):
        ModelConstants(1.0, -0.1)
    with pytest.raises(ValueError):
        ModelConstants(1.0, 1.0, 1.5)
    mc = ModelConstants(1.0, 1.0)
    assert mc.b_const == pytest.approx(B, rel=1e-15)
    assert mc.with_(epsilon=0.5).epsilon == 0.5


def test_trajectory_invariants(tmp_path):
    with pytest.raises(ValueError):
        Trajectory([0.1, 0.2], [1.0, 2.0])
    with pytest.raises(ValueError):
        Trajectory([0.0, 0.0], [1.0, 2.0])
    with pytest.raises(ValueError):
        Trajectory([0.0, 1.0], [1.0, float("nan")])
    tr = Trajectory([0.0, 0.5, 1.0], [1.0, 2.0, 4.0])
    with pytest.raises(ValueError):
        tr.values[0] = 3.0
    assert tr.at(0.25) == pytest.approx(1.5)
    assert tr.final == 4.0 and tr.t_end == 1.0
    back = Trajectory.from_csv(tr.to_csv(tmp_path / "tr.csv"))
    assert np.array_equal(back.times, tr.times) and np.array_equal(back.values, tr.values)
    assert (tmp_path / "tr.csv").read_text().splitlines()[0] == "t,value"


# ---------------------------------------------------------------- right-hand sides

def test_rhs_boussinesq_examples():
    d = rhs_boussinesq_augmented(AugmentedStateBoussinesq(1.0), ModelConstants(1.0, 1.0))
    assert (d.z, d.a, d.bint) == (1.0, 1.0, 1.0)
    d = rhs_boussinesq_augmented(AugmentedStateBoussinesq(E), ModelConstants(1.0, 1.0, 0.5))
    assert d.z == pytest.approx(6.795704571147613, rel=1e-14)
    with pytest.raises(ValueError):
        rhs_boussinesq_augmented(AugmentedStateBoussinesq(0.5), ModelConstants(1.0, 1.0))


@pytest.mark.parametrize("eps", [0.0, 0.3, 1.0])
def test_rhs_nheuler_at_unity(eps):
    d = rhs_nheuler_augmented(AugmentedStateNhEuler(1.0), ModelConstants(1.0, 1.0, eps))
    assert d.upsilon == pytest.approx(1.0 + eps, rel=1e-15)
    assert d.a == 0.0 and d.i2 == 0.0


def test_rhs_nheuler_example():
    d = rhs_nheuler_augmented(AugmentedStateNhEuler(2.0, 0.0, 1.0), ModelConstants(1.0, 1.0, 1.0))
    # H = 1 + 4 ln 2 = 3.772588722239781
    assert d.upsilon == pytest.approx(10.931471805599453, rel=1e-14)
    assert d.a == 1.0
    # Z = 1, Y = 1: Z^3 Y (1 + Y + eps^2 Z^6) = 3
    assert d.i2 == pytest.approx(3.0, rel=1e-15)


# ---------------------------------------------------------------- integration

def test_integrate_bound_closed_form_along_path():
    grid = np.linspace(0.0, 1.0, 11)
    for system in ("boussinesq", "nh_euler"):
        tr = integrate_bound(system, E, ModelConstants(1.0, 1.0), t_eval=grid)
        exact = np.exp(2.0 * np.exp(grid) - 1.0)
        assert np.max(np.abs(tr.values / exact - 1.0)) < 1e-8
        assert np.allclose(closed_form_eps0(grid, E, 1.0), exact, rtol=1e-15)


def test_integrate_bound_zero_horizon():
    tr = integrate_bound("boussinesq", E, ModelConstants(1.0, 0.0))
    assert len(tr) == 1 and tr.final == E


def test_systems_agree_at_eps_zero():
    mc = ModelConstants(0.7, 0.8)
    grid = np.linspace(0.0, 0.8, 9)
    a = integrate_bound("boussinesq", 3.0, mc, 1e-12, 1e-14, t_eval=grid)
    b = integrate_bound("nh_euler", 3.0, mc, 1e-12, 1e-14, t_eval=grid)
    assert np.allclose(a.values, b.values, rtol=1e-10, atol=0)


def test_integrate_bound_blowup_reports_time():
    with pytest.raises(BlowUpError) as info:
        integrate_bound("boussinesq", 2.0, ModelConstants(5.0, 3.0, 1.0))
    exc = info.value
    assert 0.0 < exc.time < 3.0
    assert isinstance(exc.trajectory, Trajectory)
    assert exc.trajectory.t_end == pytest.approx(exc.time)


def test_integrate_bound_rejects_bad_input():
    with pytest.raises(ValueError):
        integrate_bound("boussinesq", 1.0, ModelConstants(1.0, 1.0))
    with pytest.raises(ValueError):
        integrate_bound("euler", 2.0, ModelConstants(1.0, 1.0))


# ---------------------------------------------------------------- mild form and Picard

def _history(value, t_end=1.0, n=4001):
    ts = np.linspace(0.0, t_end, n)
    return Trajectory(ts, np.full(n, float(value)))


def test_eval_F_examples():
    mc = ModelConstants(1.0, 1.0)
    assert eval_F_boussinesq(0.0, _history(2.0), mc) == pytest.approx(1.0, rel=1e-15)
    assert eval_F_boussinesq(1.0, _history(0.0), mc) == pytest.approx(F_ZERO_HISTORY, rel=1e-12)
    assert eval_F_boussinesq(1.0, _history(1.0), ModelConstants(0.0, 1.0)) == 0.0


def test_eval_F_against_nested_quadrature():
    c, b, t = 1.0, B, 0.5
    inner = lambda s: b * mp.quad(lambda r: mp.e ** (mp.e ** (c * r)), [0, s])  # noqa: E731
    big_j = mp.quad(lambda s: mp.e ** inner(s), [0, t])
    oracle = float(c * (big_j + mp.e ** (-c * t) * mp.e ** inner(t)))
    got = eval_F_boussinesq(t, _history(1.0, 1.0, 20001), ModelConstants(c, 1.0))
    assert got == pytest.approx(oracle, rel=1e-8)


def test_eval_F_beyond_history():
    with pytest.raises(HistoryGapError):
        eval_F_boussinesq(2.0, _history(1.0), ModelConstants(1.0, 2.0))


def test_picard_eps_zero_is_constant():
    res = picard_solve(2.0, ModelConstants(1.0, 0.3, 0.0), grid_n=50)
    assert res.iterations == 1
    assert np.all(res.trajectory.values == 2.0)


def test_picard_matches_ode():
    mc = ModelConstants(1.0, 0.1, 0.01)
    res = picard_solve(2.0, mc, grid_n=1000, tol=1e-10)
    z_ode = integrate_bound("boussinesq", math.exp(1.0), mc, 1e-12, 1e-14,
                            t_eval=res.trajectory.times)
    z_pic = w_to_z(res.trajectory, 1.0)
    assert np.max(np.abs(z_pic.values / z_ode.values - 1.0)) < 1e-6
    lip = math.exp(thresholds(2.0, mc).lipschitz_log)
    assert res.contraction_estimate <= mc.epsilon * mc.horizon * lip
    assert res.in_regime


def test_picard_warns_outside_regime():
    mc = ModelConstants(1.0, 0.1, 0.11)  # eps2 ≈ 0.0971 for w0 = 2
    with pytest.warns(RegimeWarning):
        res = picard_solve(2.0, mc, grid_n=200)
    assert not res.in_regime


def test_w_z_round_trip():
    tr = Trajectory(np.linspace(0, 1, 5), np.linspace(2.0, 3.0, 5))
    back = w_to_z(z_to_w(tr, 0.7), 0.7)
    assert np.allclose(back.values, tr.values, rtol=1e-14)


# ---------------------------------------------------------------- thresholds

def test_thresholds_reference_values():
    r = thresholds(1.0, ModelConstants(1.0, 1.0))
    assert r.log_eps1 == pytest.approx(LOG_EPS1_C1_T1_M2, rel=1e-12)
    assert r.log_eps2 == pytest.approx(LOG_EPS2_C1_T1_M2, rel=1e-10)
    assert r.eps0 == pytest.approx(6.115447946682732e-101, rel=1e-9)
    assert r.m_bound == 2.0 and not r.overflow_flag

    r = thresholds(1.0, ModelConstants(1.0, 0.1))
    assert r.eps0 == 1.0
    assert math.exp(r.log_eps1) == pytest.approx(3.34805719391213, rel=1e-12)
    assert math.exp(r.log_eps2) == pytest.approx(13.1219708754005, rel=1e-12)
    assert math.exp(r.lipschitz_log) == pytest.approx(0.76208064283596, rel=1e-12)


def test_thresholds_small_horizon_clips_to_one():
    assert thresholds(1.0, ModelConstants(1.0, 1e-8)).eps0 == 1.0


def test_thresholds_overflow_sentinel():
    r = thresholds(5.0, ModelConstants(1.0, 5.0))
    assert r.overflow_flag and r.eps0 == 0.0
    assert math.isfinite(r.log_eps1) and r.log_eps1 < -1e300
    json.loads(r.to_json())


def test_thresholds_json_keys(tmp_path):
    r = thresholds(1.0, ModelConstants(1.0, 0.1))
    data = json.loads(r.to_json(tmp_path / "t.json"))
    assert set(data) == {"log_eps1", "log_eps2", "eps0", "lipschitz_log", "m_bound",
                         "overflow_flag"}
    assert json.loads((tmp_path / "t.json").read_text()) == data


def test_thresholds_rejects_bad_input():
    with pytest.raises(ValueError):
        thresholds(0.0, ModelConstants(1.0, 1.0))
    with pytest.raises(ValueError):
        thresholds(1.0, ModelConstants(1.0, 0.0))


def test_predict_horizon_examples():
    eps1 = thresholds(1.0, ModelConstants(1.0, 1.0)).eps0
    assert predict_horizon(eps1, 1.0, 1.0) == pytest.approx(1.0, rel=1e-9)
    t = predict_horizon(1.0 - 1e-12, 1.0, 1.0)
    assert 0.0 < t < 1.0
    with pytest.raises(ValueError):
        predict_horizon(1.0, 1.0, 1.0)


# ---------------------------------------------------------------- comparison

def test_comparison_examples():
    grid = np.linspace(0.0, 1.0, 11)
    r = comparison_verify(Trajectory(grid, np.full(11, 0.5)), Trajectory(grid, np.ones(11)))
    assert r.holds and r.first_crossing is None and r.max_gap == pytest.approx(-0.5)
    r = comparison_verify(Trajectory([0, 1, 2], [0.5, 0.9, 1.1]), Trajectory([0, 2], [1.0, 1.0]))
    assert not r.holds and r.first_crossing == pytest.approx(1.5, rel=1e-14)


# ---------------------------------------------------------------- abstract form

def test_solve_abstract_instances():
    grid = np.linspace(0.0, 0.2, 11)
    mc = ModelConstants(1.0, 0.2, 0.05)
    a = solve_abstract(log_growth(1.0), boussinesq_functional(mc), 2.0, mc, 1e-12, 1e-14,
                       t_eval=grid)
    b = integrate_bound("boussinesq", 2.0, mc, 1e-12, 1e-14, t_eval=grid)
    assert np.allclose(a.values, b.values, rtol=1e-9, atol=0)
    a = solve_abstract(log_growth(1.0), nh_euler_functional(mc), 2.0, mc, 1e-12, 1e-14,
                       t_eval=grid)
    b = integrate_bound("nh_euler", 2.0, mc, 1e-12, 1e-14, t_eval=grid)
    assert np.allclose(a.values, b.values, rtol=1e-9, atol=0)


@pytest.mark.parametrize("forcing, eps, rate", [(0.0, 0.0, 1.0), (1.0, 1.0, 2.0)])
def test_solve_abstract_linear(forcing, eps, rate):
    grid = np.linspace(0.0, 1.0, 6)
    tr = solve_abstract(lambda y: y, constant_functional(forcing), 1.5,
                        ModelConstants(1.0, 1.0, eps), t_eval=grid)
    assert np.allclose(tr.values, 1.5 * np.exp(rate * grid), rtol=1e-9)


# ---------------------------------------------------------------- properties

PROP = settings(max_examples=40, deadline=None)


def _until_blowup(system, z0, mc, grid):
    """Trajectory on ``grid``, cut at the blow-up time if there is one."""
    try:
        return integrate_bound(system, z0, mc, 1e-11, 1e-13, t_eval=grid)
    except BlowUpError as exc:
        return exc.trajectory


@PROP
@given(c=st.floats(0.2, 3.0), t=st.floats(0.01, 1.5), m=st.floats(0.5, 3.0))
def test_log_thresholds_match_arbitrary_precision(c, t, m):
    r = thresholds(m, ModelConstants(c, t))
    le1, le2, ll = mp_thresholds(c, t, 2 * m)
    if r.overflow_flag:
        return
    assert r.log_eps1 == pytest.approx(le1, rel=1e-9, abs=1e-12)
    assert r.log_eps2 == pytest.approx(le2, rel=1e-9, abs=1e-12)
    assert r.lipschitz_log == pytest.approx(ll, rel=1e-9, abs=1e-12)


@PROP
@given(t1=st.floats(0.01, 2.0), t2=st.floats(0.01, 2.0), m=st.floats(1.0, 3.0))
def test_eps0_nonincreasing_in_horizon(t1, t2, m):
    lo, hi = sorted((t1, t2))
    assert thresholds(m, ModelConstants(1.0, hi)).log_eps0 <= \
        thresholds(m, ModelConstants(1.0, lo)).log_eps0


@PROP
@given(m1=st.floats(1.0, 4.0), m2=st.floats(1.0, 4.0), t=st.floats(0.01, 1.0))
def test_eps0_nonincreasing_in_radius(m1, m2, t):
    lo, hi = sorted((m1, m2))
    assert thresholds(hi, ModelConstants(1.0, t)).log_eps0 <= \
        thresholds(lo, ModelConstants(1.0, t)).log_eps0


@PROP
@given(k=st.floats(2.0, 150.0))
def test_predict_horizon_is_inverse(k):
    eps = 10.0 ** -k
    t = predict_horizon(eps, 1.0, 1.0)
    log_eps0 = thresholds(1.0, ModelConstants(1.0, t)).log_eps0
    assert abs(log_eps0 - math.log(eps)) <= math.log(1.01)
    assert log_eps0 >= math.log(eps)


@PROP
@given(e1=st.floats(0.0, 0.05), e2=st.floats(0.0, 0.05), z0=st.floats(1.01, 5.0),
       system=st.sampled_from(["boussinesq", "nh_euler"]))
def test_bound_monotone_in_eps(e1, e2, z0, system):
    lo, hi = sorted((e1, e2))
    grid = np.linspace(0.0, 0.2, 21)
    za, zb = (_until_blowup(system, z0, ModelConstants(1.0, 0.2, e), grid) for e in (lo, hi))
    k = min(len(za), len(zb))
    assert len(za) >= len(zb)
    assert np.all(za.values[:k] <= zb.values[:k] * (1 + 1e-9))


@PROP
@given(z0=st.floats(1.0001, 10.0), c=st.floats(0.1, 2.0), eps=st.floats(0.0, 0.1),
       system=st.sampled_from(["boussinesq", "nh_euler"]))
def test_bound_exceeds_one_and_increases(z0, c, eps, system):
    grid = np.linspace(0.0, 0.2, 21)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        tr = _until_blowup(system, z0, ModelConstants(c, 0.2, eps), grid)
    assert np.all(tr.values > 1.0)
    assert np.all(np.diff(tr.values) > 0)
