import warnings

import numpy as np
import pytest

from brfd.grid import Mesh, TimeGrid
from brfd.norms import norm_inf
from brfd.problems import IncompatibleDataError, Problem, get_problem, linear_heat_mode, zero_problem
from brfd.scheme import (
    BRFD, MBRFD, BRFDSuboptimalInit, CrankNicolsonNewton, NewtonConvergenceError, SchemeState,
    StepConditionWarning, run, step_I, step_II, step_III,
)
from brfd.trisolve import SingularSystemError
from oracles import sine_mode


def _constant_g_problem(c, m, k=1):
    return Problem(
        g=lambda u: np.full(np.shape(u), c), g_prime=lambda u: np.zeros(np.shape(u)),
        f=lambda t, x: np.zeros(np.shape(x)),
        u0=lambda x: np.sin(k * np.pi * (np.asarray(x) - m.x_a) / m.L),
        name="const_g",
    )


@pytest.mark.parametrize("c", [0.0, 3.0, -7.5])
def test_eigenmode_ratios(c, backend):
    m, tg = Mesh(0.0, 1.0, 31), TimeGrid(0.5, 20)
    k = 2
    s, lam = sine_mode(m, k)
    p = _constant_g_problem(c, m, k)
    mu = lam - c
    U0, Uh = step_I(p, m, tg)
    r_half = (1 - tg.tau * mu / 4) / (1 + tg.tau * mu / 4)
    np.testing.assert_allclose(Uh.values, r_half * U0.values, atol=1e-13)
    r = (1 - tg.tau * mu / 2) / (1 + tg.tau * mu / 2)
    st = step_II(SchemeState(0, U0, None, Uh), p, m, tg)
    np.testing.assert_allclose(st.U.values, r * U0.values, atol=1e-13)
    np.testing.assert_array_equal(st.Phi.values, np.full(m.J + 2, c))
    st2 = step_III(st, p, m, tg)
    np.testing.assert_allclose(st2.U.values, r * r * U0.values, atol=1e-13)
    np.testing.assert_array_equal(st2.Phi.values, np.full(m.J + 2, c))


def test_linear_mode_over_many_steps(backend):
    m, tg = Mesh(0.0, 1.0, 19), TimeGrid(1.0, 100)
    s, lam = sine_mode(m, 1)
    traj = run(linear_heat_mode(1), m, tg)
    r = (1 - tg.tau * lam / 2) / (1 + tg.tau * lam / 2)
    for st in traj.states:
        np.testing.assert_allclose(st.U.values, r ** st.n * s, atol=1e-11)
    assert len(traj.phi) == tg.N
    assert traj.condition_margin == 0.5


def test_zero_is_fixed_point():
    m, tg = Mesh(0.0, 1.0, 9), TimeGrid(1.0, 10)
    for variant in (BRFD(), MBRFD(0.5), BRFDSuboptimalInit(), CrankNicolsonNewton()):
        traj = run(zero_problem(), m, tg, variant)
        assert all(np.all(st.U.values == 0.0) for st in traj.states)


def test_single_step_and_stride():
    m = Mesh(0.0, 1.0, 9)
    traj = run(get_problem("mms_exp_sine_gsin"), m, TimeGrid(0.1, 1))
    assert [s.n for s in traj.states] == [0, 1]
    traj = run(get_problem("mms_exp_sine_gsin"), m, TimeGrid(1.0, 10), record_stride=4)
    assert [s.n for s in traj.states] == [0, 4, 8, 10]
    np.testing.assert_allclose(traj.times, [0.0, 0.4, 0.8, 1.0])
    assert traj.U_array().shape == (4, 11)
    with pytest.raises(ValueError):
        run(get_problem("zero"), m, TimeGrid(1, 2), record_stride=0)


def test_brfd_matches_cn_on_linear_problem():
    m, tg = Mesh(0.0, 1.0, 29), TimeGrid(1.0, 40)
    p = linear_heat_mode(3)
    a = run(p, m, tg, BRFD())
    b = run(p, m, tg, CrankNicolsonNewton())
    assert max(norm_inf(x.U.values - y.U.values) for x, y in zip(a.states, b.states)) <= 1e-12
    assert b.phi == [] and b.U_half is None and np.isnan(b.condition_margin)


def test_mbrfd_coincides_inside_identity_band(backend):
    m, tg = Mesh(0.0, 1.0, 19), TimeGrid(1.0, 20)
    p = get_problem("mms_exp_sine_gsin")
    a, b = run(p, m, tg, BRFD()), run(p, m, tg, MBRFD(10.0))
    for x, y in zip(a.states, b.states):
        np.testing.assert_array_equal(x.U.values, y.U.values)
    for x, y in zip(a.phi, b.phi):
        np.testing.assert_array_equal(x.values, y.values)


def test_mbrfd_saturates_large_potential():
    # g(u) = 50 u makes sup|Phi| large; the mollified run stays bounded
    m, tg = Mesh(0.0, 1.0, 19), TimeGrid(0.2, 10)
    p = Problem(lambda u: 50 * u, lambda u: 50 + 0 * u, lambda t, x: 0 * x, lambda x: np.sin(np.pi * x))
    traj = run(p, m, tg, MBRFD(1.0))
    assert traj.condition_passed and traj.condition_margin == pytest.approx(0.5 - tg.tau * 2.0 / 4)
    assert np.all(np.isfinite(traj.final.U.values))


def test_step_condition_warns_once():
    m, tg = Mesh(0.0, 1.0, 9), TimeGrid(1.0, 5)
    p = Problem(lambda u: 0 * u - 30.0, lambda u: 0 * u, lambda t, x: 0 * x, lambda x: np.sin(np.pi * x))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        traj = run(p, m, tg)
    assert sum(issubclass(w.category, StepConditionWarning) for w in caught) == 1
    assert not traj.condition_passed and traj.condition_margin < 0
    # a negative potential keeps the system diagonally dominant: the run still completes
    assert np.all(np.isfinite(traj.final.U.values))


def test_singular_step_reports_index():
    # diag 1 + tau/h^2 - tau*phi/2 vanishes for phi = 2/tau + 2/h^2
    m, tg = Mesh(0.0, 1.0, 3), TimeGrid(1.0, 2)
    c = 2 / (0.5 * tg.tau) + 2 / m.h ** 2
    p = Problem(lambda u: 0 * u + c, lambda u: 0 * u, lambda t, x: 0 * x, lambda x: np.sin(np.pi * x))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", StepConditionWarning)
        with pytest.raises(SingularSystemError) as info:
            run(p, m, tg)
    assert info.value.step == 0 and info.value.pivot_index == 0


def test_newton_nonconvergence():
    m, tg = Mesh(0.0, 1.0, 9), TimeGrid(1.0, 4)
    with pytest.raises(NewtonConvergenceError) as info:
        run(get_problem("mms_exp_sine_gsin"), m, tg, CrankNicolsonNewton(tol=1e-30, max_iter=2))
    assert info.value.step == 1


def test_incompatible_initial_data():
    p = Problem(np.sin, np.cos, lambda t, x: 0 * x, lambda x: 1.0 + 0 * x)
    with pytest.raises(IncompatibleDataError):
        run(p, Mesh(0, 1, 5), TimeGrid(1, 2))
    with pytest.raises(IncompatibleDataError):
        run(p, Mesh(0, 1, 5), TimeGrid(1, 2), CrankNicolsonNewton())


def test_variant_validation_and_step_guards():
    with pytest.raises(ValueError):
        MBRFD(0.0)
    with pytest.raises(ValueError):
        CrankNicolsonNewton(tol=0.0)
    with pytest.raises(ValueError):
        CrankNicolsonNewton(max_iter=0)
    p, m, tg = get_problem("zero"), Mesh(0, 1, 5), TimeGrid(1, 2)
    U0, _ = step_I(p, m, tg)
    with pytest.raises(ValueError):
        step_II(SchemeState(0, U0), p, m, tg)
    with pytest.raises(ValueError):
        step_III(SchemeState(0, U0), p, m, tg)


def test_suboptimal_init_potential():
    p = get_problem("mms_exp_sine_gsin")
    m, tg = Mesh(0.0, 1.0, 9), TimeGrid(1.0, 4)
    traj = run(p, m, tg, BRFDSuboptimalInit())
    np.testing.assert_array_equal(traj.phi[0].values, np.sin(traj.states[0].U.values))


def test_boundary_values_stay_zero(backend):
    traj = run(get_problem("mms_exp_sine_gu", -1.0, 1.0), Mesh(-1.0, 1.0, 15), TimeGrid(1.0, 8))
    for st in traj.states:
        assert st.U.values[0] == 0.0 and st.U.values[-1] == 0.0
