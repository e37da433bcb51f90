import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import bisection
from troughflow.config import preset_noor_like
from troughflow.model import (
    Grid, ModelError, PlantParams, Scenario, SeparableSource, Table, compose_f,
    density_of_temperature, eval_F, friction_inverse_g, friction_law_G,
    temperature_of_density, validate_admissibility,
)

# magnitudes whose square stays a normal float
_mag = st.floats(min_value=1e-150, max_value=1e150)
finite = st.one_of(st.just(0.0), _mag, _mag.map(lambda v: -v))


@pytest.mark.parametrize("xi, expected", [(0.0, 0.0), (2.0, 4.0), (-3.0, -9.0)])
def test_friction_law_values(xi, expected):
    assert friction_law_G(xi) == expected


@pytest.mark.parametrize("xi, expected", [(0.0, 0.0), (4.0, 2.0), (-9.0, -3.0)])
def test_friction_inverse_values(xi, expected):
    assert friction_inverse_g(xi) == expected


@given(finite)
def test_closures_invert_each_other(x):
    assert friction_inverse_g(friction_law_G(x)) == pytest.approx(x, rel=1e-12, abs=0)
    assert friction_law_G(friction_inverse_g(x)) == pytest.approx(x, rel=1e-12, abs=0)


@given(finite)
def test_closures_are_odd(x):
    assert friction_law_G(-x) == -friction_law_G(x)
    assert friction_inverse_g(-x) == -friction_inverse_g(x)


def test_closures_strictly_increasing_on_grid():
    xs = np.linspace(-50, 50, 10001)
    assert np.all(np.diff(friction_law_G(xs)) > 0)
    assert np.all(np.diff(friction_inverse_g(xs)) > 0)


def test_compose_f_values():
    assert compose_f(0, 0, 0, PlantParams()) == 0
    assert compose_f(1, 1, 1, PlantParams(beta1=2, beta2=3)) == 6


def test_compose_f_preset_sample():
    cfg, _ = preset_noor_like()
    f = cfg.scenario.f(0.0, cfg.params)
    # hand value: 0.41 + 1*0.1 + 0.7*0.05**4 = 0.41 + 0.1 + 0.000004375
    assert np.allclose(f, 0.510004375, rtol=0, atol=1e-15)


def test_compose_f_rejects_negative_source():
    with pytest.raises(ModelError):
        compose_f(-0.1, 0, 0, PlantParams())


def test_eval_F_at_gamma_keeps_source():
    assert eval_F(0.8, 1.0, PlantParams()) == 0.8


def test_eval_F_vanishes_at_barrier_equality():
    assert eval_F(1.2096, 0.2, PlantParams()) == pytest.approx(0.0, abs=1e-14)


def test_eval_F_vanishes_at_quartic_root():
    y_star = bisection(lambda y: y + y**4 - 0.8, 0.0, 1.0)
    assert eval_F(0.8, 1.0 - y_star, PlantParams()) == pytest.approx(0.0, abs=1e-14)


@pytest.mark.parametrize("rho", [0.0, -0.5])
def test_eval_F_rejects_vacuum(rho):
    with pytest.raises(ModelError):
        eval_F(0.5, rho, PlantParams())


def test_temperature_examples():
    p = PlantParams()
    assert temperature_of_density(p.gamma, p) == 0
    assert temperature_of_density(0.0, p) == p.gamma
    assert temperature_of_density(0.3, p) == pytest.approx(0.7, abs=1e-15)


@given(st.floats(min_value=0.01, max_value=5.0))
def test_temperature_density_involution(rho):
    p = PlantParams(gamma=5.5, gamma_star=0.01)
    assert density_of_temperature(temperature_of_density(rho, p), p) == pytest.approx(rho, rel=1e-15)


@pytest.mark.parametrize("field, value", [
    ("alpha", 0.0), ("beta1", -1.0), ("gamma", 0.0), ("gamma_star", -0.1), ("beta2", -0.5),
])
def test_params_reject_nonpositive(field, value):
    with pytest.raises(ModelError, match=field):
        PlantParams(**{field: value})


def test_params_require_barrier_below_gamma():
    with pytest.raises(ModelError):
        PlantParams(gamma=1.0, gamma_star=1.0)


def test_grid_geometry():
    g = Grid(4)
    assert g.dx == 0.25
    assert np.array_equal(g.centers, [0.125, 0.375, 0.625, 0.875])
    assert np.array_equal(g.faces, [0, 0.25, 0.5, 0.75, 1.0])
    with pytest.raises(ModelError):
        Grid(0)


def test_table_interpolates_and_holds_ends():
    tab = Table((0.0, 1.0, 3.0), (1.0, 3.0, 2.0))
    assert tab(-1.0) == 1.0
    assert tab(0.5) == 2.0
    assert tab(2.0) == 2.5
    assert tab(10.0) == 2.0
    assert tab.limit == 2.0
    with pytest.raises(ModelError):
        Table((0.0, 0.0), (1.0, 2.0))


def _trivial_scenario(**kw):
    data = dict(grid=Grid(8), q=0.0, rho_left=1.0, rho_right=1.0, rho0=1.0)
    data.update(kw)
    return Scenario(**data)


def test_admissibility_trivial_pass():
    rep = validate_admissibility(_trivial_scenario(), PlantParams())
    assert rep.passed and rep.violations == []


def test_admissibility_lists_offending_initial_value():
    p = PlantParams()
    rho0 = Table((0.0, 0.5, 0.5001, 1.0), (1.0, 1.0, p.gamma + 0.1, p.gamma + 0.1))
    rep = validate_admissibility(_trivial_scenario(rho0=rho0), p, x_samples=[0.25, 0.75])
    assert not rep.passed and not rep.density_ok and rep.source_ok
    assert [(v.condition, v.x) for v in rep.violations] == [("rho0", 0.75)]
    assert rep.violations[0].value == pytest.approx(p.gamma + 0.1)


def test_admissibility_source_bound_and_time_samples():
    p = PlantParams()
    q = SeparableSource(Table((0.0, 1.0), (0.0, p.source_bound + 0.5)))
    rep = validate_admissibility(_trivial_scenario(q=q), p)
    assert not rep.source_ok
    assert {v.t for v in rep.violations} == {1.0}


def test_admissibility_flags_zero_radiation():
    rep = validate_admissibility(_trivial_scenario(), PlantParams(beta2=0.0))
    assert not rep.params_ok and not rep.passed


def test_admissibility_preset_passes():
    cfg, _ = preset_noor_like()
    assert validate_admissibility(cfg.scenario, cfg.params).passed


def test_admissibility_requires_samples():
    with pytest.raises(ModelError):
        validate_admissibility(_trivial_scenario(), PlantParams(), t_samples=[])


@settings(max_examples=200)
@given(frac=st.floats(0.0, 1.0), beta1=st.floats(0.1, 5.0), beta2=st.floats(0.1, 5.0),
       gamma=st.floats(0.5, 3.0), ratio=st.floats(0.05, 0.95))
def test_admissible_source_gives_barrier_signs(frac, beta1, beta2, gamma, ratio):
    p = PlantParams(beta1=beta1, beta2=beta2, gamma=gamma, gamma_star=ratio * gamma)
    f = frac * p.source_bound
    scen = _trivial_scenario(q=f, rho_left=gamma, rho_right=gamma, rho0=gamma)
    assert validate_admissibility(scen, p).passed
    scale = max(1.0, p.source_bound)
    assert eval_F(f, p.gamma_star, p) <= 1e-13 * scale / p.gamma_star**2
    assert eval_F(f, p.gamma, p) >= 0
