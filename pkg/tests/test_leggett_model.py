import math

import numpy as np
import pytest

from src.config import CRITICAL_VISIBILITY
from src.correlations import SettingsGrid, fully_random_correlation, werner_correlation
from src.errors import InvalidArgumentError, OutOfRegimeError
from src.geometry import E_X, E_Y, E_Z, UnitVector3, dot, fibonacci_grid
from src.leggett import (
    LeggettModel,
    binding_point,
    build_uniform_product_model,
    build_werner_model,
    component_correlator,
    critical_visibility,
    denominator,
    necessary_condition_slack,
    p_minus_scan,
    p_plus_minus,
    threshold_scan,
    witness_model,
)

STATIONARY_T = 2.0 - 2.0 * math.sqrt(2.0)


def test_p_plus_minus_endpoint_values() -> None:
    assert p_plus_minus(1.0, 0.5) == pytest.approx((0.5, 0.5))
    assert p_plus_minus(-1.0, 0.8) == pytest.approx((0.8, 0.2))


def test_p_plus_minus_sum_to_one() -> None:
    t = np.linspace(-1.0, 1.0, 2001)
    for V in (0.0, 0.4, 0.7, CRITICAL_VISIBILITY):
        p_plus, p_minus = p_plus_minus(t, V)
        assert p_plus + p_minus == pytest.approx(np.ones_like(t), abs=1e-12)
        assert p_plus.min() >= -1e-12
        assert p_minus.min() >= -1e-12


def test_p_plus_minus_rejects_out_of_regime_visibility() -> None:
    with pytest.raises(OutOfRegimeError) as info:
        p_plus_minus(0.3, 0.9)
    assert info.value.visibility == 0.9
    assert info.value.bound == pytest.approx(CRITICAL_VISIBILITY)


def test_p_plus_minus_rejects_invalid_overlap() -> None:
    with pytest.raises(InvalidArgumentError):
        p_plus_minus(1.5, 0.5)
    with pytest.raises(InvalidArgumentError):
        p_plus_minus(float("nan"), 0.5)
    with pytest.raises(InvalidArgumentError):
        p_plus_minus(0.2, -0.1)


def test_denominator_is_bounded_below() -> None:
    t = np.linspace(-1.0, 1.0, 10_001)
    assert denominator(t).min() == pytest.approx(2.0 - math.sqrt(2.0), abs=1e-9)
    assert denominator(1.0) == pytest.approx(1.0)


def test_component_correlator_at_parallel_settings() -> None:
    assert component_correlator(E_Z, E_Z, E_Z, 0.5) == pytest.approx(-1.0)


def test_component_correlator_stays_within_positivity_interval(rng) -> None:
    for _ in range(50):
        u, a, b = (UnitVector3.from_array(x) for x in rng.standard_normal((3, 3)))
        c = component_correlator(u, a, b, 0.7)
        ma, mb = dot(u, a), -dot(u, b)
        assert -1.0 + abs(ma + mb) - 1e-12 <= c <= 1.0 - abs(ma - mb) + 1e-12


def test_necessary_condition_holds_below_threshold() -> None:
    t = np.linspace(-1.0, 1.0, 100_001)
    lower, upper = necessary_condition_slack(t, CRITICAL_VISIBILITY - 1e-6)
    assert lower.min() >= 0.0
    assert upper.min() >= 0.0


def test_necessary_condition_slacks_mirror_under_sign_flip() -> None:
    t = np.linspace(-1.0, 1.0, 501)
    lower, upper = necessary_condition_slack(t, 0.8)
    assert lower == pytest.approx(upper[::-1], abs=1e-12)


def test_binding_point_at_threshold() -> None:
    t, slack = binding_point(CRITICAL_VISIBILITY)
    assert abs(t) == pytest.approx(-STATIONARY_T, abs=1e-3)
    assert slack == pytest.approx(0.0, abs=1e-9)


def test_critical_visibility_at_coarse_resolution() -> None:
    assert critical_visibility(1000) == pytest.approx(CRITICAL_VISIBILITY, abs=1e-4)


@pytest.mark.slow
def test_critical_visibility_at_fine_resolution() -> None:
    assert critical_visibility(1_000_000) == pytest.approx(CRITICAL_VISIBILITY, abs=1e-6)


def test_threshold_scan_report() -> None:
    scan = threshold_scan(2000)
    data = scan.to_dict()
    assert data["closed_form"] == CRITICAL_VISIBILITY
    assert abs(data["deviation"]) < 1e-4
    assert scan.binding_t_stationary == pytest.approx(STATIONARY_T, abs=1e-4)


def test_threshold_scan_rejects_low_resolution() -> None:
    with pytest.raises(InvalidArgumentError):
        threshold_scan(999)


def test_p_minus_goes_negative_just_above_threshold() -> None:
    t, p_minus = p_minus_scan(CRITICAL_VISIBILITY + 1e-3, 1_000_000)
    assert p_minus < 0.0
    assert t == pytest.approx(STATIONARY_T, abs=1e-2)


def test_p_minus_stays_non_negative_just_below_threshold() -> None:
    _, p_minus = p_minus_scan(CRITICAL_VISIBILITY - 1e-6, 1_000_000)
    assert p_minus >= 0.0


def test_werner_model_rejects_visibility_above_threshold() -> None:
    with pytest.raises(OutOfRegimeError):
        build_werner_model(0.9, fibonacci_grid(1000))


@pytest.mark.parametrize("V", [0.0, 0.3, 0.6, 0.85])
def test_werner_model_reproduces_werner_at_n_1e3(V, generic_grid) -> None:
    scheme = fibonacci_grid(1000)
    model = build_werner_model(V, scheme)
    reproduced = model.correlation(generic_grid)
    assert reproduced.max_deviation(werner_correlation(V, generic_grid)) <= scheme.accuracy
    assert model.component_violations(generic_grid) == 0


@pytest.mark.slow
@pytest.mark.parametrize("V", [0.0, 0.3, 0.6, 0.85])
def test_werner_model_reproduces_werner_at_n_1e5(V, presets) -> None:
    grid = presets.get("spread").grid
    scheme = fibonacci_grid(100_000)
    model = build_werner_model(V, scheme)
    reproduced = model.correlation(grid)
    assert reproduced.max_deviation(werner_correlation(V, grid)) <= scheme.accuracy
    assert model.component_violations(grid) == 0


def test_werner_model_at_threshold_keeps_components_valid(presets) -> None:
    model = build_werner_model(CRITICAL_VISIBILITY, fibonacci_grid(2000))
    assert model.component_violations(presets.get("spread").grid) == 0


def test_werner_model_components_have_antipodal_hidden_vectors() -> None:
    model = build_werner_model(0.5, fibonacci_grid(100))
    assert model.v == pytest.approx(-model.u)
    component = model.component(3)
    assert component.marginal_a(E_X) == pytest.approx(model.u[3, 0])
    dist = component.distribution(E_X, E_Y)
    assert math.fsum(dist.probabilities.values()) == pytest.approx(1.0)
    assert model.to_witness_dict()["kind"] == "werner-antipodal"


def test_uniform_product_model_reproduces_fully_random(generic_grid) -> None:
    model = build_uniform_product_model(fibonacci_grid(200))
    reproduced = model.correlation(generic_grid)
    assert reproduced.max_deviation(fully_random_correlation(generic_grid)) < 2e-2
    assert model.component_violations(generic_grid) == 0


def test_model_weights_are_validated() -> None:
    u = np.array([[0.0, 0.0, 1.0], [1.0, 0.0, 0.0]])

    def correlator(index, a, b):
        return np.zeros(len(index))

    with pytest.raises(InvalidArgumentError):
        LeggettModel(u=u, v=-u, weights=[0.6, 0.6], correlator=correlator)
    with pytest.raises(InvalidArgumentError):
        LeggettModel(u=u, v=-u, weights=[1.5, -0.5], correlator=correlator)
    with pytest.raises(InvalidArgumentError):
        LeggettModel(u=u, v=-u[:1], weights=[0.5, 0.5], correlator=correlator)


def test_witness_model_looks_up_grid_settings() -> None:
    grid = SettingsGrid((E_X, E_Z), (E_X,))
    u = np.array([[1.0, 0.0, 0.0]])
    # u = x forces C = -1 at (x, x) and C = 0 at (z, x)
    table = np.array([[[-1.0], [0.0]]])
    model = witness_model(grid, u, -u, np.array([1.0]), table)
    reproduced = model.expanded_correlation(grid)
    assert reproduced.MA == pytest.approx([1.0, 0.0])
    assert reproduced.MB == pytest.approx([-1.0])
    assert reproduced.C[:, 0] == pytest.approx([-1.0, 0.0])
    with pytest.raises(InvalidArgumentError):
        model.correlator(np.array([0]), E_Y.as_array(), E_X.as_array())
