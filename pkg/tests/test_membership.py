import itertools
import math

import numpy as np
import pytest

from src.config import settings
from src.correlations import (
    BinaryCorrelation,
    SettingsGrid,
    deterministic_correlation,
    fully_random_correlation,
    pr_box_correlation,
    werner_correlation,
)
from src.errors import InvalidArgumentError, PositivityViolationError
from src.geometry import E_X, E_Y, E_Z
from src.solvers import (
    FeasibilityStatus,
    GridMode,
    antipodal_grid,
    bell_local_bound,
    bell_local_membership,
    build_grid,
    classify,
    enumerate_strategies,
    extremal_marginal_shortcut,
    leggett_feasibility,
    leggett_functional_bound,
    product_grid,
)

CHSH_GAP = 2.0 * math.sqrt(2.0) - 2.0


def _preset_grid(preset, n=None):
    return antipodal_grid(n, tuple(zip(preset.hidden_u, preset.hidden_v)))


def _assert_sound(verdict, corr) -> None:
    witness = verdict.witness
    assert witness.expanded_correlation(corr.grid).max_deviation(corr) <= settings.tolerances.soundness
    assert witness.component_violations(corr.grid) == 0


# Extremal-marginal shortcut

def test_shortcut_two_distinct_extremal_settings(presets) -> None:
    corr = deterministic_correlation(presets.get("deterministic").grid)
    verdict = extremal_marginal_shortcut(corr)
    assert verdict.status == FeasibilityStatus.INFEASIBLE_EXACT
    assert verdict.certificate.value == pytest.approx(2.0)
    assert verdict.certificate.bound == pytest.approx(math.sqrt(2.0))
    assert verdict.margin == pytest.approx(2.0 - math.sqrt(2.0))
    assert verdict.certificate.details == {"party": "alice", "settings": [0, 1]}


def test_shortcut_needs_two_extremal_marginals() -> None:
    grid = SettingsGrid((E_X, E_Y), (E_X,))
    corr = BinaryCorrelation(grid, [1.0, 0.5], [0.0], [[0.0], [0.0]])
    assert extremal_marginal_shortcut(corr) is None


def test_shortcut_ignores_a_single_setting() -> None:
    grid = SettingsGrid((E_X,), (E_Y,))
    corr = BinaryCorrelation(grid, [1.0], [1.0], [[1.0]])
    assert extremal_marginal_shortcut(corr) is None


def test_shortcut_ignores_repeated_setting() -> None:
    grid = SettingsGrid((E_X, E_X), (E_Y,))
    corr = BinaryCorrelation(grid, [1.0, 1.0], [0.0], [[0.0], [0.0]])
    assert extremal_marginal_shortcut(corr) is None


def test_shortcut_accepts_antipodal_settings_with_opposite_marginals() -> None:
    # u = x explains both +1 on x and -1 on -x
    grid = SettingsGrid((E_X, -E_X), (E_Y,))
    corr = BinaryCorrelation(grid, [1.0, -1.0], [0.0], [[0.0], [0.0]])
    assert extremal_marginal_shortcut(corr) is None


def test_shortcut_on_bob_side() -> None:
    grid = SettingsGrid((E_Y,), (E_X, E_Z))
    corr = BinaryCorrelation(grid, [0.0], [1.0, -1.0], [[0.0, 0.0]])
    verdict = extremal_marginal_shortcut(corr)
    assert verdict.status == FeasibilityStatus.INFEASIBLE_EXACT
    assert verdict.certificate.details["party"] == "bob"
    assert verdict.certificate.beta.tolist() == [1.0, -1.0]


# Leggett LP

def test_fully_random_is_leggett_feasible_on_product_grid(generic_grid) -> None:
    corr = fully_random_correlation(generic_grid)
    verdict = leggett_feasibility(corr, product_grid(8))
    assert verdict.status == FeasibilityStatus.FEASIBLE
    _assert_sound(verdict, corr)


def test_werner_below_threshold_is_leggett_feasible(generic_grid) -> None:
    corr = werner_correlation(0.5, generic_grid)
    verdict = leggett_feasibility(corr, antipodal_grid(100))
    assert verdict.status == FeasibilityStatus.FEASIBLE
    assert verdict.max_residual <= settings.tolerances.witness
    _assert_sound(verdict, corr)
    assert verdict.to_dict()["witness"]["kind"] == "lp-witness"


def test_singlet_on_one_plane_is_leggett_feasible(presets) -> None:
    preset = presets.get("equatorial")
    corr = werner_correlation(1.0, preset.grid)
    verdict = leggett_feasibility(corr, _preset_grid(preset, 50))
    assert verdict.status == FeasibilityStatus.FEASIBLE
    _assert_sound(verdict, corr)


def test_pr_box_is_leggett_feasible(presets) -> None:
    preset = presets.get("pr_box")
    corr = pr_box_correlation(*preset.alice, *preset.bob)
    verdict = leggett_feasibility(corr, _preset_grid(preset, 50))
    assert verdict.status == FeasibilityStatus.FEASIBLE
    _assert_sound(verdict, corr)


def test_feasibility_is_monotone_in_the_grid(generic_grid) -> None:
    corr = werner_correlation(0.5, generic_grid)
    grid = antipodal_grid(100)
    larger = grid.with_extras([(E_Z, -E_Z), (E_X, E_Y)])
    assert len(larger) == len(grid) + 2
    assert leggett_feasibility(corr, grid).feasible
    assert leggett_feasibility(corr, larger).feasible


def test_forced_hidden_vector_gives_verified_certificate() -> None:
    # MA = 1 on x forces u = x, which leaves 0 on y instead of 0.9
    grid = SettingsGrid((E_X, E_Y), (E_X,))
    corr = BinaryCorrelation(grid, [1.0, 0.9], [0.0], [[0.0], [0.0]])
    assert extremal_marginal_shortcut(corr) is None
    hidden = antipodal_grid(60)
    verdict = leggett_feasibility(corr, hidden)
    assert verdict.status == FeasibilityStatus.INFEASIBLE_ON_GRID
    certificate = verdict.certificate
    assert verdict.margin > 0.0
    assert certificate.evaluate(corr.MA, corr.MB, corr.C) == pytest.approx(certificate.value)
    assert certificate.bound >= leggett_functional_bound(certificate, corr.grid, hidden) - 1e-12
    assert "verified_on" in certificate.details


def test_leggett_feasibility_rejects_invalid_correlation(generic_grid) -> None:
    corr = BinaryCorrelation(generic_grid, [0.5, 0.0], [0.5, 0.0], [[-0.5, 0.0], [0.0, 0.0]])
    with pytest.raises(PositivityViolationError) as info:
        leggett_feasibility(corr, antipodal_grid(20))
    assert info.value.outcome == (-1, -1)


def test_leggett_grid_cap(monkeypatch, generic_grid) -> None:
    monkeypatch.setattr(settings, "lp_grid_cap", 10)
    with pytest.raises(InvalidArgumentError):
        leggett_feasibility(fully_random_correlation(generic_grid), antipodal_grid(20))


def test_build_grid_modes() -> None:
    assert len(build_grid(GridMode.PRODUCT, 5)) == 25
    antipodal = build_grid("antipodal", 30, ((E_Z, E_Z),))
    assert len(antipodal) == 31
    assert antipodal.v[:30] == pytest.approx(-antipodal.u[:30])
    assert len(antipodal.refine(10)) == 301
    assert antipodal.describe() == {"mode": "antipodal", "n": 30, "pairs": 31, "extras": 1}


@pytest.mark.slow
def test_high_visibility_werner_on_spread_settings_is_not_leggett(presets) -> None:
    preset = presets.get("spread")
    corr = werner_correlation(0.99, preset.grid)
    verdict = leggett_feasibility(corr, antipodal_grid())
    assert verdict.status == FeasibilityStatus.INFEASIBLE_ON_GRID
    assert verdict.margin > 0.0


# Bell local polytope

def test_enumerate_strategies() -> None:
    strategies = enumerate_strategies(3)
    assert strategies.shape == (8, 3)
    assert len({tuple(s) for s in strategies.tolist()}) == 8


def test_bell_local_bound_of_chsh() -> None:
    bound, maximizer = bell_local_bound(np.zeros(2), np.zeros(2), np.array([[1.0, 1.0], [1.0, -1.0]]))
    assert bound == pytest.approx(2.0)
    A, B = np.array(maximizer["alice"]), np.array(maximizer["bob"])
    assert A @ np.array([[1.0, 1.0], [1.0, -1.0]]) @ B == pytest.approx(2.0)


def test_bell_local_bound_matches_brute_force(rng) -> None:
    alpha, beta, gamma = rng.normal(size=3), rng.normal(size=2), rng.normal(size=(3, 2))
    best = max(
        alpha @ np.array(a) + beta @ np.array(b) + np.array(a) @ gamma @ np.array(b)
        for a in itertools.product((1, -1), repeat=3)
        for b in itertools.product((1, -1), repeat=2)
    )
    bound, _ = bell_local_bound(alpha, beta, gamma)
    assert bound == pytest.approx(best)


def test_pr_box_is_bell_nonlocal(presets) -> None:
    preset = presets.get("pr_box")
    verdict = bell_local_membership(pr_box_correlation(*preset.alice, *preset.bob))
    assert verdict.status == FeasibilityStatus.INFEASIBLE
    assert verdict.margin >= 2.0 - 1e-6


def test_singlet_is_bell_nonlocal(presets) -> None:
    verdict = bell_local_membership(werner_correlation(1.0, presets.get("equatorial").grid))
    assert verdict.status == FeasibilityStatus.INFEASIBLE
    assert verdict.margin >= 0.8 * CHSH_GAP


def test_deterministic_is_bell_local(presets) -> None:
    corr = deterministic_correlation(presets.get("deterministic").grid)
    verdict = bell_local_membership(corr)
    assert verdict.status == FeasibilityStatus.FEASIBLE
    ma, mb, c = verdict.witness.reproduce()
    assert ma == pytest.approx(corr.MA)
    assert c == pytest.approx(corr.C)
    assert verdict.to_dict()["witness"]["kind"] == "local-mixture"


def test_pr_box_certificate_has_local_bound_two_and_value_four(presets) -> None:
    preset = presets.get("pr_box")
    verdict = bell_local_membership(pr_box_correlation(*preset.alice, *preset.bob))
    certificate = verdict.certificate
    # The optimal dual is the CHSH functional with unit correlator weights
    assert certificate.gamma == pytest.approx(np.array([[1.0, 1.0], [1.0, -1.0]]), abs=1e-6)
    assert certificate.bound == pytest.approx(2.0, abs=1e-6)
    assert certificate.value == pytest.approx(4.0, abs=1e-6)
    bound, _ = bell_local_bound(certificate.alpha, certificate.beta, certificate.gamma)
    assert certificate.bound == pytest.approx(bound)


def test_fully_random_above_dense_limit_is_bell_local(presets) -> None:
    corr = fully_random_correlation(presets.get("spread").grid).restrict(range(7), range(7))
    verdict = bell_local_membership(corr)
    assert verdict.status == FeasibilityStatus.FEASIBLE
    ma, mb, c = verdict.witness.reproduce()
    assert ma == pytest.approx(corr.MA, abs=1e-8)
    assert mb == pytest.approx(corr.MB, abs=1e-8)
    assert c == pytest.approx(corr.C, abs=1e-8)


def test_singlet_above_dense_limit_is_separated_exactly(presets) -> None:
    corr = werner_correlation(1.0, presets.get("spread").grid).restrict(range(7), range(7))
    verdict = bell_local_membership(corr)
    assert verdict.status == FeasibilityStatus.INFEASIBLE
    certificate = verdict.certificate
    assert certificate.gamma.shape == (7, 7)
    bound, _ = bell_local_bound(certificate.alpha, certificate.beta, certificate.gamma)
    assert certificate.value > bound
    assert verdict.notes["columns"] < 2 ** 14


@pytest.mark.parametrize("V, expected", [
    (0.5, FeasibilityStatus.FEASIBLE),
    (1.0, FeasibilityStatus.INFEASIBLE),
])
def test_column_generation_agrees_with_full_enumeration(monkeypatch, presets, V, expected) -> None:
    corr = werner_correlation(V, presets.get("equatorial").grid)
    assert bell_local_membership(corr).status == expected
    monkeypatch.setattr(settings, "bell_dense_limit", 2)
    verdict = bell_local_membership(corr)
    assert verdict.status == expected
    assert "columns" in verdict.notes


@pytest.mark.slow
def test_full_spread_scenario_is_separated(presets) -> None:
    verdict = bell_local_membership(werner_correlation(0.99, presets.get("spread").grid))
    assert verdict.status == FeasibilityStatus.INFEASIBLE
    certificate = verdict.certificate
    assert certificate.alpha.shape == (10,)
    bound, _ = bell_local_bound(certificate.alpha, certificate.beta, certificate.gamma)
    assert certificate.value > bound


@pytest.mark.slow
def test_low_visibility_werner_on_full_spread_is_bell_local(presets) -> None:
    corr = werner_correlation(0.5, presets.get("spread").grid)
    verdict = bell_local_membership(corr)
    assert verdict.status == FeasibilityStatus.FEASIBLE
    _, _, c = verdict.witness.reproduce()
    assert c == pytest.approx(corr.C, abs=1e-8)


def test_bell_strategy_cap(monkeypatch, generic_grid) -> None:
    monkeypatch.setattr(settings, "bell_strategy_cap", 3)
    with pytest.raises(InvalidArgumentError):
        bell_local_membership(fully_random_correlation(generic_grid))


@pytest.mark.parametrize("backend", ["simplex", "highs"])
def test_bell_backends_agree_on_singlet(backend, presets) -> None:
    settings.lp_backend = backend
    verdict = bell_local_membership(werner_correlation(1.0, presets.get("equatorial").grid))
    assert verdict.status == FeasibilityStatus.INFEASIBLE


# Joint classification

def test_classify_reference_examples(presets, generic_grid) -> None:
    cases = [
        (fully_random_correlation(generic_grid), product_grid(8),
         (FeasibilityStatus.FEASIBLE, FeasibilityStatus.FEASIBLE)),
        (werner_correlation(1.0, presets.get("equatorial").grid), _preset_grid(presets.get("equatorial"), 50),
         (FeasibilityStatus.FEASIBLE, FeasibilityStatus.INFEASIBLE)),
        (pr_box_correlation(E_X, E_Y, E_X, E_Y), _preset_grid(presets.get("pr_box"), 50),
         (FeasibilityStatus.FEASIBLE, FeasibilityStatus.INFEASIBLE)),
        (deterministic_correlation(presets.get("deterministic").grid), antipodal_grid(50),
         (FeasibilityStatus.INFEASIBLE_EXACT, FeasibilityStatus.FEASIBLE)),
    ]
    for corr, grid, expected in cases:
        leggett, bell = classify(corr, grid)
        assert (leggett.status, bell.status) == expected
