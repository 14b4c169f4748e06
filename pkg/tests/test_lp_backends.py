import numpy as np
import pytest

from src.config import settings
from src.correlations import werner_correlation
from src.errors import InvalidArgumentError
from src.solvers import (
    BackendType,
    DenseSimplexBackend,
    HighsBackend,
    LPBackendFactory,
    LPStatus,
    antipodal_grid,
)
from src.solvers.leggett import _elastic_system

BACKENDS = [BackendType.SIMPLEX.value, BackendType.HIGHS.value]


def _expected(backend, status: LPStatus):
    # HiGHS presolve may only tell that the model is infeasible or unbounded
    if backend.backend_type == BackendType.HIGHS:
        return {LPStatus.INFEASIBLE, LPStatus.UNBOUNDED}
    return {status}


@pytest.fixture(params=BACKENDS)
def backend(request):
    return LPBackendFactory.get_backend(request.param)


def test_small_lp(backend) -> None:
    c = np.array([1.0, 1.0])
    A = np.array([[1.0, 1.0], [1.0, -1.0]])
    b = np.array([1.0, 0.0])
    result = backend.solve(c, A, b)
    assert result.optimal
    assert result.x == pytest.approx([0.5, 0.5], abs=1e-9)
    assert result.objective == pytest.approx(1.0)
    assert result.to_dict()["backend"] == backend.backend_type.value


def test_negative_rhs(backend) -> None:
    c = np.array([2.0, 1.0, 0.0])
    A = np.array([[-1.0, -1.0, 0.0], [0.0, 1.0, 1.0]])
    b = np.array([-2.0, 1.0])
    result = backend.solve(c, A, b)
    assert result.optimal
    assert result.objective == pytest.approx(3.0)
    assert A @ result.x == pytest.approx(b, abs=1e-9)


def test_infeasible_lp(backend) -> None:
    result = backend.solve(np.ones(2), np.array([[1.0, 1.0]]), np.array([-1.0]))
    assert result.status in _expected(backend, LPStatus.INFEASIBLE)
    assert result.x is None


def test_unbounded_lp(backend) -> None:
    result = backend.solve(np.array([-1.0, 0.0]), np.array([[1.0, -1.0]]), np.array([0.0]))
    assert result.status in _expected(backend, LPStatus.UNBOUNDED)


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_duals_are_dual_feasible_and_tight(backend, seed) -> None:
    rng = np.random.default_rng(seed)
    A = rng.uniform(-1.0, 1.0, size=(4, 9))
    b = A @ rng.uniform(0.1, 1.0, size=9)
    c = rng.uniform(0.5, 2.0, size=9)
    result = backend.solve(c, A, b)
    assert result.optimal
    assert np.min(c - A.T @ result.duals) >= -1e-8
    assert b @ result.duals == pytest.approx(result.objective, abs=1e-8)


def test_backends_agree(rng) -> None:
    A = rng.uniform(-1.0, 1.0, size=(5, 12))
    b = A @ rng.uniform(0.0, 1.0, size=12)
    c = rng.uniform(0.1, 1.0, size=12)
    simplex = DenseSimplexBackend(10_000, 1e-10).solve(c, A, b)
    highs = HighsBackend(10_000, 1e-10).solve(c, A, b)
    assert simplex.objective == pytest.approx(highs.objective, abs=1e-8)


def test_simplex_matches_highs_on_degenerate_elastic_system(presets) -> None:
    corr = werner_correlation(0.99, presets.get("spread").grid).restrict(range(6), range(6))
    c, A, b, *_ = _elastic_system(corr, antipodal_grid(80))
    simplex = DenseSimplexBackend(50_000, 1e-10).solve(c, A, b)
    highs = HighsBackend(50_000, 1e-10).solve(c, A, b)
    assert simplex.optimal
    assert simplex.objective == pytest.approx(highs.objective, abs=1e-7)
    assert np.min(c - A.T @ simplex.duals) >= -1e-6


def test_simplex_refactorization_keeps_the_solution(monkeypatch, rng) -> None:
    A = rng.uniform(-1.0, 1.0, size=(6, 15))
    b = A @ rng.uniform(0.0, 1.0, size=15)
    c = rng.uniform(0.1, 1.0, size=15)
    reference = DenseSimplexBackend(10_000, 1e-10).solve(c, A, b)
    monkeypatch.setattr(DenseSimplexBackend, "refactor_every", 1)
    monkeypatch.setattr(DenseSimplexBackend, "degenerate_run", 0)
    result = DenseSimplexBackend(10_000, 1e-10).solve(c, A, b)
    assert result.optimal
    assert result.objective == pytest.approx(reference.objective, abs=1e-9)


def test_simplex_drops_redundant_rows() -> None:
    A = np.array([[1.0, 1.0], [2.0, 2.0]])
    b = np.array([1.0, 2.0])
    result = DenseSimplexBackend(100, 1e-10).solve(np.array([1.0, 2.0]), A, b)
    assert result.optimal
    assert result.x == pytest.approx([1.0, 0.0])
    assert result.metadata["redundant_rows"] == 1
    assert np.min(np.array([1.0, 2.0]) - A.T @ result.duals) >= -1e-10


def test_simplex_iteration_cap() -> None:
    A = np.array([[1.0, 1.0], [1.0, -1.0]])
    result = DenseSimplexBackend(1, 1e-10).solve(np.ones(2), A, np.array([1.0, 0.0]))
    assert result.status == LPStatus.ITERATION_LIMIT


def test_inconsistent_shapes_are_rejected(backend) -> None:
    with pytest.raises(InvalidArgumentError):
        backend.solve(np.ones(3), np.ones((2, 2)), np.ones(2))


def test_factory_defaults_to_configured_backend() -> None:
    assert isinstance(LPBackendFactory.get_backend(), DenseSimplexBackend)
    assert LPBackendFactory.get_backend() is LPBackendFactory.get_backend()
    settings.lp_backend = "highs"
    assert isinstance(LPBackendFactory.get_backend(), HighsBackend)


def test_factory_follows_settings_changes(monkeypatch) -> None:
    first = LPBackendFactory.get_backend("simplex")
    monkeypatch.setattr(settings, "lp_max_iterations", 7)
    second = LPBackendFactory.get_backend("simplex")
    assert second is not first
    assert second.max_iterations == 7


def test_factory_rejects_unknown_backend() -> None:
    with pytest.raises(InvalidArgumentError):
        LPBackendFactory.get_backend("glpk")
