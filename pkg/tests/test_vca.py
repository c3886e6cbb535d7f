import numpy as np
import pytest

from core.errors import DataError, DomainError, EmptyDataError, SelectionError
from core.models import DataMatrix, NormalizedColumns, UnmixOptions
from core.vca import estimate_mixing, normalize_columns, score_columns, select_vertices


def normalized(columns):
    columns = np.asarray(columns, dtype=float)
    return NormalizedColumns(columns=columns, kept_indices=np.arange(columns.shape[1]))


def test_normalize_columns_drops_zero_columns():
    X = DataMatrix([[1.0, 0.0, 2.0, 3.0], [1.0, 0.0, 2.0, 1.0]])
    result = normalize_columns(X)
    np.testing.assert_array_equal(result.kept_indices, [0, 2, 3])
    np.testing.assert_allclose(result.columns.sum(axis=0), 1.0)
    np.testing.assert_allclose(result.columns[:, 2], [0.75, 0.25])


def test_normalize_columns_relative_threshold():
    X = DataMatrix([[1.0, 1e-3, 2.0], [1.0, 0.0, 2.0]])
    assert normalize_columns(X, drop_tol=1e-2).kept_indices.tolist() == [0, 2]
    assert normalize_columns(X, drop_tol=1e-6).kept_indices.tolist() == [0, 1, 2]


def test_normalize_columns_all_zero():
    with pytest.raises(EmptyDataError):
        normalize_columns(DataMatrix(np.zeros((2, 4))))


def test_interior_column_scores_zero():
    scores = score_columns(normalized([[1.0, 0.0, 0.5], [0.0, 1.0, 0.5]]))
    np.testing.assert_allclose(scores.scores, [0.25, 0.25, 0.0], atol=1e-12)
    np.testing.assert_array_equal(scores.kept_indices, [0, 1, 2])


def test_collinear_copies_do_not_explain_each_other():
    columns = normalized([[1.0, 1.0, 0.0, 0.5], [0.0, 0.0, 1.0, 0.5]])
    plain = score_columns(columns)
    assert plain.scores[0] == pytest.approx(0.0, abs=1e-12)
    assert plain.scores[1] == pytest.approx(0.0, abs=1e-12)

    guarded = score_columns(columns, collinear_tol=1e-9)
    np.testing.assert_allclose(guarded.scores, [0.25, 0.25, 0.25, 0.0], atol=1e-12)


def test_scores_keep_input_order_with_workers():
    rng = np.random.default_rng(3)
    columns = rng.random((3, 12))
    columns /= columns.sum(axis=0)
    sequential = score_columns(normalized(columns), n_jobs=1)
    threaded = score_columns(normalized(columns), n_jobs=2)
    np.testing.assert_array_equal(sequential.scores, threaded.scores)


def test_select_vertices_skips_near_duplicates():
    columns = normalized([[1.0, 1.0, 0.0, 0.5], [0.0, 0.0, 1.0, 0.5]])
    scores = score_columns(columns, collinear_tol=1e-9)
    mixing = select_vertices(columns, scores, 2)
    chosen = set(mixing.column_indices.tolist())
    assert 2 in chosen
    assert len(chosen & {0, 1}) == 1
    order = np.argsort(mixing.column_indices)
    np.testing.assert_allclose(mixing.values[:, order][:, 1], [0.0, 1.0])


def test_select_vertices_needs_more_columns_than_sources():
    columns = normalized([[1.0, 0.0], [0.0, 1.0]])
    scores = score_columns(columns)
    with pytest.raises(SelectionError) as caught:
        select_vertices(columns, scores, 2)
    assert caught.value.found == 2
    with pytest.raises(DomainError):
        select_vertices(columns, scores, 1)


def test_select_vertices_reports_too_few_separated_columns():
    columns = normalized([[1.0, 0.999, 0.998], [0.0, 0.001, 0.002]])
    scores = score_columns(columns, collinear_tol=1e-9)
    with pytest.raises(SelectionError) as caught:
        select_vertices(columns, scores, 2, min_angle_deg=5.0)
    assert caught.value.found == 1


def test_estimate_mixing_finds_the_pure_columns(toy_mixtures, toy_mixing):
    mixing, scores = estimate_mixing(toy_mixtures, 2)
    assert sorted(mixing.column_indices.tolist()) == [0, 1]
    order = np.argsort(mixing.column_indices)
    expected = toy_mixing.values / toy_mixing.values.sum(axis=0)
    np.testing.assert_allclose(mixing.values[:, order], expected, atol=1e-12)
    assert len(scores) == toy_mixtures.p
    np.testing.assert_allclose(mixing.values.sum(axis=0), 1.0)


def test_estimate_mixing_rejects_negative_data_without_clamping(toy_mixtures):
    X = toy_mixtures.with_values(toy_mixtures.values - 0.3)
    with pytest.raises(DataError):
        estimate_mixing(X, 2, UnmixOptions(clamp_negative=False))


def test_estimate_mixing_rejects_one_source(toy_mixtures):
    with pytest.raises(DomainError):
        estimate_mixing(toy_mixtures, 1)


def test_estimate_mixing_ignores_column_scaling(toy_mixtures):
    scale = np.array([0.5, 3.0, 1.7, 0.2, 9.0])
    reference, _ = estimate_mixing(toy_mixtures, 2)
    scaled, _ = estimate_mixing(toy_mixtures.with_values(toy_mixtures.values * scale), 2)
    np.testing.assert_array_equal(scaled.column_indices, reference.column_indices)
    np.testing.assert_allclose(scaled.values, reference.values, atol=1e-12)


def test_estimate_mixing_follows_column_permutations(toy_mixtures):
    order = np.array([3, 1, 4, 0, 2])
    reference, _ = estimate_mixing(toy_mixtures, 2)
    shuffled, _ = estimate_mixing(toy_mixtures.with_values(toy_mixtures.values[:, order]), 2)
    assert sorted(order[shuffled.column_indices].tolist()) == sorted(reference.column_indices.tolist())

    by_source = np.argsort(order[shuffled.column_indices])
    np.testing.assert_allclose(shuffled.values[:, by_source],
                               reference.values[:, np.argsort(reference.column_indices)], atol=1e-12)


def test_noise_floor_drops_noise_only_columns():
    axis = np.arange(400.0)
    lines = np.vstack([9.0 / ((axis - 100.0) ** 2 + 9.0), 9.0 / ((axis - 150.0) ** 2 + 9.0)])
    noise = np.abs(np.random.default_rng(6).normal(0.0, 1e-3, size=(2, 400)))
    X = DataMatrix(np.array([[0.7, 0.3], [0.2, 0.8]]) @ lines + noise)

    plain = normalize_columns(X)
    floored = normalize_columns(X, noise_floor=10.0)
    assert plain.kept_indices.size == 400
    assert 100 in floored.kept_indices and 150 in floored.kept_indices
    assert not np.isin(np.arange(300, 400), floored.kept_indices).any()
    # short rows give no noise estimate, so nothing extra is dropped
    assert normalize_columns(X.with_values(X.values[:, 95:120]), noise_floor=5.0).kept_indices.size == 25
