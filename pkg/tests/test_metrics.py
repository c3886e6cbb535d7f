import itertools
import math

import numpy as np
import pytest

from core.errors import DataError, DimensionError, SingularMatrixError
from core.metrics import comon_index, cosine_similarity, match_columns, metric_bundle
from core.models import MixingMatrix, Spectrum

A_TRUE = np.array([[0.6, 0.8], [0.8, 0.6]])
A_NN = np.array([[0.6, 0.8], [0.7478, 0.6427]])
A_NNP = np.array([[0.6, 0.8], [0.7890, 0.6085]])

A3 = np.array([[0.6667, 0.2727, 0.2000],
               [0.2222, 0.4545, 0.3000],
               [0.1111, 0.2727, 0.5000]])


def test_index_of_a_matrix_with_itself_is_zero():
    assert comon_index(A3, A3) == pytest.approx(0.0, abs=1e-12)


def test_index_ignores_column_order_and_scale():
    rng = np.random.default_rng(17)
    A = rng.random((4, 4)) + 0.1
    for perm in itertools.permutations(range(4)):
        scaled = A[:, list(perm)] * rng.uniform(0.5, 3.0, size=4)
        assert comon_index(A, scaled) <= 1e-10


def test_published_two_by_two_estimates():
    nn = comon_index(A_TRUE, A_NN)
    nnp = comon_index(A_TRUE, A_NNP)
    assert nn == pytest.approx(0.8012, abs=0.05)
    assert nnp == pytest.approx(0.1818, abs=0.05)
    assert nnp < nn


def test_index_rejects_bad_inputs():
    with pytest.raises(DimensionError):
        comon_index(np.ones((2, 3)), np.ones((2, 3)))
    with pytest.raises(DimensionError):
        comon_index(np.eye(2), np.eye(3))
    with pytest.raises(SingularMatrixError):
        comon_index(np.ones((2, 2)), np.eye(2))
    with pytest.raises(DataError):
        comon_index(np.array([[1.0, 0.0], [0.0, 0.0]]), np.eye(2))


def test_cosine_similarity():
    assert cosine_similarity([1.0, 2.0, 3.0], [2.0, 4.0, 6.0]) == pytest.approx(1.0)
    assert cosine_similarity([1.0, 0.0], [0.0, 1.0]) == pytest.approx(0.0)
    s = Spectrum([0.0, 1.0, 0.0])
    assert cosine_similarity(s, s) == pytest.approx(1.0)
    with pytest.raises(DataError):
        cosine_similarity([0.0, 0.0], [1.0, 1.0])
    with pytest.raises(DimensionError):
        cosine_similarity([1.0, 0.0], [1.0, 0.0, 0.0])


def test_match_columns_inverts_a_shuffle():
    order = [2, 0, 1]
    perm = match_columns(A3, A3[:, order])
    np.testing.assert_array_equal(perm, np.argsort(order))


def test_match_columns_beyond_the_exhaustive_limit():
    A = np.eye(9) + 0.05
    order = np.random.default_rng(4).permutation(9)
    perm = match_columns(A, A[:, order])
    np.testing.assert_array_equal(perm, np.argsort(order))


def test_bundle_for_an_exact_estimate():
    truth = MixingMatrix(A3)
    estimate = MixingMatrix(A3[:, [1, 2, 0]]).normalized()
    bundle = metric_bundle(truth, estimate)
    assert bundle.comon_index == pytest.approx(0.0, abs=1e-10)
    np.testing.assert_allclose(bundle.per_source_cosine, 1.0)
    np.testing.assert_array_equal(bundle.column_assignment, [2, 0, 1])


def test_bundle_uses_sources_when_given():
    truth = MixingMatrix(A_TRUE)
    sources = [Spectrum([1.0, 0.0, 0.2]), Spectrum([0.0, 1.0, 0.3])]
    estimated = [Spectrum([0.0, 2.0, 0.6]), Spectrum([1.0, 0.1, 0.2])]
    bundle = metric_bundle(truth, MixingMatrix(A_TRUE[:, ::-1]), sources, estimated)
    np.testing.assert_array_equal(bundle.column_assignment, [1, 0])
    assert bundle.per_source_cosine[1] == pytest.approx(1.0)
    assert bundle.per_source_cosine[0] < 1.0


def test_bundle_for_a_non_square_mixing():
    truth = MixingMatrix([[0.6, 0.2], [0.3, 0.5], [0.1, 0.3]])
    bundle = metric_bundle(truth, truth)
    assert math.isnan(bundle.comon_index)
    assert bundle.to_dict()["comon_index"] is None
