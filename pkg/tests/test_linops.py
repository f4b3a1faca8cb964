import numpy as np
import pytest

from memtools.errors import DomainError, Unsupported
from memtools.linops import (Conv1D, Conv2D, DenseOperator, FunctionOperator, StackedOperator, as_operator,
                             convolution_1d, finite_difference_2d, gaussian_blur, gaussian_kernel, identity,
                             norm_1_columns, op_norm_2, read_matrix, read_vector, write_matrix, write_vector)


def test_norm_examples():
    assert op_norm_2(identity(5)) == pytest.approx(1.0, abs=1e-12)
    assert op_norm_2(np.diag([3.0, 4.0])) == pytest.approx(4.0, abs=1e-9)
    G = np.array([[1.0, 2.0], [3.0, 4.0]])
    G = G.T @ G
    tr, det = np.trace(G), np.linalg.det(G)
    assert op_norm_2([[1.0, 2.0], [3.0, 4.0]]) == pytest.approx(np.sqrt((tr + np.sqrt(tr**2 - 4 * det)) / 2), rel=1e-9)


def test_column_norm_examples():
    assert norm_1_columns([[1.0, -2.0], [3.0, 4.0]]) == 6.0
    assert norm_1_columns(identity(3)) == 1.0
    conv = convolution_1d([0.25, 0.5, 0.25], 9, "zero_pad")
    explicit = sum(w for j, w in zip((3, 4, 5), (0.25, 0.5, 0.25)))
    assert conv.column_abs_sums()[4] == explicit == 1.0


def test_blur_examples():
    np.testing.assert_array_equal(gaussian_kernel(0.0), [1.0])
    B = gaussian_blur(1, 7, 0.0)
    np.testing.assert_array_equal(B.apply(np.arange(7.0)), np.arange(7.0))
    B = gaussian_blur(1, 20, 1.3, "reflect")
    np.testing.assert_allclose(B.apply(np.full(20, 2.5)), 2.5, rtol=1e-14)
    B2 = gaussian_blur(2, (6, 5), 0.8, "reflect")
    np.testing.assert_allclose(B2.apply(np.full(30, -1.0)), -1.0, rtol=1e-14)
    k = gaussian_kernel(1.0, 2)
    B = gaussian_blur(1, 11, 1.0, "zero_pad", half_width=2)
    delta = np.zeros(11)
    delta[5] = 1.0
    np.testing.assert_allclose(B.apply(delta)[3:8], k[::-1], rtol=1e-15)
    assert k.sum() == pytest.approx(1.0)


def test_finite_difference_examples():
    L = finite_difference_2d(4, 5)
    np.testing.assert_array_equal(L.apply(np.full(20, 3.0)), 0.0)
    L12 = finite_difference_2d(1, 2)
    out = L12.apply(np.array([0.0, 1.0])).reshape(2, 2)
    assert out[0, 1] == 1.0 and out[0, 0] == 0.0 and np.all(out[1] == 0.0)
    for h, w in ((3, 3), (8, 8), (5, 12)):
        Lhw = finite_difference_2d(h, w)
        D = Lhw.to_dense()
        lam = np.linalg.eigvalsh(D.T @ D)[-1]
        assert op_norm_2(Lhw) ** 2 == pytest.approx(lam, rel=1e-8)
        assert lam <= 8.0


OPERATORS = [
    lambda: DenseOperator(np.random.default_rng(0).standard_normal((4, 6))),
    lambda: identity(5),
    lambda: Conv1D([0.1, 0.3, 0.6], 9, "reflect"),
    lambda: Conv1D([0.1, 0.3, 0.6], 9, "zero_pad"),
    lambda: Conv2D(gaussian_kernel(1.0, 2), 5, 7, "reflect"),
    lambda: Conv2D(gaussian_kernel(1.0, 2), 5, 7, "zero_pad"),
    lambda: finite_difference_2d(4, 6),
    lambda: StackedOperator([identity(6), DenseOperator(np.ones((2, 6)))]),
]


@pytest.mark.parametrize("make", OPERATORS)
def test_adjoint_identity_and_dense_form(make, rng):
    A = make()
    m, d = A.shape
    for _ in range(5):
        x, y = rng.standard_normal(d), rng.standard_normal(m)
        assert A.apply(x) @ y == pytest.approx(x @ A.adjoint(y), rel=1e-12, abs=1e-12)
    D = A.to_dense()
    x = rng.standard_normal(d)
    np.testing.assert_allclose(D @ x, A @ x, atol=1e-13)
    np.testing.assert_allclose(A.T.to_dense(), D.T, atol=1e-13)
    np.testing.assert_allclose(A.column_abs_sums(), np.abs(D).sum(axis=0), atol=1e-13)
    assert op_norm_2(A) == pytest.approx(np.linalg.norm(D, 2), rel=1e-8)


def test_shape_checks():
    A = as_operator(np.ones((2, 3)))
    with pytest.raises(DomainError):
        A.apply(np.ones(2))
    with pytest.raises(DomainError):
        A.adjoint(np.ones(3))
    with pytest.raises(DomainError):
        Conv1D([1.0, 1.0], 4)
    with pytest.raises(DomainError):
        gaussian_blur(1, 4, 1.0, "periodic")
    with pytest.raises(DomainError):
        StackedOperator([identity(2), identity(3)])


def test_matrix_free_operator_has_no_column_access():
    F = FunctionOperator(lambda x: 2 * x, lambda y: 2 * y, (3, 3))
    np.testing.assert_array_equal(F @ np.ones(3), 2.0)
    assert op_norm_2(F) == pytest.approx(2.0)
    with pytest.raises(Unsupported):
        norm_1_columns(F)


def test_nonnegativity_flag():
    assert Conv1D([0.2, 0.6, 0.2], 5).nonnegative
    assert not DenseOperator([[1.0, -1.0]]).nonnegative


def test_text_round_trip(tmp_path):
    v = np.array([1 / 3, -2e-300, 7.0])
    write_vector(tmp_path / "v.txt", v)
    np.testing.assert_array_equal(read_vector(tmp_path / "v.txt"), v)
    m = np.array([[0.1, 0.2], [1e10, -3.0]])
    write_matrix(tmp_path / "m.txt", m)
    np.testing.assert_array_equal(read_matrix(tmp_path / "m.txt"), m)
