import numpy as np
import numpy.testing as npt

import pyrobustfeat.tensor as T


def _t64(data, requires_grad=True):
    return T.Tensor(data, requires_grad=requires_grad, dtype=np.float64)


def test_numerical_gradient_of_quadratic():
    data = np.array([1.0, -2.0, 0.5])

    def func():
        return float((data ** 2).sum())

    npt.assert_allclose(T.numerical_gradient(func, data), 2 * data,
                        rtol=1e-8)
    # the perturbed array is restored
    npt.assert_array_equal(data, [1.0, -2.0, 0.5])


def test_numerical_gradient_selected_indices():
    data = np.arange(4, dtype=np.float64)
    grad = T.numerical_gradient(lambda: float(data.sum()), data,
                                indices=[1, 3])
    npt.assert_allclose(grad, [0.0, 1.0, 0.0, 1.0])


def test_max_relative_error():
    assert T.max_relative_error([1.0, 2.0], [1.0, 2.0]) == 0.0
    npt.assert_allclose(T.max_relative_error([1.0], [1.1]), 0.1 / 1.1)
    # tiny values are compared against the floor
    assert T.max_relative_error([1e-9], [0.0]) < 1e-2


def test_composite_chain_gradient():
    """
    conv -> batch norm -> relu -> dense -> cross entropy on two examples,
    every parameter and the input checked against finite differences
    """
    rng = np.random.RandomState(0)
    x = _t64(rng.randn(2, 1, 4, 4))
    kernel = _t64(rng.randn(2, 1, 3, 3) * 0.5)
    bias = _t64(rng.randn(2) * 0.1)
    gamma = _t64(rng.rand(2) + 0.5)
    beta = _t64(rng.randn(2) * 0.1)
    weight = _t64(rng.randn(32, 3) * 0.3)
    dense_bias = _t64(rng.randn(3) * 0.1)
    labels = np.array([2, 0])
    state = T.BatchNormState(2, dtype=np.float64)
    tensors = [x, kernel, bias, gamma, beta, weight, dense_bias]

    def loss():
        h = T.conv2d(x, kernel, bias)
        h, _ = T.batchnorm(h, gamma, beta, state, update_stats=False)
        h = T.relu(h)
        return T.softmax_cross_entropy(
            T.dense(T.flatten(h), weight, dense_bias), labels)

    analytic = T.tape_gradients(loss, tensors)
    for tensor, grad in zip(tensors, analytic):
        numeric = T.numerical_gradient(loss, tensor.data, h=1e-5)
        npt.assert_allclose(grad, numeric, rtol=1e-3, atol=1e-7)
    assert state.num_batches_tracked == 0
