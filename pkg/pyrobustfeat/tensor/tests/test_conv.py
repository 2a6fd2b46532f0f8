import numpy as np
import numpy.testing as npt
import pytest

import pyrobustfeat.tensor as T


def _direct_conv(x, k, b, pad_h, pad_w):
    """ six nested loops over n, f, i, j, c, u with an inner v loop """
    x = np.pad(x, ((0, 0), (0, 0), pad_h, pad_w))
    n, c, h, w = x.shape
    f, _, kh, kw = k.shape
    out = np.zeros((n, f, h - kh + 1, w - kw + 1))
    for in_ in range(n):
        for if_ in range(f):
            for i in range(h - kh + 1):
                for j in range(w - kw + 1):
                    acc = b[if_]
                    for ic in range(c):
                        for u in range(kh):
                            for v in range(kw):
                                acc += x[in_, ic, i + u, j + v] * \
                                    k[if_, ic, u, v]
                    out[in_, if_, i, j] = acc
    return out


def _t64(data, requires_grad=False):
    return T.Tensor(data, requires_grad=requires_grad, dtype=np.float64)


def test_conv2d_all_ones_valid():
    out = T.conv2d(T.Tensor(np.ones((1, 1, 3, 3))),
                   T.Tensor(np.ones((1, 1, 3, 3))), T.Tensor(np.zeros(1)),
                   padding="valid")
    assert out.shape == (1, 1, 1, 1)
    assert out.data[0, 0, 0, 0] == 9.0


def test_conv2d_zero_kernel():
    x = T.Tensor(np.random.randn(2, 3, 6, 6))
    out = T.conv2d(x, T.Tensor(np.zeros((4, 3, 3, 3))),
                   T.Tensor(np.zeros(4)))
    assert out.shape == (2, 4, 6, 6)
    npt.assert_array_equal(out.data, 0)


def test_conv2d_matches_direct_convolution():
    rng = np.random.RandomState(1)
    x = rng.randn(2, 3, 8, 8)
    k = rng.randn(4, 3, 3, 3)
    b = rng.randn(4)
    out = T.conv2d(_t64(x), _t64(k), _t64(b), padding="same")
    npt.assert_allclose(out.data, _direct_conv(x, k, b, (1, 1), (1, 1)),
                        atol=1e-5)
    out = T.conv2d(_t64(x), _t64(k), _t64(b), padding="valid")
    assert out.shape == (2, 4, 6, 6)
    npt.assert_allclose(out.data, _direct_conv(x, k, b, (0, 0), (0, 0)),
                        atol=1e-5)


def test_conv2d_float32_close_to_direct_convolution():
    rng = np.random.RandomState(2)
    x = rng.randn(1, 2, 5, 5).astype(np.float32)
    k = rng.randn(3, 2, 3, 3).astype(np.float32)
    b = rng.randn(3).astype(np.float32)
    out = T.conv2d(T.Tensor(x), T.Tensor(k), T.Tensor(b))
    assert out.dtype == np.float32
    npt.assert_allclose(out.data, _direct_conv(x.astype(np.float64), k, b,
                                               (1, 1), (1, 1)),
                        atol=1e-4)


def test_conv2d_random_shapes_match_direct_convolution():
    rng = np.random.RandomState(3)
    for _ in range(25):
        n = rng.randint(1, 3)
        c = rng.randint(1, 5)
        h = rng.randint(1, 10)
        w = rng.randint(1, 10)
        f = rng.randint(1, 4)
        padding = ["same", "valid"][rng.randint(2)]
        kh = rng.randint(1, 6)
        kw = rng.randint(1, 6)
        if padding == "valid":
            kh, kw = min(kh, h), min(kw, w)
        x, k, b = rng.randn(n, c, h, w), rng.randn(f, c, kh, kw), \
            rng.randn(f)
        if padding == "same":
            pads = T.conv.same_padding(kh), T.conv.same_padding(kw)
        else:
            pads = (0, 0), (0, 0)
        out = T.conv2d(_t64(x), _t64(k), _t64(b), padding=padding)
        npt.assert_allclose(out.data, _direct_conv(x, k, b, *pads),
                            atol=1e-9)


def test_same_padding_keeps_size_for_even_kernels():
    assert T.conv.same_padding(5) == (2, 2)
    assert T.conv.same_padding(4) == (1, 2)
    out = T.conv2d(T.Tensor(np.ones((1, 1, 6, 6))),
                   T.Tensor(np.ones((2, 1, 2, 2))), T.Tensor(np.zeros(2)))
    assert out.shape == (1, 2, 6, 6)
    # extra pad goes after: bottom-right corner sees a single pixel
    assert out.data[0, 0, 0, 0] == 4.0
    assert out.data[0, 0, 5, 5] == 1.0


def test_conv2d_shape_errors_name_both_shapes():
    x = T.Tensor(np.zeros((1, 3, 5, 5)))
    with pytest.raises(ValueError) as err:
        T.conv2d(x, T.Tensor(np.zeros((2, 4, 3, 3))), T.Tensor(np.zeros(2)))
    assert "(1, 3, 5, 5)" in str(err.value)
    assert "(2, 4, 3, 3)" in str(err.value)
    with pytest.raises(ValueError):
        T.conv2d(x, T.Tensor(np.zeros((2, 3, 6, 6))), T.Tensor(np.zeros(2)),
                 padding="valid")
    with pytest.raises(ValueError):
        T.conv2d(x, T.Tensor(np.zeros((2, 3, 3, 3))), T.Tensor(np.zeros(3)))
    with pytest.raises(ValueError):
        T.conv2d(x, T.Tensor(np.zeros((2, 3, 3, 3))), T.Tensor(np.zeros(2)),
                 padding="full")


def test_conv2d_gradient():
    rng = np.random.RandomState(4)
    for padding in ["same", "valid"]:
        x = _t64(rng.randn(2, 2, 5, 4), requires_grad=True)
        k = _t64(rng.randn(3, 2, 3, 2), requires_grad=True)
        b = _t64(rng.randn(3), requires_grad=True)
        out_shape = T.conv2d(x, k, b, padding=padding).shape
        coef = _t64(rng.randn(*out_shape))

        def loss():
            return T.reduce_sum(T.conv2d(x, k, b, padding=padding) * coef)

        analytic = T.tape_gradients(loss, [x, k, b])
        for tensor, grad in zip([x, k, b], analytic):
            numeric = T.numerical_gradient(loss, tensor.data)
            npt.assert_allclose(grad, numeric, rtol=1e-3, atol=1e-7)


def test_maxpool_single_window():
    out = T.maxpool2x2(T.Tensor([[[[1.0, 2.0], [3.0, 4.0]]]]))
    assert out.shape == (1, 1, 1, 1)
    assert out.data[0, 0, 0, 0] == 4.0


def test_maxpool_constant_input():
    out = T.maxpool2x2(T.Tensor(np.full((2, 3, 4, 6), 1.5)))
    assert out.shape == (2, 3, 2, 3)
    npt.assert_array_equal(out.data, 1.5)


def test_maxpool_matches_window_scan():
    data = np.random.RandomState(5).randn(1, 1, 4, 4).astype(np.float32)
    out = T.maxpool2x2(T.Tensor(data))
    for i in range(2):
        for j in range(2):
            window = data[0, 0, 2 * i:2 * i + 2, 2 * j:2 * j + 2]
            assert out.data[0, 0, i, j] == window.max()


def test_maxpool_rejects_odd_sizes():
    with pytest.raises(ValueError):
        T.maxpool2x2(T.Tensor(np.zeros((1, 1, 3, 4))))
    with pytest.raises(ValueError):
        T.maxpool2x2(T.Tensor(np.zeros((1, 1, 4, 5))))


def test_maxpool_gradient_goes_to_argmax_only():
    x = T.Tensor([[[[1.0, 5.0], [3.0, 5.0]]]], requires_grad=True)
    T.backward(T.reduce_sum(T.maxpool2x2(x)))
    # ties route to the first maximum
    npt.assert_array_equal(x.grad[0, 0], [[0.0, 1.0], [0.0, 0.0]])


def test_maxpool_gradient():
    rng = np.random.RandomState(6)
    # well separated values so the perturbation never moves an argmax
    data = rng.permutation(2 * 2 * 4 * 6).reshape(2, 2, 4, 6) * 0.1
    x = _t64(data, requires_grad=True)
    coef = _t64(rng.randn(2, 2, 2, 3))

    def loss():
        return T.reduce_sum(T.maxpool2x2(x) * coef)

    grad, = T.tape_gradients(loss, [x])
    npt.assert_allclose(grad, T.numerical_gradient(loss, x.data),
                        rtol=1e-3, atol=1e-9)
