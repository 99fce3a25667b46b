"""Conv kernel backends against naive references and against each other."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from fasttalker.numerics import kernels
from gradcheck import naive_conv1d, naive_conv_transpose1d

BACKENDS = kernels.available_backends()


def cases():
    rng = np.random.default_rng(7)
    grid = [
        # cin, cout, k, groups, dilation, t, pads
        (1, 1, 1, 1, 1, 6, (0, 0)),
        (4, 6, 3, 1, 1, 11, (2, 0)),
        (8, 8, 3, 4, 1, 9, (1, 1)),
        (6, 4, 5, 2, 2, 16, (8, 0)),
        (8, 16, 7, 8, 3, 20, (9, 9)),
        (16, 8, 1, 8, 1, 5, (0, 0)),
    ]
    for cin, cout, k, g, d, t, (pl, pr) in grid:
        x = rng.normal(size=(cin, t))
        w = rng.normal(size=(cout, cin // g, k))
        yield x, w, g, d, pl, pr


class TestConv1d:
    @pytest.mark.parametrize("backend", BACKENDS)
    def test_matches_naive(self, backend):
        impl = kernels.get_impl(backend)
        for x, w, g, d, pl, pr in cases():
            got = impl.conv1d_forward(x, w, g, d, pl, pr)
            want = naive_conv1d(x, w, g, d, pl, pr)
            assert_allclose(got, want, rtol=1e-12, atol=1e-12)

    def test_backends_agree(self):
        if len(BACKENDS) < 2:
            pytest.skip("compiled kernels not built")
        a = kernels.get_impl("numpy")
        b = kernels.get_impl("compiled")
        for x, w, g, d, pl, pr in cases():
            assert_allclose(a.conv1d_forward(x, w, g, d, pl, pr),
                            b.conv1d_forward(x, w, g, d, pl, pr),
                            rtol=1e-12, atol=1e-14)

    def test_pointwise_kernel_scales(self):
        """kernel=1, w=[2], b folded outside: [1,2,3] -> [2,4,6]."""
        x = np.array([[1.0, 2.0, 3.0]])
        w = np.array([[[2.0]]])
        got = kernels.conv1d_forward(x, w, 1, 1, 0, 0)
        assert_allclose(got, [[2.0, 4.0, 6.0]])

    @pytest.mark.parametrize("backend", BACKENDS)
    def test_grads_match_naive_fd(self, backend):
        """Kernel-level grads vs finite differences of the naive forward."""
        impl = kernels.get_impl(backend)
        rng = np.random.default_rng(3)
        x = rng.normal(size=(4, 9))
        w = rng.normal(size=(6, 2, 3))
        g, d, pl, pr = 2, 2, 4, 0
        dy = rng.normal(size=(6, 9))

        def loss(xv, wv):
            return float((naive_conv1d(xv, wv, g, d, pl, pr) * dy).sum())

        dx = impl.conv1d_grad_input(dy, w, g, d, pl, x.shape[1])
        dw = impl.conv1d_grad_weight(dy, x, w.shape, g, d, pl, pr)
        h = 1e-6
        for idx in [(0, 0), (1, 4), (3, 8), (2, 2)]:
            e = np.zeros_like(x)
            e[idx] = h
            fd = (loss(x + e, w) - loss(x - e, w)) / (2 * h)
            assert abs(fd - dx[idx]) < 1e-6
        for idx in [(0, 0, 0), (5, 1, 2), (3, 0, 1)]:
            e = np.zeros_like(w)
            e[idx] = h
            fd = (loss(x, w + e) - loss(x, w - e)) / (2 * h)
            assert abs(fd - dw[idx]) < 1e-6


class TestConvTranspose1d:
    @pytest.mark.parametrize("backend", BACKENDS)
    def test_matches_naive(self, backend):
        impl = kernels.get_impl(backend)
        rng = np.random.default_rng(11)
        for cin, cout, k, stride, t in [(1, 1, 2, 2, 4), (3, 5, 8, 4, 7),
                                        (4, 2, 10, 5, 6), (2, 3, 16, 8, 5),
                                        (2, 2, 3, 4, 5)]:
            x = rng.normal(size=(cin, t))
            w = rng.normal(size=(cin, cout, k))
            got = impl.conv_transpose1d_forward(x, w, stride)
            want = naive_conv_transpose1d(x, w, stride)
            assert got.shape == (cout, t * stride)
            assert_allclose(got, want, rtol=1e-12, atol=1e-12)

    def test_identity_kernel_interleaves_zeros(self):
        """stride=2 with kernel [1, 0] upsamples by zero insertion."""
        x = np.array([[1.0, 2.0, 3.0]])
        w = np.array([[[1.0, 0.0]]])
        got = kernels.conv_transpose1d_forward(x, w, 2)
        assert_allclose(got, [[1.0, 0.0, 2.0, 0.0, 3.0, 0.0]])

    def test_output_length_is_stride_times_input(self):
        rng = np.random.default_rng(0)
        x = rng.normal(size=(2, 5))
        w = rng.normal(size=(2, 3, 8))
        assert kernels.conv_transpose1d_forward(x, w, 4).shape == (3, 20)

    @pytest.mark.parametrize("backend", BACKENDS)
    def test_grads_match_naive_fd(self, backend):
        impl = kernels.get_impl(backend)
        rng = np.random.default_rng(5)
        x = rng.normal(size=(3, 4))
        w = rng.normal(size=(3, 2, 6))
        stride = 3
        dy = rng.normal(size=(2, 12))

        def loss(xv, wv):
            return float((naive_conv_transpose1d(xv, wv, stride) * dy).sum())

        dx = impl.conv_transpose1d_grad_input(dy, w, stride)
        dw = impl.conv_transpose1d_grad_weight(dy, x, w.shape, stride)
        h = 1e-6
        for idx in [(0, 0), (2, 3), (1, 2)]:
            e = np.zeros_like(x)
            e[idx] = h
            fd = (loss(x + e, w) - loss(x - e, w)) / (2 * h)
            assert abs(fd - dx[idx]) < 1e-6
        for idx in [(0, 0, 0), (2, 1, 5), (1, 0, 3)]:
            e = np.zeros_like(w)
            e[idx] = h
            fd = (loss(x, w + e) - loss(x, w - e)) / (2 * h)
            assert abs(fd - dw[idx]) < 1e-6
