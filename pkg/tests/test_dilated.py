import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gcdsum import dilated
from gcdsum.dilated import DilatedFunction
from gcdsum.errors import DomainError
from gcdsum.gcdform import CoefSeq


def test_eval_matches_direct_sum():
    fn = DilatedFunction(1.0, 50)
    x = np.array([0.1, 0.37, 0.9])
    want = [sum(math.sin(2 * math.pi * j * v) / j for j in range(1, 51)) for v in x]
    assert dilated.eval_fs(fn, x) == pytest.approx(want, abs=1e-12)


def test_sawtooth_limit():
    # sum sin(2 pi j x) / j = pi (1/2 - x) on (0, 1)
    fn = DilatedFunction(1.0, 100_000)
    assert dilated.eval_fs(fn, 0.25) == pytest.approx(math.pi / 4, abs=1e-4)


@pytest.mark.parametrize("k, points", [(1, 64), (3, 64), (7, 50)])
def test_fft_sampling_matches_pointwise(k, points):
    fn = DilatedFunction(0.8, 40)
    xs = np.arange(points) / points
    assert dilated.sample_dilate(fn, k, points) == pytest.approx(dilated.eval_fs(fn, k * xs), abs=1e-11)


@settings(max_examples=30)
@given(st.integers(1, 12), st.integers(1, 12), st.sampled_from([0.6, 0.8, 1.0, 1.5]))
def test_quadrature_equals_truncated_inner_product(k, l, s):
    M = 64
    chk = dilated.gram_inner_product_numeric(s, k, l, M, 4 * M * max(k, l))
    assert chk.quadrature == pytest.approx(chk.truncated_exact, rel=1e-10, abs=1e-12)


@pytest.mark.parametrize("k, l", [(1, 1), (2, 1), (3, 5), (4, 6)])
def test_truncated_converges_to_closed_form(k, l):
    M = 10_000
    exact = dilated.truncated_inner_product(1.0, k, l, M)
    closed = dilated.closed_form_inner_product(1.0, k, l)
    assert 0 <= closed - exact <= 1.0 / M


def test_antisymmetry():
    fn = DilatedFunction(0.9, 300)
    x = np.linspace(0.01, 0.49, 17)
    assert dilated.eval_fs(fn, 1 - x) == pytest.approx(-dilated.eval_fs(fn, x), abs=1e-12)


def test_norm_via_gram_matches_quadrature():
    K, c = [1, 2, 3], CoefSeq.on([1, 2, 3], [1.0, -0.5, 0.25])
    gram = dilated.norm_via_gram(K, c, 1.0)
    quad = dilated.norm_quadrature(K, c, 1.0, M=10_000, points=1 << 16)
    assert quad == pytest.approx(gram, rel=1e-3)


def test_validation():
    with pytest.raises(DomainError):
        DilatedFunction(0.5, 10)
    with pytest.raises(DomainError):
        DilatedFunction(1.0, 0)


def test_zero_series_has_zero_norm():
    assert dilated.fourier_norm_quadrature(CoefSeq.dense([0.0, 0.0]), [1, 2], CoefSeq({1: 1.0}), 64) == 0.0
