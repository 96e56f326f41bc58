"""Compiled extension vs pure-numpy fallback agreement."""

import numpy as np
import pytest

from synlik import _core
from synlik._core import fallback


def _have_compiled():
    return _core.BACKEND == "compiled"


def test_backend_tag_is_valid():
    assert _core.BACKEND in ("compiled", "fallback")


@pytest.mark.skipif(not _have_compiled(), reason="compiled kernels not built")
def test_kde_eval_backends_agree():
    rng = np.random.default_rng(0)
    batch = np.ascontiguousarray(rng.standard_normal((200, 7)))
    h = np.ascontiguousarray(0.2 + rng.random(7))
    obs = np.ascontiguousarray(rng.standard_normal(7))
    logpdf_c, cdf_c = _core._impl.kde_eval(batch, h, obs)
    logpdf_f, cdf_f = fallback.kde_eval(batch, h, obs)
    assert np.allclose(logpdf_c, logpdf_f, atol=1e-12)
    assert np.allclose(cdf_c, cdf_f, atol=1e-14)


@pytest.mark.skipif(not _have_compiled(), reason="compiled kernels not built")
def test_kde_eval_backends_agree_in_tails():
    rng = np.random.default_rng(1)
    batch = np.ascontiguousarray(rng.standard_normal((100, 3)))
    h = np.ascontiguousarray(np.full(3, 0.3))
    obs = np.ascontiguousarray(np.array([0.0, 12.0, 60.0]))
    logpdf_c, cdf_c = _core._impl.kde_eval(batch, h, obs)
    logpdf_f, cdf_f = fallback.kde_eval(batch, h, obs)
    assert logpdf_c[2] == -np.inf and logpdf_f[2] == -np.inf
    assert np.allclose(logpdf_c[:2], logpdf_f[:2], atol=1e-12)
    assert np.allclose(cdf_c, cdf_f, atol=1e-14)


@pytest.mark.skipif(not _have_compiled(), reason="compiled kernels not built")
def test_boombust_path_backends_bit_identical():
    rng = np.random.default_rng(2)
    uniforms = np.ascontiguousarray(rng.random((400, 2)))
    args = (uniforms, 50, 0.4, 50.0, 0.09, 0.05)
    path_c = _core._impl.boombust_path(*args)
    path_f = fallback.boombust_path(*args)
    assert path_c.dtype == path_f.dtype == np.int64
    assert np.array_equal(path_c, path_f)


def test_boombust_path_nonnegative_integers():
    rng = np.random.default_rng(3)
    uniforms = np.ascontiguousarray(rng.random((300, 2)))
    path = _core.boombust_path(uniforms, 10, 0.9, 20.0, 0.5, 0.3)
    assert path.shape == (300,)
    assert np.all(path >= 0)
