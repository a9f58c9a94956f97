import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import dawsn

from interiorct import (ChordSignal, ValidationError, cauchy_pv,
                        finite_hilbert, hilbert_1d)


def test_full_line_hilbert_of_cosine_is_sine():
    # windowed comparison on the interior to avoid end effects
    u = np.linspace(-200.0, 200.0, 4096)
    f = np.cos(u) * np.exp(-(u / 60.0) ** 2)
    h = hilbert_1d(f)
    expected = np.sin(u) * np.exp(-(u / 60.0) ** 2)
    inner = np.abs(u) < 30.0
    assert np.max(np.abs(h[inner] - expected[inner])) < 5e-3


def test_full_line_hilbert_of_gaussian_is_dawson():
    sigma = 1.0
    u = np.linspace(-40.0, 40.0, 8192)
    f = np.exp(-(u / sigma) ** 2)
    h = hilbert_1d(f)
    expected = (2.0 / np.sqrt(np.pi)) * dawsn(u / sigma)
    inner = np.abs(u) < 10.0
    rel = (np.linalg.norm(h[inner] - expected[inner])
           / np.linalg.norm(expected[inner]))
    assert rel < 1e-3


def test_full_line_hilbert_along_chosen_axis():
    rng = np.random.default_rng(0)
    a = rng.normal(size=(4, 512))
    np.testing.assert_allclose(hilbert_1d(a, axis=1),
                               hilbert_1d(a.T, axis=0).T, atol=1e-12)


def test_hilbert_rejects_degenerate_input():
    with pytest.raises(ValidationError):
        hilbert_1d(np.array([1.0]))


def test_finite_hilbert_of_semicircle_is_linear():
    # T[sqrt(1-s^2)](u) = u for |u| < 1 (with the 1/pi normalization)
    n = 4001
    sig = ChordSignal(np.sqrt(1.0 - np.linspace(-1, 1, n) ** 2), tau=1.0)
    out = finite_hilbert(sig)
    u = sig.grid
    inner = np.abs(u) < 0.9
    assert np.max(np.abs(out.samples[inner] - u[inner])) < 2e-3


def test_finite_hilbert_of_constant_is_log():
    # T[1](u) = (1/pi) * ln((1+u)/(1-u))
    n = 8001
    sig = ChordSignal(np.ones(n), tau=1.0)
    out = finite_hilbert(sig)
    u = sig.grid
    inner = np.abs(u) < 0.9
    expected = np.log((1.0 + u[inner]) / (1.0 - u[inner])) / np.pi
    assert np.max(np.abs(out.samples[inner] - expected)) < 2e-3


def test_finite_hilbert_scale_invariance():
    # under x = tau*u the transform value is unchanged
    n = 4001
    u = np.linspace(-1, 1, n)
    f = np.exp(-4.0 * u ** 2)
    a = finite_hilbert(ChordSignal(f, tau=1.0)).samples
    b = finite_hilbert(ChordSignal(f, tau=0.5)).samples
    inner = np.abs(u) < 0.9
    assert np.max(np.abs(a[inner] - b[inner])) < 1e-6


def test_tricomi_null_function_annihilated_on_open_grid():
    # T[1/sqrt(tau^2-s^2)] = 0 inside (-tau, tau)
    tau = 1.0
    n = 2 ** 17
    h = 2.0 * tau / n
    s = -tau + (np.arange(n) + 0.5) * h
    phi = 1.0 / np.sqrt(tau * tau - s * s)
    u = np.linspace(-0.9 * tau, 0.9 * tau, 41)
    vals = cauchy_pv(phi, s, tau, open_grid=True, eval_points=u) / np.pi
    assert np.max(np.abs(vals)) < 1e-2 / tau


def test_pv_quadrature_of_linear_integrand():
    # analytic: p.v. int_{-1}^{1} s/(u-s) ds = u*ln((1+u)/(1-u)) - 2
    u = np.array([0.3])
    s = np.linspace(-1, 1, 2001)
    val = cauchy_pv(s, s, 1.0, eval_points=u)[0]
    exact = 0.3 * np.log(1.3 / 0.7) - 2.0
    assert abs(val - exact) < 1e-9


def test_pv_quadrature_converges_under_refinement():
    # analytic: p.v. int_{-1}^{1} s^3/(u-s) ds
    #         = u^3*ln((1+u)/(1-u)) - 2*u^2 - 2/3
    u = np.array([0.3])
    exact = 0.3 ** 3 * np.log(1.3 / 0.7) - 2.0 * 0.09 - 2.0 / 3.0
    errs = []
    for n in (501, 1001):
        s = np.linspace(-1, 1, n)
        val = cauchy_pv(s ** 3, s, 1.0, eval_points=u)[0]
        errs.append(abs(val - exact))
    assert errs[1] < errs[0]
    assert errs[1] < 1e-5


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(min_value=-2.0, max_value=2.0),
                min_size=2, max_size=5))
def test_finite_hilbert_is_linear_on_polynomials(coeffs):
    n = 1001
    u = np.linspace(-1, 1, n)
    f = np.polynomial.polynomial.polyval(u, coeffs)
    g = u ** 2
    a = finite_hilbert(ChordSignal(f + g, tau=1.0)).samples
    b = (finite_hilbert(ChordSignal(f, tau=1.0)).samples
         + finite_hilbert(ChordSignal(np.asarray(g), tau=1.0)).samples)
    inner = np.abs(u) < 0.9
    np.testing.assert_allclose(a[inner], b[inner], atol=1e-8)


def test_chord_signal_grids():
    closed = ChordSignal(np.zeros(5), tau=2.0)
    np.testing.assert_allclose(closed.grid, [-2, -1, 0, 1, 2])
    assert closed.spacing == 1.0
    open_ = ChordSignal(np.zeros(4), tau=2.0, open_grid=True)
    np.testing.assert_allclose(open_.grid, [-1.5, -0.5, 0.5, 1.5])
    assert open_.spacing == 1.0
    with pytest.raises(ValidationError):
        ChordSignal(np.zeros(5), tau=-1.0)


def test_chord_signal_csv_export(tmp_path):
    sig = ChordSignal(np.arange(5, dtype=float), tau=1.0, v=0.5)
    path = tmp_path / "chord.csv"
    sig.to_csv(path)
    loaded = np.loadtxt(path, delimiter=",", skiprows=1)
    np.testing.assert_allclose(loaded[:, 0], sig.grid)
    np.testing.assert_allclose(loaded[:, 1], sig.samples)
