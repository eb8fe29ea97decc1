import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fzspectrum.direct import HamiltonianSpec, RandomSign, eigenvalues_qr
from fzspectrum.dyson_schmidt import (
    DSConfig, GridSpec, LetterStream, escape_map, iterate_ratio, lyapunov, ratio_statistics,
    stable_fixed_points, stream_rng, support_vs_fixed_points,
)
from fzspectrum.errors import InsufficientWordsError, InvalidArgumentError, SizeCapError
from fzspectrum.word_spectrum import fixed_points
from fzspectrum.words import Word

GOLDEN3 = (3 + 5**0.5) / 2


def test_config_validation():
    for bad in ({"burn_in": -1}, {"samples": 0}, {"y_max": 10}, {"trajectories": 0}):
        with pytest.raises(InvalidArgumentError):
            DSConfig(1, **bad)
    assert DSConfig(1, letters="++-").letters == Word.parse("++-")


def test_converges_to_fixed_point():
    tr = iterate_ratio(DSConfig(3, burn_in=0, samples=101, letters="+"))
    assert tr.values[0] == 3
    assert abs(tr.values[100] - GOLDEN3) < 1e-10


def test_ratio_matches_determinant_ratio():
    # y_k = Delta_k / Delta_{k-1} for the open chain with the same letters
    cfg = DSConfig(0.4 + 0.9j, burn_in=0, samples=30, letters="random_sign", seed=8)
    tr = iterate_ratio(cfg)
    r = LetterStream("random_sign", stream_rng(8, 0)).take(30).real
    d_prev, d = 1.0, cfg.z
    for k in range(30):
        assert abs(tr.values[k] - d / d_prev) < 1e-9 * max(1, abs(d / d_prev))
        d_prev, d = d, cfg.z * d - r[k] * d_prev


def test_zero_cycle_is_exact():
    tr = iterate_ratio(DSConfig(0, burn_in=0, samples=6, letters="+"))
    v = tr.values
    assert v[0] == 0 and np.isinf(v[1]) and v[2] == 0 and np.isinf(v[3])
    assert tr.invalid == 0 and tr.excluded == 6


def test_long_run_never_invalid():
    st_ = ratio_statistics(DSConfig(0, burn_in=0, samples=10**7, letters="+"))
    assert st_.invalid == 0 and st_.excluded == 10**7


@pytest.mark.parametrize("z", [0.5, -1.3, 1.999, 0.3 + 0.01j, 1j, 2.2, 0])
def test_no_invalid_states_on_spectrum(z):
    for letters in ("random_sign", "random_phase", "+", "++-"):
        st_ = ratio_statistics(DSConfig(z, burn_in=0, samples=200_000, letters=letters, seed=4))
        assert st_.invalid == 0


def test_periodic_stream_limit_cycle():
    w = Word.parse("++-")
    tr = iterate_ratio(DSConfig(3, samples=3000, letters=w))
    # samples start at y_{1001}; y_{1 + 3m} follows the word's own fixed point, later ones its rotations
    for k in range(3):
        fp = fixed_points(w.rotate((1000 + k) % 3), 3).stable
        assert abs(tr.values[-3 + k] - fp) < 1e-8 or abs(tr.values[-3 + k] - fp) < 1e-8 * abs(fp)


@given(st.sampled_from(["++-", "+-", "+--+", "+++-"]), st.complex_numbers(min_magnitude=2.3, max_magnitude=4, allow_nan=False))
@settings(max_examples=30)
def test_limit_cycle_matches_stable_orbit(text, z):
    w = Word.parse(text)
    L = len(w)
    tr = iterate_ratio(DSConfig(z, samples=4 * L, letters=w))
    for k in range(L):
        fp = fixed_points(w.rotate((1000 + k) % L), z)
        if fp.stable is not None:
            assert abs(tr.values[-L + k] - fp.stable) < 1e-8 * max(1, abs(fp.stable))


def test_lyapunov_fixed_point():
    est = lyapunov(DSConfig(3, letters="+"))
    assert not est.unreliable
    assert abs(est.gamma - math.log(GOLDEN3)) <= 2 * est.se


def test_lyapunov_far_field():
    est = lyapunov(DSConfig(10, letters="random_sign", seed=1))
    assert 2.28 <= est.gamma <= 2.31
    # every ratio stays in [9.9, 10.1] once it has settled, so the mean must too
    assert math.log(9.9) <= est.gamma <= math.log(10.1)


def test_lyapunov_orders_points():
    far = lyapunov(DSConfig(3, seed=1))
    near = lyapunov(DSConfig(1.0 + 0.3j, seed=1))
    assert far.gamma > near.gamma
    ev = eigenvalues_qr(HamiltonianSpec(999, RandomSign(1))).eigenvalues
    assert np.abs(ev - 3).min() > np.abs(ev - (1.0 + 0.3j)).min()


def test_lyapunov_burn_in_and_seed_stability():
    base = DSConfig(1.2 + 0.6j, burn_in=1000, samples=20_000, seed=3)
    a = lyapunov(base)
    b = lyapunov(DSConfig(base.z, burn_in=2000, samples=20_000, seed=3))
    assert abs(a.gamma - b.gamma) <= 3 * math.hypot(a.se, b.se)
    ests = [lyapunov(DSConfig(base.z, samples=20_000, seed=s)) for s in range(10)]
    g = np.array([e.gamma for e in ests])
    se = np.array([e.se for e in ests])
    for i in range(10):
        others = np.delete(np.arange(10), i)
        se_rest = math.sqrt((se[others] ** 2).sum()) / 9
        assert abs(g[i] - g[others].mean()) <= 3 * math.hypot(se[i], se_rest)


def test_lyapunov_flags_excluded_samples():
    est = lyapunov(DSConfig(0, letters="+", samples=10_000))
    assert est.unreliable and est.excluded == 10_000 and math.isnan(est.gamma)
    short = lyapunov(DSConfig(3, letters="+", samples=100))
    assert short.unreliable and "fewer" in short.reason


def test_escape_outside_gershgorin():
    grid = GridSpec(2.2, 3.0, -0.5, 0.5, nx=5, ny=5)
    for letters in ("random_sign", "random_phase", "+-"):
        m = escape_map(grid, DSConfig(letters=letters, seed=2))
        assert (m.escape_fraction == 0).all()


def test_escape_all_cells_beyond_radius():
    grid = GridSpec(nx=21, ny=21)
    m = escape_map(grid, DSConfig(samples=2000, burn_in=200, seed=5))
    far = np.abs(grid.points()) > 2.05
    assert (m.escape_fraction.ravel()[far] == 0).all()


def test_escape_clean_chain_band():
    grid = GridSpec(-3, 3, -1, 1, nx=31, ny=21)
    m = escape_map(grid, DSConfig(letters="+", y_max=1e3))
    pts = grid.points()
    hot = m.escape_fraction.ravel() > 0
    on_band = (np.abs(pts.imag) < 1e-12) & (np.abs(pts.real) < 1.95)
    assert hot[on_band].all()
    off = np.abs(pts.imag) > 0.1
    assert not hot[off].any()


def test_escape_map_threads_deterministic():
    grid = GridSpec(nx=9, ny=7)
    cfg = DSConfig(samples=1000, burn_in=100, seed=11, trajectories=2)
    a = escape_map(grid, cfg)
    b = escape_map(grid, cfg, threads=3)
    assert np.array_equal(a.gamma, b.gamma, equal_nan=True)
    assert np.array_equal(a.escape_fraction, b.escape_fraction)
    assert a.label == "candidate support"


def test_grid_cap():
    with pytest.raises(SizeCapError):
        GridSpec(nx=1025, ny=10)


def test_support_closure():
    cfg = DSConfig(samples=10**5, seed=6)
    d8 = support_vs_fixed_points(3, 8, cfg)
    d1 = support_vs_fixed_points(3, 1, cfg)
    assert d8.distance <= 0.05
    assert d8.distance <= d1.distance
    prev = math.inf
    for L in range(1, 9):
        d = support_vs_fixed_points(3, L, DSConfig(samples=20_000, seed=6)).distance
        assert d <= prev
        prev = d


def test_support_constant_word():
    assert support_vs_fixed_points(3, 1, DSConfig(letters="+")).distance <= 1e-8


def test_support_errors():
    with pytest.raises(InvalidArgumentError):
        support_vs_fixed_points(3, 11, DSConfig())
    with pytest.raises(InvalidArgumentError):
        support_vs_fixed_points(3, 2, DSConfig(letters="random_phase"))
    # on the clean band every multiplier has modulus one: nothing is stable
    with pytest.raises(InsufficientWordsError):
        support_vs_fixed_points(0.5, 3, DSConfig(letters="+"))


def test_stable_points_count():
    pts = stable_fixed_points(3, 3)
    assert len(pts) == 2 + 4 + 8
