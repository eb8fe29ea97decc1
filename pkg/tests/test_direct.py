import numpy as np
import pytest
import sympy
from hypothesis import given, strategies as st

from fzspectrum import direct
from fzspectrum.direct import (
    Explicit, HamiltonianSpec, ParagraphSource, Periodic, RandomPhase, RandomSign,
    build_subdiagonal, char_poly, dense_eigvals, eigenvalues_qr, eigenvalues_via_roots,
    gauge_reduce, general_matrix, hamiltonian_matrix, hausdorff, hessenberg_eigvals, matched_distance,
)
from fzspectrum.errors import InvalidArgumentError, PartialResultError, SingularGaugeError, SizeCapError
from fzspectrum.poly import CPoly
from fzspectrum.word_spectrum import bloch_curve, off_support
from fzspectrum.words import Paragraph, Word

z = CPoly.monomial(1)
seeds = st.integers(0, 2**64 - 1)


def spec(n, source):
    return HamiltonianSpec(n, source)


def explicit(*r):
    return spec(len(r), Explicit(r))


def test_periodic_tiling():
    assert build_subdiagonal(spec(6, Periodic(Word.parse("++-")))).tolist() == [1, 1, -1, 1, 1, -1]
    assert build_subdiagonal(spec(4, Periodic(Word.parse("++-")))).tolist() == [1, 1, -1, 1]


def test_random_sign_is_pinned():
    # counter-based stream: these values must never change
    r = build_subdiagonal(spec(10, RandomSign(12345)))
    assert r.tolist() == [1, -1, -1, -1, -1, -1, -1, 1, 1, 1]
    assert np.array_equal(r, build_subdiagonal(spec(10, RandomSign(12345))))


def test_random_phase_is_pinned_and_unimodular():
    r = build_subdiagonal(spec(3, RandomPhase(12345)))
    assert np.allclose(r, [-0.606031885223 - 0.795440352316j, 0.151887661464 - 0.988397763198j,
                           0.226941217071 - 0.973908457708j], atol=1e-11)
    assert np.allclose(np.abs(build_subdiagonal(spec(10, RandomPhase(99)))), 1)


def test_paragraph_source():
    r = build_subdiagonal(spec(99, ParagraphSource("++-:16,+++:1,++-:16")))
    assert r[48:51].tolist() == [1, 1, 1] and len(r) == 99


def test_spec_validation():
    with pytest.raises(InvalidArgumentError):
        spec(0, RandomSign(1))
    with pytest.raises(InvalidArgumentError):
        spec(3, Explicit((1, 1)))
    with pytest.raises(SizeCapError):
        eigenvalues_qr(spec(5000, RandomSign(1)))
    with pytest.raises(SizeCapError):
        char_poly(spec(64, RandomSign(1)))


def max_multiplicity(s) -> int:
    """Largest root multiplicity of the exact integer characteristic polynomial."""
    X = sympy.Symbol("x")
    poly = sympy.Poly([int(c) for c in reversed(char_poly(s).coeffs)], X)
    return max(m for _, m in sympy.sqf_list(poly)[1])


def symmetry_tol(s) -> float:
    # an m-fold defective eigenvalue is only resolvable to ~eps**(1/m)
    m = max_multiplicity(s)
    return 1e-8 if m == 1 else max(1e-8, 50 * np.finfo(float).eps ** (1 / m))


def test_small_examples():
    assert matched_distance(eigenvalues_qr(explicit(1)).eigenvalues, [1, -1]) < 1e-14
    assert matched_distance(eigenvalues_qr(explicit(-1)).eigenvalues, [1j, -1j]) < 1e-14
    path = 2 * np.cos(np.pi * np.arange(1, 5) / 5)
    assert matched_distance(eigenvalues_qr(explicit(1, 1, 1)).eigenvalues, path) < 1e-12


def test_result_diagnostics():
    res = eigenvalues_qr(spec(50, RandomSign(2)))
    assert len(res) == 51 and res.iterations > 0 and res.deflations > 0
    assert res.method == "qr-real"
    assert eigenvalues_qr(spec(50, RandomPhase(2))).method == "qr-complex"


def test_char_poly_examples():
    assert char_poly(explicit(1)) == z**2 - 1
    assert char_poly(explicit(1, 1)) == z**3 - 2 * z
    assert char_poly(explicit(1, 1, -1)) == z**4 - z**2 - 1


@pytest.mark.parametrize("r", [(1, 1, -1), (1, -1, -1, 1, -1), (-1, -1, 1, 1, 1, -1, 1)])
def test_char_poly_matches_sympy_determinant(r):
    n = len(r) + 1
    X = sympy.Symbol("x")
    H = sympy.zeros(n, n)
    for k in range(n - 1):
        H[k, k + 1] = 1
        H[k + 1, k] = r[k]
    ref = sympy.Poly((X * sympy.eye(n) - H).det(), X).all_coeffs()[::-1]
    assert char_poly(explicit(*r)).coeffs == tuple(int(c) for c in ref)


def test_char_poly_sign_convention():
    # det(zI - H) and det(H + zI) coincide for zero-diagonal tridiagonal H
    h = hamiltonian_matrix(explicit(1, -1, -1, 1))
    x = 0.37 + 0.2j
    p = char_poly(explicit(1, -1, -1, 1))
    assert np.isclose(p(x), np.linalg.det(x * np.eye(5) - h))
    assert np.isclose(p(x), np.linalg.det(h + x * np.eye(5)))


def test_roots_oracle_examples():
    assert matched_distance(eigenvalues_via_roots(explicit(-1)).eigenvalues, [1j, -1j]) < 1e-12
    for s in (spec(5, RandomSign(42)), spec(9, Periodic(Word.parse("++-")))):
        assert matched_distance(eigenvalues_via_roots(s).eigenvalues, eigenvalues_qr(s).eigenvalues) < 1e-6


@given(seeds, st.integers(1, 200))
def test_gershgorin(seed, n):
    for src in (RandomSign(seed), RandomPhase(seed)):
        assert np.abs(eigenvalues_qr(spec(n, src)).eigenvalues).max() <= 2 + 1e-8


@given(seeds, st.integers(1, 62))
def test_model_a_symmetry(seed, n):
    s = spec(n, RandomSign(seed))
    ev = eigenvalues_qr(s).eigenvalues
    tol = symmetry_tol(s)
    assert matched_distance(ev, np.conj(ev)) < tol
    assert matched_distance(ev, -ev) < tol


def test_model_a_symmetry_large():
    for seed in range(3):
        ev = eigenvalues_qr(spec(400, RandomSign(seed))).eigenvalues
        assert matched_distance(ev, np.conj(ev)) < 1e-8
        assert matched_distance(ev, -ev) < 1e-8


@given(seeds, st.integers(1, 62))
def test_qr_agrees_with_lapack(seed, n):
    for src in (RandomSign(seed), RandomPhase(seed)):
        s = spec(n, src)
        ours = eigenvalues_qr(s).eigenvalues
        ref = np.linalg.eigvals(hamiltonian_matrix(s))
        tol = symmetry_tol(s) if isinstance(src, RandomSign) else 1e-8
        assert matched_distance(ours, ref) < tol


def test_complex_path_on_real_matrix():
    s = spec(40, RandomSign(5))
    a = eigenvalues_qr(s, method="real").eigenvalues
    b = eigenvalues_qr(s, method="complex").eigenvalues
    assert matched_distance(a, b) < 1e-10
    with pytest.raises(InvalidArgumentError):
        eigenvalues_qr(spec(5, RandomPhase(5)), method="real")


def test_dense_eigvals_general_matrix():
    rng = np.random.default_rng(0)
    a = rng.normal(size=(12, 12)) + 1j * rng.normal(size=(12, 12))
    assert matched_distance(dense_eigvals(a), np.linalg.eigvals(a)) < 1e-10


def test_partial_result_keeps_deflated_values():
    h = hamiltonian_matrix(spec(30, RandomPhase(3))).astype(complex)
    with pytest.raises(PartialResultError) as exc:
        hessenberg_eigvals(h, method="complex", max_its=1)
    best = exc.value.best
    assert best is not None
    ref = np.linalg.eigvals(h)
    for x in best:
        assert np.abs(ref - x).min() < 1e-8


def test_gauge_identity_and_scaling():
    r = np.array([1, -1, 1, 1, -1, 1, -1.0])
    assert np.array_equal(gauge_reduce(np.ones(7), r), r)
    c = 2.5
    rp = gauge_reduce(np.full(7, c), np.ones(7))
    assert np.allclose(rp, c)
    # r' = c stretches the clean chain by sqrt(c)
    ev = eigenvalues_qr(spec(7, Explicit(tuple(rp)))).eigenvalues
    general = np.linalg.eigvals(general_matrix(np.full(7, c), np.ones(7)))
    assert matched_distance(ev, general) < 1e-8
    assert matched_distance(ev, np.sqrt(c) * 2 * np.cos(np.pi * np.arange(1, 9) / 9)) < 1e-8


@given(st.lists(st.complex_numbers(min_magnitude=0.2, max_magnitude=2, allow_nan=False), min_size=14, max_size=14))
def test_gauge_matches_general_matrix(vals):
    s, r = np.array(vals[:7]), np.array(vals[7:])
    ev = eigenvalues_qr(spec(7, Explicit(tuple(gauge_reduce(s, r))))).eigenvalues
    assert matched_distance(ev, np.linalg.eigvals(general_matrix(s, r))) < 1e-8


def test_singular_gauge():
    with pytest.raises(SingularGaugeError):
        gauge_reduce([1, 0, 1], [1, 1, 1])


def test_periodic_spectrum_near_curve():
    s = bloch_curve(Word.parse("++-"))
    ev = eigenvalues_qr(spec(300, Periodic(Word.parse("++-")))).eigenvalues
    from fzspectrum.word_spectrum import distance_to_support

    assert np.mean(distance_to_support(ev, s) <= 0.02) >= 0.99


def _corrupted(l):
    par = Paragraph.parse(f"++-:{l},+++:1,++-:{l}")
    n = par.total_length
    a = eigenvalues_qr(spec(n, ParagraphSource(par))).eigenvalues
    b = eigenvalues_qr(spec(n, Periodic(Word.parse("++-")))).eigenvalues
    return a, b


@pytest.mark.xfail(strict=True, reason="the inserted +++ binds a defect pair at exactly +-sqrt(3), far from the periodic spectrum")
def test_corrupted_word_hausdorff():
    a, b = _corrupted(16)
    assert hausdorff(a, b) <= 0.1


def test_corrupted_word_defect_pair_and_bulk():
    s = bloch_curve(Word.parse("++-"))
    for l in (16, 32, 64):
        a, b = _corrupted(l)
        defects = a[np.abs(np.abs(a) - 3**0.5) < 1e-6]
        assert len(defects) == 2 and np.allclose(np.abs(defects.imag), 0)
        assert np.min(np.abs(off_support(a, s, 0.05) - 3**0.5)) < 1e-6
    bulk = a[np.abs(np.abs(a) - 3**0.5) >= 1e-6]
    assert hausdorff(bulk, b) <= 0.1


def test_threads_do_not_change_results():
    from concurrent.futures import ThreadPoolExecutor

    specs = [spec(80, RandomSign(s)) for s in range(6)]
    serial = [eigenvalues_qr(s).eigenvalues for s in specs]
    with ThreadPoolExecutor(max_workers=3) as ex:
        par = list(ex.map(lambda s: eigenvalues_qr(s).eigenvalues, specs))
    assert all(np.array_equal(a, b) for a, b in zip(serial, par))


def test_module_constants():
    assert direct.DEFLATION_EPS == 1e-14 and direct.MAX_QR_SIZE == 5000
