import pytest
from hypothesis import given, strategies as st

from fzspectrum.errors import InvalidArgumentError, UnsupportedLengthError
from fzspectrum.words import (
    Paragraph, Word, build_paragraph, canonical_rotation, cyclic_invariants,
    enumerate_words, is_primitive, necklaces,
)

signs = st.sampled_from([1, -1])
words = st.lists(signs, min_size=1, max_size=12).map(lambda t: Word(tuple(t)))


def W(s):
    return Word.parse(s)


def test_parse_and_format():
    assert W("++-").letters == (1, 1, -1)
    assert str(W("{+, -}")) == "+-"
    assert W("+−").letters == (1, -1)


@pytest.mark.parametrize("text", ["", "+a-", "{}"])
def test_parse_rejects_bad_input(text):
    with pytest.raises(InvalidArgumentError):
        Word.parse(text)


def test_parse_error_names_position():
    with pytest.raises(InvalidArgumentError, match="position 2"):
        Word.parse("++x")


def test_zero_letter_rejected():
    with pytest.raises(InvalidArgumentError):
        Word((1, 0, -1))


def test_enumerate_small():
    assert [str(w) for w in enumerate_words(1)] == ["+", "-"]
    assert [str(w) for w in enumerate_words(2)] == ["++", "+-", "-+", "--"]


def test_enumerate_counts_and_order():
    ws = enumerate_words(10)
    assert len(ws) == 1024
    assert len({w.letters for w in ws}) == 1024
    strs = [str(w).replace("+", "0").replace("-", "1") for w in ws]
    assert strs == sorted(strs)


@pytest.mark.parametrize("L", [0, 25])
def test_enumerate_range(L):
    with pytest.raises(InvalidArgumentError):
        enumerate_words(L)


def test_three_mixed_four_letter_necklaces():
    found = {str(w) for w in necklaces(4, primitive_only=True, mixed_only=True)}
    assert found == {"+++-", "++--", "+---"}


def test_canonical_rotation_examples():
    assert str(canonical_rotation(W("-++"))) == "++-"
    assert str(canonical_rotation(W("++-"))) == "++-"
    assert str(canonical_rotation(W("-+-+"))) == "+-+-"


def test_is_primitive_examples():
    assert not is_primitive(W("+-+-"))
    assert is_primitive(W("++-"))
    assert not is_primitive(W("++++"))


def _brute_primitive(t):
    L = len(t)
    return not any(L % d == 0 and t == t[:d] * (L // d) for d in range(1, L))


def test_primitive_matches_brute_force():
    for L in range(1, 13):
        for w in enumerate_words(L):
            assert is_primitive(w) == _brute_primitive(w.letters)


@pytest.mark.parametrize("L,count", [(1, 2), (4, 6), (6, 14), (8, 36)])
def test_necklace_numbers(L, count):
    classes = {canonical_rotation(w).letters for w in enumerate_words(L)}
    assert len(classes) == count
    assert len(necklaces(L, primitive_only=False)) == count


@given(words, st.integers(0, 30))
def test_canonical_rotation_is_rotation_invariant(w, k):
    c = canonical_rotation(w)
    assert canonical_rotation(w.rotate(k)) == c
    assert canonical_rotation(c) == c
    assert c.letters in {w.rotate(j).letters for j in range(len(w))}


@given(words, st.integers(2, 4))
def test_powers_are_not_primitive(w, n):
    assert not is_primitive(w**n)


def test_invariant_examples():
    inv = cyclic_invariants(W("+++-"))
    assert (inv.s, inv.kappa, inv.omega, inv.p) == (2, 0, 2, -1)
    inv = cyclic_invariants(W("++--"))
    assert (inv.s, inv.kappa, inv.omega, inv.p) == (0, -2, 0, 1)
    inv = cyclic_invariants(W("+"))
    assert (inv.s, inv.p) == (1, 1)


def test_invariants_strict_length():
    with pytest.raises(UnsupportedLengthError):
        cyclic_invariants(W("++-+-+--"), strict=True)
    assert cyclic_invariants(W("++-+-+--")).kappa is None


def _sq(x):
    return None if x is None else x * x


def test_invariants_rotation_exhaustive():
    for L in range(1, 13):
        for w in enumerate_words(L):
            a, b = cyclic_invariants(w), cyclic_invariants(w.rotate(1))
            assert (a.s, a.p, a.kappa, a.rho) == (b.s, b.p, b.kappa, b.rho)
            assert (_sq(a.d), _sq(a.omega), _sq(a.delta)) == (_sq(b.d), _sq(b.omega), _sq(b.delta))


def test_odd_rotation_flips_sign_quantities():
    assert cyclic_invariants(W("+-")).d == -cyclic_invariants(W("-+")).d
    w = W("+++-")
    assert cyclic_invariants(w).omega == -cyclic_invariants(w.rotate(1)).omega


@given(st.lists(st.complex_numbers(min_magnitude=0.5, max_magnitude=2, allow_nan=False), min_size=4, max_size=4),
       st.integers(0, 3))
def test_complex_letter_invariants_rotate(letters, k):
    w = Word(tuple(letters))
    a, b = cyclic_invariants(w), cyclic_invariants(w.rotate(k))
    assert abs(complex(a.s) - complex(b.s)) < 1e-12
    assert abs(complex(a.kappa) - complex(b.kappa)) < 1e-12
    assert abs(complex(a.omega) ** 2 - complex(b.omega) ** 2) < 1e-10


def test_paragraph_examples():
    assert build_paragraph(Paragraph(((W("++-"), 2),))) == (1, 1, -1, 1, 1, -1)
    corrupted = Paragraph.parse("++-:16,+++:1,++-:16")
    flat = build_paragraph(corrupted)
    assert len(flat) == 99 == corrupted.total_length
    assert flat[48:51] == (1, 1, 1)
    assert len(build_paragraph(Paragraph.parse("++--:20,+++-:20"))) == 160
    assert str(corrupted) == "++-:16,+++:1,++-:16"


@pytest.mark.parametrize("text", ["++-:0", "++-:x", "++-:2,,+:1"])
def test_paragraph_rejects_bad_input(text):
    with pytest.raises(InvalidArgumentError):
        Paragraph.parse(text)


@given(st.lists(st.tuples(words, st.integers(1, 5)), min_size=1, max_size=4))
def test_paragraph_length(segments):
    p = Paragraph(tuple(segments))
    assert len(build_paragraph(p)) == sum(len(w) * n for w, n in segments)


def test_word_operations():
    w = W("++-")
    assert str(w.rotate(1)) == "+-+"
    assert str(w + W("-")) == "++--"
    assert w.scaled(4).letters == (4, 4, -4)
    assert w.product == -1
    assert str(w**2) == "++-++-"
