"""Words over the hopping alphabet: parsing, enumeration, rotations and cyclic invariants.

A word is a finite sequence of nonzero letters.  Model A uses the binary
alphabet {+1, -1}; letters may be arbitrary nonzero complex scalars so the
scaling rule r -> u**2 r stays expressible.
"""
from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from math import prod

import numpy as np

from .errors import InvalidArgumentError, UnsupportedLengthError
from .poly import exact_scalar

MAX_ENUM_LENGTH = 24
_SIGN_CHARS = {"+": 1, "-": -1, "−": -1}


@dataclass(frozen=True)
class Word:
    letters: tuple

    def __post_init__(self):
        letters = tuple(exact_scalar(x) for x in self.letters)
        if not letters:
            raise InvalidArgumentError("a word needs at least one letter")
        if any(x == 0 for x in letters):
            raise InvalidArgumentError("letters must be nonzero")
        object.__setattr__(self, "letters", letters)

    @classmethod
    def parse(cls, text: str) -> Word:
        """Parse a sign string such as ``"++-"`` (braces and spaces ignored)."""
        body = text.strip().strip("{}").replace(" ", "").replace(",", "")
        if not body:
            raise InvalidArgumentError("empty word")
        letters = []
        for pos, ch in enumerate(body):
            if ch not in _SIGN_CHARS:
                raise InvalidArgumentError(f"bad letter {ch!r} at position {pos} in {text!r}")
            letters.append(_SIGN_CHARS[ch])
        return cls(tuple(letters))

    def __len__(self):
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __getitem__(self, i):
        return self.letters[i]

    @property
    def is_binary(self) -> bool:
        return all(x == 1 or x == -1 for x in self.letters)

    def __str__(self):
        if self.is_binary:
            return "".join("+" if x == 1 else "-" for x in self.letters)
        return "[" + ",".join(repr(x) for x in self.letters) + "]"

    def rotate(self, k: int = 1) -> Word:
        """Cyclic shift w_1..w_L -> w_{k+1}..w_L w_1..w_k."""
        k %= len(self)
        return Word(self.letters[k:] + self.letters[:k])

    def __pow__(self, n: int) -> Word:
        if n < 1:
            raise InvalidArgumentError("word powers need n >= 1")
        return Word(self.letters * n)

    def __add__(self, other: Word) -> Word:
        return Word(self.letters + other.letters)

    def scaled(self, c) -> Word:
        return Word(tuple(c * x for x in self.letters))

    def to_numpy(self) -> np.ndarray:
        if all(isinstance(x, int) for x in self.letters):
            return np.array(self.letters, dtype=np.float64)
        return np.array([complex(x) for x in self.letters], dtype=np.complex128)

    @property
    def product(self):
        return prod(self.letters)


def as_word(w) -> Word:
    if isinstance(w, Word):
        return w
    if isinstance(w, str):
        return Word.parse(w)
    return Word(tuple(w))


@dataclass(frozen=True)
class Paragraph:
    """Concatenation of repeated words: ((w1, n1), (w2, n2), ...)."""

    segments: tuple

    def __post_init__(self):
        segs = tuple((as_word(w), int(n)) for w, n in self.segments)
        if not segs:
            raise InvalidArgumentError("a paragraph needs at least one segment")
        for w, n in segs:
            if n < 1:
                raise InvalidArgumentError(f"repetition count must be >= 1, got {n} for {w}")
        object.__setattr__(self, "segments", segs)

    @classmethod
    def parse(cls, text: str) -> Paragraph:
        """Parse ``"++-:16,+++:1,++-:16"``; a bare word means count 1."""
        segs = []
        for item in text.split(","):
            item = item.strip()
            if not item:
                raise InvalidArgumentError(f"empty segment in {text!r}")
            word, _, count = item.partition(":")
            try:
                n = int(count) if count else 1
            except ValueError:
                raise InvalidArgumentError(f"bad repetition count {count!r} in {item!r}") from None
            segs.append((Word.parse(word), n))
        return cls(tuple(segs))

    @property
    def total_length(self) -> int:
        return sum(len(w) * n for w, n in self.segments)

    def __str__(self):
        return ",".join(f"{w}:{n}" for w, n in self.segments)

    def to_word(self) -> Word:
        return Word(build_paragraph(self))


def build_paragraph(p: Paragraph) -> tuple:
    """Flatten a paragraph into its letter sequence."""
    out = []
    for w, n in p.segments:
        out.extend(w.letters * n)
    return tuple(out)


class WordSequence(Sequence):
    """All 2**L binary words of length L, lexicographic with + before -.

    Built lazily: word i is read off the bits of i.
    """

    def __init__(self, length: int):
        self.length = length

    def __len__(self):
        return 1 << self.length

    def __getitem__(self, i):
        if isinstance(i, slice):
            return [self[j] for j in range(*i.indices(len(self)))]
        n = len(self)
        if i < 0:
            i += n
        if not 0 <= i < n:
            raise IndexError(i)
        L = self.length
        return Word(tuple(-1 if (i >> (L - 1 - k)) & 1 else 1 for k in range(L)))


def enumerate_words(length: int) -> WordSequence:
    if not 1 <= length <= MAX_ENUM_LENGTH:
        raise InvalidArgumentError(f"word length must be in 1..{MAX_ENUM_LENGTH}, got {length}")
    return WordSequence(length)


def _letter_key(x):
    # + sorts before -, then by imaginary part
    z = complex(x)
    return (-z.real, -z.imag)


def least_rotation_index(keys) -> int:
    """Booth's algorithm: start index of the lexicographically least rotation."""
    s = list(keys) * 2
    f = [-1] * len(s)
    k = 0
    for j in range(1, len(s)):
        sj = s[j]
        i = f[j - k - 1]
        while i != -1 and sj != s[k + i + 1]:
            if sj < s[k + i + 1]:
                k = j - i - 1
            i = f[i]
        if sj != s[k + i + 1]:
            if sj < s[k]:
                k = j
            f[j - k] = -1
        else:
            f[j - k] = i + 1
    return k


def canonical_rotation(w: Word) -> Word:
    return w.rotate(least_rotation_index([_letter_key(x) for x in w.letters]))


def is_primitive(w: Word) -> bool:
    """True iff w is not a power of a strictly shorter word."""
    t = w.letters
    L = len(t)
    for d in range(1, L // 2 + 1):
        if L % d == 0 and t[d:] + t[:d] == t:
            return False
    return True


def necklaces(length: int, primitive_only: bool = True, mixed_only: bool = False) -> list:
    """Canonical representatives of the binary necklaces of a given length.

    ``mixed_only`` drops the single-sign words.  With both flags set and
    length 4 this yields exactly {+++-}, {++--}, {+---}.
    """
    seen = {}
    for w in enumerate_words(length):
        c = canonical_rotation(w)
        if c.letters in seen:
            continue
        if primitive_only and not is_primitive(c):
            continue
        if mixed_only and len(set(c.letters)) < 2:
            continue
        seen[c.letters] = c
    return list(seen.values())


@dataclass(frozen=True)
class CyclicInvariants:
    """Rotation invariants entering the closed forms of Q_L for L <= 7.

    ``d``, ``omega`` and ``delta`` change sign under odd rotations; only
    their squares are invariant.  Fields that do not apply to the word's
    length are None.
    """

    length: int
    s: object
    p: object
    d: object = None
    kappa: object = None
    rho: object = None
    delta: object = None
    omega: object = None


def _pairs(w, idx):
    return sum(w[i - 1] * w[j - 1] for i, j in idx)


def _triples(w, idx):
    return sum(w[i - 1] * w[j - 1] * w[k - 1] for i, j, k in idx)


_KAPPA = {
    4: ((1, 3), (2, 4)),
    5: ((1, 3), (1, 4), (2, 4), (2, 5), (3, 5)),
    6: ((1, 3), (1, 4), (2, 4), (1, 5), (2, 5), (3, 5), (2, 6), (3, 6), (4, 6)),
    7: (
        (1, 3), (1, 4), (2, 4), (1, 5), (2, 5), (3, 5), (1, 6),
        (2, 6), (3, 6), (4, 6), (2, 7), (3, 7), (4, 7), (5, 7),
    ),
}
_RHO = {
    6: ((1, 3, 5), (2, 4, 6)),
    7: ((1, 3, 5), (1, 3, 6), (1, 4, 6), (2, 4, 6), (2, 4, 7), (2, 5, 7), (3, 5, 7)),
}

MAX_INVARIANT_LENGTH = 7


def cyclic_invariants(w: Word, strict: bool = False) -> CyclicInvariants:
    """s and p for any length; the length-specific combinations for L <= 7.

    With ``strict=True`` a word longer than 7 raises UnsupportedLengthError
    instead of returning only s and p.
    """
    t = w.letters
    L = len(t)
    if strict and L > MAX_INVARIANT_LENGTH:
        raise UnsupportedLengthError(f"length-specific invariants are tabulated for L <= 7, got {L}")
    out = {"length": L, "s": sum(t), "p": prod(t)}
    if L == 2:
        out["d"] = t[0] - t[1]
    if L in _KAPPA:
        out["kappa"] = _pairs(t, _KAPPA[L])
    if L == 4:
        out["omega"] = t[0] * t[2] - t[1] * t[3]
    if L in _RHO:
        out["rho"] = _triples(t, _RHO[L])
    if L == 6:
        out["delta"] = t[0] * t[2] * t[4] - t[1] * t[3] * t[5]
    return CyclicInvariants(**out)
