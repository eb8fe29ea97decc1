"""Dense complex polynomials and a simultaneous (Aberth-Ehrlich) root finder.

Coefficients are stored in ascending order.  When every coefficient is a
Gaussian integer the arithmetic is exact (Python ints under the hood), which
is what the word polynomials of binary words need for identity checks.
Anything involving a float drops to complex floating point.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from numbers import Integral

import numpy as np

from .errors import ConvergenceError, InvalidArgumentError

_EPS = np.finfo(float).eps


@dataclass(frozen=True, slots=True)
class GaussInt:
    """Exact Gaussian integer ``re + im*i``; only built for ``im != 0``."""

    re: int
    im: int

    def __complex__(self):
        return complex(self.re, self.im)

    def __neg__(self):
        return GaussInt(-self.re, -self.im)

    def _binop(self, other, op):
        parts = _exact_parts(other)
        if parts is None:
            return op(complex(self), other)
        return _make_exact(*op_parts(op, (self.re, self.im), parts))

    def __add__(self, other):
        return self._binop(other, _ADD)

    def __radd__(self, other):
        return self._binop(other, _ADD)

    def __sub__(self, other):
        return self._binop(other, _SUB)

    def __rsub__(self, other):
        return (-self)._binop(other, _ADD)

    def __mul__(self, other):
        return self._binop(other, _MUL)

    def __rmul__(self, other):
        return self._binop(other, _MUL)

    def __eq__(self, other):
        parts = _exact_parts(other)
        if parts is None:
            return complex(self) == other
        return (self.re, self.im) == parts

    def __hash__(self):
        return hash(complex(self))

    def __repr__(self):
        return f"({self.re}{self.im:+d}j)"


def _ADD(a, b):
    return a + b


def _SUB(a, b):
    return a - b


def _MUL(a, b):
    return a * b


def op_parts(op, a, b):
    (ar, ai), (br, bi) = a, b
    if op is _MUL:
        return ar * br - ai * bi, ar * bi + ai * br
    return op(ar, br), op(ai, bi)


def _exact_parts(x):
    if isinstance(x, GaussInt):
        return x.re, x.im
    if isinstance(x, Integral) and not isinstance(x, bool):
        return int(x), 0
    return None


def _make_exact(re_, im_):
    return int(re_) if im_ == 0 else GaussInt(int(re_), int(im_))


def exact_scalar(x):
    """Return ``x`` as an exact int/GaussInt when it is integral, else as complex."""
    parts = _exact_parts(x)
    if parts is not None:
        return _make_exact(*parts)
    z = complex(x)
    if (
        z.real.is_integer()
        and z.imag.is_integer()
        and abs(z.real) < 2**53
        and abs(z.imag) < 2**53
    ):
        return _make_exact(int(z.real), int(z.imag))
    return z


def _norm(c):
    if isinstance(c, GaussInt):
        return c if c.im != 0 else c.re
    if isinstance(c, Integral) and not isinstance(c, bool):
        return int(c)
    return complex(c)


def is_exact_scalar(c) -> bool:
    return isinstance(c, (int, GaussInt))


class CPoly:
    """Polynomial with complex coefficients, ascending order.

    >>> (CPoly([-1, 0, 1]) * CPoly([1, 0, 1])).coeffs
    (-1, 0, 0, 0, 1)
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=(0,)):
        cs = [_norm(c) for c in coeffs]
        while len(cs) > 1 and cs[-1] == 0:
            cs.pop()
        if not cs:
            cs = [0]
        self.coeffs = tuple(cs)

    @classmethod
    def monomial(cls, k: int, c=1) -> CPoly:
        return cls([0] * k + [c])

    @classmethod
    def from_roots(cls, roots, leading=1) -> CPoly:
        p = cls([leading])
        for r in roots:
            p = p * cls([-r, 1])
        return p

    @property
    def degree(self) -> int:
        """Index of the last nonzero coefficient; -1 for the zero polynomial."""
        if len(self.coeffs) == 1 and self.coeffs[0] == 0:
            return -1
        return len(self.coeffs) - 1

    @property
    def leading(self):
        return self.coeffs[-1]

    @property
    def is_exact(self) -> bool:
        return all(is_exact_scalar(c) for c in self.coeffs)

    def is_zero(self) -> bool:
        return self.degree < 0

    def to_numpy(self) -> np.ndarray:
        return np.array([complex(c) for c in self.coeffs], dtype=np.complex128)

    # arithmetic ---------------------------------------------------------

    @staticmethod
    def _coerce(other):
        if isinstance(other, CPoly):
            return other
        return CPoly([other])

    def __add__(self, other):
        other = self._coerce(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        return CPoly([x + y for x, y in zip(a, b)] + list(a[len(b):]))

    __radd__ = __add__

    def __neg__(self):
        return CPoly([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, CPoly):
            return CPoly([other * c for c in self.coeffs])
        a, b = self.coeffs, other.coeffs
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x == 0:
                continue
            for j, y in enumerate(b):
                out[i + j] = out[i + j] + x * y
        return CPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = CPoly([1])
        for _ in range(n):
            out = out * self
        return out

    def mulx(self, k: int = 1) -> CPoly:
        """Multiply by z**k."""
        if self.is_zero():
            return self
        return CPoly([0] * k + list(self.coeffs))

    def derivative(self) -> CPoly:
        return CPoly([k * c for k, c in enumerate(self.coeffs)][1:] or [0])

    def compose_z2(self) -> CPoly:
        """p(z**2)."""
        out = [0] * (2 * len(self.coeffs) - 1)
        out[::2] = self.coeffs
        return CPoly(out)

    def even_part_only(self) -> bool:
        return all(c == 0 for c in self.coeffs[1::2])

    def __call__(self, z):
        """Horner evaluation; exact if both the polynomial and ``z`` are exact."""
        if isinstance(z, np.ndarray):
            z = z.astype(np.complex128)
            acc = np.zeros_like(z)
            for c in reversed(self.coeffs):
                acc = acc * z + complex(c)
            return acc
        if self.is_exact and _exact_parts(z) is not None:
            acc = 0
            for c in reversed(self.coeffs):
                acc = acc * z + c
            return acc
        z = complex(z)
        acc = 0j
        for c in reversed(self.coeffs):
            acc = acc * z + complex(c)
        return acc

    # comparison / display ----------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, CPoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(tuple(complex(c) for c in self.coeffs))

    def allclose(self, other: CPoly, rtol=1e-12, atol=1e-12) -> bool:
        a, b = self.to_numpy(), other.to_numpy()
        n = max(len(a), len(b))
        a = np.pad(a, (0, n - len(a)))
        b = np.pad(b, (0, n - len(b)))
        return bool(np.allclose(a, b, rtol=rtol, atol=atol))

    def __repr__(self):
        terms = []
        for k, c in enumerate(self.coeffs):
            if c == 0 and self.degree >= 0:
                continue
            terms.append(f"{c!r}*z^{k}" if k else f"{c!r}")
        return "CPoly(" + (" + ".join(terms) or "0") + ")"

    def to_text(self) -> str:
        """Space-separated ``re+imi`` pairs, lowest degree first."""
        return " ".join(_fmt_complex(complex(c)) for c in self.coeffs)

    @classmethod
    def from_text(cls, text: str) -> CPoly:
        out = []
        for tok in text.split():
            m = _COMPLEX_TOKEN.fullmatch(tok)
            if m is None:
                raise InvalidArgumentError(f"bad coefficient token {tok!r}")
            re_, im_ = float(m.group(1)), float(m.group(2))
            out.append(exact_scalar(complex(re_, im_)))
        return cls(out)

    def roots(self, tol: float = 1e-12) -> RootSet:
        return find_roots(self, tol)


_NUM = r"[+-]?(?:\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?|inf|nan)"
_COMPLEX_TOKEN = re.compile(rf"({_NUM})({_NUM})i")


def _fmt_real(x: float) -> str:
    if x.is_integer() and abs(x) < 2**53:
        return str(int(x))
    return repr(x)


def _fmt_complex(z: complex) -> str:
    im = _fmt_real(z.imag)
    if not im.startswith("-"):
        im = "+" + im
    return f"{_fmt_real(z.real)}{im}i"


# root finding -------------------------------------------------------------


@dataclass(frozen=True)
class RootSet:
    roots: np.ndarray
    residuals: np.ndarray
    tol: float
    sweeps: int

    def __len__(self):
        return len(self.roots)

    def __iter__(self):
        return iter(self.roots)


def _horner_rows(coeffs: np.ndarray, z: np.ndarray):
    """Evaluate p and p' row-wise; coeffs has shape (m, n+1), ascending."""
    n = coeffs.shape[1] - 1
    p = np.repeat(coeffs[:, n:n + 1], z.shape[1], axis=1)
    dp = np.zeros_like(p)
    bound = np.abs(p)
    az = np.abs(z)
    for k in range(n - 1, -1, -1):
        dp = dp * z + p
        p = p * z + coeffs[:, k:k + 1]
        bound = bound * az + np.abs(coeffs[:, k:k + 1])
    return p, dp, bound


def _initial_guesses(coeffs: np.ndarray) -> np.ndarray:
    m, n1 = coeffs.shape
    n = n1 - 1
    lead = np.abs(coeffs[:, -1:])
    k = np.arange(n)
    # largest |a_k / a_n|^(1/(n-k)); the Fujiwara bound is twice this
    radius = np.max((np.abs(coeffs[:, :n]) / lead) ** (1.0 / (n - k)), axis=1)
    radius = np.where(radius > 0, radius, 1.0)
    angles = 2 * np.pi * k / n + 0.4
    return radius[:, None] * np.exp(1j * angles)[None, :]


def aberth_batch(coeffs, tol=1e-12, max_sweeps=200, init=None):
    """Roots of many polynomials of equal degree at once.

    ``coeffs`` has shape (m, n+1), ascending, with nonzero leading entries.
    Returns ``(roots, converged, sweeps)``; rows that did not converge keep
    their best iterates and are flagged False in ``converged``.
    """
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    m, n1 = coeffs.shape
    n = n1 - 1
    if n < 1:
        return np.empty((m, 0), complex), np.ones(m, bool), 0
    coeffs = coeffs / coeffs[:, -1:]
    if n == 1:
        return -coeffs[:, :1].copy(), np.ones(m, bool), 0
    z = _initial_guesses(coeffs) if init is None else np.array(init, dtype=np.complex128)
    done = np.zeros((m, n), dtype=bool)
    sweeps = 0
    eye = np.eye(n, dtype=bool)
    while sweeps < max_sweeps and not done.all():
        sweeps += 1
        p, dp, bound = _horner_rows(coeffs, z)
        diff = z[:, :, None] - z[:, None, :]
        diff[:, eye] = 1.0
        inv = 1.0 / diff
        inv[:, eye] = 0.0
        s = inv.sum(axis=2)
        with np.errstate(divide="ignore", invalid="ignore"):
            w = p / (dp - p * s)
        w = np.where(p == 0, 0.0, w)
        w = np.where(np.isfinite(w), w, 0.0)
        # rounding floor: |p(z)| cannot be resolved below ~eps * sum|a_k||z|^k
        at_floor = np.abs(p) <= 4 * n * _EPS * bound
        small_step = np.abs(w) <= tol * np.maximum(1.0, np.abs(z))
        w = np.where(done, 0.0, w)
        z = z - w
        done |= small_step | at_floor
    converged = done.all(axis=1)
    return z, converged, sweeps


def find_roots(p: CPoly, tol: float = 1e-12, max_sweeps: int = 200) -> RootSet:
    """All roots of ``p`` by Aberth-Ehrlich iteration.

    Exact zero low-order coefficients are split off first and reported as
    roots at exactly 0.  Raises ConvergenceError (carrying the best iterates)
    if the sweep limit is reached.
    """
    if p.degree < 1:
        raise InvalidArgumentError("find_roots needs degree >= 1")
    c = p.to_numpy()[: p.degree + 1]
    nzero = 0
    while c[nzero] == 0:
        nzero += 1
    reduced = c[nzero:]
    if len(reduced) > 1:
        z, ok, sweeps = aberth_batch(reduced[None, :], tol=tol, max_sweeps=max_sweeps)
        z = z[0]
        if not ok[0]:
            raise ConvergenceError(
                f"Aberth iteration did not converge in {max_sweeps} sweeps",
                best=np.concatenate([np.zeros(nzero, complex), z]),
            )
    else:
        z, sweeps = np.empty(0, complex), 0
    roots = np.concatenate([np.zeros(nzero, complex), z])
    residuals = np.abs(p(roots))
    return RootSet(roots=roots, residuals=residuals, tol=tol, sweeps=sweeps)


def cauchy_radius(p: CPoly) -> float:
    """1 + max |a_k / a_n|: every root lies in the disk of this radius."""
    c = np.abs(p.to_numpy())
    return 1.0 + float(np.max(c[:-1] / c[-1])) if len(c) > 1 else 0.0


def poly_from_numpy(a) -> CPoly:
    return CPoly(list(np.asarray(a, dtype=np.complex128)))
