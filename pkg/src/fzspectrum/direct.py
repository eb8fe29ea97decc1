"""Finite open-chain Hamiltonians and their eigenvalues.

H has a unit superdiagonal, a zero diagonal and subdiagonal r_1..r_N, so it is
(N+1) x (N+1) and already upper Hessenberg.  Eigenvalues come from our own
shifted QR (``eigenvalues_qr``) or, independently, from the roots of the
characteristic polynomial (``eigenvalues_via_roots``).

On sign conventions: for a zero-diagonal tridiagonal matrix of size n,
det(H + zI) = (-1)**n det(-zI - H) = det(zI - H) because the characteristic
polynomial has parity n.  The recursion Delta_{k+1} = z Delta_k - r_k Delta_{k-1}
therefore gives det(zI - H) directly and its roots are the eigenvalues of H.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import _qr
from .errors import InvalidArgumentError, PartialResultError, SingularGaugeError, SizeCapError
from .poly import CPoly, find_roots
from .words import Paragraph, Word, as_word, build_paragraph

MAX_QR_SIZE = 5000
MAX_CHARPOLY_SIZE = 64
DEFLATION_EPS = 1e-14


# subdiagonal sources --------------------------------------------------------


@dataclass(frozen=True)
class Periodic:
    word: Word

    def __post_init__(self):
        object.__setattr__(self, "word", as_word(self.word))

    def __str__(self):
        return f"periodic:{self.word}"


@dataclass(frozen=True)
class RandomSign:
    """Model A: r_k = +-1 with equal probability."""

    seed: int

    def __str__(self):
        return "random_sign"


@dataclass(frozen=True)
class RandomPhase:
    """Model B: r_k = exp(i theta_k), theta_k uniform on [0, 2 pi)."""

    seed: int

    def __str__(self):
        return "random_phase"


@dataclass(frozen=True)
class ParagraphSource:
    paragraph: Paragraph

    def __post_init__(self):
        p = self.paragraph
        if isinstance(p, str):
            p = Paragraph.parse(p)
        object.__setattr__(self, "paragraph", p)

    def __str__(self):
        return f"paragraph:{self.paragraph}"


@dataclass(frozen=True)
class Explicit:
    letters: tuple

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(self.letters))

    def __str__(self):
        return "explicit"


@dataclass(frozen=True)
class HamiltonianSpec:
    n: int
    source: object

    def __post_init__(self):
        if self.n < 1:
            raise InvalidArgumentError(f"N must be >= 1, got {self.n}")
        if isinstance(self.source, Explicit) and len(self.source.letters) != self.n:
            raise InvalidArgumentError(
                f"explicit source has {len(self.source.letters)} letters, expected N={self.n}"
            )

    @property
    def size(self) -> int:
        return self.n + 1

    @property
    def seed(self):
        return getattr(self.source, "seed", None)


def rng_for(seed: int) -> np.random.Generator:
    """Counter-based (Philox) generator keyed by a 64-bit seed."""
    return np.random.Generator(np.random.Philox(key=int(seed) & 0xFFFFFFFFFFFFFFFF))


def _tile(letters, n):
    reps = -(-n // len(letters))
    return (tuple(letters) * reps)[:n]


def build_subdiagonal(spec: HamiltonianSpec) -> np.ndarray:
    """The N subdiagonal letters r_1..r_N as float64 (real sources) or complex128."""
    src, n = spec.source, spec.n
    if isinstance(src, Periodic):
        return Word(_tile(src.word.letters, n)).to_numpy()
    if isinstance(src, RandomSign):
        bits = rng_for(src.seed).integers(0, 2, size=n, dtype=np.int64)
        return (1 - 2 * bits).astype(np.float64)
    if isinstance(src, RandomPhase):
        theta = 2 * np.pi * rng_for(src.seed).random(n)
        return np.exp(1j * theta)
    if isinstance(src, ParagraphSource):
        return Word(_tile(build_paragraph(src.paragraph), n)).to_numpy()
    if isinstance(src, Explicit):
        r = np.asarray(src.letters)
        return r.astype(np.float64) if np.isrealobj(r) else r.astype(np.complex128)
    raise InvalidArgumentError(f"unknown source {src!r}")


def tridiagonal(r, superdiag=None) -> np.ndarray:
    """Dense matrix with zero diagonal, subdiagonal ``r`` and superdiagonal ``superdiag`` (default 1)."""
    r = np.asarray(r)
    n = len(r) + 1
    sup = np.ones(n - 1) if superdiag is None else np.asarray(superdiag)
    dtype = np.result_type(r.dtype, sup.dtype, np.float64)
    h = np.zeros((n, n), dtype=dtype)
    idx = np.arange(n - 1)
    h[idx, idx + 1] = sup
    h[idx + 1, idx] = r
    return h


def hamiltonian_matrix(spec: HamiltonianSpec) -> np.ndarray:
    return tridiagonal(build_subdiagonal(spec))


# eigenvalues ----------------------------------------------------------------


@dataclass
class EigenResult:
    eigenvalues: np.ndarray
    spec: HamiltonianSpec | None = None
    iterations: int = 0
    deflations: int = 0
    method: str = ""
    extra: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.eigenvalues)


def hessenberg_eigvals(h: np.ndarray, method: str = "auto", max_its: int = 100):
    """Eigenvalues of an upper Hessenberg matrix by shifted QR.

    Returns ``(eigenvalues, iterations, deflations)``.  Raises
    PartialResultError, carrying the eigenvalues already deflated, if a block
    exceeds ``max_its`` iterations.
    """
    n = h.shape[0]
    if method == "auto":
        method = "real" if np.isrealobj(h) else "complex"
    if method == "real":
        if not np.isrealobj(h):
            raise InvalidArgumentError("real double-shift QR needs a real matrix")
        wr, wi, its, defl, status = _qr.hqr_real(np.array(h, dtype=np.float64), DEFLATION_EPS, max_its)
        ev = wr + 1j * wi
    elif method == "complex":
        ev, its, defl, status = _qr.hqr_complex(np.array(h, dtype=np.complex128), DEFLATION_EPS, max_its)
    else:
        raise InvalidArgumentError(f"unknown QR method {method!r}")
    if status >= 0:
        raise PartialResultError(
            f"QR iteration did not converge on the block ending at row {status} of {n}",
            best=ev[status + 1:],
        )
    return ev, int(its), int(defl)


def dense_eigvals(a: np.ndarray) -> np.ndarray:
    """All eigenvalues of a general complex square matrix (Householder + complex QR)."""
    a = np.array(a, dtype=np.complex128)
    if a.shape[0] == 1:
        return a[0].copy()
    h = _qr.hessenberg_reduce(a)
    ev, _, _ = hessenberg_eigvals(h, method="complex")
    return ev


def eigenvalues_qr(spec: HamiltonianSpec, method: str = "auto") -> EigenResult:
    """All N+1 eigenvalues of H by shifted Hessenberg QR.

    ``method`` is ``"real"`` (Francis double shift, needs a real subdiagonal),
    ``"complex"``, ``"auto"`` (real when possible) or ``"lapack"`` (numpy's
    eigvals; a fast path for large ensembles, not used by the checks).
    """
    if spec.size > MAX_QR_SIZE:
        raise SizeCapError(f"matrix size {spec.size} exceeds {MAX_QR_SIZE}")
    h = hamiltonian_matrix(spec)
    if method == "lapack":
        return EigenResult(np.linalg.eigvals(h).astype(np.complex128), spec, method="lapack")
    if method == "auto":
        method = "real" if np.isrealobj(h) else "complex"
    ev, its, defl = hessenberg_eigvals(h, method=method)
    return EigenResult(ev, spec, iterations=its, deflations=defl, method=f"qr-{method}")


def char_poly(spec: HamiltonianSpec) -> CPoly:
    """det(zI - H) via Delta_{k+1} = z Delta_k - r_k Delta_{k-1}; exact for integer letters."""
    if spec.size > MAX_CHARPOLY_SIZE:
        raise SizeCapError(f"characteristic polynomial limited to size {MAX_CHARPOLY_SIZE}, got {spec.size}")
    # integral letters come back as exact ints here
    letters = Word(tuple(build_subdiagonal(spec).tolist())).letters
    return delta_recursion(letters)


def delta_recursion(letters) -> CPoly:
    prev, cur = CPoly([1]), CPoly([0, 1])
    for r in letters:
        prev, cur = cur, cur.mulx() - prev * r
    return cur


def eigenvalues_via_roots(spec: HamiltonianSpec, tol: float = 1e-12) -> EigenResult:
    """Eigenvalues as roots of the characteristic polynomial (independent of the QR path)."""
    rs = find_roots(char_poly(spec), tol=tol)
    return EigenResult(rs.roots, spec, iterations=rs.sweeps, method="charpoly-roots",
                       extra={"residuals": rs.residuals})


def general_matrix(s_seq, r_seq) -> np.ndarray:
    """Matrix of s_{k+1} psi_{k+1} + r_{k-1} psi_{k-1} = E psi_k on an open chain.

    ``s_seq[k]`` couples site k to k+1 from above, ``r_seq[k]`` from below.
    """
    s_seq, r_seq = np.asarray(s_seq), np.asarray(r_seq)
    if len(s_seq) != len(r_seq):
        raise InvalidArgumentError("s and r sequences must have equal length")
    return tridiagonal(r_seq, superdiag=s_seq)


def gauge_reduce(s_seq, r_seq) -> np.ndarray:
    """Effective subdiagonal r'_k = r_k s_{k+1} of the unit-superdiagonal form.

    The diagonal similarity psi_k -> lambda_k psi_k with
    lambda_{k+1} = lambda_k / s_{k+1} leaves the spectrum unchanged.
    """
    s_seq = np.asarray(s_seq)
    r_seq = np.asarray(r_seq)
    if len(s_seq) != len(r_seq):
        raise InvalidArgumentError("s and r sequences must have equal length")
    if np.any(s_seq == 0):
        k = int(np.flatnonzero(s_seq == 0)[0])
        raise SingularGaugeError(f"s_{k} = 0 makes the gauge transformation singular")
    return r_seq * s_seq


# set comparisons --------------------------------------------------------------


def matched_distance(a, b) -> float:
    """Largest pairwise distance under the optimal one-to-one matching of two equal-size sets."""
    a, b = np.asarray(a), np.asarray(b)
    if len(a) != len(b):
        raise InvalidArgumentError("matched_distance needs equal-size sets")
    cost = np.abs(a[:, None] - b[None, :])
    i, j = linear_sum_assignment(cost)
    return float(cost[i, j].max()) if len(a) else 0.0


def hausdorff(a, b) -> float:
    a, b = np.asarray(a), np.asarray(b)
    d = np.abs(a[:, None] - b[None, :])
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))
