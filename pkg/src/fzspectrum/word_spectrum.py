"""Spectra of periodic words from their transfer matrices.

For a word w_1..w_L the ordered product W = U_L ... U_1 of
U_j = [[z, -w_j], [1, 0]] has entries [[alpha_L, beta_L], [alpha_{L-1}, beta_{L-1}]],
all polynomials in z.  Its Moebius map b -> (alpha b + beta)/(gamma b + delta)
has fixed points b = (P +- sqrt(Q)) / 2R with

    P = alpha_L - beta_{L-1},  Q = P**2 + 4 alpha_{L-1} beta_L,  R = alpha_{L-1},

and Q = (tr W)**2 - 4 det W.  The infinite periodic chain has spectrum
tr W(z) = 2 sqrt(det W) cos(theta), theta in [0, 2 pi).
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.spatial import cKDTree

from .direct import dense_eigvals
from .errors import DegenerateMapError, InvalidArgumentError, UnsupportedLengthError
from .poly import CPoly, aberth_batch, find_roots
from .words import CyclicInvariants, Word, as_word, cyclic_invariants

MARGINAL_TOL = 1e-9
DEFAULT_THETA_STEPS = 2048


@dataclass(frozen=True)
class TransferWord:
    alpha_l: CPoly
    beta_l: CPoly
    alpha_lm1: CPoly
    beta_lm1: CPoly
    det: object

    @property
    def trace(self) -> CPoly:
        return self.alpha_l + self.beta_lm1


def transfer_polynomials(w) -> TransferWord:
    """Run the alpha/beta recursions to j = L."""
    w = as_word(w)
    a_prev, a = CPoly([1]), CPoly([0, 1])
    b_prev, b = CPoly([0]), CPoly([-w[0]])
    for letter in w.letters[1:]:
        a_prev, a = a, a.mulx() - a_prev * letter
        b_prev, b = b, b.mulx() - b_prev * letter
    return TransferWord(a, b, a_prev, b_prev, w.product)


@dataclass(frozen=True)
class PQR:
    P: CPoly
    Q: CPoly
    R: CPoly


def pqr(w) -> PQR:
    tw = transfer_polynomials(w)
    P = tw.alpha_l - tw.beta_lm1
    Q = P * P + tw.alpha_lm1 * tw.beta_l * 4
    return PQR(P, Q, tw.alpha_lm1)


def q_closed_form(length: int, inv: CyclicInvariants) -> CPoly:
    """Q_L from the tabulated cyclic-invariant formulas, 2 <= L <= 7."""
    s, p, k, rho = inv.s, inv.p, inv.kappa, inv.rho
    if inv.length != length:
        raise InvalidArgumentError(f"invariants are for length {inv.length}, not {length}")
    # coefficients of powers of u = z**2, ascending
    if length == 2:
        u = [inv.d**2, -2 * s, 1]
    elif length == 3:
        u = [-4 * p, s * s, -2 * s, 1]
    elif length == 4:
        u = [inv.omega**2, -2 * s * k, s * s + 2 * k, -2 * s, 1]
    elif length == 5:
        u = [-4 * p, k * k, -2 * s * k, s * s + 2 * k, -2 * s, 1]
    elif length == 6:
        u = [inv.delta**2, -2 * k * rho, k * k + 2 * s * rho, -2 * (s * k + rho), s * s + 2 * k, -2 * s, 1]
    elif length == 7:
        u = [-4 * p, rho * rho, -2 * k * rho, k * k + 2 * s * rho, -2 * (s * k + rho), s * s + 2 * k, -2 * s, 1]
    else:
        raise UnsupportedLengthError(f"closed forms exist for L = 2..7, got {length}")
    return CPoly(u).compose_z2()


def four_letter_curve(z, inv: CyclicInvariants):
    """x y (y^2 - x^2 + s/2)(x^4 + y^4 - 6 x^2 y^2 + s (y^2 - x^2) + kappa): zero on the curves of a 4-letter word."""
    x, y = np.real(z), np.imag(z)
    s, k = complex(inv.s).real, complex(inv.kappa).real
    return x * y * (y * y - x * x + s / 2) * (x**4 + y**4 - 6 * x * x * y * y + s * (y * y - x * x) + k)


# numeric transfer matrix and fixed points -----------------------------------


def transfer_entries(w, z):
    """(alpha_L, beta_L, alpha_{L-1}, beta_{L-1}) evaluated at z (scalar or array)."""
    w = as_word(w)
    z = np.asarray(z, dtype=np.complex128) if np.ndim(z) else complex(z)
    a_prev, a = 1.0 + 0j, z
    b_prev, b = 0j, -complex(w[0])
    for letter in w.letters[1:]:
        c = complex(letter)
        a_prev, a = a, z * a - c * a_prev
        b_prev, b = b, z * b - c * b_prev
    return a, b, a_prev, b_prev


def transfer_matrix(w, z) -> np.ndarray:
    a, b, g, d = transfer_entries(w, z)
    return np.array([[a, b], [g, d]], dtype=np.complex128)


@dataclass(frozen=True)
class FixedPointPair:
    b_plus: complex
    b_minus: complex
    derivative_plus: complex
    derivative_minus: complex
    stable_index: int | None
    marginal: bool

    @property
    def stable(self):
        """The stable fixed point, or None when z sits on a spectral curve."""
        if self.stable_index is None:
            return None
        return (self.b_plus, self.b_minus)[self.stable_index]


def _moebius_fixed_points(a, b, g, d, det, z=None, marginal_tol=MARGINAL_TOL) -> FixedPointPair:
    if g == 0:
        raise DegenerateMapError("R(z) = 0: the word's map is affine, one fixed point is at infinity", z=z)
    P = a - d
    sq = cmath.sqrt(P * P + 4 * g * b)
    hi, lo = P + sq, P - sq
    # take the root without cancellation, recover the other from b+ b- = -beta/gamma
    if abs(hi) >= abs(lo):
        b_plus = hi / (2 * g)
        b_minus = -2 * b / hi if hi != 0 else 0j
    else:
        b_minus = lo / (2 * g)
        b_plus = -2 * b / lo
    # gamma b +- delta = (tr +- sqrt Q)/2 and their product is det: same trick
    tr = a + d
    if abs(tr + sq) >= abs(tr - sq):
        den_plus = (tr + sq) / 2
        den_minus = det / den_plus if den_plus != 0 else 0j
    else:
        den_minus = (tr - sq) / 2
        den_plus = det / den_minus
    f_plus = det / den_plus**2 if den_plus != 0 else complex(np.inf)
    f_minus = det / den_minus**2 if den_minus != 0 else complex(np.inf)
    m_plus, m_minus = abs(f_plus), abs(f_minus)
    marginal = abs(1 - m_plus) < marginal_tol or abs(1 - m_minus) < marginal_tol
    stable = None
    if not marginal:
        if m_plus < 1:
            stable = 0
        elif m_minus < 1:
            stable = 1
    return FixedPointPair(b_plus, b_minus, f_plus, f_minus, stable, marginal)


def fixed_points(w, z, marginal_tol: float = MARGINAL_TOL) -> FixedPointPair:
    """Both fixed points b = (P +- sqrt Q)/2R at z, their multipliers and the stable branch.

    The multiplier at b is det W / (gamma b + delta)**2.  |f'| within
    ``marginal_tol`` of 1 counts as not stable and sets ``marginal``.
    """
    w = as_word(w)
    a, b, g, d = transfer_entries(w, z)
    return _moebius_fixed_points(a, b, g, d, complex(w.product), z=z, marginal_tol=marginal_tol)


def continued_fraction_f(w, b, z) -> complex:
    """f_L(b; z, w) with f_1 = z - w_1/b, f_{j+1} = z - w_{j+1}/f_j, evaluated projectively."""
    w = as_word(w)
    z = complex(z)
    b = complex(b)
    num, den = (1.0 + 0j, 0j) if cmath.isinf(b) else (b, 1.0 + 0j)
    for letter in w.letters:
        num, den = z * num - complex(letter) * den, num
        scale = max(abs(num), abs(den))
        num, den = num / scale, den / scale
    if den == 0:
        return complex(np.inf, 0)
    return num / den


def moebius(W: np.ndarray, b: complex) -> complex:
    return (W[0, 0] * b + W[0, 1]) / (W[1, 0] * b + W[1, 1])


# isolated points --------------------------------------------------------------


@dataclass(frozen=True)
class IsolatedPoints:
    points: np.ndarray
    marginal: np.ndarray
    poles: np.ndarray


def _roots_or_empty(p: CPoly) -> np.ndarray:
    if p.degree < 1:
        return np.empty(0, complex)
    return find_roots(p).roots


def isolated_points(w, marginal_tol: float = MARGINAL_TOL) -> IsolatedPoints:
    """Roots of beta_L where the vanishing fixed point b = 0 is the stable one, plus the poles (roots of R).

    At a root of beta_L the multiplier of b = 0 is det W / beta_{L-1}**2;
    roots where it has modulus 1 (within ``marginal_tol``) are reported in
    ``marginal`` instead.
    """
    w = as_word(w)
    tw = transfer_polynomials(w)
    det = complex(tw.det)
    stable, marginal = [], []
    for z0 in _roots_or_empty(tw.beta_l):
        d0 = tw.beta_lm1(complex(z0))
        mult = abs(det) / abs(d0) ** 2 if d0 != 0 else np.inf
        if abs(1 - mult) < marginal_tol:
            marginal.append(z0)
        elif mult < 1:
            stable.append(z0)
    return IsolatedPoints(
        np.array(stable, complex), np.array(marginal, complex), _roots_or_empty(tw.alpha_lm1)
    )


# Bloch curves -------------------------------------------------------------------


@dataclass
class WordSpectrum:
    """Traced curves of one periodic word.

    ``curves[k, i]`` is branch k at ``thetas[i]``; NaN marks a gap where the
    root finder failed.
    """

    word: Word
    thetas: np.ndarray
    curves: np.ndarray
    endpoints: np.ndarray
    isolated: IsolatedPoints
    sqrt_det: complex
    Q: CPoly
    gaps: tuple = ()
    label: str = ""

    def __post_init__(self):
        if not self.label:
            self.label = str(self.word)

    def points(self, include_endpoints: bool = False) -> np.ndarray:
        pts = self.curves.ravel()
        pts = pts[np.isfinite(pts)]
        if include_endpoints:
            pts = np.concatenate([pts, self.endpoints])
        return pts

    def segments(self):
        """Start and end points of every polyline segment, the theta wrap included."""
        c = np.concatenate([self.curves, self.curves[:, :1]], axis=1)
        a, b = c[:, :-1].ravel(), c[:, 1:].ravel()
        keep = np.isfinite(a) & np.isfinite(b)
        return a[keep], b[keep]

    def discrete_points(self) -> np.ndarray:
        return np.concatenate([self.endpoints, self.isolated.points])

    def metadata(self) -> dict:
        return {
            "word": str(self.word),
            "L": len(self.word),
            "det": _json_complex(complex(self.word.product)),
            "Q": [_json_complex(complex(c)) for c in self.Q.coeffs],
            "endpoints": [_json_complex(z) for z in self.endpoints],
            "poles": [_json_complex(z) for z in self.isolated.poles],
            "isolated_points": [_json_complex(z) for z in self.isolated.points],
            "marginal_points": [_json_complex(z) for z in self.isolated.marginal],
            "theta_steps": len(self.thetas),
            "gaps": list(self.gaps),
        }


def _json_complex(z: complex):
    return [float(z.real), float(z.imag)]


def _continue_branches(roots: np.ndarray, ok: np.ndarray) -> np.ndarray:
    """Reorder roots so each row follows one branch across consecutive theta (min-cost matching)."""
    steps, L = roots.shape
    out = np.full((steps, L), np.nan + 0j)
    prev = None
    for i in range(steps):
        if not ok[i]:
            continue
        cur = roots[i]
        if prev is not None and L > 1:
            cost = np.abs(prev[:, None] - cur[None, :])
            _, perm = linear_sum_assignment(cost)
            cur = cur[perm]
        out[i] = cur
        prev = cur
    return out


def bloch_curve(w, theta_steps: int = DEFAULT_THETA_STEPS, tol: float = 1e-13) -> WordSpectrum:
    """Trace tr W(z) = 2 sqrt(det W) cos(theta) over a uniform theta grid on [0, 2 pi).

    sqrt(det W) is the principal root (i for det = -1).  Each theta gives a
    degree-L polynomial whose roots are continued into L branches.
    """
    w = as_word(w)
    if theta_steps < 8:
        raise InvalidArgumentError("theta_steps must be >= 8")
    tw = transfer_polynomials(w)
    trace = tw.trace.to_numpy()
    sqrt_det = cmath.sqrt(complex(tw.det))
    thetas = 2 * np.pi * np.arange(theta_steps) / theta_steps
    coeffs = np.tile(trace, (theta_steps, 1))
    coeffs[:, 0] -= 2 * sqrt_det * np.cos(thetas)
    roots, ok, _ = aberth_batch(coeffs, tol=tol)
    curves = _continue_branches(roots, ok).T
    Q = tw.trace * tw.trace - tw.det * 4
    gaps = tuple(int(i) for i in np.flatnonzero(~ok))
    return WordSpectrum(w, thetas, curves, _roots_or_empty(Q), isolated_points(w), sqrt_det, Q, gaps)


@dataclass
class SpectrumUnion:
    """Superposition of several word spectra; each member keeps its own metadata."""

    members: list = field(default_factory=list)

    @property
    def label(self) -> str:
        return "|".join(m.label for m in self.members)

    def points(self, include_endpoints: bool = False, tol: float = 1e-9) -> np.ndarray:
        pts = np.concatenate([m.points(include_endpoints) for m in self.members])
        return unique_points(pts, tol)

    def segments(self):
        parts = [m.segments() for m in self.members]
        return np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])

    def discrete_points(self) -> np.ndarray:
        return np.concatenate([m.discrete_points() for m in self.members])

    @property
    def endpoints(self) -> np.ndarray:
        return np.concatenate([m.endpoints for m in self.members])

    def metadata(self) -> list:
        return [m.metadata() for m in self.members]


def support_union(spectra) -> SpectrumUnion:
    members = []
    for s in spectra:
        members.extend(s.members if isinstance(s, SpectrumUnion) else [s])
    if not members:
        raise InvalidArgumentError("support_union needs at least one spectrum")
    return SpectrumUnion(members)


def unique_points(pts: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Drop points lying within ``tol`` of an earlier kept point."""
    pts = np.asarray(pts)
    if len(pts) == 0:
        return pts
    tree = cKDTree(np.column_stack([pts.real, pts.imag]))
    drop = np.zeros(len(pts), bool)
    for i, j in sorted(tree.query_pairs(tol)):
        if not drop[i]:
            drop[j] = True
    return pts[~drop]


def distance_to_support(points, spectrum, chunk: int = 256) -> np.ndarray:
    """Distance from each point to the nearest curve segment, endpoint or isolated point."""
    points = np.asarray(points, dtype=np.complex128)
    a, b = spectrum.segments()
    extra = spectrum.discrete_points()
    ab = b - a
    L2 = np.abs(ab) ** 2
    safe = np.where(L2 > 0, L2, 1.0)
    out = np.empty(len(points))
    for start in range(0, len(points), chunk):
        p = points[start:start + chunk, None]
        t = np.clip(np.real((p - a) * np.conj(ab)) / safe, 0.0, 1.0)
        t = np.where(L2 > 0, t, 0.0)
        d = np.abs(p - (a + t * ab)).min(axis=1)
        if len(extra):
            d = np.minimum(d, np.abs(p - extra[None, :]).min(axis=1))
        out[start:start + chunk] = d
    return out


def im_q(w, z):
    """Im Q(z); zero on the spectral curves of w."""
    return np.imag(pqr(w).Q(np.asarray(z, dtype=np.complex128)))


# Bloch matrix -------------------------------------------------------------------


def bloch_matrix(w, phi: float) -> np.ndarray:
    """L x L reduction of the periodic chain under psi_{k+L} = e^{i phi} psi_k."""
    w = as_word(w)
    L = len(w)
    r = np.array([complex(x) for x in w.letters])
    h = np.zeros((L, L), dtype=np.complex128)
    idx = np.arange(L - 1)
    h[idx, idx + 1] = 1.0
    h[idx + 1, idx] = r[:-1]
    h[0, L - 1] += r[-1] * np.exp(-1j * phi)
    h[L - 1, 0] += np.exp(1j * phi)
    return h


def bloch_matrix_eigs(w, phi_steps: int = DEFAULT_THETA_STEPS) -> np.ndarray:
    """Eigenvalues of the Bloch matrix over a uniform phi grid on [0, 2 pi)."""
    w = as_word(w)
    if phi_steps < 8:
        raise InvalidArgumentError("phi_steps must be >= 8")
    if len(w) > 16:
        raise InvalidArgumentError("Bloch matrices are limited to L <= 16")
    phis = 2 * np.pi * np.arange(phi_steps) / phi_steps
    return np.concatenate([dense_eigvals(bloch_matrix(w, phi)) for phi in phis])


def word_invariants(w) -> CyclicInvariants:
    return cyclic_invariants(as_word(w))


def off_support(points, spectrum, tol: float) -> np.ndarray:
    """Points farther than ``tol`` from the spectrum (edge or defect states), reported unclassified."""
    points = np.asarray(points, dtype=np.complex128)
    return points[distance_to_support(points, spectrum) > tol]
