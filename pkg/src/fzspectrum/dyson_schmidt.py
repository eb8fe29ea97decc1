"""Monte Carlo iteration of the characteristic ratio y_k = Delta_k / Delta_{k-1}.

y_1 = z and y_{k+1} = z - r_k / y_k.  The state is kept as a projective pair
(a, b) with y = a / b and updated as (a, b) -> (z a - r b, a), rescaled so the
larger component has modulus 1.  A zero ratio therefore maps to infinity and
then back to z without any division.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import product

import numpy as np
from numba import njit
from scipy.spatial import cKDTree

from .errors import InsufficientWordsError, InvalidArgumentError, SizeCapError
from .word_spectrum import fixed_points
from .words import Word, as_word

CHUNK = 1 << 16
MAX_GRID = 1024
MAX_SUPPORT_LENGTH = 10
EXCLUDED_LIMIT = 0.01
MIN_REPORTED_SAMPLES = 10_000
STREAMS = ("random_sign", "random_phase")
_SIGNS = np.array([1.0 + 0j, -1.0 + 0j])


@dataclass(frozen=True)
class DSConfig:
    """Ratio-iteration settings.

    ``letters`` is ``"random_sign"`` (model A), ``"random_phase"`` (model B)
    or a Word repeated periodically starting from its first letter.
    """

    z: complex = 0j
    burn_in: int = 1000
    samples: int = 10_000
    y_max: float = 1e8
    letters: object = "random_sign"
    seed: int = 0
    trajectories: int = 1

    def __post_init__(self):
        if self.burn_in < 0:
            raise InvalidArgumentError("burn_in must be >= 0")
        if self.samples < 1:
            raise InvalidArgumentError("samples must be >= 1")
        if not self.y_max > 10:
            raise InvalidArgumentError("y_max must exceed 10")
        if self.trajectories < 1:
            raise InvalidArgumentError("trajectories must be >= 1")
        if isinstance(self.letters, str) and self.letters not in STREAMS:
            object.__setattr__(self, "letters", as_word(self.letters))
        elif not isinstance(self.letters, str):
            object.__setattr__(self, "letters", as_word(self.letters))
        object.__setattr__(self, "z", complex(self.z))

    def with_z(self, z) -> DSConfig:
        return DSConfig(z, self.burn_in, self.samples, self.y_max, self.letters, self.seed, self.trajectories)

    @property
    def stream_name(self) -> str:
        return self.letters if isinstance(self.letters, str) else f"word:{self.letters}"


def stream_rng(seed: int, *key: int) -> np.random.Generator:
    """Philox stream for (seed, key...); distinct keys give independent streams."""
    ss = np.random.SeedSequence(int(seed) & 0xFFFFFFFFFFFFFFFF, spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


class LetterStream:
    """Yields successive blocks r_k, r_{k+1}, ... as complex arrays."""

    def __init__(self, letters, rng: np.random.Generator | None):
        self.letters = letters
        self.rng = rng
        self.pos = 0
        if isinstance(letters, Word):
            self.cycle = np.array([complex(x) for x in letters.letters])

    def take(self, n: int) -> np.ndarray:
        if self.letters == "random_sign":
            # one raw 64-bit draw supplies 64 signs
            raw = self.rng.bit_generator.random_raw(-(-n // 64))
            bits = np.unpackbits(np.ascontiguousarray(raw).view(np.uint8))[:n]
            out = _SIGNS[bits]
        elif self.letters == "random_phase":
            out = np.exp(2j * np.pi * self.rng.random(n))
        else:
            idx = (self.pos + np.arange(n)) % len(self.cycle)
            out = self.cycle[idx]
        self.pos += n
        return out


@njit(cache=True, nogil=True, inline="always")
def _step(zr, zi, lr, li, ar, ai, br, bi):
    # (a, b) -> (z a - r b, a), rescaled by the largest real component
    nr = zr * ar - zi * ai - (lr * br - li * bi)
    ni = zr * ai + zi * ar - (lr * bi + li * br)
    m = max(abs(nr), abs(ni), abs(ar), abs(ai))
    bad = not (m > 0.0 and m < math.inf)
    if bad:
        nr, ni, ar, ai = zr, zi, 1.0, 0.0
        m = max(abs(zr), abs(zi), 1.0)
    s = 1.0 / m
    return nr * s, ni * s, ar * s, ai * s, bad


@njit(cache=True, nogil=True)
def _ratio_chunk(z, letters, a, b, nums, dens):
    """Record the current state, then step; ``nums``/``dens`` may be empty (no recording)."""
    n = letters.shape[0]
    record = nums.shape[0] > 0
    invalid = 0
    zr, zi = z.real, z.imag
    ar, ai, br, bi = a.real, a.imag, b.real, b.imag
    for k in range(n):
        if record:
            nums[k] = complex(ar, ai)
            dens[k] = complex(br, bi)
        ar, ai, br, bi, bad = _step(zr, zi, letters[k].real, letters[k].imag, ar, ai, br, bi)
        invalid += bad
    return complex(ar, ai), complex(br, bi), invalid


@njit(cache=True, nogil=True)
def _ratio_stats(z, letters, a, b, y_max, acc):
    """Step without recording; acc += [valid, sum log|y|, excluded, excursions, invalid, max log|y|]."""
    n = letters.shape[0]
    zr, zi = z.real, z.imag
    ar, ai, br, bi = a.real, a.imag, b.real, b.imag
    y2 = y_max * y_max
    # |y|**2 is accumulated as a running product, folded into acc[1] before it can overflow
    prod = 1.0
    peak = 0.0
    for k in range(n):
        aa = ar * ar + ai * ai
        bb = br * br + bi * bi
        if aa == 0.0 or bb == 0.0:
            acc[2] += 1.0
            if bb == 0.0:
                acc[3] += 1.0
                peak = math.inf
        else:
            ratio = aa / bb
            acc[0] += 1.0
            prod *= ratio
            if prod > 1e250 or prod < 1e-250:
                acc[1] += 0.5 * math.log(prod)
                prod = 1.0
            if ratio > y2:
                acc[3] += 1.0
            if ratio > peak:
                peak = ratio
        ar, ai, br, bi, bad = _step(zr, zi, letters[k].real, letters[k].imag, ar, ai, br, bi)
        acc[4] += bad
    acc[1] += 0.5 * math.log(prod)
    if peak > 0.0:
        acc[5] = max(acc[5], 0.5 * math.log(peak))
    return complex(ar, ai), complex(br, bi)


def _initial_state(z: complex):
    m = max(abs(z), 1.0)
    return complex(z) / m, 1.0 / m + 0j


def _burn(z, stream: LetterStream, a, b, steps: int):
    empty = np.empty(0, np.complex128)
    invalid = 0
    while steps > 0:
        n = min(steps, CHUNK)
        a, b, inv = _ratio_chunk(z, stream.take(n), a, b, empty, empty)
        invalid += inv
        steps -= n
    return a, b, invalid


def _stream_for(config: DSConfig, *key):
    rng = None if isinstance(config.letters, Word) else stream_rng(config.seed, *key)
    return LetterStream(config.letters, rng)


@dataclass
class RatioTrajectory:
    """Post-burn-in states (num, den); y = num / den, infinite where den = 0."""

    z: complex
    nums: np.ndarray
    dens: np.ndarray
    y_max: float
    invalid: int = 0

    @property
    def values(self) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            y = self.nums / self.dens
        return np.where(self.dens == 0, complex(np.inf, 0), y)

    @property
    def finite(self) -> np.ndarray:
        return (self.nums != 0) & (self.dens != 0)

    @property
    def logs(self) -> np.ndarray:
        """log|y_k|; NaN marks excluded zero or infinite samples."""
        ok = self.finite
        out = np.full(len(self.nums), np.nan)
        out[ok] = np.log(np.abs(self.nums[ok])) - np.log(np.abs(self.dens[ok]))
        return out

    @property
    def excluded(self) -> int:
        return int((~self.finite).sum())

    @property
    def excursions(self) -> int:
        return int((np.abs(self.nums) > self.y_max * np.abs(self.dens)).sum())

    @property
    def last(self) -> complex:
        return complex(self.values[-1])


def iterate_ratio(config: DSConfig, trajectory: int = 0) -> RatioTrajectory:
    """Run burn_in steps, then record ``samples`` successive states."""
    z = config.z
    stream = _stream_for(config, trajectory)
    a, b = _initial_state(z)
    a, b, invalid = _burn(z, stream, a, b, config.burn_in)
    nums = np.empty(config.samples, np.complex128)
    dens = np.empty(config.samples, np.complex128)
    for start in range(0, config.samples, CHUNK):
        n = min(CHUNK, config.samples - start)
        a, b, inv = _ratio_chunk(z, stream.take(n), a, b, nums[start:start + n], dens[start:start + n])
        invalid += inv
    return RatioTrajectory(z, nums, dens, config.y_max, invalid)


@dataclass
class RatioStats:
    """Streaming summary of one trajectory's sample window."""

    steps: int
    valid: int
    excluded: int
    excursions: int
    invalid: int
    max_log: float
    batch_sums: np.ndarray
    batch_counts: np.ndarray

    @property
    def mean_log(self) -> float:
        return float(self.batch_sums.sum() / self.valid) if self.valid else math.nan

    @property
    def escaped(self) -> bool:
        return self.excursions > 0


def ratio_statistics(config: DSConfig, trajectory: int = 0, batches: int = 32) -> RatioStats:
    """Summary statistics without storing the trajectory (suitable for 10**7 steps)."""
    z = config.z
    stream = _stream_for(config, trajectory)
    a, b = _initial_state(z)
    a, b, invalid = _burn(z, stream, a, b, config.burn_in)
    batches = max(1, min(batches, config.samples))
    edges = np.linspace(0, config.samples, batches + 1).astype(np.int64)
    sums = np.zeros(batches)
    counts = np.zeros(batches)
    acc_total = np.zeros(6)
    acc_total[5] = -math.inf
    for i in range(batches):
        remaining = int(edges[i + 1] - edges[i])
        acc = np.zeros(6)
        acc[5] = -math.inf
        while remaining > 0:
            n = min(CHUNK, remaining)
            a, b = _ratio_stats(z, stream.take(n), a, b, config.y_max, acc)
            remaining -= n
        sums[i] = acc[1]
        counts[i] = acc[0]
        acc_total[[0, 2, 3, 4]] += acc[[0, 2, 3, 4]]
        acc_total[5] = max(acc_total[5], acc[5])
    return RatioStats(
        config.samples, int(acc_total[0]), int(acc_total[2]), int(acc_total[3]),
        invalid + int(acc_total[4]), float(acc_total[5]), sums, counts,
    )


@dataclass
class LyapunovEstimate:
    gamma: float
    se: float
    samples: int
    excluded: int
    excursions: int
    invalid: int
    unreliable: bool
    reason: str = ""

    def __float__(self):
        return self.gamma


def lyapunov(config: DSConfig, batches: int = 32) -> LyapunovEstimate:
    """gamma = mean log|y_k| over the sample window(s), with a batch-means standard error.

    Zero and infinite samples are excluded and counted; more than 1% excluded,
    or fewer than 10**4 samples, marks the estimate unreliable.  The standard
    error is floored at the rounding level of the accumulated sum so that a
    deterministic fixed point still gets a meaningful error bar.
    """
    sums, counts = [], []
    excluded = excursions = invalid = 0
    for t in range(config.trajectories):
        st = ratio_statistics(config, t, batches)
        sums.append(st.batch_sums)
        counts.append(st.batch_counts)
        excluded += st.excluded
        excursions += st.excursions
        invalid += st.invalid
    sums = np.concatenate(sums)
    counts = np.concatenate(counts)
    n = counts.sum()
    total = config.samples * config.trajectories
    if n == 0:
        return LyapunovEstimate(math.nan, math.nan, total, excluded, excursions, invalid, True,
                                "no finite samples")
    gamma = float(sums.sum() / n)
    keep = counts > 0
    means = sums[keep] / counts[keep]
    w = counts[keep] / n
    k = len(means)
    if k > 1:
        var = float((w * (means - gamma) ** 2).sum()) * k / (k - 1)
        se = math.sqrt(var / k)
    else:
        se = math.inf
    se = max(se, np.finfo(float).eps * max(1.0, abs(gamma)) * math.sqrt(n))
    reasons = []
    if excluded > EXCLUDED_LIMIT * total:
        reasons.append(f"{excluded} of {total} samples excluded")
    if config.samples < MIN_REPORTED_SAMPLES:
        reasons.append(f"fewer than {MIN_REPORTED_SAMPLES} samples")
    return LyapunovEstimate(gamma, se, total, excluded, excursions, invalid, bool(reasons), "; ".join(reasons))


# escape maps ---------------------------------------------------------------------


@dataclass(frozen=True)
class GridSpec:
    """Node grid: ``nx`` points across [re_min, re_max], ``ny`` across [im_min, im_max]."""

    re_min: float = -2.2
    re_max: float = 2.2
    im_min: float = -2.2
    im_max: float = 2.2
    nx: int = 128
    ny: int = 128

    def __post_init__(self):
        if self.nx < 1 or self.ny < 1:
            raise InvalidArgumentError("grid resolution must be positive")
        if self.nx > MAX_GRID or self.ny > MAX_GRID:
            raise SizeCapError(f"grid {self.nx}x{self.ny} exceeds {MAX_GRID}x{MAX_GRID}")
        if not (self.re_min <= self.re_max and self.im_min <= self.im_max):
            raise InvalidArgumentError("grid bounds must satisfy min <= max")

    @property
    def re(self) -> np.ndarray:
        return np.linspace(self.re_min, self.re_max, self.nx)

    @property
    def im(self) -> np.ndarray:
        return np.linspace(self.im_min, self.im_max, self.ny)

    def points(self) -> np.ndarray:
        """Cell centres, row-major with imaginary part as the row index."""
        return (self.re[None, :] + 1j * self.im[:, None]).ravel()


@dataclass
class LyapunovMap:
    """Per-cell escape fraction and gamma; a candidate-support indicator, not a spectrum."""

    grid: GridSpec
    gamma: np.ndarray
    escape_fraction: np.ndarray
    config: DSConfig
    label: str = "candidate support"

    def points(self) -> np.ndarray:
        return self.grid.points()

    def rows(self):
        """(z, gamma, escape_fraction) per cell in row-major order."""
        return zip(self.points(), self.gamma.ravel(), self.escape_fraction.ravel())


def _cell(config: DSConfig, z: complex, cell: int):
    gammas, escaped = [], 0
    cfg = config.with_z(z)
    for t in range(config.trajectories):
        st = _cell_stats(cfg, cell, t)
        escaped += st.escaped
        gammas.append(st.mean_log)
    g = np.array(gammas)
    g = g[np.isfinite(g)]
    return (float(g.mean()) if len(g) else math.nan), escaped / config.trajectories


def _cell_stats(cfg: DSConfig, cell: int, traj: int) -> RatioStats:
    stream = _stream_for(cfg, cell, traj)
    a, b = _initial_state(cfg.z)
    a, b, invalid = _burn(cfg.z, stream, a, b, cfg.burn_in)
    acc = np.zeros(6)
    acc[5] = -math.inf
    remaining = cfg.samples
    while remaining > 0:
        n = min(CHUNK, remaining)
        a, b = _ratio_stats(cfg.z, stream.take(n), a, b, cfg.y_max, acc)
        remaining -= n
    return RatioStats(cfg.samples, int(acc[0]), int(acc[2]), int(acc[3]), invalid + int(acc[4]),
                      float(acc[5]), np.array([acc[1]]), np.array([acc[0]]))


def escape_map(grid: GridSpec, config: DSConfig, threads: int = 1) -> LyapunovMap:
    """Escape fraction (trajectories with any |y| > y_max in the sample window) and gamma per cell.

    Cell i uses the stream keyed by (config.seed, i, trajectory), so results do
    not depend on ``threads``.
    """
    pts = grid.points()
    gamma = np.empty(len(pts))
    frac = np.empty(len(pts))

    def run(rows):
        for i in rows:
            gamma[i], frac[i] = _cell(config, pts[i], i)

    if threads <= 1:
        run(range(len(pts)))
    else:
        blocks = np.array_split(np.arange(len(pts)), threads * 4)
        with ThreadPoolExecutor(max_workers=threads) as ex:
            list(ex.map(run, blocks))
    shape = (grid.ny, grid.nx)
    return LyapunovMap(grid, gamma.reshape(shape), frac.reshape(shape), config)


# stable fixed points versus sampled support ------------------------------------------


def _alphabet(config: DSConfig) -> tuple:
    if config.letters == "random_sign":
        return (1, -1)
    if config.letters == "random_phase":
        raise InvalidArgumentError("a continuous letter distribution has no finite word set")
    return tuple(dict.fromkeys(config.letters.letters))


@dataclass
class SupportDistance:
    distance: float
    fixed_points: int
    samples: int

    def __float__(self):
        return self.distance


def stable_fixed_points(z: complex, max_length: int, alphabet=(1, -1)) -> np.ndarray:
    """Stable fixed points at z of every word of length 1..max_length over ``alphabet``."""
    if not 1 <= max_length <= MAX_SUPPORT_LENGTH:
        raise InvalidArgumentError(f"maxL must be in 1..{MAX_SUPPORT_LENGTH}")
    out = []
    for L in range(1, max_length + 1):
        for letters in product(alphabet, repeat=L):
            fp = fixed_points(Word(letters), z)
            if fp.stable is not None:
                out.append(fp.stable)
    return np.array(out, dtype=np.complex128)


def support_vs_fixed_points(z, max_length: int, config: DSConfig) -> SupportDistance:
    """Largest distance from a sampled y to the nearest stable fixed point of any word of length <= maxL.

    Raises InvalidArgumentError when the trajectory escapes (z looks like part
    of the candidate support) and InsufficientWordsError when no word has a
    stable fixed point at z.
    """
    cfg = config.with_z(z)
    alphabet = _alphabet(cfg)
    fps = stable_fixed_points(cfg.z, max_length, alphabet)
    if len(fps) == 0:
        raise InsufficientWordsError(f"no stable fixed points for words of length <= {max_length} at z={z}")
    traj = iterate_ratio(cfg)
    if traj.excursions or traj.excluded:
        raise InvalidArgumentError(f"z={z} escapes; the closure comparison needs a point off the support")
    tree = cKDTree(np.column_stack([fps.real, fps.imag]))
    y = traj.values
    d, _ = tree.query(np.column_stack([y.real, y.imag]))
    return SupportDistance(float(d.max()), len(fps), len(y))
