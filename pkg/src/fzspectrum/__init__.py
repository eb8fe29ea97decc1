"""Spectra of non-Hermitian random hopping chains via words, transfer matrices and direct diagonalization."""

__version__ = "0.1.0"

from .direct import (
    EigenResult, Explicit, HamiltonianSpec, ParagraphSource, Periodic, RandomPhase, RandomSign,
    build_subdiagonal, char_poly, eigenvalues_qr, eigenvalues_via_roots, gauge_reduce,
    hamiltonian_matrix, hausdorff, matched_distance,
)
from .dyson_schmidt import (
    DSConfig, GridSpec, LyapunovMap, escape_map, iterate_ratio, lyapunov, support_vs_fixed_points,
)
from .errors import (
    ConvergenceError, DataFormatError, DegenerateMapError, FZError, InsufficientWordsError,
    InvalidArgumentError, PartialResultError, SingularGaugeError, SizeCapError, UnsupportedLengthError,
)
from .poly import CPoly, RootSet, find_roots
from .word_spectrum import (
    FixedPointPair, IsolatedPoints, PQR, SpectrumUnion, TransferWord, WordSpectrum,
    bloch_curve, bloch_matrix, bloch_matrix_eigs, continued_fraction_f, distance_to_support,
    fixed_points, isolated_points, pqr, q_closed_form, support_union, transfer_polynomials,
)
from .words import (
    CyclicInvariants, Paragraph, Word, build_paragraph, canonical_rotation, cyclic_invariants,
    enumerate_words, is_primitive, necklaces,
)
