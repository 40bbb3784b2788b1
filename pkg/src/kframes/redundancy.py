"""Combinatorial redundancy diagnostics: spark, MRC, uniform excess, robustness.

The spark of a matrix is the minimal Hamming weight over nonzero kernel
vectors, equivalently the size of the smallest linearly dependent column
subset; it is +inf when the kernel is trivial. Brute-force enumeration with
explicit caps is intentional: the quantities are NP-hard in general but the
target instances are desk scale.

An index set sigma satisfies the minimal redundancy condition (MRC) when
the frame restricted to the complement is still a K-frame. "Exact K-frame"
means a K-frame that stops being one when any single column is removed.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import BudgetExceededError, KFrameError, RestrictedInverseError
from .frames import (
    KFrameSystem,
    OperatorK,
    classify,
    is_kframe,
    normalize_erasure_set,
    verify_kframe,
)
from .linalg import (
    DEFAULT_TOL,
    _TINY,
    TolerancePolicy,
    ensure_matrix,
    ensure_vector,
    null_space_basis,
    operator_norm,
    pseudo_inverse,
    range_basis,
    rank_of,
    ranges_nested,
    restricted_operator,
)

__all__ = [
    "SparkResult",
    "hamming_weight",
    "spark",
    "spark_via_kernel",
    "min_support_in_range",
    "MrcReport",
    "mrc_subset",
    "mrc_all",
    "ExcessReport",
    "uniform_excess",
    "is_maximal_robust",
    "derived_pinv_frames",
    "DerivedPairReport",
]

INFINITE = math.inf


@dataclass(frozen=True)
class SparkResult:
    """Spark value with a minimal-support kernel witness when finite."""

    value: int | float
    witness: np.ndarray | None

    @property
    def finite(self) -> bool:
        return self.value != INFINITE


def hamming_weight(x, tol: float = 1e-9) -> int:
    """Entries counted as nonzero above tol * max(1, ||x||_inf)."""
    arr = ensure_vector(x)
    if arr.size == 0:
        return 0
    cut = tol * max(1.0, float(np.max(np.abs(arr))))
    return int(np.sum(np.abs(arr) > cut))


def _column_cap(m: int, cap: int, what: str) -> None:
    if m > cap:
        raise BudgetExceededError(f"{what}: {m} columns exceed cap {cap}")


def _fix_sign(vec: np.ndarray) -> np.ndarray:
    mags = np.abs(vec)
    lead = int(np.argmax(mags >= (1.0 - 1e-12) * mags.max()))
    return -vec if vec[lead] < 0 else vec


def _embed_witness(m: int, support, local: np.ndarray) -> np.ndarray:
    vec = np.zeros(m)
    vec[list(support)] = local
    return _fix_sign(vec)


def spark(mat, tol: TolerancePolicy = DEFAULT_TOL, cap: int = 24) -> SparkResult:
    """Smallest dependent column subset, scanned size-ascending.

    Submatrix rank tests use a cutoff anchored to the parent matrix scale,
    matching the global rank decision (a column of pure round-off counts as
    zero). Short-circuits at k = rank + 1, which is always dependent, so
    the scan terminates even without finding smaller dependencies.
    """
    arr = ensure_matrix(mat)
    m = arr.shape[1]
    _column_cap(m, cap, "spark")
    r = rank_of(arr, tol)
    if r == m:
        return SparkResult(INFINITE, None)
    sigma_max = operator_norm(arr)
    cutoff = max(tol.rank_cutoff_rel * max(arr.shape) * sigma_max, _TINY)
    for k in range(1, r + 2):
        for subset in itertools.combinations(range(m), k):
            block = arr[:, list(subset)]
            u_s = np.linalg.svd(block, compute_uv=False)
            if int(np.sum(u_s > cutoff)) < k:
                local = _small_singular_vector(block, k)
                return SparkResult(k, _embed_witness(m, subset, local))
    raise AssertionError("unreachable: a dependent subset exists at rank + 1")


def spark_via_kernel(
    mat, tol: TolerancePolicy = DEFAULT_TOL, cap: int = 24
) -> SparkResult:
    """Independent spark route: support search inside the kernel.

    Enumerates candidate supports and tests whether the kernel meets the
    corresponding coordinate subspace, using row-rank tests on a kernel
    basis instead of column-rank tests on submatrices.
    """
    arr = ensure_matrix(mat)
    m = arr.shape[1]
    _column_cap(m, cap, "spark_via_kernel")
    kernel = null_space_basis(arr, tol)
    d = kernel.dim
    if d == 0:
        return SparkResult(INFINITE, None)
    nb = kernel.basis
    # Row submatrices of an orthonormal basis must be ranked against the
    # basis scale (1), not their own largest entry, or pure round-off rows
    # read as full rank.
    cutoff = tol.rank_cutoff_rel * max(nb.shape)
    for k in range(1, m + 1):
        for support in itertools.combinations(range(m), k):
            outside = [i for i in range(m) if i not in support]
            rows = nb[outside, :]
            s = np.linalg.svd(rows, compute_uv=False) if rows.size else np.zeros(0)
            if int(np.sum(s > cutoff)) < d:
                coeff = _small_singular_vector(rows, d)
                return SparkResult(k, _fix_sign(nb @ coeff))
    raise AssertionError("unreachable: the kernel is nontrivial")


def _small_singular_vector(rows: np.ndarray, d: int) -> np.ndarray:
    if rows.size == 0:
        return np.eye(d)[:, 0]
    _, _, vt = np.linalg.svd(rows)
    return vt[-1, :]


def min_support_in_range(
    mat, tol: TolerancePolicy = DEFAULT_TOL, cap: int = 24
) -> int | float:
    """Minimal Hamming weight over nonzero vectors in the column space."""
    arr = ensure_matrix(mat)
    n = arr.shape[0]
    _column_cap(arr.shape[1], cap, "min_support_in_range")
    basis = range_basis(arr, tol)
    r = basis.dim
    if r == 0:
        return INFINITE
    cutoff = tol.rank_cutoff_rel * max(basis.basis.shape)
    for k in range(1, n + 1):
        for support in itertools.combinations(range(n), k):
            outside = [i for i in range(n) if i not in support]
            rows = basis.basis[outside, :]
            s = np.linalg.svd(rows, compute_uv=False) if rows.size else np.zeros(0)
            if int(np.sum(s > cutoff)) < r:
                return k
    raise AssertionError("unreachable: the range is nontrivial")


@dataclass(frozen=True)
class MrcReport:
    """MRC verdict for one erasure set plus the necessary-condition checks.

    necessary_condition_i tests trivial intersection of R(F^T M_K) with the
    erased coordinate directions; it must hold whenever is_mrc does, but not
    conversely. parseval_condition_ii is filled only for Parseval systems.
    """

    sigma: tuple[int, ...]
    is_mrc: bool
    necessary_condition_i: bool
    parseval_condition_ii: bool | None


def _as_operator(k, tol: TolerancePolicy) -> OperatorK:
    return k if isinstance(k, OperatorK) else OperatorK.from_matrix(k, tol)


def mrc_subset(f, k, sigma, tol: TolerancePolicy = DEFAULT_TOL) -> MrcReport:
    arr = ensure_matrix(f, "F")
    op = _as_operator(k, tol)
    m = arr.shape[1]
    sig = normalize_erasure_set(sigma, m)
    survivors = [i for i in range(m) if i not in sig]
    mrc = is_kframe(arr[:, survivors], op, tol)
    cond_i = _trivial_intersection(arr, op, sig, tol)
    cond_ii = None
    if is_kframe(arr, op, tol):
        sys_full = verify_kframe(arr, op, tol)
        if classify(sys_full).parseval:
            cond_ii = _parseval_condition(sys_full, sig, survivors)
    return MrcReport(
        sigma=sig,
        is_mrc=mrc,
        necessary_condition_i=cond_i,
        parseval_condition_ii=cond_ii,
    )


def _trivial_intersection(
    arr: np.ndarray, op: OperatorK, sig: tuple[int, ...], tol: TolerancePolicy
) -> bool:
    if not sig:
        return True
    coeff_range = range_basis(arr.T @ op.matrix, tol)
    erased = np.eye(arr.shape[1])[:, list(sig)]
    stacked = np.hstack([coeff_range.basis, erased])
    return rank_of(stacked, tol) == coeff_range.dim + len(sig)


def _parseval_condition(
    sys: KFrameSystem, sig: tuple[int, ...], survivors: list[int]
) -> bool:
    # Invertibility of (K - theta_sigma xi_sigma^T) restricted to R(K^T),
    # onto the image of R(K) under the survivor frame operator.
    x = pseudo_inverse(sys.F, sys.tol) @ sys.K.matrix
    t = sys.K.matrix - sys.F[:, list(sig)] @ x[list(sig), :]
    domain = sys.K.adjoint_range
    coord, image = restricted_operator(t, domain, sys.tol)
    injective = image.dim == domain.dim and coord.shape[0] == coord.shape[1]
    f_c = sys.F[:, survivors]
    target = (f_c @ f_c.T) @ sys.K.range.basis
    same_range = ranges_nested(image.basis, target, sys.tol) and ranges_nested(
        target, image.basis, sys.tol
    )
    return injective and same_range


def mrc_all(
    f, k, r: int, cap: int = 10**6, tol: TolerancePolicy = DEFAULT_TOL
) -> tuple[bool, tuple[int, ...] | None]:
    """Conjunction of mrc_subset over all size-r sets, lexicographic scan."""
    arr = ensure_matrix(f, "F")
    op = _as_operator(k, tol)
    m = arr.shape[1]
    if r == 0:
        return is_kframe(arr, op, tol), None
    if not (0 < r <= m):
        raise ValueError(f"erasure count must satisfy 0 <= r <= m, got {r}")
    if math.comb(m, r) > cap:
        raise BudgetExceededError(
            f"mrc_all: C({m},{r}) = {math.comb(m, r)} subsets exceed cap {cap}"
        )
    for sig in itertools.combinations(range(m), r):
        survivors = [i for i in range(m) if i not in sig]
        if not is_kframe(arr[:, survivors], op, tol):
            return False, sig
    return True, None


def _is_exact_kframe(cols: np.ndarray, op: OperatorK, tol: TolerancePolicy) -> bool:
    if not is_kframe(cols, op, tol):
        return False
    m = cols.shape[1]
    for j in range(m):
        keep = [i for i in range(m) if i != j]
        if is_kframe(cols[:, keep], op, tol):
            return False
    return True


@dataclass(frozen=True)
class ExcessReport:
    """Uniform excess value; witness is the first failing removal set when 0."""

    value: int
    witness: tuple[int, ...] | None


def uniform_excess(
    f, k, cap: int = 10**6, tol: TolerancePolicy = DEFAULT_TOL
) -> ExcessReport:
    """Largest r >= 1 with every r-column removal leaving an exact K-frame.

    Returns 0 with the lexicographically first failing removal set when no
    positive r qualifies.
    """
    arr = ensure_matrix(f, "F")
    op = _as_operator(k, tol)
    m = arr.shape[1]
    total = sum(math.comb(m, r) * (m - r + 1) for r in range(1, m))
    if total > cap:
        raise BudgetExceededError(
            f"uniform_excess: {total} subset checks exceed cap {cap}"
        )
    best = 0
    first_failure: tuple[int, ...] | None = None
    for r in range(1, m):
        qualified = True
        for sig in itertools.combinations(range(m), r):
            survivors = [i for i in range(m) if i not in sig]
            if not _is_exact_kframe(arr[:, survivors], op, tol):
                qualified = False
                if r == 1 and first_failure is None:
                    first_failure = sig
                break
        if qualified:
            best = r
    if best > 0:
        return ExcessReport(value=best, witness=None)
    return ExcessReport(value=0, witness=first_failure)


def is_maximal_robust(
    f, k, cap: int = 10**6, tol: TolerancePolicy = DEFAULT_TOL
) -> bool:
    """True when every rank(K)-column subset is an exact K-frame."""
    arr = ensure_matrix(f, "F")
    op = _as_operator(k, tol)
    m = arr.shape[1]
    rk = op.rank
    if rk > m:
        return False
    if math.comb(m, rk) > cap:
        raise BudgetExceededError(
            f"is_maximal_robust: C({m},{rk}) subsets exceed cap {cap}"
        )
    return all(
        _is_exact_kframe(arr[:, list(sub)], op, tol)
        for sub in itertools.combinations(range(m), rk)
    )


@dataclass(frozen=True)
class DerivedPairReport:
    dual_residual: float
    pair_is_dual: bool
    seq1_spans_pinv_range: bool
    seq2_is_kframe: bool


def derived_pinv_frames(
    sys: KFrameSystem, sigma
) -> tuple[np.ndarray, np.ndarray, DerivedPairReport]:
    """Survivor families after an MRC erasure: a pinv-frame with its pinv-dual.

    seq1 applies the inverted survivor frame operator restriction to the
    surviving frame vectors; seq2 applies (K^+)^T K^+ to them. The report
    certifies that seq1 synthesizes K^+ against seq2 coefficients and that
    seq2 is itself a K-frame.
    """
    sig = normalize_erasure_set(sigma, sys.m)
    survivors = [i for i in range(sys.m) if i not in sig]
    if not is_kframe(sys.F[:, survivors], sys.K, sys.tol):
        raise KFrameError(f"erasure set {sig} does not satisfy MRC")
    f_c = sys.F[:, survivors]
    s_c = f_c @ f_c.T
    coord, image = restricted_operator(s_c, sys.K.range, sys.tol)
    if coord.shape[0] < coord.shape[1]:
        raise RestrictedInverseError(
            "survivor frame operator restricted to R(K) is singular",
            defect=coord.shape[1] - coord.shape[0],
        )
    inv = np.linalg.inv(coord)
    seq1 = sys.K.matrix.T @ sys.K.range.basis @ inv @ image.basis.T @ f_c
    seq2 = sys.K.pinv.T @ sys.K.pinv @ f_c
    k_pinv = sys.K.pinv
    residual = operator_norm(seq1 @ seq2.T - k_pinv)
    threshold = sys.tol.residual_rel * (1.0 + operator_norm(k_pinv))
    report = DerivedPairReport(
        dual_residual=residual,
        pair_is_dual=residual <= threshold,
        seq1_spans_pinv_range=ranges_nested(k_pinv, seq1, sys.tol),
        seq2_is_kframe=is_kframe(seq2, sys.K, sys.tol),
    )
    return seq1, seq2, report
