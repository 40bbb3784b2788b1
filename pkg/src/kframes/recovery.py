"""Erasure recovery for K-dual coefficients.

A signal f is encoded as c = G^T f against a K-dual G; synthesis F c then
returns Kf. When entries of c are erased at known positions, three solvers
reconstruct them:

* side-info: solve M_L c_L = v - M_known c_known against a certified
  recovery matrix M and the side vector v of K-frame measurements <Kf, f_j>.
* blind: solve the homogeneous relation (M - Gram) c = 0, which needs no
  side information at all.
* consistency: least-squares fit of a signal explaining the surviving
  coefficients; exact for Kf whenever the survivors remain a K*-frame.

A recovery matrix here is any m x m matrix M with (M - Gram) G^T = 0; its
two sparks bound how many erasures each solver tolerates.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .canonical import canonical_kdual
from .errors import (
    AmbiguityError,
    BudgetExceededError,
    ExpansionError,
    KFrameError,
    ShapeMismatchError,
)
from .frames import DualSystem, KFrameSystem, normalize_erasure_set, verify_kdual
from .linalg import (
    TolerancePolicy,
    ensure_matrix,
    ensure_vector,
    null_space_basis,
    operator_norm,
    pseudo_inverse,
    range_projector,
    rank_of,
    ranges_nested,
)
from .redundancy import INFINITE, SparkResult, spark

__all__ = [
    "CodedSignal",
    "encode",
    "erase",
    "RkCertificate",
    "validate_rk_matrix",
    "RkSearchResult",
    "find_rk_matrix",
    "RecoveryReport",
    "recover_side_info",
    "recover_blind",
    "recover_consistency",
    "ProjectedDualExpansion",
    "projected_dual_expansion",
    "recover_projected_coefficients",
    "ErrorSplit",
    "erasure_error_split",
    "worst_residual_error",
    "MinimizedDual",
    "minimize_residual_error",
    "ComposedRecovery",
    "compose_recovery_matrices",
]


@dataclass(frozen=True)
class CodedSignal:
    """Coefficient vector with an erasure mask.

    Erased slots hold NaN sentinels but the mask is authoritative; surviving
    entries are preserved bit-exactly.
    """

    coefficients: np.ndarray
    mask: tuple[int, ...]

    @property
    def m(self) -> int:
        return self.coefficients.shape[0]

    @property
    def known_indices(self) -> list[int]:
        erased = set(self.mask)
        return [i for i in range(self.m) if i not in erased]

    @property
    def known_values(self) -> np.ndarray:
        return self.coefficients[self.known_indices]


def encode(dual: DualSystem, f) -> np.ndarray:
    """Coefficients c = G^T f; synthesis F c returns Kf for valid duals."""
    vec = ensure_vector(f, "signal")
    if vec.shape[0] != dual.G.shape[0]:
        raise ShapeMismatchError(
            f"signal length {vec.shape[0]} != dimension {dual.G.shape[0]}"
        )
    return dual.G.T @ vec


def erase(c, lam) -> CodedSignal:
    vec = ensure_vector(c, "coefficients")
    mask = normalize_erasure_set(lam, vec.shape[0])
    out = vec.copy()
    out[list(mask)] = np.nan
    return CodedSignal(coefficients=out, mask=mask)


def _r_from_spark(value: int | float, m: int) -> int:
    # Infinite spark means every erasure size up to m stays solvable.
    return m if value == INFINITE else int(value) - 1


@dataclass(frozen=True)
class RkCertificate:
    """Recovery-matrix certificate: both sparks and the annihilation residual.

    r_side_info = spark(M) - 1 bounds erasures recoverable with the side
    vector; r_blind = spark(M - Gram) - 1 bounds erasures recoverable from
    the homogeneous equation alone. Failed annihilation shows up in the
    residual, never as an exception.
    """

    M: np.ndarray
    spark_M: SparkResult
    N: np.ndarray
    spark_N: SparkResult
    annihilation_residual: float
    annihilation_ok: bool
    r_side_info: int
    r_blind: int


def validate_rk_matrix(
    sys: KFrameSystem,
    dual: DualSystem,
    m_mat,
    tol: TolerancePolicy | None = None,
    cap: int = 24,
) -> RkCertificate:
    tol = tol or sys.tol
    mat = ensure_matrix(m_mat, "M")
    if mat.shape != (sys.m, sys.m):
        raise ShapeMismatchError(f"M must be {sys.m}x{sys.m}, got {mat.shape}")
    n_mat = mat - sys.gramian
    residual = operator_norm(n_mat @ dual.G.T)
    threshold = tol.residual_rel * (1.0 + operator_norm(n_mat) * operator_norm(dual.G))
    spark_m = spark(mat, tol, cap)
    spark_n = spark(n_mat, tol, cap)
    return RkCertificate(
        M=mat,
        spark_M=spark_m,
        N=n_mat,
        spark_N=spark_n,
        annihilation_residual=residual,
        annihilation_ok=residual <= threshold,
        r_side_info=_r_from_spark(spark_m.value, sys.m),
        r_blind=_r_from_spark(spark_n.value, sys.m),
    )


@dataclass(frozen=True)
class RkSearchResult:
    certificate: RkCertificate
    mode: str
    trial: int


def find_rk_matrix(
    sys: KFrameSystem,
    dual: DualSystem,
    r_target: int,
    trials: int = 64,
    seed: int = 0,
) -> RkSearchResult:
    """Seeded search for a recovery matrix tolerating r_target erasures.

    Candidates are Gram + A (I - P) with P the projector onto the row space
    of the dual, so annihilation holds exactly by construction and only the
    spark levels need checking. The first certificate reaching the target in
    either mode is returned, flagged with which mode qualified.
    """
    if not (0 <= r_target < sys.m):
        raise ValueError(f"r_target must satisfy 0 <= r_target < m, got {r_target}")
    annihilator = np.eye(sys.m) - range_projector(dual.G.T, sys.tol)
    if r_target == 0:
        cert = validate_rk_matrix(sys, dual, sys.gramian)
        return RkSearchResult(certificate=cert, mode="both", trial=0)
    rng = np.random.default_rng(seed)
    for trial in range(1, trials + 1):
        a = rng.standard_normal((sys.m, sys.m))
        cert = validate_rk_matrix(sys, dual, sys.gramian + a @ annihilator)
        blind_ok = cert.r_blind >= r_target
        side_ok = cert.r_side_info >= r_target
        if blind_ok or side_ok:
            mode = "both" if blind_ok and side_ok else ("blind" if blind_ok else "side-info")
            return RkSearchResult(certificate=cert, mode=mode, trial=trial)
    raise KFrameError(
        f"no recovery matrix with r >= {r_target} found in {trials} trials"
    )


@dataclass(frozen=True)
class RecoveryReport:
    """Recovered coefficients plus the synthesized reconstruction F c."""

    coefficients: np.ndarray
    reconstructed: np.ndarray
    strategy: str
    solver_residual: float
    certified_exact: bool


def _check_annihilation(
    sys: KFrameSystem, dual: DualSystem | None, mat: np.ndarray, tol: TolerancePolicy
) -> None:
    if dual is None:
        return
    n_mat = mat - sys.gramian
    residual = operator_norm(n_mat @ dual.G.T)
    threshold = tol.residual_rel * (1.0 + operator_norm(n_mat) * operator_norm(dual.G))
    if residual > threshold:
        raise KFrameError(
            f"recovery matrix fails annihilation against the dual "
            f"(residual {residual:.3e})"
        )


def _solve_columns(
    block: np.ndarray, rhs: np.ndarray, tol: TolerancePolicy, what: str
) -> tuple[np.ndarray, float, bool]:
    width = block.shape[1]
    rank = rank_of(block, tol)
    if rank < width:
        raise AmbiguityError(
            f"{what}: erased columns are rank deficient "
            f"({rank} < {width}); recovery is ambiguous",
            deficiency=width - rank,
        )
    solution = pseudo_inverse(block, tol) @ rhs
    residual = float(np.linalg.norm(block @ solution - rhs))
    certified = residual <= tol.residual_rel * (1.0 + float(np.linalg.norm(rhs)))
    return solution, residual, certified


def _finish(
    sys: KFrameSystem,
    coded: CodedSignal,
    recovered_lam: np.ndarray,
    strategy: str,
    residual: float,
    certified: bool,
) -> RecoveryReport:
    full = coded.coefficients.copy()
    full[list(coded.mask)] = recovered_lam
    return RecoveryReport(
        coefficients=full,
        reconstructed=sys.F @ full,
        strategy=strategy,
        solver_residual=residual,
        certified_exact=certified,
    )


def recover_side_info(
    sys: KFrameSystem,
    m_mat,
    coded: CodedSignal,
    v,
    dual: DualSystem | None = None,
    tol: TolerancePolicy | None = None,
) -> RecoveryReport:
    """Recover erased entries from M_L c_L = v - M_known c_known.

    v is the side vector of K-frame measurements <Kf, f_j>, supplied by the
    caller and never fabricated here. Passing the dual enables the
    annihilation precondition check on M.
    """
    tol = tol or sys.tol
    mat = ensure_matrix(m_mat, "M")
    if mat.shape != (sys.m, sys.m):
        raise ShapeMismatchError(f"M must be {sys.m}x{sys.m}, got {mat.shape}")
    side = ensure_vector(v, "side vector")
    if side.shape[0] != sys.m:
        raise ShapeMismatchError(f"side vector length {side.shape[0]} != m = {sys.m}")
    _check_annihilation(sys, dual, mat, tol)
    lam = list(coded.mask)
    if not lam:
        values = coded.coefficients.copy()
        return RecoveryReport(values, sys.F @ values, "side-info", 0.0, True)
    known = coded.known_indices
    rhs = side - mat[:, known] @ coded.known_values
    solution, residual, certified = _solve_columns(
        mat[:, lam], rhs, tol, "side-info"
    )
    return _finish(sys, coded, solution, "side-info", residual, certified)


def recover_blind(
    sys: KFrameSystem,
    m_mat,
    coded: CodedSignal,
    dual: DualSystem | None = None,
    tol: TolerancePolicy | None = None,
) -> RecoveryReport:
    """Recover erased entries from the homogeneous relation (M - Gram) c = 0."""
    tol = tol or sys.tol
    mat = ensure_matrix(m_mat, "M")
    if mat.shape != (sys.m, sys.m):
        raise ShapeMismatchError(f"M must be {sys.m}x{sys.m}, got {mat.shape}")
    _check_annihilation(sys, dual, mat, tol)
    n_mat = mat - sys.gramian
    lam = list(coded.mask)
    if not lam:
        values = coded.coefficients.copy()
        return RecoveryReport(values, sys.F @ values, "blind", 0.0, True)
    known = coded.known_indices
    rhs = -n_mat[:, known] @ coded.known_values
    solution, residual, certified = _solve_columns(n_mat[:, lam], rhs, tol, "blind")
    return _finish(sys, coded, solution, "blind", residual, certified)


def recover_consistency(
    sys: KFrameSystem,
    dual: DualSystem,
    coded: CodedSignal,
    tol: TolerancePolicy | None = None,
) -> RecoveryReport:
    """Least-squares signal fit against surviving coefficients.

    Certified exact when the surviving dual vectors still form a K*-frame
    (range test), which pins Kf even though the fitted signal itself may
    wander in the kernel directions.
    """
    tol = tol or sys.tol
    known = coded.known_indices
    g_known = dual.G[:, known]
    fitted = pseudo_inverse(g_known.T, tol) @ coded.known_values
    residual = float(np.linalg.norm(g_known.T @ fitted - coded.known_values))
    survivors_ok = ranges_nested(sys.K.matrix.T, g_known, tol)
    certified = survivors_ok and residual <= tol.residual_rel * (
        1.0 + float(np.linalg.norm(coded.known_values))
    )
    if not coded.mask:
        values = coded.coefficients.copy()
        return RecoveryReport(values, sys.F @ values, "consistency", residual, certified)
    recovered = dual.G[:, list(coded.mask)].T @ fitted
    return _finish(sys, coded, recovered, "consistency", residual, certified)


@dataclass(frozen=True)
class ProjectedDualExpansion:
    """Expansion of projected dual vectors over surviving frame vectors.

    alpha[i, j] expresses the R(K)-projection of the i-th erased dual vector
    in the surviving frame columns; recovery_matrix is the stacked
    [identity | -alpha] block aligned to the full index set.
    """

    mask: tuple[int, ...]
    alpha: np.ndarray
    recovery_matrix: np.ndarray
    expansion_residual: float


def projected_dual_expansion(
    sys: KFrameSystem,
    dual: DualSystem,
    lam,
    tol: TolerancePolicy | None = None,
) -> ProjectedDualExpansion:
    """Solve pi_{R(K)} g_i = sum_{j notin L} alpha_ij f_j for each erased i.

    Guaranteed solvable when the erasure count is at most the uniform
    excess; otherwise the residual check raises ExpansionError.
    """
    tol = tol or sys.tol
    mask = normalize_erasure_set(lam, sys.m)
    survivors = [j for j in range(sys.m) if j not in mask]
    if not mask:
        return ProjectedDualExpansion(
            mask=mask,
            alpha=np.zeros((0, len(survivors))),
            recovery_matrix=np.zeros((0, sys.m)),
            expansion_residual=0.0,
        )
    projector = sys.K.range.projector()
    targets = projector @ dual.G[:, list(mask)]
    basis = sys.F[:, survivors]
    alpha = (pseudo_inverse(basis, tol) @ targets).T
    residual = float(np.max(np.linalg.norm(basis @ alpha.T - targets, axis=0)))
    scale = tol.residual_rel * (1.0 + float(np.linalg.norm(targets)))
    if residual > scale:
        raise ExpansionError(
            f"projected dual vectors leave the survivor span "
            f"(residual {residual:.3e})"
        )
    recovery = np.zeros((len(mask), sys.m))
    for row, i in enumerate(mask):
        recovery[row, i] = 1.0
    for col, j in enumerate(survivors):
        recovery[:, j] = -alpha[:, col]
    return ProjectedDualExpansion(
        mask=mask,
        alpha=alpha,
        recovery_matrix=recovery,
        expansion_residual=residual,
    )


def recover_projected_coefficients(
    exp: ProjectedDualExpansion, kframe_coeffs
) -> np.ndarray:
    """Projected coefficients <f, pi g_i> from survivor measurements <f, f_j>."""
    coeffs = ensure_vector(kframe_coeffs, "survivor coefficients")
    if coeffs.shape[0] != exp.alpha.shape[1]:
        raise ShapeMismatchError(
            f"expected {exp.alpha.shape[1]} survivor coefficients, "
            f"got {coeffs.shape[0]}"
        )
    return exp.alpha @ coeffs


@dataclass(frozen=True)
class ErrorSplit:
    """Erasure error operator split into recoverable and residual parts.

    error = recoverable + residual holds identically; recoverable collects
    the R(K) components of the erased dual vectors, residual the orthogonal
    leftovers that no in-range reconstruction can repair.
    """

    error: np.ndarray
    recoverable: np.ndarray
    residual: np.ndarray
    norms: tuple[float, float, float]


def erasure_error_split(
    sys: KFrameSystem, dual: DualSystem, lam
) -> ErrorSplit:
    mask = normalize_erasure_set(lam, sys.m)
    n = sys.n
    if not mask:
        zero = np.zeros((n, n))
        return ErrorSplit(zero, zero.copy(), zero.copy(), (0.0, 0.0, 0.0))
    idx = list(mask)
    projector = sys.K.range.projector()
    f_part = sys.F[:, idx]
    g_part = dual.G[:, idx]
    error = f_part @ g_part.T
    recoverable = f_part @ (projector @ g_part).T
    residual = f_part @ ((np.eye(n) - projector) @ g_part).T
    return ErrorSplit(
        error=error,
        recoverable=recoverable,
        residual=residual,
        norms=(operator_norm(error), operator_norm(recoverable), operator_norm(residual)),
    )


def worst_residual_error(
    sys: KFrameSystem, dual: DualSystem, r: int, cap: int = 10**6
) -> tuple[float, tuple[int, ...]]:
    """Exact maximum of the residual error norm over all erasure sets of size r."""
    if not (1 <= r < sys.m):
        raise ValueError(f"erasure count must satisfy 1 <= r < m, got {r}")
    if math.comb(sys.m, r) > cap:
        raise BudgetExceededError(
            f"worst_residual_error: C({sys.m},{r}) subsets exceed cap {cap}"
        )
    projector = sys.K.range.projector()
    residual_dual = (np.eye(sys.n) - projector) @ dual.G
    best = -1.0
    best_lam: tuple[int, ...] = ()
    for lam in itertools.combinations(range(sys.m), r):
        idx = list(lam)
        value = operator_norm(sys.F[:, idx] @ residual_dual[:, idx].T)
        if value > best:
            best, best_lam = value, lam
    return best, best_lam


@dataclass(frozen=True)
class MinimizedDual:
    dual: DualSystem
    objective: float
    start_objective: float


def minimize_residual_error(
    sys: KFrameSystem,
    r: int,
    trials: int = 200,
    seed: int = 0,
    cap: int = 10**6,
) -> MinimizedDual:
    """Heuristic search for a dual with small worst-case residual error.

    Duals are parameterized as canonical plus kernel combinations. The
    search starts from the canonical dual and from its projection onto
    R(K)-valued duals (which is exactly optimal whenever an in-range dual
    exists), then runs seeded greedy perturbations. Descent is guaranteed:
    the result is never worse than the canonical starting point. Not
    certified globally optimal.
    """
    canonical = canonical_kdual(sys).dual
    start = worst_residual_error(sys, canonical, r, cap)[0]
    null = null_space_basis(sys.F, sys.tol)
    if null.dim == 0:
        return MinimizedDual(dual=canonical, objective=start, start_objective=start)
    nb = null.basis
    perp = np.eye(sys.n) - sys.K.range.projector()
    projected = canonical.G - (perp @ canonical.G) @ (nb @ nb.T)
    candidates = [canonical.G, projected]
    best_g, best_val = None, math.inf
    for g in candidates:
        val = worst_residual_error(sys, verify_kdual(sys, g), r, cap)[0]
        if val < best_val:
            best_g, best_val = g, val
    rng = np.random.default_rng(seed)
    scale = 1.0
    for _ in range(trials):
        if best_val <= 1e-14:
            break
        step = scale * rng.standard_normal((sys.n, null.dim))
        trial_g = best_g + step @ nb.T
        val = worst_residual_error(sys, verify_kdual(sys, trial_g), r, cap)[0]
        if val < best_val:
            best_g, best_val = trial_g, val
        else:
            scale = max(scale * 0.9, 1e-4)
    return MinimizedDual(
        dual=verify_kdual(sys, best_g), objective=best_val, start_objective=start
    )


@dataclass(frozen=True)
class ComposedRecovery:
    """Composition of a classical erasure-recovery matrix with a recovery matrix.

    degenerate flags an identically zero product, reported with infinite
    spark by convention. kernel_contained confirms Ker M lands inside
    Ker(N M); spark_not_decreased records whether the composed spark stayed
    at or above spark(M), which the kernel containment does not force.
    """

    product: np.ndarray
    spark: SparkResult
    degenerate: bool
    kernel_contained: bool
    spark_not_decreased: bool


def compose_recovery_matrices(
    sys: KFrameSystem,
    n_mat,
    m_mat,
    tol: TolerancePolicy | None = None,
    cap: int = 24,
) -> ComposedRecovery:
    tol = tol or sys.tol
    n_arr = ensure_matrix(n_mat, "N")
    m_arr = ensure_matrix(m_mat, "M")
    if n_arr.shape[1] != sys.m or m_arr.shape != (sys.m, sys.m):
        raise ShapeMismatchError(
            f"expected N with {sys.m} columns and M {sys.m}x{sys.m}, "
            f"got {n_arr.shape} and {m_arr.shape}"
        )
    pre_res = operator_norm(n_arr @ sys.F.T)
    pre_tol = tol.residual_rel * (1.0 + operator_norm(n_arr) * operator_norm(sys.F))
    if pre_res > pre_tol:
        raise KFrameError(
            f"N is not an erasure-recovery matrix for the frame "
            f"(||N F^T|| = {pre_res:.3e})"
        )
    product = n_arr @ m_arr
    degenerate = operator_norm(product) <= tol.residual_rel
    if degenerate:
        composed_spark = SparkResult(INFINITE, None)
    else:
        composed_spark = spark(product, tol, cap)
    spark_m = spark(m_arr, tol, cap)
    kernel = null_space_basis(m_arr, tol)
    contained = bool(
        np.all(np.abs(product @ kernel.basis) <= 1e-8 * (1.0 + operator_norm(product)))
    ) if kernel.dim else True
    return ComposedRecovery(
        product=product,
        spark=composed_spark,
        degenerate=degenerate,
        kernel_contained=contained,
        spark_not_decreased=composed_spark.value >= spark_m.value,
    )
