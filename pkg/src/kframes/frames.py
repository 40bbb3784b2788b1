"""K-frame modeling: verification, bounds, Gramian, duals and transforms.

A K-frame is a column family F whose span contains the range of a square
operator K. Reconstruction then targets Kf rather than f itself: a K-dual
G satisfies F G^T = M_K, i.e. Kf = sum_i <f, g_i> f_i.

Conventions: synthesis matrices are n x m with frame vectors as columns.
Erasure sets are 0-based index tuples internally; the CLI converts from the
1-based JSON convention.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    BudgetExceededError,
    NotKFrameError,
    ShapeMismatchError,
    ZeroOperatorError,
)
from .linalg import (
    DEFAULT_TOL,
    SubspaceBasis,
    TolerancePolicy,
    ensure_matrix,
    null_space_basis,
    operator_norm,
    pseudo_inverse,
    range_basis,
    rank_of,
)

__all__ = [
    "OperatorK",
    "KFrameSystem",
    "DualSystem",
    "Classification",
    "normalize_erasure_set",
    "is_kframe",
    "verify_kframe",
    "frame_bounds",
    "gramian",
    "classify",
    "verify_kdual",
    "dual_perturbation",
    "worst_erasure_error",
    "transform",
]


@dataclass(frozen=True)
class OperatorK:
    """A square operator with cached range data and pseudo-inverse."""

    matrix: np.ndarray
    rank: int
    range: SubspaceBasis
    pinv: np.ndarray
    adjoint_range: SubspaceBasis

    @classmethod
    def from_matrix(cls, m, tol: TolerancePolicy = DEFAULT_TOL) -> "OperatorK":
        arr = ensure_matrix(m, "K")
        if arr.shape[0] != arr.shape[1]:
            raise ShapeMismatchError(f"K must be square, got {arr.shape}")
        return cls(
            matrix=arr,
            rank=rank_of(arr, tol),
            range=range_basis(arr, tol),
            pinv=pseudo_inverse(arr, tol),
            adjoint_range=range_basis(arr.T, tol),
        )

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class KFrameSystem:
    """A verified K-frame: synthesis matrix F plus operator and cached data.

    bounds is None exactly when K = 0 (the lower bound is undefined there).
    Construct through verify_kframe, which enforces the range inclusion.
    """

    F: np.ndarray
    K: OperatorK
    tol: TolerancePolicy
    gramian: np.ndarray
    bounds: tuple[float, float] | None

    @property
    def n(self) -> int:
        return self.F.shape[0]

    @property
    def m(self) -> int:
        return self.F.shape[1]


@dataclass(frozen=True)
class DualSystem:
    """A candidate K-dual with its verification residual.

    residual = ||F G^T - M_K|| in operator norm; is_valid applies the
    policy's relative threshold against 1 + ||M_K||.
    """

    G: np.ndarray
    residual: float
    is_valid: bool


@dataclass(frozen=True)
class Classification:
    tight_alpha: float | None
    parseval: bool
    equal_norm: bool


def normalize_erasure_set(indices, m: int) -> tuple[int, ...]:
    """Sorted tuple of distinct 0-based indices within range."""
    lam = tuple(sorted(int(i) for i in indices))
    if len(set(lam)) != len(lam):
        raise ValueError(f"erasure set has repeated indices: {lam}")
    if lam and (lam[0] < 0 or lam[-1] >= m):
        raise ValueError(f"erasure indices must lie in [0, {m}), got {lam}")
    return lam


def _range_inclusion_ok(f: np.ndarray, op: OperatorK, tol: TolerancePolicy) -> bool:
    if op.rank == 0:
        return True
    return rank_of(np.hstack([f, op.matrix]), tol) == rank_of(f, tol)


def is_kframe(f, k, tol: TolerancePolicy = DEFAULT_TOL) -> bool:
    """Cheap predicate form of verify_kframe (no system construction)."""
    arr = ensure_matrix(f, "F")
    op = k if isinstance(k, OperatorK) else OperatorK.from_matrix(k, tol)
    return arr.shape[0] == op.dim and _range_inclusion_ok(arr, op, tol)


def verify_kframe(f, k, tol: TolerancePolicy = DEFAULT_TOL) -> KFrameSystem:
    """Check R(K) within R(F) and build the system with cached products.

    Raises NotKFrameError with a witness vector (in R(K) but outside R(F))
    when the inclusion fails, ShapeMismatchError on incompatible shapes.
    """
    arr = ensure_matrix(f, "F")
    op = k if isinstance(k, OperatorK) else OperatorK.from_matrix(k, tol)
    if arr.shape[0] != op.dim:
        raise ShapeMismatchError(
            f"F has {arr.shape[0]} rows but K acts on dimension {op.dim}"
        )
    if not _range_inclusion_ok(arr, op, tol):
        proj = range_basis(arr, tol).projector()
        leftover = op.range.basis - proj @ op.range.basis
        worst = int(np.argmax(np.linalg.norm(leftover, axis=0)))
        raise NotKFrameError(
            "operator range is not contained in the frame span",
            witness=op.range.basis[:, worst].copy(),
        )
    bounds = None if op.rank == 0 else _compute_bounds(arr, op, tol)
    return KFrameSystem(F=arr, K=op, tol=tol, gramian=arr.T @ arr, bounds=bounds)


def _compute_bounds(f: np.ndarray, op: OperatorK, tol: TolerancePolicy) -> tuple[float, float]:
    upper = operator_norm(f) ** 2
    # Minimal-norm solution of F X = M_K; its norm is the reciprocal root of
    # the optimal lower bound.
    x = pseudo_inverse(f, tol) @ op.matrix
    lower = 1.0 / operator_norm(x) ** 2
    return (lower, upper)


def frame_bounds(sys: KFrameSystem) -> tuple[float, float]:
    """Optimal bounds (A, B) with A ||K^T f||^2 <= ||F^T f||^2 <= B ||f||^2."""
    if sys.bounds is None:
        raise ZeroOperatorError("lower frame bound is undefined for K = 0")
    return sys.bounds


def gramian(sys: KFrameSystem) -> np.ndarray:
    """m x m matrix of pairwise inner products, entry (j, i) = <f_i, f_j>."""
    return sys.gramian


def classify(sys: KFrameSystem, tol: TolerancePolicy | None = None) -> Classification:
    """Tightness (least-squares alpha fit of FF^T vs M_K M_K^T) and norms."""
    tol = tol or sys.tol
    ss = sys.F @ sys.F.T
    kk = sys.K.matrix @ sys.K.matrix.T
    kk_sq = float(np.sum(kk * kk))
    alpha = None
    if kk_sq > 0.0:
        fit = float(np.sum(ss * kk)) / kk_sq
        resid = np.linalg.norm(ss - fit * kk)
        if resid <= tol.residual_rel * (1.0 + np.linalg.norm(ss)):
            alpha = fit
    elif np.linalg.norm(ss) <= tol.residual_rel:
        alpha = 1.0
    norms = np.linalg.norm(sys.F, axis=0)
    spread = float(norms.max() - norms.min()) if norms.size else 0.0
    equal_norm = spread <= tol.residual_rel * (1.0 + float(norms.max(initial=0.0)))
    parseval = alpha is not None and abs(alpha - 1.0) <= tol.residual_rel * 10
    return Classification(tight_alpha=alpha, parseval=parseval, equal_norm=equal_norm)


def verify_kdual(sys: KFrameSystem, g, tol: TolerancePolicy | None = None) -> DualSystem:
    """Residual-based K-dual check: ||F G^T - M_K|| against the threshold."""
    tol = tol or sys.tol
    arr = ensure_matrix(g, "G")
    if arr.shape != sys.F.shape:
        raise ShapeMismatchError(
            f"G shape {arr.shape} != F shape {sys.F.shape}"
        )
    residual = operator_norm(sys.F @ arr.T - sys.K.matrix)
    threshold = tol.residual_rel * (1.0 + operator_norm(sys.K.matrix))
    return DualSystem(G=arr, residual=residual, is_valid=residual <= threshold)


def dual_perturbation(sys: KFrameSystem, base: DualSystem, coeffs) -> DualSystem:
    """Add a kernel perturbation: rows of the update are null-space combinations.

    coeffs has shape (n, d) where d is the kernel dimension of F; the result
    G + coeffs N^T is always another K-dual of the same residual class.
    """
    if not base.is_valid:
        raise ValueError("base dual must be valid before perturbing")
    null = null_space_basis(sys.F, sys.tol)
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.size == 0:
        coeffs = coeffs.reshape(sys.n, null.dim) if null.dim == 0 else coeffs
    if coeffs.shape != (sys.n, null.dim):
        raise ShapeMismatchError(
            f"coeffs shape {coeffs.shape} != (n, kernel dim) = ({sys.n}, {null.dim})"
        )
    if null.dim == 0:
        return base
    return verify_kdual(sys, base.G + coeffs @ null.basis.T)


def _subset_budget(m: int, r: int, cap: int, what: str) -> None:
    if math.comb(m, r) > cap:
        raise BudgetExceededError(
            f"{what}: C({m},{r}) = {math.comb(m, r)} subsets exceed cap {cap}"
        )


def worst_erasure_error(
    sys: KFrameSystem, dual: DualSystem, r: int, cap: int = 10**6
) -> tuple[float, tuple[int, ...]]:
    """Exact maximum of ||sum_{i in L} f_i g_i^T|| over all |L| = r.

    Returns the value and the lexicographically first maximizing index set.
    """
    if not (1 <= r < sys.m):
        raise ValueError(f"erasure count must satisfy 1 <= r < m, got {r}")
    _subset_budget(sys.m, r, cap, "worst_erasure_error")
    best = -1.0
    best_lam: tuple[int, ...] = ()
    for lam in itertools.combinations(range(sys.m), r):
        idx = list(lam)
        value = operator_norm(sys.F[:, idx] @ dual.G[:, idx].T)
        if value > best:
            best, best_lam = value, lam
    return best, best_lam


def transform(sys: KFrameSystem, a, u, tol: TolerancePolicy | None = None) -> KFrameSystem:
    """Left-multiply by a square A and right-multiply by a unitary U.

    (A F U, A M_K) is again a valid system for the transported operator, and
    G U is a dual of it whenever G was a dual of the original.
    """
    tol = tol or sys.tol
    a = ensure_matrix(a, "A")
    u = ensure_matrix(u, "U")
    if a.shape != (sys.n, sys.n):
        raise ShapeMismatchError(f"A must be {sys.n}x{sys.n}, got {a.shape}")
    if u.shape != (sys.m, sys.m):
        raise ShapeMismatchError(f"U must be {sys.m}x{sys.m}, got {u.shape}")
    unitary_defect = operator_norm(u.T @ u - np.eye(sys.m))
    if unitary_defect > tol.residual_rel * 10:
        raise ValueError(f"U is not unitary (||U^T U - I|| = {unitary_defect:.3e})")
    return verify_kframe(a @ sys.F @ u, a @ sys.K.matrix, tol)
