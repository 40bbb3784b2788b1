"""Canonical K-dual construction and certification.

The canonical dual is the K-dual whose analysis operator has minimal norm.
It is produced by the minimal-norm factorization: the unique X with
F X = M_K and column range inside the row space of F is X = F^+ M_K, and
the dual vectors are the rows of X. Two alternative restricted-inverse
formulas are provided; they reproduce the canonical dual under inclusion
hypotheses which this module reports rather than assumes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import RestrictedInverseError
from .frames import DualSystem, KFrameSystem, verify_kdual
from .linalg import (
    TolerancePolicy,
    null_space_basis,
    operator_norm,
    pseudo_inverse,
    rank_of,
    restricted_operator,
)

__all__ = [
    "CanonicalDual",
    "RestrictedDualReport",
    "canonical_kdual",
    "dual_vector_map",
    "is_canonical",
    "canonical_kdual_restricted",
]


@dataclass(frozen=True)
class CanonicalDual:
    """Canonical K-dual plus the operators that produce it.

    analysis_map is the m x n coefficient matrix X with F X = M_K (it equals
    G^T); vector_map is the n x n operator C with g_i = C^T f_i; the columns
    of analysis_map lie in the row space of F, which is what makes the
    analysis norm minimal among all K-duals.
    """

    dual: DualSystem
    analysis_map: np.ndarray
    vector_map: np.ndarray
    analysis_norm: float


def canonical_kdual(sys: KFrameSystem) -> CanonicalDual:
    x = pseudo_inverse(sys.F, sys.tol) @ sys.K.matrix
    vector_map = pseudo_inverse(sys.F.T, sys.tol) @ x
    dual = verify_kdual(sys, x.T)
    return CanonicalDual(
        dual=dual,
        analysis_map=x,
        vector_map=vector_map,
        analysis_norm=operator_norm(x),
    )


def dual_vector_map(sys: KFrameSystem) -> np.ndarray:
    """Operator C with canonical dual vectors g_i = C^T f_i and R(C) in R(F).

    For Parseval systems this is the transposed pseudo-inverse of the
    operator, so the canonical dual collapses to K^+ F.
    """
    return canonical_kdual(sys).vector_map


def is_canonical(
    sys: KFrameSystem,
    dual: DualSystem,
    trials: int = 16,
    seed: int = 0,
    tol: TolerancePolicy | None = None,
) -> bool:
    """Minimal-norm test: G is canonical iff G G^T = G Z^T for every dual Z.

    Probes one perturbation per kernel basis vector (which makes the test
    complete, not statistical), the canonical dual itself, and `trials`
    seeded random duals.
    """
    tol = tol or sys.tol
    if not dual.is_valid:
        raise ValueError("is_canonical requires a valid dual")
    g = dual.G
    threshold = tol.residual_rel * 10 * (1.0 + operator_norm(g @ g.T))
    null = null_space_basis(sys.F, tol)
    probes: list[np.ndarray] = [canonical_kdual(sys).dual.G]
    unit = np.ones((sys.n, 1))
    for j in range(null.dim):
        probes.append(g + unit @ null.basis[:, j][None, :])
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        if null.dim == 0:
            break
        probes.append(g + rng.standard_normal((sys.n, null.dim)) @ null.basis.T)
    gram = g @ g.T
    return all(operator_norm(gram - g @ z.T) <= threshold for z in probes)


@dataclass(frozen=True)
class RestrictedDualReport:
    """Both restricted-inverse dual formulas with hypothesis bookkeeping.

    dual_image applies the inverted restriction after projecting frame
    vectors onto the image S_F(R(K)); dual_domain applies the transposed
    inverse after projecting onto R(K). hypotheses records which of the
    three sufficient inclusions hold; when one holds, the corresponding
    formula is guaranteed to reproduce the canonical dual.
    """

    dual_image: DualSystem
    dual_domain: DualSystem
    hypotheses: dict[str, bool]


def canonical_kdual_restricted(sys: KFrameSystem) -> RestrictedDualReport:
    domain = sys.K.range
    s_op = sys.F @ sys.F.T
    coord, image = restricted_operator(s_op, domain, sys.tol)
    if coord.shape[0] < coord.shape[1]:
        raise RestrictedInverseError(
            "frame operator restricted to R(K) is singular",
            defect=coord.shape[1] - coord.shape[0],
        )
    inv = np.linalg.inv(coord)
    d, r = domain.basis, image.basis
    mk_t = sys.K.matrix.T
    g_image = mk_t @ d @ inv @ r.T @ sys.F
    g_domain = mk_t @ r @ inv.T @ d.T @ sys.F
    hypotheses = {
        "frame_in_operator_range": _nested(sys, sys.F, d),
        "operator_range_in_image": _nested(sys, d, r),
        "frame_in_image": _nested(sys, sys.F, r),
    }
    return RestrictedDualReport(
        dual_image=verify_kdual(sys, g_image),
        dual_domain=verify_kdual(sys, g_domain),
        hypotheses=hypotheses,
    )


def _nested(sys: KFrameSystem, inner: np.ndarray, outer: np.ndarray) -> bool:
    if outer.shape[1] == 0:
        return rank_of(inner, sys.tol) == 0
    stacked = np.hstack([outer, inner])
    return rank_of(stacked, sys.tol) == rank_of(outer, sys.tol)
