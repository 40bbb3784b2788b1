"""Built-in reference systems FIX-A through FIX-D.

Small closed-form K-frames used throughout the test suite and exposed by
the `fixtures` CLI command. Each entry carries the synthesis matrix F, the
operator matrix K, and (where available) a published candidate dual G whose
verification residual is part of the documented behavior: the FIX-C dual is
deliberately kept exactly as published even though it fails the dual
equation by a sign in one entry.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["Fixture", "FIXTURES", "get_fixture"]


@dataclass(frozen=True)
class Fixture:
    name: str
    F: np.ndarray
    K: np.ndarray
    dual: np.ndarray | None
    note: str


def _fix_a() -> Fixture:
    # R^3, frame {e1, e2}, K maps f to (c1 + c2 + c3/2) e1.
    f = np.array([
        [1.0, 0.0],
        [0.0, 1.0],
        [0.0, 0.0],
    ])
    k = np.array([
        [1.0, 1.0, 0.5],
        [0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0],
    ])
    dual = np.array([
        [1.0, 0.0],
        [1.0, 0.0],
        [0.5, 0.0],
    ])
    return Fixture("FIX-A", f, k, dual, "canonical dual {(1,1,1/2), 0}")


def _fix_b() -> Fixture:
    # R^4, frame {e1, e2, e3, e1+e3}, K maps f to (c1+c3) e1 + (c2+c4/2) e2.
    f = np.array([
        [1.0, 0.0, 0.0, 1.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 1.0],
        [0.0, 0.0, 0.0, 0.0],
    ])
    k = np.array([
        [1.0, 0.0, 1.0, 0.0],
        [0.0, 1.0, 0.0, 0.5],
        [0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0],
    ])
    dual = np.array([
        [0.4, 0.0, 0.2, 0.6],
        [0.0, 1.0, 0.0, 0.0],
        [0.4, 0.0, 0.2, 0.6],
        [0.0, 0.5, 0.0, 0.0],
    ])
    return Fixture(
        "FIX-B",
        f,
        k,
        dual,
        "restricted-inverse formula output; not a valid K-dual of F",
    )


def _fix_c() -> Fixture:
    # R^4, columns (1,0,-1,0), (0,0,1,0), (0,0,-1,2), (1/2,0,1/2,0);
    # K sends e1, e2, e3 to e1 and e4 to e4 - e1.
    f = np.array([
        [1.0, 0.0, 0.0, 0.5],
        [0.0, 0.0, 0.0, 0.0],
        [-1.0, 1.0, -1.0, 0.5],
        [0.0, 0.0, 2.0, 0.0],
    ])
    k = np.array([
        [1.0, 1.0, 1.0, -1.0],
        [0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ])
    dual = np.array([
        [1.0, 1.0, 0.0, 0.0],
        [1.0, 1.0, 0.0, 0.0],
        [1.0, 1.0, 0.0, 0.0],
        [0.5, 0.5, 0.5, 1.0],
    ])
    return Fixture(
        "FIX-C",
        f,
        k,
        dual,
        "published dual; F G^T differs from K by a sign at entry (1,4)",
    )


def _fix_d() -> Fixture:
    # R^4, columns -e4, e2, 2e2-e4, e1; K maps f to c1 e1 + c2 e2 + (c3+c4) e4.
    f = np.array([
        [0.0, 0.0, 0.0, 1.0],
        [0.0, 1.0, 2.0, 0.0],
        [0.0, 0.0, 0.0, 0.0],
        [-1.0, 0.0, -1.0, 0.0],
    ])
    k = np.array([
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 1.0],
    ])
    dual = np.array([
        [0.0, 0.0, 0.0, 1.0],
        [0.0, 1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0, 0.0],
    ])
    return Fixture(
        "FIX-D",
        f,
        k,
        dual,
        "valid K-dual with a zero vector; fails MRC for single erasures",
    )


FIXTURES: dict[str, Fixture] = {
    fix.name: fix for fix in (_fix_a(), _fix_b(), _fix_c(), _fix_d())
}


def get_fixture(name: str) -> Fixture:
    key = name.upper()
    if key not in FIXTURES:
        known = ", ".join(sorted(FIXTURES))
        raise KeyError(f"unknown fixture {name!r}; available: {known}")
    return FIXTURES[key]
