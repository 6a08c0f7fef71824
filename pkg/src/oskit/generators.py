"""Seeded random instances: rotated pattern spaces, planted TROs, algebrizations."""

from __future__ import annotations

import numpy as np

from .multipliers import quasi_multipliers
from .numcore import DEFAULT_TOL, Tolerances, adjoint, op_norm, random_unitary
from .spaces import OperatorSpace, from_matrices

__all__ = [
    "random_rectangles",
    "rectangle_sum",
    "planted_tro",
    "random_pattern",
    "rotated_pattern_space",
    "random_algebrization",
    "random_partial_isometry",
]


def random_rectangles(rng: np.random.Generator, max_total: int = 8, max_blocks: int = 3) -> list:
    """Random list of ``(l, k)`` with ``sum l + sum k <= max_total``."""
    while True:
        nb = int(rng.integers(1, max_blocks + 1))
        rects = [(int(rng.integers(1, 4)), int(rng.integers(1, 4))) for _ in range(nb)]
        if sum(l + k for l, k in rects) <= max_total:
            return rects


def rectangle_sum(rects, h: int | None = None, k: int | None = None) -> list:
    """Matrix units spanning the block-diagonal sum of rectangles inside ``M_{h,k}``."""
    h = h if h is not None else sum(r[0] for r in rects)
    k = k if k is not None else sum(r[1] for r in rects)
    mats = []
    r0 = c0 = 0
    for l, kk in rects:
        for i in range(l):
            for j in range(kk):
                m = np.zeros((h, k), dtype=complex)
                m[r0 + i, c0 + j] = 1
                mats.append(m)
        r0 += l
        c0 += kk
    return mats


def planted_tro(rng: np.random.Generator, rects=None, pad: tuple = (0, 0), max_total: int = 8,
                tol: Tolerances = DEFAULT_TOL):
    """``U (M_{l1,k1} + ... ) V^*`` with Haar-random ``U``, ``V``; returns ``(space, rects)``.

    ``pad`` adds zero rows/columns (a degenerate TRO) before rotating.
    """
    if rects is None:
        rects = random_rectangles(rng, max_total)
    h = sum(r[0] for r in rects) + pad[0]
    k = sum(r[1] for r in rects) + pad[1]
    u = random_unitary(h, rng)
    v = random_unitary(k, rng)
    mats = [u @ m @ adjoint(v) for m in rectangle_sum(rects, h, k)]
    return from_matrices(mats, h, k, name="planted", tol=tol), list(rects)


def random_pattern(rng: np.random.Generator, h: int, k: int, density: float = 0.5) -> np.ndarray:
    mask = rng.random((h, k)) < density
    if not mask.any():
        mask[rng.integers(h), rng.integers(k)] = True
    return mask


def rotated_pattern_space(rng: np.random.Generator, h: int, k: int, density: float = 0.5,
                          rotate: bool = True, tol: Tolerances = DEFAULT_TOL):
    """Span of the matrix units in a random mask, optionally rotated by random unitaries.

    Returns ``(space, u, v, mask)`` with ``space = u . pattern . v^*``.
    """
    mask = random_pattern(rng, h, k, density)
    u = random_unitary(h, rng) if rotate else np.eye(h, dtype=complex)
    v = random_unitary(k, rng) if rotate else np.eye(k, dtype=complex)
    mats = []
    for i, j in zip(*np.nonzero(mask)):
        m = np.zeros((h, k), dtype=complex)
        m[i, j] = 1
        mats.append(u @ m @ adjoint(v))
    return from_matrices(mats, h, k, tol=tol), u, v, mask


def random_partial_isometry(rng: np.random.Generator, h: int, k: int, rank: int) -> np.ndarray:
    u = random_unitary(h, rng)[:, :rank]
    v = random_unitary(k, rng)[:, :rank]
    return u @ adjoint(v)


def random_algebrization(rng: np.random.Generator, max_dim: int = 3, tol: Tolerances = DEFAULT_TOL):
    """A random ``(X, z)`` with ``X`` a rotated pattern space and ``z`` a contractive quasi-multiplier.

    Half of the time ``z`` is a partial permutation read off the quasi-multiplier
    pattern (so quasi-identities are common); otherwise a random element of
    ``QM(X)`` scaled to a norm in ``(0, 1]``.
    """
    h = int(rng.integers(1, max_dim + 1))
    k = int(rng.integers(1, max_dim + 1))
    x, u, v, mask = rotated_pattern_space(rng, h, k, density=float(rng.uniform(0.3, 0.9)), tol=tol)
    qm = quasi_multipliers(x, tol)
    if qm.dim == 0:
        return x, np.zeros((k, h), dtype=complex)
    if rng.random() < 0.5:
        # quasi-multipliers of u P v^* are v Q u^*, Q spanned by matrix units
        q = adjoint(v) @ qm.basis @ u  # back to pattern coordinates
        qmask = np.max(np.abs(q), axis=0) > 1e-8
        d = np.zeros((k, h), dtype=complex)
        rows, cols = set(), set()
        for i, j in rng.permutation(np.argwhere(qmask)):
            if i not in rows and j not in cols and rng.random() < 0.8:
                d[i, j] = np.exp(2j * np.pi * rng.random())
                rows.add(i)
                cols.add(j)
        z = v @ d @ adjoint(u)
        if qm.contains(z, tol):
            return x, z
    z = qm.random_element(rng)
    nz = op_norm(z)
    return x, z * (rng.uniform(0.2, 1.0) / nz if nz > 0 else 1.0)
