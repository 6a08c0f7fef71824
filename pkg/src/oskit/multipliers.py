"""Quasi-, left and right multipliers of a concrete operator space.

With ``X`` inside ``M_{h,k}`` (maps ``C^k -> C^h``):

* ``QM(X) = {z in M_{k,h} : X z X in X}``
* ``LM(X) = {a in M_h : a X in X}``
* ``RM(X) = {b in M_k : X b in X}``

All three are computed relative to the supplied embedding after compressing
``X`` to its left and right supports, then lifted back into the original
ambient. The results are therefore tagged ``embedding-relative``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .numcore import (
    DEFAULT_TOL,
    Subspace,
    Tolerances,
    adjoint,
    as_cmatrix,
    intersect,
    linear_kernel,
    op_norm,
    residual_rows,
    sandwich_operator,
    span,
)
from .spaces import OperatorSpace, nondegenerate_reduce, tro_defect

SEMANTICS = "embedding-relative QM"

__all__ = [
    "SEMANTICS",
    "MultiplierSpaces",
    "LocalUnitaryClass",
    "TER",
    "compute_multipliers",
    "quasi_multipliers",
    "local_unitary_class",
    "compute_ter",
    "qm_violation",
]


@dataclass(frozen=True)
class MultiplierSpaces:
    qm: Subspace
    lm: Subspace
    rm: Subspace
    semantics: str = SEMANTICS


@dataclass(frozen=True)
class LocalUnitaryClass:
    is_left: bool
    is_right: bool
    left_residual: float
    right_residual: float

    @property
    def is_both(self) -> bool:
        return self.is_left and self.is_right


@dataclass(frozen=True)
class TER:
    space: Subspace
    is_tro: bool
    tro_residual: float


def _lift(sub: Subspace, left: np.ndarray, right: np.ndarray, tol: Tolerances) -> Subspace:
    if sub.dim == 0:
        return Subspace((left.shape[0], right.shape[0]), np.zeros((0, left.shape[0], right.shape[0])))
    lifted = np.einsum("ia,nab,jb->nij", left, sub.basis, right.conj())
    return span(lifted, tol, scale=1.0)


def _qm_reduced(x: OperatorSpace, tol: Tolerances) -> Subspace:
    b = x.basis
    if x.dim == 0:
        return linear_kernel((x.k, x.h), [], tol)
    rows = residual_rows(x.space, sandwich_operator(b, b))
    return linear_kernel((x.k, x.h), [rows], tol, scale=1.0)


def _lm_reduced(x: OperatorSpace, tol: Tolerances) -> Subspace:
    if x.dim == 0:
        return linear_kernel((x.h, x.h), [], tol)
    ident = np.eye(x.h, dtype=complex)[None]
    rows = residual_rows(x.space, sandwich_operator(ident, x.basis))
    return linear_kernel((x.h, x.h), [rows], tol, scale=1.0)


def _rm_reduced(x: OperatorSpace, tol: Tolerances) -> Subspace:
    if x.dim == 0:
        return linear_kernel((x.k, x.k), [], tol)
    ident = np.eye(x.k, dtype=complex)[None]
    rows = residual_rows(x.space, sandwich_operator(x.basis, ident))
    return linear_kernel((x.k, x.k), [rows], tol, scale=1.0)


def quasi_multipliers(x: OperatorSpace, tol: Tolerances = DEFAULT_TOL) -> Subspace:
    """``QM(X)`` as a subspace of ``M_{k,h}``."""
    red = nondegenerate_reduce(x, tol)
    return _lift(_qm_reduced(red.space, tol), red.right, red.left, tol)


def compute_multipliers(x: OperatorSpace, tol: Tolerances = DEFAULT_TOL) -> MultiplierSpaces:
    red = nondegenerate_reduce(x, tol)
    xs = red.space
    qm = _lift(_qm_reduced(xs, tol), red.right, red.left, tol)
    lm = _lift(_lm_reduced(xs, tol), red.left, red.left, tol)
    rm = _lift(_rm_reduced(xs, tol), red.right, red.right, tol)
    return MultiplierSpaces(qm, lm, rm)


def qm_violation(x: OperatorSpace, z) -> tuple:
    """Worst relative distance of ``x_i z x_j`` from ``X`` and the offending pair."""
    z = as_cmatrix(z, (x.k, x.h))
    if x.dim == 0:
        return 0.0, None
    b = x.basis
    prods = np.einsum("pij,jl,qlk->pqik", b, z, b).reshape(-1, x.h, x.k)
    d = x.space.batch_distance(prods)
    i = int(np.argmax(d))
    return float(d[i]), divmod(i, x.dim)


def local_unitary_class(x: OperatorSpace, z, tol: Tolerances = DEFAULT_TOL) -> LocalUnitaryClass:
    """Flags for ``z^* z = 1_{H_1}`` (left) and ``z z^* = 1_{H_2}`` (right).

    ``1_{H_1}`` and ``1_{H_2}`` are the left and right support projections of
    ``X``; for a nondegenerate space they are the identities ``I_h``, ``I_k``.
    """
    try:
        z = as_cmatrix(z, (x.k, x.h))
    except InputError as exc:
        raise InputError(f"z must have shape ({x.k}, {x.h}): {exc}") from exc
    left = op_norm(adjoint(z) @ z - x.left_support(tol))
    right = op_norm(z @ adjoint(z) - x.right_support(tol))
    return LocalUnitaryClass(left <= tol.tol_resid, right <= tol.tol_resid, left, right)


def compute_ter(x: OperatorSpace, tol: Tolerances = DEFAULT_TOL, qm: Subspace | None = None) -> TER:
    """``TER(X) = X cap QM(X)^*`` with a TRO-closure check."""
    if qm is None:
        qm = quasi_multipliers(x, tol)
    ter = intersect(x.space, qm.adjoint(), tol)
    closed, worst = tro_defect(ter, tol)
    return TER(ter, closed, worst)
