"""Dense complex linear algebra substrate.

Everything in oskit is expressed through a handful of primitives defined here:
operator norms, support projections, orthonormal matrix subspaces under the
trace inner product ``<A, B> = trace(A* B)``, and null spaces of stacked
linear constraints acting on an unknown matrix.

Matrices are plain ``numpy`` complex arrays. Vectorisation is row-major
throughout, so ``vec(A @ Z @ B) == kron(A, B.T) @ vec(Z)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np
from scipy.stats import unitary_group

from .errors import InputError

__all__ = [
    "Tolerances",
    "DEFAULT_TOL",
    "Subspace",
    "as_cmatrix",
    "op_norm",
    "hs_norm",
    "adjoint",
    "support_projection",
    "support_basis",
    "span",
    "zero_subspace",
    "full_space",
    "member_distance",
    "linear_kernel",
    "sandwich_operator",
    "intersect",
    "unit_matrix",
    "crandn",
    "random_unitary",
    "is_projection",
]


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds used for every rank and equality decision."""

    tol_rank: float = 1e-9
    tol_member: float = 1e-8
    tol_norm: float = 1e-8
    tol_resid: float = 1e-8

    def __post_init__(self):
        for name in ("tol_rank", "tol_member", "tol_norm", "tol_resid"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise InputError(f"{name} must be a positive finite number, got {value!r}")

    def with_(self, **changes) -> "Tolerances":
        return replace(self, **changes)

    def as_dict(self) -> dict:
        return {
            "tol_rank": self.tol_rank,
            "tol_member": self.tol_member,
            "tol_norm": self.tol_norm,
            "tol_resid": self.tol_resid,
        }


DEFAULT_TOL = Tolerances()


def as_cmatrix(m, shape=None) -> np.ndarray:
    """Coerce ``m`` to a finite 2-d complex array, optionally checking its shape."""
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2:
        raise InputError(f"expected a 2-d matrix, got array of shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InputError("matrix has non-finite entries")
    if shape is not None and arr.shape != tuple(shape):
        raise InputError(f"expected shape {tuple(shape)}, got {arr.shape}")
    return arr


def adjoint(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def op_norm(m) -> float:
    """Largest singular value of ``m`` (0 for empty matrices)."""
    arr = as_cmatrix(m)
    if arr.size == 0:
        return 0.0
    return float(np.linalg.norm(arr, 2))


def hs_norm(m) -> float:
    return float(np.linalg.norm(np.asarray(m, dtype=complex)))


def batch_op_norm(stack: np.ndarray) -> np.ndarray:
    """Operator norms of a stack of matrices with shape ``(..., r, c)``."""
    stack = np.asarray(stack, dtype=complex)
    if stack.shape[-1] == 0 or stack.shape[-2] == 0:
        return np.zeros(stack.shape[:-2])
    return np.linalg.svd(stack, compute_uv=False)[..., 0]


def unit_matrix(rows: int, cols: int, i: int, j: int) -> np.ndarray:
    e = np.zeros((rows, cols), dtype=complex)
    e[i, j] = 1.0
    return e


def _numerical_rank(s: np.ndarray, tol_rank: float, scale: float = 0.0) -> int:
    if s.size == 0:
        return 0
    ref = max(float(s[0]), scale)
    if ref == 0.0:
        return 0
    return int(np.count_nonzero(s > tol_rank * ref))


def support_basis(mats: Sequence[np.ndarray], side: str, tol: Tolerances = DEFAULT_TOL,
                  size: int | None = None, scale: float = 0.0) -> np.ndarray:
    """Orthonormal columns spanning the joint range (``left``) or co-range (``right``)."""
    if side not in ("left", "right"):
        raise InputError(f"side must be 'left' or 'right', got {side!r}")
    mats = [as_cmatrix(m) for m in mats]
    if not mats:
        if size is None:
            raise InputError("size is required for an empty family")
        return np.zeros((size, 0), dtype=complex)
    shape = mats[0].shape
    if any(m.shape != shape for m in mats):
        raise InputError("all matrices must share a shape")
    if side == "left":
        stacked = np.hstack(mats)
    else:
        stacked = np.hstack([adjoint(m) for m in mats])
    n = stacked.shape[0]
    if stacked.size == 0:
        return np.zeros((n, 0), dtype=complex)
    u, s, _ = np.linalg.svd(stacked, full_matrices=False)
    r = _numerical_rank(s, tol.tol_rank, scale)
    return u[:, :r]


def support_projection(mats: Sequence[np.ndarray], side: str, tol: Tolerances = DEFAULT_TOL,
                       size: int | None = None, scale: float = 0.0) -> np.ndarray:
    """Orthogonal projection onto the span of ranges (left) or of adjoint ranges (right).

    An empty family yields the zero projection of dimension ``size``.
    """
    v = support_basis(mats, side, tol, size=size, scale=scale)
    return v @ adjoint(v)


def is_projection(p: np.ndarray, tol: float) -> bool:
    p = np.asarray(p, dtype=complex)
    if p.size == 0:
        return True
    return op_norm(p @ p - p) <= tol and op_norm(p - adjoint(p)) <= tol


@dataclass(frozen=True, eq=False)
class Subspace:
    """Linear span of ``rows x cols`` matrices with a trace-orthonormal basis.

    ``basis`` has shape ``(dim, rows, cols)``; it is read-only.
    """

    shape: tuple
    basis: np.ndarray
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=complex).reshape((-1,) + tuple(self.shape))
        b.flags.writeable = False
        object.__setattr__(self, "basis", b)
        object.__setattr__(self, "shape", tuple(int(s) for s in self.shape))

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def ambient_dim(self) -> int:
        return self.shape[0] * self.shape[1]

    @property
    def flat(self) -> np.ndarray:
        """Basis as rows of a ``(dim, rows*cols)`` matrix."""
        return self.basis.reshape(self.dim, -1)

    def __len__(self):
        return self.dim

    def __iter__(self):
        return iter(self.basis)

    def complement_flat(self) -> np.ndarray:
        """Orthonormal basis of the orthogonal complement, as rows."""
        if "complement" not in self._cache:
            n = self.ambient_dim
            if self.dim == 0:
                comp = np.eye(n, dtype=complex)
            else:
                # rows of vh past the rank are trace-orthogonal to the row space
                _, _, vh = np.linalg.svd(self.flat, full_matrices=True)
                comp = vh[self.dim:].copy()
            comp.flags.writeable = False
            self._cache["complement"] = comp
        return self._cache["complement"]

    def coords(self, m) -> np.ndarray:
        m = np.asarray(m, dtype=complex)
        return self.flat.conj() @ m.reshape(-1)

    def project(self, m) -> np.ndarray:
        m = np.asarray(m, dtype=complex)
        if self.dim == 0:
            return np.zeros(self.shape, dtype=complex)
        return (self.coords(m) @ self.flat).reshape(self.shape)

    def combine(self, coeffs) -> np.ndarray:
        coeffs = np.asarray(coeffs, dtype=complex)
        if self.dim == 0:
            return np.zeros(self.shape, dtype=complex)
        return (coeffs @ self.flat).reshape(self.shape)

    def distance(self, m) -> float:
        m = np.asarray(m, dtype=complex)
        if m.shape != self.shape:
            raise InputError(f"shape mismatch: subspace {self.shape}, matrix {m.shape}")
        return hs_norm(m - self.project(m))

    def batch_distance(self, stack) -> np.ndarray:
        """HS distances of a stack ``(n, rows, cols)`` to the subspace."""
        stack = np.asarray(stack, dtype=complex)
        flat = stack.reshape(stack.shape[0], -1)
        if self.dim == 0:
            return np.linalg.norm(flat, axis=1)
        proj = (flat @ self.flat.conj().T) @ self.flat
        return np.linalg.norm(flat - proj, axis=1)

    def contains(self, m, tol: Tolerances = DEFAULT_TOL) -> bool:
        m = np.asarray(m, dtype=complex)
        return self.distance(m) <= tol.tol_member * max(1.0, hs_norm(m))

    def contains_all(self, stack, tol: Tolerances = DEFAULT_TOL) -> tuple:
        """Return ``(ok, index_of_worst, worst_relative_distance)`` for a stack."""
        stack = np.asarray(stack, dtype=complex)
        if stack.shape[0] == 0:
            return True, -1, 0.0
        d = self.batch_distance(stack)
        scale = np.maximum(1.0, np.linalg.norm(stack.reshape(stack.shape[0], -1), axis=1))
        rel = d / scale
        worst = int(np.argmax(rel))
        return bool(rel[worst] <= tol.tol_member), worst, float(rel[worst])

    def adjoint(self) -> "Subspace":
        return Subspace((self.shape[1], self.shape[0]), adjoint(self.basis))

    def includes(self, other: "Subspace", tol: Tolerances = DEFAULT_TOL) -> bool:
        return self.contains_all(other.basis, tol)[0]

    def equals(self, other: "Subspace", tol: Tolerances = DEFAULT_TOL) -> bool:
        return self.shape == other.shape and self.includes(other, tol) and other.includes(self, tol)

    def random_element(self, rng: np.random.Generator) -> np.ndarray:
        return self.combine(crandn(self.dim, rng))

    def gram_error(self) -> float:
        if self.dim == 0:
            return 0.0
        g = self.flat.conj() @ self.flat.T
        return float(np.max(np.abs(g - np.eye(self.dim))))

    def support_mask(self, tol: float = 1e-10) -> np.ndarray:
        if self.dim == 0:
            return np.zeros(self.shape, dtype=bool)
        return np.max(np.abs(self.basis), axis=0) > tol

    def pattern(self, tol: Tolerances = DEFAULT_TOL):
        """0/1 entry mask if the subspace is exactly the span of matrix units, else ``None``."""
        mask = self.support_mask(max(tol.tol_member, 1e-12))
        if int(mask.sum()) != self.dim:
            return None
        return mask

    def __repr__(self):
        return f"Subspace(shape={self.shape}, dim={self.dim})"


def _stack(mats, shape=None) -> np.ndarray:
    if isinstance(mats, np.ndarray) and mats.ndim == 3:
        arr = np.asarray(mats, dtype=complex)
    else:
        mats = [as_cmatrix(m) for m in mats]
        if not mats:
            if shape is None:
                raise InputError("shape is required for an empty family")
            return np.zeros((0,) + tuple(shape), dtype=complex)
        first = mats[0].shape
        for i, m in enumerate(mats):
            if m.shape != first:
                raise InputError(f"matrix {i} has shape {m.shape}, expected {first}")
        arr = np.stack(mats)
    if shape is not None and arr.shape[1:] != tuple(shape):
        raise InputError(f"expected matrices of shape {tuple(shape)}, got {arr.shape[1:]}")
    if not np.all(np.isfinite(arr)):
        raise InputError("matrix family has non-finite entries")
    return arr


def span(mats, tol: Tolerances = DEFAULT_TOL, shape=None, scale: float = 0.0) -> Subspace:
    """Orthonormal basis of the linear span of a matrix family.

    The rank cutoff is ``tol_rank * max(sigma_max, scale)``; ``scale`` lets
    callers whose inputs are built from unit-norm data keep pure rounding
    noise from being promoted to a dimension.
    """
    arr = _stack(mats, shape)
    shp = arr.shape[1:]
    if arr.shape[0] == 0 or arr.size == 0:
        return Subspace(shp, np.zeros((0,) + shp, dtype=complex))
    flat = arr.reshape(arr.shape[0], -1)
    _, s, vh = np.linalg.svd(flat, full_matrices=False)
    r = _numerical_rank(s, tol.tol_rank, scale)
    return Subspace(shp, vh[:r].reshape((r,) + shp))


def zero_subspace(shape) -> Subspace:
    return Subspace(tuple(shape), np.zeros((0,) + tuple(shape), dtype=complex))


def full_space(shape) -> Subspace:
    r, c = shape
    return Subspace((r, c), np.eye(r * c, dtype=complex).reshape(r * c, r, c))


def member_distance(v: Subspace, m) -> float:
    """Hilbert-Schmidt distance from ``m`` to the subspace ``v``."""
    m = as_cmatrix(m)
    return v.distance(m)


def sandwich_operator(lefts: np.ndarray, rights: np.ndarray) -> np.ndarray:
    """Matrices of ``Z -> L Z R`` for every pair, shape ``(nL*nR, out, in)``.

    ``vec(L Z R) = kron(L, R.T) vec(Z)`` in row-major order.
    """
    lefts = np.asarray(lefts, dtype=complex)
    rights = np.asarray(rights, dtype=complex)
    nl, a, i = lefts.shape
    nr, j, b = rights.shape
    ops = np.einsum("pai,qjb->pqabij", lefts, rights)
    return ops.reshape(nl * nr, a * b, i * j)


def linear_kernel(shape, constraints: Iterable, tol: Tolerances = DEFAULT_TOL,
                  scale: float = 0.0) -> Subspace:
    """Joint null space of linear constraints on an unknown matrix of ``shape``.

    Each constraint is either a 2-d array acting on ``vec(Z)`` (row-major) or
    a pair ``(fn, target)`` where ``fn`` is a complex-linear map on matrices
    and ``target`` is a :class:`Subspace` (or ``None`` meaning ``{0}``); the
    pair demands ``fn(Z)`` lie in ``target``. Rank is decided on the singular
    values of the stacked system with cutoff ``tol_rank * max(sigma_max, scale)``.
    """
    shape = tuple(shape)
    n = shape[0] * shape[1]
    blocks = []
    for c in constraints:
        if isinstance(c, tuple):
            fn, target = c
            blocks.append(constraint_from_map(fn, shape, target))
        else:
            c = np.asarray(c, dtype=complex)
            if c.ndim != 2 or c.shape[1] != n:
                raise InputError(f"constraint must act on {n} unknowns, got shape {c.shape}")
            blocks.append(c)
    blocks = [b for b in blocks if b.shape[0] > 0]
    if not blocks:
        return full_space(shape)
    a = np.vstack(blocks)
    if not np.all(np.isfinite(a)):
        raise InputError("constraint system has non-finite entries")
    # a tall system already yields a square vh; only wide ones need the full basis
    _, s, vh = np.linalg.svd(a, full_matrices=a.shape[0] < n)
    r = _numerical_rank(s, tol.tol_rank, scale)
    null = vh[r:].conj()
    return Subspace(shape, null.reshape((n - r,) + shape))


def residual_rows(target: Subspace | None, ops: np.ndarray) -> np.ndarray:
    """Compose linear operators ``(m, out, in)`` with the quotient by ``target``."""
    if target is None:
        return ops.reshape(-1, ops.shape[-1])
    comp = target.complement_flat()
    if comp.shape[0] == 0:
        return np.zeros((0, ops.shape[-1]), dtype=complex)
    # complement coordinates of the image: conj(C) @ op
    return np.einsum("co,moi->mci", comp.conj(), ops).reshape(-1, ops.shape[-1])


def constraint_from_map(fn, shape, target: Subspace | None = None) -> np.ndarray:
    """Matrix of ``Z -> fn(Z)`` followed by the quotient by ``target``."""
    rows, cols = shape
    images = []
    for i in range(rows):
        for j in range(cols):
            images.append(np.asarray(fn(unit_matrix(rows, cols, i, j)), dtype=complex).reshape(-1))
    op = np.array(images).T  # (out, in)
    return residual_rows(target, op[None])


def intersect(u: Subspace, w: Subspace, tol: Tolerances = DEFAULT_TOL) -> Subspace:
    """Intersection of two subspaces via the kernel of stacked complement projectors."""
    if u.shape != w.shape:
        raise InputError(f"shape mismatch: {u.shape} vs {w.shape}")
    cons = [u.complement_flat().conj(), w.complement_flat().conj()]
    return linear_kernel(u.shape, cons, tol, scale=1.0)


def crandn(shape, rng: np.random.Generator) -> np.ndarray:
    """Standard complex Gaussian samples."""
    return (rng.normal(size=shape) + 1j * rng.normal(size=shape)) / np.sqrt(2)


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    if n == 1:
        return np.array([[np.exp(2j * np.pi * rng.random())]])
    return np.asarray(unitary_group.rvs(n, random_state=rng), dtype=complex)
