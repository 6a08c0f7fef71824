"""Concrete operator spaces ``X`` inside ``M_{h,k}`` and the algebras built from them."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InputError
from .numcore import (
    DEFAULT_TOL,
    Subspace,
    Tolerances,
    adjoint,
    as_cmatrix,
    span,
    support_basis,
    support_projection,
    unit_matrix,
    zero_subspace,
)

__all__ = [
    "OperatorSpace",
    "StarAlgebra",
    "Reduction",
    "from_matrices",
    "pattern_space",
    "parse_pattern",
    "load_space",
    "read_space",
    "dump_document",
    "write_space",
    "load_matrix",
    "nondegenerate_reduce",
    "triple_products",
    "tro_defect",
    "is_tro",
    "generated_tro",
    "linking_algebra",
    "amplify",
]


@dataclass(frozen=True)
class OperatorSpace:
    """A subspace ``X`` of ``h x k`` complex matrices, viewed as maps ``C^k -> C^h``."""

    h: int
    k: int
    space: Subspace
    name: str = ""

    def __post_init__(self):
        if self.space.shape != (self.h, self.k):
            raise InputError(f"space shape {self.space.shape} does not match ambient ({self.h}, {self.k})")

    @property
    def basis(self) -> np.ndarray:
        return self.space.basis

    @property
    def dim(self) -> int:
        return self.space.dim

    def left_support(self, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
        return support_projection(list(self.basis), "left", tol, size=self.h, scale=1.0)

    def right_support(self, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
        return support_projection(list(self.basis), "right", tol, size=self.k, scale=1.0)

    def is_nondegenerate(self, tol: Tolerances = DEFAULT_TOL) -> bool:
        lb = support_basis(list(self.basis), "left", tol, size=self.h, scale=1.0)
        rb = support_basis(list(self.basis), "right", tol, size=self.k, scale=1.0)
        return lb.shape[1] == self.h and rb.shape[1] == self.k

    def with_space(self, space: Subspace, name: str | None = None) -> "OperatorSpace":
        return OperatorSpace(self.h, self.k, space, self.name if name is None else name)

    def __repr__(self):
        return f"OperatorSpace(name={self.name!r}, h={self.h}, k={self.k}, dim={self.dim})"


@dataclass(frozen=True)
class StarAlgebra:
    """A ``*``-closed, product-closed subspace of ``M_n`` with its unit projection."""

    ambient: int
    space: Subspace
    unit: np.ndarray

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def basis(self) -> np.ndarray:
        return self.space.basis

    def closure_defect(self, tol: Tolerances = DEFAULT_TOL) -> dict:
        """Worst relative distances for adjoints and products of basis pairs, plus unit residual."""
        b = self.basis
        if self.dim == 0:
            return {"adjoint": 0.0, "product": 0.0, "unit": 0.0}
        _, _, adj = self.space.contains_all(adjoint(b), tol)
        prods = np.einsum("aij,bjk->abik", b, b).reshape(-1, self.ambient, self.ambient)
        _, _, prod = self.space.contains_all(prods, tol)
        u = self.unit
        unit = max(
            float(np.max(np.abs(np.einsum("ij,ajk->aik", u, b) - b))),
            float(np.max(np.abs(np.einsum("aij,jk->aik", b, u) - b))),
        )
        return {"adjoint": adj, "product": prod, "unit": unit}

    def is_closed(self, tol: Tolerances = DEFAULT_TOL) -> bool:
        d = self.closure_defect(tol)
        return d["adjoint"] <= tol.tol_member and d["product"] <= tol.tol_member and d["unit"] <= 10 * tol.tol_resid


def from_matrices(mats, h: int | None = None, k: int | None = None, name: str = "",
                  tol: Tolerances = DEFAULT_TOL) -> OperatorSpace:
    """Build an :class:`OperatorSpace` spanned by ``mats`` (basis is orthonormalised)."""
    mats = [as_cmatrix(m) for m in mats]
    if mats:
        shape = mats[0].shape
        if h is not None and k is not None and shape != (h, k):
            raise InputError(f"matrices have shape {shape}, ambient is ({h}, {k})")
        h, k = shape
    elif h is None or k is None:
        raise InputError("ambient dimensions are required for an empty basis")
    return OperatorSpace(h, k, span(mats, tol, shape=(h, k)), name)


def parse_pattern(pattern: str) -> np.ndarray:
    """Parse a mask like ``"CCC/00C/00C"`` (``C``/``1``/``*`` = free entry)."""
    rows = [r.strip() for r in pattern.replace(";", "/").split("/")]
    if len({len(r) for r in rows}) != 1:
        raise InputError(f"ragged pattern {pattern!r}")
    return np.array([[ch in "C1*x" for ch in r] for r in rows], dtype=bool)


def pattern_space(pattern, name: str = "") -> OperatorSpace:
    """Span of the matrix units on the free entries of a 0/1 pattern."""
    mask = parse_pattern(pattern) if isinstance(pattern, str) else np.asarray(pattern, dtype=bool)
    h, k = mask.shape
    units = [unit_matrix(h, k, i, j) for i, j in zip(*np.nonzero(mask))]
    return OperatorSpace(h, k, Subspace((h, k), np.array(units).reshape(-1, h, k)), name)


# -- .osj documents ---------------------------------------------------------

def _parse_matrix(obj, h: int, k: int, where: str) -> np.ndarray:
    if not isinstance(obj, list) or len(obj) != h:
        raise InputError(f"{where}: expected {h} rows")
    out = np.zeros((h, k), dtype=complex)
    for i, row in enumerate(obj):
        if not isinstance(row, list) or len(row) != k:
            raise InputError(f"{where}, row {i}: expected {k} entries")
        for j, entry in enumerate(row):
            loc = f"{where}, entry ({i},{j})"
            if not isinstance(entry, list) or len(entry) != 2:
                raise InputError(f"{loc}: expected [re, im]")
            re, im = entry
            for part in (re, im):
                if isinstance(part, bool) or not isinstance(part, (int, float)):
                    raise InputError(f"{loc}: components must be numbers")
                if not math.isfinite(part):
                    raise InputError(f"{loc}: non-finite component")
            out[i, j] = complex(float(re), float(im))
    return out


def _parse_int(obj, key, where):
    value = obj.get(key) if isinstance(obj, dict) else None
    if isinstance(value, bool) or not isinstance(value, int) or value < 0:
        raise InputError(f"{where}: '{key}' must be a non-negative integer")
    return value


def parse_document(doc) -> tuple:
    """Validate an .osj document; return ``(name, h, k, matrices)`` with raw matrices."""
    if isinstance(doc, (str, bytes)):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise InputError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise InputError("document must be a JSON object")
    name = doc.get("name", "")
    if not isinstance(name, str):
        raise InputError("'name' must be a string")
    if "ambient" not in doc:
        raise InputError("missing 'ambient'")
    h = _parse_int(doc["ambient"], "h", "ambient")
    k = _parse_int(doc["ambient"], "k", "ambient")
    basis = doc.get("basis")
    if not isinstance(basis, list):
        raise InputError("'basis' must be a list of matrices")
    mats = [_parse_matrix(m, h, k, f"basis[{n}]") for n, m in enumerate(basis)]
    return name, h, k, mats


def load_space(doc, tol: Tolerances = DEFAULT_TOL) -> OperatorSpace:
    """Load an .osj document (dict or JSON text) into an :class:`OperatorSpace`."""
    name, h, k, mats = parse_document(doc)
    return OperatorSpace(h, k, span(mats, tol, shape=(h, k)), name)


def read_space(path, tol: Tolerances = DEFAULT_TOL) -> OperatorSpace:
    text = Path(path).read_text(encoding="utf-8")
    space = load_space(text, tol)
    if not space.name:
        space = space.with_space(space.space, name=Path(path).stem)
    return space


def load_matrix(path_or_doc) -> np.ndarray:
    """Read a single matrix: ``{"matrix": ...}`` with ``ambient``, or an .osj with one basis element."""
    doc = path_or_doc
    if isinstance(doc, (str, Path)) and Path(doc).exists():
        doc = Path(doc).read_text(encoding="utf-8")
    if isinstance(doc, (str, bytes)):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise InputError(f"invalid JSON: {exc}") from exc
    if isinstance(doc, dict) and "matrix" in doc:
        doc = dict(doc, basis=[doc["matrix"]])
    _, _, _, mats = parse_document(doc)
    if len(mats) != 1:
        raise InputError(f"matrix document must hold exactly one matrix, found {len(mats)}")
    return mats[0]


def _fmt(x: float) -> str:
    text = format(float(x), ".17g")
    return "0" if text in ("0", "-0") else text


def _matrix_json(m: np.ndarray) -> str:
    rows = []
    for row in np.asarray(m, dtype=complex):
        rows.append("[" + ", ".join(f"[{_fmt(z.real)}, {_fmt(z.imag)}]" for z in row) + "]")
    return "[" + ", ".join(rows) + "]"


def dump_document(name: str, h: int, k: int, mats) -> str:
    """Serialise matrices as an .osj document with 17 significant digits."""
    mats = list(mats)
    basis = "[]"
    if mats:
        basis = "[\n    " + ",\n    ".join(_matrix_json(m) for m in mats) + "\n  ]"
    return (
        "{\n"
        f'  "name": {json.dumps(name)},\n'
        f'  "ambient": {{"h": {int(h)}, "k": {int(k)}}},\n'
        f'  "basis": {basis}\n'
        "}\n"
    )


def write_space(path, x: OperatorSpace, mats=None) -> None:
    """Write ``x`` (or explicit spanning ``mats``) to ``path`` in .osj form."""
    mats = list(x.basis) if mats is None else list(mats)
    Path(path).write_text(dump_document(x.name, x.h, x.k, mats), encoding="utf-8")


# -- structural operations --------------------------------------------------

@dataclass(frozen=True)
class Reduction:
    """Result of compressing ``X`` to its supports: ``x = left @ x_reduced @ right^*``."""

    space: OperatorSpace
    left: np.ndarray
    right: np.ndarray

    def lift(self, m: np.ndarray) -> np.ndarray:
        """Map a reduced ``h' x k'`` matrix back into the original ambient."""
        return self.left @ m @ adjoint(self.right)

    def lift_dual(self, z: np.ndarray) -> np.ndarray:
        """Map a reduced ``k' x h'`` matrix (multiplier shape) back into ``k x h``."""
        return self.right @ z @ adjoint(self.left)

    def compress(self, m: np.ndarray) -> np.ndarray:
        return adjoint(self.left) @ m @ self.right

    def compress_dual(self, z: np.ndarray) -> np.ndarray:
        return adjoint(self.right) @ z @ self.left


def nondegenerate_reduce(x: OperatorSpace, tol: Tolerances = DEFAULT_TOL) -> Reduction:
    """Compress ``X`` to ``[X C^k]`` and ``[X^* C^h]``.

    The compression is by isometries, hence completely isometric on ``X``.
    """
    lb = support_basis(list(x.basis), "left", tol, size=x.h, scale=1.0)
    rb = support_basis(list(x.basis), "right", tol, size=x.k, scale=1.0)
    hr, kr = lb.shape[1], rb.shape[1]
    reduced = np.einsum("ia,nij,jb->nab", lb.conj(), x.basis, rb) if x.dim else np.zeros((0, hr, kr))
    space = span(reduced, tol, shape=(hr, kr), scale=1.0)
    return Reduction(OperatorSpace(hr, kr, space, x.name), lb, rb)


def triple_products(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    """All ``a_i b_j^* c_l`` for stacks ``a, b, c`` of equal matrix shape."""
    ab = np.einsum("pij,qlj->pqil", a, b.conj())
    out = np.einsum("pqil,rlk->pqrik", ab, c)
    return out.reshape(-1, a.shape[1], c.shape[2])


def tro_defect(space: Subspace, tol: Tolerances = DEFAULT_TOL) -> tuple:
    """``(closed, worst relative distance)`` of ``a b^* c`` over basis triples."""
    if space.dim == 0:
        return True, 0.0
    b = space.basis
    ok, _, worst = space.contains_all(triple_products(b, b, b), tol)
    return ok, worst


def is_tro(space: Subspace, tol: Tolerances = DEFAULT_TOL) -> bool:
    return tro_defect(space, tol)[0]


def generated_tro(x: OperatorSpace, tol: Tolerances = DEFAULT_TOL) -> Subspace:
    """Smallest subspace containing ``X`` and closed under ``(a, b, c) -> a b^* c``."""
    current = x.space
    for _ in range(x.h * x.k + 1):
        if current.dim == 0:
            return current
        b = current.basis
        grown = span(np.concatenate([b, triple_products(b, b, b)]), tol, scale=1.0)
        if grown.dim == current.dim:
            return current
        current = grown
    return current


def linking_algebra(x: OperatorSpace, tol: Tolerances = DEFAULT_TOL) -> StarAlgebra:
    """The ``*``-algebra ``[[T T^*, T], [T^*, T^* T]]`` in ``M_{h+k}`` for ``T`` the generated TRO."""
    t = generated_tro(x, tol)
    h, k = x.h, x.k
    n = h + k
    if t.dim == 0:
        return StarAlgebra(n, zero_subspace((n, n)), np.zeros((n, n), dtype=complex))
    b = t.basis
    d = t.dim
    ttstar = np.einsum("pij,qlj->pqil", b, b.conj()).reshape(-1, h, h)
    tstart = np.einsum("pji,qjl->pqil", b.conj(), b).reshape(-1, k, k)
    parts = []
    for block in ttstar:
        m = np.zeros((n, n), dtype=complex)
        m[:h, :h] = block
        parts.append(m)
    for block in tstart:
        m = np.zeros((n, n), dtype=complex)
        m[h:, h:] = block
        parts.append(m)
    for i in range(d):
        m = np.zeros((n, n), dtype=complex)
        m[:h, h:] = b[i]
        parts.append(m)
        parts.append(adjoint(m))
    space = span(np.array(parts), tol, scale=1.0)
    unit = support_projection(list(space.basis), "left", tol, size=n, scale=1.0)
    return StarAlgebra(n, space, unit)


def amplify(x: OperatorSpace, n: int, tol: Tolerances = DEFAULT_TOL) -> OperatorSpace:
    """``M_n(X)`` inside ``M_{nh, nk}`` spanned by ``E_ij (x) b``."""
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise InputError(f"amplification level must be a positive integer, got {n!r}")
    mats = []
    for i in range(n):
        for j in range(n):
            e = unit_matrix(n, n, i, j)
            mats.extend(np.kron(e, b) for b in x.basis)
    shape = (n * x.h, n * x.k)
    space = span(np.array(mats).reshape(-1, *shape), tol, shape=shape, scale=1.0)
    return OperatorSpace(shape[0], shape[1], space, f"M_{n}({x.name})" if x.name else "")
