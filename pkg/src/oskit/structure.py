"""When an algebrization is a C*-algebra or a one-sided ideal, with the maps that show it."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError
from .multipliers import local_unitary_class, qm_violation
from .numcore import (
    DEFAULT_TOL,
    Subspace,
    Tolerances,
    adjoint,
    as_cmatrix,
    op_norm,
    span,
)
from .spaces import OperatorSpace

__all__ = [
    "CStarVerdict",
    "IdealVerdict",
    "IsomorphismVerdict",
    "cstar_test",
    "ideal_test",
    "cstar_isomorphism",
    "involution",
    "cstar_axiom_defects",
    "products_span",
]


def products_span(lefts: np.ndarray, rights: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> Subspace:
    """``span{a b : a in lefts, b in rights}``."""
    prods = np.einsum("pij,qjk->pqik", lefts, rights)
    shape = (lefts.shape[1], rights.shape[2])
    return span(prods.reshape((-1,) + shape), tol, shape=shape, scale=1.0)


def _inclusion_witness(stack: np.ndarray, target: Subspace, tol: Tolerances, label: str):
    """``None`` if every matrix of ``stack`` is in ``target``, else a witness dict."""
    ok, idx, rel = target.contains_all(stack, tol)
    if ok:
        return None, rel
    return {"condition": label, "index": int(idx), "distance": float(rel)}, rel


def _sample_elements(x: OperatorSpace, n: int, rng: np.random.Generator) -> np.ndarray:
    out = []
    for _ in range(n):
        m = x.space.random_element(rng)
        nm = op_norm(m)
        out.append(m / nm if nm > 0 else m)
    return np.array(out).reshape(n, x.h, x.k)


def involution(z: np.ndarray, m: np.ndarray) -> np.ndarray:
    """``x^# = z^* x^* z^*`` (works on stacks)."""
    zs = adjoint(z)
    return zs @ adjoint(m) @ zs


def cstar_axiom_defects(x: OperatorSpace, z: np.ndarray, table: np.ndarray, samples: np.ndarray) -> dict:
    """Residuals of the C*-axioms for a candidate involution given on the basis.

    ``table[i]`` is the image of basis vector ``i``; the map is extended
    conjugate-linearly through coordinates.
    """
    def sharp(m):
        c = x.space.coords(m)
        return np.tensordot(c.conj(), table, axes=1)

    b = x.basis
    res = {"involutive": 0.0, "anti_multiplicative": 0.0, "cstar_identity": 0.0, "in_space": 0.0}
    if x.dim == 0:
        return res
    res["in_space"] = float(np.max(x.space.batch_distance(table)))
    res["involutive"] = max(op_norm(sharp(sharp(m)) - m) for m in b)
    worst = 0.0
    for i in range(len(b)):
        for j in range(len(b)):
            prod = b[i] @ z @ b[j]
            worst = max(worst, op_norm(sharp(prod) - sharp(b[j]) @ z @ sharp(b[i])))
    res["anti_multiplicative"] = worst
    worst = 0.0
    for m in np.concatenate([b, samples]):
        nm = op_norm(m)
        worst = max(worst, abs(op_norm(sharp(m) @ z @ m) - nm * nm) / max(1.0, nm * nm))
    res["cstar_identity"] = worst
    return res


@dataclass
class CStarVerdict:
    is_cstar: bool
    involution_table: np.ndarray | None = None
    failed_condition: str | None = None
    witness: dict | None = None
    residuals: dict = field(default_factory=dict)


def _check_candidate(x: OperatorSpace, z, tol: Tolerances) -> np.ndarray:
    z = as_cmatrix(z, (x.k, x.h))
    if op_norm(z) > 1 + tol.tol_norm:
        raise InputError(f"z must be contractive, ||z|| = {op_norm(z):.6g}")
    worst, pair = qm_violation(x, z)
    if worst > tol.tol_member:
        raise InputError(f"z is not a quasi-multiplier: pair {pair} off by {worst:.3g}")
    return z


def cstar_test(x: OperatorSpace, z, seed=0, samples: int = 100, tol: Tolerances = DEFAULT_TOL) -> CStarVerdict:
    """Is ``(X, m_z)`` a C*-algebra? Requires ``z`` a local unitary and ``span(Xz) = span(z^* X^*)``."""
    z = _check_candidate(x, z, tol)
    cls = local_unitary_class(x, z, tol)
    res = {"left_unitary": cls.left_residual, "right_unitary": cls.right_residual}
    if not cls.is_both:
        return CStarVerdict(False, None, "U_loc", {
            "condition": "U_loc", "left_residual": cls.left_residual, "right_residual": cls.right_residual,
        }, res)
    if x.dim:
        xz = x.basis @ z
        zx = adjoint(z) @ adjoint(x.basis)
        s_xz = span(xz, tol, shape=(x.h, x.h), scale=1.0)
        s_zx = span(zx, tol, shape=(x.h, x.h), scale=1.0)
        w1, r1 = _inclusion_witness(xz, s_zx, tol, "symmetry: Xz in z*X*")
        w2, r2 = _inclusion_witness(zx, s_xz, tol, "symmetry: z*X* in Xz")
        res["symmetry"] = max(r1, r2)
        if w1 or w2:
            return CStarVerdict(False, None, "symmetry", w1 or w2, res)
    table = involution(z, x.basis)
    rng = np.random.default_rng(seed)
    defects = cstar_axiom_defects(x, z, table, _sample_elements(x, samples, rng))
    res.update(defects)
    bad = [k for k, v in defects.items() if v > (tol.tol_norm if k == "cstar_identity" else tol.tol_resid)]
    if bad:
        return CStarVerdict(False, table, bad[0], {"condition": bad[0], "residual": defects[bad[0]]}, res)
    return CStarVerdict(True, table, None, None, res)


@dataclass
class IdealVerdict:
    side: str
    is_ideal: bool
    psi_table: np.ndarray | None = None
    failed_condition: str | None = None
    witness: dict | None = None
    residuals: dict = field(default_factory=dict)


def ideal_test(x: OperatorSpace, z, side: str = "left", seed=0, samples: int = 100,
               tol: Tolerances = DEFAULT_TOL) -> IdealVerdict:
    """Does ``(X, m_z)`` embed as a left (or right) ideal of a C*-algebra?

    left: ``z z^* = 1``, ``X^*X in zX``, ``Xz in XX^*``; ``psi(x) = x z`` into ``span(XX^*)``.
    right: ``z^* z = 1``, ``XX^* in Xz``, ``zX in X^*X``; ``psi(x) = z x`` into ``span(X^*X)``.
    """
    if side not in ("left", "right"):
        raise InputError(f"side must be left or right, got {side!r}")
    z = _check_candidate(x, z, tol)
    cls = local_unitary_class(x, z, tol)
    b = x.basis
    bs = adjoint(b)
    res = {}
    if side == "left":
        res["unitary"] = cls.right_residual
        if not cls.is_right:
            return IdealVerdict(side, False, None, "UR_loc", {"condition": "zz* = 1", "residual": cls.right_residual}, res)
        psi = b @ z                                   # h x h
        host = products_span(b, bs, tol) if x.dim else Subspace((x.h, x.h), np.zeros((0, x.h, x.h)))
        inner = np.einsum("pij,qjk->pqik", bs, b).reshape(-1, x.k, x.k)
        other = span(z @ b, tol, shape=(x.k, x.k), scale=1.0)
        first = ("X*X in zX", inner, other)
    else:
        res["unitary"] = cls.left_residual
        if not cls.is_left:
            return IdealVerdict(side, False, None, "UL_loc", {"condition": "z*z = 1", "residual": cls.left_residual}, res)
        psi = z @ b                                   # k x k
        host = products_span(bs, b, tol) if x.dim else Subspace((x.k, x.k), np.zeros((0, x.k, x.k)))
        inner = np.einsum("pij,qjk->pqik", b, bs).reshape(-1, x.h, x.h)
        other = span(b @ z, tol, shape=(x.h, x.h), scale=1.0)
        first = ("XX* in Xz", inner, other)
    if x.dim == 0:
        return IdealVerdict(side, True, psi, None, None, res)
    label, stack, target = first
    w, r = _inclusion_witness(stack, target, tol, label)
    res[label] = r
    if w:
        return IdealVerdict(side, False, None, label, w, res)
    label2 = "Xz in XX*" if side == "left" else "zX in X*X"
    w, r = _inclusion_witness(psi, host, tol, label2)
    res[label2] = r
    if w:
        return IdealVerdict(side, False, None, label2, w, res)

    # psi is a homomorphism for m_z, isometric, and its range is an ideal of the host
    mult = 0.0
    for i in range(len(b)):
        for j in range(len(b)):
            prod = b[i] @ z @ b[j]
            img = prod @ z if side == "left" else z @ prod
            mult = max(mult, op_norm(img - psi[i] @ psi[j]))
    res["multiplicative"] = mult
    rng = np.random.default_rng(seed)
    sam = np.concatenate([b, _sample_elements(x, samples, rng)])
    imgs = sam @ z if side == "left" else z @ sam
    iso = max(abs(op_norm(a) - op_norm(m)) for a, m in zip(imgs, sam))
    res["isometry"] = iso
    rng_psi = span(psi, tol, scale=1.0)
    if side == "left":
        acted = np.einsum("pij,qjk->pqik", host.basis, psi)
    else:
        acted = np.einsum("pij,qjk->pqik", psi, host.basis)
    acted = acted.reshape((-1,) + psi.shape[1:])
    ok, idx, rel = rng_psi.contains_all(acted, tol)
    res["ideal"] = rel
    if mult > tol.tol_resid:
        return IdealVerdict(side, False, psi, "multiplicative", {"condition": "multiplicative", "residual": mult}, res)
    if iso > tol.tol_norm:
        return IdealVerdict(side, False, psi, "isometry", {"condition": "isometry", "residual": iso}, res)
    if not ok:
        return IdealVerdict(side, False, psi, "ideal", {"condition": "ideal", "index": int(idx), "distance": rel}, res)
    return IdealVerdict(side, True, psi, None, None, res)


@dataclass
class IsomorphismVerdict:
    verdict: bool
    matrix: np.ndarray
    residuals: dict = field(default_factory=dict)


def cstar_isomorphism(x: OperatorSpace, z, z2, seed=0, tol: Tolerances = DEFAULT_TOL) -> IsomorphismVerdict:
    """``pi(x) = x z z2^*`` from ``(X, m_z)`` onto ``(X, m_z2)``.

    ``matrix`` holds the coordinates of ``pi`` in the orthonormal basis of ``X``.
    """
    for label, zz in (("z", z), ("z2", z2)):
        v = cstar_test(x, zz, seed=seed, tol=tol)
        if not v.is_cstar:
            raise InputError(f"{label} does not give a C*-algebra ({v.failed_condition})")
    z = as_cmatrix(z, (x.k, x.h))
    z2 = as_cmatrix(z2, (x.k, x.h))
    w = z @ adjoint(z2)
    b = x.basis
    imgs = b @ w if x.dim else np.zeros((0, x.h, x.k), dtype=complex)
    res = {}
    res["range"] = float(np.max(x.space.batch_distance(imgs))) if x.dim else 0.0
    mat = np.array([x.space.coords(m) for m in imgs]).T if x.dim else np.zeros((0, 0), dtype=complex)
    s = np.linalg.svd(mat, compute_uv=False) if x.dim else np.ones(0)
    res["min_singular"] = float(s.min()) if s.size else 1.0
    mult = 0.0
    star = 0.0
    for i in range(len(b)):
        for j in range(len(b)):
            mult = max(mult, op_norm((b[i] @ z @ b[j]) @ w - imgs[i] @ z2 @ imgs[j]))
        star = max(star, op_norm(involution(z, b[i]) @ w - involution(z2, imgs[i])))
    res["multiplicative"] = mult
    res["star"] = star
    ok = (res["range"] <= tol.tol_member and res["min_singular"] > tol.tol_rank
          and mult <= tol.tol_resid and star <= tol.tol_resid)
    return IsomorphismVerdict(ok, mat, res)
