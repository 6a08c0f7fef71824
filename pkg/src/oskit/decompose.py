"""Rectangular-block (Smith) form of finite-dimensional TROs and the ideal decomposition.

Given a TRO ``X`` and an extreme point ``e`` of its unit ball, ``X`` splits
into a two-sided part ``X_T``, a left part ``X_L`` and a right part ``X_R``,
with an isometric embedding ``iota`` into ``span(XX^*) + span(X^*X)``. In
finite dimensions every span is closed, so no weak*-closures are taken.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebras import kadison_extreme_test
from .errors import InputError, InternalConsistencyError, NotExtremeError
from .numcore import (
    DEFAULT_TOL,
    Subspace,
    Tolerances,
    adjoint,
    batch_op_norm,
    crandn,
    is_projection,
    op_norm,
    span,
    support_projection,
)
from .spaces import OperatorSpace, is_tro, linking_algebra, tro_defect
from .wedderburn import block_decompose

__all__ = [
    "SmithResult",
    "DecompositionReport",
    "smith_decompose",
    "construct_extreme_point",
    "ideal_decompose",
]


@dataclass
class SmithResult:
    """``X`` is unitarily the sum of rectangles ``M_{l_i, k_i}`` (each repeated ``mult_i`` times).

    ``unitary`` acts on ``C^{h+k}``; ``X`` sits in the top-right corner.
    """

    unitary: np.ndarray
    rectangles: list
    multiplicities: list
    h: int
    k: int
    block_ranges: list
    residual: float = 0.0
    block_isometry_check: bool = False
    isometry_residual: float = 0.0

    def to_blocks(self, x: np.ndarray) -> list:
        n = self.h + self.k
        big = np.zeros((n, n), dtype=complex)
        big[: self.h, self.h:] = x
        c = adjoint(self.unitary) @ big @ self.unitary
        out = []
        for (l, kk), (lo, _) in zip(self.rectangles, self.block_ranges):
            out.append(c[lo:lo + l, lo + l:lo + l + kk])
        return out

    def from_blocks(self, blocks) -> np.ndarray:
        n = self.h + self.k
        c = np.zeros((n, n), dtype=complex)
        for (l, kk), m, (lo, _), b in zip(self.rectangles, self.multiplicities, self.block_ranges, blocks):
            s = l + kk
            for copy in range(m):
                o = lo + copy * s
                c[o:o + l, o + l:o + s] = b
        big = self.unitary @ c @ adjoint(self.unitary)
        return big[: self.h, self.h:]


def smith_decompose(x: OperatorSpace, seed=0, samples: int = 20, tol: Tolerances = DEFAULT_TOL) -> SmithResult:
    """Block form of a TRO via the Wedderburn decomposition of its linking algebra."""
    closed, worst = tro_defect(x.space, tol)
    if not closed:
        raise InputError(f"not TRO-closed (defect {worst:.3g}); apply generated_tro first")
    h, k = x.h, x.k
    n = h + k
    if x.dim == 0:
        return SmithResult(np.eye(n, dtype=complex), [], [], h, k, [], 0.0, True, 0.0)
    link = linking_algebra(x, tol)
    bs = block_decompose(link, seed, tol)
    u = bs.unitary.copy()
    corner = np.zeros((n, n), dtype=complex)
    corner[:h, :h] = np.eye(h)
    rects, mults = [], []
    for (m, s), (lo, _) in zip(bs.blocks, bs.block_ranges):
        f = u[:, lo:lo + s]
        pi = adjoint(f) @ corner @ f
        pi = (pi + adjoint(pi)) / 2
        w, r = np.linalg.eigh(pi)
        if np.max(np.minimum(np.abs(w), np.abs(w - 1))) > 10 * tol.tol_resid:
            raise InternalConsistencyError("corner projection is not a projection on a simple block")
        r = r[:, ::-1]
        l = int(np.count_nonzero(w > 0.5))
        if l == 0 or l == s:
            raise InternalConsistencyError("a simple block of the linking algebra misses one corner")
        for copy in range(m):
            o = lo + copy * s
            u[:, o:o + s] = u[:, o:o + s] @ r
        rects.append((l, s - l))
        mults.append(m)
    res = SmithResult(u, rects, mults, h, k, list(bs.block_ranges))
    if sum(l * kk for l, kk in rects) != x.dim:
        raise InternalConsistencyError(f"rectangle dimensions {rects} do not add up to dim X = {x.dim}")
    res.residual = max(op_norm(res.from_blocks(res.to_blocks(b)) - b) for b in x.basis)
    rng = np.random.default_rng(seed)
    iso = 0.0
    for _ in range(samples):
        m = x.space.random_element(rng)
        parts = res.to_blocks(m)
        iso = max(iso, abs(op_norm(m) - max(op_norm(p) for p in parts)))
    res.isometry_residual = iso
    res.block_isometry_check = iso <= 10 * tol.tol_norm and res.residual <= 10 * tol.tol_resid
    return res


def construct_extreme_point(x: OperatorSpace, seed=0, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """A maximal partial isometry in each rectangle, pulled back into ``X``.

    The choice is canonical rather than random: each rectangle receives the
    polar part of the block image of ``P_X(J)``, ``J`` the truncated identity
    of ``M_{h,k}``. This yields ``I_n`` for ``M_n`` and ``[I; 0]`` for a tall
    full rectangle.
    """
    if x.dim == 0:
        raise InputError("the zero space has no nonzero extreme point")
    sm = smith_decompose(x, seed, tol=tol)
    j = np.eye(x.h, x.k, dtype=complex)
    parts = []
    for b, (l, kk) in zip(sm.to_blocks(x.space.project(j)), sm.rectangles):
        w, _, vh = np.linalg.svd(b)
        r = min(l, kk)
        parts.append(w[:, :r] @ vh[:r])
    e = sm.from_blocks(parts)
    e = x.space.project(e)
    verdict = kadison_extreme_test(x.space, e, tol)
    if not verdict.extreme:
        raise InternalConsistencyError(f"constructed point fails the Kadison test: {verdict.reason}")
    return e


@dataclass
class Verification:
    name: str
    residual: float
    passed: bool


@dataclass
class DecompositionReport:
    e: np.ndarray
    p: np.ndarray
    q: np.ndarray
    q1: np.ndarray
    q2: np.ndarray
    parts: dict
    iota_table: list
    verifications: list = field(default_factory=list)
    alt_iota: bool = False

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verifications)

    @property
    def part_dims(self) -> tuple:
        return tuple(self.parts[n].dim for n in ("T", "L", "R"))

    def residual(self, name: str) -> float:
        for v in self.verifications:
            if v.name == name:
                return v.residual
        raise KeyError(name)


def _proj_defect(p: np.ndarray) -> float:
    if p.size == 0:
        return 0.0
    return max(op_norm(p @ p - p), op_norm(p - adjoint(p)))


def _span_or_zero(mats: np.ndarray, shape, tol) -> Subspace:
    return span(mats.reshape((-1,) + tuple(shape)), tol, shape=shape, scale=1.0)


def _amplified_samples(x: OperatorSpace, level: int, count: int, rng) -> list:
    """Random ``level x level`` matrices over ``X`` as ``(level, level, h, k)`` arrays."""
    out = []
    for _ in range(count):
        c = crandn((level, level, x.dim), rng)
        out.append(np.tensordot(c, x.basis, axes=1))
    return out


def _block(m: np.ndarray) -> np.ndarray:
    n1, n2, a, b = m.shape
    return m.transpose(0, 2, 1, 3).reshape(n1 * a, n2 * b)


def ideal_decompose(x: OperatorSpace, e=None, alt_iota: bool = False, seed=0, samples: int = 100,
                    amp_samples: int = 10, tol: Tolerances = DEFAULT_TOL) -> DecompositionReport:
    """Split a nondegenerate TRO as ``X_T + X_L + X_R`` relative to the extreme point ``e``.

    ``e`` defaults to :func:`construct_extreme_point`. With ``alt_iota`` the
    two-sided part is sent to the right summand instead of the left.
    """
    if not is_tro(x.space, tol):
        raise InputError("ideal decomposition requires a TRO-closed space")
    if not x.is_nondegenerate(tol):
        raise InputError("ideal decomposition requires a nondegenerate space")
    if e is None:
        e = construct_extreme_point(x, seed, tol)
    e = np.asarray(e, dtype=complex)
    if e.shape != (x.h, x.k):
        raise InputError(f"e must have shape ({x.h}, {x.k}), got {e.shape}")
    kad = kadison_extreme_test(x.space, e, tol)
    if not kad.extreme:
        raise NotExtremeError(f"not an extreme point: {kad.reason}")
    h, k = x.h, x.k
    b = x.basis
    bs = adjoint(b)
    ih, ik = np.eye(h), np.eye(k)
    es = adjoint(e)
    left_defect = ih - e @ es     # 1 - e e^*  on C^h
    right_defect = ik - es @ e    # 1 - e^* e  on C^k
    xdx = np.einsum("pij,jl,qlm->pqim", b, right_defect, bs).reshape(-1, h, h)
    xdy = np.einsum("pij,jl,qlm->pqim", bs, left_defect, b).reshape(-1, k, k)
    p = support_projection(list(xdx), "left", tol, size=h, scale=1.0)
    q = support_projection(list(xdy), "left", tol, size=k, scale=1.0)
    q1 = es @ (ih - p) @ e @ (ik - q)
    q2 = ik - q - q1

    parts = {
        "T": x.with_space(_span_or_zero(b @ q1, (h, k), tol), "X_T"),
        "L": x.with_space(_span_or_zero(b @ q, (h, k), tol), "X_L"),
        "R": x.with_space(_span_or_zero(b @ q2, (h, k), tol), "X_R"),
    }
    checks = []
    thr = 10 * tol.tol_resid

    def add(name, r, limit=thr):
        checks.append(Verification(name, float(r), bool(r <= limit)))

    # (v1) projections
    add("v1_projections", max(_proj_defect(p), _proj_defect(q), _proj_defect(q1), _proj_defect(q2)))
    add("v1_q1_q_orthogonal", op_norm(q1 @ q))
    # (v2)
    add("v2_pXq", float(np.max(batch_op_norm(p @ b @ q))))
    # direct sum and cross-checks
    dims = sum(parts[n].dim for n in "TLR")
    add("direct_sum_dims", abs(dims - x.dim), 0)
    joined = span(np.concatenate([parts[n].basis for n in "TLR"]), tol, shape=(h, k), scale=1.0)
    add("direct_sum_span", float(abs(joined.dim - x.dim)), 0)
    simple_t = _span_or_zero(b - p @ b - b @ q, (h, k), tol)
    simple_r = _span_or_zero(p @ b, (h, k), tol)
    add("cross_check_T", _space_distance(simple_t, parts["T"].space, tol))
    add("cross_check_R", _space_distance(simple_r, parts["R"].space, tol))
    # (v3) TRO-closed parts, pairwise *-orthogonal
    add("v3_parts_tro", max(tro_defect(parts[n].space, tol)[1] for n in "TLR"), tol.tol_member)
    orth = 0.0
    for a_name, b_name in (("T", "L"), ("T", "R"), ("L", "R")):
        pa, pb = parts[a_name].basis, parts[b_name].basis
        if len(pa) and len(pb):
            orth = max(orth, float(np.max(batch_op_norm(np.einsum("pji,qjk->pqik", pa.conj(), pb)))),
                       float(np.max(batch_op_norm(np.einsum("pij,qkj->pqik", pa, pb.conj())))))
    add("v3_star_orthogonal", orth)

    def split(m):
        return m @ q1, m @ q, m @ q2

    def iota(m):
        mt, ml, mr = split(m)
        if alt_iota:
            return ml @ es, es @ (mr + mt)
        return (mt + ml) @ es, es @ mr

    iota_table = [iota(m) for m in b]

    # exact identities behind the isometry of iota
    ident = 0.0
    for i in range(len(b)):
        for j in range(len(b)):
            ti, li, ri = split(b[i])
            tj, lj, rj = split(b[j])
            ident = max(ident,
                        op_norm((ti @ es) @ adjoint(tj @ es) - b[i] @ q1 @ bs[j]),
                        op_norm((li @ es) @ adjoint(lj @ es) - b[i] @ q @ bs[j]),
                        op_norm(adjoint(es @ ri) @ (es @ rj) - q2 @ bs[i] @ b[j] @ q2),
                        op_norm(adjoint(es @ ti) @ (es @ tj) - q1 @ bs[i] @ b[j] @ q1))
    add("iota_algebraic_identities", ident)

    # (v4), (v5) norm identities on samples and amplifications
    rng = np.random.default_rng(seed)
    linf = 0.0
    iso = 0.0
    sam = [x.space.random_element(rng) for _ in range(samples)] + list(b)
    for m in sam:
        nm = op_norm(m)
        mt, ml, mr = split(m)
        linf = max(linf, abs(nm - max(op_norm(mt), op_norm(ml), op_norm(mr))) / max(1.0, nm))
        i1, i2 = iota(m)
        iso = max(iso, abs(nm - max(op_norm(i1), op_norm(i2))) / max(1.0, nm))
    for level in (1, 2, 3):
        for m in _amplified_samples(x, level, amp_samples, rng):
            nm = op_norm(_block(m))
            pieces = [_block(m @ qq) for qq in (q1, q, q2)]
            linf = max(linf, abs(nm - max(op_norm(pc) for pc in pieces)) / max(1.0, nm))
            mt, ml, mr = m @ q1, m @ q, m @ q2
            if alt_iota:
                i1, i2 = ml @ es, es @ (mr + mt)
            else:
                i1, i2 = (mt + ml) @ es, es @ mr
            iso = max(iso, abs(nm - max(op_norm(_block(i1)), op_norm(_block(i2)))) / max(1.0, nm))
    add("v4_linf_norm", linf)
    add("v5_iota_isometry", iso)

    # (v6) ideal structure of the images inside span(XX^*) + span(X^*X)
    host_l = _span_or_zero(np.einsum("pij,qjk->pqik", b, bs), (h, h), tol)
    host_r = _span_or_zero(np.einsum("pij,qjk->pqik", bs, b), (k, k), tol)
    pt, pl, pr = (parts[n].basis for n in "TLR")
    if alt_iota:
        img_t = (_span_or_zero(es @ pt, (k, k), tol), host_r)
    else:
        img_t = (_span_or_zero(pt @ es, (h, h), tol), host_l)
    img_l = (_span_or_zero(pl @ es, (h, h), tol), host_l)
    img_r = (_span_or_zero(es @ pr, (k, k), tol), host_r)
    v6 = max(
        _ideal_defect(*img_t, left=True, right=True, star=True, tol=tol),
        _ideal_defect(*img_l, left=True, tol=tol),
        _ideal_defect(*img_r, right=True, tol=tol),
    )
    add("v6_ideals", v6, tol.tol_member)
    return DecompositionReport(e, p, q, q1, q2, parts, iota_table, checks, alt_iota)


def _space_distance(a: Subspace, b: Subspace, tol: Tolerances) -> float:
    """Largest relative distance of either basis from the other space."""
    worst = 0.0
    if a.dim:
        worst = max(worst, b.contains_all(a.basis, tol)[2])
    if b.dim:
        worst = max(worst, a.contains_all(b.basis, tol)[2])
    if a.dim != b.dim:
        worst = max(worst, 1.0)
    return worst


def _ideal_defect(img: Subspace, host: Subspace, left=False, right=False, star=False,
                  tol: Tolerances = DEFAULT_TOL) -> float:
    if img.dim == 0:
        return 0.0
    worst = host.contains_all(img.basis, tol)[2]
    n = img.shape[0]
    if left:
        prods = np.einsum("pij,qjk->pqik", host.basis, img.basis).reshape(-1, n, n)
        worst = max(worst, img.contains_all(prods, tol)[2])
    if right:
        prods = np.einsum("pij,qjk->pqik", img.basis, host.basis).reshape(-1, n, n)
        worst = max(worst, img.contains_all(prods, tol)[2])
    if star:
        worst = max(worst, img.contains_all(adjoint(img.basis), tol)[2])
    return float(worst)
