"""Numerical Artin-Wedderburn decomposition of finite-dimensional ``*``-algebras of matrices.

A unital-on-its-support ``*``-algebra ``A`` in ``M_n`` is conjugated by a
unitary into ``(I_m1 (x) M_s1) + ... + (I_mr (x) M_sr) + 0``. Central
idempotents come from the eigenspaces of a random Hermitian central element,
multiplicity spaces from a random Hermitian element of the commutant.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import polar

from .errors import DegenerateSpectrumError, InputError
from .numcore import (
    DEFAULT_TOL,
    Subspace,
    Tolerances,
    adjoint,
    crandn,
    intersect,
    linear_kernel,
    sandwich_operator,
    span,
    support_basis,
    support_projection,
)
from .spaces import StarAlgebra

__all__ = [
    "BlockStructure",
    "star_algebra",
    "commutant",
    "center",
    "block_decompose",
    "block_residual",
]

# eigenvalue gaps below this fraction of the spectral diameter (but above the
# clustering cutoff) are treated as a collision and trigger a reseed
_AMBIGUOUS_GAP = 1e-4


def star_algebra(mats, tol: Tolerances = DEFAULT_TOL, n: int | None = None) -> StarAlgebra:
    """Span of ``mats`` as a :class:`StarAlgebra`; the unit is the support projection."""
    sp = span(mats, tol, shape=None if n is None else (n, n), scale=1.0)
    n = sp.shape[0]
    unit = support_projection(list(sp.basis), "left", tol, size=n, scale=1.0)
    return StarAlgebra(n, sp, unit)


def _commutant_space(basis: np.ndarray, n: int, tol: Tolerances) -> Subspace:
    if len(basis) == 0:
        return linear_kernel((n, n), [], tol)
    eye = np.eye(n, dtype=complex)[None]
    ops = sandwich_operator(eye, basis) - sandwich_operator(basis, eye)
    return linear_kernel((n, n), [ops.reshape(-1, n * n)], tol, scale=1.0)


def commutant(a: StarAlgebra, tol: Tolerances = DEFAULT_TOL) -> StarAlgebra:
    """``{c : c b = b c for all b in a}`` inside ``M_n`` (always unital)."""
    sp = _commutant_space(a.basis, a.ambient, tol)
    return StarAlgebra(a.ambient, sp, np.eye(a.ambient, dtype=complex))


def center(a: StarAlgebra, tol: Tolerances = DEFAULT_TOL) -> Subspace:
    return intersect(a.space, _commutant_space(a.basis, a.ambient, tol), tol)


@dataclass
class BlockStructure:
    """``U^* b U = blockdiag(I_m (x) A_1(b), ..., 0)`` for every ``b`` in the algebra."""

    unitary: np.ndarray
    blocks: list            # (multiplicity, size)
    block_ranges: list      # (start, stop) column ranges of U per block
    null_range: tuple = (0, 0)
    seeds_used: list = field(default_factory=list)
    residual: float = 0.0

    def parts(self, b: np.ndarray) -> list:
        """The ``size x size`` matrices ``A_i(b)`` (first copy of each block)."""
        c = adjoint(self.unitary) @ b @ self.unitary
        out = []
        for (m, s), (lo, _) in zip(self.blocks, self.block_ranges):
            out.append(c[lo:lo + s, lo:lo + s])
        return out

    def assemble(self, parts) -> np.ndarray:
        n = self.unitary.shape[0]
        c = np.zeros((n, n), dtype=complex)
        for (m, s), (lo, hi), p in zip(self.blocks, self.block_ranges, parts):
            c[lo:hi, lo:hi] = np.kron(np.eye(m), p)
        return self.unitary @ c @ adjoint(self.unitary)


def block_residual(bs: BlockStructure, basis: np.ndarray) -> float:
    """Largest deviation of ``U^* b U`` from the declared block form."""
    worst = 0.0
    for b in basis:
        worst = max(worst, float(np.max(np.abs(bs.assemble(bs.parts(b)) - b))) if b.size else 0.0)
    return worst


def _clusters(w: np.ndarray, tol: Tolerances):
    """Group sorted eigenvalues; return index groups and whether a gap was ambiguous."""
    diam = float(w[-1] - w[0]) if len(w) > 1 else 0.0
    # a scalar element has zero diameter; fall back to the spectral radius
    ref = max(diam, float(np.max(np.abs(w))) if len(w) else 0.0, 1e-300)
    cut = 10 * tol.tol_rank * ref
    groups = [[0]]
    ambiguous = False
    for i in range(1, len(w)):
        gap = w[i] - w[i - 1]
        if gap > cut:
            if gap < _AMBIGUOUS_GAP * ref:
                ambiguous = True
            groups.append([i])
        else:
            groups[-1].append(i)
    return groups, ambiguous


def _random_hermitian(sp: Subspace, rng) -> np.ndarray:
    m = sp.combine(crandn(sp.dim, rng))
    return (m + adjoint(m)) / 2


def _isqrt(d: int) -> int:
    r = int(round(np.sqrt(d)))
    return r if r * r == d else -1


def _decompose_once(basis: np.ndarray, r: int, rng, tol: Tolerances):
    """Blocks of a unital ``*``-algebra in ``M_r``; ``None`` on a spectral collision."""
    comm = _commutant_space(basis, r, tol)
    zsp = intersect(span(basis, tol, shape=(r, r), scale=1.0), comm, tol)
    hz = _random_hermitian(zsp, rng)
    w, v = np.linalg.eigh(hz)
    groups, ambiguous = _clusters(w, tol)
    if ambiguous or len(groups) != zsp.dim:
        return None
    cols, blocks = [], []
    for g in groups:
        wj = v[:, g]
        d = len(g)
        comp = adjoint(wj)[None] @ basis @ wj[None]
        bj = span(comp, tol, shape=(d, d), scale=1.0)
        s = _isqrt(bj.dim)
        cj = _commutant_space(bj.basis, d, tol)
        m = _isqrt(cj.dim)
        if s < 1 or m < 1 or m * s != d:
            return None
        if m == 1:
            cols.append(wj)
            blocks.append((1, s))
            continue
        hc = _random_hermitian(cj, rng)
        wc, vc = np.linalg.eigh(hc)
        cgroups, amb = _clusters(wc, tol)
        if amb or len(cgroups) != m or any(len(cg) != s for cg in cgroups):
            return None
        spaces = [vc[:, cg] for cg in cgroups]
        g0 = cj.combine(crandn(cj.dim, rng))
        aligned = [spaces[0]]
        for ea in spaces[1:]:
            t = adjoint(ea) @ g0 @ spaces[0]
            if np.linalg.svd(t, compute_uv=False)[-1] < 1e3 * tol.tol_rank * max(1.0, np.linalg.norm(t)):
                return None
            u, _ = polar(t)
            aligned.append(ea @ u)
        cols.append(wj @ np.hstack(aligned))
        blocks.append((m, s))
    return cols, blocks


def block_decompose(a: StarAlgebra, seed=0, tol: Tolerances = DEFAULT_TOL, max_tries: int = 8) -> BlockStructure:
    """Simultaneous block diagonalisation of ``a`` by a unitary change of basis."""
    n = a.ambient
    if not a.is_closed(tol):
        raise InputError(f"not a *-algebra: closure defects {a.closure_defect(tol)}")
    if a.dim == 0:
        return BlockStructure(np.eye(n, dtype=complex), [], [], (0, n), [])
    vsup = support_basis(list(a.basis), "left", tol, size=n, scale=1.0)
    r = vsup.shape[1]
    vnull = support_basis([np.eye(n) - vsup @ adjoint(vsup)], "left", tol, size=n, scale=1.0)
    red = adjoint(vsup)[None] @ a.basis @ vsup[None]
    ss = np.random.SeedSequence(seed)
    trail = []
    for child in ss.spawn(max_tries):
        trail.append(int(child.generate_state(1)[0]))
        rng = np.random.default_rng(child)
        got = _decompose_once(red, r, rng, tol)
        if got is None:
            continue
        cols, blocks = got
        order = sorted(range(len(blocks)), key=lambda i: (-blocks[i][1], -blocks[i][0]))
        cols = [cols[i] for i in order]
        blocks = [blocks[i] for i in order]
        u = np.hstack([vsup @ c for c in cols] + [vnull])
        ranges, lo = [], 0
        for m, s in blocks:
            ranges.append((lo, lo + m * s))
            lo += m * s
        bs = BlockStructure(u, blocks, ranges, (lo, n), trail)
        unit_err = float(np.max(np.abs(adjoint(u) @ u - np.eye(n))))
        bs.residual = block_residual(bs, a.basis)
        dims_ok = sum(s * s for _, s in blocks) == a.dim
        if unit_err <= tol.tol_resid and bs.residual <= 10 * tol.tol_resid * max(1.0, n) and dims_ok:
            return bs
    raise DegenerateSpectrumError(
        f"spectral splitting failed after {max_tries} seeds", seeds=trail
    )
