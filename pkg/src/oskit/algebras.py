"""Algebrizations ``(X, m_z)`` with ``m_z(x, y) = x z y`` and their identities.

Also hosts the extreme-point machinery: Kadison's partial-isometry criterion
for TROs and a numerical refuter for arbitrary subspaces.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    InputError,
    InternalConsistencyError,
    NotContractiveError,
    NotQuasiMultiplierError,
    NotTROError,
)
from .multipliers import LocalUnitaryClass, compute_ter, local_unitary_class, qm_violation
from .numcore import (
    DEFAULT_TOL,
    Subspace,
    Tolerances,
    adjoint,
    as_cmatrix,
    batch_op_norm,
    crandn,
    linear_kernel,
    op_norm,
    residual_rows,
    sandwich_operator,
)
from .spaces import OperatorSpace, tro_defect

__all__ = [
    "AlgebrizedSpace",
    "QuasiIdentityCheck",
    "IdentityReport",
    "KadisonVerdict",
    "ProbeResult",
    "Classification",
    "HaagerupCheck",
    "algebrize",
    "check_quasi_identity",
    "check_one_sided_identity",
    "solve_identity",
    "search_quasi_identities",
    "find_identities",
    "mz_power",
    "kadison_extreme_test",
    "extreme_probe",
    "classify_algebrization",
    "haagerup_upper_inequality",
]


@dataclass(frozen=True)
class AlgebrizedSpace:
    base: OperatorSpace
    z: np.ndarray
    tol: Tolerances = DEFAULT_TOL

    def m(self, x, y) -> np.ndarray:
        return np.asarray(x) @ self.z @ np.asarray(y)

    @property
    def h(self):
        return self.base.h

    @property
    def k(self):
        return self.base.k


def algebrize(x: OperatorSpace, z, tol: Tolerances = DEFAULT_TOL) -> AlgebrizedSpace:
    """Equip ``X`` with ``m_z``; ``z`` must be a contractive quasi-multiplier."""
    z = as_cmatrix(z)
    if z.shape != (x.k, x.h):
        raise InputError(f"z must have shape ({x.k}, {x.h}), got {z.shape}")
    nz = op_norm(z)
    if nz > 1 + tol.tol_norm:
        raise NotContractiveError(f"not contractive: ||z|| = {nz:.6g} > 1")
    worst, pair = qm_violation(x, z)
    if worst > tol.tol_member:
        raise NotQuasiMultiplierError(
            f"not closed: x_{pair[0]} z x_{pair[1]} lies {worst:.3g} away from X"
        )
    if x.dim:
        b = x.basis
        # associativity is automatic for matrix products; re-checked on basis triples
        lhs = np.einsum("pij,jl,qlm,mn,rnk->pqrik", b, z, b, z, b)
        ab = np.einsum("pij,jl,qlk->pqik", b, z, b)
        lhs2 = np.einsum("pqij,jl,rlk->pqrik", ab, z, b)
        if np.max(np.abs(lhs - lhs2)) > tol.tol_resid:
            raise InternalConsistencyError("m_z failed associativity")
    return AlgebrizedSpace(x, z, tol)


@dataclass(frozen=True)
class QuasiIdentityCheck:
    verdict: bool
    residual: float
    norm: float
    in_space: bool
    worst_index: int = -1


def _quasi_residuals(a: AlgebrizedSpace, e: np.ndarray) -> np.ndarray:
    b = a.base.basis
    ez = e @ a.z
    ze = a.z @ e
    r = b - ez @ b - b @ ze + ez @ b @ ze
    return batch_op_norm(r) if len(b) else np.zeros(0)


def check_quasi_identity(a: AlgebrizedSpace, e, tol: Tolerances | None = None) -> QuasiIdentityCheck:
    """Test ``x = e z x + x z e - e z x z e`` on every basis vector of ``X``."""
    tol = tol or a.tol
    e = as_cmatrix(e)
    if e.shape != (a.h, a.k):
        raise InputError(f"e must have shape ({a.h}, {a.k}), got {e.shape}")
    res = _quasi_residuals(a, e)
    worst = int(np.argmax(res)) if res.size else -1
    r = float(res[worst]) if res.size else 0.0
    return QuasiIdentityCheck(r <= tol.tol_resid, r, op_norm(e), a.base.space.contains(e, tol), worst)


@dataclass(frozen=True)
class OneSidedCheck:
    verdict: bool
    residual: float
    side: str


def _side_residual(a: AlgebrizedSpace, e: np.ndarray, side: str) -> float:
    b = a.base.basis
    if not len(b):
        return 0.0
    if side == "left":
        r = b - (e @ a.z) @ b
    elif side == "right":
        r = b - b @ (a.z @ e)
    else:
        return max(_side_residual(a, e, "left"), _side_residual(a, e, "right"))
    return float(np.max(batch_op_norm(r)))


def check_one_sided_identity(a: AlgebrizedSpace, e, side: str, tol: Tolerances | None = None) -> OneSidedCheck:
    """``left``: ``e z x = x``; ``right``: ``x z e = x``; ``two``: both, for all basis ``x``."""
    tol = tol or a.tol
    if side not in ("left", "right", "two"):
        raise InputError(f"side must be left, right or two, got {side!r}")
    e = as_cmatrix(e)
    if e.shape != (a.h, a.k):
        raise InputError(f"e must have shape ({a.h}, {a.k}), got {e.shape}")
    r = _side_residual(a, e, side)
    return OneSidedCheck(r <= tol.tol_resid, r, side)


def mz_power(a: AlgebrizedSpace, e, n: int) -> np.ndarray:
    """n-fold ``m_z`` product ``e z e z ... e``."""
    out = np.asarray(e, dtype=complex)
    for _ in range(n - 1):
        out = out @ a.z @ e
    return out


def solve_identity(a: AlgebrizedSpace, side: str, tol: Tolerances | None = None):
    """Contractive one-sided (or two-sided) identity in ``X`` via exact linear solves.

    Returns ``(e or None, any_exists)``. The identity equations are affine in
    the coordinates of ``e``; a contractive solution, when one exists, is
    unique, so it is sought among the minimum-norm solution and the point of
    the solution set nearest ``z^*``.
    """
    tol = tol or a.tol
    x = a.base
    if x.dim == 0:
        return None, False
    b = x.basis
    d = x.dim
    cols, rhs = [], []
    if side in ("left", "two"):
        cols.append(np.einsum("iab,bc,jcd->jadi", b, a.z, b).reshape(-1, d))
        rhs.append(b.reshape(-1))
    if side in ("right", "two"):
        cols.append(np.einsum("jab,bc,icd->jadi", b, a.z, b).reshape(-1, d))
        rhs.append(b.reshape(-1))
    m = np.vstack(cols)
    y = np.concatenate(rhs)
    c0, *_ = np.linalg.lstsq(m, y, rcond=None)
    if np.linalg.norm(m @ c0 - y) > tol.tol_resid * max(1.0, np.linalg.norm(y)):
        return None, False
    null = linear_kernel((d, 1), [m], tol, scale=1.0)
    candidates = [c0]
    if null.dim:
        n = null.flat.T  # (d, nd) orthonormal columns
        target = x.space.coords(adjoint(a.z))
        candidates.append(c0 + n @ (n.conj().T @ (target - c0)))
    for c in candidates:
        e = x.space.combine(c)
        if op_norm(e) <= 1 + tol.tol_norm and check_one_sided_identity(a, e, side, tol).verdict:
            return e, True
    return None, True


@dataclass
class IdentityReport:
    quasi: np.ndarray | None = None
    quasi_residual: float | None = None
    quasi_route: str | None = None
    left: np.ndarray | None = None
    right: np.ndarray | None = None
    two_sided: np.ndarray | None = None
    noncontractive: dict = field(default_factory=dict)
    search_status: str = "exhaustive-linear"


def _newton_system(a: AlgebrizedSpace):
    """Residual map for contractive quasi-identities, quadratic in ``(Re c, Im c)``.

    Besides the defining identity it imposes ``e z e = e`` and Hermitian
    ``e z``, ``z e``; a contractive quasi-identity satisfies all of them.
    """
    b = a.base.basis
    z = a.z

    def residual(es: np.ndarray) -> np.ndarray:
        ez = es @ z
        ze = z @ es
        quasi = b[None] - ez[:, None] @ b[None] - b[None] @ ze[:, None] + ez[:, None] @ b[None] @ ze[:, None]
        idem = ez @ es - es
        herm_l = ez - adjoint(ez)
        herm_r = ze - adjoint(ze)
        parts = [quasi.reshape(len(es), -1), idem.reshape(len(es), -1),
                 herm_l.reshape(len(es), -1), herm_r.reshape(len(es), -1)]
        full = np.concatenate(parts, axis=1)
        return np.concatenate([full.real, full.imag], axis=1)

    return residual


def _newton_batch(a: AlgebrizedSpace, residual, cs: np.ndarray, iters: int, damping: float) -> np.ndarray:
    """Damped Gauss-Newton run on every start of ``cs`` (shape ``(S, d)``) in lockstep.

    Backtracking evaluates all step lengths ``damping**j`` at once and keeps
    the longest that decreases the residual, which is what sequential
    halving would pick.
    """
    b = a.base.basis
    d = len(b)
    ns = len(cs)
    dirs = np.concatenate([b, 1j * b])  # real directions for (Re c, Im c)
    lams = damping ** np.arange(int(np.ceil(np.log(1e-9) / np.log(damping))) + 1)
    e = np.tensordot(cs, b, axes=1)
    f = residual(e)
    fn = np.linalg.norm(f, axis=1)
    active = np.ones(ns, dtype=bool)
    history = []
    for it in range(iters):
        active &= fn >= 1e-14
        # roots attract at least linearly; a crawl means a non-root local minimum
        history.append(fn.copy())
        if it >= 10:
            active &= fn <= 0.5 * history[it - 10]
        idx = np.nonzero(active)[0]
        if not len(idx):
            break
        ea = e[idx]
        probes = np.concatenate([ea[:, None] + dirs[None], ea[:, None] - dirs[None]], axis=1)
        fp = residual(probes.reshape((-1,) + ea.shape[1:])).reshape(len(idx), 4 * d, -1)
        jac = np.swapaxes((fp[:, : 2 * d] - fp[:, 2 * d:]) / 2.0, 1, 2)  # exact: the system is quadratic
        step = -np.einsum("sij,sj->si", np.linalg.pinv(jac), f[idx])
        de = np.tensordot(step[:, :d] + 1j * step[:, d:], b, axes=1)
        # the full step usually succeeds; only failures walk the damping ladder
        full = ea + de
        ff = residual(full)
        ffn = np.linalg.norm(ff, axis=1)
        ok = ffn < fn[idx]
        e[idx[ok]], f[idx[ok]], fn[idx[ok]] = full[ok], ff[ok], ffn[ok]
        has = ok.copy()
        rest = np.nonzero(~ok)[0]
        if len(rest):
            trials = ea[rest, None] + lams[None, 1:, None, None] * de[rest, None]
            ft = residual(trials.reshape((-1,) + ea.shape[1:])).reshape(len(rest), len(lams) - 1, -1)
            ftn = np.linalg.norm(ft, axis=2)
            better = ftn < fn[idx[rest]][:, None]
            got = better.any(axis=1)
            pick = np.argmax(better, axis=1)
            sub = rest[got]
            upd = idx[sub]
            e[upd] = trials[got, pick[got]]
            f[upd] = ft[got, pick[got]]
            fn[upd] = ftn[got, pick[got]]
            has[sub] = True
        active[idx[~has]] = False
    return e


def _snap(e: np.ndarray) -> np.ndarray:
    """Zero real and imaginary parts below rounding level relative to ``||e||``."""
    cut = 1e-15 * max(op_norm(e), 1e-300)
    return np.where(np.abs(e.real) < cut, 0, e.real) + 1j * np.where(np.abs(e.imag) < cut, 0, e.imag)


def search_quasi_identities(a: AlgebrizedSpace, seed=0, starts: int = 32, iters: int = 200,
                            damping: float = 0.5, stop_at_first: bool = False,
                            tol: Tolerances | None = None) -> list:
    """Damped Gauss-Newton from random starts in ``Ball(X)``.

    Returns the verified contractive quasi-identities in start order. An
    empty list is not a proof of non-existence.
    """
    tol = tol or a.tol
    x = a.base
    if x.dim == 0:
        return []
    rng = np.random.default_rng(seed)
    residual = _newton_system(a)
    starts_c = []
    for _ in range(starts):
        c = crandn(x.dim, rng)
        e = x.space.combine(c)
        ne = op_norm(e)
        scale = rng.uniform(0.25, 1.0) / ne if ne > 0 else 1.0
        starts_c.append(x.space.coords(e * scale))
    found = []
    for e in _newton_batch(a, residual, np.array(starts_c), iters, damping):
        e = _snap(e)
        chk = check_quasi_identity(a, e, tol)
        if chk.verdict and chk.norm <= 1 + tol.tol_norm:
            found.append(e)
            if stop_at_first:
                break
    return found


def find_identities(a: AlgebrizedSpace, seed=0, starts: int = 32, tol: Tolerances | None = None) -> IdentityReport:
    tol = tol or a.tol
    rep = IdentityReport()
    for side, attr in (("left", "left"), ("right", "right"), ("two", "two_sided")):
        e, exists = solve_identity(a, side, tol)
        setattr(rep, attr, e)
        if exists and e is None:
            rep.noncontractive[side] = True
    x = a.base
    if x.dim == 0:
        return rep
    zs = adjoint(a.z)
    candidates = []
    if x.space.contains(zs, tol):
        candidates.append(("z*", x.space.project(zs)))
    for route, e in (("two-sided identity", rep.two_sided), ("left identity", rep.left),
                     ("right identity", rep.right)):
        if e is not None:
            candidates.append((route, e))
    for route, e in candidates:
        chk = check_quasi_identity(a, e, tol)
        if chk.verdict and chk.norm <= 1 + tol.tol_norm:
            rep.quasi, rep.quasi_residual, rep.quasi_route = e, chk.residual, route
            return rep
    rep.search_status = "heuristic"
    found = search_quasi_identities(a, seed, starts=starts, stop_at_first=True, tol=tol)
    if found:
        e = found[0]
        rep.quasi, rep.quasi_residual, rep.quasi_route = e, check_quasi_identity(a, e, tol).residual, "newton"
    return rep


# -- extreme points ---------------------------------------------------------

@dataclass(frozen=True)
class KadisonVerdict:
    extreme: bool
    member: bool
    partial_isometry_residual: float
    corner_residual: float
    reason: str = ""


def kadison_extreme_test(t: Subspace, x0, tol: Tolerances = DEFAULT_TOL) -> KadisonVerdict:
    """Kadison's criterion in a TRO: ``x0`` partial isometry and ``(1 - x0 x0^*) t (1 - x0^* x0) = 0``."""
    closed, worst = tro_defect(t, tol)
    if not closed:
        raise NotTROError(f"Kadison requires a TRO (triple-product defect {worst:.3g})")
    x0 = as_cmatrix(x0, t.shape)
    if op_norm(x0) > 1 + tol.tol_norm:
        raise InputError(f"x0 must be contractive, ||x0|| = {op_norm(x0):.6g}")
    h, k = t.shape
    member = t.contains(x0, tol)
    pi = op_norm(x0 - x0 @ adjoint(x0) @ x0)
    if t.dim:
        left = np.eye(h) - x0 @ adjoint(x0)
        right = np.eye(k) - adjoint(x0) @ x0
        corner = float(np.max(batch_op_norm(left @ t.basis @ right)))
    else:
        corner = 0.0
    reasons = []
    if not member:
        reasons.append("not in the TRO")
    if pi > tol.tol_resid:
        reasons.append("not a partial isometry")
    if corner > tol.tol_resid:
        reasons.append("nonzero Kadison corner")
    return KadisonVerdict(not reasons, member, pi, corner, "; ".join(reasons))


@dataclass(frozen=True)
class ProbeResult:
    refuted: bool
    witness: np.ndarray | None
    t: float
    directions_tried: int


def _face_directions(v: Subspace, x0: np.ndarray, tol: Tolerances) -> np.ndarray:
    """Directions ``d in v`` supported where ``x0`` has singular values below 1."""
    h, k = v.shape
    u, s, vh = np.linalg.svd(x0)
    sat_l = np.zeros(h, dtype=bool)
    sat_r = np.zeros(k, dtype=bool)
    sat = s >= 1 - 1e-6
    sat_l[: len(s)] = sat
    sat_r[: len(s)] = sat
    p = u[:, sat_l] @ adjoint(u[:, sat_l])
    q = adjoint(vh[sat_r]) @ vh[sat_r]
    cons = [
        residual_rows(v, np.eye(h * k, dtype=complex)[None]),
        sandwich_operator(p[None], np.eye(k)[None])[0],
        sandwich_operator(np.eye(h)[None], q[None])[0],
    ]
    corner = linear_kernel((h, k), cons, tol, scale=1.0)
    dirs = list(corner.basis)
    ul, vr = u[:, ~sat_l], adjoint(vh[~sat_r])
    for i in range(ul.shape[1]):
        for j in range(vr.shape[1]):
            dirs.append(v.project(np.outer(ul[:, i], vr[:, j].conj())))
    return np.array(dirs).reshape(-1, h, k) if dirs else np.zeros((0, h, k), dtype=complex)


def _max_step(x0: np.ndarray, dirs: np.ndarray, thr: float, depth: int) -> np.ndarray:
    lo = np.zeros(len(dirs))
    hi = np.full(len(dirs), 2.0)
    for _ in range(depth):
        mid = (lo + hi) / 2
        plus = batch_op_norm(x0[None] + mid[:, None, None] * dirs)
        minus = batch_op_norm(x0[None] - mid[:, None, None] * dirs)
        ok = np.maximum(plus, minus) <= thr
        lo = np.where(ok, mid, lo)
        hi = np.where(ok, hi, mid)
    return lo


def extreme_probe(v: Subspace, x0, directions: int = 256, seed=0, depth: int = 40,
                  tol: Tolerances = DEFAULT_TOL) -> ProbeResult:
    """Try to exhibit ``y != 0`` in ``v`` with ``x0 +- y`` in the unit ball.

    A refutation is a proof of non-extremality; ``undecided`` proves nothing.
    """
    x0 = as_cmatrix(x0, v.shape)
    nx = op_norm(x0)
    if nx > 1 + tol.tol_norm:
        raise InputError(f"x0 must be contractive, ||x0|| = {nx:.6g}")
    # a few ulps of slack: along a flat face the norm stays at 1 only up to rounding
    thr = max(1.0, nx) * (1 + 8 * np.finfo(float).eps)
    rng = np.random.default_rng(seed)
    if v.dim == 0:
        return ProbeResult(False, None, 0.0, 0)
    batches = []
    det = _face_directions(v, x0, tol)
    det = np.concatenate([det, v.basis])
    batches.append(det[:directions])
    remaining = directions - len(batches[0])
    if remaining > 0:
        coeffs = crandn((remaining, v.dim), rng)
        batches.append(np.tensordot(coeffs, v.basis, axes=1))
    # feasible steps form an interval [0, t*], so one test at the threshold
    # decides refutation; bisection only runs on the directions that pass
    cutoff = 100 * tol.tol_norm
    tried = 0
    for dirs in batches:
        norms = batch_op_norm(dirs)
        keep = norms > 1e-12
        dirs = dirs[keep] / norms[keep][:, None, None]
        if not len(dirs):
            continue
        tried += len(dirs)
        probe = cutoff * (1 + 1e-6)
        ok = np.maximum(batch_op_norm(x0[None] + probe * dirs), batch_op_norm(x0[None] - probe * dirs)) <= thr
        if not ok.any():
            continue
        dirs = dirs[ok]
        steps = _max_step(x0, dirs, thr, depth)
        best = int(np.argmax(steps))
        if steps[best] > cutoff:
            return ProbeResult(True, steps[best] * dirs[best], float(steps[best]), tried)
    return ProbeResult(False, None, 0.0, tried)


# -- the characterisation pipeline ------------------------------------------

@dataclass
class Classification:
    z_star_in_x: bool
    local_class: LocalUnitaryClass
    ter_dim: int
    ter_is_tro: bool
    z_star_extreme_in_ter: bool | None
    identities: IdentityReport
    checks: dict
    consistent: bool


def classify_algebrization(x: OperatorSpace, z, seed=0, tol: Tolerances = DEFAULT_TOL,
                           strict: bool = True) -> Classification:
    """Evaluate each side of the identity/extreme-point characterisation independently.

    Cross-checks: left identity iff ``z^* in X`` and ``z^* z = 1``; right
    identity iff ``z^* in X`` and ``z z^* = 1``; two-sided iff both; and a
    norm-one quasi-identity ``z^*`` whenever ``z^*`` is in ``X`` and extreme
    in ``Ball(TER(X))``. The last is one-directional only.
    """
    a = algebrize(x, z, tol)
    zs = adjoint(a.z)
    in_x = x.space.contains(zs, tol)
    cls = local_unitary_class(x, a.z, tol)
    ter = compute_ter(x, tol)
    extreme = None
    if ter.is_tro and in_x:
        extreme = kadison_extreme_test(ter.space, ter.space.project(zs), tol).extreme
    ids = find_identities(a, seed, tol=tol)
    checks = {
        "left": (ids.left is not None, in_x and cls.is_left),
        "right": (ids.right is not None, in_x and cls.is_right),
        "two_sided": (ids.two_sided is not None, in_x and cls.is_both),
    }
    consistent = all(lhs == rhs for lhs, rhs in checks.values())
    if in_x and extreme:
        chk = check_quasi_identity(a, zs, tol)
        checks["quasi_from_extreme"] = (chk.verdict and ids.quasi is not None, True)
        consistent = consistent and chk.verdict and ids.quasi is not None
    out = Classification(in_x, cls, ter.space.dim, ter.is_tro, extreme, ids, checks, consistent)
    if strict and not consistent:
        bad = {k: v for k, v in checks.items() if v[0] != v[1]}
        raise InternalConsistencyError(f"characterisation sides disagree: {bad}")
    return out


# -- one-sided Haagerup inequality ------------------------------------------

@dataclass(frozen=True)
class HaagerupCheck:
    verdict: bool
    lhs: float
    rhs_upper: float


def _embed_corner(m: np.ndarray, h: int, k: int) -> np.ndarray:
    out = np.zeros((h + k, h + k), dtype=complex)
    out[:h, h:] = m
    return out


def haagerup_upper_inequality(x: OperatorSpace, z, v, w, xs, ys, tol: Tolerances = DEFAULT_TOL) -> HaagerupCheck:
    """Compare ``||[[v, sum x z y], [0, w]]||`` with a Haagerup-norm upper bound.

    ``v``, ``w`` have shape ``(m, m, h, k)``; ``xs``, ``ys`` have shape
    ``(m, m, R, h, k)`` and represent the tensors ``sum_r x^(r) (x) y^(r)``.
    The bound is ``||A|| ||B||`` for the factorisation ``A (.) B`` read off
    the representation (each term balanced so its factors have equal norm),
    with ``X`` sitting in the corner of ``M_{h+k}`` and ``1`` its identity.
    """
    # a non-contractive z is accepted: the comparison is what exposes the failure
    z = as_cmatrix(z, (x.k, x.h))
    h, k = x.h, x.k
    v = np.asarray(v, dtype=complex)
    w = np.asarray(w, dtype=complex)
    xs = np.asarray(xs, dtype=complex)
    ys = np.asarray(ys, dtype=complex)
    m = v.shape[0]
    if v.shape != (m, m, h, k) or w.shape != (m, m, h, k):
        raise InputError(f"v and w must have shape ({m}, {m}, {h}, {k})")
    if xs.ndim != 5 or xs.shape[:2] != (m, m) or xs.shape[3:] != (h, k) or ys.shape != xs.shape:
        raise InputError(f"xs and ys must have equal shape ({m}, {m}, R, {h}, {k})")

    lhs_blocks = np.zeros((2 * m, 2 * m, h, k), dtype=complex)
    lhs_blocks[:m, :m] = v
    lhs_blocks[:m, m:] = np.einsum("pqrij,jl,pqrlk->pqik", xs, z, ys)
    lhs_blocks[m:, m:] = w
    lhs = op_norm(lhs_blocks.transpose(0, 2, 1, 3).reshape(2 * m * h, 2 * m * k))

    n = h + k
    one = np.eye(n, dtype=complex)
    terms = []  # (row, col, left factor, right factor)
    for p in range(m):
        for q in range(m):
            terms.append((p, q, _embed_corner(v[p, q], h, k), one))
            for r in range(xs.shape[2]):
                terms.append((p, m + q, _embed_corner(xs[p, q, r], h, k), _embed_corner(ys[p, q, r], h, k)))
            terms.append((m + p, m + q, one, _embed_corner(w[p, q], h, k)))
    nt = len(terms)
    a_mat = np.zeros((2 * m * n, nt * n), dtype=complex)
    b_mat = np.zeros((nt * n, 2 * m * n), dtype=complex)
    for s, (row, col, left, right) in enumerate(terms):
        nl, nr = op_norm(left), op_norm(right)
        lam = np.sqrt(nr / nl) if nl > 0 and nr > 0 else 1.0
        a_mat[row * n:(row + 1) * n, s * n:(s + 1) * n] = lam * left
        b_mat[s * n:(s + 1) * n, col * n:(col + 1) * n] = right / lam
    rhs = op_norm(a_mat) * op_norm(b_mat)
    return HaagerupCheck(lhs <= rhs + tol.tol_norm, lhs, rhs)
