import numpy as np
import pytest

from oskit.errors import InputError
from oskit.numcore import adjoint, op_norm, random_unitary, unit_matrix
from oskit.spaces import generated_tro, pattern_space
from oskit.structure import (
    cstar_axiom_defects,
    cstar_isomorphism,
    cstar_test,
    ideal_test,
    involution,
    products_span,
)

E = unit_matrix


def test_cstar_full_matrices_adjoint_is_involution():
    m3 = pattern_space("CCC/CCC/CCC")
    v = cstar_test(m3, np.eye(3))
    assert v.is_cstar
    assert np.allclose(v.involution_table, adjoint(m3.basis))


def test_cstar_unitary_twist():
    u = random_unitary(2, np.random.default_rng(7))
    m2 = pattern_space("CC/CC")
    v = cstar_test(m2, u)
    assert v.is_cstar
    zs = adjoint(u)
    assert np.allclose(v.involution_table, zs @ adjoint(m2.basis) @ zs)
    assert v.residuals["cstar_identity"] <= 1e-8


def test_cstar_staircase_fails_symmetry():
    v = cstar_test(pattern_space("CCC/00C/00C"), np.eye(3))
    assert not v.is_cstar and v.failed_condition == "symmetry"
    assert v.witness["distance"] > 0.5


def test_cstar_requires_local_unitary():
    v = cstar_test(pattern_space("CC/CC"), np.diag([1, 0.5]))
    assert not v.is_cstar and v.failed_condition == "U_loc"


def test_cstar_rejects_non_multiplier():
    with pytest.raises(InputError):
        cstar_test(pattern_space("CCC/00C/00C"), E(3, 3, 2, 0))


def test_involution_is_unique():
    m2 = pattern_space("CC/CC")
    z = np.eye(2)
    rng = np.random.default_rng(0)
    samples = np.array([m2.space.random_element(rng) for _ in range(20)])
    good = cstar_axiom_defects(m2, z, involution(z, m2.basis), samples)
    assert max(good.values()) < 1e-12
    # x -> u x^* u is involutive and anti-multiplicative but breaks the C*-identity
    u = np.diag([1.0, -1.0])
    alt = u @ adjoint(m2.basis) @ u
    bad = cstar_axiom_defects(m2, z, alt, samples)
    assert bad["involutive"] < 1e-12 and bad["anti_multiplicative"] < 1e-12
    assert bad["cstar_identity"] > 1e-3


def test_ideal_examples():
    col = pattern_space("C/C")
    v = ideal_test(col, np.array([[1, 0]]), "left")
    assert v.is_ideal
    assert np.allclose(v.psi_table[:, :, 1], 0)  # first column of M_2
    assert ideal_test(pattern_space("CC"), np.array([[1], [0]]), "right").is_ideal
    assert ideal_test(pattern_space("CC/CC"), np.eye(2), "left").is_ideal


def test_ideal_negative_controls():
    v = ideal_test(pattern_space("C/C"), np.array([[0.5, 0]]), "left")
    assert not v.is_ideal and v.failed_condition == "UR_loc" and v.witness["residual"] == pytest.approx(0.75)
    v = ideal_test(pattern_space("CC"), np.array([[0.5], [0]]), "right")
    assert not v.is_ideal and v.failed_condition == "UL_loc"
    # column space with the wrong side: z z^* = 1 but z^* z is rank one
    v = ideal_test(pattern_space("C/C"), np.array([[1, 0]]), "right")
    assert not v.is_ideal


def test_ideal_implies_algebraic_closure_and_tro():
    col = pattern_space("C/C")
    z = np.array([[1, 0]])
    assert ideal_test(col, z, "left").is_ideal
    host = products_span(col.basis, adjoint(col.basis))
    xz = products_span(col.basis, z[None])
    prods = np.einsum("pij,qjk->pqik", host.basis, xz.basis).reshape(-1, 2, 2)
    assert xz.contains_all(prods)[0]
    assert generated_tro(col).dim == col.dim


def test_isomorphism_examples():
    m2 = pattern_space("CC/CC")
    u = random_unitary(2, np.random.default_rng(2))
    iso = cstar_isomorphism(m2, np.eye(2), u)
    assert iso.verdict
    same = cstar_isomorphism(m2, np.eye(2), np.eye(2))
    assert same.verdict and np.allclose(same.matrix, np.eye(4))
    diag = pattern_space("C0/0C")
    assert cstar_isomorphism(diag, np.eye(2), np.diag([1, -1])).verdict
    with pytest.raises(InputError):
        cstar_isomorphism(pattern_space("CCC/00C/00C"), np.eye(3), np.eye(3))


def test_cstar_implies_two_sided_identity():
    from oskit.algebras import algebrize, classify_algebrization, find_identities

    diag = pattern_space("C0/0C")
    z = np.diag([1, -1])
    assert cstar_test(diag, z).is_cstar
    rep = find_identities(algebrize(diag, z))
    assert op_norm(rep.two_sided - adjoint(z)) < 1e-8
    assert classify_algebrization(diag, z).consistent
