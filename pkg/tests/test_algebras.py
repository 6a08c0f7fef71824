import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oskit.algebras import (
    algebrize,
    check_one_sided_identity,
    check_quasi_identity,
    classify_algebrization,
    extreme_probe,
    find_identities,
    haagerup_upper_inequality,
    kadison_extreme_test,
    mz_power,
    search_quasi_identities,
)
from oskit.errors import InputError, NotContractiveError, NotQuasiMultiplierError, NotTROError
from oskit.generators import random_algebrization
from oskit.multipliers import compute_ter
from oskit.numcore import adjoint, op_norm, random_unitary, span, unit_matrix
from oskit.spaces import pattern_space
from oskit.structure import cstar_test, ideal_test

E = unit_matrix
STAIRCASE = "CCC/00C/00C"
E1133 = E(3, 3, 0, 0) + E(3, 3, 2, 2)


@pytest.fixture
def staircase():
    return pattern_space(STAIRCASE)


def test_algebrize_examples(staircase):
    a = algebrize(staircase, np.eye(3))
    assert np.allclose(a.m(E(3, 3, 0, 1), E(3, 3, 1, 2)), E(3, 3, 0, 2))
    m2 = pattern_space("CC/CC")
    assert np.allclose(algebrize(m2, np.eye(2)).m(E(2, 2, 0, 1), E(2, 2, 1, 0)), E(2, 2, 0, 0))
    with pytest.raises(NotContractiveError, match="not contractive"):
        algebrize(m2, 2 * np.eye(2))
    with pytest.raises(NotQuasiMultiplierError, match="not closed"):
        algebrize(staircase, E(3, 3, 2, 0))
    with pytest.raises(InputError):
        algebrize(staircase, np.eye(2))


def test_check_quasi_identity_examples(staircase):
    chk = check_quasi_identity(algebrize(staircase, np.eye(3)), E1133)
    assert chk.verdict and chk.residual <= 1e-12 and chk.in_space and chk.norm == pytest.approx(1)
    m2 = pattern_space("CC/CC")
    assert check_quasi_identity(algebrize(m2, np.eye(2)), np.eye(2)).verdict
    dual = pattern_space("CCC/CCC/0CC")
    bad = check_quasi_identity(algebrize(dual, E1133), E1133)
    assert not bad.verdict and bad.residual > 0.5
    with pytest.raises(InputError):
        check_quasi_identity(algebrize(m2, np.eye(2)), np.eye(3))


def test_one_sided_identity_examples(staircase):
    col = pattern_space("C/C")
    a = algebrize(col, np.array([[1, 0]]))
    e1 = np.array([[1], [0]])
    # x z e1 = x for every column x, while e1 z x only keeps the first entry
    assert check_one_sided_identity(a, e1, "right").verdict
    assert not check_one_sided_identity(a, e1, "left").verdict
    m2 = pattern_space("CC/CC")
    assert check_one_sided_identity(algebrize(m2, np.eye(2)), np.eye(2), "two").verdict
    assert not check_one_sided_identity(algebrize(staircase, np.eye(3)), E1133, "left").verdict
    with pytest.raises(InputError):
        check_one_sided_identity(a, e1, "middle")


def test_find_identities_staircase(staircase):
    rep = find_identities(algebrize(staircase, np.eye(3)), seed=0)
    assert rep.left is None and rep.right is None and rep.two_sided is None
    assert rep.search_status == "heuristic"
    assert op_norm(rep.quasi - E1133) < 1e-8


def test_find_identities_full_matrices():
    rep = find_identities(algebrize(pattern_space("CCC/CCC/CCC"), np.eye(3)))
    assert np.allclose(rep.two_sided, np.eye(3))
    assert np.allclose(rep.quasi, np.eye(3))
    assert rep.search_status == "exhaustive-linear"


def test_find_identities_column_space():
    rep = find_identities(algebrize(pattern_space("C/C"), np.array([[1, 0]])))
    assert rep.left is None
    assert np.allclose(rep.right, [[1], [0]])
    assert np.allclose(rep.quasi, [[1], [0]])


def test_noncontractive_identity_is_not_reported():
    # X = C diag(1, 1/2): the only identity for z = a^{-1}/2 has norm 2
    a = np.diag([1.0, 0.5])
    x = pattern_space("C0/0C").with_space(span([a]))
    z = np.linalg.inv(a) / 2
    rep = find_identities(algebrize(x, z))
    assert rep.two_sided is None and rep.noncontractive.get("two")


def test_kadison_examples(staircase):
    m2 = pattern_space("CC/CC").space
    assert kadison_extreme_test(m2, np.eye(2)).extreme
    v = kadison_extreme_test(m2, E(2, 2, 0, 0))
    assert not v.extreme and v.corner_residual == pytest.approx(1)
    ter = compute_ter(staircase)
    assert kadison_extreme_test(ter.space, E1133).extreme
    with pytest.raises(NotTROError, match="Kadison requires a TRO"):
        kadison_extreme_test(staircase.space, E1133)


def test_probe_examples():
    m2 = pattern_space("CC/CC").space
    r = extreme_probe(m2, E(2, 2, 0, 0))
    assert r.refuted
    y = r.witness
    assert op_norm(E(2, 2, 0, 0) + y) <= 1 + 1e-9 and op_norm(E(2, 2, 0, 0) - y) <= 1 + 1e-9
    assert not extreme_probe(m2, np.eye(2)).refuted
    line = span([np.eye(2)])
    r = extreme_probe(line, np.eye(2) / 2)
    assert r.refuted and r.t == pytest.approx(0.5, abs=1e-9)


def test_classify_examples(staircase):
    c = classify_algebrization(staircase, E1133)
    assert c.z_star_in_x and c.z_star_extreme_in_ter and c.consistent
    assert op_norm(c.identities.quasi - E1133) < 1e-8
    m3 = classify_algebrization(pattern_space("CCC/CCC/CCC"), np.eye(3))
    assert m3.z_star_in_x and m3.local_class.is_both and m3.z_star_extreme_in_ter
    assert np.allclose(m3.identities.two_sided, np.eye(3))
    one_way = classify_algebrization(staircase, np.eye(3))
    assert not one_way.z_star_in_x and one_way.identities.quasi is not None


def test_haagerup_examples():
    m2 = pattern_space("CC/CC")
    zero = np.zeros((1, 1, 2, 2))
    x = E(2, 2, 0, 1)[None, None, None]
    y = E(2, 2, 1, 1)[None, None, None]
    hc = haagerup_upper_inequality(m2, np.eye(2), zero, zero, x, y)
    assert hc.verdict and hc.rhs_upper == pytest.approx(1) and hc.lhs <= 1
    one = np.eye(2)[None, None]
    bad = haagerup_upper_inequality(m2, 2 * np.eye(2), one, one, one[:, :, None], one[:, :, None])
    assert not bad.verdict and bad.lhs == pytest.approx(1 + np.sqrt(2))
    with pytest.raises(InputError):
        haagerup_upper_inequality(m2, np.eye(2), one, one, x[:, :, :, :1], y)


def test_powers_of_quasi_identity(staircase):
    a = algebrize(staircase, np.eye(3))
    for n in (2, 3):
        assert check_quasi_identity(a, mz_power(a, E1133, n)).verdict


def test_cstar_identity_collapse():
    # a C*-algebrization: the quasi-identity is the two-sided identity
    u = random_unitary(2, np.random.default_rng(4))
    m2 = pattern_space("CC/CC")
    assert cstar_test(m2, u).is_cstar
    rep = find_identities(algebrize(m2, u))
    assert rep.two_sided is not None and np.allclose(rep.quasi, rep.two_sided)
    assert np.allclose(rep.two_sided, adjoint(u))


def test_ideal_collapse():
    col = pattern_space("C/C")
    z = np.array([[1, 0]])
    assert ideal_test(col, z, "left").is_ideal
    rep = find_identities(algebrize(col, z))
    assert np.allclose(rep.quasi, rep.right)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**31 - 1))
def test_found_quasi_identities_are_unique_idempotent_projections(seed):
    rng = np.random.default_rng(seed)
    x, z = random_algebrization(rng)
    a = algebrize(x, z)
    found = search_quasi_identities(a, seed=seed, starts=12)
    for e in found:
        assert op_norm(e - found[0]) <= 1e-8
        ez = e @ z
        assert op_norm(ez @ ez - ez) <= 1e-8
        assert op_norm(ez - adjoint(ez)) <= 1e-8
        assert op_norm(e @ z @ e - e) <= 1e-8
