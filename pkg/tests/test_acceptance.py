"""The twelve acceptance criteria, each at its stated tolerance.

Every test runs the corresponding reference check at the default tolerances,
asserts the measured quantities against explicit thresholds, and prints one
``PASS``/``FAIL`` line. Run as a script for the summary alone::

    python3 tests/test_acceptance.py
"""

import sys

import pytest

from oskit.numcore import DEFAULT_TOL
from oskit.suite import CHECKS

_BY_KEY = dict(CHECKS)
_CACHE = {}


def measure(key):
    if key not in _CACHE:
        _CACHE[key] = _BY_KEY[key](0, DEFAULT_TOL)
    return _CACHE[key]


def report(capsys, number, res, ok):
    line = f"{'PASS' if ok else 'FAIL'}  criterion {number:2d} [{res.key}] {res.title}"
    with capsys.disabled():
        print("\n" + line)
    return ok


def _c1(m):
    return m["dim"] == 8 and m["unit_to_span"] <= 1e-8 and m["span_to_pattern"] <= 1e-8


def _c2(m):
    return m["dim"] == 5 and m["unit_to_span"] <= 1e-8 and m["span_to_pattern"] <= 1e-8


def _c3(m):
    return m["residual"] <= 1e-8 and m["left_solutions"] == 0 and m["right_solutions"] == 0


def _c4(m):
    return (m["ter_tro_defect"] <= 1e-8 and m["kadison"] and m["quasi_minus_zstar"] <= 1e-8
            and not m["identity_z_in_x"] and m["identity_quasi_found"])


def _c5(m):
    return (m["trials"] == 200 and m["with_quasi_identity"] > 0
            and max(m["spread"], m["idempotency"], m["hermitian"]) <= 1e-8)


def _c6(m):
    return m["cstar_identity"] <= 1e-8 and m["staircase_failed"] == "symmetry" and m["isomorphism"]


def _c7(m):
    return m["column_left"] and m["column_isometry"] <= 1e-8 and m["row_right"] and m["negatives_witnessed"] == 2


def _c8(m):
    return (m["trials"] == 100 and m["multiset_mismatches"] == 0 and m["dimension_mismatches"] == 0
            and m["reconstruction"] <= 1e-7)


def _c9(m):
    return (m["trials"] == 100 and m["failures"] == 0 and m["worst_residual"] <= 1e-7
            and m["tall_ok"] and m["wide_ok"] and m["square_ok"])


def _c10(m):
    return m["trials"] == 20 and m["mismatches"] == 0


def _c11(m):
    return (m["trials"] == 50 and m["violations"] == 0 and m["worst_lhs_minus_rhs"] <= 1e-8
            and m["norm2_lhs"] > m["norm2_rhs"] + 1e-8)


def _c12(m):
    # every non-extreme instance is refuted, so the two routes agree everywhere
    return (m["trials"] == 500 and m["disagreements"] == 0 and m["constructed_failures"] == 0
            and m["extreme"] + m["refuted"] == 500 and m["partial_isometry"] <= 1e-8)


CRITERIA = [
    (1, "qm-staircase", _c1),
    (2, "qm-dual", _c2),
    (3, "quasi-identity", _c3),
    (4, "extinj", _c4),
    (5, "unique", _c5),
    (6, "cstar", _c6),
    (7, "ideal", _c7),
    (8, "smith", _c8),
    (9, "decompose", _c9),
    (10, "matrix-qm", _c10),
    (11, "haagerup", _c11),
    (12, "kadison", _c12),
]


@pytest.mark.parametrize("number, key, criterion", CRITERIA, ids=[k for _, k, _ in CRITERIA])
def test_acceptance(capsys, number, key, criterion):
    res = measure(key)
    ok = res.passed and criterion(res.measured)
    report(capsys, number, res, ok)
    assert res.passed, res.line()
    assert criterion(res.measured), res.line()


def main() -> int:
    failed = 0
    for number, key, criterion in CRITERIA:
        res = measure(key)
        ok = res.passed and criterion(res.measured)
        failed += not ok
        print(f"{'PASS' if ok else 'FAIL'}  criterion {number:2d} [{key}] {res.title}")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
