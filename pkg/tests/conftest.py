"""Shared fixtures: quintic pipeline objects reused across the suite."""

import pytest

import cyworkbench as cw


@pytest.fixture(scope="session")
def quintic_family():
    return cw.quintic()


@pytest.fixture(scope="session")
def quintic_basis(quintic_family):
    return cw.frobenius_solve(quintic_family.pf, 20)


@pytest.fixture(scope="session")
def quintic_mirror(quintic_basis):
    return cw.build_mirror_map(quintic_basis)


@pytest.fixture(scope="session")
def quintic_yukawa(quintic_family):
    return cw.yukawa_theta(quintic_family)


@pytest.fixture(scope="session")
def quintic_cttt(quintic_yukawa, quintic_basis, quintic_mirror):
    return cw.flat_yukawa(quintic_yukawa, quintic_basis, quintic_mirror)


@pytest.fixture(scope="session")
def quintic_frame(quintic_basis, quintic_yukawa, quintic_family):
    return cw.solve_symplectic_frame(
        quintic_basis, quintic_yukawa.series(quintic_basis.order),
        quintic_family.triple_intersection)


@pytest.fixture(scope="session")
def quintic_hodge(quintic_family, quintic_frame):
    """High-order evaluator for disk numerics (tail below 1e-20 at r/2)."""
    basis = cw.frobenius_solve(quintic_family.pf, 84)
    return cw.HodgeEvaluator(basis, quintic_frame, prec_bits=256)
