import pytest

from qdcav import (
    ModelParams,
    assemble_liouvillian,
    enumerate_basis,
    solve_steady,
    tune_cavity_to,
)


@pytest.fixture(scope="session")
def toy_params():
    """Compressed-scale parameters: every rate and energy within two decades."""
    return ModelParams(
        p_max=1, J_ee=0.0, J_hh=0.0, J_eh=0.0,
        delta0=20.0, delta1=-6.0, delta2=-4.0,
        two_hbar_Gamma_cav=30.0, two_hbar_Gamma_spon=6000.0,
        two_hbar_gamma_phase_e=8.0, two_hbar_gamma_phase_h=8.0,
        two_hbar_P=8000.0, two_hbar_g=40.0, delta_omega_BX=10.0,
        two_hbar_gamma_reso=10.0,
    )


@pytest.fixture(scope="session")
def toy_system(toy_params):
    space = enumerate_basis(toy_params.p_max)
    liouv = assemble_liouvillian(space, toy_params)
    rho = solve_steady(liouv)
    return space, liouv, rho


@pytest.fixture(scope="session")
def standard_p1():
    """Standard parameters, cavity on the y bright line, smallest useful cutoff."""
    params = tune_cavity_to(ModelParams(p_max=1), "BX0_y")
    space = enumerate_basis(1)
    liouv = assemble_liouvillian(space, params)
    rho = solve_steady(liouv)
    return params, space, liouv, rho


def assert_close(actual, expected, tol, label=""):
    __tracebackhide__ = True
    err = abs(actual - expected)
    assert err <= tol, f"{label}: {actual} vs {expected} (|diff| {err:.3e} > {tol:.3e})"
