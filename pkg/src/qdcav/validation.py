"""Runtime invariant suite: structural identities the model must satisfy.

Each check returns (name, passed, detail).  The suite doubles as the
CLI ``validate`` subcommand and as the final acceptance gate; it is
sized to finish in well under two minutes on one core.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hamiltonian import build_light_matter, build_light_matter_xy
from .hilbert import GS, BasisState, enumerate_basis, fermion_operator, identity
from .liouvillian import assemble_liouvillian, block_decompose, build_L_spon, build_L_spon_xy
from .params import ModelParams
from .spectra import (
    FrequencyGrid,
    ResolventEngine,
    channel_operator,
    resolvent_spectrum,
    s_L,
    s_R,
    s_x,
    s_y,
    sum_rule_check,
    time_domain_oracle,
)
from .steady_state import solve_steady


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _toy_params() -> ModelParams:
    # compressed energy scales so the time-domain oracle converges fast
    return ModelParams(
        p_max=1, J_ee=0.0, J_hh=0.0, J_eh=0.0,
        delta0=20.0, delta1=-6.0, delta2=-4.0,
        two_hbar_Gamma_cav=30.0, two_hbar_Gamma_spon=6000.0,
        two_hbar_gamma_phase_e=8.0, two_hbar_gamma_phase_h=8.0,
        two_hbar_P=8000.0, two_hbar_g=40.0, delta_omega_BX=10.0,
        two_hbar_gamma_reso=10.0,
    )


def check_fermion_algebra() -> CheckResult:
    space = enumerate_basis(0)
    modes = [(sp, s) for sp in ("electron", "hole") for s in ("up", "down")]
    eye = identity(space).matrix
    worst = 0.0
    for i, (sp1, s1) in enumerate(modes):
        a1 = fermion_operator(space, sp1, s1, "annihilate").matrix
        c1 = fermion_operator(space, sp1, s1, "create").matrix
        for j, (sp2, s2) in enumerate(modes):
            a2 = fermion_operator(space, sp2, s2, "annihilate").matrix
            c2 = fermion_operator(space, sp2, s2, "create").matrix
            anti_ac = a1 @ c2 + c2 @ a1
            target = eye if i == j else 0.0
            worst = max(worst, np.abs(anti_ac - target).max())
            worst = max(worst, np.abs(a1 @ a2 + a2 @ a1).max())
            worst = max(worst, np.abs(c1 @ c2 + c2 @ c1).max())
    return CheckResult("fermion anticommutation relations", worst <= 1e-12,
                       f"max deviation {worst:.2e} (tol 1e-12)")


def check_recombination_forms() -> CheckResult:
    space = enumerate_basis(1)
    params = ModelParams(p_max=1)
    d = np.abs(build_L_spon(space, params).matrix - build_L_spon_xy(space, params).matrix).max()
    return CheckResult("recombination dissipator, circular vs linear form",
                       d <= 1e-12, f"max entry difference {d:.2e} (tol 1e-12)")


def check_coupling_forms() -> CheckResult:
    space = enumerate_basis(1)
    rng = np.random.default_rng(7)
    worst = 0.0
    for theta in rng.uniform(0.0, 2.0 * np.pi, size=20):
        p = ModelParams(p_max=1, theta_cav=float(theta))
        d = np.abs(build_light_matter(space, p).matrix
                   - build_light_matter_xy(space, p).matrix).max()
        worst = max(worst, d)
    return CheckResult("coupling operator, circular vs linear form (20 angles)",
                       worst <= 1e-12, f"max entry difference {worst:.2e} (tol 1e-12)")


def check_trace_annihilation() -> CheckResult:
    space = enumerate_basis(1)
    liouv = assemble_liouvillian(space, ModelParams(p_max=1))
    err = liouv.trace_annihilation_error()
    return CheckResult("generator annihilates the trace", err <= 1e-10,
                       f"max |Tr L(E_ij)| = {err:.2e} (tol 1e-10)")


def check_steady_state_bounds() -> CheckResult:
    space = enumerate_basis(1)
    liouv = assemble_liouvillian(space, ModelParams(p_max=1))
    rho = solve_steady(liouv)
    herm = rho.hermiticity_error()
    tr = abs(rho.trace() - 1.0)
    mineig = rho.min_eigenvalue()
    ok = herm <= 1e-12 and tr <= 1e-10 and mineig >= -1e-8
    return CheckResult(
        "steady state Hermitian, normalized, positive",
        ok, f"herm {herm:.1e}, |Tr-1| {tr:.1e}, min eig {mineig:.1e}",
    )


def check_vacuum_without_pump() -> CheckResult:
    import warnings

    space = enumerate_basis(1)
    params = ModelParams(p_max=1, two_hbar_P=0.0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # degenerate-generator notice is expected here
        rho = solve_steady(assemble_liouvillian(space, params))
    expected = np.zeros((space.dim, space.dim), dtype=complex)
    expected[space.index_of(BasisState(GS, 0)), space.index_of(BasisState(GS, 0))] = 1.0
    d = np.abs(rho.matrix - expected).max()
    return CheckResult("no pump -> vacuum steady state", d <= 1e-12,
                       f"max deviation from |GS,0><GS,0| = {d:.2e} (tol 1e-12)")


def check_polarization_completeness() -> CheckResult:
    params = _toy_params()
    space = enumerate_basis(params.p_max)
    liouv = assemble_liouvillian(space, params)
    rho = solve_steady(liouv)
    engine = ResolventEngine(liouv, rho, method="hessenberg",
                             blocks=block_decompose(liouv))
    grid = FrequencyGrid.linspace(-300.0, 300.0, 301)
    lin = (s_x(liouv, rho, params, grid, engine=engine)
           + s_y(liouv, rho, params, grid, engine=engine))
    circ = (s_L(liouv, rho, params, grid, engine=engine)
            + s_R(liouv, rho, params, grid, engine=engine))
    err = np.abs(lin.values - circ.values).max() / np.abs(lin.values).max()
    return CheckResult("linear and circular channel pairs sum identically",
                       err <= 1e-10, f"relative deviation {err:.2e} (tol 1e-10)")


def check_oracle_agreement() -> CheckResult:
    params = _toy_params()
    space = enumerate_basis(params.p_max)
    liouv = assemble_liouvillian(space, params)
    rho = solve_steady(liouv)
    a_op, rate = channel_operator(space, "cav", params)
    grid = FrequencyGrid.linspace(-60.0, 60.0, 5)
    engine = ResolventEngine(liouv, rho, method="direct")
    ref = resolvent_spectrum(liouv, rho, a_op, rate, grid, params.gamma_reso, engine=engine)
    oracle = time_domain_oracle(liouv, rho, a_op, rate, grid, params.gamma_reso,
                                t_max=2.0, dt=2e-4)
    err = np.abs(oracle.values - ref.values).max() / np.abs(ref.values).max()
    return CheckResult("resolvent matches time-domain oracle", err <= 1e-6,
                       f"relative deviation {err:.2e} (tol 1e-6)")


def check_sum_rule() -> CheckResult:
    params = _toy_params()
    space = enumerate_basis(params.p_max)
    liouv = assemble_liouvillian(space, params)
    rho = solve_steady(liouv)
    engine = ResolventEngine(liouv, rho, method="hessenberg",
                             blocks=block_decompose(liouv))
    a_op, rate = channel_operator(space, "cav", params)
    grid = FrequencyGrid.linspace(-700.123, 700.1, 4001)
    series = resolvent_spectrum(liouv, rho, a_op, rate, grid, 0.0, engine=engine)
    report = sum_rule_check(series, rho, a_op, rate)
    return CheckResult("integrated spectrum obeys the sum rule",
                       report.rel_discrepancy <= 1e-3,
                       f"relative discrepancy {report.rel_discrepancy:.2e} (tol 1e-3)")


ALL_CHECKS = (
    check_fermion_algebra,
    check_recombination_forms,
    check_coupling_forms,
    check_trace_annihilation,
    check_steady_state_bounds,
    check_vacuum_without_pump,
    check_polarization_completeness,
    check_oracle_agreement,
    check_sum_rule,
)


def run_invariant_suite() -> list[CheckResult]:
    return [check() for check in ALL_CHECKS]
