"""Steady-state solvers and expectation values.

The primary solver replaces one row of the singular linear system
L vec(rho) = 0 with the trace constraint and solves the resulting
square system; the null-space (SVD) solver is an independent route used
for cross-validation and for uniqueness detection.
"""

from __future__ import annotations

import warnings

import numpy as np

from .hilbert import GS, N_CHARGE, BasisState, ChargeConfig, HilbertSpace, Operator
from .liouvillian import (
    BlockDecomposition,
    DensityMatrix,
    SuperOperator,
    trace_vector,
    unvec,
    vec,
)


class SolveFailure(RuntimeError):
    """The linear solve broke down or produced an invalid state."""


class NonUniqueSteadyState(RuntimeError):
    """The generator has more than one stationary state."""


# Validation bounds on the returned state.
RESIDUAL_RTOL = 1e-10
TRACE_TOL = 1e-10
POSITIVITY_SOFT = -1e-8
POSITIVITY_HARD = -1e-6
UNIQUENESS_RTOL = 1e-8


def _finalize(space: HilbertSpace, rho: np.ndarray, l_matrix: np.ndarray) -> DensityMatrix:
    rho = 0.5 * (rho + rho.conj().T)
    tr = np.trace(rho).real
    if not np.isfinite(tr) or abs(tr) < 1e-300:
        raise SolveFailure("steady-state solve returned a traceless matrix")
    rho = rho / tr

    residual = np.abs(l_matrix @ vec(rho)).max()
    scale = max(np.abs(l_matrix).max(), 1.0)
    if residual > RESIDUAL_RTOL * scale:
        raise SolveFailure(
            f"steady-state residual {residual:.3e} exceeds {RESIDUAL_RTOL:.1e} * max|L| = "
            f"{RESIDUAL_RTOL * scale:.3e}"
        )

    min_eig = float(np.linalg.eigvalsh(rho).min())
    if min_eig < POSITIVITY_HARD:
        raise SolveFailure(f"steady state has eigenvalue {min_eig:.3e} < {POSITIVITY_HARD}")
    return DensityMatrix(space, rho)


def check_uniqueness(liouvillian: SuperOperator) -> None:
    """Raise NonUniqueSteadyState if the null space has dimension > 1.

    Uses the second-smallest singular value relative to the largest.
    Cost grows as dim^6; intended for validation and small cutoffs, not
    per-point sweep use.
    """
    s = np.linalg.svd(liouvillian.matrix, compute_uv=False)
    if s[-2] < UNIQUENESS_RTOL * s[0]:
        raise NonUniqueSteadyState(
            f"second-smallest singular value {s[-2]:.3e} is below "
            f"{UNIQUENESS_RTOL:.1e} * {s[0]:.3e}"
        )


def _empty_dot_fallback(liouvillian: SuperOperator) -> DensityMatrix:
    """Degenerate-generator selection rule: the empty-dot vacuum.

    Without carrier injection the charge sectors decouple and several
    stationary mixtures exist (dark pairs and unpaired carriers cannot
    recombine).  The physically prepared state of an unpumped dot is the
    empty one, so when the vacuum is itself exactly stationary it is
    returned, with a warning; otherwise the degeneracy is an error.
    """
    space = liouvillian.space
    rho0 = np.zeros((space.dim, space.dim), dtype=complex)
    i = space.index_of(BasisState(GS, 0))
    rho0[i, i] = 1.0
    residual = np.abs(liouvillian.matrix @ vec(rho0)).max()
    scale = max(np.abs(liouvillian.matrix).max(), 1.0)
    if residual > 1e-12 * scale:
        raise NonUniqueSteadyState(
            "generator has a degenerate stationary space and the empty-dot "
            "state is not stationary; no unique steady state exists"
        )
    warnings.warn(
        "stationary space is degenerate (no carrier injection?); "
        "returning the empty-dot vacuum state",
        stacklevel=3,
    )
    return DensityMatrix(space, rho0)


def solve_steady(liouvillian: SuperOperator, check_unique: bool = False) -> DensityMatrix:
    """Stationary state of the generator, unit trace, Hermitized.

    Uses the trace-replacement linear solve; on a degenerate stationary
    space it falls back to the empty-dot selection rule above.
    """
    if check_unique:
        check_uniqueness(liouvillian)
    space = liouvillian.space
    dim = space.dim
    m = liouvillian.matrix.copy()
    m[0, :] = trace_vector(dim)
    b = np.zeros(dim * dim, dtype=complex)
    b[0] = 1.0
    try:
        x = np.linalg.solve(m, b)
    except np.linalg.LinAlgError:
        return _empty_dot_fallback(liouvillian)
    return _finalize(space, unvec(x, dim), liouvillian.matrix)


def solve_steady_nullspace(liouvillian: SuperOperator) -> DensityMatrix:
    """Steady state from the smallest singular vector (validation route)."""
    space = liouvillian.space
    _, s, vh = np.linalg.svd(liouvillian.matrix)
    x = vh[-1].conj()
    if s[-2] < UNIQUENESS_RTOL * s[0]:
        raise NonUniqueSteadyState(
            f"second-smallest singular value {s[-2]:.3e} indicates a degenerate null space"
        )
    return _finalize(space, unvec(x, space.dim), liouvillian.matrix)


def solve_steady_block(decomposition: BlockDecomposition) -> DensityMatrix:
    """Steady state restricted to the dK = 0 block of a decomposition."""
    space = decomposition.space
    dim = space.dim
    block = decomposition.find(0.0)
    t_full = trace_vector(dim)
    m = block.matrix.copy()
    m[0, :] = t_full[block.indices]
    b = np.zeros(len(block.indices), dtype=complex)
    b[0] = 1.0
    try:
        x = np.linalg.solve(m, b)
    except np.linalg.LinAlgError:
        full_liouv = SuperOperator(space, decomposition.reassemble())
        return _empty_dot_fallback(full_liouv)
    full = np.zeros(dim * dim, dtype=complex)
    full[block.indices] = x
    # residual check against the reassembled block matrix only; the other
    # blocks annihilate this vector by construction
    rho = 0.5 * (unvec(full, dim) + unvec(full, dim).conj().T)
    tr = np.trace(rho).real
    if abs(tr) < 1e-300:
        raise SolveFailure("block steady-state solve returned a traceless matrix")
    rho = rho / tr
    residual = np.abs(block.matrix @ vec(rho)[block.indices]).max()
    scale = max(np.abs(block.matrix).max(), 1.0)
    if residual > RESIDUAL_RTOL * scale:
        raise SolveFailure(f"block steady-state residual {residual:.3e} too large")
    min_eig = float(np.linalg.eigvalsh(rho).min())
    if min_eig < POSITIVITY_HARD:
        raise SolveFailure(f"block steady state has eigenvalue {min_eig:.3e}")
    return DensityMatrix(space, rho)


def expectation(rho: DensityMatrix, op: Operator) -> complex:
    """Tr(O rho); real up to roundoff for Hermitian O."""
    if rho.space != op.space:
        raise ValueError("state and operator live on different spaces")
    return complex(np.trace(op.matrix @ rho.matrix))


def charge_populations(rho: DensityMatrix) -> dict[ChargeConfig, float]:
    """Probabilities of the 16 charge configurations (photons traced out)."""
    dim = rho.space.dim
    diag = np.real(np.diagonal(rho.matrix))
    probs = {}
    for c in range(N_CHARGE):
        probs[ChargeConfig.from_index(c)] = float(diag[c::N_CHARGE].sum())
    return probs
