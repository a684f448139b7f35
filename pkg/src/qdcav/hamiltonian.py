"""Rotating-frame Hamiltonian of the coupled cavity / quantum-dot system.

The frame co-rotates with the cavity mode.  Each carrier is assigned
half the detuning of the bare electron-hole pair transition from the
cavity (``delta_omega_BX``), which makes the light-matter coupling
time independent: every coupling term changes the carrier count by two
and the photon count by one, so it commutes with
K = a'a + (carriers)/2 and the explicit phase factors drop out.  All
transition frequencies then emerge from the frame term plus the Coulomb
and exchange energies; spectra are reported as ueV offsets from the
cavity.
"""

from __future__ import annotations

import numpy as np

from .hilbert import (
    HilbertSpace,
    Operator,
    composite_operators,
    fermion_operator,
    photon_annihilator,
)
from .params import ModelParams


class AssemblyError(RuntimeError):
    """Internal fault: an assembled operator violates a structural bound."""


def build_coulomb(space: HilbertSpace, params: ModelParams) -> Operator:
    """Diagonal Coulomb charging energies between the confined carriers."""
    ops = composite_operators(space)
    n_tot = ops.n_up + ops.n_dn
    m_tot = ops.m_up + ops.m_dn
    return (
        params.j_ee * (ops.n_dn @ ops.n_up)
        + params.j_hh * (ops.m_dn @ ops.m_up)
        - params.j_eh * (n_tot @ m_tot)
    )


def build_exchange(space: HilbertSpace, params: ModelParams) -> Operator:
    """Electron-hole exchange: bright/dark splitting and fine structure.

    delta0 splits the bright pair states from the dark ones, delta1
    mixes |+1>/|-1> into the linearly polarized doublet, delta2 does the
    same within the dark doublet.  Nonzero only on configurations with
    exactly one electron and one hole.
    """
    ops = composite_operators(space)
    h = -2.0 * params.delta0 * (ops.sh_z @ ops.se_z)
    h = h + 0.5 * params.delta1 * (ops.sh_plus @ ops.se_minus + ops.sh_minus @ ops.se_plus)
    h = h + 0.5 * params.delta2 * (ops.sh_plus @ ops.se_plus + ops.sh_minus @ ops.se_minus)
    return h


def coupling_constants(params: ModelParams) -> tuple[complex, complex]:
    """Coupling constants (g_plus, g_minus) of the two circular channels.

    Both have magnitude g; their phases encode the cavity polarization
    angle theta_cav measured from the x axis.
    """
    g = params.g
    th = params.theta_cav
    g_plus = -g * (np.cos(th) - 1j * np.sin(th))
    g_minus = g * (np.cos(th) + 1j * np.sin(th))
    return g_plus, g_minus


def build_light_matter(space: HilbertSpace, params: ModelParams) -> Operator:
    """Rotating-frame light-matter coupling via the two circular channels."""
    g_plus, g_minus = coupling_constants(params)
    a = photon_annihilator(space)
    c_up_d = fermion_operator(space, "electron", "up", "create")
    c_dn_d = fermion_operator(space, "electron", "down", "create")
    d_up_d = fermion_operator(space, "hole", "up", "create")
    d_dn_d = fermion_operator(space, "hole", "down", "create")

    term = g_plus * (c_dn_d @ d_up_d @ a) + g_minus * (c_up_d @ d_dn_d @ a)
    return term + term.dag()


def build_light_matter_xy(space: HilbertSpace, params: ModelParams) -> Operator:
    """Equivalent linear-polarization form of the coupling.

    Must agree entrywise with :func:`build_light_matter`; kept as an
    independent construction for validation.
    """
    ops = composite_operators(space)
    a = photon_annihilator(space)
    g = params.g
    th = params.theta_cav
    term = (
        np.sqrt(2.0) * np.cos(th) * g * (ops.bx.dag() @ a)
        + 1j * np.sqrt(2.0) * np.sin(th) * g * (ops.by.dag() @ a)
    )
    return term + term.dag()


def build_frame_detuning(space: HilbertSpace, params: ModelParams) -> Operator:
    """Diagonal frame term: half the bare pair detuning per carrier."""
    ops = composite_operators(space)
    total = ops.n_up + ops.n_dn + ops.m_up + ops.m_dn
    return 0.5 * params.delta_omega_BX * total


def build_overhauser(space: HilbertSpace, params: ModelParams) -> Operator:
    """Electron-spin Zeeman coupling to the quasi-static nuclear field.

    The heavy-hole pseudo-spins do not couple to the field.
    """
    bx, by, bz = params.overhauser_ueV
    ops = composite_operators(space)
    return bx * ops.se_x + by * ops.se_y + bz * ops.se_z


def assemble_hamiltonian(space: HilbertSpace, params: ModelParams) -> Operator:
    """Total rotating-frame Hamiltonian (ueV)."""
    h = (
        build_frame_detuning(space, params)
        + build_coulomb(space, params)
        + build_exchange(space, params)
        + build_light_matter(space, params)
        + build_overhauser(space, params)
    )
    err = h.hermiticity_error()
    if err > 1e-12:
        raise AssemblyError(f"assembled Hamiltonian is not Hermitian: max |H - H'| = {err:.3e}")
    return h


# ----------------------------------------------------------------------
# Transition bookkeeping.  Closed forms for the optical line positions
# (ueV offsets from the cavity) that follow from the diagonal Coulomb
# energies and the 2x2 exchange blocks; used to aim the detuning sweep
# and to mark line windows in post-processing.

LINE_NAMES = (
    "X_plus", "X_minus", "BX0_x", "BX0_y", "XX0_x", "XX0_y", "DX0_sym", "DX0_asym",
)


def transition_energies(params: ModelParams) -> dict[str, float]:
    """Emission line positions in the cavity frame, in ueV.

    Bright-pair eigenstates are (|+1> -/+ |-1>)/sqrt(2) for x/y with
    energies (delta0 -/+ delta1)/2 relative to the single-pair Coulomb
    level; dark eigenstates sit at (-delta0 +/- delta2)/2.  The charged
    excitons are exchange-free; the biexciton lines terminate on the
    bright doublet.
    """
    dw = params.delta_omega_BX
    jee, jhh, jeh = params.j_ee, params.j_hh, params.j_eh
    d0, d1, d2 = params.delta0, params.delta1, params.delta2

    e_bright_x = 0.5 * (d0 - d1)
    e_bright_y = 0.5 * (d0 + d1)
    e_dark_sym = 0.5 * (-d0 + d2)
    e_dark_asym = 0.5 * (-d0 - d2)

    return {
        "X_plus": dw + jhh - 2.0 * jeh,
        "X_minus": dw + jee - 2.0 * jeh,
        "BX0_x": dw - jeh + e_bright_x,
        "BX0_y": dw - jeh + e_bright_y,
        "XX0_x": dw + jee + jhh - 3.0 * jeh - e_bright_x,
        "XX0_y": dw + jee + jhh - 3.0 * jeh - e_bright_y,
        "DX0_sym": dw - jeh + e_dark_sym,
        "DX0_asym": dw - jeh + e_dark_asym,
    }


def tune_cavity_to(params: ModelParams, line: str) -> ModelParams:
    """Return params with delta_omega_BX set so `line` sits at the cavity."""
    if line not in LINE_NAMES:
        raise ValueError(f"unknown line {line!r}; expected one of {LINE_NAMES}")
    at_zero = transition_energies(params.replace(delta_omega_BX=0.0))[line]
    return params.replace(delta_omega_BX=-at_zero)
