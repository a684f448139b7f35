"""Physical parameters of the cavity / quantum-dot model.

Unit conventions
----------------
All internal energies are in ueV and hbar = 1, so rates, angular
frequencies and energies share the ueV scale and time is measured in
hbar/ueV.  Decay and pump rates enter the configuration in the
"2*hbar*rate" form commonly quoted for such systems (the population
decay rate); they are divided by two exactly once, here, so that the
Lindblad prefactors downstream are the half rates.  Coulomb energies are
configured in meV and injection/free-space emission rates in neV; both
are converted to ueV at construction time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace
from typing import ClassVar

import numpy as np

# Bohr magneton in ueV/T (fixed constant, not configurable).
MU_B_UEV_PER_T = 57.883818

# h*c in ueV*nm (1239.84 eV*nm), used only for the wavelength axis of
# spectrum files.
HC_UEV_NM = 1.239841984e9

MEV_TO_UEV = 1.0e3
NEV_TO_UEV = 1.0e-3


@dataclass(frozen=True)
class ModelParams:
    """Every physical parameter of the model, in its configuration unit.

    Defaults are the standard operating point of the simulator.  The
    derived properties (lower case) return the internal ueV / half-rate
    values that the Hamiltonian and Liouvillian builders consume.
    """

    # Coulomb charging energies (meV)
    J_ee: float = 26.0
    J_hh: float = 30.0
    J_eh: float = 29.0

    # Electron-hole exchange parameters (ueV)
    delta0: float = 250.0
    delta1: float = -30.0
    delta2: float = -10.0

    # Decay / dephasing / pump rates, quoted as 2*hbar*rate
    two_hbar_Gamma_cav: float = 69.0       # ueV, cavity photon escape
    two_hbar_Gamma_spon: float = 44.0      # neV, QD emission to free space
    two_hbar_gamma_phase_e: float = 15.0   # ueV, electron pure dephasing
    two_hbar_gamma_phase_h: float = 15.0   # ueV, heavy-hole pure dephasing
    two_hbar_P: float = 33.0               # neV, carrier injection per channel
    two_hbar_g: float = 210.0              # ueV, light-matter coupling
    theta_cav: float = math.pi / 2         # rad, cavity polarization angle vs x

    # Detuning of the bare (Coulomb- and exchange-free) electron-hole pair
    # transition from the cavity mode; the frame is fixed to the cavity.
    delta_omega_BX: float = 0.0            # ueV

    # Quasi-static nuclear (Overhauser) field acting on the electron spin
    B_Nx: float = 0.0                      # mT
    B_Ny: float = 0.0                      # mT
    B_Nz: float = 0.0                      # mT
    g_e: float = 0.6                       # electron g-factor (assumed value)

    # Spectral resolution, quoted as 2*hbar*gamma_reso
    two_hbar_gamma_reso: float = 30.0      # ueV

    # Photon-number cutoff of the cavity Fock space
    p_max: int = 2

    # Reference cavity wavelength; only used to label spectra in nm
    lambda_ref: float = 920.0              # nm

    mu_B: ClassVar[float] = MU_B_UEV_PER_T

    def __post_init__(self):
        for name in ("J_ee", "J_hh", "J_eh"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0 (Coulomb repulsion)")
        for name in (
            "two_hbar_Gamma_cav",
            "two_hbar_Gamma_spon",
            "two_hbar_gamma_phase_e",
            "two_hbar_gamma_phase_h",
            "two_hbar_P",
            "two_hbar_g",
            "two_hbar_gamma_reso",
        ):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if not isinstance(self.p_max, int) or self.p_max < 0:
            raise ValueError("p_max must be a non-negative integer")
        if self.two_hbar_g > 0 and self.p_max < 1:
            raise ValueError("p_max must be >= 1 when the coupling is nonzero")
        if self.lambda_ref <= 0:
            raise ValueError("lambda_ref must be positive")

    # ------------------------------------------------------------------
    # Internal values (ueV, half rates)

    @property
    def gamma_cav(self) -> float:
        return 0.5 * self.two_hbar_Gamma_cav

    @property
    def gamma_spon(self) -> float:
        return 0.5 * self.two_hbar_Gamma_spon * NEV_TO_UEV

    @property
    def gamma_phase_e(self) -> float:
        return 0.5 * self.two_hbar_gamma_phase_e

    @property
    def gamma_phase_h(self) -> float:
        return 0.5 * self.two_hbar_gamma_phase_h

    @property
    def gamma_phase(self) -> float:
        """Total pure-dephasing half rate (electron + hole)."""
        return self.gamma_phase_e + self.gamma_phase_h

    @property
    def pump(self) -> float:
        return 0.5 * self.two_hbar_P * NEV_TO_UEV

    @property
    def g(self) -> float:
        return 0.5 * self.two_hbar_g

    @property
    def gamma_reso(self) -> float:
        return 0.5 * self.two_hbar_gamma_reso

    @property
    def j_ee(self) -> float:
        return self.J_ee * MEV_TO_UEV

    @property
    def j_hh(self) -> float:
        return self.J_hh * MEV_TO_UEV

    @property
    def j_eh(self) -> float:
        return self.J_eh * MEV_TO_UEV

    @property
    def overhauser_ueV(self) -> np.ndarray:
        """Electron Zeeman energies g_e * mu_B * B_N, per axis, in ueV."""
        b_tesla = np.array([self.B_Nx, self.B_Ny, self.B_Nz]) * 1.0e-3
        return self.g_e * MU_B_UEV_PER_T * b_tesla

    # ------------------------------------------------------------------

    def replace(self, **updates) -> "ModelParams":
        return replace(self, **updates)

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def fingerprint(self) -> str:
        items = ",".join(f"{k}={v!r}" for k, v in sorted(self.to_dict().items()))
        return f"ModelParams({items})"

    def wavelength_nm(self, omega_ueV):
        """Linearized wavelength axis around lambda_ref for plotting/CSV."""
        e_ref = HC_UEV_NM / self.lambda_ref
        return self.lambda_ref * (1.0 - np.asarray(omega_ueV, dtype=float) / e_ref)
