import math

import numpy as np
import pytest

from qdcav.hamiltonian import (
    assemble_hamiltonian,
    build_coulomb,
    build_exchange,
    build_frame_detuning,
    build_light_matter,
    build_light_matter_xy,
    build_overhauser,
    coupling_constants,
    transition_energies,
    tune_cavity_to,
)
from qdcav.hilbert import (
    BIEXCITON,
    BRIGHT_MINUS,
    BRIGHT_PLUS,
    DARK_MINUS,
    DARK_PLUS,
    GS,
    BasisState,
    ChargeConfig,
    composite_operators,
    enumerate_basis,
    excitation_operator,
)
from qdcav.params import ModelParams


@pytest.fixture(scope="module")
def space():
    return enumerate_basis(1)


@pytest.fixture(scope="module")
def params():
    return ModelParams(p_max=1)


class TestModelParams:
    def test_standard_defaults(self):
        p = ModelParams()
        assert (p.J_ee, p.J_hh, p.J_eh) == (26.0, 30.0, 29.0)
        assert (p.delta0, p.delta1, p.delta2) == (250.0, -30.0, -10.0)
        assert p.two_hbar_Gamma_cav == 69.0
        assert p.two_hbar_Gamma_spon == 44.0
        assert p.two_hbar_gamma_phase_e == p.two_hbar_gamma_phase_h == 15.0
        assert p.two_hbar_P == 33.0
        assert p.two_hbar_g == 210.0
        assert p.theta_cav == math.pi / 2

    def test_half_rate_conversion(self):
        p = ModelParams()
        assert p.gamma_cav == 34.5
        assert p.g == 105.0
        assert p.gamma_phase == 15.0
        # neV keys land in ueV
        assert abs(p.gamma_spon - 0.022) < 1e-15
        assert abs(p.pump - 0.0165) < 1e-15
        assert p.j_ee == 26000.0

    def test_validation(self):
        with pytest.raises(ValueError):
            ModelParams(J_ee=-1.0)
        with pytest.raises(ValueError):
            ModelParams(two_hbar_P=-5.0)
        with pytest.raises(ValueError):
            ModelParams(p_max=0)  # coupling is on by default
        ModelParams(p_max=0, two_hbar_g=0.0)  # fine without coupling

    def test_overhauser_energy(self):
        p = ModelParams(B_Nx=20.0, B_Ny=0.0, B_Nz=0.0, g_e=0.6)
        expected = 0.6 * 57.883818 * 0.020
        assert abs(p.overhauser_ueV[0] - expected) < 1e-12
        assert p.overhauser_ueV[1] == p.overhauser_ueV[2] == 0.0

    def test_wavelength_axis(self):
        p = ModelParams(lambda_ref=920.0)
        # a 920 nm photon is about 1.3477 eV, so -3 meV moves the
        # wavelength up by about 2.05 nm
        lam = p.wavelength_nm(np.array([0.0, -3000.0]))
        assert lam[0] == pytest.approx(920.0)
        assert lam[1] == pytest.approx(922.048, abs=0.005)
        assert np.all(np.diff(p.wavelength_nm(np.array([-10.0, 0.0, 10.0]))) < 0)


class TestCoulomb:
    def test_diagonal_values(self, space, params):
        h = build_coulomb(space, params).matrix
        assert np.abs(h - np.diag(np.diagonal(h))).max() == 0.0

        def diag(config, p=0):
            i = space.index_of(BasisState(config, p))
            return h[i, i].real

        assert diag(BIEXCITON) == pytest.approx(-60000.0, abs=1e-9)
        assert diag(GS) == 0.0
        assert diag(BRIGHT_PLUS) == pytest.approx(-29000.0, abs=1e-9)

    def test_commutes_with_number_operators(self, space, params):
        h = build_coulomb(space, params).matrix
        ops = composite_operators(space)
        for n in (ops.n_up, ops.n_dn, ops.m_up, ops.m_dn):
            assert np.abs(h @ n.matrix - n.matrix @ h).max() == 0.0


class TestExchange:
    def test_block_eigenvalues_closed_form(self, space, params):
        h = build_exchange(space, params).matrix
        idx = [space.index_of(BasisState(c, 0))
               for c in (BRIGHT_PLUS, BRIGHT_MINUS, DARK_PLUS, DARK_MINUS)]
        block = h[np.ix_(idx, idx)]
        got = np.sort(np.linalg.eigvalsh(block))
        d0, d1, d2 = params.delta0, params.delta1, params.delta2
        expected = np.sort([0.5 * (d0 + d1), 0.5 * (d0 - d1),
                            0.5 * (-d0 + d2), 0.5 * (-d0 - d2)])
        assert np.abs(got - expected).max() <= 1e-10 * np.abs(expected).max()

    def test_bright_dark_and_fine_structure_splittings(self, space, params):
        h = build_exchange(space, params).matrix
        idx = [space.index_of(BasisState(c, 0))
               for c in (BRIGHT_PLUS, BRIGHT_MINUS, DARK_PLUS, DARK_MINUS)]
        ev = np.sort(np.linalg.eigvalsh(h[np.ix_(idx, idx)]))[::-1]
        bright, dark = ev[:2], ev[2:]
        assert bright.mean() - dark.mean() == pytest.approx(250.0, abs=1e-10)
        assert bright[0] - bright[1] == pytest.approx(abs(params.delta1), abs=1e-10)

    def test_vanishes_outside_single_pair_sector(self, space, params):
        h = build_exchange(space, params).matrix
        for config in (GS, BIEXCITON):
            i = space.index_of(BasisState(config, 0))
            assert np.abs(h[i, :]).max() == 0.0


class TestLightMatter:
    def test_circular_coupling_constants(self):
        g_plus, g_minus = coupling_constants(ModelParams(theta_cav=0.0))
        assert g_plus == pytest.approx(-105.0)
        assert g_minus == pytest.approx(105.0)
        g_plus, g_minus = coupling_constants(ModelParams())  # theta = pi/2
        assert g_plus == pytest.approx(1j * 105.0)
        assert g_minus == pytest.approx(1j * 105.0)

    def test_circular_and_linear_forms_agree(self, space):
        rng = np.random.default_rng(11)
        for theta in rng.uniform(0.0, 2.0 * np.pi, size=20):
            p = ModelParams(p_max=1, theta_cav=float(theta))
            d = np.abs(build_light_matter(space, p).matrix
                       - build_light_matter_xy(space, p).matrix).max()
            assert d <= 1e-12

    def test_zero_coupling(self, space):
        p = ModelParams(p_max=1, two_hbar_g=0.0)
        assert np.abs(build_light_matter(space, p).matrix).max() == 0.0

    def test_conserves_excitation_number(self, space, params):
        h = build_light_matter(space, params).matrix
        k = excitation_operator(space).matrix
        assert np.abs(h @ k - k @ h).max() <= 1e-12


class TestFrameAndOverhauser:
    def test_frame_assigns_half_detuning_per_carrier(self, space):
        p = ModelParams(p_max=1, delta_omega_BX=100.0)
        h = build_frame_detuning(space, p).matrix
        i = space.index_of(BasisState(BRIGHT_PLUS, 0))
        assert h[i, i].real == pytest.approx(100.0)
        j = space.index_of(BasisState(BIEXCITON, 0))
        assert h[j, j].real == pytest.approx(200.0)

    def test_zero_field_gives_zero(self, space):
        p = ModelParams(p_max=1)
        assert np.abs(build_overhauser(space, p).matrix).max() == 0.0

    def test_axial_field_preserves_spin_projection(self, space):
        p = ModelParams(p_max=1, B_Nz=20.0)
        h = build_overhauser(space, p).matrix
        ops = composite_operators(space)
        assert np.abs(h @ ops.se_z.matrix - ops.se_z.matrix @ h).max() <= 1e-14
        # no bright <-> dark matrix element from an axial field
        for bright in (BRIGHT_PLUS, BRIGHT_MINUS):
            for dark in (DARK_PLUS, DARK_MINUS):
                i = space.index_of(BasisState(bright, 0))
                j = space.index_of(BasisState(dark, 0))
                assert h[i, j] == 0.0

    def test_transverse_field_element_magnitude(self, space):
        p = ModelParams(p_max=1, B_Nx=20.0, B_Ny=20.0, B_Nz=20.0, g_e=0.6)
        h = build_overhauser(space, p).matrix
        i = space.index_of(BasisState(BRIGHT_PLUS, 0))
        j = space.index_of(BasisState(DARK_PLUS, 0))  # single spin flip away
        expected = 0.6 * 57.883818 * 0.020 / 2.0
        assert abs(h[i, j]) == pytest.approx(expected * np.sqrt(2), rel=1e-12)
        # |x + iy| field combination gives the sqrt(2) factor above


class TestAssembly:
    def test_hermitian(self, space, params):
        h = assemble_hamiltonian(space, params)
        assert h.hermiticity_error() <= 1e-12

    def test_diagonal_when_uncoupled(self, space):
        p = ModelParams(p_max=1, two_hbar_g=0.0, delta1=0.0, delta2=0.0)
        h = assemble_hamiltonian(space, p).matrix
        assert np.abs(h - np.diag(np.diagonal(h))).max() == 0.0

    def test_excitation_block_structure(self, space, params):
        h = assemble_hamiltonian(space, params).matrix
        k = space.k_values()
        mask = k[:, None] != k[None, :]
        assert np.abs(np.where(mask, h, 0.0)).max() == 0.0

    def test_transverse_field_keeps_block_structure(self, space):
        # spin flips preserve the carrier count, so K stays conserved
        p = ModelParams(p_max=1, B_Nx=20.0, B_Ny=20.0, B_Nz=20.0)
        h = assemble_hamiltonian(space, p).matrix
        k = space.k_values()
        mask = k[:, None] != k[None, :]
        assert np.abs(np.where(mask, h, 0.0)).max() == 0.0


class TestTransitionEnergies:
    def test_line_positions_at_standard_parameters(self):
        lines = transition_energies(ModelParams(delta_omega_BX=0.0))
        assert lines["X_plus"] == pytest.approx(-28000.0)
        assert lines["X_minus"] == pytest.approx(-32000.0)
        assert lines["BX0_y"] == pytest.approx(-28890.0)
        assert lines["BX0_x"] == pytest.approx(-28860.0)
        assert lines["XX0_y"] == pytest.approx(-31110.0)
        assert lines["XX0_x"] == pytest.approx(-31140.0)
        assert lines["DX0_sym"] == pytest.approx(-29130.0)
        assert lines["DX0_asym"] == pytest.approx(-29120.0)

    def test_fine_structure_and_bright_dark_gaps(self):
        lines = transition_energies(ModelParams())
        assert lines["BX0_x"] - lines["BX0_y"] == pytest.approx(30.0)
        bright = 0.5 * (lines["BX0_x"] + lines["BX0_y"])
        dark = 0.5 * (lines["DX0_sym"] + lines["DX0_asym"])
        assert bright - dark == pytest.approx(250.0)

    def test_tune_cavity_to_line(self):
        p = tune_cavity_to(ModelParams(), "X_plus")
        assert transition_energies(p)["X_plus"] == pytest.approx(0.0, abs=1e-9)
        assert p.delta_omega_BX == pytest.approx(28000.0)
        with pytest.raises(ValueError):
            tune_cavity_to(ModelParams(), "nonsense")

    def test_positions_match_level_differences(self, space):
        # closed forms vs the diagonal of the uncoupled Hamiltonian
        p = ModelParams(p_max=1, two_hbar_g=0.0, delta_omega_BX=500.0)
        h = assemble_hamiltonian(space, p).matrix
        lines = transition_energies(p)

        def level(config, photons=0):
            i = space.index_of(BasisState(config, photons))
            return h[i, i].real

        # emission removes an electron-hole pair with opposite spins
        x_plus = ChargeConfig(1, 0, 1, 1)
        single_hole = ChargeConfig(0, 0, 1, 0)
        assert level(x_plus) - level(single_hole) == pytest.approx(lines["X_plus"])
        x_minus = ChargeConfig(1, 1, 1, 0)
        single_e = ChargeConfig(1, 0, 0, 0)
        assert level(x_minus) - level(single_e) == pytest.approx(lines["X_minus"])
