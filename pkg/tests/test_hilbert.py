import numpy as np
import pytest
from hypothesis import given, strategies as st

from qdcav.hilbert import (
    ALL_CONFIGS,
    BIEXCITON,
    BRIGHT_MINUS,
    BRIGHT_PLUS,
    DARK_MINUS,
    DARK_PLUS,
    GS,
    N_CHARGE,
    BasisState,
    ChargeConfig,
    Operator,
    X_MINUS_CONFIGS,
    X_PLUS_CONFIGS,
    composite_operators,
    enumerate_basis,
    excitation_operator,
    fermion_operator,
    identity,
    photon_annihilator,
)


class TestChargeConfig:
    def test_sixteen_distinct_configs(self):
        assert len(ALL_CONFIGS) == 16
        assert len({c.index for c in ALL_CONFIGS}) == 16

    def test_named_aliases(self):
        assert GS == ChargeConfig(0, 0, 0, 0)
        assert BRIGHT_PLUS == ChargeConfig(0, 1, 1, 0)
        assert BRIGHT_MINUS == ChargeConfig(1, 0, 0, 1)
        assert DARK_PLUS == ChargeConfig(1, 0, 1, 0)
        assert DARK_MINUS == ChargeConfig(0, 1, 0, 1)
        assert BIEXCITON == ChargeConfig(1, 1, 1, 1)
        assert all(c.n_electrons == 1 and c.n_holes == 2 for c in X_PLUS_CONFIGS)
        assert all(c.n_electrons == 2 and c.n_holes == 1 for c in X_MINUS_CONFIGS)
        assert len(X_PLUS_CONFIGS) == len(X_MINUS_CONFIGS) == 2

    def test_bad_occupation_rejected(self):
        with pytest.raises(ValueError):
            ChargeConfig(2, 0, 0, 0)

    @given(st.integers(0, 15))
    def test_index_round_trip(self, idx):
        assert ChargeConfig.from_index(idx).index == idx


class TestHilbertSpace:
    def test_dimensions(self):
        assert enumerate_basis(0).dim == 16
        assert enumerate_basis(2).dim == 48

    def test_documented_index(self):
        space = enumerate_basis(2)
        assert space.index_of(BasisState(GS, 1)) == 16

    @given(st.integers(0, 3), st.integers(0, 1000))
    def test_state_index_bijection(self, p_max, seed):
        space = enumerate_basis(p_max)
        idx = seed % space.dim
        assert space.index_of(space.state_at(idx)) == idx

    def test_photon_overflow_rejected(self):
        space = enumerate_basis(1)
        with pytest.raises(ValueError):
            space.index_of(BasisState(GS, 2))

    def test_k_values(self):
        space = enumerate_basis(1)
        k = space.k_values()
        assert k[space.index_of(BasisState(GS, 0))] == 0.0
        assert k[space.index_of(BasisState(GS, 1))] == 1.0
        assert k[space.index_of(BasisState(BIEXCITON, 1))] == 3.0


MODES = [("electron", "up"), ("electron", "down"), ("hole", "up"), ("hole", "down")]


@pytest.fixture(scope="module")
def space():
    return enumerate_basis(1)


@pytest.fixture(scope="module")
def charge_space():
    return enumerate_basis(0)


@pytest.fixture(scope="module")
def charge_ops(charge_space):
    return composite_operators(charge_space)


class TestFermionOperators:

    def test_canonical_anticommutation(self, space):
        eye = identity(space).matrix
        for i, (sp1, s1) in enumerate(MODES):
            a1 = fermion_operator(space, sp1, s1, "annihilate").matrix
            for j, (sp2, s2) in enumerate(MODES):
                c2 = fermion_operator(space, sp2, s2, "create").matrix
                a2 = fermion_operator(space, sp2, s2, "annihilate").matrix
                anti = a1 @ c2 + c2 @ a1
                expected = eye if i == j else np.zeros_like(eye)
                assert np.abs(anti - expected).max() <= 1e-14
                assert np.abs(a1 @ a2 + a2 @ a1).max() <= 1e-14

    def test_annihilates_empty_mode(self, space):
        c_up = fermion_operator(space, "electron", "up", "annihilate")
        for p in range(space.p_max + 1):
            v = space.basis_vector(GS, p)
            assert np.abs(c_up.matrix @ v).max() == 0.0

    def test_creation_order_antisymmetric(self, space):
        c_up_d = fermion_operator(space, "electron", "up", "create").matrix
        c_dn_d = fermion_operator(space, "electron", "down", "create").matrix
        v = space.basis_vector(GS, 0)
        assert np.allclose(c_dn_d @ c_up_d @ v, -(c_up_d @ c_dn_d @ v))

    def test_electron_hole_mutual_anticommutation(self, space):
        c = fermion_operator(space, "electron", "up", "annihilate").matrix
        d_d = fermion_operator(space, "hole", "down", "create").matrix
        assert np.abs(c @ d_d + d_d @ c).max() <= 1e-14

    def test_identity_on_photon_factor(self, space):
        # the full matrix must be the Fock identity kron the charge block
        op = fermion_operator(space, "hole", "up", "annihilate").matrix
        block = op[:N_CHARGE, :N_CHARGE]
        rebuilt = np.kron(np.eye(space.p_max + 1), block)
        assert np.array_equal(op, rebuilt)

    def test_unknown_labels_rejected(self, space):
        with pytest.raises(ValueError):
            fermion_operator(space, "positron", "up", "annihilate")
        with pytest.raises(ValueError):
            fermion_operator(space, "electron", "up", "destroy")


class TestPhotonOperator:
    def test_lowering_amplitudes(self):
        space = enumerate_basis(2)
        a = photon_annihilator(space).matrix
        v1 = space.basis_vector(GS, 1)
        out = a @ v1
        assert np.allclose(out, space.basis_vector(GS, 0))
        n = a.conj().T @ a
        v2 = space.basis_vector(GS, 2)
        assert np.allclose(n @ v2, 2.0 * v2)

    def test_truncation_row(self):
        space = enumerate_basis(2)
        a = photon_annihilator(space).matrix
        top = space.basis_vector(GS, 2)
        # a a' on the top Fock level is forced to zero by the cutoff
        assert abs(top.conj() @ (a @ a.conj().T @ top)) == 0.0

    def test_commutator_below_cutoff(self):
        space = enumerate_basis(3)
        a = photon_annihilator(space).matrix
        comm = a @ a.conj().T - a.conj().T @ a
        # identity on p < p_max, only the truncation sector deviates
        for p in range(space.p_max):
            v = space.basis_vector(GS, p)
            assert np.allclose(comm @ v, v)

    def test_identity_on_charge_factor(self):
        space = enumerate_basis(2)
        a = photon_annihilator(space).matrix
        fock = np.zeros((3, 3), dtype=complex)
        for p in range(1, 3):
            fock[p - 1, p] = np.sqrt(p)
        assert np.array_equal(a, np.kron(fock, np.eye(N_CHARGE)))


class TestComposites:
    def test_bright_pair_creation_from_vacuum(self, charge_space, charge_ops):
        got = charge_ops.bx.dag().matrix @ charge_space.basis_vector(GS, 0)
        expected = -(charge_space.basis_vector(BRIGHT_PLUS, 0)
                     - charge_space.basis_vector(BRIGHT_MINUS, 0)) / np.sqrt(2)
        assert np.allclose(got, expected, atol=1e-14)

    def test_spin_z_on_dark_state(self, charge_space, charge_ops):
        v = charge_space.basis_vector(DARK_PLUS, 0)
        assert np.allclose(charge_ops.se_z.matrix @ v, 0.5 * v)

    def test_ladder_product_maps_bright_states(self, charge_space, charge_ops):
        flip = charge_ops.sh_plus.matrix @ charge_ops.se_minus.matrix
        got = flip @ charge_space.basis_vector(BRIGHT_MINUS, 0)
        target = charge_space.basis_vector(BRIGHT_PLUS, 0)
        assert abs(abs(target.conj() @ got) - 1.0) <= 1e-14
        assert abs(np.linalg.norm(got) - 1.0) <= 1e-14

    def test_pair_creation_channel_complete(self, charge_space, charge_ops):
        v = charge_space.basis_vector(GS, 0)
        for op in (charge_ops.bx, charge_ops.by):
            amp = v.conj() @ (op.matrix @ op.dag().matrix) @ v
            assert abs(amp - 1.0) <= 1e-14


class TestOperatorInterface:
    def test_space_mismatch_rejected(self):
        a = identity(enumerate_basis(0))
        b = identity(enumerate_basis(1))
        with pytest.raises(ValueError):
            a + b
        with pytest.raises(ValueError):
            a @ b

    def test_immutability(self):
        op = identity(enumerate_basis(0))
        with pytest.raises(AttributeError):
            op.matrix = np.zeros((16, 16))
        with pytest.raises(ValueError):
            op.matrix[0, 0] = 2.0

    def test_shape_validation(self):
        with pytest.raises(ValueError):
            Operator(enumerate_basis(0), np.eye(4))

    def test_excitation_operator_diagonal(self):
        space = enumerate_basis(1)
        k = excitation_operator(space)
        assert np.allclose(k.matrix, np.diag(space.k_values()))
