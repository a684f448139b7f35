"""Lindblad dissipators and the full generator on vectorized states.

Vectorization is column-major throughout: vec(X)[r + dim*c] = X[r, c],
so vec(A X B) = kron(B.T, A) vec(X).  The generator acts on vec(rho) in
units of ueV (hbar = 1); every dissipator carries the half rate as its
prefactor, so populations decay at twice the configured half rate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hamiltonian import assemble_hamiltonian
from .hilbert import HilbertSpace, Operator, composite_operators, fermion_operator, photon_annihilator
from .params import ModelParams


def vec(matrix: np.ndarray) -> np.ndarray:
    return np.asarray(matrix).reshape(-1, order="F")

def unvec(vector: np.ndarray, dim: int) -> np.ndarray:
    return np.asarray(vector).reshape((dim, dim), order="F")


def spre(a: np.ndarray) -> np.ndarray:
    """Superoperator of left multiplication X -> A X."""
    return np.kron(np.eye(a.shape[0]), a)

def spost(b: np.ndarray) -> np.ndarray:
    """Superoperator of right multiplication X -> X B."""
    return np.kron(b.T, np.eye(b.shape[0]))

def sandwich(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Superoperator of X -> A X B."""
    return np.kron(b.T, a)


def trace_vector(dim: int) -> np.ndarray:
    """Row vector t with t @ vec(X) = Tr X."""
    t = np.zeros(dim * dim)
    t[:: dim + 1] = 1.0
    return t


class SuperOperator:
    """A dim^2 x dim^2 matrix acting on column-major vectorized operators."""

    __slots__ = ("space", "matrix")

    def __init__(self, space: HilbertSpace, matrix: np.ndarray):
        matrix = np.asarray(matrix, dtype=complex)
        d2 = space.dim * space.dim
        if matrix.shape != (d2, d2):
            raise ValueError(f"superoperator shape {matrix.shape}, expected {(d2, d2)}")
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "matrix", matrix)
        matrix.setflags(write=False)

    def __setattr__(self, name, value):
        raise AttributeError("SuperOperator is immutable")

    def _check(self, other):
        if self.space != other.space:
            raise ValueError("superoperators act on different spaces")

    def __add__(self, other):
        self._check(other)
        return SuperOperator(self.space, self.matrix + other.matrix)

    def __sub__(self, other):
        self._check(other)
        return SuperOperator(self.space, self.matrix - other.matrix)

    def __mul__(self, scalar):
        return SuperOperator(self.space, self.matrix * scalar)

    __rmul__ = __mul__

    def apply(self, rho_matrix: np.ndarray) -> np.ndarray:
        return unvec(self.matrix @ vec(rho_matrix), self.space.dim)

    def norm_max(self) -> float:
        return float(np.abs(self.matrix).max())

    def trace_annihilation_error(self) -> float:
        """max |Tr L(E_ij)| over all matrix units; ~0 for a Lindblad generator."""
        t = trace_vector(self.space.dim)
        return float(np.abs(t @ self.matrix).max())

    def __repr__(self):
        return f"SuperOperator(dim={self.space.dim})"


@dataclass(frozen=True)
class DensityMatrix:
    """System state: Hermitian, unit trace, positive up to roundoff."""

    space: HilbertSpace
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (self.space.dim, self.space.dim):
            raise ValueError("density matrix shape mismatch")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def hermiticity_error(self) -> float:
        return float(np.abs(self.matrix - self.matrix.conj().T).max())

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(0.5 * (self.matrix + self.matrix.conj().T)).min())


def lindblad_dissipator(jump: Operator, rate: float) -> SuperOperator:
    """Dissipator X -> -rate (J'J X + X J'J - 2 J X J').

    `rate` is the half rate; the corresponding population decay runs at
    2*rate.  Annihilates the trace for any jump operator.
    """
    if rate < 0:
        raise ValueError("dissipator rate must be >= 0")
    j = jump.matrix
    jd = j.conj().T
    jdj = jd @ j
    m = -rate * (spre(jdj) + spost(jdj) - 2.0 * sandwich(j, jd))
    return SuperOperator(jump.space, m)


def hamiltonian_superoperator(h: Operator) -> SuperOperator:
    """Coherent part X -> -i (H X - X H), with H in ueV and hbar = 1."""
    if not h.is_hermitian(1e-9):
        raise ValueError("Hamiltonian superoperator requires a Hermitian operator")
    m = -1j * (spre(h.matrix) - spost(h.matrix))
    return SuperOperator(h.space, m)


def build_L_cav(space: HilbertSpace, params: ModelParams) -> SuperOperator:
    """Photon escape from the cavity to free space."""
    return lindblad_dissipator(photon_annihilator(space), params.gamma_cav)


def build_L_spon(space: HilbertSpace, params: ModelParams) -> SuperOperator:
    """Direct pair recombination to free space, one channel per spin."""
    c_up = fermion_operator(space, "electron", "up", "annihilate")
    c_dn = fermion_operator(space, "electron", "down", "annihilate")
    d_up = fermion_operator(space, "hole", "up", "annihilate")
    d_dn = fermion_operator(space, "hole", "down", "annihilate")
    # spin-up electron recombines with spin-down hole and vice versa
    out = lindblad_dissipator(d_dn @ c_up, params.gamma_spon)
    out = out + lindblad_dissipator(d_up @ c_dn, params.gamma_spon)
    return out


def build_L_spon_xy(space: HilbertSpace, params: ModelParams) -> SuperOperator:
    """Linear-polarization rewrite of the recombination dissipator.

    Equal to :func:`build_L_spon` entrywise; kept as an independent
    construction for validation.
    """
    ops = composite_operators(space)
    out = lindblad_dissipator(ops.bx, params.gamma_spon)
    out = out + lindblad_dissipator(ops.by, params.gamma_spon)
    return out


def build_L_phase(space: HilbertSpace, params: ModelParams) -> SuperOperator:
    """Pure dephasing through the carrier number operators.

    Diagonal populations are exactly invariant; a coherence between
    states whose occupations differ decays at the sum of the per-channel
    rates weighted by the squared occupation differences.
    """
    ops = composite_operators(space)
    out = lindblad_dissipator(ops.n_up, params.gamma_phase_e)
    out = out + lindblad_dissipator(ops.n_dn, params.gamma_phase_e)
    out = out + lindblad_dissipator(ops.m_up, params.gamma_phase_h)
    out = out + lindblad_dissipator(ops.m_dn, params.gamma_phase_h)
    return out


def build_L_inj(space: HilbertSpace, params: ModelParams) -> SuperOperator:
    """Incoherent carrier injection, spin-random and Pauli blocked."""
    out = None
    for species in ("electron", "hole"):
        for spin in ("up", "down"):
            jump = fermion_operator(space, species, spin, "create")
            d = lindblad_dissipator(jump, params.pump)
            out = d if out is None else out + d
    return out


def assemble_liouvillian(space: HilbertSpace, params: ModelParams) -> SuperOperator:
    """Full generator: commutator part plus the four dissipators."""
    h = assemble_hamiltonian(space, params)
    out = hamiltonian_superoperator(h)
    out = out + build_L_cav(space, params)
    out = out + build_L_spon(space, params)
    out = out + build_L_phase(space, params)
    out = out + build_L_inj(space, params)
    return out


# ----------------------------------------------------------------------
# Block structure.  The generator connects a matrix unit |r><c| only to
# units with the same dK = K(r) - K(c): every Hamiltonian term and every
# jump operator shifts K uniformly.  This holds for the nuclear-field
# term too (spin flips preserve the carrier count), and is verified by
# an explicit scan rather than assumed.

@dataclass(frozen=True)
class Block:
    delta_k: float
    indices: np.ndarray       # vectorized-matrix indices belonging to the block
    matrix: np.ndarray        # restriction of the generator to the block


class BlockDecomposition:
    def __init__(self, space: HilbertSpace, blocks: list[Block], trivial: bool):
        self.space = space
        self.blocks = blocks
        self.trivial = trivial

    def find(self, delta_k: float) -> Block:
        for b in self.blocks:
            if abs(b.delta_k - delta_k) < 1e-9:
                return b
        raise KeyError(f"no block with delta_k={delta_k}")

    def reassemble(self) -> np.ndarray:
        d2 = self.space.dim ** 2
        out = np.zeros((d2, d2), dtype=complex)
        for b in self.blocks:
            out[np.ix_(b.indices, b.indices)] = b.matrix
        return out


def vectorized_delta_k(space: HilbertSpace) -> np.ndarray:
    """dK = K(row) - K(col) for every column-major vectorized index."""
    k = space.k_values()
    # index v = r + dim*c
    return np.subtract.outer(k, k).reshape(-1, order="F")


def block_decompose(liouvillian: SuperOperator, tol: float = 1e-12) -> BlockDecomposition:
    """Partition the generator by dK; fall back to one block if it mixes.

    The returned decomposition is `trivial` (single block holding the
    full matrix) when any entry couples different dK sectors above
    tol * max|L|.
    """
    space = liouvillian.space
    m = liouvillian.matrix
    dk = vectorized_delta_k(space)
    # twice dK is integral; use it as an exact grouping key
    key = np.rint(2.0 * dk).astype(int)

    off_block = key[:, None] != key[None, :]
    scale = max(np.abs(m).max(), 1.0)
    leak = np.abs(np.where(off_block, m, 0.0)).max()
    if leak > tol * scale:
        d2 = space.dim ** 2
        block = Block(delta_k=0.0, indices=np.arange(d2), matrix=m.copy())
        return BlockDecomposition(space, [block], trivial=True)

    blocks = []
    for k2 in np.unique(key):
        idx = np.nonzero(key == k2)[0]
        sub = m[np.ix_(idx, idx)].copy()
        blocks.append(Block(delta_k=k2 / 2.0, indices=idx, matrix=sub))
    return BlockDecomposition(space, blocks, trivial=False)
