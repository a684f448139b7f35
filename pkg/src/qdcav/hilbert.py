"""Basis enumeration and elementary operators.

The state space is the tensor product of four fermionic modes (electron
spin up/down, heavy-hole pseudo-spin up/down) with a truncated photon
Fock space.  A basis state is written |i, j> ⊗ |k, l> ⊗ |p> where i, j
are electron occupations of the +1/2 and -1/2 spins, k, l are hole
occupations of the +3/2 and -3/2 pseudo-spins, and p counts cavity
photons.

Conventions frozen here and relied upon everywhere else:

* charge index = i + 2j + 4k + 8l, full index = charge index + 16*p;
* Jordan-Wigner sign strings run over the mode order
  (c_up, c_dn, d_up, d_dn), i.e. electrons and holes form a single
  fermionic algebra over four modes and mutually anticommute.

Only convention-independent quantities (spectra, populations, norms)
are meaningful to external callers; internal operator phases are not a
contract.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

N_CHARGE = 16

# Fermionic mode order for Jordan-Wigner strings.
MODE_C_UP, MODE_C_DN, MODE_D_UP, MODE_D_DN = 0, 1, 2, 3

_MODE_OF = {
    ("electron", "up"): MODE_C_UP,
    ("electron", "down"): MODE_C_DN,
    ("hole", "up"): MODE_D_UP,
    ("hole", "down"): MODE_D_DN,
}


@dataclass(frozen=True)
class ChargeConfig:
    """Occupations (i, j, k, l) of the four carrier modes."""

    i: int
    j: int
    k: int
    l: int

    def __post_init__(self):
        for occ in (self.i, self.j, self.k, self.l):
            if occ not in (0, 1):
                raise ValueError("occupations must be 0 or 1")

    @property
    def index(self) -> int:
        return self.i + 2 * self.j + 4 * self.k + 8 * self.l

    @classmethod
    def from_index(cls, idx: int) -> "ChargeConfig":
        if not 0 <= idx < N_CHARGE:
            raise ValueError(f"charge index out of range: {idx}")
        return cls(idx & 1, (idx >> 1) & 1, (idx >> 2) & 1, (idx >> 3) & 1)

    @property
    def n_electrons(self) -> int:
        return self.i + self.j

    @property
    def n_holes(self) -> int:
        return self.k + self.l

    @property
    def n_carriers(self) -> int:
        return self.n_electrons + self.n_holes

    def label(self) -> str:
        key = (self.i, self.j, self.k, self.l)
        if key in _LABELS:
            return _LABELS[key]
        if self.n_electrons == 1 and self.n_holes == 2:
            return f"X+({'up' if self.i else 'dn'})"
        if self.n_electrons == 2 and self.n_holes == 1:
            return f"X-({'up' if self.k else 'dn'})"
        return f"({self.i}{self.j}{self.k}{self.l})"


GS = ChargeConfig(0, 0, 0, 0)
BRIGHT_PLUS = ChargeConfig(0, 1, 1, 0)    # |+1>: spin -1/2 electron, +3/2 hole
BRIGHT_MINUS = ChargeConfig(1, 0, 0, 1)   # |-1>: spin +1/2 electron, -3/2 hole
DARK_PLUS = ChargeConfig(1, 0, 1, 0)      # |+2>
DARK_MINUS = ChargeConfig(0, 1, 0, 1)     # |-2>
BIEXCITON = ChargeConfig(1, 1, 1, 1)

X_PLUS_CONFIGS = tuple(
    c for c in (ChargeConfig.from_index(n) for n in range(N_CHARGE))
    if c.n_electrons == 1 and c.n_holes == 2
)
X_MINUS_CONFIGS = tuple(
    c for c in (ChargeConfig.from_index(n) for n in range(N_CHARGE))
    if c.n_electrons == 2 and c.n_holes == 1
)

ALL_CONFIGS = tuple(ChargeConfig.from_index(n) for n in range(N_CHARGE))

_LABELS = {
    (0, 0, 0, 0): "GS",
    (0, 1, 1, 0): "+1",
    (1, 0, 0, 1): "-1",
    (1, 0, 1, 0): "+2",
    (0, 1, 0, 1): "-2",
    (1, 1, 1, 1): "XX0",
    (1, 0, 0, 0): "e(up)",
    (0, 1, 0, 0): "e(dn)",
    (0, 0, 1, 0): "h(up)",
    (0, 0, 0, 1): "h(dn)",
    (1, 1, 0, 0): "2e",
    (0, 0, 1, 1): "2h",
}


@dataclass(frozen=True)
class BasisState:
    charge: ChargeConfig
    photons: int

    def __post_init__(self):
        if self.photons < 0:
            raise ValueError("photon number must be >= 0")


class HilbertSpace:
    """Ordered basis of 16 charge configurations times a Fock ladder."""

    def __init__(self, p_max: int):
        if p_max < 0:
            raise ValueError("p_max must be >= 0")
        self.p_max = int(p_max)
        self.dim = N_CHARGE * (self.p_max + 1)

    def index_of(self, state: BasisState) -> int:
        if state.photons > self.p_max:
            raise ValueError(f"photon number {state.photons} exceeds p_max={self.p_max}")
        return state.charge.index + N_CHARGE * state.photons

    def state_at(self, index: int) -> BasisState:
        if not 0 <= index < self.dim:
            raise ValueError(f"basis index out of range: {index}")
        return BasisState(ChargeConfig.from_index(index % N_CHARGE), index // N_CHARGE)

    def states(self):
        return [self.state_at(n) for n in range(self.dim)]

    def k_values(self) -> np.ndarray:
        """Conserved excitation K = p + (carrier count)/2 per basis state."""
        k = np.empty(self.dim)
        for n in range(self.dim):
            s = self.state_at(n)
            k[n] = s.photons + 0.5 * s.charge.n_carriers
        return k

    def basis_vector(self, charge: ChargeConfig, photons: int = 0) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[self.index_of(BasisState(charge, photons))] = 1.0
        return v

    def __eq__(self, other):
        return isinstance(other, HilbertSpace) and other.p_max == self.p_max

    def __hash__(self):
        return hash(("HilbertSpace", self.p_max))

    def __repr__(self):
        return f"HilbertSpace(p_max={self.p_max}, dim={self.dim})"


def enumerate_basis(p_max: int) -> HilbertSpace:
    return HilbertSpace(p_max)


class Operator:
    """A complex matrix acting on a HilbertSpace.

    Dense storage; the working dimensions here (<= 64) never justify a
    sparse representation before the superoperator memory dominates.
    Matrices are frozen read-only so operators can be shared freely.
    """

    __slots__ = ("space", "matrix")

    def __init__(self, space: HilbertSpace, matrix: np.ndarray):
        matrix = np.asarray(matrix, dtype=complex)
        if matrix.shape != (space.dim, space.dim):
            raise ValueError(f"matrix shape {matrix.shape} does not match dim {space.dim}")
        matrix = matrix.copy()
        matrix.setflags(write=False)
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "matrix", matrix)

    def __setattr__(self, name, value):
        raise AttributeError("Operator is immutable")

    def _check(self, other: "Operator"):
        if self.space != other.space:
            raise ValueError("operators act on different spaces")

    def __add__(self, other):
        self._check(other)
        return Operator(self.space, self.matrix + other.matrix)

    def __sub__(self, other):
        self._check(other)
        return Operator(self.space, self.matrix - other.matrix)

    def __mul__(self, scalar):
        return Operator(self.space, self.matrix * scalar)

    __rmul__ = __mul__

    def __neg__(self):
        return Operator(self.space, -self.matrix)

    def __matmul__(self, other):
        self._check(other)
        return Operator(self.space, self.matrix @ other.matrix)

    def dag(self) -> "Operator":
        return Operator(self.space, self.matrix.conj().T)

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def hermiticity_error(self) -> float:
        return float(np.abs(self.matrix - self.matrix.conj().T).max())

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return self.hermiticity_error() <= tol

    def norm_max(self) -> float:
        return float(np.abs(self.matrix).max())

    def __repr__(self):
        return f"Operator(dim={self.space.dim})"


def identity(space: HilbertSpace) -> Operator:
    return Operator(space, np.eye(space.dim, dtype=complex))


def zero(space: HilbertSpace) -> Operator:
    return Operator(space, np.zeros((space.dim, space.dim), dtype=complex))


@lru_cache(maxsize=None)
def _charge_annihilator(mode: int) -> np.ndarray:
    """16x16 annihilator of one fermionic mode with Jordan-Wigner signs."""
    mat = np.zeros((N_CHARGE, N_CHARGE), dtype=complex)
    bit = 1 << mode
    for idx in range(N_CHARGE):
        if idx & bit:
            sign = (-1) ** bin(idx & (bit - 1)).count("1")
            mat[idx ^ bit, idx] = sign
    return mat


def _lift_charge(space: HilbertSpace, charge_matrix: np.ndarray) -> np.ndarray:
    # full index = charge + 16*p, so the Fock factor is the slow index.
    return np.kron(np.eye(space.p_max + 1), charge_matrix)


def fermion_operator(space: HilbertSpace, species: str, spin: str, kind: str) -> Operator:
    """Carrier creation/annihilation operator on the full space.

    Acts as the identity on the photon factor.  `species` is "electron"
    or "hole", `spin` is "up" or "down", `kind` is "annihilate" or
    "create".
    """
    try:
        mode = _MODE_OF[(species, spin)]
    except KeyError:
        raise ValueError(f"unknown species/spin: {species!r}/{spin!r}") from None
    if kind not in ("annihilate", "create"):
        raise ValueError(f"unknown kind: {kind!r}")
    m = _charge_annihilator(mode)
    if kind == "create":
        m = m.conj().T
    return Operator(space, _lift_charge(space, m))


def photon_annihilator(space: HilbertSpace) -> Operator:
    """Cavity Bose annihilator; a'|p_max> = 0 under the truncation."""
    n_fock = space.p_max + 1
    a_fock = np.zeros((n_fock, n_fock), dtype=complex)
    for p in range(1, n_fock):
        a_fock[p - 1, p] = np.sqrt(p)
    return Operator(space, np.kron(a_fock, np.eye(N_CHARGE)))


@dataclass(frozen=True)
class CompositeOperators:
    """Named operators built from the carrier/photon primitives.

    n_*: electron number, m_*: hole number; se_* / sh_*: effective spin
    operators of electrons and heavy holes; bx / by: annihilators of the
    x- and y-polarized bright electron-hole pair.
    """

    n_up: Operator
    n_dn: Operator
    m_up: Operator
    m_dn: Operator
    se_plus: Operator
    se_minus: Operator
    se_x: Operator
    se_y: Operator
    se_z: Operator
    sh_plus: Operator
    sh_minus: Operator
    sh_z: Operator
    bx: Operator
    by: Operator


def composite_operators(space: HilbertSpace) -> CompositeOperators:
    c_up = fermion_operator(space, "electron", "up", "annihilate")
    c_dn = fermion_operator(space, "electron", "down", "annihilate")
    d_up = fermion_operator(space, "hole", "up", "annihilate")
    d_dn = fermion_operator(space, "hole", "down", "annihilate")

    n_up = c_up.dag() @ c_up
    n_dn = c_dn.dag() @ c_dn
    m_up = d_up.dag() @ d_up
    m_dn = d_dn.dag() @ d_dn

    se_plus = c_up.dag() @ c_dn
    se_minus = c_dn.dag() @ c_up
    se_z = 0.5 * (n_up - n_dn)
    se_x = 0.5 * (se_plus + se_minus)
    se_y = -0.5j * (se_plus - se_minus)

    sh_plus = d_up.dag() @ d_dn
    sh_minus = d_dn.dag() @ d_up
    sh_z = 0.5 * (m_up - m_dn)

    inv_sqrt2 = 1.0 / np.sqrt(2.0)
    bx = inv_sqrt2 * (d_dn @ c_up - d_up @ c_dn)
    by = inv_sqrt2 * (d_dn @ c_up + d_up @ c_dn)

    return CompositeOperators(
        n_up=n_up, n_dn=n_dn, m_up=m_up, m_dn=m_dn,
        se_plus=se_plus, se_minus=se_minus, se_x=se_x, se_y=se_y, se_z=se_z,
        sh_plus=sh_plus, sh_minus=sh_minus, sh_z=sh_z,
        bx=bx, by=by,
    )


def excitation_operator(space: HilbertSpace) -> Operator:
    """K = a'a + (electron + hole count)/2; conserved by the coherent dynamics."""
    return Operator(space, np.diag(space.k_values().astype(complex)))
