"""Open-system simulator of a nanocavity coupled to quantum-dot exciton complexes."""

from .params import ModelParams
from .hilbert import (
    BasisState,
    ChargeConfig,
    CompositeOperators,
    HilbertSpace,
    Operator,
    composite_operators,
    enumerate_basis,
    excitation_operator,
    fermion_operator,
    identity,
    photon_annihilator,
)
from .hamiltonian import (
    assemble_hamiltonian,
    build_coulomb,
    build_exchange,
    build_frame_detuning,
    build_light_matter,
    build_light_matter_xy,
    build_overhauser,
    transition_energies,
    tune_cavity_to,
)
from .liouvillian import (
    DensityMatrix,
    SuperOperator,
    assemble_liouvillian,
    block_decompose,
    build_L_cav,
    build_L_inj,
    build_L_phase,
    build_L_spon,
    build_L_spon_xy,
    hamiltonian_superoperator,
    lindblad_dissipator,
)
from .steady_state import (
    NonUniqueSteadyState,
    SolveFailure,
    charge_populations,
    expectation,
    solve_steady,
    solve_steady_block,
    solve_steady_nullspace,
)
from .spectra import (
    FrequencyGrid,
    ResolventEngine,
    SpectrumSeries,
    correlation_function,
    resolvent_spectrum,
    s_L,
    s_R,
    s_cav,
    s_total,
    s_x,
    s_y,
    sum_rule_check,
    time_domain_oracle,
)
from .analysis import (
    PeakSet,
    PeaksNotFound,
    classify_triplet,
    f_factor,
    find_peaks,
    predict_cavity_intensity,
    vrs_splitting,
)

__version__ = "0.1.0"
