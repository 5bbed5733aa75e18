"""Dense linear-algebra substrate: spaces, states, operators, evolution, metrics.

Everything downstream (time-correlation protocols, open-system
reconstruction, embedding simulators, ion models, digital-analog
Trotterization) is validated against this layer.  All values are immutable
after construction and every operation is a pure function.
"""
from .spaces import (
    DEFAULT_N_MAX,
    DIMENSION_CAP,
    Boson,
    DimensionCapError,
    DimensionMismatchError,
    HilbertSpace,
    Qubit,
)
from .operators import (
    OperatorSum,
    PAULIS,
    SIGMA_I,
    SIGMA_M,
    SIGMA_P,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    all_pauli_labels,
    boson_annihilation,
    boson_displacement_generator,
    boson_number,
    dense_pauli,
    kron_all,
)
from .states import (
    DensityMatrix,
    EXCITED,
    GROUND,
    PureState,
    all_plus_state,
    basis_state,
    bell_state,
    coherent_state,
    ghz_state,
    maximally_mixed,
    plus_state,
    qubit_register_state,
    random_product_state,
    random_pure_state,
    thermal_qubit,
)
from .evolve import (
    DEFAULT_TOL,
    Schedule,
    SchedulePiece,
    ToleranceError,
    evolve,
    evolve_trace,
    propagator,
)
from .metrics import (
    expectation,
    fidelity,
    operator_infinity_norm,
    partial_trace,
    pauli_decompose,
    pauli_recompose,
    trace_distance,
)

__all__ = [name for name in dir() if not name.startswith("_")]
