"""Entanglement generated by non-relativistic 1D two-particle scattering.

Quantifies interparticle entanglement through the purity of the
one-particle reduced density matrix: closed forms for Gaussian product
states under unimodular coordinate maps, S-matrix out-state construction
for standard 1D potentials, numerical purity of arbitrary sampled states,
and coarse-grained approximations.
"""

from . import errors
from .purity import (
    ModeSplitReport,
    PurityReport,
    ReducedDensityMatrix,
    mode_split_purity,
    purity_direct,
    purity_functional,
    purity_numeric,
    reduced_density_matrix,
)
from .scatter import (
    IEInvariance,
    OutState,
    SplitPurity,
    VariationDiagnostic,
    amplitude_variation_diagnostic,
    constant_amplitude_purity,
    ie_purity_invariance_check,
    out_state,
    qubit_model_purity,
    split_purity,
)
from .smatrix import (
    AmplitudePair,
    AmplitudeTable,
    DeltaBarrier,
    DoubleDelta,
    HardWall,
    PotentialModel,
    SquareBarrier,
    amplitudes,
    tabulate_amplitudes,
)
from .transforms import (
    LinearMap2,
    apply_map_to_sampled,
    com_map,
    compose,
    flip_map,
    gaussian_purity_under_map,
    identity_map,
    ie_purity,
    invert,
    reflection_map,
    reflection_purity,
    schulman_residual,
)
from .wavepacket import (
    GaussianProductState,
    Grid1D,
    SampledWavefunction,
    StateStatistics,
    apply_local_unitary,
    default_grid,
    default_grids,
    make_gaussian,
    overlap_integral,
    sample_on_grid,
    state_statistics,
)

__version__ = "0.1.0"

__all__ = [
    "AmplitudePair",
    "AmplitudeTable",
    "DeltaBarrier",
    "DoubleDelta",
    "GaussianProductState",
    "Grid1D",
    "HardWall",
    "IEInvariance",
    "LinearMap2",
    "ModeSplitReport",
    "OutState",
    "PotentialModel",
    "PurityReport",
    "ReducedDensityMatrix",
    "SampledWavefunction",
    "SplitPurity",
    "SquareBarrier",
    "StateStatistics",
    "VariationDiagnostic",
    "amplitude_variation_diagnostic",
    "amplitudes",
    "apply_local_unitary",
    "apply_map_to_sampled",
    "com_map",
    "compose",
    "constant_amplitude_purity",
    "default_grid",
    "default_grids",
    "errors",
    "flip_map",
    "gaussian_purity_under_map",
    "identity_map",
    "ie_purity",
    "ie_purity_invariance_check",
    "invert",
    "make_gaussian",
    "mode_split_purity",
    "out_state",
    "overlap_integral",
    "purity_direct",
    "purity_functional",
    "purity_numeric",
    "qubit_model_purity",
    "reduced_density_matrix",
    "reflection_map",
    "reflection_purity",
    "sample_on_grid",
    "schulman_residual",
    "split_purity",
    "state_statistics",
    "tabulate_amplitudes",
]
