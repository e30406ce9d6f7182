"""Spectroscopy of emitters in a 1D waveguide: forward spectra, feature
extraction, separation/rate inversion and separation-change sensing."""

from .errors import (
    BracketError,
    ConfigError,
    DomainError,
    NumericalError,
    RefinementError,
    ScanRangeError,
    SeparabilityError,
    SingularMatrixError,
    UnresolvedBranchError,
    WaveguideQEDError,
)
from .features import (
    DipDescriptor,
    FeatureSet,
    PeakDescriptor,
    analyze,
    auto_grid,
    count_emitters,
    default_window,
    find_extrema,
    measure_fwhm,
)
from .inversion import (
    BranchMatch,
    FitTargets,
    InversionResult,
    coupling_residual,
    disambiguate_branch,
    extract_per_emitter,
    extract_rates,
    invert_dip_lossless,
    invert_lossless,
    invert_lossy,
    invert_separation_lossy,
    measured_splitting,
)
from .model import (
    Emitter,
    EmitterArray,
    Spectrum,
    WaveguideParams,
    apply_gradient_field,
    collective_coupling,
    collective_decomposition,
    collective_resonances,
    compute_spectrum,
    dipole_coupling,
    m_matrix,
    pair_amplitudes,
    scattering_amplitudes,
)
from .sensing import (
    SensingConfig,
    SensingReading,
    asymptotic_dd,
    asymptotic_shift,
    branch_center,
    branch_fwhm,
    dd_to_strain_temperature,
    fbg_shift,
    fbg_sensitivity_ratio,
    min_detectable,
    peak_shift_to_dd,
    read_shift,
    strain_to_dd,
    temperature_to_dd,
)

__version__ = "0.1.0"
