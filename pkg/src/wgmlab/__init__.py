"""wgmlab: whispering-gallery-mode microsphere lasers with quantum-dot gain."""

from .config import ConfigError, RunConfig, parse_config
from .coupling import (
    DielectricMedium,
    MesaPerturber,
    PerturbationResult,
    ScanProfile,
    fresnel_evanescent_te,
    gap_scaling,
    loading_report,
    mesa_scan_profile,
    profile_fwhm,
    scattering_efficiency,
    shift_and_broadening,
)
from .gain import (
    PumpBudget,
    QDEnsemble,
    coupled_dot_count,
    expected_mode_count,
    fsr_coverage,
    homogeneous_width,
    inhomogeneous_width,
    layer_absorption_efficiency,
    pump_chain,
    pump_sufficiency,
)
from .laser import (
    CavityQEDParams,
    FrequencyHierarchy,
    LLCurve,
    emission_rate,
    frequency_hierarchy,
    ll_curve,
    threshold_parameter,
    vacuum_rabi,
)
from .modes import (
    LinewidthBudget,
    ModeDescriptor,
    ModeIndex,
    SphereGeometry,
    angular_number,
    compose_linewidth,
    effective_index,
    evanescent_decay,
    free_spectral_range,
    mode_volume,
    polar_intensity,
    quality_factor,
    transverse_extent,
)
from .report import design_report

__version__ = "0.1.0"
