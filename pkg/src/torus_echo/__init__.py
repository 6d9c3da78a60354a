"""Quantum maps on the discretized torus: Loschmidt echo, purity decay and
decay-rate extraction under phase-space decoherence channels."""

from .hilbert import (
    SpaceDescriptor,
    make_space,
    coherent_state,
    dft_position_to_momentum,
    dft_momentum_to_position,
    translate,
    rho_to_chord,
    chord_to_rho,
    purity,
)
from .dynamics import (
    MapParams,
    Propagator,
    classical_step,
    lyapunov_closed_form,
    lyapunov_numeric,
    build_propagator,
    apply_propagator,
    apply_to_density,
    propagator_matrix,
)
from .echo import PerturbationSpec, EchoCurve, le_curve, averaged_le
from .decoherence import (
    DecoherenceKernel,
    ChordMultiplier,
    PurityCurve,
    build_kernel,
    identity_kernel,
    gaussian_kernel,
    depolarizing_kernel,
    lorentz_kernel,
    mixture_kernel,
    chord_multiplier,
    apply_decoherence,
    apply_decoherence_direct,
    purity_curve,
)
from .analysis import (
    RateFit,
    SweepRow,
    FitError,
    fit_decay_rate,
    gdm_rate_prediction,
    dc_rate_prediction,
    sweep_echo,
    sweep_purity,
)

__version__ = "0.1.0"

__all__ = [
    "SpaceDescriptor", "make_space", "coherent_state",
    "dft_position_to_momentum", "dft_momentum_to_position", "translate",
    "rho_to_chord", "chord_to_rho", "purity",
    "MapParams", "Propagator", "classical_step", "lyapunov_closed_form",
    "lyapunov_numeric", "build_propagator", "apply_propagator",
    "apply_to_density", "propagator_matrix",
    "PerturbationSpec", "EchoCurve", "le_curve", "averaged_le",
    "DecoherenceKernel", "ChordMultiplier", "PurityCurve",
    "build_kernel", "identity_kernel",
    "gaussian_kernel", "depolarizing_kernel", "lorentz_kernel",
    "mixture_kernel", "chord_multiplier", "apply_decoherence",
    "apply_decoherence_direct", "purity_curve",
    "RateFit", "SweepRow", "FitError", "fit_decay_rate",
    "gdm_rate_prediction", "dc_rate_prediction", "sweep_echo", "sweep_purity",
    "__version__",
]
