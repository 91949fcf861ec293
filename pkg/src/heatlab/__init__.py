"""heatlab: a desk-scale laboratory for 1D heat conduction with variable
conductivity.

The package answers one question from several angles: which boundary flux
measurements determine the conductivity a(x)? Flux data at the driven end
identifies a(x); flux data at the held-at-zero end cannot distinguish a(x)
from its mirror a(1-x). Forward PDE solves, Laplace-domain ODE identities,
Neumann spectra, a completeness probe, and a least-squares reconstructor
each exhibit one face of that asymmetry.

Hot kernels run in a compiled extension when available; set HEATLAB_PURE=1
to force the pure NumPy fallback.
"""

from ._backend import BACKEND, COMPILED
from .core import (
    ConductivityProfile,
    SpaceTimeGrid,
    TimeSeries,
    affine_profile,
    constant_profile,
    make_profile,
    profile_difference,
    profile_from_csv,
    profile_to_csv,
    pwl_profile,
    reflect,
    sampled_profile,
    sin_profile,
    thermal_resistance,
)
from .heat_forward import (
    Drive,
    TemperatureField,
    exp_decay_drive,
    flux_left,
    flux_right,
    make_drive,
    ramp_drive,
    solve_forward,
    step_drive,
    zero_drive,
)
from .laplace import SpectralSample, default_lambda_grid, laplace_transform
from .property_c import (
    CompletenessResult,
    ProductDictionary,
    build_product_dictionary,
    completeness_residual,
    orthogonality_functional,
)
from .reconstruct import (
    AmbiguityReport,
    ReconstructionConfig,
    ReconstructionResult,
    ambiguity_experiment,
    flux_formula_H,
    misfit,
    reconstruct,
)
from .sl_solver import (
    LiouvilleData,
    SLTrajectory,
    derivative_link_residual,
    lambda_overflow_limit,
    liouville_roundtrip_residual,
    liouville_transform,
    neumann_endpoint,
    solve_dirichlet_seed,
    solve_flux_form,
    transformed_length,
)
from .spectrum import (
    NeumannSpectrum,
    SpectrumShortfallError,
    neumann_spectrum,
    spectrum_symmetry_report,
)

__version__ = "0.1.0"
