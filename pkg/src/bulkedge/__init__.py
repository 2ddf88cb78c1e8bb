"""Lattice interface operators, spectral gap filling and bulk conductance.

Builds two-dimensional tight-binding insulators (the Haldane pair in
particular) on periodic windows, joins them across arbitrary domains, and
measures spectra, conductances and kernel estimates.
"""
from .bounds import BoundCheck, default_sweep, verify_conv_bound, verify_ct_bound, verify_norm_bounds, verify_sum_bounds
from .conductance import (
    ConductanceReport,
    SwitchPair,
    chern_fhs,
    sigma_realspace,
    translation_invariance_check,
    trilinear_trace_bound,
)
from .domains import Domain, boundary, dist_to_boundary, filling_radius, make_domain, parse_domain
from .errors import (
    BulkEdgeError,
    ContractViolation,
    DegenerateCutError,
    GapError,
    GeometryError,
    HypothesisError,
    ParameterError,
    PrecisionError,
    PreconditionError,
    SingularityError,
)
from .hamiltonians import (
    BlochSymbol,
    ModelConstants,
    StencilOperator,
    build_model,
    model_constants,
    shortrange_certificate,
    symbol_eval,
)
from .interface import InterfaceOperator, assemble_haldane_edge, assemble_interface, verify_assumption_a2
from .lattice import Orbital, Site, TorusWindow, ball_sites, l1_distance, torus_distance, torus_wrap
from .spectral import (
    DecayFit,
    DensityReport,
    ProjectorData,
    SpectralData,
    decay_probe,
    delta_density,
    eig_hermitian,
    fourier_apply_inverse,
    gap_at,
    invertibility_margin,
    spectral_projector,
    strip_inverse_ratio,
)

__version__ = "0.1.0"
