"""Multitaper structure-factor estimation for stationary spatial point processes."""

from .covariance import BumpCovariance, ExponentialCovariance
from .estimator import (
    MultitaperStructureFactor,
    RiskBoundTerms,
    SpectralEstimate,
    centered_statistic,
    linear_statistic,
    multitaper_oracle,
    multitaper_plugin,
    risk_bound_terms,
)
from .experiment import (
    ConfigError,
    ExperimentConfig,
    ExperimentResult,
    parse_config,
    run_experiment,
    serialize_config,
)
from .hermite import (
    TaperBasis,
    dilation_factor,
    hermite_function,
    psi,
    sobolev_norm_sq,
    tail_mass,
    taper_value,
    windowed_fourier_integral,
)
from .models import (
    ModelSpec,
    chi_square_bound,
    intensity,
    make_model,
    pair_correlation_arcsin,
    structure_factor,
    thinned_structure_factor,
)
from .patterns import PointPattern, Window, read_pattern, write_pattern
from .select import (
    CvConfig,
    FrequencyPairSet,
    TaperCountCV,
    build_pair_set,
    circle_pairs,
    cv_criterion,
    interpolate_selection,
    k0_allowed_diagnostics,
    select_tapers,
)
from .simulate import (
    SeedStream,
    sample_arcsin_cox,
    sample_ginibre,
    sample_lgcp,
    sample_matern_cluster,
    sample_model,
    sample_perturbed_lattice,
    sample_poisson,
    sample_thomas,
    thin,
)

__version__ = "0.1.0"
