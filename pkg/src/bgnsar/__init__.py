"""Beta generalised normal distribution: special functions, moments, ML fitting, SAR model comparison."""

from ._backend import BACKEND, available, set_backend
from .bgn import (
    BgnParams,
    SampleBatch,
    bgn_cdf,
    bgn_logpdf,
    bgn_pdf,
    bgn_quantile,
    bgn_sample,
    bgn_sf,
    limiting_beta_pdf,
)
from .errors import (
    BgnError,
    ConvergenceError,
    DataError,
    DimensionError,
    DomainError,
    EmptyRegionError,
    ParseError,
    QuadratureError,
    SeriesDivergenceError,
)
from .gn import GnParams, gn_cdf, gn_cdf_std, gn_pdf, gn_pdf_std, gn_quantile
from .mle import FitOptions, FitResult, fit_bgn, init_params, loglik, score
from .moments import SeriesTruncation, c_coeff, j_integral, moment_quadrature, moment_series, v_coeff
from .rivals import (
    CriteriaTriple,
    G0Params,
    GammaParams,
    KParams,
    criteria,
    fit_g0,
    fit_gamma,
    fit_k,
    g0_pdf,
    gamma_pdf,
    k_pdf,
)

__version__ = "0.1.0"
