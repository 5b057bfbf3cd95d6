"""Symmetrized alpha-skew Jensen divergences.

One-parameter family of symmetric divergences running from (half)
Jeffreys to four times Jensen-Shannon for the Shannon generator, with
closed forms on exponential families, CCCP centroids, k-means and a
nearest-centroid alpha sweep.

Hot loops run in a compiled extension when it was built; ``BACKEND``
says which implementation is active ("compiled" or "python").
"""
from ._backend import BACKEND
from .centroids import (
    CentroidProblem,
    CentroidResult,
    cccp_step,
    centroid_expfam,
    energy,
    init_arithmetic,
    init_quasi_arithmetic,
    solve_centroid,
)
from .clustering import (
    LabeledDataset,
    SweepReport,
    alpha_sweep,
    class_centroids,
    divergence_matrix,
    kmeans,
    nn_classify,
    synth_dataset,
)
from .divergences import (
    PhiGenerator,
    couple_phi,
    cross_entropy,
    ekl,
    entropy,
    jeffreys,
    js,
    js_alpha,
    k_alpha,
    k_div,
    kl,
    l_alpha,
    phi_divergence,
    s_param,
    scalar_profile,
    skew_jensen,
    skl_alpha,
    sym_skew_jensen,
)
from .errors import ConfigurationError, DomainError, NumericalError, ParseError, SkewJensenError
from .expfam import (
    NaturalParam,
    bhattacharyya_alpha,
    jeffreys_expfam,
    kl_expfam,
    make_family,
    quadrature_bhattacharyya,
    sym_bhattacharyya,
    to_natural,
    to_source,
)
from .generators import ConvexGenerator, SeparableGenerator, bregman, jensen_gap, make_generator
from .io import IngestionConfig, intensity_histogram, load_histograms

__version__ = "0.1.0"
