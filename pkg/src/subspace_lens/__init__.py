"""Glyph-augmented scatterplots of dimensionality-reduced data.

The package projects high-dimensional points to 2D (PCA or stress-based
MDS), extracts each point's local linear subspace with kNN + local PCA,
transports the basis vectors into the plane through the Jacobian of the
projection (obtained analytically by differentiating the optimizer's
stationarity condition), wraps them in smooth hull glyphs, scores the
projection per point, and serializes everything into a single scene
document for the bundled viewer.
"""

__version__ = "0.1.0"

from .errors import (
    ConvergenceError,
    NumericalError,
    SchemaError,
    SubspaceLensError,
    ValidationError,
)
from .glyph import Glyph, build_glyphs
from .implicit import (
    JacobianBlock,
    TransformedSubspace,
    all_pointwise_jacobians,
    finite_difference_jacobian,
    implicit_jacobian,
    transform_subspace,
)
from .ingest import DataMatrix, deduplicate, load_csv, standardize
from .mds import Embedding, MdsConfig, run_smacof
from .pca import LinearMap, fit_pca, project_points, transform_vectors_linear
from .quality import QualityReport, compute_quality
from .scene import (
    PipelineConfig,
    SceneDocument,
    read_scene,
    run_pipeline,
    write_scene,
)
from .subspace import LocalSubspace, knn, local_pca
from .synth import planar_grid, two_planes

__all__ = [
    "ConvergenceError",
    "DataMatrix",
    "Embedding",
    "Glyph",
    "JacobianBlock",
    "LinearMap",
    "LocalSubspace",
    "MdsConfig",
    "NumericalError",
    "PipelineConfig",
    "QualityReport",
    "SceneDocument",
    "SchemaError",
    "SubspaceLensError",
    "TransformedSubspace",
    "ValidationError",
    "all_pointwise_jacobians",
    "build_glyphs",
    "compute_quality",
    "deduplicate",
    "finite_difference_jacobian",
    "fit_pca",
    "implicit_jacobian",
    "knn",
    "load_csv",
    "local_pca",
    "planar_grid",
    "project_points",
    "read_scene",
    "run_pipeline",
    "run_smacof",
    "standardize",
    "transform_subspace",
    "transform_vectors_linear",
    "two_planes",
    "write_scene",
]
