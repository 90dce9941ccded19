"""Pipeline orchestration and scene serialization.

run_pipeline chains ingest -> projection -> local subspaces -> Jacobian
transport -> glyphs -> metrics and assembles a single self-describing
JSON document. The document carries every knob that produced it, so a
viewer (or a rerun) needs nothing but the file. Serialization uses
shortest round-trip float repr and sorted keys: the same configuration
and seed always yield byte-identical output.
"""

import json
import warnings
from dataclasses import dataclass

import numpy as np

from . import implicit, kernels, quality, subspace
from .errors import SchemaError, SubspaceLensError, ValidationError
from .glyph import SAMPLES_PER_SEGMENT, Glyph, build_glyphs
from .ingest import (
    DEFAULT_DEDUP_EPS,
    DataMatrix,
    DedupReport,
    deduplicate,
    standardize,
    validate_matrix,
)
from .mds import Embedding, MdsConfig, run_smacof
from .pca import fit_pca, project_points, transform_vectors_linear

SCHEMA_VERSION = "1.0"


@dataclass(frozen=True)
class SceneDocument:
    """The serialized scene: a plain JSON-compatible payload."""

    payload: dict

    @property
    def schema_version(self) -> str:
        return self.payload["schema_version"]

    @property
    def points(self) -> list:
        return self.payload["points"]

    @property
    def glyphs(self) -> list:
        return self.payload["glyphs"]

    @property
    def vectors(self) -> list:
        return self.payload["vectors"]

    @property
    def metrics(self):
        return self.payload["metrics"]

    @property
    def provenance(self) -> dict:
        return self.payload["provenance"]

    @property
    def class_names(self):
        return self.payload["class_names"]

    @property
    def n(self) -> int:
        return len(self.payload["points"])


@dataclass(frozen=True)
class PipelineConfig:
    method: str = "mds"  # mds | pca
    d: int = 2
    k: int = 8
    n_components: int | None = None  # default fixed L when both selectors None
    variance_threshold: float | None = None
    xform: str = "auto"  # auto | implicit | fd | linear
    xform_mode: str = "pointwise"  # pointwise | coupled
    fd_step: float = implicit.DEFAULT_FD_STEP
    glyph_scale: float = 1.0
    spline_samples: int = SAMPLES_PER_SEGMENT
    one_sided: bool = False
    seed: int = 0
    init: str = "random"
    max_iters: int = 3000
    rel_tol: float = 1e-9
    grad_tol: float | None = None
    normalize: str = "none"
    dedup_eps: float = DEFAULT_DEDUP_EPS
    metrics: bool = True
    force: bool = False

    def resolved_xform(self) -> str:
        if self.xform != "auto":
            return self.xform
        return "linear" if self.method == "pca" else "implicit"


@dataclass
class PipelineArtifacts:
    """In-memory intermediates for callers that need more than the document."""

    data: DataMatrix
    dedup: DedupReport
    embedding: Embedding
    subspaces: list
    transformed: list
    glyphs: list[Glyph]
    glyph_factor: float
    report: quality.QualityReport | None
    jacobians: list | None = None


class _Stage:
    """Re-raise pipeline errors with the failing stage's name attached."""

    def __init__(self, name: str):
        self.name = name

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc is not None and isinstance(exc, SubspaceLensError):
            raise type(exc)(f"stage {self.name!r}: {exc}") from exc
        return False


def _selection_provenance(config: PipelineConfig) -> dict:
    if config.variance_threshold is not None:
        return {"mode": "variance_threshold", "value": config.variance_threshold}
    L = config.n_components if config.n_components is not None else subspace.DEFAULT_FIXED_L
    return {"mode": "fixed", "value": L}


def run_pipeline(
    data_raw: DataMatrix, config: PipelineConfig = PipelineConfig()
) -> tuple[SceneDocument, PipelineArtifacts]:
    """Full chain from raw data to a serializable scene document."""
    if config.method not in ("mds", "pca"):
        raise ValidationError(f"unknown method {config.method!r}")
    if config.xform not in ("auto", "implicit", "fd", "linear"):
        raise ValidationError(f"unknown transform {config.xform!r}")
    if config.xform_mode not in ("pointwise", "coupled"):
        raise ValidationError(f"unknown transform mode {config.xform_mode!r}")
    xform = config.resolved_xform()
    if config.method == "pca" and xform != "linear":
        raise ValidationError(
            f"transform {xform!r} requires method=mds; "
            "the PCA map is linear and transforms vectors exactly"
        )
    if config.method == "mds" and xform == "linear":
        raise ValidationError("linear transform requires method=pca")

    with _Stage("ingest"):
        validate_matrix(data_raw)
        data, dedup = deduplicate(data_raw, config.dedup_eps)
        data = standardize(data, config.normalize)
        validate_matrix(data)

    lmap = None
    with _Stage("project"):
        if config.method == "pca":
            lmap = fit_pca(data, d=config.d)
            embedding = project_points(lmap, data)
        else:
            embedding = run_smacof(
                data,
                MdsConfig(
                    max_iters=config.max_iters,
                    rel_tol=config.rel_tol,
                    grad_tol=config.grad_tol,
                    seed=config.seed,
                    init=config.init,
                    d=config.d,
                ),
            )

    with _Stage("local_subspace"):
        n_components = config.n_components
        if n_components is None and config.variance_threshold is None:
            n_components = subspace.DEFAULT_FIXED_L
        subspaces = subspace.extract_all(
            data,
            k=config.k,
            n_components=n_components,
            variance_threshold=config.variance_threshold,
        )

    jacobians = None
    with _Stage("transform"):
        if xform == "linear":
            transformed = []
            for sub in subspaces:
                raw = transform_vectors_linear(lmap, sub.basis)
                transformed.append(
                    implicit.TransformedSubspace(
                        anchor=sub.anchor,
                        vectors=sub.weights[:, None] * raw,
                        raw_vectors=raw,
                        method_tag="linear",
                    )
                )
        elif xform == "implicit" and config.xform_mode == "pointwise":
            jacobians = implicit.all_pointwise_jacobians(
                data, embedding, force=config.force
            )
            transformed = [
                implicit.transform_subspace(jac, sub, method_tag="implicit")
                for jac, sub in zip(jacobians, subspaces)
            ]
        elif xform == "implicit":
            jacobians = implicit.all_coupled_jacobians(
                data, embedding, force=config.force
            )
            transformed = [
                implicit.transform_subspace(jac, sub, method_tag="implicit_coupled")
                for jac, sub in zip(jacobians, subspaces)
            ]
        else:
            jacobians = [
                implicit.finite_difference_jacobian(
                    data, embedding, int(rid), h=config.fd_step, force=config.force
                )
                for rid in data.row_ids
            ]
            transformed = [
                implicit.transform_subspace(jac, sub, method_tag="finite_difference")
                for jac, sub in zip(jacobians, subspaces)
            ]

    with _Stage("glyph"):
        glyphs, factor = build_glyphs(
            [int(r) for r in data.row_ids],
            embedding.coords,
            [t.vectors for t in transformed],
            scale=config.glyph_scale,
            samples_per_segment=config.spline_samples,
            one_sided=config.one_sided,
        )

    report = None
    if config.metrics:
        with _Stage("quality"):
            report = quality.compute_quality(
                data,
                embedding,
                np.array([s.linearity for s in subspaces]),
                config.k,
            )

    with _Stage("scene"):
        doc = build_scene(
            data, embedding, subspaces, jacobians, transformed, glyphs, factor,
            report, config,
        )
    artifacts = PipelineArtifacts(
        data=data,
        dedup=dedup,
        embedding=embedding,
        subspaces=subspaces,
        transformed=transformed,
        glyphs=glyphs,
        glyph_factor=factor,
        report=report,
        jacobians=jacobians,
    )
    return doc, artifacts


def build_scene(
    data: DataMatrix,
    embedding: Embedding,
    subspaces: list,
    jacobians,
    transformed: list,
    glyphs: list[Glyph],
    glyph_factor: float,
    report,
    config: PipelineConfig,
) -> SceneDocument:
    """Assemble the JSON payload; all arrays aligned to data order."""
    points = []
    for pos, rid in enumerate(data.row_ids):
        xy = embedding.coords[pos]
        points.append(
            {
                "id": int(rid),
                "xy": [float(xy[0]), float(xy[1])],
                "label": None if data.labels is None else int(data.labels[pos]),
                "image_path": None
                if data.image_paths is None
                else data.image_paths[pos],
            }
        )

    glyph_entries = []
    for pos, g in enumerate(glyphs):
        degenerate = bool(jacobians[pos].degenerate) if jacobians else False
        reason = g.reason
        if degenerate and reason is None:
            reason = (
                "optimality-condition Hessian block near singular "
                f"(condition {jacobians[pos].hessian_cond:.3e}); pseudoinverse used"
            )
        glyph_entries.append(
            {
                "id": int(g.anchor),
                "hull": g.hull.tolist(),
                "outline": g.outline.tolist(),
                "area": float(g.area),
                "aspect": float(g.aspect),
                "draw_rank": int(g.draw_rank),
                "fallback": g.fallback,
                "degenerate": degenerate,
                "reason": reason,
            }
        )

    vector_entries = [
        {
            "id": int(t.anchor),
            # scaled exactly like the glyph outlines so insets can overlay them
            "vectors": (glyph_factor * t.vectors).tolist(),
            "weights": subspaces[pos].weights.tolist(),
        }
        for pos, t in enumerate(transformed)
    ]

    metrics = None
    if report is not None:
        metrics = {
            "per_point_stress": report.per_point_stress.tolist(),
            "trustworthiness": float(report.trustworthiness),
            "per_point_trust": report.per_point_trust.tolist(),
            "linearity": report.linearity.tolist(),
            "k_used": int(report.k_used),
        }

    provenance = {
        "method": config.method,
        "d": int(config.d),
        "k": int(config.k),
        "selection": _selection_provenance(config),
        "xform": config.resolved_xform(),
        "xform_mode": config.xform_mode,
        "fd_step": float(config.fd_step),
        "seed": int(config.seed),
        "init": config.init,
        "max_iters": int(config.max_iters),
        "rel_tol": float(config.rel_tol),
        "grad_tol": None if config.grad_tol is None else float(config.grad_tol),
        "normalize": config.normalize,
        "dedup_eps": float(config.dedup_eps),
        "glyph_scale": float(config.glyph_scale),
        "glyph_scale_factor_applied": float(glyph_factor),
        "spline_samples": int(config.spline_samples),
        "one_sided": bool(config.one_sided),
        "backend": kernels.BACKEND,
        "source": _jsonable(data.provenance),
    }

    payload = {
        "schema_version": SCHEMA_VERSION,
        "provenance": provenance,
        "class_names": data.class_names,
        "embedding": {
            "method": embedding.method,
            "stress_total": float(embedding.stress_total),
            "iterations": int(embedding.iterations),
            "converged": bool(embedding.converged),
            "gradient_norm": None
            if embedding.gradient_norm is None
            else float(embedding.gradient_norm),
            "seed": None if embedding.seed is None else int(embedding.seed),
            "jittered": [int(j) for j in embedding.jittered],
        },
        "points": points,
        "glyphs": glyph_entries,
        "vectors": vector_entries,
        "metrics": metrics,
    }
    return SceneDocument(payload=payload)


def _jsonable(obj):
    """Recursively convert numpy scalars/arrays for JSON emission."""
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    return obj


def scene_to_json(doc: SceneDocument) -> str:
    return json.dumps(
        _jsonable(doc.payload),
        sort_keys=True,
        separators=(",", ":"),
        allow_nan=False,
    ) + "\n"


def write_scene(doc: SceneDocument, path) -> None:
    text = scene_to_json(doc)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


_KNOWN_TOP_LEVEL = {
    "schema_version",
    "provenance",
    "class_names",
    "embedding",
    "points",
    "glyphs",
    "vectors",
    "metrics",
}


def read_scene(path) -> SceneDocument:
    """Parse and version-check a scene file.

    Same-major newer-minor documents load with a warning; unknown fields
    are preserved but ignored. Corrupt files report the byte offset.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise SchemaError(f"{path}: {e.strerror or e}") from None
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError(
            f"{path}: not a valid scene document "
            f"(parse error at byte {e.pos}: {e.msg})"
        ) from e
    if not isinstance(payload, dict) or "schema_version" not in payload:
        raise SchemaError(f"{path}: missing schema_version; not a scene document")
    version = str(payload["schema_version"])
    try:
        major, minor = (int(p) for p in version.split("."))
    except ValueError:
        raise SchemaError(f"{path}: unparseable schema_version {version!r}") from None
    our_major, our_minor = (int(p) for p in SCHEMA_VERSION.split("."))
    if major != our_major:
        raise SchemaError(
            f"{path}: schema major version {major} unsupported (reader is {SCHEMA_VERSION})"
        )
    if minor > our_minor:
        warnings.warn(
            f"{path}: newer minor schema {version} (reader is {SCHEMA_VERSION}); "
            "unknown fields ignored",
            stacklevel=2,
        )
    unknown = sorted(set(payload) - _KNOWN_TOP_LEVEL)
    if unknown:
        warnings.warn(
            f"{path}: ignoring unknown scene fields: {', '.join(unknown)}",
            stacklevel=2,
        )
    missing = sorted(_KNOWN_TOP_LEVEL - set(payload))
    if missing:
        raise SchemaError(f"{path}: scene document missing fields: {', '.join(missing)}")
    return SceneDocument(payload=payload)
