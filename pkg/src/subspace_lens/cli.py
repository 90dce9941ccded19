"""Command-line interface.

Subcommands: project (CSV -> scene document), scene (inspect/validate a
document), synth (write verification datasets), verify (planar-grid
statistics report with pass/fail gates), serve (static server for the
viewer). Exit codes: 0 success, 1 validation problem, 2 numerical
failure.
"""

import argparse
import sys
from http.server import SimpleHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

import numpy as np

from . import __version__
from .errors import NumericalError, ValidationError
from .ingest import DEFAULT_DEDUP_EPS, load_csv
from .scene import PipelineConfig, read_scene, run_pipeline, write_scene
from .subspace import DEFAULT_K
from .synth import planar_grid, planar_grid_interior_ids, two_planes


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage errors through the validation exit path."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise ValidationError(message)


def _add_pipeline_options(p: _Parser, method_required: bool):
    p.add_argument("--method", choices=["pca", "mds"], default="mds",
                   required=method_required)
    p.add_argument("--normalize", choices=["none", "zscore", "minmax"],
                   default="none", help="column standardization before projection")
    p.add_argument("--dedup-eps", type=float, default=DEFAULT_DEDUP_EPS,
                   help="rows closer than this are collapsed to the first")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-iters", type=int, default=3000)
    p.add_argument("--rel-tol", type=float, default=1e-9,
                   help="stop majorization when the relative stress drop is below this")
    p.add_argument("--grad-tol", type=float, default=None,
                   help="stationarity tolerance on the stress gradient (default 1e-8*N)")
    p.add_argument("--init", choices=["random", "pca"], default="random",
                   help="starting configuration for the stress optimizer")
    p.add_argument("--k", type=int, default=DEFAULT_K,
                   help="neighborhood size for local bases and trustworthiness")
    sel = p.add_mutually_exclusive_group()
    sel.add_argument("--subspace-dims", type=int, default=None, metavar="L",
                     help="fixed number of local basis vectors (default 5, capped)")
    sel.add_argument("--variance-threshold", type=float, default=None, metavar="TAU",
                     help="retain the smallest basis explaining this variance share")
    p.add_argument("--xform", choices=["auto", "implicit", "fd", "linear"],
                   default="auto",
                   help="vector transport: analytic implicit, finite-difference "
                        "re-optimization, or the exact linear map (pca only)")
    p.add_argument("--xform-mode", choices=["pointwise", "coupled"],
                   default="pointwise",
                   help="implicit transport: per-point blocks or the full "
                        "coupled system with rigid motions removed")
    p.add_argument("--fd-step", type=float, default=1e-4,
                   help="finite-difference step as a fraction of each column std")
    p.add_argument("--force", action="store_true",
                   help="transform even if the optimizer did not converge")
    p.add_argument("--glyph-scale", type=float, default=1.0)
    p.add_argument("--spline-samples", type=int, default=16,
                   help="outline samples per hull segment")
    p.add_argument("--one-sided", action="store_true",
                   help="hull the vector tips plus the origin instead of "
                        "the symmetric point set")
    p.add_argument("--metrics", default=True,
                   action=argparse.BooleanOptionalAction,
                   help="compute per-point stress and trustworthiness")


def _config_from(args, **overrides) -> PipelineConfig:
    base = dict(
        method=args.method,
        k=args.k,
        n_components=args.subspace_dims,
        variance_threshold=args.variance_threshold,
        xform=args.xform,
        xform_mode=args.xform_mode,
        fd_step=args.fd_step,
        glyph_scale=args.glyph_scale,
        spline_samples=args.spline_samples,
        one_sided=args.one_sided,
        seed=args.seed,
        init=args.init,
        max_iters=args.max_iters,
        rel_tol=args.rel_tol,
        grad_tol=args.grad_tol,
        normalize=args.normalize,
        dedup_eps=args.dedup_eps,
        metrics=args.metrics,
        force=args.force,
    )
    base.update(overrides)
    return PipelineConfig(**base)


def _cmd_project(args) -> int:
    data = load_csv(
        args.input,
        label_column=args.label_col,
        image_column=args.image_col,
        has_header=not args.no_header,
    )
    doc, artifacts = run_pipeline(data, _config_from(args))
    write_scene(doc, args.out)
    emb = artifacts.embedding
    n_fallback = sum(1 for g in artifacts.glyphs if g.fallback)
    n_degenerate = (
        sum(1 for j in artifacts.jacobians if j.degenerate)
        if artifacts.jacobians
        else 0
    )
    print(f"wrote {args.out}: {artifacts.data.n} points "
          f"({len(artifacts.dedup)} duplicates removed)")
    if emb.method == "mds":
        print(f"stress {emb.stress_total:.6e} after {emb.iterations} iterations "
              f"({'converged' if emb.converged else 'NOT converged'})")
    if n_fallback or n_degenerate:
        print(f"flagged: {n_fallback} fallback glyphs, "
              f"{n_degenerate} degenerate transforms")
    if artifacts.report is not None:
        print(f"trustworthiness {artifacts.report.trustworthiness:.6f} "
              f"(k={artifacts.report.k_used})")
    return 0


def _cmd_scene(args) -> int:
    doc = read_scene(args.input)
    prov = doc.provenance
    emb = doc.payload.get("embedding", {})
    print(f"scene: {args.input}")
    print(f"schema_version: {doc.schema_version}")
    names = f" classes: {', '.join(doc.class_names)}" if doc.class_names else ""
    print(f"points: {doc.n}{names}")
    status = "converged" if emb.get("converged") else "not converged"
    print(f"method: {prov.get('method')} ({status}, "
          f"stress {emb.get('stress_total'):.6e})")
    print(f"xform: {prov.get('xform')} ({prov.get('xform_mode')})")
    n_fallback = sum(1 for g in doc.glyphs if g.get("fallback"))
    n_degenerate = sum(1 for g in doc.glyphs if g.get("degenerate"))
    print(f"glyphs: {len(doc.glyphs)} "
          f"({n_fallback} fallback, {n_degenerate} degenerate)")
    if doc.metrics is not None:
        pps = doc.metrics["per_point_stress"]
        lin = doc.metrics["linearity"]
        print(f"trustworthiness: {doc.metrics['trustworthiness']:.6f} "
              f"(k={doc.metrics['k_used']})")
        print(f"per-point stress: [{min(pps):.6e}, {max(pps):.6e}]")
        print(f"linearity: [{min(lin):.3f}, {max(lin):.3f}]")
    ids = [p["id"] for p in doc.points]
    aligned = (
        len(doc.glyphs) == doc.n
        and len(doc.vectors) == doc.n
        and [g["id"] for g in doc.glyphs] == ids
        and [v["id"] for v in doc.vectors] == ids
    )
    if not aligned:
        raise ValidationError(f"{args.input}: point/glyph/vector ids misaligned")
    print("alignment: ok")
    return 0


def _write_csv(path, data) -> None:
    header = [f"x{j}" for j in range(data.dim)] + ["label"]
    names = data.class_names or []
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for pos in range(data.n):
            label = int(data.labels[pos])
            name = names[label] if label < len(names) else str(label)
            row = [repr(float(v)) for v in data.values[pos]] + [name]
            fh.write(",".join(row) + "\n")


def _cmd_synth(args) -> int:
    if args.kind == "planar-grid":
        data = planar_grid(nx=args.nx, ny=args.ny, spacing=args.spacing)
    else:
        data = two_planes(n_side=args.n_side)
    _write_csv(args.out, data)
    print(f"wrote {args.out}: {data.n} points, D={data.dim} ({args.kind})")
    return 0


def _cmd_verify(args) -> int:
    if args.kind != "planar-grid":
        raise ValidationError(f"verify supports kind 'planar-grid', got {args.kind!r}")
    data = planar_grid(nx=args.nx, ny=args.ny, spacing=args.spacing)
    config = _config_from(
        args, method="mds", normalize="none",
        n_components=args.subspace_dims, variance_threshold=None,
    )
    doc, artifacts = run_pipeline(data, config)
    if args.out:
        write_scene(doc, args.out)

    interior = planar_grid_interior_ids(args.nx, args.ny)
    lengths = []
    angles = []
    for rid in interior:
        pos = artifacts.data.position_of(int(rid))
        v = artifacts.glyph_factor * artifacts.transformed[pos].vectors
        v1, v2 = v[0], v[1]
        l1, l2 = np.linalg.norm(v1), np.linalg.norm(v2)
        cosang = np.clip(np.dot(v1, v2) / (l1 * l2), -1.0, 1.0)
        lengths.append((l1, l2))
        angles.append(np.degrees(np.arccos(cosang)))
    lengths = np.array(lengths)
    angles = np.array(angles)
    mean_len = lengths.mean(axis=0)
    mean_angle = float(angles.mean())
    std_angle = float(angles.std())

    print(f"planar-grid verification "
          f"(nx={args.nx}, ny={args.ny}, k={args.k}, "
          f"L={args.subspace_dims}, interior n={len(interior)})")
    print(f"{'':24s}{'basis 1':>12s}{'basis 2':>12s}")
    print(f"{'mean length':24s}{mean_len[0]:12.8f}{mean_len[1]:12.8f}")
    print(f"{'mean angle (deg)':24s}{mean_angle:12.8f}")
    print(f"{'std angle (deg)':24s}{std_angle:12.8f}")

    rel_len = abs(mean_len[0] - mean_len[1]) / max(mean_len[0], mean_len[1])
    gates = [
        ("mean angle within [89.5, 90.5] deg", 89.5 <= mean_angle <= 90.5),
        ("angle std <= 0.05 deg", std_angle <= 0.05),
        ("mean lengths equal within 1e-3 relative", rel_len <= 1e-3),
    ]
    failed = False
    for label, ok in gates:
        print(f"{'PASS' if ok else 'FAIL'}: {label}")
        failed = failed or not ok
    if failed:
        raise NumericalError("planar-grid verification gates failed")
    return 0


def _cmd_serve(args) -> int:
    scene_path = Path(args.scene).resolve()
    if not scene_path.is_file():
        raise ValidationError(f"scene file not found: {scene_path}")
    read_scene(scene_path)  # fail fast on invalid documents

    if args.frontend:
        root = Path(args.frontend).resolve()
        if not root.is_dir():
            raise ValidationError(f"frontend directory not found: {root}")
    else:
        candidate = Path(__file__).resolve().parents[2] / "frontend" / "dist"
        root = candidate if candidate.is_dir() else scene_path.parent

    class Handler(SimpleHTTPRequestHandler):
        def __init__(self, *a, **kw):
            super().__init__(*a, directory=str(root), **kw)

        def translate_path(self, path):
            clean = path.split("?", 1)[0].split("#", 1)[0]
            if clean == "/scene.json":
                return str(scene_path)
            return super().translate_path(path)

    server = ThreadingHTTPServer((args.host, args.port), Handler)
    print(f"serving {root} on http://{args.host}:{server.server_address[1]}/ "
          f"(scene at /scene.json); ctrl-c to stop")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


def build_parser() -> _Parser:
    parser = _Parser(
        prog="subspace-lens",
        description="Augment 2D projections with glyphs of each point's "
                    "local subspace, transported analytically through the "
                    "projection.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("project", help="project a CSV and write a scene document")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--label-col", default=None,
                   help="column holding class labels (name, or index without header)")
    p.add_argument("--image-col", default=None,
                   help="column holding image paths for the viewer")
    p.add_argument("--no-header", action="store_true")
    _add_pipeline_options(p, method_required=False)
    p.set_defaults(func=_cmd_project)

    p = sub.add_parser("scene", help="summarize and validate a scene document")
    p.add_argument("--input", required=True)
    p.set_defaults(func=_cmd_scene)

    p = sub.add_parser("synth", help="write a synthetic verification dataset")
    p.add_argument("--kind", choices=["planar-grid", "two-planes"], required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--nx", type=int, default=15)
    p.add_argument("--ny", type=int, default=15)
    p.add_argument("--spacing", type=float, default=0.1)
    p.add_argument("--n-side", type=int, default=14)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser(
        "verify",
        help="run the planar-grid check and print length/angle statistics",
    )
    p.add_argument("--kind", default="planar-grid")
    p.add_argument("--nx", type=int, default=15)
    p.add_argument("--ny", type=int, default=15)
    p.add_argument("--spacing", type=float, default=0.1)
    p.add_argument("--out", default=None, help="also write the scene document here")
    _add_pipeline_options(p, method_required=False)
    # planar check transports a 2-vector basis unless the caller overrides
    p.set_defaults(func=_cmd_verify, subspace_dims=2)

    p = sub.add_parser("serve", help="serve the viewer and a scene over HTTP")
    p.add_argument("--scene", required=True)
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--frontend", default=None,
                   help="directory with built viewer assets")
    p.set_defaults(func=_cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except NumericalError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except ValidationError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
