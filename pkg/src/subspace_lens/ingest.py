"""Loading, validation, deduplication and normalization of tabular data."""

import csv
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ValidationError

DEFAULT_DEDUP_EPS = 1e-12


@dataclass(frozen=True)
class DataMatrix:
    """Immutable N x D table of points plus optional labels and image paths.

    row_ids are the 0-based indices in the source file; they survive
    deduplication so every downstream artifact can refer to the original row.
    """

    values: np.ndarray
    labels: np.ndarray | None = None
    image_paths: list[str] | None = None
    row_ids: np.ndarray = None
    class_names: list[str] | None = None
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        # copy before freezing so the caller's array stays writable
        values = np.array(self.values, dtype=np.float64, order="C")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        if self.row_ids is None:
            object.__setattr__(self, "row_ids", np.arange(values.shape[0]))
        rid = np.array(self.row_ids, dtype=np.int64)
        rid.setflags(write=False)
        object.__setattr__(self, "row_ids", rid)
        if self.labels is not None:
            lab = np.array(self.labels, dtype=np.int64)
            lab.setflags(write=False)
            object.__setattr__(self, "labels", lab)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    def position_of(self, row_id: int) -> int:
        """Index of a row_id within the current (possibly deduplicated) matrix."""
        pos = int(np.searchsorted(self.row_ids, row_id))
        if pos >= self.n or self.row_ids[pos] != row_id:
            raise ValidationError(f"row_id {row_id} not present in data matrix")
        return pos


def validate_matrix(data: DataMatrix) -> None:
    """Enforce the invariants every downstream stage relies on."""
    if data.values.ndim != 2:
        raise ValidationError("data matrix must be two-dimensional")
    if not np.all(np.isfinite(data.values)):
        bad = np.argwhere(~np.isfinite(data.values))[0]
        raise ValidationError(
            f"non-finite value at row {data.row_ids[bad[0]]}, column {bad[1]}"
        )
    if data.n < 3:
        raise ValidationError(f"need at least 3 rows, got {data.n}")
    if data.dim < 2:
        raise ValidationError(f"need at least 2 feature columns, got {data.dim}")


def load_csv(
    path,
    label_column: str | None = None,
    image_column: str | None = None,
    has_header: bool = True,
) -> DataMatrix:
    """Read a UTF-8 comma-separated file into a DataMatrix.

    label/image columns are split out of the numeric block. Without a header
    the column selectors are interpreted as 0-based indices.
    """
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except OSError as e:
        raise ValidationError(f"{path}: {e.strerror or e}") from None
    rows = [r for r in rows if r and not all(c.strip() == "" for c in r)]
    if not rows:
        raise ValidationError(f"{path}: file is empty")

    header = None
    if has_header:
        header = [c.strip() for c in rows[0]]
        rows = rows[1:]
        if not rows:
            raise ValidationError(f"{path}: no data rows after header")

    width = len(rows[0])
    for idx, row in enumerate(rows):
        if len(row) != width:
            raise ValidationError(
                f"{path}: ragged row {idx}: expected {width} cells, got {len(row)}"
            )

    def resolve(name, what):
        if name is None:
            return None
        if header is not None:
            if name in header:
                return header.index(name)
            raise ValidationError(f"{path}: no column named {name!r} for {what}")
        try:
            col = int(name)
        except ValueError:
            raise ValidationError(
                f"{path}: {what} column must be an index when the file has no header"
            ) from None
        if not 0 <= col < width:
            raise ValidationError(f"{path}: {what} column index {col} out of range")
        return col

    label_idx = resolve(label_column, "label")
    image_idx = resolve(image_column, "image")
    if label_idx is not None and label_idx == image_idx:
        raise ValidationError(f"{path}: label and image columns coincide")

    numeric_cols = [c for c in range(width) if c not in (label_idx, image_idx)]
    values = np.empty((len(rows), len(numeric_cols)))
    for r, row in enumerate(rows):
        for out_c, c in enumerate(numeric_cols):
            cell = row[c].strip()
            try:
                values[r, out_c] = float(cell)
            except ValueError:
                col_name = header[c] if header else str(c)
                raise ValidationError(
                    f"{path}: cannot parse {cell!r} at row {r}, column {col_name}"
                ) from None
    if not np.all(np.isfinite(values)):
        r, c = np.argwhere(~np.isfinite(values))[0]
        raise ValidationError(f"{path}: non-finite value at row {r}, column {c}")

    labels = None
    class_names = None
    if label_idx is not None:
        raw = [row[label_idx].strip() for row in rows]
        class_names = sorted(set(raw))
        mapping = {name: i for i, name in enumerate(class_names)}
        labels = np.array([mapping[v] for v in raw], dtype=np.int64)

    image_paths = None
    if image_idx is not None:
        image_paths = [row[image_idx].strip() for row in rows]

    return DataMatrix(
        values=values,
        labels=labels,
        image_paths=image_paths,
        row_ids=np.arange(len(rows)),
        class_names=class_names,
        provenance={"source": str(path), "has_header": has_header},
    )


@dataclass(frozen=True)
class DedupReport:
    """Removed row_ids and the kept row each one collapsed into."""

    removed: tuple[int, ...]
    representative: dict[int, int]

    def __len__(self):
        return len(self.removed)


def deduplicate(
    data: DataMatrix, dedup_eps: float = DEFAULT_DEDUP_EPS
) -> tuple[DataMatrix, DedupReport]:
    """Drop rows closer than dedup_eps to an earlier row.

    First occurrence (lowest row_id) wins; the report maps every removed
    row_id to its kept representative.
    """
    if dedup_eps < 0:
        raise ValidationError("dedup_eps must be >= 0")
    values = data.values
    n = values.shape[0]
    kept: list[int] = []
    removed: list[int] = []
    representative: dict[int, int] = {}
    for i in range(n):
        rep = None
        if kept:
            d = np.sqrt(np.sum((values[kept] - values[i]) ** 2, axis=1))
            hit = np.nonzero(d <= dedup_eps)[0]
            if hit.size:
                rep = kept[hit[0]]
        if rep is None:
            kept.append(i)
        else:
            removed.append(i)
            representative[int(data.row_ids[i])] = int(data.row_ids[rep])

    keep_idx = np.array(kept, dtype=np.int64)
    report = DedupReport(
        removed=tuple(int(data.row_ids[i]) for i in removed),
        representative=representative,
    )
    out = DataMatrix(
        values=values[keep_idx],
        labels=None if data.labels is None else data.labels[keep_idx],
        image_paths=None
        if data.image_paths is None
        else [data.image_paths[i] for i in kept],
        row_ids=data.row_ids[keep_idx],
        class_names=data.class_names,
        provenance={**data.provenance, "dedup_eps": dedup_eps,
                    "removed_rows": list(report.removed)},
    )
    return out, report


def standardize(data: DataMatrix, mode: str = "none") -> DataMatrix:
    """Column-wise normalization: none, zscore (population std) or minmax.

    Constant columns are dropped under zscore since they carry no distance
    information and would divide by zero.
    """
    if mode == "none":
        return replace(data, provenance={**data.provenance, "normalize": "none"})
    values = data.values
    if mode == "zscore":
        mean = values.mean(axis=0)
        std = values.std(axis=0)  # population (1/N) convention
        keep = std > 0.0
        dropped = np.nonzero(~keep)[0]
        if dropped.size:
            import warnings

            warnings.warn(
                f"dropping constant columns {dropped.tolist()} under zscore",
                stacklevel=2,
            )
        out = (values[:, keep] - mean[keep]) / std[keep]
        prov = {**data.provenance, "normalize": "zscore",
                "dropped_columns": dropped.tolist()}
    elif mode == "minmax":
        lo = values.min(axis=0)
        hi = values.max(axis=0)
        span = hi - lo
        span = np.where(span > 0.0, span, 1.0)
        out = (values - lo) / span
        prov = {**data.provenance, "normalize": "minmax"}
    else:
        raise ValidationError(f"unknown normalization mode {mode!r}")
    return replace(data, values=out, provenance=prov)
