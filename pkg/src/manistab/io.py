"""File formats: clouds, signals, operators, spectra, filters, models, logs and reports.

Floats are written with ``repr`` so every value round-trips exactly, and JSON
keys are sorted so equal objects produce equal bytes.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import struct
from pathlib import Path
from typing import Dict, Optional, Sequence

import numpy as np

from .errors import ParseError
from .filters import FilterCoefficients
from .geometry import PointCloud, SignalVector
from .graph import DenseOperator
from .mnn import MnnConfig, MnnModel
from .spectral import SpectralDecomposition, SpectrumPartition
from .stability import ConvergenceRow, StabilityReport

SCHEMA_VERSION = 1


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _clean(obj):
    # JSON has no NaN / inf; numpy scalars and arrays become plain Python values
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def dump_json(obj) -> str:
    return json.dumps(_clean(obj), sort_keys=True, indent=1, allow_nan=False) + "\n"


def write_json(path, obj):
    Path(path).write_text(dump_json(obj))


def read_json(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read file ({exc.strerror})", path) from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", path, exc.lineno) from None


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(path, header: Sequence[str], rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(v) for v in r])


def _read_numeric_csv(path, header_prefix: Optional[str]):
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise ParseError(f"cannot read file ({exc.strerror})", path) from None
    rows = []
    with fh:
        reader = csv.reader(fh)
        width = None
        for lineno, row in enumerate(reader, start=1):
            if not row or all(not c.strip() for c in row):
                continue
            if lineno == 1 and header_prefix is not None:
                if not all(c.strip().startswith(header_prefix) for c in row):
                    raise ParseError(f"expected header columns {header_prefix}1..{header_prefix}N", path, lineno)
                width = len(row)
                continue
            try:
                vals = [float(c) for c in row]
            except ValueError:
                raise ParseError("non-numeric value", path, lineno) from None
            if width is None:
                width = len(vals)
            if len(vals) != width:
                raise ParseError(f"expected {width} columns, found {len(vals)}", path, lineno)
            if not all(math.isfinite(v) for v in vals):
                raise ParseError("non-finite value", path, lineno)
            rows.append(vals)
    if not rows:
        raise ParseError("no data rows", path)
    return np.array(rows, dtype=np.float64)


# ---------------------------------------------------------------------------
# clouds and signals
# ---------------------------------------------------------------------------


def write_cloud(path, cloud: PointCloud, fmt: str = "csv"):
    if fmt == "json":
        write_json(
            path,
            {
                "schema_version": SCHEMA_VERSION,
                "manifold_kind": cloud.manifold_kind,
                "intrinsic_dim": cloud.intrinsic_dim,
                "seed": cloud.seed,
                "points": cloud.points,
            },
        )
        return
    header = [f"x{i + 1}" for i in range(cloud.ambient_dim)]
    write_csv(path, header, cloud.points.tolist())


def read_cloud(path, intrinsic_dim: int = 2) -> PointCloud:
    """Read a CSV (kind ``external``) or JSON cloud, chosen by file suffix."""
    if str(path).endswith(".json"):
        obj = read_json(path)
        try:
            return PointCloud(np.array(obj["points"], dtype=float), obj["manifold_kind"], obj["intrinsic_dim"], obj["seed"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed cloud: {exc}", path) from None
    pts = _read_numeric_csv(path, "x")
    return PointCloud(pts, "external", intrinsic_dim, 0)


def write_signal(path, signal: SignalVector):
    header = [f"f{i + 1}" for i in range(signal.feature_count)]
    write_csv(path, header, signal.values.tolist())


def read_signal(path) -> SignalVector:
    return SignalVector(_read_numeric_csv(path, "f"))


# ---------------------------------------------------------------------------
# operators
# ---------------------------------------------------------------------------


def write_operator(path, op: DenseOperator, fmt: str = "bin"):
    m = np.ascontiguousarray(op.matrix, dtype="<f8")
    if fmt == "csv":
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            for row in m:
                w.writerow([repr(float(v)) for v in row])
        return
    with open(path, "wb") as fh:
        fh.write(struct.pack("<Q", m.shape[0]))
        fh.write(m.tobytes(order="C"))


def _infer_kind(m):
    if np.all(m >= 0) and np.all(np.diag(m) == 0):
        return "adjacency"
    scale = float(np.max(np.abs(m))) if m.size else 0.0
    if float(np.max(np.abs(m.sum(axis=1)))) <= 1e-9 * m.shape[0] * max(scale, 1e-300):
        return "laplacian"
    return "generic_symmetric"


def read_operator(path, kind: Optional[str] = None) -> DenseOperator:
    """Binary (8-byte little-endian n, then n*n little-endian float64) or CSV.

    The operator kind is inferred from the entries unless given.
    """
    p = str(path)
    if p.endswith(".csv"):
        m = _read_numeric_csv(path, None)
        if m.shape[0] != m.shape[1]:
            raise ParseError(f"operator CSV is {m.shape[0]}x{m.shape[1]}, not square", path)
    else:
        try:
            data = Path(path).read_bytes()
        except OSError as exc:
            raise ParseError(f"cannot read file ({exc.strerror})", path) from None
        if len(data) < 8:
            raise ParseError("truncated header", path)
        (n,) = struct.unpack("<Q", data[:8])
        if len(data) != 8 + 8 * n * n:
            raise ParseError(f"expected {8 + 8 * n * n} bytes for n={n}, found {len(data)}", path)
        m = np.frombuffer(data[8:], dtype="<f8").reshape(n, n).astype(np.float64)
        if not np.all(np.isfinite(m)):
            raise ParseError("non-finite entries", path)
    return DenseOperator(m, kind or _infer_kind(m))


# ---------------------------------------------------------------------------
# spectra
# ---------------------------------------------------------------------------


def spectrum_dict(dec: SpectralDecomposition, part: Optional[SpectrumPartition]) -> dict:
    out = {"schema_version": SCHEMA_VERSION, "n": dec.n, "eigenvalues": dec.eigenvalues}
    if part is not None:
        out["partition"] = {
            "threshold_kind": part.threshold_kind,
            "threshold": part.threshold,
            "groups": [list(g) for g in part.groups],
            "group_count": part.group_count,
            "singleton_count": part.singleton_count,
            "diameters": list(part.diameters),
            "oversized_groups": part.oversized_groups(),
        }
    return out


def write_spectrum(path, dec: SpectralDecomposition, part: Optional[SpectrumPartition] = None, fmt: str = "json"):
    if fmt == "csv":
        ids = part.group_of() if part is not None else [None] * dec.n
        write_csv(path, ["index", "eigenvalue", "group"], [(i, float(l), g) for i, (l, g) in enumerate(zip(dec.eigenvalues, ids))])
        return
    write_json(path, spectrum_dict(dec, part))


# ---------------------------------------------------------------------------
# filters and models
# ---------------------------------------------------------------------------


def filter_dict(h: FilterCoefficients, normalized: bool, lambda_range=None, extra: Optional[dict] = None) -> dict:
    meta = {"normalized": bool(normalized), "range": list(lambda_range) if lambda_range is not None else None}
    if extra:
        meta.update(extra)
    return {"schema_version": SCHEMA_VERSION, "K": h.K, "taps": h.taps, "metadata": meta}


def write_filter(path, h: FilterCoefficients, normalized: bool, lambda_range=None, extra: Optional[dict] = None):
    write_json(path, filter_dict(h, normalized, lambda_range, extra))


def read_filter(path) -> FilterCoefficients:
    obj = read_json(path)
    try:
        taps = [float(t) for t in obj["taps"]]
        if "K" in obj and int(obj["K"]) != len(taps):
            raise ParseError(f"K={obj['K']} but {len(taps)} taps", path)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed filter: {exc}", path) from None
    return FilterCoefficients(taps)


def model_dict(model: MnnModel) -> dict:
    cfg = model.config
    return {
        "schema_version": SCHEMA_VERSION,
        "config": {
            "layer_features": list(cfg.layer_features),
            "taps_per_filter": cfg.taps_per_filter,
            "nonlinearity": cfg.nonlinearity,
            "readout": cfg.readout,
        },
        "taps": [t for t in model.taps],
        "readout_weights": model.readout_weights,
        "readout_bias": model.readout_bias,
        "seed": model.seed,
    }


def write_model(path, model: MnnModel):
    write_json(path, model_dict(model))


def read_model(path) -> MnnModel:
    obj = read_json(path)
    try:
        c = obj["config"]
        cfg = MnnConfig(tuple(c["layer_features"]), c["taps_per_filter"], c["nonlinearity"], c.get("readout", "mean_pool_linear"))
        return MnnModel(cfg, tuple(np.array(t, dtype=float) for t in obj["taps"]), obj["readout_weights"], obj["readout_bias"], obj.get("seed", 0))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed model: {exc}", path) from None


def write_train_log(path, losses: Sequence[float], errors: Sequence[float]):
    write_csv(path, ["epoch", "loss", "train_error"], [(i + 1, float(l), float(e)) for i, (l, e) in enumerate(zip(losses, errors))])


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------


def report_dict(report: StabilityReport) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": report.kind,
        "constants": report.constants,
        "summary": report.summary(),
        "trials": [
            {
                "kind": t.kind,
                "n": t.n,
                "epsilon": t.epsilon,
                "trial": t.trial,
                "seed": t.seed,
                "epsilon_measured": t.epsilon_measured,
                "empirical": t.empirical,
                "bound": t.bound,
                "holds": t.holds,
                "skipped": t.skipped,
                "extra": dict(t.extra),
            }
            for t in report.trials
        ],
    }


def write_report(path, report: StabilityReport, fmt: str = "json"):
    if fmt == "csv":
        rows = [(t.kind, t.n, t.epsilon, t.empirical, t.bound, t.holds) for t in report.trials]
        write_csv(path, ["kind", "n", "epsilon", "empirical", "bound", "holds"], rows)
        return
    write_json(path, report_dict(report))


def write_convergence(path, rows: Sequence[ConvergenceRow], fmt: str = "csv"):
    if fmt == "json":
        write_json(path, {"schema_version": SCHEMA_VERSION, "rows": [r._asdict() for r in rows]})
        return
    write_csv(path, ["n", "reference_n", "discrepancy"], [tuple(r) for r in rows])


# ---------------------------------------------------------------------------
# key = value config files
# ---------------------------------------------------------------------------


def read_config(path) -> Dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment, blank lines are ignored.

    Keys use the long flag name with or without dashes (``alpha-kernel`` and
    ``alpha_kernel`` are the same key).  Values are kept as strings and
    converted exactly as the matching command-line flag would be.
    """
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise ParseError(f"cannot read file ({exc.strerror})", path) from None
    out: Dict[str, str] = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError("expected 'key = value'", path, lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ParseError("empty key", path, lineno)
        if len(value) >= 2 and value[0] == value[-1] and value[0] in "\"'":
            value = value[1:-1]
        key = key.lstrip("-").replace("-", "_")
        if key in out:
            raise ParseError(f"duplicate key {key!r}", path, lineno)
        out[key] = value
    return out


def config_line_of(path, key: str) -> Optional[int]:
    """Line number of ``key`` in a config file, for diagnostics."""
    try:
        for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
            line = raw.split("#", 1)[0]
            if "=" in line and line.split("=", 1)[0].strip().lstrip("-").replace("-", "_") == key:
                return lineno
    except OSError:
        pass
    return None

