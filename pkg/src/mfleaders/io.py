"""Stable on-disk formats: MFS1 binary signals, CSV tables, JSON documents.

MFS1 layout: magic bytes ``MFS1``, u32 little-endian version (= 1), u64
little-endian sample count, then float64 little-endian samples.  CSV files
carry one provenance comment line, then a single header line with units.
JSON documents embed ``tool_version``, ``config_hash`` and ``seed`` directly.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .errors import FormatError
from .wavelet import CoefficientPyramid, Signal
from .measures import BAdicMeasure

MFS1_MAGIC = b"MFS1"
MFS1_VERSION = 1
REPORT_SCHEMA_VERSION = 1


def _provenance(meta: dict | None) -> dict:
    from . import __version__

    meta = meta or {}
    return {
        "tool_version": __version__,
        "config_hash": meta.get("config_hash", ""),
        "seed": meta.get("seed"),
    }


# ---------------------------------------------------------------------------
# signals


def write_mfs1(path, samples: np.ndarray) -> None:
    samples = np.ascontiguousarray(samples, dtype="<f8")
    with open(path, "wb") as fh:
        fh.write(MFS1_MAGIC)
        fh.write(struct.pack("<I", MFS1_VERSION))
        fh.write(struct.pack("<Q", samples.size))
        fh.write(samples.tobytes())


def read_mfs1(path) -> np.ndarray:
    raw = Path(path).read_bytes()
    if raw[:4] != MFS1_MAGIC:
        raise FormatError(f"{path}: bad magic {raw[:4]!r} at offset 0")
    (version,) = struct.unpack_from("<I", raw, 4)
    if version != MFS1_VERSION:
        raise FormatError(f"{path}: unsupported version {version} at offset 4")
    (count,) = struct.unpack_from("<Q", raw, 8)
    expected = 16 + 8 * count
    if len(raw) != expected:
        raise FormatError(
            f"{path}: expected {expected} bytes for {count} samples, got {len(raw)}"
        )
    return np.frombuffer(raw, dtype="<f8", offset=16).copy()


def write_signal_csv(path, samples: np.ndarray, meta: dict | None = None) -> None:
    prov = _provenance(meta)
    with open(path, "w") as fh:
        fh.write(
            f"# mfleaders={prov['tool_version']} config={prov['config_hash']} "
            f"seed={prov['seed']}\n"
        )
        fh.write("sample_value\n")
        for v in np.asarray(samples, dtype=float):
            fh.write(f"{v!r}\n")


def read_signal_csv(path) -> np.ndarray:
    values = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#") or line == "sample_value":
                continue
            try:
                values.append(float(line))
            except ValueError as exc:
                raise FormatError(f"{path}:{lineno}: not a float: {line!r}") from exc
    if not values:
        raise FormatError(f"{path}: no samples found")
    return np.asarray(values)


def read_signal(path, offset: float = 0.0) -> Signal:
    path = Path(path)
    if path.suffix == ".csv":
        samples = read_signal_csv(path)
    else:
        samples = read_mfs1(path)
    return Signal(samples=samples, offset=offset)


# ---------------------------------------------------------------------------
# pyramids and measures


def _jsonable(obj):
    if isinstance(obj, (np.floating, np.integer)):
        obj = obj.item()
    if isinstance(obj, float) and not np.isfinite(obj):
        return repr(obj)  # "inf" / "-inf" / "nan": keeps documents strict JSON
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if callable(obj):
        return f"<callable {getattr(obj, '__name__', 'fn')}>"
    return obj


def pyramid_to_json(p: CoefficientPyramid) -> dict:
    return {
        "J": p.J,
        "tag": p.tag,
        "levels": [lv.tolist() for lv in p.levels],
        "scaling": p.scaling.tolist(),
        "meta": _jsonable(p.meta),
        **_provenance(p.meta),
    }


def pyramid_from_json(doc: dict) -> CoefficientPyramid:
    try:
        return CoefficientPyramid(
            J=int(doc["J"]),
            tag=str(doc["tag"]),
            levels=[np.asarray(lv, dtype=float) for lv in doc["levels"]],
            scaling=np.asarray(doc["scaling"], dtype=float),
            meta=dict(doc.get("meta", {})),
        )
    except KeyError as exc:
        raise FormatError(f"pyramid JSON missing field {exc}") from exc


def write_pyramid(path, p: CoefficientPyramid) -> None:
    Path(path).write_text(json.dumps(pyramid_to_json(p)))


def read_pyramid(path) -> CoefficientPyramid:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON at offset {exc.pos}") from exc
    return pyramid_from_json(doc)


def measure_to_json(m: BAdicMeasure) -> dict:
    return {
        "b": m.b,
        "depth": m.depth,
        "tag": m.tag,
        "seed": m.seed,
        "consistency": m.consistency,
        "levels": [lv.tolist() for lv in m.levels],
        "meta": _jsonable(m.meta),
        **_provenance({"seed": m.seed, **m.meta}),
    }


def measure_from_json(doc: dict) -> BAdicMeasure:
    try:
        return BAdicMeasure(
            b=int(doc["b"]),
            depth=int(doc["depth"]),
            levels=[np.asarray(lv, dtype=float) for lv in doc["levels"]],
            tag=str(doc.get("tag", "external")),
            seed=doc.get("seed"),
            consistency=str(doc.get("consistency", "approximate")),
            meta=dict(doc.get("meta", {})),
        )
    except KeyError as exc:
        raise FormatError(f"measure JSON missing field {exc}") from exc


def write_measure(path, m: BAdicMeasure) -> None:
    Path(path).write_text(json.dumps(measure_to_json(m)))


def read_measure(path) -> BAdicMeasure:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON at offset {exc.pos}") from exc
    return measure_from_json(doc)


def write_measure_csv(path, m: BAdicMeasure, meta: dict | None = None) -> None:
    prov = _provenance(meta or {"seed": m.seed})
    with open(path, "w") as fh:
        fh.write(
            f"# mfleaders={prov['tool_version']} config={prov['config_hash']} "
            f"seed={prov['seed']}\n"
        )
        fh.write("level,cell_index,mass\n")
        for n, lv in enumerate(m.levels):
            for k, v in enumerate(lv):
                fh.write(f"{n},{k},{v!r}\n")


# ---------------------------------------------------------------------------
# analysis tables


def _write_table(path, header: str, rows, meta: dict | None) -> None:
    prov = _provenance(meta)
    with open(path, "w") as fh:
        fh.write(
            f"# mfleaders={prov['tool_version']} config={prov['config_hash']} "
            f"seed={prov['seed']}\n"
        )
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(repr(v) if isinstance(v, float) else str(v) for v in row))
            fh.write("\n")


def write_scaling_csv(path, sf, meta=None) -> None:
    _write_table(
        path,
        "p[dimensionless],omega[log2 per scale],r_squared[dimensionless]",
        zip(sf.p_grid.tolist(), sf.omega.tolist(), np.nan_to_num(sf.r2, nan=-1.0).tolist()),
        meta,
    )


def write_tau_csv(path, tau, meta=None) -> None:
    _write_table(
        path,
        "q[dimensionless],tau[log_b per depth],r_squared[dimensionless]",
        zip(tau.q_grid.tolist(), tau.tau.tolist(), tau.r2.tolist()),
        meta,
    )


def write_spectrum_csv(path, spec, meta=None) -> None:
    D = ["-inf" if not np.isfinite(v) else repr(float(v)) for v in spec.D]
    _write_table(
        path,
        "h[exponent],D[dimension]",
        zip(spec.h_grid.tolist(), D),
        meta,
    )


def write_local_leader_csv(path, series, meta=None) -> None:
    rows = []
    for j, d, flag in zip(series.j_values, series.d_values, series.contaminated):
        L = float(np.log2(d) / -j) if (j > 0 and d > 0) else float("nan")
        rows.append((int(j), float(d), L, int(flag)))
    _write_table(
        path,
        "j[scale],d_j[leader],L_j[exponent],seam_contaminated[0/1]",
        rows,
        meta,
    )


def write_json(path, doc: dict) -> None:
    Path(path).write_text(json.dumps(_jsonable(doc), indent=2, allow_nan=False))


def make_report(kind: str, payload: dict, meta: dict | None = None) -> dict:
    doc = {
        "schema_version": REPORT_SCHEMA_VERSION,
        "kind": kind,
        **_provenance(meta),
    }
    doc.update(_jsonable(payload))
    return doc
