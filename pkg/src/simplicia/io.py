"""JSON and CSV serialization of archives, stratifications and reports.

Floats are written with Python's shortest round-trip representation, so
every value reads back bit for bit. NaN weights (oracle points) become null.
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import io
import json
import os

import numpy as np

from . import __version__
from .problem import ObjectiveSubset, SolutionArchive
from .simplicity import SimplicityReport
from .strata import GluingReport, Stratification

CSV_LABEL_NONE = ""


class ArchiveFormatError(ValueError):
    """Raised for malformed archive files."""


def _floats(a) -> list:
    return [None if not np.isfinite(v) else float(v) for v in np.asarray(a, dtype=float).reshape(-1)]


def _jsonable(obj):
    if isinstance(obj, ObjectiveSubset):
        return list(obj.indices)
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        return float(obj) if np.isfinite(obj) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if hasattr(obj, "value") and hasattr(obj, "name"):
        return obj.value
    if dataclasses.is_dataclass(obj):
        return {f.name: _jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    return obj


def archive_points(archive: SolutionArchive, labels=None) -> list[dict]:
    out = []
    for i in range(len(archive)):
        row = {"x": _floats(archive.X[i]), "y": _floats(archive.Y[i]), "weight": _floats(archive.W[i])}
        if labels is not None:
            row["label"] = labels[i].value
        out.append(row)
    return out


def stratum_entry(archive: SolutionArchive, labels=None) -> dict:
    return {"subset": list(archive.subset.indices), "points": archive_points(archive, labels)}


def stratification_doc(strat: Stratification) -> tuple[list[dict], dict]:
    strata = [stratum_entry(s.points, s.labels) for s in strat.ordered()]
    return strata, gluing_doc(strat.diagnostics)


def gluing_doc(report: GluingReport) -> dict:
    doc = _jsonable(report)
    doc["inclusion_ok"] = report.inclusion_ok
    doc["disjoint_ok"] = report.disjoint_ok
    doc["coverage_ok"] = report.coverage_ok
    doc["coverage"] = [dict(_jsonable(c), ok=c.ok) for c in report.boundary_coverage]
    del doc["boundary_coverage"]
    return doc


def gluing_table(report: GluingReport) -> str:
    lines = [f"inclusion violations: {len(report.inclusion_violations)}",
             f"interior overlap pairs: {len(report.interior_overlap_pairs)}",
             f"{'stratum':<14}{'B->faces':>12}{'faces->B':>12}{'spacing':>12}  ok"]
    for c in report.boundary_coverage:
        lines.append(f"{str(c.subset):<14}{c.objective[0]:>12.4g}{c.objective[1]:>12.4g}"
                     f"{c.spacing_objective:>12.4g}  {'yes' if c.ok else 'no'}")
    for note in report.inconclusive:
        lines.append(f"inconclusive: {note}")
    return "\n".join(lines)


def report_doc(report: SimplicityReport) -> dict:
    return {
        "problem": report.problem_name,
        "verdict": report.verdict.value,
        "entries": [{"test": e.test, "subset": list(e.subset.indices), "status": e.status.value,
                     "witness": _jsonable(e.witness), "note": e.note} for e in report.entries],
    }


def manifest(command: str, selector: str, config: dict) -> dict:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    return {"tool": "simplicia", "version": __version__, "command": command, "selector": selector,
            "config": _jsonable(config), "timestamp": int(epoch) if epoch and epoch.isdigit() else None}


def canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def finalize(doc: dict) -> str:
    """Add the content hash of everything except the hash itself; return the JSON text."""
    body = {k: v for k, v in doc.items() if k != "manifest"}
    doc["manifest"]["content_hash"] = hashlib.sha256(canonical(body).encode()).hexdigest()
    return json.dumps(doc, sort_keys=True, indent=1, allow_nan=False) + "\n"


def read_archive(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ArchiveFormatError(f"cannot read archive {path}: {exc}") from exc
    if not isinstance(doc, dict) or not isinstance(doc.get("strata"), list):
        raise ArchiveFormatError(f"{path} has no 'strata' list")
    for s in doc["strata"]:
        if not isinstance(s, dict) or "subset" not in s or not isinstance(s.get("points"), list):
            raise ArchiveFormatError(f"{path}: malformed stratum entry")
        for p in s["points"]:
            if not isinstance(p, dict) or not isinstance(p.get("x"), list) or not isinstance(p.get("y"), list):
                raise ArchiveFormatError(f"{path}: malformed point")
    return doc


def archive_csv(doc: dict) -> str:
    """Flatten an archive document to ``stratum,x1..xn,y1..ym,label`` rows."""
    points = [(s, p) for s in doc["strata"] for p in s["points"]]
    n = len(points[0][1]["x"]) if points else int(doc.get("n", 0))
    m = len(points[0][1]["y"]) if points else int(doc.get("m", 0))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["stratum"] + [f"x{i + 1}" for i in range(n)] + [f"y{i + 1}" for i in range(m)] + ["label"])
    for s, p in points:
        if len(p["x"]) != n or len(p["y"]) != m:
            raise ArchiveFormatError("points of different dimensions in one archive")
        sid = "+".join(str(i) for i in s["subset"]) or "-"
        writer.writerow([sid] + [repr(float(v)) for v in p["x"]] + [repr(float(v)) for v in p["y"]]
                        + [p.get("label") or CSV_LABEL_NONE])
    return buf.getvalue()
