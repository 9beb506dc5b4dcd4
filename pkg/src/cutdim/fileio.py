"""Reading and writing instances, cut lists, and analysis reports.

The native instance format is JSON with every number an exact string
("p/q" or an integer literal) and null for absent bounds, so a round
trip loses nothing.  MPS files are handled by the mps module and picked
by file extension.

Cut files are plain text: one cut per line,

    label, a1, a2, ..., an [, <=] , rhs [, category]

with '#' starting a comment.  Coefficients are read exactly and the
returned cuts are already scaled to max-norm 1.

Reports come in two shapes: a JSON document carrying the full analysis
of one instance (exact values as strings, decimals alongside for
reading convenience), and a flat CSV with one row per cut.  The JSON
reports are what the histogram aggregation consumes.
"""

from __future__ import annotations

import csv
import io
import json
import math
from typing import Optional, Sequence

from .analysis import (
    CutClassification,
    ImpactReport,
    InstanceAnalysis,
    Verdict,
    relative_dimension_bin,
)
from .model import Inequality, MipInstance, build_instance, normalize_cut
from .mps import read_instance_mps, write_instance_mps
from .rational import rat, rat_decimal, rat_str


class ParseError(ValueError):
    pass


def _num_out(value):
    """Exact JSON-safe rendering; infinities become 'inf'/'-inf'."""
    if value is None:
        return None
    return rat_str(value)


def _bound_in(value, where: str):
    if value is None:
        return None
    if isinstance(value, float) and math.isinf(value):
        return None
    try:
        return rat(value)
    except (ValueError, TypeError) as exc:
        raise ParseError(f"{where}: {exc}") from exc


def instance_to_json(inst: MipInstance) -> str:
    doc = {
        "name": inst.name,
        "objective": [rat_str(v) for v in inst.objective],
        "constraint_matrix": [[rat_str(v) for v in row] for row in inst.constraint_matrix],
        "rhs": [rat_str(v) for v in inst.rhs],
        "integer_vars": sorted(inst.integer_vars),
        "lower_bounds": [_num_out(v) for v in inst.lower_bounds],
        "upper_bounds": [_num_out(v) for v in inst.upper_bounds],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def instance_from_json(text: str) -> MipInstance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError("instance document must be a JSON object")
    missing = {"name", "objective", "constraint_matrix", "rhs"} - doc.keys()
    if missing:
        raise ParseError(f"instance document lacks keys: {sorted(missing)}")
    n = len(doc["objective"])
    try:
        return build_instance(
            name=doc["name"],
            constraint_matrix=doc["constraint_matrix"],
            rhs=doc["rhs"],
            objective=doc["objective"],
            integer_vars=doc.get("integer_vars", ()),
            lower_bounds=[_bound_in(v, "lower_bounds") for v in doc.get("lower_bounds", [None] * n)],
            upper_bounds=[_bound_in(v, "upper_bounds") for v in doc.get("upper_bounds", [None] * n)],
        )
    except (ValueError, TypeError) as exc:
        raise ParseError(f"malformed instance: {exc}") from exc


def read_instance(path: str, fmt: Optional[str] = None) -> MipInstance:
    """Load an instance; the format comes from `fmt` or the extension."""
    if fmt is None:
        lowered = path.lower()
        if lowered.endswith(".json"):
            fmt = "json"
        elif lowered.endswith(".mps"):
            fmt = "mps"
        else:
            raise ParseError(f"cannot infer format of {path!r}; pass fmt='json' or 'mps'")
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    if fmt == "json":
        return instance_from_json(text)
    if fmt == "mps":
        return read_instance_mps(text)
    raise ParseError(f"unknown instance format {fmt!r}")


def write_instance(inst: MipInstance, path: str, fmt: Optional[str] = None) -> None:
    if fmt is None:
        fmt = "mps" if path.lower().endswith(".mps") else "json"
    if fmt == "json":
        text = instance_to_json(inst)
    elif fmt == "mps":
        text = write_instance_mps(inst)
    else:
        raise ParseError(f"unknown instance format {fmt!r}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def parse_cuts(text: str, num_vars: int) -> list[Inequality]:
    """Parse a cut file; returns normalized cuts in file order."""
    cuts = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = [f.strip() for f in line.split(",")]
        if len(fields) < num_vars + 2:
            raise ParseError(
                f"line {line_no}: expected label, {num_vars} coefficients and a rhs"
            )
        label = fields[0]
        rest = fields[1:]
        try:
            coefficients = [rat(f) for f in rest[:num_vars]]
        except ValueError as exc:
            raise ParseError(f"line {line_no}: {exc}") from exc
        # the relation is optional and may share a field with the rhs
        idx = num_vars
        token: Optional[str] = rest[idx]
        for rel in ("<=", "≤"):
            if token.startswith(rel):
                token = token[len(rel):].strip()
                if not token:
                    idx += 1
                    token = rest[idx] if idx < len(rest) else None
                break
        if token is None:
            raise ParseError(f"line {line_no}: missing right-hand side")
        try:
            rhs = rat(token)
        except ValueError as exc:
            raise ParseError(f"line {line_no}: {exc}") from exc
        idx += 1
        category = rest[idx] if idx < len(rest) else ""
        if idx + 1 < len(rest):
            raise ParseError(f"line {line_no}: unexpected trailing fields")
        cuts.append(
            normalize_cut(Inequality(coefficients, rhs, label=label, category=category))
        )
    return cuts


def read_cuts(path: str, num_vars: int) -> list[Inequality]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_cuts(fh.read(), num_vars)


def _cut_bin_label(analysis: InstanceAnalysis, cls: Optional[CutClassification]) -> Optional[str]:
    """Histogram bin for one classified cut, None when it is excluded."""
    if cls is None or cls.verdict is Verdict.INVALID or cls.is_degenerate:
        return None
    if analysis.dimension < 0:
        return None
    if cls.verdict is Verdict.NON_SUPPORTING:
        return relative_dimension_bin(-1, analysis.dimension).label
    if cls.face_dimension is None:
        return None
    return relative_dimension_bin(cls.face_dimension, analysis.dimension).label


def _impact_lookup(impact: Optional[ImpactReport], position: int):
    if impact is None or position >= len(impact.runs):
        return None
    return impact.runs[position]


def analysis_to_json(analysis: InstanceAnalysis) -> str:
    doc = {
        "instance": analysis.name,
        "num_vars": analysis.num_vars,
        "dimension": analysis.dimension,
        "hull": {
            "oracle_queries": analysis.hull_queries,
            "cache_hits": analysis.hull_cache_hits,
            "equations": [
                {"coefficients": [rat_str(c) for c in row], "rhs": rat_str(b)}
                for row, b in zip(analysis.equations.rows, analysis.equations.rhs)
            ],
        },
        "summary": {
            "analyzed": {
                "total": analysis.analyzed_count,
                "by_category": analysis.analyzed_by_category,
            },
            "failed": {
                "numerical": analysis.failed_numerical,
                "timeout": analysis.failed_timeout,
                "invalid": analysis.failed_invalid,
            },
            "degenerate": analysis.degenerate,
            "node_budget": None if analysis.impact is None else analysis.impact.node_budget,
        },
        "cuts": [],
        "histogram": [
            {"bin": b.label, "weight": rat_str(w), "weight_decimal": rat_decimal(w)}
            for b, w in analysis.histogram()
        ],
    }
    if analysis.impact is not None:
        imp = analysis.impact
        doc["impact"] = {
            "z_star": _num_out(imp.z_star),
            "z_lp": _num_out(imp.z_lp),
            "node_budget": imp.node_budget,
            "baseline": {
                "solve_status": imp.baseline.solve_status,
                "nodes": imp.baseline.nodes,
                "closed_gap": _num_out(imp.baseline.gap),
                "flag": imp.baseline.flag,
            },
        }
    if analysis.impact_error:
        doc["impact_error"] = analysis.impact_error
    for position, (cut, cls) in enumerate(zip(analysis.cuts, analysis.classifications)):
        run = _impact_lookup(analysis.impact, position)
        entry = {
            "label": cut.label,
            "category": cut.category,
            "verdict": None if cls is None else cls.verdict.value,
            "degenerate": False if cls is None else cls.is_degenerate,
            "failure": analysis.failures[position] or None,
            "beta": rat_str(cut.rhs),
            "beta_true": None if cls is None else _num_out(cls.beta_true),
            "gap_to_true": None if cls is None else _num_out(cls.gap_to_true),
            "face_dimension": None if cls is None else cls.face_dimension,
            "bin": _cut_bin_label(analysis, cls),
        }
        if run is not None:
            entry["closed_gap"] = _num_out(run.gap)
            entry["closed_gap_decimal"] = (
                rat_decimal(run.gap) if run.gap is not None else None
            )
            entry["nodes"] = run.nodes
            entry["solve_status"] = run.solve_status
            entry["flag"] = run.flag
        doc["cuts"].append(entry)
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


# One table, three row kinds; columns unused by a kind stay empty.
_CSV_COLUMNS = [
    "row",
    "instance",
    "dimension",
    "label",
    "category",
    "verdict",
    "beta",
    "beta_true",
    "gap_to_true",
    "face_dimension",
    "bin",
    "closed_gap",
    "closed_gap_decimal",
    "nodes",
    "solve_status",
    "flag",
    "node_budget",
    "analyzed",
    "failed_numerical",
    "failed_timeout",
    "failed_invalid",
    "degenerate",
    "weight",
    "weight_decimal",
]


def analysis_to_csv(analysis: InstanceAnalysis) -> str:
    out = io.StringIO()
    writer = csv.DictWriter(out, fieldnames=_CSV_COLUMNS, restval="")
    writer.writeheader()
    writer.writerow(
        {
            "row": "summary",
            "instance": analysis.name,
            "dimension": analysis.dimension,
            "node_budget": ""
            if analysis.impact is None
            else analysis.impact.node_budget,
            "analyzed": analysis.analyzed_count,
            "failed_numerical": analysis.failed_numerical,
            "failed_timeout": analysis.failed_timeout,
            "failed_invalid": analysis.failed_invalid,
            "degenerate": analysis.degenerate,
            "flag": analysis.impact_error,
        }
    )
    for position, (cut, cls) in enumerate(zip(analysis.cuts, analysis.classifications)):
        run = _impact_lookup(analysis.impact, position)
        failure = analysis.failures[position]
        writer.writerow(
            {
                "row": "cut",
                "instance": analysis.name,
                "dimension": analysis.dimension,
                "label": cut.label,
                "category": cut.category,
                "verdict": "failed" if cls is None else cls.verdict.value,
                "beta": rat_str(cut.rhs),
                "beta_true": "" if cls is None else _num_out(cls.beta_true),
                "gap_to_true": "" if cls is None else _num_out(cls.gap_to_true),
                "face_dimension": ""
                if cls is None or cls.face_dimension is None
                else cls.face_dimension,
                "bin": _cut_bin_label(analysis, cls) or "",
                "closed_gap": "" if run is None or run.gap is None else rat_str(run.gap),
                "closed_gap_decimal": ""
                if run is None or run.gap is None
                else rat_decimal(run.gap),
                "nodes": "" if run is None else run.nodes,
                "solve_status": "" if run is None else run.solve_status,
                "flag": failure if run is None else (run.flag or failure),
            }
        )
    for b, w in analysis.histogram():
        writer.writerow(
            {
                "row": "histogram",
                "instance": analysis.name,
                "bin": b.label,
                "weight": rat_str(w),
                "weight_decimal": rat_decimal(w),
            }
        )
    return out.getvalue()


def write_report(analysis: InstanceAnalysis, path: str, fmt: str = "json") -> None:
    """Write one instance's analysis as 'json' or 'csv'."""
    if fmt == "json":
        text = analysis_to_json(analysis)
    elif fmt == "csv":
        text = analysis_to_csv(analysis)
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def histogram_items_from_report(doc: dict) -> Optional[tuple]:
    """(dimension, face dims) from one parsed JSON report, None if no cuts qualify.

    Invalid, degenerate and failed cuts are excluded; non-supporting
    cuts count as empty faces; supporting cuts without a computed face
    dimension cannot be binned and are skipped.
    """
    d = doc.get("dimension")
    if d is None or d < 0:
        return None
    dims = []
    for cut in doc.get("cuts", ()):
        verdict = cut.get("verdict")
        if verdict is None or verdict == Verdict.INVALID.value or cut.get("degenerate"):
            continue
        if verdict == Verdict.NON_SUPPORTING.value:
            dims.append(-1)
        elif cut.get("face_dimension") is not None:
            dims.append(cut["face_dimension"])
    if not dims:
        return None
    return (d, dims)


def load_histogram_items(paths: Sequence[str]) -> list:
    items = []
    for path in paths:
        with open(path, "r", encoding="utf-8") as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ParseError(f"{path}: not a JSON report: {exc}") from exc
        item = histogram_items_from_report(doc)
        if item is not None:
            items.append(item)
    return items


def histogram_to_csv(rows: Sequence) -> str:
    out = io.StringIO()
    writer = csv.writer(out)
    writer.writerow(["bin", "weight", "weight_decimal"])
    for b, w in rows:
        writer.writerow([b.label, rat_str(w), rat_decimal(w)])
    return out.getvalue()
