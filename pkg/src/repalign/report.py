"""Self-describing run reports with canonical serialization.

Identical runs must produce identical bytes, so the JSON emitter owns its
formatting: keys sorted, two-space indent, floats at nine significant
digits, no timestamps. Input files appear as basename plus SHA-256, which
keeps reports byte-identical when a fixture tree moves between
directories while still pinning the exact payloads.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .errors import ValidationError
from .kernels import CknnaScore
from .pipeline import Settings
from .profiles import LayerProfile
from .secknna import SeCknnaResult

REPORT_KINDS = ("cknna", "se_cknna", "layer_profile")


@dataclass(frozen=True)
class AlignmentReport:
    """Everything one run produced, ready to serialize."""

    tool_version: str
    kind: str
    k: int
    preprocessing: dict[str, Any]
    inputs: tuple[dict[str, Any], ...]
    results: dict[str, Any]
    warnings: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in REPORT_KINDS:
            raise ValidationError(f"unknown report kind {self.kind!r}")


def file_digest(path: str | Path) -> dict[str, str]:
    """Basename plus SHA-256 of one input file."""
    p = Path(path)
    return {"path": p.name, "sha256": hashlib.sha256(p.read_bytes()).hexdigest()}


def format_float(v: float) -> str:
    """Nine-significant-digit decimal, idempotent under reparse-and-format."""
    if v != v or v in (float("inf"), float("-inf")):
        raise ValidationError("reports cannot carry non-finite numbers")
    s = format(float(v), ".9g")
    if "e" not in s and "E" not in s and "." not in s:
        s += ".0"
    return s


def _emit_value(value: Any, indent: int, out: list[str]) -> None:
    pad = "  " * indent
    if value is None:
        out.append("null")
    elif value is True:
        out.append("true")
    elif value is False:
        out.append("false")
    elif isinstance(value, str):
        out.append(json.dumps(value, ensure_ascii=True))
    elif isinstance(value, int):
        out.append(str(value))
    elif isinstance(value, float):
        out.append(format_float(value))
    elif isinstance(value, dict):
        if not value:
            out.append("{}")
            return
        out.append("{\n")
        keys = sorted(value)
        for i, key in enumerate(keys):
            if not isinstance(key, str):
                raise ValidationError(f"report keys must be strings, got {key!r}")
            out.append(f"{pad}  {json.dumps(key, ensure_ascii=True)}: ")
            _emit_value(value[key], indent + 1, out)
            out.append(",\n" if i + 1 < len(keys) else "\n")
        out.append(pad + "}")
    elif isinstance(value, (list, tuple)):
        if not value:
            out.append("[]")
            return
        out.append("[\n")
        for i, item in enumerate(value):
            out.append(pad + "  ")
            _emit_value(item, indent + 1, out)
            out.append(",\n" if i + 1 < len(value) else "\n")
        out.append(pad + "]")
    else:
        raise ValidationError(f"cannot serialize {type(value).__name__} into a report")


def canonical_json(obj: dict[str, Any]) -> bytes:
    parts: list[str] = []
    _emit_value(obj, 0, parts)
    parts.append("\n")
    return "".join(parts).encode("utf-8")


def _score_fields(score: CknnaScore | None) -> dict[str, Any]:
    if score is None:
        return {"value": None, "n_effective": None, "mask_density": None, "degenerate": True}
    return {
        "value": score.value,
        "n_effective": score.n_effective,
        "mask_density": score.mask_density,
        "degenerate": False,
    }


def report_cknna(
    score: CknnaScore,
    settings: Settings,
    inputs: list[dict[str, str]],
    tool_version: str,
) -> AlignmentReport:
    warnings: list[str] = []
    if score.value < 0.0:
        warnings.append(f"negative score {format_float(score.value)}")
    return AlignmentReport(
        tool_version=tool_version,
        kind="cknna",
        k=score.k,
        preprocessing=settings.preprocessing_record(),
        inputs=tuple(inputs),
        results={
            "value": score.value,
            "n_effective": score.n_effective,
            "mask_density": score.mask_density,
        },
        warnings=tuple(warnings),
    )


def report_se_cknna(
    result: SeCknnaResult,
    settings: Settings,
    inputs: list[dict[str, str]],
    tool_version: str,
) -> AlignmentReport:
    rows = []
    for cond, score in result.per_condition:
        row = {"condition": cond.to_dict(), "label": cond.label()}
        row.update(_score_fields(score))
        rows.append(row)
    return AlignmentReport(
        tool_version=tool_version,
        kind="se_cknna",
        k=settings.k,
        preprocessing=settings.preprocessing_record(),
        inputs=tuple(inputs),
        results={
            "per_condition": rows,
            "aggregate": result.aggregate,
            "baseline": result.baseline,
            "relative_change": result.relative_change,
            "relative_change_convention": "signed",
            "aggregator": result.aggregator,
        },
        warnings=tuple(result.warnings),
    )


def report_layer_profile(
    profile: LayerProfile,
    settings: Settings,
    inputs: list[dict[str, str]],
    tool_version: str,
) -> AlignmentReport:
    rows = []
    for idx, score in profile.entries:
        row = {"layer_index": idx}
        row.update(_score_fields(score))
        rows.append(row)
    return AlignmentReport(
        tool_version=tool_version,
        kind="layer_profile",
        k=settings.k,
        preprocessing=settings.preprocessing_record(),
        inputs=tuple(inputs),
        results={
            "entries": rows,
            "peak": {"layer_index": profile.peak[0], "value": profile.peak[1]},
            "mean_score": profile.mean_score,
            "reference_level": profile.reference_level,
        },
        warnings=tuple(profile.warnings),
    )


def _csv_cell(value: Any) -> str:
    if value is None:
        return ""
    if value is True:
        return "true"
    if value is False:
        return "false"
    if isinstance(value, float):
        return format_float(value)
    return str(value)


def _csv_rows(report: AlignmentReport) -> list[list[Any]]:
    res = report.results
    if report.kind == "cknna":
        header = ["value", "k", "n_effective", "mask_density"]
        return [header, [res["value"], report.k, res["n_effective"], res["mask_density"]]]
    if report.kind == "se_cknna":
        header = [
            "condition", "family", "parameter", "seed",
            "cknna", "mask_density", "n_effective", "degenerate",
        ]
        rows = [header]
        for row in res["per_condition"]:
            cond = row["condition"]
            rows.append([
                row["label"], cond["family"], cond["parameter"], cond["seed"],
                row["value"], row["mask_density"], row["n_effective"], row["degenerate"],
            ])
        return rows
    header = ["layer_index", "cknna", "mask_density", "n_effective", "degenerate"]
    rows = [header]
    for row in res["entries"]:
        rows.append([
            row["layer_index"], row["value"], row["mask_density"],
            row["n_effective"], row["degenerate"],
        ])
    return rows


def emit_report(report: AlignmentReport, output_format: str = "json") -> bytes:
    """Serialize a report canonically; same report, same bytes."""
    if output_format == "json":
        obj = {
            "tool_version": report.tool_version,
            "kind": report.kind,
            "k": report.k,
            "preprocessing": report.preprocessing,
            "inputs": list(report.inputs),
            "results": report.results,
            "warnings": list(report.warnings),
        }
        return canonical_json(obj)
    if output_format == "csv":
        lines = [",".join(_csv_cell(cell) for cell in row) for row in _csv_rows(report)]
        return ("\n".join(lines) + "\n").encode("utf-8")
    raise ValidationError(f"unknown output format {output_format!r}")


def parse_report(data: bytes) -> AlignmentReport:
    """Parse JSON report bytes back into the dataclass (CSV is one-way)."""
    try:
        obj = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ValidationError(f"not a report: {exc}") from exc
    if not isinstance(obj, dict):
        raise ValidationError(f"not a report: expected an object, got {type(obj).__name__}")
    try:
        return AlignmentReport(
            tool_version=str(obj["tool_version"]),
            kind=str(obj["kind"]),
            k=int(obj["k"]),
            preprocessing=dict(obj["preprocessing"]),
            inputs=tuple(obj["inputs"]),
            results=dict(obj["results"]),
            warnings=tuple(obj["warnings"]),
        )
    except KeyError as exc:
        raise ValidationError(f"report missing key {exc}") from exc
