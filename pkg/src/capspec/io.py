"""File formats: versioned spectrum JSON, report CSV, and JSON summaries.

Reals are serialized with 17 significant digits (enough to round-trip
64-bit floats exactly); the stdlib json module cannot format floats that
way, so a small emitter below handles writing. Reading uses stdlib json
followed by schema validation with one-line failure reasons.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .bounds import DELTA, DELTA_OPT, EigenSequence
from .errors import SchemaError, ValidationError
from .spectral import Problem, Spectrum, SpectrumEntry

SPECTRUM_SCHEMA = "spectrum/1"
CONVERGENCE_SCHEMA = "convergence/1"
REPORT_HEADER = "k,actual,family,bound,margin,holds,aux_S,aux_T,aux_delta"


def format_real(x) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.17g}"


def _emit(obj, out, indent):
    pad = " " * indent
    if isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for i, (key, value) in enumerate(obj.items()):
            if not isinstance(key, str):
                raise ValidationError(f"JSON keys must be strings, got {key!r}")
            out.append(pad + "  " + json.dumps(key) + ": ")
            _emit(value, out, indent + 2)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(pad + "}")
    elif isinstance(obj, (list, tuple)):
        if not len(obj):
            out.append("[]")
            return
        out.append("[\n")
        for i, value in enumerate(obj):
            out.append(pad + "  ")
            _emit(value, out, indent + 2)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(pad + "]")
    elif isinstance(obj, bool):
        out.append("true" if obj else "false")
    elif isinstance(obj, (int,)):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(format_real(obj))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif obj is None:
        out.append("null")
    else:
        raise ValidationError(f"cannot serialize {type(obj).__name__} to JSON")


def json_dumps(obj) -> str:
    out = []
    _emit(obj, out, 0)
    out.append("\n")
    return "".join(out)


def spectrum_to_doc(spectrum: Spectrum) -> dict:
    cfg = spectrum.config
    diag = spectrum.diagnostics
    return {
        "schema": SPECTRUM_SCHEMA,
        "n": cfg.n,
        "p": cfg.p,
        "theta0": cfg.theta0,
        "problem": cfg.problem.value,
        "entries": [
            {"value": e.value, "l": e.l, "radial_index": e.radial_index,
             "multiplicity": e.multiplicity}
            for e in spectrum.entries
        ],
        "meta": {
            "basis_size": cfg.basis_size,
            "l_max": int(diag["l_max"]),
            "quad_size": int(diag["quad_size"]),
            "convergence": [float(c) for c in diag["convergence"]],
            "requested_count": cfg.requested_count,
            "max_form_asymmetry": float(diag["max_form_asymmetry"]),
            "lambda1_guard_ok": bool(diag["lambda1_guard_ok"]),
        },
    }


def write_spectrum(spectrum: Spectrum, path) -> None:
    _write_text(path, json_dumps(spectrum_to_doc(spectrum)))


@dataclass(frozen=True)
class SpectrumDocument:
    """A spectrum read back from its JSON file."""

    n: int
    p: int
    theta0: float
    problem: Problem
    entries: tuple[SpectrumEntry, ...]
    meta: dict

    def sequence(self, count=None) -> EigenSequence:
        if count is None:
            count = self.meta.get("requested_count")
        values = []
        for e in self.entries:
            values.extend([e.value] * e.multiplicity)
        if count is not None:
            values = values[:count]
        return EigenSequence(n=self.n, p=self.p, problem=self.problem,
                             values=tuple(values))


def _need(doc, key, kinds, where):
    if key not in doc:
        raise SchemaError(f"{where} is missing key {key!r}")
    value = doc[key]
    if isinstance(value, bool) or not isinstance(value, kinds):
        names = "/".join(k.__name__ for k in (kinds if isinstance(kinds, tuple) else (kinds,)))
        raise SchemaError(f"{where}[{key!r}] must be {names}, got {type(value).__name__}")
    return value


def read_spectrum(path) -> SpectrumDocument:
    try:
        with open(path, encoding="utf-8") as handle:
            doc = json.load(handle)
    except OSError as err:
        raise SchemaError(f"cannot read {path}: {err}") from err
    except json.JSONDecodeError as err:
        raise SchemaError(f"{path} is not valid JSON: {err}") from err
    if not isinstance(doc, dict):
        raise SchemaError(f"{path}: top level must be an object")
    schema = _need(doc, "schema", str, "spectrum file")
    if schema != SPECTRUM_SCHEMA:
        raise SchemaError(f"unsupported schema tag {schema!r}, expected {SPECTRUM_SCHEMA!r}")
    n = _need(doc, "n", int, "spectrum file")
    p = _need(doc, "p", int, "spectrum file")
    theta0 = float(_need(doc, "theta0", (int, float), "spectrum file"))
    problem_raw = _need(doc, "problem", str, "spectrum file")
    try:
        problem = Problem(problem_raw)
    except ValueError:
        raise SchemaError(f"problem must be 'clamped' or 'buckling', got {problem_raw!r}")
    raw_entries = _need(doc, "entries", list, "spectrum file")
    if not raw_entries:
        raise SchemaError("spectrum file has no entries")
    entries = []
    for i, raw in enumerate(raw_entries):
        where = f"entries[{i}]"
        if not isinstance(raw, dict):
            raise SchemaError(f"{where} must be an object")
        value = float(_need(raw, "value", (int, float), where))
        l = _need(raw, "l", int, where)
        radial_index = _need(raw, "radial_index", int, where)
        mult = _need(raw, "multiplicity", int, where)
        if value <= 0 or not math.isfinite(value):
            raise SchemaError(f"{where}: value must be positive finite, got {value!r}")
        if l < 0 or radial_index < 0 or mult < 1:
            raise SchemaError(f"{where}: indices must be nonnegative, multiplicity >= 1")
        entries.append(SpectrumEntry(value=value, l=l, radial_index=radial_index,
                                     multiplicity=mult))
    for i in range(len(entries) - 1):
        if entries[i].value > entries[i + 1].value:
            raise SchemaError(f"entries must be ascending by value (violated at {i + 1})")
    meta = doc.get("meta", {})
    if not isinstance(meta, dict):
        raise SchemaError("meta must be an object")
    if not (0.0 < theta0 < math.pi):
        raise SchemaError(f"theta0 must lie in (0, pi), got {theta0!r}")
    return SpectrumDocument(n=n, p=p, theta0=theta0, problem=problem,
                            entries=tuple(entries), meta=dict(meta))


def _aux_columns(result) -> tuple[str, str, str]:
    aux = result.aux
    s = format_real(aux["S"]) if "S" in aux else ""
    t = format_real(aux["T"]) if "T" in aux else ""
    delta = ""
    if result.family.name == DELTA_OPT:
        delta = format_real(aux["delta_star"])
    elif result.family.name == DELTA:
        delta = format_real(aux["delta"])
    return s, t, delta


def verification_rows(report) -> list[str]:
    """CSV rows (no header) for a VerificationReport: k ascending, families
    in the report's order."""
    lines = []
    for row in report.rows:
        s, t, delta = _aux_columns(row.result)
        lines.append(",".join([
            str(row.k),
            format_real(row.actual),
            row.result.family.name,
            format_real(row.result.bound),
            format_real(row.result.margin),
            "true" if row.holds else "false",
            s, t, delta,
        ]))
    return lines


def sharpness_rows(report) -> list[str]:
    """CSV rows for a SharpnessReport in the shared report shape: per k, the
    two sqrt twins and the optimized delta family."""
    lines = []
    for row in report.rows:
        actual = report.sequence.values[row.k]
        for name, bound, delta in (
            ("sphere-buckling-sqrt", row.sqrt_bound, ""),
            ("sphere-buckling-delta-opt", row.delta_opt_bound,
             format_real(row.delta_star)),
            ("sphere-buckling-sqrt-p2", row.p2_bound, ""),
        ):
            margin = bound - actual
            lines.append(",".join([
                str(row.k),
                format_real(actual),
                name,
                format_real(bound),
                format_real(margin),
                "true" if actual <= bound + 1e-8 * actual else "false",
                "", "", delta,
            ]))
    return lines


def write_report_csv(rows, path) -> None:
    _write_text(path, "\n".join([REPORT_HEADER] + list(rows)) + "\n")


def write_summary_json(summary: dict, path) -> None:
    _write_text(path, json_dumps(summary))


def convergence_to_doc(study, config) -> dict:
    return {
        "schema": CONVERGENCE_SCHEMA,
        "n": config.n,
        "p": config.p,
        "theta0": config.theta0,
        "problem": config.problem.value,
        "requested_count": config.requested_count,
        "basis_sizes": [int(b) for b in study.basis_sizes],
        "values": [[float(v) for v in row] for row in study.values],
        "estimates": [float(e) for e in study.estimates],
    }


def write_convergence(study, config, path) -> None:
    _write_text(path, json_dumps(convergence_to_doc(study, config)))


def summary_path(out_path: str) -> str:
    stem, dot, _ = str(out_path).rpartition(".")
    base = stem if dot else str(out_path)
    return base + ".summary.json"


def _write_text(path, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
    except OSError as err:
        raise ValidationError(f"cannot write {path}: {err}") from err
