"""Command-line entry point: ``qsvm-ocr reproduce | classify | features``.

Exit codes: 0 success, 1 error, 2 at least one ambiguous classification.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import features as ft
from .pipeline import QsvmConfig, build_chi, kernel_via_discard, qsvm_classify
from .svm import LABELS, TrainingSet, decision_value, kernel_matrix, sign_label, solve_ls_svm, train_no_offset

EXIT_OK, EXIT_ERROR, EXIT_AMBIGUOUS = 0, 1, 2

MEASURED_KERNEL = [[0.5065, 0.2425], [0.2425, 0.4935]]

DEFAULTS = {
    "gamma": 2.0,
    "phase_qubits": 2,
    "t0": math.pi / 2,
    "preset": ft.DEFAULT_PRESET,
    "format": "json",
}

CSV_COLUMNS = [
    "query_id", "v", "h", "classical_decision", "quantum_expectation_re",
    "classical_label", "quantum_label", "agree",
]

_LABEL_VALUES = {"6": 1, "+1": 1, "1": 1, "9": -1, "-1": -1}


def fmt(value):
    """Round floats to 6 significant digits, recursively."""
    if isinstance(value, dict):
        return {k: fmt(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [fmt(v) for v in value]
    if isinstance(value, np.ndarray):
        return fmt(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (float, np.floating)):
        out = float(f"{float(value):.6g}")
        return 0.0 if out == 0 else out
    if isinstance(value, np.integer):
        return int(value)
    return value


def read_config(path) -> dict:
    """key = value lines; '#' starts a comment. Keys use flag names (dashes or underscores)."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip().strip('"').strip("'") for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in DEFAULTS:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = value
    return out


def resolve_settings(args) -> dict:
    settings = dict(DEFAULTS)
    if args.config:
        settings.update(read_config(args.config))
    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    settings["gamma"] = float(settings["gamma"])
    settings["phase_qubits"] = int(settings["phase_qubits"])
    settings["t0"] = float(settings["t0"])
    if settings["preset"] not in ft.PRESETS:
        raise ValueError(f"unknown preset {settings['preset']!r}")
    if settings["format"] not in ("json", "csv"):
        raise ValueError(f"unknown format {settings['format']!r}")
    return settings


def _parse_vector(text):
    try:
        parts = [float(p) for p in text.split(",")]
    except ValueError:
        return None
    return np.array(parts) if len(parts) == 2 else None


def load_vector(spec: str, preset: str):
    """Inline 'v,h' vector or a PGM path featurized with ``preset``. Returns (vector, raw ratios)."""
    vec = _parse_vector(spec)
    if vec is not None:
        return vec, None
    img = ft.read_image(spec)
    raw = ft.ratios(ft.binarize(img))
    return ft.PRESETS[preset](raw).as_array(), raw


def _record(query_id, x0, model, ts, cfg):
    x0 = np.asarray(x0, dtype=float)
    classical = decision_value(model, x0)
    result = qsvm_classify(ts, x0, cfg)
    c_label = LABELS[sign_label(classical)]
    q_label = result.character
    return {
        "query_id": query_id,
        "v": x0[0],
        "h": x0[1],
        "classical_decision": classical,
        "quantum_expectation_re": result.expectation.real,
        "quantum_expectation_im": result.expectation.imag,
        "classical_label": c_label,
        "quantum_label": q_label,
        "agree": c_label == q_label and q_label != "ambiguous",
        "success_probability": result.postselect_probability,
    }, result


def build_report(ts: TrainingSet, queries, settings: dict, reference_kernel=None) -> dict:
    cfg = QsvmConfig(gamma=settings["gamma"], phase_qubits=settings["phase_qubits"], t0=settings["t0"])
    model = train_no_offset(ts, cfg.gamma)
    offset_model = solve_ls_svm(ts, cfg.gamma)
    k = kernel_matrix(ts)
    simulated = kernel_via_discard(build_chi(ts), ts).entries[: ts.M, : ts.M].real

    records, quantum_alphas, probs = [], None, []
    for query_id, x0 in queries:
        rec, result = _record(query_id, x0, model, ts, cfg)
        rec["offset_decision"] = decision_value(offset_model, x0)
        records.append(rec)
        quantum_alphas = result.alphas
        probs.append(result.postselect_probability)

    report = {
        "config": {
            "gamma": cfg.gamma,
            "phase_qubits": cfg.phase_qubits,
            "t0": cfg.t0,
            "C": cfg.inversion_constant,
            "postselect": cfg.postselect,
            "preset": settings["preset"],
            "labels": {"6": 1, "9": -1},
        },
        "kernel": {
            "ideal": simulated,
            "classical": k / np.trace(k),
        },
        "alphas": {
            "classical": model.alphas,
            "quantum_normalized": quantum_alphas if quantum_alphas is not None else [],
            "offset_model": {"b": offset_model.b, "alphas": offset_model.alphas},
        },
        "success_probabilities": probs,
        "queries": records,
    }
    if reference_kernel is not None:
        ref = np.asarray(reference_kernel)
        report["kernel"]["measured"] = ref
        report["kernel"]["deviation"] = simulated - ref
    return fmt(report)


def render(report: dict, fmt_name: str) -> str:
    if fmt_name == "json":
        return json.dumps(report, indent=2, sort_keys=True)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    for rec in report["queries"]:
        writer.writerow(rec)
    return buf.getvalue()


def _exit_code(report) -> int:
    ambiguous = any("ambiguous" in (r["classical_label"], r["quantum_label"]) for r in report["queries"])
    return EXIT_AMBIGUOUS if ambiguous else EXIT_OK


def reference_training_set() -> TrainingSet:
    return TrainingSet([ft.X1, ft.X2], [1, -1])


def cmd_reproduce(args, out) -> int:
    settings = resolve_settings(args)
    assets = ft.asset_dir()
    names = ft.STANDARD_GLYPHS + ft.HANDWRITTEN_GLYPHS
    missing = [n for n in names if not (assets / n).is_file()]
    if missing:
        raise FileNotFoundError(f"missing assets in {assets}: {', '.join(missing)}")
    queries = [("x1", np.array(ft.X1)), ("x2", np.array(ft.X2))]
    for name in names:
        vec, _ = load_vector(str(assets / name), settings["preset"])
        queries.append((Path(name).stem, vec))
    report = build_report(reference_training_set(), queries, settings, reference_kernel=MEASURED_KERNEL)
    out.write(render(report, settings["format"]).rstrip("\n") + "\n")
    return _exit_code(report)


def _parse_train(spec: str, preset: str):
    if "=" not in spec:
        raise ValueError(f"training spec {spec!r} must look like LABEL=VECTOR_OR_PATH (LABEL 6 or 9)")
    label, source = spec.split("=", 1)
    if label not in _LABEL_VALUES:
        raise ValueError(f"unknown training label {label!r}; use 6 or 9")
    vec, _ = load_vector(source, preset)
    return vec, _LABEL_VALUES[label]


def cmd_classify(args, out) -> int:
    settings = resolve_settings(args)
    if args.train:
        pairs = [_parse_train(s, settings["preset"]) for s in args.train]
        ts = TrainingSet([p[0] for p in pairs], [p[1] for p in pairs])
    else:
        ts = reference_training_set()
    queries = []
    for i, spec in enumerate(args.query):
        vec, _ = load_vector(spec, settings["preset"])
        queries.append((spec if _parse_vector(spec) is None else f"q{i}", vec))
    report = build_report(ts, queries, settings)
    out.write(render(report, settings["format"]).rstrip("\n") + "\n")
    return _exit_code(report)


def cmd_features(args, out) -> int:
    settings = resolve_settings(args)
    img = ft.read_image(args.image)
    raw = ft.ratios(ft.binarize(img))
    converted = ft.PRESETS[settings["preset"]](raw)
    report = fmt({
        "image": str(args.image),
        "preset": settings["preset"],
        "raw": {"v": raw.v, "h": raw.h},
        "converted": {"v": converted.v, "h": converted.h},
    })
    out.write(json.dumps(report, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--gamma", type=float, help="LS-SVM weight (default 2)")
    common.add_argument("--phase-qubits", dest="phase_qubits", type=int, help="clock register size (default 2)")
    common.add_argument("--t0", type=float, help="evolution time (default pi/2)")
    common.add_argument("--preset", choices=sorted(ft.PRESETS), help=f"feature conversion (default {ft.DEFAULT_PRESET})")
    common.add_argument("--format", choices=["json", "csv"], help="report format (default json)")
    common.add_argument("--config", help="key = value file; flags override it")

    parser = argparse.ArgumentParser(prog="qsvm-ocr", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("reproduce", parents=[common], help="run the reference experiment on bundled glyphs")
    p = sub.add_parser("classify", parents=[common], help="train and classify vectors or PGM images")
    p.add_argument("--train", action="append", metavar="LABEL=SRC",
                   help="training sample, e.g. 6=0.9872,0.1595 or 9=glyph.pgm (repeatable)")
    p.add_argument("query", nargs="+", help="inline 'v,h' vector or PGM path")
    p = sub.add_parser("features", parents=[common], help="print raw and converted ratios of a PGM")
    p.add_argument("image")
    return parser


COMMANDS = {"reproduce": cmd_reproduce, "classify": cmd_classify, "features": cmd_features}


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args, out)
    except (OSError, ValueError, np.linalg.LinAlgError) as exc:
        print(f"qsvm-ocr: error: {exc}", file=err)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
