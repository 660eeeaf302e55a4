"""Command-line interface.

Subcommands: ``phantom``, ``extract``, ``classify``, ``compare``,
``progression``. Exit codes: 0 success, 2 input error (bad arguments,
files or cohorts), 3 computation error (degenerate matrices or
embeddings).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .config import PRESETS, PipelineConfig, preset
from .exceptions import ComputationError, InputError
from .features import extract_features, extraction_header, read_cohort, write_feature_file
from .isosvm import EMBEDDING_NOTE, loocv_isosvm
from .phantom import TEXTURES, PhantomSpec, write_phantom
from .stats import (
    COMPARISON_COLUMNS,
    T_TEST_METHOD,
    confusion_metrics,
    delta_features,
    group_compare,
    roc_auc,
    write_comparison_csv,
)
from .study import StudyFeatureVector
from .volume_io import load_mask, load_stack

log = logging.getLogger("mpradiomics")

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_COMPUTATION = 3


def resolve_config(config_path=None, preset_name=None, seed=None):
    if config_path:
        path = Path(config_path)
        if not path.is_file():
            raise InputError(f"missing config file: {path}")
        config = PipelineConfig.from_json(path.read_text(encoding="utf-8"))
    else:
        config = preset(preset_name or "grading")
    if seed is not None:
        config = config.with_updates(seed=seed)
    return config


def _write_json(path, payload):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    return path


# -- commands --------------------------------------------------------------

def cmd_phantom(spec, out_dir, count=1):
    """Write ``count`` phantoms; with ``count > 1`` they go to numbered subdirectories."""
    out_dir = Path(out_dir)
    if count == 1:
        return [write_phantom(spec, out_dir)]
    written = []
    for k in range(count):
        sid = f"{spec.label}{k:02d}"
        sub = PhantomSpec(spec.label, spec.dims, spec.n_channels, spec.texture, spec.noise,
                          spec.seed + k, study_id=sid)
        written.append(write_phantom(sub, out_dir / sid))
    return written


def cmd_extract(config, manifest, mask, out_file, study_id=None, label=None, time_point=None, threads=1):
    stack = load_stack(manifest)
    roi = load_mask(mask, stack.dims)
    feats = extract_features(stack, roi, config, n_jobs=threads)
    meta = stack.metadata
    if time_point is None and meta.get("time_point") is not None:
        time_point = int(meta["time_point"])
    row = StudyFeatureVector(
        study_id=study_id or meta.get("study_id") or Path(manifest).resolve().parent.name,
        features=feats,
        label=label or meta.get("label"),
        time_point=time_point,
    )
    write_feature_file(out_file, [row], extraction_header(config, stack))
    return row


def cmd_classify(config, cohort_dir, out_report, threads=1):
    rows = read_cohort(cohort_dir)
    if len(rows) < 4:
        raise InputError(f"classification needs at least 4 studies, found {len(rows)}")
    result = loocv_isosvm(rows, config.isomap_k, config.isomap_dim, config.svm_C, n_jobs=threads)
    positive = result.classes[1]
    roc = roc_auc(result.scores, result.true, positive)
    sens, spec, acc = confusion_metrics(result.predicted, result.true, positive)
    report = {
        "format": "mpradiomics-classification/1",
        "config": config.to_dict(),
        "method": {"classifier": "isomap + linear SVM, leave-one-out", "embedding": EMBEDDING_NOTE},
        "hyperparameters": result.hyperparameters,
        "isomap_adjustments": list(result.isomap.adjustments_),
        "warnings": list(result.standardizer.warnings_) + list(result.isomap.warnings_),
        "classes": list(result.classes),
        "positive_label": positive,
        "studies": [
            {"study_id": f.study_id, "label": f.true, "score": f.score, "predicted": f.predicted}
            for f in result.folds
        ],
        "auc": roc.auc,
        "sensitivity": sens,
        "specificity": spec,
        "accuracy": acc,
        "roc": roc.to_dict(),
    }
    _write_json(out_report, report)
    return report


def _relabel(rows, label):
    return [StudyFeatureVector(r.study_id, r.features, label, r.time_point) for r in rows]


def cmd_compare(config, group_a_dir, group_b_dir, out_csv):
    a = read_cohort(group_a_dir)
    b = read_cohort(group_b_dir)
    if len(a) < 2 or len(b) < 2:
        raise InputError(f"each group needs at least two studies (got {len(a)} and {len(b)})")
    comparison = group_compare(_relabel(a, "a") + _relabel(b, "b"), "a", "b")
    Path(out_csv).parent.mkdir(parents=True, exist_ok=True)
    write_comparison_csv(comparison, out_csv)
    return comparison


def _read_labels(path):
    path = Path(path)
    if not path.is_file():
        raise InputError(f"missing labels file: {path}")
    text = path.read_text(encoding="utf-8")
    if path.suffix == ".json":
        return {str(k): str(v) for k, v in json.loads(text).items()}
    labels = {}
    for line in text.splitlines():
        if line.strip() and not line.startswith("#"):
            sid, _, lab = line.partition(",")
            labels[sid.strip()] = lab.strip()
    labels.pop("study_id", None)
    return labels


def cmd_progression(config, t1_dir, t2_dir, out_report, labels=None):
    first = {r.study_id: r for r in read_cohort(t1_dir)}
    second = {r.study_id: r for r in read_cohort(t2_dir)}
    for sid in sorted(set(first) ^ set(second)):
        where = "time point 2" if sid in first else "time point 1"
        raise InputError(f"study {sid!r} is missing at {where}")
    label_map = _read_labels(labels) if labels else {}
    deltas = []
    for sid in sorted(first):
        d = delta_features(first[sid], second[sid])
        lab = label_map.get(sid, d.label)
        if lab is None:
            raise InputError(f"no outcome label for study {sid!r}")
        deltas.append(StudyFeatureVector(sid, d.features, lab))
    comparison = group_compare(deltas)
    in_b = [r.label == comparison.label_b for r in deltas]
    curves = {}
    for row in comparison.rows:
        sign = 1.0 if row.orientation == "higher_in_b" else -1.0
        curves[row.feature] = roc_auc([sign * r.features[row.feature] for r in deltas], in_b, True).to_dict()
    report = {
        "format": "mpradiomics-progression/1",
        "config": config.to_dict(),
        "t_test": T_TEST_METHOD,
        "group_a": comparison.label_a,
        "group_b": comparison.label_b,
        "deltas": [{"study_id": r.study_id, "label": r.label, "features": r.features} for r in deltas],
        "comparison": [dict(zip(COMPARISON_COLUMNS, r.as_row())) for r in comparison.rows],
        "roc": curves,
    }
    _write_json(out_report, report)
    return report


# -- argument parsing --------------------------------------------------------

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file (overrides --preset)")
    common.add_argument("--preset", choices=sorted(PRESETS), default="grading")
    common.add_argument("--seed", type=int, help="override the config seed")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--out", required=True, help="output path")

    parser = argparse.ArgumentParser(prog="mpradiomics", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("phantom", parents=[common], help="write synthetic phantom stacks")
    p.add_argument("--label", required=True)
    p.add_argument("--texture", choices=TEXTURES, default="smooth")
    p.add_argument("--dims", type=int, nargs=3, default=[32, 32, 32])
    p.add_argument("--channels", type=int, default=3)
    p.add_argument("--noise", type=float, default=0.1)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--study-id")

    p = sub.add_parser("extract", parents=[common], help="extract features of one ROI")
    p.add_argument("--manifest", required=True)
    p.add_argument("--mask", required=True)
    p.add_argument("--study-id")
    p.add_argument("--label")
    p.add_argument("--time-point", type=int)

    p = sub.add_parser("classify", parents=[common], help="leave-one-out IsoSVM on a cohort")
    p.add_argument("--cohort", required=True, help="directory of feature files")

    p = sub.add_parser("compare", parents=[common], help="two-group feature comparison")
    p.add_argument("--group-a", required=True)
    p.add_argument("--group-b", required=True)

    p = sub.add_parser("progression", parents=[common], help="time-point delta analysis")
    p.add_argument("--t1", required=True, help="feature files at time point 1")
    p.add_argument("--t2", required=True, help="feature files at time point 2")
    p.add_argument("--labels", help="CSV (study_id,label) or JSON map; default: labels at time point 2")
    return parser


def _run(args):
    if args.threads < 1:
        raise InputError("--threads must be >= 1")
    config = resolve_config(args.config, args.preset, args.seed)
    if args.command == "phantom":
        if args.count < 1:
            raise InputError("--count must be >= 1")
        spec = PhantomSpec(args.label, tuple(args.dims), args.channels, args.texture, args.noise,
                           config.seed, study_id=args.study_id)
        cmd_phantom(spec, args.out, args.count)
    elif args.command == "extract":
        cmd_extract(config, args.manifest, args.mask, args.out, args.study_id, args.label,
                    args.time_point, args.threads)
    elif args.command == "classify":
        cmd_classify(config, args.cohort, args.out, args.threads)
    elif args.command == "compare":
        cmd_compare(config, args.group_a, args.group_b, args.out)
    elif args.command == "progression":
        cmd_progression(config, args.t1, args.t2, args.out, args.labels)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        _run(args)
    except InputError as exc:
        log.error("input error: %s", exc)
        return EXIT_INPUT
    except ComputationError as exc:
        log.error("computation error: %s", exc)
        return EXIT_COMPUTATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
