"""Cross-report comparison tables and scatter exports."""
from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from ..errors import ValidationError
from .experiment import EvalReport, PER_CLASS_VERSIONS


@dataclass
class Comparison:
    version_rows: list[dict]
    model_type_rows: list[dict]
    scatter: dict[str, list[tuple[str, int, float]]]  # "version/model" -> rows
    slopes: dict[str, float]


def least_squares_slope(xs: np.ndarray, ys: np.ndarray) -> float:
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    xm, ym = xs.mean(), ys.mean()
    denom = np.sum((xs - xm) ** 2)
    if denom == 0:
        return 0.0
    return float(np.sum((xs - xm) * (ys - ym)) / denom)


def compare(reports: list[EvalReport]) -> Comparison:
    if not reports:
        raise ValidationError("no reports to compare")
    hashes = {r.fixture_hash for r in reports}
    if len(hashes) > 1:
        raise ValidationError(f"reports come from different fixtures: {sorted(hashes)}")

    version_rows = []
    model_type_rows_acc: dict[str, list[EvalReport]] = {}
    scatter: dict[str, list[tuple[str, int, float]]] = {}
    slopes: dict[str, float] = {}
    for rep in reports:
        version_rows.append(
            {
                "version": rep.version,
                "model_type": rep.model_type,
                "metric": rep.metric,
                "mean_accuracy": rep.mean_accuracy,
                "max_accuracy": rep.max_accuracy,
                "train_seconds": rep.train_seconds_total,
                "predict_seconds": rep.predict_seconds_total,
            }
        )
        if rep.version in PER_CLASS_VERSIONS:
            model_type_rows_acc.setdefault(rep.model_type, []).append(rep)
            key = f"{rep.version}_{rep.model_type}"
            scatter[key] = list(rep.per_class)
            if len(rep.per_class) >= 2:
                counts = np.array([n for _, n, _ in rep.per_class])
                accs = np.array([a for _, _, a in rep.per_class])
                slopes[key] = least_squares_slope(counts, accs)
    model_type_rows = [
        {
            "model_type": mt,
            "mean_accuracy": float(np.mean([r.mean_accuracy for r in reps])),
            "train_seconds": float(np.sum([r.train_seconds_total for r in reps])),
            "predict_seconds": float(np.sum([r.predict_seconds_total for r in reps])),
        }
        for mt, reps in sorted(model_type_rows_acc.items())
    ]
    return Comparison(version_rows=version_rows, model_type_rows=model_type_rows, scatter=scatter, slopes=slopes)


def write_comparison(cmp_result: Comparison, out_dir: str) -> list[str]:
    """Emit delimited text files; returns the paths written."""
    os.makedirs(out_dir, exist_ok=True)
    written = []

    path = os.path.join(out_dir, "versions.tsv")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("version\tmodel_type\tmetric\tmean_accuracy\tmax_accuracy\ttrain_seconds\tpredict_seconds\n")
        for row in cmp_result.version_rows:
            fh.write(
                f"{row['version']}\t{row['model_type']}\t{row['metric']}\t"
                f"{row['mean_accuracy']:.6f}\t{row['max_accuracy']:.6f}\t"
                f"{row['train_seconds']:.6f}\t{row['predict_seconds']:.6f}\n"
            )
    written.append(path)

    path = os.path.join(out_dir, "model_types.tsv")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("model_type\tmean_accuracy\ttrain_seconds\tpredict_seconds\n")
        for row in cmp_result.model_type_rows:
            fh.write(
                f"{row['model_type']}\t{row['mean_accuracy']:.6f}\t"
                f"{row['train_seconds']:.6f}\t{row['predict_seconds']:.6f}\n"
            )
    written.append(path)

    for key, rows in sorted(cmp_result.scatter.items()):
        path = os.path.join(out_dir, f"scatter_{key}.tsv")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("class_id\tsignup_count\taccuracy\n")
            for class_id, count, acc in rows:
                fh.write(f"{class_id}\t{count}\t{acc:.6f}\n")
        written.append(path)

    path = os.path.join(out_dir, "slopes.tsv")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("quadrant\tslope\n")
        for key, slope in sorted(cmp_result.slopes.items()):
            fh.write(f"{key}\t{slope:.8f}\n")
    written.append(path)
    return written
