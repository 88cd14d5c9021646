"""Percentage-error metrics, Lewis grading, and multi-model comparison tables."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import optimizer as opt
from .exceptions import GreycastError
from .models import SEARCHABLE_PARAMS, make_model, model_to_dict
from .series import SplitSpec, TimeSeries, split

GRADE_HIGHLY_ACCURATE = "highly-accurate"
GRADE_GOOD = "good"
GRADE_REASONABLE = "reasonable"
GRADE_INACCURATE = "inaccurate"


def ape(actual: float, predicted: float) -> float:
    """Absolute percentage error of one prediction."""
    if actual <= 0:
        raise ValueError(f"actual value {actual} must be positive")
    return abs(predicted - actual) / actual * 100.0


def mape(actuals, predictions, start_k: int = 1) -> float:
    """Mean absolute percentage error over 1-based indices >= ``start_k``.

    The fit stage uses start_k=2 (the anchor point is reproduced exactly and
    excluded by convention); holdout evaluation uses start_k=1.
    """
    actuals = np.asarray(actuals, dtype=float)
    predictions = np.asarray(predictions, dtype=float)
    if actuals.shape != predictions.shape:
        raise ValueError(f"length mismatch: {actuals.shape} vs {predictions.shape}")
    sl = slice(start_k - 1, None)
    if actuals[sl].size == 0:
        raise ValueError("no points in the requested range")
    return float(np.mean(np.abs(predictions[sl] - actuals[sl]) / actuals[sl]) * 100.0)


def lewis_grade(mape_percent: float) -> str:
    """Grade a MAPE on the Lewis bands (boundaries go to the better grade's band)."""
    if mape_percent < 0:
        raise ValueError(f"MAPE {mape_percent} must be non-negative")
    if mape_percent < 10.0:
        return GRADE_HIGHLY_ACCURATE
    if mape_percent < 20.0:
        return GRADE_GOOD
    if mape_percent < 50.0:
        return GRADE_REASONABLE
    return GRADE_INACCURATE


@dataclass
class EvaluationReport:
    """Per-point errors plus staged MAPEs for one fitted model on one split."""

    per_point: list[dict]
    fit_mape: float
    holdout_mape: float | None
    lewis_grade: str

    def to_dict(self) -> dict:
        return {
            "per_point": self.per_point,
            "fit_mape": self.fit_mape,
            "holdout_mape": self.holdout_mape,
            "lewis_grade": self.lewis_grade,
        }


def evaluate_model(model, train: TimeSeries, holdout: TimeSeries | None = None) -> EvaluationReport:
    """Score a fitted model: in-sample fit plus optional trailing holdout."""
    fitted = model.fitted_values()
    actual_fit = train.to_array()
    rows = []
    for i, (act, pred) in enumerate(zip(actual_fit, fitted)):
        rows.append({
            "period": train.start_period + i,
            "stage": "fit",
            "actual": float(act),
            "predicted": float(pred),
            "ape": ape(act, pred),
        })
    fit_stage = mape(actual_fit, fitted, start_k=2)
    holdout_stage = None
    if holdout is not None and len(holdout):
        predicted = model.predict(len(holdout))
        actual_holdout = holdout.to_array()
        for i, (act, pred) in enumerate(zip(actual_holdout, predicted)):
            rows.append({
                "period": holdout.start_period + i,
                "stage": "holdout",
                "actual": float(act),
                "predicted": float(pred),
                "ape": ape(act, pred),
            })
        holdout_stage = mape(actual_holdout, predicted, start_k=1)
    grade_on = holdout_stage if holdout_stage is not None else fit_stage
    return EvaluationReport(rows, fit_stage, holdout_stage, lewis_grade(grade_on))


@dataclass
class ModelColumn:
    kind: str
    predicted: list[float] | None
    fit_mape: float | None
    holdout_mape: float | None
    hyperparams: dict = field(default_factory=dict)
    model_doc: dict | None = None
    error: str | None = None


@dataclass
class ComparisonTable:
    """All requested models evaluated on one shared split, one column each.

    Columns are sorted by holdout MAPE (failed fits last). Every number shown
    by the text/CSV renderings is also present in :meth:`to_dict`.
    """

    periods: list[int]
    actuals: list[float]
    train_len: int
    columns: list[ModelColumn]

    def to_dict(self) -> dict:
        return {
            "periods": self.periods,
            "actuals": self.actuals,
            "train_len": self.train_len,
            "models": [
                {
                    "kind": c.kind,
                    "predicted": c.predicted,
                    "fit_mape": c.fit_mape,
                    "holdout_mape": c.holdout_mape,
                    "hyperparams": c.hyperparams,
                    "model": c.model_doc,
                    "error": c.error,
                }
                for c in self.columns
            ],
        }

    def render_text(self) -> str:
        headers = ["period", "actual"] + [c.kind for c in self.columns]
        body = []
        for i, (period, actual) in enumerate(zip(self.periods, self.actuals)):
            row = [str(period), f"{actual:.2f}"]
            for c in self.columns:
                row.append("failed" if c.predicted is None else f"{c.predicted[i]:.2f}")
            body.append(row)
        fit_row = ["fit MAPE(%)", ""]
        holdout_row = ["holdout MAPE(%)", ""]
        for c in self.columns:
            fit_row.append("failed" if c.fit_mape is None else f"{c.fit_mape:.2f}")
            holdout_row.append("" if c.holdout_mape is None else f"{c.holdout_mape:.2f}")
        rows = [headers] + body + [fit_row, holdout_row]
        widths = [max(len(r[j]) for r in rows) for j in range(len(headers))]
        return "\n".join(
            "  ".join(cell.rjust(w) for cell, w in zip(r, widths)) for r in rows
        )

    def to_csv(self) -> str:
        lines = ["period,actual," + ",".join(c.kind for c in self.columns)]
        for i, (period, actual) in enumerate(zip(self.periods, self.actuals)):
            cells = [str(period), repr(actual)]
            for c in self.columns:
                cells.append("" if c.predicted is None else repr(c.predicted[i]))
            lines.append(",".join(cells))
        fit_cells = ["fit_mape", ""]
        holdout_cells = ["holdout_mape", ""]
        for c in self.columns:
            fit_cells.append("" if c.fit_mape is None else repr(c.fit_mape))
            holdout_cells.append("" if c.holdout_mape is None else repr(c.holdout_mape))
        lines.append(",".join(fit_cells))
        lines.append(",".join(holdout_cells))
        return "\n".join(lines) + "\n"


def compare(series: TimeSeries, split_spec: SplitSpec, kinds,
            cfg: opt.GwoConfig | None = None, accumulation=None) -> ComparisonTable:
    """Fit and score several model kinds on the identical split.

    Kinds with free hyperparameters are tuned by GWO under the same config
    (hence the same seed); per-model failures become failed columns instead of
    aborting the run.
    """
    cfg = cfg or opt.GwoConfig()
    train, holdout = split(series, split_spec)
    columns = []
    for kind in kinds:
        try:
            params = {}
            if SEARCHABLE_PARAMS[kind]:
                outcome = opt.optimize(train, kind, cfg, accumulation=accumulation)
                params = outcome.params
            extra = {"accumulation": accumulation} if accumulation and kind == "ccfngbm" else {}
            model = make_model(kind, **params, **extra).fit(train)
            fitted = list(model.fitted_values())
            predicted = fitted + (list(model.predict(len(holdout))) if len(holdout) else [])
            report = evaluate_model(model, train, holdout if len(holdout) else None)
            columns.append(ModelColumn(
                kind=kind,
                predicted=[float(v) for v in predicted],
                fit_mape=report.fit_mape,
                holdout_mape=report.holdout_mape,
                hyperparams=params,
                model_doc=model_to_dict(model),
            ))
        except GreycastError as exc:
            columns.append(ModelColumn(kind=kind, predicted=None, fit_mape=None,
                                       holdout_mape=None, error=str(exc)))
    sort_key = lambda c: (c.holdout_mape is None and c.fit_mape is None,
                          c.holdout_mape if c.holdout_mape is not None
                          else (c.fit_mape if c.fit_mape is not None else float("inf")))
    columns.sort(key=sort_key)
    return ComparisonTable(
        periods=list(series.periods),
        actuals=[float(v) for v in series.values],
        train_len=split_spec.train_len,
        columns=columns,
    )
