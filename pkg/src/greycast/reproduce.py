"""Bundled case studies: fixed published hyperparameters and their targets.

Each case pins the hyperparameter triple reported for the bundled dataset and
re-runs the full pipeline under both accumulation families, reporting which
family lands closer to the published holdout column. The China case also
replays the first-order/constant-action estimation step (the GM reduction)
and extends the forecast to 2023.
"""

from __future__ import annotations

import numpy as np

from . import accumulation as acc
from .evaluation import evaluate_model
from .exceptions import GreycastError
from .models import CCFNGBM, GM, model_to_dict
from .series import SplitSpec, load_fixture, split

CASES = {
    "shanghai": {
        "fixture": "shanghai-diesel",
        "train_len": 16,
        "hyper": {"r": 0.6660, "alpha": 0.0958, "gamma": 6.0956},
        "published": {
            "holdout": [562.10, 546.77],
            "fit_mape": 3.66,
            "holdout_mape": 0.34,
        },
    },
    "germany": {
        "fixture": "germany-co2",
        "train_len": 9,
        "hyper": {"r": 1.6713, "alpha": 0.3242, "gamma": 0.9512},
        "published": {
            "holdout": [752.70, 743.96],
            "fit_mape": 1.52,
            "holdout_mape": 1.91,
        },
    },
    "china": {
        "fixture": "china-co2",
        "train_len": 17,
        "hyper": {"r": 0.938, "alpha": 0.3037, "gamma": 1.3164},
        "published": {
            "holdout": [9860.35, 9933.12],
            "fit_mape": 2.10,
            "holdout_mape": 1.33,
            "gm_reduction": {"a": -0.0439, "b": 5136.16},
            "forecast_2023": 10039.80,
        },
    },
}

#: Years the final-case forecast extends to, past the last observation.
CHINA_FORECAST_END = 2023


def run_case_mode(case: dict, accumulation: str, restore_mode: str):
    """Fit one accumulation mode of a case; returns (model, train, holdout)."""
    series = load_fixture(case["fixture"])
    spec = SplitSpec(case["train_len"], len(series) - case["train_len"])
    train, holdout = split(series, spec)
    model = CCFNGBM(**case["hyper"], accumulation=accumulation, restore=restore_mode)
    model.fit(train)
    return model, train, holdout


def reproduce_case(name: str, restore_mode: str = "exact-inverse") -> dict:
    """Run a bundled case under both accumulation families and score each."""
    try:
        case = CASES[name]
    except KeyError:
        valid = ", ".join(sorted(CASES))
        raise LookupError(f"unknown case {name!r}; valid names: {valid}") from None

    series = load_fixture(case["fixture"])
    published = case["published"]
    report = {
        "case": name,
        "fixture": case["fixture"],
        "train_len": case["train_len"],
        "hyperparams": dict(case["hyper"]),
        "published": published,
        "modes": {},
    }

    distances = {}
    for mode in acc.ACCUMULATION_KINDS:
        try:
            model, train, holdout = run_case_mode(case, mode, restore_mode)
            evaluation = evaluate_model(model, train, holdout)
            holdout_pred = [
                row["predicted"] for row in evaluation.per_point if row["stage"] == "holdout"
            ]
            # closeness to the published holdout column, as mean relative error
            target = np.asarray(published["holdout"], dtype=float)
            distance = float(np.mean(np.abs(np.asarray(holdout_pred) - target) / target))
            distances[mode] = distance
            report["modes"][mode] = {
                "model": model_to_dict(model),
                "evaluation": evaluation.to_dict(),
                "holdout_predicted": holdout_pred,
                "distance_to_published": distance,
            }
        except GreycastError as exc:
            report["modes"][mode] = {"error": str(exc)}
    if not distances:
        raise GreycastError(f"case {name!r}: both accumulation modes failed")
    report["best_mode"] = min(distances, key=distances.get)

    if name == "china":
        report["gm_reduction"] = _china_gm_reduction(case)
        report["forecast"] = _china_forecast(case, report["best_mode"], restore_mode)
    return report


def _china_gm_reduction(case: dict) -> dict:
    series = load_fixture(case["fixture"])
    train, _ = split(series, SplitSpec(case["train_len"], len(series) - case["train_len"]))
    gm = GM().fit(train)
    return {"a": gm.a_, "b": gm.b_, "published": case["published"]["gm_reduction"]}


def _china_forecast(case: dict, mode: str, restore_mode: str) -> dict:
    model, train, holdout = run_case_mode(case, mode, restore_mode)
    last_year = holdout.start_period + len(holdout) - 1
    horizon_past_data = CHINA_FORECAST_END - last_year
    predicted = model.predict(len(holdout) + horizon_past_data)
    rows = []
    for i, value in enumerate(predicted):
        k = model.train_len_ + 1 + i
        rows.append({
            "index": k,
            "period": holdout.start_period + i,
            "value": float(value),
        })
    return {
        "accumulation": mode,
        "published_final": case["published"]["forecast_2023"],
        "values": rows,
        # The source text assigns its first forecast-year value to the number
        # that the comparison table lists one index earlier; forecasts are
        # therefore reported by evaluation index k, with the period column
        # continuing the data years, and no alternative year mapping is chosen.
        "year_mapping_note": (
            "periods continue the observed years; the published 2020-2023 "
            "figures correspond to indices k=18..21 of the calibration window"
        ),
    }
