"""Metrics, the leave-one-out driver, and report emission.

Scores are computed per held-out trial and then averaged within each
locomotion mode (matching error bars that show inter-trial spread), with
pooled-over-all-rows values reported alongside.  Phase-resolved mean
absolute error curves resample each trial's |error| onto a common 0..100%
grid before averaging across trials.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .baselines import (
    fit_svr_baseline,
    grid_search_svr,
    linear_fit,
    linear_predict,
    predict_svr_baseline,
)
from .config import RunConfig
from .data import GaitDataset, LocomotionMode, loo_splits
from .errors import ConfigError, MetricError, PipelineError
from .ioutil import atomic_write_text
from .mlp import forward, init, train
from .preprocessing import (
    ButterworthFilter,
    apply_normalization,
    fit_normalization,
    trial_features,
)
from .rng import derive_seed
from .svgplot import band_plot_svg

MODEL_SPECS = ("mlp", "linear", "svr")

TARGET_KEYS = ("theta", "tau")

STANCE_SWING_BOUNDARY = 60.0  # percent of the gait cycle


def r2_score(y: np.ndarray, y_pred: np.ndarray) -> float:
    """Coefficient of determination, 1 - SS_res / SS_tot."""
    y = np.asarray(y, dtype=np.float64).ravel()
    y_pred = np.asarray(y_pred, dtype=np.float64).ravel()
    if len(y) != len(y_pred) or len(y) < 2:
        raise MetricError(f"need two equal-length sequences of >= 2 values, got {len(y)}")
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0.0:
        raise MetricError("R^2 is undefined for a constant target sequence")
    return 1.0 - float(np.sum((y - y_pred) ** 2)) / ss_tot


def rmse(y: np.ndarray, y_pred: np.ndarray) -> float:
    y = np.asarray(y, dtype=np.float64).ravel()
    y_pred = np.asarray(y_pred, dtype=np.float64).ravel()
    if len(y) != len(y_pred) or len(y) < 1:
        raise MetricError(f"need two equal-length non-empty sequences, got {len(y)}")
    return float(np.sqrt(np.mean((y - y_pred) ** 2)))


@dataclass
class FoldResult:
    """Held-out metrics for one LOO fold; arrays absent on reloaded reports."""

    trial_id: str
    mode: str
    r2: dict[str, float]
    rmse: dict[str, float]
    phase: Optional[np.ndarray] = None
    y_true: Optional[np.ndarray] = None
    y_pred: Optional[np.ndarray] = None


def phase_mae_curve(
    folds: Sequence[FoldResult], n_bins: int = 101
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(grid, mae, se): per-bin mean |error| across trials with standard error.

    Each fold's |error| sequence is linearly resampled onto n_bins points
    spanning 0..100% phase; mae and se have shape (n_bins, 2) for the two
    targets.  With a single trial the standard error is zero.
    """
    if not folds:
        raise ConfigError("phase_mae_curve needs at least one fold")
    grid = np.linspace(0.0, 100.0, n_bins)
    per_trial = []
    for fold in folds:
        if fold.phase is None:
            raise ConfigError(f"fold {fold.trial_id} carries no sequences")
        err = np.abs(fold.y_pred - fold.y_true)
        per_trial.append(
            np.column_stack([np.interp(grid, fold.phase, err[:, t]) for t in range(2)])
        )
    stack = np.stack(per_trial)  # (n_trials, n_bins, 2)
    mae = stack.mean(axis=0)
    if len(folds) > 1:
        se = stack.std(axis=0, ddof=1) / np.sqrt(len(folds))
    else:
        se = np.zeros_like(mae)
    return grid, mae, se


@dataclass
class ModeSummary:
    n_trials: int
    r2_mean: dict[str, float]
    r2_sd: dict[str, float]
    rmse_mean: dict[str, float]
    rmse_sd: dict[str, float]
    phase_mae: dict[str, np.ndarray]  # keys theta, tau
    phase_se: dict[str, np.ndarray]


@dataclass
class EvalReport:
    config: dict
    model_spec: str
    folds: list[FoldResult]
    modes: dict[str, ModeSummary]
    pooled: dict[str, dict[str, float]]
    pooled_rows: int
    missing_modes: list[str]


def _fit_predict(
    model_spec: str, config: RunConfig, fold_idx: int, x_train, y_train, x_test, svr_params
):
    if model_spec == "mlp":
        model = init(config.layer_dims, derive_seed(config.init_seed, fold_idx))
        tcfg = config.train_config(shuffle_seed=derive_seed(config.shuffle_seed, fold_idx))
        train(model, x_train, y_train, tcfg)
        return forward(model, x_test)
    if model_spec == "linear":
        return linear_predict(linear_fit(x_train, y_train), x_test)
    if model_spec == "svr":
        c, epsilon, gamma = svr_params
        baseline = fit_svr_baseline(
            x_train,
            y_train,
            c=c,
            epsilon=epsilon,
            gamma=gamma,
            tol=config.svr_tol,
            max_updates=config.svr_max_updates,
        )
        return predict_svr_baseline(baseline, x_test)
    raise ConfigError(f"unknown model spec {model_spec!r}; choose from {MODEL_SPECS}")


def _run_fold(payload, fold_idx: int) -> FoldResult:
    dataset, blocks, pooled_params, model_spec, config, svr_params = payload
    held = dataset.trials[fold_idx]
    try:
        train_blocks = [b for t, b in enumerate(blocks) if t != fold_idx]
        x_raw = np.concatenate([b[0] for b in train_blocks])
        y_train = np.concatenate([b[1] for b in train_blocks])
        params = pooled_params if pooled_params is not None else fit_normalization(x_raw)
        x_train = apply_normalization(x_raw, params)
        x_test = apply_normalization(blocks[fold_idx][0], params)
        y_test = blocks[fold_idx][1]
        phase = blocks[fold_idx][2]
        y_pred = _fit_predict(
            model_spec, config, fold_idx, x_train, y_train, x_test, svr_params
        )
    except PipelineError as exc:
        raise type(exc)(f"fold {fold_idx} (held-out {held.trial_id!r}): {exc}") from None
    return FoldResult(
        trial_id=held.trial_id,
        mode=held.mode.name,
        r2={k: r2_score(y_test[:, t], y_pred[:, t]) for t, k in enumerate(TARGET_KEYS)},
        rmse={k: rmse(y_test[:, t], y_pred[:, t]) for t, k in enumerate(TARGET_KEYS)},
        phase=phase,
        y_true=y_test,
        y_pred=y_pred,
    )


def run_loocv(
    dataset: GaitDataset, model_spec: str, config: RunConfig, jobs: int = 1
) -> EvalReport:
    """Train/evaluate one model spec across every leave-one-out fold.

    Per-trial filtering is computed once and shared by all folds; min-max
    scaling is fitted per fold on the training trials only, or on the
    pooled data when config.paper_faithful_norm is set.  Results are
    deterministic for fixed seeds and independent of the job count.
    """
    if model_spec not in MODEL_SPECS:
        raise ConfigError(f"unknown model spec {model_spec!r}; choose from {MODEL_SPECS}")
    loo_splits(dataset)  # validates >= 2 trials
    base_filter = ButterworthFilter.design(
        config.cutoff_hz, dataset.trials[0].sample_rate_hz, config.filter_order
    )
    blocks = [trial_features(t, base_filter, config.filter_targets) for t in dataset]
    pooled_params = None
    if config.paper_faithful_norm:
        pooled_params = fit_normalization(np.concatenate([b[0] for b in blocks]))
    svr_params = (config.svr_c, config.svr_epsilon, config.svr_gamma)
    config_echo = config.to_dict()
    if model_spec == "svr" and config.svr_grid_c is not None:
        from .preprocessing import build_features

        svr_params = grid_search_svr(
            build_features(dataset, base_filter, filter_targets=config.filter_targets),
            config.svr_grid_c,
            config.svr_grid_epsilon,
            config.svr_grid_gamma,
            n_folds=config.svr_grid_folds,
            tol=config.svr_tol,
            max_updates=config.svr_max_updates,
        )
        # echo the effective hyperparameters the folds actually used
        config_echo["svr_c"], config_echo["svr_epsilon"], config_echo["svr_gamma"] = svr_params
    payload = (dataset, blocks, pooled_params, model_spec, config, svr_params)

    indices = range(len(dataset))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            folds = list(pool.map(_run_fold, [payload] * len(dataset), indices))
    else:
        folds = [_run_fold(payload, i) for i in indices]

    modes: dict[str, ModeSummary] = {}
    for mode in LocomotionMode:
        mode_folds = sorted(
            (f for f in folds if f.mode == mode.name), key=lambda f: f.trial_id
        )
        if not mode_folds:
            continue
        _, mae, se = phase_mae_curve(mode_folds, config.phase_bins)
        r2s = {k: np.array([f.r2[k] for f in mode_folds]) for k in TARGET_KEYS}
        rmses = {k: np.array([f.rmse[k] for f in mode_folds]) for k in TARGET_KEYS}
        ddof = 1 if len(mode_folds) > 1 else 0
        modes[mode.name] = ModeSummary(
            n_trials=len(mode_folds),
            r2_mean={k: float(v.mean()) for k, v in r2s.items()},
            r2_sd={k: float(v.std(ddof=ddof)) if len(v) > 1 else 0.0 for k, v in r2s.items()},
            rmse_mean={k: float(v.mean()) for k, v in rmses.items()},
            rmse_sd={k: float(v.std(ddof=ddof)) if len(v) > 1 else 0.0 for k, v in rmses.items()},
            phase_mae={k: mae[:, t] for t, k in enumerate(TARGET_KEYS)},
            phase_se={k: se[:, t] for t, k in enumerate(TARGET_KEYS)},
        )

    y_true_all = np.concatenate([f.y_true for f in folds])
    y_pred_all = np.concatenate([f.y_pred for f in folds])
    pooled = {
        "r2": {k: r2_score(y_true_all[:, t], y_pred_all[:, t]) for t, k in enumerate(TARGET_KEYS)},
        "rmse": {k: rmse(y_true_all[:, t], y_pred_all[:, t]) for t, k in enumerate(TARGET_KEYS)},
    }
    return EvalReport(
        config=config_echo,
        model_spec=model_spec,
        folds=folds,
        modes=modes,
        pooled=pooled,
        pooled_rows=dataset.total_rows(),
        missing_modes=[m.name for m in LocomotionMode if m.name not in modes],
    )


def report_to_dict(report: EvalReport) -> dict:
    return {
        "config": report.config,
        "model_spec": report.model_spec,
        "folds": [
            {"trial_id": f.trial_id, "mode": f.mode, "r2": f.r2, "rmse": f.rmse}
            for f in report.folds
        ],
        "modes": {
            name: {
                "n_trials": s.n_trials,
                "r2_mean": s.r2_mean,
                "r2_sd": s.r2_sd,
                "rmse_mean": s.rmse_mean,
                "rmse_sd": s.rmse_sd,
                "phase_mae": {
                    "theta": s.phase_mae["theta"].tolist(),
                    "tau": s.phase_mae["tau"].tolist(),
                    "se_theta": s.phase_se["theta"].tolist(),
                    "se_tau": s.phase_se["tau"].tolist(),
                },
            }
            for name, s in report.modes.items()
        },
        "pooled": report.pooled,
        "pooled_rows": report.pooled_rows,
        "missing_modes": report.missing_modes,
    }


def load_report(path: str | Path) -> EvalReport:
    """Rebuild an EvalReport from report.json (fold sequences are not stored)."""
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    modes = {}
    for name, s in data["modes"].items():
        modes[name] = ModeSummary(
            n_trials=s["n_trials"],
            r2_mean=s["r2_mean"],
            r2_sd=s["r2_sd"],
            rmse_mean=s["rmse_mean"],
            rmse_sd=s["rmse_sd"],
            phase_mae={
                "theta": np.asarray(s["phase_mae"]["theta"]),
                "tau": np.asarray(s["phase_mae"]["tau"]),
            },
            phase_se={
                "theta": np.asarray(s["phase_mae"]["se_theta"]),
                "tau": np.asarray(s["phase_mae"]["se_tau"]),
            },
        )
    return EvalReport(
        config=data["config"],
        model_spec=data["model_spec"],
        folds=[FoldResult(f["trial_id"], f["mode"], f["r2"], f["rmse"]) for f in data["folds"]],
        modes=modes,
        pooled=data["pooled"],
        pooled_rows=data["pooled_rows"],
        missing_modes=data["missing_modes"],
    )


def summary_csv_text(report: EvalReport) -> str:
    lines = ["mode,target,r2_mean,r2_sd,rmse_mean,rmse_sd"]
    for mode in LocomotionMode:
        summary = report.modes.get(mode.name)
        if summary is None:
            continue
        for key in TARGET_KEYS:
            lines.append(
                f"{mode.name},{key},{summary.r2_mean[key]!r},{summary.r2_sd[key]!r},"
                f"{summary.rmse_mean[key]!r},{summary.rmse_sd[key]!r}"
            )
    return "\n".join(lines) + "\n"


def emit_report(report: EvalReport, out_dir: str | Path) -> list[Path]:
    """Write report.json, summary.csv, and one phase-MAE SVG per mode/target."""
    out_dir = Path(out_dir)
    written = [
        atomic_write_text(
            out_dir / "report.json",
            json.dumps(report_to_dict(report), indent=2, sort_keys=True) + "\n",
        ),
        atomic_write_text(out_dir / "summary.csv", summary_csv_text(report)),
    ]
    units = {"theta": "MAE (deg)", "tau": "MAE (Nm)"}
    titles = {"theta": "ankle angle", "tau": "ankle moment"}
    for mode in LocomotionMode:
        summary = report.modes.get(mode.name)
        if summary is None:
            continue
        grid = np.linspace(0.0, 100.0, len(summary.phase_mae["theta"]))
        for key in TARGET_KEYS:
            svg = band_plot_svg(
                grid,
                summary.phase_mae[key],
                summary.phase_se[key],
                title=f"{mode.name}: {titles[key]} error vs gait phase",
                x_label="gait phase (%)",
                y_label=units[key],
                divider_x=STANCE_SWING_BOUNDARY,
            )
            written.append(atomic_write_text(out_dir / f"phase_mae_{mode.name}_{key}.svg", svg))
    return written
