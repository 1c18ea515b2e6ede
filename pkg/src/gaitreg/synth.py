"""Deterministic synthetic gait generator.

Hip and knee angles are truncated Fourier series (3 harmonics) over gait
phase phi in [0, 1], sampled on a closed cycle (first and last sample both
at heel contact), with per-mode coefficient tables so the five modes are
genuinely different tasks.  Ankle targets are constructed from the hip and
knee states, which makes "ankle is predictable from hip/knee" true by
construction:

    theta_ankle = g_mode(theta_hip, theta_knee, dtheta_hip, dtheta_knee)
    tau_ankle   = stance_window(phi) * h_mode(same states)

g and h are fixed smooth maps (linear + product + sinusoid terms, scaled
per mode; tables below); stance_window ramps smoothly to zero before 60%
phase, so the moment is exactly zero in swing.  Per-trial duration and
amplitude jitter plus measurement noise come from the splitmix64 streams
in gaitreg.rng, seeded only from (seed, mode, trial index).

In linear_mode both targets are instead one global affine function of the
six pipeline features (filtered angles and their numerical derivatives,
default filter: order 4, 6 Hz cutoff), so an exact least-squares fit can
recover them to machine precision on noise-free data.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import pi
from pathlib import Path
import numpy as np

from .data import GaitDataset, GaitTrial, LocomotionMode, write_trial_csv
from .errors import ConfigError, PipelineError
from .preprocessing import ButterworthFilter, differentiate, lowpass_zero_phase
from .rng import SplitMix64, derive_seed

SYNTH_SAMPLE_RATE_HZ = 200.0

# fractional per-trial jitter of the harmonic amplitudes (a/b coefficients)
AMPLITUDE_JITTER = 0.04

DEFAULT_TRIALS_PER_MODE = {
    LocomotionMode.NormalWalk: 10,
    LocomotionMode.StairAscent: 8,
    LocomotionMode.StairDescent: 8,
    LocomotionMode.SlopeAscent: 8,
    LocomotionMode.SlopeDescent: 7,
}

# Fourier tables, degrees: (a0, (a1, a2, a3), (b1, b2, b3)) with
# theta(phi) = a0 + sum_k a_k cos(2 pi k phi) + b_k sin(2 pi k phi).
HIP_SHAPES = {
    LocomotionMode.NormalWalk: (8.0, (22.0, 3.0, 1.2), (6.0, -2.0, 0.8)),
    LocomotionMode.StairAscent: (20.0, (26.0, 5.0, 1.5), (2.0, -3.5, 1.0)),
    LocomotionMode.StairDescent: (-2.0, (14.0, 4.5, 0.8), (9.0, 1.5, 1.2)),
    LocomotionMode.SlopeAscent: (14.0, (24.0, 4.0, 1.0), (5.0, -2.5, 0.6)),
    LocomotionMode.SlopeDescent: (3.0, (15.0, 2.5, 0.9), (7.0, -1.0, 1.1)),
}

KNEE_SHAPES = {
    LocomotionMode.NormalWalk: (28.0, (-18.0, 9.0, 2.0), (14.0, 5.0, -1.5)),
    LocomotionMode.StairAscent: (42.0, (-26.0, 7.0, 2.5), (18.0, 2.5, -2.0)),
    LocomotionMode.StairDescent: (36.0, (-28.0, 12.0, 3.0), (4.0, 7.0, -2.5)),
    LocomotionMode.SlopeAscent: (32.0, (-21.0, 8.0, 1.8), (16.0, 4.0, -1.0)),
    LocomotionMode.SlopeDescent: (24.0, (-15.0, 11.0, 2.2), (9.0, 6.0, -1.8)),
}

# Ankle-angle map g, degrees:
#   g = c0 + c1*uh + c2*uk + c3*vh + c4*vk + c5*uh*uk + c6*sin(1.7*uh - 1.1*uk + c7)
# with dimensionless states uh = theta_hip/30, uk = theta_knee/40,
# vh = dtheta_hip/300, vk = dtheta_knee/400.
ANKLE_COEF = {
    LocomotionMode.NormalWalk: (-3.0, 6.0, -5.0, 2.5, -2.0, 3.5, 4.0, 0.3),
    LocomotionMode.StairAscent: (-2.5, 6.6, -5.5, 2.2, -2.2, 3.8, 4.4, 0.8),
    LocomotionMode.StairDescent: (-3.6, 5.4, -4.5, 2.8, -1.8, 3.2, 3.6, -0.2),
    LocomotionMode.SlopeAscent: (-2.8, 6.3, -5.2, 2.4, -2.1, 3.6, 4.2, 0.5),
    LocomotionMode.SlopeDescent: (-3.3, 5.7, -4.8, 2.6, -1.9, 3.3, 3.8, 0.0),
}

# Moment map h, newton-meters (before the stance window):
#   h = d0 + d1*uh + d2*uk + d3*vh + d4*vk + d5*uh*uk + d6*sin(1.3*uk + 0.9*uh + d7)
TAU_COEF = {
    LocomotionMode.NormalWalk: (-20.0, -10.0, 7.0, -4.0, 3.0, -6.0, 8.0, 0.4),
    LocomotionMode.StairAscent: (-22.0, -11.0, 7.7, -3.6, 3.3, -6.6, 8.8, 0.9),
    LocomotionMode.StairDescent: (-18.0, -9.0, 6.3, -4.4, 2.7, -5.4, 7.2, -0.1),
    LocomotionMode.SlopeAscent: (-21.0, -10.5, 7.4, -3.8, 3.2, -6.3, 8.4, 0.6),
    LocomotionMode.SlopeDescent: (-19.0, -9.5, 6.6, -4.2, 2.9, -5.7, 7.6, 0.1),
}

# linear_mode global affine map on the UNnormalized pipeline features
# [theta_hip, dtheta_hip, ddtheta_hip, theta_knee, dtheta_knee, ddtheta_knee]
LINEAR_WEIGHTS = np.array(
    [
        [0.30, 0.020, 0.0010, -0.25, -0.015, 0.0008],
        [-0.50, -0.030, -0.0020, 0.35, 0.020, -0.0010],
    ]
)
LINEAR_INTERCEPT = np.array([-3.0, -8.0])

# stance window: 1 until 45% phase, cosine ramp down, exactly 0 from 60%
STANCE_END = 0.6
RAMP_START = 0.45


@dataclass(frozen=True)
class SynthConfig:
    """Knobs of the generator; everything else is fixed by the tables above."""

    seed: int = 20240
    trials_per_mode: dict = field(default_factory=lambda: dict(DEFAULT_TRIALS_PER_MODE))
    samples_per_trial: int = 122
    noise_std_deg: float = 0.25
    speed_jitter: float = 0.05
    linear_mode: bool = False

    def __post_init__(self):
        counts = dict(self.trials_per_mode)
        for mode, count in counts.items():
            if not isinstance(mode, LocomotionMode):
                raise ConfigError(f"trials_per_mode key {mode!r} is not a LocomotionMode")
            if count < 1:
                raise ConfigError(f"trials_per_mode[{mode.name}] must be >= 1, got {count}")
        object.__setattr__(self, "trials_per_mode", counts)
        if self.samples_per_trial < 16:
            raise ConfigError(f"samples_per_trial must be >= 16, got {self.samples_per_trial}")
        if self.noise_std_deg < 0.0:
            raise ConfigError(f"noise_std_deg must be >= 0, got {self.noise_std_deg}")
        if not 0.0 <= self.speed_jitter < 0.5:
            raise ConfigError(f"speed_jitter must be in [0, 0.5), got {self.speed_jitter}")


def _series(phi: np.ndarray, shape) -> np.ndarray:
    a0, a, b = shape
    out = np.full_like(phi, a0)
    for k in range(1, 4):
        w = 2.0 * pi * k * phi
        out += a[k - 1] * np.cos(w) + b[k - 1] * np.sin(w)
    return out


def _series_dphi(phi: np.ndarray, shape) -> np.ndarray:
    _, a, b = shape
    out = np.zeros_like(phi)
    for k in range(1, 4):
        w = 2.0 * pi * k * phi
        out += 2.0 * pi * k * (-a[k - 1] * np.sin(w) + b[k - 1] * np.cos(w))
    return out


def _scaled_shape(shape, scale: float):
    a0, a, b = shape
    return (a0, tuple(scale * v for v in a), tuple(scale * v for v in b))


def stance_window(phi: np.ndarray) -> np.ndarray:
    """Smooth 1 -> 0 ramp over phase: 1 below 45%, exactly 0 from 60%."""
    phi = np.asarray(phi, dtype=np.float64)
    ramp = 0.5 * (1.0 + np.cos(pi * (phi - RAMP_START) / (STANCE_END - RAMP_START)))
    out = np.where(phi <= RAMP_START, 1.0, np.where(phi >= STANCE_END, 0.0, ramp))
    return out


def _ankle_maps(mode, hip, knee, hip_vel, knee_vel):
    uh = hip / 30.0
    uk = knee / 40.0
    vh = hip_vel / 300.0
    vk = knee_vel / 400.0
    c = ANKLE_COEF[mode]
    theta = (
        c[0]
        + c[1] * uh
        + c[2] * uk
        + c[3] * vh
        + c[4] * vk
        + c[5] * uh * uk
        + c[6] * np.sin(1.7 * uh - 1.1 * uk + c[7])
    )
    d = TAU_COEF[mode]
    tau = (
        d[0]
        + d[1] * uh
        + d[2] * uk
        + d[3] * vh
        + d[4] * vk
        + d[5] * uh * uk
        + d[6] * np.sin(1.3 * uk + 0.9 * uh + d[7])
    )
    return theta, tau


@dataclass(frozen=True)
class _TrialPlan:
    mode: LocomotionMode
    index: int
    n_samples: int
    hip_shape: tuple
    knee_shape: tuple


def _plan_trial(
    config: SynthConfig, mode: LocomotionMode, index: int
) -> tuple[_TrialPlan, SplitMix64]:
    # draw order per trial: duration, hip amplitude, knee amplitude, then noise
    stream = SplitMix64(derive_seed(config.seed, mode.value, index))
    u_dur, u_hip, u_knee = stream.uniform_block(3)
    n = int(round(config.samples_per_trial * (1.0 + config.speed_jitter * (2.0 * u_dur - 1.0))))
    n = max(16, n)
    plan = _TrialPlan(
        mode=mode,
        index=index,
        n_samples=n,
        hip_shape=_scaled_shape(HIP_SHAPES[mode], 1.0 + AMPLITUDE_JITTER * (2.0 * u_hip - 1.0)),
        knee_shape=_scaled_shape(KNEE_SHAPES[mode], 1.0 + AMPLITUDE_JITTER * (2.0 * u_knee - 1.0)),
    )
    return plan, stream


def _clean_states(plan: _TrialPlan):
    """Noise-free angles and analytic time-derivatives for one planned trial."""
    phi = np.linspace(0.0, 1.0, plan.n_samples)
    duration = (plan.n_samples - 1) / SYNTH_SAMPLE_RATE_HZ
    hip = _series(phi, plan.hip_shape)
    knee = _series(phi, plan.knee_shape)
    hip_vel = _series_dphi(phi, plan.hip_shape) / duration
    knee_vel = _series_dphi(phi, plan.knee_shape) / duration
    return phi, hip, knee, hip_vel, knee_vel


_LINEAR_FILTER = ButterworthFilter.design(6.0, SYNTH_SAMPLE_RATE_HZ, 4)


def _linear_targets(hip: np.ndarray, knee: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """linear_mode targets: global affine map of the pipeline features."""
    dt = 1.0 / SYNTH_SAMPLE_RATE_HZ
    hip_f = lowpass_zero_phase(hip, _LINEAR_FILTER)
    knee_f = lowpass_zero_phase(knee, _LINEAR_FILTER)
    hip_v = differentiate(hip_f, dt)
    knee_v = differentiate(knee_f, dt)
    features = np.column_stack(
        [hip_f, hip_v, differentiate(hip_v, dt), knee_f, knee_v, differentiate(knee_v, dt)]
    )
    targets = features @ LINEAR_WEIGHTS.T + LINEAR_INTERCEPT
    return targets[:, 0], targets[:, 1]


def _trial_ground_truth(config: SynthConfig, plan: _TrialPlan):
    phi, hip, knee, hip_vel, knee_vel = _clean_states(plan)
    if config.linear_mode:
        theta_ankle, tau_ankle = _linear_targets(hip, knee)
    else:
        theta_ankle, tau_ankle = _ankle_maps(plan.mode, hip, knee, hip_vel, knee_vel)
        tau_ankle = stance_window(phi) * tau_ankle
    return hip, knee, theta_ankle, tau_ankle


def _mode_list(config: SynthConfig) -> list[LocomotionMode]:
    return [m for m in LocomotionMode if config.trials_per_mode.get(m, 0) > 0]


def generate(config: SynthConfig) -> GaitDataset:
    """Generate the full dataset; identical config gives identical output."""
    trials = []
    for mode in _mode_list(config):
        for index in range(config.trials_per_mode[mode]):
            plan, stream = _plan_trial(config, mode, index)
            hip, knee, theta_ankle, tau_ankle = _trial_ground_truth(config, plan)
            if config.noise_std_deg > 0.0:
                noise = stream.normal_block(3 * plan.n_samples, 0.0, config.noise_std_deg)
                hip = hip + noise[: plan.n_samples]
                knee = knee + noise[plan.n_samples : 2 * plan.n_samples]
                theta_ankle = theta_ankle + noise[2 * plan.n_samples :]
            trials.append(
                GaitTrial(
                    trial_id=f"{mode.name}_{index:02d}",
                    mode=mode,
                    sample_rate_hz=SYNTH_SAMPLE_RATE_HZ,
                    theta_hip=hip,
                    theta_knee=knee,
                    theta_ankle=theta_ankle,
                    tau_ankle=tau_ankle,
                )
            )
    return GaitDataset(tuple(trials))


def ground_truth(trial_id: str, config: SynthConfig) -> tuple[np.ndarray, np.ndarray]:
    """Noise-free analytic (theta_ankle, tau_ankle) for a generated trial."""
    name, _, idx_str = trial_id.rpartition("_")
    try:
        mode = LocomotionMode[name]
        index = int(idx_str)
    except (KeyError, ValueError):
        raise PipelineError(f"unknown trial_id {trial_id!r}") from None
    if not 0 <= index < config.trials_per_mode.get(mode, 0):
        raise PipelineError(
            f"trial_id {trial_id!r} not produced by this config "
            f"({config.trials_per_mode.get(mode, 0)} trials for {mode.name})"
        )
    plan, _ = _plan_trial(config, mode, index)
    _, _, theta_ankle, tau_ankle = _trial_ground_truth(config, plan)
    return theta_ankle, tau_ankle


def export_dataset(config: SynthConfig, out_dir: str | Path) -> dict:
    """Write one CSV per trial plus a manifest; returns the manifest dict."""
    out_dir = Path(out_dir)
    dataset = generate(config)
    for trial in dataset:
        write_trial_csv(trial, out_dir / f"{trial.trial_id}.csv")
    manifest = {
        "seed": config.seed,
        "trial_ids": list(dataset.trial_ids),
        "modes": [t.mode.name for t in dataset],
        "total_rows": dataset.total_rows(),
    }
    return manifest
