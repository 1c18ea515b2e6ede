"""Signal preprocessing: low-pass filtering, differentiation, scaling.

The input vector fed to every regressor is, per time step,

    [theta_hip, dtheta_hip, ddtheta_hip, theta_knee, dtheta_knee, ddtheta_knee]

built by low-pass filtering the measured angles, differentiating the
filtered hip/knee angles twice, and min-max scaling each column to the
training fold's [0, 1] range.  Targets stay in degrees and newton-meters.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from math import cos, pi, sin, tan
from typing import Optional

import numpy as np

from .data import GaitDataset, GaitTrial
from .errors import ConfigError, PreprocessError

N_FEATURES = 6

FEATURE_NAMES = (
    "theta_hip",
    "dtheta_hip",
    "ddtheta_hip",
    "theta_knee",
    "dtheta_knee",
    "ddtheta_knee",
)

TARGET_NAMES = ("theta_ankle", "tau_ankle")


@dataclass(frozen=True)
class ButterworthFilter:
    """Low-pass Butterworth cascade of second-order sections.

    Sections are (b0, b1, b2, a1, a2) with a0 normalized to 1, derived by
    the bilinear transform with the cutoff pre-warped so the -3 dB point
    lands exactly on cutoff_hz.  Odd orders append one first-order section
    (b2 = a2 = 0).
    """

    order: int
    cutoff_hz: float
    sample_rate_hz: float
    sections: tuple[tuple[float, float, float, float, float], ...]

    @classmethod
    def design(
        cls, cutoff_hz: float = 6.0, sample_rate_hz: float = 200.0, order: int = 4
    ) -> "ButterworthFilter":
        if order < 1:
            raise ConfigError(f"filter order must be >= 1, got {order}")
        if not 0.0 < cutoff_hz < sample_rate_hz / 2.0:
            raise ConfigError(
                f"cutoff {cutoff_hz} Hz must lie in (0, {sample_rate_hz / 2.0}) "
                f"for sample rate {sample_rate_hz} Hz"
            )
        fs = float(sample_rate_hz)
        wc = 2.0 * fs * tan(pi * cutoff_hz / fs)  # pre-warped analog cutoff, rad/s
        k = 2.0 * fs
        sections = []
        for m in range(order // 2):
            # conjugate analog pole pair: s^2 + a1a*s + wc^2, a1a = 2*wc*sin(phi)
            phi = (2 * m + 1) * pi / (2 * order)
            a1a = 2.0 * wc * sin(phi)
            den0 = k * k + a1a * k + wc * wc
            sections.append(
                (
                    wc * wc / den0,
                    2.0 * wc * wc / den0,
                    wc * wc / den0,
                    (2.0 * wc * wc - 2.0 * k * k) / den0,
                    (k * k - a1a * k + wc * wc) / den0,
                )
            )
        if order % 2:
            den0 = k + wc
            sections.append((wc / den0, wc / den0, 0.0, (wc - k) / den0, 0.0))
        filt = cls(order, float(cutoff_hz), fs, tuple(sections))
        filt._validate()
        return filt

    def _validate(self):
        for i, (b0, b1, b2, a1, a2) in enumerate(self.sections):
            poles = np.roots([1.0, a1, a2])
            if np.any(np.abs(poles) >= 1.0):
                raise ConfigError(f"section {i} is unstable: pole magnitudes {np.abs(poles)}")
        dc = self.magnitude(0.0)
        if abs(dc - 1.0) > 1e-9:
            raise ConfigError(f"cascade DC gain {dc} deviates from 1")

    def with_sample_rate(self, sample_rate_hz: float) -> "ButterworthFilter":
        if sample_rate_hz == self.sample_rate_hz:
            return self
        return ButterworthFilter.design(self.cutoff_hz, sample_rate_hz, self.order)

    def magnitude(self, freq_hz: float) -> float:
        """Single-pass |H| of the cascade at a digital frequency."""
        w = 2.0 * pi * freq_hz / self.sample_rate_hz
        z = complex(cos(w), -sin(w))  # z^-1 on the unit circle
        h = 1.0 + 0.0j
        for b0, b1, b2, a1, a2 in self.sections:
            h *= (b0 + b1 * z + b2 * z * z) / (1.0 + a1 * z + a2 * z * z)
        return abs(h)


def _sosfilt(sections, x: np.ndarray) -> np.ndarray:
    """Apply the cascade causally (direct form II transposed).

    Each section starts in its step-response steady state for the first
    input sample, so a constant signal passes through exactly unchanged.
    """
    y = np.array(x, dtype=np.float64)
    for b0, b1, b2, a1, a2 in sections:
        gain = (b0 + b1 + b2) / (1.0 + a1 + a2)
        s1 = (gain - b0) * y[0]
        s2 = (b2 - a2 * gain) * y[0]
        out = np.empty_like(y)
        for i, xi in enumerate(y):
            yi = b0 * xi + s1
            s1 = b1 * xi - a1 * yi + s2
            s2 = b2 * xi - a2 * yi
            out[i] = yi
        y = out
    return y


def lowpass_zero_phase(signal: np.ndarray, filt: ButterworthFilter) -> np.ndarray:
    """Zero-phase low-pass: pad, filter forward, reverse, filter, reverse, trim.

    Edges are handled by reflection (edge sample included) of length
    3 * order on each side, removed after the two passes.
    """
    x = np.asarray(signal, dtype=np.float64)
    pad = 3 * filt.order
    if x.ndim != 1 or len(x) < pad:
        raise PreprocessError(
            f"signal of length {len(x)} too short to filter; need >= {pad} (3 x order)"
        )
    start = x[pad - 1 :: -1] if pad else x[:0]
    end = x[: len(x) - pad - 1 : -1]
    padded = np.concatenate([start, x, end])
    y = _sosfilt(filt.sections, padded)
    y = _sosfilt(filt.sections, y[::-1])[::-1]
    return y[pad : pad + len(x)]


def differentiate(signal: np.ndarray, dt: float) -> np.ndarray:
    """Central differences inside, one-sided first-order at the two ends."""
    x = np.asarray(signal, dtype=np.float64)
    if len(x) < 3:
        raise PreprocessError(f"need at least 3 samples to differentiate, got {len(x)}")
    if not dt > 0.0:
        raise PreprocessError(f"dt must be positive, got {dt}")
    return np.gradient(x, dt, edge_order=1)


@dataclass(frozen=True)
class NormalizationParams:
    """Per-column min/max fitted on training rows only."""

    mins: np.ndarray
    maxs: np.ndarray

    def __post_init__(self):
        mins = np.asarray(self.mins, dtype=np.float64)
        maxs = np.asarray(self.maxs, dtype=np.float64)
        if mins.shape != maxs.shape or mins.ndim != 1:
            raise ConfigError("mins and maxs must be 1-D arrays of equal length")
        if np.any(maxs < mins):
            raise ConfigError("max < min in normalization parameters")
        object.__setattr__(self, "mins", mins)
        object.__setattr__(self, "maxs", maxs)

    @property
    def degenerate(self) -> np.ndarray:
        """Mask of constant (zero-range) columns."""
        return self.maxs == self.mins


def fit_normalization(rows: np.ndarray) -> NormalizationParams:
    rows = np.asarray(rows, dtype=np.float64)
    if rows.ndim != 2 or rows.shape[0] < 2:
        raise PreprocessError(f"need a 2-D matrix with >= 2 rows, got shape {rows.shape}")
    return NormalizationParams(rows.min(axis=0), rows.max(axis=0))


def apply_normalization(rows: np.ndarray, params: NormalizationParams) -> np.ndarray:
    """(x - min) / (max - min) per column; out-of-range values are NOT clamped.

    Degenerate (constant) columns map to 0.0 everywhere.
    """
    rows = np.asarray(rows, dtype=np.float64)
    if rows.ndim != 2 or rows.shape[1] != len(params.mins):
        raise PreprocessError(
            f"expected shape (n, {len(params.mins)}), got {rows.shape}"
        )
    span = params.maxs - params.mins
    safe = np.where(params.degenerate, 1.0, span)
    out = (rows - params.mins) / safe
    out[:, params.degenerate] = 0.0
    return out


def invert_normalization(rows: np.ndarray, params: NormalizationParams) -> np.ndarray:
    """Inverse of apply_normalization on non-degenerate columns."""
    rows = np.asarray(rows, dtype=np.float64)
    span = params.maxs - params.mins
    safe = np.where(params.degenerate, 1.0, span)
    out = rows * safe + params.mins
    out[:, params.degenerate] = params.mins[params.degenerate]
    return out


def spectral_energy_fraction(
    signal: np.ndarray, sample_rate_hz: float, threshold_hz: float
) -> float:
    """Fraction of squared DFT magnitude at (folded) frequencies <= threshold.

    The mean is removed first.  The transform is a direct O(n^2) DFT; the
    sequences here are a few hundred samples, so clarity wins over an FFT.
    """
    x = np.asarray(signal, dtype=np.float64)
    if len(x) < 8:
        raise PreprocessError(f"need at least 8 samples, got {len(x)}")
    nyquist = sample_rate_hz / 2.0
    if threshold_hz > nyquist:
        warnings.warn(
            f"threshold {threshold_hz} Hz above Nyquist {nyquist} Hz; returning 1.0",
            stacklevel=2,
        )
        return 1.0
    x = x - x.mean()
    n = len(x)
    k = np.arange(n)
    dft = np.exp(-2j * np.pi * np.outer(k, k) / n) @ x
    power = np.abs(dft) ** 2
    folded_hz = np.minimum(k, n - k) * (sample_rate_hz / n)
    total = power.sum()
    if total == 0.0:
        return 1.0
    return float(power[folded_hz <= threshold_hz].sum() / total)


@dataclass(frozen=True)
class FeatureDataset:
    """Row-per-timestep features and targets with trial bookkeeping.

    inputs:   (n, 6) normalized feature matrix
    targets:  (n, 2) [theta_ankle_deg, tau_ankle_Nm], never normalized
    phase:    (n,) gait phase, linear 0..100 within each trial
    trial_ids / trial_slices: contiguous row blocks, one per trial
    norm_params: the min-max parameters the inputs were scaled with
    """

    inputs: np.ndarray
    targets: np.ndarray
    phase: np.ndarray
    trial_ids: tuple[str, ...]
    trial_slices: tuple[tuple[int, int], ...]
    norm_params: NormalizationParams

    @property
    def n_rows(self) -> int:
        return self.inputs.shape[0]

    @property
    def trial_index(self) -> np.ndarray:
        """Per-row trial_id (expanded from the block bookkeeping)."""
        out = np.empty(self.n_rows, dtype=object)
        for tid, (s, e) in zip(self.trial_ids, self.trial_slices):
            out[s:e] = tid
        return out

    def rows_of(self, trial_id: str) -> slice:
        for tid, (s, e) in zip(self.trial_ids, self.trial_slices):
            if tid == trial_id:
                return slice(s, e)
        raise KeyError(f"trial {trial_id!r} not in feature dataset")


def trial_features(
    trial: GaitTrial, filt: ButterworthFilter, filter_targets: bool = True
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Unnormalized (inputs, targets, phase) for a single trial."""
    filt = filt.with_sample_rate(trial.sample_rate_hz)
    dt = 1.0 / trial.sample_rate_hz
    hip = lowpass_zero_phase(trial.theta_hip, filt)
    knee = lowpass_zero_phase(trial.theta_knee, filt)
    hip_v = differentiate(hip, dt)
    hip_a = differentiate(hip_v, dt)
    knee_v = differentiate(knee, dt)
    knee_a = differentiate(knee_v, dt)
    inputs = np.column_stack([hip, hip_v, hip_a, knee, knee_v, knee_a])
    if filter_targets:
        ankle = lowpass_zero_phase(trial.theta_ankle, filt)
        tau = lowpass_zero_phase(trial.tau_ankle, filt)
    else:
        ankle = np.asarray(trial.theta_ankle, dtype=np.float64)
        tau = np.asarray(trial.tau_ankle, dtype=np.float64)
    targets = np.column_stack([ankle, tau])
    phase = np.linspace(0.0, 100.0, trial.n_samples)
    return inputs, targets, phase


def build_features(
    dataset: GaitDataset,
    filt: ButterworthFilter,
    params: Optional[NormalizationParams] = None,
    filter_targets: bool = True,
) -> FeatureDataset:
    """Assemble the feature matrix for a dataset.

    With params=None the min-max range is fitted on these rows (training
    use); passing fitted params transforms held-out trials, whose values
    may then fall outside [0, 1].
    """
    blocks = [trial_features(t, filt, filter_targets) for t in dataset]
    inputs = np.concatenate([b[0] for b in blocks])
    targets = np.concatenate([b[1] for b in blocks])
    phase = np.concatenate([b[2] for b in blocks])
    slices = []
    start = 0
    for b in blocks:
        slices.append((start, start + len(b[2])))
        start += len(b[2])
    if params is None:
        params = fit_normalization(inputs)
    return FeatureDataset(
        inputs=apply_normalization(inputs, params),
        targets=targets,
        phase=phase,
        trial_ids=dataset.trial_ids,
        trial_slices=tuple(slices),
        norm_params=params,
    )
