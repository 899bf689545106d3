"""Single trials and seeded ensembles of the system-identification benchmark.

A trial generates one input/noise realization, synthesizes the desired signal
through the (possibly switching) true path, and advances every selected
algorithm over the identical sample stream, recording normalized misalignment
per iteration.  An ensemble averages the per-iteration dB traces over trials.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import lfilter

from apsabench.audio import load_wav
from apsabench.echo_path import PathSchedule, path_at
from apsabench.filters import STEPPERS, FilterParams, FilterState
from apsabench.signals import (
    NoiseModel,
    SeededStream,
    ar1_colored,
    bernoulli_gaussian,
    scale_to_ratio,
    signal_power,
    white_gaussian,
)

# Substream layout: the echo path draws from stream 0 (shared by all trials,
# so every trial identifies the same system); per-trial streams use
# 4*trial + role, which never collides with 0.
PATH_STREAM = 0
_INPUT_ROLE = 1
_BACKGROUND_ROLE = 2
_IMPULSE_ROLE = 3

MISALIGNMENT_FLOOR_DB = -300.0

INPUT_KINDS = ("white", "ar1", "wav")


def trial_stream(base_seed: int, trial_index: int, role: int) -> SeededStream:
    return SeededStream(base_seed, 4 * trial_index + role)


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a run needs; algorithms share one realization per trial."""

    params: FilterParams
    schedule: PathSchedule
    algorithms: tuple[str, ...] = ("apsa", "mip-apsa", "bs-mip-apsa")
    input_kind: str = "ar1"
    pole: float = 0.8
    wav_path: str | None = None
    noise: NoiseModel = field(default_factory=NoiseModel)
    iterations: int = 100_000
    trials: int = 10
    base_seed: int = 1
    normalize_path: bool = True  # how the schedule's taps were drawn, for the manifest echo

    def __post_init__(self) -> None:
        if self.iterations < 1:
            raise ValueError(f"iterations must be >= 1, got {self.iterations}")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if not self.algorithms:
            raise ValueError("at least one algorithm must be selected")
        for name in self.algorithms:
            if name not in STEPPERS:
                raise ValueError(
                    f"unknown algorithm '{name}'; choose from {sorted(STEPPERS)}"
                )
        if len(set(self.algorithms)) != len(self.algorithms):
            raise ValueError("algorithm list contains duplicates")
        if self.input_kind not in INPUT_KINDS:
            raise ValueError(
                f"unknown input kind '{self.input_kind}'; choose from {INPUT_KINDS}"
            )
        if self.input_kind == "wav" and not self.wav_path:
            raise ValueError("input kind 'wav' requires wav_path")
        if self.schedule.initial.length != self.params.filter_length:
            raise ValueError(
                f"echo path length ({self.schedule.initial.length}) must equal "
                f"filter_length ({self.params.filter_length})"
            )


@dataclass
class MisalignmentTrace:
    """Per-algorithm misalignment in dB, one entry per iteration.

    Entry n is the misalignment of the weights entering iteration n, measured
    against the true path active at n; entry 0 is therefore always 0 dB for a
    zero-initialized filter.
    """

    traces: dict[str, np.ndarray]
    iterations: int
    trials: int


def misalignment_db(true_taps: np.ndarray, estimated: np.ndarray) -> float:
    """Normalized misalignment 10*log10(|h - h_est|^2 / |h|^2), floored.

    The floor (-300 dB) stands in for minus infinity when the estimate is
    exact, keeping traces finite and serializable.
    """
    diff = true_taps - estimated
    num = float(diff @ diff)
    den = float(true_taps @ true_taps)
    if den == 0.0:
        raise ValueError("true path has zero norm; misalignment is undefined")
    if num == 0.0:
        return MISALIGNMENT_FLOOR_DB
    return max(10.0 * math.log10(num / den), MISALIGNMENT_FLOOR_DB)


def _input_signal(config: ExperimentConfig, stream: SeededStream) -> np.ndarray:
    n = config.iterations
    if config.input_kind == "white":
        return white_gaussian(n, 1.0, stream)
    if config.input_kind == "ar1":
        return ar1_colored(n, config.pole, stream)
    samples = load_wav(config.wav_path)
    if samples.shape[0] < n:
        raise ValueError(
            f"{config.wav_path}: {samples.shape[0]} samples, but the run needs "
            f"{n}; shorten the run or supply a longer file"
        )
    return samples[:n]


def _clean_echo(x: np.ndarray, schedule: PathSchedule) -> np.ndarray:
    """Noiseless echo x * h(n), honoring the path switch mid-record."""
    clean = lfilter(schedule.initial.taps, [1.0], x)
    k = schedule.switch_iteration
    if k is not None and k < x.shape[0]:
        switched = lfilter(schedule.switched.taps, [1.0], x)
        clean = np.concatenate([clean[: max(k, 0)], switched[max(k, 0) :]])
    return clean


def _noise_record(
    clean: np.ndarray, noise: NoiseModel, base_seed: int, trial_index: int
) -> np.ndarray:
    # Components with zero empirical power are added as-is (zeros), and a
    # zero-power clean record (possible in runs shorter than the bulk delay)
    # leaves the raw sigmas uncalibrated: both make the target ratio undefined.
    n = clean.shape[0]
    clean_power = signal_power(clean)
    v = np.zeros(n)
    background = white_gaussian(
        n, noise.background_sigma, trial_stream(base_seed, trial_index, _BACKGROUND_ROLE)
    )
    if signal_power(background) > 0.0:
        if noise.snr_db is not None and clean_power > 0.0:
            background = scale_to_ratio(clean, background, noise.snr_db)
        v += background
    impulses = bernoulli_gaussian(
        n,
        noise.impulse_probability,
        noise.impulse_sigma,
        trial_stream(base_seed, trial_index, _IMPULSE_ROLE),
    )
    if signal_power(impulses) > 0.0:
        if noise.sir_db is not None and clean_power > 0.0:
            impulses = scale_to_ratio(clean, impulses, noise.sir_db)
        v += impulses
    return v


def run_trial(config: ExperimentConfig, trial_index: int) -> MisalignmentTrace:
    """One realization: every selected algorithm sees the same x and y."""
    x = _input_signal(config, trial_stream(config.base_seed, trial_index, _INPUT_ROLE))
    clean = _clean_echo(x, config.schedule)
    y = clean + _noise_record(clean, config.noise, config.base_seed, trial_index)

    schedule = config.schedule
    params = config.params
    traces: dict[str, np.ndarray] = {}
    for name in config.algorithms:
        stepper = STEPPERS[name]
        state = FilterState.zeros(params)
        trace = np.empty(config.iterations)
        for i in range(config.iterations):
            trace[i] = misalignment_db(path_at(schedule, i).taps, state.weights)
            stepper(state, params, x[i], y[i])
        traces[name] = trace
    return MisalignmentTrace(traces=traces, iterations=config.iterations, trials=1)


def run_ensemble(config: ExperimentConfig) -> MisalignmentTrace:
    """Mean over trials of the per-iteration dB traces, in trial order."""
    totals = {name: np.zeros(config.iterations) for name in config.algorithms}
    for t in range(config.trials):
        trial = run_trial(config, t)
        for name in config.algorithms:
            totals[name] += trial.traces[name]
    traces = {name: totals[name] / config.trials for name in config.algorithms}
    return MisalignmentTrace(
        traces=traces, iterations=config.iterations, trials=config.trials
    )
