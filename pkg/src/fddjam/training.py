"""Downlink training: pilot design, received signal, MMSE estimation, MSE.

The user terminal receives, over a block of ``L`` training symbols,

    y = sqrt(L * P_bs) * pilots^H @ h + sqrt(L * P_jam) * jamming^H @ g + noise

where ``h`` is the base-station channel, ``g`` the jammer channel and the
noise is white complex Gaussian. Pilot and jamming blocks both have
orthonormal columns (equal power per symbol). The MMSE channel estimate and
its error statistics follow in closed form from the joint Gaussian model;
Monte-Carlo evaluation is provided as an independent check.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .channel import ChannelCovariance
from .linalg import (
    as_complex_matrix,
    as_complex_vector,
    haar_orthonormal_columns,
    require_orthonormal_columns,
    sample_complex_gaussian,
    solve_hpd,
)
from .tolerances import MSE_NEGATIVE_FLOOR

if TYPE_CHECKING:
    from .jammer import JammingMatrix

__all__ = [
    "ESTIMATOR_MODES",
    "PILOT_DESIGNS",
    "EstimationOutcome",
    "MonteCarloMse",
    "PilotMatrix",
    "TrainingConfig",
    "closed_form_mse",
    "empirical_mse",
    "estimate_covariance",
    "mmse_estimate",
    "optimal_pilots",
    "random_unitary_pilots",
    "received_signal",
    "scenario_closed_form_mse",
    "unaware_closed_form_mse",
    "worst_case_pilots",
]

PILOT_DESIGNS = ("optimal", "worst-case", "random-unitary")

# "jammer-aware" matches the closed-form error statistics; "jammer-unaware"
# builds the estimator without the jamming statistics (model mismatch).
ESTIMATOR_MODES = ("jammer-aware", "jammer-unaware")


@dataclass(frozen=True)
class PilotMatrix:
    """Unitary-column pilot block transmitted by the base station.

    ``matrix`` has shape (num_bs_antennas, pilot_length) with orthonormal
    columns; ``design`` records how it was constructed.
    """

    matrix: np.ndarray
    design: str

    def __post_init__(self) -> None:
        if self.design not in PILOT_DESIGNS:
            raise ValueError(
                f"unknown pilot design {self.design!r}; expected one of {PILOT_DESIGNS}"
            )
        m = as_complex_matrix(self.matrix, name="pilot matrix").copy()
        require_orthonormal_columns(m, name="pilot matrix")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def num_antennas(self) -> int:
        return self.matrix.shape[0]

    @property
    def length(self) -> int:
        return self.matrix.shape[1]


@dataclass(frozen=True)
class TrainingConfig:
    """Scalar parameters of one training scenario.

    Powers are given in dB relative to the noise variance: the linear powers
    are ``noise_variance * 10 ** (db / 10)``. ``noise_variance = 0`` is
    accepted as a noiseless testing mode; the dB values are then read against
    a unit reference instead. ``jammer_correlation`` defaults to
    ``bs_correlation`` when left unset.
    """

    num_bs_antennas: int
    num_jammer_antennas: int
    pilot_length: int
    bs_power_db: float
    jammer_power_db: float
    noise_variance: float = 1.0
    bs_correlation: float = 0.0
    jammer_correlation: float | None = None

    def __post_init__(self) -> None:
        for field in ("num_bs_antennas", "num_jammer_antennas", "pilot_length"):
            value = getattr(self, field)
            if int(value) != value or value < 1:
                raise ValueError(f"{field} must be a positive integer, got {value!r}")
        if self.pilot_length > self.num_bs_antennas:
            raise ValueError(
                f"pilot_length {self.pilot_length} exceeds "
                f"num_bs_antennas {self.num_bs_antennas}"
            )
        if self.noise_variance < 0:
            raise ValueError(f"noise_variance must be >= 0, got {self.noise_variance}")
        if not 0.0 <= self.bs_correlation <= 1.0:
            raise ValueError(
                f"bs_correlation must lie in [0, 1], got {self.bs_correlation}"
            )
        if self.jammer_correlation is None:
            object.__setattr__(self, "jammer_correlation", float(self.bs_correlation))
        elif not 0.0 <= self.jammer_correlation <= 1.0:
            raise ValueError(
                f"jammer_correlation must lie in [0, 1], got {self.jammer_correlation}"
            )

    @property
    def bs_power(self) -> float:
        """Base-station training power in linear units."""
        return _db_to_linear(self.bs_power_db, self.noise_variance)

    @property
    def jammer_power(self) -> float:
        """Jammer transmit power in linear units."""
        return _db_to_linear(self.jammer_power_db, self.noise_variance)


def _db_to_linear(power_db: float, noise_variance: float) -> float:
    reference = noise_variance if noise_variance > 0 else 1.0
    return reference * 10.0 ** (power_db / 10.0)


@dataclass(frozen=True)
class EstimationOutcome:
    """Channel estimate, error vector and squared error norm for one trial."""

    estimate: np.ndarray
    error: np.ndarray
    squared_error: float

    @classmethod
    def from_truth(cls, channel, estimate) -> "EstimationOutcome":
        h = as_complex_vector(channel, name="channel")
        est = as_complex_vector(estimate, name="estimate")
        if h.shape != est.shape:
            raise ValueError(f"shape mismatch: channel {h.shape}, estimate {est.shape}")
        error = h - est
        return cls(
            estimate=est,
            error=error,
            squared_error=float(np.vdot(error, error).real),
        )


@dataclass(frozen=True)
class MonteCarloMse:
    """Sample mean of the per-antenna squared error and its standard error.

    ``std_error`` is zero when fewer than two trials were run.
    """

    mean: float
    std_error: float
    trials: int


def _check_pilot_length(pilot_length: int, num_antennas: int) -> None:
    if int(pilot_length) != pilot_length or not 1 <= pilot_length <= num_antennas:
        raise ValueError(
            f"pilot_length must lie in [1, {num_antennas}], got {pilot_length!r}"
        )


def optimal_pilots(bs_cov: ChannelCovariance, pilot_length: int) -> PilotMatrix:
    """Pilots spanning the strongest eigenvectors of the BS channel covariance.

    This is the MSE-minimizing unitary pilot design in the absence of a
    jammer: the columns are the first ``pilot_length`` eigenvectors in
    descending-eigenvalue order (deterministic tie-break).
    """
    _check_pilot_length(pilot_length, bs_cov.size)
    return PilotMatrix(bs_cov.evd.eigenvectors[:, :pilot_length], design="optimal")


def worst_case_pilots(bs_cov: ChannelCovariance, pilot_length: int) -> PilotMatrix:
    """Pilots spanning the weakest eigenvectors: the MSE-maximizing benchmark."""
    _check_pilot_length(pilot_length, bs_cov.size)
    start = bs_cov.size - pilot_length
    return PilotMatrix(bs_cov.evd.eigenvectors[:, start:], design="worst-case")


def random_unitary_pilots(
    num_antennas: int, pilot_length: int, rng: np.random.Generator
) -> PilotMatrix:
    """Haar-random orthonormal pilot columns (baseline design)."""
    _check_pilot_length(pilot_length, num_antennas)
    return PilotMatrix(
        haar_orthonormal_columns(num_antennas, pilot_length, rng),
        design="random-unitary",
    )


def _check_dimensions(
    pilots: PilotMatrix,
    jamming: "JammingMatrix | None",
    bs_cov: ChannelCovariance,
    jam_cov: ChannelCovariance | None,
    cfg: TrainingConfig,
) -> None:
    if pilots.num_antennas != cfg.num_bs_antennas or pilots.length != cfg.pilot_length:
        raise ValueError(
            f"pilot matrix shape {pilots.matrix.shape} does not match config "
            f"({cfg.num_bs_antennas} antennas, {cfg.pilot_length} symbols)"
        )
    if bs_cov.size != cfg.num_bs_antennas:
        raise ValueError(
            f"BS covariance size {bs_cov.size} does not match "
            f"num_bs_antennas {cfg.num_bs_antennas}"
        )
    if jamming is not None:
        if jam_cov is None:
            raise ValueError("jam_cov is required when a jamming matrix is given")
        if jamming.num_antennas != cfg.num_jammer_antennas:
            raise ValueError(
                f"jamming matrix has {jamming.num_antennas} antennas, config "
                f"says {cfg.num_jammer_antennas}"
            )
        if jamming.length != pilots.length:
            raise ValueError(
                f"jamming block length {jamming.length} does not match "
                f"pilot length {pilots.length}"
            )
        if jam_cov.size != cfg.num_jammer_antennas:
            raise ValueError(
                f"jammer covariance size {jam_cov.size} does not match "
                f"num_jammer_antennas {cfg.num_jammer_antennas}"
            )


def received_signal(
    pilots: PilotMatrix,
    jamming: "JammingMatrix | None",
    channel,
    jam_channel,
    cfg: TrainingConfig,
    rng: np.random.Generator,
) -> np.ndarray:
    """Synthesize one received training block at the user terminal.

    Returns the length-``pilot_length`` vector described in the module
    docstring. The jamming term is omitted when ``jamming`` is None
    (``jam_channel`` may then also be None). Noise is always drawn from
    ``rng`` and scaled by ``sqrt(noise_variance)``, so a zero noise variance
    yields the exact noiseless signal while keeping stream usage uniform.
    """
    h = as_complex_vector(channel, name="channel")
    if h.size != pilots.num_antennas:
        raise ValueError(
            f"channel length {h.size} does not match {pilots.num_antennas} BS antennas"
        )
    if pilots.num_antennas != cfg.num_bs_antennas or pilots.length != cfg.pilot_length:
        raise ValueError(
            f"pilot matrix shape {pilots.matrix.shape} does not match config "
            f"({cfg.num_bs_antennas} antennas, {cfg.pilot_length} symbols)"
        )
    length = pilots.length
    y = np.sqrt(length * cfg.bs_power) * (pilots.matrix.conj().T @ h)
    if jamming is not None:
        g = as_complex_vector(jam_channel, name="jammer channel")
        if jamming.length != length:
            raise ValueError(
                f"jamming block length {jamming.length} does not match "
                f"pilot length {length}"
            )
        if g.size != jamming.num_antennas or jamming.num_antennas != cfg.num_jammer_antennas:
            raise ValueError(
                f"jammer channel length {g.size} does not match "
                f"{cfg.num_jammer_antennas} jammer antennas"
            )
        y = y + np.sqrt(length * cfg.jammer_power) * (jamming.matrix.conj().T @ g)
    noise = np.sqrt(cfg.noise_variance * 0.5) * (
        rng.standard_normal(length) + 1j * rng.standard_normal(length)
    )
    return y + noise


def _pilot_cross_cov(pilots: PilotMatrix, bs_cov: ChannelCovariance, cfg: TrainingConfig) -> np.ndarray:
    """Covariance between the channel and the received block, shape (M, L)."""
    return np.sqrt(pilots.length * cfg.bs_power) * (bs_cov.matrix @ pilots.matrix)


def _received_cov(
    pilots: PilotMatrix,
    jamming: "JammingMatrix | None",
    bs_cov: ChannelCovariance,
    jam_cov: ChannelCovariance | None,
    cfg: TrainingConfig,
    include_jamming: bool,
) -> np.ndarray:
    """Covariance of the received block, with or without the jamming term."""
    length = pilots.length
    gram = pilots.matrix.conj().T @ bs_cov.matrix @ pilots.matrix
    cov = (length * cfg.bs_power) * gram + cfg.noise_variance * np.eye(length)
    if include_jamming and jamming is not None:
        z = jamming.matrix
        cov = cov + (length * cfg.jammer_power) * (z.conj().T @ jam_cov.matrix @ z)
    return 0.5 * (cov + cov.conj().T)


def estimate_covariance(
    pilots: PilotMatrix,
    jamming: "JammingMatrix | None",
    bs_cov: ChannelCovariance,
    jam_cov: ChannelCovariance | None,
    cfg: TrainingConfig,
) -> np.ndarray:
    """Covariance of the MMSE channel estimate.

    Computed through a positive-definite solve (the inverse is never formed).
    The result is Hermitian PSD, and the estimation-error covariance
    ``bs_cov.matrix - estimate_covariance(...)`` is PSD as well.

    Raises ``numpy.linalg.LinAlgError`` when the inner matrix is singular,
    which requires a zero noise variance together with a rank-deficient
    pilot/covariance combination.
    """
    _check_dimensions(pilots, jamming, bs_cov, jam_cov, cfg)
    if cfg.bs_power <= 0:
        raise ValueError("BS training power must be positive for estimation")
    length = pilots.length
    cross = pilots.matrix.conj().T @ bs_cov.matrix  # (L, M)
    inner = cross @ pilots.matrix
    if jamming is not None:
        z = jamming.matrix
        inner = inner + (cfg.jammer_power / cfg.bs_power) * (
            z.conj().T @ jam_cov.matrix @ z
        )
    inner = inner + (cfg.noise_variance / (length * cfg.bs_power)) * np.eye(length)
    inner = 0.5 * (inner + inner.conj().T)
    solved = solve_hpd(inner, cross)
    est_cov = cross.conj().T @ solved
    return 0.5 * (est_cov + est_cov.conj().T)


def closed_form_mse(estimate_cov, bs_cov: ChannelCovariance) -> float:
    """Average per-antenna estimation MSE from the estimate covariance.

    Equals ``trace(bs_cov - estimate_cov) / num_antennas``; with the
    unit-diagonal covariance normalization the value lies in [0, 1].

    Raises ``ArithmeticError`` if the trace difference is negative beyond
    round-off tolerance (an internal-consistency failure).
    """
    est = as_complex_matrix(estimate_cov, name="estimate covariance")
    if est.shape != bs_cov.matrix.shape:
        raise ValueError(
            f"estimate covariance shape {est.shape} does not match "
            f"channel covariance shape {bs_cov.matrix.shape}"
        )
    value = float((np.trace(bs_cov.matrix) - np.trace(est)).real) / bs_cov.size
    if value < MSE_NEGATIVE_FLOOR:
        raise ArithmeticError(
            f"closed-form MSE {value:.3e} is negative beyond tolerance"
        )
    return min(max(value, 0.0), 1.0)


def _mmse_filter(
    pilots: PilotMatrix,
    jamming: "JammingMatrix | None",
    bs_cov: ChannelCovariance,
    jam_cov: ChannelCovariance | None,
    cfg: TrainingConfig,
    estimator_mode: str,
) -> np.ndarray:
    """Linear estimator matrix ``A`` such that the estimate is ``A @ received``."""
    if estimator_mode not in ESTIMATOR_MODES:
        raise ValueError(
            f"unknown estimator mode {estimator_mode!r}; expected one of {ESTIMATOR_MODES}"
        )
    cross = _pilot_cross_cov(pilots, bs_cov, cfg)
    model_cov = _received_cov(
        pilots, jamming, bs_cov, jam_cov, cfg,
        include_jamming=estimator_mode == "jammer-aware",
    )
    return solve_hpd(model_cov, cross.conj().T).conj().T


def mmse_estimate(
    received,
    pilots: PilotMatrix,
    jamming: "JammingMatrix | None",
    bs_cov: ChannelCovariance,
    jam_cov: ChannelCovariance | None,
    cfg: TrainingConfig,
    estimator_mode: str = "jammer-aware",
) -> np.ndarray:
    """MMSE estimate of the BS channel from one received training block.

    In ``jammer-unaware`` mode the filter is built without the jamming
    statistics even when a jammer is present in the signal (model mismatch);
    ``jammer-aware`` is the mode matching the closed-form error statistics.
    """
    _check_dimensions(pilots, jamming, bs_cov, jam_cov, cfg)
    y = as_complex_vector(received, name="received")
    if y.size != pilots.length:
        raise ValueError(
            f"received block length {y.size} does not match pilot length {pilots.length}"
        )
    return _mmse_filter(pilots, jamming, bs_cov, jam_cov, cfg, estimator_mode) @ y


def unaware_closed_form_mse(
    pilots: PilotMatrix,
    jamming: "JammingMatrix | None",
    bs_cov: ChannelCovariance,
    jam_cov: ChannelCovariance | None,
    cfg: TrainingConfig,
) -> float:
    """Closed-form MSE of the jammer-unaware (mismatched) estimator.

    The filter ignores the jamming statistics while the received signal still
    contains them, so under strong jamming the value can exceed one (it is
    the exact error of a suboptimal linear estimator, not an MMSE).
    """
    _check_dimensions(pilots, jamming, bs_cov, jam_cov, cfg)
    a = _mmse_filter(pilots, jamming, bs_cov, jam_cov, cfg, "jammer-unaware")
    cross = _pilot_cross_cov(pilots, bs_cov, cfg)
    true_cov = _received_cov(pilots, jamming, bs_cov, jam_cov, cfg, include_jamming=True)
    t = a @ cross.conj().T
    err_cov = bs_cov.matrix - t - t.conj().T + a @ true_cov @ a.conj().T
    value = float(np.trace(err_cov).real) / bs_cov.size
    if value < MSE_NEGATIVE_FLOOR:
        raise ArithmeticError(
            f"closed-form MSE {value:.3e} is negative beyond tolerance"
        )
    return max(value, 0.0)


def scenario_closed_form_mse(
    pilots: PilotMatrix,
    jamming: "JammingMatrix | None",
    bs_cov: ChannelCovariance,
    jam_cov: ChannelCovariance | None,
    cfg: TrainingConfig,
    estimator_mode: str = "jammer-aware",
) -> float:
    """Closed-form MSE for a pilot / jamming / estimator combination."""
    if estimator_mode == "jammer-aware":
        return closed_form_mse(
            estimate_covariance(pilots, jamming, bs_cov, jam_cov, cfg), bs_cov
        )
    if estimator_mode == "jammer-unaware":
        return unaware_closed_form_mse(pilots, jamming, bs_cov, jam_cov, cfg)
    raise ValueError(
        f"unknown estimator mode {estimator_mode!r}; expected one of {ESTIMATOR_MODES}"
    )


def empirical_mse(
    pilots: PilotMatrix,
    jamming: "JammingMatrix | None",
    bs_cov: ChannelCovariance,
    jam_cov: ChannelCovariance | None,
    cfg: TrainingConfig,
    *,
    trials: int,
    rng: np.random.Generator,
    estimator_mode: str = "jammer-aware",
    chunk_size: int = 4096,
) -> MonteCarloMse:
    """Monte-Carlo estimate of the per-antenna channel-estimation MSE.

    Draws independent channel, jammer-channel and noise realizations, runs
    the (possibly mismatched) MMSE estimator and averages the squared error
    norm over ``trials`` trials. Trials are generated in fixed-size chunks,
    each from its own stream spawned off ``rng``, so the result depends only
    on the generator state, ``trials`` and ``chunk_size`` and not on how
    chunks are scheduled. The mean uses numpy's pairwise summation.
    """
    if int(trials) != trials or trials < 1:
        raise ValueError(f"trials must be a positive integer, got {trials!r}")
    _check_dimensions(pilots, jamming, bs_cov, jam_cov, cfg)
    a = _mmse_filter(pilots, jamming, bs_cov, jam_cov, cfg, estimator_mode)
    length = pilots.length
    bs_gain = np.sqrt(length * cfg.bs_power) * pilots.matrix.conj().T
    jam_gain = None
    if jamming is not None:
        jam_gain = np.sqrt(length * cfg.jammer_power) * jamming.matrix.conj().T
    noise_scale = np.sqrt(cfg.noise_variance * 0.5)
    m = cfg.num_bs_antennas

    trials = int(trials)
    per_trial = np.empty(trials)
    n_chunks = -(-trials // int(chunk_size))
    start = 0
    for stream in rng.spawn(n_chunks):
        k = min(int(chunk_size), trials - start)
        h = sample_complex_gaussian(bs_cov.evd, stream, size=k)
        y = bs_gain @ h
        if jam_gain is not None:
            g = sample_complex_gaussian(jam_cov.evd, stream, size=k)
            y = y + jam_gain @ g
        y = y + noise_scale * (
            stream.standard_normal((length, k)) + 1j * stream.standard_normal((length, k))
        )
        err = h - a @ y
        per_trial[start : start + k] = (np.abs(err) ** 2).sum(axis=0) / m
        start += k
    mean = float(per_trial.mean())
    std_error = float(per_trial.std(ddof=1) / np.sqrt(trials)) if trials > 1 else 0.0
    return MonteCarloMse(mean=mean, std_error=std_error, trials=trials)
