"""Sliding-window lead-lag pipelines, shuffle null models, and baselines.

The core procedure: slide a window along the series, compute the signed
area (or the signature-derivative influence stream) per window, then
calibrate pointwise significance bands by re-running the identical pipeline
on per-channel time-shuffled copies of the raw data. Cross-correlation and
a VAR-based Granger measure are provided as the classical baselines the
signed-area statistic is contrasted against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .leadlag import _signed_area_xy
from .path_core import Path, PreprocessConfig, preprocess
from .signature import signature_derivative

__all__ = [
    "WindowSpec",
    "NullModelSpec",
    "Run",
    "SignificanceReport",
    "sliding_signed_area",
    "sliding_signature_derivative",
    "shuffle_channels",
    "mix_seed",
    "shuffle_null",
    "cross_correlation",
    "granger_var",
]

Statistic = Callable[[Path, Optional["WindowSpec"]], Tuple[np.ndarray, np.ndarray]]


@dataclass(frozen=True)
class WindowSpec:
    """Sliding window: length and stride, both in the path's time units."""

    length: float
    stride: float

    def __post_init__(self) -> None:
        if self.length <= 0:
            raise ValueError("window length must be > 0")
        if self.stride <= 0:
            raise ValueError("window stride must be > 0")


@dataclass(frozen=True)
class NullModelSpec:
    """Shuffle-null configuration.

    band_mode "gaussian" sets bands at mean +- band_sigmas * std; "quantile"
    uses the empirical two-sided quantiles at the matching normal coverage.
    min_run_length counts consecutive stride points.
    """

    replicates: int
    seed: int
    band_sigmas: float = 3.0
    min_run_length: int = 5
    band_mode: str = "gaussian"

    def __post_init__(self) -> None:
        if self.replicates < 2:
            raise ValueError("null model needs at least 2 replicates")
        if self.band_sigmas <= 0:
            raise ValueError("band_sigmas must be > 0")
        if self.min_run_length < 1:
            raise ValueError("min_run_length must be >= 1")
        if self.band_mode not in ("gaussian", "quantile"):
            raise ValueError(
                f"band_mode must be 'gaussian' or 'quantile', got {self.band_mode!r}"
            )


class Run(NamedTuple):
    """Maximal significant run: [start_time, end_time] with constant sign."""

    start: float
    end: float
    sign: int


@dataclass(frozen=True)
class SignificanceReport:
    """Observed statistic curve with null-model bands, mask, and runs."""

    statistic_name: str
    pair: Optional[Tuple[int, int]]
    times: np.ndarray
    observed: np.ndarray
    null_mean: np.ndarray
    null_std: np.ndarray
    band_lo: np.ndarray
    band_hi: np.ndarray
    significant_mask: np.ndarray
    runs: Tuple[Run, ...]
    replicates: int
    seed: int
    band_sigmas: float
    band_mode: str
    min_run_length: int

    def __post_init__(self) -> None:
        n = self.times.size
        for name in ("observed", "null_mean", "null_std", "band_lo", "band_hi",
                     "significant_mask"):
            arr = getattr(self, name)
            if arr.shape != (n,):
                raise ValueError(f"{name} must have shape ({n},)")

    def to_dict(self) -> dict:
        return {
            "statistic": self.statistic_name,
            "pair": list(self.pair) if self.pair else None,
            "times": self.times.tolist(),
            "observed": self.observed.tolist(),
            "null_mean": self.null_mean.tolist(),
            "null_std": self.null_std.tolist(),
            "band_lo": self.band_lo.tolist(),
            "band_hi": self.band_hi.tolist(),
            "significant": [bool(b) for b in self.significant_mask],
            "runs": [
                {"start": r.start, "end": r.end, "sign": r.sign} for r in self.runs
            ],
            "replicates": self.replicates,
            "seed": self.seed,
            "band_sigmas": self.band_sigmas,
            "band_mode": self.band_mode,
            "min_run_length": self.min_run_length,
        }


# -- window machinery --------------------------------------------------------


def _uniform_dt(a: Path) -> Optional[float]:
    if a.n_samples < 2:
        return None
    return float(a.times[1] - a.times[0]) if a.is_uniform() else None


def _index_windows(a: Path, dt: float, w: WindowSpec) -> Tuple[np.ndarray, np.ndarray]:
    """Sample-aligned windows on a uniform grid.

    Window length snaps to round(length/dt) segments and each start on the
    stride grid snaps to its nearest sample. Returns (start, end) sample
    index arrays; end - start is constant.
    """
    n_seg = int(round(w.length / dt))
    if n_seg < 1:
        raise ValueError("window is shorter than the sample spacing")
    last_start = a.n_samples - 1 - n_seg
    if last_start < 0:
        raise ValueError("window is longer than the series")
    m = np.arange(int(np.floor(last_start * dt / w.stride + 1e-9)) + 2)
    k1 = np.rint(m * w.stride / dt).astype(int)
    k1 = np.unique(k1[k1 <= last_start])
    return k1, k1 + n_seg


def _time_windows(a: Path, w: WindowSpec) -> List[Tuple[float, float]]:
    """Window boundaries on the stride grid for non-uniform sampling."""
    t0 = float(a.times[0])
    t_end = float(a.times[-1])
    tol = 1e-9 * max(1.0, a.duration)
    if w.length > a.duration + tol:
        raise ValueError("window is longer than the series")
    bounds = []
    m = 0
    while True:
        ws = t0 + m * w.stride
        we = ws + w.length
        if we > t_end + tol:
            break
        bounds.append((ws, min(we, t_end)))
        m += 1
    return bounds


def _window_slice(
    a: Path, channel: int, ws: float, we: float
) -> np.ndarray:
    """Channel values of the window restriction, interpolating boundaries."""
    times = a.times
    col = a.channel(channel)
    lo = int(np.searchsorted(times, ws, side="left"))
    hi = int(np.searchsorted(times, we, side="right"))
    parts = []
    if lo == hi or times[lo] > ws:
        parts.append([np.interp(ws, times, col)])
    parts.append(col[lo:hi])
    if hi == lo or times[hi - 1] < we:
        parts.append([np.interp(we, times, col)])
    return np.concatenate(parts)


def sliding_signed_area(
    a: Path, pair: Tuple[int, int], w: WindowSpec
) -> Tuple[np.ndarray, np.ndarray]:
    """Signed area of (i, j) over each sliding window, about the window start.

    Windows start on the stride grid and are stamped at their centers. On a
    uniform grid both length and starts snap to the sample grid and every
    window is evaluated in O(1) from prefix sums; otherwise the window
    restriction (with interpolated boundary samples) is evaluated directly.
    """
    i, j = pair
    x = a.channel(i)
    y = a.channel(j)
    dt = _uniform_dt(a)
    if dt is not None:
        k1, k2 = _index_windows(a, dt, w)
        dx = np.diff(x)
        dy = np.diff(y)
        cross = np.concatenate([[0.0], np.cumsum(x[:-1] * dy - y[:-1] * dx)])
        core = cross[k2] - cross[k1]
        areas = 0.5 * (
            core - x[k1] * (y[k2] - y[k1]) + y[k1] * (x[k2] - x[k1])
        )
        centers = 0.5 * (a.times[k1] + a.times[k2])
        return centers, areas
    bounds = _time_windows(a, w)
    if not bounds:
        raise ValueError("window is longer than the series")
    centers = np.array([0.5 * (ws + we) for ws, we in bounds])
    areas = np.array(
        [
            _signed_area_xy(
                _window_slice(a, i, ws, we), _window_slice(a, j, ws, we)
            )
            for ws, we in bounds
        ]
    )
    return centers, areas


def sliding_signature_derivative(
    a: Path, pair: Tuple[int, int], w: Optional[WindowSpec] = None
) -> Tuple[np.ndarray, np.ndarray]:
    """Influence stream gamma_i * gamma_j', pointwise or window-averaged.

    With w = None this is exactly signature_derivative. Otherwise each
    window's value is the segment-width-weighted mean of the stream over
    the segments inside the window (on non-uniform grids, segments lying
    entirely inside), stamped at the window center.
    """
    i, j = pair
    mid_times, stream = signature_derivative(a, i, j)
    if w is None:
        return mid_times, stream
    widths = np.diff(a.times)
    weighted = np.concatenate([[0.0], np.cumsum(stream * widths)])
    span = np.concatenate([[0.0], np.cumsum(widths)])
    dt = _uniform_dt(a)
    if dt is not None:
        k1, k2 = _index_windows(a, dt, w)
    else:
        bounds = _time_windows(a, w)
        if not bounds:
            raise ValueError("window is longer than the series")
        k1 = np.searchsorted(a.times, [ws for ws, _ in bounds], side="left")
        k2 = np.searchsorted(a.times, [we for _, we in bounds], side="right") - 1
        keep = k2 > k1
        k1, k2 = k1[keep], k2[keep]
        if k1.size == 0:
            raise ValueError("no window contains a full segment")
    values = (weighted[k2] - weighted[k1]) / (span[k2] - span[k1])
    centers = 0.5 * (a.times[k1] + a.times[k2])
    return centers, values


# -- shuffle null model -------------------------------------------------------

_MASK64 = (1 << 64) - 1
_GOLDEN64 = 0x9E3779B97F4A7C15


def mix_seed(seed: int, replicate: int) -> int:
    """SplitMix64 mix of (seed, replicate) -> the replicate's own 64-bit seed.

    A fixed bijective finalizer, so replicate seeds are reproducible and
    order-independent: replicates may run in any schedule.
    """
    x = (int(seed) + (replicate + 1) * _GOLDEN64) & _MASK64
    x ^= x >> 30
    x = (x * 0xBF58476D1CE4E5B9) & _MASK64
    x ^= x >> 27
    x = (x * 0x94D049BB133111EB) & _MASK64
    x ^= x >> 31
    return x


def shuffle_channels(a: Path, derived_seed: int) -> Path:
    """Independently permute each channel's samples (Fisher-Yates).

    Destroys temporal structure while preserving each channel's value
    multiset; the time grid is untouched.
    """
    rng = np.random.default_rng(derived_seed)
    shuffled = np.empty_like(a.values)
    for c in range(a.n_channels):
        shuffled[:, c] = a.values[rng.permutation(a.n_samples), c]
    return a.with_values(shuffled)


def shuffle_null(
    a: Path,
    statistic: Statistic,
    spec: NullModelSpec,
    w: Optional[WindowSpec] = None,
    preprocess_cfg: Optional[PreprocessConfig] = None,
    statistic_name: str = "statistic",
    pair: Optional[Tuple[int, int]] = None,
) -> SignificanceReport:
    """Calibrate the statistic against per-channel time-shuffled replicates.

    The shuffle acts on the raw samples of a; each replicate then passes
    through the identical pipeline (preprocessing, including smoothing, then
    the statistic over windows w). Replicate r draws its own generator from
    mix_seed(spec.seed, r), and curves are reduced with numpy's pairwise
    mean/std, so the report is a pure function of (input, spec) regardless
    of execution schedule.
    """

    def pipeline(p: Path) -> Tuple[np.ndarray, np.ndarray]:
        if preprocess_cfg is not None:
            p = preprocess(p, preprocess_cfg)
        return statistic(p, w)

    times, observed = pipeline(a)
    curves = np.empty((spec.replicates, observed.size))
    for r in range(spec.replicates):
        _, curve = pipeline(shuffle_channels(a, mix_seed(spec.seed, r)))
        if curve.size != observed.size:
            raise ValueError("statistic changed length under shuffling")
        curves[r] = curve
    null_mean = curves.mean(axis=0)
    null_std = curves.std(axis=0)
    if spec.band_mode == "gaussian":
        band_lo = null_mean - spec.band_sigmas * null_std
        band_hi = null_mean + spec.band_sigmas * null_std
    else:
        # empirical quantiles at the two-sided coverage of +-k sigma
        p_lo = 0.5 * math.erfc(spec.band_sigmas / math.sqrt(2.0))
        band_lo = np.quantile(curves, p_lo, axis=0)
        band_hi = np.quantile(curves, 1.0 - p_lo, axis=0)
    above = observed > band_hi
    below = observed < band_lo
    mask = above | below
    runs = _significant_runs(times, above, below, spec.min_run_length)
    return SignificanceReport(
        statistic_name=statistic_name,
        pair=pair,
        times=times,
        observed=observed,
        null_mean=null_mean,
        null_std=null_std,
        band_lo=band_lo,
        band_hi=band_hi,
        significant_mask=mask,
        runs=runs,
        replicates=spec.replicates,
        seed=spec.seed,
        band_sigmas=spec.band_sigmas,
        band_mode=spec.band_mode,
        min_run_length=spec.min_run_length,
    )


def _significant_runs(
    times: np.ndarray,
    above: np.ndarray,
    below: np.ndarray,
    min_run_length: int,
) -> Tuple[Run, ...]:
    """Maximal constant-sign excursions of length >= min_run_length."""
    sign = np.zeros(times.size, dtype=int)
    sign[above] = 1
    sign[below] = -1
    runs: List[Run] = []
    start = 0
    for k in range(1, times.size + 1):
        if k == times.size or sign[k] != sign[start]:
            if sign[start] != 0 and k - start >= min_run_length:
                runs.append(
                    Run(float(times[start]), float(times[k - 1]), int(sign[start]))
                )
            start = k
    return tuple(runs)


# -- classical baselines ------------------------------------------------------


def cross_correlation(
    a: Path, pair: Tuple[int, int], max_lag: float
) -> Tuple[np.ndarray, np.ndarray]:
    """Unbiased cross-correlation r(t_d) of channels (i, j) over lags.

    Discretization of r(t_d) = 1/(T - t_d) * integral gamma_i(t)
    gamma_j(t - t_d) dt with zero padding outside the domain: the sum over
    the overlap divided by the overlap sample count (so lag 0 with i = j is
    exactly the mean of gamma_i^2, and negative lags are treated
    symmetrically). A positive peak lag means channel j leads channel i by
    that much. Requires uniform sampling and |max_lag| < duration.
    """
    i, j = pair
    x = a.channel(i)
    y = a.channel(j)
    dt = _uniform_dt(a)
    if dt is None:
        raise ValueError("cross_correlation requires a uniform time grid")
    if not 0 < max_lag < a.duration:
        raise ValueError("max_lag must lie in (0, duration)")
    t = x.size
    d_max = int(np.floor(max_lag / dt + 1e-9))
    lags = np.arange(-d_max, d_max + 1)
    r = np.empty(lags.size)
    for pos, d in enumerate(lags):
        if d >= 0:
            s = float(np.dot(x[d:], y[: t - d]))
        else:
            s = float(np.dot(x[: t + d], y[-d:]))
        r[pos] = s / (t - abs(d))
    return lags * dt, r


def granger_var(
    a: Path, caused: int, covariates: Sequence[int], order: int
) -> float:
    """Granger measure C = ln(var restricted / var full) for one channel.

    Fits two VAR(order) models by OLS with intercept and compares the
    caused channel's residual variances: the full model regresses on lags
    of every channel, the restricted one only on lags of the caused channel
    and the given covariates. Large C means the omitted channels carry
    predictive information about the caused channel.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    if _uniform_dt(a) is None:
        raise ValueError("granger_var requires a uniform time grid")
    n = a.n_channels
    a.channel(caused)
    restricted = sorted({caused} | {int(c) for c in covariates})
    for c in restricted:
        a.channel(c)
    if len(restricted) == n:
        raise ValueError("covariates span all channels; no candidate cause left")
    if a.n_samples <= n * order + 5:
        raise ValueError(
            f"need more than {n * order + 5} samples for order {order}, "
            f"got {a.n_samples}"
        )
    var_full = _residual_variance(a.values, list(range(1, n + 1)), caused, order)
    var_restricted = _residual_variance(a.values, restricted, caused, order)
    if var_full == 0.0:
        return 0.0 if var_restricted == 0.0 else math.inf
    return float(np.log(var_restricted / var_full))


def _residual_variance(
    values: np.ndarray, channels: Sequence[int], caused: int, order: int
) -> float:
    t = values.shape[0]
    cols = [c - 1 for c in channels]
    blocks = [np.ones((t - order, 1))]
    for k in range(1, order + 1):
        blocks.append(values[order - k : t - k][:, cols])
    design = np.hstack(blocks)
    target = values[order:, caused - 1]
    beta, _, rank, _ = np.linalg.lstsq(design, target, rcond=None)
    if rank < design.shape[1]:
        raise ValueError("singular design matrix in VAR fit")
    resid = target - design @ beta
    return float(np.var(resid))
