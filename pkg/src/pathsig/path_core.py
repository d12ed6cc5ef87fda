"""Sampled multivariate paths and the path-level operations on them.

A Path is a piecewise-linear interpolant of T samples of an N-channel
series: strictly increasing times, a T x N value array, and channel names.
All downstream integrals (signatures, signed areas) are exact over the
linear segments, so concatenation, inversion and reduction here are exact
operations on vertex sequences.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, Tuple

import numpy as np

__all__ = [
    "Path",
    "PreprocessConfig",
    "concat",
    "inverse",
    "reduce_path",
    "one_variation",
    "reparametrize",
    "preprocess",
    "gaussian_smooth",
]

#: relative tolerance for deciding a time grid is uniform
_UNIFORM_RTOL = 1e-8


@dataclass(frozen=True)
class Path:
    """Timestamped N-channel polygonal path.

    times: shape (T,), strictly increasing, arbitrary units.
    values: shape (T, N), row t is the path position at times[t].
    channel_names: N labels; generated as c1..cN when omitted.
    """

    times: np.ndarray
    values: np.ndarray
    channel_names: Tuple[str, ...] = ()

    def __post_init__(self) -> None:
        t = np.ascontiguousarray(self.times, dtype=float)
        v = np.ascontiguousarray(self.values, dtype=float)
        if t.ndim != 1 or t.size < 1:
            raise ValueError("times must be a 1-d array with at least one sample")
        if v.ndim != 2 or v.shape[0] != t.size:
            raise ValueError(
                f"values must be (T, N) with T={t.size}, got shape {v.shape}"
            )
        if not np.all(np.isfinite(t)) or not np.all(np.isfinite(v)):
            raise ValueError("times and values must be finite")
        if t.size > 1 and not np.all(np.diff(t) > 0):
            raise ValueError("times must be strictly increasing")
        names = tuple(self.channel_names)
        if not names:
            names = tuple(f"c{k + 1}" for k in range(v.shape[1]))
        if len(names) != v.shape[1]:
            raise ValueError(
                f"{len(names)} channel names for {v.shape[1]} channels"
            )
        t.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "channel_names", names)

    @property
    def n_samples(self) -> int:
        return self.times.size

    @property
    def n_channels(self) -> int:
        return self.values.shape[1]

    @property
    def duration(self) -> float:
        return float(self.times[-1] - self.times[0])

    def channel(self, i: int) -> np.ndarray:
        """Values of 1-based channel i (letters of signature words)."""
        if not 1 <= i <= self.n_channels:
            raise ValueError(f"channel {i} outside [1, {self.n_channels}]")
        return self.values[:, i - 1]

    def is_uniform(self) -> bool:
        """True when the time grid is uniform to relative tolerance 1e-8."""
        if self.n_samples < 3:
            return True
        dt = np.diff(self.times)
        return bool(np.max(np.abs(dt - dt[0])) <= _UNIFORM_RTOL * abs(dt[0]))

    def with_values(self, values: np.ndarray) -> "Path":
        return Path(self.times, values, self.channel_names)


@dataclass(frozen=True)
class PreprocessConfig:
    """Preprocessing recipe; defaults are the identity (all steps off).

    normalize: "per" rescales each channel to range sup-inf = 1, "global"
    divides every channel by the largest channel range, "none" leaves scales
    alone. The steps run in the fixed order smoothing -> centering ->
    normalization -> origin prepend.
    """

    smooth_sigma: float = 0.0
    center: bool = False
    normalize: str = "none"
    prepend_zero: bool = False

    def __post_init__(self) -> None:
        if self.smooth_sigma < 0:
            raise ValueError("smooth_sigma must be >= 0")
        if self.normalize not in ("per", "global", "none"):
            raise ValueError(
                f"normalize must be 'per', 'global' or 'none', got {self.normalize!r}"
            )

    def is_identity(self) -> bool:
        return (
            self.smooth_sigma == 0.0
            and not self.center
            and self.normalize == "none"
            and not self.prepend_zero
        )


def concat(a: Path, b: Path) -> Path:
    """Concatenate two paths, translating b so its start meets a's end.

    b's time axis is shifted to continue a's; the duplicate junction sample
    is merged away.
    """
    if a.n_channels != b.n_channels:
        raise ValueError(
            f"channel-count mismatch: {a.n_channels} vs {b.n_channels}"
        )
    if b.n_samples == 1:
        return a
    # offset first: when b already starts at a's end the shift is exactly
    # zero and b's increments survive bit for bit (x + 0.0 == x)
    offset = a.values[-1] - b.values[0]
    shifted_values = b.values[1:] + offset
    shifted_times = a.times[-1] + (b.times[1:] - b.times[0])
    return Path(
        np.concatenate([a.times, shifted_times]),
        np.vstack([a.values, shifted_values]),
        a.channel_names,
    )


def inverse(a: Path) -> Path:
    """The path run backwards: values reversed, times negated and reversed.

    The increments of the result are exactly the reversed increments of the
    input, and inverse(inverse(a)) reproduces a bit for bit (IEEE negation
    is exact). The interval moves from [t0, tE] to [-tE, -t0], which is
    immaterial downstream by reparametrization invariance.
    """
    return Path(-a.times[::-1], a.values[::-1], a.channel_names)


def _exact_backtrack(d1: np.ndarray, d2: np.ndarray) -> bool:
    """True when segment d2 runs exactly opposite to d1 along the same ray."""
    if float(np.dot(d1, d2)) >= 0.0:
        return False
    # colinearity must hold exactly: every 2x2 cross term vanishes
    return bool(np.array_equal(np.outer(d1, d2), np.outer(d2, d1)))


def reduce_path(a: Path) -> Path:
    """Cancel exact backtracks until the polygonal path is irreducible.

    Removes zero-displacement samples and any vertex pattern that retraces
    the previous segment along the same ray (fully, partially, or
    overshooting past its start). Only exact cancellations count: noisy
    near-backtracks are left alone. The surviving vertices keep their
    original timestamps.
    """
    times = a.times
    values = a.values
    out_t = [float(times[0])]
    out_v = [values[0]]
    for s in range(1, a.n_samples):
        t = float(times[s])
        w = values[s]
        while True:
            if np.array_equal(w, out_v[-1]):
                break  # zero displacement: drop the incoming sample
            if len(out_v) < 2:
                out_t.append(t)
                out_v.append(w)
                break
            u, v = out_v[-2], out_v[-1]
            d1 = v - u
            d2 = w - v
            if not _exact_backtrack(d1, d2):
                out_t.append(t)
                out_v.append(w)
                break
            if np.array_equal(w, u):
                # full cancellation of the spike u -> v -> u
                out_t.pop()
                out_v.pop()
                break
            out_t.pop()
            out_v.pop()
            if float(np.dot(d2, d2)) < float(np.dot(d1, d1)):
                # partial backtrack: w sits strictly between u and v
                out_t.append(t)
                out_v.append(w)
                break
            # overshoot past u: re-examine w against the segment before u
    return Path(np.asarray(out_t), np.vstack(out_v), a.channel_names)


def one_variation(a: Path) -> float:
    """Exact 1-variation of the interpolant: sum of segment norms."""
    if a.n_samples < 2:
        return 0.0
    return float(np.sum(np.linalg.norm(np.diff(a.values, axis=0), axis=1)))


def reparametrize(a: Path, warp: Callable[[np.ndarray], np.ndarray]) -> Path:
    """Replace times by warp(times); sample values are untouched.

    The warp must be strictly increasing on the sampled times. Used to
    exercise parametrization invariance.
    """
    new_times = np.asarray(warp(a.times), dtype=float)
    if new_times.shape != a.times.shape:
        raise ValueError("warp must map the time grid to a grid of equal length")
    if new_times.size > 1 and not np.all(np.diff(new_times) > 0):
        raise ValueError("warp must be strictly increasing on the time grid")
    return Path(new_times, a.values, a.channel_names)


def gaussian_smooth(a: Path, sigma: float) -> Path:
    """Convolve each channel with a unit-sum Gaussian kernel.

    sigma is in time units; the kernel is truncated at +-3 sigma and
    renormalized, and channels are reflect-padded at the boundaries.
    Requires a uniform time grid. sigma = 0 is the identity.
    """
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    if sigma == 0 or a.n_samples < 2:
        return a
    if not a.is_uniform():
        raise ValueError("gaussian_smooth requires a uniform time grid")
    dt = float(a.times[1] - a.times[0])
    radius = int(np.floor(3.0 * sigma / dt + 1e-12))
    if radius == 0:
        return a
    offsets = np.arange(-radius, radius + 1) * dt
    kernel = np.exp(-0.5 * (offsets / sigma) ** 2)
    kernel /= kernel.sum()
    smoothed = np.empty_like(a.values)
    for c in range(a.n_channels):
        padded = np.pad(a.values[:, c], radius, mode="reflect")
        smoothed[:, c] = np.convolve(padded, kernel, mode="valid")
    return a.with_values(smoothed)


def preprocess(a: Path, cfg: PreprocessConfig) -> Path:
    """Apply the standard conditioning recipe in its fixed order.

    (1) Gaussian smoothing, (2) per-channel mean centering, (3) range
    normalization so sup - inf = 1 (per channel, or dividing all channels
    by the global maximum range), (4) prepending a zero sample one median
    time step before the first, so the path starts at the origin.
    A constant channel cannot be normalized; it is left unscaled with a
    warning.
    """
    if cfg.is_identity():
        return a
    out = a
    if cfg.smooth_sigma > 0:
        out = gaussian_smooth(out, cfg.smooth_sigma)
    values = out.values.copy()
    if cfg.center:
        values = values - values.mean(axis=0)
    if cfg.normalize != "none":
        ranges = values.max(axis=0) - values.min(axis=0)
        if cfg.normalize == "per":
            scales = ranges.copy()
            flat = scales == 0.0
            if np.any(flat):
                names = [out.channel_names[k] for k in np.nonzero(flat)[0]]
                warnings.warn(
                    f"constant channel(s) {names} left unscaled by normalization"
                )
                scales[flat] = 1.0
            values = values / scales
        else:  # global
            scale = float(ranges.max())
            if scale == 0.0:
                warnings.warn("all channels constant; global normalization skipped")
            else:
                values = values / scale
    times = out.times
    if cfg.prepend_zero:
        step = float(np.median(np.diff(times))) if times.size > 1 else 1.0
        times = np.concatenate([[times[0] - step], times])
        values = np.vstack([np.zeros(values.shape[1]), values])
    return Path(times, values, out.channel_names)
