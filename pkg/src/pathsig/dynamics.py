"""Deterministic generators: Lorenz trajectories and synthetic lead-lag data.

Everything here is a pure function of (parameters, seed) and reproduces bit
for bit. The Lorenz system is integrated with fixed-step classical RK4
rather than an adaptive solver: reproducibility across platforms matters
more than step-size finesse for a qualitative analysis target.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .path_core import Path

__all__ = [
    "IntegrationError",
    "LorenzParams",
    "lorenz",
    "cyclic_pair",
    "Event",
    "default_three_channel_events",
    "three_channel_event_series",
]


class IntegrationError(RuntimeError):
    """The ODE state left the finite range during integration."""


@dataclass(frozen=True)
class LorenzParams:
    """Classic chaotic regime by default: sigma=10, rho=28, beta=8/3."""

    sigma: float = 10.0
    rho: float = 28.0
    beta: float = 8.0 / 3.0
    x0: Tuple[float, float, float] = (1.0, 1.0, 1.0)
    dt: float = 0.005
    steps: int = 10000

    def __post_init__(self) -> None:
        if self.dt <= 0:
            raise ValueError("dt must be > 0")
        if self.steps < 1:
            raise ValueError("steps must be >= 1")


def lorenz(params: LorenzParams = LorenzParams()) -> Path:
    """Integrate x' = sigma(y-x), y' = x(rho-z) - y, z' = xy - beta z.

    Classical fixed-step RK4 from params.x0; returns the (steps + 1)-sample
    3-channel path on the uniform grid k * dt. Divergence to a non-finite
    state raises IntegrationError naming the step.
    """
    p = params

    def field(s: np.ndarray) -> np.ndarray:
        x, y, z = s
        return np.array(
            [p.sigma * (y - x), x * (p.rho - z) - y, x * y - p.beta * z]
        )

    out = np.empty((p.steps + 1, 3))
    state = np.asarray(p.x0, dtype=float)
    out[0] = state
    # overflow on divergence is expected and reported via the finite check
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(1, p.steps + 1):
            k1 = field(state)
            k2 = field(state + 0.5 * p.dt * k1)
            k3 = field(state + 0.5 * p.dt * k2)
            k4 = field(state + p.dt * k3)
            state = state + (p.dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            if not np.all(np.isfinite(state)):
                raise IntegrationError(f"non-finite state at step {k}")
            out[k] = state
    times = np.arange(p.steps + 1) * p.dt
    return Path(times, out, ("x", "y", "z"))


def _raised_cosine(u: np.ndarray, center: float, width: float) -> np.ndarray:
    """Unit bump 0.5 (1 + cos(pi (u-c)/w)) supported on |u - c| <= w."""
    rel = (u - center) / width
    return np.where(np.abs(rel) <= 1.0, 0.5 * (1.0 + np.cos(np.pi * rel)), 0.0)


def cyclic_pair(
    n_events: int = 4,
    phase_lag: float = 0.25,
    warp: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    samples: int = 2000,
    noise_sigma: float = 0.0,
    seed: int = 0,
) -> Path:
    """Two channels of periodic unit bumps with channel 2 lagging channel 1.

    Events sit at (k + 1/2) / n_events on the unit interval; channel 2's
    bumps trail by phase_lag event periods, so channel 1 leads for positive
    lags (positive signed area A^(1,2)). An optional strictly increasing
    warp of [0, 1] resamples the same underlying curve at warped positions,
    producing a pure reparametrization of the unwarped series. Noise is
    additive Gaussian, seeded.
    """
    if samples < 16:
        raise ValueError("samples must be >= 16")
    if n_events < 1:
        raise ValueError("n_events must be >= 1")
    if not 0 <= abs(phase_lag) < 1:
        raise ValueError("phase_lag must lie in (-1, 1)")
    period = 1.0 / n_events
    width = 0.25 * period
    t = np.linspace(0.0, 1.0, samples)
    if warp is not None:
        u = np.asarray(warp(t), dtype=float)
        if u.shape != t.shape or not np.all(np.diff(u) > 0):
            raise ValueError("warp must be strictly increasing on [0, 1]")
    else:
        u = t
    centers = (np.arange(n_events) + 0.5) * period
    g1 = np.zeros_like(u)
    g2 = np.zeros_like(u)
    for c in centers:
        g1 += _raised_cosine(u, c, width)
        g2 += _raised_cosine(u, c + phase_lag * period, width)
    values = np.column_stack([g1, g2])
    if noise_sigma > 0:
        rng = np.random.default_rng(seed)
        values = values + rng.normal(0.0, noise_sigma, values.shape)
    return Path(t, values, ("y1", "y2"))


@dataclass(frozen=True)
class Event:
    """One localized lead-lag event: leader bumps, follower repeats later.

    time is the leader bump center on the unit interval; lag and width are
    in the same units. Overlapping events are permitted and simply add.
    """

    time: float
    leader: int
    follower: int
    lag: float = 0.02
    width: float = 0.03
    amplitude: float = 1.0


def three_channel_event_series(
    events: Sequence[Event],
    samples: int = 2000,
    noise_sigma: float = 0.0,
    seed: int = 0,
) -> Path:
    """Three channels on [0, 1] with raised-cosine lead-lag events.

    Each event adds a bump of the given width to its leader channel at
    event.time and to its follower channel at event.time + event.lag, on a
    seeded Gaussian noise baseline. Channels not named by any event stay
    pure noise.
    """
    if samples < 16:
        raise ValueError("samples must be >= 16")
    t = np.linspace(0.0, 1.0, samples)
    values = np.zeros((samples, 3))
    for ev in events:
        if not 0.0 <= ev.time <= 1.0:
            raise ValueError(f"event time {ev.time} outside [0, 1]")
        for ch in (ev.leader, ev.follower):
            if not 1 <= ch <= 3:
                raise ValueError(f"event channel {ch} outside [1, 3]")
        values[:, ev.leader - 1] += ev.amplitude * _raised_cosine(
            t, ev.time, ev.width
        )
        values[:, ev.follower - 1] += ev.amplitude * _raised_cosine(
            t, ev.time + ev.lag, ev.width
        )
    if noise_sigma > 0:
        rng = np.random.default_rng(seed)
        values = values + rng.normal(0.0, noise_sigma, values.shape)
    return Path(t, values, ("y1", "y2", "y3"))


def default_three_channel_events() -> Tuple[Event, Event]:
    """Stock scenario: channel 1 leads 2 early, channel 3 leads 2 late."""
    return (
        Event(time=0.25, leader=1, follower=2),
        Event(time=0.70, leader=3, follower=2),
    )
