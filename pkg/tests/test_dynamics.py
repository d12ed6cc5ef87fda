from __future__ import annotations

import numpy as np
import pytest

from pathsig import (
    Event,
    IntegrationError,
    LorenzParams,
    Path,
    cyclic_pair,
    default_three_channel_events,
    lorenz,
    signed_area,
    three_channel_event_series,
)


# ---------------------------------------------------------------------------
# Lorenz / RK4


def test_lorenz_default_shape_and_grid():
    a = lorenz(LorenzParams(steps=100))
    assert a.n_samples == 101
    assert a.channel_names == ("x", "y", "z")
    assert np.array_equal(a.times, np.arange(101) * 0.005)


def test_lorenz_is_bitwise_deterministic():
    p = LorenzParams(steps=500)
    a = lorenz(p)
    b = lorenz(p)
    assert np.array_equal(a.values, b.values)


def test_lorenz_rk4_error_scales_as_dt_fourth():
    # Richardson on t in [0, 0.5]: the ratio of successive endpoint
    # differences |x(dt)-x(dt/2)| / |x(dt/2)-x(dt/4)| approaches 2^4
    base = 0.01
    ends = []
    for dt in (base, base / 2, base / 4):
        steps = int(round(0.5 / dt))
        a = lorenz(LorenzParams(dt=dt, steps=steps))
        ends.append(a.values[-1])
    q = np.linalg.norm(ends[0] - ends[1])
    r = np.linalg.norm(ends[1] - ends[2])
    assert 11.0 < q / r < 23.0


def test_lorenz_z_axis_is_invariant_and_decays():
    z0 = 5.0
    steps = 200
    p = LorenzParams(x0=(0.0, 0.0, z0), dt=0.005, steps=steps)
    a = lorenz(p)
    assert np.all(a.values[:, 0] == 0.0)
    assert np.all(a.values[:, 1] == 0.0)
    t_end = steps * 0.005
    expected = z0 * np.exp(-p.beta * t_end)
    assert a.values[-1, 2] == pytest.approx(expected, rel=1e-8)


def test_lorenz_blowup_raises_with_step_index():
    with pytest.raises(IntegrationError, match="step"):
        lorenz(LorenzParams(dt=10.0, steps=50))


def test_lorenz_param_validation():
    with pytest.raises(ValueError):
        LorenzParams(dt=0.0)
    with pytest.raises(ValueError):
        LorenzParams(steps=0)


# ---------------------------------------------------------------------------
# cyclic pair


def test_cyclic_pair_shapes_and_names():
    a = cyclic_pair(samples=500)
    assert a.n_samples == 500
    assert a.channel_names == ("y1", "y2")
    assert a.times[0] == 0.0 and a.times[-1] == 1.0


def test_cyclic_pair_channel_two_is_lagged_copy():
    # samples chosen so the lag is exactly 125 grid steps
    a = cyclic_pair(n_events=4, phase_lag=0.25, samples=2001)
    shift = 125
    assert 0.25 * (1.0 / 4) * 2000 == shift
    y1 = a.values[: 2001 - shift, 0]
    y2 = a.values[shift:, 1]
    assert np.allclose(y1, y2, atol=1e-12)


def test_cyclic_pair_positive_lag_means_channel_one_leads():
    a = cyclic_pair(n_events=4, phase_lag=0.25, samples=3000)
    assert signed_area(a, 1, 2) > 0.0
    b = cyclic_pair(n_events=4, phase_lag=-0.25, samples=3000)
    assert signed_area(b, 1, 2) < 0.0


def test_cyclic_pair_warp_resamples_same_curve():
    plain = cyclic_pair(samples=4000)
    warped = cyclic_pair(samples=4000, warp=lambda u: u ** 2)
    # the warped series is the same trajectory traversed at a different
    # speed: full-domain signed areas agree
    assert signed_area(warped, 1, 2) == pytest.approx(
        signed_area(plain, 1, 2), abs=1e-3
    )
    assert not np.allclose(plain.values, warped.values)


def test_cyclic_pair_warp_must_be_increasing():
    with pytest.raises(ValueError):
        cyclic_pair(warp=lambda u: -u)


def test_cyclic_pair_noise_is_seeded():
    a = cyclic_pair(samples=300, noise_sigma=0.1, seed=4)
    b = cyclic_pair(samples=300, noise_sigma=0.1, seed=4)
    c = cyclic_pair(samples=300, noise_sigma=0.1, seed=5)
    assert np.array_equal(a.values, b.values)
    assert not np.array_equal(a.values, c.values)


def test_cyclic_pair_validation():
    with pytest.raises(ValueError):
        cyclic_pair(samples=5)
    with pytest.raises(ValueError):
        cyclic_pair(phase_lag=1.5)
    with pytest.raises(ValueError):
        cyclic_pair(n_events=0)


# ---------------------------------------------------------------------------
# three-channel events


def test_event_series_places_bumps():
    events = [
        Event(time=0.25, leader=1, follower=2),
        Event(time=0.70, leader=3, follower=2),
    ]
    a = three_channel_event_series(events, samples=2000)
    t = a.times
    assert t[np.argmax(a.values[:, 0])] == pytest.approx(0.25, abs=0.01)
    assert t[np.argmax(a.values[:, 2])] == pytest.approx(0.70, abs=0.01)
    # follower channel peaks lag samples later for each event
    first_half = a.values[: 1000, 1]
    second_half = a.values[1000:, 1]
    assert t[np.argmax(first_half)] == pytest.approx(0.27, abs=0.01)
    assert t[1000 + np.argmax(second_half)] == pytest.approx(0.72, abs=0.01)


def test_default_events_cover_the_two_leads():
    ev = default_three_channel_events()
    assert (ev[0].leader, ev[0].follower) == (1, 2)
    assert (ev[1].leader, ev[1].follower) == (3, 2)
    assert ev[0].lag > 0 and ev[1].lag > 0


def test_event_series_leader_leads_follower():
    events = [Event(time=0.5, leader=1, follower=2, lag=0.03)]
    a = three_channel_event_series(events, samples=3000)
    assert signed_area(a, 1, 2) > 0.0


def test_event_series_seeded_noise_and_validation():
    a = three_channel_event_series(
        default_three_channel_events(), samples=500, noise_sigma=0.05, seed=1
    )
    b = three_channel_event_series(
        default_three_channel_events(), samples=500, noise_sigma=0.05, seed=1
    )
    assert np.array_equal(a.values, b.values)
    with pytest.raises(ValueError):
        three_channel_event_series([Event(time=2.0, leader=1, follower=2)])
    with pytest.raises(ValueError):
        three_channel_event_series([Event(time=0.5, leader=0, follower=2)])
    with pytest.raises(ValueError):
        three_channel_event_series([], samples=4)
