"""Signature computation: fast segment-exponential engine and slow oracle.

The production algorithm exploits that a linear segment with displacement
Delta has signature exp(Delta at grade 1), so the signature of a polygonal
path is the ordered tensor product of per-segment exponentials (Chen's
identity). This is exact for sampled series up to floating-point rounding.

signature_oracle evaluates a single coefficient straight from the iterated
integral over the ordered simplex instead, by summing over ordered tuples of
segments with the exact polynomial volume of each simplex cell. It is
exponentially slow in the word length and exists purely as an independent
reference for the engine.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from .path_core import Path
from .tensor_algebra import TruncatedTensor, tensor_product, validate_word

__all__ = [
    "DEFAULT_LEVEL_CAP",
    "SignatureResult",
    "ScaleCheck",
    "signature",
    "signature_oracle",
    "scale_path_signature_check",
    "signature_derivative",
    "signature_derivative_integral",
]

#: analysis pipelines need only level 2; the library accepts up to this cap
DEFAULT_LEVEL_CAP = 6

#: the simplex oracle costs O(T^k); keep it a reference implementation
ORACLE_MAX_WORD = 4


@dataclass(frozen=True)
class SignatureResult:
    """Truncated signature together with provenance of the path it came from."""

    tensor: TruncatedTensor
    level: int
    n_channels: int
    n_samples: int
    channel_names: Tuple[str, ...]

    def coefficient(self, word: Sequence[int]) -> float:
        return self.tensor.coefficient(word)

    def to_dict(self) -> dict:
        out = self.tensor.to_dict()
        out["channel_names"] = list(self.channel_names)
        out["n_samples"] = self.n_samples
        return out


def _segment_exp(delta: np.ndarray, level: int) -> TruncatedTensor:
    """Signature of one linear segment: grade k is delta^(x)k / k!."""
    levels = [np.ones(1)]
    power = np.ones(1)
    for k in range(1, level + 1):
        power = np.kron(power, delta) / k
        levels.append(power)
    return TruncatedTensor(delta.size, level, tuple(levels))


def signature(a: Path, level: int) -> SignatureResult:
    """Truncated signature of a sampled path via per-segment exponentials.

    level must lie in [1, DEFAULT_LEVEL_CAP]. A single-point path has the
    unit signature.
    """
    if not 1 <= level <= DEFAULT_LEVEL_CAP:
        raise ValueError(
            f"level must be in [1, {DEFAULT_LEVEL_CAP}], got {level}"
        )
    sig = TruncatedTensor.unit(a.n_channels, level)
    for delta in np.diff(a.values, axis=0):
        sig = tensor_product(sig, _segment_exp(delta, level))
    return SignatureResult(
        tensor=sig,
        level=level,
        n_channels=a.n_channels,
        n_samples=a.n_samples,
        channel_names=a.channel_names,
    )


def signature_oracle(a: Path, word: Sequence[int]) -> float:
    """One signature coefficient by brute-force simplex integration.

    The iterated integral over t_1 <= ... <= t_k splits over ordered tuples
    of segments. The derivative is constant on each segment, so a tuple
    visiting segments s_1 <= ... <= s_k contributes the product of the
    matching displacement components divided by g! for every group of g
    equal consecutive segments (the volume of the ordered corner of the
    cell). The sum over all tuples is exact, no quadrature error.
    """
    w = validate_word(word, a.n_channels)
    k = len(w)
    if k > ORACLE_MAX_WORD:
        raise ValueError(
            f"oracle word length {k} exceeds {ORACLE_MAX_WORD} (cost grows as T^k)"
        )
    if k == 0:
        return 1.0
    deltas = np.diff(a.values, axis=0)
    m = deltas.shape[0]
    if m == 0:
        return 0.0
    cols = [deltas[:, c - 1] for c in w]
    total = 0.0
    for segs in itertools.combinations_with_replacement(range(m), k):
        term = 1.0
        for pos, s in enumerate(segs):
            term *= cols[pos][s]
        run = 1
        for pos in range(1, k):
            if segs[pos] == segs[pos - 1]:
                run += 1
            else:
                term /= math.factorial(run)
                run = 1
        term /= math.factorial(run)
        total += term
    return total


@dataclass(frozen=True)
class ScaleCheck:
    """Record of a lambda-scaling verification run."""

    scale: float
    level: int
    per_grade_deviation: Tuple[float, ...]
    max_deviation: float
    tolerance: float
    passed: bool


def scale_path_signature_check(
    a: Path, lam: float, level: int, tolerance: float = 1e-10
) -> ScaleCheck:
    """Check signature(lam * a) against lam^k-scaled grades of signature(a)."""
    base = signature(a, level).tensor
    scaled = signature(a.with_values(a.values * lam), level).tensor
    deviations = []
    for k in range(level + 1):
        expected = base.levels[k] * lam**k
        deviations.append(float(np.max(np.abs(scaled.levels[k] - expected))))
    worst = max(deviations)
    return ScaleCheck(
        scale=lam,
        level=level,
        per_grade_deviation=tuple(deviations),
        max_deviation=worst,
        tolerance=tolerance,
        passed=worst <= tolerance,
    )


def signature_derivative(
    a: Path, i: int, j: int
) -> Tuple[np.ndarray, np.ndarray]:
    """The second-level integrand gamma_i(t) * gamma_j'(t) as a stream.

    gamma_j' is the piecewise-constant segment slope and gamma_i is taken at
    the segment midpoint, so the stream integrates segment-exactly: the sum
    of value * segment width reconstructs S^(i,j). That identity needs
    channel i to start at 0 (the usual origin-prepending preprocessing); a
    warning is raised otherwise. Channel j enters only through slopes, so
    its offset is irrelevant. Returns (midpoint times, stream values), both
    of length T-1.
    """
    if a.n_samples < 2:
        raise ValueError("signature_derivative needs at least 2 samples")
    x = a.channel(i)
    y = a.channel(j)
    if x[0] != 0.0:
        warnings.warn(
            f"channel {i} starts at {x[0]!r}, not 0; the stream integral "
            "will not match the second-level signature coefficient"
        )
    widths = np.diff(a.times)
    mid_times = a.times[:-1] + 0.5 * widths
    mid_x = 0.5 * (x[:-1] + x[1:])
    slope_y = np.diff(y) / widths
    return mid_times, mid_x * slope_y


def signature_derivative_integral(
    a: Path, i: int, j: int
) -> Tuple[np.ndarray, np.ndarray]:
    """Cumulative integral of the derivative stream, sampled at segment ends.

    For a path whose channel i starts at 0 the final entry equals S^(i,j)
    exactly (per-segment trapezoidal integration of a linear integrand).
    """
    mid_times, stream = signature_derivative(a, i, j)
    widths = np.diff(a.times)
    return a.times[1:], np.cumsum(stream * widths)
