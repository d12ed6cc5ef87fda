"""Truncated tensor algebra over words in the alphabet {1, ..., N}.

Signature coefficients of an N-channel path live in the free tensor algebra
truncated at level L. A grade-k component is stored densely as a flat array
of N**k coefficients in lexicographic word order, i.e. the word
(i_1, ..., i_k) sits at the base-N integer with digits (i_1 - 1, ..., i_k - 1).
Words themselves are plain tuples of 1-based letters; the empty tuple is the
constant term.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

Word = Tuple[int, ...]

__all__ = [
    "Word",
    "DimensionMismatch",
    "TruncatedTensor",
    "tensor_product",
    "tensor_exp",
    "tensor_log",
    "shuffle",
    "lyndon_words",
    "word_index",
    "words_of_length",
    "validate_word",
]


class DimensionMismatch(ValueError):
    """Two tensors disagree on alphabet size or truncation level."""


def validate_word(word: Sequence[int], alphabet_size: int) -> Word:
    """Return ``word`` as a tuple, checking every letter lies in [1, N]."""
    w = tuple(int(c) for c in word)
    for c in w:
        if not 1 <= c <= alphabet_size:
            raise ValueError(f"letter {c} outside alphabet [1, {alphabet_size}]")
    return w


def word_index(word: Sequence[int], alphabet_size: int) -> int:
    """Lexicographic index of ``word`` within all words of its length."""
    idx = 0
    for c in validate_word(word, alphabet_size):
        idx = idx * alphabet_size + (c - 1)
    return idx


def words_of_length(alphabet_size: int, k: int) -> List[Word]:
    """All words of length k over [1, N], in lexicographic (storage) order."""
    return list(itertools.product(range(1, alphabet_size + 1), repeat=k))


@dataclass(frozen=True)
class TruncatedTensor:
    """Element of the tensor algebra truncated at ``level``.

    ``levels[k]`` is the flat grade-k coefficient array of length
    ``alphabet_size ** k``; ``levels[0]`` holds the single constant term.
    Instances are immutable; the arrays are marked read-only.
    """

    alphabet_size: int
    level: int
    levels: Tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        if self.alphabet_size < 1:
            raise ValueError("alphabet_size must be >= 1")
        if self.level < 0:
            raise ValueError("level must be >= 0")
        if len(self.levels) != self.level + 1:
            raise ValueError(
                f"expected {self.level + 1} grade arrays, got {len(self.levels)}"
            )
        frozen = []
        for k, arr in enumerate(self.levels):
            a = np.ascontiguousarray(arr, dtype=float)
            if a.shape != (self.alphabet_size**k,):
                raise ValueError(
                    f"grade {k} must have {self.alphabet_size ** k} entries, "
                    f"got shape {a.shape}"
                )
            if not np.all(np.isfinite(a)):
                raise ValueError(f"non-finite coefficient at grade {k}")
            a.setflags(write=False)
            frozen.append(a)
        object.__setattr__(self, "levels", tuple(frozen))

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, alphabet_size: int, level: int) -> "TruncatedTensor":
        return cls(
            alphabet_size,
            level,
            tuple(np.zeros(alphabet_size**k) for k in range(level + 1)),
        )

    @classmethod
    def unit(cls, alphabet_size: int, level: int) -> "TruncatedTensor":
        """Multiplicative identity: constant term 1, all higher grades 0."""
        levels = [np.zeros(alphabet_size**k) for k in range(level + 1)]
        levels[0] = np.ones(1)
        return cls(alphabet_size, level, tuple(levels))

    @classmethod
    def from_grade_one(
        cls, vector: Sequence[float], level: int
    ) -> "TruncatedTensor":
        """Embed a channel-displacement vector at grade 1."""
        v = np.asarray(vector, dtype=float)
        levels = [np.zeros(len(v) ** k) for k in range(level + 1)]
        if level >= 1:
            levels[1] = v.copy()
        return cls(len(v), level, tuple(levels))

    # -- access ------------------------------------------------------------

    def coefficient(self, word: Sequence[int]) -> float:
        w = validate_word(word, self.alphabet_size)
        if len(w) > self.level:
            raise ValueError(f"word {w} longer than truncation level {self.level}")
        return float(self.levels[len(w)][word_index(w, self.alphabet_size)])

    # -- linear structure ----------------------------------------------------

    def _check_compatible(self, other: "TruncatedTensor") -> None:
        if (
            self.alphabet_size != other.alphabet_size
            or self.level != other.level
        ):
            raise DimensionMismatch(
                f"(N={self.alphabet_size}, L={self.level}) vs "
                f"(N={other.alphabet_size}, L={other.level})"
            )

    def __add__(self, other: "TruncatedTensor") -> "TruncatedTensor":
        self._check_compatible(other)
        return TruncatedTensor(
            self.alphabet_size,
            self.level,
            tuple(a + b for a, b in zip(self.levels, other.levels)),
        )

    def __sub__(self, other: "TruncatedTensor") -> "TruncatedTensor":
        self._check_compatible(other)
        return TruncatedTensor(
            self.alphabet_size,
            self.level,
            tuple(a - b for a, b in zip(self.levels, other.levels)),
        )

    def __mul__(self, scalar: float) -> "TruncatedTensor":
        s = float(scalar)
        return TruncatedTensor(
            self.alphabet_size, self.level, tuple(a * s for a in self.levels)
        )

    __rmul__ = __mul__

    def __neg__(self) -> "TruncatedTensor":
        return self * -1.0

    def max_abs_difference(self, other: "TruncatedTensor") -> float:
        """Largest absolute coefficient difference across all grades."""
        self._check_compatible(other)
        return max(
            float(np.max(np.abs(a - b))) if a.size else 0.0
            for a, b in zip(self.levels, other.levels)
        )

    # -- serialization -------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "N": self.alphabet_size,
            "L": self.level,
            "levels": [lvl.tolist() for lvl in self.levels],
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "TruncatedTensor":
        return cls(
            int(obj["N"]),
            int(obj["L"]),
            tuple(np.asarray(lvl, dtype=float) for lvl in obj["levels"]),
        )


def tensor_product(a: TruncatedTensor, b: TruncatedTensor) -> TruncatedTensor:
    """Graded product of two truncated tensors; grades above L are discarded.

    Grade-k output is sum over p+q=k of (grade-p of a) tensor (grade-q of b).
    np.kron on flat grade arrays concatenates words in lexicographic storage
    order, so no index shuffling is needed.
    """
    a._check_compatible(b)
    out: List[np.ndarray] = []
    for k in range(a.level + 1):
        acc = np.zeros(a.alphabet_size**k)
        for p in range(k + 1):
            acc += np.kron(a.levels[p], b.levels[k - p])
        out.append(acc)
    return TruncatedTensor(a.alphabet_size, a.level, tuple(out))


def tensor_exp(a: TruncatedTensor) -> TruncatedTensor:
    """exp(a) = sum_{j>=0} a^(x)j / j!, truncated at L.

    Requires a zero constant term, so a^(x)j has lowest grade j and the sum
    is finite (j <= L).
    """
    if a.levels[0][0] != 0.0:
        raise ValueError("tensor_exp requires a zero constant term")
    result = TruncatedTensor.unit(a.alphabet_size, a.level)
    power = TruncatedTensor.unit(a.alphabet_size, a.level)
    for j in range(1, a.level + 1):
        power = tensor_product(power, a) * (1.0 / j)
        result = result + power
    return result


def tensor_log(s: TruncatedTensor) -> TruncatedTensor:
    """log(s) = sum_{j>=1} (-1)^(j-1)/j (s - 1)^(x)j, truncated at L."""
    if s.levels[0][0] != 1.0:
        raise ValueError("tensor_log requires constant term exactly 1")
    x = s - TruncatedTensor.unit(s.alphabet_size, s.level)
    result = TruncatedTensor.zero(s.alphabet_size, s.level)
    power = TruncatedTensor.unit(s.alphabet_size, s.level)
    for j in range(1, s.level + 1):
        power = tensor_product(power, x)
        result = result + power * ((-1.0) ** (j - 1) / j)
    return result


def shuffle(i: Sequence[int], j: Sequence[int]) -> List[Word]:
    """All (k,l)-shuffles of words i and j, duplicates retained.

    Returns the shuffle multiset as a list of C(k+l, k) words in a
    deterministic order: for each way of choosing which output slots carry
    the letters of i (itertools.combinations order), the letters of i and j
    are interleaved preserving their internal orders.
    """
    wi, wj = tuple(i), tuple(j)
    k, l = len(wi), len(wj)
    out: List[Word] = []
    for slots in itertools.combinations(range(k + l), k):
        word = [0] * (k + l)
        in_i = set(slots)
        it_i = iter(wi)
        it_j = iter(wj)
        for pos in range(k + l):
            word[pos] = next(it_i) if pos in in_i else next(it_j)
        out.append(tuple(word))
    return out


def lyndon_words(n: int, max_len: int) -> List[Word]:
    """All Lyndon words over [1, n] of length <= max_len, sorted by (length, lex).

    A word is Lyndon when it is strictly smaller than every proper rotation
    of itself. Generation uses Duval's algorithm, which emits Lyndon words in
    lexicographic order; the result is then re-sorted by (length, lex).
    """
    if n < 1 or max_len < 1:
        raise ValueError("need n >= 1 and max_len >= 1")
    found: List[Word] = []
    w = [-1]
    while w:
        w[-1] += 1
        found.append(tuple(c + 1 for c in w))
        m = len(w)
        while len(w) < max_len:
            w.append(w[len(w) - m])
        while w and w[-1] == n - 1:
            w.pop()
    found.sort(key=lambda u: (len(u), u))
    return found
