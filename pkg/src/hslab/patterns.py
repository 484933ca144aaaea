"""Zero patterns and the arrow relation between label sets.

Labels are 1-based, so a pattern of ``total = n + r`` partitions
``{1, ..., total}`` into Van Vleck labels ``a`` (size r) and Stieltjes
labels ``b`` (size n).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence


class PatternError(ValueError):
    pass


class IndexOutOfRange(PatternError):
    pass


class SizeMismatch(PatternError):
    pass


class ShiftOutOfRange(PatternError):
    pass


@dataclass(frozen=True, order=True)
class ZeroPattern:
    total: int
    a: tuple[int, ...]
    b: tuple[int, ...]

    def __post_init__(self):
        if tuple(sorted(set(self.a))) != self.a or tuple(sorted(set(self.b))) != self.b:
            raise PatternError("label sets must be strictly increasing")
        if set(self.a) & set(self.b) or set(self.a) | set(self.b) != set(range(1, self.total + 1)):
            raise PatternError(f"{self.a} and {self.b} do not partition [1..{self.total}]")

    @classmethod
    def from_a(cls, total: int, a: Iterable[int]) -> "ZeroPattern":
        a = tuple(sorted(a))
        if a and (a[0] < 1 or a[-1] > total):
            raise IndexOutOfRange(f"labels {a} outside [1..{total}]")
        return cls(total, a, tuple(i for i in range(1, total + 1) if i not in a))

    @property
    def n(self) -> int:
        return len(self.b)

    @property
    def r(self) -> int:
        return len(self.a)

    def label(self) -> str:
        return format_labels(self.a)


def enumerate_patterns(n: int, r: int) -> list[ZeroPattern]:
    """All C(n+r, r) patterns, lexicographic in the Van Vleck labels."""
    if n < 0 or r < 0:
        raise PatternError("n and r must be nonnegative")
    total = n + r
    return [ZeroPattern.from_a(total, a) for a in itertools.combinations(range(1, total + 1), r)]


def select(values: Sequence[float], labels: Sequence[int]) -> tuple:
    out = []
    for i in labels:
        if not 1 <= i <= len(values):
            raise IndexOutOfRange(f"label {i} outside [1..{len(values)}]")
        out.append(values[i - 1])
    return tuple(out)


def arrow_same(B: Sequence[int], C: Sequence[int]) -> bool:
    """B -> C for equal sizes: 2[B] << 2[C] + 1, i.e. b_i <= c_i < b_(i+1)."""
    if len(B) != len(C):
        raise SizeMismatch(f"sizes {len(B)} and {len(C)} differ")
    B, C = sorted(B), sorted(C)
    # the doubled chain compares integers of opposite parity, so it reduces to this
    for i, c in enumerate(C):
        if B[i] > c:
            return False
        if i + 1 < len(B) and c >= B[i + 1]:
            return False
    return True


def arrow_consecutive(B: Sequence[int], C: Sequence[int]) -> bool:
    """B -> C for |C| = |B| + 1: 2[B] << 2[C] - 1, i.e. c_i <= b_i < c_(i+1).

    This is the integer encoding under which, for every x << y, the
    selections satisfy x_B << y_C.
    """
    if len(C) != len(B) + 1:
        raise SizeMismatch(f"need |C| = |B| + 1, got {len(B)} and {len(C)}")
    B, C = sorted(B), sorted(C)
    for i, b in enumerate(B):
        if C[i] > b or b >= C[i + 1]:
            return False
    return True


def count_predecessors(B: Sequence[int]) -> int:
    """Number of A with A -> B: b_1 (b_2 - b_1) ... (b_n - b_(n-1))."""
    count = 1
    prev = 0
    for b in sorted(B):
        count *= b - prev
        prev = b
    return count


def shift(A: Iterable[int], total: int) -> tuple[int, ...]:
    out = tuple(sorted(a + 1 for a in A))
    if out and out[-1] > total:
        raise ShiftOutOfRange(f"{max(out) - 1} + 1 exceeds {total}")
    return out


def parse_labels(text: str) -> tuple[int, ...]:
    """Parse the CLI pattern literal: comma-separated 1-based labels, e.g. ``"1,3"``."""
    text = text.strip()
    if not text:
        return ()
    try:
        labels = tuple(int(t) for t in text.split(","))
    except ValueError as exc:
        raise PatternError(f"bad pattern literal {text!r}") from exc
    if len(set(labels)) != len(labels):
        raise PatternError(f"repeated label in {text!r}")
    return tuple(sorted(labels))


def format_labels(labels: Iterable[int]) -> str:
    return ",".join(str(i) for i in labels)
