"""Bitmask subsets over a small labeled ground set.

A subset of a ground set of at most 16 points is an int whose bit i is set
exactly when point i belongs to the subset.  All set algebra is plain
integer bit twiddling; the helpers here only add the conversions and
iteration patterns used everywhere else.
"""

from __future__ import annotations

from typing import Iterable, Iterator, List

MAX_POINTS = 16


def mask_of(points: Iterable[int]) -> int:
    m = 0
    for p in points:
        m |= 1 << p
    return m


def points_of(mask: int) -> List[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def popcount(mask: int) -> int:
    return mask.bit_count()


def full_mask(n: int) -> int:
    return (1 << n) - 1


def subsets_of(mask: int) -> Iterator[int]:
    """All subsets of `mask`, including 0 and mask itself."""
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def supersets_of(mask: int, n: int) -> Iterator[int]:
    """All supersets of `mask` inside the n-point ground set."""
    comp = full_mask(n) & ~mask
    for extra in subsets_of(comp):
        yield mask | extra


def check_in_ground(mask: int, n: int) -> None:
    if mask < 0 or mask >> n:
        raise ValueError(f"mask {mask:#x} has points outside the {n}-point ground set")


def format_mask(mask: int) -> str:
    return "{" + ",".join(str(p) for p in points_of(mask)) + "}"
