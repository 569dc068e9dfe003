"""Finite index sets and their factor-closed (FC) machinery."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator

from gcdsum.arith import divisors
from gcdsum.errors import DomainError

MAX_ELEMENT = 2**63 - 1


@dataclass(frozen=True)
class IndexSet:
    """Nonempty sorted set of distinct positive integers."""

    elements: tuple[int, ...]
    is_fc: bool = field(init=False, compare=False)
    _members: frozenset = field(init=False, compare=False, repr=False)

    def __init__(self, elements: Iterable[int]):
        elems = [int(k) for k in elements]
        if not elems:
            raise DomainError("an index set must be nonempty")
        if len(set(elems)) != len(elems):
            raise DomainError(f"repeated elements in {sorted(elems)}")
        if min(elems) < 1 or max(elems) > MAX_ELEMENT:
            raise DomainError(f"elements must lie in [1, 2^63-1], got {sorted(elems)}")
        elems.sort()
        object.__setattr__(self, "elements", tuple(elems))
        members = frozenset(elems)
        object.__setattr__(self, "_members", members)
        fc = all(d in members for k in elems for d in divisors(k))
        object.__setattr__(self, "is_fc", fc)

    def __iter__(self) -> Iterator[int]:
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, k: object) -> bool:
        return k in self._members

    def __repr__(self) -> str:
        return f"IndexSet({list(self.elements)})"

    @property
    def min(self) -> int:
        return self.elements[0]

    @property
    def max(self) -> int:
        return self.elements[-1]

    def to_list(self) -> list[int]:
        return list(self.elements)


def as_index_set(K: IndexSet | Iterable[int]) -> IndexSet:
    return K if isinstance(K, IndexSet) else IndexSet(K)


def fc_closure(K: IndexSet | Iterable[int]) -> IndexSet:
    K = as_index_set(K)
    if K.is_fc:
        return K
    return IndexSet({d for k in K for d in divisors(k)})


def f_prime(K: IndexSet | Iterable[int]) -> tuple[int, ...]:
    """F(K) without 1; possibly empty."""
    return tuple(d for d in fc_closure(K) if d != 1)


def kstar(K: IndexSet | Iterable[int]) -> tuple[int, ...]:
    """Elements of K having a strictly smaller divisor inside K; possibly empty."""
    elems = as_index_set(K).elements
    return tuple(l for i, l in enumerate(elems) if any(l % k == 0 for k in elems[:i]))


def varpi(K: IndexSet | Iterable[int]) -> Fraction:
    """max over pairs of max(k, l) / gcd(k, l)."""
    elems = as_index_set(K).elements
    best = 1
    for i, k in enumerate(elems):
        for l in elems[i + 1 :]:
            best = max(best, l // math.gcd(k, l))
    return Fraction(best)


def divisor_set(nu: int) -> IndexSet:
    return IndexSet(divisors(nu))
