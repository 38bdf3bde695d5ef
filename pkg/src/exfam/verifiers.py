"""Witness-producing checkers for the exchange conditions.

Each checker scans the relevant pairs of members of an enumerable family and
either passes (returns None) or returns the scan-order-minimal Witness.  The
scan order is ascending (|A|+|B|, |A|, A, B) with sets compared by numeric
bitmask value; symmetric conditions visit each unordered pair once in the
orientation with the smaller (cardinality, mask) first.

Empty-set handling follows the literal quantifiers: a clause that needs an
element of an empty set cannot fire, a pair of two empty sets never occurs
(members are distinct), and the two-sided simultaneous condition skips pairs
with an empty side outright.  For the swap condition, a pair with exactly one
empty side passes iff some singleton of the nonempty side is a member, which
keeps it at least as strong as the weak condition on every family.

Witness soundness contract: re-running the single-pair check
``pair_satisfies(member_set, condition, A, B)`` on a returned witness
reproduces the failure.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Optional

from .core import Family, canon_key, full_mask, iter_bits, set_text


class Condition(Enum):
    WEAK = "weak"
    COND3 = "cond3"
    ORDERED = "ordered"
    STRONG = "strong"
    BOTH = "both"
    MATROID = "matroid"

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return self.value


@dataclass(frozen=True)
class Witness:
    """A violating pair plus which clause failed.

    ``a`` and ``b`` are member bitmasks; they are disjoint except for the
    overlapping branch of the matroid-style condition.
    """

    condition: Condition
    a: int
    b: int
    detail: str

    def text(self) -> str:
        return (
            f"VIOLATION {self.condition.value} "
            f"A={set_text(self.a)} B={set_text(self.b)} {self.detail}"
        )

    def to_dict(self) -> dict:
        from .core import elements

        return {
            "condition": self.condition.value,
            "A": elements(self.a),
            "B": elements(self.b),
            "detail": self.detail,
        }


# -- single-pair clauses -------------------------------------------------------


def _augments(mem: frozenset[int], base: int, source: int) -> bool:
    """True iff some element of `source` can be added to `base` in-family."""
    return any((base | b) in mem for b in iter_bits(source))


def _weak_pair(mem: frozenset[int], a: int, b: int) -> bool:
    return _augments(mem, b, a) or _augments(mem, a, b)


def _cond3_pair(mem: frozenset[int], a: int, b: int) -> bool:
    if a == 0 or b == 0:
        nonempty = a | b
        if nonempty == 0:
            return True
        return _augments(mem, 0, nonempty)
    for abit in iter_bits(a):
        b_with_a = b | abit
        a_less_a = a ^ abit
        for bbit in iter_bits(b):
            if b_with_a in mem and (a_less_a | bbit) in mem:
                return True
            if (a | bbit) in mem and ((b ^ bbit) | abit) in mem:
                return True
    return False


def _both_pair(mem: frozenset[int], a: int, b: int) -> bool:
    # the two clauses share no variable, so the pair quantifier factorizes
    if a == 0 or b == 0:
        return True
    return _augments(mem, b, a) and _augments(mem, a, b)


def pair_satisfies(mem: frozenset[int], condition: Condition, a: int, b: int) -> bool:
    """The condition restricted to one pair; (a, b) is ordered where it matters."""
    ca, cb = a.bit_count(), b.bit_count()
    if condition is Condition.WEAK:
        return _weak_pair(mem, a, b)
    if condition is Condition.COND3:
        return _cond3_pair(mem, a, b)
    if condition is Condition.ORDERED:
        if not _weak_pair(mem, a, b):
            return False
        if ca < cb:
            return _augments(mem, a, b)
        if cb < ca:
            return _augments(mem, b, a)
        return True
    if condition is Condition.STRONG:
        if a == 0 and b == 0:
            return True
        if ca <= cb and not _augments(mem, a, b):
            return False
        return True
    if condition is Condition.BOTH:
        return _both_pair(mem, a, b)
    if condition is Condition.MATROID:
        qualifies = (ca == cb and a != b and not (a & b)) or ca < cb
        if not qualifies:
            return True
        return _augments(mem, a, b & ~a)
    raise ValueError(f"unknown condition {condition!r}")


# -- the deterministic pair scan -----------------------------------------------


def _disjoint_partners(a: int, n: int, mem: frozenset[int], members: list[int]) -> Iterator[int]:
    """Members disjoint from `a`, via whichever walk is cheaper."""
    comp = full_mask(n) & ~a
    if (1 << (n - a.bit_count())) <= len(members):
        sub = comp
        while True:
            if sub != a and sub in mem:
                yield sub
            if sub == 0:
                break
            sub = (sub - 1) & comp
    else:
        for b in members:
            if b != a and not (a & b):
                yield b


def _disjoint_pair_buckets(family: Family) -> dict[int, list[tuple[int, int, int]]]:
    """Canonically oriented disjoint pairs, bucketed by |A|+|B|.

    Each unordered pair appears once as (cA, A, B) with (cA, A) < (cB, B).
    """
    members = sorted(family.member_set(), key=canon_key)
    mem = family.member_set()
    n = family.n
    buckets: dict[int, list[tuple[int, int, int]]] = {}
    for a in members:
        ca = a.bit_count()
        for b in _disjoint_partners(a, n, mem, members):
            cb = b.bit_count()
            if (ca, a) < (cb, b):
                buckets.setdefault(ca + cb, []).append((ca, a, b))
    return buckets


def _scan_symmetric(family: Family, condition: Condition, pair_ok) -> Optional[Witness]:
    mem = family.member_set()
    buckets = _disjoint_pair_buckets(family)
    for total in sorted(buckets):
        for _, a, b in sorted(buckets[total]):
            if not pair_ok(mem, a, b):
                return Witness(condition, a, b, _DETAIL[condition])
    return None


_DETAIL = {
    Condition.WEAK: "no single-element augmentation keeps either set in the family",
    Condition.COND3: "no swap pair (a,b) satisfies either clause",
    Condition.BOTH: "no (a,b) augments both sets simultaneously",
    Condition.STRONG: "no element of the larger set extends the smaller",
    Condition.MATROID: "no element of B outside A extends A",
}
_DETAIL_ORDERED_WEAK = "weak exchange failed"
_DETAIL_ORDERED_SIZE = "smaller set admits no augmentation from the larger"


def check_weak_exchange(family: Family) -> Optional[Witness]:
    """Disjoint members must admit a one-element augmentation on some side."""
    return _scan_symmetric(family, Condition.WEAK, _weak_pair)


def check_condition3(family: Family) -> Optional[Witness]:
    """The two-clause swap condition on disjoint members."""
    return _scan_symmetric(family, Condition.COND3, _cond3_pair)


def check_both(family: Family) -> Optional[Witness]:
    """Both sides must admit an augmentation simultaneously (nonempty pairs)."""
    return _scan_symmetric(family, Condition.BOTH, _both_pair)


def check_size_ordered(family: Family) -> Optional[Witness]:
    """Weak exchange plus: the strictly smaller set gains from the larger."""
    mem = family.member_set()
    buckets = _disjoint_pair_buckets(family)
    for total in sorted(buckets):
        for ca, a, b in sorted(buckets[total]):
            if not _weak_pair(mem, a, b):
                return Witness(Condition.ORDERED, a, b, _DETAIL_ORDERED_WEAK)
            if ca < b.bit_count() and not _augments(mem, a, b):
                return Witness(Condition.ORDERED, a, b, _DETAIL_ORDERED_SIZE)
    return None


def check_strong_ordered(family: Family) -> Optional[Witness]:
    """For |A| <= |B| disjoint, some element of B extends A (both orders at ties)."""
    mem = family.member_set()
    buckets = _disjoint_pair_buckets(family)
    for total in sorted(buckets):
        for ca, a, b in sorted(buckets[total]):
            if not _augments(mem, a, b):
                return Witness(Condition.STRONG, a, b, _DETAIL[Condition.STRONG])
            if ca == b.bit_count() and not _augments(mem, b, a):
                return Witness(Condition.STRONG, b, a, _DETAIL[Condition.STRONG])
    return None


def check_matroid_like(family: Family) -> Optional[Witness]:
    """Matroid-style: |A|=|B| disjoint, or |A|<|B| with overlap allowed."""
    members = sorted(family.member_set(), key=canon_key)
    mem = family.member_set()
    by_card: dict[int, list[int]] = {}
    for m in members:
        by_card.setdefault(m.bit_count(), []).append(m)
    cards = sorted(by_card)
    buckets: dict[int, list[tuple[int, int, int]]] = {}
    for ca in cards:
        for cb in cards:
            if cb < ca:
                continue
            for a in by_card[ca]:
                for b in by_card[cb]:
                    if a == b:
                        continue
                    if ca == cb and (a & b):
                        continue
                    if ca == cb and a > b:
                        # scanned via the (b, a) entry plus the tie branch below
                        continue
                    buckets.setdefault(ca + cb, []).append((ca, a, b))
    for total in sorted(buckets):
        for ca, a, b in sorted(buckets[total]):
            if not _augments(mem, a, b & ~a):
                return Witness(Condition.MATROID, a, b, _DETAIL[Condition.MATROID])
            if ca == b.bit_count() and not _augments(mem, b, a & ~b):
                return Witness(Condition.MATROID, b, a, _DETAIL[Condition.MATROID])
    return None


_CHECKERS = {
    Condition.WEAK: check_weak_exchange,
    Condition.COND3: check_condition3,
    Condition.ORDERED: check_size_ordered,
    Condition.STRONG: check_strong_ordered,
    Condition.BOTH: check_both,
    Condition.MATROID: check_matroid_like,
}


def check(family: Family, condition: Condition) -> Optional[Witness]:
    """Dispatch to the checker for `condition`."""
    return _CHECKERS[condition](family)


def passes(family: Family, condition: Condition) -> bool:
    return check(family, condition) is None


# -- the explicit boundary witness ----------------------------------------------


def find_thm2_violation_in_aak(s: int, t: int) -> Optional[Witness]:
    """The explicit size-ordered violation in aak_family(s, t) for s > 4.

    A takes one element of the first block and two of the second; B is the
    rest of the first block.  For s > 4 this gives |A| < |B| with no element
    of B addable to A.  Returns None for s <= 4, where no such pair exists.
    """
    from .constructions import aak_family

    if t < 2:
        raise ValueError("requires t >= 2")
    if s < 1:
        raise ValueError("requires s >= 1")
    if s <= 4:
        return None
    fam = aak_family(s, t)
    a = 1 | (1 << s) | (1 << (s + 1))          # {1, s+1, s+2}
    b = full_mask(s) ^ 1                        # {2, ..., s}
    if a not in fam or b not in fam or (a & b):
        raise AssertionError("constructed witness is malformed")
    if any((a | x) in fam for x in iter_bits(b)):
        raise AssertionError("constructed pair is not a violation")
    return Witness(Condition.ORDERED, a, b, _DETAIL_ORDERED_SIZE)
