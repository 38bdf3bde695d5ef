"""Ground sets, bitmask subsets, set families, profile vectors, file format.

Conventions used throughout the package:

  * The ground set is [n] = {1, ..., n}.  A subset is stored as a plain
    Python int bitmask where element i occupies bit i-1.  Bits at or above
    position n are always zero.
  * Explicit enumeration paths are capped at n <= 64; implicit membership
    oracles may accept larger ground sets.
  * The canonical order of a list of subsets is ascending cardinality, then
    ascending numeric value of the bitmask.  All serialized output uses it.
  * A family is either explicit (a deduplicated canonical tuple of masks) or
    implicit (membership predicate, plus optional enumerator, closed-form
    size, closed-form rank, and a vectorized batch predicate).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Optional

import numpy as np

EXPLICIT_LIMIT = 64   # hard cap for explicit subset representations
SCAN_LIMIT = 24       # filtered 2^n scans allowed up to this n
POWERSET_ENUM_LIMIT = 20


class ScaleError(RuntimeError):
    """An operation was asked to run beyond its enforced size limit."""


class FamilyFormatError(ValueError):
    """Malformed family file text."""


def full_mask(n: int) -> int:
    return (1 << n) - 1


def bit(element: int) -> int:
    """Mask holding the single element `element` (1-based)."""
    return 1 << (element - 1)


def mask_of(elements: Iterable[int]) -> int:
    m = 0
    for e in elements:
        m |= 1 << (e - 1)
    return m


def elements(mask: int) -> list[int]:
    """Elements of the mask in ascending order (1-based)."""
    out = []
    e = 1
    while mask:
        if mask & 1:
            out.append(e)
        mask >>= 1
        e += 1
    return out


def iter_bits(mask: int) -> Iterator[int]:
    """Yield single-bit masks of `mask`, lowest first."""
    while mask:
        low = mask & -mask
        yield low
        mask ^= low


def canon_key(mask: int) -> tuple[int, int]:
    """Sort key realizing the canonical order: cardinality, then value."""
    return (mask.bit_count(), mask)


def set_text(mask: int) -> str:
    """Human-readable form, e.g. ``{1,2,6}``; ``{}`` for the empty set."""
    return "{" + ",".join(str(e) for e in elements(mask)) + "}"


_POP16 = np.array([bin(i).count("1") for i in range(1 << 16)], dtype=np.uint8)


def popcount_batch(arr: np.ndarray) -> np.ndarray:
    """Per-element popcount of an unsigned integer array."""
    if hasattr(np, "bitwise_count"):
        return np.bitwise_count(arr)
    lo = _POP16[arr & np.uint64(0xFFFF)]
    mid = _POP16[(arr >> np.uint64(16)) & np.uint64(0xFFFF)]
    hi = _POP16[(arr >> np.uint64(32)) & np.uint64(0xFFFF)]
    top = _POP16[(arr >> np.uint64(48)) & np.uint64(0xFFFF)]
    return lo.astype(np.int64) + mid + hi + top


@dataclass(frozen=True)
class GroundSet:
    """The universe [n].  n = 0 is the degenerate empty universe."""

    n: int

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError(f"ground set size must be non-negative, got {self.n}")

    @property
    def mask(self) -> int:
        return full_mask(self.n)

    def check_explicit(self) -> None:
        if self.n > EXPLICIT_LIMIT:
            raise ScaleError(
                f"explicit enumeration capped at n <= {EXPLICIT_LIMIT}, got n={self.n}"
            )


@dataclass(frozen=True)
class Partition:
    """An ordered partition of [n] into pairwise-disjoint nonempty parts."""

    n: int
    parts: tuple[int, ...]

    def __post_init__(self) -> None:
        union = 0
        for p in self.parts:
            if p == 0:
                raise ValueError("empty part")
            if union & p:
                raise ValueError("parts overlap")
            union |= p
        if union != full_mask(self.n):
            raise ValueError("parts do not cover the ground set")

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(p.bit_count() for p in self.parts)

    def is_equipartition(self) -> bool:
        sizes = self.sizes
        return len(set(sizes)) <= 1


def consecutive_blocks(sizes: Iterable[int]) -> Partition:
    """Partition of [sum(sizes)] into consecutive blocks of the given sizes."""
    parts = []
    lo = 0
    for w in sizes:
        if w <= 0:
            raise ValueError("part sizes must be positive")
        parts.append(full_mask(w) << lo)
        lo += w
    return Partition(lo, tuple(parts))


@dataclass(frozen=True)
class ProfileVector:
    """Per-part intersection counts of a set against an equipartition.

    ``p`` and ``s`` are stored in descending index order, p = (p(k), ..., p(0))
    and s = (s(k), ..., s(0)), where p(i) counts parts meeting the set in
    exactly i elements and s(i) counts parts meeting it in at least i.
    """

    k: int
    p: tuple[int, ...]
    s: tuple[int, ...]

    def p_of(self, i: int) -> int:
        return self.p[self.k - i]

    def s_of(self, i: int) -> int:
        return self.s[self.k - i]

    @property
    def num_parts(self) -> int:
        return self.s_of(0)

    @property
    def weight(self) -> int:
        """Total number of elements, sum of i * p(i)."""
        return sum(i * self.p_of(i) for i in range(1, self.k + 1))


def profile(mask: int, partition: Partition) -> ProfileVector:
    """Profile of a subset against an equipartition into parts of size k."""
    if not partition.is_equipartition():
        raise ValueError("unequal parts")
    k = partition.sizes[0] if partition.parts else 0
    counts = [0] * (k + 1)
    for part in partition.parts:
        counts[(mask & part).bit_count()] += 1
    p_desc = tuple(counts[::-1])
    s_asc = []
    running = 0
    for i in range(k, -1, -1):
        running += counts[i]
        s_asc.append(running)
    # s_asc holds s(k), s(k-1), ..., s(0) already in descending index order
    return ProfileVector(k, p_desc, tuple(s_asc))


BatchPredicate = Callable[[np.ndarray], np.ndarray]


class Family:
    """A set system over [n].

    Explicit families store a canonical, deduplicated tuple of masks.
    Implicit families are defined by a membership predicate and may carry a
    structured enumerator (used past the 2^n scan limit), a closed-form size,
    a closed-form rank, and a vectorized batch predicate for fast scans.
    Families are immutable; every query is pure.
    """

    def __init__(
        self,
        ground: GroundSet,
        *,
        name: str,
        members: Optional[tuple[int, ...]] = None,
        membership: Optional[Callable[[int], bool]] = None,
        enumerator: Optional[Callable[[], Iterator[int]]] = None,
        size_fn: Optional[Callable[[], int]] = None,
        rank_fn: Optional[Callable[[], int]] = None,
        batch_membership: Optional[BatchPredicate] = None,
        scan_limit: int = SCAN_LIMIT,
    ) -> None:
        self.ground = ground
        self.name = name
        self._members = members
        self._membership = membership
        self._enumerator = enumerator
        self.size_fn = size_fn
        self.rank_fn = rank_fn
        self._batch = batch_membership
        self._scan_limit = scan_limit
        self._member_set: Optional[frozenset[int]] = None

    # -- constructors ------------------------------------------------------

    @classmethod
    def explicit(cls, n: int, masks: Iterable[int], name: str = "explicit") -> "Family":
        ground = GroundSet(n)
        ground.check_explicit()
        uniq = set(masks)
        for m in uniq:
            if m & ~ground.mask:
                raise ValueError(f"mask {m} has elements outside 1..{n}")
        ordered = tuple(sorted(uniq, key=canon_key))
        return cls(ground, name=name, members=ordered)

    @classmethod
    def implicit(
        cls,
        n: int,
        name: str,
        membership: Callable[[int], bool],
        *,
        enumerator: Optional[Callable[[], Iterator[int]]] = None,
        size_fn: Optional[Callable[[], int]] = None,
        rank_fn: Optional[Callable[[], int]] = None,
        batch_membership: Optional[BatchPredicate] = None,
        scan_limit: int = SCAN_LIMIT,
    ) -> "Family":
        return cls(
            GroundSet(n),
            name=name,
            membership=membership,
            enumerator=enumerator,
            size_fn=size_fn,
            rank_fn=rank_fn,
            batch_membership=batch_membership,
            scan_limit=scan_limit,
        )

    # -- basic queries -----------------------------------------------------

    @property
    def n(self) -> int:
        return self.ground.n

    @property
    def is_explicit(self) -> bool:
        return self._members is not None

    def __contains__(self, mask: int) -> bool:
        if mask & ~self.ground.mask:
            return False
        if self._members is not None:
            return mask in self.member_set()
        assert self._membership is not None
        return bool(self._membership(mask))

    def __repr__(self) -> str:
        size = len(self._members) if self._members is not None else "?"
        return f"Family({self.name}, n={self.n}, size={size})"

    # -- enumeration -------------------------------------------------------

    def members(self) -> Iterator[int]:
        """Yield every member exactly once (order unspecified)."""
        if self._members is not None:
            yield from self._members
            return
        if self.n <= self._scan_limit:
            yield from self._scan()
            return
        if self._enumerator is not None:
            yield from self._enumerator()
            return
        raise ScaleError(
            f"cannot enumerate {self.name}: n={self.n} exceeds the scan limit "
            f"and no structured enumerator is available"
        )

    def _scan(self) -> Iterator[int]:
        total = 1 << self.n
        if self._batch is not None:
            chunk = 1 << 20
            for lo in range(0, total, chunk):
                arr = np.arange(lo, min(lo + chunk, total), dtype=np.uint64)
                hits = arr[self._batch(arr)]
                for m in hits.tolist():
                    yield int(m)
        else:
            assert self._membership is not None
            pred = self._membership
            for m in range(total):
                if pred(m):
                    yield m

    def member_set(self) -> frozenset[int]:
        if self._member_set is None:
            if self._members is not None:
                self._member_set = frozenset(self._members)
            else:
                self._member_set = frozenset(self.members())
        return self._member_set

    def canonical_members(self) -> tuple[int, ...]:
        if self._members is not None:
            return self._members
        return tuple(sorted(self.member_set(), key=canon_key))

    def to_explicit(self) -> "Family":
        if self.is_explicit:
            return self
        return Family.explicit(self.n, self.member_set(), name=self.name)

    def count_enumerated(self) -> int:
        """Exact member count obtained by running the membership scan."""
        if self._members is not None:
            return len(self._members)
        if self.n <= self._scan_limit and self._batch is not None:
            total = 1 << self.n
            chunk = 1 << 20
            cnt = 0
            for lo in range(0, total, chunk):
                arr = np.arange(lo, min(lo + chunk, total), dtype=np.uint64)
                cnt += int(np.count_nonzero(self._batch(arr)))
            return cnt
        cnt = 0
        for _ in self.members():
            cnt += 1
        return cnt


# -- predicates on families ------------------------------------------------


def is_atomic(family: Family) -> bool:
    """True iff the empty set and every singleton belong to the family."""
    if 0 not in family:
        return False
    return all(bit(e) in family for e in range(1, family.n + 1))


def is_downward_closed(family: Family) -> bool:
    """True iff deleting any one element of any member stays in the family.

    One-element deletions suffice: iterating deletions reaches every subset.
    """
    mem = family.member_set()
    for m in mem:
        rest = m
        while rest:
            low = rest & -rest
            if (m ^ low) not in mem:
                return False
            rest ^= low
    return True


def rank(family: Family) -> int:
    """Size of the largest member; 0 for {0}; error for the empty family."""
    if not family.is_explicit and family.rank_fn is not None:
        return family.rank_fn()
    best = -1
    for m in family.members():
        c = m.bit_count()
        if c > best:
            best = c
    if best < 0:
        raise ValueError("empty family")
    return best


def rank_enumerated(family: Family) -> int:
    """Rank by full enumeration, ignoring any closed-form rank."""
    best = -1
    for m in family.members():
        best = max(best, m.bit_count())
    if best < 0:
        raise ValueError("empty family")
    return best


# -- family file format ------------------------------------------------------
#
# UTF-8 text.  Lines starting with '#' are comments.  The first meaningful
# line is 'n <N>' with 1 <= N <= 64.  Each later non-blank line is either '-'
# (the empty set) or strictly increasing integers in 1..N separated by single
# spaces.  Duplicate sets are an error.


def parse_family(text: str) -> Family:
    n: Optional[int] = None
    masks: list[int] = []
    seen: set[int] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\n")
        if line.startswith("#") or line.strip() == "":
            continue
        if n is None:
            tokens = line.split(" ")
            if len(tokens) != 2 or tokens[0] != "n" or not tokens[1].isdigit():
                raise FamilyFormatError(f"line {lineno}: missing header 'n <N>'")
            n = int(tokens[1])
            if n < 1:
                raise FamilyFormatError(f"line {lineno}: n must be >= 1")
            if n > EXPLICIT_LIMIT:
                raise FamilyFormatError(
                    f"line {lineno}: n={n} exceeds the explicit limit {EXPLICIT_LIMIT}"
                )
            continue
        if line == "-":
            m = 0
        else:
            tokens = line.split(" ")
            vals = []
            for tok in tokens:
                if not tok.isdigit():
                    raise FamilyFormatError(f"line {lineno}: malformed line {line!r}")
                vals.append(int(tok))
            for prev, cur in zip(vals, vals[1:]):
                if cur <= prev:
                    raise FamilyFormatError(f"line {lineno}: non-increasing line")
            for v in vals:
                if not (1 <= v <= n):
                    raise FamilyFormatError(f"line {lineno}: element out of range: {v}")
            m = mask_of(vals)
        if m in seen:
            raise FamilyFormatError(f"line {lineno}: duplicate set")
        seen.add(m)
        masks.append(m)
    if n is None:
        raise FamilyFormatError("missing header 'n <N>'")
    return Family.explicit(n, masks, name="file")


def serialize_family(family: Family) -> str:
    """Canonical text form: header, then members in canonical order."""
    if family.n < 1:
        raise ValueError("family file format requires n >= 1")
    if family.n > EXPLICIT_LIMIT:
        raise ScaleError(f"cannot serialize families with n > {EXPLICIT_LIMIT}")
    lines = [f"n {family.n}"]
    for m in family.canonical_members():
        lines.append("-" if m == 0 else " ".join(str(e) for e in elements(m)))
    return "\n".join(lines) + "\n"
