"""The shipped family constructions and their exact size/rank formulas.

Three constructions (plus the power set as a fixture):

  * ``aak_family(s, t)``: ground set split into t consecutive blocks of size
    s; a set belongs iff at most one block meets it in 2+ elements ("at most
    one heavy block").  Exact size (t*2^s - (s+1)(t-1)) * (s+1)^(t-1).
  * ``tight_rank_family(n)``: blocks of sizes 1, 2, ..., k-1, n - C(k,2)
    where k = kmax(n); a nonempty set belongs iff every block after its
    first nonempty block meets it in at most one element.  Atomic, passes
    the weak exchange check, and achieves the minimum possible rank.
  * ``thm3_family(n, k)``: ground set split into n/k blocks of size k; a set
    belongs iff at most one block is fully covered and, for 2 <= i <= k-1,
    at most 2^(k-1-i) blocks meet it in i or more elements.  Atomic,
    downward closed, passes the strong ordered check, rank n/k + 2^(k-2).

Each implicit family carries a scalar membership predicate, a vectorized
batch predicate used by full-range scans, and a structured enumerator that
works past the scan limit by generating per-block choices directly.
"""

from __future__ import annotations

from itertools import combinations, product
from math import ceil, comb
from typing import Iterator

import numpy as np

from .core import (
    Family,
    Partition,
    ProfileVector,
    SCAN_LIMIT,
    bit,
    consecutive_blocks,
    full_mask,
    popcount_batch,
)
from .search import kmax


# -- the heavy-block construction -------------------------------------------


def aak_size(s: int, t: int) -> int:
    """Exact member count of aak_family(s, t)."""
    if s < 1 or t < 1:
        raise ValueError("s and t must be >= 1")
    return (t * (1 << s) - (s + 1) * (t - 1)) * (s + 1) ** (t - 1)


def aak_partition(s: int, t: int) -> Partition:
    return consecutive_blocks([s] * t)


def _aak_member(s: int, t: int, mask: int) -> bool:
    part = full_mask(s)
    heavy = 0
    for j in range(t):
        if ((mask >> (j * s)) & part).bit_count() >= 2:
            heavy += 1
            if heavy > 1:
                return False
    return True


def _aak_batch(s: int, t: int):
    pm = np.uint64(full_mask(s))

    def batch(arr: np.ndarray) -> np.ndarray:
        arr = arr.astype(np.uint64, copy=False)
        heavy = np.zeros(arr.shape, dtype=np.int64)
        for j in range(t):
            cnt = popcount_batch((arr >> np.uint64(j * s)) & pm)
            heavy += cnt >= 2
        return heavy <= 1

    return batch


def _light_choices(part_elements: list[int]) -> list[int]:
    """Masks usable in a block capped at one element: empty or a singleton."""
    return [0] + [bit(e) for e in part_elements]


def _aak_structured(s: int, t: int) -> Iterator[int]:
    """Yield every member exactly once, grouped by the heavy block (if any)."""
    blocks = [[j * s + e for e in range(1, s + 1)] for j in range(t)]
    light = [_light_choices(b) for b in blocks]
    for combo in product(*light):
        m = 0
        for c in combo:
            m |= c
        yield m
    for i in range(t):
        others = light[:i] + light[i + 1 :]
        for r in range(2, s + 1):
            for heavy_elems in combinations(blocks[i], r):
                heavy = 0
                for e in heavy_elems:
                    heavy |= bit(e)
                for combo in product(*others):
                    m = heavy
                    for c in combo:
                        m |= c
                    yield m


def aak_family(s: int, t: int) -> Family:
    """Implicit family with at most one heavy block; ground set [s*t]."""
    if s < 1 or t < 1:
        raise ValueError("s and t must be >= 1")
    n = s * t
    return Family.implicit(
        n,
        f"aak(s={s},t={t})",
        lambda m: _aak_member(s, t, m),
        enumerator=lambda: _aak_structured(s, t),
        size_fn=lambda: aak_size(s, t),
        rank_fn=lambda: s + t - 1,
        batch_membership=_aak_batch(s, t),
    )


def choose_aak_params(n: int) -> tuple[int, int]:
    """Exact minimizer of aak_size(s, ceil(n/s)) over 1 <= s <= n.

    The ground set is padded up to s*t >= n; ties break toward smaller s.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    best: tuple[int, tuple[int, int]] | None = None
    for s in range(1, n + 1):
        t = ceil(n / s)
        size = aak_size(s, t)
        if best is None or size < best[0]:
            best = (size, (s, t))
    assert best is not None
    return best[1]


# -- the minimum-rank construction -------------------------------------------


def tight_part_sizes(n: int) -> list[int]:
    """Block sizes 1, ..., k-1 and n - C(k,2), where k = kmax(n)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    k = kmax(n)
    sizes = list(range(1, k)) + [n - comb(k, 2)]
    assert sum(sizes) == n and 1 <= sizes[-1] <= k
    return sizes


def _tight_member(parts: tuple[int, ...], mask: int) -> bool:
    if mask == 0:
        return True
    seen_first = False
    for part in parts:
        c = (mask & part).bit_count()
        if seen_first and c >= 2:
            return False
        if not seen_first and c > 0:
            seen_first = True
    return True


def _tight_batch(sizes: list[int]):
    t = len(sizes)
    offs = np.cumsum([0] + sizes[:-1])
    pms = [np.uint64(full_mask(w)) for w in sizes]

    def batch(arr: np.ndarray) -> np.ndarray:
        arr = arr.astype(np.uint64, copy=False)
        cnts = np.empty((t, arr.shape[0]), dtype=np.int64)
        for j in range(t):
            cnts[j] = popcount_batch((arr >> np.uint64(offs[j])) & pms[j])
        nonempty = cnts > 0
        heavy = cnts > 1
        has_heavy = heavy.any(axis=0)
        first_ne = nonempty.argmax(axis=0)
        last_heavy = (t - 1) - heavy[::-1].argmax(axis=0)
        return ~has_heavy | (last_heavy <= first_ne)

    return batch


def _tight_structured(sizes: list[int]) -> Iterator[int]:
    """Members keyed by their first nonempty block: free there, light after."""
    yield 0
    offsets = []
    lo = 0
    for w in sizes:
        offsets.append(lo)
        lo += w
    blocks = [[offsets[j] + e for e in range(1, w + 1)] for j, w in enumerate(sizes)]
    for i, w in enumerate(sizes):
        later = [_light_choices(blocks[j]) for j in range(i + 1, len(sizes))]
        for v in range(1, 1 << w):
            head = v << offsets[i]
            for combo in product(*later):
                m = head
                for c in combo:
                    m |= c
                yield m


def tight_size(n: int) -> int:
    """Exact member count of tight_rank_family(n)."""
    sizes = tight_part_sizes(n)
    total = 1
    for i, w in enumerate(sizes):
        prod = 1
        for w2 in sizes[i + 1 :]:
            prod *= w2 + 1
        total += ((1 << w) - 1) * prod
    return total


def tight_rank_family(n: int) -> Family:
    """Atomic family of minimum possible rank under weak exchange."""
    sizes = tight_part_sizes(n)
    parts = consecutive_blocks(sizes).parts
    return Family.implicit(
        n,
        f"tight(n={n})",
        lambda m: _tight_member(parts, m),
        enumerator=lambda: _tight_structured(sizes),
        size_fn=lambda: tight_size(n),
        rank_fn=lambda: kmax(n),
        batch_membership=_tight_batch(sizes),
    )


# -- the capped-suffix-profile construction ----------------------------------


def thm3_check_params(n: int, k: int) -> None:
    if n < 3 or k < 3:
        raise ValueError("requires n >= 3 and k >= 3")
    if n % k != 0:
        raise ValueError("requires k to divide n")
    if (1 << (k - 2)) > n // k:
        raise ValueError("requires 2^(k-2) <= n/k")


def thm3_partition(n: int, k: int) -> Partition:
    return consecutive_blocks([k] * (n // k))


def _thm3_cap(k: int, i: int) -> int:
    """Largest allowed number of blocks meeting a member in >= i elements."""
    if i >= k:
        return 1
    return 1 << (k - 1 - i)


def _thm3_member(n: int, k: int, mask: int) -> bool:
    t = n // k
    part = full_mask(k)
    counts = [((mask >> (j * k)) & part).bit_count() for j in range(t)]
    if sum(1 for c in counts if c >= k) > 1:
        return False
    for i in range(2, k):
        if sum(1 for c in counts if c >= i) > (1 << (k - 1 - i)):
            return False
    return True


def _thm3_batch(n: int, k: int):
    t = n // k
    pm = np.uint64(full_mask(k))

    def batch(arr: np.ndarray) -> np.ndarray:
        arr = arr.astype(np.uint64, copy=False)
        cnts = np.empty((t, arr.shape[0]), dtype=np.int64)
        for j in range(t):
            cnts[j] = popcount_batch((arr >> np.uint64(j * k)) & pm)
        ok = (cnts >= k).sum(axis=0) <= 1
        for i in range(2, k):
            ok &= (cnts >= i).sum(axis=0) <= (1 << (k - 1 - i))
        return ok

    return batch


def _thm3_structured(n: int, k: int) -> Iterator[int]:
    """Recurse over blocks, pruning as soon as a suffix cap is exhausted."""
    t = n // k
    blocks = [[j * k + e for e in range(1, k + 1)] for j in range(t)]
    # per block j and size c, the masks of all c-subsets of block j
    choices = [
        {
            c: [sum(bit(e) for e in combo) for combo in combinations(blocks[j], c)]
            for c in range(k + 1)
        }
        for j in range(t)
    ]
    caps = [0, 0] + [_thm3_cap(k, i) for i in range(2, k + 1)]

    def rec(j: int, used: list[int], acc: int) -> Iterator[int]:
        if j == t:
            yield acc
            return
        for c in range(k + 1):
            if c >= 2:
                # a full threshold i <= c stays full for every larger c
                if any(used[i] + 1 > caps[i] for i in range(2, c + 1)):
                    break
                for i in range(2, c + 1):
                    used[i] += 1
            for sub in choices[j][c]:
                yield from rec(j + 1, used, acc | sub)
            if c >= 2:
                for i in range(2, c + 1):
                    used[i] -= 1

    yield from rec(0, [0] * (k + 1), 0)


def thm3_family(n: int, k: int) -> Family:
    """Implicit capped-suffix-profile family; atomic and downward closed."""
    thm3_check_params(n, k)
    return Family.implicit(
        n,
        f"thm3(n={n},k={k})",
        lambda m: _thm3_member(n, k, m),
        enumerator=lambda: _thm3_structured(n, k),
        rank_fn=lambda: thm3_rank(n, k),
        batch_membership=_thm3_batch(n, k),
    )


def thm3_rank(n: int, k: int) -> int:
    """Largest member size: n/k + 2^(k-2)."""
    thm3_check_params(n, k)
    return n // k + (1 << (k - 2))


def thm3_max_profile(n: int, k: int) -> ProfileVector:
    """Profile of a maximum-size member: every suffix count saturated."""
    thm3_check_params(n, k)
    t = n // k
    s_by_i = [0] * (k + 1)
    s_by_i[k] = 1
    for i in range(2, k):
        s_by_i[i] = 1 << (k - 1 - i)
    s_by_i[1] = t
    s_by_i[0] = t
    p_by_i = [0] * (k + 1)
    for i in range(k + 1):
        upper = s_by_i[i + 1] if i + 1 <= k else 0
        p_by_i[i] = s_by_i[i] - upper
    return ProfileVector(k, tuple(p_by_i[::-1]), tuple(s_by_i[::-1]))


def thm3_size(n: int, k: int) -> int:
    """Exact member count via block-size compositions (no enumeration).

    Sums, over admissible vectors (m_0, ..., m_k) where m_c blocks meet the
    member in exactly c elements, the product of block assignments
    C(t, ...) multinomial times prod C(k, c)^(m_c).
    """
    thm3_check_params(n, k)
    t = n // k
    caps = {i: _thm3_cap(k, i) for i in range(2, k + 1)}

    total = 0

    def rec(c: int, blocks_left: int, suffix: int, ways: int) -> None:
        # suffix = number of blocks already assigned more than c elements
        nonlocal total
        if c == 0:
            total += ways  # all remaining blocks meet the member in 0 elements
            return
        for m_c in range(0, blocks_left + 1):
            s_c = suffix + m_c
            if c >= 2 and s_c > caps[c]:
                break
            rec(
                c - 1,
                blocks_left - m_c,
                s_c,
                ways * comb(blocks_left, m_c) * comb(k, c) ** m_c,
            )

    rec(k, t, 0, 1)
    return total


# -- the power set fixture -----------------------------------------------------


def powerset_family(n: int) -> Family:
    """All 2^n subsets.  Enumeration is capped at n <= 20."""
    if n < 0:
        raise ValueError("n must be >= 0")
    return Family.implicit(
        n,
        f"powerset(n={n})",
        lambda m: True,
        size_fn=lambda: 1 << n,
        rank_fn=lambda: n,
        batch_membership=lambda arr: np.ones(arr.shape, dtype=bool),
        scan_limit=min(SCAN_LIMIT, 20),
    )
