"""
Symmetric-group and noncrossing-partition combinatorics.

Permutations of [0, n) are handled in one-line ("word") notation: the
permutation p is the tuple (p(0), ..., p(k-1)).  All indices are 0-based
internally; display helpers use 1-based cycle notation.

The second half of the module enumerates the noncrossing partitions of
{0, ..., n-1} whose blocks are singletons or pairs, with every pair block
at nesting depth 0 and every singleton at depth 0 or 1.  These index the
anticommutator and commutator moment expansions.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import CapacityError

# Group-algebra sums downstream cost (k!)^2; raising these is an explicit
# opt-in via the max_degree / max_points arguments.
DEFAULT_MAX_DEGREE = 6
DEFAULT_MAX_POINTS = 14

Permutation = tuple[int, ...]


def is_permutation(word: Sequence[int]) -> bool:
    """Check that word is a bijection of [0, n) written in one-line notation."""
    n = len(word)
    return sorted(word) == list(range(n))


def identity(k: int) -> Permutation:
    return tuple(range(k))


def compose(x: Sequence[int], y: Sequence[int]) -> Permutation:
    """Compose (x, y) -> x o y, applying y first: (x o y)(i) = x[y[i]]."""
    if len(x) != len(y):
        raise ValueError(f"cannot compose permutations of degrees {len(x)} and {len(y)}")
    return tuple(x[j] for j in y)


def inverse(perm: Sequence[int]) -> Permutation:
    inv = [0] * len(perm)
    for i, pi in enumerate(perm):
        inv[pi] = i
    return tuple(inv)


def transposition(k: int, i: int, j: int) -> Permutation:
    word = list(range(k))
    word[i], word[j] = word[j], word[i]
    return tuple(word)


def from_cycles(k: int, cycles: Iterable[Sequence[int]]) -> Permutation:
    """Build a permutation of [0, k) from disjoint cycles, e.g. [(0, 1, 2)]."""
    word = list(range(k))
    for cycle in cycles:
        for pos, i in enumerate(cycle):
            word[i] = cycle[(pos + 1) % len(cycle)]
    return tuple(word)


def cycles(perm: Sequence[int]) -> tuple[tuple[int, ...], ...]:
    """
    Disjoint cycles of perm, including fixed points.

    Each cycle starts at its smallest element and follows the orbit
    i -> perm[i] -> perm[perm[i]] -> ...; cycles are listed by smallest
    element.  This traversal order is what the per-cycle trace products
    in the Weingarten engine rely on.
    """
    seen = [False] * len(perm)
    out = []
    for i in range(len(perm)):
        if seen[i]:
            continue
        cycle = []
        pos = i
        while not seen[pos]:
            seen[pos] = True
            cycle.append(pos)
            pos = perm[pos]
        out.append(tuple(cycle))
    return tuple(out)


def cycle_type(perm: Sequence[int]) -> tuple[int, ...]:
    """Cycle lengths in nonincreasing order, e.g. (2, 1, 1) in S_4."""
    return tuple(sorted((len(c) for c in cycles(perm)), reverse=True))


def length(perm: Sequence[int]) -> int:
    """
    Minimal number of transpositions whose product is perm.

    Equals k minus the number of cycles (fixed points included).
    """
    return len(perm) - len(cycles(perm))


def catalan(p: int) -> int:
    """Catalan number (2p)! / (p! (p+1)!)."""
    return math.comb(2 * p, p) // (p + 1)


def moebius(perm: Sequence[int]) -> int:
    """
    Moebius weight of a permutation: the product over its cycles c of
    (-1)^(|c|-1) Cat_(|c|-1), where |c| is the cycle cardinality.

    This is the leading coefficient of the large-dimension expansion of
    the unitary Weingarten function.
    """
    out = 1
    for c in cycles(perm):
        m = len(c) - 1
        out *= (-1) ** m * catalan(m)
    return out


def enumerate_permutations(k: int, max_degree: int = DEFAULT_MAX_DEGREE) -> list[Permutation]:
    """All of S_k in lexicographic order of one-line notation."""
    if k < 1:
        raise ValueError(f"degree must be positive, got {k}")
    if k > max_degree:
        raise CapacityError(
            f"symmetric group degree {k} exceeds the limit {max_degree}; "
            f"pass a larger max_degree to opt in to (k!)^2-sized sums"
        )
    return list(itertools.permutations(range(k)))


def conjugacy_class_representatives(k: int) -> list[Permutation]:
    """One permutation per cycle type of S_k, built from integer partitions."""
    reps = []
    for part in _partitions(k):
        word = []
        start = 0
        for size in part:
            word.extend(list(range(start + 1, start + size)) + [start])
            start += size
        reps.append(tuple(word))
    return reps


def _partitions(k: int, largest: int | None = None) -> Iterable[tuple[int, ...]]:
    if k == 0:
        yield ()
        return
    if largest is None:
        largest = k
    for first in range(min(k, largest), 0, -1):
        for rest in _partitions(k - first, first):
            yield (first,) + rest


@dataclass(frozen=True)
class Nc121Partition:
    """
    A noncrossing partition of {0, ..., n-1} into singletons and pairs,
    with pairs at depth 0 and singletons at depth 0 or 1.

    blocks: the blocks, each a sorted tuple of size 1 or 2, ordered by
        smallest element.
    pair_count: number of pair blocks.
    inner_singleton_count: number of singletons lying strictly inside a
        pair block (i.e. at depth 1).
    """

    blocks: tuple[tuple[int, ...], ...]
    pair_count: int
    inner_singleton_count: int

    @property
    def n(self) -> int:
        return sum(len(b) for b in self.blocks)


def enumerate_nc121(n: int, max_points: int = DEFAULT_MAX_POINTS) -> list[Nc121Partition]:
    """
    Exhaustively enumerate the partitions described by Nc121Partition.

    Built by a left-to-right recursion over depth-0 positions: each
    position is either a depth-0 singleton or opens a pair block whose
    interior holds only depth-1 singletons.  Growth is 2^(n-1), so n is
    capped by max_points.
    """
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    if n > max_points:
        raise CapacityError(
            f"partition ground set size {n} exceeds the limit {max_points}; "
            f"pass a larger max_points to opt in to 2^n enumeration"
        )

    out: list[Nc121Partition] = []

    def build(pos: int, blocks: list[tuple[int, ...]], pairs: int, inner: int) -> None:
        if pos == n:
            ordered = tuple(sorted(blocks))
            out.append(Nc121Partition(ordered, pairs, inner))
            return
        # depth-0 singleton at pos
        blocks.append((pos,))
        build(pos + 1, blocks, pairs, inner)
        blocks.pop()
        # pair block (pos, end) with inner singletons strictly between
        for end in range(pos + 1, n):
            blocks.append((pos, end))
            for j in range(pos + 1, end):
                blocks.append((j,))
            build(end + 1, blocks, pairs + 1, inner + (end - pos - 1))
            del blocks[-(end - pos):]

    build(0, [], 0, 0)
    return out


def nc121_pair_singleton_count(n: int, m: int, ell: int) -> int:
    """
    Closed-form count of Nc121 partitions of n points with m pairs and
    ell inner singletons: C(ell+m-1, m-1) * C(n-m-ell, m), where the
    m = 0 case is read as 1 if ell = 0 and 0 otherwise.
    """
    if m == 0:
        return 1 if ell == 0 else 0
    return math.comb(ell + m - 1, m - 1) * math.comb(n - m - ell, m)


def _binom_with_delta(p: int, q: int) -> int:
    # binomial with the convention C(p, -1) = 1 iff p = -1, else 0
    if q == -1:
        return 1 if p == -1 else 0
    if q < -1 or p < 0 or q > p:
        return 0
    return math.comb(p, q)


def lem1_lhs(n: int, m: int) -> int:
    """
    The alternating pair/singleton count sum

        sum_{l=0}^{n-2m} C(l+m-1, m-1) C(n-l-m, m) (-1)^l,

    with C(p, -1) := delta_{p,-1}.  Evaluates to C(floor(n/2), m); the
    identity is checked exactly in the test suite.
    """
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    if not 0 <= m <= n // 2:
        raise ValueError(f"m must lie in [0, {n // 2}] for n={n}, got {m}")
    total = 0
    for ell in range(n - 2 * m + 1):
        term = _binom_with_delta(ell + m - 1, m - 1) * _binom_with_delta(n - ell - m, m)
        total += term if ell % 2 == 0 else -term
    return total


def cycle_notation(perm: Sequence[int]) -> str:
    """Human-readable 1-based cycle notation, fixed points omitted."""
    parts = [
        "(" + " ".join(str(i + 1) for i in c) + ")"
        for c in cycles(perm)
        if len(c) > 1
    ]
    return "".join(parts) if parts else "id"
