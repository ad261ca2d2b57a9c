"""
Exact unitary Weingarten calculus at finite dimension.

The Weingarten function Wg(sigma, n) on S_k is the inverse of the Gram
form G(sigma, tau) = n^(#cycles of sigma^-1 tau) in the group algebra:
sum_tau G(sigma, tau) Wg(tau, n) = [sigma = id].  Since both G and Wg are
constant on conjugacy classes, the inversion is performed exactly (big
rationals, Gaussian elimination) on the class-collapsed system, which
keeps degree 6 instantaneous instead of inverting a 720 x 720 matrix.

On top of the table sits the expectation oracle for traces of words in a
Haar unitary: for matrices A_1..A_k, B_1..B_k,

  E[Tr_sigma(A_1 U B_1 U*, ..., A_k U B_k U*)]
    = sum over sigma_1 sigma_2 sigma_3 = sigma of
        Tr_sigma1(A) Tr_sigma2(B) Wg(sigma_3, n),

a Monte-Carlo-free evaluation of Haar averages.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import CapacityError
from .symgroup import (
    DEFAULT_MAX_DEGREE,
    Permutation,
    compose,
    conjugacy_class_representatives,
    cycle_type,
    cycles,
    enumerate_permutations,
    identity,
    inverse,
    length,
    moebius,
)


class SingularGramError(ValueError):
    """The Gram form is singular: Wg(., n) needs n >= k."""


# (k, n) -> {cycle_type: Fraction}; inserts are idempotent, so concurrent
# readers after first use are safe without locking.
_TABLE_CACHE: dict[tuple[int, int], dict[tuple[int, ...], Fraction]] = {}


def gram_matrix(k: int, n: int, max_degree: int = DEFAULT_MAX_DEGREE) -> list[list[int]]:
    """
    The S_k x S_k matrix with entries n^(#cycles(sigma^-1 tau)), rows and
    columns indexed by enumerate_permutations(k).  Exact integers.
    """
    if n < 1:
        raise ValueError(f"dimension must be positive, got {n}")
    perms = enumerate_permutations(k, max_degree=max_degree)
    return [
        [n ** len(cycles(compose(inverse(sigma), tau))) for tau in perms]
        for sigma in perms
    ]


def _solve_fraction(mat: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    """Exact Gaussian elimination with partial (first nonzero) pivoting."""
    m = len(mat)
    a = [row[:] + [rhs[i]] for i, row in enumerate(mat)]
    for col in range(m):
        pivot = next((r for r in range(col, m) if a[r][col] != 0), None)
        if pivot is None:
            raise SingularGramError("Gram system is singular")
        a[col], a[pivot] = a[pivot], a[col]
        inv_p = Fraction(1) / a[col][col]
        a[col] = [x * inv_p for x in a[col]]
        for r in range(m):
            if r != col and a[r][col] != 0:
                factor = a[r][col]
                a[r] = [x - factor * y for x, y in zip(a[r], a[col])]
    return [a[r][m] for r in range(m)]


def weingarten_table(
    k: int, n: int, max_degree: int = DEFAULT_MAX_DEGREE
) -> dict[tuple[int, ...], Fraction]:
    """
    Exact Wg(., n) on S_k as a map from cycle type to rational value.

    Requires n >= k so that the Gram form is invertible.
    """
    if k < 1:
        raise ValueError(f"degree must be positive, got {k}")
    if k > max_degree:
        raise CapacityError(
            f"Weingarten degree {k} exceeds the limit {max_degree}; "
            f"pass a larger max_degree to opt in"
        )
    if n < k:
        raise SingularGramError(
            f"Wg(., n) is defined here only for n >= k (got k={k}, n={n}); "
            f"the Gram form is singular below that"
        )
    key = (k, n)
    cached = _TABLE_CACHE.get(key)
    if cached is not None:
        return cached

    reps = conjugacy_class_representatives(k)
    types = [cycle_type(rep) for rep in reps]
    perms = enumerate_permutations(k, max_degree=max_degree)
    by_type: dict[tuple[int, ...], list[Permutation]] = {t: [] for t in types}
    for tau in perms:
        by_type[cycle_type(tau)].append(tau)

    # Collapse the Gram form onto class functions: row per class
    # representative, column per class, summing over the class.
    mat = []
    for rep in reps:
        rep_inv = inverse(rep)
        row = []
        for t in types:
            row.append(Fraction(sum(n ** len(cycles(compose(rep_inv, tau))) for tau in by_type[t])))
        mat.append(row)
    rhs = [Fraction(1 if t == tuple([1] * k) else 0) for t in types]
    solution = _solve_fraction(mat, rhs)

    table = dict(zip(types, solution))
    _TABLE_CACHE.setdefault(key, table)
    return _TABLE_CACHE[key]


def weingarten_exact(
    sigma: Permutation, n: int, max_degree: int = DEFAULT_MAX_DEGREE
) -> Fraction:
    """Exact rational Wg(sigma, n); constant on conjugacy classes."""
    return weingarten_table(len(sigma), n, max_degree=max_degree)[cycle_type(sigma)]


def weingarten_asymptotic(sigma: Permutation, n: int) -> float:
    """
    Leading-order value n^(-k-|sigma|) Moeb(sigma); the exact function
    differs from this by a relative O(n^-2).
    """
    if n < 1:
        raise ValueError(f"dimension must be positive, got {n}")
    k = len(sigma)
    return moebius(sigma) * float(n) ** (-(k + length(sigma)))


def tr_sigma(mats, sigma: Permutation) -> complex:
    """
    Product over the cycles (i1 i2 ... im) of sigma of
    Tr(mats[i1] mats[i2] ... mats[im]), following orbit order.
    """
    if len(mats) != len(sigma):
        raise ValueError(f"need {len(sigma)} matrices, got {len(mats)}")
    n = mats[0].shape[0]
    for m in mats:
        if m.shape != (n, n):
            raise ValueError("matrices must be square and of equal dimension")
    out = complex(1.0)
    for cycle in cycles(sigma):
        prod = mats[cycle[0]]
        for i in cycle[1:]:
            prod = prod @ mats[i]
        out *= complex(np.trace(prod))
    return out


@dataclass(frozen=True)
class TraceWordSpec:
    """A trace pattern sigma together with the k left/right matrix factors."""

    sigma: Permutation
    a_mats: tuple[np.ndarray, ...]
    b_mats: tuple[np.ndarray, ...]

    def __post_init__(self):
        k = len(self.sigma)
        if len(self.a_mats) != k or len(self.b_mats) != k:
            raise ValueError(f"need {k} A- and B-matrices for a degree-{k} pattern")
        n = self.a_mats[0].shape[0]
        for m in (*self.a_mats, *self.b_mats):
            if m.shape != (n, n):
                raise ValueError("matrices must be square and of equal dimension")

    @property
    def n(self) -> int:
        return self.a_mats[0].shape[0]


def expected_trace_product(
    spec: TraceWordSpec, max_degree: int = DEFAULT_MAX_DEGREE
) -> complex:
    """
    Exact Haar expectation E[Tr_sigma(A_1 U B_1 U*, ..., A_k U B_k U*)].

    Evaluates the (k!)^2 sum over factorizations sigma_1 sigma_2 sigma_3
    = sigma, with Wg values kept rational until each final product.  The
    summation order is fixed by permutation index, so results are
    bit-reproducible however the loop is partitioned.
    """
    k = len(spec.sigma)
    n = spec.n
    table = weingarten_table(k, n, max_degree=max_degree)
    perms = enumerate_permutations(k, max_degree=max_degree)
    tr_a = [tr_sigma(spec.a_mats, p) for p in perms]
    tr_b = [tr_sigma(spec.b_mats, p) for p in perms]
    inv = [inverse(p) for p in perms]

    total = complex(0.0)
    for i1, s1 in enumerate(perms):
        left = compose(inv[i1], spec.sigma)
        for i2, s2 in enumerate(perms):
            s3 = compose(inv[i2], left)
            total += tr_a[i1] * tr_b[i2] * float(table[cycle_type(s3)])
    return total


def write_table_csv(k: int, n: int, path, max_degree: int = DEFAULT_MAX_DEGREE) -> None:
    """Dump one (k, n) table as CSV with columns cycle_type,numerator,denominator."""
    table = weingarten_table(k, n, max_degree=max_degree)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("cycle_type,numerator,denominator\n")
        for ctype in sorted(table, reverse=True):
            value = table[ctype]
            label = "+".join(str(c) for c in ctype)
            fh.write(f"{label},{value.numerator},{value.denominator}\n")
