"""
Eigenvalue multisets of self-adjoint compact operators, stored as finite
truncations of properly arranged sequences.

A sequence is properly arranged when |r_1| >= |r_2| >= ...; the
arrangement is made unique by splitting into the nonnegative part
(lambda_i^+, nonincreasing) and the nonpositive part (lambda_i^-,
nondecreasing, i.e. most negative first).  Both parts are conceptually
padded with infinitely many zeros; operations document their behaviour
under that padding.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

DEFAULT_ZERO_TOLERANCE = 1e-10
DEFAULT_METRIC_TERMS = 64


@dataclass(frozen=True)
class Spectrum:
    """
    pos: values > 0, nonincreasing.
    neg: values < 0, nonincreasing in absolute value (most negative first).

    Exact zeros are not stored; they live in the implicit zero tail.
    """

    pos: tuple[float, ...] = ()
    neg: tuple[float, ...] = ()

    def __post_init__(self):
        if any(v <= 0 for v in self.pos) or any(v >= 0 for v in self.neg):
            raise ValueError("pos must hold positive values and neg negative values")
        if list(self.pos) != sorted(self.pos, reverse=True):
            raise ValueError("pos must be nonincreasing")
        if list(self.neg) != sorted(self.neg):
            raise ValueError("neg must be nondecreasing (most negative first)")

    def plus(self, i: int) -> float:
        """lambda_i^+ (1-based), zero beyond the stored truncation."""
        return self.pos[i - 1] if i <= len(self.pos) else 0.0

    def minus(self, i: int) -> float:
        """lambda_i^- (1-based), zero beyond the stored truncation."""
        return self.neg[i - 1] if i <= len(self.neg) else 0.0

    def merged(self, count: int | None = None) -> tuple[float, ...]:
        """
        The properly arranged merged view, ties in |value| between a
        positive and a negative entry broken positive-first.
        """
        out = []
        i = j = 0
        while i < len(self.pos) or j < len(self.neg):
            if j >= len(self.neg):
                out.append(self.pos[i]); i += 1
            elif i >= len(self.pos):
                out.append(self.neg[j]); j += 1
            elif self.pos[i] >= -self.neg[j]:
                out.append(self.pos[i]); i += 1
            else:
                out.append(self.neg[j]); j += 1
        if count is not None:
            out = out[:count] + [0.0] * max(0, count - len(out))
        return tuple(out)


EMPTY = Spectrum()


def properly_arrange(values, zero_tolerance: float = DEFAULT_ZERO_TOLERANCE) -> Spectrum:
    """
    Sort a finite list of reals into a Spectrum, snapping entries with
    |v| <= zero_tolerance to the zero tail.  Idempotent and invariant
    under permutation of the input.
    """
    vals = [float(v) for v in values]
    if any(math.isnan(v) for v in vals):
        raise ValueError("NaN eigenvalue in input")
    pos = sorted((v for v in vals if v > zero_tolerance), reverse=True)
    neg = sorted(v for v in vals if v < -zero_tolerance)
    return Spectrum(tuple(pos), tuple(neg))


def disjoint_union(s: Spectrum, t: Spectrum) -> Spectrum:
    """Multiset union, counting multiplicity."""
    return Spectrum(
        tuple(sorted(s.pos + t.pos, reverse=True)),
        tuple(sorted(s.neg + t.neg)),
    )


def scale(s: Spectrum, c: float) -> Spectrum:
    """
    Multiply every eigenvalue by c.  Negative c swaps the roles of the
    two parts; c = 0 gives the zero spectrum.
    """
    if c == 0:
        return EMPTY
    if c > 0:
        return Spectrum(tuple(c * v for v in s.pos), tuple(c * v for v in s.neg))
    return Spectrum(
        tuple(c * v for v in s.neg),
        tuple(sorted(c * v for v in s.pos)),
    )


def metric_d(s: Spectrum, t: Spectrum, terms: int = DEFAULT_METRIC_TERMS) -> float:
    """
    The eigenvalue-convergence metric

      sum_i 2^-i f(|l_i^+ - m_i^+|) + sum_i 2^-i f(|l_i^- - m_i^-|),

    f(x) = x/(1+x), truncated after `terms` entries of each part (the
    2^-i weights put the tail below double precision long before the
    default 64).  Symmetric, bounded by 2, and zero iff the two spectra
    agree on the compared entries.
    """
    if terms < 1:
        raise ValueError(f"terms must be >= 1, got {terms}")
    total = 0.0
    for i in range(1, terms + 1):
        dp = abs(s.plus(i) - t.plus(i))
        dm = abs(s.minus(i) - t.minus(i))
        total += (dp / (1.0 + dp) + dm / (1.0 + dm)) / 2.0 ** i
    return total


def moment(s: Spectrum, p: int) -> float:
    """
    Signed power sum sum_i (l_i^+)^p + sum_i (l_i^-)^p.  Additive under
    disjoint_union and homogeneous of degree p under scale.
    """
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    return sum(v ** p for v in s.pos) + sum(v ** p for v in s.neg)


def schatten_norm(s: Spectrum, p: int) -> float:
    """(sum_i |l_i|^p)^(1/p), the absolute-value companion of moment."""
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    return (sum(v ** p for v in s.pos) + sum(abs(v) ** p for v in s.neg)) ** (1.0 / p)


def to_json(s: Spectrum) -> dict:
    return {"pos": list(s.pos), "neg": list(s.neg)}


def from_json(obj: dict) -> Spectrum:
    return Spectrum(tuple(obj["pos"]), tuple(obj["neg"]))


def dumps(s: Spectrum) -> str:
    return json.dumps(to_json(s))


def write_csv(s: Spectrum, path) -> None:
    """CSV emitter with columns rank,value,sign_part (rank within each part)."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("rank,value,sign_part\n")
        for i, v in enumerate(s.pos, start=1):
            fh.write(f"{i},{v!r},+\n")
        for i, v in enumerate(s.neg, start=1):
            fh.write(f"{i},{v!r},-\n")
