"""
Symbolic cyclic-monotone moment evaluation.

Words mix two generator families: an "a" family carrying a tracial
weight omega (think of the non-normalized trace on trace-class
operators) and a "b" family carrying a tracial state tau with tau(1)=1.
Cyclic monotone independence evaluates a mixed word by the rule

  (omega |> tau)(b0 a1 b1 a2 b2 ... a_m b_m)
      = omega(a1 a2 ... a_m) tau(b1) ... tau(b_{m-1}) tau(b0 b_m),

i.e. the a-letters concatenate under omega, interior b-runs factor under
tau, and the two boundary b-runs merge cyclically.  Mixed moments of
Muraki's monotone independence differ exactly in that boundary factor
(tau(b0) tau(b_m) instead of tau(b0 b_m)); only the cyclic variant is
implemented here.

Moment functionals are supplied either as finite matrix models (evaluate
the word on concrete matrices and trace) or as closed-form moment rules
for a single self-adjoint generator.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np


@dataclass(frozen=True)
class Letter:
    family: str  # "a" or "b"
    index: int = 0
    star: bool = False

    def __post_init__(self):
        if self.family not in ("a", "b"):
            raise ValueError(f"family must be 'a' or 'b', got {self.family!r}")

    def adjoint(self) -> "Letter":
        return Letter(self.family, self.index, not self.star)


Word = tuple[Letter, ...]


def a(index: int = 0, star: bool = False) -> Letter:
    return Letter("a", index, star)


def b(index: int = 0, star: bool = False) -> Letter:
    return Letter("b", index, star)


def word(*letters: Letter) -> Word:
    return tuple(letters)


def adjoint(w: Word) -> Word:
    """Reverse the word and flip every star."""
    return tuple(letter.adjoint() for letter in reversed(w))


class MomentFunctional:
    """
    A linear functional on single-family words, tagged with its family.

    For the "b" family the functional should be a state (value 1 on the
    empty word); for the "a" family a weight (no unit, so the empty word
    is rejected).
    """

    def __init__(self, family: str, fn: Callable[[Word], complex], generators: int | None = None):
        if family not in ("a", "b"):
            raise ValueError(f"family must be 'a' or 'b', got {family!r}")
        self.family = family
        self._fn = fn
        self.generators = generators

    def __call__(self, w: Word) -> complex:
        if not w:
            if self.family == "b":
                return 1.0 + 0.0j
            raise ValueError("the a-family weight is not defined on the empty word")
        for letter in w:
            if letter.family != self.family:
                raise ValueError(
                    f"{self.family}-family functional applied to a {letter.family}-letter"
                )
            if self.generators is not None and not 0 <= letter.index < self.generators:
                raise ValueError(
                    f"generator index {letter.index} outside the declared "
                    f"count {self.generators}"
                )
        return complex(self._fn(w))

    @classmethod
    def from_matrices(
        cls, family: str, mats: Sequence[np.ndarray], normalized: bool | None = None
    ) -> "MomentFunctional":
        """
        Matrix model: evaluate the word as an ordered product (star means
        conjugate transpose) and take the trace.  The a family uses the
        plain trace, the b family the normalized trace, unless overridden.
        """
        mats = [np.asarray(m, dtype=complex) for m in mats]
        n = mats[0].shape[0]
        for m in mats:
            if m.shape != (n, n):
                raise ValueError("model matrices must be square and of equal dimension")
        if normalized is None:
            normalized = family == "b"
        scale = 1.0 / n if normalized else 1.0

        def fn(w: Word) -> complex:
            prod = np.eye(n, dtype=complex)
            for letter in w:
                m = mats[letter.index]
                prod = prod @ (m.conj().T if letter.star else m)
            return scale * complex(np.trace(prod))

        return cls(family, fn, generators=len(mats))

    @classmethod
    def from_power_moments(
        cls, family: str, power_moment: Callable[[int], complex]
    ) -> "MomentFunctional":
        """
        Closed-form rule for a single self-adjoint generator: the word
        value depends only on its length (stars act trivially).
        """

        def fn(w: Word) -> complex:
            return complex(power_moment(len(w)))

        return cls(family, fn, generators=1)


def dyadic_weight(truncation: int | None = None) -> MomentFunctional:
    """
    Weight of the compact diagonal operator with eigenvalues 2^-1, 2^-2,
    ...: the m-th power moment is 1/(2^m - 1), or its partial sum when a
    finite truncation depth is requested.
    """

    def power_moment(m: int) -> float:
        if truncation is None:
            return 1.0 / (2.0 ** m - 1.0)
        return (1.0 - 2.0 ** (-m * truncation)) / (2.0 ** m - 1.0)

    return MomentFunctional.from_power_moments("a", power_moment)


def marchenko_pastur_state() -> MomentFunctional:
    """
    State with the square-ratio-one Marchenko-Pastur power moments 1, 2,
    5, 14, ... (the Catalan numbers), the large-n limit of the sample
    covariance ensemble normalized to mean 1.
    """
    from .symgroup import catalan

    return MomentFunctional.from_power_moments("b", lambda m: float(catalan(m)))


def semicircle_state() -> MomentFunctional:
    """Standard semicircle moments (unit variance): Cat_(m/2) for even m."""
    from .symgroup import catalan

    return MomentFunctional.from_power_moments(
        "b", lambda m: float(catalan(m // 2)) if m % 2 == 0 else 0.0
    )


def _canonical_cyclic(w: Word) -> Word:
    keyed = [tuple((x.family, x.index, x.star) for x in w[i:] + w[:i]) for i in range(len(w))]
    best = min(range(len(w)), key=lambda i: keyed[i])
    return w[best:] + w[:best]


def cyclic_monotone_moment(
    w: Word,
    omega: MomentFunctional,
    tau: MomentFunctional,
    memo: dict[Word, complex] | None = None,
) -> complex:
    """
    Evaluate (omega |> tau) on a mixed word.

    The word is split into maximal same-family runs; a-runs concatenate
    into a single omega argument, interior b-runs factor under tau, and
    the leading and trailing b-runs merge as tau(leading + trailing).
    Words without an a-letter are outside the domain (the functional is
    a weight on the ideal generated by the a family).

    An optional memo dict caches values keyed by canonical cyclic form;
    this is sound because the functional is tracial.
    """
    if not any(letter.family == "a" for letter in w):
        raise ValueError("word contains no a-letter, outside the evaluator's domain")
    if memo is not None:
        key = _canonical_cyclic(w)
        hit = memo.get(key)
        if hit is not None:
            return hit

    runs: list[tuple[str, Word]] = []
    for letter in w:
        if runs and runs[-1][0] == letter.family:
            runs[-1] = (letter.family, runs[-1][1] + (letter,))
        else:
            runs.append((letter.family, (letter,)))

    leading: Word = ()
    if runs[0][0] == "b":
        leading = runs[0][1]
        runs = runs[1:]
    trailing: Word = ()
    if runs and runs[-1][0] == "b":
        trailing = runs[-1][1]
        runs = runs[:-1]

    a_word: Word = ()
    value = complex(1.0)
    for family, run in runs:
        if family == "a":
            a_word += run
        else:
            value *= tau(run)
    value *= omega(a_word)
    value *= tau(leading + trailing)

    if memo is not None:
        memo[key] = value
    return value


class PsdReport(NamedTuple):
    min_eigenvalue: float
    passed: bool


def gram_psd_check(
    omega: MomentFunctional,
    tau: MomentFunctional,
    word_basis: Sequence[Word],
    tol: float = 1e-10,
) -> PsdReport:
    """
    Build the Gram matrix M[x, y] = (omega |> tau)(x* y) over the given
    basis words and report its minimum eigenvalue; passes iff >= -tol.
    Positivity is expected whenever omega and tau come from genuine
    matrix or operator models.
    """
    for w in word_basis:
        if not any(letter.family == "a" for letter in w):
            raise ValueError("every basis word must contain an a-letter")
    m = len(word_basis)
    gram = np.zeros((m, m), dtype=complex)
    for i, x in enumerate(word_basis):
        x_star = adjoint(x)
        for j, y in enumerate(word_basis):
            gram[i, j] = cyclic_monotone_moment(x_star + y, omega, tau)
    eigs = np.linalg.eigvalsh((gram + gram.conj().T) / 2.0)
    min_eig = float(eigs[0])
    return PsdReport(min_eig, min_eig >= -tol)


def traciality_check(
    omega: MomentFunctional,
    tau: MomentFunctional,
    pairs: Sequence[tuple[Word, Word]],
    tol: float = 1e-10,
) -> bool:
    """Check |(omega |> tau)(xy) - (omega |> tau)(yx)| <= tol for each pair."""
    for x, y in pairs:
        fwd = cyclic_monotone_moment(x + y, omega, tau)
        bwd = cyclic_monotone_moment(y + x, omega, tau)
        if abs(fwd - bwd) > tol:
            return False
    return True
