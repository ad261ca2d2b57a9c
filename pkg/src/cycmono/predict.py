"""
Closed-form limiting spectra for the supported polynomial models, plus a
brute-force moment oracle used to cross-validate every predictor.

The models live in the cyclic monotone world: a-variables are compact
with known eigenvalues (supplied as finite Hermitian truncations), and
b-variables enter only through the low moments of their state tau.  The
implemented closed forms:

  sum_i b_i a_i b_i*          -> EV(sqrt(B) diag(a_1..a_k) sqrt(B)),
                                 B = (tau(b_i* b_j))
  sum_i a_i b_i a_i*          -> EV(sum_i tau(b_i) a_i a_i*)
  a b + b a                   -> (p EV(a)) u (q EV(a)),
                                 p = sqrt(tau(b^2)) + tau(b),
                                 q = -(sqrt(tau(b^2)) - tau(b))
  i(a b - b a)                -> (r EV(a)) u (-r EV(a)),
                                 r = sqrt(tau(b^2) - tau(b)^2)
  sum_i (b_i at its own independent rotation) a_i ...:
    sum_i u_i b_i u_i* a_i (u_i b_i u_i*)*  -> EV(sum_i |beta_i|^2 a_i)
    sum_i b_i u_i a_i u_i* b_i*             -> u_i EV(gamma_i a_i)

Only eigenvalues well above the truncation scale of the supplied
matrices are trustworthy; no tail estimation is attempted.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import ncms, spectra
from .errors import CapacityError
from .spectra import Spectrum

DEFAULT_ORACLE_BUDGET = 1 << 20


@dataclass(frozen=True)
class CompactModel:
    """Finite N x N Hermitian truncations of the limiting compact operators."""

    a_mats: tuple[np.ndarray, ...]
    herm_tol: float = 1e-12

    def __post_init__(self):
        mats = tuple(np.asarray(m, dtype=complex) for m in self.a_mats)
        object.__setattr__(self, "a_mats", mats)
        n = mats[0].shape[0]
        for m in mats:
            if m.shape != (n, n):
                raise ValueError("truncations must be square and of equal dimension")
            if np.max(np.abs(m - m.conj().T)) > self.herm_tol:
                raise ValueError("truncations must be Hermitian")

    @property
    def k(self) -> int:
        return len(self.a_mats)

    @property
    def dim(self) -> int:
        return self.a_mats[0].shape[0]


@dataclass(frozen=True)
class BStats:
    """
    First and second moments of the b-variables: beta_i = tau(b_i),
    beta2[i, j] = tau(b_i* b_j), gamma_i = beta2[i, i] (real, >= 0).
    """

    beta: tuple[complex, ...]
    beta2: np.ndarray
    gamma: tuple[float, ...] = field(default=())

    def __post_init__(self):
        beta2 = np.asarray(self.beta2, dtype=complex)
        k = len(self.beta)
        if beta2.shape != (k, k):
            raise ValueError(f"beta2 must be {k} x {k}")
        if np.max(np.abs(beta2 - beta2.conj().T)) > 1e-10:
            raise ValueError("beta2 must be Hermitian")
        if float(np.linalg.eigvalsh(beta2)[0]) < -1e-10:
            raise ValueError("beta2 must be positive semidefinite")
        object.__setattr__(self, "beta2", beta2)
        gamma = tuple(float(beta2[i, i].real) for i in range(k))
        if any(g < -1e-12 for g in gamma):
            raise ValueError("diagonal second moments must be nonnegative")
        object.__setattr__(self, "gamma", gamma)


def wishart_limit_stats() -> tuple[float, float]:
    """(tau(b), tau(b^2)) for the mean-one sample covariance limit."""
    return (1.0, 2.0)


def gue_limit_stats() -> tuple[float, float]:
    """(tau(b), tau(b^2)) for the unit-variance semicircle limit."""
    return (0.0, 1.0)


def hermitian_sqrt(mat: np.ndarray, psd_tol: float = 1e-10) -> np.ndarray:
    """
    Hermitian PSD square root via eigendecomposition.  Eigenvalues in
    [-psd_tol, 0) are clamped to zero; anything more negative raises.
    """
    mat = np.asarray(mat, dtype=complex)
    vals, vecs = np.linalg.eigh((mat + mat.conj().T) / 2.0)
    if float(vals[0]) < -psd_tol:
        raise ValueError(f"matrix is not PSD: min eigenvalue {vals[0]:.3e}")
    vals = np.clip(vals, 0.0, None)
    return (vecs * np.sqrt(vals)) @ vecs.conj().T


def _eigenvalues(mat: np.ndarray, zero_tolerance: float) -> Spectrum:
    vals = np.linalg.eigvalsh((mat + mat.conj().T) / 2.0)
    return spectra.properly_arrange(vals.tolist(), zero_tolerance=zero_tolerance)


def predict_sum_conj_b(
    model: CompactModel,
    stats: BStats,
    zero_tolerance: float = spectra.DEFAULT_ZERO_TOLERANCE,
) -> Spectrum:
    """
    Limiting spectrum of sum_i b_i a_i b_i*: eigenvalues of the kN x kN
    matrix (sqrt(B) (x) I) blockdiag(a_1..a_k) (sqrt(B) (x) I).
    """
    if len(stats.beta) != model.k:
        raise ValueError(f"need {model.k} b-statistics, got {len(stats.beta)}")
    root = hermitian_sqrt(stats.beta2)
    lift = np.kron(root, np.eye(model.dim))
    block = np.zeros((model.k * model.dim,) * 2, dtype=complex)
    for i, mat in enumerate(model.a_mats):
        sl = slice(i * model.dim, (i + 1) * model.dim)
        block[sl, sl] = mat
    return _eigenvalues(lift @ block @ lift, zero_tolerance)


def predict_sum_a_b_astar(
    model: CompactModel,
    beta: Sequence[float],
    zero_tolerance: float = spectra.DEFAULT_ZERO_TOLERANCE,
) -> Spectrum:
    """Limiting spectrum of sum_i a_i b_i a_i* with self-adjoint b_i: EV(sum_i beta_i a_i a_i*)."""
    if len(beta) != model.k:
        raise ValueError(f"need {model.k} first moments, got {len(beta)}")
    total = np.zeros((model.dim, model.dim), dtype=complex)
    for coeff, mat in zip(beta, model.a_mats):
        total += float(coeff) * (mat @ mat.conj().T)
    return _eigenvalues(total, zero_tolerance)


def _check_b_moments(tau_b: float, tau_b2: float) -> None:
    if tau_b2 < tau_b ** 2 - 1e-12:
        raise ValueError(
            f"inconsistent b-moments: tau(b^2)={tau_b2} < tau(b)^2={tau_b ** 2}"
        )


def predict_anticommutator(spec_a: Spectrum, tau_b: float, tau_b2: float) -> Spectrum:
    """
    Limiting spectrum of a b + b a: (p EV(a)) u (q EV(a)) with
    p = sqrt(tau(b^2)) + tau(b) and q = -(sqrt(tau(b^2)) - tau(b)).
    """
    _check_b_moments(tau_b, tau_b2)
    root = math.sqrt(max(tau_b2, 0.0))
    p = root + tau_b
    q = -(root - tau_b)
    return spectra.disjoint_union(spectra.scale(spec_a, p), spectra.scale(spec_a, q))


def predict_commutator(spec_a: Spectrum, tau_b: float, tau_b2: float) -> Spectrum:
    """
    Limiting spectrum of i(a b - b a): (r EV(a)) u (-r EV(a)) with
    r = sqrt(tau(b^2) - tau(b)^2).
    """
    _check_b_moments(tau_b, tau_b2)
    r = math.sqrt(max(tau_b2 - tau_b ** 2, 0.0))
    return spectra.disjoint_union(spectra.scale(spec_a, r), spectra.scale(spec_a, -r))


def predict_multi_unitary_sum(
    model: CompactModel,
    beta: Sequence[complex],
    zero_tolerance: float = spectra.DEFAULT_ZERO_TOLERANCE,
) -> Spectrum:
    """
    Limiting spectrum of sum_i u_i b_i u_i* a_i (u_i b_i u_i*)* with
    independently rotated b_i: EV(sum_i |beta_i|^2 a_i).
    """
    if len(beta) != model.k:
        raise ValueError(f"need {model.k} first moments, got {len(beta)}")
    total = np.zeros((model.dim, model.dim), dtype=complex)
    for coeff, mat in zip(beta, model.a_mats):
        total += abs(complex(coeff)) ** 2 * mat
    return _eigenvalues(total, zero_tolerance)


def predict_multi_unitary_disjoint(
    spec_list: Sequence[Spectrum], gamma: Sequence[float]
) -> Spectrum:
    """
    Limiting spectrum of sum_i b_i u_i a_i u_i* b_i* with independently
    rotated a_i: the disjoint union of the EV(gamma_i a_i).
    """
    if len(spec_list) != len(gamma):
        raise ValueError("need one gamma per spectrum")
    out = spectra.EMPTY
    for spec, g in zip(spec_list, gamma):
        g = float(g)
        if g < 0:
            raise ValueError(f"gamma must be nonnegative (a squared modulus), got {g}")
        out = spectra.disjoint_union(out, spectra.scale(spec, g))
    return out


Poly = Sequence[tuple[complex, ncms.Word]]


def moment_oracle(
    poly: Poly,
    omega: ncms.MomentFunctional,
    tau: ncms.MomentFunctional,
    l_max: int,
    max_words: int = DEFAULT_ORACLE_BUDGET,
    memo: dict | None = None,
) -> list[complex]:
    """
    Brute-force moments of a formal polynomial: for each l <= l_max,
    expand poly^l into words and sum their cyclic-monotone values.

    Every monomial must contain an a-letter.  The expansion has
    (number of terms)^l words per power; the call is rejected when the
    total exceeds max_words.
    """
    if l_max < 1:
        raise ValueError(f"l_max must be >= 1, got {l_max}")
    terms = [(complex(c), tuple(w)) for c, w in poly]
    for _, w in terms:
        if not any(letter.family == "a" for letter in w):
            raise ValueError("every monomial must contain an a-letter")
    total_words = sum(len(terms) ** l for l in range(1, l_max + 1))
    if total_words > max_words:
        raise CapacityError(
            f"oracle expansion needs {total_words} words, over the budget {max_words}"
        )

    moments: list[complex] = []
    for l in range(1, l_max + 1):
        acc = complex(0.0)
        for combo in itertools.product(terms, repeat=l):
            coeff = complex(1.0)
            letters: ncms.Word = ()
            for c, w in combo:
                coeff *= c
                letters += w
            acc += coeff * ncms.cyclic_monotone_moment(letters, omega, tau, memo=memo)
        moments.append(acc)
    return moments


def prediction_record(
    model_name: str,
    params: dict,
    spectrum: Spectrum,
    moments: Sequence[complex] | None = None,
) -> dict:
    """JSON-ready record of one prediction."""
    record = {
        "model": model_name,
        "params": params,
        "spectrum": spectra.to_json(spectrum),
    }
    if moments is not None:
        record["moments"] = [[z.real, z.imag] for z in map(complex, moments)]
    return record
