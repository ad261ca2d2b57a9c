"""
Random matrix sampling and concrete spectral computation.

Samplers take an explicit numpy Generator and are otherwise pure.  The
RngStream helper derives reproducible generators from a master seed and
a tuple of stream indices (per trial, per dimension, ...), so trials can
be evaluated in any order with identical results.
"""
from __future__ import annotations

import json
import struct
from dataclasses import dataclass

import numpy as np

from . import spectra
from .ncms import Word
from .spectra import Spectrum

_MATRIX_MAGIC = b"CMONOMX1"
HERMITICITY_TOL = 1e-8


@dataclass(frozen=True)
class RngStream:
    """
    A named point in a reproducible stream tree: (master_seed, stream).

    Identical values reproduce identical samples bit-for-bit on a fixed
    platform; child streams are independent of their siblings.
    """

    master_seed: int
    stream: tuple[int, ...] = ()

    def child(self, *indices: int) -> "RngStream":
        return RngStream(self.master_seed, self.stream + indices)

    def generator(self) -> np.random.Generator:
        return np.random.default_rng(
            np.random.SeedSequence(self.master_seed, spawn_key=self.stream)
        )


def sample_ginibre(n: int, entry_variance: float, rng: np.random.Generator) -> np.ndarray:
    """iid complex Gaussian entries, real and imaginary parts N(0, entry_variance/2)."""
    if n < 1:
        raise ValueError(f"dimension must be positive, got {n}")
    if entry_variance <= 0:
        raise ValueError(f"entry variance must be positive, got {entry_variance}")
    sd = np.sqrt(entry_variance / 2.0)
    return sd * (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))


def sample_haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """
    Haar-distributed unitary: QR of a Ginibre matrix with the diagonal
    phases of R divided out.  The phase fix is what makes the law exactly
    Haar rather than merely unitary.
    """
    z = sample_ginibre(n, 1.0, rng)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def sample_gue(n: int, rng: np.random.Generator) -> np.ndarray:
    """
    Hermitian Gaussian matrix normalized so that the normalized trace of
    its square tends to 1 (semicircle on [-2, 2]).
    """
    z = sample_ginibre(n, 2.0 / n, rng)
    return (z + z.conj().T) / 2.0


def sample_wishart(
    n: int, rng: np.random.Generator, entry_variance: float = 2.0
) -> np.ndarray:
    """
    Sample covariance matrix Z Z* / (2n) with Ginibre Z.  The default
    entry variance 2 gives normalized trace tending to 1 and second
    moment tending to 2 (square Marchenko-Pastur limit).
    """
    z = sample_ginibre(n, entry_variance, rng)
    return (z @ z.conj().T) / (2.0 * n)


def dyadic_diag(n: int) -> np.ndarray:
    """diag(2^-1, 2^-2, ..., 2^-n), the standard compact-limit test matrix."""
    if n < 1:
        raise ValueError(f"dimension must be positive, got {n}")
    return np.diag(2.0 ** -np.arange(1, n + 1))


@dataclass(frozen=True)
class EnsembleSpec:
    """
    Declarative matrix source: kind in {ginibre, haar_unitary, gue,
    wishart, dyadic_diag, fixed}, with entry_variance for the Gaussian
    kinds and an explicit payload for fixed.
    """

    kind: str
    n: int | None = None
    entry_variance: float | None = None
    payload: np.ndarray | None = None

    KINDS = ("ginibre", "haar_unitary", "gue", "wishart", "dyadic_diag", "fixed")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown ensemble kind {self.kind!r}")
        if self.kind == "fixed" and self.payload is None:
            raise ValueError("fixed ensembles need an explicit payload matrix")

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        n = self.n or n
        if self.kind == "ginibre":
            return sample_ginibre(n, self.entry_variance or 1.0, rng)
        if self.kind == "haar_unitary":
            return sample_haar_unitary(n, rng)
        if self.kind == "gue":
            return sample_gue(n, rng)
        if self.kind == "wishart":
            return sample_wishart(n, rng, self.entry_variance or 2.0)
        if self.kind == "dyadic_diag":
            return dyadic_diag(n)
        return np.asarray(self.payload, dtype=complex)


def hermitian_eigenvalues(
    mat: np.ndarray, tol: float = spectra.DEFAULT_ZERO_TOLERANCE
) -> Spectrum:
    """
    Properly arranged eigenvalues of a Hermitian matrix, values below tol
    snapped into the zero tail.  Rejects inputs whose anti-Hermitian part
    exceeds the fixed hermiticity tolerance.
    """
    mat = np.asarray(mat, dtype=complex)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError("input must be a square matrix")
    if float(np.max(np.abs(mat - mat.conj().T))) > HERMITICITY_TOL:
        raise ValueError("input is not Hermitian within tolerance")
    vals = np.linalg.eigvalsh((mat + mat.conj().T) / 2.0)
    return spectra.properly_arrange(vals.tolist(), zero_tolerance=tol)


def eigenvalue_residual(mat: np.ndarray, lam: float) -> float:
    """
    Relative residual of a claimed eigenvalue: the smallest singular
    value of (mat - lam I) divided by the spectral norm of mat.
    """
    mat = np.asarray(mat, dtype=complex)
    shifted = mat - lam * np.eye(mat.shape[0])
    smin = float(np.linalg.svd(shifted, compute_uv=False)[-1])
    norm = float(np.linalg.norm(mat, 2))
    return smin / norm if norm > 0 else smin


def evaluate_matrix_word(word: Word, assignment: dict[tuple[str, int], np.ndarray]) -> np.ndarray:
    """
    Ordered product of the matrices assigned to each letter; a star takes
    the conjugate transpose.  Assignment keys are (family, index).
    """
    if not word:
        raise ValueError("cannot evaluate the empty word")
    mats = []
    dim = None
    for letter in word:
        key = (letter.family, letter.index)
        if key not in assignment:
            raise ValueError(f"generator {key} has no assigned matrix")
        m = np.asarray(assignment[key], dtype=complex)
        if dim is None:
            dim = m.shape[0]
        if m.shape != (dim, dim):
            raise ValueError("assigned matrices must be square and of equal dimension")
        mats.append(m.conj().T if letter.star else m)
    prod = mats[0]
    for m in mats[1:]:
        prod = prod @ m
    return prod


def save_matrix(path, mat: np.ndarray) -> None:
    """
    Binary matrix format: 16-byte header (8-byte magic, little-endian
    uint64 dimension), then row-major float64 (re, im) pairs.
    """
    mat = np.ascontiguousarray(np.asarray(mat, dtype=complex))
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError("only square matrices are serialized")
    n = mat.shape[0]
    interleaved = np.empty((n, n, 2), dtype="<f8")
    interleaved[..., 0] = mat.real
    interleaved[..., 1] = mat.imag
    with open(path, "wb") as fh:
        fh.write(_MATRIX_MAGIC + struct.pack("<Q", n))
        fh.write(interleaved.tobytes())


def load_matrix(path) -> np.ndarray:
    with open(path, "rb") as fh:
        header = fh.read(16)
        if len(header) != 16 or header[:8] != _MATRIX_MAGIC:
            raise ValueError("not a serialized matrix (bad header)")
        (n,) = struct.unpack("<Q", header[8:])
        data = np.frombuffer(fh.read(), dtype="<f8")
    if data.size != 2 * n * n:
        raise ValueError("truncated matrix payload")
    data = data.reshape(n, n, 2)
    return data[..., 0] + 1j * data[..., 1]


def matrix_to_json(mat: np.ndarray) -> dict:
    """JSON form for small fixture matrices."""
    mat = np.asarray(mat, dtype=complex)
    return {
        "n": mat.shape[0],
        "re": mat.real.tolist(),
        "im": mat.imag.tolist(),
    }


def matrix_from_json(obj) -> np.ndarray:
    if isinstance(obj, str):
        obj = json.loads(obj)
    return np.asarray(obj["re"], dtype=float) + 1j * np.asarray(obj["im"], dtype=float)
