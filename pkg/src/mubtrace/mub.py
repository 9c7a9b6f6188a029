"""Mutually unbiased bases in prime dimension.

For an odd prime ``p`` the ``p + 1`` bases are the standard basis together
with the quadratic-phase bases

    v[a, b]_l = omega ** (a * l**2 + b * l) / sqrt(p),   omega = exp(2 pi i / p)

for ``a, b`` in ``[0, p)``.  Basis index ``p`` is the standard basis.  The
quadratic construction degenerates in characteristic two, so ``p = 2`` uses
the three Pauli eigenbases directly.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import TextIO

import numpy as np


class NotPrimeError(ValueError):
    """Raised when an operation needs a prime dimension and gets something else."""


def is_prime(n: int) -> bool:
    """Trial division primality test."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    for d in range(3, math.isqrt(n) + 1, 2):
        if n % d == 0:
            return False
    return True


def next_prime_at_least(n: int) -> int:
    """Smallest prime ``p >= n``."""
    p = max(int(n), 2)
    while not is_prime(p):
        p += 1
    return p


def _check_prime(p: int) -> int:
    p = int(p)
    if not is_prime(p):
        raise NotPrimeError(
            f"{p} is not prime; nearest supported: {next_prime_at_least(p)}")
    return p


_S = 1.0 / math.sqrt(2.0)
_QUBIT_BASES = np.array([
    [[_S, _S], [_S, -_S]],
    [[_S, 1j * _S], [_S, -1j * _S]],
    [[1, 0], [0, 1]],
], dtype=complex)


def mub_vector(p: int, basis_index: int, vector_index: int) -> np.ndarray:
    """Return one vector of the MUB family without building the family.

    Parameters
    ----------
    p : int
        Prime dimension.
    basis_index : int
        In ``[0, p]``; ``p`` selects the standard basis.
    vector_index : int
        In ``[0, p)``.

    Returns
    -------
    numpy.ndarray
        Complex unit vector of length ``p``.  Costs O(p) time and memory.
    """
    p = _check_prime(p)
    if not 0 <= basis_index <= p:
        raise IndexError(f"basis_index {basis_index} outside [0, {p}]")
    if not 0 <= vector_index < p:
        raise IndexError(f"vector_index {vector_index} outside [0, {p})")
    if p == 2:
        return _QUBIT_BASES[basis_index, vector_index].copy()
    if basis_index == p:
        v = np.zeros(p, dtype=complex)
        v[vector_index] = 1.0
        return v
    l = np.arange(p, dtype=np.int64)
    # exact integer reduction keeps the phase argument in [0, 2 pi)
    expo = (basis_index * ((l * l) % p) + vector_index * l) % p
    theta = (2.0 * math.pi / p) * expo
    return (np.cos(theta) + 1j * np.sin(theta)) / math.sqrt(p)


@dataclass(frozen=True)
class MubFamily:
    """``p + 1`` orthonormal bases; ``bases[k][:, j]`` is vector ``j`` of basis ``k``."""

    p: int
    bases: np.ndarray

    @property
    def num_bases(self) -> int:
        return self.bases.shape[0]

    def vector(self, basis_index: int, vector_index: int) -> np.ndarray:
        return self.bases[basis_index, :, vector_index]

    def all_vectors(self) -> np.ndarray:
        """All ``p (p + 1)`` vectors as columns of a ``p x p(p+1)`` matrix."""
        return np.concatenate(list(self.bases), axis=1)


def generate_mub_family(p: int) -> MubFamily:
    p = _check_prime(p)
    bases = np.empty((p + 1, p, p), dtype=complex)
    for k in range(p + 1):
        for j in range(p):
            bases[k, :, j] = mub_vector(p, k, j)
    return MubFamily(p, bases)


@dataclass(frozen=True)
class VerificationReport:
    max_orthonormality_error: float
    max_unbiasedness_error: float
    tol: float

    @property
    def passed(self) -> bool:
        return (self.max_orthonormality_error <= self.tol
                and self.max_unbiasedness_error <= self.tol)


def verify_mub_family(family: MubFamily, tol: float = 1e-10) -> VerificationReport:
    """Check every within-basis Gram matrix and every cross-basis overlap."""
    p = family.bases.shape[1]
    eye = np.eye(p)
    target = 1.0 / math.sqrt(p)
    ortho = 0.0
    unbiased = 0.0
    for i, bi in enumerate(family.bases):
        ortho = max(ortho, float(np.max(np.abs(bi.conj().T @ bi - eye))))
        for bj in family.bases[i + 1:]:
            overlaps = np.abs(bi.conj().T @ bj)
            unbiased = max(unbiased, float(np.max(np.abs(overlaps - target))))
    return VerificationReport(ortho, unbiased, tol)


def write_family_csv(family: MubFamily, out: TextIO) -> None:
    """One row per vector: basis, index, then interleaved real/imag parts."""
    p = family.p
    writer = csv.writer(out, lineterminator="\n")
    header = ["basis_index", "vector_index"]
    for l in range(p):
        header += [f"re_{l}", f"im_{l}"]
    writer.writerow(header)
    for k in range(family.num_bases):
        for j in range(p):
            v = family.vector(k, j)
            row = [str(k), str(j)]
            for z in v:
                row += [f"{z.real:.17g}", f"{z.imag:.17g}"]
            writer.writerow(row)
