"""Closed-form single-shot variances and exact enumeration over probe sets."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .estimators import EstimatorKind, random_bits_required
from .mub import NotPrimeError, generate_mub_family, is_prime, next_prime_at_least
from .oracle import DenseOracle, as_oracle

EIGENVALUE_TOL = 1e-8
DEFAULT_ENUMERATION_CAP = 101


def _dense(a) -> np.ndarray:
    if isinstance(a, DenseOracle):
        return a.matrix
    return DenseOracle(a).matrix


def analytic_variance(kind, a) -> float:
    """Single-shot variance of the scaled estimate of ``Tr(A)``.

    For MUBs on a non-prime dimension the estimator runs on the zero-padded
    matrix, so the padded prime dimension enters the formula.
    """
    kind = EstimatorKind.parse(kind)
    a = _dense(a)
    n = a.shape[0]
    tr = float(np.trace(a))
    tr2 = float(np.sum(a * a))
    diag2 = float(np.sum(np.diag(a) ** 2))
    if kind is EstimatorKind.FIXED:
        return n * diag2 - tr * tr
    if kind is EstimatorKind.MUBS:
        p = next_prime_at_least(n)
        return p / (p + 1) * tr2 - tr * tr / (p + 1)
    if kind is EstimatorKind.HUTCHINSON:
        return 2.0 * (tr2 - diag2)
    return 2.0 * tr2


def worst_case_variance(kind, n: int, tr_a: Optional[float] = None,
                        tr_a2: Optional[float] = None, psd: bool = False) -> float:
    """Worst single-shot variance given ``Tr(A)`` (fixed basis) or ``Tr(A^2)`` (others).

    ``psd=True`` tightens the MUBs bound from ``n/(n+1)`` to ``(n-1)/(n+1)``
    times ``Tr(A^2)``.
    """
    kind = EstimatorKind.parse(kind)
    if kind is EstimatorKind.FIXED:
        if tr_a is None:
            raise ValueError("fixed-basis worst case needs tr_a")
        return (n - 1) * tr_a * tr_a
    if tr_a2 is None:
        raise ValueError(f"{kind.value} worst case needs tr_a2")
    if tr_a2 < 0:
        raise ValueError("Tr(A^2) cannot be negative")
    if kind is EstimatorKind.MUBS:
        return ((n - 1) if psd else n) / (n + 1) * tr_a2
    if kind is EstimatorKind.HUTCHINSON:
        return 2.0 * (n - 1) / n * tr_a2
    return 2.0 * tr_a2


def enumerate_single_shots(a, kind, cap: int = DEFAULT_ENUMERATION_CAP) -> np.ndarray:
    """Every equiprobable scaled single shot of a basis estimator.

    ``n`` values for the fixed basis, ``n (n + 1)`` for MUBs.
    """
    kind = EstimatorKind.parse(kind)
    oracle = as_oracle(a)
    n = oracle.dim
    if n > cap:
        raise ValueError(f"dimension {n} above enumeration cap {cap}")
    if kind is EstimatorKind.FIXED:
        return n * np.atleast_1d(oracle.quad_form(np.eye(n)))
    if kind is EstimatorKind.MUBS:
        if not is_prime(n):
            raise NotPrimeError(
                f"{n} is not prime; nearest supported: {next_prime_at_least(n)}")
        family = generate_mub_family(n)
        return n * np.concatenate([np.atleast_1d(oracle.quad_form(b))
                                   for b in family.bases])
    raise ValueError(f"{kind.value} probes cannot be enumerated")


def enumerate_variance(a, kind, cap: int = DEFAULT_ENUMERATION_CAP) -> tuple[float, float]:
    """Exact mean and population variance of the single-shot estimate."""
    shots = enumerate_single_shots(a, kind, cap)
    mean = math.fsum(shots) / shots.size
    var = math.fsum((shots - mean) ** 2) / shots.size
    return mean, var


@dataclass(frozen=True)
class ProjectorCheck:
    n: int
    trace_P: float
    trace_P_sq: float
    eigenvalues: np.ndarray
    rank: int

    @property
    def max_eigen_deviation(self) -> float:
        """Largest distance of any eigenvalue from the nearer of 0 and 1."""
        ev = self.eigenvalues
        return float(np.max(np.minimum(np.abs(ev), np.abs(ev - 1.0))))


def projector_check(p: int, max_dim: int = 13) -> ProjectorCheck:
    """Build ``P = 1/2 sum_x (x x^H) kron (x x^H)`` over every MUB vector."""
    if p > max_dim:
        raise ValueError(f"dimension {p} too large for an explicit {p * p}x{p * p} projector")
    family = generate_mub_family(p)
    vecs = family.all_vectors()
    # columns are x kron x
    w = (vecs[:, None, :] * vecs[None, :, :]).reshape(p * p, -1)
    proj = 0.5 * (w @ w.conj().T)
    ev = np.linalg.eigvalsh(proj)
    return ProjectorCheck(
        n=p,
        trace_P=float(np.trace(proj).real),
        trace_P_sq=float(np.trace(proj @ proj).real),
        eigenvalues=ev,
        rank=int(np.sum(ev > EIGENVALUE_TOL)),
    )


@dataclass(frozen=True)
class VarianceReport:
    kind: EstimatorKind
    analytic: float
    worst_case_bound: float
    bits: str
    enumerated: Optional[float] = None


def variance_reports(a, cap: int = DEFAULT_ENUMERATION_CAP) -> list[VarianceReport]:
    """One report per estimator; enumerated values where the probe set is small enough."""
    m = _dense(a)
    n = m.shape[0]
    tr = float(np.trace(m))
    tr2 = float(np.sum(m * m))
    reports = []
    for kind in EstimatorKind:
        dim = next_prime_at_least(n) if kind is EstimatorKind.MUBS else n
        enumerated = None
        if kind in (EstimatorKind.FIXED, EstimatorKind.MUBS) and dim <= cap:
            target = m if dim == n else np.pad(m, (0, dim - n))
            enumerated = enumerate_variance(target, kind, cap)[1]
        reports.append(VarianceReport(
            kind=kind,
            analytic=analytic_variance(kind, m),
            worst_case_bound=worst_case_variance(kind, dim, tr, tr2),
            bits=str(random_bits_required(kind, dim)),
            enumerated=enumerated,
        ))
    return reports


def format_variance_table(reports: list[VarianceReport]) -> str:
    rows = [("estimator", "V", "V_worst", "R (bits)", "V enumerated")]
    for r in reports:
        enum_txt = "-" if r.enumerated is None else f"{r.enumerated:.10g}"
        rows.append((r.kind.value, f"{r.analytic:.10g}", f"{r.worst_case_bound:.10g}",
                     r.bits, enum_txt))
    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip()
             for row in rows]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)
