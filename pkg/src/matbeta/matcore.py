"""Dense complex matrix substrate.

Matrices are square ``numpy.ndarray`` objects with ``complex128`` entries.
This module provides the norms, spectral decompositions, exponentials and
real-base matrix powers that the beta-function integrands are built from,
plus the JSON encoding used by problem files.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    DecompositionError,
    DimensionError,
    DomainError,
    EvaluationError,
    RangeError,
)

#: Default absolute tolerance for matrix comparisons, scaled by operand norms.
DEFAULT_TOL = 1e-10

#: Eigenvector condition number above which the spectral route is distrusted.
FALLBACK_CONDITION = 1e6


def as_matrix(obj, name: str = "matrix") -> np.ndarray:
    """Coerce ``obj`` to a square complex matrix, validating shape and finiteness.

    Parameters
    ----------
    obj : array_like
        Scalar, nested sequence or ndarray.  Scalars become 1x1 matrices.
    name : str
        Identifier used in error messages.

    Returns
    -------
    numpy.ndarray
        A fresh ``complex128`` array of shape ``(k, k)``.
    """
    m = np.array(obj, dtype=complex)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"{name}: expected a square matrix, got shape {m.shape}")
    if not np.isfinite(m).all():
        raise DomainError(f"{name}: entries must be finite")
    return m


def _check_same_shape(m: np.ndarray, n: np.ndarray) -> None:
    if m.shape != n.shape:
        raise DimensionError(f"operand shapes differ: {m.shape} vs {n.shape}")


def inf_norm(m: np.ndarray) -> float:
    """Maximum absolute row sum.  The default norm for residual checks."""
    m = np.asarray(m)
    if m.size == 0:
        return 0.0
    if m.ndim < 2:
        return float(np.max(np.abs(m)))
    return float(np.abs(m).sum(axis=-1).max())


def op_norm(m: np.ndarray) -> float:
    """Largest singular value (spectral norm)."""
    m = as_matrix(m)
    try:
        return float(np.linalg.svd(m, compute_uv=False)[0])
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK rarely fails here
        raise DecompositionError(f"singular value computation failed: {exc}") from exc


def mats_close(a: np.ndarray, b: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    """Tolerance-based equality: inf_norm(a-b) <= tol * max(1, norms)."""
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    _check_same_shape(a, b)
    scale = max(1.0, inf_norm(a), inf_norm(b))
    return inf_norm(a - b) <= tol * scale


def is_positive_stable(m: np.ndarray, tol: float = 0.0) -> bool:
    """True iff every eigenvalue of ``m`` has real part strictly above ``tol``."""
    m = as_matrix(m)
    try:
        eigs = np.linalg.eigvals(m)
    except np.linalg.LinAlgError as exc:
        raise DecompositionError(f"eigenvalue computation failed: {exc}") from exc
    return bool(np.all(eigs.real > tol))


def commute(m: np.ndarray, n: np.ndarray, tol: float = 1e-12) -> bool:
    """Commutativity test scaled by the operand norms.

    Returns true iff ``inf_norm(MN - NM) <= tol * (1 + inf_norm(M) * inf_norm(N))``.
    """
    m = as_matrix(m, "m")
    n = as_matrix(n, "n")
    _check_same_shape(m, n)
    resid = inf_norm(m @ n - n @ m)
    return resid <= tol * (1.0 + inf_norm(m) * inf_norm(n))


def mat_exp(m: np.ndarray) -> np.ndarray:
    """Matrix exponential via scaling-and-squaring with a diagonal Pade approximant."""
    m = as_matrix(m)
    result = scipy.linalg.expm(m)
    if not np.isfinite(result).all():
        raise RangeError(
            f"matrix exponential overflowed for input with inf_norm {inf_norm(m):.3g}"
        )
    return np.asarray(result, dtype=complex)


def real_power(t: float, m: np.ndarray) -> np.ndarray:
    """Principal matrix power ``t**M = exp(M * log(t))`` for real ``t > 0``.

    ``t == 1`` returns the identity exactly.
    """
    m = as_matrix(m)
    t = float(t)
    if not (t > 0.0) or not math.isfinite(t):
        raise DomainError(f"real_power requires t > 0, got {t}")
    if t == 1.0:
        return np.eye(m.shape[0], dtype=complex)
    return mat_exp(m * math.log(t))


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Eigendecomposition ``M = V diag(eigenvalues) V^{-1}``.

    ``vec_condition`` is the 2-norm condition number of the eigenvector
    matrix; it is always >= 1 and large values signal a nearly defective
    matrix whose spectral route should not be trusted.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    vec_condition: float


def eig(m: np.ndarray) -> SpectralDecomposition:
    """Eigendecomposition with an explicit conditioning report."""
    m = as_matrix(m)
    try:
        w, v = np.linalg.eig(m)
    except np.linalg.LinAlgError as exc:
        raise DecompositionError(f"eigenvalue iteration failed to converge: {exc}") from exc
    sv = np.linalg.svd(v, compute_uv=False)
    cond = float(sv[0] / sv[-1]) if sv[-1] > 0.0 else float("inf")
    return SpectralDecomposition(eigenvalues=w, eigenvectors=v, vec_condition=max(cond, 1.0))


def _taylor_matrix_function(m: np.ndarray, f, eigenvalues: np.ndarray) -> np.ndarray:
    # Cauchy-integral Taylor coefficients of f about the mean eigenvalue,
    # sampled on a circle whose radius is twice the spectral spread.  Valid
    # whenever f is analytic on that disk; every scalar function used in this
    # package (exp, Mittag-Leffler, polynomials) is entire.
    center = complex(np.mean(eigenvalues))
    spread = float(np.max(np.abs(eigenvalues - center))) if eigenvalues.size else 0.0
    radius = 2.0 * spread + 1.0 + 0.1 * abs(center)
    n_samples = 256
    theta = 2.0 * np.pi * np.arange(n_samples) / n_samples
    samples = np.asarray(f(center + radius * np.exp(1j * theta)), dtype=complex)
    # c_m * radius**m, by the trapezoid rule for the Cauchy coefficient
    # integral (1/N) sum_j f_j e^{-im theta_j}: the forward transform / N
    scaled_coeffs = np.fft.fft(samples) / n_samples

    k = m.shape[0]
    x = (m - center * np.eye(k)) / radius  # spectral radius <= 1/2 by construction
    term = np.eye(k, dtype=complex)
    total = scaled_coeffs[0] * term
    norm_floor = 1e-16 * max(1.0, float(np.max(np.abs(samples))))
    quiet = 0
    for j in range(1, n_samples):
        term = term @ x
        contrib = scaled_coeffs[j] * term
        total = total + contrib
        if inf_norm(contrib) < norm_floor:
            quiet += 1
            if quiet >= 3:
                return total
        else:
            quiet = 0
    if inf_norm(contrib) > 1e-10 * max(1.0, inf_norm(total)):
        raise EvaluationError("Taylor fallback for matrix function did not converge")
    return total


def apply_scalar_function(m: np.ndarray, f, info: bool = False):
    """Lift a scalar function to a matrix argument.

    Uses the eigendecomposition when the eigenvector matrix is well
    conditioned (``vec_condition <= 1e6``); otherwise falls back to a
    truncated Taylor expansion of ``f`` about the mean eigenvalue.  ``f``
    must accept complex ndarray input elementwise.

    With ``info=True`` returns ``(result, details)`` where ``details``
    records which path was taken and the observed ``vec_condition``.
    """
    m = as_matrix(m)
    dec = eig(m)
    if dec.vec_condition <= FALLBACK_CONDITION:
        fw = np.asarray(f(dec.eigenvalues), dtype=complex)
        result = (dec.eigenvectors * fw[None, :]) @ np.linalg.inv(dec.eigenvectors)
        path = "spectral"
    else:
        result = _taylor_matrix_function(m, f, dec.eigenvalues)
        path = "taylor"
    if info:
        return result, {"path": path, "vec_condition": dec.vec_condition}
    return result


def matrix_to_json(m: np.ndarray) -> dict:
    """Encode a matrix as ``{"dim": k, "re": [[...]], "im": [[...]]}``."""
    m = as_matrix(m)
    return {
        "dim": int(m.shape[0]),
        "re": m.real.tolist(),
        "im": m.imag.tolist(),
    }


def matrix_from_json(obj, field: str = "matrix") -> np.ndarray:
    """Decode the JSON matrix encoding.  The ``im`` block is optional."""
    if not isinstance(obj, dict):
        raise DomainError(f"{field}: expected an object with 'dim' and 're'")
    try:
        dim = int(obj["dim"])
    except (KeyError, TypeError, ValueError):
        raise DomainError(f"{field}.dim: expected a positive integer") from None
    if dim <= 0:
        raise DomainError(f"{field}.dim: expected a positive integer, got {dim}")
    if "re" not in obj:
        raise DomainError(f"{field}.re: missing required real part")
    re = np.asarray(obj["re"], dtype=float)
    if re.shape != (dim, dim):
        raise DomainError(f"{field}.re: expected shape ({dim}, {dim}), got {re.shape}")
    if "im" in obj and obj["im"] is not None:
        im = np.asarray(obj["im"], dtype=float)
        if im.shape != (dim, dim):
            raise DomainError(f"{field}.im: expected shape ({dim}, {dim}), got {im.shape}")
    else:
        im = np.zeros((dim, dim))
    return as_matrix(re + 1j * im, field)
