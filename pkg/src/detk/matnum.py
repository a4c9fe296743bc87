"""Dense complex matrix kernel: LU determinant, matrix exponential, small
eigenvalue solver, and the two forms of the k-th regularized determinant.

Matrices are square ``numpy`` arrays of dtype ``complex128``.  Storage and
matrix products come from numpy; the determinant, exponential and
eigenvalue routines are implemented here so the spectral oracle does not
share code with the LU path.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

EIG_MAX_DIM = 8
ABERTH_MAX_ITER = 200
ABERTH_TOL = 1e-13


def as_matrix(M) -> np.ndarray:
    """Validate and convert to a square finite complex128 array."""
    arr = np.array(M, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix has NaN or Inf entries")
    return arr


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.complex128)


def matrix_to_json_obj(M: np.ndarray) -> dict:
    M = as_matrix(M)
    return {"n": M.shape[0], "entries": [[float(z.real), float(z.imag)] for z in M.ravel()]}


def matrix_from_json_obj(obj: dict) -> np.ndarray:
    try:
        n = int(obj["n"])
        entries = obj["entries"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed matrix object: {exc}") from None
    if n < 1 or len(entries) != n * n:
        raise ValueError(f"expected {n * n} entries for n={n}, got {len(entries)}")
    flat = [complex(float(re), float(im)) for re, im in entries]
    return as_matrix(np.array(flat).reshape(n, n))


def write_matrix(path: str | Path, M: np.ndarray) -> None:
    Path(path).write_text(json.dumps(matrix_to_json_obj(M)))


def read_matrix(path: str | Path) -> np.ndarray:
    return matrix_from_json_obj(json.loads(Path(path).read_text()))


def lu_det(M) -> complex:
    """Determinant by Gaussian elimination with partial pivoting."""
    U = as_matrix(M).copy()
    n = U.shape[0]
    det = complex(1.0)
    for col in range(n):
        p = col + int(np.argmax(np.abs(U[col:, col])))
        pivot = U[p, col]
        if pivot == 0:
            return 0j
        if p != col:
            U[[col, p]] = U[[p, col]]
            det = -det
        det *= pivot
        if col + 1 < n:
            factors = U[col + 1:, col] / pivot
            U[col + 1:, col:] -= np.outer(factors, U[col, col:])
    return complex(det)


def _taylor_order(theta: float, eps: float = 1e-16) -> int:
    # smallest m with theta^(m+1)/(m+1)! below eps (remainder bound for theta <= 1/4)
    m, term = 0, 1.0
    while True:
        m += 1
        term *= theta / m
        if term * theta / (m + 1) < eps:
            return m


def mat_exp(M) -> np.ndarray:
    """Scaling and squaring with a truncated Taylor series at the scaled level."""
    M = as_matrix(M)
    n = M.shape[0]
    norm = float(np.max(np.sum(np.abs(M), axis=0))) if n else 0.0
    theta = 0.25
    s = 0 if norm <= theta else int(math.ceil(math.log2(norm / theta)))
    X = M / (2.0 ** s)
    order = _taylor_order(theta)
    I = identity(n)
    # Horner: I + X(I + X/2(I + X/3(...)))
    E = I.copy()
    for m in range(order, 0, -1):
        E = I + (X @ E) / m
    for _ in range(s):
        E = E @ E
    return E


def log_series_matrix(M, k: int) -> np.ndarray:
    """``sum_{l=1}^{k-1} M^l / l``."""
    M = as_matrix(M)
    S = np.zeros_like(M)
    P = identity(M.shape[0])
    for l in range(1, k):
        P = P @ M
        S = S + P / l
    return S


def regularized_det(M, k: int) -> complex:
    """``det((I - M) exp(sum_{l<k} M^l / l))`` with LU and the Taylor exponential."""
    if k < 1:
        raise ValueError("k must be >= 1")
    M = as_matrix(M)
    I = identity(M.shape[0])
    if k == 1:
        return lu_det(I - M)
    return lu_det((I - M) @ mat_exp(log_series_matrix(M, k)))


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues with algebraic multiplicity, by modulus descending then argument ascending."""

    eigenvalues: tuple[complex, ...]

    def __len__(self) -> int:
        return len(self.eigenvalues)

    def __iter__(self):
        return iter(self.eigenvalues)

    def __getitem__(self, i):
        return self.eigenvalues[i]


def charpoly(M) -> np.ndarray:
    """Coefficients of ``det(t I - M)``, highest degree first (Faddeev-LeVerrier)."""
    M = as_matrix(M)
    n = M.shape[0]
    coeffs = np.zeros(n + 1, dtype=np.complex128)
    coeffs[0] = 1.0
    I = identity(n)
    Mk = np.zeros_like(M)
    for k in range(1, n + 1):
        Mk = M @ Mk + coeffs[k - 1] * I
        coeffs[k] = -np.trace(M @ Mk) / k
    return coeffs


def _horner_with_derivative(coeffs: np.ndarray, z: complex) -> tuple[complex, complex]:
    p, dp = complex(coeffs[0]), 0j
    for c in coeffs[1:]:
        dp = dp * z + p
        p = p * z + c
    return p, dp


def aberth_roots(coeffs, max_iter: int = ABERTH_MAX_ITER, tol: float = ABERTH_TOL) -> list[complex]:
    """All roots of a monic-normalizable polynomial (highest degree first)."""
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    coeffs = coeffs / coeffs[0]
    deg = len(coeffs) - 1
    if deg == 0:
        return []
    # Fujiwara bound; start on a circle inside it, rotated off the real axis
    radius = 2 * float(np.max(np.abs(coeffs[1:]) ** (1 / np.arange(1, deg + 1))))
    if radius == 0:
        return [0j] * deg
    z = [0.5 * radius * cmath.exp(1j * (2 * math.pi * i / deg + 0.4)) for i in range(deg)]
    for _ in range(max_iter):
        biggest = 0.0
        for i in range(deg):
            p, dp = _horner_with_derivative(coeffs, z[i])
            if p == 0:
                continue
            ratio = p / dp if dp != 0 else p
            repulse = sum(1 / (z[i] - z[j]) for j in range(deg) if j != i and z[i] != z[j])
            step = ratio / (1 - ratio * repulse)
            z[i] -= step
            biggest = max(biggest, abs(step) / (1 + abs(z[i])))
        if biggest < tol:
            break
    return z


def sort_spectrum(values) -> Spectrum:
    return Spectrum(tuple(sorted((complex(v) for v in values),
                                 key=lambda v: (-abs(v), cmath.phase(v)))))


def eig_small(M) -> Spectrum:
    """Eigenvalues from the characteristic polynomial; oracle use only (n <= 8)."""
    M = as_matrix(M)
    if M.shape[0] > EIG_MAX_DIM:
        raise ValueError(f"eig_small supports n <= {EIG_MAX_DIM}, got n={M.shape[0]}")
    return sort_spectrum(aberth_roots(charpoly(M)))


def regularized_det_spectral(M, k: int) -> complex:
    """``prod_j (1 - l_j) exp(sum_{l<k} l_j^l / l)`` over the eigenvalues of ``M``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    spec = eig_small(M)
    prod = complex(1.0)
    exponent = 0j
    for lam in spec:
        prod *= 1 - lam
        p = complex(1.0)
        for l in range(1, k):
            p *= lam
            exponent += p / l
    return prod * cmath.exp(exponent)
