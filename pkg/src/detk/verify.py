"""Numerical checks of the regularized determinant product formula on matrices."""

from __future__ import annotations

import cmath
import json
import time
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .correction import trace_correction
from .matnum import as_matrix, identity, regularized_det
from .ncpoly import NcPoly

RESIDUAL_FLOOR = 1e-30
DEFAULT_RADIUS = 0.5
DEFAULT_TOL = 1e-8


def relative_residual(a: complex, b: complex) -> float:
    return abs(a - b) / max(abs(a), abs(b), RESIDUAL_FLOOR)


def _check_pair(A, B) -> tuple[np.ndarray, np.ndarray]:
    A, B = as_matrix(A), as_matrix(B)
    if A.shape != B.shape:
        raise ValueError(f"dimension mismatch: {A.shape} vs {B.shape}")
    return A, B


def eval_poly(p: NcPoly, A, B) -> np.ndarray:
    """Substitute matrices for the letters and sum the weighted word products.

    Prefix products are shared between words, and each rational coefficient is
    rounded to double once, when its word product is added in.
    """
    A, B = _check_pair(A, B)
    n = A.shape[0]
    letters = {"A": A, "B": B}
    prefixes: dict[str, np.ndarray] = {"": identity(n)}

    def product_of(w: str) -> np.ndarray:
        P = prefixes.get(w)
        if P is None:
            P = prefixes[w] = product_of(w[:-1]) @ letters[w[-1]]
        return P

    out = np.zeros((n, n), dtype=np.complex128)
    for w, c in p.sorted_items():
        out += float(c) * product_of(w)
    return out


def trace_of(p: NcPoly, A, B) -> complex:
    return complex(np.trace(eval_poly(p, A, B)))


def sample_matrix(seed: int, n: int, radius: float = DEFAULT_RADIUS) -> np.ndarray:
    """Entries uniform in the complex disk of radius ``radius / n`` (PCG64 stream)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if radius <= 0:
        raise ValueError("radius must be > 0")
    rng = np.random.default_rng(seed)
    u = rng.random((n, n))
    v = rng.random((n, n))
    r = (radius / n) * np.sqrt(u)
    return as_matrix(r * np.exp(2j * np.pi * v))


def sample_pair(seed: int, n: int, radius: float = DEFAULT_RADIUS) -> tuple[np.ndarray, np.ndarray]:
    """Two independent matrices drawn from one seeded stream."""
    rng = np.random.default_rng(seed)
    seeds = rng.integers(0, 2**63, size=2)
    return sample_matrix(int(seeds[0]), n, radius), sample_matrix(int(seeds[1]), n, radius)


@dataclass
class VerificationReport:
    k: int
    n: int
    provenance: Union[int, str, dict]
    lhs: complex
    rhs: complex
    residual: float
    tolerance: float
    passed: bool
    timings: dict = field(default_factory=dict)
    extras: dict = field(default_factory=dict)

    def to_json_obj(self) -> dict:
        def enc(v):
            if isinstance(v, complex):
                return [v.real, v.imag]
            if isinstance(v, dict):
                return {key: enc(x) for key, x in v.items()}
            return v

        return {
            "k": self.k,
            "n": self.n,
            "provenance": self.provenance,
            "lhs": enc(self.lhs),
            "rhs": enc(self.rhs),
            "residual": self.residual,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "timings": self.timings,
            "extras": enc(self.extras),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj())


def hs_literal_rhs(A, B) -> complex:
    """Right side of the k = 2 formula with the literal ``exp(-tr(AB))`` factor."""
    A, B = _check_pair(A, B)
    return regularized_det(A, 2) * regularized_det(B, 2) * cmath.exp(-complex(np.trace(A @ B)))


def product_formula_check(A, B, k: int, tol: float = DEFAULT_TOL,
                          provenance: Union[int, str, dict] = "direct",
                          correction: NcPoly | None = None) -> VerificationReport:
    """Compare ``det_k(I - (A + B - AB))`` with ``det_k(I - A) det_k(I - B) exp(tr X_k)``.

    The trace is taken of the cyclic normal form of ``X_k``, which has the same
    trace as ``X_k`` itself.
    """
    A, B = _check_pair(A, B)
    if tol <= 0:
        raise ValueError("tolerance must be > 0")
    if correction is None:
        correction = trace_correction(k)
    t0 = time.perf_counter()
    lhs = regularized_det(A + B - A @ B, k)
    t1 = time.perf_counter()
    tr_x = trace_of(correction, A, B)
    rhs = regularized_det(A, k) * regularized_det(B, k) * cmath.exp(tr_x)
    t2 = time.perf_counter()
    residual = relative_residual(lhs, rhs)
    report = VerificationReport(
        k=k, n=A.shape[0], provenance=provenance, lhs=lhs, rhs=rhs,
        residual=residual, tolerance=tol, passed=residual <= tol,
        timings={"lhs_s": t1 - t0, "rhs_s": t2 - t1},
        extras={"trace_correction": tr_x},
    )
    if k == 2:
        literal = hs_literal_rhs(A, B)
        report.extras["rhs_hs_literal"] = literal
        report.extras["hs_residual"] = relative_residual(rhs, literal)
    return report


def commutation_check(A, B, k: int) -> float:
    """Relative difference of ``det_k(I - AB)`` and ``det_k(I - BA)``."""
    A, B = _check_pair(A, B)
    return relative_residual(regularized_det(A @ B, k), regularized_det(B @ A, k))


def run_cell(k: int, n: int, seed: int, radius: float = DEFAULT_RADIUS,
             tol: float = DEFAULT_TOL) -> VerificationReport:
    """One grid cell: product formula plus commutation identity on a seeded pair."""
    A, B = sample_pair(seed, n, radius)
    report = product_formula_check(A, B, k, tol,
                                   provenance={"seed": seed, "radius": radius})
    t0 = time.perf_counter()
    comm = commutation_check(A, B, k)
    report.timings["commutation_s"] = time.perf_counter() - t0
    report.extras["commutation_residual"] = comm
    return report


def cell_ok(report: VerificationReport) -> bool:
    """Gate for a grid cell: the product formula and, when present, the commutation identity."""
    comm = report.extras.get("commutation_residual")
    return report.passed and (comm is None or comm <= report.tolerance)
