"""Dense LU with log-determinants and extreme singular value estimates."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

SINGULAR_RATIO = 1e-13


class SingularSystemError(ArithmeticError):
    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


@dataclass(frozen=True)
class LuFactorization:
    lu: np.ndarray
    piv: np.ndarray
    zero_pivot: bool

    @property
    def n(self) -> int:
        return self.lu.shape[0]


@dataclass(frozen=True)
class DetValue:
    sign: int
    logabs: float

    @property
    def value(self) -> float:
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.logabs)


@dataclass(frozen=True)
class SigmaExtremes:
    smin: float
    smax: float
    iters_min: int
    iters_max: int

    @property
    def ratio(self) -> float:
        return self.smin / self.smax if self.smax > 0 else 0.0


def _check_square(a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def lu_factor(a) -> LuFactorization:
    """LU with partial pivoting; an exactly zero pivot is recorded, not raised."""
    a = _check_square(a)
    if a.shape[0] == 0:
        return LuFactorization(a.copy(), np.zeros(0, dtype=np.int32), False)
    with warnings.catch_warnings():
        # LAPACK reports exact singularity through a warning; we track it ourselves
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(a, check_finite=False)
    zero = bool(np.any(np.diag(lu) == 0.0))
    return LuFactorization(lu, piv, zero)


def log_abs_det(f: LuFactorization) -> DetValue:
    if f.zero_pivot:
        return DetValue(0, -math.inf)
    d = np.diag(f.lu)
    swaps = int(np.count_nonzero(f.piv != np.arange(f.n)))
    sign = -1 if (swaps + int(np.count_nonzero(d < 0))) % 2 else 1
    return DetValue(sign, float(np.sum(np.log(np.abs(d)))))


def solve(f: LuFactorization, b) -> np.ndarray:
    if f.zero_pivot:
        raise SingularSystemError("matrix is exactly singular")
    return scipy.linalg.lu_solve((f.lu, f.piv), np.asarray(b, dtype=float), check_finite=False)


def _rayleigh_iterate(step, n, rtol, max_iter, seed=0):
    # power iteration on a symmetric positive semidefinite operator
    x = np.random.default_rng(seed).standard_normal(n)
    x /= np.linalg.norm(x)
    est = 0.0
    for it in range(1, max_iter + 1):
        y = step(x)
        new = float(np.linalg.norm(y))
        if new == 0.0:
            return 0.0, it
        x = y / new
        if abs(new - est) <= rtol * new:
            return new, it
        est = new
    return est, max_iter


def sigma_extremes(a, lu: LuFactorization | None = None, rtol: float = 1e-8,
                   max_iter: int = 10_000) -> SigmaExtremes:
    """sigma_max by power iteration on A^T A, sigma_min by inverse iteration
    reusing the LU of A."""
    a = _check_square(a)
    n = a.shape[0]
    lam_max, it_max = _rayleigh_iterate(lambda v: a.T @ (a @ v), n, rtol, max_iter)
    smax = math.sqrt(lam_max)
    if lu is None:
        lu = lu_factor(a)
    if lu.zero_pivot or smax == 0.0:
        return SigmaExtremes(0.0, smax, 0, it_max)
    factors = (lu.lu, lu.piv)

    def inv_step(v):
        w = scipy.linalg.lu_solve(factors, v, trans=1, check_finite=False)
        return scipy.linalg.lu_solve(factors, w, check_finite=False)

    with np.errstate(over="ignore", invalid="ignore"):
        lam_inv, it_min = _rayleigh_iterate(inv_step, n, rtol, max_iter, seed=1)
    if not math.isfinite(lam_inv):
        return SigmaExtremes(0.0, smax, it_min, it_max)
    smin = 1.0 / math.sqrt(lam_inv) if lam_inv > 0 else math.inf
    return SigmaExtremes(smin, smax, it_min, it_max)


def is_numerically_singular(s: SigmaExtremes, threshold: float = SINGULAR_RATIO) -> bool:
    return s.smin <= threshold * s.smax
