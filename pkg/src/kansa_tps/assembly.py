"""Kansa collocation matrix for the Dirichlet Poisson problem with TPS
centers placed at the collocation points.

Row and column order follow the collocation set: interior points first,
then boundary points. Interior rows hold Laplacians of the basis
functions, boundary rows hold their values.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .geometry import Domain
from .kernel import TpsKernel, distance

SET_TOL = 1e-12


class UnsupportedKernelError(ValueError):
    pass


class InvalidSetError(ValueError):
    pass


class RhsEvaluationError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class CollocationSet:
    interior: np.ndarray  # (n, 2)
    abscissas: np.ndarray  # (m,)
    boundary: np.ndarray  # (m, 2), gamma(abscissas)

    @classmethod
    def build(cls, domain: Domain, interior=(), abscissas=()) -> "CollocationSet":
        p = np.asarray(interior, dtype=float).reshape(-1, 2)
        t = np.asarray(abscissas, dtype=float).reshape(-1)
        qx, qy = domain.boundary.eval(t)
        q = np.column_stack([np.atleast_1d(qx), np.atleast_1d(qy)]).reshape(-1, 2)
        return cls(p, t, q)

    @property
    def n(self) -> int:
        return self.interior.shape[0]

    @property
    def m(self) -> int:
        return self.boundary.shape[0]

    @property
    def size(self) -> int:
        return self.n + self.m

    @property
    def points(self) -> np.ndarray:
        return np.vstack([self.interior, self.boundary])

    def with_interior(self, domain: Domain, p) -> "CollocationSet":
        return CollocationSet(np.vstack([self.interior, np.reshape(p, (1, 2))]),
                              self.abscissas, self.boundary)

    def with_boundary(self, domain: Domain, t: float) -> "CollocationSet":
        qx, qy = domain.boundary.eval(float(t))
        return CollocationSet(self.interior, np.append(self.abscissas, float(t)),
                              np.vstack([self.boundary, [[float(qx), float(qy)]]]))

    def validate(self, domain: Domain) -> None:
        pts = self.points
        if pts.size and not np.all(np.isfinite(pts)):
            raise InvalidSetError("collocation points must be finite")
        if self.n and not np.all(domain.contains_many(self.interior[:, 0], self.interior[:, 1])):
            raise InvalidSetError("interior points must lie strictly inside the domain")
        if self.size > 1:
            d = distance(pts[:, None, 0], pts[:, None, 1], pts[None, :, 0], pts[None, :, 1])
            np.fill_diagonal(d, np.inf)
            if np.min(d) <= SET_TOL * domain.diam:
                raise InvalidSetError("collocation points must be pairwise distinct")


@dataclass(frozen=True, eq=False)
class KansaMatrix:
    data: np.ndarray
    n: int
    m: int

    @property
    def size(self) -> int:
        return self.n + self.m

    def to_csv(self, path) -> None:
        np.savetxt(path, self.data, delimiter=",", fmt="%.17e")


@dataclass(frozen=True)
class RhsSpec:
    """Source term f and Dirichlet datum g as vectorized callables f(x, y)."""

    f: Callable
    g: Callable
    label: str = field(default="custom")


def _require_kernel(kernel: TpsKernel) -> None:
    if kernel.nu < 2:
        raise UnsupportedKernelError(
            "assembly needs nu >= 2: the Laplacian of r^2 log r is unbounded at its center"
        )


def _entries(kernel: TpsKernel, rows: np.ndarray, cols: np.ndarray, laplacian: bool) -> np.ndarray:
    # one kernel call per entry, elementwise over the (rows x cols) grid
    r = distance(rows[:, None, 0], rows[:, None, 1], cols[None, :, 0], cols[None, :, 1])
    return kernel.lap_phi(r) if laplacian else kernel.phi(r)


def assemble(kernel: TpsKernel, domain: Domain, cset: CollocationSet, validate: bool = True) -> KansaMatrix:
    _require_kernel(kernel)
    if validate:
        cset.validate(domain)
    n, m = cset.n, cset.m
    centers = cset.points
    k = np.empty((n + m, n + m))
    if n:
        k[:n] = _entries(kernel, cset.interior, centers, laplacian=True)
    if m:
        k[n:] = _entries(kernel, cset.boundary, centers, laplacian=False)
    np.fill_diagonal(k, 0.0)
    return KansaMatrix(k, n, m)


def assemble_rhs(rhs: RhsSpec, cset: CollocationSet) -> np.ndarray:
    try:
        f = np.broadcast_to(np.asarray(rhs.f(cset.interior[:, 0], cset.interior[:, 1]), dtype=float), (cset.n,))
        g = np.broadcast_to(np.asarray(rhs.g(cset.boundary[:, 0], cset.boundary[:, 1]), dtype=float), (cset.m,))
    except Exception as exc:  # user-supplied callables can fail in many ways
        raise RhsEvaluationError(f"could not evaluate right-hand side: {exc}") from exc
    out = np.concatenate([f, g])
    if not np.all(np.isfinite(out)):
        raise RhsEvaluationError("right-hand side has non-finite values")
    return out


def _check_new_point(domain: Domain, cset: CollocationSet, p) -> None:
    if cset.size == 0:
        return
    pts = cset.points
    d = distance(pts[:, 0], pts[:, 1], p[0], p[1])
    if np.min(d) <= SET_TOL * domain.diam:
        raise InvalidSetError("new point duplicates an existing collocation point")


def extend_boundary(km: KansaMatrix, kernel: TpsKernel, domain: Domain, cset: CollocationSet,
                    t_new: float) -> tuple[KansaMatrix, CollocationSet]:
    """Append a boundary center and row at the end, keeping all old entries."""
    _require_kernel(kernel)
    new_set = cset.with_boundary(domain, t_new)
    q = new_set.boundary[-1]
    _check_new_point(domain, cset, q)
    size = km.size
    k = np.empty((size + 1, size + 1))
    k[:size, :size] = km.data
    centers = new_set.points
    q2 = q.reshape(1, 2)
    if cset.n:
        k[:cset.n, size] = _entries(kernel, cset.interior, q2, laplacian=True)[:, 0]
    if cset.m:
        k[cset.n:size, size] = _entries(kernel, cset.boundary, q2, laplacian=False)[:, 0]
    k[size, :] = _entries(kernel, q2, centers, laplacian=False)[0]
    k[size, size] = 0.0
    return KansaMatrix(k, km.n, km.m + 1), new_set


def extend_interior(km: KansaMatrix, kernel: TpsKernel, domain: Domain, cset: CollocationSet,
                    p_new) -> tuple[KansaMatrix, CollocationSet]:
    """Insert an interior center and row at position n, between the blocks."""
    _require_kernel(kernel)
    p = np.asarray(p_new, dtype=float).reshape(2)
    if not domain.contains(p[0], p[1]):
        raise InvalidSetError("new interior point is not strictly inside the domain")
    _check_new_point(domain, cset, p)
    new_set = cset.with_interior(domain, p)
    n, size = km.n, km.size
    old = km.data
    k = np.empty((size + 1, size + 1))
    k[:n, :n] = old[:n, :n]
    k[:n, n + 1:] = old[:n, n:]
    k[n + 1:, :n] = old[n:, :n]
    k[n + 1:, n + 1:] = old[n:, n:]
    p2 = p.reshape(1, 2)
    centers = new_set.points
    if n:
        k[:n, n] = _entries(kernel, cset.interior, p2, laplacian=True)[:, 0]
    if cset.m:
        k[n + 1:, n] = _entries(kernel, cset.boundary, p2, laplacian=False)[:, 0]
    k[n, :] = _entries(kernel, p2, centers, laplacian=True)[0]
    k[n, n] = 0.0
    return KansaMatrix(k, n + 1, km.m), new_set
