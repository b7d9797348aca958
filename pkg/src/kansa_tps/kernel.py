"""Thin-plate spline radial function r^(2 nu) log r and its Laplacian."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class CenterSingularityError(ValueError):
    """Laplacian requested at the center for nu = 1, where it diverges."""


def distance(ax, ay, bx, by):
    # plain Euclidean norm, no squared-distance shortcuts
    return np.hypot(np.subtract(ax, bx), np.subtract(ay, by))


@dataclass(frozen=True)
class TpsKernel:
    nu: int = 2

    def __post_init__(self):
        if int(self.nu) != self.nu or self.nu < 1:
            raise ValueError(f"nu must be a positive integer, got {self.nu!r}")

    def phi(self, r):
        r = np.asarray(r, dtype=float)
        if np.any(r < 0):
            raise ValueError("phi is defined for r >= 0 only")
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(r > 0, r ** (2 * self.nu) * np.log(r), 0.0)
        return out[()] if out.ndim == 0 else out

    def lap_phi(self, r):
        """4 nu r^(2(nu-1)) (nu log r + 1); zero at r = 0 when nu >= 2."""
        r = np.asarray(r, dtype=float)
        if np.any(r < 0):
            raise ValueError("lap_phi is defined for r >= 0 only")
        nu = self.nu
        if nu == 1 and np.any(r == 0):
            raise CenterSingularityError("Laplacian of r^2 log r diverges at the center")
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(r > 0, 4 * nu * r ** (2 * (nu - 1)) * (nu * np.log(r) + 1), 0.0)
        return out[()] if out.ndim == 0 else out

    def phi_pair(self, a, b):
        return self.phi(distance(a[0], a[1], b[0], b[1]))

    def lap_phi_pair(self, a, b):
        return self.lap_phi(distance(a[0], a[1], b[0], b[1]))

    def critical_radius(self) -> float:
        """Unique positive zero of the Laplacian, exp(-1/nu)."""
        return math.exp(-1.0 / self.nu)


def phi(k: TpsKernel, r):
    return k.phi(r)


def lap_phi(k: TpsKernel, r):
    return k.lap_phi(r)


def phi_pair(k: TpsKernel, a, b):
    return k.phi_pair(a, b)


def lap_phi_pair(k: TpsKernel, a, b):
    return k.lap_phi_pair(a, b)


def critical_radius(k: TpsKernel) -> float:
    return k.critical_radius()
