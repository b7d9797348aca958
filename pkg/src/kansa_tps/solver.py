"""End-to-end Kansa solve of the Dirichlet Poisson problem on random points."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import linalg
from .assembly import CollocationSet, KansaMatrix, RhsSpec, assemble, assemble_rhs
from .geometry import Domain
from .kernel import TpsKernel, distance
from .sampling import GENERATOR_NAME, DensitySpec, PointSampler, SeededGenerator


@dataclass(frozen=True)
class ManufacturedCase:
    """Exact solution u with its Laplacian f; the boundary datum is u itself."""

    name: str
    u: Callable
    f: Callable

    @property
    def rhs(self) -> RhsSpec:
        return RhsSpec(self.f, self.u, self.name)


def _quadratic_f(x, y):
    return np.full(np.shape(x), 4.0)


MANUFACTURED = {
    "quadratic": ManufacturedCase("quadratic", lambda x, y: x**2 + y**2, _quadratic_f),
    "harmonic-exp": ManufacturedCase(
        "harmonic-exp", lambda x, y: np.exp(x) * np.sin(y), lambda x, y: np.zeros(np.shape(x))
    ),
    "trig": ManufacturedCase(
        "trig",
        lambda x, y: np.sin(np.pi * x) * np.sin(np.pi * y),
        lambda x, y: -2 * np.pi**2 * np.sin(np.pi * x) * np.sin(np.pi * y),
    ),
}


@dataclass(frozen=True)
class Diagnostics:
    sign: int
    logdet: float
    smin: float
    smax: float
    residual: float  # ||K x - rhs||_inf / ||rhs||_inf

    @property
    def cond(self) -> float:
        return self.smax / self.smin if self.smin > 0 else math.inf

    @property
    def singular(self) -> bool:
        return self.smin <= linalg.SINGULAR_RATIO * self.smax


@dataclass(frozen=True, eq=False)
class KansaSolution:
    c: np.ndarray
    d: np.ndarray
    cset: CollocationSet
    kernel: TpsKernel
    diagnostics: Diagnostics | None = None
    seed: int | None = field(default=None)

    @property
    def coefficients(self) -> np.ndarray:
        return np.concatenate([self.c, self.d])

    def _basis(self, x, y, laplacian: bool):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        y = np.atleast_1d(np.asarray(y, dtype=float))
        centers = self.cset.points
        r = distance(x[:, None], y[:, None], centers[None, :, 0], centers[None, :, 1])
        vals = self.kernel.lap_phi(r) if laplacian else self.kernel.phi(r)
        return vals @ self.coefficients

    def evaluate(self, x, y):
        out = self._basis(x, y, laplacian=False)
        return float(out[0]) if np.ndim(x) == 0 else out

    def evaluate_laplacian(self, x, y):
        out = self._basis(x, y, laplacian=True)
        return float(out[0]) if np.ndim(x) == 0 else out

    def to_csv(self, path) -> None:
        dg = self.diagnostics
        lines = [
            f"# seed={self.seed} generator={GENERATOR_NAME} nu={self.kernel.nu} "
            f"n={self.cset.n} m={self.cset.m}",
        ]
        if dg is not None:
            lines.append(
                f"# sign={dg.sign} logdet={dg.logdet:.17e} smin={dg.smin:.17e} "
                f"smax={dg.smax:.17e} residual={dg.residual:.17e}"
            )
        lines.append("kind,x,y,t,coefficient")
        for (px, py), c in zip(self.cset.interior, self.c):
            lines.append(f"interior,{px:.17e},{py:.17e},,{c:.17e}")
        for (qx, qy), t, d in zip(self.cset.boundary, self.cset.abscissas, self.d):
            lines.append(f"boundary,{qx:.17e},{qy:.17e},{t:.17e},{d:.17e}")
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")


def evaluate(sol: KansaSolution, p) -> float:
    return sol.evaluate(float(p[0]), float(p[1]))


def evaluate_laplacian(sol: KansaSolution, p) -> float:
    return sol.evaluate_laplacian(float(p[0]), float(p[1]))


def sample_set(domain: Domain, n: int, m: int, gen: SeededGenerator,
               interior: DensitySpec | None = None, boundary: DensitySpec | None = None) -> CollocationSet:
    """n interior points, then m boundary abscissas, guarded against duplicates."""
    sampler = PointSampler(domain, gen, interior, boundary)
    pts: list = []
    for _ in range(n):
        pts.append(sampler.interior_point(pts))
    ts = []
    qs = list(pts)
    for _ in range(m):
        t = sampler.boundary_abscissa(qs)
        qx, qy = domain.boundary.eval(t)
        qs.append((float(qx), float(qy)))
        ts.append(t)
    return CollocationSet.build(domain, np.array(pts).reshape(-1, 2), ts)


def solve_system(km: KansaMatrix, rhs: np.ndarray):
    """Factor, check the singularity verdict, solve. Returns (x, Diagnostics)."""
    lu = linalg.lu_factor(km.data)
    det = linalg.log_abs_det(lu)
    sig = linalg.sigma_extremes(km.data, lu)
    if lu.zero_pivot or linalg.is_numerically_singular(sig):
        diag = Diagnostics(det.sign, det.logabs, sig.smin, sig.smax, math.nan)
        raise linalg.SingularSystemError(
            f"collocation matrix is numerically singular (smin/smax = {sig.ratio:.3e})",
            {"diagnostics": diag},
        )
    x = linalg.solve(lu, rhs)
    scale = np.max(np.abs(rhs)) or 1.0
    residual = float(np.max(np.abs(km.data @ x - rhs)) / scale)
    return x, Diagnostics(det.sign, det.logabs, sig.smin, sig.smax, residual)


def solve_poisson(domain: Domain, kernel: TpsKernel, n: int, m: int, rhs: RhsSpec, seed: int,
                  interior: DensitySpec | None = None,
                  boundary: DensitySpec | None = None) -> KansaSolution:
    if n + m < 2:
        raise ValueError("need at least two collocation points")
    gen = SeededGenerator(seed)
    cset = sample_set(domain, n, m, gen, interior, boundary)
    return solve_on_set(domain, kernel, cset, rhs, seed=seed)


def solve_on_set(domain: Domain, kernel: TpsKernel, cset: CollocationSet, rhs: RhsSpec,
                 seed: int | None = None) -> KansaSolution:
    km = assemble(kernel, domain, cset)
    b = assemble_rhs(rhs, cset)
    x, diag = solve_system(km, b)
    return KansaSolution(x[:cset.n], x[cset.n:], cset, kernel, diag, seed)


def grid_error(sol: KansaSolution, case: ManufacturedCase, domain: Domain,
               resolution: int = 50) -> tuple[float, float]:
    """(max, rms) error of u_N against the exact solution on interior grid nodes."""
    gx, gy = domain.interior_grid(resolution)
    if gx.size == 0:
        raise ValueError("error grid has no interior nodes")
    err = np.abs(sol.evaluate(gx, gy) - case.u(gx, gy))
    return float(np.max(err)), float(np.sqrt(np.mean(err**2)))
