"""Seeded acceptance-rejection samplers for interior points and boundary
abscissas."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .geometry import TWO_PI, AnalyticCurve, Domain

GENERATOR_NAME = "numpy.PCG64"
MAX_REJECTIONS = 1_000_000
PROBE_POINTS = 10_000
DUPLICATE_TOL = 1e-12


class RejectionBudgetError(RuntimeError):
    pass


class DensityError(ValueError):
    pass


class SeededGenerator:
    """Uniform [0, 1) stream from PCG64.

    Child generators for trial ``i`` are seeded from
    ``SeedSequence(entropy=seed, spawn_key=(i,))``, numpy's documented
    hash-based mixing, so trials are independent of execution order.
    """

    def __init__(self, seed: int, spawn_key: tuple = ()):
        self.seed = int(seed)
        self.spawn_key = tuple(spawn_key)
        seq = np.random.SeedSequence(entropy=self.seed, spawn_key=self.spawn_key)
        self._rng = np.random.Generator(np.random.PCG64(seq))

    def child(self, index: int) -> "SeededGenerator":
        return SeededGenerator(self.seed, self.spawn_key + (int(index),))

    def uniform(self) -> float:
        return float(self._rng.random())

    def uniform_pair(self) -> tuple[float, float]:
        u, v = self._rng.random(2)
        return float(u), float(v)

    def integers(self, high: int) -> int:
        return int(self._rng.integers(high))


@dataclass(frozen=True)
class DensitySpec:
    """Unnormalized density f(x, y, t) with a certified upper bound.

    Interior densities are evaluated with t = 0; boundary densities get the
    abscissa t together with the point (x, y) = gamma(t).
    """

    name: str
    func: Callable
    bound: float
    params: tuple = ()

    def __call__(self, x, y, t=0.0) -> float:
        return float(self.func(x, y, t))

    @property
    def is_uniform(self) -> bool:
        return self.name == "uniform"


def uniform_density() -> DensitySpec:
    return DensitySpec("uniform", lambda x, y, t: 1.0, 1.0)


def constant_density(value: float, bound: float = 1.0) -> DensitySpec:
    if not 0 < value <= bound:
        raise DensityError("constant density must lie in (0, bound]")
    return DensitySpec("constant", lambda x, y, t: value, bound, (value,))


def gaussian_bump(center=(0.0, 0.0), width: float = 0.3) -> DensitySpec:
    cx, cy = float(center[0]), float(center[1])
    if not width > 0:
        raise DensityError("gaussian bump width must be positive")
    s2 = 2.0 * width * width

    def f(x, y, t):
        return np.exp(-((x - cx) ** 2 + (y - cy) ** 2) / s2)

    return DensitySpec("gaussian-bump", f, 1.0, (cx, cy, float(width)))


def expression_density(text: str, bound: float | None = None, probe=None) -> DensitySpec:
    """Density from an expression in x, y, t.

    Without an explicit bound, 1.25 times the largest of the probe values is
    used; ``probe`` is an (x, y, t) triple of arrays.
    """
    from .expression import parse_expression

    expr = parse_expression(text)

    def f(x, y, t):
        return expr.evaluate(x=x, y=y, t=t)

    if bound is None:
        if probe is None:
            raise DensityError("expression density needs a bound or probe points")
        vals = np.asarray(f(*probe), dtype=float)
        bound = 1.25 * float(np.max(vals))
    return DensitySpec("expression", f, float(bound), (text,))


def interior_probe(domain: Domain, count: int = PROBE_POINTS, seed: int = 0):
    box = domain.box
    rng = np.random.default_rng(seed)
    x = box.xmin + (box.xmax - box.xmin) * rng.random(count)
    y = box.ymin + (box.ymax - box.ymin) * rng.random(count)
    keep = domain.contains_many(x, y)
    return x[keep], y[keep], np.zeros(int(keep.sum()))


def boundary_probe(curve: AnalyticCurve, count: int = PROBE_POINTS):
    t = np.linspace(0.0, TWO_PI, count, endpoint=False)
    x, y = curve.eval(t)
    return x, y, t


def certify(density: DensitySpec, probe) -> None:
    vals = np.broadcast_to(np.asarray(density.func(*probe), dtype=float), probe[0].shape)
    if np.any(~np.isfinite(vals)) or np.any(vals < 0):
        raise DensityError(f"{density.name} density is negative or non-finite on its support")
    if np.any(vals > density.bound):
        raise DensityError(f"{density.name} density exceeds its bound {density.bound}")


def _accept(gen: SeededGenerator, ratio: float) -> bool:
    # ratio >= 1 accepts without consuming the stream, so a uniform density
    # reproduces the plain sampler draw for draw
    if ratio >= 1.0:
        return True
    return gen.uniform() < ratio


def _propose_in_box(domain: Domain, gen: SeededGenerator):
    b = domain.box
    u, v = gen.uniform_pair()
    return b.xmin + (b.xmax - b.xmin) * u, b.ymin + (b.ymax - b.ymin) * v


def sample_interior_uniform(domain: Domain, gen: SeededGenerator, stats: dict | None = None):
    return sample_interior_density(domain, uniform_density(), gen, stats)


def sample_interior_density(domain: Domain, density: DensitySpec, gen: SeededGenerator,
                            stats: dict | None = None):
    for k in range(MAX_REJECTIONS):
        x, y = _propose_in_box(domain, gen)
        if not domain.contains(x, y):
            continue
        ratio = 1.0 if density.is_uniform else density(x, y) / density.bound
        if _accept(gen, ratio):
            if stats is not None:
                stats["proposals"] = stats.get("proposals", 0) + k + 1
            return x, y
    raise RejectionBudgetError(f"no interior point accepted in {MAX_REJECTIONS} proposals")


def sample_boundary_arclength(curve: AnalyticCurve, gen: SeededGenerator) -> float:
    """Abscissa with density |gamma'(t)| / L, enveloped by the Fourier speed bound."""
    smax = curve.speed_upper_bound()
    for _ in range(MAX_REJECTIONS):
        t = TWO_PI * gen.uniform()
        if _accept(gen, float(curve.speed(t)) / smax):
            return t
    raise RejectionBudgetError(f"no boundary abscissa accepted in {MAX_REJECTIONS} proposals")


def sample_boundary_density(curve: AnalyticCurve, density: DensitySpec, gen: SeededGenerator) -> float:
    for _ in range(MAX_REJECTIONS):
        t = TWO_PI * gen.uniform()
        if density.is_uniform:
            return t
        x, y = curve.eval(t)
        if _accept(gen, density(float(x), float(y), t) / density.bound):
            return t
    raise RejectionBudgetError(f"no boundary abscissa accepted in {MAX_REJECTIONS} proposals")


@dataclass
class PointSampler:
    """Draws collocation points for one domain, resampling near-duplicates.

    ``interior`` and ``boundary`` default to the uniform law in the domain
    and the arclength law on the curve. A boundary density, when given, is a
    density in the abscissa t.
    """

    domain: Domain
    gen: SeededGenerator
    interior: DensitySpec | None = None
    boundary: DensitySpec | None = None

    def _too_close(self, x, y, existing) -> bool:
        if len(existing) == 0:
            return False
        pts = np.asarray(existing, dtype=float)
        d = np.hypot(pts[:, 0] - x, pts[:, 1] - y)
        return bool(np.min(d) < DUPLICATE_TOL * self.domain.diam)

    def interior_point(self, existing=()) -> tuple[float, float]:
        while True:
            if self.interior is None:
                x, y = sample_interior_uniform(self.domain, self.gen)
            else:
                x, y = sample_interior_density(self.domain, self.interior, self.gen)
            if not self._too_close(x, y, existing):
                return x, y

    def boundary_abscissa(self, existing=()) -> float:
        curve = self.domain.boundary
        while True:
            if self.boundary is None:
                t = sample_boundary_arclength(curve, self.gen)
            else:
                t = sample_boundary_density(curve, self.boundary, self.gen)
            x, y = curve.eval(t)
            if not self._too_close(float(x), float(y), existing):
                return t


def chi_square_bins(samples, edges, probs):
    """Pearson statistic and p-value for binned samples against bin masses."""
    from scipy.stats import chisquare

    counts, _ = np.histogram(samples, bins=edges)
    expected = np.asarray(probs, dtype=float) * len(samples)
    res = chisquare(counts, expected * counts.sum() / expected.sum())
    return float(res.statistic), float(res.pvalue)


def acceptance_rate(domain: Domain, gen: SeededGenerator, proposals: int) -> float:
    hits = 0
    for _ in range(proposals):
        x, y = _propose_in_box(domain, gen)
        hits += domain.contains(x, y)
    return hits / proposals


def mean_radius(points) -> float:
    pts = np.asarray(points, dtype=float)
    return float(np.mean(np.hypot(pts[:, 0], pts[:, 1])))

