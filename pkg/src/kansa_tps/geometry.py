"""Closed analytic boundary curves given as truncated Fourier series, and the
domains they enclose."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from shapely.geometry import LinearRing

TWO_PI = 2.0 * math.pi
DEFAULT_POLYLINE_SIZE = 4096
AMBIGUOUS_BAND = 1e-9
BOX_MARGIN = 1e-6


class GeometryError(ValueError):
    pass


class QuadratureError(RuntimeError):
    pass


class Point2(NamedTuple):
    x: float
    y: float


class Box(NamedTuple):
    xmin: float
    xmax: float
    ymin: float
    ymax: float

    @property
    def area(self) -> float:
        return (self.xmax - self.xmin) * (self.ymax - self.ymin)


def _coeffs(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise GeometryError(f"{name} must be a non-empty 1-d coefficient list")
    if not np.all(np.isfinite(arr)):
        raise GeometryError(f"{name} has non-finite entries")
    return arr


@dataclass(frozen=True, eq=False)
class AnalyticCurve:
    """Closed curve t -> (x(t), y(t)) on [0, 2pi).

    ``x_cos[k]`` and ``x_sin[k]`` multiply ``cos(k t)`` and ``sin(k t)``;
    ``x_cos[0]`` is the constant term and ``x_sin[0]`` must be zero. All four
    arrays share the length K + 1. Regularity (nonvanishing velocity) is
    checked at construction unless ``validate=False``.
    """

    x_cos: np.ndarray
    x_sin: np.ndarray
    y_cos: np.ndarray
    y_sin: np.ndarray
    validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        arrays = {}
        for name in ("x_cos", "x_sin", "y_cos", "y_sin"):
            arr = _coeffs(getattr(self, name), name)
            arr.setflags(write=False)
            arrays[name] = arr
            object.__setattr__(self, name, arr)
        if len({a.size for a in arrays.values()}) != 1:
            raise GeometryError("all coefficient arrays must have the same length")
        if arrays["x_sin"][0] != 0.0 or arrays["y_sin"][0] != 0.0:
            raise GeometryError("sin coefficient of harmonic 0 must be zero")
        if self.validate:
            self._check_regular()

    @property
    def degree(self) -> int:
        return self.x_cos.size - 1

    @classmethod
    def circle(cls, radius=1.0, center=(0.0, 0.0)) -> "AnalyticCurve":
        return cls.ellipse(radius, radius, center)

    @classmethod
    def ellipse(cls, a: float, b: float, center=(0.0, 0.0)) -> "AnalyticCurve":
        cx, cy = center
        return cls([cx, a], [0.0, 0.0], [cy, 0.0], [0.0, b])

    @classmethod
    def polar(cls, radial_cos) -> "AnalyticCurve":
        """Star-shaped curve with radius r(t) = sum_k c_k cos(k t).

        Uses cos(kt)cos(t) = (cos((k+1)t) + cos((k-1)t)) / 2 and the sine
        analogue, so the Cartesian series has degree K + 1.
        """
        c = np.asarray(radial_cos, dtype=float)
        x_cos = np.zeros(c.size + 1)
        y_sin = np.zeros(c.size + 1)
        x_cos[1] += c[0]
        y_sin[1] += c[0]
        for k in range(1, c.size):
            x_cos[k + 1] += c[k] / 2
            x_cos[k - 1] += c[k] / 2
            y_sin[k + 1] += c[k] / 2
            if k > 1:
                y_sin[k - 1] -= c[k] / 2
        return cls(x_cos, np.zeros(c.size + 1), np.zeros(c.size + 1), y_sin)

    def _check_regular(self, samples: int = DEFAULT_POLYLINE_SIZE) -> None:
        t = np.linspace(0.0, TWO_PI, samples, endpoint=False)
        speed = self.speed(t)
        if not np.min(speed) > 0.0:
            raise GeometryError("curve is not regular: velocity vanishes")

    def eval(self, t):
        """Point(s) on the curve; ``t`` may be a scalar or an array."""
        t = np.asarray(t, dtype=float)
        k = np.arange(self.x_cos.size)
        kt = np.multiply.outer(np.mod(t, TWO_PI), k)
        c, s = np.cos(kt), np.sin(kt)
        x = c @ self.x_cos + s @ self.x_sin
        y = c @ self.y_cos + s @ self.y_sin
        return x, y

    def deriv(self, t):
        """Velocity (dx/dt, dy/dt) by term-wise differentiation."""
        t = np.asarray(t, dtype=float)
        k = np.arange(self.x_cos.size)
        kt = np.multiply.outer(np.mod(t, TWO_PI), k)
        c, s = np.cos(kt), np.sin(kt)
        dx = c @ (k * self.x_sin) - s @ (k * self.x_cos)
        dy = c @ (k * self.y_sin) - s @ (k * self.y_cos)
        return dx, dy

    def speed(self, t):
        dx, dy = self.deriv(t)
        return np.hypot(dx, dy)

    def speed_upper_bound(self) -> float:
        k = np.arange(self.x_cos.size)
        bx = float(np.sum(k * (np.abs(self.x_cos) + np.abs(self.x_sin))))
        by = float(np.sum(k * (np.abs(self.y_cos) + np.abs(self.y_sin))))
        return math.hypot(bx, by)

    def arclength(self, rtol: float = 1e-12, max_refinements: int = 20) -> float:
        """Length by composite Gauss-Legendre quadrature with panel doubling."""
        nodes, weights = np.polynomial.legendre.leggauss(16)
        panels = 8
        prev = None
        for _ in range(max_refinements):
            edges = np.linspace(0.0, TWO_PI, panels + 1)
            half = np.diff(edges) / 2
            mid = (edges[:-1] + edges[1:]) / 2
            t = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
            w = (half[:, None] * weights[None, :]).ravel()
            total = float(np.dot(w, self.speed(t)))
            if prev is not None and abs(total - prev) <= rtol * abs(total):
                return total
            prev = total
            panels *= 2
        raise QuadratureError("arclength quadrature did not converge")


def curve_eval(curve: AnalyticCurve, t: float) -> Point2:
    x, y = curve.eval(float(t))
    return Point2(float(x), float(y))


def curve_deriv(curve: AnalyticCurve, t: float) -> tuple[float, float]:
    dx, dy = curve.deriv(float(t))
    return float(dx), float(dy)


def speed_upper_bound(curve: AnalyticCurve) -> float:
    return curve.speed_upper_bound()


def arclength(curve: AnalyticCurve) -> float:
    return curve.arclength()


class Domain:
    """Bounded region enclosed by an analytic curve.

    Membership uses an even-odd crossing test against an inscribed polyline
    with ``polyline_size`` vertices. Points closer than
    ``AMBIGUOUS_BAND * diam`` to that polyline count as outside.
    """

    def __init__(self, boundary: AnalyticCurve, polyline_size: int = DEFAULT_POLYLINE_SIZE):
        self.boundary = boundary
        t = np.linspace(0.0, TWO_PI, polyline_size, endpoint=False)
        vx, vy = boundary.eval(t)
        self._vx = vx
        self._vy = vy
        self._ex = np.roll(vx, -1) - vx
        self._ey = np.roll(vy, -1) - vy
        self._elen2 = self._ex**2 + self._ey**2
        if not LinearRing(np.column_stack([vx, vy])).is_simple:
            raise GeometryError("boundary curve self-intersects")
        xmin, xmax, ymin, ymax = vx.min(), vx.max(), vy.min(), vy.max()
        self.diam = float(math.hypot(xmax - xmin, ymax - ymin))
        mx = BOX_MARGIN * max(xmax - xmin, 1.0)
        my = BOX_MARGIN * max(ymax - ymin, 1.0)
        self.box = Box(float(xmin - mx), float(xmax + mx), float(ymin - my), float(ymax + my))
        self.length = boundary.arclength()
        if not self.length > 0.0:
            raise GeometryError("boundary has zero length")
        self._band = AMBIGUOUS_BAND * self.diam
        self._build_chunks()
        self._grids: dict[int, tuple[np.ndarray, np.ndarray]] = {}

    @property
    def polyline(self) -> np.ndarray:
        return np.column_stack([self._vx, self._vy])

    def bounding_box(self) -> Box:
        return self.box

    def area(self) -> float:
        # shoelace on the polyline
        return 0.5 * abs(float(np.sum(self._vx * self._ey - self._vy * self._ex)))

    def _build_chunks(self, size: int = 64) -> None:
        # per-chunk bounding boxes of consecutive edges, used to prune scalar queries
        ax, ay = self._vx, self._vy
        bx, by = ax + self._ex, ay + self._ey
        lo_x, hi_x = np.minimum(ax, bx), np.maximum(ax, bx)
        lo_y, hi_y = np.minimum(ay, by), np.maximum(ay, by)
        starts = np.arange(0, ax.size, size)
        self._chunk_size = size
        self._cxmin = np.minimum.reduceat(lo_x, starts)
        self._cxmax = np.maximum.reduceat(hi_x, starts)
        self._cymin = np.minimum.reduceat(lo_y, starts)
        self._cymax = np.maximum.reduceat(hi_y, starts)

    def _edges_near(self, mask: np.ndarray) -> np.ndarray:
        chunks = np.flatnonzero(mask)
        idx = (chunks[:, None] * self._chunk_size + np.arange(self._chunk_size)).ravel()
        return idx[idx < self._vx.size]

    def contains(self, x: float, y: float) -> bool:
        """Same verdict as ``contains_many`` but prunes edges by chunk boxes."""
        b = self.box
        if not (b.xmin < x < b.xmax and b.ymin < y < b.ymax):
            return False
        band = self._band
        near = ((self._cxmin - band <= x) & (x <= self._cxmax + band)
                & (self._cymin - band <= y) & (y <= self._cymax + band))
        if near.any():
            idx = self._edges_near(near)
            dx = x - self._vx[idx]
            dy = y - self._vy[idx]
            ex, ey = self._ex[idx], self._ey[idx]
            s = np.clip((dx * ex + dy * ey) / self._elen2[idx], 0.0, 1.0)
            rx, ry = dx - s * ex, dy - s * ey
            if np.min(rx * rx + ry * ry) <= band * band:
                return False
        # only chunks spanning the horizontal line through y can be crossed
        idx = self._edges_near((self._cymin <= y) & (y <= self._cymax))
        ay = self._vy[idx]
        by = ay + self._ey[idx]
        straddle = (ay > y) != (by > y)
        idx, ay = idx[straddle], ay[straddle]
        xcross = self._vx[idx] + (y - ay) * self._ex[idx] / self._ey[idx]
        return bool(np.count_nonzero(x < xcross) % 2)

    def contains_many(self, x, y, chunk: int = 256) -> np.ndarray:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        y = np.atleast_1d(np.asarray(y, dtype=float))
        out = np.empty(x.shape, dtype=bool)
        for lo in range(0, x.size, chunk):
            px = x[lo:lo + chunk, None]
            py = y[lo:lo + chunk, None]
            out[lo:lo + chunk] = self._crossing_parity(px, py) & (self._distance2(px, py) > self._band**2)
        return out

    def _crossing_parity(self, px, py):
        ay, by = self._vy, self._vy + self._ey
        straddle = (ay > py) != (by > py)
        with np.errstate(divide="ignore", invalid="ignore"):
            xcross = self._vx + (py - ay) * self._ex / self._ey
        hits = straddle & (px < xcross)
        return (np.count_nonzero(hits, axis=1) % 2) == 1

    def _distance2(self, px, py):
        dx = px - self._vx
        dy = py - self._vy
        s = np.clip((dx * self._ex + dy * self._ey) / self._elen2, 0.0, 1.0)
        rx = dx - s * self._ex
        ry = dy - s * self._ey
        return np.min(rx * rx + ry * ry, axis=1)

    def interior_grid(self, resolution: int):
        """Nodes of a resolution x resolution grid over the box that lie inside."""
        if resolution not in self._grids:
            b = self.box
            gx, gy = np.meshgrid(np.linspace(b.xmin, b.xmax, resolution),
                                 np.linspace(b.ymin, b.ymax, resolution))
            gx, gy = gx.ravel(), gy.ravel()
            keep = self.contains_many(gx, gy)
            self._grids[resolution] = (gx[keep], gy[keep])
        return self._grids[resolution]

    def distance_to_boundary(self, x: float, y: float) -> float:
        return float(math.sqrt(self._distance2(np.array([[x]]), np.array([[y]]))[0]))


def contains(domain: Domain, p) -> bool:
    return domain.contains(p[0], p[1])


def bounding_box(domain: Domain) -> Box:
    return domain.box


def builtin_curve(name: str) -> AnalyticCurve:
    """``disk``, ``ellipse:a:b`` or ``star3``."""
    parts = name.split(":")
    if parts[0] == "disk" and len(parts) == 1:
        return AnalyticCurve.circle()
    if parts[0] == "ellipse" and len(parts) == 3:
        return AnalyticCurve.ellipse(float(parts[1]), float(parts[2]))
    if parts[0] == "star3" and len(parts) == 1:
        return AnalyticCurve.polar([1.0, 0.0, 0.0, 0.3])
    raise GeometryError(f"unknown built-in domain {name!r}")


def curve_from_dict(spec: dict) -> AnalyticCurve:
    keys = {"x_cos", "x_sin", "y_cos", "y_sin"}
    if set(spec) != keys:
        raise GeometryError(f"curve spec needs exactly the keys {sorted(keys)}")
    return AnalyticCurve(spec["x_cos"], spec["x_sin"], spec["y_cos"], spec["y_sin"])


def curve_to_dict(curve: AnalyticCurve) -> dict:
    return {name: getattr(curve, name).tolist() for name in ("x_cos", "x_sin", "y_cos", "y_sin")}
