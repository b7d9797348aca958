import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad

from kansa_tps.geometry import (
    TWO_PI, AnalyticCurve, Domain, GeometryError, arclength, builtin_curve, bounding_box,
    contains, curve_deriv, curve_eval, curve_from_dict, curve_to_dict, speed_upper_bound,
)

CURVES = {
    "circle": AnalyticCurve.circle(),
    "ellipse": AnalyticCurve.ellipse(2.0, 1.0),
    "star3": builtin_curve("star3"),
    "shifted": AnalyticCurve.circle(1.0, (5.0, 5.0)),
    "wavy": AnalyticCurve([0.1, 1.0, 0.05, 0.0], [0.0, 0.2, 0.0, 0.03],
                          [-0.2, 0.1, 0.0, 0.02], [0.0, 0.9, 0.08, 0.0]),
}


def test_eval_examples():
    c = AnalyticCurve.circle()
    assert curve_eval(c, 0.0) == (1.0, 0.0)
    x, y = curve_eval(c, math.pi / 2)
    assert x == pytest.approx(0.0, abs=1e-16) and y == 1.0
    x, y = curve_eval(AnalyticCurve.ellipse(2, 1), math.pi)
    assert x == -2.0 and y == pytest.approx(0.0, abs=1e-15)


def test_deriv_examples():
    c = AnalyticCurve.circle()
    assert curve_deriv(c, 0.0) == (0.0, 1.0)
    t = np.linspace(0, TWO_PI, 101)
    assert np.allclose(c.speed(t), 1.0, rtol=0, atol=1e-15)
    assert curve_deriv(AnalyticCurve.ellipse(2, 1), 0.0) == (0.0, 1.0)


@given(st.integers(0, int((8 - TWO_PI) * 2**50) - 1))
def test_periodic_exact(k):
    # on the 2^-50 grid with t + 2pi < 8 the shift is exact in binary64
    t = k * 2.0**-50
    assert (t + TWO_PI) - TWO_PI == t
    for c in CURVES.values():
        assert curve_eval(c, t) == curve_eval(c, t + TWO_PI)


@pytest.mark.parametrize("name", ["circle", "ellipse", "star3", "wavy"])
def test_fd_derivative(name):
    c = CURVES[name]
    h = 1e-6
    for t in np.linspace(0.1, 6.0, 25):
        x1, y1 = c.eval(t + h)
        x0, y0 = c.eval(t - h)
        fd = np.array([(x1 - x0) / (2 * h), (y1 - y0) / (2 * h)])
        exact = np.array(c.deriv(t))
        assert np.linalg.norm(fd - exact) <= 1e-6 * np.linalg.norm(exact)


def test_speed_bound_examples():
    assert speed_upper_bound(AnalyticCurve.circle()) == pytest.approx(math.sqrt(2), rel=1e-15)
    assert speed_upper_bound(AnalyticCurve.ellipse(2, 1)) == pytest.approx(math.sqrt(5), rel=1e-15)
    const = AnalyticCurve([1.0, 0.0], [0.0, 0.0], [2.0, 0.0], [0.0, 0.0], validate=False)
    assert speed_upper_bound(const) == 0.0


@pytest.mark.parametrize("name", list(CURVES))
def test_speed_bound_dominates(name):
    c = CURVES[name]
    t = np.linspace(0, TWO_PI, 4096, endpoint=False)
    assert speed_upper_bound(c) >= c.speed(t).max()


@pytest.mark.parametrize("radius", [0.5, 1.0, 3.0])
def test_circle_arclength(radius):
    assert arclength(AnalyticCurve.circle(radius)) == pytest.approx(TWO_PI * radius, rel=1e-10)


def test_ellipse_arclength_against_adaptive_quadrature():
    ref, _ = quad(lambda t: math.sqrt(4 * math.sin(t) ** 2 + math.cos(t) ** 2), 0, TWO_PI,
                  epsabs=1e-13, epsrel=1e-13, limit=200)
    assert ref == pytest.approx(9.6884482205, abs=1e-9)
    assert arclength(AnalyticCurve.ellipse(2, 1)) == pytest.approx(ref, rel=1e-11)


def test_regularity_validated():
    # x = cos t + cos 2t / 4 ... cusp-free; a curve with a vanishing velocity:
    with pytest.raises(GeometryError):
        AnalyticCurve([0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0])
    # hypocycloid-like x = 2cos t + cos 2t, y = 2 sin t - sin 2t has cusps
    with pytest.raises(GeometryError):
        AnalyticCurve([0.0, 2.0, 1.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 2.0, -1.0])


def test_self_intersection_rejected():
    # figure-eight: x = sin 2t, y = sin t
    curve = AnalyticCurve([0.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.0, 0.0], [0.0, 1.0, 0.0])
    with pytest.raises(GeometryError):
        Domain(curve)


def test_bad_coefficients():
    with pytest.raises(GeometryError):
        AnalyticCurve([0.0, 1.0], [0.0, 0.0], [0.0, 0.0], [0.0, 1.0, 0.0])
    with pytest.raises(GeometryError):
        AnalyticCurve([0.0, 1.0], [1.0, 0.0], [0.0, 0.0], [0.0, 1.0])
    with pytest.raises(GeometryError):
        AnalyticCurve([0.0, np.nan], [0.0, 0.0], [0.0, 0.0], [0.0, 1.0])


def test_contains_examples(disk):
    assert contains(disk, (0.0, 0.0))
    assert not contains(disk, (2.0, 0.0))
    assert not contains(disk, (0.999999999, 0.0))
    assert contains(disk, (0.99, 0.0))


def test_star_is_not_convex(star3):
    # between lobes the radius is 0.7, so (0.85, 0) rotated to a valley is outside
    t = math.pi / 3
    assert not star3.contains(0.85 * math.cos(t), 0.85 * math.sin(t))
    assert star3.contains(0.65 * math.cos(t), 0.65 * math.sin(t))
    assert star3.contains(1.25, 0.0)


def test_bounding_boxes():
    b = bounding_box(Domain(AnalyticCurve.circle()))
    assert b.xmin == pytest.approx(-1, abs=1e-5) and b.xmax == pytest.approx(1, abs=1e-5)
    assert b.xmin < -1 and b.xmax > 1 and b.ymin < -1 and b.ymax > 1
    b = bounding_box(Domain(AnalyticCurve.ellipse(2, 1)))
    assert (b.xmin, b.xmax, b.ymin, b.ymax) == pytest.approx((-2, 2, -1, 1), abs=1e-5)
    b = bounding_box(Domain(AnalyticCurve.circle(1.0, (5.0, 5.0))))
    assert (b.xmin, b.xmax, b.ymin, b.ymax) == pytest.approx((4, 6, 4, 6), abs=1e-5)


@pytest.mark.parametrize("name", list(CURVES))
def test_domain_invariants(name):
    d = Domain(CURVES[name])
    poly = d.polyline
    x, y = CURVES[name].eval(np.linspace(0, TWO_PI, 4096, endpoint=False))
    assert np.array_equal(poly[:, 0], x) and np.array_equal(poly[:, 1], y)
    b = d.box
    assert np.all((poly[:, 0] > b.xmin) & (poly[:, 0] < b.xmax))
    assert np.all((poly[:, 1] > b.ymin) & (poly[:, 1] < b.ymax))
    assert d.length > 0


@pytest.mark.parametrize("name", ["circle", "ellipse", "shifted"])
def test_centroid_inside_convex(name):
    d = Domain(CURVES[name])
    cx, cy = d.polyline.mean(axis=0)
    assert d.contains(cx, cy)


def test_contains_many_matches_scalar(star3, rng):
    x = rng.uniform(-1.5, 1.5, 300)
    y = rng.uniform(-1.5, 1.5, 300)
    many = star3.contains_many(x, y)
    assert [star3.contains(a, b) for a, b in zip(x, y)] == many.tolist()
    # polar description of the same star as an independent oracle
    r = np.hypot(x, y)
    rb = 1 + 0.3 * np.cos(3 * np.arctan2(y, x))
    clear = np.abs(r - rb) > 1e-3
    assert np.array_equal(many[clear], (r < rb)[clear])


def test_dict_round_trip():
    c = CURVES["wavy"]
    c2 = curve_from_dict(curve_to_dict(c))
    assert curve_to_dict(c2) == curve_to_dict(c)
    with pytest.raises(GeometryError):
        curve_from_dict({"x_cos": [0, 1]})


def test_builtin_names():
    assert builtin_curve("ellipse:3:0.5").x_cos[1] == 3.0
    with pytest.raises(GeometryError):
        builtin_curve("square")
