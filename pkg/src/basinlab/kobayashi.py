"""Hyperbolic (= Kobayashi) metric machinery on elementary model domains.

Every domain here is a simply connected angular region with vertex at the
origin: the upper half-plane (opening pi), the plane slit along a ray
(opening 2pi), sectors of arbitrary opening, and "double sectors" whose
opening exceeds 2pi and whose points therefore carry an explicit lifted
argument. The power chart written in log coordinates,

    u + i v = (pi / h) * (ln r + i (theta - lo)),   w = exp(u + i v),

is a biholomorphism onto the upper half-plane for any opening h, immune to
branch-cut issues. Distances come from the closed form

    d = 2 asinh( sqrt( (cosh(u1-u2) - cos(v1-v2)) / (2 sin v1 sin v2) ) ),

which is the half-plane geodesic distance with the overall exp factor
cancelled, so it never overflows for desk-scale inputs.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import (BadRadii, NoClearance, NonPositiveImaginary,
                     NumericOverflow, OutsideDomain, PathExitsDomain,
                     SmallRealPart)

_TWO_PI = 2.0 * math.pi
_ANG_GUARD = 1e-12  # relative boundary-proximity guard on the argument
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


@dataclass(frozen=True)
class LiftedPoint:
    """Point r*e^(i*theta) with an unrestricted lift of the argument."""

    r: float
    theta: float

    @classmethod
    def from_complex(cls, z: complex, low: float = 0.0) -> "LiftedPoint":
        """Lift z with argument chosen in (low, low + 2pi)."""
        theta = low + (cmath.phase(z) - low) % _TWO_PI
        return cls(abs(z), theta)

    def to_complex(self) -> complex:
        return self.r * cmath.exp(1j * self.theta)


@dataclass(frozen=True)
class ModelDomain:
    """Angular model domain (arg_low, arg_high) with vertex at the origin."""

    tag: str
    arg_low: float
    arg_high: float

    @classmethod
    def half_plane(cls) -> "ModelDomain":
        return cls("half_plane", 0.0, math.pi)

    @classmethod
    def slit_plane(cls) -> "ModelDomain":
        return cls("slit_plane", 0.0, _TWO_PI)

    @classmethod
    def sector(cls, arg_low: float, arg_high: float) -> "ModelDomain":
        w = arg_high - arg_low
        if not (0.0 < w <= _TWO_PI):
            raise ValueError("sector opening must lie in (0, 2pi]")
        return cls("sector", arg_low, arg_high)

    @classmethod
    def double_sector(cls, arg_low: float, arg_high: float) -> "ModelDomain":
        if arg_high - arg_low <= _TWO_PI:
            raise ValueError("double sector opening must exceed 2pi")
        return cls("double_sector", arg_low, arg_high)

    @property
    def width(self) -> float:
        return self.arg_high - self.arg_low

    def to_json_dict(self) -> dict:
        return {"variant": self.tag, "params": [self.arg_low, self.arg_high]}

    # -- point handling ----------------------------------------------------

    def to_rtheta(self, p) -> tuple[float, float]:
        """Normalize a point to (r, theta) strictly inside, or raise."""
        if isinstance(p, LiftedPoint):
            r, theta = p.r, p.theta
        else:
            z = complex(p)
            if self.tag == "double_sector":
                raise OutsideDomain("double sector points must carry a lifted argument")
            theta = self.arg_low + (cmath.phase(z) - self.arg_low) % _TWO_PI
            r = abs(z)
        if r <= 0.0:
            raise OutsideDomain("origin and negative radii are outside every domain")
        if theta - self.arg_low <= _ANG_GUARD or self.arg_high - theta <= _ANG_GUARD:
            raise OutsideDomain(
                f"argument {theta} within guard distance of boundary rays "
                f"({self.arg_low}, {self.arg_high})")
        return r, theta

    def contains_rtheta(self, r, theta):
        return ((r > 0.0)
                & (theta - self.arg_low > _ANG_GUARD)
                & (self.arg_high - theta > _ANG_GUARD))


def density(domain: ModelDomain, p) -> float:
    """Infinitesimal metric |dz| multiplier at p.

    Half-plane: 1/Im z. Slit plane: 1/(2 r sin(theta/2)). General opening h:
    (pi/h) / (r sin(pi (theta - lo) / h)), the pullback of 1/Im w through the
    power chart.
    """
    r, theta = domain.to_rtheta(p)
    h = domain.width
    v = math.pi * (theta - domain.arg_low) / h
    return (math.pi / h) / (r * math.sin(v))


def density_arrays(domain: ModelDomain, r: np.ndarray, theta: np.ndarray) -> np.ndarray:
    h = domain.width
    v = math.pi * (theta - domain.arg_low) / h
    return (math.pi / h) / (r * np.sin(v))


def chart_uv(domain: ModelDomain, p) -> tuple[float, float]:
    """Log-coordinates (u, v) of the half-plane chart value w = e^u e^(iv)."""
    r, theta = domain.to_rtheta(p)
    scale = math.pi / domain.width
    return scale * math.log(r), scale * (theta - domain.arg_low)


def chart(domain: ModelDomain, p) -> complex:
    """Chart value in the upper half-plane (may overflow for extreme radii)."""
    u, v = chart_uv(domain, p)
    if abs(u) > 700.0:
        raise NumericOverflow("chart value outside double-precision range")
    return cmath.exp(complex(u, 0.0)) * cmath.exp(1j * v)


def chart_inverse(domain: ModelDomain, w: complex):
    """Inverse chart; returns complex, or LiftedPoint on double sectors."""
    if w.imag <= 0.0:
        raise OutsideDomain("chart inverse needs a point of the upper half-plane")
    inv_scale = domain.width / math.pi
    r = math.exp(inv_scale * math.log(abs(w)))
    theta = domain.arg_low + inv_scale * cmath.phase(w)
    if domain.tag == "double_sector":
        return LiftedPoint(r, theta)
    return r * cmath.exp(1j * theta)


@dataclass(frozen=True)
class DistanceBound:
    value: float
    kind: str  # "exact" | "lower_bound"
    method: str  # chart | case1 | case2 | horizontal | case3 | monotonicity
    constants: dict | None = None

    def to_json_dict(self) -> dict:
        out = {"value": self.value, "kind": self.kind, "method": self.method}
        if self.constants is not None:
            out["constants"] = dict(sorted(self.constants.items()))
        return out


def _dist_uv(u1: float, v1: float, u2: float, v2: float) -> float:
    s1, s2 = math.sin(v1), math.sin(v2)
    if s1 <= 0.0 or s2 <= 0.0:
        raise OutsideDomain("points must map strictly inside the half-plane")
    du = u1 - u2
    if abs(du) > 700.0:
        raise NumericOverflow("radial separation too large for double precision")
    x = (math.cosh(du) - math.cos(v1 - v2)) / (2.0 * s1 * s2)
    if not math.isfinite(x) or x < 0.0:
        raise NumericOverflow("distance argument left the representable range")
    return 2.0 * math.asinh(math.sqrt(x))


def dist_uv_arrays(u1, v1, u2, v2):
    x = (np.cosh(u1 - u2) - np.cos(v1 - v2)) / (2.0 * np.sin(v1) * np.sin(v2))
    return 2.0 * np.arcsinh(np.sqrt(x))


def distance_exact(domain: ModelDomain, p1, p2) -> DistanceBound:
    """Geodesic distance through the chart; exact on these simply connected
    domains, hence equal to the Kobayashi distance."""
    u1, v1 = chart_uv(domain, p1)
    u2, v2 = chart_uv(domain, p2)
    return DistanceBound(_dist_uv(u1, v1, u2, v2), "exact", "chart")


def distance_value(domain: ModelDomain, p1, p2) -> float:
    return distance_exact(domain, p1, p2).value


# ---------------------------------------------------------------------------
# Polylines: validation, length by quadrature, geodesic sampling
# ---------------------------------------------------------------------------

def _vertex_arrays(domain: ModelDomain, vertices) -> tuple[np.ndarray, np.ndarray]:
    """Complex positions and argument lifts of the polyline vertices."""
    zs = np.empty(len(vertices), dtype=complex)
    thetas = np.empty(len(vertices))
    for i, p in enumerate(vertices):
        if isinstance(p, LiftedPoint):
            zs[i] = p.to_complex()
            thetas[i] = p.theta
        else:
            if domain.tag == "double_sector":
                raise PathExitsDomain("double sector paths need lifted vertices")
            zs[i] = complex(p)
            thetas[i] = domain.arg_low + (cmath.phase(zs[i]) - domain.arg_low) % _TWO_PI
    return zs, thetas


def _chord_rtheta(domain: ModelDomain, za, zb, tha, t: np.ndarray):
    """(r, theta) at parameters t along every chord, arguments lifted rowwise."""
    z = za[:, None] + (zb - za)[:, None] * t[None, :]
    r = np.abs(z)
    ang = np.angle(z)
    if domain.tag != "double_sector":
        theta = domain.arg_low + (ang - domain.arg_low) % _TWO_PI
        return r, theta
    d0 = (ang[:, 0] - np.angle(za) + math.pi) % _TWO_PI - math.pi
    steps = (np.diff(ang, axis=1) + math.pi) % _TWO_PI - math.pi
    theta = (tha + d0)[:, None] + np.concatenate(
        [np.zeros((len(za), 1)), np.cumsum(steps, axis=1)], axis=1)
    return r, theta


def path_length(domain: ModelDomain, vertices, rtol: float = 1e-11,
                atol: float = 1e-12, max_depth: int = 12) -> float:
    """Length of the polyline under the domain metric.

    Straight segments are integrated with composite 16-point Gauss-Legendre
    quadrature, all segments refined together until two successive subdivision
    levels agree on the total. A segment is rejected if any of 32 midpoint
    samples leaves the domain, or (on double sectors) if the continued
    argument fails to land on the next vertex's declared lift.
    """
    if len(vertices) < 2:
        raise ValueError("polyline needs at least two vertices")
    zs, thetas = _vertex_arrays(domain, vertices)
    za, zb, tha, thb = zs[:-1], zs[1:], thetas[:-1], thetas[1:]
    chord = np.abs(zb - za)

    t_check = np.linspace(0.0, 1.0, 34)[1:-1]  # 32 interior samples
    r, theta = _chord_rtheta(domain, za, zb, tha, t_check)
    if not np.all(domain.contains_rtheta(r, theta)):
        raise PathExitsDomain("segment midpoint left the domain")
    if domain.tag != "double_sector":
        # A chord subtends less than pi from any off-chord point, so a jump of
        # pi or more in the normalized argument means the cut ray was crossed.
        full = np.concatenate([tha[:, None], theta, thb[:, None]], axis=1)
        if np.any(np.abs(np.diff(full, axis=1)) >= math.pi):
            raise PathExitsDomain("segment crosses the boundary ray")
    if domain.tag == "double_sector":
        end = theta[:, -1] + ((np.angle(zb) - np.angle(
            za + (zb - za) * t_check[-1]) + math.pi) % _TWO_PI - math.pi)
        if np.any(np.abs(end - thb) > 1e-6):
            raise PathExitsDomain("argument lift mismatch along segment")

    prev = None
    for depth in range(max_depth + 1):
        pieces = 2 ** depth
        edges = np.linspace(0.0, 1.0, pieces + 1)
        mid = (edges[:-1, None] + edges[1:, None]) / 2.0
        half = (edges[1:, None] - edges[:-1, None]) / 2.0
        t = (mid + half * _GL_NODES[None, :]).ravel()
        wts = (half * _GL_WEIGHTS[None, :]).ravel()
        r, theta = _chord_rtheta(domain, za, zb, tha, t)
        if not np.all(domain.contains_rtheta(r, theta)):
            raise PathExitsDomain("quadrature node left the domain")
        dens = density_arrays(domain, r, theta)
        total = float(np.sum(chord * (dens @ wts)))
        if prev is not None and abs(total - prev) <= max(atol, rtol * abs(total)):
            return total
        prev = total
    return prev


def _geodesic_w(domain: ModelDomain, p1, p2, n: int) -> np.ndarray:
    """Chart values of n+1 equal-arclength samples along the geodesic."""
    w1, w2 = chart(domain, p1), chart(domain, p2)
    x1, y1, x2, y2 = w1.real, w1.imag, w2.real, w2.imag
    if abs(x1 - x2) <= 1e-14 * max(abs(w1), abs(w2), 1.0):
        ts = np.linspace(0.0, 1.0, n + 1)
        return x1 + 1j * y1 * (y2 / y1) ** ts
    c = (abs(w2) ** 2 - abs(w1) ** 2) / (2.0 * (x2 - x1))
    rad = abs(w1 - c)
    phi1 = math.atan2(y1, x1 - c)
    phi2 = math.atan2(y2, x2 - c)
    ss = np.linspace(math.log(math.tan(phi1 / 2.0)),
                     math.log(math.tan(phi2 / 2.0)), n + 1)
    phi = 2.0 * np.arctan(np.exp(ss))
    return c + rad * np.exp(1j * phi)


def geodesic_polyline(domain: ModelDomain, p1, p2, n: int) -> list:
    """n+1 points along the chart geodesic, equally spaced in arc length."""
    ws = _geodesic_w(domain, p1, p2, n)
    inv_scale = domain.width / math.pi
    r = np.exp(inv_scale * np.log(np.abs(ws)))
    theta = domain.arg_low + inv_scale * np.angle(ws)
    if domain.tag == "double_sector":
        pts: list = [LiftedPoint(float(a), float(b)) for a, b in zip(r, theta)]
    else:
        pts = list(r * np.exp(1j * theta))
    pts[0], pts[-1] = p1, p2
    return pts


# ---------------------------------------------------------------------------
# Closed-form lower bounds used by the verifier as cross-checks
# ---------------------------------------------------------------------------

def bound_case1(eps: float, R: float, m: int) -> DistanceBound:
    """Radial growth bound: any path from |z| <= eps to |z| >= R costs at
    least (m/2)(ln R - ln eps) in a sector of opening 2pi/m."""
    if not (0.0 < eps < R):
        raise BadRadii("need 0 < eps < R")
    value = 0.5 * m * (math.log(R) - math.log(eps))
    return DistanceBound(value, "lower_bound", "case1")


def kappa_infimum(m: int, theta_range: tuple[float, float]) -> tuple[float, float, float]:
    """Certified infima over the angular range.

    kappa is the infimum of the exact ratio density*Im = m sin(theta) /
    (2 sin(m theta / 2)); c1 and c2 are the separate classical infima of
    (m theta/2)/sin(m theta/2) and sin(theta)/theta. kappa >= c1*c2 and kappa
    is the constant that keeps the log-height bound sound.
    """
    lo, hi = theta_range
    cap = min(math.pi, _TWO_PI / m)
    if not (0.0 <= lo < hi <= cap + 1e-12):
        raise ValueError("theta range must sit inside (0, min(pi, 2pi/m))")
    hi = min(hi, cap - 1e-12) if hi >= cap else hi
    grid = np.linspace(max(lo, 1e-9), hi, 20001)

    def ratio(th):
        return m * np.sin(th) / (2.0 * np.sin(m * th / 2.0))

    vals = ratio(grid)
    i = int(np.argmin(vals))
    kappa = float(vals[i])
    if 0 < i < len(grid) - 1:
        res = minimize_scalar(lambda t: float(ratio(np.array([t]))[0]),
                              bounds=(grid[i - 1], grid[i + 1]), method="bounded")
        kappa = min(kappa, float(res.fun))
    c1 = float(np.min((m * grid / 2.0) / np.sin(m * grid / 2.0)))
    c2 = float(np.min(np.sin(grid) / grid))
    return kappa, c1, c2


def bound_case2(z0_tilde: complex, z1_tilde: complex, m: int,
                theta_range: tuple[float, float]) -> DistanceBound:
    """Log-height bound kappa * |ln Im z' - ln Im z0| for paths confined to
    the sector over theta_range (where density*Im >= kappa pointwise)."""
    if z0_tilde.imag <= 0.0 or z1_tilde.imag <= 0.0:
        raise NonPositiveImaginary("both points need positive imaginary part")
    kappa, c1, c2 = kappa_infimum(m, theta_range)
    value = kappa * abs(math.log(z1_tilde.imag) - math.log(z0_tilde.imag))
    return DistanceBound(value, "lower_bound", "case2",
                         {"c1": c1, "c2": c2, "kappa": kappa})


def bound_case2_horizontal(z0_tilde: complex, C: float) -> DistanceBound:
    """In-band crossing cost 1/(2 e^C |Im z0|) of reaching the vertical axis
    from a normalized point with Re > 1/2 while the height stays within a
    factor e^C of the start."""
    if z0_tilde.real <= 0.5:
        raise SmallRealPart("normalized point needs Re > 1/2")
    y = abs(z0_tilde.imag)
    if y == 0.0:
        raise NonPositiveImaginary("crossing band is empty at zero height")
    value = 1.0 / (2.0 * math.exp(C) * y)
    return DistanceBound(value, "lower_bound", "horizontal")


def kobayashi_disk_clearance(domain: ModelDomain, center, C: float,
                             probe_arg: float) -> float:
    """Largest half-angle t such that the wedge of rays within t of probe_arg
    misses the closed hyperbolic disk of radius C about center.

    The minimal distance from the center to the ray at angle psi has the
    closed form 2 asinh(sqrt((1 - cos(vc - v)) / (2 sin vc sin v))) in chart
    angles, monotone toward the center, so bisection on the wedge's near edge
    settles the angle.
    """
    _, v_c = chart_uv(domain, center)
    scale = math.pi / domain.width
    v_probe = scale * (probe_arg - domain.arg_low)
    if not (0.0 <= v_probe <= math.pi):
        raise OutsideDomain("probe ray outside the domain closure")

    def d_min(v):
        s = math.sin(v)
        if s <= 0.0:
            return math.inf
        x = (1.0 - math.cos(v_c - v)) / (2.0 * math.sin(v_c) * s)
        return 2.0 * math.asinh(math.sqrt(max(x, 0.0)))

    if d_min(v_probe) <= C:
        raise NoClearance("the disk already meets the probe ray")
    v_span = v_c - v_probe
    lo, hi = 0.0, 1.0  # fractions of the angular span toward the center
    for _ in range(100):
        mid = (lo + hi) / 2.0
        if d_min(v_probe + mid * v_span) > C:
            lo = mid
        else:
            hi = mid
    return abs(lo * v_span) / scale
