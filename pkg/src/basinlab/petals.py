"""Translation-coordinate machinery and certified absorbing wedge domains.

Near the parabolic point the chart w = -1/(m*a*z^m) conjugates f to
F(w) = w + 1 + o(1). Controlling the o(1) remainder on the exterior of a disk
lets us pick a truncated-disk sector (a disk with an angular gap, the classic
"pacman" shape) that the dynamics provably cannot leave; two nested tangent
line constructions give an inner pacman whose whole forward orbit stays in the
outer one. These domains drive basin membership tests and the verifier's
radius recipes.
"""

from __future__ import annotations

import cmath
import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import qmc

from .errors import DegenerateAngle, NoConvergence, OriginInput
from .parabolic import ParabolicMap, analyze_parabolic, attraction_vectors

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class FatouChartValue:
    """Chart value w = -1/(m*a*z^m) plus the branch index of arg z."""

    omega: complex
    sheet: int


def fatou_chart(fm: ParabolicMap, z: complex) -> FatouChartValue:
    """Send z to the translation coordinate; the conjugated map is w + 1 + o(1).

    The normalization -1/(m*a*z^m) makes the translation constant exactly one
    for every (m, a). The sheet index records which of the m preimage branches
    z lives on, so the chart inverts exactly.
    """
    if z == 0:
        raise OriginInput("chart undefined at the fixed point")
    m, a = fm.m, fm.a
    w = -1.0 / (m * a * z ** m)
    theta_pref = cmath.phase(-1.0 / (m * a * w))
    sheet = round((m * cmath.phase(z) - theta_pref) / _TWO_PI) % m
    return FatouChartValue(w, sheet)


def fatou_chart_inverse(fm: ParabolicMap, value: FatouChartValue) -> complex:
    m, a = fm.m, fm.a
    target = -1.0 / (m * a * value.omega)
    r = abs(target) ** (1.0 / m)
    phi = (cmath.phase(target) + _TWO_PI * value.sheet) / m
    return r * cmath.exp(1j * phi)


def conjugated_map(fm: ParabolicMap, omega: complex, sheet: int = 0) -> complex:
    """F(w): push w back to z, apply f, return to the chart."""
    z = fatou_chart_inverse(fm, FatouChartValue(omega, sheet))
    return fatou_chart(fm, fm(z)).omega


def _remainder_on_z(fm: ParabolicMap, z: np.ndarray) -> np.ndarray:
    m, a = fm.m, fm.a
    fz = fm.eval_array(z)
    with np.errstate(divide="ignore", invalid="ignore"):
        rem = -1.0 / (m * a * fz ** m) + 1.0 / (m * a * z ** m) - 1.0
    rem = np.abs(rem)
    rem[~np.isfinite(rem)] = np.inf
    return rem


def estimate_remainder(fm: ParabolicMap, rho: float, samples: int = 4096) -> float:
    """Sampled sup of |F(w) - w - 1| over |w| >= rho, with a 2x safety factor.

    Sampling happens in the z plane on a log-radial grid over the punctured
    disk 0 < |z| <= R(rho), which covers every chart sheet at once. The
    returned value is twice the sampled maximum.
    """
    if rho <= 0:
        raise ValueError("rho must be positive")
    if samples < 1000:
        raise ValueError("need at least 1000 samples")
    m, a = fm.m, fm.a
    r_outer = (1.0 / (m * abs(a) * rho)) ** (1.0 / m)
    n_theta = 128
    n_r = max(8, samples // n_theta)
    radii = r_outer * np.exp(np.linspace(0.0, -math.log(40.0), n_r))
    angles = _TWO_PI * (np.arange(n_theta) + 0.5) / n_theta
    z = radii[:, None] * np.exp(1j * angles)[None, :]
    return 2.0 * float(np.max(_remainder_on_z(fm, z.ravel())))


@dataclass(frozen=True)
class PacManDomain:
    """Truncated disk with an angular gap around the sector boundary rays.

    For a direction with axis argument `axis_arg` and sector opening
    `sector_opening`, membership means 0 < r <= radius and the angular offset
    from the axis is below sector_opening/2 - gap_angle.
    """

    orientation: str  # "left" (axis pi) or "right" (axis 0) or "direction"
    radius: float
    gap_angle: float
    sector_opening: float = _TWO_PI
    axis_arg: float = math.pi

    def __post_init__(self):
        if not (0.0 < self.gap_angle < math.pi / 2.0):
            raise DegenerateAngle("gap angle must lie in (0, pi/2)")
        if self.radius <= 0.0 or self.sector_opening / 2.0 <= self.gap_angle:
            raise DegenerateAngle("wedge is empty")

    def contains(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        r = np.abs(z)
        half = self.sector_opening / 2.0 - self.gap_angle
        off = np.abs((np.angle(z) - self.axis_arg + math.pi) % _TWO_PI - math.pi)
        return (r > 0) & (r <= self.radius) & (off < half)

    @classmethod
    def left(cls, radius: float, gap_angle: float) -> "PacManDomain":
        return cls("left", radius, gap_angle, _TWO_PI, math.pi)

    @classmethod
    def right(cls, radius: float, gap_angle: float) -> "PacManDomain":
        return cls("right", radius, gap_angle, _TWO_PI, 0.0)


@dataclass(frozen=True)
class PacManConstruction:
    """Radii certified by the two-stage tangent-line construction.

    In the chart plane the three concentric scales are rho0 (remainder control)
    and rho1, rho2 from intersecting the slope gap/2 tangent lines with the
    sector edge and the real axis. Back in the dynamical plane these become
    r0 > R0 > R0_prime; forward orbits started in the inner pacman of radius
    R0_prime stay inside the one of radius R0.
    """

    theta0: float
    m: int
    a: complex
    gap_omega: float
    rho0: float
    rho1: float
    rho2: float
    r0: float
    R0: float
    R0_prime: float
    remainder_bound: float
    tangent_points: dict
    attraction_args: tuple

    @property
    def rho_entry(self) -> float:
        return self.rho2

    def domain(self, direction: int = 0, radius: float | None = None) -> PacManDomain:
        r = self.R0_prime if radius is None else radius
        return PacManDomain("direction", r, self.theta0, _TWO_PI / self.m,
                            self.attraction_args[direction])

    def to_json_dict(self) -> dict:
        return {
            "theta0": self.theta0,
            "r0": self.r0,
            "R0": self.R0,
            "R0_prime": self.R0_prime,
            "remainder_bound": self.remainder_bound,
            "tangent_points": {k: [v.real, v.imag] for k, v in sorted(self.tangent_points.items())},
            "gap_omega": self.gap_omega,
            "m": self.m,
        }


def construct_pacman(fm: ParabolicMap, theta0: float, samples: int = 4096) -> PacManConstruction:
    """Pick radii so the remainder stays below theta0/3 and nest two pacmen.

    The chart-plane gap is m*theta0 and the tangent lines run at half that
    slope, which makes both intersection distances equal rho/sin(gap/2); two
    rounds of the construction give rho1 and rho2 with rho0 < rho1 < rho2 and
    hence r0 > R0 > R0_prime in the dynamical plane.
    """
    if not (0.0 < theta0 < math.pi / 6.0):
        raise DegenerateAngle("theta0 must lie in (0, pi/6)")
    m, a = fm.m, fm.a
    gap = m * theta0
    if gap >= math.pi / 2.0:
        raise DegenerateAngle("m*theta0 must stay below pi/2")
    target = theta0 / 3.0

    hi = 2.0
    while estimate_remainder(fm, hi, samples) >= target:
        hi *= 2.0
        if hi > 2.0 ** 60:
            raise NoConvergence("remainder never fell below theta0/3")
    lo = hi / 2.0
    if estimate_remainder(fm, lo, samples) >= target:
        # Geometric bisection toward the threshold radius; keep the passing end.
        for _ in range(60):
            mid = math.sqrt(lo * hi)
            if estimate_remainder(fm, mid, samples) < target:
                hi = mid
            else:
                lo = mid
    rho0 = hi
    bound = estimate_remainder(fm, rho0, samples)
    while bound >= target:
        rho0 *= 1.05
        bound = estimate_remainder(fm, rho0, samples)

    s = math.sin(gap / 2.0)
    rho1 = rho0 / s
    rho2 = rho1 / s

    def z_radius(r: float) -> float:
        return (1.0 / (m * abs(a) * r)) ** (1.0 / m)

    tangents = {
        "A0": rho1 * cmath.exp(1j * (math.pi - gap)),
        "B0": complex(rho1, 0.0),
        "A": rho2 * cmath.exp(1j * (math.pi - gap)),
        "B": complex(rho2, 0.0),
    }
    vs = attraction_vectors(fm)
    return PacManConstruction(theta0, m, a, gap, rho0, rho1, rho2,
                              z_radius(rho0), z_radius(rho1), z_radius(rho2),
                              bound, tangents, vs.attraction_args)


@dataclass(frozen=True)
class InvarianceReport:
    violations: int
    worst_margin: float
    samples: int
    n_steps: int


def check_petal_invariance(fm: ParabolicMap, pm: PacManConstruction,
                           n_steps: int = 1000, samples: int = 10000,
                           direction: int = 0, outer_radius: float | None = None,
                           seed: int = 0) -> InvarianceReport:
    """Iterate quasi-random points of the inner pacman, count exits from the outer.

    Sample set is a Halton sequence over (radius, angle) plus 10% of points
    offset 1e-6 (relative) inside the circular and angular boundaries, where
    violations would show first. The margin is the minimum over all iterates of
    the distance to the outer pacman's boundary (radial or arc, whichever is
    tighter).
    """
    outer = pm.R0 if outer_radius is None else outer_radius
    axis = pm.attraction_args[direction]
    half = math.pi / pm.m - pm.theta0
    n_bulk = samples - samples // 10
    eng = qmc.Halton(d=2, scramble=True, seed=np.random.default_rng(seed))
    u = eng.random(n_bulk)
    r = pm.R0_prime * np.maximum(u[:, 0], 1e-9)
    psi = (2.0 * u[:, 1] - 1.0) * half

    n_edge = samples - n_bulk
    n_rad = n_edge // 2
    tt = np.linspace(-1.0, 1.0, max(n_rad, 2))
    r_edge = np.full(tt.size, pm.R0_prime * (1.0 - 1e-6))
    psi_edge = tt * half
    ss = np.linspace(1e-3, 1.0, max(n_edge - n_rad, 2))
    r_ang = pm.R0_prime * ss
    psi_ang = np.where(np.arange(ss.size) % 2 == 0, 1.0, -1.0) * half * (1.0 - 1e-6)

    r_all = np.concatenate([r, r_edge, r_ang])
    psi_all = np.concatenate([psi, psi_edge, psi_ang])
    z = r_all * np.exp(1j * (axis + psi_all))

    alive = np.ones(z.size, dtype=bool)
    violations = 0
    worst = math.inf
    for _ in range(n_steps):
        if not alive.any():
            break
        z[alive] = fm.eval_array(z[alive])
        za = z[alive]
        ra = np.abs(za)
        off = np.abs((np.angle(za) - axis + math.pi) % _TWO_PI - math.pi)
        margin = np.minimum(outer - ra, ra * (half - off))
        out = margin <= 0.0
        if out.any():
            violations += int(out.sum())
            rest = margin[~out]
            if rest.size:
                worst = min(worst, float(rest.min()))
            idx = np.flatnonzero(alive)
            alive[idx[out]] = False
        else:
            worst = min(worst, float(margin.min()))
    return InvarianceReport(violations, worst, int(z.size), n_steps)


@dataclass(frozen=True)
class MembershipPetal:
    """Entry gate used by the orbit classifiers: |w| >= rho_entry inside the
    chart-plane sector with gap `gap_omega` is exactly absorption into the
    certified inner pacman."""

    rho_entry: float
    gap_omega: float
    theta0: float
    R_prime: float


@functools.lru_cache(maxsize=64)
def _membership_petal_cached(coefficients: tuple) -> MembershipPetal:
    fm, _ = analyze_parabolic(list(coefficients))
    theta0 = min(0.5, 1.2 / fm.m)
    pm = construct_pacman(fm, theta0)
    return MembershipPetal(pm.rho2, pm.gap_omega, theta0, pm.R0_prime)


def membership_petal(fm: ParabolicMap, theta0: float | None = None) -> MembershipPetal:
    """Certified absorbing petal used for basin membership classification.

    The default gap is wide (0.5, scaled down for larger m) so the entry radius
    stays small and orbits resolve in few steps; any certified gap would do,
    since absorption characterizes the basin direction.
    """
    if theta0 is None:
        return _membership_petal_cached(fm.coefficients)
    pm = construct_pacman(fm, theta0)
    return MembershipPetal(pm.rho2, pm.gap_omega, theta0, pm.R0_prime)
