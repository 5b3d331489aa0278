"""Polynomial iteration engine around a parabolic fixed point at the origin.

Maps are polynomials f(z) = z + a*z^(m+1) + ... with f(0) = 0 and f'(0) = 1.
This module extracts the parabolic data (m, a, invariant directions), iterates
orbits forward with direction classification, enumerates polynomial preimages
with an Aberth-style simultaneous solver, and builds the truncated set
Q = union over (k, l) of f^{-l}(f^k(q)) with per-point provenance.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import LinearMap, NoConvergence, NotInBasin, NotParabolic

# Labels used by the vectorized classifier. Nonnegative values are direction
# indices; the negative values are terminal non-direction states.
LABEL_UNDECIDED = -2
LABEL_ESCAPED = -1

DEDUP_QUANTUM = 1e-10
DEFAULT_ROOT_TOL = 1e-10
_TWO_PI = 2.0 * math.pi


def _wrap_angle(x):
    """Reduce an angle (scalar or array) to [-pi, pi)."""
    return (x + math.pi) % _TWO_PI - math.pi


@dataclass(frozen=True)
class ParabolicMap:
    """Polynomial with a parabolic fixed point at 0, multiplier exactly 1.

    coefficients are ascending (index 0 = constant term), coefficients[0] = 0,
    coefficients[1] = 1, the first nonlinear term has degree m+1 and leading
    coefficient a != 0.
    """

    coefficients: tuple
    m: int
    a: complex
    degree: int

    @property
    def escape_radius(self) -> float:
        # Sufficient escape bound for monic-like polynomials; status trigger only.
        return 2.0 * (1.0 + sum(abs(c) for c in self.coefficients))

    def _desc(self):
        return tuple(reversed(self.coefficients))

    def __call__(self, z):
        r = 0j
        for c in self._desc():
            r = r * z + c
        return r

    def eval_array(self, z: np.ndarray) -> np.ndarray:
        r = np.zeros_like(z)
        for c in self._desc():
            r = r * z + c
        return r

    def derivative_desc(self) -> tuple:
        n = self.degree
        return tuple(self.coefficients[k] * k for k in range(n, 0, -1))

    def eval_derivative_array(self, z: np.ndarray) -> np.ndarray:
        r = np.zeros_like(z)
        for c in self.derivative_desc():
            r = r * z + c
        return r


@dataclass(frozen=True)
class AttractionVectorSet:
    """The m invariant directions: m*a*v^m = -1 (attraction), = +1 (repulsion)."""

    attraction: tuple
    repulsion: tuple

    @property
    def attraction_args(self) -> tuple:
        return tuple(cmath.phase(v) % _TWO_PI for v in self.attraction)

    @property
    def repulsion_args(self) -> tuple:
        return tuple(cmath.phase(v) % _TWO_PI for v in self.repulsion)


class OrbitStatus(Enum):
    CONVERGED = "converged"
    ESCAPED = "escaped"
    UNDECIDED = "undecided"


@dataclass
class OrbitRecord:
    points: list
    status: OrbitStatus
    direction: int | None = None
    direction_error: float | None = None

    @property
    def converged(self) -> bool:
        return self.status is OrbitStatus.CONVERGED


def parse_polynomial(text: str) -> list:
    """Parse comma-separated ascending coefficients, e.g. "0,1,0,1"."""
    parts = [p.strip() for p in text.split(",") if p.strip() != ""]
    if not parts:
        raise ValueError("empty coefficient list")
    return [complex(float(p), 0.0) for p in parts]


def analyze_parabolic(coefficients) -> tuple[ParabolicMap, AttractionVectorSet]:
    """Extract (m, a) and the invariant directions from ascending coefficients.

    Raises NotParabolic unless f(0) = 0 and f'(0) = 1, LinearMap if every
    nonlinear coefficient vanishes. Directions are sorted by argument in
    [0, 2pi).
    """
    coeffs = [complex(c) for c in coefficients]
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    if len(coeffs) < 2 or coeffs[0] != 0:
        raise NotParabolic("constant term must be exactly 0")
    if coeffs[1] != 1:
        raise NotParabolic("multiplier f'(0) must be exactly 1")
    if len(coeffs) == 2:
        raise LinearMap("no nonlinear terms")
    nonlin = [k for k in range(2, len(coeffs)) if coeffs[k] != 0]
    if not nonlin:
        raise LinearMap("all nonlinear coefficients vanish")
    m = nonlin[0] - 1
    a = coeffs[nonlin[0]]
    fm = ParabolicMap(tuple(coeffs), m, a, len(coeffs) - 1)
    return fm, attraction_vectors(fm)


def _snap_axis(v: complex) -> complex:
    # drop rounding dust so axis-aligned vectors come out exactly real/imaginary
    re = 0.0 if abs(v.real) < 1e-14 * abs(v) else v.real
    im = 0.0 if abs(v.imag) < 1e-14 * abs(v) else v.imag
    return complex(re, im)


def attraction_vectors(fm: ParabolicMap) -> AttractionVectorSet:
    m, a = fm.m, fm.a
    rad = (1.0 / (m * abs(a))) ** (1.0 / m)
    base_att = (math.pi - cmath.phase(a)) / m
    base_rep = (-cmath.phase(a)) / m
    att = [_snap_axis(rad * cmath.exp(1j * (base_att + _TWO_PI * j / m))) for j in range(m)]
    rep = [_snap_axis(rad * cmath.exp(1j * (base_rep + _TWO_PI * j / m))) for j in range(m)]
    att.sort(key=lambda v: cmath.phase(v) % _TWO_PI)
    rep.sort(key=lambda v: cmath.phase(v) % _TWO_PI)
    return AttractionVectorSet(tuple(att), tuple(rep))


def forward_orbit(fm: ParabolicMap, z0: complex, n: int) -> OrbitRecord:
    """Iterate z0 for n steps; halts early with ESCAPED past the escape radius."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    pts = [complex(z0)]
    r_esc = fm.escape_radius
    z = complex(z0)
    for _ in range(n):
        z = fm(z)
        pts.append(z)
        if abs(z) > r_esc:
            return OrbitRecord(pts, OrbitStatus.ESCAPED)
    return OrbitRecord(pts, OrbitStatus.UNDECIDED)


def _default_gate(fm: ParabolicMap):
    from .petals import membership_petal  # deferred: petals imports this module

    return membership_petal(fm)


def classify_direction(fm: ParabolicMap, z0: complex, n_max: int, tol: float,
                       petal=None) -> OrbitRecord:
    """Classify the orbit of z0 into an attraction direction.

    Converged(j) requires, at some step n <= n_max: the iterate sits inside the
    certified absorbing wedge petal, |n^(1/m) z_n - v_j| < tol for the nearest
    direction v_j, |z_n| < |z0|, and the nearest-direction index unchanged over
    the trailing 10% of steps. Escape past the radius is ESCAPED; anything else
    is UNDECIDED.
    """
    if n_max < 100:
        raise ValueError("n_max must be at least 100")
    gate = petal if petal is not None else _default_gate(fm)
    vs = attraction_vectors(fm)
    v_args = np.array(vs.attraction_args)
    m, a = fm.m, fm.a
    r_esc = fm.escape_radius
    abs_z0 = abs(z0)
    pts = [complex(z0)]
    z = complex(z0)
    j_prev = -1
    last_change = 0
    for n in range(1, n_max + 1):
        z = fm(z)
        pts.append(z)
        az = abs(z)
        if az > r_esc:
            return OrbitRecord(pts, OrbitStatus.ESCAPED)
        if z == 0:
            break  # landed exactly on the fixed point: trivial tail
        w = -1.0 / (m * a * z ** m)
        j = 0 if m == 1 else int(np.argmin(np.abs(_wrap_angle(cmath.phase(z) - v_args))))
        if j != j_prev:
            j_prev = j
            last_change = n
        inside = abs(w) >= gate.rho_entry and abs(cmath.phase(w)) <= math.pi - gate.gap_omega
        if not inside:
            continue
        err = abs((n ** (1.0 / m)) * z - vs.attraction[j])
        if err < tol and az < abs_z0 and (n - last_change) >= max(10, n // 10):
            return OrbitRecord(pts, OrbitStatus.CONVERGED, j, err)
    return OrbitRecord(pts, OrbitStatus.UNDECIDED)


def classify_batch(fm: ParabolicMap, points: np.ndarray, n_max: int,
                   petal=None) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized direction labeling by absorption into the certified petal.

    Returns (labels, steps): labels holds a direction index j >= 0,
    LABEL_ESCAPED or LABEL_UNDECIDED; steps is the step count at which each
    point resolved (n_max if it never did). Absorption is a sticky criterion,
    so labels are stable under any larger n_max.
    """
    gate = petal if petal is not None else _default_gate(fm)
    vs = attraction_vectors(fm)
    v_args = np.array(vs.attraction_args)
    m, a = fm.m, fm.a
    z = np.asarray(points, dtype=complex).ravel().copy()
    npts = z.size
    labels = np.full(npts, LABEL_UNDECIDED, dtype=np.int32)
    steps = np.full(npts, n_max, dtype=np.int32)
    idx = np.arange(npts)
    r_esc2 = fm.escape_radius ** 2
    rho2 = gate.rho_entry ** 2
    ang_lim = math.pi - gate.gap_omega
    ma = m * a

    def _settle(active_z, active_idx, n):
        w = -1.0 / (ma * active_z ** m)
        inside = (w.real * w.real + w.imag * w.imag >= rho2) & (np.abs(np.angle(w)) <= ang_lim)
        if not inside.any():
            return inside
        zin = active_z[inside]
        if m == 1:
            labels[active_idx[inside]] = 0
        else:
            diff = np.abs(_wrap_angle(np.angle(zin)[:, None] - v_args[None, :]))
            labels[active_idx[inside]] = np.argmin(diff, axis=1).astype(np.int32)
        steps[active_idx[inside]] = n
        return inside

    nonzero = z != 0
    resolved = _settle(z[nonzero], idx[nonzero], 0)
    keep = nonzero.copy()
    keep[idx[nonzero][resolved]] = False
    z = z[keep]
    idx = idx[keep]
    for n in range(1, n_max + 1):
        if idx.size == 0:
            break
        z = fm.eval_array(z)
        a2 = z.real * z.real + z.imag * z.imag
        esc = a2 > r_esc2
        if esc.any():
            labels[idx[esc]] = LABEL_ESCAPED
            steps[idx[esc]] = n
            z, idx, a2 = z[~esc], idx[~esc], a2[~esc]
            if idx.size == 0:
                break
        live = a2 > 0
        settled = np.zeros(idx.size, dtype=bool)
        if live.any():
            hit = _settle(z[live], idx[live], n)
            settled[np.flatnonzero(live)[hit]] = True
        if settled.any():
            z, idx = z[~settled], idx[~settled]
    return labels, steps


# ---------------------------------------------------------------------------
# Simultaneous polynomial root finding (Aberth iteration)
# ---------------------------------------------------------------------------

def _aberth_batch(coeffs_asc: np.ndarray, ws: np.ndarray, tol: float,
                  max_iter: int = 400) -> np.ndarray:
    """Roots of f(z) - w = 0 for every target w in ws, shape (len(ws), deg).

    Deterministic: fixed initial circle, perturbation restarts drawn from a
    seeded generator keyed by the attempt number.
    """
    ws = np.asarray(ws, dtype=complex).ravel()
    deg = len(coeffs_asc) - 1
    if deg < 1:
        raise NoConvergence("map is constant")
    lead = coeffs_asc[-1]
    desc = np.array(coeffs_asc[::-1], dtype=complex)
    ddesc = np.array([coeffs_asc[k] * k for k in range(deg, 0, -1)], dtype=complex)
    B = ws.size

    inner = float(np.max(np.abs(coeffs_asc[:-1])))
    radius = 1.0 + (inner + np.abs(ws)) / abs(lead)
    angles = _TWO_PI * (np.arange(deg) + 0.37) / deg
    z = radius[:, None] * 0.9 * np.exp(1j * (angles[None, :] + 0.1))

    def _p(zv):
        r = np.zeros_like(zv)
        for c in desc:
            r = r * zv + c
        return r - ws[:, None]

    def _dp(zv):
        r = np.zeros_like(zv)
        for c in ddesc:
            r = r * zv + c
        return r

    tol_eff = min(tol, 1e-13) * np.maximum(1.0, np.abs(ws))
    best = np.full(B, np.inf)
    stale = np.zeros(B, dtype=np.int32)
    attempt = np.zeros(B, dtype=np.int32)
    for _ in range(max_iter):
        pv = _p(z)
        res = np.max(np.abs(pv), axis=1)
        active = res > tol_eff
        if not active.any():
            break
        improved = res < 0.5 * best
        best = np.minimum(best, res)
        stale = np.where(improved, 0, stale + 1)
        restart = active & (stale > 40)
        if restart.any():
            attempt[restart] += 1
            rng = np.random.default_rng(12345)
            jitter = rng.standard_normal((B, deg)) + 1j * rng.standard_normal((B, deg))
            z[restart] += 1e-3 * radius[restart, None] * jitter[restart] * attempt[restart, None]
            stale[restart] = 0
        dp = _dp(z)
        dp = np.where(dp == 0, 1e-300, dp)
        newton = pv / dp
        diff = z[:, :, None] - z[:, None, :]
        np.einsum("bii->bi", diff)[:] = 1.0
        sums = np.sum(1.0 / diff, axis=2) - 1.0
        corr = newton / (1.0 - newton * sums)
        corr = np.where(np.isfinite(corr), corr, newton)
        z = np.where(active[:, None], z - corr, z)
    pv = _p(z)
    res = np.max(np.abs(pv), axis=1)
    if np.any(res > np.maximum(tol, tol_eff)):
        raise NoConvergence(f"root residual {res.max():.3e} above tolerance {tol:.3e}")

    # One Newton polish, then collapse clusters tighter than 10*tol to their
    # centroid so multiple roots report a single repeated value.
    dp = _dp(z)
    safe = np.abs(dp) > 1e-280
    z = np.where(safe, z - _p(z) / np.where(safe, dp, 1.0), z)
    cluster = 10.0 * tol
    if deg > 1:
        for b in range(B):
            row = z[b]
            used = np.zeros(deg, dtype=bool)
            for i in range(deg):
                if used[i]:
                    continue
                near = np.abs(row - row[i]) < cluster
                if near.sum() > 1:
                    row[near] = row[near].mean()
                used |= near
            z[b] = row
    for b in range(B):
        zb = z[b]
        z[b] = zb[np.lexsort((zb.imag, zb.real))]
    return z


def preimages(fm: ParabolicMap, w: complex, tol: float = DEFAULT_ROOT_TOL) -> list:
    """All deg(f) solutions of f(z) = w (with multiplicity), residual below tol."""
    coeffs = np.array(fm.coefficients, dtype=complex)
    roots = _aberth_batch(coeffs, np.array([w], dtype=complex), tol)[0]
    return [complex(r) for r in roots]


def preimages_batch(fm: ParabolicMap, ws: np.ndarray, tol: float = DEFAULT_ROOT_TOL) -> np.ndarray:
    coeffs = np.array(fm.coefficients, dtype=complex)
    return _aberth_batch(coeffs, ws, tol)


# ---------------------------------------------------------------------------
# Truncated backward/forward orbit set Q
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QPoint:
    value: complex
    k: int
    l: int
    residual: float


@dataclass
class QEnumeration:
    """Deduplicated truncation of the forward orbit plus its preimage trees."""

    root: complex
    points: list
    k_max: int
    l_max: int
    dedup_quantum: float = DEDUP_QUANTUM
    membership_filtered: bool = True
    excluded_undecided: int = 0
    excluded_other_direction: int = 0
    excluded_escaped: int = 0
    truncated: bool = False

    def values(self) -> np.ndarray:
        return np.array([p.value for p in self.points], dtype=complex)

    def counts_by_kl(self) -> dict:
        out: dict = {}
        for p in self.points:
            out[(p.k, p.l)] = out.get((p.k, p.l), 0) + 1
        return out

    def to_csv(self, path) -> None:
        lines = ["re,im,k,l,residual"]
        for p in self.points:
            lines.append(f"{p.value.real!r},{p.value.imag!r},{p.k},{p.l},{p.residual!r}")
        with open(path, "w", encoding="ascii") as fh:
            fh.write("\n".join(lines) + "\n")


def enumerate_Q(fm: ParabolicMap, q: complex, k_max: int, l_max: int,
                direction: int, tol: float = DEFAULT_ROOT_TOL,
                membership: bool = True, petal=None,
                n_max_membership: int = 20000,
                point_cap: int = 10 ** 6) -> QEnumeration:
    """Breadth-first preimage expansion of each forward iterate of q.

    Points are filtered to those whose forward orbit is absorbed by the
    certified petal of the requested direction (flag `membership`); undecided
    points are excluded and counted, never guessed. The result is sorted by
    (k, l, re, im) and deduplicated on the quantized grid, so the output is
    independent of expansion order.
    """
    gate = petal if petal is not None else _default_gate(fm)
    probe = classify_direction(fm, q, max(1000, n_max_membership), 0.2, petal=gate)
    if not probe.converged or probe.direction != direction:
        raise NotInBasin(f"q={q} does not classify into direction {direction}")

    orbit = [complex(q)]
    for _ in range(k_max):
        orbit.append(fm(orbit[-1]))

    raw: list[tuple[int, int, complex]] = []
    excl_und = excl_dir = excl_esc = 0
    truncated = False
    for k, xk in enumerate(orbit):
        raw.append((k, 0, xk))
        frontier = np.array([xk], dtype=complex)
        for l in range(1, l_max + 1):
            if frontier.size == 0 or truncated:
                break
            roots = preimages_batch(fm, frontier, tol).ravel()
            if membership:
                labels, _ = classify_batch(fm, roots, n_max_membership, petal=gate)
                keep = labels == direction
                excl_und += int(np.sum(labels == LABEL_UNDECIDED))
                excl_esc += int(np.sum(labels == LABEL_ESCAPED))
                excl_dir += int(np.sum((labels >= 0) & (labels != direction)))
                roots = roots[keep]
            roots = roots[np.lexsort((roots.imag, roots.real))]
            for r in roots:
                raw.append((k, l, complex(r)))
            if len(raw) > point_cap:
                truncated = True
                raw = raw[:point_cap]
            frontier = roots

    raw.sort(key=lambda t: (t[0], t[1], t[2].real, t[2].imag))
    quantum = DEDUP_QUANTUM
    seen: set = set()
    kept: list[tuple[int, int, complex]] = []
    for k, l, v in raw:
        key = (round(v.real / quantum), round(v.imag / quantum))
        if key in seen:
            continue
        seen.add(key)
        kept.append((k, l, v))

    # Independent residual verification: iterate each point forward l steps
    # and compare against the stored orbit target.
    vals = np.array([v for (_, _, v) in kept], dtype=complex)
    ls = np.array([l for (_, l, _) in kept])
    ks = np.array([k for (k, _, _) in kept])
    residuals = np.zeros(len(kept))
    cur = vals.copy()
    for step in range(0, l_max + 1):
        sel = ls == step
        if sel.any():
            targets = np.array([orbit[k] for k in ks[sel]], dtype=complex)
            residuals[sel] = np.abs(cur[sel] - targets)
        if step < l_max:
            cur = fm.eval_array(cur)

    pts = [QPoint(complex(v), int(k), int(l), float(r))
           for (k, l, v), r in zip(kept, residuals)]
    return QEnumeration(complex(q), pts, k_max, l_max, quantum, membership,
                        excl_und, excl_dir, excl_esc, truncated)
