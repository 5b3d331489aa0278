"""Parameter recipes and machine-checkable far-point certificates.

Given a target distance C, the recipe picks a gap angle theta0 below the cap
1/(2 C e^C), certifies a nested wedge construction at that angle, and places
z0 = eps * e^(i theta*) with eps = R0_prime * exp(-2C/m), so that the radial
growth bound alone already forces distance >= C to every enumerated point
outside the inner wedge. Certification itself uses the exact chart distance on
an elementary comparison domain that contains the immediate basin; domain
monotonicity makes every such value a sound lower bound for the basin
distance. The classical closed-form bounds are recorded alongside as
cross-checks.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .errors import ConstructionFailed, NotInBasin, OutsideComparisonDomain
from .kobayashi import (DistanceBound, ModelDomain, bound_case1, bound_case2_horizontal,
                        dist_uv_arrays, kappa_infimum, kobayashi_disk_clearance)
from .parabolic import (DEDUP_QUANTUM, ParabolicMap, QEnumeration, attraction_vectors,
                        classify_direction, enumerate_Q, preimages_batch)
from .petals import PacManConstruction, construct_pacman

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class TheoremParams:
    """Chosen parameters for one certificate run (normalized frame data)."""

    C: float
    m: int
    direction: int
    theta0: float
    theta0_prime: float
    epsilon: float
    z0: complex
    z0_normalized: complex
    theta_star: float
    rotation: float
    comparison_domain: ModelDomain
    pacman: PacManConstruction
    kappa: float
    kappa_constants: dict

    def to_json_dict(self) -> dict:
        return {
            "C": self.C,
            "m": self.m,
            "direction": self.direction,
            "theta0": self.theta0,
            "theta0_prime": self.theta0_prime,
            "epsilon": self.epsilon,
            "z0": [self.z0.real, self.z0.imag],
            "z0_normalized": [self.z0_normalized.real, self.z0_normalized.imag],
            "theta_star": self.theta_star,
            "rotation": self.rotation,
            "comparison_domain": self.comparison_domain.to_json_dict(),
            "pacman": self.pacman.to_json_dict(),
            "kappa": self.kappa,
            "kappa_constants": dict(sorted(self.kappa_constants.items())),
        }


def choose_parameters(fm: ParabolicMap, C: float, direction: int = 0) -> TheoremParams:
    """Run the parameter recipe for target distance C in one direction.

    theta0 is half of min(1/(2 C e^C), pi/6); the wedge construction at theta0
    yields R0_prime and eps = R0_prime e^(-2C/m); theta* = min(1.5 theta0,
    0.9 asin(min(1, cap))) keeps the normalized point at Re > 1/2 with height
    below the cap; theta0_prime comes from the hyperbolic disk clearance at
    radius C about the normalized point.
    """
    if C <= 0.0:
        raise ValueError("C must be positive")
    m = fm.m
    vs = attraction_vectors(fm)
    if not (0 <= direction < m):
        raise ValueError("direction index out of range")
    cap = 1.0 / (2.0 * C * math.exp(C))
    theta0 = 0.5 * min(cap, math.pi / 6.0)
    try:
        pm = construct_pacman(fm, theta0)
    except Exception as exc:  # noqa: BLE001 - surface as recipe failure
        raise ConstructionFailed(f"wedge construction rejected theta0={theta0}") from exc
    eps = pm.R0_prime * math.exp(-2.0 * C / m)
    theta_star = min(1.5 * theta0, 0.9 * math.asin(min(1.0, cap)))
    rotation = (vs.attraction_args[direction] - math.pi / m) % _TWO_PI
    z0 = eps * complex(math.cos(rotation + theta_star), math.sin(rotation + theta_star))
    z0n = complex(math.cos(theta_star), math.sin(theta_star))

    opening = _TWO_PI / m
    higher = fm.degree > m + 1
    if not higher:
        comparison = ModelDomain.slit_plane() if m == 1 else ModelDomain.sector(0.0, opening)
    elif m == 1:
        comparison = ModelDomain.double_sector(-theta0, _TWO_PI + theta0)
    else:
        comparison = ModelDomain.sector(-theta0, opening + theta0)

    clearance_domain = ModelDomain.slit_plane() if m == 1 else ModelDomain.sector(0.0, opening)
    theta0_prime = kobayashi_disk_clearance(clearance_domain, z0n, C, 0.0)
    theta0_prime = min(theta0_prime, 0.999 * theta0)

    kappa, c1, c2 = kappa_infimum(m, (0.0, math.pi / (2.0 * m)))
    return TheoremParams(C, m, direction, theta0, theta0_prime, eps, z0, z0n,
                         theta_star, rotation, comparison, pm, kappa,
                         {"c1": c1, "c2": c2})


def _candidate_lifts(params: TheoremParams, ang: np.ndarray) -> list:
    """Angular lifts theta + 2 pi k admissible in the comparison domain."""
    dom = params.comparison_domain
    lo, hi = dom.arg_low, dom.arg_high
    guard = 1e-12
    out = []
    for k in (-1, 0, 1):
        th = ang + _TWO_PI * k
        ok = (th - lo > guard) & (hi - th > guard)
        out.append((th, ok))
    return out


def certify_points(params: TheoremParams, values: np.ndarray):
    """Exact comparison-domain distance from z0 to every value.

    Returns (distances, inside_mask); points admitting several lifts into the
    domain get the minimum over lifts, which can only under-state the bound
    and therefore stays sound.
    """
    dom = params.comparison_domain
    scale = math.pi / dom.width
    zeta = values * complex(math.cos(-params.rotation), math.sin(-params.rotation))
    r = np.abs(zeta)
    ang = np.angle(zeta) % _TWO_PI
    z0n_rot = params.z0 * complex(math.cos(-params.rotation), math.sin(-params.rotation))
    r0 = abs(z0n_rot)
    th0 = math.atan2(z0n_rot.imag, z0n_rot.real) % _TWO_PI
    u0 = scale * math.log(r0)
    v0 = scale * (th0 - dom.arg_low)

    dist = np.full(values.shape, np.inf)
    inside = np.zeros(values.shape, dtype=bool)
    positive = r > 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        logr = np.where(positive, np.log(np.where(positive, r, 1.0)), -np.inf)
        for th, ok in _candidate_lifts(params, ang):
            ok = ok & positive
            if not ok.any():
                continue
            u = scale * logr[ok]
            v = scale * (th[ok] - dom.arg_low)
            d = dist_uv_arrays(u, v, u0, v0)
            cur = dist[ok]
            dist[ok] = np.minimum(cur, d)
            inside[ok] = True
    return dist, inside


def certify_pair(params: TheoremParams, q_tilde: complex) -> tuple[DistanceBound, dict]:
    """Certified bound for a single point plus the recorded cross-checks."""
    d, ok = certify_points(params, np.array([q_tilde], dtype=complex))
    if not ok[0]:
        raise OutsideComparisonDomain(f"{q_tilde} admits no lift into the comparison domain")
    bound = DistanceBound(float(d[0]), "exact", "chart")
    return bound, _cross_checks(params, np.array([q_tilde], dtype=complex))


def _cross_checks(params: TheoremParams, values: np.ndarray) -> dict:
    zeta = values * complex(math.cos(-params.rotation), math.sin(-params.rotation))
    r = np.abs(zeta)
    ang = np.angle(zeta) % _TWO_PI
    axis = math.pi / params.m
    on_ray = np.abs(((ang - axis + math.pi) % _TWO_PI) - math.pi) < 1e-9
    out = {
        "case1": bound_case1(params.epsilon, params.pacman.R0_prime, params.m).value,
        "case1_applicable": int(np.sum(r >= params.pacman.R0_prime)),
        "case3": params.C,
        "case3_applicable": int(np.sum(ang < params.theta0_prime)),
        "case2": params.kappa * params.C,
        "case2_applicable": int(np.sum(on_ray)),
    }
    try:
        out["horizontal"] = bound_case2_horizontal(params.z0_normalized, params.C).value
    except Exception:  # noqa: BLE001 - recorded only when defined
        out["horizontal"] = None
    return out


@dataclass
class TheoremCertificate:
    params: TheoremParams
    q: complex
    enumeration: QEnumeration
    point_values: np.ndarray
    point_k: np.ndarray
    point_l: np.ndarray
    point_bounds: np.ndarray
    certified_mask: np.ndarray
    excluded_outside: int
    uncertifiable: int
    global_min: float
    witness_index: int
    passed: bool
    cross_checks: dict
    cross_check_violations: int
    interior_offaxis_points: int
    runtime_ms: int = 0

    @property
    def n_points(self) -> int:
        return int(self.point_values.size)

    @property
    def n_certified(self) -> int:
        return int(self.certified_mask.sum())

    def counts_by_kl(self) -> list:
        out: dict = {}
        for k, l in zip(self.point_k, self.point_l):
            out[(int(k), int(l))] = out.get((int(k), int(l)), 0) + 1
        return [[k, l, n] for (k, l), n in sorted(out.items())]

    def witness(self) -> dict:
        i = self.witness_index
        return {
            "point": [float(self.point_values[i].real), float(self.point_values[i].imag)],
            "k": int(self.point_k[i]),
            "l": int(self.point_l[i]),
            "bound": DistanceBound(float(self.point_bounds[i]), "exact", "chart").to_json_dict(),
        }

    def to_json_dict(self) -> dict:
        # runtime_ms stays out of the JSON so identical inputs give identical bytes.
        return {
            "pass": bool(self.passed),
            "C": self.params.C,
            "global_min": None if not math.isfinite(self.global_min) else self.global_min,
            "q": [self.q.real, self.q.imag],
            "k_max": self.enumeration.k_max,
            "l_max": self.enumeration.l_max,
            "n_points": self.n_points,
            "n_certified": self.n_certified,
            "excluded": {
                "outside_comparison_sector": self.excluded_outside,
                "uncertifiable": self.uncertifiable,
                "undecided_membership": self.enumeration.excluded_undecided,
                "other_direction": self.enumeration.excluded_other_direction,
                "escaped": self.enumeration.excluded_escaped,
            },
            "witness": self.witness() if self.n_certified else None,
            "counts": self.counts_by_kl(),
            "params": self.params.to_json_dict(),
            "cross_checks": {k: v for k, v in sorted(self.cross_checks.items())},
            "cross_check_violations": self.cross_check_violations,
            "interior_offaxis_points": self.interior_offaxis_points,
        }

    def to_table(self) -> str:
        gmin = f"{self.global_min:.6f}" if math.isfinite(self.global_min) else "inf"
        lines = [
            "far-point certificate",
            f"  m={self.params.m}  direction={self.params.direction}",
            f"  C={self.params.C}  theta0={self.params.theta0:.6g}  "
            f"theta0'={self.params.theta0_prime:.6g}  eps={self.params.epsilon:.6g}",
            f"  z0={self.params.z0:.6g}  comparison={self.params.comparison_domain.tag}",
            f"  points={self.n_points}  certified={self.n_certified}  "
            f"excluded_outside={self.excluded_outside}  uncertifiable={self.uncertifiable}",
            f"  global_min={gmin}  pass={self.passed}  "
            f"runtime_ms={self.runtime_ms}",
            "  k  l  count  min_bound",
        ]
        by_kl: dict = {}
        for k, l, b, ok in zip(self.point_k, self.point_l, self.point_bounds,
                               self.certified_mask):
            if ok:
                key = (int(k), int(l))
                cnt, mn = by_kl.get(key, (0, math.inf))
                by_kl[key] = (cnt + 1, min(mn, float(b)))
        for (k, l), (cnt, mn) in sorted(by_kl.items()):
            lines.append(f"  {k:2d} {l:2d} {cnt:6d}  {mn:.6f}")
        return "\n".join(lines) + "\n"

    def bounds_to_csv(self, path) -> None:
        lines = ["re,im,k,l,bound,certified"]
        for v, k, l, b, ok in zip(self.point_values, self.point_k, self.point_l,
                                  self.point_bounds, self.certified_mask):
            btxt = repr(float(b)) if math.isfinite(b) else "inf"
            lines.append(f"{v.real!r},{v.imag!r},{int(k)},{int(l)},{btxt},{int(ok)}")
        with open(path, "w", encoding="ascii") as fh:
            fh.write("\n".join(lines) + "\n")


def verify_theorem(fm: ParabolicMap, C: float, q: complex, k_max: int = 20,
                   l_max: int = 10, direction: int = 0, *,
                   z0_override: complex | None = None,
                   root_tol: float = 1e-12,
                   n_max_membership: int = 20000) -> TheoremCertificate:
    """Produce a certificate that min over the truncated Q of the exact
    comparison-domain distance from z0 is at least C."""
    t_start = time.perf_counter()
    probe = classify_direction(fm, q, max(1000, n_max_membership), 0.2)
    if not probe.converged or probe.direction != direction:
        raise NotInBasin(f"q={q} does not classify into direction {direction}")

    params = choose_parameters(fm, C, direction)
    if z0_override is not None:
        zr = z0_override * complex(math.cos(-params.rotation), math.sin(-params.rotation))
        params = TheoremParams(params.C, params.m, params.direction, params.theta0,
                               params.theta0_prime, params.epsilon, complex(z0_override),
                               zr / abs(zr), params.theta_star, params.rotation,
                               params.comparison_domain, params.pacman, params.kappa,
                               params.kappa_constants)

    qe = enumerate_Q(fm, q, k_max, l_max, direction, tol=root_tol,
                     n_max_membership=n_max_membership)
    values = qe.values()
    ks = np.array([p.k for p in qe.points], dtype=np.int32)
    ls = np.array([p.l for p in qe.points], dtype=np.int32)
    dist, inside = certify_points(params, values)

    higher = fm.degree > fm.m + 1
    excluded_outside = 0 if higher else int(np.sum(~inside))
    uncertifiable = int(np.sum(~inside)) if higher else 0

    certified = inside
    if certified.any():
        dvals = dist[certified]
        global_min = float(dvals.min())
        cand = np.flatnonzero(certified)
        order = np.lexsort((values[cand].imag, values[cand].real, dist[cand]))
        witness = int(cand[order[0]])
    else:
        global_min = math.inf
        witness = 0

    crosses = _cross_checks(params, values)
    zeta = values * complex(math.cos(-params.rotation), math.sin(-params.rotation))
    r = np.abs(zeta)
    case1_mask = certified & (r >= params.pacman.R0_prime)
    violations = int(np.sum(dist[case1_mask] < crosses["case1"] - 1e-12))
    ang = np.angle(zeta) % _TWO_PI
    case3_mask = certified & (ang < params.theta0_prime)
    violations += int(np.sum(dist[case3_mask] < params.C - 1e-9))

    axis = math.pi / params.m
    offaxis = np.abs(np.sin(ang - axis)) * r > 1e-12
    interior_offaxis = int(np.sum((r < params.pacman.R0_prime) & offaxis))

    passed = bool(certified.any() and math.isfinite(global_min)
                  and global_min >= C and uncertifiable == 0)
    runtime_ms = int(1000.0 * (time.perf_counter() - t_start))
    return TheoremCertificate(params, complex(q), qe, values, ks, ls, dist,
                              certified, excluded_outside, uncertifiable,
                              global_min, witness, passed, crosses, violations,
                              interior_offaxis, runtime_ms)


@dataclass
class ClosureReport:
    depth: int
    status: str
    n_preimages: int = 0
    residual_failures: int = 0
    max_residual: float = 0.0
    checked_images: int = 0
    image_misses: int = 0
    image_outside_sector: int = 0
    frontier_skips: int = 0

    def to_json_dict(self) -> dict:
        return {
            "depth": self.depth,
            "status": self.status,
            "n_preimages": self.n_preimages,
            "residual_failures": self.residual_failures,
            "max_residual": self.max_residual,
            "checked_images": self.checked_images,
            "image_misses": self.image_misses,
            "image_outside_sector": self.image_outside_sector,
            "frontier_skips": self.frontier_skips,
        }


def corollary_d_closure(fm: ParabolicMap, cert: TheoremCertificate,
                        depth: int, residual_tol: float = 1e-8) -> ClosureReport:
    """Mechanical premises of the preimage-closure argument on computed data.

    Every depth-d preimage of z0 must iterate forward onto z0 within the
    residual tolerance, and every enumerated point's forward image must land
    (up to the dedup quantum) on a point that was itself certified at >= C.
    Orbit points at the k_max edge have no stored image and are counted as
    frontier skips, not failures.
    """
    if not cert.passed:
        return ClosureReport(depth, "precondition_failed")
    report = ClosureReport(depth, "ok")
    z0 = cert.params.z0

    frontier = np.array([z0], dtype=complex)
    nodes: list[tuple[int, complex]] = []
    for level in range(1, depth + 1):
        if frontier.size == 0:
            break
        frontier = preimages_batch(fm, frontier, tol=1e-13).ravel()
        nodes.extend((level, complex(w)) for w in frontier)
    report.n_preimages = len(nodes)
    for level, w in nodes:
        cur = w
        for _ in range(level):
            cur = fm(cur)
        res = abs(cur - z0)
        report.max_residual = max(report.max_residual, res)
        if res >= residual_tol:
            report.residual_failures += 1

    quantum = DEDUP_QUANTUM
    lookup: dict = {}
    for v, b, ok in zip(cert.point_values, cert.point_bounds, cert.certified_mask):
        if ok:
            lookup[(round(v.real / quantum), round(v.imag / quantum))] = float(b)
    k_max = cert.enumeration.k_max
    scope = cert.certified_mask & ~((cert.point_l == 0) & (cert.point_k == k_max))
    report.frontier_skips = int(np.sum(cert.certified_mask & ~scope))
    images = fm.eval_array(cert.point_values[scope])
    _, img_inside = certify_points(cert.params, images)
    # The immediate component is forward invariant inside its sector, so a
    # point whose image leaves the sector was never in it and is out of scope.
    report.image_outside_sector = int(np.sum(~img_inside))
    for img in images[img_inside]:
        key0 = (round(img.real / quantum), round(img.imag / quantum))
        hit = None
        for dk in (0, -1, 1):
            for di in (0, -1, 1):
                hit = lookup.get((key0[0] + dk, key0[1] + di))
                if hit is not None:
                    break
            if hit is not None:
                break
        report.checked_images += 1
        if hit is None or hit < cert.params.C - 1e-12:
            report.image_misses += 1
    return report
