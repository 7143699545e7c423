"""Self-check suites run by ``hypvol verify``.

Each check records whether it passed and the largest deviation it measured.
``quick`` runs in seconds; ``full`` adds the sampled geometric suites.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from . import bounds, cycles, hypgeom, pseudo, specfun


@dataclass
class CheckResult:
    name: str
    passed: bool
    deviation: float
    detail: str = ""
    seconds: float = 0.0


def _specfun_identities(rng, tol):
    # Each identity combines up to four evaluations; keep their sum below 1e-9.
    tol = min(tol, 1e-12)
    G = specfun.catalan(tol)
    worst = abs(specfun.lobachevsky(math.pi / 2, tol) + 2 * specfun.lobachevsky(math.pi / 4, tol) - G)
    for theta in rng.uniform(-10, 10, size=200):
        L = specfun.lobachevsky(theta, tol)
        worst = max(worst,
                    abs(specfun.lobachevsky(-theta, tol) + L),
                    abs(specfun.lobachevsky(theta + math.pi, tol) - L),
                    abs(specfun.lobachevsky(2 * theta, tol)
                        - 2 * (L + specfun.lobachevsky(theta + math.pi / 2, tol))))
    return worst <= 1e-9, worst, "catalan, oddness, periodicity, duplication"


def _lobachevsky_oracle(rng, tol):
    tol = min(tol, 1e-11)
    worst = max(abs(specfun.lobachevsky(t, tol) - specfun.lobachevsky_integral(t, tol))
                for t in rng.uniform(-4, 4, size=20))
    return worst <= 1e-9, worst, "series vs direct quadrature"


def _constants(rng, tol):
    dv = abs(specfun.v_n(3, tol) - 1.014942)
    dg = abs(specfun.catalan(tol) - 0.915965)
    return dv <= 1e-5 and dg <= 1e-6, max(dv, dg), f"v3 off by {dv:.2e}, G off by {dg:.2e}"


def _milnor(count, vol_tol):
    def run(rng, tol):
        worst = 0.0
        for _ in range(count):
            S = hypgeom.random_ideal_simplex(rng)
            ref = hypgeom.ideal_tetra_volume(*hypgeom.ideal_tetra_angles(S))
            worst = max(worst, abs(abs(hypgeom.signed_volume(S, vol_tol)) - ref))
        reg = abs(hypgeom.signed_volume(hypgeom.regular_ideal_simplex(3), vol_tol) - specfun.v_n(3))
        worst = max(worst, reg)
        return worst <= 1e-3, worst, f"{count} random ideal tetrahedra and the regular one"
    return run


def _obtuse(count):
    def run(rng, tol):
        v3 = specfun.v_n(3)
        G = specfun.catalan()
        counts = {c.value: 0 for c in hypgeom.ObtusenessClass}
        excess = -math.inf
        for _ in range(count):
            S = hypgeom.random_compact_simplex(rng)
            cls = hypgeom.classify_obtuseness(S)
            counts[cls.value] += 1
            if cls is hypgeom.ObtusenessClass.TWO_OBTUSE:
                excess = max(excess, abs(hypgeom.signed_volume(S, 1e-6)) - v3 / 2)
            elif cls is hypgeom.ObtusenessClass.ONE_OBTUSE:
                excess = max(excess, abs(hypgeom.signed_volume(S, 1e-6)) - G)
        ok = counts["three_obtuse"] == 0 and excess <= 1e-3
        return ok, max(excess, 0.0), f"classes {counts}; largest volume excess {excess:.4f}"
    return run


def _maximizer(rng, tol):
    (a, b, c), val = hypgeom.one_obtuse_ideal_maximizer()
    dev = max(abs(a - math.pi / 2), abs(b - math.pi / 4), abs(c - math.pi / 4))
    dval = abs(val - specfun.catalan())
    return dev <= 1e-4 and dval <= 1e-6, max(dev, dval), f"argmax ({a:.6f}, {b:.6f}, {c:.6f})"


def _census(g_max):
    def run(rng, tol):
        rows = bounds.census_table(2, g_max, tol)
        sw = bounds.switchover_genus(rows)
        early = all(r.best == "thmB" for r in rows if r.g < 5)
        ineq = all(all(r.inequalities.values()) for r in rows if r.g >= 5)
        mono = all(a.vol_delta_g < b.vol_delta_g for a, b in zip(rows, rows[1:]))
        ok = sw == 5 and early and ineq and mono
        return ok, 0.0 if ok else 1.0, f"switchover at g = {sw} over g <= {g_max}"
    return run


def _pseudo(count):
    def run(rng, tol):
        bad = 0
        for _ in range(count):
            P = pseudo.random_pseudomanifold(rng, 3, 6)
            B = pseudo.boundary(P)
            bad += pseudo.boundary(B).simplex_count != 0
            bad += not pseudo.boundary_face_count_identity(P)[2]
            c = pseudo.nice_bad_edges(P)
            bad += 2 * (c.e_nice + c.e_bad) != 3 * B.simplex_count
            if pseudo.orientability(P) is not None:
                bad += pseudo.orientability(B) is None
        return bad == 0, float(bad), f"{count} random pseudomanifolds"
    return run


def _chains(count):
    def run(rng, tol):
        bad = 0
        for _ in range(count):
            z = cycles.random_chain(rng)
            P, unmatched = cycles.chain_to_pseudomanifold(z)
            bad += unmatched != cycles.boundary_l1(z)
            bad += not pseudo.signs_orient(P, cycles.orientation_from_signs(z))
        return bad == 0, float(bad), f"{count} random 10-term chains"
    return run


def _angle_sum(rng, tol):
    rep = cycles.audit_geometric_cycle(cycles.supplementary_pair_chain(), 1, 1.0, 0.0, 0.1)
    dev = min(abs(x) for x in rep.angle_sum_deviation.values())
    return dev <= 1e-6, dev, "flat edge of the supplementary pair"


def _regular4(rng, tol):
    S = hypgeom.regular_ideal_simplex(4)
    r = [math.pi / a for a in hypgeom.dihedral_angles(S).values()]
    ok = all(2 < x < 3 for x in r)
    return ok, max(r) - min(r), f"pi/alpha = {r[0]:.6f}"


def _rational(count):
    def run(rng, tol):
        worst = 0.0
        exact = True
        for _ in range(count):
            z = cycles.random_real_cycle(rng)
            w = cycles.rationalize_cycle(z, 1e-6)
            _, A = cycles.cycle_matrix(z)
            exact &= cycles.is_cycle_exact(A, w.coefficients)
            worst = max(worst, max(abs(float(a) - b) for a, b in zip(w.coefficients, z.coefficients)))
        return exact and worst < 1e-6, worst, f"{count} random real cycles"
    return run


PROFILES: dict[str, list[tuple[str, Callable]]] = {
    "quick": [
        ("specfun_identities", _specfun_identities),
        ("lobachevsky_vs_integral", _lobachevsky_oracle),
        ("constants", _constants),
        ("ideal_volume_vs_lobachevsky", _milnor(10, 1e-5)),
        ("census_switchover", _census(20)),
        ("pseudomanifold_identities", _pseudo(50)),
        ("chain_boundary_and_orientation", _chains(50)),
        ("supplementary_angle_sum", _angle_sum),
        ("regular_ideal_4_simplex_angle", _regular4),
        ("rationalization", _rational(3)),
    ],
}
PROFILES["full"] = PROFILES["quick"][:3] + [
    ("ideal_volume_vs_lobachevsky", _milnor(100, 1e-5)),
    ("obtuse_volume_bounds", _obtuse(1000)),
    ("one_obtuse_maximizer", _maximizer),
    ("census_switchover", _census(100)),
    ("pseudomanifold_identities", _pseudo(100)),
    ("chain_boundary_and_orientation", _chains(100)),
    ("supplementary_angle_sum", _angle_sum),
    ("regular_ideal_4_simplex_angle", _regular4),
    ("rationalization", _rational(10)),
]


def run_verify(profile: str = "quick", seed: int = 0, tol: float = specfun.DEFAULT_TOL,
               timings: bool = False) -> dict:
    """Run a profile; every check gets its own generator derived from ``seed``."""
    if profile not in PROFILES:
        raise ValueError(f"unknown profile {profile!r}")
    results = []
    for k, (name, fn) in enumerate(PROFILES[profile]):
        rng = np.random.default_rng([seed, k])
        start = time.perf_counter()
        try:
            ok, dev, detail = fn(rng, tol)
        except (ArithmeticError, ValueError) as exc:
            ok, dev, detail = False, math.inf, f"raised {type(exc).__name__}: {exc}"
        elapsed = time.perf_counter() - start if timings else 0.0
        results.append(CheckResult(name, bool(ok), float(dev), detail, elapsed))
    return {"profile": profile, "seed": seed, "passed": all(r.passed for r in results),
            "checks": [asdict(r) for r in results]}
