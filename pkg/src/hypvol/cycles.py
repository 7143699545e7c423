"""Integral and real chains, their pseudomanifolds, and the geometric cycle audit."""

from __future__ import annotations

import itertools
import math
from collections import defaultdict, deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
import sympy

from . import hypgeom
from .hypgeom import HPoint, ObtusenessClass
from .pseudo import (Pairing, Pseudomanifold, boundary_structure,
                     nice_bad_edges, omega_partition)
from .specfun import v_n

POSITION_ATOL = 1e-9


class ChainError(ValueError):
    pass


@dataclass(frozen=True)
class ChainTerm:
    sign: int
    face_keys: tuple[str, ...]
    vertices: tuple[HPoint, ...] | None = None

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ChainError(f"chain signs must be +1 or -1, got {self.sign!r}")
        object.__setattr__(self, "face_keys", tuple(self.face_keys))
        if self.vertices is not None:
            object.__setattr__(self, "vertices", tuple(self.vertices))


@dataclass(frozen=True)
class IntegralChain:
    """z = sum_i sign_i sigma_i; face_keys[j] names the restriction to face j."""

    n: int
    terms: tuple[ChainTerm, ...]

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        for t in self.terms:
            if len(t.face_keys) != self.n + 1:
                raise ChainError(f"each term needs {self.n + 1} face keys")
            if t.vertices is not None and len(t.vertices) != self.n + 1:
                raise ChainError(f"each term needs {self.n + 1} vertex positions")

    @classmethod
    def from_json(cls, obj: dict) -> "IntegralChain":
        try:
            n = int(obj["n"])
            terms = []
            for d in obj["terms"]:
                verts = d.get("vertices")
                pts = None
                if verts is not None:
                    kinds = d.get("kinds") or ["finite"] * len(verts)
                    pts = tuple(HPoint(tuple(float(c) for c in v), k) for v, k in zip(verts, kinds))
                terms.append(ChainTerm(int(d["sign"]), tuple(str(k) for k in d["faces"]), pts))
        except (KeyError, TypeError, ValueError) as exc:
            raise ChainError(f"malformed chain JSON: {exc}") from exc
        return cls(n, tuple(terms))


@dataclass(frozen=True)
class RealTerm:
    coefficient: float | Fraction
    face_keys: tuple[str, ...]


@dataclass(frozen=True)
class RealChain:
    n: int
    terms: tuple[RealTerm, ...]

    @property
    def coefficients(self) -> list:
        return [t.coefficient for t in self.terms]

    def with_coefficients(self, coeffs: Sequence) -> "RealChain":
        return RealChain(self.n, tuple(RealTerm(c, t.face_keys) for c, t in zip(coeffs, self.terms)))


def l1_norm(z: IntegralChain | RealChain) -> float:
    if isinstance(z, IntegralChain):
        return float(len(z.terms))
    return float(sum(abs(c) for c in z.coefficients))


def chain_to_pseudomanifold(z: IntegralChain) -> tuple[Pseudomanifold, int]:
    """Glue a maximal family of canceling pairs; return (P, unmatched faces).

    Faces with equal key and opposite boundary sign (-1)^j sign_i are matched
    first-come first-served in (term, face) order.
    """
    n = z.n
    waiting: dict[tuple[str, int], deque] = defaultdict(deque)
    pairs = []
    for i, t in enumerate(z.terms):
        for j, key in enumerate(t.face_keys):
            c = (-1) ** j * t.sign
            queue = waiting[(key, -c)]
            if queue:
                a = queue.popleft()
                pairs.append(Pairing(a[0], a[1], i, j))
            else:
                waiting[(key, c)].append((i, j))
    unmatched = sum(len(q) for q in waiting.values())
    return Pseudomanifold(n, len(z.terms), tuple(pairs)), unmatched


def orientation_from_signs(z: IntegralChain) -> tuple[int, ...]:
    return tuple(t.sign for t in z.terms)


# --------------------------------------------------------------------------
# Rationalisation

def cycle_matrix(z: RealChain) -> tuple[list[str], list[list[int]]]:
    """Integer matrix of the boundary map: rows = face keys, columns = terms."""
    keys = sorted({k for t in z.terms for k in t.face_keys})
    row = {k: r for r, k in enumerate(keys)}
    A = [[0] * len(z.terms) for _ in keys]
    for i, t in enumerate(z.terms):
        for j, k in enumerate(t.face_keys):
            A[row[k]][i] += (-1) ** j
    return keys, A


def is_cycle_exact(A: list[list[int]], x: Sequence[Fraction]) -> bool:
    return all(sum(a * Fraction(c) for a, c in zip(r, x)) == 0 for r in A)


def rationalize_cycle(z: RealChain, eps: float, normalizer: Sequence | None = None,
                      cycle_atol: float = 1e-9, max_denominator: int = 10**15) -> RealChain:
    """Rational cycle within ``eps`` of the real cycle ``z`` (componentwise).

    The cycle space is the kernel of an integer matrix, so it has a rational
    basis indexed by the free columns of the RREF.  The free coordinates of z
    are snapped to continued-fraction convergents with growing denominator
    bound until the reconstructed rational cycle lies within eps.  With a
    ``normalizer`` (coefficients of a linear functional phi with phi(z) = 1),
    the result is divided by phi of itself so phi(result) = 1 exactly.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    a = np.array([float(c) for c in z.coefficients])
    _, A = cycle_matrix(z)
    if A and len(a):
        residual = np.abs(np.array(A, dtype=float) @ a).max()
        if residual > cycle_atol * max(1.0, np.abs(a).max()):
            raise ChainError(f"input is not a cycle (boundary residual {residual:.3g})")
    k = len(a)
    if A:
        R, pivots = sympy.Matrix(A).rref()
    else:
        R, pivots = sympy.zeros(0, k), ()
    free = [c for c in range(k) if c not in pivots]
    phi = None if normalizer is None else [Fraction(c) for c in normalizer]
    if phi is not None and len(phi) != k:
        raise ValueError("normalizer needs one coefficient per term")

    def build(q):
        x = [Fraction(0)] * k
        for f, val in zip(free, q):
            x[f] = val
        for r, p in enumerate(pivots):
            x[p] = -sum((Fraction(int(R[r, f].p), int(R[r, f].q)) * x[f] for f in free), Fraction(0))
        return x

    bound = 1
    while bound <= max_denominator:
        q = [Fraction(float(a[f])).limit_denominator(bound) for f in free]
        x = build(q)
        if phi is not None:
            s = sum(p * c for p, c in zip(phi, x))
            if s == 0:
                bound *= 10
                continue
            x = [c / s for c in x]
        if all(abs(float(c) - ai) < eps for c, ai in zip(x, a)):
            return z.with_coefficients(x)
        bound *= 10
    raise ChainError(f"no rational cycle within eps = {eps!r} at the working precision")


# --------------------------------------------------------------------------
# Geometric audit

@dataclass
class CycleAuditReport:
    d: int
    total_algebraic_volume: float
    target_volume: float
    per_simplex_volumes: list[float]
    boundary_angle_sums: dict[int, float]
    angle_sum_deviation: dict[int, float]
    N_small: int
    small_threshold: float
    t: tuple[int, ...]
    t_1n: int | None
    t_11: int | None
    t_12: int | None
    E_nice: int | None
    E_bad: int | None
    inequality_flags: dict[str, bool] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        d = dict(self.__dict__)
        d["t"] = list(self.t)
        d["boundary_angle_sums"] = {str(k): v for k, v in self.boundary_angle_sums.items()}
        d["angle_sum_deviation"] = {str(k): v for k, v in self.angle_sum_deviation.items()}
        return d


def _check_positions(z: IntegralChain, P: Pseudomanifold) -> None:
    for t in z.terms:
        if t.vertices is None:
            raise ChainError("every term needs vertex positions for the audit")
    for p in P.pairings:
        m = p.vertex_map(z.n)
        va = z.terms[p.simplex_a].vertices
        vb = z.terms[p.simplex_b].vertices
        for u, w in m.items():
            if np.abs(va[u].vector - vb[w].vector).max() > POSITION_ATOL:
                raise ChainError(
                    f"paired faces ({p.simplex_a},{p.face_a}) and ({p.simplex_b},{p.face_b}) "
                    "have incompatible vertex positions")


def audit_geometric_cycle(z: IntegralChain, d: int, vol_M: float, sv_boundary: float,
                          eps_small: float, tol: float = 1e-7) -> CycleAuditReport:
    """Evaluate the volume and combinatorial inequalities on a developed cycle.

    vol_a of simplex i is sign_i times the signed volume of its straight
    simplex.  For each (n-2)-face of ∂P whose incident simplices are all
    positive the angle sum around it is reported with its deviation from pi.
    A simplex is small when vol_a <= (1 - eps_small) v_n.
    """
    n = z.n
    P, _ = chain_to_pseudomanifold(z)
    _check_positions(z, P)
    simplices = [hypgeom.straighten(t.vertices, n) for t in z.terms]
    vols = [t.sign * hypgeom.signed_volume(S, tol) for t, S in zip(z.terms, simplices)]
    total = float(sum(vols))
    vn = v_n(n, min(tol, 1e-7))
    threshold = (1 - eps_small) * vn
    small = sum(v <= threshold for v in vols)
    bs = boundary_structure(P)
    angle_cache: dict[int, dict] = {}
    sums = {}
    dev = {}
    for q, walk in enumerate(bs.walks):
        if not all(vols[i] > 0 for i, _ in walk):
            continue
        s = 0.0
        for i, face in walk:
            if i not in angle_cache:
                angle_cache[i] = hypgeom.dihedral_angles(simplices[i])
            s += angle_cache[i][face]
        sums[q] = s
        dev[q] = s - math.pi
    warnings = []
    flags = {
        "volume_identity": abs(total - d * vol_M) <= max(1e-6, 10 * tol * len(vols)),
        "N_small_bound": small >= d * sv_boundary / (n + 1),
    }
    t = ()
    t1n = t11 = t12 = e_nice = e_bad = None
    if n == 3:
        om = omega_partition(P)
        t = om.counts
        if any(t[2:]):
            warnings.append(f"t_2, t_3, t_4 = {t[2:]} should vanish for an efficient straight cycle")
        t1n = t11 = t12 = 0
        for i in om.members[1]:
            if vols[i] <= 0:
                t1n += 1
                continue
            if i not in angle_cache:
                angle_cache[i] = hypgeom.dihedral_angles(simplices[i])
            cls = hypgeom.obtuseness_from_angles(angle_cache[i], 1e-9)
            if cls == ObtusenessClass.ONE_OBTUSE:
                t11 += 1
            elif cls == ObtusenessClass.TWO_OBTUSE:
                t12 += 1
            elif cls == ObtusenessClass.THREE_OBTUSE:
                warnings.append(f"simplex {i} classified three_obtuse")
        census = nice_bad_edges(P)
        e_nice, e_bad = census.e_nice, census.e_bad
        flags["E_bad_bound"] = 3 * t1n + 2 * t12 + t11 >= e_bad
    else:
        counts = [0] * (n + 2)
        per = [0] * P.simplex_count
        for i, _ in P.boundary_faces():
            per[i] += 1
        for c in per:
            counts[c] += 1
        t = tuple(counts)
    flags["angle_sums_pi"] = all(abs(x) <= 1e-6 for x in dev.values())
    return CycleAuditReport(d, total, d * vol_M, vols, sums, dev, small, threshold, t,
                            t1n, t11, t12, e_nice, e_bad, flags, warnings)


def supplementary_pair_chain(klein: Sequence[Sequence[float]] | None = None,
                             stretch: float = 0.6) -> IntegralChain:
    """Two positive tetrahedra glued along a face, flat along one boundary edge.

    Starting from A = (v0, v1, v2, v3), the point w is placed in the plane of
    v0 v1 v2 on the far side of the line v0 v1, and B = (v0, v1, v3, w) is
    glued to A along (v0, v1, v3).  The faces v0 v1 v2 and v0 v1 w are then
    coplanar, so the dihedral angles of A and B at v0 v1 are supplementary.
    """
    if klein is None:
        klein = [[0.1, -0.2, 0.05], [0.05, 0.3, -0.1], [-0.35, 0.0, 0.1], [0.05, 0.05, 0.4]]
    v = [np.asarray(p, dtype=float) for p in klein]
    if len(v) != 4 or any(p.shape != (3,) for p in v):
        raise ChainError("supplementary_pair_chain needs four Klein points in the 3-ball")
    mid = 0.5 * (v[0] + v[1])
    w = mid + stretch * (mid - v[2])
    if np.dot(w, w) >= 1:
        raise ChainError("reflected vertex leaves the ball; reduce stretch")
    pts = [HPoint.from_klein(p) for p in v]
    if hypgeom.orientation_sign(hypgeom.straighten(pts, 3)) < 0:
        pts[0], pts[1] = pts[1], pts[0]
    b_pts = [pts[0], pts[1], pts[3], HPoint.from_klein(w)]
    if hypgeom.orientation_sign(hypgeom.straighten(b_pts, 3)) <= 0:
        raise ChainError("construction produced a nonpositive second simplex")
    # Face 2 of A is (v0, v1, v3) = face 3 of B; (-1)^2 + (-1)^3 = 0 cancels.
    a = ChainTerm(1, ("a0", "a1", "shared", "a3"), tuple(pts))
    b = ChainTerm(1, ("b0", "b1", "b2", "shared"), tuple(b_pts))
    return IntegralChain(3, (a, b))


def boundary_expansion(z: IntegralChain | RealChain) -> dict[str, float]:
    """Coefficients of the boundary chain, by direct expansion over face keys."""
    out: dict[str, float] = defaultdict(float)
    if isinstance(z, IntegralChain):
        items = [(t.sign, t.face_keys) for t in z.terms]
    else:
        items = [(t.coefficient, t.face_keys) for t in z.terms]
    for c, keys in items:
        for j, k in enumerate(keys):
            out[k] += (-1) ** j * c
    return {k: v for k, v in out.items() if v != 0}


def boundary_l1(z: IntegralChain | RealChain) -> float:
    return float(sum(abs(v) for v in boundary_expansion(z).values()))


def random_chain(rng: np.random.Generator, n: int = 3, terms: int = 10,
                 key_pool: int = 8) -> IntegralChain:
    """Random integral chain whose face keys come from a small pool, so faces cancel."""
    out = []
    for _ in range(terms):
        sign = int(rng.choice([-1, 1]))
        keys = tuple(f"k{int(x)}" for x in rng.integers(0, key_pool, size=n + 1))
        out.append(ChainTerm(sign, keys))
    return IntegralChain(n, tuple(out))


def random_real_cycle(rng: np.random.Generator, size: int = 6) -> RealChain:
    """Random real 1-cycle: a positive combination of triangle loops on ``size`` nodes.

    Each loop a -> b -> c -> a contributes to three edge terms, so the result
    is a cycle by construction with generic real coefficients.
    """
    if size < 3:
        raise ValueError("need at least three nodes")
    edges = [(a, b) for a in range(size) for b in range(a + 1, size)]
    index = {e: k for k, e in enumerate(edges)}
    coeff = np.zeros(len(edges))
    for a, b, c in itertools.combinations(range(size), 3):
        w = rng.uniform(0.1, 1.0)
        # Oriented edges a->b, b->c, c->a; an edge x->y with x > y is -(y->x).
        for x, y in ((a, b), (b, c), (c, a)):
            coeff[index[(min(x, y), max(x, y))]] += w if x < y else -w
    # Face 0 of edge (a, b) is b, face 1 is a, so the boundary is b - a.
    terms = tuple(RealTerm(float(c), (f"v{b}", f"v{a}")) for c, (a, b) in zip(coeff, edges))
    return RealChain(1, terms)
