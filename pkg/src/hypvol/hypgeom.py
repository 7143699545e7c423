"""Geodesic simplices in the hyperboloid and Klein models.

Points live on the hyperboloid <x,x> = -1 (finite) or on the light cone
normalised to x0 = 1 (ideal), with <u,v> = -u0 v0 + sum u_i v_i.  The
Klein image of x is x[1:] / x0; geodesic simplices are Euclidean simplices
there, which is what the volume quadrature exploits.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy import optimize

from . import quadrature
from .specfun import DEFAULT_TOL, lobachevsky, v_n

POINT_ATOL = 1e-9


class GeometryError(ValueError):
    """Malformed points or a simplex unsuitable for the requested operation."""


def minkowski_inner(u: Sequence[float], v: Sequence[float]) -> float:
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape or u.ndim != 1:
        raise GeometryError(f"dimension mismatch: {u.shape} vs {v.shape}")
    return float(-u[0] * v[0] + u[1:] @ v[1:])


@dataclass(frozen=True)
class HPoint:
    """A finite or ideal point of hyperbolic n-space (Minkowski coordinates)."""

    coords: tuple[float, ...]
    kind: str = "finite"

    def __post_init__(self):
        x = np.asarray(self.coords, dtype=float)
        if x.ndim != 1 or len(x) < 2 or not np.all(np.isfinite(x)):
            raise GeometryError(f"malformed point coordinates {self.coords!r}")
        if self.kind not in ("finite", "ideal"):
            raise GeometryError(f"unknown point kind {self.kind!r}")
        q = minkowski_inner(x, x)
        if x[0] <= 0:
            raise GeometryError(f"point {self.coords!r} is not future-pointing")
        if self.kind == "finite" and abs(q + 1) > POINT_ATOL * max(1.0, x[0] ** 2):
            raise GeometryError(f"finite point off the hyperboloid: <x,x> = {q!r}")
        if self.kind == "ideal":
            if abs(x[0] - 1) > POINT_ATOL or abs(q) > POINT_ATOL:
                raise GeometryError(f"ideal point must be null with x0 = 1: {self.coords!r}")

    @property
    def dim(self) -> int:
        return len(self.coords) - 1

    @property
    def vector(self) -> np.ndarray:
        return np.asarray(self.coords, dtype=float)

    @property
    def klein(self) -> np.ndarray:
        x = self.vector
        return x[1:] / x[0]

    @classmethod
    def from_klein(cls, k: Sequence[float]) -> "HPoint":
        """Finite point with Klein image ``k`` (|k| < 1)."""
        k = np.asarray(k, dtype=float)
        r2 = float(k @ k)
        if r2 >= 1:
            raise GeometryError(f"Klein point {k!r} is not inside the unit ball")
        x0 = 1.0 / math.sqrt(1.0 - r2)
        return cls(tuple([x0, *(x0 * k)]), "finite")

    @classmethod
    def ideal(cls, direction: Sequence[float]) -> "HPoint":
        """Ideal point in the direction ``direction`` (normalised here)."""
        u = np.asarray(direction, dtype=float)
        norm = np.linalg.norm(u)
        if norm == 0:
            raise GeometryError("ideal point needs a nonzero direction")
        return cls(tuple([1.0, *(u / norm)]), "ideal")

    @classmethod
    def from_vector(cls, x: Sequence[float], atol: float = 1e-9) -> "HPoint":
        """Classify and normalise a future-pointing timelike or null vector."""
        x = np.asarray(x, dtype=float)
        q = minkowski_inner(x, x)
        if x[0] <= 0:
            raise GeometryError(f"vector {x!r} is not future-pointing")
        if abs(q) <= atol * x[0] ** 2:
            return cls.ideal(x[1:])
        if q > 0:
            raise GeometryError(f"vector {x!r} is spacelike")
        y = x / math.sqrt(-q)
        return cls(tuple(y), "finite")

    def distance(self, other: "HPoint") -> float:
        if self.kind == "ideal" or other.kind == "ideal":
            return math.inf
        return math.acosh(max(1.0, -minkowski_inner(self.coords, other.coords)))


@dataclass(frozen=True)
class GeodesicSimplex:
    """Geodesic simplex spanned by an ordered tuple of points in H^n."""

    vertices: tuple[HPoint, ...]
    n: int
    degenerate: bool = field(default=False, compare=False)

    @property
    def k(self) -> int:
        return len(self.vertices) - 1

    @property
    def minkowski(self) -> np.ndarray:
        return np.array([v.vector for v in self.vertices])

    @property
    def klein(self) -> np.ndarray:
        return np.array([v.klein for v in self.vertices])

    @property
    def is_ideal(self) -> bool:
        return all(v.kind == "ideal" for v in self.vertices)

    @property
    def has_ideal_vertex(self) -> bool:
        return any(v.kind == "ideal" for v in self.vertices)


def _is_degenerate(klein: np.ndarray) -> bool:
    edges = klein[1:] - klein[0]
    if edges.size == 0:
        return False
    sv = np.linalg.svd(edges, compute_uv=False)
    if sv[0] == 0:
        return True
    return sv[-1] <= 1e-10 * sv[0] or len(sv) < edges.shape[0]


def straighten(vertex_images: Iterable[HPoint], n: int | None = None) -> GeodesicSimplex:
    """The geodesic simplex spanned by ``vertex_images`` (vertex-determined)."""
    verts = tuple(vertex_images)
    if not verts or not all(isinstance(v, HPoint) for v in verts):
        raise GeometryError("straighten needs a nonempty list of HPoint")
    dim = verts[0].dim
    if any(v.dim != dim for v in verts):
        raise GeometryError("vertices live in different dimensions")
    if n is None:
        n = dim
    if n != dim:
        raise GeometryError(f"points have dimension {dim}, expected {n}")
    k = len(verts) - 1
    if not 1 <= k <= n:
        raise GeometryError(f"need between 2 and {n + 1} vertices, got {k + 1}")
    klein = np.array([v.klein for v in verts])
    return GeodesicSimplex(verts, n, _is_degenerate(klein))


def orientation_sign(S: GeodesicSimplex) -> int:
    """Sign of det of the Minkowski vertex matrix (0 when degenerate)."""
    if S.degenerate or S.k != S.n:
        return 0
    return int(np.sign(np.linalg.det(S.minkowski)))


def _require_full(S: GeodesicSimplex) -> None:
    if S.k != S.n:
        raise GeometryError(f"need an {S.n}-simplex in dimension {S.n}, got a {S.k}-simplex")


def signed_volume(S: GeodesicSimplex, tol: float = DEFAULT_TOL, scheme: str = "gauss") -> float:
    """Signed hyperbolic volume of an n-simplex in H^n.

    The sign is the orientation sign of the Minkowski vertex matrix; the
    magnitude comes from integrating the Klein density (see
    :mod:`hypvol.quadrature`).  ``scheme`` selects "gauss" or "midpoint".
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    _require_full(S)
    sign = orientation_sign(S)
    if sign == 0:
        return 0.0
    if scheme == "gauss":
        value, _ = quadrature.integrate_gauss(S.klein, tol)
    elif scheme == "midpoint":
        value, _ = quadrature.integrate_midpoint(S.klein, tol)
    else:
        raise ValueError(f"unknown quadrature scheme {scheme!r}")
    return float(sign * value)


def facet_normals(S: GeodesicSimplex) -> np.ndarray:
    """Outward unit spacelike normals; row i is normal to the facet opposite vertex i."""
    _require_full(S)
    if S.degenerate:
        raise GeometryError("facet normals of a degenerate simplex are undefined")
    V = S.minkowski
    J = np.diag([-1.0] + [1.0] * S.n)
    # <v_j, n_i> = -delta_ij: the opposite vertex lies on the inner side.
    N = -np.linalg.solve(V @ J, np.eye(S.n + 1)).T
    norms = np.einsum("ij,jk,ik->i", N, J, N)
    if np.any(norms <= 0):
        raise GeometryError("facet normal is not spacelike")
    return N / np.sqrt(norms)[:, None]


def dihedral_angles(S: GeodesicSimplex) -> dict[tuple[int, ...], float]:
    """Dihedral angles keyed by the sorted vertex tuple of each (n-2)-face."""
    N = facet_normals(S)
    J = np.diag([-1.0] + [1.0] * S.n)
    gram = N @ J @ N.T
    out = {}
    verts = range(S.n + 1)
    for i, j in itertools.combinations(verts, 2):
        face = tuple(v for v in verts if v not in (i, j))
        out[face] = math.acos(max(-1.0, min(1.0, -gram[i, j])))
    return out


def dihedral_angle(S: GeodesicSimplex, face: Sequence[int]) -> float:
    """Dihedral angle at the (n-2)-face with vertex indices ``face``."""
    face = tuple(sorted(face))
    angles = dihedral_angles(S)
    if face in angles:
        return angles[face]
    raise GeometryError(f"{face!r} is not an (n-2)-face of the simplex")


def ideal_tetra_volume(alpha: float, beta: float, gamma: float, tol: float = DEFAULT_TOL) -> float:
    """Volume L(alpha) + L(beta) + L(gamma) of an ideal tetrahedron."""
    if min(alpha, beta, gamma) < -1e-12:
        raise GeometryError("ideal tetrahedron angles must be nonnegative")
    if abs(alpha + beta + gamma - math.pi) > 1e-9:
        raise GeometryError(f"ideal tetrahedron angles must sum to pi, got {alpha + beta + gamma!r}")
    t = tol / 3
    return lobachevsky(alpha, t) + lobachevsky(beta, t) + lobachevsky(gamma, t)


def ideal_tetra_angles(S: GeodesicSimplex) -> tuple[float, float, float]:
    """Dihedral angles at the edges 01, 02, 03 of a nondegenerate ideal tetrahedron."""
    if S.n != 3 or S.k != 3:
        raise GeometryError("ideal_tetra_angles needs a 3-simplex in H^3")
    if not S.is_ideal:
        raise GeometryError("ideal_tetra_angles needs all vertices ideal")
    if S.degenerate:
        raise GeometryError("degenerate ideal tetrahedron")
    ang = dihedral_angles(S)
    return ang[(0, 1)], ang[(0, 2)], ang[(0, 3)]


class ObtusenessClass(str, enum.Enum):
    NO_NONACUTE = "no_nonacute"
    ONE_OBTUSE = "one_obtuse"
    TWO_OBTUSE = "two_obtuse"
    THREE_OBTUSE = "three_obtuse"


def obtuseness_from_angles(angles: dict[tuple[int, ...], float], atol: float = 0.0) -> ObtusenessClass:
    """Strongest obtuseness class from the six edge angles of a tetrahedron."""
    nonacute = {e for e, a in angles.items() if a >= math.pi / 2 - atol}
    for tri in itertools.combinations(range(4), 3):
        if all(e in nonacute for e in itertools.combinations(tri, 2)):
            return ObtusenessClass.THREE_OBTUSE
    for e, f in itertools.combinations(sorted(nonacute), 2):
        if set(e) & set(f):
            return ObtusenessClass.TWO_OBTUSE
    return ObtusenessClass.ONE_OBTUSE if nonacute else ObtusenessClass.NO_NONACUTE


def classify_obtuseness(S: GeodesicSimplex, atol: float = 0.0) -> ObtusenessClass:
    """Obtuseness class of a compact nondegenerate tetrahedron."""
    if S.n != 3 or S.k != 3:
        raise GeometryError("obtuseness is defined for 3-simplices in H^3")
    if S.has_ideal_vertex:
        raise GeometryError("obtuseness classes are defined for simplices with finite vertices")
    if S.degenerate:
        raise GeometryError("degenerate simplex")
    return obtuseness_from_angles(dihedral_angles(S), atol)


@dataclass(frozen=True)
class MaximalAngleCheck:
    holds: bool
    vacuous: bool
    volume: float
    threshold: float
    pi_over_angle: tuple[float, ...]


def near_maximal_angle_check(S: GeodesicSimplex, eps: float, tol: float = 1e-6) -> MaximalAngleCheck:
    """If vol(S) >= (1-eps) v_n, test 2 < pi/alpha < 3 at every (n-2)-face."""
    if S.n < 4:
        raise GeometryError("the near-maximal angle check applies in dimension n >= 4")
    if not eps > 0:
        raise ValueError("eps must be positive")
    vol = abs(signed_volume(S, tol))
    threshold = (1 - eps) * v_n(S.n, tol)
    ratios = tuple(math.pi / a for a in dihedral_angles(S).values()) if not S.degenerate else ()
    if vol < threshold:
        return MaximalAngleCheck(True, True, vol, threshold, ratios)
    return MaximalAngleCheck(all(2 < r < 3 for r in ratios), False, vol, threshold, ratios)


def one_obtuse_ideal_maximizer(grid: int = 200, alpha: float | None = None,
                               tol: float = 1e-12) -> tuple[tuple[float, float, float], float]:
    """Maximise L(a)+L(b)+L(c) over a >= pi/2, b + c = pi - a, b, c >= 0.

    A grid search seeds a bounded quasi-Newton refinement.  Passing
    ``alpha`` restricts the search to that slice.
    """
    if grid < 100:
        raise ValueError("grid must be at least 100")
    half = math.pi / 2

    def angles(a, t):
        b = t * (math.pi - a)
        return a, b, math.pi - a - b

    def neg(a, t):
        x, y, z = angles(a, t)
        return -(lobachevsky(x, tol) + lobachevsky(y, tol) + lobachevsky(z, tol))

    ts = np.linspace(0.0, 1.0, grid + 1)
    if alpha is not None:
        if not half <= alpha <= math.pi:
            raise ValueError("alpha must lie in [pi/2, pi]")
        t0 = ts[int(np.argmin([neg(alpha, t) for t in ts]))]
        res = optimize.minimize_scalar(lambda t: neg(alpha, t), bounds=(max(0, t0 - 1 / grid), min(1, t0 + 1 / grid)),
                                       method="bounded", options={"xatol": 1e-12})
        return angles(alpha, float(res.x)), float(-res.fun)
    As = np.linspace(half, math.pi, grid + 1)
    vals = np.array([[neg(a, t) for t in ts] for a in As])
    i, j = np.unravel_index(int(np.argmin(vals)), vals.shape)
    res = optimize.minimize(lambda p: neg(p[0], p[1]), x0=[As[i], ts[j]], method="L-BFGS-B",
                            bounds=[(half, math.pi), (0.0, 1.0)],
                            options={"ftol": 1e-15, "gtol": 1e-10})
    a, t = res.x
    return angles(float(a), float(t)), float(-res.fun)


def regular_simplex_directions(n: int) -> np.ndarray:
    """Unit vectors of a regular Euclidean n-simplex inscribed in S^(n-1)."""
    E = np.eye(n + 1) - 1.0 / (n + 1)
    q, _ = np.linalg.qr(E.T)
    P = E @ q[:, :n]
    return P / np.linalg.norm(P, axis=1)[:, None]


def regular_ideal_simplex(n: int) -> GeodesicSimplex:
    """Regular ideal n-simplex with Klein vertices on a regular inscribed simplex."""
    if n < 2:
        raise ValueError("regular_ideal_simplex needs n >= 2")
    S = straighten([HPoint.ideal(u) for u in regular_simplex_directions(n)], n)
    return S if orientation_sign(S) > 0 else straighten(S.vertices[1:2] + S.vertices[:1] + S.vertices[2:], n)


def regular_compact_simplex(n: int, radius: float) -> GeodesicSimplex:
    """Regular simplex with vertices at hyperbolic distance ``radius`` from the origin."""
    r = math.tanh(radius)
    S = straighten([HPoint.from_klein(r * u) for u in regular_simplex_directions(n)], n)
    return S if orientation_sign(S) > 0 else straighten(S.vertices[1:2] + S.vertices[:1] + S.vertices[2:], n)


# --------------------------------------------------------------------------
# Sampling and isometries

def sample_ball_point(rng: np.random.Generator, n: int = 3, radius: float = 3.0) -> HPoint:
    """Point uniform w.r.t. hyperbolic volume in the ball of the given radius.

    Rejection sampling: uniform proposals in the Klein ball of radius
    tanh(radius), accepted with probability density / max density.
    """
    rk = math.tanh(radius)
    dmax = math.cosh(radius) ** (n + 1)
    while True:
        x = rng.uniform(-rk, rk, size=n)
        r2 = float(x @ x)
        if r2 >= rk * rk:
            continue
        if rng.uniform() * dmax <= (1 - r2) ** (-(n + 1) / 2):
            return HPoint.from_klein(x)


def random_compact_simplex(rng: np.random.Generator, n: int = 3, radius: float = 3.0) -> GeodesicSimplex:
    while True:
        S = straighten([sample_ball_point(rng, n, radius) for _ in range(n + 1)], n)
        if not S.degenerate:
            return S


def random_ideal_simplex(rng: np.random.Generator, n: int = 3) -> GeodesicSimplex:
    """Ideal simplex with vertices uniform on the sphere at infinity."""
    while True:
        S = straighten([HPoint.ideal(rng.standard_normal(n)) for _ in range(n + 1)], n)
        if not S.degenerate:
            return S


def boost(n: int, axis: np.ndarray, rapidity: float) -> np.ndarray:
    """Lorentz boost of R^{1,n} along the unit vector ``axis``."""
    u = np.asarray(axis, dtype=float)
    u = u / np.linalg.norm(u)
    L = np.eye(n + 1)
    ch, sh = math.cosh(rapidity), math.sinh(rapidity)
    L[0, 0] = ch
    L[0, 1:] = sh * u
    L[1:, 0] = sh * u
    L[1:, 1:] += (ch - 1) * np.outer(u, u)
    return L


def random_lorentz(rng: np.random.Generator, n: int = 3, max_rapidity: float = 1.0) -> np.ndarray:
    """Random orthochronous Lorentz matrix with determinant +1."""
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    R = np.eye(n + 1)
    R[1:, 1:] = q
    return boost(n, rng.standard_normal(n), rng.uniform(0, max_rapidity)) @ R


def apply_lorentz(S: GeodesicSimplex, L: np.ndarray) -> GeodesicSimplex:
    pts = []
    for v in S.vertices:
        y = L @ v.vector
        pts.append(HPoint.ideal(y[1:] / y[0]) if v.kind == "ideal" else HPoint.from_vector(y, atol=0.0))
    return straighten(pts, S.n)


def simplex_from_json(obj: dict) -> GeodesicSimplex:
    """Build a simplex from ``{"n", "vertices", "kinds"}``."""
    try:
        n = int(obj["n"])
        verts = obj["vertices"]
        kinds = obj.get("kinds") or ["finite"] * len(verts)
    except (KeyError, TypeError) as exc:
        raise GeometryError(f"malformed simplex JSON: {exc}") from exc
    if len(kinds) != len(verts):
        raise GeometryError("kinds and vertices differ in length")
    return straighten([HPoint(tuple(float(c) for c in v), k) for v, k in zip(verts, kinds)], n)
