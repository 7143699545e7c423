"""Simplicial-volume lower bounds and the truncated-tetrahedron census."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from scipy import integrate

from .specfun import DEFAULT_TOL, catalan, lobachevsky, v_n


class BoundsError(ValueError):
    pass


@dataclass(frozen=True)
class ManifoldData:
    n: int
    vol: float
    vol_boundary: float | None = None
    sv_boundary: float | None = None
    genus: int | None = None

    def __post_init__(self):
        if not self.vol > 0:
            raise BoundsError(f"volume must be positive, got {self.vol!r}")
        if self.n < 2:
            raise BoundsError(f"dimension must be at least 2, got {self.n}")
        if self.vol_boundary is not None and self.vol_boundary < 0:
            raise BoundsError("boundary volume must be nonnegative")
        if self.sv_boundary is not None and self.sv_boundary < 0:
            raise BoundsError("boundary simplicial volume must be nonnegative")

    @classmethod
    def from_genus(cls, g: int, vol: float) -> "ManifoldData":
        """3-manifold with connected boundary of genus g, so ||dM|| = 4(g - 1)."""
        if g < 2:
            raise BoundsError(f"hyperbolic boundary needs genus >= 2, got {g}")
        return cls(3, vol, sv_boundary=surface_simplicial_volume(2 - 2 * g), genus=g)


def surface_simplicial_volume(chi: int) -> float:
    return float(max(0, -2 * chi))


def jungreis_bound(m: ManifoldData, tol: float = DEFAULT_TOL) -> float:
    """vol / v_n; the true simplicial volume is strictly larger."""
    if m.n < 3:
        raise BoundsError(f"the volume ratio bound needs n >= 3, got {m.n}")
    return m.vol / v_n(m.n, tol)


def thmA_bound(m: ManifoldData, eps_n: float, tol: float = DEFAULT_TOL) -> float:
    """vol * (1/v_n + eps_n vol(dM) / ((n+1) v_{n-1} vol)), conditional on eps_n."""
    if m.n < 4:
        raise BoundsError(f"the boundary-corrected volume bound needs n >= 4, got {m.n}")
    if not 0 < eps_n < 1:
        raise BoundsError(f"eps_n must lie in (0, 1), got {eps_n!r}")
    vb = m.vol_boundary
    if vb is None:
        raise BoundsError("boundary volume required")
    return m.vol / v_n(m.n, tol) + eps_n * vb / ((m.n + 1) * v_n(m.n - 1, tol))


def thmB_slope(tol: float = DEFAULT_TOL) -> float:
    """Coefficient (v3 - G) / (2 (3 v3 - 2 G)) of the boundary correction."""
    v3 = v_n(3, tol)
    G = catalan(tol)
    return (v3 - G) / (2 * (3 * v3 - 2 * G))


def thmB_bound(m: ManifoldData, tol: float = DEFAULT_TOL) -> float:
    """max(vol/v3, vol/v3 + c (7 ||dM|| - 4 vol/v3)) for 3-manifolds."""
    if m.n != 3:
        raise BoundsError(f"the 3-dimensional boundary bound needs n = 3, got {m.n}")
    if m.sv_boundary is None:
        raise BoundsError("boundary simplicial volume required")
    ratio = m.vol / v_n(3, tol)
    if 1.75 * m.sv_boundary <= ratio:
        return ratio
    return ratio + thmB_slope(tol) * (7 * m.sv_boundary - 4 * ratio)


def bfp_bound(m: ManifoldData) -> float:
    if m.sv_boundary is None:
        raise BoundsError("boundary simplicial volume required")
    return 1.25 * m.sv_boundary


@dataclass(frozen=True)
class BoundReport:
    """Lower bounds for ||M, dM||; ``strict`` marks bounds known to be strict."""

    jungreis: float
    thmA: float | None
    thmB: float | None
    bfp: float | None
    best: tuple[str, float]
    strict: dict[str, bool] = field(default_factory=dict)
    conditional: tuple[str, ...] = ()

    def entries(self) -> dict[str, float]:
        out = {"jungreis": self.jungreis}
        for k in ("thmA", "thmB", "bfp"):
            v = getattr(self, k)
            if v is not None:
                out[k] = v
        return out

    def to_json(self) -> dict:
        return {"jungreis": self.jungreis, "thmA": self.thmA, "thmB": self.thmB,
                "bfp": self.bfp, "best": {"name": self.best[0], "value": self.best[1]},
                "strict": dict(self.strict), "conditional": list(self.conditional)}


def bound_report(m: ManifoldData, eps_n: float | None = None,
                 tol: float = DEFAULT_TOL) -> BoundReport:
    """All bounds that apply to ``m``.

    The n >= 4 boundary correction depends on a constant with no known value;
    it is evaluated only when ``eps_n`` is supplied and is then marked
    conditional.
    """
    jung = jungreis_bound(m, tol)
    thmA = thmB = bfp = None
    conditional = ()
    if m.n >= 4 and eps_n is not None and m.vol_boundary is not None:
        thmA = thmA_bound(m, eps_n, tol)
        conditional = ("thmA",)
    if m.n == 3 and m.sv_boundary is not None:
        thmB = thmB_bound(m, tol)
    if m.sv_boundary is not None and m.n == 3:
        bfp = bfp_bound(m)
    cand = {"jungreis": jung, "thmA": thmA, "thmB": thmB, "bfp": bfp}
    # Ties go to the first name in this order.
    name = max((k for k, v in cand.items() if v is not None), key=lambda k: cand[k])
    strict = {"jungreis": True, "thmA": False, "thmB": False, "bfp": False}
    strict = {k: v for k, v in strict.items() if cand[k] is not None}
    return BoundReport(jung, thmA, thmB, bfp, (name, cand[name]), strict, conditional)


# --------------------------------------------------------------------------
# Truncated tetrahedra

def _truncation_integrand(t: float) -> float:
    # arccosh(cos t / (2 cos t - 1)) = arccosh(1 + x), x = 2 sin^2(t/2) / (2 cos t - 1);
    # the log1p form keeps full relative accuracy as t -> 0.
    x = 2 * math.sin(t / 2) ** 2 / (2 * math.cos(t) - 1)
    return math.log1p(x + math.sqrt(x * (x + 2)))


def truncated_volume(g: int, tol: float = DEFAULT_TOL) -> float:
    """Volume of the regular truncated tetrahedron with dihedral angles pi/(3g)."""
    if int(g) != g or g < 2:
        raise BoundsError(f"truncated_volume needs an integer g >= 2, got {g!r}")
    if not tol > 0:
        raise ValueError("tolerance must be positive")
    G = catalan(tol / 8)
    four_g = 8 * lobachevsky(math.pi / 4, tol / 8)
    if abs(four_g - 4 * G) > tol:
        raise ArithmeticError(f"8 L(pi/4) = {four_g!r} disagrees with 4G = {4 * G!r}")
    integral, err = integrate.quad(_truncation_integrand, 0.0, math.pi / (3 * g),
                                   epsabs=tol / 8, epsrel=0.0, limit=200)
    if err > tol / 4:
        raise ArithmeticError(f"truncation integral error estimate {err!r} exceeds tolerance")
    return four_g - 3 * integral


@dataclass(frozen=True)
class CensusRow:
    g: int
    vol_delta_g: float
    data: ManifoldData
    report: BoundReport
    inequalities: dict[str, bool]

    @property
    def best(self) -> str:
        return self.report.best[0]


def census(g: int, tol: float = DEFAULT_TOL) -> CensusRow:
    """Bounds for manifolds built from g truncated tetrahedra with genus-g boundary.

    For g >= 5 also evaluates the two comparisons showing that 5/4 ||dM||
    beats the 3-dimensional boundary bound, and vol(Delta_g) < 4G.
    """
    if int(g) != g or g < 2:
        raise BoundsError(f"census needs an integer g >= 2, got {g!r}")
    vd = truncated_volume(g, tol)
    data = ManifoldData.from_genus(g, g * vd)
    report = bound_report(data, tol=tol)
    ineq = {}
    if g >= 5:
        v3 = v_n(3, tol)
        G = catalan(tol)
        ineq = {
            "catalan_sum_exceeds": bool((1 - 1 / g) * (v3 + 4 * G) > vd),
            "seven_v3_exceeds": bool(7 * (1 - 1 / g) * v3 > vd),
            "below_4G": bool(vd < 4 * G),
        }
    return CensusRow(int(g), vd, data, report, ineq)


CENSUS_COLUMNS = ("g", "vol_delta_g", "vol", "sv_boundary", "jungreis", "thmB", "bfp", "best")


def census_table(g_min: int, g_max: int, tol: float = DEFAULT_TOL) -> list[CensusRow]:
    if g_min < 2 or g_max < g_min:
        raise BoundsError(f"bad genus range [{g_min}, {g_max}]")
    return [census(g, tol) for g in range(g_min, g_max + 1)]


def switchover_genus(rows: list[CensusRow]) -> int | None:
    """Smallest g from which the best bound is bfp for every later row."""
    out = None
    for row in reversed(rows):
        if row.best != "bfp":
            break
        out = row.g
    return out
