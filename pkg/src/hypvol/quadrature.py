"""Integration of the hyperbolic volume density over Klein-model simplices.

In the Klein model a geodesic simplex is a Euclidean simplex in the unit
ball and the volume element is (1 - |x|^2)^(-(n+1)/2) dx.  The density
blows up at ideal vertices (points of the unit sphere), but the integral
stays finite.

Two unrelated schemes are provided:

``gauss``
    The simplex is cut by barycentric subdivision into (n+1)! cells, each
    touching at most one vertex of the original simplex.  Every cell is
    integrated by a collapsed (Duffy) tensor Gauss-Legendre rule with the
    collapse point at that vertex and radial variable r = s^2.  For an
    ideal apex 1 - |x|^2 = r * g(r, p) with g bounded away from zero, so the
    transformed integrand is analytic.  Near-boundary finite apexes get a
    geometrically graded radial partition.  Cells whose low/high order
    estimates disagree are split by Freudenthal refinement.

``midpoint``
    Globally adaptive Freudenthal refinement with the centroid rule and
    one step of Richardson extrapolation.  Cells are refined worst-first
    until the summed error estimate drops below the tolerance.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache

import numpy as np


class QuadratureError(ArithmeticError):
    """Raised when a volume integral fails to reach the requested tolerance."""


def density(points: np.ndarray, n: int) -> np.ndarray:
    """Klein-model volume density at ``points`` (shape (..., n))."""
    w = 1.0 - np.einsum("...i,...i->...", points, points)
    return np.maximum(w, 1e-300) ** (-(n + 1) / 2)


def euclidean_volume(cells: np.ndarray) -> np.ndarray:
    """Unsigned Euclidean volumes of simplices with shape (m, n+1, n)."""
    n = cells.shape[-1]
    edges = cells[:, 1:, :] - cells[:, :1, :]
    return np.abs(np.linalg.det(edges)) / math.factorial(n)


# --------------------------------------------------------------------------
# Freudenthal refinement

@lru_cache(maxsize=None)
def freudenthal_children(n: int) -> np.ndarray:
    """Barycentric coordinates of the 2^n Freudenthal children.

    Returns an array B of shape (2^n, n+1, n+1) so that the vertices of the
    children of a simplex with vertex matrix X are ``B @ X``.  The vertex
    order of every child is again a Kuhn path, so refinement can be applied
    recursively.
    """
    # Kuhn simplex K = {1 >= y_1 >= ... >= y_n >= 0}, vertex k has k leading ones.
    def bary(y):
        lam = np.empty(n + 1)
        lam[0] = 1.0 - y[0]
        for k in range(1, n):
            lam[k] = y[k - 1] - y[k]
        lam[n] = y[n - 1]
        return lam

    children = []
    for offset in itertools.product((0.0, 0.5), repeat=n):
        o = np.array(offset)
        for perm in itertools.permutations(range(n)):
            verts = [o.copy()]
            cur = o.copy()
            for axis in perm:
                cur = cur.copy()
                cur[axis] += 0.5
                verts.append(cur)
            c = np.mean(verts, axis=0)
            if all(c[i] > c[i + 1] for i in range(n - 1)) and c[0] < 1 and c[-1] > 0:
                children.append([bary(v) for v in verts])
    out = np.array(children)
    assert out.shape == (2**n, n + 1, n + 1)
    return out


def refine(cells: np.ndarray) -> np.ndarray:
    """Freudenthal-refine every cell; shape (m, n+1, n) -> (m 2^n, n+1, n)."""
    n = cells.shape[-1]
    b = freudenthal_children(n)
    kids = np.einsum("cij,mjk->mcik", b, cells)
    return kids.reshape(-1, n + 1, n)


# --------------------------------------------------------------------------
# Barycentric subdivision

def barycentric_cells(vertices: np.ndarray) -> np.ndarray:
    """Barycentric subdivision into (n+1)! cells.

    Cell vertex 0 is an original vertex; the remaining vertices are
    barycentres of growing faces, so every cell meets the original vertex set
    in exactly its vertex 0.
    """
    n1 = vertices.shape[0]
    cells = []
    for perm in itertools.permutations(range(n1)):
        cells.append([vertices[list(perm[: k + 1])].mean(axis=0) for k in range(n1)])
    return np.array(cells)


# --------------------------------------------------------------------------
# Collapsed Gauss rule

@lru_cache(maxsize=None)
@lru_cache(maxsize=64)
def _simplex_rule(dim: int, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Collapsed Gauss rule on the standard simplex {u_i >= 0, sum u_i <= 1}.

    Returns barycentric weights (points, dim+1) and weights summing to 1/dim!.
    """
    if dim == 0:
        return np.ones((1, 1)), np.ones(1)
    x, w = np.polynomial.legendre.leggauss(order)
    x = 0.5 * (x + 1.0)
    w = 0.5 * w
    pts = []
    wts = []
    for idx in itertools.product(range(order), repeat=dim):
        # Duffy map from the unit cube to the simplex.
        t = [x[i] for i in idx]
        weight = 1.0
        for i in idx:
            weight *= w[i]
        lam = np.zeros(dim + 1)
        remaining = 1.0
        for d in range(dim):
            lam[d + 1] = remaining * t[d]
            weight *= remaining
            remaining *= 1.0 - t[d]
        lam[0] = remaining
        pts.append(lam)
        wts.append(weight)
    return np.array(pts), np.array(wts)


def _radial_breaks(delta: float) -> list[float]:
    """Breakpoints in s = sqrt(r) graded toward the scale sqrt(delta)."""
    if delta >= 0.25:
        return [0.0, 1.0]
    s_min = 0.2 * math.sqrt(delta)
    br = [1.0]
    while br[-1] > s_min:
        br.append(br[-1] * 0.25)
    br.append(0.0)
    return sorted(br)


# Largest number of integrand values held in memory at once.
_CHUNK_POINTS = 2_000_000


def _collapsed_estimate(cells: np.ndarray, order: int, breaks: list[float]) -> np.ndarray:
    """Integrate the density over each cell with a rule collapsed at vertex 0."""
    m, n1, n = cells.shape
    per_cell = order ** n
    step = max(1, _CHUNK_POINTS // per_cell)
    if m > step:
        return np.concatenate([_collapsed_estimate(cells[i:i + step], order, breaks)
                               for i in range(0, m, step)])
    apex = cells[:, 0, :]
    face = cells[:, 1:, :]
    lam, wf = _simplex_rule(n - 1, order)
    # Points on the opposite face: shape (m, q, n).
    p = np.einsum("qj,mjk->mqk", lam, face)
    d = p - apex[:, None, :]
    gx, gw = np.polynomial.legendre.leggauss(order)
    total = np.zeros(m)
    for lo, hi in zip(breaks[:-1], breaks[1:]):
        s = lo + (hi - lo) * 0.5 * (gx + 1.0)
        ws = (hi - lo) * 0.5 * gw
        r = s * s
        # 1 - |a + r d|^2 = delta_a - r (2 a.d + r |d|^2)
        a2 = np.einsum("mk,mk->m", apex, apex)
        ad = np.einsum("mk,mqk->mq", apex, d)
        dd = np.einsum("mqk,mqk->mq", d, d)
        one_minus = (1.0 - a2)[:, None, None] - r[None, None, :] * (
            2.0 * ad[:, :, None] + r[None, None, :] * dd[:, :, None])
        ideal = (1.0 - a2) <= 1e-12
        # For an ideal apex divide out the factor r analytically.
        g = np.where(ideal[:, None, None],
                     -(2.0 * ad[:, :, None] + r[None, None, :] * dd[:, :, None]),
                     one_minus / np.maximum(r[None, None, :], 1e-300))
        g = np.maximum(g, 1e-300)
        # r^(n-1) dr = 2 s^(2n-1) ds, density r^(-(n+1)/2) g^(-(n+1)/2)
        integrand = 2.0 * s[None, None, :] ** (n - 2) * g ** (-(n + 1) / 2)
        total += np.einsum("mqs,q,s->m", integrand, wf, ws)
    # Jacobian of the affine map from the standard simplex: n! * volume.
    vol = euclidean_volume(cells) * math.factorial(n)
    return total * vol


def _gauss_estimates(cells, order):
    """Low and high order estimates for a batch of cells, grouped by grading."""
    m = cells.shape[0]
    lo = np.empty(m)
    hi = np.empty(m)
    delta = 1.0 - np.einsum("mk,mk->m", cells[:, 0, :], cells[:, 0, :])
    delta = np.where(delta <= 1e-12, 1.0, delta)  # ideal apex needs no grading
    keys = [tuple(_radial_breaks(float(dl))) for dl in delta]
    for key in sorted(set(keys)):
        idx = np.array([i for i, k in enumerate(keys) if k == key])
        lo[idx] = _collapsed_estimate(cells[idx], order, list(key))
        hi[idx] = _collapsed_estimate(cells[idx], order + 4, list(key))
    return lo, hi


def _orient_apex(cells: np.ndarray) -> np.ndarray:
    """Move the vertex closest to the sphere (smallest 1-|x|^2) to slot 0."""
    w = 1.0 - np.einsum("mjk,mjk->mj", cells, cells)
    j = np.argmin(w, axis=1)
    out = cells.copy()
    rows = np.arange(cells.shape[0])
    out[rows, 0, :] = cells[rows, j, :]
    out[rows, j, :] = cells[rows, 0, :]
    return out


def integrate_gauss(vertices: np.ndarray, tol: float, order: int = 6,
                    max_order: int = 18, max_cells: int = 200_000,
                    max_points: int = 300_000_000) -> tuple[float, float]:
    """Hyperbolic volume of the Klein simplex ``vertices`` (shape (n+1, n)).

    Cells first have their rule order raised up to ``max_order``; cells that
    still fail are refined and restart at ``order``.  Returns
    (value, error_estimate).  Raises QuadratureError once more than
    ``max_cells`` cells or ``max_points`` integrand evaluations are needed.
    """
    n = vertices.shape[1]
    active = _orient_apex(barycentric_cells(vertices))
    orders = np.full(active.shape[0], order)
    done = 0.0
    done_err = 0.0
    n_cells = active.shape[0]
    points = 0
    while True:
        points += int(sum(o ** n + (o + 4) ** n for o in orders.tolist()))
        if points > max_points:
            raise QuadratureError(
                f"gauss quadrature exceeded its work budget before reaching tol {tol:.3g}")
        lo = np.empty(len(orders))
        hi = np.empty(len(orders))
        for o in sorted(set(orders.tolist())):
            idx = np.flatnonzero(orders == o)
            lo[idx], hi[idx] = _gauss_estimates(active[idx], o)
        err = np.abs(hi - lo)
        total_err = done_err + err.sum()
        if total_err <= tol:
            return done + float(hi.sum()), float(total_err)
        # Accept the cells whose error is already negligible for their share.
        share = (tol - done_err) / len(err)
        good = err <= 0.5 * share
        done += float(hi[good].sum())
        done_err += float(err[good].sum())
        bad = ~good
        raise_order = bad & (orders + 4 < max_order)
        split = bad & ~raise_order
        n_cells += int(split.sum()) * (2**n - 1)
        if n_cells > max_cells:
            raise QuadratureError(
                f"gauss quadrature did not converge: error {total_err:.3g} > tol {tol:.3g}")
        # Refinement keeps the near-boundary vertex in exactly one child.
        kids = _orient_apex(refine(active[split])) if split.any() else active[:0]
        active = np.concatenate([active[raise_order], kids])
        orders = np.concatenate([orders[raise_order] + 4, np.full(kids.shape[0], order)])


def integrate_midpoint(vertices: np.ndarray, tol: float,
                       max_cells: int = 2_000_000) -> tuple[float, float]:
    """Hyperbolic volume by adaptive centroid rule with Richardson extrapolation."""
    n = vertices.shape[1]
    nk = 2**n

    def estimates(cells):
        if len(cells) > 100_000:
            parts = [estimates(cells[i:i + 100_000]) for i in range(0, len(cells), 100_000)]
            return np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])
        coarse = euclidean_volume(cells) * density(cells.mean(axis=1), n)
        kids = refine(cells)
        fine = (euclidean_volume(kids) * density(kids.mean(axis=1), n)).reshape(-1, nk).sum(axis=1)
        # Centroid rule is second order: one Richardson step.
        return fine + (fine - coarse) / 3.0, np.abs(fine - coarse)

    cells = vertices[None, :, :].astype(float)
    value, err = estimates(cells)
    while True:
        total_err = float(err.sum())
        if total_err <= tol:
            return float(value.sum()), total_err
        # Split the worst leaves carrying half of the outstanding error.
        order = np.argsort(-err, kind="stable")
        cum = np.cumsum(err[order])
        cut = int(np.searchsorted(cum, 0.5 * cum[-1])) + 1
        split = np.zeros(len(err), dtype=bool)
        split[order[:cut]] = True
        if len(err) + int(split.sum()) * (nk - 1) > max_cells:
            raise QuadratureError(
                f"midpoint quadrature did not converge: error {total_err:.3g} > tol {tol:.3g}")
        kids = refine(cells[split])
        kv, ke = estimates(kids)
        keep = ~split
        cells = np.concatenate([cells[keep], kids])
        value = np.concatenate([value[keep], kv])
        err = np.concatenate([err[keep], ke])
