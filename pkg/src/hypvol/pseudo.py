"""Pseudomanifolds: simplices with pairwise identified codimension-one faces.

Vertices of every n-simplex are numbered 0..n and face j is the facet
omitting vertex j, with its vertices listed in increasing order.  A pairing
glues face ``a`` of one simplex to face ``b`` of another (or the same) by
sending the k-th vertex of face a to the ``perm[k]``-th vertex of face b.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence


class PseudomanifoldError(ValueError):
    """A pseudomanifold violates the pairing rules or the operation's preconditions."""


def face_vertices(n: int, j: int) -> tuple[int, ...]:
    return tuple(v for v in range(n + 1) if v != j)


def perm_sign(perm: Sequence[int]) -> int:
    sign = 1
    seen = [False] * len(perm)
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        k = start
        while not seen[k]:
            seen[k] = True
            k = perm[k]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


@dataclass(frozen=True)
class Pairing:
    simplex_a: int
    face_a: int
    simplex_b: int
    face_b: int
    perm: tuple[int, ...] | None = None

    def permutation(self, n: int) -> tuple[int, ...]:
        return tuple(range(n)) if self.perm is None else tuple(self.perm)

    def vertex_map(self, n: int) -> dict[int, int]:
        """Vertex of simplex_a (on face_a) -> vertex of simplex_b (on face_b)."""
        fa = face_vertices(n, self.face_a)
        fb = face_vertices(n, self.face_b)
        p = self.permutation(n)
        return {fa[k]: fb[p[k]] for k in range(n)}


@dataclass(frozen=True)
class Pseudomanifold:
    n: int
    simplex_count: int
    pairings: tuple[Pairing, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "pairings", tuple(self.pairings))

    def partner(self) -> dict[tuple[int, int], tuple[tuple[int, int], dict[int, int]]]:
        """(simplex, face) -> ((simplex', face'), vertex map) in both directions."""
        out = {}
        for p in self.pairings:
            m = p.vertex_map(self.n)
            out[(p.simplex_a, p.face_a)] = ((p.simplex_b, p.face_b), m)
            out[(p.simplex_b, p.face_b)] = ((p.simplex_a, p.face_a), {v: u for u, v in m.items()})
        return out

    def boundary_faces(self) -> list[tuple[int, int]]:
        used = set()
        for p in self.pairings:
            used.add((p.simplex_a, p.face_a))
            used.add((p.simplex_b, p.face_b))
        return [(i, j) for i in range(self.simplex_count) for j in range(self.n + 1)
                if (i, j) not in used]

    def to_json(self) -> dict:
        pairs = []
        for p in self.pairings:
            d = {"a": [p.simplex_a, p.face_a], "b": [p.simplex_b, p.face_b]}
            if p.perm is not None:
                d["perm"] = list(p.perm)
            pairs.append(d)
        return {"n": self.n, "simplices": self.simplex_count, "pairings": pairs}

    @classmethod
    def from_json(cls, obj: dict) -> "Pseudomanifold":
        try:
            n = int(obj["n"])
            count = int(obj["simplices"])
            pairs = []
            for d in obj.get("pairings", []):
                a, b = d["a"], d["b"]
                perm = tuple(int(x) for x in d["perm"]) if d.get("perm") is not None else None
                pairs.append(Pairing(int(a[0]), int(a[1]), int(b[0]), int(b[1]), perm))
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            raise PseudomanifoldError(f"malformed pseudomanifold JSON: {exc}") from exc
        return cls(n, count, tuple(pairs))


def validate(P: Pseudomanifold) -> list[str]:
    """Violations of the pairing rules; empty when P is a valid pseudomanifold."""
    out = []
    if P.n < 1:
        out.append(f"dimension must be at least 1, got {P.n}")
        return out
    if P.simplex_count < 0:
        out.append("negative simplex count")
    seen: dict[tuple[int, int], int] = {}
    for idx, p in enumerate(P.pairings):
        ok = True
        for s, f in ((p.simplex_a, p.face_a), (p.simplex_b, p.face_b)):
            if not 0 <= s < P.simplex_count:
                out.append(f"pairing {idx}: simplex index {s} out of range")
                ok = False
            if not 0 <= f <= P.n:
                out.append(f"pairing {idx}: face index {f} out of range")
                ok = False
        if p.perm is not None and sorted(p.perm) != list(range(P.n)):
            out.append(f"pairing {idx}: {p.perm!r} is not a permutation of 0..{P.n - 1}")
        if (p.simplex_a, p.face_a) == (p.simplex_b, p.face_b):
            out.append(f"pairing {idx}: face ({p.simplex_a}, {p.face_a}) paired with itself")
            ok = False
        if not ok:
            continue
        for key in ((p.simplex_a, p.face_a), (p.simplex_b, p.face_b)):
            if key in seen:
                out.append(f"pairing {idx}: face {key} already used by pairing {seen[key]}")
            else:
                seen[key] = idx
    return out


def _require_valid(P: Pseudomanifold) -> None:
    problems = validate(P)
    if problems:
        raise PseudomanifoldError("; ".join(problems))


class _UnionFind:
    def __init__(self):
        self.parent = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x, y):
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            # Smaller representative wins, so classes are labelled by their minimum.
            if ry < rx:
                rx, ry = ry, rx
            self.parent[ry] = rx


def pairing_constraint(n: int, p: Pairing) -> int:
    """Required product of simplex signs for the pairing to reverse orientation."""
    parity = (-1) ** (p.face_a + p.face_b) * perm_sign(p.permutation(n))
    return -parity


def orientability(P: Pseudomanifold) -> tuple[int, ...] | None:
    """Signs per simplex making every identification orientation-reversing.

    Each pairing forces sign_a * sign_b = -(-1)^(j+j') sgn(perm); the
    constraints are solved with a parity union-find.  Returns None if
    they are inconsistent.  The smallest simplex of each component gets +1.
    """
    _require_valid(P)
    parent = list(range(P.simplex_count))
    rel = [1] * P.simplex_count  # sign of node relative to its parent

    def find(x):
        s = 1
        path = []
        while parent[x] != x:
            path.append(x)
            s *= rel[x]
            x = parent[x]
        root = x
        # Path compression with accumulated parity.
        acc = s
        for node in path:
            old = rel[node]
            parent[node] = root
            rel[node] = acc
            acc *= old
        return root, s

    for p in P.pairings:
        c = pairing_constraint(P.n, p)
        ra, sa = find(p.simplex_a)
        rb, sb = find(p.simplex_b)
        if ra == rb:
            if sa * sb != c:
                return None
            continue
        if rb < ra:
            ra, rb, sa, sb = rb, ra, sb, sa
        parent[rb] = ra
        rel[rb] = sa * sb * c
    return tuple(find(i)[1] for i in range(P.simplex_count))


def signs_orient(P: Pseudomanifold, signs: Sequence[int]) -> bool:
    """Whether the given simplex signs make every identification orientation-reversing."""
    if len(signs) != P.simplex_count:
        raise PseudomanifoldError("one sign per simplex required")
    return all(signs[p.simplex_a] * signs[p.simplex_b] == pairing_constraint(P.n, p)
               for p in P.pairings)


def connected_components(P: Pseudomanifold) -> list[list[int]]:
    """Simplex index sets of the connected components, sorted by smallest index."""
    uf = _UnionFind()
    for i in range(P.simplex_count):
        uf.find(i)
    for p in P.pairings:
        uf.union(p.simplex_a, p.simplex_b)
    comps: dict[int, list[int]] = {}
    for i in range(P.simplex_count):
        comps.setdefault(uf.find(i), []).append(i)
    return sorted(comps.values())


def restrict(P: Pseudomanifold, simplices: Sequence[int]) -> Pseudomanifold:
    """Sub-pseudomanifold on a union of components, reindexed in the given order."""
    new = {s: k for k, s in enumerate(simplices)}
    pairs = []
    for p in P.pairings:
        ina, inb = p.simplex_a in new, p.simplex_b in new
        if ina != inb:
            raise PseudomanifoldError("restriction must be a union of components")
        if ina:
            pairs.append(Pairing(new[p.simplex_a], p.face_a, new[p.simplex_b], p.face_b, p.perm))
    return Pseudomanifold(P.n, len(simplices), tuple(pairs))


Face = tuple[int, tuple[int, ...]]


def face_orbits(P: Pseudomanifold, k: int) -> list[list[Face]]:
    """Classes of k-faces (simplex, sorted vertex tuple) under the gluings."""
    _require_valid(P)
    if not 0 <= k <= P.n:
        raise PseudomanifoldError(f"face dimension {k} outside 0..{P.n}")
    faces = [(i, f) for i in range(P.simplex_count)
             for f in itertools.combinations(range(P.n + 1), k + 1)]
    if k == P.n:
        return [[x] for x in faces]
    uf = _UnionFind()
    for x in faces:
        uf.find(x)
    for p in P.pairings:
        m = p.vertex_map(P.n)
        for sub in itertools.combinations(face_vertices(P.n, p.face_a), k + 1):
            image = tuple(sorted(m[v] for v in sub))
            uf.union((p.simplex_a, sub), (p.simplex_b, image))
    classes: dict[Face, list[Face]] = {}
    for x in faces:
        classes.setdefault(uf.find(x), []).append(x)
    return sorted((sorted(c) for c in classes.values()), key=lambda c: c[0])


def face_orbit_index(P: Pseudomanifold, k: int) -> dict[Face, int]:
    return {x: idx for idx, cls in enumerate(face_orbits(P, k)) for x in cls}


def euler_characteristic(P: Pseudomanifold) -> int:
    return sum((-1) ** k * len(face_orbits(P, k)) for k in range(P.n + 1))


@dataclass(frozen=True)
class BoundaryStructure:
    """The boundary pseudomanifold together with how it sits in P.

    ``faces[b]`` is the (simplex, face) of P underlying simplex b of ∂P.
    ``walks[q]`` lists the (simplex, (n-2)-face) incidences, with
    multiplicity, met while going around the (n-2)-face glued by pairing q.
    """

    boundary: Pseudomanifold
    faces: tuple[tuple[int, int], ...]
    walks: tuple[tuple[Face, ...], ...] = field(default=())


def boundary_structure(P: Pseudomanifold) -> BoundaryStructure:
    _require_valid(P)
    n = P.n
    faces = P.boundary_faces()
    index = {f: b for b, f in enumerate(faces)}
    if n == 1:
        return BoundaryStructure(Pseudomanifold(0, len(faces), ()), tuple(faces), ())
    partner = P.partner()
    done = set()
    pairings = []
    walks = []
    limit = 2 * (P.simplex_count * (n + 1) * n + 1)
    for b, (i, j) in enumerate(faces):
        fv = face_vertices(n, j)
        for k in range(n):
            if (b, k) in done:
                continue
            m = fv[k]
            start_e = tuple(v for v in range(n + 1) if v not in (j, m))
            phi = {v: v for v in start_e}
            cur, nxt = i, m
            walk = [(cur, start_e)]
            for _ in range(limit):
                if (cur, nxt) not in partner:
                    break
                (cur2, f2), vm = partner[(cur, nxt)]
                phi = {v: vm[w] for v, w in phi.items()}
                image = set(phi.values())
                rest = [v for v in range(n + 1) if v not in image and v != f2]
                cur, nxt = cur2, rest[0]
                walk.append((cur, tuple(sorted(image))))
            else:
                raise PseudomanifoldError("boundary walk did not terminate")
            end_b = index[(cur, nxt)]
            end_e = sorted(phi.values())
            omitted = [v for v in range(n + 1) if v not in end_e and v != nxt][0]
            end_k = face_vertices(n, nxt).index(omitted)
            if (end_b, end_k) == (b, k) or (end_b, end_k) in done:
                raise PseudomanifoldError("inconsistent boundary walk")
            perm = tuple(end_e.index(phi[v]) for v in start_e)
            done.add((b, k))
            done.add((end_b, end_k))
            pairings.append(Pairing(b, k, end_b, end_k,
                                    None if perm == tuple(range(n - 1)) else perm))
            walks.append(tuple(walk))
    return BoundaryStructure(Pseudomanifold(n - 1, len(faces), tuple(pairings)),
                             tuple(faces), tuple(walks))


def boundary(P: Pseudomanifold) -> Pseudomanifold:
    """The (n-1)-pseudomanifold ∂P made of the unpaired faces of P."""
    return boundary_structure(P).boundary


def component_euler_characteristics(P: Pseudomanifold) -> list[int]:
    return [euler_characteristic(restrict(P, c)) for c in connected_components(P)]


@dataclass(frozen=True)
class OmegaPartition:
    counts: tuple[int, ...]
    members: tuple[tuple[int, ...], ...]


def _require_dim3(P: Pseudomanifold) -> None:
    if P.n != 3:
        raise PseudomanifoldError(f"operation requires n = 3, got n = {P.n}")


def boundary_face_counts(P: Pseudomanifold) -> list[int]:
    counts = [0] * P.simplex_count
    for i, _ in P.boundary_faces():
        counts[i] += 1
    return counts


def omega_partition(P: Pseudomanifold) -> OmegaPartition:
    """Simplices grouped by their number of boundary 2-faces (t_0..t_4)."""
    _require_dim3(P)
    _require_valid(P)
    per = boundary_face_counts(P)
    members = tuple(tuple(i for i, c in enumerate(per) if c == t) for t in range(5))
    return OmegaPartition(tuple(len(m) for m in members), members)


def boundary_edge_orbits(P: Pseudomanifold) -> set[int]:
    """Indices (in face_orbits(P, 1)) of edge orbits of |P| lying in ∂|P|."""
    idx = face_orbit_index(P, 1)
    out = set()
    for i, j in P.boundary_faces():
        for e in itertools.combinations(face_vertices(P.n, j), 2):
            out.add(idx[(i, e)])
    return out


@dataclass(frozen=True)
class EdgeCensus:
    e_nice: int
    e_bad: int
    labels: tuple[tuple[Face, str], ...]


def nice_bad_edges(P: Pseudomanifold) -> EdgeCensus:
    """Nice and bad boundary edges.

    Boundary edges are the edge classes of ∂P, each bordered by exactly two
    boundary triangles.  One is nice when its image edge of |P| is an edge
    of some simplex with no boundary face.
    """
    _require_dim3(P)
    bs = boundary_structure(P)
    c = bs.boundary.simplex_count
    if (3 * c) % 2:
        raise PseudomanifoldError("odd number of boundary triangle sides")
    omega0 = set(omega_partition(P).members[0])
    edge_idx = face_orbit_index(P, 1)
    nice_orbits = {edge_idx[(i, e)] for i in omega0 for e in itertools.combinations(range(4), 2)}
    labels = []
    nice = 0
    for cls in face_orbits(bs.boundary, 1):
        b, local = cls[0]
        i, j = bs.faces[b]
        fv = face_vertices(3, j)
        edge = tuple(sorted(fv[v] for v in local))
        label = "nice" if edge_idx[(i, edge)] in nice_orbits else "bad"
        nice += label == "nice"
        labels.append(((i, edge), label))
    return EdgeCensus(nice, len(labels) - nice, tuple(labels))


def boundary_face_count_identity(P: Pseudomanifold) -> tuple[int, Fraction, bool]:
    """(number of (n-2)-faces of ∂P, (n/2) c(∂P), equality)."""
    _require_valid(P)
    if P.n < 2:
        raise PseudomanifoldError("identity needs n >= 2")
    dP = boundary(P)
    lhs = len(face_orbits(dP, P.n - 2)) if dP.simplex_count else 0
    rhs = Fraction(P.n, 2) * dP.simplex_count
    return lhs, rhs, lhs == rhs


def cyclehyp_violations(P: Pseudomanifold) -> list[str]:
    """Check the structural conditions an efficient straight cycle's P satisfies.

    At most one boundary face per simplex; for n = 3 additionally at most
    two boundary edges on simplices without boundary faces and at most three
    on any simplex.
    """
    _require_valid(P)
    out = []
    per = boundary_face_counts(P)
    for i, c in enumerate(per):
        if c > 1:
            out.append(f"simplex {i} has {c} boundary faces")
    if P.n == 3:
        bedges = boundary_edge_orbits(P)
        idx = face_orbit_index(P, 1)
        for i in range(P.simplex_count):
            count = sum(idx[(i, e)] in bedges for e in itertools.combinations(range(4), 2))
            if per[i] == 0 and count > 2:
                out.append(f"simplex {i} has no boundary face but {count} boundary edges")
            if count > 3:
                out.append(f"simplex {i} has {count} boundary edges")
    return out


def double(n: int = 3) -> Pseudomanifold:
    """Two n-simplices glued along all faces by order-preserving maps."""
    return Pseudomanifold(n, 2, tuple(Pairing(0, j, 1, j) for j in range(n + 1)))


def random_pseudomanifold(rng, n: int = 3, max_simplices: int = 6,
                          pair_fraction: float | None = None,
                          max_free_per_simplex: int | None = None) -> Pseudomanifold:
    """Random valid pseudomanifold: random matching on faces with random permutations.

    With ``max_free_per_simplex`` set, every simplex keeps at most that many
    unpaired faces and all remaining faces are paired.
    """
    count = int(rng.integers(1, max_simplices + 1))
    faces = [(i, j) for i in range(count) for j in range(n + 1)]
    if max_free_per_simplex is None:
        order = rng.permutation(len(faces))
        frac = rng.uniform(0.3, 1.0) if pair_fraction is None else pair_fraction
        chosen = [faces[k] for k in order[: 2 * (int(frac * len(faces)) // 2)]]
    else:
        free = set()
        for i in range(count):
            k = int(rng.integers(0, max_free_per_simplex + 1))
            free.update((i, int(j)) for j in rng.choice(n + 1, size=k, replace=False))
        chosen = [f for f in faces if f not in free]
        if len(chosen) % 2:
            # Free one more face on a simplex that still has room, else pair one back.
            room = [f for f in chosen
                    if sum(g[0] == f[0] for g in free) < max_free_per_simplex]
            if room:
                chosen.remove(room[int(rng.integers(len(room)))])
            else:
                extra = sorted(free)[int(rng.integers(len(free)))]
                chosen.append(extra)
        chosen = [chosen[k] for k in rng.permutation(len(chosen))]
    pairs = []
    for q in range(len(chosen) // 2):
        a = chosen[2 * q]
        b = chosen[2 * q + 1]
        perm = tuple(int(x) for x in rng.permutation(n))
        pairs.append(Pairing(a[0], a[1], b[0], b[1], perm))
    return Pseudomanifold(n, count, tuple(pairs))


def glue(n: int, count: int, pairs: Iterable[tuple[int, int, int, int]]) -> Pseudomanifold:
    """Shorthand: order-preserving pairings from (a, face_a, b, face_b) tuples."""
    return Pseudomanifold(n, count, tuple(Pairing(*p) for p in pairs))
