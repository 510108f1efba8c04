"""Finite simplicial complexes and exact embedding checks for affine maps.

A map sending vertices to points of R^D extends affinely over each
simplex. It embeds the geometric realization iff no pair of maximal
simplices shares an image point beyond the face they have in common, and
for one pair that is a linear feasibility question: barycentric x, y with
equal images, off the shared-face diagonal. The feasible set is a polytope,
and it lies inside the diagonal iff all of its vertices do, so enumerating
basic solutions of the equality system decides the pair exactly. All
arithmetic runs over the rationals (floats convert losslessly), so the
verdict never depends on a tolerance; a strict bounding-box test prunes
pairs that cannot meet before any exact work happens.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

SNAP = 1e-9


def _freeze(v):
    if isinstance(v, (list, tuple)):
        return tuple(_freeze(u) for u in v)
    return v


def _sorted_labels(labels):
    try:
        return tuple(sorted(labels))
    except TypeError:
        return tuple(sorted(labels, key=repr))


@dataclass(frozen=True)
class Complex:
    """Abstract simplicial complex: an ordered vertex set and a face-closed
    family of simplices. Every vertex must occur as a 0-simplex, so
    isolated vertices are spelled out rather than implied."""

    vertices: tuple
    simplices: frozenset

    def __post_init__(self):
        verts = tuple(self.vertices)
        object.__setattr__(self, "vertices", verts)
        vset = set(verts)
        if len(vset) != len(verts):
            raise ValueError("duplicate vertices")
        simps = frozenset(frozenset(s) for s in self.simplices)
        object.__setattr__(self, "simplices", simps)
        if not simps:
            raise ValueError("complex needs at least one simplex")
        for s in simps:
            if not s:
                raise ValueError("empty simplex")
            if not s <= vset:
                raise ValueError("simplex uses unknown vertices")
            if len(s) >= 2:
                for v in s:
                    if s - {v} not in simps:
                        raise ValueError(
                            "simplices are not closed under faces")
        for v in verts:
            if frozenset((v,)) not in simps:
                raise ValueError(f"vertex {v!r} is not a 0-simplex")

    @property
    def dim(self) -> int:
        return max(len(s) for s in self.simplices) - 1

    def vertex_index(self, v) -> int:
        try:
            return self.vertices.index(v)
        except ValueError:
            raise KeyError(f"unknown vertex {v!r}") from None

    def ordered(self, simplex) -> tuple:
        """The simplex as a tuple in vertex order."""
        return tuple(sorted(simplex, key=self.vertex_index))

    def canonical(self) -> tuple:
        """All simplices, deterministically ordered by size then indices."""
        keyed = [(len(s), tuple(self.vertex_index(v) for v in self.ordered(s)))
                 for s in self.simplices]
        order = sorted(range(len(keyed)), key=lambda i: keyed[i])
        listed = [self.ordered(s) for s in self.simplices]
        return tuple(listed[i] for i in order)

    def maximal_simplices(self) -> tuple:
        maxs = [s for s in self.simplices
                if not any(s < t for t in self.simplices)]
        return tuple(self.ordered(s) for s in
                     sorted(maxs, key=lambda s: tuple(
                         sorted(self.vertex_index(v) for v in s))))

    @classmethod
    def from_maximal(cls, maximal) -> "Complex":
        """Face closure of the given simplices; vertices sorted."""
        simps = set()
        for s in maximal:
            s = frozenset(s)
            for r in range(1, len(s) + 1):
                for face in itertools.combinations(_sorted_labels(s), r):
                    simps.add(frozenset(face))
        verts = _sorted_labels(set().union(*simps))
        return cls(verts, frozenset(simps))

    def to_json(self) -> dict:
        def plain(v):
            return list(plain(u) for u in v) if isinstance(v, tuple) else v
        return {"vertices": [plain(v) for v in self.vertices],
                "simplices": [[plain(v) for v in s]
                              for s in self.canonical()]}

    @classmethod
    def from_json(cls, d: dict) -> "Complex":
        verts = tuple(_freeze(v) for v in d["vertices"])
        simps = frozenset(frozenset(_freeze(v) for v in s)
                          for s in d["simplices"])
        return cls(verts, simps)


@dataclass(frozen=True)
class SimplicialMap:
    """Vertex images in R^D; the map extends affinely over each simplex."""

    complex: Complex
    images: dict

    def __post_init__(self):
        if set(self.images) != set(self.complex.vertices):
            raise ValueError("images must cover exactly the vertex set")
        images = {v: tuple(float(c) for c in img)
                  for v, img in self.images.items()}
        object.__setattr__(self, "images", images)
        dims = {len(img) for img in images.values()}
        if len(dims) != 1 or min(dims) < 1:
            raise ValueError("vertex images must share one dimension >= 1")
        for img in images.values():
            if any(not math.isfinite(c) for c in img):
                raise ValueError("vertex images must be finite")

    @property
    def dim_target(self) -> int:
        return len(next(iter(self.images.values())))

    def eval(self, simplex, bary) -> np.ndarray:
        """Affine value at the barycentric point of the given simplex."""
        verts = self.complex.ordered(simplex)
        if len(bary) != len(verts):
            raise ValueError("barycentric length mismatch")
        if any(c < -SNAP for c in bary) or abs(sum(bary) - 1.0) > SNAP:
            raise ValueError("not a barycentric point")
        out = np.zeros(self.dim_target)
        for v, c in zip(verts, bary):
            out += float(c) * np.array(self.images[v])
        return out

    def to_json(self) -> dict:
        cj = self.complex.to_json()
        cj["images"] = [list(self.images[v]) for v in self.complex.vertices]
        return cj

    @classmethod
    def from_json(cls, d: dict) -> "SimplicialMap":
        c = Complex.from_json(d)
        images = {v: tuple(img) for v, img in
                  zip(c.vertices, d["images"])}
        return cls(c, images)


@dataclass(frozen=True)
class MetricSample:
    """Finite metric space given by a distance matrix; symmetry, zero
    diagonal, nonnegativity and the triangle inequality are checked."""

    labels: tuple
    dist: tuple

    def __post_init__(self):
        labels = tuple(self.labels)
        object.__setattr__(self, "labels", labels)
        n = len(labels)
        if len(set(labels)) != n:
            raise ValueError("duplicate labels")
        d = tuple(tuple(float(x) for x in row) for row in self.dist)
        object.__setattr__(self, "dist", d)
        if len(d) != n or any(len(row) != n for row in d):
            raise ValueError("distance matrix shape mismatch")
        for i in range(n):
            if d[i][i] != 0.0:
                raise ValueError("nonzero diagonal")
            for j in range(n):
                if d[i][j] < 0.0 or d[i][j] != d[j][i]:
                    raise ValueError("matrix must be symmetric nonnegative")
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    if d[i][k] > d[i][j] + d[j][k] + 1e-12:
                        raise ValueError(
                            f"triangle inequality fails at "
                            f"({labels[i]!r}, {labels[j]!r}, {labels[k]!r})")

    def index(self, label) -> int:
        return self.labels.index(label)

    def d(self, a, b) -> float:
        return self.dist[self.index(a)][self.index(b)]


def subdivide(c: Complex) -> Complex:
    """Barycentric subdivision: new vertices are the simplices of c (as
    ordered tuples), new maximal simplices are the complete flags
    sigma_1 < sigma_2 < ... inside each maximal simplex. Dimension is
    preserved and the geometric realization is unchanged."""
    flags = []
    for top in c.maximal_simplices():
        for perm in itertools.permutations(top):
            chain = [c.ordered(perm[:r]) for r in range(1, len(perm) + 1)]
            flags.append(tuple(chain))
    return Complex.from_maximal(flags)


def subdivide_map(m: SimplicialMap) -> SimplicialMap:
    """Induced map on the barycentric subdivision: each chain vertex goes
    to the barycenter of its simplex's vertex images."""
    sub = subdivide(m.complex)
    images = {}
    for w in sub.vertices:
        pts = [m.images[v] for v in w]
        images[w] = tuple(sum(col) / len(pts) for col in zip(*pts))
    return SimplicialMap(sub, images)


def _rref(rows):
    """Reduced row echelon form over Fractions, in place. Returns the
    pivot column indices."""
    if not rows:
        return []
    ncols = len(rows[0])
    pivots = []
    r = 0
    for col in range(ncols):
        pivot = next((i for i in range(r, len(rows)) if rows[i][col] != 0),
                     None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = rows[r][col]
        rows[r] = [x / inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
        if r == len(rows):
            break
    return pivots


def _polytope_vertices(A, b):
    """All vertices of {z >= 0 : A z = b}, exactly. The polytope here is
    always bounded (barycentric coordinates), so it is the convex hull of
    these points; returns [] when the system is infeasible."""
    k = len(A[0])
    aug = [row[:] + [rhs] for row, rhs in zip(A, b)]
    pivots = _rref(aug)
    if k in pivots:
        return []
    rows = [row for row in aug if any(x != 0 for x in row)]
    rank = len(rows)
    if rank == k:
        z = [Fraction(0)] * k
        for row, col in zip(rows, pivots):
            z[col] = row[k]
        return [tuple(z)] if all(x >= 0 for x in z) else []
    R = [row[:k] for row in rows]
    c = [row[k] for row in rows]
    found = set()
    for basis in itertools.combinations(range(k), rank):
        sub = [[R[i][j] for j in basis] + [c[i]] for i in range(rank)]
        piv = _rref(sub)
        if len(piv) != rank or rank in piv:
            continue
        z = [Fraction(0)] * k
        singular = False
        for row, col in zip(sub, piv):
            if col >= rank:
                singular = True
                break
            z[basis[col]] = row[rank]
        if singular or any(x < 0 for x in z):
            continue
        found.add(tuple(z))
    return sorted(found)


@dataclass(frozen=True)
class CollisionWitness:
    """Two simplices with a common image point off their shared face.
    Barycentric coordinates follow each simplex's vertex order."""

    simplex_a: tuple
    simplex_b: tuple
    bary_a: tuple
    bary_b: tuple
    point: tuple

    def to_json(self) -> dict:
        def plain(v):
            return list(plain(u) for u in v) if isinstance(v, tuple) else v
        return {"simplex_a": [plain(v) for v in self.simplex_a],
                "simplex_b": [plain(v) for v in self.simplex_b],
                "bary_a": list(self.bary_a), "bary_b": list(self.bary_b),
                "point": list(self.point)}


def _same_point(va, vb, x, y, shared):
    for v, c in zip(va, x):
        if v not in shared and c != 0:
            return False
    for v, c in zip(vb, y):
        if v not in shared and c != 0:
            return False
    xs = dict(zip(va, x))
    ys = dict(zip(vb, y))
    return all(xs[v] == ys[v] for v in shared)


def _pair_witness(va, vb, exact, D):
    na, nb = len(va), len(vb)
    A = [[Fraction(1)] * na + [Fraction(0)] * nb,
         [Fraction(0)] * na + [Fraction(1)] * nb]
    b = [Fraction(1), Fraction(1)]
    for d in range(D):
        A.append([exact[v][d] for v in va] + [-exact[u][d] for u in vb])
        b.append(Fraction(0))
    shared = set(va) & set(vb)
    for z in _polytope_vertices(A, b):
        x, y = z[:na], z[na:]
        if not _same_point(va, vb, x, y, shared):
            return x, y
    return None


def is_embedding(m: SimplicialMap) -> tuple:
    """Decide exactly whether the affine extension of m is injective on
    the geometric realization. Returns (True, None) or (False, witness)
    where the witness carries two maximal simplices and barycentric
    points with equal images that are distinct in the complex."""
    maxs = m.complex.maximal_simplices()
    exact = {v: tuple(Fraction(c) for c in img)
             for v, img in m.images.items()}
    D = m.dim_target
    boxes = []
    for s in maxs:
        pts = [m.images[v] for v in s]
        boxes.append(([min(p[d] for p in pts) for d in range(D)],
                      [max(p[d] for p in pts) for d in range(D)]))
    for i in range(len(maxs)):
        for j in range(i, len(maxs)):
            lo_i, hi_i = boxes[i]
            lo_j, hi_j = boxes[j]
            if any(hi_i[d] < lo_j[d] or hi_j[d] < lo_i[d]
                   for d in range(D)):
                continue
            hit = _pair_witness(maxs[i], maxs[j], exact, D)
            if hit is None:
                continue
            x, y = hit
            pt = [sum(exact[v][d] * c for v, c in zip(maxs[i], x))
                  for d in range(D)]
            other = [sum(exact[u][d] * c for u, c in zip(maxs[j], y))
                     for d in range(D)]
            assert pt == other  # exact arithmetic; the solver guarantees it
            witness = CollisionWitness(
                simplex_a=maxs[i], simplex_b=maxs[j],
                bary_a=tuple(float(c) for c in x),
                bary_b=tuple(float(c) for c in y),
                point=tuple(float(c) for c in pt))
            return False, witness
    return True, None


def verify_witness(m: SimplicialMap, w: CollisionWitness,
                   tol: float = SNAP) -> bool:
    """Re-check a collision witness against the map itself: both
    barycentric points must map to the same target point (within tol)
    while being distinct points of the realization. Distinctness compares
    the support-restricted coordinate maps, treating coordinates <= tol
    as zero."""
    pa = m.eval(w.simplex_a, w.bary_a)
    pb = m.eval(w.simplex_b, w.bary_b)
    if float(np.max(np.abs(pa - pb))) > tol:
        return False
    xs = {v: c for v, c in zip(w.simplex_a, w.bary_a) if c > tol}
    ys = {v: c for v, c in zip(w.simplex_b, w.bary_b) if c > tol}
    if set(xs) == set(ys) and all(abs(xs[v] - ys[v]) <= tol for v in xs):
        return False
    return True


def perturb_to_embedding(m: SimplicialMap, magnitude: float,
                         rng_seed: int, max_tries: int = 32
                         ) -> SimplicialMap:
    """Nudge vertex images (each coordinate by at most magnitude) until
    is_embedding passes; the unperturbed map is tried first. Requires
    target dimension >= 2 dim + 1, where random maps embed generically."""
    if m.dim_target < 2 * m.complex.dim + 1:
        raise ValueError(
            f"target dimension {m.dim_target} below 2*dim+1 = "
            f"{2 * m.complex.dim + 1}; generic maps are not embeddings")
    if magnitude < 0:
        raise ValueError("magnitude must be >= 0")
    ok, _ = is_embedding(m)
    if ok:
        return m
    rng = np.random.default_rng(rng_seed)
    verts = m.complex.vertices
    D = m.dim_target
    for _ in range(max_tries):
        # dyadic offsets keep the exact solver's rationals small
        grid = rng.integers(-(2 ** 20), 2 ** 20, size=(len(verts), D))
        images = {v: tuple(c + magnitude * g / 2.0 ** 20
                           for c, g in zip(m.images[v], row))
                  for v, row in zip(verts, grid)}
        cand = SimplicialMap(m.complex, images)
        ok, _ = is_embedding(cand)
        if ok:
            return cand
    raise RuntimeError(
        f"no embedding found within {max_tries} perturbations of "
        f"magnitude {magnitude}")


def segment_family_check(f: SimplicialMap, g: SimplicialMap,
                         t_grid) -> tuple:
    """is_embedding along the segment (1-t) f + t g at each grid t in
    [0, 1). A sampled surrogate: it checks the grid, not the whole
    interval. Returns (True, None) or (False, first failing t)."""
    if f.complex != g.complex:
        raise ValueError("maps must share one complex")
    if f.dim_target != g.dim_target:
        raise ValueError("maps must share one target dimension")
    for t in t_grid:
        t = float(t)
        if not 0.0 <= t < 1.0:
            raise ValueError("grid values must lie in [0, 1)")
        images = {v: tuple((1.0 - t) * a + t * b
                           for a, b in zip(f.images[v], g.images[v]))
                  for v in f.complex.vertices}
        ok, _ = is_embedding(SimplicialMap(f.complex, images))
        if not ok:
            return False, t
    return True, None


def eps_embedding_check(sample: MetricSample, images: dict, eps: float,
                        eta: float) -> tuple:
    """A map is an eps-embedding when points with (near-)equal images are
    within eps of each other: every pair at image gap <= eta must have
    sample distance < eps. Returns (True, None) or (False, witness) with
    witness = (label, label, distance, gap)."""
    if eta < 0:
        raise ValueError("eta must be >= 0")
    labels = sample.labels
    vecs = {p: np.array(images[p], dtype=float) for p in labels}
    for i, pi in enumerate(labels):
        for qj in labels[i + 1:]:
            gap = float(np.linalg.norm(vecs[pi] - vecs[qj]))
            if gap <= eta and sample.d(pi, qj) >= eps:
                return False, (pi, qj, sample.d(pi, qj), gap)
    return True, None


def approx_map(c: Complex, sample: MetricSample, pi: dict, f: dict,
               eps: float, delta: float) -> SimplicialMap:
    """Replace f by a simplicial map along the projection pi. pi sends each
    sample point to (simplex, barycentric coords) in c; every open star
    must have preimage diameter < eps, and f must move eps-close points
    less than delta. Each vertex then takes the f-value of one point of
    its star (zero when the star is empty), which keeps the simplicial map
    within delta of f at every sample point; that bound is asserted."""
    placements = {}
    for p in sample.labels:
        simplex, coords = pi[p]
        verts = c.ordered(simplex)
        if frozenset(verts) not in c.simplices:
            raise ValueError(f"pi({p!r}) uses a simplex not in the complex")
        coords = tuple(float(x) for x in coords)
        if len(coords) != len(verts):
            raise ValueError(f"pi({p!r}) has mismatched coordinates")
        if any(x < -SNAP for x in coords) or abs(sum(coords) - 1.0) > SNAP:
            raise ValueError(f"pi({p!r}) is not barycentric")
        placements[p] = {v: x for v, x in zip(verts, coords) if x > 0.0}

    stars = {v: [p for p in sample.labels if v in placements[p]]
             for v in c.vertices}
    for v, pts in stars.items():
        for i, pa in enumerate(pts):
            for pb in pts[i + 1:]:
                if sample.d(pa, pb) >= eps:
                    raise ValueError(
                        f"pi is not an eps-embedding of the sample: "
                        f"points {pa!r}, {pb!r} share the star of {v!r} "
                        f"at distance {sample.d(pa, pb):.6g} >= {eps}")

    fv = {p: np.array(f[p], dtype=float) for p in sample.labels}
    for i, pa in enumerate(sample.labels):
        for pb in sample.labels[i + 1:]:
            if sample.d(pa, pb) < eps:
                gap = float(np.linalg.norm(fv[pa] - fv[pb]))
                if gap >= delta:
                    raise ValueError(
                        f"modulus violated: d({pa!r}, {pb!r}) = "
                        f"{sample.d(pa, pb):.6g} < {eps} but image gap "
                        f"{gap:.6g} >= {delta}")

    D = len(next(iter(fv.values())))
    images = {}
    for v in c.vertices:
        images[v] = tuple(fv[stars[v][0]]) if stars[v] else (0.0,) * D
    g = SimplicialMap(c, images)
    for p in sample.labels:
        verts = sorted(placements[p], key=c.vertex_index)
        approx = np.zeros(D)
        for v in verts:
            approx += placements[p][v] * np.array(images[v])
        assert float(np.linalg.norm(fv[p] - approx)) < delta + 1e-12
    return g


def triangulated_strip(n: int) -> Complex:
    """A strip of n triangles on two vertex rows (the usual ladder
    triangulation); a handy dimension-2 example complex."""
    if n < 1:
        raise ValueError("need at least one triangle")
    cols = n // 2 + 1
    tris = []
    for i in range(cols):
        if len(tris) < n:
            tris.append((("a", i), ("b", i), ("a", i + 1)))
        if len(tris) < n:
            tris.append((("b", i), ("a", i + 1), ("b", i + 1)))
    return Complex.from_maximal(tris[:n])


def random_map(c: Complex, D: int, rng, grid: int = 2 ** 20
               ) -> SimplicialMap:
    """Vertex images uniform on the dyadic grid {0, 1/grid, ..., 1}^D;
    grid coordinates keep the exact solver fast."""
    if D < 1:
        raise ValueError("D must be >= 1")
    images = {}
    for v in c.vertices:
        row = rng.integers(0, grid + 1, size=D)
        images[v] = tuple(float(x) / grid for x in row)
    return SimplicialMap(c, images)


def crossing_pair(D: int) -> SimplicialMap:
    """Two disjoint triangles in R^D sharing their barycenter (1,1,0,...):
    a constructed embedding failure for any D, with witness barycentrics
    (1/3, 1/3, 1/3) on both sides."""
    if D < 2:
        raise ValueError("D must be >= 2")
    pad = (0.0,) * (D - 2)
    images = {0: (0.0, 0.0) + pad, 1: (3.0, 0.0) + pad,
              2: (0.0, 3.0) + pad,
              3: (2.0, 2.0) + pad, 4: (-1.0, 2.0) + pad,
              5: (2.0, -1.0) + pad}
    comp = Complex.from_maximal([(0, 1, 2), (3, 4, 5)])
    return SimplicialMap(comp, images)
