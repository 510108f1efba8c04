"""Voronoi tilings of the line driven by marker sequences.

Markers are integer positions n with heights h in (0,1]. Each marker lifts
to the plane point (n, 1/h); the tile of marker n is the set of t whose
lifted distance to (n, 1/h_n) is minimal. Every pairwise comparison is
linear in t (the t^2 cancels), so tiles are intervals and the tile of n is

    [ max over m < n of bisector(m, n),  min over m > n of bisector(m, n) ]

with bisector(m, n) = (m^2 + h_m^-2 - n^2 - h_n^-2) / (2 (m - n)), empty
when the bounds invert.

Only markers within 2M matter: a height-1 marker sits within M on each
side (marker invariant), and for any farther marker at distance D the
bisector value D/2 + (h^-2 - h_n^-2)/(2D) is increasing in D once h <= 1,
so the near height-1 marker's constraint is always at least as tight.

Tile anchors and node grids turn each tile into a (1/rho)-spaced slice for
the interpolation kernels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .interpolation import GridParams, NodeMultiset

SNAP = 1e-9


@dataclass(frozen=True)
class MarkerSeq:
    """Sorted (position, height) markers with gap and height-1 coverage
    invariants: positions pairwise more than L apart, and consecutive
    height-1 markers at most M apart (so every length-M integer window
    inside the covered span sees a height-1 marker)."""

    entries: tuple
    L: int
    M: int

    def __post_init__(self):
        if self.L < 1 or self.M <= self.L:
            raise ValueError("need M > L >= 1")
        entries = tuple((int(n), float(h)) for n, h in self.entries)
        object.__setattr__(self, "entries", entries)
        for (p, hp), (q, hq) in zip(entries, entries[1:]):
            if q <= p:
                raise ValueError("marker positions must be strictly increasing")
            if q - p <= self.L:
                raise ValueError(f"markers {p}, {q} closer than L={self.L}")
        for n, h in entries:
            if not 0.0 < h <= 1.0:
                raise ValueError(f"height at {n} outside (0, 1]: {h}")
        ones = [n for n, h in entries if h == 1.0]
        if entries and not ones:
            raise ValueError("marker sequence has no height-1 marker")
        for p, q in zip(ones, ones[1:]):
            if q - p > self.M:
                raise ValueError(
                    f"height-1 markers {p}, {q} farther than M={self.M}")

    def positions(self) -> tuple:
        return tuple(n for n, _ in self.entries)

    def to_json(self) -> dict:
        return {"L": self.L, "M": self.M,
                "entries": [[n, h] for n, h in self.entries]}

    @classmethod
    def from_json(cls, d: dict) -> "MarkerSeq":
        return cls(tuple((n, h) for n, h in d["entries"]),
                   L=int(d["L"]), M=int(d["M"]))


def shift_markers(markers: MarkerSeq, k: int) -> MarkerSeq:
    """Markers of the k-step shifted orbit: positions move by -k."""
    return MarkerSeq(tuple((n - int(k), h) for n, h in markers.entries),
                     markers.L, markers.M)


@dataclass(frozen=True)
class Tile:
    lo: float
    hi: float
    clipped_lo: bool = False
    clipped_hi: bool = False

    def __post_init__(self):
        if self.hi < self.lo:
            raise ValueError("inverted tile")

    @property
    def degenerate(self) -> bool:
        return self.lo == self.hi

    @property
    def length(self) -> float:
        return self.hi - self.lo


@dataclass(frozen=True)
class Tiling:
    """Tiles per marker index over a window; None marks a tile that is
    empty (dominated) or entirely outside the window."""

    tiles: tuple  # ((n, Tile | None), ...)
    window: tuple
    L: int
    M: int

    def tile(self, n: int):
        for m, t in self.tiles:
            if m == n:
                return t
        raise KeyError(f"no marker with index {n}")

    def nonempty(self) -> tuple:
        return tuple((n, t) for n, t in self.tiles if t is not None)

    def to_json(self) -> dict:
        return {
            "window": list(self.window), "L": self.L, "M": self.M,
            "tiles": [{"n": n,
                       "interval": None if t is None else [t.lo, t.hi],
                       "clipped": None if t is None
                       else [t.clipped_lo, t.clipped_hi]}
                      for n, t in self.tiles],
        }

    @classmethod
    def from_json(cls, d: dict) -> "Tiling":
        tiles = []
        for row in d["tiles"]:
            if row["interval"] is None:
                tiles.append((int(row["n"]), None))
            else:
                lo, hi = row["interval"]
                cl, ch = row["clipped"]
                tiles.append((int(row["n"]), Tile(lo, hi, cl, ch)))
        return cls(tuple(tiles), tuple(d["window"]),
                   L=int(d["L"]), M=int(d["M"]))


def _bisector(m: int, hm: float, n: int, hn: float) -> float:
    return (m * m + hm ** -2 - n * n - hn ** -2) / (2.0 * (m - n))


def compute_tiles(markers: MarkerSeq, window) -> Tiling:
    win_lo, win_hi = float(window[0]), float(window[1])
    if win_hi <= win_lo:
        raise ValueError("window must have positive width")
    M = markers.M
    near = [(n, h) for n, h in markers.entries
            if win_lo - M <= n <= win_hi + M]
    if not near:
        raise ValueError("no markers inside the M-padded window")
    gaps = [q - p for (p, _), (q, _) in zip(near, near[1:])]
    if gaps and win_hi - win_lo < max(gaps):
        raise ValueError(
            f"window width {win_hi - win_lo} narrower than the marker gap "
            f"{max(gaps)}; tiles would be dominated by unseen neighbors")
    tiles = []
    for i, (n, h) in enumerate(near):
        lo, hi = -math.inf, math.inf
        for j in range(i - 1, -1, -1):
            m, g = near[j]
            if n - m > 2 * M:
                break
            lo = max(lo, _bisector(m, g, n, h))
        for j in range(i + 1, len(near)):
            m, g = near[j]
            if m - n > 2 * M:
                break
            hi = min(hi, _bisector(m, g, n, h))
        if lo > hi:
            tiles.append((n, None))
            continue
        c_lo, c_hi = max(lo, win_lo), min(hi, win_hi)
        if c_lo > c_hi:
            tiles.append((n, None))
            continue
        tiles.append((n, Tile(c_lo, c_hi, clipped_lo=lo < win_lo,
                              clipped_hi=hi > win_hi)))
    return Tiling(tuple(tiles), (win_lo, win_hi), L=markers.L, M=markers.M)


def boundary_set(t: Tiling, r: float) -> tuple:
    """Union of the +-r collars of every nonempty tile endpoint, clipped to
    the window and merged into disjoint intervals. r = 0 gives the finite
    endpoint set (degenerate intervals)."""
    if r < 0:
        raise ValueError("collar radius must be >= 0")
    win_lo, win_hi = t.window
    points = []
    for _, tile in t.nonempty():
        points.append(tile.lo)
        points.append(tile.hi)
    collars = sorted((p - r, p + r) for p in set(points))
    merged = []
    for lo, hi in collars:
        lo, hi = max(lo, win_lo), min(hi, win_hi)
        if hi < lo:
            continue
        if merged and lo <= merged[-1][1] + SNAP:
            merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
        else:
            merged.append((lo, hi))
    return tuple(merged)


@dataclass(frozen=True)
class DensityReport:
    count_density: float
    measure_density: float
    count_bound_finite: float
    measure_bound_finite: float
    count_bound_asymptotic: float
    measure_bound_asymptotic: float
    r: float
    R: float


def density_report(t: Tiling, r: float, R: float, a: float) -> DensityReport:
    """Integer-count and Lebesgue densities of the r-collar boundary set in
    [a, a+R], with the guaranteed bounds: asymptotically (4r+2)/L and
    4r/L, and at finite R the proof's corrected forms."""
    if R <= 0:
        raise ValueError("R must be positive")
    win_lo, win_hi = t.window
    if a < win_lo - SNAP or a + R > win_hi + SNAP:
        raise ValueError("[a, a+R] must lie inside the tiling window")
    count = 0
    measure = 0.0
    for lo, hi in boundary_set(t, r):
        lo, hi = max(lo, a), min(hi, a + R)
        if hi < lo:
            continue
        measure += hi - lo
        count += max(0, math.floor(hi + SNAP) - math.ceil(lo - SNAP) + 1)
    L, M = t.L, t.M
    stretch = 1.0 + (R + M) / L
    count_fin = (2.0 * (r + 1.0) + 2.0 * (2.0 * r + 1.0) * stretch) / R
    measure_fin = (2.0 * r + 4.0 * r * stretch) / R
    return DensityReport(count_density=count / R, measure_density=measure / R,
                         count_bound_finite=count_fin,
                         measure_bound_finite=measure_fin,
                         count_bound_asymptotic=(4.0 * r + 2.0) / L,
                         measure_bound_asymptotic=4.0 * r / L,
                         r=r, R=R)


@dataclass(frozen=True)
class TileAnchors:
    n: int
    N: int
    r: int
    s: int
    c: float
    c_prime: float


def tile_anchors(t: Tiling, n: int, N: int) -> TileAnchors:
    """Ceiling/floor lattice anchors of tile n on the grid n + N Z, with the
    fractional offsets c = (n + rN - alpha)/N and c' = (beta - n - sN)/N.
    Near-integer ratios snap within 1e-9 so exact lattice hits give 0."""
    if N < 1:
        raise ValueError("N must be a positive integer")
    tile = t.tile(n)
    if tile is None:
        raise ValueError(f"tile {n} is empty")
    alpha, beta = tile.lo, tile.hi
    r = math.ceil((alpha - n) / N - SNAP)
    s = math.floor((beta - n) / N + SNAP)
    c = (n + r * N - alpha) / N
    c_prime = (beta - n - s * N) / N
    c = 0.0 if abs(c) <= SNAP else c
    c_prime = 0.0 if abs(c_prime) <= SNAP else c_prime
    assert -SNAP <= c < 1.0 and -SNAP <= c_prime < 1.0
    return TileAnchors(n=n, N=N, r=r, s=s, c=max(c, 0.0),
                       c_prime=max(c_prime, 0.0))


def build_node_set(t: Tiling, theta: dict, N: int, rho,
                   tau: float = 0.5) -> NodeMultiset:
    """Union over nonempty tiles of n + ((1/rho) Z intersect
    [(r + theta_n) N, (s - theta'_n) N)), as a NodeMultiset on blocks of
    length N. Requires rho*N integral; theta maps each nonempty tile index
    to its bit pair. Tiles where the shrunk range inverts contribute
    nothing."""
    rho = Fraction(rho)
    params = GridParams(l=N, rho=rho, tau=tau)
    cap_scale = params.lrho  # rho * N as an exact integer
    entries = []
    for n, tile in t.nonempty():
        if n not in theta:
            raise ValueError(f"theta is missing the bit pair for tile {n}")
        th, th_p = theta[n]
        if th not in (0, 1) or th_p not in (0, 1):
            raise ValueError(f"theta bits for tile {n} must be 0 or 1")
        anchors = tile_anchors(t, n, N)
        k_lo = (anchors.r + th) * cap_scale
        k_hi = (anchors.s - th_p) * cap_scale
        for k in range(k_lo, k_hi):
            entries.append((float(n + Fraction(k) / rho), 1))
    entries.sort()
    win_lo, win_hi = t.window
    window = (math.floor(win_lo / N), math.floor(win_hi / N))
    return NodeMultiset(tuple(entries), params, window)


def random_marker_seq(L: int, M: int, lo: float, hi: float, rng,
                      height_levels: int = 8) -> MarkerSeq:
    """Markers spanning [lo, hi] with M+L padding on both sides: integer
    gaps uniform in [L+1, M-1], heights from the uniform grid {1/k, ..., 1},
    height 1 forced one step before waiting any longer would break coverage.

    Gaps stay strictly below M so no two height-1 markers sit exactly M
    apart; that configuration puts a Voronoi tie exactly on a tile bound
    and breaks strict containment in (n - M/2, n + M/2)."""
    if M < L + 2:
        raise ValueError("need M >= L + 2")
    start = int(math.floor(lo)) - M - L - int(rng.integers(0, M))
    stop = int(math.ceil(hi)) + M + L
    positions = [start]
    while positions[-1] <= stop:
        positions.append(positions[-1] + int(rng.integers(L + 1, M)))
    entries = []
    last_one = None
    for p, q in zip(positions, positions[1:] + [positions[-1] + M + 1]):
        h = float(rng.integers(1, height_levels + 1)) / height_levels
        if last_one is None or q - last_one >= M:
            h = 1.0
        if h == 1.0:
            last_one = p
        entries.append((p, h))
    return MarkerSeq(tuple(entries), L=L, M=M)
