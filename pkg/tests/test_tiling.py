import math

import numpy as np
import pytest

from bandtile.tiling import (
    MarkerSeq,
    Tile,
    Tiling,
    boundary_set,
    build_node_set,
    compute_tiles,
    density_report,
    random_marker_seq,
    shift_markers,
    tile_anchors,
)


def two_markers(h0=1.0, h1=1.0, L=3, M=12):
    return MarkerSeq(((0, h0), (10, h1)), L=L, M=M)


def test_marker_seq_rejects_bad_input():
    with pytest.raises(ValueError):
        MarkerSeq(((0, 1.0), (3, 1.0)), L=3, M=12)  # gap <= L
    with pytest.raises(ValueError):
        MarkerSeq(((0, 0.5), (10, 0.5)), L=3, M=12)  # no height-1 marker
    with pytest.raises(ValueError):
        MarkerSeq(((0, 1.0), (10, 1.5)), L=3, M=12)  # height above 1
    with pytest.raises(ValueError):
        MarkerSeq(((0, 1.0), (20, 1.0)), L=3, M=12)  # ones farther than M


def test_equal_heights_bisect_at_midpoint():
    t = compute_tiles(two_markers(), (-5.0, 15.0))
    assert t.tile(0).hi == 5.0
    assert t.tile(10).lo == 5.0


def test_unequal_heights_frozen_bisector():
    # solve t^2 + 1 = (t - 10)^2 + 4 for heights 1 and 1/2
    t = compute_tiles(two_markers(h1=0.5), (-5.0, 15.0))
    assert t.tile(0).hi == 5.15
    assert t.tile(10).lo == 5.15


def test_single_marker_owns_the_window():
    m = MarkerSeq(((0, 1.0),), L=3, M=12)
    t = compute_tiles(m, (-5.0, 5.0))
    tile = t.tile(0)
    assert (tile.lo, tile.hi) == (-5.0, 5.0)
    assert tile.clipped_lo and tile.clipped_hi


def test_shift_zero_is_identity():
    m = two_markers(h1=0.5)
    assert shift_markers(m, 0).entries == m.entries


def test_shift_reindexes_the_frozen_bisector():
    m = shift_markers(two_markers(h1=0.5), 1)
    assert m.positions() == (-1, 9)
    t = compute_tiles(m, (-6.0, 14.0))
    assert t.tile(-1).hi == 4.15


def test_shift_round_trip():
    m = two_markers(h1=0.75)
    assert shift_markers(shift_markers(m, 4), -4).entries == m.entries


def test_shift_equivariance_on_random_tilings():
    """Shifting markers by k and the window with them moves every tile
    bound by exactly -k, up to 1e-9 float slack."""
    rng = np.random.default_rng(12)
    for _ in range(50):
        markers = random_marker_seq(8, 30, 0.0, 300.0, rng)
        k = int(rng.integers(-40, 41))
        t = compute_tiles(markers, (0.0, 300.0))
        ts = compute_tiles(shift_markers(markers, k), (0.0 - k, 300.0 - k))
        for (n, a), (m, b) in zip(t.tiles, ts.tiles):
            assert m == n - k
            if a is None:
                assert b is None
                continue
            assert b.lo == pytest.approx(a.lo - k, abs=1e-9)
            assert b.hi == pytest.approx(a.hi - k, abs=1e-9)


def test_strict_containment_on_random_tilings():
    rng = np.random.default_rng(5)
    for _ in range(100):
        L, M = 8, 30
        markers = random_marker_seq(L, M, 0.0, 400.0, rng)
        t = compute_tiles(markers, (0.0, 400.0))
        for n, tile in t.nonempty():
            assert n - M / 2.0 < tile.lo
            assert tile.hi < n + M / 2.0


def test_generator_keeps_height_one_gaps_below_M():
    rng = np.random.default_rng(9)
    for _ in range(20):
        markers = random_marker_seq(8, 30, 0.0, 500.0, rng)
        ones = [n for n, h in markers.entries if h == 1.0]
        assert max(q - p for p, q in zip(ones, ones[1:])) < 30
    with pytest.raises(ValueError):
        random_marker_seq(8, 9, 0.0, 100.0, rng)  # needs M >= L + 2


def test_boundary_set_zero_radius_is_endpoint_set():
    t = compute_tiles(two_markers(), (-5.0, 15.0))
    pts = boundary_set(t, 0.0)
    assert pts == ((-5.0, -5.0), (5.0, 5.0), (15.0, 15.0))


def test_boundary_set_collars_merge():
    t = compute_tiles(two_markers(), (-5.0, 15.0))
    assert boundary_set(t, 1.0) == ((-5.0, -4.0), (4.0, 6.0), (14.0, 15.0))
    # radius large enough to fuse everything
    assert boundary_set(t, 6.0) == ((-5.0, 15.0),)


def test_boundary_set_empty_tiling():
    t = Tiling(tiles=(), window=(0.0, 1.0), L=3, M=12)
    assert boundary_set(t, 1.0) == ()


def test_density_zero_radius_zero_measure():
    t = compute_tiles(two_markers(), (-5.0, 15.0))
    rep = density_report(t, r=0.0, R=20.0, a=-5.0)
    assert rep.measure_density == 0.0
    assert rep.count_density > 0.0


def test_density_within_bounds_at_large_R():
    rng = np.random.default_rng(21)
    L, M = 8, 30
    markers = random_marker_seq(L, M, 0.0, 10_000.0, rng)
    t = compute_tiles(markers, (0.0, 10_000.0))
    rep = density_report(t, r=1.0, R=10_000.0, a=0.0)
    assert rep.count_density <= rep.count_bound_finite
    assert rep.measure_density <= rep.measure_bound_finite
    # at this scale the finite bounds sit close above the asymptotic ones
    assert rep.count_bound_asymptotic == (4.0 * 1.0 + 2.0) / L
    assert rep.measure_bound_asymptotic == 4.0 * 1.0 / L
    assert rep.count_density <= rep.count_bound_asymptotic * 1.1
    assert rep.measure_density <= rep.measure_bound_asymptotic * 1.1


def test_tile_anchors_frozen_example():
    t = Tiling(tiles=((10, Tile(3.2, 17.8)),), window=(3.2, 17.8),
               L=8, M=30)
    a = tile_anchors(t, 10, 2)
    assert (a.r, a.s) == (-3, 3)
    assert a.c == pytest.approx(0.4, abs=1e-9)
    assert a.c_prime == pytest.approx(0.9, abs=1e-9)


def test_tile_anchors_degenerate_point():
    t = Tiling(tiles=((4, Tile(4.0, 4.0)),), window=(4.0, 4.0), L=8, M=30)
    a = tile_anchors(t, 4, 2)
    assert (a.r, a.s, a.c, a.c_prime) == (0, 0, 0.0, 0.0)


def test_tile_anchors_exact_lattice_hits():
    t = Tiling(tiles=((5, Tile(1.0, 11.0)),), window=(1.0, 11.0), L=8, M=30)
    a = tile_anchors(t, 5, 2)
    assert a.c == 0.0 and a.c_prime == 0.0
    assert (a.r, a.s) == (-2, 3)


def test_build_node_set_single_tile_enumeration():
    t = Tiling(tiles=((5, Tile(0.0, 10.0)),), window=(0.0, 10.0), L=8, M=30)
    nodes = build_node_set(t, {5: (0, 0)}, N=2, rho=1)
    # anchors r=-2, s=2 with cap 2 per anchor step: 5 + {-4..3}
    want = tuple((float(5 + k), 1) for k in range(-4, 4))
    assert nodes.entries == want


def test_build_node_set_short_tiles_vanish():
    t = Tiling(tiles=((5, Tile(4.9, 5.1)),), window=(4.9, 5.1), L=8, M=30)
    nodes = build_node_set(t, {5: (1, 1)}, N=2, rho=1)
    assert nodes.entries == ()


def test_json_round_trips():
    m = two_markers(h1=0.5)
    assert MarkerSeq.from_json(m.to_json()).entries == m.entries
    t = compute_tiles(m, (-5.0, 15.0))
    t2 = Tiling.from_json(t.to_json())
    assert t2.tiles == t.tiles and t2.window == t.window
