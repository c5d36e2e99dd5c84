"""Surface sampling and the statistical projection check.

Oracles: the radical-inverse sequence has closed-form terms and exact
dyadic equidistribution; for n = 3 the base projection of uniform
sphere samples is uniform on the interval (the equal-area
correspondence), checked with a Kolmogorov-Smirnov bound; negative
controls use a custom warp whose area density varies by a factor of a
few across the base.
"""

import math

import numpy as np
import pytest

from archarray.array import make_archimedean, make_custom, make_cylinder
from archarray.base import Ball, regular_polygon
from archarray.special import gamma_q
from archarray.verify import (
    app_statistical_test,
    halton,
    interior_points,
    random_regions,
    sample_surface,
)
from testutil import ks_statistic


def unit_disk():
    return Ball(np.zeros(2), 1.0)


# Halton sequence ------------------------------------------------------------


def test_halton_first_terms_base_two_and_three():
    pts = halton(7, 2)
    assert np.allclose(
        pts[:, 0], [1 / 2, 1 / 4, 3 / 4, 1 / 8, 5 / 8, 3 / 8, 7 / 8]
    )
    assert np.allclose(
        pts[:, 1], [1 / 3, 2 / 3, 1 / 9, 4 / 9, 7 / 9, 2 / 9, 5 / 9]
    )


def test_halton_dyadic_block_is_exactly_equidistributed():
    # Indices 1 .. 2^m - 1 bit-reverse onto {a / 2^m}, a = 1 .. 2^m - 1.
    vals = np.sort(halton(1023, 1)[:, 0])
    assert np.array_equal(vals, np.arange(1, 1024) / 1024.0)


def test_halton_range_and_shape():
    pts = halton(500, 8)
    assert pts.shape == (500, 8)
    assert np.all(pts > 0.0) and np.all(pts < 1.0)


def test_halton_start_offset():
    assert np.array_equal(halton(5, 3, start=3), halton(7, 3)[2:])


def test_halton_determinism():
    assert np.array_equal(halton(64, 2), halton(64, 2))


def test_halton_rejects_high_dimension():
    with pytest.raises(ValueError):
        halton(10, 9)


def test_halton_box_counts_balance():
    pts = halton(4096, 2)
    frac = np.mean(np.all(pts < 0.5, axis=1))
    assert frac == pytest.approx(0.25, abs=0.01)


# Interior points ------------------------------------------------------------


def test_interior_points_inside_with_offsets():
    base = unit_disk()
    pts = interior_points(base, 300, boundary_offset=0.1, singular_offset=0.2)
    assert pts.shape == (300, 2)
    assert np.all(base.signed_distance(pts) > 0.1)
    assert np.all(np.linalg.norm(pts, axis=1) > 0.2)


def test_interior_points_default_band():
    base = unit_disk()
    pts = interior_points(base, 200)
    assert np.all(base.contains(pts))
    assert np.all(base.singular_set_distance(pts) > base.singular_band)


def test_interior_points_polygon_avoids_medial_axis():
    hexagon = regular_polygon(6, inradius=1.0)
    pts = interior_points(hexagon, 200, singular_offset=0.05)
    assert np.all(hexagon.contains(pts))
    assert np.all(hexagon.singular_set_distance(pts) > 0.05)


def test_interior_points_deterministic_and_start():
    base = unit_disk()
    a = interior_points(base, 100)
    b = interior_points(base, 100)
    assert np.array_equal(a, b)
    c = interior_points(base, 100, start=7777)
    assert not np.array_equal(a, c)


def test_interior_points_impossible_quota():
    base = unit_disk()
    with pytest.raises(RuntimeError):
        interior_points(base, 10, boundary_offset=2.0)


# Surface sampling -----------------------------------------------------------


def test_sample_surface_shape_and_determinism():
    arr = make_archimedean(4, 2)
    a = sample_surface(arr, 1000, seed=5)
    b = sample_surface(arr, 1000, seed=5)
    c = sample_surface(arr, 1000, seed=6)
    assert a.shape == (1000, 4)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_sample_surface_points_satisfy_implicit_equation():
    for arr in (make_archimedean(3, 2), make_archimedean(5, 3)):
        pts = sample_surface(arr, 2000, seed=1)
        assert np.max(np.abs(arr.implicit_eval(pts))) < 1e-10


def test_sample_surface_sphere_radius():
    arr = make_archimedean(3, 2)
    pts = sample_surface(arr, 5000, seed=2)
    assert np.max(np.abs(np.linalg.norm(pts, axis=1) - 1.0)) < 1e-9


def test_sample_surface_base_projection_uniform():
    # Equal-area correspondence: the base coordinate of uniform sphere
    # samples is uniform on [-1, 1].
    arr = make_archimedean(3, 2)
    pts = sample_surface(arr, 20000, seed=3)
    x = pts[:, 0]
    stat = ks_statistic(x, lambda t: np.clip((t + 1.0) / 2.0, 0.0, 1.0))
    assert stat < 1.36 / math.sqrt(20000) * 1.3


def test_sample_surface_mean_fiber_radius():
    # For the unit sphere the mean fiber radius over a uniform base
    # coordinate is the average of sqrt(1 - x^2), which is pi/4.
    arr = make_archimedean(3, 2)
    pts = sample_surface(arr, 100000, seed=4)
    rho = np.linalg.norm(pts[:, 1:], axis=1)
    assert np.mean(rho) == pytest.approx(math.pi / 4.0, abs=3e-3)


def test_sample_surface_fiber_directions_isotropic():
    arr = make_archimedean(4, 3)
    pts = sample_surface(arr, 40000, seed=9)
    rho = np.linalg.norm(pts[:, 1:], axis=1)
    dirs = pts[:, 1:] / rho[:, None]
    assert np.max(np.abs(np.mean(dirs, axis=0))) < 0.02


def test_sample_surface_cylinder_mode():
    arr = make_cylinder(2, unit_disk(), r_scale=0.5)
    pts = sample_surface(arr, 3000, seed=7)
    rho = np.linalg.norm(pts[:, 2:], axis=1)
    assert np.max(np.abs(rho - 0.5)) < 1e-12
    assert np.all(arr.base.contains(pts[:, :2]))


def test_sample_surface_rejects_custom():
    arr = make_custom(2, unit_disk(), warp=lambda pts: np.full(len(pts), 0.5))
    with pytest.raises(ValueError):
        sample_surface(arr, 10)


def test_sample_surface_reports_rate():
    arr = make_archimedean(4, 2)
    pts, rate = sample_surface(arr, 200000, seed=8, return_rate=True)
    assert pts.shape == (200000, 4)
    assert 0.0 < rate <= 1.0


# Random regions -------------------------------------------------------------


def test_random_regions_shapes_and_sizes():
    base = unit_disk()
    regions = random_regions(base, 30, seed=0)
    assert len(regions) == 30
    kinds = {r.shape for r in regions}
    assert kinds == {"box", "ball"}
    for r in regions:
        if r.shape == "ball":
            center, size = r.center, r.radius
        else:
            center = 0.5 * (r.lo + r.hi)
            size = 0.5 * (r.hi - r.lo)[0]
        assert base.contains(center)
        assert 0.05 * base.inradius() <= size <= 0.5 * base.inradius()


def test_random_regions_deterministic_by_seed():
    base = unit_disk()
    a = random_regions(base, 10, seed=3)
    b = random_regions(base, 10, seed=3)
    c = random_regions(base, 10, seed=4)
    for ra, rb in zip(a, b):
        assert ra.describe() == rb.describe()
    assert any(ra.describe() != rc.describe() for ra, rc in zip(a, c))


def test_random_regions_positive_clipped_volume():
    base = regular_polygon(6, inradius=0.7)
    for r in random_regions(base, 10, seed=1):
        assert r.clipped_volume(base, depth=8) > 0.0


def test_random_regions_rejects_zero_count():
    with pytest.raises(ValueError):
        random_regions(unit_disk(), 0)


# Statistical test -----------------------------------------------------------


def test_statistical_test_passes_for_archimedean():
    arr = make_archimedean(4, 2)
    regions = random_regions(arr.base, 12, seed=11)
    report = app_statistical_test(arr, regions, 50000, seed=12)
    assert report.passed()
    assert report.p_value >= 0.001
    assert report.count_large_z(4.0) <= 1
    assert report.dof == 12
    assert report.samples == 50000


def test_statistical_test_passes_for_cylinder():
    arr = make_cylinder(2, regular_polygon(5, inradius=0.8), r_scale=0.3)
    regions = random_regions(arr.base, 10, seed=21)
    # the smallest drawn region holds ~0.23% of the mass, so the sample
    # count must be large enough to clear the expected-hits floor
    report = app_statistical_test(arr, regions, 60000, seed=22)
    assert report.passed()


def test_statistical_report_internal_consistency():
    arr = make_archimedean(4, 2)
    regions = random_regions(arr.base, 8, seed=31)
    report = app_statistical_test(arr, regions, 20000, seed=32)
    chi2 = sum(s.z**2 for s in report.scores)
    assert report.chi2 == pytest.approx(chi2, rel=1e-12)
    assert report.p_value == pytest.approx(
        gamma_q(report.dof / 2.0, report.chi2 / 2.0), rel=1e-12
    )
    assert report.max_abs_z() == max(abs(s.z) for s in report.scores)
    for s in report.scores:
        assert s.expected_hits == pytest.approx(report.samples * s.expected)
        assert s.observed == pytest.approx(
            s.expected, abs=6.0 * math.sqrt(s.expected / report.samples) + 1e-9
        )


def test_statistical_test_deterministic():
    arr = make_archimedean(3, 2)
    regions = random_regions(arr.base, 6, seed=41)
    a = app_statistical_test(arr, regions, 10000, seed=42)
    b = app_statistical_test(arr, regions, 10000, seed=42)
    c = app_statistical_test(arr, regions, 10000, seed=43)
    assert a.chi2 == b.chi2
    assert a.chi2 != c.chi2


def test_statistical_test_flags_low_expected_regions():
    arr = make_archimedean(4, 2)
    tiny = [r for r in random_regions(arr.base, 3, seed=51)]
    from archarray.region import Region

    tiny.append(Region.ball([0.0, 0.0], 0.01))
    report = app_statistical_test(arr, tiny, 20000, seed=52)
    assert report.low_expected == [3]
    assert not report.passed()


def test_statistical_test_fails_for_non_archimedean_warp():
    # Negative control: a warp whose area density varies across the
    # base.  Samples stay base-uniform while the expectations follow
    # the true surface measure, so the fit must break down.
    base = unit_disk()
    arr = make_custom(
        2, base,
        warp=lambda pts: 0.2 + 0.6 * np.einsum("nd,nd->n", pts, pts),
        warp_gradient=lambda pts: 1.2 * pts,
    )
    regions = random_regions(base, 12, seed=61)
    report = app_statistical_test(arr, regions, 50000, seed=62)
    assert not report.passed()
    assert report.p_value < 1e-6
    assert report.count_large_z(4.0) >= 5


def test_statistical_test_requires_regions():
    arr = make_archimedean(3, 2)
    with pytest.raises(ValueError):
        app_statistical_test(arr, [], 1000)


def test_report_serializes_to_plain_data():
    arr = make_archimedean(3, 2)
    regions = random_regions(arr.base, 4, seed=71)
    report = app_statistical_test(arr, regions, 5000, seed=72)
    doc = report.as_dict()
    assert set(doc) == {"regions", "aggregate", "samples",
                        "low_expected_regions"}
    assert len(doc["regions"]) == 4
    assert set(doc["aggregate"]) == {"chi2", "dof", "p"}
    for entry in doc["regions"]:
        assert set(entry) == {"region", "expected", "observed", "z"}
