#include <doctest.h>

#include <cmath>

#include "elastheat/geometry.hpp"
#include "elastheat/rng.hpp"

using namespace elastheat;

namespace {

Ring unit_square() { return {{0, 0}, {1, 0}, {1, 1}, {0, 1}}; }

// Monte Carlo oracle for the polygon-disk overlap area.
double mc_disk_area(const std::vector<Ring>& rings, Vec2 c, double r, int samples) {
  Rng rng(42);
  int hits = 0;
  for (int i = 0; i < samples; ++i) {
    const double ang = rng.uniform(0.0, 2.0 * M_PI);
    const double rad = r * std::sqrt(rng.uniform());
    const Vec2 p = c + Vec2{rad * std::cos(ang), rad * std::sin(ang)};
    std::vector<Ring> holes(rings.begin() + 1, rings.end());
    if (point_in_polygon(p, rings[0], holes)) ++hits;
  }
  return M_PI * r * r * hits / samples;
}

}  // namespace

TEST_CASE("shoelace area") {
  CHECK(signed_area(unit_square()) == doctest::Approx(1.0));
  Ring cw = unit_square();
  std::reverse(cw.begin(), cw.end());
  CHECK(signed_area(cw) == doctest::Approx(-1.0));
}

TEST_CASE("ring simplicity") {
  CHECK(ring_is_simple(unit_square()));
  CHECK_FALSE(ring_is_simple({{0, 0}, {1, 1}, {1, 0}, {0, 1}}));  // bowtie
  CHECK_FALSE(ring_is_simple({{0, 0}, {1, 0}, {1, 0}, {0, 1}}));  // repeated vertex
}

TEST_CASE("point in polygon with hole") {
  const Ring outer = unit_square();
  Ring hole = {{0.25, 0.25}, {0.75, 0.25}, {0.75, 0.75}, {0.25, 0.75}};
  std::reverse(hole.begin(), hole.end());  // clockwise
  CHECK(point_in_polygon({0.1, 0.1}, outer, {hole}));
  CHECK_FALSE(point_in_polygon({0.5, 0.5}, outer, {hole}));
  CHECK_FALSE(point_in_polygon({1.5, 0.5}, outer, {hole}));
}

TEST_CASE("point segment distance") {
  CHECK(point_segment_distance({0, 1}, {-1, 0}, {1, 0}) == doctest::Approx(1.0));
  CHECK(point_segment_distance({2, 0}, {-1, 0}, {1, 0}) == doctest::Approx(1.0));
  CHECK(point_segment_distance({0.3, 0}, {-1, 0}, {1, 0}) == doctest::Approx(0.0));
}

TEST_CASE("polygon disk area: analytic cases") {
  const std::vector<Ring> square = {unit_square()};
  // Disk fully inside.
  CHECK(polygon_disk_area(square, {0.5, 0.5}, 0.2) == doctest::Approx(M_PI * 0.04));
  // Disk centered at a corner: quarter disk.
  CHECK(polygon_disk_area(square, {0, 0}, 0.4) == doctest::Approx(M_PI * 0.16 / 4.0));
  // Disk centered on an edge: half disk.
  CHECK(polygon_disk_area(square, {0.5, 0.0}, 0.3) == doctest::Approx(M_PI * 0.09 / 2.0));
  // Huge disk: whole polygon.
  CHECK(polygon_disk_area(square, {0.5, 0.5}, 10.0) == doctest::Approx(1.0));
  // Disjoint.
  CHECK(polygon_disk_area(square, {5.0, 5.0}, 0.5) == doctest::Approx(0.0));
}

TEST_CASE("polygon disk area matches Monte Carlo on awkward cases") {
  // L-shape, disk straddling the reentrant corner.
  const Ring ell = {{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}};
  const std::vector<Ring> rings = {ell};
  for (const auto& [c, r] : std::vector<std::pair<Vec2, double>>{
           {{1.0, 1.0}, 0.5}, {{1.9, 0.9}, 0.6}, {{-0.2, 0.5}, 0.7}}) {
    const double exact = polygon_disk_area(rings, c, r);
    const double mc = mc_disk_area(rings, c, r, 400000);
    CHECK(exact == doctest::Approx(mc).epsilon(0.02));
  }
  // Square with hole, disk overlapping the hole.
  Ring hole = {{0.25, 0.25}, {0.75, 0.25}, {0.75, 0.75}, {0.25, 0.75}};
  std::reverse(hole.begin(), hole.end());
  const std::vector<Ring> holed = {unit_square(), hole};
  const double exact = polygon_disk_area(holed, {0.5, 0.2}, 0.3);
  CHECK(exact == doctest::Approx(mc_disk_area(holed, {0.5, 0.2}, 0.3, 400000)).epsilon(0.02));
}
