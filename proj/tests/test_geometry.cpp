#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "v2xsim/geometry.hpp"
#include "v2xsim/rng.hpp"

using namespace v2xsim;

namespace {

Footprint unit_square() {
  Footprint f;
  f.vertices = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  f.height = 2.0;
  return f;
}

Footprint random_box(Rng& rng, double span = 40.0) {
  const Point2 c{rng.uniform(-span, span), rng.uniform(-span, span)};
  return Footprint::box(c, rng.uniform(2.0, 14.0), rng.uniform(1.0, 4.0),
                        rng.uniform(0.0, 2.0 * M_PI), rng.uniform(1.0, 5.0));
}

}  // namespace

TEST_CASE("crossings: segment entirely outside") {
  CHECK(segment_footprint_crossings({-2, -2}, {-2, 3}, unit_square()) == 0);
}

TEST_CASE("crossings: pass-through counts two walls") {
  CHECK(segment_footprint_crossings({-1, 0.5}, {2, 0.5}, unit_square()) == 2);
}

TEST_CASE("crossings: endpoint strictly inside counts one") {
  CHECK(segment_footprint_crossings({0.5, 0.5}, {2, 0.5}, unit_square()) == 1);
}

TEST_CASE("crossings: both endpoints inside cross nothing") {
  CHECK(segment_footprint_crossings({0.25, 0.5}, {0.75, 0.5}, unit_square()) == 0);
}

TEST_CASE("crossings: grazing along an edge counts zero") {
  CHECK(segment_footprint_crossings({-1, 0.0}, {2, 0.0}, unit_square()) == 0);
  CHECK(segment_footprint_crossings({-1, 1.0}, {2, 1.0}, unit_square()) == 0);
  // tangent corner touch: the line y = x + 1 meets the square only at (0,1)
  CHECK(segment_footprint_crossings({-1, 0}, {1, 2}, unit_square()) == 0);
}

TEST_CASE("crossings: symmetric in segment direction") {
  Rng rng(42);
  for (int i = 0; i < 300; ++i) {
    const Footprint f = random_box(rng);
    const Point2 a{rng.uniform(-50, 50), rng.uniform(-50, 50)};
    const Point2 b{rng.uniform(-50, 50), rng.uniform(-50, 50)};
    if (distance(a, b) < 1e-6) continue;
    CHECK(segment_footprint_crossings(a, b, f) == segment_footprint_crossings(b, a, f));
  }
}

TEST_CASE("obstacle_split: symmetric footprint splits at the midpoint") {
  const AntennaPoint a{{0, 0}, 1.5};
  const AntennaPoint b{{50, 0}, 1.5};
  const Footprint f = Footprint::box({25, 0}, 2.0, 2.0, 0.0, 4.0);
  const auto s = obstacle_split(a, b, f);
  REQUIRE(s.has_value());
  CHECK(s->d1 == doctest::Approx(25.0).epsilon(1e-12));
  CHECK(s->d2 == doctest::Approx(25.0).epsilon(1e-12));
}

TEST_CASE("obstacle_split: offset footprint matches direct clipping oracle") {
  const AntennaPoint a{{0, 0}, 1.5};
  const AntennaPoint b{{50, 0}, 1.5};
  const Footprint f = Footprint::box({20, 0}, 2.0, 2.0, 0.0, 4.0);
  const auto s = obstacle_split(a, b, f);
  REQUIRE(s.has_value());
  // oracle: chord through the box is x in [19, 21], midpoint x = 20
  CHECK(s->d1 == doctest::Approx(20.0).epsilon(1e-12));
  CHECK(s->d2 == doctest::Approx(30.0).epsilon(1e-12));
  CHECK(s->peak.x == doctest::Approx(20.0));
  CHECK(s->peak.y == doctest::Approx(0.0));
}

TEST_CASE("obstacle_split: miss returns empty") {
  const AntennaPoint a{{0, 0}, 1.5};
  const AntennaPoint b{{50, 0}, 1.5};
  const Footprint f = Footprint::box({25, 10}, 2.0, 2.0, 0.0, 4.0);
  CHECK_FALSE(obstacle_split(a, b, f).has_value());
}

TEST_CASE("obstacle_split: d1 + d2 equals the link length whenever non-empty") {
  Rng rng(7);
  for (int i = 0; i < 500; ++i) {
    const AntennaPoint a{{rng.uniform(-60, 60), rng.uniform(-60, 60)}, 1.5};
    const AntennaPoint b{{rng.uniform(-60, 60), rng.uniform(-60, 60)}, 1.8};
    if (distance(a.position, b.position) < 1e-3) continue;
    const Footprint f = random_box(rng);
    const auto s = obstacle_split(a, b, f);
    if (!s) continue;
    CHECK(std::abs(s->d1 + s->d2 - distance(a.position, b.position)) <= 1e-9);
    CHECK(s->d1 > 0.0);
    CHECK(s->d2 > 0.0);
  }
}

TEST_CASE("line_height_at: constant and linear interpolation") {
  const AntennaPoint a{{0, 0}, 1.5};
  const AntennaPoint b{{30, 0}, 1.5};
  CHECK(line_height_at(a, b, {11.3, 0}) == doctest::Approx(1.5));

  const AntennaPoint c{{0, 0}, 1.5};
  const AntennaPoint d{{10, 0}, 2.0};
  CHECK(line_height_at(c, d, {5, 0}) == doctest::Approx(1.75));

  // oracle by hand: one third of the way from 1.5 to 1.8 is 1.6
  const AntennaPoint e{{0, 0}, 1.5};
  const AntennaPoint f{{9, 0}, 1.8};
  CHECK(line_height_at(e, f, {3, 0}) == doctest::Approx(1.6));
}

TEST_CASE("line_height_at: bounded by the two antenna heights") {
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    const AntennaPoint a{{rng.uniform(-10, 10), rng.uniform(-10, 10)}, rng.uniform(1.0, 3.0)};
    const AntennaPoint b{{rng.uniform(-10, 10), rng.uniform(-10, 10)}, rng.uniform(1.0, 3.0)};
    if (distance(a.position, b.position) < 1e-6) continue;
    const Point2 p{rng.uniform(-12, 12), rng.uniform(-12, 12)};
    const double h = line_height_at(a, b, p);
    CHECK(h >= std::min(a.antenna_height, b.antenna_height) - 1e-12);
    CHECK(h <= std::max(a.antenna_height, b.antenna_height) + 1e-12);
  }
}

TEST_CASE("cast_rays: unobstructed ray emits a sample per step up to max range") {
  const auto samples = cast_rays({0, 0}, {}, 1, 10.0, 1.0);
  REQUIRE(samples.size() == 10);
  for (int i = 0; i < 10; ++i) {
    CHECK(samples[i].x == doctest::Approx(static_cast<double>(i + 1)));
    CHECK(samples[i].y == doctest::Approx(0.0));
  }
}

TEST_CASE("cast_rays: wall truncates and contributes the hit point") {
  // wall whose near face is at x = 3.5 across the single +x ray
  const Footprint wall = Footprint::box({4.0, 0.0}, 1.0, 8.0, 0.0, 3.0);
  const auto samples = cast_rays({0, 0}, {wall}, 1, 10.0, 1.0);
  REQUIRE(samples.size() == 4);
  CHECK(samples[0].x == doctest::Approx(1.0));
  CHECK(samples[1].x == doctest::Approx(2.0));
  CHECK(samples[2].x == doctest::Approx(3.0));
  CHECK(samples[3].x == doctest::Approx(3.5));  // oracle: first-intersection distance
}

TEST_CASE("cast_rays: origin inside a footprint hits at range zero") {
  const Footprint box = Footprint::box({0, 0}, 4.0, 4.0, 0.0, 3.0);
  const auto samples = cast_rays({0, 0}, {box}, 4, 10.0, 1.0);
  REQUIRE(samples.size() == 4);  // one terminal point per ray
  for (const auto& p : samples) {
    CHECK(p.x == doctest::Approx(0.0));
    CHECK(p.y == doctest::Approx(0.0));
  }
}

TEST_CASE("cast_rays: adding a footprint never adds samples on any ray") {
  Rng rng(23);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<Footprint> obstacles;
    const int n_obs = static_cast<int>(rng.uniform_int(6));
    for (int i = 0; i < n_obs; ++i) obstacles.push_back(random_box(rng, 25.0));
    const int n_rays = 16;
    const auto before = cast_rays({0, 0}, obstacles, n_rays, 30.0, 1.5);
    obstacles.push_back(random_box(rng, 25.0));
    const auto after = cast_rays({0, 0}, obstacles, n_rays, 30.0, 1.5);
    CHECK(after.size() <= before.size());
  }
}

TEST_CASE("cast_rays: input validation") {
  const Point2 origin{0, 0};
  const std::vector<Footprint> none;
  CHECK_THROWS_AS(cast_rays(origin, none, 0, 10.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(cast_rays(origin, none, 4, 10.0, 0.0), std::invalid_argument);
}
