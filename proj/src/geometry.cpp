#include "v2xsim/geometry.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "v2xsim/kernels.hpp"

namespace v2xsim {

double norm(Vec2 v) { return std::sqrt(v.x * v.x + v.y * v.y); }
double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
double distance(Point2 a, Point2 b) { return norm(a - b); }

Footprint Footprint::box(Point2 center, double length, double width, double heading_rad,
                         double height) {
  const double c = std::cos(heading_rad);
  const double s = std::sin(heading_rad);
  const double hl = 0.5 * length;
  const double hw = 0.5 * width;
  // ccw in the local frame: (+hl,+hw), (-hl,+hw), (-hl,-hw), (+hl,-hw)
  const double lx[4] = {hl, -hl, -hl, hl};
  const double ly[4] = {hw, hw, -hw, -hw};
  Footprint f;
  f.vertices.reserve(4);
  for (int i = 0; i < 4; ++i) {
    f.vertices.push_back({center.x + c * lx[i] - s * ly[i], center.y + s * lx[i] + c * ly[i]});
  }
  f.height = height;
  return f;
}

bool Footprint::contains(Point2 p, double eps) const {
  const std::size_t n = vertices.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = vertices[i];
    const Point2 b = vertices[(i + 1) % n];
    // outward normal of a ccw edge is (dy, -dx); inside means dot <= eps
    const double ox = b.y - a.y;
    const double oy = a.x - b.x;
    if ((p.x - a.x) * ox + (p.y - a.y) * oy > eps) return false;
  }
  return true;
}

std::optional<std::pair<double, double>> clip_segment(Point2 a, Point2 b, const Footprint& f) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len = std::sqrt(dx * dx + dy * dy);
  if (len <= kGeomEps) throw std::invalid_argument("clip_segment: degenerate segment");

  double tlo = 0.0;
  double thi = 1.0;
  const std::size_t n = f.vertices.size();
  if (n < 3) throw std::invalid_argument("clip_segment: footprint needs >= 3 vertices");
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 v0 = f.vertices[i];
    const Point2 v1 = f.vertices[(i + 1) % n];
    const double ox = v1.y - v0.y;  // outward normal (ccw polygon)
    const double oy = v0.x - v1.x;
    const double sd = (a.x - v0.x) * ox + (a.y - v0.y) * oy;  // signed offset at t=0
    const double rate = dx * ox + dy * oy;
    if (rate > 0.0) {
      const double t = -sd / rate;
      if (t < thi) thi = t;
    } else if (rate < 0.0) {
      const double t = -sd / rate;
      if (t > tlo) tlo = t;
    } else if (sd > 0.0) {
      return std::nullopt;  // parallel and outside this half-plane
    }
  }
  const double eps_t = kGeomEps / len;
  if (thi - tlo <= eps_t) return std::nullopt;

  // Reject grazing runs along the boundary: the chord midpoint must be
  // strictly interior.
  const double tm = 0.5 * (tlo + thi);
  const Point2 mid{a.x + tm * dx, a.y + tm * dy};
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 v0 = f.vertices[i];
    const Point2 v1 = f.vertices[(i + 1) % n];
    const double ox = v1.y - v0.y;
    const double oy = v0.x - v1.x;
    const double nl = std::sqrt(ox * ox + oy * oy);
    if ((mid.x - v0.x) * ox + (mid.y - v0.y) * oy > -kGeomEps * nl) return std::nullopt;
  }
  return std::make_pair(tlo, thi);
}

int segment_footprint_crossings(Point2 a, Point2 b, const Footprint& f) {
  const auto clip = clip_segment(a, b, f);
  if (!clip) return 0;
  const double len = distance(a, b);
  const double eps_t = kGeomEps / len;
  int crossings = 0;
  if (clip->first > eps_t) ++crossings;         // enters through the boundary
  if (clip->second < 1.0 - eps_t) ++crossings;  // exits through the boundary
  return crossings;
}

std::optional<ObstacleSplit> obstacle_split(const AntennaPoint& a, const AntennaPoint& b,
                                            const Footprint& f) {
  const auto clip = clip_segment(a.position, b.position, f);
  if (!clip) return std::nullopt;
  const double tm = 0.5 * (clip->first + clip->second);
  const double len = distance(a.position, b.position);
  ObstacleSplit s;
  s.d1 = tm * len;
  s.d2 = (1.0 - tm) * len;
  s.peak = {a.position.x + tm * (b.position.x - a.position.x),
            a.position.y + tm * (b.position.y - a.position.y)};
  return s;
}

double line_height_at(const AntennaPoint& a, const AntennaPoint& b, Point2 p) {
  const Vec2 ab = b.position - a.position;
  const double len2 = ab.x * ab.x + ab.y * ab.y;
  if (len2 <= kGeomEps * kGeomEps) return 0.5 * (a.antenna_height + b.antenna_height);
  double t = ((p.x - a.position.x) * ab.x + (p.y - a.position.y) * ab.y) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return a.antenna_height + t * (b.antenna_height - a.antenna_height);
}

namespace {

// First hit of a single ray against general convex footprints; used when a
// footprint is not a quad (the batched kernels only handle quads).
double ray_first_hit_general(Point2 origin, double dx, double dy, double range,
                             const std::vector<Footprint>& obstacles) {
  double best = std::numeric_limits<double>::infinity();
  for (const Footprint& f : obstacles) {
    double tlo = 0.0;
    double thi = range;
    bool feasible = true;
    const std::size_t n = f.vertices.size();
    for (std::size_t i = 0; i < n && feasible; ++i) {
      const Point2 v0 = f.vertices[i];
      const Point2 v1 = f.vertices[(i + 1) % n];
      const double ox = v1.y - v0.y;
      const double oy = v0.x - v1.x;
      const double sd = (origin.x - v0.x) * ox + (origin.y - v0.y) * oy;
      const double rate = dx * ox + dy * oy;
      if (rate > 0.0) {
        const double t = -sd / rate;
        if (t < thi) thi = t;
      } else if (rate < 0.0) {
        const double t = -sd / rate;
        if (t > tlo) tlo = t;
      } else if (sd > 0.0) {
        feasible = false;
      }
    }
    if (feasible && tlo <= thi && tlo < best) best = tlo;
  }
  return best;
}

}  // namespace

std::vector<Point2> cast_rays(Point2 origin, const std::vector<Footprint>& obstacles,
                              int n_rays, double max_range, double step) {
  if (n_rays < 1) throw std::invalid_argument("cast_rays: n_rays must be >= 1");
  if (step <= 0.0) throw std::invalid_argument("cast_rays: step must be > 0");
  if (max_range <= 0.0) throw std::invalid_argument("cast_rays: max_range must be > 0");

  bool all_quads = true;
  for (const Footprint& f : obstacles) {
    if (f.vertices.size() != 4) {
      all_quads = false;
      break;
    }
  }

  std::vector<double> dir_x(n_rays), dir_y(n_rays);
  for (int i = 0; i < n_rays; ++i) {
    const double bearing = 2.0 * M_PI * static_cast<double>(i) / static_cast<double>(n_rays);
    dir_x[i] = std::cos(bearing);
    dir_y[i] = std::sin(bearing);
  }

  std::vector<double> hit(n_rays);
  if (all_quads) {
    kernels::QuadBatch quads;
    quads.reserve(obstacles.size());
    for (const Footprint& f : obstacles) {
      double vx[4], vy[4];
      for (int i = 0; i < 4; ++i) {
        vx[i] = f.vertices[i].x;
        vy[i] = f.vertices[i].y;
      }
      quads.add_quad(vx, vy);
    }
    kernels::ray_first_hits(origin.x, origin.y, dir_x.data(), dir_y.data(),
                            static_cast<std::size_t>(n_rays), max_range, quads, hit.data());
  } else {
    for (int i = 0; i < n_rays; ++i) {
      hit[i] = ray_first_hit_general(origin, dir_x[i], dir_y[i], max_range, obstacles);
    }
  }

  std::vector<Point2> samples;
  samples.reserve(static_cast<std::size_t>(n_rays) *
                  (static_cast<std::size_t>(max_range / step) + 1));
  for (int i = 0; i < n_rays; ++i) {
    const double truncation = std::min(hit[i], max_range);
    int k = 1;
    for (; static_cast<double>(k) * step < truncation - kGeomEps; ++k) {
      const double r = static_cast<double>(k) * step;
      samples.push_back({origin.x + r * dir_x[i], origin.y + r * dir_y[i]});
    }
    // terminal point: first obstacle hit or the max-range boundary
    samples.push_back({origin.x + truncation * dir_x[i], origin.y + truncation * dir_y[i]});
  }
  return samples;
}

}  // namespace v2xsim
