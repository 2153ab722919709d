#pragma once

#include <optional>
#include <utility>
#include <vector>

namespace v2xsim {

// Tolerance for geometric tie-breaks, in meters. Grazing contact below this
// scale counts as no intersection so link budgets cannot flip on
// measure-zero events between time steps.
inline constexpr double kGeomEps = 1e-9;

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Point2 operator+(Point2 p, Vec2 v) { return {p.x + v.x, p.y + v.y}; }
inline Vec2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }

double norm(Vec2 v);
double dot(Vec2 a, Vec2 b);
double distance(Point2 a, Point2 b);

// Convex footprint, counter-clockwise vertices, with a physical height.
// All obstacles in the simulator (vehicles and building blocks) are
// rectangles, but the scalar routines accept any convex polygon.
struct Footprint {
  std::vector<Point2> vertices;
  double height = 0.0;

  static Footprint box(Point2 center, double length, double width, double heading_rad,
                       double height);
  bool contains(Point2 p, double eps = kGeomEps) const;
};

struct AntennaPoint {
  Point2 position;
  double antenna_height = 0.0;
};

// Parametric clip of segment a->b against a convex footprint. Returns the
// [t0, t1] sub-interval of [0, 1] inside the footprint, or nullopt when the
// overlap is empty or degenerate (tangential contact).
std::optional<std::pair<double, double>> clip_segment(Point2 a, Point2 b, const Footprint& f);

// Number of distinct boundary crossings of segment a->b with f. An endpoint
// strictly inside contributes one crossing; tangential contact contributes
// none.
int segment_footprint_crossings(Point2 a, Point2 b, const Footprint& f);

struct ObstacleSplit {
  double d1 = 0.0;      // meters from a to the representative peak
  double d2 = 0.0;      // meters from the peak to b
  Point2 peak;          // midpoint of the chord through the footprint
};

// Splits the a->b link at the footprint's representative peak (chord
// midpoint). Empty when the 2D segment misses the footprint.
std::optional<ObstacleSplit> obstacle_split(const AntennaPoint& a, const AntennaPoint& b,
                                            const Footprint& f);

// Height of the direct a->b line above ground at p (p projected onto the
// segment and clamped to it).
double line_height_at(const AntennaPoint& a, const AntennaPoint& b, Point2 p);

// Synthetic range sensor: n_rays equally spaced bearings; each ray emits
// sample points every `step` meters and is truncated at the first footprint
// hit or at max_range. The truncation point itself is included unless it
// coincides with the last step sample.
std::vector<Point2> cast_rays(Point2 origin, const std::vector<Footprint>& obstacles,
                              int n_rays, double max_range, double step);

}  // namespace v2xsim
