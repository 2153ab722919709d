#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

// Batched inner-loop kernels with a scalar reference implementation and an
// AVX2 variant selected at runtime. Both backends are required to produce
// bit-identical outputs; the scalar code mirrors the vector select semantics
// (see scalar.cpp) and the project builds with -ffp-contract=off.

namespace v2xsim::kernels {

enum class Backend { Scalar, Avx2 };

bool backend_available(Backend b);
Backend active_backend();
void set_backend(Backend b);  // throws std::runtime_error when unavailable
std::string backend_name(Backend b);

// Structure-of-arrays batch of convex quads. Edge e of quad i is anchored at
// (qx[e][i], qy[e][i]) with outward unit-free normal (nx[e][i], ny[e][i]).
struct QuadBatch {
  std::array<std::vector<double>, 4> qx, qy, nx, ny;
  std::size_t count = 0;

  void clear();
  void reserve(std::size_t n);
  // ccw vertex lists; outward normal of edge v[e] -> v[e+1] is (dy, -dx)
  void add_quad(const double (&vx)[4], const double (&vy)[4]);
};

// Clips segment (ax,ay)->(bx,by) against every quad. Writes the parametric
// inside-interval [t0[i], t1[i]] within [0, 1]; an empty overlap is
// canonicalized to (+inf, -inf).
void segment_quad_intervals(double ax, double ay, double bx, double by, const QuadBatch& quads,
                            double* t0, double* t1);

// Earliest hit distance (meters along the unit direction) for each of n rays
// from (ox, oy) against all quads, limited to [0, range]; +inf when a ray
// hits nothing.
void ray_first_hits(double ox, double oy, const double* dir_x, const double* dir_y,
                    std::size_t n, double range, const QuadBatch& quads, double* t_hit);

// Sliding w-by-w window sums over a row-major rows-by-cols u32 grid into a
// (rows-w+1)-by-(cols-w+1) u64 output. Requires 1 <= w <= min(rows, cols).
void window_sums(const uint32_t* grid, int rows, int cols, int w, uint64_t* out);

// Sum of grid cells whose centers fall within radius r of (cx, cy). Cell
// (row, col) has its center at (x0 + col*k, y0 + row*k).
uint64_t disc_masked_sum(const uint32_t* grid, int rows, int cols, double x0, double y0,
                         double k, double cx, double cy, double r);

// Raw entry points of the scalar reference backend, exposed so equivalence
// tests can pin the SIMD variants against it regardless of dispatch state.
namespace scalar {
void segment_quad_intervals(double ax, double ay, double bx, double by, const QuadBatch& quads,
                            double* t0, double* t1);
void ray_first_hits(double ox, double oy, const double* dir_x, const double* dir_y,
                    std::size_t n, double range, const QuadBatch& quads, double* t_hit);
void window_sums(const uint32_t* grid, int rows, int cols, int w, uint64_t* out);
uint64_t disc_masked_sum(const uint32_t* grid, int rows, int cols, double x0, double y0,
                         double k, double cx, double cy, double r);
}  // namespace scalar

#if defined(V2XSIM_HAVE_AVX2_TU)
namespace avx2 {
void segment_quad_intervals(double ax, double ay, double bx, double by, const QuadBatch& quads,
                            double* t0, double* t1);
void ray_first_hits(double ox, double oy, const double* dir_x, const double* dir_y,
                    std::size_t n, double range, const QuadBatch& quads, double* t_hit);
void window_sums(const uint32_t* grid, int rows, int cols, int w, uint64_t* out);
uint64_t disc_masked_sum(const uint32_t* grid, int rows, int cols, double x0, double y0,
                         double k, double cx, double cy, double r);
}  // namespace avx2
#endif

}  // namespace v2xsim::kernels
