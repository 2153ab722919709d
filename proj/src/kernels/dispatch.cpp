#include "v2xsim/kernels.hpp"

#include <stdexcept>

namespace v2xsim::kernels {

void QuadBatch::clear() {
  for (int e = 0; e < 4; ++e) {
    qx[e].clear();
    qy[e].clear();
    nx[e].clear();
    ny[e].clear();
  }
  count = 0;
}

void QuadBatch::reserve(std::size_t n) {
  for (int e = 0; e < 4; ++e) {
    qx[e].reserve(n);
    qy[e].reserve(n);
    nx[e].reserve(n);
    ny[e].reserve(n);
  }
}

void QuadBatch::add_quad(const double (&vx)[4], const double (&vy)[4]) {
  for (int e = 0; e < 4; ++e) {
    const int f = (e + 1) & 3;
    qx[e].push_back(vx[e]);
    qy[e].push_back(vy[e]);
    nx[e].push_back(vy[f] - vy[e]);  // outward normal of a ccw edge: (dy, -dx)
    ny[e].push_back(vx[e] - vx[f]);
  }
  ++count;
}

namespace {

struct Vtable {
  void (*segment_quad_intervals)(double, double, double, double, const QuadBatch&, double*,
                                 double*);
  void (*ray_first_hits)(double, double, const double*, const double*, std::size_t, double,
                         const QuadBatch&, double*);
  void (*window_sums)(const uint32_t*, int, int, int, uint64_t*);
  uint64_t (*disc_masked_sum)(const uint32_t*, int, int, double, double, double, double, double,
                              double);
};

constexpr Vtable kScalarVtable{scalar::segment_quad_intervals, scalar::ray_first_hits,
                               scalar::window_sums, scalar::disc_masked_sum};

#if defined(V2XSIM_HAVE_AVX2_TU)
constexpr Vtable kAvx2Vtable{avx2::segment_quad_intervals, avx2::ray_first_hits,
                             avx2::window_sums, avx2::disc_masked_sum};
#endif

bool cpu_has_avx2() {
#if defined(V2XSIM_HAVE_AVX2_TU)
  return __builtin_cpu_supports("avx2") != 0;
#else
  return false;
#endif
}

Backend pick_default() { return cpu_has_avx2() ? Backend::Avx2 : Backend::Scalar; }

Backend g_backend = pick_default();

const Vtable& table() {
#if defined(V2XSIM_HAVE_AVX2_TU)
  if (g_backend == Backend::Avx2) return kAvx2Vtable;
#endif
  return kScalarVtable;
}

}  // namespace

bool backend_available(Backend b) {
  switch (b) {
    case Backend::Scalar:
      return true;
    case Backend::Avx2:
      return cpu_has_avx2();
  }
  return false;
}

Backend active_backend() { return g_backend; }

void set_backend(Backend b) {
  if (!backend_available(b)) {
    throw std::runtime_error("kernel backend not available: " + backend_name(b));
  }
  g_backend = b;
}

std::string backend_name(Backend b) {
  switch (b) {
    case Backend::Scalar:
      return "scalar";
    case Backend::Avx2:
      return "avx2";
  }
  return "unknown";
}

void segment_quad_intervals(double ax, double ay, double bx, double by, const QuadBatch& quads,
                            double* t0, double* t1) {
  table().segment_quad_intervals(ax, ay, bx, by, quads, t0, t1);
}

void ray_first_hits(double ox, double oy, const double* dir_x, const double* dir_y,
                    std::size_t n, double range, const QuadBatch& quads, double* t_hit) {
  table().ray_first_hits(ox, oy, dir_x, dir_y, n, range, quads, t_hit);
}

void window_sums(const uint32_t* grid, int rows, int cols, int w, uint64_t* out) {
  table().window_sums(grid, rows, cols, w, out);
}

uint64_t disc_masked_sum(const uint32_t* grid, int rows, int cols, double x0, double y0,
                         double k, double cx, double cy, double r) {
  return table().disc_masked_sum(grid, rows, cols, x0, y0, k, cx, cy, r);
}

}  // namespace v2xsim::kernels
