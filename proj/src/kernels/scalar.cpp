#include <cmath>
#include <limits>
#include <vector>

#include "v2xsim/kernels.hpp"

// Scalar reference backend. Selection expressions deliberately mirror the
// AVX2 min/max/blend semantics (MINPD(a,b) == (a < b) ? a : b picks the
// second operand on ties and NaNs) so the two backends stay bit-identical.

namespace v2xsim::kernels::scalar {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void segment_quad_intervals(double ax, double ay, double bx, double by, const QuadBatch& quads,
                            double* t0, double* t1) {
  const double dx = bx - ax;
  const double dy = by - ay;
  for (std::size_t i = 0; i < quads.count; ++i) {
    double tlo = 0.0;
    double thi = 1.0;
    bool infeasible = false;
    for (int e = 0; e < 4; ++e) {
      const double sd = (ax - quads.qx[e][i]) * quads.nx[e][i] +
                        (ay - quads.qy[e][i]) * quads.ny[e][i];
      const double rate = dx * quads.nx[e][i] + dy * quads.ny[e][i];
      const double t = -sd / rate;
      if (rate > 0.0) {
        thi = (thi < t) ? thi : t;
      } else if (rate < 0.0) {
        tlo = (tlo > t) ? tlo : t;
      } else if (sd > 0.0) {
        infeasible = true;
      }
    }
    if (infeasible || tlo > thi) {
      t0[i] = kInf;
      t1[i] = -kInf;
    } else {
      t0[i] = tlo;
      t1[i] = thi;
    }
  }
}

void ray_first_hits(double ox, double oy, const double* dir_x, const double* dir_y,
                    std::size_t n, double range, const QuadBatch& quads, double* t_hit) {
  for (std::size_t r = 0; r < n; ++r) {
    const double dx = dir_x[r];
    const double dy = dir_y[r];
    double best = kInf;
    for (std::size_t i = 0; i < quads.count; ++i) {
      double tlo = 0.0;
      double thi = range;
      bool infeasible = false;
      for (int e = 0; e < 4; ++e) {
        const double sd = (ox - quads.qx[e][i]) * quads.nx[e][i] +
                          (oy - quads.qy[e][i]) * quads.ny[e][i];
        const double rate = dx * quads.nx[e][i] + dy * quads.ny[e][i];
        const double t = -sd / rate;
        if (rate > 0.0) {
          thi = (thi < t) ? thi : t;
        } else if (rate < 0.0) {
          tlo = (tlo > t) ? tlo : t;
        } else if (sd > 0.0) {
          infeasible = true;
        }
      }
      if (!infeasible && tlo <= thi) {
        best = (best < tlo) ? best : tlo;
      }
    }
    t_hit[r] = best;
  }
}

void window_sums(const uint32_t* grid, int rows, int cols, int w, uint64_t* out) {
  // summed-area table with one padding row/column of zeros
  const int sn = cols + 1;
  std::vector<uint64_t> sat(static_cast<std::size_t>(rows + 1) * sn, 0);
  for (int r = 0; r < rows; ++r) {
    uint64_t row_sum = 0;
    for (int c = 0; c < cols; ++c) {
      row_sum += grid[static_cast<std::size_t>(r) * cols + c];
      sat[static_cast<std::size_t>(r + 1) * sn + (c + 1)] =
          sat[static_cast<std::size_t>(r) * sn + (c + 1)] + row_sum;
    }
  }
  const int out_rows = rows - w + 1;
  const int out_cols = cols - w + 1;
  for (int r = 0; r < out_rows; ++r) {
    const uint64_t* top = sat.data() + static_cast<std::size_t>(r) * sn;
    const uint64_t* bot = sat.data() + static_cast<std::size_t>(r + w) * sn;
    for (int c = 0; c < out_cols; ++c) {
      out[static_cast<std::size_t>(r) * out_cols + c] =
          bot[c + w] - top[c + w] - bot[c] + top[c];
    }
  }
}

uint64_t disc_masked_sum(const uint32_t* grid, int rows, int cols, double x0, double y0,
                         double k, double cx, double cy, double r) {
  const double r2 = r * r;
  std::vector<double> dx2(static_cast<std::size_t>(cols));
  for (int c = 0; c < cols; ++c) {
    const double dx = (x0 + static_cast<double>(c) * k) - cx;
    dx2[c] = dx * dx;
  }
  uint64_t sum = 0;
  for (int row = 0; row < rows; ++row) {
    const double dy = (y0 + static_cast<double>(row) * k) - cy;
    const double dy2 = dy * dy;
    const uint32_t* cells = grid + static_cast<std::size_t>(row) * cols;
    for (int c = 0; c < cols; ++c) {
      if (dx2[c] + dy2 <= r2) sum += cells[c];
    }
  }
  return sum;
}

}  // namespace v2xsim::kernels::scalar
