#include <immintrin.h>

#include <cmath>
#include <limits>
#include <vector>

#include "v2xsim/kernels.hpp"

// AVX2 backend. Must stay bit-identical to the scalar reference: no FMA, and
// every select maps to the same MINPD/MAXPD/blend semantics the scalar code
// spells out.

namespace v2xsim::kernels::avx2 {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

void segment_quad_intervals(double ax, double ay, double bx, double by, const QuadBatch& quads,
                            double* t0, double* t1) {
  const double dx = bx - ax;
  const double dy = by - ay;
  const __m256d vax = _mm256_set1_pd(ax);
  const __m256d vay = _mm256_set1_pd(ay);
  const __m256d vdx = _mm256_set1_pd(dx);
  const __m256d vdy = _mm256_set1_pd(dy);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d pinf = _mm256_set1_pd(kInf);
  const __m256d ninf = _mm256_set1_pd(-kInf);

  const std::size_t n4 = quads.count & ~std::size_t{3};
  std::size_t i = 0;
  for (; i < n4; i += 4) {
    __m256d tlo = zero;
    __m256d thi = one;
    __m256d infeasible = zero;  // all-zero mask
    for (int e = 0; e < 4; ++e) {
      const __m256d qx = _mm256_loadu_pd(quads.qx[e].data() + i);
      const __m256d qy = _mm256_loadu_pd(quads.qy[e].data() + i);
      const __m256d nx = _mm256_loadu_pd(quads.nx[e].data() + i);
      const __m256d ny = _mm256_loadu_pd(quads.ny[e].data() + i);
      const __m256d sd = _mm256_add_pd(_mm256_mul_pd(_mm256_sub_pd(vax, qx), nx),
                                       _mm256_mul_pd(_mm256_sub_pd(vay, qy), ny));
      const __m256d rate = _mm256_add_pd(_mm256_mul_pd(vdx, nx), _mm256_mul_pd(vdy, ny));
      const __m256d t = _mm256_div_pd(_mm256_sub_pd(zero, sd), rate);
      const __m256d m_pos = _mm256_cmp_pd(rate, zero, _CMP_GT_OQ);
      const __m256d m_neg = _mm256_cmp_pd(rate, zero, _CMP_LT_OQ);
      const __m256d m_bad = _mm256_and_pd(_mm256_cmp_pd(rate, zero, _CMP_EQ_OQ),
                                          _mm256_cmp_pd(sd, zero, _CMP_GT_OQ));
      thi = _mm256_blendv_pd(thi, _mm256_min_pd(thi, t), m_pos);
      tlo = _mm256_blendv_pd(tlo, _mm256_max_pd(tlo, t), m_neg);
      infeasible = _mm256_or_pd(infeasible, m_bad);
    }
    const __m256d empty =
        _mm256_or_pd(infeasible, _mm256_cmp_pd(tlo, thi, _CMP_GT_OQ));
    _mm256_storeu_pd(t0 + i, _mm256_blendv_pd(tlo, pinf, empty));
    _mm256_storeu_pd(t1 + i, _mm256_blendv_pd(thi, ninf, empty));
  }
  // tail: same arithmetic as the scalar reference
  for (; i < quads.count; ++i) {
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
  const __m256d zero = _mm256_setzero_pd();
  const __m256d vrange = _mm256_set1_pd(range);
  const __m256d pinf = _mm256_set1_pd(kInf);

  const std::size_t n4 = n & ~std::size_t{3};
  std::size_t r = 0;
  for (; r < n4; r += 4) {
    const __m256d dx = _mm256_loadu_pd(dir_x + r);
    const __m256d dy = _mm256_loadu_pd(dir_y + r);
    __m256d best = pinf;
    for (std::size_t i = 0; i < quads.count; ++i) {
      __m256d tlo = zero;
      __m256d thi = vrange;
      __m256d infeasible = zero;
      for (int e = 0; e < 4; ++e) {
        // sd depends only on the shared origin; computed in scalar exactly as
        // the reference does, then broadcast
        const double sd_s = (ox - quads.qx[e][i]) * quads.nx[e][i] +
                            (oy - quads.qy[e][i]) * quads.ny[e][i];
        const __m256d sd = _mm256_set1_pd(sd_s);
        const __m256d nx = _mm256_set1_pd(quads.nx[e][i]);
        const __m256d ny = _mm256_set1_pd(quads.ny[e][i]);
        const __m256d rate = _mm256_add_pd(_mm256_mul_pd(dx, nx), _mm256_mul_pd(dy, ny));
        const __m256d t = _mm256_div_pd(_mm256_sub_pd(zero, sd), rate);
        const __m256d m_pos = _mm256_cmp_pd(rate, zero, _CMP_GT_OQ);
        const __m256d m_neg = _mm256_cmp_pd(rate, zero, _CMP_LT_OQ);
        const __m256d m_bad = _mm256_and_pd(_mm256_cmp_pd(rate, zero, _CMP_EQ_OQ),
                                            _mm256_cmp_pd(sd, zero, _CMP_GT_OQ));
        thi = _mm256_blendv_pd(thi, _mm256_min_pd(thi, t), m_pos);
        tlo = _mm256_blendv_pd(tlo, _mm256_max_pd(tlo, t), m_neg);
        infeasible = _mm256_or_pd(infeasible, m_bad);
      }
      const __m256d valid =
          _mm256_andnot_pd(infeasible, _mm256_cmp_pd(tlo, thi, _CMP_LE_OQ));
      best = _mm256_blendv_pd(best, _mm256_min_pd(best, tlo), valid);
    }
    _mm256_storeu_pd(t_hit + r, best);
  }
  for (; r < n; ++r) {
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
    uint64_t* row_out = out + static_cast<std::size_t>(r) * out_cols;
    int c = 0;
    for (; c + 4 <= out_cols; c += 4) {
      const __m256i botw = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(bot + c + w));
      const __m256i topw = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(top + c + w));
      const __m256i botc = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(bot + c));
      const __m256i topc = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(top + c));
      const __m256i v = _mm256_sub_epi64(_mm256_sub_epi64(botw, topw),
                                         _mm256_sub_epi64(botc, topc));
      _mm256_storeu_si256(reinterpret_cast<__m256i*>(row_out + c), v);
    }
    for (; c < out_cols; ++c) {
      row_out[c] = bot[c + w] - top[c + w] - bot[c] + top[c];
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
  const __m256d vr2 = _mm256_set1_pd(r2);
  __m256i acc = _mm256_setzero_si256();
  uint64_t tail_sum = 0;
  for (int row = 0; row < rows; ++row) {
    const double dy = (y0 + static_cast<double>(row) * k) - cy;
    const double dy2 = dy * dy;
    const __m256d vdy2 = _mm256_set1_pd(dy2);
    const uint32_t* cells = grid + static_cast<std::size_t>(row) * cols;
    int c = 0;
    for (; c + 4 <= cols; c += 4) {
      const __m256d d2 = _mm256_add_pd(_mm256_loadu_pd(dx2.data() + c), vdy2);
      const __m256d mask = _mm256_cmp_pd(d2, vr2, _CMP_LE_OQ);
      const __m128i raw = _mm_loadu_si128(reinterpret_cast<const __m128i*>(cells + c));
      const __m256i wide = _mm256_cvtepu32_epi64(raw);
      const __m256i masked = _mm256_and_si256(wide, _mm256_castpd_si256(mask));
      acc = _mm256_add_epi64(acc, masked);
    }
    for (; c < cols; ++c) {
      if (dx2[c] + dy2 <= r2) tail_sum += cells[c];
    }
  }
  alignas(32) uint64_t lanes[4];
  _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), acc);
  return lanes[0] + lanes[1] + lanes[2] + lanes[3] + tail_sum;
}

}  // namespace v2xsim::kernels::avx2
