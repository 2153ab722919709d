#include "v2xsim/apm.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>

#include "v2xsim/kernels.hpp"

namespace v2xsim {

Point2 FramePose::to_world(Point2 local) const {
  const double c = std::cos(heading);
  const double s = std::sin(heading);
  return {center.x + c * local.x - s * local.y, center.y + s * local.x + c * local.y};
}

Point2 FramePose::to_local(Point2 world) const {
  const double c = std::cos(heading);
  const double s = std::sin(heading);
  const double dx = world.x - center.x;
  const double dy = world.y - center.y;
  return {c * dx + s * dy, -s * dx + c * dy};
}

Point2 GridFrame::cell_center_local(int row, int col) const {
  return {(static_cast<double>(col) - 0.5 * cols + 0.5) * k,
          (static_cast<double>(row) - 0.5 * rows + 0.5) * k};
}

std::optional<std::pair<int, int>> GridFrame::cell_of_world(Point2 world) const {
  const Point2 l = pose().to_local(world);
  const int col = static_cast<int>(std::floor(l.x / k + 0.5 * cols));
  const int row = static_cast<int>(std::floor(l.y / k + 0.5 * rows));
  if (row < 0 || row >= rows || col < 0 || col >= cols) return std::nullopt;
  return std::make_pair(row, col);
}

uint64_t Apm::total() const {
  uint64_t sum = 0;
  for (uint32_t c : cells) sum += c;
  return sum;
}

Apm build_apm(const std::vector<Point2>& samples, Point2 center, double heading, double k,
              int rows, int cols) {
  if (!(k > 0.0)) throw std::invalid_argument("build_apm: k must be > 0");
  if (rows < 1 || cols < 1) throw std::invalid_argument("build_apm: grid must be >= 1x1");
  Apm apm;
  apm.frame = {center, heading, k, rows, cols};
  apm.cells.assign(static_cast<std::size_t>(rows) * cols, 0);
  const FramePose pose = apm.frame.pose();
  for (const Point2& p : samples) {
    const Point2 l = pose.to_local(p);
    const int col = static_cast<int>(std::floor(l.x / k + 0.5 * cols));
    const int row = static_cast<int>(std::floor(l.y / k + 0.5 * rows));
    if (row < 0 || row >= rows || col < 0 || col >= cols) continue;  // pruned
    ++apm.cells[static_cast<std::size_t>(row) * cols + col];
  }
  return apm;
}

std::vector<BlindZone> find_blind_zones(const Apm& apm, double t1,
                                        const std::vector<int>& window_sizes) {
  const int rows = apm.frame.rows;
  const int cols = apm.frame.cols;
  if (t1 < 0.0) throw std::invalid_argument("find_blind_zones: t1 must be >= 0");
  for (int w : window_sizes) {
    if (w < 1 || w > std::min(rows, cols)) {
      throw std::domain_error("find_blind_zones: window size exceeds the grid");
    }
  }

  std::vector<uint8_t> covered(static_cast<std::size_t>(rows) * cols, 0);
  std::vector<uint64_t> sums;
  for (int w : window_sizes) {
    const int out_rows = rows - w + 1;
    const int out_cols = cols - w + 1;
    sums.assign(static_cast<std::size_t>(out_rows) * out_cols, 0);
    kernels::window_sums(apm.cells.data(), rows, cols, w, sums.data());
    const double limit = t1 * static_cast<double>(w) * static_cast<double>(w);
    for (int r = 0; r < out_rows; ++r) {
      for (int c = 0; c < out_cols; ++c) {
        if (static_cast<double>(sums[static_cast<std::size_t>(r) * out_cols + c]) < limit) {
          for (int rr = r; rr < r + w; ++rr) {
            std::fill_n(covered.begin() + static_cast<std::size_t>(rr) * cols + c, w,
                        uint8_t{1});
          }
        }
      }
    }
  }

  // connected components (4-neighborhood) of covered cells -> bounding boxes
  std::vector<BlindZone> zones;
  std::vector<uint8_t> seen(covered.size(), 0);
  std::deque<std::pair<int, int>> queue;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const std::size_t idx = static_cast<std::size_t>(r) * cols + c;
      if (!covered[idx] || seen[idx]) continue;
      int r0 = r, r1 = r, c0 = c, c1 = c;
      seen[idx] = 1;
      queue.emplace_back(r, c);
      while (!queue.empty()) {
        const auto [cr, cc] = queue.front();
        queue.pop_front();
        r0 = std::min(r0, cr);
        r1 = std::max(r1, cr);
        c0 = std::min(c0, cc);
        c1 = std::max(c1, cc);
        const int nr[4] = {cr - 1, cr + 1, cr, cr};
        const int nc[4] = {cc, cc, cc - 1, cc + 1};
        for (int n = 0; n < 4; ++n) {
          if (nr[n] < 0 || nr[n] >= rows || nc[n] < 0 || nc[n] >= cols) continue;
          const std::size_t nidx = static_cast<std::size_t>(nr[n]) * cols + nc[n];
          if (covered[nidx] && !seen[nidx]) {
            seen[nidx] = 1;
            queue.emplace_back(nr[n], nc[n]);
          }
        }
      }
      const double k = apm.frame.k;
      const double w_m = static_cast<double>(c1 - c0 + 1) * k;
      const double h_m = static_cast<double>(r1 - r0 + 1) * k;
      const Point2 center_local{(0.5 * (c0 + c1 + 1) - 0.5 * apm.frame.cols) * k,
                                (0.5 * (r0 + r1 + 1) - 0.5 * apm.frame.rows) * k};
      BlindZone zone;
      zone.center = apm.frame.pose().to_world(center_local);
      zone.range = 0.5 * std::hypot(w_m, h_m);
      zones.push_back(zone);
    }
  }
  return zones;
}

BlindZone transform_zone(const BlindZone& zone, const FramePose& from, const FramePose& to) {
  BlindZone out;
  out.center = to.to_local(from.to_world(zone.center));
  out.range = zone.range;
  return out;
}

double perception_benefit(const BlindZone& zone, const Apm& provider) {
  const GridFrame& f = provider.frame;
  const Point2 origin = f.cell_center_local(0, 0);
  const uint64_t sum = kernels::disc_masked_sum(provider.cells.data(), f.rows, f.cols, origin.x,
                                                origin.y, f.k, zone.center.x, zone.center.y,
                                                zone.range);
  return static_cast<double>(sum) * f.k * f.k;
}

BenefitReport make_benefit_report(uint32_t candidate_id, double benefit, double t2) {
  return {candidate_id, benefit, benefit >= t2};
}

std::vector<uint32_t> should_trigger_fusion(const std::vector<BenefitReport>& reports,
                                            double t2) {
  if (t2 < 0.0) throw std::invalid_argument("should_trigger_fusion: t2 must be >= 0");
  std::vector<const BenefitReport*> hits;
  for (const auto& r : reports) {
    if (r.benefit >= t2) hits.push_back(&r);
  }
  std::sort(hits.begin(), hits.end(), [](const BenefitReport* a, const BenefitReport* b) {
    if (a->benefit != b->benefit) return a->benefit > b->benefit;
    return a->candidate_id < b->candidate_id;
  });
  std::vector<uint32_t> ids;
  ids.reserve(hits.size());
  for (const auto* r : hits) ids.push_back(r->candidate_id);
  return ids;
}

namespace {

void put_u16(std::vector<uint8_t>& out, uint16_t v) {
  out.push_back(static_cast<uint8_t>(v >> 8));
  out.push_back(static_cast<uint8_t>(v));
}

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
  for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<uint8_t>(v >> s));
}

void put_u64(std::vector<uint8_t>& out, uint64_t v) {
  for (int s = 56; s >= 0; s -= 8) out.push_back(static_cast<uint8_t>(v >> s));
}

void put_f64(std::vector<uint8_t>& out, double v) { put_u64(out, std::bit_cast<uint64_t>(v)); }

struct Reader {
  const std::vector<uint8_t>& buf;
  std::size_t pos = 0;

  void need(std::size_t n, const char* what) const {
    if (pos + n > buf.size()) throw ApmDecodeError(buf.size(), std::string("truncated ") + what);
  }
  uint16_t u16(const char* what) {
    need(2, what);
    const uint16_t v = static_cast<uint16_t>((buf[pos] << 8) | buf[pos + 1]);
    pos += 2;
    return v;
  }
  uint32_t u32(const char* what) {
    need(4, what);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | buf[pos + i];
    pos += 4;
    return v;
  }
  uint64_t u64(const char* what) {
    need(8, what);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | buf[pos + i];
    pos += 8;
    return v;
  }
  double f64(const char* what) { return std::bit_cast<double>(u64(what)); }
};

uint16_t quantize_height_cm(double meters) {
  const double cm = std::clamp(meters, 0.0, 655.35) * 100.0;
  return static_cast<uint16_t>(std::llround(cm));
}

int16_t quantize_speed_cms(double mps) {
  const double cms = std::clamp(mps, -327.67, 327.67) * 100.0;
  return static_cast<int16_t>(std::llround(cms));
}

}  // namespace

std::vector<uint8_t> serialize_apm(const Apm& apm, const MobilityHeightLayer* layer,
                                   uint32_t source_id, double timestamp) {
  const std::size_t n_cells = apm.cells.size();
  if (layer && layer->cells.size() != n_cells) {
    throw std::invalid_argument("serialize_apm: layer size does not match grid");
  }
  std::vector<uint8_t> out;
  out.reserve(54 + 4 * n_cells + (layer ? 6 * n_cells : 0));
  out.push_back('A');
  out.push_back('P');
  out.push_back('M');
  out.push_back('1');
  put_u16(out, layer ? 0x0001 : 0x0000);
  put_u32(out, source_id);
  put_f64(out, timestamp);
  put_f64(out, apm.frame.center.x);
  put_f64(out, apm.frame.center.y);
  put_f64(out, apm.frame.heading);
  put_f64(out, apm.frame.k);
  put_u16(out, static_cast<uint16_t>(apm.frame.rows));
  put_u16(out, static_cast<uint16_t>(apm.frame.cols));
  for (uint32_t c : apm.cells) put_u32(out, c);
  if (layer) {
    for (const auto& cell : layer->cells) {
      put_u16(out, quantize_height_cm(cell.max_height));
      put_u16(out, static_cast<uint16_t>(quantize_speed_cms(cell.mean_velocity.x)));
      put_u16(out, static_cast<uint16_t>(quantize_speed_cms(cell.mean_velocity.y)));
    }
  }
  return out;
}

ApmMessage deserialize_apm(const std::vector<uint8_t>& bytes) {
  Reader rd{bytes};
  rd.need(4, "magic");
  if (bytes[0] != 'A' || bytes[1] != 'P' || bytes[2] != 'M' || bytes[3] != '1') {
    throw ApmDecodeError(0, "bad magic");
  }
  rd.pos = 4;
  const uint16_t flags = rd.u16("flags");
  if (flags & ~uint16_t{0x0001}) throw ApmDecodeError(4, "unknown flag bits");

  ApmMessage msg;
  msg.source_id = rd.u32("source id");
  msg.timestamp = rd.f64("timestamp");
  const std::size_t frame_off = rd.pos;
  msg.apm.frame.center.x = rd.f64("center x");
  msg.apm.frame.center.y = rd.f64("center y");
  msg.apm.frame.heading = rd.f64("heading");
  msg.apm.frame.k = rd.f64("resolution");
  if (!std::isfinite(msg.apm.frame.center.x) || !std::isfinite(msg.apm.frame.center.y) ||
      !std::isfinite(msg.apm.frame.heading)) {
    throw ApmDecodeError(frame_off, "non-finite frame fields");
  }
  if (!(msg.apm.frame.k > 0.0) || !std::isfinite(msg.apm.frame.k)) {
    throw ApmDecodeError(frame_off + 24, "resolution must be positive");
  }
  const std::size_t dims_off = rd.pos;
  msg.apm.frame.rows = rd.u16("rows");
  msg.apm.frame.cols = rd.u16("cols");
  if (msg.apm.frame.rows < 1 || msg.apm.frame.cols < 1) {
    throw ApmDecodeError(dims_off, "grid dimensions must be >= 1");
  }

  const std::size_t n_cells =
      static_cast<std::size_t>(msg.apm.frame.rows) * static_cast<std::size_t>(msg.apm.frame.cols);
  msg.apm.cells.reserve(n_cells);
  for (std::size_t i = 0; i < n_cells; ++i) msg.apm.cells.push_back(rd.u32("cell"));

  if (flags & 0x0001) {
    MobilityHeightLayer layer;
    layer.frame = msg.apm.frame;
    layer.cells.reserve(n_cells);
    for (std::size_t i = 0; i < n_cells; ++i) {
      MobilityHeightCell cell;
      cell.max_height = static_cast<double>(rd.u16("layer height")) / 100.0;
      cell.mean_velocity.x = static_cast<double>(static_cast<int16_t>(rd.u16("layer vx"))) / 100.0;
      cell.mean_velocity.y = static_cast<double>(static_cast<int16_t>(rd.u16("layer vy"))) / 100.0;
      cell.sample_count = (cell.max_height > 0.0 || cell.mean_velocity.x != 0.0 ||
                           cell.mean_velocity.y != 0.0)
                              ? 1
                              : 0;
      layer.cells.push_back(cell);
    }
    msg.layer = std::move(layer);
  }
  if (rd.pos != bytes.size()) throw ApmDecodeError(rd.pos, "trailing bytes");
  return msg;
}

namespace {

// Separating-axis overlap test between an axis-aligned cell rectangle and a
// convex quad, both in the grid's local frame.
bool rect_quad_overlap(double rx0, double ry0, double rx1, double ry1, const Point2 (&q)[4]) {
  double qminx = q[0].x, qmaxx = q[0].x, qminy = q[0].y, qmaxy = q[0].y;
  for (int i = 1; i < 4; ++i) {
    qminx = std::min(qminx, q[i].x);
    qmaxx = std::max(qmaxx, q[i].x);
    qminy = std::min(qminy, q[i].y);
    qmaxy = std::max(qmaxy, q[i].y);
  }
  if (qmaxx < rx0 || qminx > rx1 || qmaxy < ry0 || qminy > ry1) return false;
  const Point2 rect[4] = {{rx0, ry0}, {rx1, ry0}, {rx1, ry1}, {rx0, ry1}};
  for (int e = 0; e < 4; ++e) {
    const Point2 a = q[e];
    const Point2 b = q[(e + 1) & 3];
    const double nx = b.y - a.y;
    const double ny = a.x - b.x;
    double min_r = 1e300;
    for (int i = 0; i < 4; ++i) {
      min_r = std::min(min_r, (rect[i].x - a.x) * nx + (rect[i].y - a.y) * ny);
    }
    if (min_r > 0.0) return false;  // rectangle fully outside this edge
  }
  return true;
}

}  // namespace

MobilityHeightLayer build_mobility_height_layer(const WorldState& world, const Apm& apm) {
  MobilityHeightLayer layer;
  layer.frame = apm.frame;
  const std::size_t n = static_cast<std::size_t>(apm.frame.rows) * apm.frame.cols;
  layer.cells.assign(n, {});
  std::vector<Vec2> vel_sum(n, Vec2{});

  const FramePose pose = apm.frame.pose();
  const double k = apm.frame.k;
  const double half_w = 0.5 * apm.frame.cols * k;
  const double half_h = 0.5 * apm.frame.rows * k;

  for (const auto& v : world.vehicles) {
    const Footprint f = v.footprint();
    Point2 local[4];
    double minx = 1e300, maxx = -1e300, miny = 1e300, maxy = -1e300;
    for (int i = 0; i < 4; ++i) {
      local[i] = pose.to_local(f.vertices[i]);
      minx = std::min(minx, local[i].x);
      maxx = std::max(maxx, local[i].x);
      miny = std::min(miny, local[i].y);
      maxy = std::max(maxy, local[i].y);
    }
    if (maxx < -half_w || minx > half_w || maxy < -half_h || miny > half_h) continue;
    const int c0 = std::max(0, static_cast<int>(std::floor(minx / k + 0.5 * apm.frame.cols)));
    const int c1 = std::min(apm.frame.cols - 1,
                            static_cast<int>(std::floor(maxx / k + 0.5 * apm.frame.cols)));
    const int r0 = std::max(0, static_cast<int>(std::floor(miny / k + 0.5 * apm.frame.rows)));
    const int r1 = std::min(apm.frame.rows - 1,
                            static_cast<int>(std::floor(maxy / k + 0.5 * apm.frame.rows)));
    for (int r = r0; r <= r1; ++r) {
      const double ry0 = (static_cast<double>(r) - 0.5 * apm.frame.rows) * k;
      for (int c = c0; c <= c1; ++c) {
        const double rx0 = (static_cast<double>(c) - 0.5 * apm.frame.cols) * k;
        if (!rect_quad_overlap(rx0, ry0, rx0 + k, ry0 + k, local)) continue;
        const std::size_t idx = static_cast<std::size_t>(r) * apm.frame.cols + c;
        MobilityHeightCell& cell = layer.cells[idx];
        cell.max_height = std::max(cell.max_height, v.height);
        vel_sum[idx] = vel_sum[idx] + v.velocity;
        ++cell.sample_count;
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (layer.cells[i].sample_count > 0) {
      const double inv = 1.0 / static_cast<double>(layer.cells[i].sample_count);
      layer.cells[i].mean_velocity = inv * vel_sum[i];
    }
  }
  return layer;
}

std::vector<Point2> synth_perception(const WorldState& world, const VehicleState& sensor,
                                     int rays, double max_range, double step) {
  std::vector<Footprint> obstacles;
  obstacles.reserve(world.vehicles.size() + world.buildings.size());
  for (const auto& v : world.vehicles) {
    if (v.id == sensor.id) continue;
    obstacles.push_back(v.footprint());
  }
  for (const auto& b : world.buildings) obstacles.push_back(b.footprint);
  return cast_rays(sensor.position, obstacles, rays, max_range, step);
}

}  // namespace v2xsim
