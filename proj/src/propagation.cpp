#include "v2xsim/propagation.hpp"

#include <cmath>
#include <stdexcept>

namespace v2xsim {

void ChannelParams::set_frequency(double hz) {
  if (!(hz > 0.0)) throw std::invalid_argument("carrier frequency must be > 0");
  carrier_frequency_hz = hz;
  wavelength_m = kSpeedOfLight / hz;
}

void ChannelParams::validate() const {
  if (!(carrier_frequency_hz > 0.0) || !(wavelength_m > 0.0)) {
    throw std::invalid_argument("channel: frequency and wavelength must be > 0");
  }
  const double expected = kSpeedOfLight / carrier_frequency_hz;
  if (std::abs(wavelength_m - expected) > 1e-6 * expected) {
    throw std::invalid_argument("channel: wavelength inconsistent with carrier frequency");
  }
  if (!(receiver_sensitivity_dbm > noise_floor_dbm)) {
    throw std::invalid_argument("channel: sensitivity must exceed the noise floor");
  }
  if (!(bitrate_bps > 0.0) || !(bandwidth_hz > 0.0) || !(psr_shape_db > 0.0)) {
    throw std::invalid_argument("channel: bitrate, bandwidth and psr shape must be > 0");
  }
}

double LinkBudget::total_vehicle_loss_db() const {
  double sum = 0.0;
  for (const auto& vl : vehicle_losses) sum += vl.loss_db;
  return sum;
}

double fresnel_nu(double h, double wavelength, double d1, double d2) {
  if (!(wavelength > 0.0)) throw std::domain_error("fresnel_nu: wavelength must be > 0");
  if (!(d1 > 0.0) || !(d2 > 0.0)) throw std::domain_error("fresnel_nu: d1, d2 must be > 0");
  return h * std::sqrt((1.0 / wavelength) * (1.0 / d1 + 1.0 / d2));
}

double knife_edge_loss(double nu) {
  if (nu <= 0.0) return 0.0;
  const double u = nu - 0.1;
  return 6.9 + 20.0 * std::log10(std::sqrt(u * u + 1.0) + u);
}

double free_space_loss(double distance, double wavelength) {
  if (!(distance > 0.0)) throw std::domain_error("free_space_loss: distance must be > 0");
  if (!(wavelength > 0.0)) throw std::domain_error("free_space_loss: wavelength must be > 0");
  return 20.0 * std::log10(4.0 * M_PI * distance / wavelength);
}

double building_penetration_loss(int crossings) {
  if (crossings < 0) throw std::domain_error("building_penetration_loss: negative crossings");
  return 9.6 * static_cast<double>(crossings);
}

double packet_success_probability(double rx_power_dbm, const ChannelParams& params) {
  const double margin = (rx_power_dbm - params.receiver_sensitivity_dbm) / params.psr_shape_db;
  return 1.0 / (1.0 + std::exp(-margin));
}

WorldIndex WorldIndex::build(const WorldState& world) {
  WorldIndex index;
  index.vehicle_quads.reserve(world.vehicles.size());
  index.vehicle_ids.reserve(world.vehicles.size());
  for (const auto& v : world.vehicles) {
    const Footprint f = v.footprint();
    double vx[4], vy[4];
    for (int i = 0; i < 4; ++i) {
      vx[i] = f.vertices[i].x;
      vy[i] = f.vertices[i].y;
    }
    index.vehicle_quads.add_quad(vx, vy);
    index.vehicle_ids.push_back(v.id);
    index.vehicle_heights.push_back(v.height);
    index.vehicle_velocities.push_back(v.velocity);
  }
  index.building_quads.reserve(world.buildings.size());
  for (const auto& b : world.buildings) {
    if (b.footprint.vertices.size() != 4) {
      throw std::invalid_argument("WorldIndex: building footprints must be quads");
    }
    double vx[4], vy[4];
    for (int i = 0; i < 4; ++i) {
      vx[i] = b.footprint.vertices[i].x;
      vy[i] = b.footprint.vertices[i].y;
    }
    index.building_quads.add_quad(vx, vy);
    index.building_wall_factor.push_back(b.walls_per_crossing);
  }
  return index;
}

namespace {

// Validates a kernel-produced interval the same way clip_segment does:
// non-degenerate overlap whose chord midpoint is strictly interior.
bool interval_is_real(const kernels::QuadBatch& quads, std::size_t i, double ax, double ay,
                      double dx, double dy, double t0, double t1, double eps_t) {
  if (!(t1 - t0 > eps_t)) return false;
  const double tm = 0.5 * (t0 + t1);
  const double mx = ax + tm * dx;
  const double my = ay + tm * dy;
  for (int e = 0; e < 4; ++e) {
    const double nx = quads.nx[e][i];
    const double ny = quads.ny[e][i];
    const double nl = std::sqrt(nx * nx + ny * ny);
    if ((mx - quads.qx[e][i]) * nx + (my - quads.qy[e][i]) * ny > -kGeomEps * nl) return false;
  }
  return true;
}

}  // namespace

LinkBudget link_budget(const AntennaPoint& tx, const AntennaPoint& rx, const WorldIndex& index,
                       const ChannelParams& params, const std::set<uint32_t>& exclude_ids) {
  const double dist2d = distance(tx.position, rx.position);
  if (!(dist2d > kGeomEps)) {
    throw std::domain_error("link_budget: tx and rx positions must differ");
  }
  const double dh = rx.antenna_height - tx.antenna_height;
  const double dist3d = std::sqrt(dist2d * dist2d + dh * dh);
  const double eps_t = kGeomEps / dist2d;
  const double ax = tx.position.x;
  const double ay = tx.position.y;
  const double dx = rx.position.x - ax;
  const double dy = rx.position.y - ay;

  LinkBudget budget;
  budget.distance_m = dist3d;
  budget.fspl_db = free_space_loss(dist3d, params.wavelength_m);

  // building walls
  double building_loss = 0.0;
  if (index.building_quads.count > 0) {
    std::vector<double> t0(index.building_quads.count), t1(index.building_quads.count);
    kernels::segment_quad_intervals(ax, ay, rx.position.x, rx.position.y, index.building_quads,
                                    t0.data(), t1.data());
    for (std::size_t i = 0; i < index.building_quads.count; ++i) {
      if (!interval_is_real(index.building_quads, i, ax, ay, dx, dy, t0[i], t1[i], eps_t)) {
        continue;
      }
      int crossings = 0;
      if (t0[i] > eps_t) ++crossings;
      if (t1[i] < 1.0 - eps_t) ++crossings;
      building_loss += building_penetration_loss(crossings) * index.building_wall_factor[i];
    }
  }
  budget.building_loss_db = building_loss;

  // per-vehicle knife edges
  if (index.vehicle_quads.count > 0) {
    std::vector<double> t0(index.vehicle_quads.count), t1(index.vehicle_quads.count);
    kernels::segment_quad_intervals(ax, ay, rx.position.x, rx.position.y, index.vehicle_quads,
                                    t0.data(), t1.data());
    for (std::size_t i = 0; i < index.vehicle_quads.count; ++i) {
      if (exclude_ids.count(index.vehicle_ids[i]) != 0) continue;
      if (!interval_is_real(index.vehicle_quads, i, ax, ay, dx, dy, t0[i], t1[i], eps_t)) {
        continue;
      }
      const double tm = 0.5 * (t0[i] + t1[i]);
      const double d1 = tm * dist2d;
      const double d2 = (1.0 - tm) * dist2d;
      const double line_h = tx.antenna_height + tm * (rx.antenna_height - tx.antenna_height);
      const double h = index.vehicle_heights[i] - line_h;
      const double nu = fresnel_nu(h, params.wavelength_m, d1, d2);
      budget.vehicle_losses.push_back({index.vehicle_ids[i], knife_edge_loss(nu)});
    }
  }

  double rx_power = params.tx_power_dbm - budget.fspl_db - budget.building_loss_db;
  for (const auto& vl : budget.vehicle_losses) rx_power -= vl.loss_db;
  budget.rx_power_dbm = rx_power;
  return budget;
}

LinkBudget link_budget(const AntennaPoint& tx, const AntennaPoint& rx, const WorldState& world,
                       const ChannelParams& params, const std::set<uint32_t>& exclude_ids) {
  return link_budget(tx, rx, WorldIndex::build(world), params, exclude_ids);
}

}  // namespace v2xsim
