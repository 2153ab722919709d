#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "v2xsim/geometry.hpp"
#include "v2xsim/kernels.hpp"
#include "v2xsim/scenario.hpp"

namespace v2xsim {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

// DSRC-class radio defaults (5.9 GHz ITS band, 26 dBm class C device).
struct ChannelParams {
  double tx_power_dbm = 26.0;
  double carrier_frequency_hz = 5.9e9;
  double wavelength_m = kSpeedOfLight / 5.9e9;
  double noise_floor_dbm = -98.0;
  double receiver_sensitivity_dbm = -94.0;
  double bitrate_bps = 6e6;
  double bandwidth_hz = 10e6;
  double psr_shape_db = 1.0;  // logistic slope of the packet-success curve

  void set_frequency(double hz);
  void validate() const;  // throws std::invalid_argument on inconsistency
};

struct VehicleLoss {
  uint32_t obstacle_id = 0;
  double loss_db = 0.0;
};

struct LinkBudget {
  double distance_m = 0.0;
  double fspl_db = 0.0;
  double building_loss_db = 0.0;
  std::vector<VehicleLoss> vehicle_losses;
  double rx_power_dbm = 0.0;

  double total_vehicle_loss_db() const;
};

// Fresnel-Kirchhoff diffraction parameter for a single knife edge of relative
// height h over a link split into d1 + d2.
double fresnel_nu(double h, double wavelength, double d1, double d2);

// Single knife-edge diffraction loss in dB; zero for edges at or below the
// direct line (nu <= 0).
double knife_edge_loss(double nu);

double free_space_loss(double distance, double wavelength);

// 9.6 dB per wall crossed.
double building_penetration_loss(int crossings);

double packet_success_probability(double rx_power_dbm, const ChannelParams& params);

// Flattened per-tick view of the world for batched segment tests.
struct WorldIndex {
  kernels::QuadBatch vehicle_quads;
  std::vector<uint32_t> vehicle_ids;
  std::vector<double> vehicle_heights;
  std::vector<Vec2> vehicle_velocities;
  kernels::QuadBatch building_quads;
  std::vector<double> building_wall_factor;

  static WorldIndex build(const WorldState& world);
};

LinkBudget link_budget(const AntennaPoint& tx, const AntennaPoint& rx, const WorldIndex& index,
                       const ChannelParams& params, const std::set<uint32_t>& exclude_ids);

LinkBudget link_budget(const AntennaPoint& tx, const AntennaPoint& rx, const WorldState& world,
                       const ChannelParams& params, const std::set<uint32_t>& exclude_ids);

}  // namespace v2xsim
