#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "v2xsim/geometry.hpp"
#include "v2xsim/rng.hpp"

namespace v2xsim {

enum class VehicleRole { Ego, Collision, SharingNode, Blocking, Background };

struct VehicleState {
  uint32_t id = 0;
  VehicleRole role = VehicleRole::Background;
  Point2 position;
  Vec2 velocity;
  double heading = 0.0;  // radians, world frame
  double length = 4.6;
  double width = 1.8;
  double height = 1.45;
  double antenna_height = 1.6;
  bool v2x_enabled = true;
  int lane_index = -1;  // background lane assignment; -1 for scripted actors

  double speed() const { return norm(velocity); }
  Footprint footprint() const { return Footprint::box(position, length, width, heading, height); }
  AntennaPoint antenna() const { return {position, antenna_height}; }
};

struct Building {
  Footprint footprint;
  double walls_per_crossing = 1.0;
};

struct ScenarioConfig {
  double spawn_spacing_N = 50.0;   // mean along-lane meters between background vehicles
  double ego_target_speed = 30.0;  // km/h
  double duration = 12.0;          // seconds
  uint64_t seed = 1;
  double lane_width = 3.5;         // meters
  std::vector<double> blocking_vehicle_heights = {4.0, 3.0, 4.0, 3.0, 4.0};

  void validate() const;  // throws std::invalid_argument
};

// One directed traffic lane. Vertical lanes run along y at x = offset,
// horizontal lanes along x at y = offset.
struct Lane {
  bool vertical = true;
  double offset = 0.0;
  double direction = 1.0;  // +1 along the axis, -1 against it
  double speed_mps = 11.11;
};

struct WorldState {
  double clock = 0.0;
  std::vector<VehicleState> vehicles;
  std::vector<Building> buildings;

  // evolution context carried across snapshots
  ScenarioConfig config;
  std::vector<Lane> lanes;
  Rng spawn_rng{0};
  double map_half_extent = 250.0;

  const VehicleState* find(VehicleRole role) const;
  const VehicleState* find_id(uint32_t id) const;
};

// Builds the occluded-intersection world: a five-lane vertical road crossed
// by a four-lane horizontal road, corner building blocks, the scripted
// actors (ego, red-light-running collision vehicle, parked corner sharing
// node, tall blockers queued in the turn lanes), and Poisson background
// traffic with mean per-lane spacing N.
WorldState generate_intersection(const ScenarioConfig& config);

// Advances every vehicle along its straight lane trajectory; background
// vehicles leaving the map re-enter upstream with a fresh exponential gap.
WorldState step_mobility(const WorldState& world, double dt);

}  // namespace v2xsim
