#include "v2xsim/scenario.hpp"

#include <cmath>
#include <stdexcept>

namespace v2xsim {

namespace {

constexpr double kMapHalfExtent = 250.0;
constexpr double kDespawnMargin = 5.0;
constexpr double kBackgroundSpeedKmh = 40.0;
constexpr double kCollisionSpeedKmh = 40.0;
constexpr double kBuildingSetback = 5.0;
constexpr double kBuildingHeight = 12.0;
constexpr double kEgoStartY = -90.0;
constexpr double kMinSpawnClearance = 9.0;

double kmh(double v) { return v / 3.6; }

struct BodyDims {
  double length, width, height, antenna;
};

constexpr BodyDims kSedan{4.6, 1.8, 1.45, 1.6};
constexpr BodyDims kSuv{4.8, 1.9, 1.75, 1.9};
constexpr BodyDims kBoxTruck{7.5, 2.4, 3.5, 2.5};
constexpr BodyDims kHeavy{12.0, 2.5, 4.0, 2.5};  // height overridden per config

void apply_dims(VehicleState& v, const BodyDims& d) {
  v.length = d.length;
  v.width = d.width;
  v.height = d.height;
  v.antenna_height = d.antenna;
}

}  // namespace

void ScenarioConfig::validate() const {
  if (!(spawn_spacing_N > 0.0)) throw std::invalid_argument("spawn_spacing_N must be > 0");
  if (!(duration > 0.0)) throw std::invalid_argument("duration must be > 0");
  if (!(ego_target_speed > 0.0)) throw std::invalid_argument("ego_target_speed must be > 0");
  if (!(lane_width > 0.0)) throw std::invalid_argument("lane_width must be > 0");
  for (double h : blocking_vehicle_heights) {
    if (!(h > 0.0)) throw std::invalid_argument("blocking vehicle heights must be > 0");
  }
}

const VehicleState* WorldState::find(VehicleRole role) const {
  for (const auto& v : vehicles) {
    if (v.role == role) return &v;
  }
  return nullptr;
}

const VehicleState* WorldState::find_id(uint32_t id) const {
  for (const auto& v : vehicles) {
    if (v.id == id) return &v;
  }
  return nullptr;
}

WorldState generate_intersection(const ScenarioConfig& config) {
  config.validate();
  const double w = config.lane_width;
  const double v_road_half = 2.5 * w;  // five vertical lanes
  const double h_road_half = 2.0 * w;  // four horizontal lanes

  WorldState world;
  world.config = config;
  world.map_half_extent = kMapHalfExtent;
  world.spawn_rng = derive_stream(config.seed, "spawn");

  // Vertical road: lanes 0-1 southbound (west side), 2-4 northbound.
  for (int i = 0; i < 5; ++i) {
    Lane lane;
    lane.vertical = true;
    lane.offset = w * (static_cast<double>(i) - 2.0);
    lane.direction = (i < 2) ? -1.0 : 1.0;
    lane.speed_mps = kmh(kBackgroundSpeedKmh);
    world.lanes.push_back(lane);
  }
  // Horizontal road: lanes 0-1 eastbound (south side), 2-3 westbound.
  for (int j = 0; j < 4; ++j) {
    Lane lane;
    lane.vertical = false;
    lane.offset = w * (static_cast<double>(j) - 1.5);
    lane.direction = (j < 2) ? 1.0 : -1.0;
    lane.speed_mps = kmh(kBackgroundSpeedKmh);
    world.lanes.push_back(lane);
  }

  // Four corner building blocks between the road edges and the map edge.
  const double bx = v_road_half + kBuildingSetback;
  const double by = h_road_half + kBuildingSetback;
  const double ext = kMapHalfExtent;
  const double sx[4] = {1.0, -1.0, -1.0, 1.0};
  const double sy[4] = {1.0, 1.0, -1.0, -1.0};
  for (int c = 0; c < 4; ++c) {
    const double x0 = std::min(sx[c] * bx, sx[c] * ext);
    const double x1 = std::max(sx[c] * bx, sx[c] * ext);
    const double y0 = std::min(sy[c] * by, sy[c] * ext);
    const double y1 = std::max(sy[c] * by, sy[c] * ext);
    Building b;
    b.footprint = Footprint::box({0.5 * (x0 + x1), 0.5 * (y0 + y1)}, x1 - x0, y1 - y0, 0.0,
                                 kBuildingHeight);
    world.buildings.push_back(b);
  }

  uint32_t next_id = 1;
  const double ego_speed = kmh(config.ego_target_speed);

  // Ego: northbound in the center lane, approaching from the south.
  VehicleState ego;
  ego.id = next_id++;
  ego.role = VehicleRole::Ego;
  apply_dims(ego, kSedan);
  ego.antenna_height = 1.5;
  ego.position = {0.0, kEgoStartY};
  ego.velocity = {0.0, ego_speed};
  ego.heading = M_PI / 2.0;
  world.vehicles.push_back(ego);

  // Collision vehicle: westbound through the red light, timed to reach the
  // intersection center together with the ego.
  const double t_arrive = -kEgoStartY / ego_speed;
  VehicleState col;
  col.id = next_id++;
  col.role = VehicleRole::Collision;
  apply_dims(col, kSedan);
  col.position = {kmh(kCollisionSpeedKmh) * t_arrive, 0.5 * w};
  col.velocity = {-kmh(kCollisionSpeedKmh), 0.0};
  col.heading = M_PI;
  col.v2x_enabled = false;
  world.vehicles.push_back(col);

  // Sharing node: parked at the northeast corner with open sight lines down
  // the horizontal road (where the collision vehicle approaches) and the
  // ego's approach lane.
  VehicleState share;
  share.id = next_id++;
  share.role = VehicleRole::SharingNode;
  apply_dims(share, kSedan);
  share.height = 1.5;
  share.antenna_height = 1.8;
  share.position = {v_road_half + 0.5 * w, h_road_half + w};
  share.velocity = {0.0, 0.0};
  share.heading = M_PI;
  world.vehicles.push_back(share);

  // Blockers: tall vehicles queued in the two turn lanes east of the ego.
  // Each one rides the point where the ego->sharing segment crosses its
  // lane, so the direct radio path stays shadowed through the approach.
  const Point2 sp = share.position;
  for (std::size_t k = 0; k < config.blocking_vehicle_heights.size(); ++k) {
    const int lane_col = (k % 2 == 0) ? 1 : 2;  // 1 -> x=w, 2 -> x=2w
    const double lane_x = w * static_cast<double>(lane_col);
    const double frac = lane_x / sp.x;  // segment parameter at this lane
    const double stagger = -16.0 * static_cast<double>(k / 2);
    const double drift = (k % 2 == 0) ? 1.10 : 0.90;  // queue compresses and spreads
    VehicleState blk;
    blk.id = next_id++;
    blk.role = VehicleRole::Blocking;
    apply_dims(blk, kHeavy);
    blk.height = config.blocking_vehicle_heights[k];
    blk.position = {lane_x, (1.0 - frac) * kEgoStartY + frac * sp.y + stagger};
    blk.velocity = {0.0, (1.0 - frac) * ego_speed * drift};
    blk.heading = M_PI / 2.0;
    world.vehicles.push_back(blk);
  }

  // Background traffic: per-lane Poisson walk with mean spacing N. The ego's
  // approach lane stays clear; the scripted actors own it.
  for (std::size_t li = 0; li < world.lanes.size(); ++li) {
    if (li == 2) continue;
    const Lane& lane = world.lanes[li];
    double s = -kMapHalfExtent + world.spawn_rng.exponential(config.spawn_spacing_N);
    while (s < kMapHalfExtent) {
      VehicleState bg;
      bg.role = VehicleRole::Background;
      bg.lane_index = static_cast<int>(li);
      const double type_draw = world.spawn_rng.uniform01();
      if (type_draw < 0.7) {
        apply_dims(bg, kSedan);
      } else if (type_draw < 0.9) {
        apply_dims(bg, kSuv);
      } else {
        apply_dims(bg, kBoxTruck);
      }
      const double speed = lane.speed_mps * world.spawn_rng.uniform(0.9, 1.1);
      if (lane.vertical) {
        bg.position = {lane.offset, s};
        bg.velocity = {0.0, lane.direction * speed};
        bg.heading = (lane.direction > 0.0) ? M_PI / 2.0 : -M_PI / 2.0;
      } else {
        bg.position = {s, lane.offset};
        bg.velocity = {lane.direction * speed, 0.0};
        bg.heading = (lane.direction > 0.0) ? 0.0 : M_PI;
      }
      const double gap = world.spawn_rng.exponential(config.spawn_spacing_N);
      bool clear = true;
      for (const auto& other : world.vehicles) {
        if (other.role != VehicleRole::Background &&
            distance(other.position, bg.position) < kMinSpawnClearance) {
          clear = false;
          break;
        }
      }
      if (clear) {
        bg.id = next_id++;
        world.vehicles.push_back(bg);
      }
      s += std::max(gap, 8.0);
    }
  }
  return world;
}

WorldState step_mobility(const WorldState& world, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_mobility: dt must be > 0");
  WorldState next = world;
  next.clock = world.clock + dt;
  const double limit = next.map_half_extent + kDespawnMargin;
  for (auto& v : next.vehicles) {
    v.position.x += v.velocity.x * dt;
    v.position.y += v.velocity.y * dt;
    if (v.role != VehicleRole::Background) continue;
    if (v.lane_index < 0 || v.lane_index >= static_cast<int>(next.lanes.size())) continue;
    const Lane& lane = next.lanes[static_cast<std::size_t>(v.lane_index)];
    const double along = lane.vertical ? v.position.y : v.position.x;
    if (along * lane.direction > limit) {
      // re-enter upstream; the extra exponential gap keeps arrivals Poisson
      const double entry =
          -lane.direction * (limit + next.spawn_rng.exponential(next.config.spawn_spacing_N));
      if (lane.vertical) {
        v.position.y = entry;
      } else {
        v.position.x = entry;
      }
    }
  }
  return next;
}

}  // namespace v2xsim
