#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "v2xsim/geometry.hpp"
#include "v2xsim/scenario.hpp"

namespace v2xsim {

// Rigid 2D pose of a grid (or any local frame) in the world.
struct FramePose {
  Point2 center;
  double heading = 0.0;

  Point2 to_world(Point2 local) const;
  Point2 to_local(Point2 world) const;
};

// Placement and resolution of a row-major rows x cols grid. Local x runs
// along the heading, local y to its left; the grid is centered on `center`.
struct GridFrame {
  Point2 center;
  double heading = 0.0;
  double k = 2.0;  // meters per cell side
  int rows = 20;
  int cols = 20;

  FramePose pose() const { return {center, heading}; }
  Point2 cell_center_local(int row, int col) const;
  // cell indices for a world point, or nullopt when outside the extent
  std::optional<std::pair<int, int>> cell_of_world(Point2 world) const;
};

// Abstract perception matrix: per-cell counts of projected sensor samples.
struct Apm {
  GridFrame frame;
  std::vector<uint32_t> cells;  // rows * cols, row-major

  uint32_t at(int row, int col) const {
    return cells[static_cast<std::size_t>(row) * frame.cols + col];
  }
  uint64_t total() const;
};

struct MobilityHeightCell {
  double max_height = 0.0;
  Vec2 mean_velocity;
  uint32_t sample_count = 0;
};

// Companion layer to an APM carrying per-cell obstacle statistics.
struct MobilityHeightLayer {
  GridFrame frame;
  std::vector<MobilityHeightCell> cells;

  const MobilityHeightCell& at(int row, int col) const {
    return cells[static_cast<std::size_t>(row) * frame.cols + col];
  }
};

struct BlindZone {
  Point2 center;
  double range = 0.0;  // meters
};

struct BenefitReport {
  uint32_t candidate_id = 0;
  double benefit = 0.0;  // index * m^2, summed over zones
  bool triggered = false;
};

// Grid and trigger defaults used by the engine.
struct ApmParams {
  int rows = 20;
  int cols = 20;
  double k = 4.0;
  double t1 = 1.0;                          // per-cell mean threshold for blind windows
  std::vector<int> window_sizes = {3, 5, 7};
  double t2 = 400.0;                        // benefit threshold (index * m^2)
  int rays = 360;
  double max_range = 60.0;
  double ray_step = 1.0;
};

Apm build_apm(const std::vector<Point2>& samples, Point2 center, double heading, double k,
              int rows, int cols);

// Sliding-window deficit scan: windows whose mean cell value is below t1 are
// merged (connected components of their covered cells) into zones. Zone
// centers are reported in the world frame; range is the half-diagonal of the
// merged rectangle.
std::vector<BlindZone> find_blind_zones(const Apm& apm, double t1,
                                        const std::vector<int>& window_sizes);

BlindZone transform_zone(const BlindZone& zone, const FramePose& from, const FramePose& to);

// Sum of provider cell index times cell area over cells whose centers lie
// within the zone disc. The zone must already be in the provider's frame.
double perception_benefit(const BlindZone& zone, const Apm& provider);

BenefitReport make_benefit_report(uint32_t candidate_id, double benefit, double t2);

// Candidates whose benefit reaches t2, ordered by descending benefit then
// ascending id.
std::vector<uint32_t> should_trigger_fusion(const std::vector<BenefitReport>& reports, double t2);

class ApmDecodeError : public std::runtime_error {
 public:
  ApmDecodeError(std::size_t offset_in, const std::string& what_in)
      : std::runtime_error(what_in + " (offset " + std::to_string(offset_in) + ")"),
        offset(offset_in) {}
  std::size_t offset;
};

struct ApmMessage {
  Apm apm;
  std::optional<MobilityHeightLayer> layer;
  uint32_t source_id = 0;
  double timestamp = 0.0;
};

// Big-endian wire format (see docs/apm_wire_format.md): 54-byte header,
// 4 bytes per cell, optional 6 bytes per layer cell.
std::vector<uint8_t> serialize_apm(const Apm& apm, const MobilityHeightLayer* layer,
                                   uint32_t source_id, double timestamp);
ApmMessage deserialize_apm(const std::vector<uint8_t>& bytes);

MobilityHeightLayer build_mobility_height_layer(const WorldState& world, const Apm& apm);

// Synthetic lidar sweep for one vehicle against every other footprint.
std::vector<Point2> synth_perception(const WorldState& world, const VehicleState& sensor,
                                     int rays, double max_range, double step = 1.0);

}  // namespace v2xsim
