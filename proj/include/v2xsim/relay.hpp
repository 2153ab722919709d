#pragma once

#include <optional>
#include <string>
#include <vector>

#include "v2xsim/apm.hpp"
#include "v2xsim/propagation.hpp"
#include "v2xsim/rng.hpp"
#include "v2xsim/scenario.hpp"

namespace v2xsim {

enum class PolicyKind { Mohed, SignalStrength, Random, Direct };

PolicyKind parse_policy(const std::string& name);  // throws on unknown names
std::string policy_name(PolicyKind kind);

struct RelayPolicy {
  PolicyKind kind = PolicyKind::Mohed;
  double reselect_window_ms = 2000.0;
  double epsilon = 0.1;             // m/s clamp for the similarity singularities
  double candidate_radius = 150.0;  // candidate search radius around the ego
  // Keeps the literal similarity formula by default; when set, the second
  // hop's endpoint velocity is the relay's instead of the sharing node's.
  bool second_hop_uses_relay_velocity = false;
};

// For mohed the hop values are NLOS risks (lower is better); for
// signal-strength they are received powers in dBm (higher is better). The
// total is always their sum.
struct CandidateAssessment {
  bool is_direct = false;
  uint32_t candidate_id = 0;
  std::vector<double> hop_risks;
  double total_risk = 0.0;
};

struct RelayDecision {
  std::optional<uint32_t> relay_id;  // nullopt = direct path
  double decided_at = -1e300;        // seconds; -1e300 marks "never decided"
  std::vector<CandidateAssessment> assessments;

  bool is_direct() const { return !relay_id.has_value(); }
  bool ever_decided() const { return decided_at > -1e299; }
};

// Eq.-style mobility similarity with both reciprocal terms clamped at
// 1/epsilon.
double mobility_similarity(Vec2 v_endpoint, Vec2 v_obstacle, Vec2 v_ego, double epsilon);

// One shadow-casting obstacle on a link, described by its split parameter
// along the segment plus the statistics that drive loss and similarity.
struct ObstacleRef {
  Point2 position;
  double height = 0.0;
  Vec2 velocity;
  double t_mid = 0.5;  // parameter along a->b
};

// Obstacle cells between two nodes on the mobility-height layer, restricted
// to the sub-grid spanned by their cell indices. Qualifying cells (taller
// than the direct line, intersecting the segment) are merged into one
// obstacle per contiguous run along the segment. Returns nullopt when either
// node lies outside the layer extent; callers then fall back to world
// geometry.
std::optional<std::vector<ObstacleRef>> obstacles_between(const MobilityHeightLayer& layer,
                                                          const VehicleState& a,
                                                          const VehicleState& b);

// World-geometry fallback: per-vehicle obstacles that break the direct line.
std::vector<ObstacleRef> obstacles_in_world(const WorldIndex& index, const VehicleState& a,
                                            const VehicleState& b);

double link_nlos_risk(const VehicleState& a, const VehicleState& b,
                      const std::vector<ObstacleRef>& obstacles, Vec2 v_ego,
                      const ChannelParams& params, double epsilon);

// Same risk with an explicit endpoint velocity (the config-switch variant).
double link_nlos_risk_with_endpoint(const VehicleState& a, const VehicleState& b,
                                    const std::vector<ObstacleRef>& obstacles, Vec2 v_endpoint,
                                    Vec2 v_ego, const ChannelParams& params, double epsilon);

struct SelectionContext {
  const WorldState* world = nullptr;
  const WorldIndex* index = nullptr;
  const MobilityHeightLayer* layer = nullptr;  // optional; world fallback otherwise
  ChannelParams params;
};

std::vector<VehicleState> gather_candidates(const WorldState& world, const VehicleState& ego,
                                            const VehicleState& sharing, double radius);

RelayDecision select_mohed(const SelectionContext& ctx, const VehicleState& ego,
                           const VehicleState& sharing,
                           const std::vector<VehicleState>& candidates,
                           const RelayDecision& current, const RelayPolicy& policy,
                           double clock);

RelayDecision select_signal_strength(const SelectionContext& ctx, const VehicleState& ego,
                                     const VehicleState& sharing,
                                     const std::vector<VehicleState>& candidates, double clock);

// Uniform draw among candidates reachable on at least one hop estimate.
RelayDecision select_random(const SelectionContext& ctx, const VehicleState& ego,
                            const VehicleState& sharing,
                            const std::vector<VehicleState>& candidates, Rng& rng, double clock);

struct ReselectResult {
  RelayDecision decision;
  bool reselected = false;
  bool switched = false;
};

// Re-runs the policy only once the re-selection window has elapsed. The very
// first decision is an assignment, not a switch.
ReselectResult maybe_reselect(double clock, const RelayDecision& last, const RelayPolicy& policy,
                              const SelectionContext& ctx, const VehicleState& ego,
                              const VehicleState& sharing,
                              const std::vector<VehicleState>& candidates, Rng& policy_rng);

}  // namespace v2xsim
