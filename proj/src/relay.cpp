#include "v2xsim/relay.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace v2xsim {

namespace {
// Tolerance for "equal risk" ties so identical geometry compares equal.
double risk_tie_tol(double best) { return 1e-9 * std::max(1.0, std::abs(best)); }
}  // namespace

PolicyKind parse_policy(const std::string& name) {
  if (name == "mohed") return PolicyKind::Mohed;
  if (name == "signal_strength") return PolicyKind::SignalStrength;
  if (name == "random") return PolicyKind::Random;
  if (name == "direct") return PolicyKind::Direct;
  throw std::invalid_argument("unknown policy: " + name);
}

std::string policy_name(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::Mohed:
      return "mohed";
    case PolicyKind::SignalStrength:
      return "signal_strength";
    case PolicyKind::Random:
      return "random";
    case PolicyKind::Direct:
      return "direct";
  }
  return "unknown";
}

double mobility_similarity(Vec2 v_endpoint, Vec2 v_obstacle, Vec2 v_ego, double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("mobility_similarity: epsilon must be > 0");
  const double a = std::max(norm(v_endpoint - v_obstacle), epsilon);
  const double b = std::max(norm(v_ego - v_obstacle), epsilon);
  return 1.0 / a + 1.0 / b;
}

namespace {

// Liang-Barsky clip of the segment parameter range against an axis-aligned
// cell; returns false when the overlap is empty.
bool clip_cell(double ax, double ay, double dx, double dy, double x0, double y0, double x1,
               double y1, double& u0, double& u1) {
  u0 = 0.0;
  u1 = 1.0;
  const double p[4] = {-dx, dx, -dy, dy};
  const double q[4] = {ax - x0, x1 - ax, ay - y0, y1 - ay};
  for (int i = 0; i < 4; ++i) {
    if (p[i] == 0.0) {
      if (q[i] < 0.0) return false;
    } else {
      const double u = q[i] / p[i];
      if (p[i] < 0.0) {
        if (u > u0) u0 = u;
      } else {
        if (u < u1) u1 = u;
      }
    }
  }
  return u0 <= u1;
}

}  // namespace

std::optional<std::vector<ObstacleRef>> obstacles_between(const MobilityHeightLayer& layer,
                                                          const VehicleState& a,
                                                          const VehicleState& b) {
  const auto ca = layer.frame.cell_of_world(a.position);
  const auto cb = layer.frame.cell_of_world(b.position);
  if (!ca || !cb) return std::nullopt;

  const FramePose pose = layer.frame.pose();
  const Point2 la = pose.to_local(a.position);
  const Point2 lb = pose.to_local(b.position);
  const double dx = lb.x - la.x;
  const double dy = lb.y - la.y;
  const double seg_len = std::hypot(dx, dy);
  if (seg_len <= kGeomEps) throw std::invalid_argument("obstacles_between: a and b coincide");

  const int r0 = std::min(ca->first, cb->first);
  const int r1 = std::max(ca->first, cb->first);
  const int c0 = std::min(ca->second, cb->second);
  const int c1 = std::max(ca->second, cb->second);
  const double k = layer.frame.k;

  struct Hit {
    double u0, u1;
    double height;
    Vec2 velocity;
  };
  std::vector<Hit> hits;
  for (int r = r0; r <= r1; ++r) {
    for (int c = c0; c <= c1; ++c) {
      if ((r == ca->first && c == ca->second) || (r == cb->first && c == cb->second)) {
        continue;  // the nodes' own cells are not obstacles
      }
      const MobilityHeightCell& cell = layer.at(r, c);
      if (cell.sample_count == 0) continue;
      const double cx0 = (static_cast<double>(c) - 0.5 * layer.frame.cols) * k;
      const double cy0 = (static_cast<double>(r) - 0.5 * layer.frame.rows) * k;
      double u0, u1;
      if (!clip_cell(la.x, la.y, dx, dy, cx0, cy0, cx0 + k, cy0 + k, u0, u1)) continue;
      if (!(u1 - u0 > kGeomEps / seg_len)) continue;
      const double um = 0.5 * (u0 + u1);
      const double line_h = a.antenna_height + um * (b.antenna_height - a.antenna_height);
      if (!(cell.max_height > line_h)) continue;  // does not break the line
      hits.push_back({u0, u1, cell.max_height, cell.mean_velocity});
    }
  }
  std::sort(hits.begin(), hits.end(), [](const Hit& x, const Hit& y) { return x.u0 < y.u0; });

  // merge contiguous runs along the segment into one obstacle each
  std::vector<ObstacleRef> obstacles;
  const double touch = 0.5 * k / seg_len;
  std::size_t i = 0;
  while (i < hits.size()) {
    double lo = hits[i].u0;
    double hi = hits[i].u1;
    double best_h = hits[i].height;
    Vec2 vel = hits[i].velocity;
    std::size_t j = i + 1;
    while (j < hits.size() && hits[j].u0 <= hi + touch) {
      hi = std::max(hi, hits[j].u1);
      if (hits[j].height > best_h) {
        best_h = hits[j].height;
        vel = hits[j].velocity;
      }
      ++j;
    }
    ObstacleRef ref;
    ref.t_mid = 0.5 * (lo + hi);
    ref.height = best_h;
    ref.velocity = vel;
    ref.position = {a.position.x + ref.t_mid * (b.position.x - a.position.x),
                    a.position.y + ref.t_mid * (b.position.y - a.position.y)};
    obstacles.push_back(ref);
    i = j;
  }
  return obstacles;
}

std::vector<ObstacleRef> obstacles_in_world(const WorldIndex& index, const VehicleState& a,
                                            const VehicleState& b) {
  std::vector<ObstacleRef> obstacles;
  const double len = distance(a.position, b.position);
  if (len <= kGeomEps) throw std::invalid_argument("obstacles_in_world: a and b coincide");
  const double eps_t = kGeomEps / len;
  std::vector<double> t0(index.vehicle_quads.count), t1(index.vehicle_quads.count);
  kernels::segment_quad_intervals(a.position.x, a.position.y, b.position.x, b.position.y,
                                  index.vehicle_quads, t0.data(), t1.data());
  for (std::size_t i = 0; i < index.vehicle_quads.count; ++i) {
    if (index.vehicle_ids[i] == a.id || index.vehicle_ids[i] == b.id) continue;
    if (!(t1[i] - t0[i] > eps_t)) continue;
    const double tm = 0.5 * (t0[i] + t1[i]);
    const double line_h = a.antenna_height + tm * (b.antenna_height - a.antenna_height);
    if (!(index.vehicle_heights[i] > line_h)) continue;
    ObstacleRef ref;
    ref.t_mid = tm;
    ref.height = index.vehicle_heights[i];
    ref.velocity = index.vehicle_velocities[i];
    ref.position = {a.position.x + tm * (b.position.x - a.position.x),
                    a.position.y + tm * (b.position.y - a.position.y)};
    obstacles.push_back(ref);
  }
  return obstacles;
}

double link_nlos_risk_with_endpoint(const VehicleState& a, const VehicleState& b,
                                    const std::vector<ObstacleRef>& obstacles, Vec2 v_endpoint,
                                    Vec2 v_ego, const ChannelParams& params, double epsilon) {
  const double len = distance(a.position, b.position);
  double risk = 0.0;
  for (const auto& obs : obstacles) {
    const double d1 = obs.t_mid * len;
    const double d2 = (1.0 - obs.t_mid) * len;
    if (!(d1 > 0.0) || !(d2 > 0.0)) continue;
    const double line_h = a.antenna_height + obs.t_mid * (b.antenna_height - a.antenna_height);
    const double nu = fresnel_nu(obs.height - line_h, params.wavelength_m, d1, d2);
    const double loss = knife_edge_loss(nu);
    if (loss <= 0.0) continue;
    risk += loss * mobility_similarity(v_endpoint, obs.velocity, v_ego, epsilon);
  }
  return risk;
}

double link_nlos_risk(const VehicleState& a, const VehicleState& b,
                      const std::vector<ObstacleRef>& obstacles, Vec2 v_ego,
                      const ChannelParams& params, double epsilon) {
  return link_nlos_risk_with_endpoint(a, b, obstacles, b.velocity, v_ego, params, epsilon);
}

std::vector<VehicleState> gather_candidates(const WorldState& world, const VehicleState& ego,
                                            const VehicleState& sharing, double radius) {
  std::vector<VehicleState> candidates;
  for (const auto& v : world.vehicles) {
    if (!v.v2x_enabled) continue;
    if (v.id == ego.id || v.id == sharing.id) continue;
    if (distance(v.position, ego.position) > radius) continue;
    candidates.push_back(v);
  }
  return candidates;
}

namespace {

std::vector<ObstacleRef> link_obstacles(const SelectionContext& ctx, const VehicleState& a,
                                        const VehicleState& b) {
  if (ctx.layer) {
    if (auto obs = obstacles_between(*ctx.layer, a, b)) return std::move(*obs);
  }
  return obstacles_in_world(*ctx.index, a, b);
}

}  // namespace

RelayDecision select_mohed(const SelectionContext& ctx, const VehicleState& ego,
                           const VehicleState& sharing,
                           const std::vector<VehicleState>& candidates,
                           const RelayDecision& current, const RelayPolicy& policy,
                           double clock) {
  RelayDecision decision;
  decision.decided_at = clock;

  CandidateAssessment direct;
  direct.is_direct = true;
  direct.hop_risks = {link_nlos_risk(ego, sharing, link_obstacles(ctx, ego, sharing),
                                     ego.velocity, ctx.params, policy.epsilon)};
  direct.total_risk = direct.hop_risks[0];
  decision.assessments.push_back(direct);

  for (const auto& cand : candidates) {
    CandidateAssessment ca;
    ca.candidate_id = cand.id;
    const double r1 = link_nlos_risk(ego, cand, link_obstacles(ctx, ego, cand), ego.velocity,
                                     ctx.params, policy.epsilon);
    const Vec2 second_endpoint =
        policy.second_hop_uses_relay_velocity ? cand.velocity : sharing.velocity;
    const double r2 = link_nlos_risk_with_endpoint(cand, sharing,
                                                   link_obstacles(ctx, cand, sharing),
                                                   second_endpoint, ego.velocity, ctx.params,
                                                   policy.epsilon);
    ca.hop_risks = {r1, r2};
    ca.total_risk = r1 + r2;
    decision.assessments.push_back(ca);
  }

  double best = decision.assessments[0].total_risk;
  for (const auto& a : decision.assessments) best = std::min(best, a.total_risk);
  const double tol = risk_tie_tol(best);

  // tie order: keep the current path, then direct, then lowest id
  const CandidateAssessment* chosen = nullptr;
  for (const auto& a : decision.assessments) {
    if (a.total_risk > best + tol) continue;
    const bool is_current = current.ever_decided() &&
                            ((a.is_direct && current.is_direct()) ||
                             (!a.is_direct && !current.is_direct() &&
                              a.candidate_id == *current.relay_id));
    if (is_current) {
      chosen = &a;
      break;
    }
    if (!chosen) {
      chosen = &a;
    } else if (chosen->is_direct) {
      // keep direct
    } else if (a.is_direct || a.candidate_id < chosen->candidate_id) {
      chosen = &a;
    }
  }
  if (!chosen->is_direct) decision.relay_id = chosen->candidate_id;
  return decision;
}

RelayDecision select_signal_strength(const SelectionContext& ctx, const VehicleState& ego,
                                     const VehicleState& sharing,
                                     const std::vector<VehicleState>& candidates, double clock) {
  RelayDecision decision;
  decision.decided_at = clock;

  const double direct_rx =
      link_budget(ego.antenna(), sharing.antenna(), *ctx.index, ctx.params,
                  {ego.id, sharing.id})
          .rx_power_dbm;
  CandidateAssessment direct;
  direct.is_direct = true;
  direct.hop_risks = {direct_rx};
  direct.total_risk = direct_rx;
  decision.assessments.push_back(direct);

  std::size_t best_idx = 0;  // 0 = none (the direct entry)
  for (const auto& cand : candidates) {
    CandidateAssessment ca;
    ca.candidate_id = cand.id;
    const double rx1 = link_budget(ego.antenna(), cand.antenna(), *ctx.index, ctx.params,
                                   {ego.id, cand.id})
                           .rx_power_dbm;
    const double rx2 = link_budget(cand.antenna(), sharing.antenna(), *ctx.index, ctx.params,
                                   {cand.id, sharing.id})
                           .rx_power_dbm;
    ca.hop_risks = {rx1, rx2};
    ca.total_risk = rx1 + rx2;
    decision.assessments.push_back(ca);
    const std::size_t idx = decision.assessments.size() - 1;
    if (best_idx == 0) {
      best_idx = idx;
    } else {
      const CandidateAssessment& cur = decision.assessments[best_idx];
      if (ca.total_risk > cur.total_risk ||
          (ca.total_risk == cur.total_risk && ca.candidate_id < cur.candidate_id)) {
        best_idx = idx;
      }
    }
  }

  if (best_idx == 0) return decision;  // no candidates: direct
  const CandidateAssessment& best = decision.assessments[best_idx];
  const double weaker_hop = std::min(best.hop_risks[0], best.hop_risks[1]);
  if (direct_rx > weaker_hop) return decision;  // direct beats the relay's weak link
  decision.relay_id = best.candidate_id;
  return decision;
}

RelayDecision select_random(const SelectionContext& ctx, const VehicleState& ego,
                            const VehicleState& sharing,
                            const std::vector<VehicleState>& candidates, Rng& rng,
                            double clock) {
  RelayDecision decision;
  decision.decided_at = clock;
  std::vector<const VehicleState*> reachable;
  for (const auto& cand : candidates) {
    const double rx1 = link_budget(ego.antenna(), cand.antenna(), *ctx.index, ctx.params,
                                   {ego.id, cand.id})
                           .rx_power_dbm;
    const double rx2 = link_budget(cand.antenna(), sharing.antenna(), *ctx.index, ctx.params,
                                   {cand.id, sharing.id})
                           .rx_power_dbm;
    CandidateAssessment ca;
    ca.candidate_id = cand.id;
    ca.hop_risks = {rx1, rx2};
    ca.total_risk = rx1 + rx2;
    decision.assessments.push_back(ca);
    if (std::max(rx1, rx2) >= ctx.params.receiver_sensitivity_dbm) {
      reachable.push_back(&cand);
    }
  }
  if (reachable.empty()) return decision;  // direct
  const std::size_t pick = static_cast<std::size_t>(rng.uniform_int(reachable.size()));
  decision.relay_id = reachable[pick]->id;
  return decision;
}

ReselectResult maybe_reselect(double clock, const RelayDecision& last, const RelayPolicy& policy,
                              const SelectionContext& ctx, const VehicleState& ego,
                              const VehicleState& sharing,
                              const std::vector<VehicleState>& candidates, Rng& policy_rng) {
  const double window_s = policy.reselect_window_ms / 1000.0;
  if (last.ever_decided() && clock - last.decided_at < window_s - 1e-9) {
    return {last, false, false};
  }
  RelayDecision next;
  switch (policy.kind) {
    case PolicyKind::Direct:
      next.decided_at = clock;
      break;
    case PolicyKind::Mohed:
      next = select_mohed(ctx, ego, sharing, candidates, last, policy, clock);
      break;
    case PolicyKind::SignalStrength:
      next = select_signal_strength(ctx, ego, sharing, candidates, clock);
      break;
    case PolicyKind::Random:
      next = select_random(ctx, ego, sharing, candidates, policy_rng, clock);
      break;
  }
  const bool switched = last.ever_decided() && (next.relay_id != last.relay_id);
  return {next, true, switched};
}

}  // namespace v2xsim
