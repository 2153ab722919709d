#include "v2xsim/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <thread>

namespace v2xsim {

int SimConfig::packets_per_frame() const {
  const double bits = payload_bitrate() * sensor_period;
  return static_cast<int>(std::ceil(bits / 8.0 / static_cast<double>(packet_size)));
}

void SimConfig::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("sim: dt must be > 0");
  if (!(sensor_period > 0.0) || dt > sensor_period + 1e-12) {
    throw std::invalid_argument("sim: dt must not exceed sensor_period");
  }
  const double ratio = sensor_period / dt;
  if (std::abs(ratio - std::round(ratio)) > 1e-9) {
    throw std::invalid_argument("sim: sensor_period must be an integer multiple of dt");
  }
  if (compression_rate != 16 && compression_rate != 32) {
    throw std::invalid_argument("sim: compression_rate must be 16 or 32");
  }
  if (packet_size <= 0) throw std::invalid_argument("sim: packet_size must be > 0");
  if (retransmissions < 0) throw std::invalid_argument("sim: retransmissions must be >= 0");
  if (!(policy.reselect_window_ms > 0.0)) {
    throw std::invalid_argument("sim: reselect window must be > 0");
  }
  if (!(policy.epsilon > 0.0)) throw std::invalid_argument("sim: epsilon must be > 0");
  for (double p : forced_hop_psr) {
    if (!(p >= 0.0) || !(p <= 1.0)) {
      throw std::invalid_argument("sim: forced hop probabilities must be in [0, 1]");
    }
  }
  channel.validate();
}

namespace {

struct Hop {
  const VehicleState* from;
  const VehicleState* to;
};

std::string trace_record(double clock, const std::string& policy, const RelayDecision& d,
                         bool switched) {
  std::string path = d.is_direct() ? "\"direct\"" : std::to_string(*d.relay_id);
  std::string out = "{\"t\":" + std::to_string(clock) + ",\"policy\":\"" + policy +
                    "\",\"path\":" + path + ",\"switched\":" + (switched ? "true" : "false") +
                    ",\"assessments\":[";
  for (std::size_t i = 0; i < d.assessments.size(); ++i) {
    const auto& a = d.assessments[i];
    if (i) out += ",";
    out += "{\"id\":";
    out += a.is_direct ? "\"direct\"" : std::to_string(a.candidate_id);
    out += ",\"hops\":[";
    for (std::size_t h = 0; h < a.hop_risks.size(); ++h) {
      if (h) out += ",";
      out += std::to_string(a.hop_risks[h]);
    }
    out += "],\"total\":" + std::to_string(a.total_risk) + "}";
  }
  out += "]}\n";
  return out;
}

}  // namespace

RunMetrics run(const ScenarioConfig& scenario, const SimConfig& sim) {
  scenario.validate();
  sim.validate();

  WorldState world = generate_intersection(scenario);
  const uint32_t ego_id = world.find(VehicleRole::Ego)->id;
  const uint32_t sharing_id = world.find(VehicleRole::SharingNode)->id;

  Rng policy_rng = derive_stream(scenario.seed, "policy");
  uint64_t packet_counter = 0;

  RunMetrics metrics;
  metrics.policy = policy_name(sim.policy.kind);
  metrics.seed = scenario.seed;
  metrics.density = scenario.spawn_spacing_N;
  metrics.packets_per_frame = static_cast<uint32_t>(sim.packets_per_frame());

  RelayDecision current;  // never decided; first tick assigns
  bool triggered = false;
  double ego_cross_time = -1.0;
  uint64_t frames_ok = 0;
  uint64_t window_gen = 0, window_del = 0;
  uint64_t bw_gen = 0, bw_del = 0;
  std::string trace;

  const int64_t steps = std::llround(scenario.duration / sim.dt);
  const int64_t sensor_every = std::llround(sim.sensor_period / sim.dt);
  const int64_t window_every = std::max<int64_t>(1, std::llround(1.0 / sim.dt));

  for (int64_t step = 1; step <= steps; ++step) {
    world = step_mobility(world, sim.dt);
    const double t = static_cast<double>(step) * sim.dt;

    const VehicleState& ego = *world.find_id(ego_id);
    const VehicleState& sharing = *world.find_id(sharing_id);
    if (ego_cross_time < 0.0 && ego.position.y >= 0.0) ego_cross_time = t;

    if (step % sensor_every == 0) {
      const WorldIndex index = WorldIndex::build(world);

      const auto ego_samples =
          synth_perception(world, ego, sim.apm.rays, sim.apm.max_range, sim.apm.ray_step);
      const auto share_samples =
          synth_perception(world, sharing, sim.apm.rays, sim.apm.max_range, sim.apm.ray_step);
      const Apm ego_apm = build_apm(ego_samples, ego.position, ego.heading, sim.apm.k,
                                    sim.apm.rows, sim.apm.cols);
      const Apm share_apm = build_apm(share_samples, sharing.position, sharing.heading,
                                      sim.apm.k, sim.apm.rows, sim.apm.cols);
      // combined view per the relay procedure: one grid spanning both nodes'
      // neighborhoods so hop obstacles are assessed from shared matrices
      Apm combined_frame;
      const Point2 mid{0.5 * (ego.position.x + sharing.position.x),
                       0.5 * (ego.position.y + sharing.position.y)};
      const double span = distance(ego.position, sharing.position) +
                          sim.apm.k * std::max(sim.apm.rows, sim.apm.cols);
      const int cells = std::max(sim.apm.rows, static_cast<int>(std::ceil(span / sim.apm.k)));
      combined_frame.frame = {mid, 0.0, sim.apm.k, cells, cells};
      combined_frame.cells.assign(static_cast<std::size_t>(cells) * cells, 0);
      const MobilityHeightLayer link_layer =
          build_mobility_height_layer(world, combined_frame);

      if (!triggered) {
        const auto zones = find_blind_zones(ego_apm, sim.apm.t1, sim.apm.window_sizes);
        double benefit = 0.0;
        const FramePose world_frame{};  // zones arrive in world coordinates
        for (const auto& z : zones) {
          benefit +=
              perception_benefit(transform_zone(z, world_frame, share_apm.frame.pose()),
                                 share_apm);
        }
        const std::vector<BenefitReport> reports = {
            make_benefit_report(sharing_id, benefit, sim.apm.t2)};
        if (!should_trigger_fusion(reports, sim.apm.t2).empty()) {
          triggered = true;
          metrics.fusion_start_time = t;
        }
      }

      SelectionContext ctx;
      ctx.world = &world;
      ctx.index = &index;
      ctx.layer = &link_layer;
      ctx.params = sim.channel;
      const auto candidates =
          gather_candidates(world, ego, sharing, sim.policy.candidate_radius);
      const ReselectResult res =
          maybe_reselect(t, current, sim.policy, ctx, ego, sharing, candidates, policy_rng);
      if (res.switched) ++metrics.relay_switches;
      if (res.reselected && !sim.trace_path.empty()) {
        trace += trace_record(t, metrics.policy, res.decision, res.switched);
      }
      current = res.decision;

      if (triggered) {
        // resolve the hop chain and its per-hop success probabilities
        std::vector<double> hop_psr;
        if (!sim.forced_hop_psr.empty()) {
          hop_psr = sim.forced_hop_psr;
        } else {
          std::vector<Hop> hops;
          const VehicleState* relay =
              current.is_direct() ? nullptr : world.find_id(*current.relay_id);
          if (relay) {
            hops.push_back({&sharing, relay});
            hops.push_back({relay, &ego});
          } else {
            hops.push_back({&sharing, &ego});
          }
          for (const Hop& hop : hops) {
            const LinkBudget budget =
                link_budget(hop.from->antenna(), hop.to->antenna(), index, sim.channel,
                            {hop.from->id, hop.to->id});
            hop_psr.push_back(packet_success_probability(budget.rx_power_dbm, sim.channel));
          }
        }

        const int ppf = sim.packets_per_frame();
        bool frame_ok = true;
        const bool in_blocking_window = ego_cross_time < 0.0;
        for (int p = 0; p < ppf; ++p) {
          Rng pkt = derive_stream(scenario.seed, "packets", packet_counter++);
          bool delivered = false;
          for (int attempt = 0; attempt <= sim.retransmissions && !delivered; ++attempt) {
            bool ok = true;
            for (double psr : hop_psr) {
              if (!pkt.bernoulli(psr)) {
                ok = false;
                break;
              }
            }
            delivered = ok;
          }
          ++metrics.packets_generated;
          ++window_gen;
          if (in_blocking_window) ++bw_gen;
          if (delivered) {
            ++metrics.packets_delivered;
            ++window_del;
            if (in_blocking_window) ++bw_del;
          } else {
            frame_ok = false;
          }
        }
        ++metrics.frames_emitted;
        if (frame_ok) ++frames_ok;
      }
    }

    if (step % window_every == 0 && window_gen > 0) {
      metrics.window_prr_samples.push_back(static_cast<double>(window_del) /
                                           static_cast<double>(window_gen));
      window_gen = window_del = 0;
    }
  }
  if (window_gen > 0) {
    metrics.window_prr_samples.push_back(static_cast<double>(window_del) /
                                         static_cast<double>(window_gen));
  }

  metrics.prr = metrics.packets_generated > 0
                    ? static_cast<double>(metrics.packets_delivered) /
                          static_cast<double>(metrics.packets_generated)
                    : 1.0;
  metrics.per = 1.0 - metrics.prr;
  metrics.frame_delivery_ratio =
      metrics.frames_emitted > 0
          ? static_cast<double>(frames_ok) / static_cast<double>(metrics.frames_emitted)
          : 1.0;
  metrics.blocking_window_packets = bw_gen;
  metrics.blocking_window_per =
      bw_gen > 0 ? 1.0 - static_cast<double>(bw_del) / static_cast<double>(bw_gen) : 0.0;

  if (!sim.trace_path.empty()) {
    const std::string tmp = sim.trace_path + ".tmp";
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write trace file: " + sim.trace_path);
    out << trace;
    out.close();
    std::filesystem::rename(tmp, sim.trace_path);
  }
  return metrics;
}

SweepResult sweep_density(const std::vector<double>& densities,
                          const std::vector<uint64_t>& seeds,
                          const ScenarioConfig& base_scenario, const SimConfig& base_sim,
                          const std::vector<PolicyKind>& policies, int jobs) {
  if (densities.empty() || seeds.empty() || policies.empty()) {
    throw std::invalid_argument("sweep_density: densities, seeds and policies must be non-empty");
  }
  struct Task {
    double density;
    PolicyKind policy;
    uint64_t seed;
  };
  std::vector<Task> tasks;
  for (double n : densities) {
    for (PolicyKind p : policies) {
      for (uint64_t s : seeds) tasks.push_back({n, p, s});
    }
  }

  std::vector<RunMetrics> results(tasks.size());
  std::atomic<std::size_t> next{0};
  const int workers = std::max(1, jobs);
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      ScenarioConfig sc = base_scenario;
      sc.spawn_spacing_N = tasks[i].density;
      sc.seed = tasks[i].seed;
      SimConfig sim = base_sim;
      sim.policy.kind = tasks[i].policy;
      sim.trace_path.clear();
      results[i] = run(sc, sim);
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  SweepResult sweep;
  sweep.all_runs = results;
  for (double n : densities) {
    for (PolicyKind p : policies) {
      double sum = 0.0, sum2 = 0.0;
      int count = 0;
      for (std::size_t i = 0; i < tasks.size(); ++i) {
        if (tasks[i].density == n && tasks[i].policy == p) {
          sum += results[i].prr;
          sum2 += results[i].prr * results[i].prr;
          ++count;
        }
      }
      SweepCell cell;
      cell.density = n;
      cell.policy = policy_name(p);
      cell.runs = count;
      cell.mean_prr = sum / count;
      cell.std_prr =
          count > 1 ? std::sqrt(std::max(0.0, (sum2 - sum * sum / count) / (count - 1))) : 0.0;
      sweep.cells.push_back(cell);
    }
  }
  return sweep;
}

std::vector<std::pair<double, double>> collect_cdf(const std::vector<RunMetrics>& metrics) {
  std::vector<double> samples;
  for (const auto& m : metrics) {
    samples.insert(samples.end(), m.window_prr_samples.begin(), m.window_prr_samples.end());
  }
  std::sort(samples.begin(), samples.end());
  std::vector<std::pair<double, double>> cdf;
  cdf.reserve(samples.size());
  const double n = static_cast<double>(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    cdf.emplace_back(samples[i], static_cast<double>(i + 1) / n);
  }
  return cdf;
}

}  // namespace v2xsim
