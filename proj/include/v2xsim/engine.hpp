#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "v2xsim/apm.hpp"
#include "v2xsim/propagation.hpp"
#include "v2xsim/relay.hpp"
#include "v2xsim/scenario.hpp"

namespace v2xsim {

struct SimConfig {
  double dt = 0.05;             // seconds; must divide sensor_period
  double sensor_period = 0.1;   // seconds (10 Hz sensors)
  int compression_rate = 32;    // 16 -> 6 Mbps payload, 32 -> 3 Mbps
  int packet_size = 200;        // bytes
  int retransmissions = 0;      // extra full-path attempts per packet
  RelayPolicy policy;
  ChannelParams channel;
  ApmParams apm;
  // Test hook: when non-empty, every packet is sent over these synthetic
  // per-hop success probabilities instead of link-budget draws.
  std::vector<double> forced_hop_psr;
  std::string trace_path;  // optional JSONL relay-decision trace

  double payload_bitrate() const { return compression_rate == 16 ? 6e6 : 3e6; }
  int packets_per_frame() const;
  void validate() const;
};

struct RunMetrics {
  uint64_t packets_generated = 0;
  uint64_t packets_delivered = 0;
  double prr = 1.0;  // 1.0 when no fusion traffic was generated
  double per = 0.0;
  std::vector<double> window_prr_samples;  // one per 1 s window with traffic
  uint32_t relay_switches = 0;
  double frame_delivery_ratio = 1.0;  // frames with every packet delivered
  uint64_t frames_emitted = 0;
  uint32_t packets_per_frame = 0;
  double fusion_start_time = -1.0;  // first frame emission; -1 when never triggered
  // PER restricted to the occlusion window: fusion active while the ego is
  // still south of the intersection center.
  double blocking_window_per = 0.0;
  uint64_t blocking_window_packets = 0;
  // run identity echo
  std::string policy;
  uint64_t seed = 0;
  double density = 0.0;
};

RunMetrics run(const ScenarioConfig& scenario, const SimConfig& sim);

struct SweepCell {
  double density = 0.0;
  std::string policy;
  double mean_prr = 0.0;
  double std_prr = 0.0;
  int runs = 0;
};

struct SweepResult {
  std::vector<SweepCell> cells;
  std::vector<RunMetrics> all_runs;
};

// Full factorial densities x policies x seeds; deterministic regardless of
// the number of worker threads.
SweepResult sweep_density(const std::vector<double>& densities,
                          const std::vector<uint64_t>& seeds,
                          const ScenarioConfig& base_scenario, const SimConfig& base_sim,
                          const std::vector<PolicyKind>& policies, int jobs = 1);

// Pooled empirical CDF of the per-window PRR samples.
std::vector<std::pair<double, double>> collect_cdf(const std::vector<RunMetrics>& metrics);

}  // namespace v2xsim
