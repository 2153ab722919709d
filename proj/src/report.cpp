#include "v2xsim/report.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace v2xsim {

namespace {

std::string pct(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f%%", fraction * 100.0);
  return buf;
}

std::string num2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

nlohmann::json policy_json(const RelayPolicy& p) {
  return {{"kind", policy_name(p.kind)},
          {"reselect_window_ms", p.reselect_window_ms},
          {"epsilon", p.epsilon},
          {"candidate_radius", p.candidate_radius},
          {"second_hop_uses_relay_velocity", p.second_hop_uses_relay_velocity}};
}

nlohmann::json channel_json(const ChannelParams& c) {
  return {{"transmission_power", c.tx_power_dbm},
          {"carrier_frequency", c.carrier_frequency_hz},
          {"wavelength", c.wavelength_m},
          {"noise_floor", c.noise_floor_dbm},
          {"receiver_sensitivity", c.receiver_sensitivity_dbm},
          {"bitrate", c.bitrate_bps},
          {"bandwidth", c.bandwidth_hz},
          {"psr_shape_db", c.psr_shape_db}};
}

}  // namespace

std::string render_report(std::vector<ReportRow> rows, const std::string& format) {
  if (rows.empty()) throw std::invalid_argument("render_report: no rows");
  std::sort(rows.begin(), rows.end(),
            [](const ReportRow& a, const ReportRow& b) { return a.avg_prr > b.avg_prr; });

  if (format == "json") {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows) {
      arr.push_back({{"policy", r.policy},
                     {"avg_prr", r.avg_prr},
                     {"mean_switches", r.mean_switches},
                     {"per", r.per}});
    }
    return arr.dump(2) + "\n";
  }
  if (format == "csv") {
    std::string out = "policy,avg_prr,mean_switches,per\n";
    for (const auto& r : rows) {
      char buf[160];
      std::snprintf(buf, sizeof(buf), "%s,%.6f,%.4f,%.6f\n", r.policy.c_str(), r.avg_prr,
                    r.mean_switches, r.per);
      out += buf;
    }
    return out;
  }
  if (format == "table") {
    std::string out;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-18s %10s %10s %10s\n", "policy", "avg PRR", "switches",
                  "PER");
    out += buf;
    out += std::string(51, '-') + "\n";
    for (const auto& r : rows) {
      std::snprintf(buf, sizeof(buf), "%-18s %10s %10s %10s\n", r.policy.c_str(),
                    pct(r.avg_prr).c_str(), num2(r.mean_switches).c_str(), pct(r.per).c_str());
      out += buf;
    }
    return out;
  }
  throw std::invalid_argument("render_report: unknown format '" + format + "'");
}

std::vector<ReportRow> report_rows_from_json(const std::string& json_text) {
  const nlohmann::json arr = nlohmann::json::parse(json_text);
  std::vector<ReportRow> rows;
  for (const auto& item : arr) {
    ReportRow r;
    r.policy = item.at("policy").get<std::string>();
    r.avg_prr = item.at("avg_prr").get<double>();
    r.mean_switches = item.at("mean_switches").get<double>();
    r.per = item.at("per").get<double>();
    rows.push_back(r);
  }
  return rows;
}

std::string metrics_to_json(const RunMetrics& metrics, const ScenarioConfig& scenario,
                            const SimConfig& sim) {
  nlohmann::json doc;
  doc["config"]["scenario"] = {
      {"spawn_spacing_N", scenario.spawn_spacing_N},
      {"ego_target_speed", scenario.ego_target_speed},
      {"duration", scenario.duration},
      {"seed", scenario.seed},
      {"lane_width", scenario.lane_width},
      {"blocking_vehicle_heights", scenario.blocking_vehicle_heights}};
  doc["config"]["sim"] = {{"dt", sim.dt},
                          {"sensor_period", sim.sensor_period},
                          {"compression_rate", sim.compression_rate},
                          {"payload_bitrate", sim.payload_bitrate()},
                          {"packet_size", sim.packet_size},
                          {"retransmissions", sim.retransmissions},
                          {"policy", policy_json(sim.policy)},
                          {"channel", channel_json(sim.channel)},
                          {"apm",
                           {{"rows", sim.apm.rows},
                            {"cols", sim.apm.cols},
                            {"k", sim.apm.k},
                            {"t1", sim.apm.t1},
                            {"t2", sim.apm.t2},
                            {"window_sizes", sim.apm.window_sizes},
                            {"rays", sim.apm.rays},
                            {"max_range", sim.apm.max_range},
                            {"ray_step", sim.apm.ray_step}}}};
  doc["metrics"] = {{"packets_generated", metrics.packets_generated},
                    {"packets_delivered", metrics.packets_delivered},
                    {"prr", metrics.prr},
                    {"per", metrics.per},
                    {"window_prr_samples", metrics.window_prr_samples},
                    {"relay_switches", metrics.relay_switches},
                    {"frame_delivery_ratio", metrics.frame_delivery_ratio},
                    {"frames_emitted", metrics.frames_emitted},
                    {"packets_per_frame", metrics.packets_per_frame},
                    {"fusion_start_time", metrics.fusion_start_time},
                    {"blocking_window_per", metrics.blocking_window_per},
                    {"blocking_window_packets", metrics.blocking_window_packets},
                    {"policy", metrics.policy},
                    {"seed", metrics.seed},
                    {"density", metrics.density}};
  return doc.dump(2) + "\n";
}

std::string sweep_to_csv(const SweepResult& sweep) {
  std::string out = "density,policy,mean_prr,std_prr,runs\n";
  for (const auto& c : sweep.cells) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%.6g,%s,%.6f,%.6f,%d\n", c.density, c.policy.c_str(),
                  c.mean_prr, c.std_prr, c.runs);
    out += buf;
  }
  return out;
}

std::string cdf_to_csv(
    const std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>>& curves) {
  std::string out = "policy,prr,cum_fraction\n";
  for (const auto& [policy, points] : curves) {
    for (const auto& [prr, frac] : points) {
      char buf[120];
      std::snprintf(buf, sizeof(buf), "%s,%.9f,%.9f\n", policy.c_str(), prr, frac);
      out += buf;
    }
  }
  return out;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write: " + tmp);
    out << content;
    if (!out.good()) throw std::runtime_error("write failed: " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace v2xsim
