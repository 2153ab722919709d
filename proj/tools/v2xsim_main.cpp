#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "v2xsim/config_io.hpp"
#include "v2xsim/engine.hpp"
#include "v2xsim/report.hpp"

namespace {

using namespace v2xsim;

std::vector<uint64_t> expand_seeds(const std::string& spec) {
  std::vector<uint64_t> seeds;
  const auto range = spec.find("..");
  if (range != std::string::npos) {
    const uint64_t lo = std::stoull(spec.substr(0, range));
    const uint64_t hi = std::stoull(spec.substr(range + 2));
    if (hi < lo) throw std::invalid_argument("seed range is reversed: " + spec);
    for (uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
    return seeds;
  }
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) seeds.push_back(std::stoull(item));
  }
  if (seeds.empty()) throw std::invalid_argument("no seeds in: " + spec);
  return seeds;
}

std::vector<double> expand_doubles(const std::string& spec) {
  std::vector<double> values;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) values.push_back(std::stod(item));
  }
  if (values.empty()) throw std::invalid_argument("no values in: " + spec);
  return values;
}

struct Options {
  std::string scenario_file;
  std::string policy;
  std::string seeds = "1";
  std::string densities;
  double speed = -1.0;
  int compression = 0;
  double duration = -1.0;
  std::string out_dir;
  std::string format;
  std::string trace;
  int jobs = static_cast<int>(std::thread::hardware_concurrency());
};

void add_common(CLI::App* cmd, Options& opt) {
  cmd->add_option("--scenario", opt.scenario_file, "scenario config file");
  cmd->add_option("--seed", opt.seeds, "seed, list (1,2,3) or range (1..20)");
  cmd->add_option("--density", opt.densities, "mean spawn spacing N in meters (list for sweep)");
  cmd->add_option("--speed", opt.speed, "ego target speed in km/h");
  cmd->add_option("--compression", opt.compression, "payload compression rate (16 or 32)")
      ->check(CLI::IsMember({0, 16, 32}));
  cmd->add_option("--duration", opt.duration, "simulated seconds");
  cmd->add_option("--out", opt.out_dir, "output directory");
  cmd->add_option("--format", opt.format, "output format (table, csv, json)");
  cmd->add_option("--jobs", opt.jobs, "parallel runs");
}

std::pair<ScenarioConfig, SimConfig> resolve_configs(const Options& opt) {
  ScenarioConfig scenario;
  SimConfig sim;
  if (!opt.scenario_file.empty()) {
    apply_file_config(load_config_file(opt.scenario_file), scenario, sim);
  }
  if (!opt.policy.empty()) sim.policy.kind = parse_policy(opt.policy);
  if (opt.speed > 0.0) scenario.ego_target_speed = opt.speed;
  if (opt.compression != 0) sim.compression_rate = opt.compression;
  if (opt.duration > 0.0) scenario.duration = opt.duration;
  if (!opt.densities.empty()) scenario.spawn_spacing_N = expand_doubles(opt.densities)[0];
  scenario.seed = expand_seeds(opt.seeds)[0];
  sim.trace_path = opt.trace;
  return {scenario, sim};
}

void ensure_out_dir(const std::string& dir) {
  if (!dir.empty()) std::filesystem::create_directories(dir);
}

std::string run_file_name(const RunMetrics& m) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "run_%s_s%llu_N%g.json", m.policy.c_str(),
                static_cast<unsigned long long>(m.seed), m.density);
  return buf;
}

int cmd_run(const Options& opt) {
  auto [scenario, sim] = resolve_configs(opt);
  const RunMetrics metrics = run(scenario, sim);
  const std::string doc = metrics_to_json(metrics, scenario, sim);
  std::cout << doc;
  if (!opt.out_dir.empty()) {
    ensure_out_dir(opt.out_dir);
    write_file_atomic(opt.out_dir + "/" + run_file_name(metrics), doc);
  }
  return 0;
}

const std::vector<PolicyKind> kAllPolicies = {PolicyKind::Mohed, PolicyKind::SignalStrength,
                                              PolicyKind::Random, PolicyKind::Direct};

int cmd_compare(const Options& opt) {
  auto [scenario, sim] = resolve_configs(opt);
  const auto seeds = expand_seeds(opt.seeds);
  const SweepResult sweep = sweep_density({scenario.spawn_spacing_N}, seeds, scenario, sim,
                                          kAllPolicies, opt.jobs);
  std::vector<ReportRow> rows;
  for (PolicyKind p : kAllPolicies) {
    ReportRow row;
    row.policy = policy_name(p);
    double switches = 0.0;
    int count = 0;
    for (const auto& m : sweep.all_runs) {
      if (m.policy != row.policy) continue;
      row.avg_prr += m.prr;
      switches += m.relay_switches;
      ++count;
    }
    row.avg_prr /= count;
    row.mean_switches = switches / count;
    row.per = 1.0 - row.avg_prr;
    rows.push_back(row);
  }
  const std::string format = opt.format.empty() ? "table" : opt.format;
  const std::string text = render_report(rows, format);
  std::cout << text;
  if (!opt.out_dir.empty()) {
    ensure_out_dir(opt.out_dir);
    const std::string ext = format == "table" ? "txt" : format;
    write_file_atomic(opt.out_dir + "/compare." + ext, text);
    write_file_atomic(opt.out_dir + "/compare.config.json",
                      metrics_to_json(sweep.all_runs.front(), scenario, sim));
  }
  return 0;
}

int cmd_sweep(const Options& opt) {
  auto [scenario, sim] = resolve_configs(opt);
  const auto seeds = expand_seeds(opt.seeds);
  const std::vector<double> densities = opt.densities.empty()
                                            ? std::vector<double>{scenario.spawn_spacing_N}
                                            : expand_doubles(opt.densities);
  std::vector<PolicyKind> policies = kAllPolicies;
  if (!opt.policy.empty()) policies = {parse_policy(opt.policy)};
  const SweepResult sweep = sweep_density(densities, seeds, scenario, sim, policies, opt.jobs);
  const std::string csv = sweep_to_csv(sweep);
  std::cout << csv;
  if (!opt.out_dir.empty()) {
    ensure_out_dir(opt.out_dir);
    write_file_atomic(opt.out_dir + "/sweep.csv", csv);
    write_file_atomic(opt.out_dir + "/sweep.config.json",
                      metrics_to_json(sweep.all_runs.front(), scenario, sim));
  }
  return 0;
}

int cmd_cdf(const Options& opt) {
  auto [scenario, sim] = resolve_configs(opt);
  const auto seeds = expand_seeds(opt.seeds);
  std::vector<PolicyKind> policies = kAllPolicies;
  if (!opt.policy.empty()) policies = {parse_policy(opt.policy)};
  const SweepResult sweep =
      sweep_density({scenario.spawn_spacing_N}, seeds, scenario, sim, policies, opt.jobs);
  std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>> curves;
  for (PolicyKind p : policies) {
    std::vector<RunMetrics> subset;
    for (const auto& m : sweep.all_runs) {
      if (m.policy == policy_name(p)) subset.push_back(m);
    }
    curves.emplace_back(policy_name(p), collect_cdf(subset));
  }
  const std::string csv = cdf_to_csv(curves);
  std::cout << csv;
  if (!opt.out_dir.empty()) {
    ensure_out_dir(opt.out_dir);
    write_file_atomic(opt.out_dir + "/cdf.csv", csv);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"v2xsim: occluded-intersection V2X relay and sensor-fusion simulator"};
  app.require_subcommand(1);

  Options opt;
  CLI::App* run_cmd = app.add_subcommand("run", "single simulation run");
  add_common(run_cmd, opt);
  run_cmd->add_option("--policy", opt.policy, "relay policy")
      ->check(CLI::IsMember({"mohed", "signal_strength", "random", "direct"}));
  run_cmd->add_option("--trace", opt.trace, "relay decision trace file (JSONL)");

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "density x policy x seed sweep");
  add_common(sweep_cmd, opt);
  sweep_cmd->add_option("--policy", opt.policy, "restrict to one policy");

  CLI::App* compare_cmd =
      app.add_subcommand("compare", "all four policies on shared seeds");
  add_common(compare_cmd, opt);

  CLI::App* cdf_cmd = app.add_subcommand("cdf", "pooled per-window PRR CDF export");
  add_common(cdf_cmd, opt);
  cdf_cmd->add_option("--policy", opt.policy, "restrict to one policy");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) return cmd_run(opt);
    if (sweep_cmd->parsed()) return cmd_sweep(opt);
    if (compare_cmd->parsed()) return cmd_compare(opt);
    if (cdf_cmd->parsed()) return cmd_cdf(opt);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}
