#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "v2xsim/config_io.hpp"
#include "v2xsim/report.hpp"

using namespace v2xsim;

TEST_CASE("config: scenario keys and radio-table keys parse") {
  const std::string text = R"(
# scenario
spawn_spacing_N = 40
ego_target_speed = 25
duration = 18
seed = 42
lane_width = 3.25
blocking_vehicle_heights = 3.0, 4.0

# radio table
Transmission Power = 23
Noise Floor = -95
Receiver Sensitivity = -92
Bitrate (maximum) = 3e6
Carrier Frequency = 5.9e9
Bandwidth = 10e6
Sensor frequency = 20
Packet size = 300
)";
  const FileConfig cfg = parse_config_text(text);
  CHECK(cfg.scenario.spawn_spacing_N == 40.0);
  CHECK(cfg.scenario.ego_target_speed == 25.0);
  CHECK(cfg.scenario.duration == 18.0);
  CHECK(cfg.scenario.seed == 42);
  CHECK(cfg.scenario.lane_width == 3.25);
  CHECK(cfg.scenario.blocking_vehicle_heights == std::vector<double>{3.0, 4.0});
  CHECK(cfg.channel.tx_power_dbm == 23.0);
  CHECK(cfg.channel.noise_floor_dbm == -95.0);
  CHECK(cfg.channel.receiver_sensitivity_dbm == -92.0);
  CHECK(cfg.channel.bitrate_bps == 3e6);
  CHECK(cfg.channel.carrier_frequency_hz == 5.9e9);
  CHECK(cfg.channel.bandwidth_hz == 10e6);
  REQUIRE(cfg.sensor_frequency_hz.has_value());
  CHECK(*cfg.sensor_frequency_hz == 20.0);
  REQUIRE(cfg.packet_size.has_value());
  CHECK(*cfg.packet_size == 300);

  ScenarioConfig scenario;
  SimConfig sim;
  apply_file_config(cfg, scenario, sim);
  CHECK(scenario.seed == 42);
  CHECK(sim.sensor_period == doctest::Approx(0.05));
  CHECK(sim.packet_size == 300);
  CHECK(sim.channel.wavelength_m == doctest::Approx(kSpeedOfLight / 5.9e9));
}

TEST_CASE("config: unknown keys, malformed lines and bad numbers are rejected") {
  CHECK_THROWS_AS(parse_config_text("mystery_knob = 3\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config_text("just some text\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config_text("duration = fast\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config_text("duration = -2\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config_text("blocking_vehicle_heights = \n"), std::invalid_argument);
}

TEST_CASE("config: file loader reads and validates") {
  const std::string path = "cfg_io_test.cfg";
  {
    std::ofstream out(path);
    out << "spawn_spacing_N = 60\nseed = 9\n";
  }
  const FileConfig cfg = load_config_file(path);
  CHECK(cfg.scenario.spawn_spacing_N == 60.0);
  CHECK(cfg.scenario.seed == 9);
  std::remove(path.c_str());
  CHECK_THROWS_AS(load_config_file("no_such_file.cfg"), std::invalid_argument);
}

TEST_CASE("report: percent formatting and descending PRR order") {
  std::vector<ReportRow> rows = {
      {"direct", 0.3922, 0.0, 0.6078},
      {"mohed", 0.8798, 2.75, 0.1202},
      {"random", 0.5148, 3.65, 0.4852},
  };
  const std::string table = render_report(rows, "table");
  CHECK(table.find("87.98%") != std::string::npos);
  CHECK(table.find("12.02%") != std::string::npos);
  // mohed first, direct last
  CHECK(table.find("mohed") < table.find("random"));
  CHECK(table.find("random") < table.find("direct"));
}

TEST_CASE("report: json rendering round-trips to the same rows") {
  std::vector<ReportRow> rows = {
      {"mohed", 0.9, 2.0, 0.1},
      {"random", 0.5, 4.0, 0.5},
  };
  const std::string json = render_report(rows, "json");
  const auto back = report_rows_from_json(json);
  REQUIRE(back.size() == rows.size());
  CHECK(back[0].policy == "mohed");
  CHECK(back[0].avg_prr == 0.9);
  CHECK(back[0].mean_switches == 2.0);
  CHECK(back[1].policy == "random");
  CHECK(back[1].per == 0.5);
}

TEST_CASE("report: csv has the documented column order") {
  std::vector<ReportRow> rows = {{"mohed", 0.875, 2.0, 0.125}};
  const std::string csv = render_report(rows, "csv");
  CHECK(csv.rfind("policy,avg_prr,mean_switches,per\n", 0) == 0);
  CHECK(csv.find("mohed,0.875000,2.0000,0.125000") != std::string::npos);
  CHECK_THROWS_AS(render_report(rows, "yaml"), std::invalid_argument);
  CHECK_THROWS_AS(render_report({}, "table"), std::invalid_argument);
}

TEST_CASE("report: metrics document embeds the resolved configuration") {
  ScenarioConfig scenario;
  scenario.seed = 5;
  SimConfig sim;
  RunMetrics m;
  m.policy = "direct";
  m.seed = 5;
  m.prr = 0.75;
  m.per = 0.25;
  const std::string doc = metrics_to_json(m, scenario, sim);
  CHECK(doc.find("\"config\"") != std::string::npos);
  CHECK(doc.find("\"spawn_spacing_N\"") != std::string::npos);
  CHECK(doc.find("\"transmission_power\"") != std::string::npos);
  CHECK(doc.find("\"prr\": 0.75") != std::string::npos);
}

TEST_CASE("report: atomic writes leave no partial files") {
  const std::string path = "atomic_test.txt";
  write_file_atomic(path, "payload");
  std::ifstream in(path);
  std::string content;
  std::getline(in, content);
  CHECK(content == "payload");
  std::ifstream tmp(path + ".tmp");
  CHECK_FALSE(tmp.good());
  std::remove(path.c_str());
}

TEST_CASE("sweep and cdf CSV shapes") {
  SweepResult sweep;
  sweep.cells.push_back({50.0, "mohed", 0.9, 0.02, 3});
  const std::string csv = sweep_to_csv(sweep);
  CHECK(csv.rfind("density,policy,mean_prr,std_prr,runs\n", 0) == 0);
  CHECK(csv.find("50,mohed,0.900000,0.020000,3") != std::string::npos);

  const std::string cdf = cdf_to_csv({{"direct", {{0.2, 0.5}, {0.8, 1.0}}}});
  CHECK(cdf.rfind("policy,prr,cum_fraction\n", 0) == 0);
  CHECK(cdf.find("direct,0.200000000,0.500000000") != std::string::npos);
}
