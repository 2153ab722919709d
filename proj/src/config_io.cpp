#include "v2xsim/config_io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace v2xsim {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// "Transmission Power" and "Bitrate (maximum)" normalize to
// transmission_power and bitrate.
std::string normalize_key(const std::string& raw) {
  std::string key;
  for (char c : raw) {
    if (c == '(') break;
    key.push_back(c);
  }
  key = trim(key);
  for (char& c : key) {
    if (c == ' ' || c == '-') c = '_';
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return key;
}

double parse_double(const std::string& value, int line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("config line " + std::to_string(line) + ": bad number '" +
                                value + "'");
  }
  if (trim(value.substr(used)).size() != 0) {
    throw std::invalid_argument("config line " + std::to_string(line) + ": bad number '" +
                                value + "'");
  }
  return v;
}

uint64_t parse_u64(const std::string& value, int line) {
  try {
    return std::stoull(trim(value));
  } catch (const std::exception&) {
    throw std::invalid_argument("config line " + std::to_string(line) + ": bad integer '" +
                                value + "'");
  }
}

std::vector<double> parse_double_list(const std::string& value, int line) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(parse_double(item, line));
  }
  if (out.empty()) {
    throw std::invalid_argument("config line " + std::to_string(line) + ": empty list");
  }
  return out;
}

}  // namespace

FileConfig parse_config_text(const std::string& text) {
  FileConfig cfg;
  std::stringstream ss(text);
  std::string raw_line;
  int line = 0;
  while (std::getline(ss, raw_line)) {
    ++line;
    const auto hash = raw_line.find('#');
    std::string stripped = hash == std::string::npos ? raw_line : raw_line.substr(0, hash);
    stripped = trim(stripped);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(line) +
                                  ": expected key = value");
    }
    const std::string key = normalize_key(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));

    if (key == "spawn_spacing_n") {
      cfg.scenario.spawn_spacing_N = parse_double(value, line);
    } else if (key == "ego_target_speed") {
      cfg.scenario.ego_target_speed = parse_double(value, line);
    } else if (key == "duration") {
      cfg.scenario.duration = parse_double(value, line);
    } else if (key == "seed") {
      cfg.scenario.seed = parse_u64(value, line);
    } else if (key == "lane_width") {
      cfg.scenario.lane_width = parse_double(value, line);
    } else if (key == "blocking_vehicle_heights") {
      cfg.scenario.blocking_vehicle_heights = parse_double_list(value, line);
    } else if (key == "transmission_power") {
      cfg.channel.tx_power_dbm = parse_double(value, line);
    } else if (key == "noise_floor") {
      cfg.channel.noise_floor_dbm = parse_double(value, line);
    } else if (key == "receiver_sensitivity") {
      cfg.channel.receiver_sensitivity_dbm = parse_double(value, line);
    } else if (key == "bitrate") {
      cfg.channel.bitrate_bps = parse_double(value, line);
    } else if (key == "carrier_frequency") {
      cfg.channel.set_frequency(parse_double(value, line));
    } else if (key == "bandwidth") {
      cfg.channel.bandwidth_hz = parse_double(value, line);
    } else if (key == "sensor_frequency") {
      cfg.sensor_frequency_hz = parse_double(value, line);
    } else if (key == "packet_size") {
      cfg.packet_size = static_cast<int>(parse_double(value, line));
    } else {
      throw std::invalid_argument("config line " + std::to_string(line) + ": unknown key '" +
                                  key + "'");
    }
  }
  cfg.scenario.validate();
  cfg.channel.validate();
  return cfg;
}

FileConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

void apply_file_config(const FileConfig& file, ScenarioConfig& scenario, SimConfig& sim) {
  scenario = file.scenario;
  sim.channel = file.channel;
  if (file.sensor_frequency_hz) {
    if (!(*file.sensor_frequency_hz > 0.0)) {
      throw std::invalid_argument("sensor_frequency must be > 0");
    }
    sim.sensor_period = 1.0 / *file.sensor_frequency_hz;
  }
  if (file.packet_size) sim.packet_size = *file.packet_size;
}

}  // namespace v2xsim
