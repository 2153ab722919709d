#pragma once

#include <optional>
#include <string>

#include "v2xsim/engine.hpp"

namespace v2xsim {

// Flat key=value scenario file. Keys are the ScenarioConfig field names plus
// the radio-table parameters (transmission_power, noise_floor,
// receiver_sensitivity, bitrate, carrier_frequency, bandwidth,
// sensor_frequency, packet_size). Unknown keys are rejected.
struct FileConfig {
  ScenarioConfig scenario;
  ChannelParams channel;
  std::optional<double> sensor_frequency_hz;
  std::optional<int> packet_size;
};

FileConfig parse_config_text(const std::string& text);
FileConfig load_config_file(const std::string& path);

// Copies the file-provided values into the run configuration.
void apply_file_config(const FileConfig& file, ScenarioConfig& scenario, SimConfig& sim);

}  // namespace v2xsim
