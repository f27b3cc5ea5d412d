// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "csiplan/scenario.hpp"

namespace csiplan {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double parsed = 0.0;
  try {
    parsed = std::stod(value, &used);
  } catch (const std::exception&) {
    throw ConfigError("invalid numeric value for " + key + ": '" + value + "'");
  }
  if (used != value.size())
    throw ConfigError("trailing characters in value for " + key + ": '" + value + "'");
  return parsed;
}

int parse_int(const std::string& key, const std::string& value) {
  const double parsed = parse_double(key, value);
  const int as_int = static_cast<int>(parsed);
  if (static_cast<double>(as_int) != parsed)
    throw ConfigError("expected an integer for " + key + ": '" + value + "'");
  return as_int;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  std::uint64_t parsed = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), parsed);
  if (ec != std::errc{} || ptr != value.data() + value.size())
    throw ConfigError("expected an unsigned integer for " + key + ": '" + value + "'");
  return parsed;
}

}  // namespace

ScenarioConfig parse_scenario_config(const std::string& text) {
  ScenarioConfig config;
  const std::map<std::string, std::function<void(const std::string&, const std::string&)>>
      setters{
          {"cells", [&](auto& k, auto& v) { config.cells = parse_int(k, v); }},
          {"radius_m", [&](auto& k, auto& v) { config.radius_m = parse_double(k, v); }},
          {"users_per_cell", [&](auto& k, auto& v) { config.users_per_cell = parse_int(k, v); }},
          {"antennas", [&](auto& k, auto& v) { config.antennas = parse_int(k, v); }},
          {"speed_min_kmh", [&](auto& k, auto& v) { config.speed_min_kmh = parse_double(k, v); }},
          {"speed_max_kmh", [&](auto& k, auto& v) { config.speed_max_kmh = parse_double(k, v); }},
          {"coherence_samples",
           [&](auto& k, auto& v) { config.coherence_samples = parse_int(k, v); }},
          {"slot_seconds", [&](auto& k, auto& v) { config.slot_seconds = parse_double(k, v); }},
          {"carrier_hz", [&](auto& k, auto& v) { config.carrier_hz = parse_double(k, v); }},
          {"pathloss_exponent",
           [&](auto& k, auto& v) { config.pathloss_exponent = parse_double(k, v); }},
          {"pilot_power", [&](auto& k, auto& v) { config.pilot_power = parse_double(k, v); }},
          {"uplink_power", [&](auto& k, auto& v) { config.uplink_power = parse_double(k, v); }},
          {"bandwidth_hz", [&](auto& k, auto& v) { config.bandwidth_hz = parse_double(k, v); }},
          {"locations", [&](auto& k, auto& v) { config.locations = parse_int(k, v); }},
          {"u_max", [&](auto& k, auto& v) { config.u_max = parse_int(k, v); }},
          {"horizon", [&](auto& k, auto& v) { config.horizon = parse_int(k, v); }},
          {"tau", [&](auto& k, auto& v) { config.tau = parse_int(k, v); }},
          {"seed", [&](auto& k, auto& v) { config.seed = parse_u64(k, v); }},
          {"trials", [&](auto& k, auto& v) { config.trials = parse_int(k, v); }},
          {"epochs", [&](auto& k, auto& v) { config.epochs = parse_int(k, v); }},
          {"discount", [&](auto& k, auto& v) { config.discount = parse_double(k, v); }},
          {"vi_tol", [&](auto& k, auto& v) { config.vi_tol = parse_double(k, v); }},
          {"mobility_stickiness",
           [&](auto& k, auto& v) { config.mobility_stickiness = parse_double(k, v); }},
          {"local_search_eps",
           [&](auto& k, auto& v) { config.local_search_eps = parse_double(k, v); }},
      };

  std::istringstream stream(text);
  std::string line;
  int line_number = 0;
  while (std::getline(stream, line)) {
    ++line_number;
    const std::string stripped = trim(line.substr(0, line.find_first_of("#;")));
    if (stripped.empty()) continue;
    if (stripped.front() == '[')
      throw ConfigError("sections are not supported (line " + std::to_string(line_number) + ")");
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected key = value on line " + std::to_string(line_number));
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError("unknown configuration key: " + key);
    it->second(key, value);
  }
  config.validate();
  return config;
}

ScenarioConfig load_scenario_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario_config(buffer.str());
}

}  // namespace csiplan
