#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "shipdock/scenario.hpp"

namespace shipdock {

// Scenario files are JSON documents with "schema": 1; docs/scenario-format.md lists the
// fields. Errors are ValidationError with a JSON pointer to the offending field, or
// "line L, column C" for syntax errors.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::filesystem::path& path);

// Accepts either a path to a file or the name of a bundled scenario ("harbor-slip").
std::filesystem::path resolve_scenario_path(const std::string& name_or_path);

// Names of the scenarios shipped in the scenarios/ directory.
std::vector<std::string> bundled_scenarios();

// Bundled scenario directory compiled into the binary.
std::filesystem::path scenario_directory();

// FNV-1a over the IEEE-754 bytes of every parameter, in a fixed order. Presets must hash the
// same in every run.
std::uint64_t preset_fingerprint(const VesselParams& vessel, const std::vector<ThrusterSpec>& thrusters);

}  // namespace shipdock
