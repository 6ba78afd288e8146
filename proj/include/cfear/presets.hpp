#pragma once

#include <string>
#include <vector>

#include "cfear/odometry.hpp"

namespace cfear {

/// Named parameter sets: cfear-1 (efficient, P2L, s=1), cfear-2 (s=3),
/// cfear-3 (low drift, k=40, P2P, s=4), cfear-3-s50 (Cauchy, s=50) and
/// baseline (cfear-3 with a single keyframe).
std::vector<std::string> preset_names();
bool is_preset(const std::string& name);
OdometryConfig make_preset(const std::string& name);  // throws ConfigError on unknown names

/// Flat `key = value` config text; round trips through parse_config exactly.
std::string dump_config(const OdometryConfig& cfg);
OdometryConfig parse_config(const std::string& text);
OdometryConfig load_config_file(const std::string& path);

std::string to_string(CostMetric metric);
std::string to_string(LossKind loss);
std::string to_string(WeightScheme scheme);

}  // namespace cfear
