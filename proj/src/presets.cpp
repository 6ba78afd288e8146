#include "cfear/presets.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "cfear/errors.hpp"

namespace cfear {

namespace {

OdometryConfig cfear1() {
  OdometryConfig cfg;
  cfg.filter = KStrongestConfig{12, 70.0};
  cfg.feature.resolution_r = 3.5;
  cfg.feature.resample_f = 1.0;
  cfg.feature.z_min = 70.0;
  cfg.feature.min_sensor_dist = 2.5;
  cfg.registration.cost = CostMetric::P2L;
  cfg.registration.loss = LossKind::Huber;
  cfg.registration.loss_delta = 0.1;
  cfg.registration.assoc_radius = 3.5;
  cfg.registration.normal_tolerance = 30.0 * M_PI / 180;
  cfg.registration.weight_scheme = WeightScheme::Combined;
  cfg.keyframe_count_s = 1;
  cfg.keyframe_min_dist = 1.5;
  cfg.keyframe_min_rot = 5.0 * M_PI / 180;
  return cfg;
}

OdometryConfig cfear3() {
  OdometryConfig cfg = cfear1();
  cfg.filter = KStrongestConfig{40, 60.0};
  cfg.feature.resolution_r = 3.0;
  cfg.feature.z_min = 60.0;
  cfg.registration.cost = CostMetric::P2P;
  cfg.registration.assoc_radius = 3.0;
  cfg.keyframe_count_s = 4;
  return cfg;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"cfear-1", "cfear-2", "cfear-3", "cfear-3-s50", "baseline"};
}

bool is_preset(const std::string& name) {
  for (const std::string& n : preset_names())
    if (n == name) return true;
  return false;
}

OdometryConfig make_preset(const std::string& name) {
  if (name == "cfear-1") return cfear1();
  if (name == "cfear-2") {
    OdometryConfig cfg = cfear1();
    cfg.keyframe_count_s = 3;
    return cfg;
  }
  if (name == "cfear-3") return cfear3();
  if (name == "cfear-3-s50") {
    OdometryConfig cfg = cfear3();
    cfg.keyframe_count_s = 50;
    cfg.registration.loss = LossKind::Cauchy;
    return cfg;
  }
  if (name == "baseline") {
    OdometryConfig cfg = cfear3();
    cfg.keyframe_count_s = 1;
    return cfg;
  }
  throw ConfigError("unknown preset `" + name + "`");
}

std::string to_string(CostMetric metric) {
  switch (metric) {
    case CostMetric::P2P: return "p2p";
    case CostMetric::P2L: return "p2l";
    case CostMetric::P2D: return "p2d";
  }
  return "p2p";
}

std::string to_string(LossKind loss) {
  switch (loss) {
    case LossKind::Squared: return "squared";
    case LossKind::Huber: return "huber";
    case LossKind::PseudoHuber: return "pseudo-huber";
    case LossKind::Cauchy: return "cauchy";
    case LossKind::Tukey: return "tukey";
  }
  return "huber";
}

std::string to_string(WeightScheme scheme) {
  switch (scheme) {
    case WeightScheme::Uniform: return "uniform";
    case WeightScheme::Plan: return "plan";
    case WeightScheme::Det: return "det";
    case WeightScheme::Dir: return "dir";
    case WeightScheme::Combined: return "combined";
  }
  return "combined";
}

namespace {

CostMetric parse_cost(const std::string& s) {
  if (s == "p2p") return CostMetric::P2P;
  if (s == "p2l") return CostMetric::P2L;
  if (s == "p2d") return CostMetric::P2D;
  throw ConfigError("unknown cost metric `" + s + "`");
}

LossKind parse_loss(const std::string& s) {
  if (s == "squared") return LossKind::Squared;
  if (s == "huber") return LossKind::Huber;
  if (s == "pseudo-huber") return LossKind::PseudoHuber;
  if (s == "cauchy") return LossKind::Cauchy;
  if (s == "tukey") return LossKind::Tukey;
  throw ConfigError("unknown loss `" + s + "`");
}

WeightScheme parse_weights(const std::string& s) {
  if (s == "uniform") return WeightScheme::Uniform;
  if (s == "plan") return WeightScheme::Plan;
  if (s == "det") return WeightScheme::Det;
  if (s == "dir") return WeightScheme::Dir;
  if (s == "combined") return WeightScheme::Combined;
  throw ConfigError("unknown weight scheme `" + s + "`");
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

constexpr double kDeg = M_PI / 180.0;

}  // namespace

std::string dump_config(const OdometryConfig& cfg) {
  std::ostringstream os;
  if (const auto* ks = std::get_if<KStrongestConfig>(&cfg.filter)) {
    os << "filter = kstrongest\n";
    os << "kstrongest_k = " << ks->k << "\n";
    os << "z_min = " << fmt(ks->z_min) << "\n";
  } else {
    const auto& cc = std::get<CaCfarConfig>(cfg.filter);
    os << "filter = cacfar\n";
    os << "cacfar_window = " << cc.window << "\n";
    os << "cacfar_guard = " << cc.guard << "\n";
    os << "cacfar_false_alarm_rate = " << fmt(cc.false_alarm_rate) << "\n";
    os << "cacfar_z_floor = " << fmt(cc.z_floor) << "\n";
  }
  os << "resolution = " << fmt(cfg.feature.resolution_r) << "\n";
  os << "resample_factor = " << fmt(cfg.feature.resample_f) << "\n";
  os << "intensity_weighted = " << (cfg.feature.intensity_weighted ? "true" : "false") << "\n";
  os << "min_support = " << cfg.feature.min_support << "\n";
  os << "max_condition = " << fmt(cfg.feature.max_condition) << "\n";
  os << "min_dist = " << fmt(cfg.feature.min_sensor_dist) << "\n";
  os << "feature_z_min = " << fmt(cfg.feature.z_min) << "\n";
  os << "cost = " << to_string(cfg.registration.cost) << "\n";
  os << "loss = " << to_string(cfg.registration.loss) << "\n";
  os << "loss_delta = " << fmt(cfg.registration.loss_delta) << "\n";
  os << "assoc_radius = " << fmt(cfg.registration.assoc_radius) << "\n";
  os << "normal_tolerance_deg = " << fmt(cfg.registration.normal_tolerance / kDeg) << "\n";
  os << "residual_weight = " << to_string(cfg.registration.weight_scheme) << "\n";
  os << "covariance_dampening = " << fmt(cfg.registration.covariance_dampening) << "\n";
  os << "max_iterations = " << cfg.registration.max_iterations << "\n";
  os << "rel_decrease_eps = " << fmt(cfg.registration.rel_decrease_eps) << "\n";
  os << "submap_keyframes = " << cfg.keyframe_count_s << "\n";
  os << "keyframe_min_dist = " << fmt(cfg.keyframe_min_dist) << "\n";
  os << "keyframe_min_rot_deg = " << fmt(cfg.keyframe_min_rot / kDeg) << "\n";
  os << "motion_compensation = " << (cfg.motion_compensation ? "true" : "false") << "\n";
  return os.str();
}

OdometryConfig parse_config(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream is(text);
  std::string line;
  int line_number = 0;
  while (std::getline(is, line)) {
    ++line_number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ls(line);
    std::string key, eq, value;
    if (!(ls >> key)) continue;  // blank
    if (!(ls >> eq >> value) || eq != "=")
      throw ParseError("expected `key = value`", line_number);
    kv[key] = value;
  }

  OdometryConfig cfg;
  auto take = [&](const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) return std::string();
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  auto take_double = [&](const std::string& key, double fallback) {
    const std::string v = take(key);
    return v.empty() ? fallback : std::stod(v);
  };
  auto take_int = [&](const std::string& key, int fallback) {
    const std::string v = take(key);
    return v.empty() ? fallback : std::stoi(v);
  };
  auto take_bool = [&](const std::string& key, bool fallback) {
    const std::string v = take(key);
    if (v.empty()) return fallback;
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("expected true/false for " + key);
  };

  const std::string filter = take("filter");
  if (filter.empty() || filter == "kstrongest") {
    KStrongestConfig ks;
    ks.k = take_int("kstrongest_k", ks.k);
    ks.z_min = take_double("z_min", ks.z_min);
    cfg.filter = ks;
  } else if (filter == "cacfar") {
    CaCfarConfig cc;
    cc.window = take_int("cacfar_window", cc.window);
    cc.guard = take_int("cacfar_guard", cc.guard);
    cc.false_alarm_rate = take_double("cacfar_false_alarm_rate", cc.false_alarm_rate);
    cc.z_floor = take_double("cacfar_z_floor", cc.z_floor);
    cfg.filter = cc;
  } else {
    throw ConfigError("unknown filter `" + filter + "`");
  }

  cfg.feature.resolution_r = take_double("resolution", cfg.feature.resolution_r);
  cfg.feature.resample_f = take_double("resample_factor", cfg.feature.resample_f);
  cfg.feature.intensity_weighted = take_bool("intensity_weighted", cfg.feature.intensity_weighted);
  cfg.feature.min_support = take_int("min_support", cfg.feature.min_support);
  cfg.feature.max_condition = take_double("max_condition", cfg.feature.max_condition);
  cfg.feature.min_sensor_dist = take_double("min_dist", cfg.feature.min_sensor_dist);
  cfg.feature.z_min = take_double("feature_z_min", cfg.feature.z_min);

  std::string v;
  if (!(v = take("cost")).empty()) cfg.registration.cost = parse_cost(v);
  if (!(v = take("loss")).empty()) cfg.registration.loss = parse_loss(v);
  cfg.registration.loss_delta = take_double("loss_delta", cfg.registration.loss_delta);
  cfg.registration.assoc_radius = take_double("assoc_radius", cfg.registration.assoc_radius);
  cfg.registration.normal_tolerance =
      take_double("normal_tolerance_deg", cfg.registration.normal_tolerance / kDeg) * kDeg;
  if (!(v = take("residual_weight")).empty()) cfg.registration.weight_scheme = parse_weights(v);
  cfg.registration.covariance_dampening =
      take_double("covariance_dampening", cfg.registration.covariance_dampening);
  cfg.registration.max_iterations = take_int("max_iterations", cfg.registration.max_iterations);
  cfg.registration.rel_decrease_eps =
      take_double("rel_decrease_eps", cfg.registration.rel_decrease_eps);

  cfg.keyframe_count_s = take_int("submap_keyframes", cfg.keyframe_count_s);
  cfg.keyframe_min_dist = take_double("keyframe_min_dist", cfg.keyframe_min_dist);
  cfg.keyframe_min_rot = take_double("keyframe_min_rot_deg", cfg.keyframe_min_rot / kDeg) * kDeg;
  cfg.motion_compensation = take_bool("motion_compensation", cfg.motion_compensation);

  if (!kv.empty()) throw ConfigError("unknown config key `" + kv.begin()->first + "`");
  return cfg;
}

OdometryConfig load_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open: " + path);
  std::ostringstream buffer;
  buffer << is.rdbuf();
  return parse_config(buffer.str());
}

}  // namespace cfear
