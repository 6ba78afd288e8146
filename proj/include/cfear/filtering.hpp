#pragma once

#include <variant>
#include <vector>

#include "cfear/radar_io.hpp"

namespace cfear {

/// Keep the k strongest returns per azimuth, all strictly above z_min.
struct KStrongestConfig {
  int k = 12;
  double z_min = 70.0;
};

/// Cell-averaging CFAR: threshold each cell against the mean of surrounding
/// training cells, excluding guard cells and the cell under test.
struct CaCfarConfig {
  int window = 40;               // training cells per side
  int guard = 10;                // guard cells per side
  double false_alarm_rate = 1e-3;
  double z_floor = 20.0;         // hard minimum intensity
};

using FilterConfig = std::variant<KStrongestConfig, CaCfarConfig>;

/// Per azimuth, selects up to k range bins with the highest intensities among
/// those strictly exceeding z_min. Equal intensities at the cut prefer the
/// smaller range bin. Detections are emitted per azimuth in range-bin order.
std::vector<Detection> k_strongest(const PolarScan& scan, const KStrongestConfig& cfg);

/// Detects cells with intensity >= z_floor and > T * mean(training cells),
/// T = N * (Pfa^(-1/N) - 1) with N the number of training cells actually used.
/// The training window shrinks one-sided at the array bounds.
/// Throws ConfigError when 2*(window+guard)+1 > nr.
std::vector<Detection> ca_cfar(const PolarScan& scan, const CaCfarConfig& cfg);

std::vector<Detection> apply_filter(const PolarScan& scan, const FilterConfig& cfg);

}  // namespace cfear
