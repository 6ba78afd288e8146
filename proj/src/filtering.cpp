#include "cfear/filtering.hpp"

#include <algorithm>
#include <cmath>

#include "cfear/errors.hpp"
#include "cfear/parallel.hpp"

namespace cfear {

namespace {

// Sorted-array insertion selection, O(nr * k). Order: intensity descending,
// ties broken toward the smaller range bin.
void k_strongest_azimuth(const PolarScan& scan, int a, const KStrongestConfig& cfg,
                         std::vector<Detection>& out) {
  struct Entry {
    double intensity;
    int bin;
  };
  std::vector<Entry> best;
  best.reserve(cfg.k);
  for (int d = 1; d <= scan.nr; ++d) {
    const double z = scan.intensity(a, d);
    if (!(z > cfg.z_min)) continue;
    if (static_cast<int>(best.size()) == cfg.k && z <= best.back().intensity) continue;
    auto it = std::upper_bound(best.begin(), best.end(), z,
                               [](double v, const Entry& e) { return v > e.intensity; });
    best.insert(it, Entry{z, d});
    if (static_cast<int>(best.size()) > cfg.k) best.pop_back();
  }
  std::sort(best.begin(), best.end(), [](const Entry& l, const Entry& r) { return l.bin < r.bin; });
  for (const Entry& e : best) out.push_back(Detection{a, e.bin, e.intensity});
}

}  // namespace

std::vector<Detection> k_strongest(const PolarScan& scan, const KStrongestConfig& cfg) {
  std::vector<std::vector<Detection>> rows(scan.na);
  parallel_for(scan.na, [&](size_t a) {
    k_strongest_azimuth(scan, static_cast<int>(a), cfg, rows[a]);
  });
  std::vector<Detection> out;
  for (const auto& row : rows) out.insert(out.end(), row.begin(), row.end());
  return out;
}

std::vector<Detection> ca_cfar(const PolarScan& scan, const CaCfarConfig& cfg) {
  if (2 * (cfg.window + cfg.guard) + 1 > scan.nr)
    throw ConfigError("CA-CFAR window of " + std::to_string(cfg.window) + "+" +
                      std::to_string(cfg.guard) + " cells per side does not fit " +
                      std::to_string(scan.nr) + " range bins");

  std::vector<std::vector<Detection>> rows(scan.na);
  parallel_for(scan.na, [&](size_t ai) {
    const int a = static_cast<int>(ai);
    // Prefix sums over the row make each training mean O(1).
    std::vector<double> prefix(scan.nr + 1, 0.0);
    for (int c = 0; c < scan.nr; ++c) prefix[c + 1] = prefix[c] + scan.at(a, c);
    auto range_sum = [&](int lo, int hi) {  // columns [lo, hi), clamped
      lo = std::max(lo, 0);
      hi = std::min(hi, scan.nr);
      return hi > lo ? prefix[hi] - prefix[lo] : 0.0;
    };
    auto range_count = [&](int lo, int hi) {
      lo = std::max(lo, 0);
      hi = std::min(hi, scan.nr);
      return hi > lo ? hi - lo : 0;
    };
    for (int c = 0; c < scan.nr; ++c) {
      const double z = scan.at(a, c);
      if (z < cfg.z_floor) continue;
      const int lo_train = range_count(c - cfg.guard - cfg.window, c - cfg.guard);
      const int hi_train = range_count(c + cfg.guard + 1, c + cfg.guard + 1 + cfg.window);
      const int n = lo_train + hi_train;
      if (n == 0) continue;
      const double mean = (range_sum(c - cfg.guard - cfg.window, c - cfg.guard) +
                           range_sum(c + cfg.guard + 1, c + cfg.guard + 1 + cfg.window)) /
                          n;
      const double t = n * (std::pow(cfg.false_alarm_rate, -1.0 / n) - 1.0);
      if (z > t * mean) rows[a].push_back(Detection{a, c + 1, z});
    }
  });
  std::vector<Detection> out;
  for (const auto& row : rows) out.insert(out.end(), row.begin(), row.end());
  return out;
}

std::vector<Detection> apply_filter(const PolarScan& scan, const FilterConfig& cfg) {
  if (const auto* ks = std::get_if<KStrongestConfig>(&cfg)) return k_strongest(scan, *ks);
  return ca_cfar(scan, std::get<CaCfarConfig>(cfg));
}

}  // namespace cfear
