#include "cfear/grid_index.hpp"

#include <algorithm>
#include <cmath>

namespace cfear {

GridIndex::GridIndex(const std::vector<Point2>& points, double cell_size)
    : points_(points), cell_(cell_size) {
  for (int i = 0; i < static_cast<int>(points_.size()); ++i)
    cells_[cell_of(points_[i])].push_back(i);
}

GridIndex::CellCoord GridIndex::cell_of(const Point2& p) const {
  return {static_cast<int64_t>(std::floor(p.x() / cell_)),
          static_cast<int64_t>(std::floor(p.y() / cell_))};
}

Point2 GridIndex::cell_center(const CellCoord& c) const {
  return {(c.i + 0.5) * cell_, (c.j + 0.5) * cell_};
}

std::vector<GridIndex::CellCoord> GridIndex::occupied_cells() const {
  std::vector<CellCoord> cells;
  cells.reserve(cells_.size());
  for (const auto& kv : cells_) cells.push_back(kv.first);
  std::sort(cells.begin(), cells.end(), [](const CellCoord& a, const CellCoord& b) {
    return a.i != b.i ? a.i < b.i : a.j < b.j;
  });
  return cells;
}

std::vector<int> GridIndex::radius_neighbors(const Point2& query, double radius) const {
  std::vector<int> out;
  if (points_.empty() || radius <= 0.0) return out;
  const double r2 = radius * radius;
  const int64_t i0 = static_cast<int64_t>(std::floor((query.x() - radius) / cell_));
  const int64_t i1 = static_cast<int64_t>(std::floor((query.x() + radius) / cell_));
  const int64_t j0 = static_cast<int64_t>(std::floor((query.y() - radius) / cell_));
  const int64_t j1 = static_cast<int64_t>(std::floor((query.y() + radius) / cell_));
  for (int64_t i = i0; i <= i1; ++i) {
    for (int64_t j = j0; j <= j1; ++j) {
      auto it = cells_.find({i, j});
      if (it == cells_.end()) continue;
      for (int idx : it->second)
        if ((points_[idx] - query).squaredNorm() <= r2) out.push_back(idx);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

int GridIndex::nearest_within(const Point2& query, double radius) const {
  int best = -1;
  double best_d2 = 0.0;
  if (points_.empty() || radius <= 0.0) return best;
  const double r2 = radius * radius;
  const int64_t i0 = static_cast<int64_t>(std::floor((query.x() - radius) / cell_));
  const int64_t i1 = static_cast<int64_t>(std::floor((query.x() + radius) / cell_));
  const int64_t j0 = static_cast<int64_t>(std::floor((query.y() - radius) / cell_));
  const int64_t j1 = static_cast<int64_t>(std::floor((query.y() + radius) / cell_));
  for (int64_t i = i0; i <= i1; ++i) {
    for (int64_t j = j0; j <= j1; ++j) {
      auto it = cells_.find({i, j});
      if (it == cells_.end()) continue;
      for (int idx : it->second) {
        const double d2 = (points_[idx] - query).squaredNorm();
        if (d2 > r2) continue;
        if (best < 0 || d2 < best_d2 || (d2 == best_d2 && idx < best)) {
          best_d2 = d2;
          best = idx;
        }
      }
    }
  }
  return best;
}

}  // namespace cfear
