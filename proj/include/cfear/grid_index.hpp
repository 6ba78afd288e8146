#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "cfear/geometry.hpp"

namespace cfear {

/// Hash-bucket grid over 2D points for radius queries. Cells are half-open
/// squares [i*c, (i+1)*c) x [j*c, (j+1)*c) anchored at the origin.
class GridIndex {
 public:
  GridIndex() = default;
  GridIndex(const std::vector<Point2>& points, double cell_size);

  /// Indices of all points with euclidean distance <= radius from query,
  /// ascending. Radius may exceed the cell size.
  std::vector<int> radius_neighbors(const Point2& query, double radius) const;

  /// Index of the nearest point within radius, or -1. Distance ties resolve
  /// to the smaller index.
  int nearest_within(const Point2& query, double radius) const;

  double cell_size() const { return cell_; }
  size_t size() const { return points_.size(); }

  struct CellCoord {
    int64_t i, j;
    bool operator==(const CellCoord&) const = default;
  };

  /// Occupied cells in row-major coordinate order (deterministic iteration).
  std::vector<CellCoord> occupied_cells() const;
  CellCoord cell_of(const Point2& p) const;
  Point2 cell_center(const CellCoord& c) const;

 private:
  struct CellHash {
    size_t operator()(const CellCoord& c) const {
      uint64_t h = static_cast<uint64_t>(c.i) * 0x9e3779b97f4a7c15ull;
      h ^= static_cast<uint64_t>(c.j) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
      return static_cast<size_t>(h);
    }
  };

  std::vector<Point2> points_;
  double cell_ = 1.0;
  std::unordered_map<CellCoord, std::vector<int>, CellHash> cells_;
};

}  // namespace cfear
