#pragma once

#include <array>
#include <cstddef>
#include <string>

#include "crdm/types.hpp"

namespace crdm {

enum class GridRule { kTrapezoid, kMidpoint };

/// Tensor-product grid over an axis-aligned box with product quadrature
/// weights. Node index layout is (ix * ny + iy) * nz + iz.
class GridSpec {
 public:
  /// Box [center - half_width, center + half_width] per axis.
  static GridSpec box(const Vec3& center, const Vec3& half_widths,
                      const std::array<std::size_t, 3>& counts,
                      GridRule rule = GridRule::kTrapezoid);
  static GridSpec cube(const Vec3& center, double half_width, std::size_t count,
                       GridRule rule = GridRule::kTrapezoid);

  std::size_t size() const { return counts_[0] * counts_[1] * counts_[2]; }
  const std::array<std::size_t, 3>& counts() const { return counts_; }
  const Vec3& origin() const { return origin_; }
  const Vec3& spacing() const { return spacing_; }
  const Vec3& lower() const { return lower_; }
  const Vec3& upper() const { return upper_; }
  GridRule rule() const { return rule_; }
  double volume() const;

  double axis_coordinate(int axis, std::size_t i) const {
    return origin_[axis] + spacing_[axis] * static_cast<double>(i);
  }
  double axis_weight(int axis, std::size_t i) const;

  Vec3 node(std::size_t index) const;
  double weight(std::size_t index) const;
  /// True when the node lies on the outer faces of the box (trapezoid) or in
  /// the outermost cell layer (midpoint).
  bool on_boundary(std::size_t index) const;

  std::string describe() const;

 private:
  GridSpec() = default;
  std::array<std::size_t, 3> split(std::size_t index) const;

  Vec3 lower_ = Vec3::Zero();
  Vec3 upper_ = Vec3::Zero();
  Vec3 origin_ = Vec3::Zero();
  Vec3 spacing_ = Vec3::Zero();
  std::array<std::size_t, 3> counts_{};
  GridRule rule_ = GridRule::kTrapezoid;
};

}  // namespace crdm
