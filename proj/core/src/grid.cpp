#include "crdm/grid.hpp"

#include <sstream>

namespace crdm {

GridSpec GridSpec::box(const Vec3& center, const Vec3& half_widths,
                       const std::array<std::size_t, 3>& counts, GridRule rule) {
  GridSpec g;
  g.rule_ = rule;
  g.counts_ = counts;
  for (int a = 0; a < 3; ++a) {
    if (!(half_widths[a] > 0.0)) {
      throw ParameterError("grid half-width must be positive");
    }
    const std::size_t n = counts[a];
    if (rule == GridRule::kTrapezoid && n < 2) {
      throw ParameterError("trapezoid grid needs at least 2 nodes per axis");
    }
    if (n < 1) throw ParameterError("grid needs at least 1 node per axis");
    g.lower_[a] = center[a] - half_widths[a];
    g.upper_[a] = center[a] + half_widths[a];
    const double len = 2.0 * half_widths[a];
    if (rule == GridRule::kTrapezoid) {
      g.spacing_[a] = len / static_cast<double>(n - 1);
      g.origin_[a] = g.lower_[a];
    } else {
      g.spacing_[a] = len / static_cast<double>(n);
      g.origin_[a] = g.lower_[a] + 0.5 * g.spacing_[a];
    }
  }
  return g;
}

GridSpec GridSpec::cube(const Vec3& center, double half_width, std::size_t count,
                        GridRule rule) {
  return box(center, Vec3::Constant(half_width), {count, count, count}, rule);
}

double GridSpec::volume() const {
  return (upper_ - lower_).prod();
}

double GridSpec::axis_weight(int axis, std::size_t i) const {
  const double h = spacing_[axis];
  if (rule_ == GridRule::kTrapezoid && (i == 0 || i + 1 == counts_[axis])) {
    return 0.5 * h;
  }
  return h;
}

std::array<std::size_t, 3> GridSpec::split(std::size_t index) const {
  const std::size_t iz = index % counts_[2];
  const std::size_t rest = index / counts_[2];
  return {rest / counts_[1], rest % counts_[1], iz};
}

Vec3 GridSpec::node(std::size_t index) const {
  const auto [ix, iy, iz] = split(index);
  return {axis_coordinate(0, ix), axis_coordinate(1, iy), axis_coordinate(2, iz)};
}

double GridSpec::weight(std::size_t index) const {
  const auto [ix, iy, iz] = split(index);
  return axis_weight(0, ix) * axis_weight(1, iy) * axis_weight(2, iz);
}

bool GridSpec::on_boundary(std::size_t index) const {
  const auto idx = split(index);
  for (int a = 0; a < 3; ++a) {
    if (idx[a] == 0 || idx[a] + 1 == counts_[a]) return true;
  }
  return false;
}

std::string GridSpec::describe() const {
  std::ostringstream os;
  os << (rule_ == GridRule::kTrapezoid ? "trapezoid" : "midpoint") << ' '
     << counts_[0] << 'x' << counts_[1] << 'x' << counts_[2] << " on ["
     << lower_[0] << ',' << upper_[0] << "]x[" << lower_[1] << ',' << upper_[1]
     << "]x[" << lower_[2] << ',' << upper_[2] << ']';
  return os.str();
}

}  // namespace crdm
