#include "qcausal/space.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qcausal/error.hpp"

namespace qcausal {

std::string to_string(const SpacePoint& p, int dims) {
  std::ostringstream os;
  os << '(';
  for (int d = 0; d < dims; ++d) {
    if (d) os << ',';
    os << p[static_cast<std::size_t>(d)];
  }
  os << ')';
  return os.str();
}

Space::Space(int dims, std::array<int, 3> extent, double delta_x) : dims_(dims), extent_(extent), delta_x_(delta_x) {
  if (dims < 1 || dims > 3) throw ConfigError("space.dims", "must be 1, 2 or 3");
  for (int d = 0; d < 3; ++d) {
    auto& e = extent_[static_cast<std::size_t>(d)];
    if (d >= dims) {
      e = 1;
    } else if (e <= 0) {
      throw ConfigError("space.extent", "cell counts must be positive");
    }
  }
  if (!(delta_x > 0.0) || !std::isfinite(delta_x)) throw ConfigError("space.dx", "must be a positive finite real");
}

std::size_t Space::cell_count() const noexcept {
  return static_cast<std::size_t>(extent_[0]) * static_cast<std::size_t>(extent_[1]) *
         static_cast<std::size_t>(extent_[2]);
}

bool Space::contains(const SpacePoint& p) const noexcept {
  for (std::size_t d = 0; d < 3; ++d) {
    if (p[d] < 0 || p[d] >= extent_[d]) return false;
  }
  return true;
}

std::size_t Space::linear_index(const SpacePoint& p) const {
  if (!contains(p)) throw InvariantError("space point " + to_string(p, dims_) + " outside space bounds");
  return (static_cast<std::size_t>(p[0]) * static_cast<std::size_t>(extent_[1]) + static_cast<std::size_t>(p[1])) *
             static_cast<std::size_t>(extent_[2]) +
         static_cast<std::size_t>(p[2]);
}

SpacePoint Space::point_at(std::size_t index) const {
  const auto e1 = static_cast<std::size_t>(extent_[1]);
  const auto e2 = static_cast<std::size_t>(extent_[2]);
  return SpacePoint(static_cast<int>(index / (e1 * e2)), static_cast<int>((index / e2) % e1),
                    static_cast<int>(index % e2));
}

Vec3 Space::position(const SpacePoint& p) const noexcept {
  return {(p[0] + 0.5) * delta_x_, (p[1] + 0.5) * delta_x_, (p[2] + 0.5) * delta_x_};
}

SpacePoint Space::clamp(const SpacePoint& p) const noexcept {
  SpacePoint out = p;
  for (std::size_t d = 0; d < 3; ++d) out[d] = std::clamp(p[d], 0, extent_[d] - 1);
  return out;
}

FieldGrid FieldGrid::filled(std::string id, const Space& space, std::complex<double> value) {
  return FieldGrid{std::move(id), std::vector<std::complex<double>>(space.cell_count(), value)};
}

}  // namespace qcausal
