#pragma once

#include <array>
#include <compare>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace qcausal {

using Vec3 = std::array<double, 3>;

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

/// Integer lattice coordinate. Unused trailing dimensions stay 0.
struct SpacePoint {
  std::array<int, 3> coords{0, 0, 0};

  SpacePoint() = default;
  constexpr SpacePoint(int x) : coords{x, 0, 0} {}
  constexpr SpacePoint(int x, int y) : coords{x, y, 0} {}
  constexpr SpacePoint(int x, int y, int z) : coords{x, y, z} {}

  int operator[](std::size_t d) const { return coords[d]; }
  int& operator[](std::size_t d) { return coords[d]; }

  auto operator<=>(const SpacePoint&) const = default;
};

std::string to_string(const SpacePoint& p, int dims);

/// Discrete lattice of 1 to 3 dimensions with uniform spacing.
class Space {
 public:
  Space(int dims, std::array<int, 3> extent, double delta_x);

  int dims() const noexcept { return dims_; }
  int extent(std::size_t d) const noexcept { return extent_[d]; }
  const std::array<int, 3>& extents() const noexcept { return extent_; }
  double delta_x() const noexcept { return delta_x_; }
  std::size_t cell_count() const noexcept;

  bool contains(const SpacePoint& p) const noexcept;
  /// Row-major linear index; p must be contained.
  std::size_t linear_index(const SpacePoint& p) const;
  SpacePoint point_at(std::size_t index) const;
  /// Physical position of the cell centre.
  Vec3 position(const SpacePoint& p) const noexcept;
  /// Clamps every coordinate into [0, extent).
  SpacePoint clamp(const SpacePoint& p) const noexcept;

  bool operator==(const Space&) const = default;

 private:
  int dims_;
  std::array<int, 3> extent_;
  double delta_x_;
};

/// One scalar per lattice cell.
struct FieldGrid {
  std::string id;
  std::vector<std::complex<double>> values;

  static FieldGrid filled(std::string id, const Space& space, std::complex<double> value);

  std::complex<double> at(const Space& space, const SpacePoint& p) const { return values[space.linear_index(p)]; }
  std::complex<double>& at(const Space& space, const SpacePoint& p) { return values[space.linear_index(p)]; }

  bool operator==(const FieldGrid&) const = default;
};

}  // namespace qcausal
