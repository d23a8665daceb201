#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qcausal/space.hpp"

namespace qcausal {

using Amplitude = std::complex<double>;

/// Strong id for quantum objects; unique within one SystemState.
struct ObjectId {
  std::uint64_t value = 0;
  auto operator<=>(const ObjectId&) const = default;
};

/// Maps any angle in degrees onto [0, 360).
double normalize_degrees(double degrees) noexcept;

/// Per-particle state of one path (one cell of the paths x particles table).
struct PathState {
  std::vector<SpacePoint> spacepoints;  // sorted, unique, non-empty
  Vec3 momentum{0, 0, 0};
  Vec3 angular_momentum{0, 0, 0};
  double spindir = 0.0;  // degrees in [0, 360)

  /// Sorts and dedups spacepoints and normalizes spindir.
  void canonicalize();
  bool covers(const SpacePoint& p) const;

  bool operator==(const PathState&) const = default;
};

/// One alternative row: an amplitude plus one PathState per particle.
struct Path {
  Amplitude amplitude{1.0, 0.0};
  std::vector<PathState> states;

  bool operator==(const Path&) const = default;
};

struct ParticleInfo {
  std::string type;
  double mass = 0.0;

  bool operator==(const ParticleInfo&) const = default;
};

enum class ObjectKind { Particle, ParticleCollection, InteractionObject };

std::string to_string(ObjectKind kind);
ObjectKind object_kind_from_string(const std::string& text);

struct GlobalAttributes {
  Vec3 position{0, 0, 0};
  Vec3 momentum{0, 0, 0};

  bool operator==(const GlobalAttributes&) const = default;
};

struct ConservedQuantities {
  double energy = 0.0;
  Vec3 momentum{0, 0, 0};
  Vec3 angular_momentum{0, 0, 0};

  ConservedQuantities& operator+=(const ConservedQuantities& o);
  bool operator==(const ConservedQuantities&) const = default;
};

inline ConservedQuantities operator+(ConservedQuantities a, const ConservedQuantities& b) { return a += b; }

/// Object-global flags consulted by the object's own path update. The refined
/// runtime uses them to drop particles and discard paths without reaching
/// into the object from outside.
struct CollapseFlags {
  std::vector<std::size_t> drop_particles;
  std::optional<std::size_t> keep_path;
  bool retired = false;

  bool pending() const noexcept { return !drop_particles.empty() || keep_path.has_value(); }
  bool operator==(const CollapseFlags&) const = default;
};

/// A particle or particle collection: a table of paths x particle states,
/// one amplitude per path.
struct QuantumObject {
  ObjectId id;
  ObjectKind kind = ObjectKind::Particle;
  std::vector<ParticleInfo> particles;
  std::vector<Path> paths;
  GlobalAttributes globals;
  ConservedQuantities conserved;
  CollapseFlags flags;

  std::size_t particle_count() const noexcept { return particles.size(); }
  std::size_t path_count() const noexcept { return paths.size(); }
  double total_weight() const noexcept;

  bool operator==(const QuantumObject&) const = default;
};

/// Throws InvariantError when the table is not rectangular, paths are empty,
/// a Particle has more than one particle or a spacepoint is out of bounds.
void check_invariants(const QuantumObject& obj, const Space& space);

/// Scales amplitudes so that the squared moduli sum to one.
QuantumObject normalize_amplitudes(QuantumObject obj);

/// Keeps only the selected path, rescaled to modulus one.
QuantumObject reduce_to_path(QuantumObject obj, std::size_t path_index);

/// Union of all spacepoints over all paths and particles, sorted.
std::vector<SpacePoint> object_footprint(const QuantumObject& obj);

/// Removes one particle column from the table. The particle count must stay
/// positive; a collection reduced to one particle becomes a Particle.
QuantumObject remove_particle_column(QuantumObject obj, std::size_t particle_index);

/// Merges paths whose per-particle states are identical by adding their
/// amplitudes, then drops paths whose amplitude vanished.
QuantumObject merge_identical_paths(QuantumObject obj, double zero_tolerance = 1e-15);

}  // namespace qcausal
