#include "qcausal/quantum_object.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qcausal/error.hpp"

namespace qcausal {

double normalize_degrees(double degrees) noexcept {
  double r = std::fmod(degrees, 360.0);
  if (r < 0.0) r += 360.0;
  // fmod of a tiny negative value can round back up to exactly 360
  if (r >= 360.0) r = 0.0;
  return r;
}

void PathState::canonicalize() {
  std::sort(spacepoints.begin(), spacepoints.end());
  spacepoints.erase(std::unique(spacepoints.begin(), spacepoints.end()), spacepoints.end());
  spindir = normalize_degrees(spindir);
}

bool PathState::covers(const SpacePoint& p) const {
  return std::binary_search(spacepoints.begin(), spacepoints.end(), p);
}

std::string to_string(ObjectKind kind) {
  switch (kind) {
    case ObjectKind::Particle: return "particle";
    case ObjectKind::ParticleCollection: return "collection";
    case ObjectKind::InteractionObject: return "interaction";
  }
  return "unknown";
}

ObjectKind object_kind_from_string(const std::string& text) {
  if (text == "particle") return ObjectKind::Particle;
  if (text == "collection") return ObjectKind::ParticleCollection;
  if (text == "interaction") return ObjectKind::InteractionObject;
  throw std::invalid_argument("unknown object kind '" + text + "'");
}

ConservedQuantities& ConservedQuantities::operator+=(const ConservedQuantities& o) {
  energy += o.energy;
  momentum = momentum + o.momentum;
  angular_momentum = angular_momentum + o.angular_momentum;
  return *this;
}

double QuantumObject::total_weight() const noexcept {
  double w = 0.0;
  for (const auto& p : paths) w += std::norm(p.amplitude);
  return w;
}

void check_invariants(const QuantumObject& obj, const Space& space) {
  const auto tag = "object " + std::to_string(obj.id.value) + ": ";
  if (obj.particles.empty()) throw InvariantError(tag + "has no particles");
  if (obj.paths.empty()) throw InvariantError(tag + "has no paths");
  if (obj.kind == ObjectKind::Particle && obj.particles.size() != 1)
    throw InvariantError(tag + "kind particle requires exactly one particle");
  for (std::size_t i = 0; i < obj.paths.size(); ++i) {
    const auto& path = obj.paths[i];
    if (path.states.size() != obj.particles.size())
      throw InvariantError(tag + "path " + std::to_string(i) + " is not rectangular");
    if (!std::isfinite(path.amplitude.real()) || !std::isfinite(path.amplitude.imag()))
      throw InvariantError(tag + "non-finite amplitude");
    for (const auto& st : path.states) {
      if (st.spacepoints.empty()) throw InvariantError(tag + "path state without spacepoints");
      for (const auto& sp : st.spacepoints) {
        if (!space.contains(sp))
          throw InvariantError(tag + "spacepoint " + to_string(sp, space.dims()) + " outside space");
      }
      if (st.spindir < 0.0 || st.spindir >= 360.0) throw InvariantError(tag + "spindir not in [0,360)");
    }
  }
}

QuantumObject normalize_amplitudes(QuantumObject obj) {
  const double w = obj.total_weight();
  if (!(w > 0.0)) throw DegenerateObjectError("object " + std::to_string(obj.id.value) + " has all-zero amplitudes");
  const double scale = 1.0 / std::sqrt(w);
  for (auto& p : obj.paths) p.amplitude *= scale;
  return obj;
}

QuantumObject reduce_to_path(QuantumObject obj, std::size_t path_index) {
  if (path_index >= obj.paths.size())
    throw std::out_of_range("path index " + std::to_string(path_index) + " out of range for object with " +
                            std::to_string(obj.paths.size()) + " paths");
  Path kept = std::move(obj.paths[path_index]);
  const double mod = std::abs(kept.amplitude);
  if (!(mod > 0.0)) throw DegenerateObjectError("selected path has zero amplitude");
  kept.amplitude /= mod;
  obj.paths.clear();
  obj.paths.push_back(std::move(kept));
  return obj;
}

std::vector<SpacePoint> object_footprint(const QuantumObject& obj) {
  std::vector<SpacePoint> out;
  for (const auto& path : obj.paths)
    for (const auto& st : path.states) out.insert(out.end(), st.spacepoints.begin(), st.spacepoints.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

QuantumObject remove_particle_column(QuantumObject obj, std::size_t particle_index) {
  if (particle_index >= obj.particles.size()) throw std::out_of_range("particle index out of range");
  if (obj.particles.size() == 1) throw InvariantError("cannot remove the last particle of an object");
  obj.particles.erase(obj.particles.begin() + static_cast<std::ptrdiff_t>(particle_index));
  for (auto& path : obj.paths) path.states.erase(path.states.begin() + static_cast<std::ptrdiff_t>(particle_index));
  if (obj.particles.size() == 1) obj.kind = ObjectKind::Particle;
  return obj;
}

QuantumObject merge_identical_paths(QuantumObject obj, double zero_tolerance) {
  std::vector<Path> merged;
  merged.reserve(obj.paths.size());
  for (auto& path : obj.paths) {
    auto it = std::find_if(merged.begin(), merged.end(), [&](const Path& m) { return m.states == path.states; });
    if (it == merged.end()) {
      merged.push_back(std::move(path));
    } else {
      it->amplitude += path.amplitude;
    }
  }
  std::erase_if(merged, [&](const Path& p) { return std::abs(p.amplitude) <= zero_tolerance; });
  obj.paths = std::move(merged);
  return obj;
}

}  // namespace qcausal
