#pragma once

#include <span>
#include <string>
#include <vector>

#include "qcausal/interaction.hpp"
#include "qcausal/quantum_object.hpp"
#include "qcausal/world.hpp"

// Building blocks shared by the bundled experiments: particle factories,
// per-path dynamics and the outcome rules of the lab apparatus.
namespace qcausal::lab {

inline const std::string kElectron = "electron";
inline const std::string kDetector = "detector";
inline const std::string kClick = "click";
inline const std::string kPump = "pump";
inline const std::string kSource = "source";
inline const std::string kMarker = "marker";

// Fields describing static Stern-Gerlach apparatus: presence flag and angle.
inline const std::string kSgPresent = "sg_present";
inline const std::string kSgAngle = "sg_angle";

/// Probability of a case1 (up) result when the spin direction and the
/// apparatus orientation differ by `delta_degrees`: cos^2 of the angle.
double spin_probability(double delta_degrees) noexcept;

/// Spin direction a particle is left in by a Stern-Gerlach result.
double post_measurement_spindir(double apparatus_degrees, bool case1) noexcept;

QuantumObject make_particle(ObjectId id, const std::string& type, double mass, std::vector<SpacePoint> cells,
                            Vec3 momentum = {0, 0, 0}, double spindir = 0.0);

/// Adds Stern-Gerlach fields (zero elsewhere) for the given cells and angles.
struct SgApparatus {
  SpacePoint cell;
  double angle = 0.0;
};
std::vector<FieldGrid> stern_gerlach_fields(const Space& space, std::span<const SgApparatus> apparatus);

/// Moves every path state by its momentum (cells per step, momentum / mass
/// for massive particles). States that would leave the space stop at the
/// boundary with that momentum component zeroed.
void propagate(QuantumObject& obj, const Space& space);

/// Path diversion by Stern-Gerlach apparatus on the beam line (y == 1).
/// Every electron sitting on an apparatus cell splits its path into an up
/// branch (y + 1, amplitude * sqrt(p)) and a down branch (y - 1,
/// amplitude * sqrt(1 - p)); the spin of every electron in the branch row is
/// set to the measured axis. Zero-weight branches are dropped.
void stern_gerlach(QuantumObject& obj, const Space& space, std::span<const FieldGrid> fields);

/// Detector absorbs the particle: out collection is a single click at x that
/// carries the detector's state.
OutcomeTable absorb_outcome(const InteractionObject& ia, const Space& space, RngState& rng);

/// Which-path marker: the particle continues unchanged, entangled with a
/// marker record left at x.
OutcomeTable mark_outcome(const InteractionObject& ia, const Space& space, RngState& rng);

/// Applies pending collapse flags: drops flagged particle columns and keeps
/// only the flagged path. Returns false when the object is retired.
bool apply_collapse_flags(QuantumObject& obj);

/// True while any object still holds a particle of the given type.
bool any_particle_of_type(const SystemState& state, const std::string& type);

}  // namespace qcausal::lab
