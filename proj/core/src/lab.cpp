#include "qcausal/lab.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qcausal/error.hpp"

namespace qcausal::lab {

double spin_probability(double delta_degrees) noexcept {
  // cos^2 has period 180 degrees; pin the exact zeros and ones
  const double r = std::fmod(normalize_degrees(delta_degrees), 180.0);
  if (r == 0.0) return 1.0;
  if (r == 90.0) return 0.0;
  const double c = std::cos(r * std::numbers::pi / 180.0);
  return c * c;
}

double post_measurement_spindir(double apparatus_degrees, bool case1) noexcept {
  return normalize_degrees(case1 ? apparatus_degrees : apparatus_degrees + 90.0);
}

QuantumObject make_particle(ObjectId id, const std::string& type, double mass, std::vector<SpacePoint> cells,
                            Vec3 momentum, double spindir) {
  QuantumObject obj;
  obj.id = id;
  obj.kind = ObjectKind::Particle;
  obj.particles = {ParticleInfo{type, mass}};
  PathState st;
  st.spacepoints = std::move(cells);
  st.momentum = momentum;
  st.spindir = spindir;
  st.canonicalize();
  obj.paths = {Path{Amplitude{1.0, 0.0}, {st}}};
  obj.conserved = path_contribution(obj.particles.front(), st);
  obj.globals.momentum = momentum;
  return obj;
}

std::vector<FieldGrid> stern_gerlach_fields(const Space& space, std::span<const SgApparatus> apparatus) {
  auto present = FieldGrid::filled(kSgPresent, space, 0.0);
  auto angle = FieldGrid::filled(kSgAngle, space, 0.0);
  for (const auto& a : apparatus) {
    present.at(space, a.cell) = 1.0;
    angle.at(space, a.cell) = normalize_degrees(a.angle);
  }
  return {std::move(present), std::move(angle)};
}

namespace {

int cells_per_step(double momentum, double mass) {
  return static_cast<int>(std::lround(mass > 0.0 ? momentum / mass : momentum));
}

const FieldGrid* find_field(std::span<const FieldGrid> fields, const std::string& id) {
  for (const auto& f : fields)
    if (f.id == id) return &f;
  return nullptr;
}

}  // namespace

void propagate(QuantumObject& obj, const Space& space) {
  for (auto& path : obj.paths) {
    for (std::size_t i = 0; i < path.states.size(); ++i) {
      auto& st = path.states[i];
      const double mass = obj.particles[i].mass;
      std::array<int, 3> step{};
      bool moving = false;
      for (std::size_t d = 0; d < 3; ++d) {
        step[d] = cells_per_step(st.momentum[d], mass);
        moving = moving || step[d] != 0;
      }
      if (!moving) continue;
      for (auto& sp : st.spacepoints) {
        for (std::size_t d = 0; d < 3; ++d) {
          const int moved = sp[d] + step[d];
          if (moved < 0 || moved >= space.extent(d)) {
            st.momentum[d] = 0.0;
            sp[d] = std::clamp(moved, 0, space.extent(d) - 1);
          } else {
            sp[d] = moved;
          }
        }
      }
      st.canonicalize();
    }
  }
}

void stern_gerlach(QuantumObject& obj, const Space& space, std::span<const FieldGrid> fields) {
  const auto* present = find_field(fields, kSgPresent);
  const auto* angle = find_field(fields, kSgAngle);
  if (!present || !angle) return;

  const auto on_apparatus = [&](const PathState& st) {
    return st.spacepoints.size() == 1 && st.spacepoints.front()[1] == 1 &&
           present->at(space, st.spacepoints.front()).real() != 0.0;
  };
  bool any = false;
  for (const auto& path : obj.paths)
    for (std::size_t i = 0; i < obj.particles.size() && !any; ++i)
      any = obj.particles[i].type == kElectron && on_apparatus(path.states[i]);
  if (!any) return;

  std::vector<Path> work = obj.paths;
  bool changed = false;
  for (std::size_t i = 0; i < obj.particles.size(); ++i) {
    if (obj.particles[i].type != kElectron) continue;
    std::vector<Path> next;
    next.reserve(work.size() * 2);
    for (auto& path : work) {
      const auto& st = path.states[i];
      if (!on_apparatus(st)) {
        next.push_back(std::move(path));
        continue;
      }
      changed = true;
      const double sg = angle->at(space, st.spacepoints.front()).real();
      const double p_up = spin_probability(st.spindir - sg);
      for (const bool up : {true, false}) {
        const double w = up ? p_up : 1.0 - p_up;
        if (!(w > 0.0)) continue;
        Path branch = path;
        branch.amplitude *= std::sqrt(w);
        branch.states[i].spacepoints.front()[1] += up ? 1 : -1;
        const double dir = post_measurement_spindir(sg, up);
        for (std::size_t k = 0; k < obj.particles.size(); ++k)
          if (obj.particles[k].type == kElectron) branch.states[k].spindir = dir;
        next.push_back(std::move(branch));
      }
    }
    work = std::move(next);
  }
  if (changed) obj.paths = std::move(work);
}

OutcomeTable absorb_outcome(const InteractionObject& ia, const Space&, RngState&) {
  const auto& in = ia.object.paths.front().states;
  OutcomeTable table;
  table.particles = {ParticleInfo{kClick, ia.object.particles[1].mass}};
  PathState click;
  click.spacepoints = {ia.position};
  click.momentum = in[0].momentum + in[1].momentum;
  click.angular_momentum = in[0].angular_momentum + in[1].angular_momentum;
  click.spindir = in[0].spindir;
  table.rows = {OutcomeRow{{click}, Amplitude{1.0, 0.0}}};
  return table;
}

OutcomeTable mark_outcome(const InteractionObject& ia, const Space&, RngState&) {
  const auto& in = ia.object.paths.front().states;
  OutcomeTable table;
  table.particles = {ia.object.particles[0], ia.object.particles[1]};
  PathState particle = in[0];
  PathState record = in[1];
  particle.spacepoints = {ia.position};
  record.spacepoints = {ia.position};
  record.momentum = {0, 0, 0};
  table.rows = {OutcomeRow{{particle, record}, Amplitude{1.0, 0.0}}};
  return table;
}

bool apply_collapse_flags(QuantumObject& obj) {
  if (obj.flags.retired) return false;
  if (!obj.flags.pending()) return true;
  if (obj.flags.keep_path) {
    const std::size_t keep = *obj.flags.keep_path;
    obj = reduce_to_path(std::move(obj), keep);
  }
  auto drops = obj.flags.drop_particles;
  std::sort(drops.begin(), drops.end(), std::greater<>());
  drops.erase(std::unique(drops.begin(), drops.end()), drops.end());
  if (drops.size() >= obj.particles.size()) {
    obj.flags.retired = true;
    return false;
  }
  for (auto idx : drops) {
    const auto removed = path_contribution(obj.particles.at(idx), obj.paths.front().states.at(idx));
    obj.conserved.energy -= removed.energy;
    obj.conserved.momentum = obj.conserved.momentum - removed.momentum;
    obj.conserved.angular_momentum = obj.conserved.angular_momentum - removed.angular_momentum;
    obj = remove_particle_column(std::move(obj), idx);
  }
  obj.flags.drop_particles.clear();
  obj.flags.keep_path.reset();
  return true;
}

bool any_particle_of_type(const SystemState& state, const std::string& type) {
  for (const auto& o : state.objects)
    for (const auto& p : o.particles)
      if (p.type == type) return true;
  return false;
}

}  // namespace qcausal::lab
