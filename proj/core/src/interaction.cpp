#include "qcausal/interaction.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qcausal/error.hpp"

namespace qcausal {

std::vector<InteractionCandidate> determine_potential_interactions(const QuantumObject& a, const QuantumObject& b,
                                                                   const ParticlePairFilter& filter) {
  if (a.id == b.id) throw std::invalid_argument("an object cannot interact with itself");
  std::vector<InteractionCandidate> out;

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t ia = 0; ia < a.particles.size(); ++ia)
    for (std::size_t ib = 0; ib < b.particles.size(); ++ib)
      if (!filter || filter(a.particles[ia], b.particles[ib])) pairs.emplace_back(ia, ib);
  if (pairs.empty()) return out;

  std::vector<SpacePoint> shared;
  for (std::size_t pa = 0; pa < a.paths.size(); ++pa) {
    const auto& path_a = a.paths[pa];
    for (std::size_t pb = 0; pb < b.paths.size(); ++pb) {
      const auto& path_b = b.paths[pb];
      const double weight = std::norm(path_a.amplitude * path_b.amplitude);
      if (!(weight > 0.0)) continue;
      for (const auto& [ia, ib] : pairs) {
        const auto& sa = path_a.states[ia].spacepoints;
        const auto& sb = path_b.states[ib].spacepoints;
        shared.clear();
        std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(shared));
        for (const auto& p : shared) out.push_back(InteractionCandidate{p, pa, pb, ia, ib, weight});
      }
    }
  }
  return out;
}

const InteractionCandidate& select_interaction(std::span<const InteractionCandidate> candidates, RngState& rng) {
  if (candidates.empty()) throw std::invalid_argument("select_interaction called with no candidates");
  std::vector<double> weights;
  weights.reserve(candidates.size());
  double total = 0.0;
  for (const auto& c : candidates) total += c.joint_weight;
  for (const auto& c : candidates) weights.push_back(c.joint_weight / total);
  return candidates[random_draw_weighted(weights, rng)];
}

double OutcomeTable::total_weight() const noexcept {
  double w = 0.0;
  for (const auto& r : rows) w += std::norm(r.amplitude);
  return w;
}

void OutcomeTable::normalize() {
  const double w = total_weight();
  if (!(w > 0.0)) throw DegenerateObjectError("outcome table has no weight");
  const double s = 1.0 / std::sqrt(w);
  for (auto& r : rows) r.amplitude *= s;
}

ConservedQuantities path_contribution(const ParticleInfo& particle, const PathState& state) {
  const double p2 = dot(state.momentum, state.momentum);
  const double kinetic = particle.mass > 0.0 ? p2 / (2.0 * particle.mass) : std::sqrt(p2);
  return ConservedQuantities{particle.mass + kinetic, state.momentum, state.angular_momentum};
}

InteractionObject create_interaction_object(const QuantumObject& a, const QuantumObject& b,
                                            const InteractionCandidate& c, ObjectId id) {
  if (c.path_a >= a.paths.size() || c.path_b >= b.paths.size() || c.particle_a >= a.particles.size() ||
      c.particle_b >= b.particles.size())
    throw std::out_of_range("interaction candidate does not index the given objects");
  const auto& sa = a.paths[c.path_a].states[c.particle_a];
  const auto& sb = b.paths[c.path_b].states[c.particle_b];
  if (!sa.covers(c.position) || !sb.covers(c.position))
    throw InvariantError("interaction position is not in the overlap of the selected paths");

  InteractionObject ia;
  ia.source_a = a.id;
  ia.source_b = b.id;
  ia.candidate = c;
  ia.position = c.position;

  auto& obj = ia.object;
  obj.id = id;
  obj.kind = ObjectKind::InteractionObject;
  obj.particles = {a.particles[c.particle_a], b.particles[c.particle_b]};
  PathState at_a = sa;
  PathState at_b = sb;
  at_a.spacepoints = {c.position};
  at_b.spacepoints = {c.position};
  obj.paths = {Path{Amplitude{1.0, 0.0}, {at_a, at_b}}};
  obj.conserved = path_contribution(a.particles[c.particle_a], sa) + path_contribution(b.particles[c.particle_b], sb);
  obj.globals.momentum = obj.conserved.momentum;
  return ia;
}

void drop_particle(SystemState& state, ObjectId id) {
  auto it = std::find_if(state.objects.begin(), state.objects.end(), [&](const QuantumObject& o) { return o.id == id; });
  if (it == state.objects.end()) throw std::out_of_range("drop_particle: unknown object id " + std::to_string(id.value));
  state.objects.erase(it);
  state.dropped.push_back(id);
}

void drop_particle(SystemState& state, ObjectId id, std::size_t particle_index, std::size_t interacting_path) {
  auto& obj = state.get(id);
  if (obj.particles.size() == 1) {
    drop_particle(state, id);
    return;
  }
  const auto removed = path_contribution(obj.particles.at(particle_index),
                                         obj.paths.at(interacting_path).states.at(particle_index));
  obj = eliminate_unaffected_paths(std::move(obj), interacting_path);
  obj = remove_particle_column(std::move(obj), particle_index);
  obj.conserved.energy -= removed.energy;
  obj.conserved.momentum = obj.conserved.momentum - removed.momentum;
  obj.conserved.angular_momentum = obj.conserved.angular_momentum - removed.angular_momentum;
}

QuantumObject eliminate_unaffected_paths(QuantumObject obj, std::size_t interacting_path) {
  return reduce_to_path(std::move(obj), interacting_path);
}

QuantumObject process_interaction_object(const InteractionObject& ia, ObjectId id) {
  const auto& table = ia.outcome;
  if (table.rows.empty()) throw InvariantError("empty outcome table");
  if (table.particles.empty()) throw InvariantError("outcome table has no particles");
  if (std::abs(table.total_weight() - 1.0) > 1e-9) throw InvariantError("outcome table is not normalized");

  QuantumObject out;
  out.id = id;
  out.kind = ObjectKind::ParticleCollection;
  out.particles = table.particles;
  out.paths.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    if (row.states.size() != table.particles.size()) throw InvariantError("outcome row arity mismatch");
    Path p{row.amplitude, row.states};
    for (auto& st : p.states) st.canonicalize();
    out.paths.push_back(std::move(p));
  }
  out.conserved = ia.object.conserved;
  out.globals.momentum = ia.object.conserved.momentum;
  return out;
}

ObjectId perform_interaction(SystemState& state, ObjectId a, ObjectId b, const InteractionCandidate& candidate,
                             const OutcomeRule& rule) {
  if (!rule) throw std::invalid_argument("perform_interaction requires an outcome rule");
  auto ia = create_interaction_object(state.get(a), state.get(b), candidate, state.allocate_id());
  ia.outcome = rule(ia, state.space, state.rng);
  ia.object.globals.position = state.space.position(candidate.position);

  const std::string type_a = state.get(a).particles[candidate.particle_a].type;
  const std::string type_b = state.get(b).particles[candidate.particle_b].type;

  drop_particle(state, a, candidate.particle_a, candidate.path_a);
  drop_particle(state, b, candidate.particle_b, candidate.path_b);

  auto result = process_interaction_object(ia, ia.object.id);
  result.globals.position = ia.object.globals.position;
  const ObjectId result_id = result.id;
  state.add(std::move(result));

  state.interactions.push_back(InteractionRecord{state.step_count, a, b, candidate.particle_a, candidate.particle_b,
                                                 candidate.path_a, candidate.path_b, candidate.position, result_id,
                                                 type_a, type_b});
  return result_id;
}

OutcomeTable resolve_outcome(const OutcomeSpec& spec, const InteractionObject& ia, const Space& space,
                             double spin_reference) {
  if (spec.rows.empty()) throw InvariantError("outcome spec has no rows");
  OutcomeTable table;
  for (const auto& p : spec.rows.front().particles) table.particles.push_back(p.info);

  for (const auto& row : spec.rows) {
    if (row.particles.size() != table.particles.size()) throw InvariantError("outcome rows differ in particle count");
    OutcomeRow out{{}, row.amplitude};
    for (std::size_t i = 0; i < row.particles.size(); ++i) {
      const auto& ps = row.particles[i];
      if (!(ps.info == table.particles[i])) throw InvariantError("outcome rows differ in particle types");
      PathState st;
      if (ps.inherit) {
        if (*ps.inherit > 1) throw InvariantError("inherit index must be 0 or 1");
        st = ia.object.paths.front().states[*ps.inherit];
      }
      st.spacepoints.clear();
      for (const auto& off : ps.offsets) {
        SpacePoint sp = ia.position;
        for (std::size_t d = 0; d < 3; ++d) sp[d] += off[d];
        st.spacepoints.push_back(space.clamp(sp));
      }
      if (ps.momentum) st.momentum = *ps.momentum;
      if (ps.spindir) st.spindir = spin_reference + *ps.spindir;
      st.canonicalize();
      out.states.push_back(std::move(st));
    }
    table.rows.push_back(std::move(out));
  }
  table.normalize();
  return table;
}

}  // namespace qcausal
