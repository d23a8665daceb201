#include "qcausal/world.hpp"

#include <algorithm>
#include <set>
#include <utility>

namespace qcausal {

const InteractionRule* World::rule_for(const ParticleInfo& a, const ParticleInfo& b, bool* swapped) const {
  for (const auto& r : rules) {
    if (r.type_a == a.type && r.type_b == b.type) {
      if (swapped) *swapped = false;
      return &r;
    }
    if (r.type_a == b.type && r.type_b == a.type) {
      if (swapped) *swapped = true;
      return &r;
    }
  }
  return nullptr;
}

ParticlePairFilter World::filter() const {
  return [this](const ParticleInfo& a, const ParticleInfo& b) { return interacts(a, b); };
}

std::vector<InteractionCandidate> world_candidates(const World& world, const QuantumObject& a,
                                                   const QuantumObject& b) {
  return determine_potential_interactions(a, b, world.filter());
}

namespace {

InteractionObject swap_sides(InteractionObject ia) {
  std::swap(ia.source_a, ia.source_b);
  std::swap(ia.candidate.path_a, ia.candidate.path_b);
  std::swap(ia.candidate.particle_a, ia.candidate.particle_b);
  std::swap(ia.object.particles[0], ia.object.particles[1]);
  std::swap(ia.object.paths.front().states[0], ia.object.paths.front().states[1]);
  return ia;
}

}  // namespace

OutcomeRule world_outcome(const World& world, const QuantumObject& a, const QuantumObject& b,
                          const InteractionCandidate& c) {
  bool swapped = false;
  const auto* rule = world.rule_for(a.particles.at(c.particle_a), b.particles.at(c.particle_b), &swapped);
  if (!rule) throw std::invalid_argument("no interaction rule for particle types '" + a.particles[c.particle_a].type +
                                         "' and '" + b.particles[c.particle_b].type + "'");
  if (!swapped) return rule->outcome;
  OutcomeRule inner = rule->outcome;
  return [inner](const InteractionObject& ia, const Space& space, RngState& rng) {
    return inner(swap_sides(ia), space, rng);
  };
}

namespace {

bool any_candidates(const World& world, const SystemState& s) {
  for (std::size_t k = 0; k < s.objects.size(); ++k)
    for (std::size_t j = k + 1; j < s.objects.size(); ++j)
      if (!world_candidates(world, s.objects[k], s.objects[j]).empty()) return true;
  return false;
}

void perform_all(const World& world, SystemState& s) {
  std::vector<ObjectId> ids;
  ids.reserve(s.objects.size());
  for (const auto& o : s.objects) ids.push_back(o.id);

  std::set<std::pair<std::uint64_t, std::uint64_t>> done;
  for (const auto k : ids) {
    for (const auto j : ids) {
      if (j == k) continue;
      const auto* ok = s.find(k);
      if (!ok) break;
      const auto* oj = s.find(j);
      if (!oj) continue;
      const auto key = std::minmax(k.value, j.value);
      if (done.contains(key)) continue;
      auto cands = world_candidates(world, *ok, *oj);
      if (cands.empty()) continue;
      const auto chosen = select_interaction(cands, s.rng);
      auto rule = world_outcome(world, *ok, *oj, chosen);
      perform_interaction(s, k, j, chosen, rule);
      done.insert(key);
    }
  }
}

void update_idle(const World& world, SystemState& s) {
  std::set<std::uint64_t> busy;
  for (auto it = s.interactions.rbegin(); it != s.interactions.rend() && it->step == s.step_count; ++it) {
    busy.insert(it->object_a.value);
    busy.insert(it->object_b.value);
    busy.insert(it->result.value);
  }
  for (auto& obj : s.objects)
    if (!busy.contains(obj.id.value)) world.update(obj, s.space, s.fields);
}

}  // namespace

std::vector<Law> centralized_laws(std::shared_ptr<const World> world) {
  std::vector<Law> laws;

  Law interact;
  interact.id = "qft-interactions";
  interact.condition = [world](const SystemState& s) { return any_candidates(*world, s); };
  interact.transition = [world](SystemState& s) { perform_all(*world, s); };
  interact.footprint.reads = {WholeObjectSet{}, ObjectAllPaths{"qobject"}};
  interact.footprint.writes = {WholeObjectSet{}, ObjectAllPaths{"qobject"}};
  laws.push_back(std::move(interact));

  if (world->update) {
    Law update;
    update.id = "qobject-update";
    update.transition = [world](SystemState& s) { update_idle(*world, s); };
    update.footprint.reads = {WholeObjectSet{}, CellAt{{0}}};
    update.footprint.writes = {CellAt{{0}}};
    laws.push_back(std::move(update));
  }
  return laws;
}

}  // namespace qcausal
