#include "qcausal/refined.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <tuple>

#include <json.hpp>

#include "qcausal/error.hpp"
#include "qcausal/lab.hpp"

namespace qcausal::refined {

std::string to_string(SchedulerMode mode) { return mode == SchedulerMode::RoundRobin ? "round-robin" : "randomized"; }

SchedulerMode scheduler_mode_from_string(const std::string& text) {
  if (text == "round-robin" || text == "deterministic") return SchedulerMode::RoundRobin;
  if (text == "randomized") return SchedulerMode::Randomized;
  throw ConfigError("scheduler", "expected round-robin or randomized, got '" + text + "'");
}

ObjectAdvert advertise(const QuantumObject& obj, std::uint64_t version) {
  ObjectAdvert ad;
  ad.object = obj.id;
  ad.version = version;
  ad.particles = obj.particles;
  ad.paths.reserve(obj.paths.size());
  for (const auto& p : obj.paths) {
    Path view{p.amplitude, {}};
    view.states.reserve(p.states.size());
    for (const auto& st : p.states) {
      PathState s;
      s.spacepoints = st.spacepoints;
      view.states.push_back(std::move(s));
    }
    ad.paths.push_back(std::move(view));
  }
  return ad;
}

// SpaceMediator ---------------------------------------------------------------

void SpaceMediator::publish(ObjectAdvert advert) {
  if (staging_)
    staged_.push_back(std::move(advert));
  else
    apply(std::move(advert));
}

void SpaceMediator::withdraw(ObjectId id) {
  std::erase_if(staged_, [&](const ObjectAdvert& a) { return a.object == id; });
  erase(id);
}

void SpaceMediator::end_tick() {
  staging_ = false;
  auto staged = std::move(staged_);
  staged_.clear();
  for (auto& a : staged) apply(std::move(a));
}

void SpaceMediator::erase(ObjectId id) {
  auto it = adverts_.find(id.value);
  if (it == adverts_.end()) return;
  for (const auto& p : it->second.paths)
    for (const auto& st : p.states)
      for (const auto& sp : st.spacepoints) {
        auto c = cells_.find(sp);
        if (c == cells_.end()) continue;
        c->second.erase(id.value);
        if (c->second.empty()) cells_.erase(c);
      }
  adverts_.erase(it);
}

void SpaceMediator::apply(ObjectAdvert advert) {
  erase(advert.object);
  const auto id = advert.object.value;
  for (const auto& p : advert.paths)
    for (const auto& st : p.states)
      for (const auto& sp : st.spacepoints) cells_[sp].insert(id);
  adverts_.insert_or_assign(id, std::move(advert));
}

const ObjectAdvert* SpaceMediator::advert(ObjectId id) const {
  auto it = adverts_.find(id.value);
  return it == adverts_.end() ? nullptr : &it->second;
}

std::vector<const ObjectAdvert*> SpaceMediator::overlapping(const std::vector<SpacePoint>& footprint,
                                                            ObjectId self) const {
  std::set<std::uint64_t> ids;
  for (const auto& sp : footprint) {
    auto c = cells_.find(sp);
    if (c == cells_.end()) continue;
    for (auto id : c->second)
      if (id != self.value) ids.insert(id);
  }
  std::vector<const ObjectAdvert*> out;
  out.reserve(ids.size());
  for (auto id : ids) out.push_back(&adverts_.at(id));
  return out;
}

bool SpaceMediator::try_claim(ObjectId a, ObjectId b) {
  if (a == b || claims_.contains(a.value) || claims_.contains(b.value)) return false;
  claims_.insert(a.value);
  claims_.insert(b.value);
  return true;
}

void SpaceMediator::release(ObjectId a, ObjectId b) {
  claims_.erase(a.value);
  claims_.erase(b.value);
}

// RefinedRuntime --------------------------------------------------------------

namespace {

constexpr std::uint64_t kSchedulerStream = 0xffffffffffffffffull;

QuantumObject as_external(const ObjectAdvert& ad) {
  QuantumObject o;
  o.id = ad.object;
  o.kind = ad.particles.size() == 1 ? ObjectKind::Particle : ObjectKind::ParticleCollection;
  o.particles = ad.particles;
  o.paths = ad.paths;
  return o;
}

void shuffle(std::vector<ObjectId>& v, RngState& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.next_unit() * static_cast<double>(i));
    std::swap(v[i - 1], v[std::min(j, i - 1)]);
  }
}

}  // namespace

RefinedRuntime::RefinedRuntime(const SystemState& initial, std::shared_ptr<const World> world, RefinedConfig cfg)
    : space_(initial.space),
      fields_(initial.fields),
      delta_t_(initial.delta_t),
      world_(std::move(world)),
      cfg_(cfg),
      scheduler_rng_(derive_seed(cfg.seed, kSchedulerStream)),
      next_id_(initial.next_id) {
  if (!world_) throw std::invalid_argument("refined runtime needs a world");
  for (const auto& o : initial.objects) {
    next_id_ = std::max(next_id_, o.id.value + 1);
    spawn_object_engine(o);
  }
}

ObjectEngine& RefinedRuntime::spawn_object_engine(QuantumObject obj) {
  RngState rng(derive_seed(cfg_.seed, obj.id.value));
  return spawn_object_engine(std::move(obj), std::move(rng));
}

ObjectEngine& RefinedRuntime::spawn_object_engine(QuantumObject obj, RngState rng) {
  const auto id = obj.id;
  if (engines_.contains(id.value))
    throw InvariantError("object " + std::to_string(id.value) + " already has an engine");
  check_invariants(obj, space_);
  next_id_ = std::max(next_id_, id.value + 1);
  auto [it, _] = engines_.emplace(id.value, ObjectEngine{id, std::move(rng), 0, 0, std::move(obj), false});
  publish(it->second);
  return it->second;
}

void RefinedRuntime::publish(ObjectEngine& e) { mediator_.publish(advertise(e.object, e.version)); }

ObjectEngine* RefinedRuntime::engine(ObjectId id) {
  auto it = engines_.find(id.value);
  return it == engines_.end() ? nullptr : &it->second;
}

std::size_t RefinedRuntime::live_engines() const {
  return static_cast<std::size_t>(
      std::count_if(engines_.begin(), engines_.end(), [](const auto& kv) { return !kv.second.retired; }));
}

StepResult RefinedRuntime::step_object(ObjectEngine& e) {
  if (e.retired) return {StepStatus::Retired, {}};
  if (mediator_.claimed(e.id)) return {StepStatus::Deferred, {}};

  // collapse flags set by past interactions are applied by the object itself
  if (e.object.flags.pending() || e.object.flags.retired) {
    if (!lab::apply_collapse_flags(e.object)) {
      e.retired = true;
      mediator_.withdraw(e.id);
      return {StepStatus::Retired, {}};
    }
    ++e.version;
    check_invariants(e.object, space_);
    publish(e);
  }

  StepResult res;
  const auto footprint = object_footprint(e.object);
  for (const auto* ad : mediator_.overlapping(footprint, e.id)) {
    const auto external = as_external(*ad);
    const auto cands = world_candidates(*world_, e.object, external);
    if (cands.empty()) continue;
    const auto& chosen = select_interaction(cands, e.rng);
    res.proposals.push_back(Proposal{e.id, ad->object, e.version, ad->version, chosen});
  }
  if (!res.proposals.empty()) {
    res.status = StepStatus::Proposed;
    return res;
  }

  if (world_->update) world_->update(e.object, space_, fields_);
  check_invariants(e.object, space_);
  ++e.version;
  ++e.proper_steps;
  publish(e);
  res.status = StepStatus::Evolved;
  return res;
}

void RefinedRuntime::flag_consumed(ObjectEngine& e, std::size_t particle, std::size_t path) {
  ++e.version;
  if (e.object.particles.size() == 1) {
    e.object.flags.retired = true;
    e.retired = true;
    mediator_.withdraw(e.id);
    return;
  }
  e.object.flags.drop_particles.push_back(particle);
  e.object.flags.keep_path = path;
}

std::optional<ObjectId> RefinedRuntime::claim_and_interact(const Proposal& p) {
  auto* ea = engine(p.proposer);
  auto* eb = engine(p.partner);
  const auto reject = [&]() -> std::optional<ObjectId> {
    ++rejected_;
    return std::nullopt;
  };
  if (!ea || !eb || ea->retired || eb->retired) return reject();
  if (ea->version != p.proposer_version || eb->version != p.partner_version) return reject();
  if (ea->object.flags.pending() || eb->object.flags.pending()) return reject();
  if (!mediator_.try_claim(ea->id, eb->id)) return reject();

  std::optional<ObjectId> result_id;
  try {
    const auto& a = ea->object;
    const auto& b = eb->object;
    const ObjectId rid{next_id_++};
    auto ia = create_interaction_object(a, b, p.candidate, rid);
    RngState rng(derive_seed(cfg_.seed, rid.value));
    ia.outcome = world_outcome(*world_, a, b, p.candidate)(ia, space_, rng);
    ia.object.globals.position = space_.position(p.candidate.position);
    auto result = process_interaction_object(ia, rid);
    result.globals.position = ia.object.globals.position;

    records_.push_back(InteractionRecord{tick_, a.id, b.id, p.candidate.particle_a, p.candidate.particle_b,
                                         p.candidate.path_a, p.candidate.path_b, p.candidate.position, rid,
                                         a.particles[p.candidate.particle_a].type,
                                         b.particles[p.candidate.particle_b].type});
    ledger_.push_back(InteractionEvent{tick_, a.id, b.id, p.candidate.position, p.candidate, rid, ia.object.conserved,
                                       result.conserved});

    flag_consumed(*ea, p.candidate.particle_a, p.candidate.path_a);
    flag_consumed(*eb, p.candidate.particle_b, p.candidate.path_b);
    spawn_object_engine(std::move(result), std::move(rng));
    result_id = rid;
  } catch (...) {
    mediator_.release(p.proposer, p.partner);
    throw;
  }
  mediator_.release(p.proposer, p.partner);
  return result_id;
}

std::vector<ObjectId> RefinedRuntime::schedule_order() {
  std::vector<ObjectId> order;
  order.reserve(engines_.size());
  for (const auto& [id, e] : engines_)
    if (!e.retired) order.push_back(e.id);
  if (cfg_.mode == SchedulerMode::Randomized) shuffle(order, scheduler_rng_);
  return order;
}

std::vector<Proposal> RefinedRuntime::arbitrate(std::vector<Proposal> proposals) {
  // Both engines of a pair usually propose; one proposal per pair competes.
  // Which one survives must not depend on the proposed position, or the
  // position choice would be biased.
  std::map<std::pair<std::uint64_t, std::uint64_t>, std::vector<std::size_t>> by_pair;
  for (std::size_t i = 0; i < proposals.size(); ++i) {
    const auto key = std::minmax(proposals[i].proposer.value, proposals[i].partner.value);
    by_pair[key].push_back(i);
  }
  std::vector<Proposal> kept;
  kept.reserve(by_pair.size());
  for (auto& [key, idx] : by_pair) {
    std::size_t pick = 0;
    if (cfg_.mode == SchedulerMode::Randomized) {
      pick = static_cast<std::size_t>(scheduler_rng_.next_unit() * static_cast<double>(idx.size()));
      pick = std::min(pick, idx.size() - 1);
    } else {
      for (std::size_t j = 1; j < idx.size(); ++j)
        if (proposals[idx[j]].proposer < proposals[idx[pick]].proposer) pick = j;
    }
    rejected_ += idx.size() - 1;
    kept.push_back(proposals[idx[pick]]);
  }

  if (cfg_.mode == SchedulerMode::RoundRobin) {
    std::stable_sort(kept.begin(), kept.end(), [](const Proposal& x, const Proposal& y) {
      const auto lx = std::min(x.proposer, x.partner);
      const auto ly = std::min(y.proposer, y.partner);
      return std::tie(x.candidate.position, lx) < std::tie(y.candidate.position, ly);
    });
  } else {
    std::vector<std::size_t> perm(kept.size());
    for (std::size_t i = 0; i < kept.size(); ++i) perm[i] = i;
    for (std::size_t i = perm.size(); i > 1; --i) {
      const auto j = std::min(static_cast<std::size_t>(scheduler_rng_.next_unit() * static_cast<double>(i)), i - 1);
      std::swap(perm[i - 1], perm[j]);
    }
    std::vector<Proposal> shuffled;
    shuffled.reserve(kept.size());
    for (auto i : perm) shuffled.push_back(kept[i]);
    kept = std::move(shuffled);
  }
  return kept;
}

SystemState RefinedRuntime::snapshot() const {
  SystemState s(space_, delta_t_, cfg_.seed);
  s.fields = fields_;
  s.step_count = tick_;
  s.next_id = next_id_;
  for (const auto& [id, e] : engines_)
    if (!e.retired) s.objects.push_back(e.object);
  s.interactions = records_;
  return s;
}

RefinedResult RefinedRuntime::run() {
  RefinedResult res;
  const auto finished = [&] { return world_->termination.done && world_->termination.done(snapshot()); };
  while (tick_ < cfg_.max_ticks) {
    if (finished()) {
      res.terminated = true;
      break;
    }
    std::vector<Proposal> proposals;
    mediator_.begin_tick();
    for (const auto id : schedule_order()) {
      auto* e = engine(id);
      if (!e) continue;
      auto r = step_object(*e);
      proposals.insert(proposals.end(), r.proposals.begin(), r.proposals.end());
    }
    mediator_.end_tick();
    for (const auto& p : arbitrate(std::move(proposals))) claim_and_interact(p);
    ++tick_;
  }
  if (!res.terminated && finished()) res.terminated = true;
  res.ticks = tick_;
  res.records = records_;
  res.ledger = ledger_;
  res.rejected = rejected_;
  for (const auto& [id, e] : engines_)
    if (!e.retired) res.final_objects.push_back(e.object);
  return res;
}

RefinedResult run_refined(const SystemState& initial, std::shared_ptr<const World> world, RefinedConfig cfg) {
  RefinedRuntime rt(initial, std::move(world), cfg);
  return rt.run();
}

namespace {

nlohmann::json conserved_json(const ConservedQuantities& c) {
  return {{"energy", c.energy}, {"momentum", c.momentum}, {"angular_momentum", c.angular_momentum}};
}

}  // namespace

void write_ledger_jsonl(const std::vector<InteractionEvent>& ledger, std::ostream& os) {
  for (const auto& ev : ledger) {
    nlohmann::json j;
    j["tick"] = ev.tick;
    j["a"] = ev.a.value;
    j["b"] = ev.b.value;
    j["position"] = ev.position.coords;
    j["path_a"] = ev.candidate.path_a;
    j["path_b"] = ev.candidate.path_b;
    j["weight"] = ev.candidate.joint_weight;
    j["result"] = ev.result.value;
    j["before"] = conserved_json(ev.before);
    j["after"] = conserved_json(ev.after);
    j["balanced"] = ev.balanced();
    os << j.dump() << '\n';
  }
}

}  // namespace qcausal::refined
