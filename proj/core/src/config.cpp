#include "qcausal/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "qcausal/error.hpp"
#include "qcausal/lab.hpp"

namespace qcausal {

namespace {

template <class T>
T scalar(const YAML::Node& n, const std::string& field) {
  if (!n || !n.IsScalar()) throw ConfigError(field, "expected a scalar value");
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(field, "cannot convert '" + n.Scalar() + "'");
  }
}

template <class T>
T scalar_or(const YAML::Node& n, const std::string& field, T fallback) {
  return n ? scalar<T>(n, field) : fallback;
}

YAML::Node require_sequence(const YAML::Node& n, const std::string& field) {
  if (!n || !n.IsSequence()) throw ConfigError(field, "expected a list");
  return n;
}

std::string at(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

std::vector<int> int_list(const YAML::Node& n, const std::string& field) {
  require_sequence(n, field);
  std::vector<int> v;
  for (std::size_t i = 0; i < n.size(); ++i) v.push_back(scalar<int>(n[i], at(field, i)));
  return v;
}

Vec3 vec3(const YAML::Node& n, const std::string& field) {
  require_sequence(n, field);
  if (n.size() == 0 || n.size() > 3) throw ConfigError(field, "expected 1 to 3 components");
  Vec3 v{0, 0, 0};
  for (std::size_t i = 0; i < n.size(); ++i) v[i] = scalar<double>(n[i], at(field, i));
  return v;
}

SpacePoint point(const YAML::Node& n, const std::string& field) {
  const auto v = int_list(n, field);
  if (v.empty() || v.size() > 3) throw ConfigError(field, "expected 1 to 3 coordinates");
  SpacePoint p;
  for (std::size_t i = 0; i < v.size(); ++i) p[i] = v[i];
  return p;
}

std::complex<double> complex_value(const YAML::Node& n, const std::string& field) {
  if (n && n.IsSequence()) {
    if (n.size() != 2) throw ConfigError(field, "complex values are written [re, im]");
    return {scalar<double>(n[0], field + ".re"), scalar<double>(n[1], field + ".im")};
  }
  return {scalar<double>(n, field), 0.0};
}

PathState path_state(const YAML::Node& n, const std::string& field) {
  PathState st;
  const auto cells = require_sequence(n["cells"], field + ".cells");
  for (std::size_t i = 0; i < cells.size(); ++i) st.spacepoints.push_back(point(cells[i], at(field + ".cells", i)));
  if (st.spacepoints.empty()) throw ConfigError(field + ".cells", "must not be empty");
  if (n["momentum"]) st.momentum = vec3(n["momentum"], field + ".momentum");
  if (n["angular_momentum"]) st.angular_momentum = vec3(n["angular_momentum"], field + ".angular_momentum");
  st.spindir = scalar_or<double>(n["spindir"], field + ".spindir", 0.0);
  st.canonicalize();
  return st;
}

QuantumObject object(const YAML::Node& n, const std::string& field) {
  QuantumObject o;
  o.id = ObjectId{scalar<std::uint64_t>(n["id"], field + ".id")};
  o.kind = ObjectKind::Particle;
  if (n["kind"]) {
    try {
      o.kind = object_kind_from_string(scalar<std::string>(n["kind"], field + ".kind"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(field + ".kind", e.what());
    }
  }
  const auto parts = require_sequence(n["particles"], field + ".particles");
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const auto f = at(field + ".particles", i);
    o.particles.push_back(
        ParticleInfo{scalar<std::string>(parts[i]["type"], f + ".type"), scalar_or<double>(parts[i]["mass"], f + ".mass", 0.0)});
    if (o.particles.back().mass < 0.0) throw ConfigError(f + ".mass", "must be non-negative");
  }
  const auto paths = require_sequence(n["paths"], field + ".paths");
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const auto f = at(field + ".paths", i);
    Path p;
    p.amplitude = paths[i]["amplitude"] ? complex_value(paths[i]["amplitude"], f + ".amplitude") : Amplitude{1.0, 0.0};
    const auto states = require_sequence(paths[i]["states"], f + ".states");
    for (std::size_t k = 0; k < states.size(); ++k) p.states.push_back(path_state(states[k], at(f + ".states", k)));
    if (p.states.size() != o.particles.size())
      throw ConfigError(f + ".states", "needs one state per particle (" + std::to_string(o.particles.size()) + ")");
    o.paths.push_back(std::move(p));
  }
  if (o.paths.empty()) throw ConfigError(field + ".paths", "must not be empty");
  try {
    o = normalize_amplitudes(std::move(o));
  } catch (const DegenerateObjectError& e) {
    throw ConfigError(field + ".paths", e.what());
  }
  for (std::size_t i = 0; i < o.particles.size(); ++i)
    o.conserved += path_contribution(o.particles[i], o.paths.front().states[i]);
  o.globals.momentum = o.conserved.momentum;
  return o;
}

OutcomeSpec outcome(const YAML::Node& n, const std::string& field) {
  OutcomeSpec spec;
  require_sequence(n, field);
  for (std::size_t r = 0; r < n.size(); ++r) {
    const auto f = at(field, r);
    OutcomeRowSpec row;
    row.amplitude = n[r]["amplitude"] ? complex_value(n[r]["amplitude"], f + ".amplitude") : Amplitude{1.0, 0.0};
    const auto parts = require_sequence(n[r]["particles"], f + ".particles");
    for (std::size_t i = 0; i < parts.size(); ++i) {
      const auto pf = at(f + ".particles", i);
      const auto& p = parts[i];
      OutParticleSpec ps;
      ps.info = ParticleInfo{scalar<std::string>(p["type"], pf + ".type"), scalar_or<double>(p["mass"], pf + ".mass", 0.0)};
      if (p["offsets"]) {
        ps.offsets.clear();
        const auto offs = require_sequence(p["offsets"], pf + ".offsets");
        for (std::size_t k = 0; k < offs.size(); ++k) {
          const auto v = int_list(offs[k], at(pf + ".offsets", k));
          if (v.empty() || v.size() > 3) throw ConfigError(at(pf + ".offsets", k), "expected 1 to 3 components");
          std::array<int, 3> o{0, 0, 0};
          for (std::size_t d = 0; d < v.size(); ++d) o[d] = v[d];
          ps.offsets.push_back(o);
        }
      }
      if (p["inherit"]) {
        const auto k = scalar<int>(p["inherit"], pf + ".inherit");
        if (k != 0 && k != 1) throw ConfigError(pf + ".inherit", "must be 0 or 1");
        ps.inherit = static_cast<std::size_t>(k);
      }
      if (p["momentum"]) ps.momentum = vec3(p["momentum"], pf + ".momentum");
      if (p["spindir"]) ps.spindir = scalar<double>(p["spindir"], pf + ".spindir");
      row.particles.push_back(std::move(ps));
    }
    spec.rows.push_back(std::move(row));
  }
  return spec;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (dims < 1 || dims > 3) throw ConfigError("space.dims", "must be 1, 2 or 3");
  for (int d = 0; d < dims; ++d)
    if (extent[static_cast<std::size_t>(d)] <= 0) throw ConfigError("space.extent", "extents must be positive");
  if (!(delta_x > 0.0)) throw ConfigError("space.dx", "must be positive");
  if (!(delta_t > 0.0)) throw ConfigError("engine.dt", "must be positive");
  if (max_steps == 0) throw ConfigError("engine.max_steps", "must be at least 1");

  std::set<std::uint64_t> ids;
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const auto& o = objects[i];
    if (o.id.value == 0) throw ConfigError(at("objects", i) + ".id", "ids start at 1");
    if (!ids.insert(o.id.value).second) throw ConfigError(at("objects", i) + ".id", "duplicate id");
  }
  for (std::size_t i = 0; i < interactions.size(); ++i)
    if (!outcomes.contains(interactions[i].outcome))
      throw ConfigError(at("interactions", i) + ".outcome", "unknown outcome '" + interactions[i].outcome + "'");
  for (const auto& [name, spec] : outcomes) {
    if (spec.rows.empty()) throw ConfigError("outcomes." + name, "needs at least one row");
    for (const auto& row : spec.rows)
      if (row.particles.size() != spec.rows.front().particles.size())
        throw ConfigError("outcomes." + name, "rows differ in particle count");
  }
  if (update != "none" && update != "ballistic" && update != "stern-gerlach")
    throw ConfigError("update", "expected none, ballistic or stern-gerlach");
  if (termination != "max-steps" && termination != "no-particle-of-type")
    throw ConfigError("termination.until", "expected max-steps or no-particle-of-type");
  if (termination == "no-particle-of-type" && termination_particle.empty())
    throw ConfigError("termination.particle", "required for no-particle-of-type");
}

ExperimentConfig parse_experiment_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("<document>", std::string("YAML syntax: ") + e.what());
  }
  if (!root || !root.IsMap()) throw ConfigError("<document>", "expected a mapping at top level");

  ExperimentConfig cfg;
  const auto space = root["space"];
  if (!space || !space.IsMap()) throw ConfigError("space", "missing");
  cfg.dims = scalar<int>(space["dims"], "space.dims");
  const auto ext = int_list(space["extent"], "space.extent");
  if (ext.size() != static_cast<std::size_t>(std::max(cfg.dims, 0)))
    throw ConfigError("space.extent", "needs one extent per dimension");
  for (std::size_t d = 0; d < ext.size() && d < 3; ++d) cfg.extent[d] = ext[d];
  cfg.delta_x = scalar<double>(space["dx"], "space.dx");

  if (const auto eng = root["engine"]) {
    cfg.delta_t = scalar_or<double>(eng["dt"], "engine.dt", 1.0);
    cfg.max_steps = scalar_or<std::uint64_t>(eng["max_steps"], "engine.max_steps", 1);
    cfg.seed = scalar_or<std::uint64_t>(eng["seed"], "engine.seed", 0);
  }

  if (const auto fields = root["fields"]) {
    require_sequence(fields, "fields");
    for (std::size_t i = 0; i < fields.size(); ++i) {
      const auto f = at("fields", i);
      FieldSpec fs;
      fs.id = scalar<std::string>(fields[i]["id"], f + ".id");
      if (fields[i]["fill"]) fs.fill = complex_value(fields[i]["fill"], f + ".fill");
      if (const auto cells = fields[i]["cells"]) {
        require_sequence(cells, f + ".cells");
        for (std::size_t k = 0; k < cells.size(); ++k) {
          const auto cf = at(f + ".cells", k);
          fs.cells.emplace_back(point(cells[k]["at"], cf + ".at"), complex_value(cells[k]["value"], cf + ".value"));
        }
      }
      cfg.fields.push_back(std::move(fs));
    }
  }

  if (const auto objs = root["objects"]) {
    require_sequence(objs, "objects");
    for (std::size_t i = 0; i < objs.size(); ++i) cfg.objects.push_back(object(objs[i], at("objects", i)));
  }

  if (const auto outs = root["outcomes"]) {
    if (!outs.IsMap()) throw ConfigError("outcomes", "expected a mapping of name to rows");
    for (const auto& kv : outs) {
      const auto name = kv.first.as<std::string>();
      cfg.outcomes[name] = outcome(kv.second, "outcomes." + name);
    }
  }

  if (const auto ints = root["interactions"]) {
    require_sequence(ints, "interactions");
    for (std::size_t i = 0; i < ints.size(); ++i) {
      const auto f = at("interactions", i);
      const auto between = ints[i]["between"];
      require_sequence(between, f + ".between");
      if (between.size() != 2) throw ConfigError(f + ".between", "expected two particle types");
      cfg.interactions.push_back(InteractionDecl{scalar<std::string>(between[0], f + ".between[0]"),
                                                 scalar<std::string>(between[1], f + ".between[1]"),
                                                 scalar<std::string>(ints[i]["outcome"], f + ".outcome")});
    }
  }

  cfg.update = scalar_or<std::string>(root["update"], "update", "none");
  if (const auto term = root["termination"]) {
    cfg.termination = scalar_or<std::string>(term["until"], "termination.until", "max-steps");
    cfg.termination_particle = scalar_or<std::string>(term["particle"], "termination.particle", "");
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_experiment_config(ss.str());
}

SystemState build_system_state(const ExperimentConfig& cfg) {
  cfg.validate();
  SystemState s(Space(cfg.dims, cfg.extent, cfg.delta_x), cfg.delta_t, cfg.seed);
  for (std::size_t i = 0; i < cfg.fields.size(); ++i) {
    const auto& fs = cfg.fields[i];
    auto grid = FieldGrid::filled(fs.id, s.space, fs.fill);
    for (const auto& [p, v] : fs.cells) {
      if (!s.space.contains(p)) throw ConfigError(at("fields", i) + ".cells", "cell outside the space");
      grid.at(s.space, p) = v;
    }
    s.fields.push_back(std::move(grid));
  }
  for (std::size_t i = 0; i < cfg.objects.size(); ++i) {
    try {
      check_invariants(cfg.objects[i], s.space);
    } catch (const InvariantError& e) {
      throw ConfigError(at("objects", i), e.what());
    }
    s.add(cfg.objects[i]);
    s.next_id = std::max(s.next_id, cfg.objects[i].id.value + 1);
  }
  return s;
}

std::shared_ptr<const World> build_world(const ExperimentConfig& cfg) {
  cfg.validate();
  auto w = std::make_shared<World>();
  for (const auto& decl : cfg.interactions) {
    const OutcomeSpec spec = cfg.outcomes.at(decl.outcome);
    w->rules.push_back({decl.type_a, decl.type_b, [spec](const InteractionObject& ia, const Space& space, RngState&) {
                          return resolve_outcome(spec, ia, space);
                        }});
  }
  if (cfg.update == "ballistic") {
    w->update = [](QuantumObject& o, const Space& space, std::span<const FieldGrid>) { lab::propagate(o, space); };
  } else if (cfg.update == "stern-gerlach") {
    w->update = [](QuantumObject& o, const Space& space, std::span<const FieldGrid> fields) {
      lab::propagate(o, space);
      lab::stern_gerlach(o, space, fields);
    };
  }
  if (cfg.termination == "no-particle-of-type") {
    const auto type = cfg.termination_particle;
    w->termination = {"no-particle-of-type",
                      [type](const SystemState& s) { return !lab::any_particle_of_type(s, type); }};
  }
  return w;
}

EngineConfig engine_config(const ExperimentConfig& cfg, const World& world) {
  EngineConfig e;
  e.delta_t = cfg.delta_t;
  e.max_steps = cfg.max_steps;
  e.seed = cfg.seed;
  e.termination = world.termination;
  return e;
}

}  // namespace qcausal
