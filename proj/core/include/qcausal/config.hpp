#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "qcausal/engine.hpp"
#include "qcausal/interaction.hpp"
#include "qcausal/system_state.hpp"
#include "qcausal/world.hpp"

namespace qcausal {

struct FieldSpec {
  std::string id;
  std::complex<double> fill{0.0, 0.0};
  std::vector<std::pair<SpacePoint, std::complex<double>>> cells;
};

struct InteractionDecl {
  std::string type_a;
  std::string type_b;
  std::string outcome;  // key into ExperimentConfig::outcomes
};

/// Declarative experiment: space, engine settings, fields, initial objects,
/// outcome tables and the interaction / update rules that use them.
struct ExperimentConfig {
  int dims = 1;
  std::array<int, 3> extent{1, 1, 1};
  double delta_x = 1.0;

  double delta_t = 1.0;
  std::uint64_t max_steps = 1;
  std::uint64_t seed = 0;

  std::vector<FieldSpec> fields;
  std::vector<QuantumObject> objects;
  std::map<std::string, OutcomeSpec> outcomes;
  std::vector<InteractionDecl> interactions;

  std::string update = "none";  // none | ballistic | stern-gerlach
  std::string termination = "max-steps";  // max-steps | no-particle-of-type
  std::string termination_particle;

  /// Throws ConfigError naming the first offending field.
  void validate() const;
};

ExperimentConfig parse_experiment_config(const std::string& yaml_text);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// Fresh state at t = 0 with the configured fields and objects.
SystemState build_system_state(const ExperimentConfig& cfg);
/// World assembled from the declared interactions and update rule.
std::shared_ptr<const World> build_world(const ExperimentConfig& cfg);
EngineConfig engine_config(const ExperimentConfig& cfg, const World& world);

}  // namespace qcausal
