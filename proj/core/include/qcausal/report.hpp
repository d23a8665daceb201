#pragma once

#include <string>

#include "qcausal/experiments.hpp"
#include "qcausal/locality.hpp"
#include "qcausal/wave.hpp"

// Serialized results. Every JSON document carries `schema_version`; CSV
// tables start with a header row. Output depends only on the inputs, so the
// same invocation yields byte-identical files.
namespace qcausal::report {

inline constexpr int kSchemaVersion = 1;

struct Document {
  std::string json;
  std::string csv;
};

/// Single angle pair. CSV: angle_a,angle_b,outcome_a,outcome_b,count,frequency
Document bell(const BellConfig& cfg, const JointStats& stats);
/// Three-setting scan. CSV: pair,angle_a,angle_b,trials,p_same,correlation,stderr
Document bell_scan(const BellScan& scan, const TrialOptions& run);
/// LHV enumeration. CSV: strategy,a1,b1,c1,a2,b2,c2,admissible,functional
Document lhv(const LhvResult& r, double model_margin);
/// CSV: cell,count,frequency
Document double_slit(const DoubleSlitConfig& cfg, const ScreenHistogram& h);

struct WaveSummary {
  std::size_t cells = 0;
  std::size_t steps = 0;
  double courant = 0.0;
  std::string init;
  wave::Boundary boundary = wave::Boundary::Periodic;
  double energy_initial = 0.0;
  double energy_final = 0.0;
  wave::ErrorNorms error;  // against the translation oracle
};
/// CSV: t,cell,value
Document wave(const WaveSummary& s, const wave::WaveTrajectory& traj);

/// CSV: t,xa_closed,xb_closed,xa_local,xb_local,xa_mode,xb_mode
Document pendulum(const PendulumResult& r);

/// CSV: law,class,offender,reason (laws without offenders get one row with
/// empty offender and reason)
Document analyze(const locality::ModelReport& r);

}  // namespace qcausal::report
