#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "qcausal/engine.hpp"

// 1-D wave equation as a cellular automaton (leapfrog in time, central second
// difference in space).
namespace qcausal::wave {

enum class Boundary { Periodic, FixedZero };

std::string to_string(Boundary b);
Boundary boundary_from_string(const std::string& text);

struct WaveGrid {
  std::vector<double> psi_now;
  std::vector<double> psi_prev;
  double v = 1.0;
  double delta_x = 1.0;
  double delta_t = 1.0;
  Boundary boundary = Boundary::Periodic;

  double courant() const noexcept { return v * delta_t / delta_x; }
  std::size_t size() const noexcept { return psi_now.size(); }
  /// Throws ConfigError on fewer than 3 cells, mismatched buffers,
  /// non-positive spacing or a Courant number above 1.
  void validate() const;

  bool operator==(const WaveGrid&) const = default;
};

/// Grid at rest: psi_prev = psi_now (zero initial velocity).
WaveGrid make_grid(std::vector<double> psi, double v, double delta_x, double delta_t,
                   Boundary boundary = Boundary::Periodic);

/// Right-moving profile f(x - v t): psi_now = f(x_i), psi_prev = f(x_i + v dt),
/// with x_i = i * delta_x.
WaveGrid make_travelling(const std::function<double(double)>& profile, std::size_t cells, double v, double delta_x,
                         double delta_t, Boundary boundary = Boundary::Periodic);

/// Gaussian exp(-(x - centre)^2 / (2 width^2)).
std::function<double(double)> gaussian(double centre, double width);

/// Receives (written cell, read cell) pairs while wave_step runs.
using AccessObserver = std::function<void(std::size_t write, std::size_t read)>;

/// One CA update. Interior cell i:
///   d2x = (psi(i+1) - 2 psi(i) + psi(i-1)) / dx^2
///   d2t = v^2 d2x
///   psi_new(i) = d2t dt^2 + 2 psi(i) - psi_prev(i)
/// Periodic boundaries wrap; fixed-zero boundaries pin the end cells to 0.
WaveGrid wave_step(const WaveGrid& grid, const AccessObserver& observer = {});

/// First difference (psi(i+1) - psi(i-1)) / 2dx at every cell. Part of the
/// discretization recipe; the update never uses it.
std::vector<double> first_difference(const WaveGrid& grid);

struct WaveTrajectory {
  std::vector<std::size_t> steps;  // step index of each snapshot
  std::vector<double> times;
  std::vector<std::vector<double>> snapshots;
  WaveGrid final;
};

/// `steps` applications of wave_step; snapshot every `stride` steps (and the
/// initial grid).
WaveTrajectory run_wave(WaveGrid init, std::size_t steps, std::size_t stride = 1);

struct ErrorNorms {
  double l2 = 0.0;   // root-mean-square
  double max = 0.0;  // maximum absolute
};

ErrorNorms compare_analytic(std::span<const double> a, std::span<const double> b);
/// Worst norms over all snapshots against analytic(x, t), x = i * delta_x.
ErrorNorms compare_analytic(const WaveTrajectory& traj, const std::function<double(double, double)>& analytic,
                            double delta_x);

/// sum_i [ (psi_now - psi_prev)^2 / dt^2 + v^2 ((psi(i+1) - psi(i)) / dx)^2 ]
double energy(const WaveGrid& grid);

/// Periodic extension of a profile over a ring of `length`.
double periodic_profile(const std::function<double(double)>& f, double x, double length);

// Physics-engine form ---------------------------------------------------------

inline const std::string kPsiField = "psi";
inline const std::string kPsiPrevField = "psi_prev";

/// 1-D SystemState holding the grid in two fields (real parts).
SystemState wave_state(const WaveGrid& grid, std::uint64_t seed = 0);
/// The grid stored in a wave state.
WaveGrid grid_from_state(const SystemState& state, double v, Boundary boundary);
/// Single unconditional law "wave-ca-update" with footprint
/// reads {cell(-1), cell(0), cell(+1)}, writes {cell(0)}.
std::vector<Law> wave_laws(double v, Boundary boundary);

}  // namespace qcausal::wave
