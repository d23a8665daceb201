#include <cmath>
#include <complex>
#include <numbers>

#include <gtest/gtest.h>

#include "qcausal/error.hpp"
#include "qcausal/experiments.hpp"

using namespace qcausal;

namespace {

// Screen distributions computed from the geometry alone: each slit sends
// amplitude a_b exp(i k L_b(y)) to cell y, L_b from plain Pythagoras.
struct Oracle {
  std::vector<double> coherent;
  std::vector<double> incoherent;
};

Oracle screen_oracle(const DoubleSlitGeometry& g) {
  const double k = 2.0 * std::numbers::pi / g.wavelength;
  const int n = g.screen_cells;
  Oracle o;
  double sc = 0.0, si = 0.0;
  for (int y = 0; y < n; ++y) {
    std::complex<double> sum{0.0, 0.0};
    double incoherent = 0.0;
    for (int b = 0; b < 2; ++b) {
      const double offset = (b == 0 ? -0.5 : 0.5) * g.slit_distance;
      const double len = std::sqrt(g.screen_distance * g.screen_distance +
                                   std::pow((y - n / 2) * g.cell_size - offset, 2));
      const auto amp = g.branch_amplitudes[static_cast<std::size_t>(b)] * std::exp(std::complex<double>(0.0, k * len));
      sum += amp;
      incoherent += std::norm(amp);
    }
    o.coherent.push_back(std::norm(sum));
    o.incoherent.push_back(incoherent);
    sc += o.coherent.back();
    si += incoherent;
  }
  for (auto& p : o.coherent) p /= sc;
  for (auto& p : o.incoherent) p /= si;
  return o;
}

DoubleSlitConfig config(bool marker, std::uint64_t trials, std::uint64_t seed) {
  DoubleSlitConfig c;
  c.marker = marker;
  c.run.trials = trials;
  c.run.seed = seed;
  c.run.threads = 1;
  return c;
}

void expect_matches(const ScreenHistogram& h, const std::vector<double>& p, double sigmas) {
  const auto f = h.frequencies();
  ASSERT_EQ(f.size(), p.size());
  const double n = static_cast<double>(h.trials);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double sd = std::sqrt(std::max(p[i] * (1.0 - p[i]), 1e-12) / n);
    EXPECT_LE(std::abs(f[i] - p[i]), sigmas * sd + 1e-12) << "cell " << i;
  }
}

}  // namespace

TEST(DoubleSlit, CentreIsConstructive) {
  const DoubleSlitGeometry g;
  const auto o = screen_oracle(g);
  const auto c = static_cast<std::size_t>(g.centre());
  // equal path lengths at the centre: |1 + 1|^2 against |1|^2 + |1|^2
  EXPECT_NEAR(g.path_length(0, g.centre()), g.path_length(1, g.centre()), 1e-12);
  EXPECT_GT(o.coherent[c], o.incoherent[c]);
  // unnormalized: the centre intensity is twice the incoherent one
  const double k = 2.0 * std::numbers::pi / g.wavelength;
  const auto a = g.branch_amplitudes;
  const auto coherent = std::norm(a[0] * std::polar(1.0, k * g.path_length(0, g.centre())) +
                                  a[1] * std::polar(1.0, k * g.path_length(1, g.centre())));
  EXPECT_NEAR(coherent, 2.0 * (a[0] * a[0] + a[1] * a[1]), 1e-12);
}

TEST(DoubleSlit, WithoutMarkerMatchesCoherentSum) {
  const auto h = run_double_slit(config(false, 50000, 21));
  EXPECT_EQ(h.trials, 50000u);
  expect_matches(h, screen_oracle(DoubleSlitGeometry{}).coherent, 4.0);
  EXPECT_GT(h.visibility(), 0.9);
}

TEST(DoubleSlit, MarkerDestroysInterference) {
  const auto h = run_double_slit(config(true, 50000, 22));
  expect_matches(h, screen_oracle(DoubleSlitGeometry{}).incoherent, 4.0);
  EXPECT_LT(h.visibility(3), 0.08);
}

TEST(DoubleSlit, EveryTrialHitsTheScreen) {
  const auto cfg = config(false, 1, 0);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto y = run_double_slit_trial(cfg, seed);
    ASSERT_TRUE(y.has_value());
    EXPECT_GE(*y, 0);
    EXPECT_LT(*y, cfg.geometry.screen_cells);
  }
}

TEST(DoubleSlit, DiffractionKeepsUnitWeight) {
  const DoubleSlitGeometry g;
  auto s = double_slit_initial_state(g, false);
  for (auto& o : s.objects) {
    if (o.particles[0].type != "electron") continue;
    for (auto& p : o.paths) p.states[0].spacepoints = {SpacePoint(slit_lab::kDiffractionColumn, p.states[0].spacepoints[0][1])};
    diffract(o, s.space, g);
    EXPECT_EQ(o.path_count(), static_cast<std::size_t>(g.screen_cells));
    EXPECT_NEAR(o.total_weight(), 1.0, 1e-12);
  }
}

TEST(ScreenHistogram, VisibilityAndDistance) {
  ScreenHistogram a{{30, 10, 30, 10}, 80};
  EXPECT_DOUBLE_EQ(a.visibility(), 0.5);
  EXPECT_DOUBLE_EQ(a.visibility(2), 0.0);
  ScreenHistogram b{{10, 30, 10, 30}, 80};
  EXPECT_DOUBLE_EQ(a.tv_distance(b), 0.5);
  EXPECT_DOUBLE_EQ(a.tv_distance(a), 0.0);
  a += b;
  EXPECT_EQ(a.trials, 160u);
  EXPECT_EQ(a.counts[0], 40u);
}

TEST(DoubleSlit, GeometryValidated) {
  DoubleSlitGeometry g;
  g.slit_separation = 3;
  EXPECT_THROW(g.validate(), ConfigError);
  g = DoubleSlitGeometry{};
  g.wavelength = 0.0;
  EXPECT_THROW(double_slit_world(g), ConfigError);
}
