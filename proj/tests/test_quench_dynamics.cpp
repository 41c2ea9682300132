#include "quench/quench_dynamics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numbers>

using namespace quench;

namespace {

const Mesh& small_mesh() {
  static const Mesh mesh(41, 0.3);
  return mesh;
}

const GroundState& ground(double g) {
  static std::map<double, GroundState> cache;
  auto it = cache.find(g);
  if (it == cache.end()) it = cache.emplace(g, initial_ground_state(small_mesh(), g)).first;
  return it->second;
}

}  // namespace

TEST(Quench, NullQuenchKeepsTheGroundState) {
  const QuenchResult r = quench::quench(ground(2.5), 0.0);
  ASSERT_GE(r.size(), 1u);
  EXPECT_NEAR(r.weight(0), 1.0, 1e-12);
  EXPECT_NEAR(r.final_energies(0), r.initial_energy, 1e-10);
  const EchoSeries s = echo_amplitude(r, make_time_grid(200.0, 0.05));
  for (double l : s.echo) EXPECT_NEAR(l, 1.0, 1e-10);
}

TEST(Quench, FastPathMatchesDenseOverlaps) {
  const GroundState& gs = ground(2.5);
  for (double kappa : {0.7, -5.0}) {
    const QuenchResult fast = quench::quench(gs, kappa, {1.0 - 1e-9, 0});
    const Spectrum dense = solve_two_body({small_mesh(), 2.5, kappa}, fast.size());
    const QuenchResult slow = compute_overlaps(gs, dense, (1.0 - 1e-9) * (1.0 - 1e-9));
    ASSERT_EQ(fast.size(), slow.size());
    for (std::size_t n = 0; n < fast.size(); ++n) {
      EXPECT_NEAR(fast.final_energies(static_cast<Eigen::Index>(n)),
                  slow.final_energies(static_cast<Eigen::Index>(n)), 1e-9);
      EXPECT_NEAR(fast.weight(n), slow.weight(n), 1e-10);
      EXPECT_GE(fast.overlaps[n].real(), 0.0);
    }
  }
}

TEST(Quench, SumRuleAndAdaptiveTruncation) {
  const QuenchResult full = quench::quench(ground(1.0), 5.0, {1.0 - 1e-12, 0});
  EXPECT_NEAR(full.sum_rule, 1.0, 1e-10);
  const QuenchResult cut = quench::quench(ground(1.0), 5.0, {0.999, 0});
  EXPECT_GE(cut.sum_rule, 0.999);
  EXPECT_LT(cut.size(), full.size());
  const std::vector<double> w = full.weights();
  EXPECT_EQ(cut.size(), states_for_sum_rule(w, 0.999));
  EXPECT_EQ(cut.available_states, PairBasis(41, PairSector::even).dimension());
  const EchoSeries s = echo_amplitude(cut, std::vector<double>{0.0});
  EXPECT_NEAR(s.echo[0], cut.sum_rule * cut.sum_rule, 1e-12);
  EXPECT_THROW(quench::quench(ground(1.0), 5.0, {0.999, 3}), NumericalError);
}

TEST(Quench, StatesForSumRule) {
  const std::vector<double> w{0.5, 0.3, 0.15, 0.05};
  EXPECT_EQ(states_for_sum_rule(w, 0.5), 1u);
  EXPECT_EQ(states_for_sum_rule(w, 0.8), 2u);
  EXPECT_EQ(states_for_sum_rule(w, 0.96), 4u);
}

TEST(Quench, InitialStateOnlyFeelsEvenStates) {
  // odd-sector states are exactly orthogonal to the even ground state
  const GroundState& gs = ground(1.0);
  const Spectrum odd = solve_two_body({small_mesh(), 1.0, 0.7}, 20, PairSector::odd);
  const Eigen::MatrixXd psi = gs.basis->to_grid(gs.state);
  for (std::size_t n = 0; n < 20; ++n) {
    EXPECT_LT(std::abs((psi.array() * odd.state_grid(n).array()).sum()), 1e-13);
  }
}

TEST(Echo, UniformGridMatchesArbitraryTimes) {
  const QuenchResult r = quench::quench(ground(2.5), 0.7);
  const TimeGrid grid = make_time_grid(100.0, 0.01);
  std::vector<double> times(grid.count);
  for (std::size_t m = 0; m < grid.count; ++m) times[m] = grid.time(m);
  const EchoSeries a = echo_amplitude(r, grid);
  const EchoSeries b = echo_amplitude(r, times);
  ASSERT_EQ(a.size(), b.size());
  EXPECT_GT(a.dt, 0.0);
  for (std::size_t m = 0; m < a.size(); ++m) {
    EXPECT_NEAR(std::abs(a.amplitude[m] - b.amplitude[m]), 0.0, 1e-10);
    EXPECT_LE(a.echo[m], 1.0 + 1e-12);
  }
}

TEST(Echo, AmplitudeIsConjugateSymmetricAndMatchesDefinition) {
  const QuenchResult r = quench::quench(ground(1.0), -2.0);
  const double t = 1.7;
  std::complex<double> nu = 0.0;
  for (std::size_t n = 0; n < r.size(); ++n) {
    const double de = r.initial_energy - r.final_energies(static_cast<Eigen::Index>(n));
    nu += r.weight(n) * std::exp(std::complex<double>(0.0, de * t));
  }
  const EchoSeries s = echo_amplitude(r, std::vector<double>{t, -t});
  EXPECT_NEAR(std::abs(s.amplitude[0] - nu), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(s.amplitude[1] - std::conj(nu)), 0.0, 1e-12);
  EXPECT_NEAR(s.echo[0], std::norm(nu), 1e-12);
}

TEST(EvolveState, OverlapWithInitialStateIsTheEchoAmplitude) {
  const GroundState& gs = ground(2.5);
  const QuenchResult r = quench::quench(gs, 0.7, {1.0 - 1e-12, 0});
  const Spectrum s = solve_two_body({small_mesh(), 2.5, 0.7}, r.size());
  const Eigen::MatrixXd psi0 = gs.basis->to_grid(gs.state);
  for (double t : {0.0, 0.4, 3.0}) {
    const Eigen::MatrixXcd psi = evolve_state(gs, s, t);
    EXPECT_NEAR(psi.squaredNorm(), r.sum_rule, 1e-10);
    std::complex<double> overlap = (psi0.cast<std::complex<double>>().array() * psi.array()).sum();
    overlap *= std::exp(std::complex<double>(0.0, r.initial_energy * t));
    const EchoSeries e = echo_amplitude(r, std::vector<double>{t});
    EXPECT_NEAR(std::abs(overlap - e.amplitude[0]), 0.0, 1e-9) << t;
  }
  EXPECT_NEAR(evolve_state(gs, solve_two_body({small_mesh(), 2.5, 0.7}, 2), 0.0).squaredNorm(),
              r.weight(0) + r.weight(1), 1e-10);
  EXPECT_THROW(evolve_state(gs, solve_two_body({Mesh(21, 0.3), 2.5, 0.7}, 2), 0.0),
               InvalidArgument);
}

TEST(Density, NonInteractingGroundStateIsGaussian) {
  const GroundState& gs = ground(0.0);
  const Eigen::MatrixXcd psi = gs.basis->to_grid(gs.state).cast<std::complex<double>>();
  const DensityProfile rho = single_particle_density(small_mesh(), psi);
  ASSERT_EQ(rho.positions.size(), 41u);
  double integral = 0.0;
  for (std::size_t i = 0; i < rho.positions.size(); ++i) {
    const double x = rho.positions[i];
    EXPECT_NEAR(rho.values[i], std::exp(-x * x) / std::sqrt(std::numbers::pi), 1e-9) << x;
    integral += rho.values[i] * 0.3;
  }
  EXPECT_NEAR(rho.values[20], 0.5642, 1e-4);
  EXPECT_NEAR(integral, 1.0, 1e-9);

  const DensityProfile fine = single_particle_density(small_mesh(), psi, 3);
  ASSERT_EQ(fine.positions.size(), 121u);
  for (std::size_t i = 0; i < fine.positions.size(); ++i) {
    const double x = fine.positions[i];
    EXPECT_NEAR(fine.values[i], std::exp(-x * x) / std::sqrt(std::numbers::pi), 1e-8) << x;
  }
  EXPECT_THROW(single_particle_density(small_mesh(), psi, 0), InvalidArgument);
}

TEST(Density, RepulsiveImpurityDigsAHoleAtTheOrigin) {
  const GroundState& gs = ground(1.0);
  const QuenchResult r = quench::quench(gs, 20.0, {1.0 - 1e-9, 0});
  const Spectrum s = solve_two_body({small_mesh(), 1.0, 20.0}, r.size());
  const std::vector<double> times{0.0, 0.5, 1.0};
  const DensityField f = density_field(gs, s, times);
  ASSERT_EQ(f.values.size(), 3u);
  const std::size_t origin = 20;
  EXPECT_LT(f.values[1][origin], 0.6 * f.values[0][origin]);
  EXPECT_LT(f.values[2][origin], 0.6 * f.values[0][origin]);
  for (const auto& frame : f.values) {
    double integral = 0.0;
    for (double v : frame) integral += v * 0.3;
    EXPECT_NEAR(integral, r.sum_rule, 1e-8);
    for (std::size_t i = 0; i < frame.size(); ++i) {
      EXPECT_NEAR(frame[i], frame[frame.size() - 1 - i], 1e-10);
    }
  }
}

TEST(TimeGrid, ResolvesFastestSignificantFrequency) {
  const QuenchResult r = quench::quench(ground(2.5), 5.0);
  const ChosenTimeGrid c = choose_time_grid(r, 1000.0);
  EXPECT_GT(c.fastest_frequency, 0.0);
  EXPECT_LE(c.grid.dt, 2.0 * std::numbers::pi / (20.0 * c.fastest_frequency) * (1 + 1e-12));
  EXPECT_GE(c.grid.horizon(), 1000.0 - 1e-9);
  EXPECT_FALSE(c.undersampled);

  TimeGridOptions tight;
  tight.max_samples = 5000;
  const ChosenTimeGrid capped = choose_time_grid(r, 1000.0, tight);
  EXPECT_TRUE(capped.undersampled);
  EXPECT_LE(capped.grid.count, 5000u);

  const ChosenTimeGrid null = choose_time_grid(quench::quench(ground(2.5), 0.0), 100.0);
  EXPECT_EQ(null.grid.count, TimeGridOptions{}.min_samples);
  EXPECT_THROW(make_time_grid(10.0, 0.0), InvalidArgument);
}
