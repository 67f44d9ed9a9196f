#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "oracles/oracles.hpp"
#include "solitonlab/errors.hpp"
#include "solitonlab/fitting.hpp"
#include "solitonlab/halfline_spectral.hpp"
#include "solitonlab/solitons.hpp"

using namespace solitonlab;

namespace {

ChannelOperator aubin_channel(double r_max, std::size_t n, int ell, double a = 1.0) {
  const RadialGrid g(r_max, n);
  return ChannelOperator(g, ell, aubin_potential(a, g));
}

}  // namespace

TEST(NegativeEigenpairs, FreeChannelsHaveNone) {
  const RadialGrid g(20.0, 400);
  for (int ell : {0, 1, 3}) EXPECT_TRUE(negative_eigenpairs(ChannelOperator(g, ell, std::vector<double>(400, 0.0))).empty());
}

TEST(NegativeEigenpairs, AubinGroundStateAgainstDenseOracle) {
  const auto op = aubin_channel(25.0, 1000, 0);
  const auto pairs = negative_eigenpairs(op);
  ASSERT_EQ(pairs.size(), 1u);
  EXPECT_EQ(pairs[0].node_count, 0);
  EXPECT_LT(pairs[0].energy, 0.0);
  auto V = [](double r) { return -5.0 * std::pow(oracle::aubin_phi(r, 1.0), 4); };
  const Eigen::VectorXd fine = oracle::dense_eigenvalues(oracle::dense_channel_matrix(25.0, 2000, 0, V));
  EXPECT_NEAR(pairs[0].energy / fine(0), 1.0, 1e-3);
  const double same_grid = eigenpair(aubin_channel(25.0, 2000, 0), 0).energy;
  EXPECT_NEAR(same_grid, fine(0), 1e-9 * std::abs(fine(0)));
}

TEST(NegativeEigenpairs, EigenvectorInvariants) {
  const auto op = aubin_channel(50.0, 4000, 0);
  const EigenPair p = eigenpair(op, 0);
  const RadialGrid& g = op.grid();
  EXPECT_NEAR(inner(g, p.vector, p.vector), 1.0, 1e-12);
  auto res = apply_operator(op, p.vector);
  double r2 = 0.0;
  for (std::size_t i = 0; i < res.size(); ++i) r2 += g.weights()[i] * std::pow(res[i] - p.energy * p.vector[i], 2);
  EXPECT_LE(std::sqrt(r2), 1e-8 * (std::abs(p.energy) + 1.0));
  const double vmax = *std::max_element(p.vector.begin(), p.vector.end());
  for (std::size_t i = 0; i + 1 < p.vector.size(); ++i) EXPECT_GT(p.vector[i], -1e-14 * vmax);
  for (std::size_t i = 0; g[i] < 15.0; ++i) EXPECT_GT(p.vector[i], 0.0);
  const double k = std::sqrt(-p.energy);
  EXPECT_NEAR(fitted_decay_rate(g, p.vector, 5.0, 12.0) / k, 1.0, 0.05);
  for (std::size_t j = 1; j < 4; ++j) EXPECT_EQ(eigenpair(op, j).node_count, static_cast<int>(j));
}

TEST(NegativeEigenpairs, SpectralScaling) {
  const double e1 = negative_eigenpairs(aubin_channel(50.0, 4000, 0, 1.0)).at(0).energy;
  for (double a : {0.25, 4.0}) {
    const auto pairs = negative_eigenpairs(aubin_channel(50.0, 4000, 0, a));
    ASSERT_EQ(pairs.size(), 1u);
    EXPECT_NEAR(pairs[0].energy / (a * e1), 1.0, 1e-3);
  }
}

TEST(CountNodes, KnownCounts) {
  const RadialGrid box(std::numbers::pi, 2000);
  EXPECT_EQ(count_nodes(ChannelOperator(box, 0, std::vector<double>(2000, 0.0)), 2.5), 1);
  EXPECT_EQ(count_nodes(aubin_channel(50.0, 4000, 0), -1e-9), 1);
  EXPECT_EQ(count_nodes(aubin_channel(50.0, 4000, 1), -1e-9), 0);
}

TEST(CountNodes, AgreesWithEigenpairsOnRandomPotentials) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> depth(1.0, 40.0), width(0.5, 3.0);
  const RadialGrid g(30.0, 1500);
  for (int trial = 0; trial < 12; ++trial) {
    const double d = depth(rng), w = width(rng);
    const int ell = trial % 3;
    const ChannelOperator op(g, ell, sample(g, [&](double r) { return -d * std::exp(-r * r / (w * w)); }));
    const auto pairs = negative_eigenpairs(op);
    std::uniform_real_distribution<double> ue(-d, 0.0);
    for (int s = 0; s < 5; ++s) {
      const double e = ue(rng);
      int below = 0;
      for (const auto& p : pairs) below += p.energy < e;
      EXPECT_EQ(count_nodes(op, e), below);
    }
  }
}

TEST(ZeroEnergy, FreeChannelHasNoObstruction) {
  const RadialGrid g(50.0, 2000);
  const auto d = zero_energy_diagnosis(ChannelOperator(g, 0, std::vector<double>(2000, 0.0)));
  EXPECT_EQ(d.kind, ZeroEnergyKind::none);
  EXPECT_NEAR(d.tail_slope, 1.0, 1e-6);
  EXPECT_NEAR(d.tail_const, 0.0, 1e-6);
}

TEST(ZeroEnergy, AubinMonopoleResonance) {
  const auto op = aubin_channel(50.0, 4000, 0);
  const auto d = zero_energy_diagnosis(op);
  EXPECT_EQ(d.kind, ZeroEnergyKind::resonance);
  EXPECT_EQ(d.interior_sign_changes, 1);
  EXPECT_GT(std::abs(d.v_integral), 1.0);
  const RadialGrid& g = op.grid();
  const auto ref = sample(g, [](double r) { return r * (0.5 * oracle::aubin_phi(r, 1.0) + r * oracle::aubin_dphi_dr(r, 1.0)); });
  const auto m = match_profile(d.solution, ref, g.index_at_or_below(25.0) + 1);
  EXPECT_LT(m.sup_rel_error, 1e-3);
}

TEST(ZeroEnergy, AubinDipoleEigenvalue) {
  const auto op = aubin_channel(50.0, 8000, 1);
  const auto d = zero_energy_diagnosis(op);
  EXPECT_EQ(d.kind, ZeroEnergyKind::eigenvalue);
  const RadialGrid& g = op.grid();
  std::vector<double> f(g.size()), ref(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    f[i] = d.solution[i] / g[i];
    ref[i] = oracle::aubin_dphi_dr(g[i], 1.0);
  }
  EXPECT_LT(match_profile(f, ref, g.index_at_or_below(25.0) + 1).sup_rel_error, 1e-3);
  std::vector<double> absf(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) absf[i] = std::abs(f[i]);
  EXPECT_NEAR(loglog_slope(g.nodes(), absf, 10.0, 25.0), -2.0, 0.1);
}

TEST(ZeroEnergy, TooShortBoxIsReported) {
  const auto op = aubin_channel(3.0, 300, 0);
  EXPECT_THROW(
      {
        try {
          zero_energy_diagnosis(op, ZeroEnergyOptions{.fit_tolerance = 1e-12});
        } catch (const NumericError& e) {
          EXPECT_EQ(e.kind(), ErrorKind::tail_window_too_small);
          throw;
        }
      },
      NumericError);
}

TEST(BirmanSchwinger, ZeroPotential) {
  const RadialGrid g(10.0, 200);
  const auto r = birman_schwinger_count(std::vector<double>(200, 0.0), 3, g);
  ASSERT_EQ(r.channels.size(), 4u);
  for (const auto& c : r.channels) EXPECT_EQ(c.count, 0);
  EXPECT_EQ(r.total_with_multiplicity, 0);
}

TEST(BirmanSchwinger, AubinCountsFive) {
  const RadialGrid g(40.0, 800);
  const auto r = birman_schwinger_count(aubin_potential(1.0, g), 3, g, 1e-3);
  ASSERT_EQ(r.channels.size(), 4u);
  EXPECT_EQ(r.channels[0].count, 2);
  EXPECT_EQ(r.channels[1].count, 1);
  EXPECT_EQ(r.channels[2].count, 0);
  EXPECT_EQ(r.channels[3].count, 0);
  EXPECT_EQ(r.total_with_multiplicity, 5);
  EXPECT_GT(r.channels[0].top_eigenvalues[0], 1.5);
  EXPECT_NEAR(r.channels[0].top_eigenvalues[1], 1.0, 5e-3);
  EXPECT_NEAR(r.channels[1].top_eigenvalues[0], 1.0, 5e-3);
  for (std::size_t l = 1; l < r.channels.size(); ++l)
    for (std::size_t j = 0; j < 3; ++j)
      EXPECT_LE(r.channels[l].top_eigenvalues[j], r.channels[l - 1].top_eigenvalues[j] + 1e-12);
}

TEST(BirmanSchwinger, TopEigenvalueAgainstMidpointAssembly) {
  // Independent Nyström assembly on midpoints of [0, 40].
  const int n = 1600;
  const double R = 40.0, h = R / n;
  Eigen::MatrixXd K(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double r = (i + 0.5) * h, s = (j + 0.5) * h;
      const double vr = 5.0 * std::pow(oracle::aubin_phi(r, 1.0), 4), vs = 5.0 * std::pow(oracle::aubin_phi(s, 1.0), 4);
      K(i, j) = h * std::sqrt(vr * vs) * std::min(r, s);
    }
  const Eigen::VectorXd ev = oracle::dense_eigenvalues(K);
  const RadialGrid g(40.0, 800);
  const auto r = birman_schwinger_count(aubin_potential(1.0, g), 0, g);
  EXPECT_NEAR(r.channels[0].top_eigenvalues[0], ev(n - 1), 2e-3 * ev(n - 1));
  EXPECT_NEAR(r.channels[0].top_eigenvalues[1], ev(n - 2), 5e-3);
}

TEST(BirmanSchwinger, SquareWellBoundStates) {
  // V = -30 on r < 1: a new ℓ bound state appears at each zero of j_{ℓ-1}(√30).
  // ℓ = 0: π/2, 3π/2. ℓ = 1: π. ℓ = 2: 4.493.
  const RadialGrid g(4.0, 800);
  const auto V = sample(g, [](double r) { return r < 1.0 ? -30.0 : 0.0; });
  const auto r = birman_schwinger_count(V, 2, g, 0.0);
  EXPECT_EQ(r.channels[0].count, 2);
  EXPECT_EQ(r.channels[1].count, 1);
  EXPECT_EQ(r.channels[2].count, 1);
  const ChannelOperator op(RadialGrid(30.0, 6000), 0, sample(RadialGrid(30.0, 6000), [](double x) { return x < 1.0 ? -30.0 : 0.0; }));
  EXPECT_EQ(negative_eigenpairs(op).size(), 2u);
}

TEST(BirmanSchwinger, RejectsRepulsivePotential) {
  const RadialGrid g(10.0, 100);
  EXPECT_THROW(birman_schwinger_count(std::vector<double>(100, 1.0), 1, g), std::invalid_argument);
  EXPECT_THROW(birman_schwinger_count(std::vector<double>(99, -1.0), 1, g), std::invalid_argument);
}
