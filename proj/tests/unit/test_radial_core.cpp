#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "oracles/oracles.hpp"
#include "solitonlab/channel_operator.hpp"
#include "solitonlab/radial_grid.hpp"
#include "solitonlab/solitons.hpp"
#include "solitonlab/tridiagonal.hpp"

using namespace solitonlab;

namespace {

ChannelOperator laplacian(double r_max, std::size_t n, int ell = 0) {
  RadialGrid g(r_max, n);
  return ChannelOperator(g, ell, std::vector<double>(n, 0.0));
}

double interior_sup(const std::vector<double>& v, std::size_t last) {
  double m = 0.0;
  for (std::size_t i = 0; i <= last; ++i) m = std::max(m, std::abs(v[i]));
  return m;
}

}  // namespace

TEST(RadialGrid, UniformNodes) {
  const RadialGrid g = make_grid(1.0, 100);
  EXPECT_DOUBLE_EQ(g[0], 0.01);
  EXPECT_DOUBLE_EQ(g[99], 1.0);
  const RadialGrid g2(10.0, 16);
  EXPECT_EQ(g2.size(), 16u);
  EXPECT_DOUBLE_EQ(g2.spacing(), 0.625);
  for (std::size_t i = 1; i < g2.size(); ++i) EXPECT_GT(g2[i], g2[i - 1]);
}

TEST(RadialGrid, WeightsSumToRadius) {
  const RadialGrid g(50.0, 4000);
  double s = 0.0;
  for (double w : g.weights()) {
    EXPECT_GT(w, 0.0);
    s += w;
  }
  EXPECT_NEAR(s, 50.0, 1e-10);
  EXPECT_NEAR(integrate(g, std::vector<double>(g.size(), 1.0)), 50.0, 1e-10);
}

TEST(RadialGrid, RejectsBadArguments) {
  EXPECT_THROW(RadialGrid(0.0, 100), std::invalid_argument);
  EXPECT_THROW(RadialGrid(-1.0, 100), std::invalid_argument);
  EXPECT_THROW(RadialGrid(1.0, 15), std::invalid_argument);
  const RadialGrid g(1.0, 20);
  EXPECT_THROW(integrate(g, std::vector<double>(19, 1.0)), std::invalid_argument);
  EXPECT_THROW(inner(g, std::vector<double>(20), std::vector<double>(21)), std::invalid_argument);
}

TEST(RadialGrid, IndexLookup) {
  const RadialGrid g(10.0, 100);
  EXPECT_EQ(g.index_at_or_below(5.0), 49u);
  EXPECT_EQ(g.index_at_or_below(5.05), 49u);
  EXPECT_EQ(g.index_at_or_below(10.0), 99u);
  EXPECT_EQ(g.index_at_or_below(0.01), 0u);
}

TEST(RadialGrid, QuadratureAgainstOracle) {
  const RadialGrid g(60.0, 6000);
  const auto f = sample(g, [](double r) { return r * r * std::pow(1.0 + r * r, -3.0); });
  const double ref = static_cast<double>(
      oracle::integrate_half_line([](oracle::real r) { return r * r * std::pow(1.0L + r * r, -3.0L); }));
  EXPECT_NEAR(ref, std::numbers::pi / 16.0, 1e-12);
  EXPECT_NEAR(integrate(g, f), ref, 1e-4);
}

TEST(RadialGrid, GroundStateEnergyIdentity) {
  // ⟨Hφ,φ⟩ = -4∫φ⁶ with the ℓ = 0 half-line operator acting on w = rφ.
  const RadialGrid g(200.0, 20000);
  const ChannelOperator op(g, 0, aubin_potential(1.0, g));
  const auto w = sample(g, [](double r) { return r * oracle::aubin_phi(r, 1.0); });
  const auto Hw = apply_operator(op, w);
  const std::size_t last = g.index_at_or_below(100.0);
  double form = 0.0;
  for (std::size_t i = 0; i <= last; ++i) form += g.weights()[i] * Hw[i] * w[i];
  form *= 4.0 * std::numbers::pi;
  const double phi6 = 4.0 * std::numbers::pi * std::pow(3.0, 1.5) *
                      static_cast<double>(oracle::integrate_half_line(
                          [](oracle::real r) { return r * r * std::pow(1.0L + r * r, -3.0L); }));
  EXPECT_NEAR(form / (-4.0 * phi6), 1.0, 1e-4);
}

TEST(ChannelOperator, DirichletLaplacianMatchesKnownSpectrum) {
  const auto op = laplacian(std::numbers::pi, 2000);
  EXPECT_NEAR(eigenvalue_by_index(op.matrix(), 0), 1.0, 1e-5);
  EXPECT_NEAR(eigenvalue_by_index(op.matrix(), 1), 4.0, 1e-4);
  // Exact discrete eigenvalues (4/h²) sin²(kπ/2n).
  const double h = std::numbers::pi / 2000;
  for (std::size_t k = 0; k < 5; ++k) {
    const double s = std::sin((k + 1) * std::numbers::pi / 4000.0);
    EXPECT_NEAR(eigenvalue_by_index(op.matrix(), k), 4.0 / (h * h) * s * s, 1e-9);
  }
}

TEST(ChannelOperator, CentrifugalChannelIsNonnegative) {
  const auto op = laplacian(10.0, 400, 1);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> v(op.grid().size());
    for (double& x : v) x = nd(rng);
    v.back() = 0.0;
    const auto Hv = apply_operator(op, v);
    EXPECT_GE(inner(op.grid(), Hv, v), 0.0);
  }
  EXPECT_GT(eigenvalue_by_index(op.matrix(), 0), 0.0);
}

TEST(ChannelOperator, AubinPotentialHasOneNegativeEigenvalue) {
  const RadialGrid g(50.0, 4000);
  const ChannelOperator op(g, 0, aubin_potential(1.0, g));
  EXPECT_EQ(sturm_count(op.matrix(), 0.0), 1u);
}

TEST(ChannelOperator, LengthMismatchIsRejected) {
  const RadialGrid g(10.0, 100);
  EXPECT_THROW(ChannelOperator(g, 0, std::vector<double>(99, 0.0)), std::invalid_argument);
  EXPECT_THROW(ChannelOperator(g, -1, std::vector<double>(100, 0.0)), std::invalid_argument);
  const auto op = laplacian(10.0, 100);
  EXPECT_THROW(apply_operator(op, std::vector<double>(50)), std::invalid_argument);
}

TEST(ChannelOperator, ApplyToZeroAndEigenfunction) {
  const auto op = laplacian(std::numbers::pi, 1000);
  const auto zero = apply_operator(op, std::vector<double>(1000, 0.0));
  for (double x : zero) EXPECT_EQ(x, 0.0);
  double err[2];
  for (int k = 0; k < 2; ++k) {
    const auto o = laplacian(std::numbers::pi, 1000u << k);
    const auto s = sample(o.grid(), [](double r) { return std::sin(r); });
    auto Hs = apply_operator(o, s);
    for (std::size_t i = 0; i < s.size(); ++i) Hs[i] -= s[i];
    err[k] = interior_sup(Hs, s.size() - 2);
  }
  EXPECT_LT(err[0], 1e-5);
  EXPECT_NEAR(err[0] / err[1], 4.0, 0.2);
}

TEST(ChannelOperator, DilationResidualIsSecondOrder) {
  double res[2];
  for (int k = 0; k < 2; ++k) {
    const RadialGrid g(20.0, 1000u << k);
    const ChannelOperator op(g, 0, aubin_potential(1.0, g));
    // w = r(1/2 + r d/dr)φ
    const auto w = sample(g, [](double r) { return r * (0.5 * oracle::aubin_phi(r, 1.0) + r * oracle::aubin_dphi_dr(r, 1.0)); });
    res[k] = interior_sup(apply_operator(op, w), g.size() - 2);
  }
  EXPECT_LT(res[0], 1e-2);
  EXPECT_NEAR(std::log2(res[0] / res[1]), 2.0, 0.2);
}

TEST(ChannelOperator, BareRadialDerivativeLeavesOrderOneResidual) {
  // r·(r φ') alone misses the φ/2 part of the dilation generator.
  double res[2];
  for (int k = 0; k < 2; ++k) {
    const RadialGrid g(20.0, 1000u << k);
    const ChannelOperator op(g, 0, aubin_potential(1.0, g));
    const auto w = sample(g, [](double r) { return r * r * oracle::aubin_dphi_dr(r, 1.0); });
    res[k] = interior_sup(apply_operator(op, w), g.size() - 2);
  }
  EXPECT_GT(res[1], 1.0);
  EXPECT_NEAR(res[0] / res[1], 1.0, 1e-2);
}

TEST(ChannelOperator, SymmetricOnRandomVectors) {
  const RadialGrid g(30.0, 600);
  const ChannelOperator op(g, 2, aubin_potential(1.0, g));
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> u(g.size()), v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      u[i] = nd(rng);
      v[i] = nd(rng);
    }
    u.back() = v.back() = 0.0;
    const auto Hu = apply_operator(op, u), Hv = apply_operator(op, v);
    double a = 0, b = 0, scale = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      a += Hu[i] * v[i];
      b += u[i] * Hv[i];
      scale += std::abs(Hu[i] * v[i]);
    }
    EXPECT_NEAR(a, b, 1e-12 * scale);
  }
}

TEST(ChannelOperator, EigenvaluesConvergeAtSecondOrder) {
  double e[3];
  for (int k = 0; k < 3; ++k) {
    const RadialGrid g(30.0, 750u << k);
    e[k] = eigenvalue_by_index(ChannelOperator(g, 0, aubin_potential(1.0, g)).matrix(), 0);
  }
  const double order = oracle::convergence_order(e[0], e[1], e[2]);
  EXPECT_GE(order, 1.8);
  EXPECT_LE(order, 2.2);
}

TEST(Tridiagonal, MatchesDenseEigensolve) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ud(-20.0, 0.0);
  for (int trial = 0; trial < 5; ++trial) {
    const double depth = ud(rng), width = 1.0 + trial;
    auto V = [&](double r) { return depth * std::exp(-r * r / (width * width)); };
    const int n = 300;
    const RadialGrid g(15.0, n);
    const ChannelOperator op(g, trial % 3, sample(g, V));
    const Eigen::VectorXd dense = oracle::dense_eigenvalues(oracle::dense_channel_matrix(15.0, n, trial % 3, V));
    for (int k = 0; k < 6; ++k) EXPECT_NEAR(eigenvalue_by_index(op.matrix(), k), dense(k), 1e-9 * (1 + std::abs(dense(k))));
    const double x = 0.5 * (dense(3) + dense(4));
    EXPECT_EQ(sturm_count(op.matrix(), x), 4u);
    const auto full = full_eigensystem(op.matrix());
    EXPECT_LT((full.values - dense).cwiseAbs().maxCoeff(), 1e-8 * dense.cwiseAbs().maxCoeff());
  }
}

TEST(Tridiagonal, ShiftedSolveAndInverseIteration) {
  const RadialGrid g(20.0, 400);
  const ChannelOperator op(g, 0, aubin_potential(1.0, g));
  const auto& t = op.matrix();
  std::vector<double> rhs(t.size());
  for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = std::sin(0.1 * i);
  const auto x = solve_shifted(t, 0.3, rhs);
  auto back = multiply(t, x);
  for (std::size_t i = 0; i < rhs.size(); ++i) EXPECT_NEAR(back[i] - 0.3 * x[i], rhs[i], 1e-8);

  const double lambda = eigenvalue_by_index(t, 0);
  const auto v = inverse_iteration(t, lambda);
  auto tv = multiply(t, v);
  double res = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) res = std::max(res, std::abs(tv[i] - lambda * v[i]));
  EXPECT_LT(res, 1e-8);
  const auto [lo, hi] = gershgorin_bounds(t);
  EXPECT_LE(lo, lambda);
  EXPECT_GE(hi, eigenvalue_by_index(t, t.size() - 1));
}
