#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "solitonlab/fitting.hpp"

using namespace solitonlab;

TEST(Fitting, LeastSquaresRecoversExactModel) {
  Eigen::MatrixXd A(50, 3);
  Eigen::VectorXd b(50);
  for (int i = 0; i < 50; ++i) {
    const double x = 0.1 * i;
    A(i, 0) = 1.0;
    A(i, 1) = x;
    A(i, 2) = x * x;
    b(i) = 2.0 - 3.0 * x + 0.5 * x * x;
  }
  const LinearFit fit = least_squares(A, b);
  EXPECT_NEAR(fit.coefficients(0), 2.0, 1e-12);
  EXPECT_NEAR(fit.coefficients(1), -3.0, 1e-12);
  EXPECT_NEAR(fit.coefficients(2), 0.5, 1e-12);
  EXPECT_LT(fit.residual_rms, 1e-12);
}

TEST(Fitting, PowerLawSlopes) {
  std::vector<double> t, v1, v2;
  for (int i = 1; i <= 40; ++i) {
    t.push_back(i);
    v1.push_back(7.0 / i);
    v2.push_back(3.0 * std::pow(i, -1.5));
  }
  EXPECT_NEAR(loglog_slope(t, v1, 5.0, 40.0), -1.0, 1e-10);
  EXPECT_NEAR(loglog_slope(t, v2, 5.0, 40.0), -1.5, 1e-10);
  std::vector<double> e;
  for (double x : t) e.push_back(4.0 * std::exp(-0.7 * x));
  EXPECT_NEAR(semilog_slope(t, e, 1.0, 30.0), -0.7, 1e-10);
}

TEST(Fitting, SlopeRejectsNonpositiveValues) {
  std::vector<double> t{1, 2, 3, 4}, v{1, -1, 1, 1};
  EXPECT_THROW(loglog_slope(t, v, 1.0, 4.0), std::invalid_argument);
}

TEST(Fitting, ProfileMatch) {
  std::vector<double> ref, val;
  for (int i = 0; i < 100; ++i) {
    ref.push_back(std::sin(0.05 * i) + 1.0);
    val.push_back(-2.5 * ref.back());
  }
  const ProfileMatch m = match_profile(val, ref, 100);
  EXPECT_NEAR(m.scale, -2.5, 1e-13);
  EXPECT_LT(m.sup_rel_error, 1e-14);
  val[10] += 0.01;
  EXPECT_GT(match_profile(val, ref, 100).sup_rel_error, 1e-4);
  EXPECT_LT(match_profile(val, ref, 5).sup_rel_error, 1e-14);
}

TEST(Fitting, SignChanges) {
  EXPECT_EQ(sign_changes(std::vector<double>{1, 2, -1, -2, 3}), 2);
  EXPECT_EQ(sign_changes(std::vector<double>{1, 0, 1}), 0);
  EXPECT_EQ(sign_changes(std::vector<double>{1, 1e-20, -1}, 1e-10), 1);
}
