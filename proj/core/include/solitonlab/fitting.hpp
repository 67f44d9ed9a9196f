#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace solitonlab {

struct LinearFit {
  Eigen::VectorXd coefficients;
  double residual_rms = 0.0;  // rms of (A c - b)
};

/// Least squares via column-pivoted Householder QR.
LinearFit least_squares(const Eigen::MatrixXd& design, const Eigen::VectorXd& rhs);

/// Slope of log(value) against log(t) over points with t in [t0, t1].
/// Throws std::invalid_argument when a value in the window is not positive or
/// fewer than two points fall inside it.
double loglog_slope(std::span<const double> t, std::span<const double> value, double t0, double t1);

/// Slope of log(value) against t over points with t in [t0, t1].
double semilog_slope(std::span<const double> t, std::span<const double> value, double t0, double t1);

struct ProfileMatch {
  double scale = 0.0;          // least-squares c in values ≈ c·reference
  double sup_rel_error = 0.0;  // max |values - c·reference| / max |c·reference|
};

/// Compares the first `count` entries of two profiles up to a scale factor.
ProfileMatch match_profile(std::span<const double> values, std::span<const double> reference, std::size_t count);

/// Number of sign changes, ignoring entries below `floor` in magnitude.
int sign_changes(std::span<const double> v, double floor = 0.0);

}  // namespace solitonlab
