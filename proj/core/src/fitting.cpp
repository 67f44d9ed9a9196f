#include "solitonlab/fitting.hpp"

#include <cmath>
#include <stdexcept>

namespace solitonlab {

LinearFit least_squares(const Eigen::MatrixXd& design, const Eigen::VectorXd& rhs) {
  if (design.rows() != rhs.size()) throw std::invalid_argument("least_squares: shape mismatch");
  if (design.rows() < design.cols()) throw std::invalid_argument("least_squares: underdetermined system");
  LinearFit fit;
  fit.coefficients = design.colPivHouseholderQr().solve(rhs);
  Eigen::VectorXd r = design * fit.coefficients - rhs;
  fit.residual_rms = std::sqrt(r.squaredNorm() / static_cast<double>(rhs.size()));
  return fit;
}

namespace {
double windowed_slope(std::span<const double> t, std::span<const double> value, double t0, double t1,
                      bool log_t) {
  if (t.size() != value.size()) throw std::invalid_argument("slope fit: length mismatch");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t0 || t[i] > t1) continue;
    if (!(value[i] > 0.0)) throw std::invalid_argument("slope fit: nonpositive value in window");
    if (log_t && !(t[i] > 0.0)) throw std::invalid_argument("slope fit: nonpositive abscissa in window");
    const double x = log_t ? std::log(t[i]) : t[i];
    const double y = std::log(value[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  if (count < 2) throw std::invalid_argument("slope fit: fewer than two points in window");
  const double n = static_cast<double>(count);
  const double denom = n * sxx - sx * sx;
  if (denom <= 0.0) throw std::invalid_argument("slope fit: degenerate abscissae");
  return (n * sxy - sx * sy) / denom;
}
}  // namespace

double loglog_slope(std::span<const double> t, std::span<const double> value, double t0, double t1) {
  return windowed_slope(t, value, t0, t1, true);
}

double semilog_slope(std::span<const double> t, std::span<const double> value, double t0, double t1) {
  return windowed_slope(t, value, t0, t1, false);
}

int sign_changes(std::span<const double> v, double floor) {
  int changes = 0;
  int last = 0;
  for (double x : v) {
    if (std::abs(x) <= floor) continue;
    int s = x > 0 ? 1 : -1;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

ProfileMatch match_profile(std::span<const double> values, std::span<const double> reference, std::size_t count) {
  if (count == 0 || count > values.size() || count > reference.size())
    throw std::invalid_argument("profile window exceeds the data");
  double vr = 0.0, rr = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    vr += values[i] * reference[i];
    rr += reference[i] * reference[i];
  }
  if (!(rr > 0.0)) throw std::invalid_argument("reference profile vanishes");
  ProfileMatch m;
  m.scale = vr / rr;
  double diff = 0.0, ref = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    diff = std::max(diff, std::abs(values[i] - m.scale * reference[i]));
    ref = std::max(ref, std::abs(m.scale * reference[i]));
  }
  m.sup_rel_error = diff / ref;
  return m;
}

}  // namespace solitonlab
