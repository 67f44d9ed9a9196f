#include "solitonlab/halfline_spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

#include "solitonlab/errors.hpp"
#include "solitonlab/fitting.hpp"

namespace solitonlab {

const char* to_string(ZeroEnergyKind kind) {
  switch (kind) {
    case ZeroEnergyKind::none: return "none";
    case ZeroEnergyKind::resonance: return "resonance";
    case ZeroEnergyKind::eigenvalue: return "eigenvalue";
  }
  return "unknown";
}

namespace {

double weighted_norm(const RadialGrid& grid, const std::vector<double>& v) {
  return std::sqrt(inner(grid, v, v));
}

}  // namespace

EigenPair eigenpair(const ChannelOperator& op, std::size_t k) {
  const auto& t = op.matrix();
  const double lambda = eigenvalue_by_index(t, k);
  std::vector<double> v = embed(inverse_iteration(t, lambda));
  const RadialGrid& grid = op.grid();
  const double nv = weighted_norm(grid, v);
  // Ground state positive; excited states start positive near the origin.
  double lead = 0.0;
  if (k == 0) {
    for (double x : v) lead += x;
  } else {
    double vmax = 0.0;
    for (double x : v) vmax = std::max(vmax, std::abs(x));
    for (double x : v)
      if (std::abs(x) > 1e-6 * vmax) {
        lead = x;
        break;
      }
  }
  const double sign = lead < 0.0 ? -1.0 : 1.0;
  for (double& x : v) x *= sign / nv;

  EigenPair pair;
  pair.energy = lambda;
  double vmax = 0.0;
  for (double x : v) vmax = std::max(vmax, std::abs(x));
  pair.node_count = sign_changes(v, 1e-10 * vmax);

  std::vector<double> res = apply_operator(op, v);
  for (std::size_t i = 0; i < res.size(); ++i) res[i] -= lambda * v[i];
  const double resid = weighted_norm(grid, res);
  if (resid > 1e-8 * (std::abs(lambda) + 1.0))
    throw NumericError(ErrorKind::numeric_failure,
                       "eigenvector residual " + std::to_string(resid) + " at energy " + std::to_string(lambda));
  if (pair.node_count != static_cast<int>(k))
    throw NumericError(ErrorKind::numeric_failure, "eigenvector " + std::to_string(k) + " has " +
                                                       std::to_string(pair.node_count) + " nodes");
  pair.vector = std::move(v);
  return pair;
}

std::vector<EigenPair> negative_eigenpairs(const ChannelOperator& op) {
  const std::size_t count = sturm_count(op.matrix(), 0.0);
  std::vector<EigenPair> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) out.push_back(eigenpair(op, k));
  return out;
}

int count_nodes(const ChannelOperator& op, double energy) {
  // The LDLᵀ pivots of (T - E) are h⁻² w_{i+1}/w_i for the regular solution,
  // so the negative-pivot count is the sign-change count on (0, r_max].
  return static_cast<int>(sturm_count(op.matrix(), energy));
}

std::vector<double> regular_solution(const ChannelOperator& op, double energy) {
  const auto& t = op.matrix();
  const std::size_t n = op.grid().size();
  const double h = op.grid().spacing();
  const double h2 = h * h;
  std::vector<double> w(n);
  double prev = 0.0;
  w[0] = h;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double next = h2 * (t.diag[i] - energy) * w[i] - prev;
    prev = w[i];
    w[i + 1] = next;
    if (std::abs(next) > 1e150) {
      for (std::size_t j = 0; j <= i + 1; ++j) w[j] *= 1e-150;
      prev *= 1e-150;
    }
  }
  return w;
}

std::vector<double> regular_solution_numerov(const ChannelOperator& op, double energy) {
  const RadialGrid& grid = op.grid();
  const std::size_t n = grid.size();
  const double h2 = grid.spacing() * grid.spacing();
  const int ell = op.ell();
  const auto& V = op.potential();
  auto q = [&](std::size_t i) {
    const double r = grid[i];
    return h2 / 12.0 * (V[i] + ell * (ell + 1) / (r * r) - energy);
  };
  std::vector<double> w(n);
  // w(0) = 0 removes the r = 0 term from the first step.
  w[0] = std::pow(grid.spacing(), ell + 1);
  double prev = 0.0, q_prev = 0.0, q_cur = q(0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double q_next = q(i + 1);
    const double next = (2.0 * (1.0 + 5.0 * q_cur) * w[i] - (1.0 - q_prev) * prev) / (1.0 - q_next);
    prev = w[i];
    w[i + 1] = next;
    q_prev = q_cur;
    q_cur = q_next;
    if (std::abs(next) > 1e150) {
      for (std::size_t j = 0; j <= i + 1; ++j) w[j] *= 1e-150;
      prev *= 1e-150;
    }
  }
  return w;
}

ZeroEnergyDiagnosis zero_energy_diagnosis(const ChannelOperator& op, const ZeroEnergyOptions& options) {
  const RadialGrid& grid = op.grid();
  const std::size_t n = grid.size();
  const int ell = op.ell();
  ZeroEnergyDiagnosis out;
  out.threshold = options.threshold;
  out.solution = options.high_order ? regular_solution_numerov(op, 0.0) : regular_solution(op, 0.0);

  const double r_max = grid.r_max();
  const std::size_t first = grid.index_at_or_below(options.window_start * r_max);
  double scale = 0.0;
  for (std::size_t i = first; i < n; ++i) scale = std::max(scale, std::abs(out.solution[i]));
  if (!(scale > 0.0) || !std::isfinite(scale))
    throw NumericError(ErrorKind::numeric_failure, "zero-energy solution vanishes on the tail window");
  for (double& x : out.solution) x /= scale;

  const auto rows = static_cast<Eigen::Index>(n - first);
  Eigen::MatrixXd design(rows, 4);
  Eigen::VectorXd rhs(rows);
  const double decay_power = std::max(ell, 1);
  for (Eigen::Index k = 0; k < rows; ++k) {
    const std::size_t i = first + static_cast<std::size_t>(k);
    const double x = grid[i] / r_max;
    design(k, 0) = std::pow(x, ell + 1);
    design(k, 1) = 1.0;
    design(k, 2) = std::pow(x, -decay_power);
    design(k, 3) = std::pow(x, -decay_power - 1.0);
    rhs(k) = out.solution[i];
  }
  LinearFit fit = least_squares(design, rhs);
  out.tail_slope = fit.coefficients(0);
  out.tail_const = fit.coefficients(1);
  out.tail_decay = fit.coefficients(2);
  out.fit_residual = fit.residual_rms;
  if (fit.residual_rms > options.fit_tolerance)
    throw NumericError(ErrorKind::tail_window_too_small,
                       "tail fit residual " + std::to_string(fit.residual_rms) + " exceeds tolerance; enlarge r_max");

  if (std::abs(out.tail_slope) >= options.threshold)
    out.kind = ZeroEnergyKind::none;
  else if (ell == 0 && std::abs(out.tail_const) >= options.threshold)
    out.kind = ZeroEnergyKind::resonance;
  else
    out.kind = ZeroEnergyKind::eigenvalue;

  double vmax = 0.0;
  for (double x : out.solution) vmax = std::max(vmax, std::abs(x));
  out.interior_sign_changes = sign_changes(std::span<const double>(out.solution).first(n - 1), 1e-12 * vmax);

  std::vector<double> integrand(n);
  for (std::size_t i = 0; i < n; ++i) integrand[i] = op.potential()[i] * out.solution[i] * grid[i];
  out.v_integral = 4.0 * std::numbers::pi * integrate(grid, integrand);
  return out;
}

BirmanSchwingerResult birman_schwinger_count(const std::vector<double>& potential, int ell_max,
                                             const RadialGrid& grid, double threshold_eps, int keep_top) {
  if (potential.size() != grid.size()) throw std::invalid_argument("birman_schwinger_count: length mismatch");
  if (ell_max < 0) throw std::invalid_argument("birman_schwinger_count: ell_max must be nonnegative");
  if (!(threshold_eps >= 0.0 && threshold_eps < 1.0))
    throw std::invalid_argument("birman_schwinger_count: threshold_eps must lie in [0, 1)");
  double vmax = 0.0;
  for (double v : potential) vmax = std::max(vmax, std::abs(v));
  for (double v : potential)
    if (v > 1e-14 * vmax) throw std::invalid_argument("birman_schwinger_count: potential must be nonpositive");

  // Nodes where V vanishes contribute zero rows and columns.
  std::vector<std::size_t> support;
  for (std::size_t i = 0; i < potential.size(); ++i)
    if (potential[i] < 0.0) support.push_back(i);
  const auto m = static_cast<Eigen::Index>(support.size());
  Eigen::VectorXd s(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const std::size_t i = support[static_cast<std::size_t>(k)];
    s(k) = std::sqrt(grid.weights()[i] * -potential[i]);
  }

  BirmanSchwingerResult result;
  result.threshold_eps = threshold_eps;
  for (int ell = 0; ell <= ell_max; ++ell) {
    BirmanSchwingerChannel ch;
    ch.ell = ell;
    if (m > 0) {
      Eigen::MatrixXd k_mat(m, m);
      const double norm = 1.0 / (2.0 * ell + 1.0);
      for (Eigen::Index a = 0; a < m; ++a) {
        const double ra = grid[support[static_cast<std::size_t>(a)]];
        for (Eigen::Index b = 0; b <= a; ++b) {
          const double rb = grid[support[static_cast<std::size_t>(b)]];
          // rb <= ra here
          const double g = norm * std::pow(rb, ell + 1) * std::pow(ra, -ell);
          k_mat(a, b) = s(a) * g * s(b);
          k_mat(b, a) = k_mat(a, b);
        }
      }
      const double asym = (k_mat - k_mat.transpose()).cwiseAbs().maxCoeff();
      if (asym > 1e-10 * k_mat.cwiseAbs().maxCoeff())
        throw std::logic_error("birman_schwinger_count: kernel assembly is not symmetric");
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k_mat, Eigen::EigenvaluesOnly);
      if (es.info() != Eigen::Success)
        throw NumericError(ErrorKind::numeric_failure, "Birman-Schwinger eigensolve failed");
      const Eigen::VectorXd& ev = es.eigenvalues();
      for (Eigen::Index k = m - 1; k >= 0; --k) {
        if (ev(k) >= 1.0 - threshold_eps) ++ch.count;
        if (static_cast<int>(ch.top_eigenvalues.size()) < keep_top) ch.top_eigenvalues.push_back(ev(k));
      }
    }
    result.total_with_multiplicity += (2 * ell + 1) * ch.count;
    result.channels.push_back(std::move(ch));
  }
  return result;
}

double fitted_decay_rate(const RadialGrid& grid, const std::vector<double>& v, double r0, double r1) {
  return -semilog_slope(grid.nodes(), v, r0, r1);
}

}  // namespace solitonlab
