#include "solitonlab/nls_linearized.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "solitonlab/errors.hpp"

namespace solitonlab {

const ChannelOperator& LinearizedPair::plus(int ell) const {
  auto it = L_plus.find(ell);
  if (it == L_plus.end()) throw std::invalid_argument("LinearizedPair: channel " + std::to_string(ell) + " not assembled");
  return it->second;
}

const ChannelOperator& LinearizedPair::minus(int ell) const {
  auto it = L_minus.find(ell);
  if (it == L_minus.end()) throw std::invalid_argument("LinearizedPair: channel " + std::to_string(ell) + " not assembled");
  return it->second;
}

LinearizedPair assemble_linearized_pair(const NlsGroundState& profile, const std::vector<int>& ells) {
  if (profile.d != 3) throw std::invalid_argument("assemble_linearized_pair: channel reduction needs d = 3");
  if (profile.samples.size() != profile.grid.size())
    throw std::invalid_argument("assemble_linearized_pair: profile does not match its grid");
  LinearizedPair pair;
  pair.profile = profile;
  pair.alpha_sq = profile.alpha * profile.alpha;
  const std::size_t n = profile.grid.size();
  std::vector<double> v_minus(n), v_plus(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double p = std::pow(profile.samples[i], 2.0 * profile.sigma);
    v_minus[i] = pair.alpha_sq - p;
    v_plus[i] = pair.alpha_sq - (2.0 * profile.sigma + 1.0) * p;
  }
  for (int ell : ells) {
    pair.L_minus.emplace(ell, ChannelOperator(profile.grid, ell, v_minus));
    pair.L_plus.emplace(ell, ChannelOperator(profile.grid, ell, v_plus));
  }
  return pair;
}

namespace {

GapChannel scan_channel(const std::string& name, const ChannelOperator& op, double alpha_sq,
                        const GapScanOptions& options) {
  GapChannel ch;
  ch.op = name;
  ch.ell = op.ell();
  ch.eigenvalues = eigenvalues_in(op.matrix(), options.zero_fraction * alpha_sq, alpha_sq);

  const ChannelOperator edge = op.shifted(-alpha_sq);
  const ZeroEnergyDiagnosis diag = zero_energy_diagnosis(edge, options.edge);
  ch.edge_kind = to_string(diag.kind);
  ch.edge_tail_slope = diag.tail_slope;
  ch.edge_resonance = diag.kind != ZeroEnergyKind::none;
  if (diag.kind == ZeroEnergyKind::none) {
    // A growing tail whose sign disagrees with the solution at r_max will
    // cross zero past the box: one more eigenvalue just below α² in the
    // untruncated problem.
    const double w_end = diag.solution.back();
    if ((diag.tail_slope > 0.0) != (w_end > 0.0)) {
      ch.beyond_box = true;
      double estimate = alpha_sq;
      if (op.ell() == 0 && diag.tail_const != 0.0) {
        const double kappa = -diag.tail_slope / (op.grid().r_max() * diag.tail_const);
        if (kappa > 0.0) estimate = alpha_sq - kappa * kappa;
      }
      ch.eigenvalues.push_back(estimate);
    }
  }
  return ch;
}

double dot_interior(const std::vector<double>& a, const std::vector<double>& b, double h) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < a.size() && i < b.size(); ++i) s += a[i] * b[i];
  return s * h;
}

std::vector<double> r_times(const RadialGrid& grid, const std::vector<double>& f) {
  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = grid[i] * f[i];
  return out;
}

}  // namespace

GapReport gap_scan(const LinearizedPair& pair, const GapScanOptions& options) {
  GapReport report;
  report.sigma = pair.profile.sigma;
  report.alpha_sq = pair.alpha_sq;
  for (const auto& [ell, op] : pair.L_plus) report.channels.push_back(scan_channel("L+", op, pair.alpha_sq, options));
  for (const auto& [ell, op] : pair.L_minus)
    report.channels.push_back(scan_channel("L-", op, pair.alpha_sq, options));
  report.gap_holds = std::all_of(report.channels.begin(), report.channels.end(), [](const GapChannel& c) {
    return c.eigenvalues.empty() && !c.edge_resonance;
  });
  return report;
}

GapReport gap_report_at(double sigma, const SigmaStarConfig& config) {
  const RadialGrid grid(config.r_max_times_alpha / config.alpha, config.n);
  const auto profile = nls_ground_state(sigma, config.alpha, 3, grid, config.shooting);
  return gap_scan(assemble_linearized_pair(profile, config.ells), config.gap);
}

SigmaStarResult sigma_star(double lo, double hi, double tol, const SigmaStarConfig& config) {
  if (!(lo < hi) || !(tol > 0.0)) throw std::invalid_argument("sigma_star: need lo < hi and tol > 0");
  SigmaStarResult res;
  const bool holds_lo = gap_report_at(lo, config).gap_holds;
  const bool holds_hi = gap_report_at(hi, config).gap_holds;
  res.evaluations = 2;
  if (holds_lo || !holds_hi)
    throw NumericError(ErrorKind::invalid_bracket, "gap must fail at sigma = " + std::to_string(lo) +
                                                       " and hold at sigma = " + std::to_string(hi));
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (gap_report_at(mid, config).gap_holds)
      hi = mid;
    else
      lo = mid;
    ++res.evaluations;
  }
  res.lo = lo;
  res.hi = hi;
  res.estimate = 0.5 * (lo + hi);
  return res;
}

double weinstein_h(const LinearizedPair& pair, double mu, bool extrapolate) {
  const ChannelOperator& op = pair.plus(0);
  const auto& t = op.matrix();
  const double lambda0 = eigenvalue_by_index(t, 0);
  if (!(mu > lambda0 && mu < pair.alpha_sq))
    throw std::invalid_argument("weinstein_h: mu must lie strictly between the negative eigenvalue of L+ and alpha^2");
  const auto [glo, ghi] = gershgorin_bounds(t);
  const double scale = std::max(std::abs(glo), std::abs(ghi));
  const std::size_t below = sturm_count(t, mu);
  const double nearest = std::min(std::abs(mu - eigenvalue_by_index(t, below > 0 ? below - 1 : 0)),
                                  std::abs(eigenvalue_by_index(t, std::min(below, t.size() - 1)) - mu));
  if (nearest < 1e-12 * scale) throw NumericError(ErrorKind::singular_solve, "mu coincides with an eigenvalue of L+");

  const RadialGrid& grid = op.grid();
  const std::vector<double> rphi = r_times(grid, pair.profile.samples);
  auto pairing = [mu](const SymTridiagonal& m, const std::vector<double>& f, double h) {
    const std::vector<double> u = solve_shifted(m, mu, interior(f));
    return 4.0 * std::numbers::pi * dot_interior(u, f, h);
  };
  const double fine = pairing(t, rphi, grid.spacing());
  const std::size_t n = grid.size();
  if (!extrapolate || n % 2 != 0 || n < 64) return fine;

  // Every other node is the grid with spacing 2h; both errors are O(h²).
  const RadialGrid coarse_grid(grid.r_max(), n / 2);
  std::vector<double> v_sub(n / 2), rphi_sub(n / 2);
  for (std::size_t j = 0; j < n / 2; ++j) {
    v_sub[j] = op.potential()[2 * j + 1];
    rphi_sub[j] = rphi[2 * j + 1];
  }
  const ChannelOperator coarse(coarse_grid, 0, std::move(v_sub));
  const double rough = pairing(coarse.matrix(), rphi_sub, coarse_grid.spacing());
  return (4.0 * fine - rough) / 3.0;
}

double weinstein_h0_from_scaling(const NlsGroundState& profile, double rel_step, const ShootingOptions& options) {
  const std::vector<double> da = dphi_dalpha(profile, rel_step, options);
  const RadialGrid& grid = profile.grid;
  const std::vector<double> rda = r_times(grid, da);
  const std::vector<double> rphi = r_times(grid, profile.samples);
  const double pairing = 4.0 * std::numbers::pi * dot_interior(rda, rphi, grid.spacing());
  return -pairing / (2.0 * profile.alpha);
}

double mu0(const LinearizedPair& pair) {
  const ChannelOperator& op = pair.plus(0);
  const SymTridiagonal& t = op.matrix();
  const std::size_t m = t.size();
  const RadialGrid& grid = op.grid();

  // q = unit rφ; P T P = T - q(Tq)ᵀ - (Tq)qᵀ + (qᵀTq) qqᵀ. Adding c·qqᵀ moves
  // the φ direction above the spectrum, so the smallest eigenvalue of
  // M = PTP + c·qqᵀ is the constrained infimum.
  std::vector<double> q = interior(r_times(grid, pair.profile.samples));
  double nq = 0.0;
  for (double x : q) nq += x * x;
  nq = std::sqrt(nq);
  for (double& x : q) x /= nq;
  const std::vector<double> tq = multiply(t, q);
  double qtq = 0.0;
  for (std::size_t i = 0; i < m; ++i) qtq += q[i] * tq[i];
  const auto [glo, ghi] = gershgorin_bounds(t);
  const double c = ghi - glo + 1.0;
  const double beta = qtq + c;

  // Shifted solves with M - sI by Woodbury on the rank-two correction
  // [q, Tq] [[β, -1], [-1, 0]] [q, Tq]ᵀ.
  const double lambda0 = eigenvalue_by_index(t, 0);
  const double lambda1 = eigenvalue_by_index(t, 1);
  const double shift = lambda0 - 1e-3 * (lambda1 - lambda0);
  const std::vector<double> aq = solve_shifted(t, shift, q);
  const std::vector<double> atq = solve_shifted(t, shift, tq);
  auto dot = [m](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += a[i] * b[i];
    return s;
  };
  Eigen::Matrix2d cinv;
  cinv << 0.0, -1.0, -1.0, -beta;
  Eigen::Matrix2d capacitance;
  capacitance << dot(q, aq), dot(q, atq), dot(tq, aq), dot(tq, atq);
  const Eigen::Matrix2d small = (cinv + capacitance).inverse();
  auto apply_inverse = [&](const std::vector<double>& b) {
    std::vector<double> x = solve_shifted(t, shift, b);
    Eigen::Vector2d ub(dot(q, x), dot(tq, x));
    Eigen::Vector2d y = small * ub;
    for (std::size_t i = 0; i < m; ++i) x[i] -= aq[i] * y(0) + atq[i] * y(1);
    return x;
  };
  auto apply_m = [&](const std::vector<double>& x) {
    std::vector<double> y = multiply(t, x);
    const double qx = dot(q, x);
    const double tqx = dot(tq, x);
    for (std::size_t i = 0; i < m; ++i) y[i] += -q[i] * tqx - tq[i] * qx + beta * q[i] * qx;
    return y;
  };

  std::vector<double> x(m);
  for (std::size_t i = 0; i < m; ++i) x[i] = 1.0 + 0.3 * std::sin(0.9 * static_cast<double>(i) + 0.2);
  double estimate = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 5000; ++it) {
    x = apply_inverse(x);
    const double nx = std::sqrt(dot(x, x));
    if (!(nx > 0.0) || !std::isfinite(nx)) throw NumericError(ErrorKind::numeric_failure, "mu0 iteration failed");
    for (double& v : x) v /= nx;
    const double rq = dot(x, apply_m(x));
    if (std::abs(rq - estimate) < 1e-13 * std::max(1.0, std::abs(rq))) return rq;
    estimate = rq;
  }
  throw NumericError(ErrorKind::numeric_failure, "mu0 inverse iteration did not converge");
}

double sqrt_form_min_eigenvalue(const LinearizedPair& pair) {
  const SymTridiagonal& tp = pair.plus(0).matrix();
  const SymTridiagonal& tm = pair.minus(0).matrix();
  const auto m = static_cast<Eigen::Index>(tp.size());
  auto dense = [m](const SymTridiagonal& t) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      a(i, i) = t.diag[static_cast<std::size_t>(i)];
      if (i + 1 < m) a(i, i + 1) = a(i + 1, i) = t.off[static_cast<std::size_t>(i)];
    }
    return a;
  };
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense(tm));
  if (es.info() != Eigen::Success) throw NumericError(ErrorKind::numeric_failure, "L- eigensolve failed");
  const Eigen::VectorXd roots = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Eigen::MatrixXd sqrt_lm = es.eigenvectors() * roots.asDiagonal() * es.eigenvectors().transpose();
  Eigen::MatrixXd form = sqrt_lm * dense(tp) * sqrt_lm;

  const std::vector<double> rphi = interior(r_times(pair.plus(0).grid(), pair.profile.samples));
  Eigen::VectorXd q = Eigen::Map<const Eigen::VectorXd>(rphi.data(), m).normalized();
  const Eigen::MatrixXd proj = Eigen::MatrixXd::Identity(m, m) - q * q.transpose();
  const double lift = form.cwiseAbs().rowwise().sum().maxCoeff() + 1.0;
  form = proj * form * proj + lift * q * q.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> fs(form, Eigen::EigenvaluesOnly);
  if (fs.info() != Eigen::Success) throw NumericError(ErrorKind::numeric_failure, "quadratic form eigensolve failed");
  return fs.eigenvalues()(0);
}

InstabilityCriterion instability_criterion(double sigma, int d) {
  if (!(sigma > 0.0)) throw std::invalid_argument("instability_criterion: sigma must be positive");
  if (d < 1) throw std::invalid_argument("instability_criterion: d must be positive");
  InstabilityCriterion out;
  out.mass_scaling_exponent = 2.0 / sigma - static_cast<double>(d);
  if (std::abs(out.mass_scaling_exponent) < 1e-12) out.mass_scaling_exponent = 0.0;
  out.unstable = out.mass_scaling_exponent < 0.0;
  return out;
}

RootSpaceResiduals root_space_residuals(const LinearizedPair& pair, const std::vector<double>& dphi_dalpha,
                                        double r_cut) {
  const RadialGrid& grid = pair.profile.grid;
  const std::size_t n = grid.size();
  const std::size_t last = std::min(grid.index_at_or_below(r_cut), n - 2);
  const std::vector<double> rphi = r_times(grid, pair.profile.samples);
  const std::vector<double> rdphi = r_times(grid, pair.profile.derivative);
  const std::vector<double> rda = r_times(grid, dphi_dalpha);
  auto sup = [&](const std::vector<double>& v, const std::vector<double>* extra, double coef) {
    double s = 0.0;
    for (std::size_t i = 0; i <= last; ++i) s = std::max(s, std::abs(v[i] + (extra ? coef * (*extra)[i] : 0.0)));
    return s;
  };
  RootSpaceResiduals out;
  out.l_minus_phi = sup(apply_operator(pair.minus(0), rphi), nullptr, 0.0);
  if (pair.L_plus.count(1)) out.l_plus_grad_phi = sup(apply_operator(pair.plus(1), rdphi), nullptr, 0.0);
  out.l_plus_dalpha_phi = sup(apply_operator(pair.plus(0), rda), &rphi, 2.0 * pair.profile.alpha);
  return out;
}

}  // namespace solitonlab
