#include "solitonlab/solitons.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

#include "solitonlab/errors.hpp"
#include "solitonlab/fitting.hpp"

namespace solitonlab {

AubinSoliton::AubinSoliton(double a_) : a(a_) {
  if (!(a > 0.0) || !std::isfinite(a)) throw std::invalid_argument("AubinSoliton: a must be positive");
}

double AubinSoliton::phi(double r) const { return std::pow(3.0 * a, 0.25) / std::sqrt(1.0 + a * r * r); }

double AubinSoliton::dphi_da(double r) const {
  const double q = 1.0 + a * r * r;
  return phi(r) * (0.25 / a - 0.5 * r * r / q);
}

double AubinSoliton::dphi_dr(double r) const {
  const double q = 1.0 + a * r * r;
  return -std::pow(3.0 * a, 0.25) * a * r / (q * std::sqrt(q));
}

double AubinSoliton::potential(double r) const {
  const double p = phi(r);
  return -5.0 * p * p * p * p;
}

double AubinSoliton::dilation_mode(double r) const { return 0.5 * phi(r) + r * dphi_dr(r); }

AubinValues aubin_values(double a, const RadialGrid& grid) {
  AubinSoliton sol(a);
  AubinValues out;
  out.phi = sample(grid, [&](double r) { return sol.phi(r); });
  out.dphi_da = sample(grid, [&](double r) { return sol.dphi_da(r); });
  out.potential = sample(grid, [&](double r) { return sol.potential(r); });
  return out;
}

std::vector<double> aubin_potential(double a, const RadialGrid& grid) {
  AubinSoliton sol(a);
  return sample(grid, [&](double r) { return sol.potential(r); });
}

namespace {

enum class ShotOutcome { overshoot, undershoot };

struct Shot {
  ShotOutcome outcome;
  std::vector<double> phi;   // per node until the outcome was decided
  std::vector<double> dphi;
};

struct GroundStateOde {
  double sigma, alpha, d;

  double nonlinear(double u) const { return std::pow(std::abs(u), 2.0 * sigma) * u; }

  std::array<double, 2> rhs(double r, const std::array<double, 2>& y) const {
    return {y[1], -(d - 1.0) / r * y[1] + alpha * alpha * y[0] - nonlinear(y[0])};
  }

  // Fixed-step classical Runge–Kutta, one grid spacing per step, started off
  // the coordinate singularity by the even power series φ₀ + c₂r² + c₄r⁴.
  Shot shoot(double phi0, const RadialGrid& grid) const {
    const double h = grid.spacing();
    const double f0 = alpha * alpha * phi0 - nonlinear(phi0);
    const double df0 = alpha * alpha - (2.0 * sigma + 1.0) * std::pow(phi0, 2.0 * sigma);
    const double c2 = f0 / (2.0 * d);
    const double c4 = df0 * c2 / (4.0 * (d + 2.0));
    std::array<double, 2> y{phi0 + c2 * h * h + c4 * h * h * h * h, 2.0 * c2 * h + 4.0 * c4 * h * h * h};
    Shot shot{ShotOutcome::undershoot, {}, {}};
    shot.phi.reserve(grid.size());
    shot.dphi.reserve(grid.size());
    for (std::size_t i = 0;; ++i) {
      if (y[0] <= 0.0) {
        shot.outcome = ShotOutcome::overshoot;
        return shot;
      }
      if (y[1] > 0.0) {
        shot.outcome = ShotOutcome::undershoot;
        return shot;
      }
      shot.phi.push_back(y[0]);
      shot.dphi.push_back(y[1]);
      if (i + 1 == grid.size()) break;
      const double r = grid[i];
      auto k1 = rhs(r, y);
      auto k2 = rhs(r + 0.5 * h, {y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]});
      auto k3 = rhs(r + 0.5 * h, {y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]});
      auto k4 = rhs(r + h, {y[0] + h * k3[0], y[1] + h * k3[1]});
      y[0] += h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
      y[1] += h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
    }
    // Reached r_max without a decision: the sign of the growing component
    // φ' + αφ decides.
    shot.outcome = (y[1] + alpha * y[0] > 0.0) ? ShotOutcome::undershoot : ShotOutcome::overshoot;
    return shot;
  }
};

}  // namespace

NlsGroundState nls_ground_state(double sigma, double alpha, int d, const RadialGrid& grid,
                                const ShootingOptions& options) {
  if (d != 1 && d != 3) throw std::invalid_argument("nls_ground_state: d must be 1 or 3");
  if (!(sigma > 0.0)) throw std::invalid_argument("nls_ground_state: sigma must be positive");
  if (d == 3 && !(sigma < 2.0)) throw std::invalid_argument("nls_ground_state: need sigma < 2 in d = 3");
  if (!(alpha > 0.0)) throw std::invalid_argument("nls_ground_state: alpha must be positive");

  GroundStateOde ode{sigma, alpha, static_cast<double>(d)};
  const double scale = std::pow(alpha, 1.0 / sigma);

  // Below α^{1/σ} the profile is convex at the origin and undershoots at once.
  double lo = 0.5 * scale;
  double hi = 2.0 * scale;
  if (ode.shoot(lo, grid).outcome != ShotOutcome::undershoot)
    throw NumericError(ErrorKind::no_convergence, "lower shooting bracket does not undershoot");
  int expansions = 0;
  while (ode.shoot(hi, grid).outcome != ShotOutcome::overshoot) {
    lo = hi;
    hi *= 2.0;
    if (++expansions > 60) throw NumericError(ErrorKind::no_convergence, "no overshooting value of phi(0) found");
  }
  while (hi - lo > options.bracket_tol * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (ode.shoot(mid, grid).outcome == ShotOutcome::overshoot)
      hi = mid;
    else
      lo = mid;
  }

  const Shot under = ode.shoot(lo, grid);
  const Shot over = ode.shoot(hi, grid);
  const std::size_t common = std::min(under.phi.size(), over.phi.size());
  std::size_t trusted = 0;
  while (trusted < common) {
    const double a = under.phi[trusted];
    const double b = over.phi[trusted];
    if (std::abs(a - b) > options.agreement_tol * 0.5 * (a + b)) break;
    ++trusted;
  }
  if (trusted < 8) throw NumericError(ErrorKind::no_convergence, "shooting profiles disagree near the origin");

  NlsGroundState gs;
  gs.sigma = sigma;
  gs.alpha = alpha;
  gs.d = d;
  gs.grid = grid;
  gs.center_value = 0.5 * (lo + hi);
  gs.samples.resize(grid.size());
  gs.derivative.resize(grid.size());
  for (std::size_t i = 0; i < trusted; ++i) {
    gs.samples[i] = 0.5 * (under.phi[i] + over.phi[i]);
    gs.derivative[i] = 0.5 * (under.dphi[i] + over.dphi[i]);
  }
  const std::size_t last = trusted - 1;
  const double rc = grid[last];
  const double phic = gs.samples[last];
  const double power = 0.5 * (d - 1.0);
  for (std::size_t i = trusted; i < grid.size(); ++i) {
    const double r = grid[i];
    const double v = phic * std::pow(rc / r, power) * std::exp(-alpha * (r - rc));
    gs.samples[i] = v;
    gs.derivative[i] = v * (-alpha - power / r);
  }
  gs.trusted_radius = rc;

  std::vector<double> reduced(trusted);
  std::vector<double> radii(trusted);
  for (std::size_t i = 0; i < trusted; ++i) {
    radii[i] = grid[i];
    reduced[i] = gs.samples[i] * std::pow(grid[i], power);
  }
  gs.decay_rate = -semilog_slope(radii, reduced, 0.5 * rc, rc);
  return gs;
}

NlsGroundState rescale_ground_state(const NlsGroundState& profile, double alpha_new) {
  if (!(alpha_new > 0.0)) throw std::invalid_argument("rescale_ground_state: alpha_new must be positive");
  const double lambda = alpha_new / profile.alpha;
  const double amp = std::pow(lambda, 1.0 / profile.sigma);
  NlsGroundState out = profile;
  if (lambda == 1.0) return out;
  out.alpha = alpha_new;
  out.grid = RadialGrid(profile.grid.r_max() / lambda, profile.grid.size());
  for (std::size_t i = 0; i < out.samples.size(); ++i) {
    out.samples[i] = amp * profile.samples[i];
    out.derivative[i] = amp * lambda * profile.derivative[i];
  }
  out.center_value = amp * profile.center_value;
  out.decay_rate = lambda * profile.decay_rate;
  out.trusted_radius = profile.trusted_radius / lambda;
  return out;
}

double mass(const NlsGroundState& profile) {
  if (profile.d == 3) return inner_3d(profile.grid, profile.samples, profile.samples);
  return 2.0 * inner(profile.grid, profile.samples, profile.samples);
}

std::vector<double> dphi_dalpha(const NlsGroundState& profile, double rel_step, const ShootingOptions& options) {
  if (!(rel_step > 0.0)) throw std::invalid_argument("dphi_dalpha: step must be positive");
  const double da = rel_step * profile.alpha;
  auto plus = nls_ground_state(profile.sigma, profile.alpha + da, profile.d, profile.grid, options);
  auto minus = nls_ground_state(profile.sigma, profile.alpha - da, profile.d, profile.grid, options);
  std::vector<double> out(profile.samples.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (plus.samples[i] - minus.samples[i]) / (2.0 * da);
  return out;
}

}  // namespace solitonlab
