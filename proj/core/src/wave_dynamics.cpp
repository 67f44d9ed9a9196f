#include "solitonlab/wave_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "nlw_stepper.hpp"
#include "solitonlab/errors.hpp"
#include "solitonlab/fitting.hpp"
#include "solitonlab/halfline_spectral.hpp"
#include "solitonlab/solitons.hpp"

namespace solitonlab {

double nonlinearity_N(double u, double phi) {
  const double u2 = u * u, p2 = phi * phi;
  return u2 * (10.0 * p2 * phi + u * (10.0 * p2 + u * (5.0 * phi + u)));
}

const char* to_string(Frame frame) { return frame == Frame::full ? "full" : "perturbation"; }

const char* to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::stationary: return "stationary";
    case Outcome::dispersal: return "dispersal";
    case Outcome::blowup: return "blowup";
    case Outcome::undecided: return "undecided";
  }
  return "unknown";
}

namespace {

double fifth(double x) {
  const double x2 = x * x;
  return x2 * x2 * x;
}

RadialState shifted_frame(const RadialState& s, double sign, Frame target) {
  RadialState out = s;
  out.frame = target;
  const std::vector<double> phi_h = discrete_soliton(s.grid);
  for (std::size_t i = 0; i < s.grid.size(); ++i) out.u[i] += sign * phi_h[i];
  return out;
}

}  // namespace

RadialState to_full(const RadialState& state) {
  return state.frame == Frame::full ? state : shifted_frame(state, 1.0, Frame::full);
}

RadialState to_perturbation(const RadialState& state) {
  return state.frame == Frame::perturbation ? state : shifted_frame(state, -1.0, Frame::perturbation);
}

std::vector<double> discrete_soliton(const RadialGrid& grid) {
  const std::size_t n = grid.size();
  const double h2 = grid.spacing() * grid.spacing();
  std::vector<double> W(n);
  W[0] = grid[0] * AubinSoliton(1.0).phi(grid[0]);
  double prev = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double q = W[i] / grid[i];
    const double next = 2.0 * W[i] - prev - h2 * grid[i] * fifth(q);
    prev = W[i];
    W[i + 1] = next;
  }
  for (std::size_t i = 0; i < n; ++i) W[i] /= grid[i];
  return W;
}

UnstableMode unstable_mode(const RadialGrid& grid) {
  std::vector<double> potential = discrete_soliton(grid);
  for (double& p : potential) p = -5.0 * p * p * p * p;
  const ChannelOperator op(grid, 0, std::move(potential));
  const EigenPair ep = eigenpair(op, 0);
  if (!(ep.energy < 0.0)) throw NumericError(ErrorKind::numeric_failure, "H(1) has no negative eigenvalue");
  UnstableMode m;
  m.k = std::sqrt(-ep.energy);
  m.g.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) m.g[i] = ep.vector[i] / grid[i];
  const double norm = std::sqrt(inner_3d(grid, m.g, m.g));
  for (double& x : m.g) x /= norm;
  return m;
}

// ---------------------------------------------------------------------------

namespace detail {

NlwStepper::NlwStepper(const RadialGrid& grid, Frame frame, double dt)
    : grid_(grid), frame_(frame), dt_(dt), h_(grid.spacing()) {
  if (!(dt > 0.0) || dt > 0.9 * h_ * (1.0 + 1e-12))
    throw std::invalid_argument("time step must satisfy 0 < dt <= 0.9 h");
  const std::size_t n = grid.size();
  phi_h_ = discrete_soliton(grid);
  W_h_.resize(n);
  for (std::size_t i = 0; i < n; ++i) W_h_[i] = grid[i] * phi_h_[i];
  w_.assign(n, 0.0);
  v_.assign(n, 0.0);
  a_.assign(n, 0.0);
}

void NlwStepper::set_state(const std::vector<double>& u, const std::vector<double>& ut) {
  const std::size_t n = grid_.size();
  if (u.size() != n || ut.size() != n) throw std::invalid_argument("state must be sampled on the grid");
  std::vector<double> w(n), v(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = grid_[i] * u[i];
    v[i] = grid_[i] * ut[i];
  }
  set_w(std::move(w), std::move(v));
}

void NlwStepper::set_w(std::vector<double> w, std::vector<double> v) {
  w_ = std::move(w);
  v_ = std::move(v);
  v_.back() = 0.0;
  accelerate();
}

void NlwStepper::accelerate() {
  const std::size_t n = grid_.size();
  const double ih2 = 1.0 / (h_ * h_);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double left = i == 0 ? 0.0 : w_[i - 1];
    const double lap = (w_[i + 1] - 2.0 * w_[i] + left) * ih2;
    const double r = grid_[i];
    const double q = w_[i] / r;
    if (frame_ == Frame::full) {
      a_[i] = lap + r * fifth(q);
    } else {
      // Exact in the static solution: u = 0 gives zero acceleration.
      const double p = phi_h_[i], p2 = p * p;
      a_[i] = lap + r * (5.0 * p2 * p2 * q + nonlinearity_N(q, p));
    }
  }
  a_[n - 1] = 0.0;
}

void NlwStepper::step() {
  const std::size_t n = grid_.size();
  const double half = 0.5 * dt_;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    v_[i] += half * a_[i];
    w_[i] += dt_ * v_[i];
  }
  accelerate();
  for (std::size_t i = 0; i + 1 < n; ++i) v_[i] += half * a_[i];
  time_ += dt_;
}

double NlwStepper::full_w(std::size_t i) const { return frame_ == Frame::full ? w_[i] : w_[i] + W_h_[i]; }

double NlwStepper::psi_at(std::size_t i) const { return full_w(i) / grid_[i]; }

double NlwStepper::u_at(std::size_t i) const { return (full_w(i) - W_h_[i]) / grid_[i]; }

double NlwStepper::kinetic_gradient() const {
  const std::size_t n = grid_.size();
  double e = 0.0, prev = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double wi = full_w(i);
    const double d = (wi - prev) / h_;
    e += 0.5 * h_ * d * d;
    if (i + 1 < n) e += 0.5 * h_ * v_[i] * v_[i];
    prev = wi;
  }
  return e;
}

double NlwStepper::energy() const {
  const std::size_t n = grid_.size();
  double e = kinetic_gradient();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double wi = full_w(i);
    const double q = wi / grid_[i];
    const double q2 = q * q;
    e -= h_ * grid_[i] * grid_[i] * q2 * q2 * q2 / 6.0;
  }
  return e;
}

double NlwStepper::n_plus(const UnstableMode& mode) const {
  const auto& wt = grid_.weights();
  double pu = 0.0, pv = 0.0;
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    const double r = grid_[i];
    const double m = wt[i] * r * mode.g[i];  // r² · (w/r) = r · w
    pu += m * (full_w(i) - W_h_[i]);
    pv += m * v_[i];
  }
  const double four_pi = 4.0 * std::numbers::pi;
  return 0.5 * four_pi * (pu + pv / mode.k);
}

RadialState NlwStepper::state() const {
  RadialState s;
  s.grid = grid_;
  s.frame = frame_;
  s.u.resize(grid_.size());
  s.ut.resize(grid_.size());
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    s.u[i] = w_[i] / grid_[i];
    s.ut[i] = v_[i] / grid_[i];
  }
  return s;
}

}  // namespace detail

// ---------------------------------------------------------------------------

Trajectory evolve_nlw(const RadialState& initial, double t_final, double dt, const EvolutionOptions& options) {
  if (!(t_final >= 0.0)) throw std::invalid_argument("t_final must be nonnegative");
  if (options.output_stride == 0) throw std::invalid_argument("output stride must be positive");
  const RadialGrid& grid = initial.grid;
  if (options.mode && options.mode->g.size() != grid.size())
    throw std::invalid_argument("unstable mode must be sampled on the state's grid");
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (!std::isfinite(initial.u[i]) || !std::isfinite(initial.ut[i]))
      throw std::invalid_argument("initial state has non-finite entries");

  detail::NlwStepper st(grid, initial.frame, dt);
  st.set_state(initial.u, initial.ut);

  const double phi0 = AubinSoliton(1.0).phi(0.0);
  const std::size_t n = grid.size();
  const std::size_t local_end = grid.index_at_or_below(options.local_radius);
  const auto steps = static_cast<std::size_t>(std::ceil(t_final / dt - 1e-9));

  Trajectory tr;
  tr.frame = initial.frame;
  const double e0 = st.energy();
  double scale = st.kinetic_gradient();
  if (!(scale > 0.0)) scale = 1.0;
  double dispersal_since = -1.0;
  std::size_t next_snapshot = 0;
  std::vector<double> snaps = options.snapshot_times;
  std::sort(snaps.begin(), snaps.end());

  auto record = [&] {
    double sup = 0.0, local = 0.0;
    for (std::size_t i = 0; i < n; ++i) sup = std::max(sup, std::abs(st.u_at(i)));
    const double h = grid.spacing();
    double prev = 0.0;
    for (std::size_t i = 0; i <= local_end; ++i) {
      const double U = grid[i] * st.u_at(i);
      const double d = (U - prev) / h;
      local += 0.5 * h * (st.v()[i] * st.v()[i] + d * d);
      prev = U;
    }
    tr.times.push_back(st.time());
    tr.sup_norms.push_back(sup);
    tr.local_energy.push_back(local);
    tr.energy.push_back(st.energy());
    tr.energy_drift = std::max(tr.energy_drift, std::abs(tr.energy.back() - e0) / scale);
    if (options.mode) tr.n_plus_series.push_back(st.n_plus(*options.mode));
  };

  record();
  bool stopped = false;
  for (std::size_t s = 1; s <= steps && !stopped; ++s) {
    st.step();

    double sup_psi = 0.0, sup_local = 0.0;
    bool finite = true;
    for (std::size_t i = 0; i < n; ++i) {
      const double p = st.psi_at(i);
      if (!std::isfinite(p)) { finite = false; break; }
      sup_psi = std::max(sup_psi, std::abs(p));
      if (i <= local_end) sup_local = std::max(sup_local, std::abs(p));
    }
    if (!finite || sup_psi > options.blowup_factor * phi0) {
      tr.outcome = Outcome::blowup;
      tr.blowup_time = st.time();
      stopped = true;
      break;
    }

    while (next_snapshot < snaps.size() && st.time() >= snaps[next_snapshot] - 0.5 * dt) {
      tr.snapshots.push_back(st.state());
      ++next_snapshot;
    }

    const bool at_stride = s % options.output_stride == 0 || s == steps;
    if (at_stride) record();

    if (sup_local < options.dispersal_fraction * phi0) {
      if (dispersal_since < 0.0) dispersal_since = st.time();
      if (st.time() - dispersal_since >= options.dispersal_window - 1e-12) {
        tr.outcome = Outcome::dispersal;
        stopped = true;
      }
    } else {
      dispersal_since = -1.0;
    }

    if (!stopped && options.mode && options.n_plus_exit > 0.0) {
      const double np = st.n_plus(*options.mode);
      if (std::abs(np) > options.n_plus_exit) {
        tr.exit_sign = np > 0.0 ? 1 : -1;
        stopped = true;
      }
    }
    if (stopped && !at_stride) record();
  }

  if (!stopped) {
    double dev = 0.0;
    for (std::size_t i = 0; i <= local_end; ++i) dev = std::max(dev, std::abs(st.u_at(i)));
    tr.outcome = dev <= options.stationary_fraction * phi0 ? Outcome::stationary : Outcome::undecided;
  }
  tr.final_state = st.state();
  return tr;
}

// ---------------------------------------------------------------------------

ModeDecomposition mode_decompose(const RadialState& state, const std::vector<double>& g, double k) {
  if (!(k > 0.0)) throw std::invalid_argument("k must be positive");
  const RadialState s = to_perturbation(state);
  const RadialGrid& grid = s.grid;
  if (g.size() != grid.size()) throw std::invalid_argument("g must be sampled on the state's grid");
  if (std::abs(inner_3d(grid, g, g) - 1.0) > 1e-8) throw std::invalid_argument("g must be unit normalized");

  ModeDecomposition m;
  m.k = k;
  m.g = g;
  const double pu = inner_3d(grid, s.u, g);
  const double pv = inner_3d(grid, s.ut, g);
  m.n_plus = 0.5 * (pu + pv / k);
  m.n_minus = 0.5 * (pu - pv / k);
  m.u_tilde = s;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    m.u_tilde.u[i] -= pu * g[i];
    m.u_tilde.ut[i] -= pv * g[i];
  }
  return m;
}

RadialState reconstruct(const ModeDecomposition& m) {
  RadialState s = m.u_tilde;
  const double a = m.n_plus + m.n_minus;
  const double b = m.k * (m.n_plus - m.n_minus);
  for (std::size_t i = 0; i < s.u.size(); ++i) {
    s.u[i] += a * m.g[i];
    s.ut[i] += b * m.g[i];
  }
  return s;
}

// ---------------------------------------------------------------------------

namespace {

void check_forcing(const std::vector<double>& t, const std::vector<double>& F, double k) {
  if (!(k > 0.0)) throw std::invalid_argument("k must be positive");
  if (t.size() != F.size() || t.size() < 2) throw std::invalid_argument("need at least two forcing samples");
  for (std::size_t i = 1; i < t.size(); ++i)
    if (!(t[i] > t[i - 1])) throw std::invalid_argument("forcing times must increase");
}

// (1 - e^{-x}(1 + x)) and (e^x - 1 - x), accurate for small x.
double decaying_moment(double x) {
  if (x < 1e-3) return x * x * (0.5 - x / 3.0 + x * x / 8.0);
  return -std::expm1(-x) - x * std::exp(-x);
}

double growing_moment(double x) {
  if (x < 1e-3) return x * x * (0.5 + x / 6.0 + x * x / 24.0);
  return std::expm1(x) - x;
}

}  // namespace

StabilityValue stability_initial_condition(const std::vector<double>& times, const std::vector<double>& F_plus,
                                           double k) {
  check_forcing(times, F_plus, k);
  if (times.front() != 0.0) throw std::invalid_argument("forcing must start at t = 0");
  double sum = 0.0;
  for (std::size_t j = 0; j + 1 < times.size(); ++j) {
    const double dtj = times[j + 1] - times[j];
    const double x = k * dtj;
    const double slope = (F_plus[j + 1] - F_plus[j]) / dtj;
    sum += std::exp(-k * times[j]) *
           (F_plus[j] * (-std::expm1(-x)) / k + slope * decaying_moment(x) / (k * k));
  }
  StabilityValue out;
  out.value = -sum;
  const double T = times.back();
  out.tail_bound = std::abs(F_plus.back()) * std::exp(-k * T) / k;
  out.short_horizon = k * T < 20.0;
  if (out.short_horizon) out.warning = "horizon too short: k*T = " + std::to_string(k * T) + " < 20";
  return out;
}

std::vector<double> evolve_unstable_mode(const std::vector<double>& times, const std::vector<double>& F_plus,
                                         double k, double n_plus_0) {
  check_forcing(times, F_plus, k);
  std::vector<double> n(times.size());
  n[0] = n_plus_0;
  for (std::size_t j = 0; j + 1 < times.size(); ++j) {
    const double dtj = times[j + 1] - times[j];
    const double x = k * dtj;
    const double slope = (F_plus[j + 1] - F_plus[j]) / dtj;
    n[j + 1] = std::exp(x) * n[j] + F_plus[j] * std::expm1(x) / k + slope * growing_moment(x) / (k * k);
  }
  return n;
}

// ---------------------------------------------------------------------------

LinearPropagator::LinearPropagator(const ChannelOperator& op)
    : n_nodes_(op.grid().size()), eig_(full_eigensystem(op.matrix())) {}

std::vector<double> LinearPropagator::propagate(const std::vector<double>& f, const std::vector<double>& g0,
                                                double t, bool drop_unstable) const {
  if (f.size() != n_nodes_ || g0.size() != n_nodes_) throw std::invalid_argument("data must be per node");
  const auto m = static_cast<Eigen::Index>(n_nodes_ - 1);
  const Eigen::Map<const Eigen::VectorXd> fi(f.data(), m), gi(g0.data(), m);
  const Eigen::VectorXd cf = eig_.vectors.transpose() * fi;
  const Eigen::VectorXd cg = eig_.vectors.transpose() * gi;
  Eigen::VectorXd coeff(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const double lam = eig_.values(j);
    double c, s;
    if (lam > 1e-10) {
      const double q = std::sqrt(lam);
      c = std::cos(t * q);
      s = std::sin(t * q) / q;
    } else if (lam < -1e-10) {
      if (drop_unstable) {
        coeff(j) = 0.0;
        continue;
      }
      const double q = std::sqrt(-lam);
      c = std::cosh(t * q);
      s = std::sinh(t * q) / q;
    } else {
      c = 1.0;
      s = t;
    }
    coeff(j) = c * cf(j) + s * cg(j);
  }
  const Eigen::VectorXd out = eig_.vectors * coeff;
  std::vector<double> res(n_nodes_, 0.0);
  for (Eigen::Index j = 0; j < m; ++j) res[static_cast<std::size_t>(j)] = out(j);
  if (t == 0.0) {
    std::copy(f.begin(), f.end() - 1, res.begin());
  }
  return res;
}

std::vector<double> linear_propagate(const ChannelOperator& op, const std::vector<double>& f,
                                     const std::vector<double>& g0, double t) {
  return LinearPropagator(op).propagate(f, g0, t);
}

SineSplit sine_split(const ChannelOperator& op, const std::vector<double>& g, const std::vector<double>& dphi_da,
                     const std::vector<double>& f, const std::vector<double>& times) {
  const RadialGrid& grid = op.grid();
  const std::size_t n = grid.size();
  if (g.size() != n || dphi_da.size() != n || f.size() != n) throw std::invalid_argument("inputs must be per node");
  for (double t : times)
    if (t < 0.0 || t > 0.5 * grid.r_max()) throw std::invalid_argument("times must lie in [0, r_max/2]");

  std::vector<double> G(n), D(n), F(n);
  for (std::size_t i = 0; i < n; ++i) {
    G[i] = grid[i] * g[i];
    D[i] = grid[i] * dphi_da[i];
    F[i] = grid[i] * f[i];
  }
  G.back() = 0.0;
  F.back() = 0.0;
  const double c = inner(grid, F, G) / inner(grid, G, G);
  for (std::size_t i = 0; i < n; ++i) F[i] -= c * G[i];

  const LinearPropagator prop(op);
  const std::vector<double> zero(n, 0.0);
  const std::size_t last = grid.index_at_or_below(0.25 * grid.r_max());
  const auto& wt = grid.weights();
  double dd = 0.0;
  for (std::size_t i = 0; i <= last; ++i) dd += wt[i] * D[i] * D[i];

  SineSplit out;
  for (double t : times) {
    const auto w = prop.propagate(zero, F, t, true);
    double wd = 0.0;
    for (std::size_t i = 0; i <= last; ++i) wd += wt[i] * w[i] * D[i];
    const double coeff = wd / dd;
    double rem = 0.0;
    for (std::size_t i = 0; i <= last; ++i) rem = std::max(rem, std::abs(w[i] - coeff * D[i]) / grid[i]);
    out.times.push_back(t);
    out.rank_one_coeff.push_back(coeff);
    out.remainder_sup.push_back(rem);
  }
  return out;
}

double fit_decay(const std::vector<double>& t, const std::vector<double>& value, double t0, double t1) {
  if (t.size() != value.size()) throw std::invalid_argument("series lengths differ");
  return loglog_slope(t, value, t0, t1);
}

RadialGrid dynamics_grid(double support_radius, double t_final, double h, double cfl) {
  if (!(support_radius > 0.0) || !(t_final >= 0.0) || !(h > 0.0) || !(cfl > 0.0) || cfl > 0.9)
    throw std::invalid_argument("invalid dynamics grid parameters");
  // Information moves at most one node per step, i.e. at speed 1/cfl.
  const double r_max = support_radius + t_final / cfl + 2.0;
  const auto n = static_cast<std::size_t>(std::ceil(r_max / h));
  return RadialGrid(static_cast<double>(n) * h, n);
}

}  // namespace solitonlab
