#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "nlw_stepper.hpp"
#include "solitonlab/errors.hpp"
#include "solitonlab/fitting.hpp"
#include "solitonlab/wave_dynamics.hpp"

namespace solitonlab {

namespace {

struct Manifold {
  const RadialGrid& grid;
  const UnstableMode& mode;
  double dt;
  double exit;
  double max_time;
  std::size_t evolutions = 0;
};

std::vector<double> add_g(const std::vector<double>& w, const Manifold& m, double c) {
  std::vector<double> out = w;
  for (std::size_t i = 0; i + 1 < out.size(); ++i) out[i] += c * m.grid[i] * m.mode.g[i];
  return out;
}

// Sign of n₊ once the run leaves the neighbourhood of the soliton, 0 if it
// never does within max_time.
int leave_side(Manifold& m, const std::vector<double>& w, const std::vector<double>& v) {
  ++m.evolutions;
  detail::NlwStepper st(m.grid, Frame::full, m.dt);
  st.set_w(w, v);
  double last = 0.0;
  while (st.time() < m.max_time) {
    st.step();
    const double np = st.n_plus(m.mode);
    if (!std::isfinite(np)) return last >= 0.0 ? 1 : -1;
    last = np;
    if (std::abs(np) > m.exit) return np > 0.0 ? 1 : -1;
  }
  return 0;
}

struct Bracket {
  double lo, hi;
  int side_lo, side_hi;
};

Bracket bisect(Manifold& m, const std::vector<double>& w, const std::vector<double>& v, double lo, double hi,
               double tol) {
  Bracket b{lo, hi, leave_side(m, add_g(w, m, lo), v), leave_side(m, add_g(w, m, hi), v)};
  if (b.side_lo == 0 || b.side_hi == 0 || b.side_lo == b.side_hi)
    throw NumericError(ErrorKind::bracket_too_small, "both ends of the g-coefficient bracket leave on the same side");
  for (int it = 0; it < 200 && b.hi - b.lo > tol; ++it) {
    const double mid = 0.5 * (b.lo + b.hi);
    if (mid <= b.lo || mid >= b.hi) break;
    const int s = leave_side(m, add_g(w, m, mid), v);
    if (s == 0) break;
    if (s == b.side_lo) b.lo = mid;
    else b.hi = mid;
  }
  return b;
}

// Re-bisection at a checkpoint: grow a symmetric bracket until it separates.
Bracket rebisect(Manifold& m, const std::vector<double>& w, const std::vector<double>& v) {
  for (double delta = 1e-10; delta <= 1e-2; delta *= 10.0) {
    const int a = leave_side(m, add_g(w, m, -delta), v);
    const int b = leave_side(m, add_g(w, m, delta), v);
    if (a != 0 && b != 0 && a != b) return bisect(m, w, v, -delta, delta, 1e-15);
  }
  throw NumericError(ErrorKind::no_convergence, "could not re-bracket the manifold at a checkpoint");
}

}  // namespace

StableManifoldResult find_stable_h(const RadialGrid& grid, const std::vector<double>& f1,
                                   const std::vector<double>& f2, const StableManifoldOptions& options) {
  const std::size_t n = grid.size();
  if (f1.size() != n || f2.size() != n) throw std::invalid_argument("f1 and f2 must be sampled on the grid");
  if (!(options.bracket_width > 0.0) || !(options.tol > 0.0)) throw std::invalid_argument("bracket and tol must be positive");
  if (!(options.t_horizon >= options.decay_t1) || !(options.decay_t1 > options.decay_t0) || !(options.decay_t0 > 0.0))
    throw std::invalid_argument("decay window must lie inside the horizon");
  if (!(options.checkpoint_interval > 0.0)) throw std::invalid_argument("checkpoint interval must be positive");

  const UnstableMode mode = unstable_mode(grid);
  const double dt = options.cfl * grid.spacing();
  Manifold m{grid, mode, dt, options.n_plus_exit, options.t_horizon + options.label_horizon};

  // Projection onto Σ₀: ⟨k f₁ + f₂, g⟩ = 0.
  const double c = inner_3d(grid, f1, mode.g) + inner_3d(grid, f2, mode.g) / mode.k;
  std::vector<double> w0(n), v0(n);
  const std::vector<double> phi_h = discrete_soliton(grid);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = grid[i];
    w0[i] = r * (phi_h[i] + f1[i] - c * mode.g[i]);
    v0[i] = r * f2[i];
  }
  w0.back() = grid.r_max() * phi_h.back();
  v0.back() = 0.0;

  StableManifoldResult res;
  const Bracket b = bisect(m, w0, v0, -options.bracket_width, options.bracket_width, options.tol);
  res.bracket_final = {b.lo, b.hi};
  res.h_star = 0.5 * (b.lo + b.hi);
  res.below_exit_sign = b.side_lo;
  res.above_exit_sign = b.side_hi;

  // Stabilized near-manifold run.
  detail::NlwStepper st(grid, Frame::full, dt);
  st.set_w(add_g(w0, m, res.h_star), v0);
  const std::size_t stride = std::max<std::size_t>(1, options.evolution.output_stride);
  auto record = [&] {
    double sup = 0.0;
    for (std::size_t i = 0; i < n; ++i) sup = std::max(sup, std::abs(st.u_at(i)));
    res.times.push_back(st.time());
    res.sup_norms.push_back(sup);
  };
  record();
  double next_checkpoint = options.checkpoint_interval;
  std::size_t s = 0;
  while (st.time() < options.t_horizon - 0.5 * dt) {
    st.step();
    ++s;
    if (std::abs(st.n_plus(mode)) > options.n_plus_exit)
      throw NumericError(ErrorKind::no_convergence, "stabilized run left the manifold at t = " + std::to_string(st.time()));
    if (s % stride == 0) record();
    if (st.time() >= next_checkpoint - 0.5 * dt && st.time() < options.t_horizon - 0.5 * dt) {
      const double t = st.time();
      const Bracket cb = rebisect(m, st.w(), st.v());
      const double corr = 0.5 * (cb.lo + cb.hi);
      res.corrections.push_back(corr);
      st.set_w(add_g(st.w(), m, corr), st.v());
      st.set_time(t);
      next_checkpoint += options.checkpoint_interval;
    }
  }
  res.decay_fit = fit_decay(res.times, res.sup_norms, options.decay_t0, options.decay_t1);

  // Outcome labels from the two final bracket ends.
  EvolutionOptions eo = options.evolution;
  eo.mode.reset();
  eo.n_plus_exit = 0.0;
  auto label = [&](double h) {
    ++m.evolutions;
    RadialState s0;
    s0.grid = grid;
    s0.frame = Frame::full;
    const auto w = add_g(w0, m, h);
    s0.u.resize(n);
    s0.ut.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      s0.u[i] = w[i] / grid[i];
      s0.ut[i] = v0[i] / grid[i];
    }
    return evolve_nlw(s0, options.label_horizon, dt, eo).outcome;
  };
  res.below_outcome = label(b.lo);
  res.above_outcome = label(b.hi);
  res.evolutions = m.evolutions;
  if (res.below_outcome == res.above_outcome)
    throw NumericError(ErrorKind::bracket_too_small,
                       std::string("both sides of the manifold end as ") + to_string(res.below_outcome));
  return res;
}

}  // namespace solitonlab
