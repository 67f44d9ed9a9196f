#include "solitonlab_tools/commands.hpp"

#include <cmath>
#include <filesystem>
#include <future>
#include <iostream>
#include <numbers>
#include <stdexcept>

#include "solitonlab/errors.hpp"
#include "solitonlab/fitting.hpp"
#include "solitonlab_tools/io.hpp"

namespace solitonlab::tools {

namespace {

namespace fs = std::filesystem;
using cplx = std::complex<double>;

struct Context {
  const RunConfig& cfg;
  fs::path dir;
  json grids = json::object();
  std::vector<std::string> outputs;
  int exit_code = exit_ok;

  void note_grid(const std::string& name, const RadialGrid& g) { grids[name] = g; }

  void csv(const std::string& name, const std::vector<CsvColumn>& cols) {
    write_csv(dir / name, cols);
    outputs.push_back(name);
  }
};

RadialGrid main_grid(const RunConfig& c) {
  const auto [r_max, n] = resolved_grid(c);
  return RadialGrid(r_max, n);
}

double dt_for(const RunConfig& c, const RadialGrid& g) { return c.dynamics.dt.value_or(c.dynamics.cfl * g.spacing()); }

EvolutionOptions evolution_options(const RunConfig& c) {
  EvolutionOptions o;
  o.output_stride = c.output.stride;
  o.blowup_factor = c.dynamics.blowup_factor;
  o.dispersal_fraction = c.dynamics.dispersal_fraction;
  o.dispersal_window = c.dynamics.dispersal_window;
  o.stationary_fraction = c.dynamics.stationary_fraction;
  return o;
}

// ---------------------------------------------------------------------------

json cmd_spectrum(Context& ctx) {
  const auto& c = ctx.cfg;
  const RadialGrid grid = main_grid(c);
  ctx.note_grid("spectrum", grid);
  const ChannelOperator op(grid, c.physics.ell, aubin_potential(c.physics.a, grid));
  const auto pairs = negative_eigenpairs(op);
  json neg = json::array();
  for (const auto& p : pairs) neg.push_back({{"energy", p.energy}, {"node_count", p.node_count}});
  const ZeroEnergyDiagnosis diag = zero_energy_diagnosis(op);

  json out{{"a", c.physics.a}, {"ell", c.physics.ell}, {"grid", grid}, {"negative_eigenvalues", neg}};
  if (!pairs.empty()) out["k"] = std::sqrt(-pairs.front().energy);
  out["zero_energy"] = diag;
  if (c.physics.ell == 0) {
    const AubinSoliton sol(c.physics.a);
    const auto ref = sample(grid, [&](double r) { return r * sol.dilation_mode(r); });
    const std::size_t count = grid.index_at_or_below(0.5 * grid.r_max()) + 1;
    const ProfileMatch m = match_profile(diag.solution, ref, count);
    out["dilation_match"] = {{"reference", "r*(1/2 + r d/dr)phi"}, {"scale", m.scale},
                             {"sup_rel_error", m.sup_rel_error}, {"r_cut", 0.5 * grid.r_max()}};
  }
  if (c.output.format == "csv")
    ctx.csv("zero_energy_solution.csv", {{"r", &grid.nodes()}, {"w", &diag.solution}});
  return out;
}

json cmd_bs_count(Context& ctx) {
  const auto& c = ctx.cfg;
  const RadialGrid grid = main_grid(c);
  ctx.note_grid("birman_schwinger", grid);
  const auto res = birman_schwinger_count(aubin_potential(c.physics.a, grid), c.physics.ell_max, grid, c.experiment.eps);
  json out = res;
  out["a"] = c.physics.a;
  return out;
}

SigmaStarConfig sigma_config(const RunConfig& c) {
  const auto [r_max, n] = resolved_grid(c);
  SigmaStarConfig s;
  s.alpha = c.physics.alpha;
  s.r_max_times_alpha = r_max * c.physics.alpha;
  s.n = n;
  return s;
}

json cmd_gap_scan(Context& ctx) {
  const auto& c = ctx.cfg;
  const auto s = sigma_config(c);
  ctx.note_grid("linearized", RadialGrid(s.r_max_times_alpha / s.alpha, s.n));
  return gap_report_at(c.physics.sigma, s);
}

json cmd_sigma_star(Context& ctx) {
  const auto& c = ctx.cfg;
  const auto s = sigma_config(c);
  ctx.note_grid("linearized", RadialGrid(s.r_max_times_alpha / s.alpha, s.n));
  json out = sigma_star(c.experiment.lo, c.experiment.hi, c.experiment.tol, s);
  out["bracket"] = {c.experiment.lo, c.experiment.hi};
  out["tol"] = c.experiment.tol;
  out["alpha"] = c.physics.alpha;
  return out;
}

json cmd_nls_ground(Context& ctx) {
  const auto& c = ctx.cfg;
  const RadialGrid grid = main_grid(c);
  ctx.note_grid("profile", grid);
  const auto p = nls_ground_state(c.physics.sigma, c.physics.alpha, c.physics.d, grid);
  json out{{"sigma", p.sigma},
           {"alpha", p.alpha},
           {"d", p.d},
           {"center_value", p.center_value},
           {"decay_rate", p.decay_rate},
           {"trusted_radius", p.trusted_radius},
           {"mass", mass(p)},
           {"mass_scaling_exponent", instability_criterion(p.sigma, p.d).mass_scaling_exponent}};
  if (c.output.format == "csv") ctx.csv("profile.csv", {{"r", &grid.nodes()}, {"phi", &p.samples}, {"dphi", &p.derivative}});
  return out;
}

json cmd_weinstein(Context& ctx) {
  const auto& c = ctx.cfg;
  const RadialGrid grid = main_grid(c);
  ctx.note_grid("linearized", grid);
  const auto p = nls_ground_state(c.physics.sigma, c.physics.alpha, 3, grid);
  const auto pair = assemble_linearized_pair(p, {0});
  const double h_res = weinstein_h(pair, 0.0);
  const double h_scale = weinstein_h0_from_scaling(p);
  const double m0 = mu0(pair);
  // The dense quadratic-form check runs on a coarser copy of the grid.
  const RadialGrid coarse(grid.r_max(), std::min<std::size_t>(grid.size(), 600));
  ctx.note_grid("sqrt_form", coarse);
  const auto pc = nls_ground_state(c.physics.sigma, c.physics.alpha, 3, coarse);
  const double sq = sqrt_form_min_eigenvalue(assemble_linearized_pair(pc, {0}));
  json out{{"sigma", c.physics.sigma},
           {"alpha", c.physics.alpha},
           {"h0_resolvent", h_res},
           {"h0_scaling", h_scale},
           {"h0_relative_difference", std::abs(h_res - h_scale) / std::abs(h_scale)},
           {"mu0", m0},
           {"sqrt_form_min_eigenvalue", sq},
           {"signs_consistent", (m0 < 0.0) == (h_res > 0.0)},
           {"instability", instability_criterion(c.physics.sigma, 3)}};
  if (c.experiment.mu) out["h_at_mu"] = {{"mu", *c.experiment.mu}, {"h", weinstein_h(pair, *c.experiment.mu)}};
  return out;
}

json cmd_jn_demo(Context& ctx) {
  const auto& c = ctx.cfg;
  const auto r = jensen_nenciu_suite(c.experiment.seed, c.experiment.samples);
  return json{{"seed", c.experiment.seed},
              {"instances", r.instances},
              {"max_relative_error", r.max_relative_error},
              {"max_kernel_defect", r.max_kernel_defect},
              {"degenerate_instances", r.degenerate_instances},
              {"iff_violations", r.iff_violations},
              {"min_degenerate_cond_A", r.min_degenerate_cond_A},
              {"min_degenerate_cond_B", r.min_degenerate_cond_B},
              {"max_generic_cond_A", r.max_generic_cond_A},
              {"max_generic_cond_B", r.max_generic_cond_B}};
}

json matrix_summary(const Eigen::MatrixXcd& m) {
  json entries = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    entries.push_back(row);
  }
  return json{{"norm", m.norm()}, {"entries", entries}};
}

json cmd_laurent(Context& ctx) {
  const auto& c = ctx.cfg;
  const std::string& kernel = c.experiment.kernel;
  json out{{"kernel", kernel}};
  if (kernel == "free1" || kernel == "free3") {
    const int d = kernel == "free1" ? 1 : 3;
    const std::vector<double> xs{0.0, 0.4, 1.1, 1.9};
    const std::vector<double> ys = d == 1 ? xs : std::vector<double>{2.5, 3.2, 4.0, 5.3};
    const auto sampler = [&](cplx z) {
      Eigen::MatrixXcd m(xs.size(), ys.size());
      for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = 0; j < ys.size(); ++j)
          m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = free_resolvent_kernel_continued(d, z, xs[i], ys[j]);
      return m;
    };
    const auto fit = laurent_fit(sampler, circle_samples(0.5, 32), 10);
    out["samples"] = {{"shape", "circle"}, {"radius", 0.5}, {"count", 32}};
    out["points_x"] = xs;
    out["points_y"] = ys;
    out["fit_residual"] = fit.fit_residual;
    out["c_minus2"] = matrix_summary(fit.c_minus2());
    out["c_minus1"] = matrix_summary(fit.c_minus1());
    out["c0"] = matrix_summary(fit.c0());
    if (d == 1) {
      const Eigen::MatrixXcd expected = Eigen::MatrixXcd::Constant(4, 4, 1.0 / cplx(0.0, 2.0));
      out["c_minus1_error"] = (fit.c_minus1() - expected).cwiseAbs().maxCoeff();
    }
    return out;
  }

  // Discrete ℓ = 0 resolvent of H(a) on a long box, sampled on z = iρ.
  const RadialGrid grid = main_grid(c);
  ctx.note_grid("resolvent", grid);
  const ChannelOperator op(grid, 0, aubin_potential(c.physics.a, grid));
  std::vector<std::size_t> nodes;
  const std::size_t last = grid.index_at_or_below(10.0);
  const std::size_t step = std::max<std::size_t>(1, last / 30);
  for (std::size_t i = step - 1; i <= last && nodes.size() < 30; i += step) nodes.push_back(i);
  const double h = grid.spacing();
  const auto discrete = discrete_resolvent_sampler(op, nodes);
  const auto sampler = [&](cplx z) -> Eigen::MatrixXcd { return discrete(z) / h; };
  const double rho_min = 20.0 / grid.r_max(), rho_max = 0.2;
  const auto fit = laurent_fit(sampler, imaginary_ray_samples(rho_min, rho_max, 16));
  const AubinSoliton sol(c.physics.a);
  Eigen::VectorXd res(static_cast<Eigen::Index>(nodes.size()));
  for (std::size_t k = 0; k < nodes.size(); ++k) res(static_cast<Eigen::Index>(k)) = grid[nodes[k]] * sol.dphi_da(grid[nodes[k]]);
  const Eigen::MatrixXcd outer = (res * res.transpose()).cast<cplx>();
  const Eigen::MatrixXcd& cm1 = fit.c_minus1();
  const double cosine = std::abs((outer.adjoint() * cm1).trace()) / (outer.norm() * cm1.norm());
  out["samples"] = {{"shape", "imaginary ray"}, {"rho_min", rho_min}, {"rho_max", rho_max}, {"count", 16}};
  out["nodes_r"] = json::array();
  for (std::size_t i : nodes) out["nodes_r"].push_back(grid[i]);
  out["fit_residual"] = fit.fit_residual;
  out["c_minus2_norm"] = fit.c_minus2().norm();
  out["c_minus1_norm"] = cm1.norm();
  out["c_minus1_cosine_with_resonance"] = cosine;
  return out;
}

json cmd_classify_mode(Context& ctx) {
  const auto& c = ctx.cfg;
  const RadialGrid grid = main_grid(c);
  ctx.note_grid("mode", grid);
  const AubinSoliton sol(c.physics.a);
  const bool dilation = c.experiment.mode == "dilation";
  const auto f = dilation ? sample(grid, [&](double r) { return sol.dphi_da(r); })
                          : sample(grid, [&](double r) { return sol.dphi_dr(r); });
  json out = classify_zero_mode(aubin_potential(c.physics.a, grid), f, grid, dilation ? 0 : 1);
  out["mode"] = c.experiment.mode;
  out["ell"] = dilation ? 0 : 1;
  return out;
}

RadialState initial_state(const RunConfig& c, const RadialGrid& grid) {
  RadialState s;
  s.grid = grid;
  s.ut.assign(grid.size(), 0.0);
  const std::string& kind = c.experiment.initial;
  const double amp = c.experiment.amplitude;
  if (kind == "soliton" || kind == "gaussian") {
    // Perturbations of the grid's static soliton.
    s.frame = Frame::perturbation;
    s.u = sample(grid, [&](double r) { return kind == "gaussian" ? amp * std::exp(-r * r) : 0.0; });
    return s;
  }
  s.frame = Frame::full;
  const AubinSoliton sol(1.0);
  s.u = sample(grid, [&](double r) { return kind == "scaled" ? amp * sol.phi(r) : 0.0; });
  return s;
}

json cmd_evolve(Context& ctx) {
  const auto& c = ctx.cfg;
  const RadialGrid grid = main_grid(c);
  ctx.note_grid("dynamics", grid);
  EvolutionOptions o = evolution_options(c);
  o.mode = unstable_mode(grid);
  o.snapshot_times = c.experiment.times;
  const double dt = dt_for(c, grid);
  const Trajectory tr = evolve_nlw(initial_state(c, grid), c.dynamics.t_final, dt, o);

  ctx.csv("trajectory.csv", {{"t", &tr.times},
                             {"sup_norm", &tr.sup_norms},
                             {"local_energy", &tr.local_energy},
                             {"n_plus", &tr.n_plus_series},
                             {"energy", &tr.energy}});
  for (std::size_t i = 0; i < tr.snapshots.size(); ++i) {
    const auto& s = tr.snapshots[i];
    ctx.csv("snapshot_" + std::to_string(i) + ".csv", {{"r", &grid.nodes()}, {"u", &s.u}, {"ut", &s.ut}});
  }
  if (tr.outcome == Outcome::undecided) ctx.exit_code = exit_undecided;
  return json{{"initial", c.experiment.initial},
              {"amplitude", c.experiment.amplitude},
              {"dt", dt},
              {"outcome", to_string(tr.outcome)},
              {"blowup_time", tr.blowup_time},
              {"final_time", tr.times.empty() ? 0.0 : tr.times.back()},
              {"energy_drift", tr.energy_drift},
              {"k", o.mode->k},
              {"snapshot_times", c.experiment.times}};
}

json cmd_stable_h(Context& ctx) {
  const auto& c = ctx.cfg;
  const RadialGrid grid = main_grid(c);
  ctx.note_grid("dynamics", grid);
  StableManifoldOptions o;
  o.bracket_width = c.experiment.bracket_width;
  o.tol = c.experiment.h_tol;
  o.t_horizon = c.experiment.t_horizon;
  o.cfl = dt_for(c, grid) / grid.spacing();
  o.n_plus_exit = c.dynamics.n_plus_exit;
  o.evolution = evolution_options(c);

  // Independent ε runs share only immutable inputs.
  std::vector<std::future<StableManifoldResult>> runs;
  for (double eps : c.experiment.epsilons) {
    runs.push_back(std::async(std::launch::async, [&grid, &o, eps] {
      const auto f1 = sample(grid, [eps](double r) { return eps * std::exp(-r * r); });
      return find_stable_h(grid, f1, std::vector<double>(grid.size(), 0.0), o);
    }));
  }
  json results = json::array();
  std::vector<double> ratios;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const StableManifoldResult r = runs[i].get();
    const double eps = c.experiment.epsilons[i];
    json item = r;
    item["epsilon"] = eps;
    if (eps > 0.0) {
      item["h_over_eps_sq"] = r.h_star / (eps * eps);
      ratios.push_back(std::abs(r.h_star) / (eps * eps));
    }
    results.push_back(item);
    ctx.csv("stable_run_" + std::to_string(i) + ".csv", {{"t", &r.times}, {"sup_norm", &r.sup_norms}});
  }
  json out{{"profile", "epsilon*exp(-r^2)"}, {"runs", results}};
  if (ratios.size() > 1) {
    const auto [mn, mx] = std::minmax_element(ratios.begin(), ratios.end());
    out["ratio_spread"] = *mn > 0.0 ? *mx / *mn : std::numeric_limits<double>::infinity();
  }
  return out;
}

json cmd_sine_split(Context& ctx) {
  const auto& c = ctx.cfg;
  const RadialGrid grid = main_grid(c);
  ctx.note_grid("propagator", grid);
  const ChannelOperator op(grid, 0, aubin_potential(1.0, grid));
  const auto g = eigenpair(op, 0).vector;
  std::vector<double> g_radial(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) g_radial[i] = g[i] / grid[i];
  const AubinSoliton sol(1.0);
  const auto da = sample(grid, [&](double r) { return sol.dphi_da(r); });
  const auto f = sample(grid, [](double r) { return std::exp(-(r - 2.0) * (r - 2.0)); });
  std::vector<double> times = c.experiment.times;
  // The window opens once the outgoing front of the bump has left r <= r_max/4.
  if (times.empty())
    for (double t = 0.25 * grid.r_max() + 5.0; t <= 0.5 * grid.r_max() + 1e-9; t += 1.0) times.push_back(t);
  const SineSplit s = sine_split(op, g_radial, da, f, times);
  ctx.csv("sine_split.csv", {{"t", &s.times}, {"rank_one_coeff", &s.rank_one_coeff}, {"remainder_sup", &s.remainder_sup}});
  const auto [mn, mx] = std::minmax_element(s.rank_one_coeff.begin(), s.rank_one_coeff.end());
  const double mean = 0.5 * (*mn + *mx);
  return json{{"bump", "exp(-(r-2)^2)"},
              {"times", s.times},
              {"rank_one_coeff", s.rank_one_coeff},
              {"remainder_sup", s.remainder_sup},
              {"coeff_relative_variation", (*mx - *mn) / std::abs(mean)},
              {"remainder_decay_exponent", fit_decay(s.times, s.remainder_sup, s.times.front(), s.times.back())}};
}

json cmd_mode_ode(Context& ctx) {
  const auto& c = ctx.cfg;
  double k = 0.0;
  if (c.experiment.k) {
    k = *c.experiment.k;
  } else {
    const RadialGrid grid = main_grid(c);
    ctx.note_grid("spectrum", grid);
    k = std::sqrt(-eigenpair(ChannelOperator(grid, 0, aubin_potential(1.0, grid)), 0).energy);
  }
  const double T = 20.0 / k;
  const std::size_t steps = 200000;
  std::vector<double> t(steps + 1), F(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) {
    t[i] = T * static_cast<double>(i) / steps;
    F[i] = 1.0 / (1.0 + t[i] * t[i]);
  }
  const StabilityValue n0 = stability_initial_condition(t, F, k);
  const auto stable = evolve_unstable_mode(t, F, k, n0.value);
  const auto up = evolve_unstable_mode(t, F, k, n0.value + 1e-6);
  const auto down = evolve_unstable_mode(t, F, k, n0.value - 1e-6);
  double envelope = 0.0;
  for (std::size_t i = 0; i <= steps; ++i) envelope = std::max(envelope, std::abs(stable[i]) * (1.0 + t[i] * t[i]));
  auto first_exceed = [&](const std::vector<double>& n) {
    for (std::size_t i = 0; i <= steps; ++i)
      if (std::abs(n[i]) > 1.0) return t[i];
    return -1.0;
  };
  if (c.output.format == "csv") {
    std::vector<double> ts, ns, us, ds;
    for (std::size_t i = 0; i <= steps; i += 1000) {
      ts.push_back(t[i]);
      ns.push_back(stable[i]);
      us.push_back(up[i]);
      ds.push_back(down[i]);
    }
    ctx.csv("mode_ode.csv", {{"t", &ts}, {"n_plus", &ns}, {"n_plus_up", &us}, {"n_plus_down", &ds}});
  }
  return json{{"k", k},
              {"forcing", "<s>^-2"},
              {"horizon", T},
              {"n_plus_0", n0},
              {"max_n_plus_times_bracket_t_sq", envelope},
              {"offset_plus_exceeds_one_at", first_exceed(up)},
              {"offset_minus_exceeds_one_at", first_exceed(down)}};
}

json dispatch(Context& ctx) {
  switch (ctx.cfg.command) {
    case Command::spectrum: return cmd_spectrum(ctx);
    case Command::bs_count: return cmd_bs_count(ctx);
    case Command::gap_scan: return cmd_gap_scan(ctx);
    case Command::sigma_star: return cmd_sigma_star(ctx);
    case Command::nls_ground: return cmd_nls_ground(ctx);
    case Command::weinstein: return cmd_weinstein(ctx);
    case Command::jn_demo: return cmd_jn_demo(ctx);
    case Command::laurent: return cmd_laurent(ctx);
    case Command::classify_mode: return cmd_classify_mode(ctx);
    case Command::evolve: return cmd_evolve(ctx);
    case Command::stable_h: return cmd_stable_h(ctx);
    case Command::sine_split: return cmd_sine_split(ctx);
    case Command::mode_ode: return cmd_mode_ode(ctx);
  }
  throw std::logic_error("unhandled command");
}

}  // namespace

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    validate(config);
  } catch (const std::invalid_argument& e) {
    err << "invalid configuration: " << e.what() << '\n';
    return exit_invalid_config;
  }

  Context ctx{config, fs::path(config.output.directory), json::object(), {}, exit_ok};
  try {
    fs::create_directories(ctx.dir);
    const std::string name = std::string(to_string(config.command)) + ".json";
    json result = dispatch(ctx);
    write_json(ctx.dir / name, result);
    ctx.outputs.insert(ctx.outputs.begin(), name);
    write_json(ctx.dir / "manifest.json", make_manifest(config, ctx.grids, ctx.outputs));
    out << result.dump(2) << '\n';
    return ctx.exit_code;
  } catch (const std::invalid_argument& e) {
    err << "invalid configuration: " << e.what() << '\n';
    return exit_invalid_config;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << '\n';
    const bool bracket = e.kind() == ErrorKind::invalid_bracket || e.kind() == ErrorKind::bracket_too_small;
    return bracket ? exit_undecided : exit_numeric_failure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_numeric_failure;
  }
}

}  // namespace solitonlab::tools
