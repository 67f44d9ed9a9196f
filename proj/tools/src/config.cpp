#include "solitonlab_tools/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <stdexcept>

#include <CLI11.hpp>

namespace solitonlab::tools {

namespace {

const std::vector<std::pair<Command, std::string>>& command_table() {
  static const std::vector<std::pair<Command, std::string>> table{
      {Command::spectrum, "spectrum"},     {Command::bs_count, "bs-count"},
      {Command::gap_scan, "gap-scan"},     {Command::sigma_star, "sigma-star"},
      {Command::nls_ground, "nls-ground"}, {Command::weinstein, "weinstein"},
      {Command::jn_demo, "jn-demo"},       {Command::laurent, "laurent"},
      {Command::classify_mode, "classify-mode"}, {Command::evolve, "evolve"},
      {Command::stable_h, "stable-h"},     {Command::sine_split, "sine-split"},
      {Command::mode_ode, "mode-ode"},
  };
  return table;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string normalize_key(std::string key) {
  for (char& c : key) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (c == '_') c = '-';
  }
  return key;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

}  // namespace

const char* to_string(Command command) {
  for (const auto& [c, name] : command_table())
    if (c == command) return name.c_str();
  return "unknown";
}

std::optional<Command> command_from_string(const std::string& name) {
  for (const auto& [c, n] : command_table())
    if (n == name) return c;
  return std::nullopt;
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [c, n] : command_table()) out.push_back(n);
    return out;
  }();
  return names;
}

std::map<std::string, std::string> read_key_value_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file " + path);
  std::map<std::string, std::string> out;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(path + ":" + std::to_string(number) + ": expected key = value");
    const std::string key = normalize_key(trim(line.substr(0, eq)));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw std::invalid_argument(path + ":" + std::to_string(number) + ": empty key or value");
    out[key] = value;
  }
  return out;
}

std::string default_output_directory() {
  if (const char* env = std::getenv("SOLITONLAB_OUTPUT_DIR"); env && *env) return env;
  return "results";
}

std::optional<RunConfig> parse_run_config(const std::vector<std::string>& args, std::string* help_text) {
  RunConfig cfg;
  CLI::App app{"Numerical experiments around the quintic wave soliton and NLS ground states", "solitonlab"};
  app.require_subcommand(0, 1);

  double r_max = 0.0, dt = 0.0, mu = 0.0, k = 0.0;
  std::size_t n = 0;
  app.add_option("--config", cfg.config_file, "flat key = value file; flags override it");
  auto* o_rmax = app.add_option("--r-max", r_max, "truncation radius");
  auto* o_n = app.add_option("--n", n, "number of grid nodes");
  app.add_option("--a", cfg.physics.a, "soliton scale a");
  app.add_option("--sigma", cfg.physics.sigma, "NLS nonlinearity exponent");
  app.add_option("--alpha", cfg.physics.alpha, "NLS frequency");
  app.add_option("--d", cfg.physics.d, "dimension (1 or 3)");
  app.add_option("--ell-max", cfg.physics.ell_max, "largest angular momentum channel");
  app.add_option("--ell", cfg.physics.ell, "angular momentum channel");
  auto* o_dt = app.add_option("--dt", dt, "time step");
  app.add_option("--cfl", cfg.dynamics.cfl, "dt / h when --dt is not given");
  app.add_option("--t-final", cfg.dynamics.t_final, "evolution horizon");
  app.add_option("--blowup-factor", cfg.dynamics.blowup_factor, "blow-up when sup|psi| exceeds this times phi(0,1)");
  app.add_option("--dispersal-fraction", cfg.dynamics.dispersal_fraction, "dispersal level relative to phi(0,1)");
  app.add_option("--dispersal-window", cfg.dynamics.dispersal_window, "time the dispersal level must hold");
  app.add_option("--stationary-fraction", cfg.dynamics.stationary_fraction, "stationary level at the horizon");
  app.add_option("--n-plus-exit", cfg.dynamics.n_plus_exit, "|n+| at which a run has left the soliton");
  app.add_option("--support-radius", cfg.dynamics.support_radius, "radius containing the initial perturbation");
  app.add_option("--out", cfg.output.directory, "output directory");
  app.add_option("--stride", cfg.output.stride, "output stride in time steps");
  app.add_option("--format", cfg.output.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--lo", cfg.experiment.lo, "lower bracket end");
  app.add_option("--hi", cfg.experiment.hi, "upper bracket end");
  app.add_option("--tol", cfg.experiment.tol, "bracket tolerance");
  app.add_option("--eps", cfg.experiment.eps, "Birman-Schwinger threshold 1 - eps");
  auto* o_mu = app.add_option("--mu", mu, "spectral parameter for h(mu)");
  app.add_option("--epsilons", cfg.experiment.epsilons, "perturbation sizes")->delimiter(',');
  app.add_option("--bracket-width", cfg.experiment.bracket_width, "initial h bracket [-w, w]");
  app.add_option("--h-tol", cfg.experiment.h_tol, "final h bracket width");
  app.add_option("--t-horizon", cfg.experiment.t_horizon, "near-manifold run length");
  app.add_option("--seed", cfg.experiment.seed, "random seed");
  app.add_option("--samples", cfg.experiment.samples, "number of randomized instances");
  app.add_option("--initial", cfg.experiment.initial, "evolve initial data")
      ->check(CLI::IsMember({"soliton", "zero", "scaled", "gaussian"}));
  app.add_option("--amplitude", cfg.experiment.amplitude, "scale or bump amplitude for evolve");
  app.add_option("--kernel", cfg.experiment.kernel, "laurent kernel")->check(CLI::IsMember({"free1", "free3", "nlw"}));
  app.add_option("--mode", cfg.experiment.mode, "zero mode")->check(CLI::IsMember({"dilation", "gradient"}));
  app.add_option("--times", cfg.experiment.times, "sample times")->delimiter(',');
  auto* o_k = app.add_option("--k", k, "unstable rate (default: computed)");

  std::vector<CLI::App*> subs;
  for (const auto& name : command_names()) subs.push_back(app.add_subcommand(name)->fallthrough());

  // Config file entries become leading tokens unless the flag is given.
  std::string config_path;
  std::set<std::string> given;
  bool command_given = false;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a.rfind("--", 0) == 0) {
      const auto eq = a.find('=');
      const std::string key = a.substr(2, eq == std::string::npos ? std::string::npos : eq - 2);
      given.insert(key);
      if (key == "config") config_path = eq != std::string::npos ? a.substr(eq + 1) : (i + 1 < args.size() ? args[i + 1] : "");
    } else if (command_from_string(a)) {
      command_given = true;
    }
  }
  std::vector<std::string> tokens;
  std::string file_command;
  if (!config_path.empty()) {
    for (const auto& [key, value] : read_key_value_file(config_path)) {
      if (key == "command") {
        file_command = value;
        continue;
      }
      if (key == "config") throw std::invalid_argument("config files cannot include other config files");
      if (given.count(key)) continue;
      tokens.push_back("--" + key);
      tokens.push_back(value);
    }
  }
  tokens.insert(tokens.end(), args.begin(), args.end());
  if (!command_given && !file_command.empty()) {
    if (!command_from_string(file_command)) throw std::invalid_argument("unknown command '" + file_command + "'");
    tokens.push_back(file_command);
  }

  std::reverse(tokens.begin(), tokens.end());
  try {
    app.parse(tokens);
  } catch (const CLI::CallForHelp&) {
    if (help_text) *help_text = app.help();
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    throw std::invalid_argument(e.what());
  }

  const auto chosen = app.get_subcommands();
  if (chosen.empty()) throw std::invalid_argument("no command given; one of: spectrum, bs-count, gap-scan, ...");
  cfg.command = *command_from_string(chosen.front()->get_name());
  if (o_rmax->count()) cfg.grid.r_max = r_max;
  if (o_n->count()) cfg.grid.n = n;
  if (o_dt->count()) cfg.dynamics.dt = dt;
  if (o_mu->count()) cfg.experiment.mu = mu;
  if (o_k->count()) cfg.experiment.k = k;
  if (cfg.output.directory.empty()) cfg.output.directory = default_output_directory();
  return cfg;
}

std::pair<double, std::size_t> resolved_grid(const RunConfig& c) {
  double r_max = 50.0;
  std::size_t n = 4000;
  switch (c.command) {
    case Command::bs_count: r_max = 40.0; n = 800; break;
    case Command::gap_scan:
    case Command::sigma_star:
    case Command::nls_ground:
    case Command::weinstein: r_max = 40.0 / c.physics.alpha; n = 3000; break;
    case Command::sine_split: r_max = 60.0; n = 2400; break;
    case Command::laurent: r_max = 2000.0; n = 20000; break;
    case Command::evolve:
    case Command::stable_h: {
      const double t = c.command == Command::evolve ? c.dynamics.t_final : c.experiment.t_horizon;
      const double h = 0.05;
      r_max = c.dynamics.support_radius + t / c.dynamics.cfl + 2.0;
      n = static_cast<std::size_t>(std::ceil(r_max / h));
      r_max = static_cast<double>(n) * h;
      break;
    }
    default: break;
  }
  return {c.grid.r_max.value_or(r_max), c.grid.n.value_or(n)};
}

void validate(const RunConfig& c) {
  const auto [r_max, n] = resolved_grid(c);
  require(r_max > 0.0 && std::isfinite(r_max), "r-max must be positive");
  require(n >= 16, "n must be at least 16");
  require(c.physics.a > 0.0, "a must be positive");
  require(c.physics.alpha > 0.0, "alpha must be positive");
  require(c.physics.sigma > 0.0, "sigma must be positive");
  require(c.physics.d == 1 || c.physics.d == 3, "d must be 1 or 3");
  require(c.physics.ell_max >= 0 && c.physics.ell_max <= 20, "ell-max must lie in [0, 20]");
  require(c.physics.ell >= 0, "ell must be nonnegative");
  require(c.output.stride >= 1, "stride must be positive");
  require(c.dynamics.cfl > 0.0 && c.dynamics.cfl <= 0.9, "cfl must lie in (0, 0.9]");
  const double h = r_max / static_cast<double>(n);
  if (c.dynamics.dt) require(*c.dynamics.dt > 0.0 && *c.dynamics.dt <= 0.9 * h, "dt must satisfy 0 < dt <= 0.9 h");

  switch (c.command) {
    case Command::bs_count: require(c.experiment.eps >= 0.0 && c.experiment.eps < 1.0, "eps must lie in [0, 1)"); break;
    case Command::gap_scan:
    case Command::weinstein:
      require(c.physics.d == 3, "the linearized pair is assembled in d = 3");
      require(c.physics.sigma < 2.0, "sigma must be below 2 in d = 3");
      break;
    case Command::sigma_star:
      require(c.experiment.lo > 0.0 && c.experiment.lo < c.experiment.hi && c.experiment.hi < 2.0,
              "need 0 < lo < hi < 2");
      require(c.experiment.tol > 0.0, "tol must be positive");
      break;
    case Command::nls_ground:
      if (c.physics.d == 3) require(c.physics.sigma < 2.0, "sigma must be below 2 in d = 3");
      break;
    case Command::jn_demo: require(c.experiment.samples >= 1, "samples must be positive"); break;
    case Command::evolve:
      require(c.dynamics.t_final >= 0.0, "t-final must be nonnegative");
      require(c.dynamics.blowup_factor > 1.0, "blowup-factor must exceed 1");
      break;
    case Command::stable_h:
      require(!c.experiment.epsilons.empty(), "epsilons must not be empty");
      for (double e : c.experiment.epsilons) require(e >= 0.0, "epsilons must be nonnegative");
      require(c.experiment.bracket_width > 0.0 && c.experiment.h_tol > 0.0, "bracket-width and h-tol must be positive");
      require(c.experiment.t_horizon >= 25.0, "t-horizon must cover the decay window [5, 25]");
      break;
    case Command::sine_split:
      for (double t : c.experiment.times) require(t >= 0.0 && t <= 0.5 * r_max, "times must lie in [0, r_max/2]");
      break;
    case Command::mode_ode:
      if (c.experiment.k) require(*c.experiment.k > 0.0, "k must be positive");
      break;
    default: break;
  }
}

}  // namespace solitonlab::tools
