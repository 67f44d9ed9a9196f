#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace solitonlab::tools {

enum class Command {
  spectrum,
  bs_count,
  gap_scan,
  sigma_star,
  nls_ground,
  weinstein,
  jn_demo,
  laurent,
  classify_mode,
  evolve,
  stable_h,
  sine_split,
  mode_ode,
};

const char* to_string(Command command);
std::optional<Command> command_from_string(const std::string& name);
const std::vector<std::string>& command_names();

struct GridConfig {
  std::optional<double> r_max;   // per-command default when unset
  std::optional<std::size_t> n;
};

struct PhysicsConfig {
  double a = 1.0;
  double sigma = 1.0;
  double alpha = 1.0;
  int d = 3;
  int ell_max = 3;
  int ell = 0;
};

struct DynamicsConfig {
  std::optional<double> dt;       // default cfl·h
  double cfl = 0.8;
  double t_final = 20.0;
  double blowup_factor = 1e3;
  double dispersal_fraction = 0.1;
  double dispersal_window = 5.0;
  double stationary_fraction = 0.1;
  double n_plus_exit = 0.02;
  double support_radius = 6.0;
};

struct OutputConfig {
  std::string directory;          // default from SOLITONLAB_OUTPUT_DIR, else "results"
  std::size_t stride = 5;
  std::string format = "json";    // json | csv (csv adds series files)
};

struct ExperimentConfig {
  double lo = 0.8;
  double hi = 1.0;
  double tol = 1e-3;
  double eps = 1e-3;
  std::optional<double> mu;
  std::vector<double> epsilons{0.01, 0.02, 0.04};
  double bracket_width = 0.05;
  double h_tol = 1e-12;
  double t_horizon = 25.0;
  std::uint64_t seed = 1;
  int samples = 200;
  std::string initial = "soliton"; // evolve: soliton | zero | scaled | gaussian
  double amplitude = 1.0;
  std::string kernel = "free1";    // laurent: free1 | free3 | nlw
  std::string mode = "dilation";   // classify-mode: dilation | gradient
  std::vector<double> times;
  std::optional<double> k;
};

struct RunConfig {
  Command command = Command::spectrum;
  GridConfig grid;
  PhysicsConfig physics;
  DynamicsConfig dynamics;
  OutputConfig output;
  ExperimentConfig experiment;
  std::string config_file;
};

/// Flat `key = value` file; '#' starts a comment. Keys are normalized to
/// lower case with '_' replaced by '-'. Throws std::invalid_argument with the
/// line number on malformed lines.
std::map<std::string, std::string> read_key_value_file(const std::string& path);

/// Parses `args` (without the program name). A `--config FILE` option is read
/// first and its entries act as defaults that flags override. Throws
/// std::invalid_argument on unknown keys or malformed values; `help_text`
/// receives the usage text when --help is given (returns std::nullopt then).
std::optional<RunConfig> parse_run_config(const std::vector<std::string>& args, std::string* help_text = nullptr);

/// Checks the numeric fields against the preconditions of the selected
/// command. Throws std::invalid_argument.
void validate(const RunConfig& config);

/// Grid (r_max, n) after per-command defaults.
std::pair<double, std::size_t> resolved_grid(const RunConfig& config);

std::string default_output_directory();

}  // namespace solitonlab::tools
