#include "solitonlab_tools/io.hpp"

#include <charconv>
#include <chrono>
#include <ctime>
#include <fstream>
#include <stdexcept>

#include <Eigen/Core>

#include "solitonlab/version.hpp"

namespace solitonlab {

void to_json(json& j, const RadialGrid& grid) {
  j = json{{"r_max", grid.r_max()}, {"n", grid.size()}, {"h", grid.spacing()}};
}

void to_json(json& j, const ZeroEnergyDiagnosis& d) {
  j = json{{"kind", to_string(d.kind)},
           {"tail_slope", d.tail_slope},
           {"tail_const", d.tail_const},
           {"tail_decay", d.tail_decay},
           {"fit_residual", d.fit_residual},
           {"threshold", d.threshold},
           {"interior_sign_changes", d.interior_sign_changes},
           {"v_integral", d.v_integral}};
}

void to_json(json& j, const BirmanSchwingerResult& r) {
  json channels = json::array();
  for (const auto& c : r.channels)
    channels.push_back({{"ell", c.ell}, {"count", c.count}, {"top_eigenvalues", c.top_eigenvalues}});
  j = json{{"channels", channels}, {"total_with_multiplicity", r.total_with_multiplicity},
           {"threshold_eps", r.threshold_eps}};
}

void to_json(json& j, const GapChannel& c) {
  j = json{{"op", c.op},
           {"ell", c.ell},
           {"eigenvalues", c.eigenvalues},
           {"edge_resonance", c.edge_resonance},
           {"beyond_box", c.beyond_box},
           {"edge_kind", c.edge_kind},
           {"edge_tail_slope", c.edge_tail_slope}};
}

void to_json(json& j, const GapReport& r) {
  j = json{{"sigma", r.sigma}, {"alpha_sq", r.alpha_sq}, {"channels", r.channels}, {"gap_holds", r.gap_holds}};
}

void to_json(json& j, const SigmaStarResult& r) {
  j = json{{"estimate", r.estimate}, {"lo", r.lo}, {"hi", r.hi}, {"evaluations", r.evaluations}};
}

void to_json(json& j, const InstabilityCriterion& c) {
  j = json{{"unstable", c.unstable}, {"mass_scaling_exponent", c.mass_scaling_exponent}};
}

void to_json(json& j, const ZeroModeClassification& c) {
  j = json{{"kind", to_string(c.kind)},
           {"v_integral", c.v_integral},
           {"v_moment_scale", c.v_moment_scale},
           {"tail_exponent", c.tail_exponent},
           {"residual", c.residual}};
}

void to_json(json& j, const StableManifoldResult& r) {
  j = json{{"h_star", r.h_star},
           {"bracket_final", {r.bracket_final.first, r.bracket_final.second}},
           {"below_outcome", to_string(r.below_outcome)},
           {"above_outcome", to_string(r.above_outcome)},
           {"below_exit_sign", r.below_exit_sign},
           {"above_exit_sign", r.above_exit_sign},
           {"decay_fit", r.decay_fit},
           {"evolutions", r.evolutions},
           {"checkpoint_corrections", r.corrections}};
}

void to_json(json& j, const StabilityValue& v) {
  j = json{{"value", v.value}, {"tail_bound", v.tail_bound}, {"short_horizon", v.short_horizon}};
  if (!v.warning.empty()) j["warning"] = v.warning;
}

namespace tools {

void to_json(json& j, const RunConfig& c) {
  const auto [r_max, n] = resolved_grid(c);
  j = json{{"command", to_string(c.command)},
           {"grid", {{"r_max", r_max}, {"n", n}}},
           {"physics",
            {{"a", c.physics.a},
             {"sigma", c.physics.sigma},
             {"alpha", c.physics.alpha},
             {"d", c.physics.d},
             {"ell_max", c.physics.ell_max},
             {"ell", c.physics.ell}}},
           {"dynamics",
            {{"dt", c.dynamics.dt ? json(*c.dynamics.dt) : json(nullptr)},
             {"cfl", c.dynamics.cfl},
             {"t_final", c.dynamics.t_final},
             {"blowup_factor", c.dynamics.blowup_factor},
             {"dispersal_fraction", c.dynamics.dispersal_fraction},
             {"dispersal_window", c.dynamics.dispersal_window},
             {"stationary_fraction", c.dynamics.stationary_fraction},
             {"n_plus_exit", c.dynamics.n_plus_exit},
             {"support_radius", c.dynamics.support_radius}}},
           {"output", {{"directory", c.output.directory}, {"stride", c.output.stride}, {"format", c.output.format}}},
           {"experiment",
            {{"lo", c.experiment.lo},
             {"hi", c.experiment.hi},
             {"tol", c.experiment.tol},
             {"eps", c.experiment.eps},
             {"mu", c.experiment.mu ? json(*c.experiment.mu) : json(nullptr)},
             {"epsilons", c.experiment.epsilons},
             {"bracket_width", c.experiment.bracket_width},
             {"h_tol", c.experiment.h_tol},
             {"t_horizon", c.experiment.t_horizon},
             {"seed", c.experiment.seed},
             {"samples", c.experiment.samples},
             {"initial", c.experiment.initial},
             {"amplitude", c.experiment.amplitude},
             {"kernel", c.experiment.kernel},
             {"mode", c.experiment.mode},
             {"times", c.experiment.times},
             {"k", c.experiment.k ? json(*c.experiment.k) : json(nullptr)}}}};
  if (!c.config_file.empty()) j["config_file"] = c.config_file;
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_csv(const std::filesystem::path& path, const std::vector<CsvColumn>& columns) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  std::size_t rows = 0;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    out << (c ? "," : "") << columns[c].name;
    rows = c == 0 ? columns[c].values->size() : std::min(rows, columns[c].values->size());
  }
  out << '\n';
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << format_double((*columns[c].values)[r]);
    out << '\n';
  }
}

void write_json(const std::filesystem::path& path, const json& value) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << value.dump(2) << '\n';
}

json make_manifest(const RunConfig& config, const json& grids, const std::vector<std::string>& outputs) {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return json{{"config", config},
              {"versions",
               {{"solitonlab", SOLITONLAB_VERSION},
                {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                              std::to_string(EIGEN_MINOR_VERSION)},
                {"compiler", __VERSION__},
                {"cxx_standard", __cplusplus}}},
              {"grids", grids},
              {"outputs", outputs},
              {"created_utc", stamp}};
}

}  // namespace tools
}  // namespace solitonlab
