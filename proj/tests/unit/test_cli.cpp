#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "solitonlab_tools/commands.hpp"
#include "solitonlab_tools/config.hpp"
#include "solitonlab_tools/io.hpp"

using namespace solitonlab;
using namespace solitonlab::tools;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("solitonlab_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig parse(std::vector<std::string> args) {
  auto c = parse_run_config(args);
  if (!c) throw std::logic_error("unexpected help");
  return *c;
}

int run_quiet(const RunConfig& c, std::string* stdout_text = nullptr) {
  std::ostringstream out, err;
  const int code = run(c, out, err);
  if (stdout_text) *stdout_text = out.str();
  return code;
}

}  // namespace

TEST(Config, DefaultsAndCommandNames) {
  const auto c = parse({"spectrum"});
  EXPECT_EQ(c.command, Command::spectrum);
  EXPECT_DOUBLE_EQ(c.physics.a, 1.0);
  for (const auto& name : command_names()) {
    const auto cmd = command_from_string(name);
    ASSERT_TRUE(cmd.has_value()) << name;
    EXPECT_EQ(to_string(*cmd), name);
  }
  EXPECT_FALSE(command_from_string("nope").has_value());
}

TEST(Config, HelpReturnsNothing) {
  std::string help;
  EXPECT_FALSE(parse_run_config({"--help"}, &help).has_value());
  EXPECT_NE(help.find("spectrum"), std::string::npos);
}

TEST(Config, FileEntriesAreOverriddenByFlags) {
  const fs::path dir = scratch("config");
  const fs::path file = dir / "run.cfg";
  std::ofstream(file) << "# comment\nsigma = 0.7\nn = 500\nR_MAX = 25\n";
  const auto c = parse({"gap-scan", "--config", file.string(), "--sigma", "0.9"});
  EXPECT_DOUBLE_EQ(c.physics.sigma, 0.9);
  EXPECT_EQ(c.grid.n.value(), 500u);
  EXPECT_DOUBLE_EQ(c.grid.r_max.value(), 25.0);
  EXPECT_EQ(resolved_grid(c), std::make_pair(25.0, std::size_t{500}));
}

TEST(Config, MalformedInputIsRejected) {
  const fs::path dir = scratch("bad");
  std::ofstream(dir / "bad.cfg") << "sigma 0.7\n";
  EXPECT_THROW(read_key_value_file((dir / "bad.cfg").string()), std::invalid_argument);
  std::ofstream(dir / "unknown.cfg") << "colour = blue\n";
  EXPECT_THROW(parse({"spectrum", "--config", (dir / "unknown.cfg").string()}), std::invalid_argument);
  EXPECT_THROW(parse({"spectrum", "--n", "ten"}), std::invalid_argument);
  EXPECT_THROW(parse({"frobnicate"}), std::invalid_argument);
  EXPECT_THROW(parse({"laurent", "--kernel", "free2"}), std::invalid_argument);
}

TEST(Config, ValidationCatchesPreconditions) {
  EXPECT_THROW(validate(parse({"spectrum", "--n", "1"})), std::invalid_argument);
  EXPECT_THROW(validate(parse({"spectrum", "--r-max", "-3"})), std::invalid_argument);
  EXPECT_THROW(validate(parse({"nls-ground", "--sigma", "2.5"})), std::invalid_argument);
  EXPECT_NO_THROW(validate(parse({"nls-ground", "--sigma", "1"})));
}

TEST(Run, InvalidConfigExitsTwo) {
  auto c = parse({"spectrum", "--n", "1"});
  c.output.directory = scratch("invalid").string();
  EXPECT_EQ(run_quiet(c), exit_invalid_config);
}

TEST(Run, NonStraddlingBracketExitsFour) {
  auto c = parse({"sigma-star", "--lo", "0.95", "--hi", "1.0", "--tol", "1e-2", "--n", "1000"});
  c.output.directory = scratch("bracket").string();
  EXPECT_EQ(run_quiet(c), exit_undecided);
}

TEST(Run, SpectrumWritesResultsAndManifest) {
  auto c = parse({"spectrum", "--r-max", "30", "--n", "1500", "--format", "csv"});
  const fs::path dir = scratch("spectrum");
  c.output.directory = dir.string();
  std::string out;
  ASSERT_EQ(run_quiet(c, &out), exit_ok);
  EXPECT_TRUE(fs::exists(dir / "spectrum.json"));
  EXPECT_TRUE(fs::exists(dir / "manifest.json"));
  const auto j = json::parse(slurp(dir / "spectrum.json"));
  const auto printed = json::parse(out);
  EXPECT_EQ(j, printed);
  const auto m = json::parse(slurp(dir / "manifest.json"));
  EXPECT_TRUE(m.contains("config"));
  bool has_csv = false;
  for (const auto& e : fs::directory_iterator(dir)) has_csv = has_csv || e.path().extension() == ".csv";
  EXPECT_TRUE(has_csv);
}

TEST(Run, ResultsAreDeterministic) {
  auto c = parse({"bs-count", "--r-max", "30", "--n", "400", "--ell-max", "2"});
  const fs::path d1 = scratch("det1"), d2 = scratch("det2");
  c.output.directory = d1.string();
  ASSERT_EQ(run_quiet(c), exit_ok);
  c.output.directory = d2.string();
  ASSERT_EQ(run_quiet(c), exit_ok);
  EXPECT_EQ(slurp(d1 / "bs-count.json"), slurp(d2 / "bs-count.json"));
}

TEST(Run, EvolveZeroDataDisperses) {
  auto c = parse({"evolve", "--initial", "zero", "--r-max", "20", "--n", "200", "--t-final", "8"});
  const fs::path dir = scratch("evolve");
  c.output.directory = dir.string();
  ASSERT_EQ(run_quiet(c), exit_ok);
  EXPECT_TRUE(fs::exists(dir / "trajectory.csv"));
  const auto j = json::parse(slurp(dir / "evolve.json"));
  EXPECT_EQ(j.at("outcome"), "dispersal");
}

TEST(Io, CsvRoundTripsDoubles) {
  const fs::path dir = scratch("csv");
  const std::vector<double> a{0.1, 1.0 / 3.0, -2.5e-300}, b{1.0, 2.0, 3.0};
  write_csv(dir / "x.csv", {{"a", &a}, {"b", &b}});
  std::ifstream in(dir / "x.csv");
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "a,b");
  for (std::size_t i = 0; i < a.size(); ++i) {
    std::getline(in, line);
    const auto comma = line.find(',');
    EXPECT_EQ(std::stod(line.substr(0, comma)), a[i]);
    EXPECT_EQ(std::stod(line.substr(comma + 1)), b[i]);
  }
  EXPECT_EQ(format_double(0.1), "0.1");
}
