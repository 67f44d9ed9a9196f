#include "solitonlab/radial_grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace solitonlab {

RadialGrid::RadialGrid(double r_max, std::size_t n) : r_max_(r_max), h_(0.0) {
  if (!(r_max > 0.0) || !std::isfinite(r_max))
    throw std::invalid_argument("RadialGrid: r_max must be positive and finite");
  if (n < 16) throw std::invalid_argument("RadialGrid: need at least 16 nodes, got " + std::to_string(n));
  h_ = r_max / static_cast<double>(n);
  nodes_.resize(n);
  weights_.assign(n, h_);
  for (std::size_t i = 0; i < n; ++i) nodes_[i] = static_cast<double>(i + 1) * h_;
  nodes_.back() = r_max;
  weights_.front() = 1.5 * h_;
  weights_.back() = 0.5 * h_;
}

std::size_t RadialGrid::index_at_or_below(double r) const {
  if (r < nodes_.front()) return 0;
  auto idx = static_cast<std::size_t>(std::floor(r / h_ + 1e-9));
  return std::min(idx, nodes_.size()) - 1;
}

RadialGrid make_grid(double r_max, std::size_t n) { return RadialGrid(r_max, n); }

namespace {
void check_length(const RadialGrid& grid, std::size_t len, const char* who) {
  if (len != grid.size())
    throw std::invalid_argument(std::string(who) + ": sample length " + std::to_string(len) +
                                " does not match grid size " + std::to_string(grid.size()));
}
}  // namespace

double integrate(const RadialGrid& grid, std::span<const double> samples) {
  check_length(grid, samples.size(), "integrate");
  const auto& w = grid.weights();
  double acc = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) acc += w[i] * samples[i];
  return acc;
}

double inner(const RadialGrid& grid, std::span<const double> f, std::span<const double> g) {
  check_length(grid, f.size(), "inner");
  check_length(grid, g.size(), "inner");
  const auto& w = grid.weights();
  double acc = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) acc += w[i] * f[i] * g[i];
  return acc;
}

double inner_3d(const RadialGrid& grid, std::span<const double> f, std::span<const double> g) {
  check_length(grid, f.size(), "inner_3d");
  check_length(grid, g.size(), "inner_3d");
  const auto& w = grid.weights();
  const auto& r = grid.nodes();
  double acc = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) acc += w[i] * f[i] * g[i] * r[i] * r[i];
  return 4.0 * std::numbers::pi * acc;
}

}  // namespace solitonlab
