#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace solitonlab {

/// Uniform discretization of the half-line (0, r_max].
///
/// Nodes sit at r_i = (i+1)·h for i = 0..n-1, so r = 0 is never a node and the
/// last node is r_max itself. Weights are trapezoid weights with the r = 0
/// endpoint value extrapolated from the first node, which keeps the rule
/// second order for integrands that do not vanish at the origin and makes the
/// weights sum to r_max exactly.
class RadialGrid {
 public:
  RadialGrid(double r_max, std::size_t n);

  std::size_t size() const noexcept { return nodes_.size(); }
  double r_max() const noexcept { return r_max_; }
  double spacing() const noexcept { return h_; }

  const std::vector<double>& nodes() const noexcept { return nodes_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  double operator[](std::size_t i) const { return nodes_[i]; }

  /// Index of the last node with r_i <= r.
  std::size_t index_at_or_below(double r) const;

 private:
  double r_max_;
  double h_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

RadialGrid make_grid(double r_max, std::size_t n);

/// Quadrature-weighted sum of samples over the grid.
double integrate(const RadialGrid& grid, std::span<const double> samples);

/// ∫ f g dr on the half-line.
double inner(const RadialGrid& grid, std::span<const double> f, std::span<const double> g);

/// 4π ∫ f g r² dr for radial functions in three dimensions.
double inner_3d(const RadialGrid& grid, std::span<const double> f, std::span<const double> g);

template <class F>
std::vector<double> sample(const RadialGrid& grid, F&& f) {
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) out[i] = f(grid[i]);
  return out;
}

}  // namespace solitonlab
