#include "solitonlab/channel_operator.hpp"

#include <stdexcept>
#include <string>

namespace solitonlab {

ChannelOperator::ChannelOperator(RadialGrid grid, int ell, std::vector<double> potential)
    : grid_(std::move(grid)), ell_(ell), potential_(std::move(potential)) {
  if (ell_ < 0) throw std::invalid_argument("ChannelOperator: ell must be nonnegative");
  if (potential_.size() != grid_.size())
    throw std::invalid_argument("ChannelOperator: potential has " + std::to_string(potential_.size()) +
                                " samples, grid has " + std::to_string(grid_.size()));
  const std::size_t m = grid_.size() - 1;
  const double h = grid_.spacing();
  const double inv_h2 = 1.0 / (h * h);
  const double centrifugal = static_cast<double>(ell_) * static_cast<double>(ell_ + 1);
  matrix_.diag.resize(m);
  matrix_.off.assign(m - 1, -inv_h2);
  for (std::size_t i = 0; i < m; ++i) {
    const double r = grid_[i];
    matrix_.diag[i] = 2.0 * inv_h2 + centrifugal / (r * r) + potential_[i];
  }
}

ChannelOperator ChannelOperator::shifted(double constant) const {
  std::vector<double> v = potential_;
  for (double& x : v) x += constant;
  return ChannelOperator(grid_, ell_, std::move(v));
}

ChannelOperator assemble_channel_operator(const RadialGrid& grid, int ell, std::vector<double> potential) {
  return ChannelOperator(grid, ell, std::move(potential));
}

std::vector<double> apply_operator(const ChannelOperator& op, std::span<const double> v) {
  const std::size_t n = op.grid().size();
  if (v.size() != n)
    throw std::invalid_argument("apply_operator: vector length " + std::to_string(v.size()) +
                                " does not match grid size " + std::to_string(n));
  std::vector<double> out = multiply(op.matrix(), v.first(n - 1));
  const double h = op.grid().spacing();
  out.back() -= v[n - 1] / (h * h);
  out.push_back(0.0);
  return out;
}

std::vector<double> interior(std::span<const double> per_node) {
  if (per_node.empty()) return {};
  return std::vector<double>(per_node.begin(), per_node.end() - 1);
}

std::vector<double> embed(std::span<const double> interior_values) {
  std::vector<double> out(interior_values.begin(), interior_values.end());
  out.push_back(0.0);
  return out;
}

}  // namespace solitonlab
