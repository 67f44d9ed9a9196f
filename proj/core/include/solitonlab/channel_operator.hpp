#pragma once

#include <span>
#include <vector>

#include "solitonlab/radial_grid.hpp"
#include "solitonlab/tridiagonal.hpp"

namespace solitonlab {

/// Central-difference realization of -d²/dr² + ℓ(ℓ+1)/r² + V(r) on a
/// RadialGrid, Dirichlet at r = 0.
///
/// The unknowns are the first n-1 nodes; the last node r_max carries the
/// truncation boundary value, which is zero for every spectral computation.
/// Per-node vectors (length n) are used at the interface: eigenvectors come
/// back with a zero last entry, and apply() reads the last entry of its input
/// as inhomogeneous Dirichlet data so that residuals of functions with a
/// nonzero value at r_max stay meaningful in the interior.
class ChannelOperator {
 public:
  ChannelOperator(RadialGrid grid, int ell, std::vector<double> potential);

  const RadialGrid& grid() const noexcept { return grid_; }
  int ell() const noexcept { return ell_; }
  const std::vector<double>& potential() const noexcept { return potential_; }
  const SymTridiagonal& matrix() const noexcept { return matrix_; }
  std::size_t unknowns() const noexcept { return matrix_.size(); }

  /// Same grid and channel with the potential shifted by a constant.
  ChannelOperator shifted(double constant) const;

 private:
  RadialGrid grid_;
  int ell_;
  std::vector<double> potential_;
  SymTridiagonal matrix_;
};

ChannelOperator assemble_channel_operator(const RadialGrid& grid, int ell, std::vector<double> potential);

/// Tridiagonal matrix-vector product on per-node vectors. The output's last
/// entry (the boundary node) is zero.
std::vector<double> apply_operator(const ChannelOperator& op, std::span<const double> v);

/// Interior unknowns of a per-node vector, and the inverse embedding with a
/// zero boundary entry.
std::vector<double> interior(std::span<const double> per_node);
std::vector<double> embed(std::span<const double> interior_values);

}  // namespace solitonlab
