#pragma once

#include <vector>

#include "solitonlab/radial_grid.hpp"

namespace solitonlab {

// ---------------------------------------------------------------------------
// Static solutions of the focusing quintic wave equation in three dimensions,
// φ(r,a) = (3a)^{1/4} (1 + a r²)^{-1/2}, together with their a-derivative and
// the linearized potential V = -5φ⁴.

struct AubinSoliton {
  double a;

  explicit AubinSoliton(double a_);

  double phi(double r) const;
  double dphi_da(double r) const;
  double dphi_dr(double r) const;
  double potential(double r) const;
  /// Dilation generator (1/2 + r∂_r)φ = 2a ∂_aφ; it spans the radial
  /// zero-energy solution of the linearization.
  double dilation_mode(double r) const;
};

struct AubinValues {
  std::vector<double> phi;
  std::vector<double> dphi_da;
  std::vector<double> potential;
};

AubinValues aubin_values(double a, const RadialGrid& grid);

/// V(r,a) = -5φ(r,a)⁴ sampled on the grid.
std::vector<double> aubin_potential(double a, const RadialGrid& grid);

// ---------------------------------------------------------------------------
// Ground states of (α² - Δ)φ = φ^{2σ+1} in d = 1 or 3 dimensions.

struct NlsGroundState {
  double sigma = 1.0;
  double alpha = 1.0;
  int d = 3;
  RadialGrid grid{16.0, 16};
  std::vector<double> samples;     // φ at the grid nodes
  std::vector<double> derivative;  // φ' at the grid nodes
  double center_value = 0.0;       // φ(0)
  double decay_rate = 0.0;         // fitted exponential rate of the tail
  double trusted_radius = 0.0;     // shooting data is used up to here; beyond, the linear asymptote
};

struct ShootingOptions {
  /// Bisection stops once the φ(0) bracket is narrower than this, or when the
  /// midpoint no longer separates the ends in floating point.
  double bracket_tol = 1e-12;
  /// Largest relative disagreement between the undershooting and
  /// overshooting profiles that is still trusted.
  double agreement_tol = 1e-7;
};

NlsGroundState nls_ground_state(double sigma, double alpha, int d, const RadialGrid& grid,
                                const ShootingOptions& options = {});

/// Exact scaling φ(r,α') = (α'/α)^{1/σ} φ(r α'/α, α) applied to the samples;
/// the grid is rescaled so that node values map one to one.
NlsGroundState rescale_ground_state(const NlsGroundState& profile, double alpha_new);

/// ‖φ‖₂² in d dimensions (4π ∫φ²r² dr for d = 3, 2∫φ² dr for d = 1).
double mass(const NlsGroundState& profile);

/// ∂_αφ on the profile's grid by centered differences of two shot profiles
/// with relative step `rel_step`.
std::vector<double> dphi_dalpha(const NlsGroundState& profile, double rel_step = 1e-4,
                                const ShootingOptions& options = {});

}  // namespace solitonlab
