#pragma once

#include <map>
#include <string>
#include <vector>

#include "solitonlab/channel_operator.hpp"
#include "solitonlab/halfline_spectral.hpp"
#include "solitonlab/solitons.hpp"

namespace solitonlab {

/// Linearized operators around an NLS ground state in three dimensions,
///   L₋ = -Δ + α² - φ^{2σ},   L₊ = -Δ + α² - (2σ+1)φ^{2σ},
/// realized channel by channel on the half-line.
struct LinearizedPair {
  NlsGroundState profile;
  std::map<int, ChannelOperator> L_plus;
  std::map<int, ChannelOperator> L_minus;
  double alpha_sq = 0.0;

  const ChannelOperator& plus(int ell) const;
  const ChannelOperator& minus(int ell) const;
};

LinearizedPair assemble_linearized_pair(const NlsGroundState& profile, const std::vector<int>& ells);

struct GapChannel {
  std::string op;                 // "L+" or "L-"
  int ell = 0;
  std::vector<double> eigenvalues;  // in (0, α²); entries past the box are estimated
  bool edge_resonance = false;    // threshold obstruction at α²
  bool beyond_box = false;        // a gap eigenvalue whose node lies past r_max
  std::string edge_kind;          // zero-energy diagnosis of L - α²
  double edge_tail_slope = 0.0;
};

struct GapReport {
  double sigma = 0.0;
  double alpha_sq = 0.0;
  std::vector<GapChannel> channels;
  bool gap_holds = false;
};

struct GapScanOptions {
  /// Eigenvalues at or below zero_fraction·α² are the known nonpositive
  /// spectrum (ground state of L₊, kernels) and are excluded from the gap.
  double zero_fraction = 1e-2;
  /// Edge diagnosis at E = α²; the exponentially decaying potential leaves a
  /// purely affine tail, so a tight threshold is safe.
  ZeroEnergyOptions edge{.window_start = 0.7, .threshold = 1e-5};
};

GapReport gap_scan(const LinearizedPair& pair, const GapScanOptions& options = {});

struct SigmaStarConfig {
  double alpha = 1.0;
  double r_max_times_alpha = 40.0;  // r_max = r_max_times_alpha / α
  std::size_t n = 3000;
  std::vector<int> ells{0, 1};
  GapScanOptions gap{};
  ShootingOptions shooting{};
};

struct SigmaStarResult {
  double estimate = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  int evaluations = 0;
};

/// Gap report for a fresh ground state at the given σ.
GapReport gap_report_at(double sigma, const SigmaStarConfig& config);

/// Bisection in σ on gap_holds. Throws NumericError(invalid_bracket) unless
/// the gap fails at `lo` and holds at `hi`.
SigmaStarResult sigma_star(double lo, double hi, double tol, const SigmaStarConfig& config = {});

/// h(μ) = ⟨(L₊ - μ)^{-1}φ, φ⟩ in the radial sector with the 3-D measure.
/// Throws std::invalid_argument when μ is outside (λ₀(L₊), α²) and
/// NumericError(singular_solve) when μ sits on an eigenvalue. With
/// `extrapolate` and an even node count, the solve is repeated on every other
/// node and the two values are Richardson-combined to remove the O(h²) error.
double weinstein_h(const LinearizedPair& pair, double mu, bool extrapolate = true);

/// -(1/2α)⟨∂_αφ, φ⟩ with ∂_αφ from centered differences of shot profiles.
double weinstein_h0_from_scaling(const NlsGroundState& profile, double rel_step = 1e-4,
                                 const ShootingOptions& options = {});

/// inf ⟨L₊f, f⟩ over radial f ⊥ φ, ‖f‖ = 1: smallest eigenvalue of L₊ (ℓ = 0)
/// projected onto span{rφ}^⊥.
double mu0(const LinearizedPair& pair);

/// Smallest eigenvalue of √L₋ L₊ √L₋ on the φ-orthogonal radial sector
/// (dense, O(n³); intended for moderate grids).
double sqrt_form_min_eigenvalue(const LinearizedPair& pair);

struct InstabilityCriterion {
  bool unstable = false;
  double mass_scaling_exponent = 0.0;  // ‖φ_α‖₂² ∝ α^{exponent}
};

InstabilityCriterion instability_criterion(double sigma, int d);

struct RootSpaceResiduals {
  double l_minus_phi = 0.0;       // sup |L₋(rφ)|, ℓ = 0
  double l_plus_grad_phi = 0.0;   // sup |L₊(rφ')|, ℓ = 1
  double l_plus_dalpha_phi = 0.0; // sup |L₊(r∂_αφ) + 2α rφ|, ℓ = 0
};

/// Interior sup-norm residuals of the root-space identities, evaluated on
/// r ≤ r_cut.
RootSpaceResiduals root_space_residuals(const LinearizedPair& pair, const std::vector<double>& dphi_dalpha,
                                        double r_cut);

}  // namespace solitonlab
