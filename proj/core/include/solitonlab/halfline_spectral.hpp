#pragma once

#include <string>
#include <vector>

#include "solitonlab/channel_operator.hpp"

namespace solitonlab {

struct EigenPair {
  double energy = 0.0;
  std::vector<double> vector;  // per node, ∫ v² dr = 1, zero at the boundary node
  int node_count = 0;
};

/// All negative eigenvalues of the channel operator with eigenvectors
/// (bisection on Sturm counts, then inverse iteration). The ground state is
/// returned positive. Throws NumericError(numeric_failure) when an
/// eigenvector fails its residual or node-count check.
std::vector<EigenPair> negative_eigenpairs(const ChannelOperator& op);

/// Eigenpair for the k-th smallest eigenvalue (0-based).
EigenPair eigenpair(const ChannelOperator& op, std::size_t k);

/// Number of sign changes on (0, r_max] of the regular solution of
/// (op - energy) w = 0, i.e. the number of eigenvalues below `energy`.
/// Propagated as the ratio w_{i+1}/w_i, so it never overflows.
int count_nodes(const ChannelOperator& op, double energy);

/// Regular solution of the discrete equation (op - energy) w = 0 with w = 0 at
/// r = 0, per node (including the value at r_max). Rescaled whenever it grows
/// past 1e150, so only the shape is meaningful.
std::vector<double> regular_solution(const ChannelOperator& op, double energy);

/// Regular solution of the continuum equation w'' = (V + ℓ(ℓ+1)/r² - E) w by
/// the fourth-order Numerov recursion on the same nodes, rescaled like
/// regular_solution.
std::vector<double> regular_solution_numerov(const ChannelOperator& op, double energy);

enum class ZeroEnergyKind { none, resonance, eigenvalue };
const char* to_string(ZeroEnergyKind kind);

struct ZeroEnergyOptions {
  double window_start = 0.7;     // tail window [window_start·r_max, r_max]
  double threshold = 1e-3;       // on the normalized tail coefficients
  double fit_tolerance = 1e-4;   // max rms fit residual of the normalized tail
  bool high_order = true;        // Numerov instead of the three-point recursion
};

struct ZeroEnergyDiagnosis {
  ZeroEnergyKind kind = ZeroEnergyKind::none;
  std::vector<double> solution;  // regular solution, max |w| on the tail window = 1
  // Tail fit w ≈ tail_slope·x^{ℓ+1} + tail_const + tail_decay·x^{-p} + c·x^{-p-1}
  // with x = r/r_max and p = max(ℓ,1); for ℓ = 0 this is c₂r + c₁ + c₀/r + O(r⁻²).
  double tail_slope = 0.0;
  double tail_const = 0.0;
  double tail_decay = 0.0;
  double fit_residual = 0.0;
  double v_integral = 0.0;       // 4π ∫ V (w/r) r² dr
  double threshold = 0.0;
  int interior_sign_changes = 0;
};

/// Classify the zero-energy regular solution from its tail: a growing term
/// means no threshold obstruction; for ℓ = 0 a bounded, non-decaying tail is a
/// resonance; otherwise a decaying tail is an eigenvalue.
/// Throws NumericError(tail_window_too_small) when the tail does not fit.
ZeroEnergyDiagnosis zero_energy_diagnosis(const ChannelOperator& op, const ZeroEnergyOptions& options = {});

struct BirmanSchwingerChannel {
  int ell = 0;
  int count = 0;                       // eigenvalues ≥ 1 - eps
  std::vector<double> top_eigenvalues; // descending, a few leading values
};

struct BirmanSchwingerResult {
  std::vector<BirmanSchwingerChannel> channels;
  int total_with_multiplicity = 0;     // Σ (2ℓ+1)·count
  double threshold_eps = 0.0;
};

/// Zero-energy Birman–Schwinger operators K_ℓ = |V|^{1/2} G_ℓ |V|^{1/2} for
/// ℓ = 0..ell_max, with G_ℓ(r,s) = min^{ℓ+1} max^{-ℓ} / (2ℓ+1), discretized by
/// symmetric Nyström quadrature, and the count of eigenvalues ≥ 1 - eps.
BirmanSchwingerResult birman_schwinger_count(const std::vector<double>& potential, int ell_max,
                                             const RadialGrid& grid, double threshold_eps = 1e-3,
                                             int keep_top = 4);

/// Exponential decay rate of a positive per-node vector on [r0, r1].
double fitted_decay_rate(const RadialGrid& grid, const std::vector<double>& v, double r0, double r1);

}  // namespace solitonlab
