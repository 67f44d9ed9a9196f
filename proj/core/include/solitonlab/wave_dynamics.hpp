#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "solitonlab/channel_operator.hpp"
#include "solitonlab/radial_grid.hpp"
#include "solitonlab/tridiagonal.hpp"

namespace solitonlab {

// Radial focusing quintic wave equation ψ_tt - Δψ - ψ⁵ = 0 around the static
// solution φ(·,1). Everything runs on w = rψ, w_tt = w_rr + w⁵/r⁴, with the
// central-difference Laplacian and a Dirichlet condition at r = 0.

/// N(u,φ) = (φ+u)⁵ - φ⁵ - 5φ⁴u.
double nonlinearity_N(double u, double phi);

enum class Frame { full, perturbation };
const char* to_string(Frame frame);

struct RadialState {
  RadialGrid grid{16.0, 16};
  std::vector<double> u;   // ψ (full) or ψ - φ_h (perturbation), per node
  std::vector<double> ut;
  Frame frame = Frame::full;
};

RadialState to_full(const RadialState& state);
RadialState to_perturbation(const RadialState& state);

enum class Outcome { stationary, dispersal, blowup, undecided };
const char* to_string(Outcome outcome);

/// Static solution of the discretized w-equation through the sampled soliton
/// at the first node, returned as ψ = w/r. It equals φ(·,1) up to O(h²) and
/// is the state every perturbation observable is measured against.
std::vector<double> discrete_soliton(const RadialGrid& grid);

/// Ground state g of the scheme's linearization -Δ_h - 5φ_h⁴ with eigenvalue
/// -k², unit in the three-dimensional radial measure.
struct UnstableMode {
  std::vector<double> g;
  double k = 0.0;
};

UnstableMode unstable_mode(const RadialGrid& grid);

struct EvolutionOptions {
  std::size_t output_stride = 5;          // record observables every this many steps
  double blowup_factor = 1e3;             // sup|ψ| > blowup_factor·φ(0,1)
  double dispersal_fraction = 0.1;        // sup_{r≤1}|ψ| < dispersal_fraction·φ(0,1) ...
  double dispersal_window = 5.0;          // ... held this long
  double stationary_fraction = 0.1;       // sup_{r≤1}|ψ-φ| at the horizon, relative to φ(0,1)
  double local_radius = 1.0;
  std::optional<UnstableMode> mode;       // enables the n₊ series
  double n_plus_exit = 0.0;               // stop once |n₊| exceeds this (0 disables)
  std::vector<double> snapshot_times;
};

struct Trajectory {
  Frame frame = Frame::full;
  std::vector<double> times;
  std::vector<RadialState> snapshots;     // at the requested snapshot times
  std::vector<double> sup_norms;          // sup_r |ψ - φ_h|
  std::vector<double> local_energy;       // perturbation energy density on r ≤ local_radius
  std::vector<double> n_plus_series;      // empty without a mode
  std::vector<double> energy;             // conserved discrete energy
  Outcome outcome = Outcome::undecided;
  double blowup_time = -1.0;
  int exit_sign = 0;                      // sign of n₊ when the n₊ exit fired
  double energy_drift = 0.0;              // max |E - E₀| / (kinetic + gradient energy at t = 0)
  RadialState final_state;
};

/// Velocity-Verlet (leapfrog) integration of the w-equation; the boundary
/// value at r_max is held at its initial value. The perturbation frame
/// integrates U_tt = U_rr + r(5φ_h⁴u + N(u,φ_h)), the same discrete system
/// written around φ_h = discrete_soliton, so u = 0 stays exactly zero.
/// Observables measure ψ - φ_h. Throws std::invalid_argument for dt > 0.9h.
Trajectory evolve_nlw(const RadialState& initial, double t_final, double dt,
                      const EvolutionOptions& options = {});

struct ModeDecomposition {
  double n_plus = 0.0;
  double n_minus = 0.0;
  RadialState u_tilde;
  double k = 0.0;
  std::vector<double> g;
};

/// n± = (⟨u,g⟩ ± ⟨u_t,g⟩/k)/2 in the 3-D radial measure, ũ the remainder.
/// Throws std::invalid_argument when g is not unit to 1e-8 or k ≤ 0.
ModeDecomposition mode_decompose(const RadialState& state, const std::vector<double>& g, double k);

/// n₊G₊ + n₋G₋ + ũ with G± = (g, ±kg).
RadialState reconstruct(const ModeDecomposition& m);

// ---------------------------------------------------------------------------
// Scalar unstable-mode ODE ṅ₊ - k n₊ = F₊. Forcing samples are on a uniform
// time grid and are interpolated linearly; both routines integrate the
// interpolant exactly, so they are consistent to round-off.

struct StabilityValue {
  double value = 0.0;        // -∫₀^T e^{-ks}F₊(s) ds
  double tail_bound = 0.0;   // |F₊(T)| e^{-kT} / k
  bool short_horizon = false;  // kT < 20
  std::string warning;
};

StabilityValue stability_initial_condition(const std::vector<double>& times, const std::vector<double>& F_plus,
                                           double k);

std::vector<double> evolve_unstable_mode(const std::vector<double>& times, const std::vector<double>& F_plus,
                                         double k, double n_plus_0);

// ---------------------------------------------------------------------------

/// cos(t√H) f + sin(t√H)/√H g₀ from a cached eigendecomposition of the
/// channel matrix. Inputs and outputs are per node in w-form with a zero
/// boundary entry.
class LinearPropagator {
 public:
  explicit LinearPropagator(const ChannelOperator& op);

  /// With `drop_unstable`, components along negative eigenvalues are removed
  /// before propagation, so round-off cannot seed exponential growth.
  std::vector<double> propagate(const std::vector<double>& f, const std::vector<double>& g0, double t,
                                bool drop_unstable = false) const;
  const TridiagonalEigensystem& eigensystem() const noexcept { return eig_; }

 private:
  std::size_t n_nodes_;
  TridiagonalEigensystem eig_;
};

std::vector<double> linear_propagate(const ChannelOperator& op, const std::vector<double>& f,
                                     const std::vector<double>& g0, double t);

struct SineSplit {
  std::vector<double> times;
  std::vector<double> rank_one_coeff;
  std::vector<double> remainder_sup;
};

/// Evolves (0, P_g^⊥ f) with the sine propagator of the ℓ = 0 channel and
/// splits the output on r ≤ r_max/4 into a multiple of ∂_aφ and a remainder.
/// g, dphi_da and f are radial functions (not w-form). Throws
/// std::invalid_argument for times beyond r_max/2.
SineSplit sine_split(const ChannelOperator& op, const std::vector<double>& g, const std::vector<double>& dphi_da,
                     const std::vector<double>& f, const std::vector<double>& times);

/// Least-squares slope of log(value) against log(t) on [t0, t1].
double fit_decay(const std::vector<double>& t, const std::vector<double>& value, double t0, double t1);

// ---------------------------------------------------------------------------

struct StableManifoldOptions {
  double bracket_width = 0.05;    // initial bracket [-w, w] for h
  double tol = 1e-12;             // final bracket width
  double t_horizon = 25.0;        // length of the stabilized near-manifold run
  double cfl = 0.8;               // dt = cfl·h
  double n_plus_exit = 0.02;      // |n₊| at which a run has left the manifold
  double checkpoint_interval = 4.0;
  double label_horizon = 60.0;    // runs that label the two sides
  double decay_t0 = 5.0;
  double decay_t1 = 25.0;
  EvolutionOptions evolution;     // classifier thresholds for the label runs
};

struct StableManifoldResult {
  double h_star = 0.0;
  std::pair<double, double> bracket_final{0.0, 0.0};
  Outcome below_outcome = Outcome::undecided;
  Outcome above_outcome = Outcome::undecided;
  double decay_fit = 0.0;
  int below_exit_sign = 0;
  int above_exit_sign = 0;
  std::size_t evolutions = 0;
  std::vector<double> times;       // stabilized near-manifold run
  std::vector<double> sup_norms;
  std::vector<double> corrections; // g-coefficient added at each checkpoint after t = 0
};

/// Bisection over h of the side on which the solution with data
/// (φ_h + f₁ + h g, f₂) leaves the soliton, after projecting (f₁, f₂)
/// onto Σ₀ by removing a multiple of g from f₁. f₁, f₂ are radial functions
/// sampled on the grid, which should come from dynamics_grid.
/// The near-manifold run is continued to t_horizon by re-bisecting the
/// g-coefficient at checkpoints, which keeps round-off in the unstable
/// direction below the exit level.
/// Throws NumericError(bracket_too_small) when both bracket ends leave on
/// the same side or the two labelled outcomes agree.
StableManifoldResult find_stable_h(const RadialGrid& grid, const std::vector<double>& f1,
                                   const std::vector<double>& f2, const StableManifoldOptions& options = {});

/// Grid large enough that a perturbation supported in B(0, support_radius)
/// never reaches r_max before t_final at the numerical propagation speed.
RadialGrid dynamics_grid(double support_radius, double t_final, double h, double cfl);

}  // namespace solitonlab
