#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "solitonlab/channel_operator.hpp"
#include "solitonlab/halfline_spectral.hpp"
#include "solitonlab/radial_grid.hpp"

namespace solitonlab {

using cplx = std::complex<double>;

// ---------------------------------------------------------------------------
// Inversion of A(z) = A₀ + z A₁(z) when A₀ is symmetric with a kernel.

struct SingularFamily {
  Eigen::MatrixXd A0;
  std::function<Eigen::MatrixXcd(cplx)> A1;
  Eigen::MatrixXd S;      // orthogonal projection onto ker A₀
  Eigen::MatrixXd basis;  // orthonormal basis of ker A₀ (columns)
  int rank_S = 0;
  double gap = 0.0;       // distance from 0 to the rest of spec(A₀)

  Eigen::MatrixXcd at(cplx z) const;
};

/// Builds S from the eigenvectors of A₀ whose eigenvalues are below
/// kernel_tol·‖A₀‖. Throws std::invalid_argument when A₀ is not symmetric to
/// 1e-12 or has no kernel.
SingularFamily make_singular_family(Eigen::MatrixXd A0, std::function<Eigen::MatrixXcd(cplx)> A1,
                                    double kernel_tol = 1e-10);

struct JensenNenciuInverse {
  Eigen::MatrixXcd A_inv;
  Eigen::MatrixXcd B;     // (1/z)(S - S(A(z)+S)^{-1}S)
};

/// A(z)^{-1} = (A+S)^{-1} + (1/z)(A+S)^{-1} S B(z)^{-1} S (A+S)^{-1}, with
/// B(z)^{-1} taken on the range of S. Throws NumericError(not_invertible)
/// when A(z)+S or B(z) restricted to ran S is singular.
JensenNenciuInverse jensen_nenciu_invert(const SingularFamily& family, cplx z);

struct JensenNenciuConditioning {
  double cond_A = 0.0;        // 2-norm condition number of A(z)
  double cond_B = 0.0;        // max(‖B‖, ‖SA₁S‖) / σ_min(B) on ran S
  double cond_A_plus_S = 0.0;
};

JensenNenciuConditioning jensen_nenciu_conditioning(const SingularFamily& family, cplx z);

/// ‖S - S(A₀+S)^{-1}S‖₂, which vanishes for symmetric A₀.
double kernel_defect(const SingularFamily& family);

/// Random family with symmetric A₀ of the given dimension and kernel rank and
/// a constant symmetric A₁. With `degenerate_at`, A₁ is corrected along one
/// eigenvector of A₀ + z₀A₁ so that A(z₀) is exactly singular for that real z₀.
SingularFamily random_singular_family(std::uint64_t seed, int dim, int rank,
                                      std::optional<double> degenerate_at = std::nullopt);

struct JensenNenciuSuite {
  int instances = 0;
  double max_relative_error = 0.0;   // formula against direct inversion, Frobenius
  double max_kernel_defect = 0.0;
  int degenerate_instances = 0;
  int iff_violations = 0;            // cases where exactly one of A(z₀), B(z₀) is singular
  double min_degenerate_cond_A = 0.0;
  double min_degenerate_cond_B = 0.0;
  double max_generic_cond_A = 0.0;
  double max_generic_cond_B = 0.0;
};

/// Randomized check of the inversion formula: dimensions 10–50, kernel ranks
/// 1–3, z in the upper half plane with 0.05 ≤ |z| ≤ 0.3. Each instance also
/// builds a family made singular at a real z₀ and its generic counterpart;
/// a matrix counts as singular when its condition number exceeds
/// singular_cond.
JensenNenciuSuite jensen_nenciu_suite(std::uint64_t seed, int instances, double singular_cond = 1e8);

// ---------------------------------------------------------------------------

/// R_V = R₀ - R₀ v (U + v R₀ v)^{-1} v R₀ with V = v²U, v = |V|^{1/2},
/// U = sign V (1 where V = 0). Throws NumericError(not_invertible) when the
/// smallest singular value of U + vR₀v is below singular_tol: a zero-energy
/// eigenvalue or resonance when R₀ is taken at z = 0.
Eigen::MatrixXcd symmetric_resolvent(const Eigen::MatrixXcd& R0, const Eigen::VectorXd& V,
                                     double singular_tol = 1e-2);

/// Smallest singular value of U + vR₀v.
double symmetric_resolvent_inner_margin(const Eigen::MatrixXcd& R0, const Eigen::VectorXd& V);

// ---------------------------------------------------------------------------
// Laurent coefficients of z ↦ M(z) near z = 0.

struct LaurentCoefficients {
  int min_order = -2;
  std::vector<Eigen::MatrixXcd> coefficients;  // orders min_order .. max_order
  double fit_residual = 0.0;                   // ‖fit - samples‖_F / ‖samples‖_F

  const Eigen::MatrixXcd& order(int k) const;
  const Eigen::MatrixXcd& c_minus2() const { return order(-2); }
  const Eigen::MatrixXcd& c_minus1() const { return order(-1); }
  const Eigen::MatrixXcd& c0() const { return order(0); }
};

using ResolventSampler = std::function<Eigen::MatrixXcd(cplx)>;

/// Entrywise least-squares fit of Σ_{k=-2}^{max_order} c_k z^k. Needs at least
/// four samples, none on the positive real axis; throws NumericError
/// (numeric_failure) when the sample set is too ill-conditioned to separate
/// the orders.
LaurentCoefficients laurent_fit(const ResolventSampler& sampler, const std::vector<cplx>& z_samples,
                                int max_order = 1);

/// count points on |z| = radius at angles 2π(j+½)/count (never on the
/// positive real axis).
std::vector<cplx> circle_samples(double radius, int count);

/// z = iρ with ρ logarithmically spaced in [rho_min, rho_max].
std::vector<cplx> imaginary_ray_samples(double rho_min, double rho_max, int count);

/// Free resolvent kernel of (-Δ - z²)^{-1} in d = 1 or 3, Im z > 0:
/// e^{iz|x-y|}/(2iz) and e^{iz|x-y|}/(4π|x-y|).
/// Throws std::invalid_argument for Im z ≤ 0 and NumericError
/// (on_diagonal_singularity) for d = 3, x = y.
cplx free_resolvent_kernel(int d, cplx z, double x, double y);

/// The same closed forms continued to all z ≠ 0 (they are meromorphic with at
/// most a pole at 0), for sampling on full circles.
cplx free_resolvent_kernel_continued(int d, cplx z, double x, double y);

/// Reduced ℓ = 0 half-line kernel sin(z r_<) e^{iz r_>}/z of
/// (-d²/dr² - z²)^{-1} with a Dirichlet condition at 0; min(r, s) at z = 0.
cplx halfline_free_kernel(cplx z, double r, double s);

/// z ↦ (op - z²)^{-1} restricted to the given node indices (rows and columns),
/// by complex tridiagonal solves.
ResolventSampler discrete_resolvent_sampler(const ChannelOperator& op, std::vector<std::size_t> nodes);

// ---------------------------------------------------------------------------

struct ZeroModeClassification {
  ZeroEnergyKind kind = ZeroEnergyKind::none;
  double v_integral = 0.0;     // ∫_{R³} V f (monopole; zero for ℓ ≥ 1 by angular symmetry)
  double v_moment_scale = 0.0; // ∫_{R³} |V f|
  double tail_exponent = 0.0;  // log-log slope of |f| on [r_max/2, r_max]
  double residual = 0.0;       // relative interior residual of H(r f) = 0
};

struct ZeroModeOptions {
  double residual_tol = 1e-2;
  double exponent_tol = 0.25;
  double integral_tol = 1e-3;  // |∫Vf| / ∫|Vf| below this counts as zero
};

/// Classify a numerical zero mode f of -Δ + V in channel ℓ by ∫Vf and the
/// decay exponent of its tail. Throws NumericError(not_a_zero_mode) when f
/// does not solve the equation to residual_tol.
ZeroModeClassification classify_zero_mode(const std::vector<double>& V, const std::vector<double>& f,
                                          const RadialGrid& grid, int ell = 0,
                                          const ZeroModeOptions& options = {});

}  // namespace solitonlab
