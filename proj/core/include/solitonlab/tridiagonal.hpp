#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace solitonlab {

/// Real symmetric tridiagonal matrix: diag has m entries, off has m-1.
struct SymTridiagonal {
  std::vector<double> diag;
  std::vector<double> off;

  std::size_t size() const noexcept { return diag.size(); }
};

std::vector<double> multiply(const SymTridiagonal& t, std::span<const double> x);

/// Gershgorin interval [lo, hi] containing the spectrum.
std::pair<double, double> gershgorin_bounds(const SymTridiagonal& t);

/// Number of eigenvalues strictly below x, from the signs of the LDLᵀ pivots
/// of t - x (Sylvester inertia). Never overflows.
std::size_t sturm_count(const SymTridiagonal& t, double x);

/// k-th smallest eigenvalue (0-based) by bisection on the Sturm count.
double eigenvalue_by_index(const SymTridiagonal& t, std::size_t k);

/// All eigenvalues in [lo, hi), ascending.
std::vector<double> eigenvalues_in(const SymTridiagonal& t, double lo, double hi);

/// Unit eigenvector for an (accurate) eigenvalue; vectors in `deflate` are
/// projected out after each step, used for clustered eigenvalues.
std::vector<double> inverse_iteration(const SymTridiagonal& t, double lambda,
                                      std::span<const std::vector<double>> deflate = {});

/// Solve (t - shift·I) x = rhs by LU with partial pivoting.
/// Throws NumericError(singular_solve) on an exactly singular pivot.
std::vector<double> solve_shifted(const SymTridiagonal& t, double shift, std::span<const double> rhs);
std::vector<std::complex<double>> solve_shifted(const SymTridiagonal& t, std::complex<double> shift,
                                                std::span<const std::complex<double>> rhs);

struct TridiagonalEigensystem {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // columns, unit norm
};

/// Complete eigendecomposition by bisection and inverse iteration.
TridiagonalEigensystem full_eigensystem(const SymTridiagonal& t);

}  // namespace solitonlab
