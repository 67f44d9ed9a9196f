#include "solitonlab/tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "solitonlab/errors.hpp"

namespace solitonlab {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// LU factorization of a general tridiagonal matrix with partial pivoting
// (the dgttrf scheme): a second superdiagonal appears when rows are swapped.
template <class T>
struct TridiagonalLU {
  std::vector<T> dl, d, du, du2;
  std::vector<bool> swapped;
  std::size_t zero_pivot = std::numeric_limits<std::size_t>::max();

  TridiagonalLU(std::vector<T> lower, std::vector<T> main, std::vector<T> upper)
      : dl(std::move(lower)), d(std::move(main)), du(std::move(upper)) {
    const std::size_t n = d.size();
    du2.assign(n > 2 ? n - 2 : 0, T(0));
    swapped.assign(n, false);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (std::abs(d[i]) >= std::abs(dl[i])) {
        if (d[i] != T(0)) {
          T fact = dl[i] / d[i];
          dl[i] = fact;
          d[i + 1] -= fact * du[i];
        } else if (zero_pivot > n) {
          zero_pivot = i;
        }
      } else {
        T fact = d[i] / dl[i];
        d[i] = dl[i];
        dl[i] = fact;
        T temp = du[i];
        du[i] = d[i + 1];
        d[i + 1] = temp - fact * d[i + 1];
        if (i + 2 < n) {
          du2[i] = du[i + 1];
          du[i + 1] = -fact * du[i + 1];
        }
        swapped[i] = true;
      }
    }
    if (n > 0 && d[n - 1] == T(0) && zero_pivot > n) zero_pivot = n - 1;
  }

  bool singular() const { return zero_pivot != std::numeric_limits<std::size_t>::max(); }

  void solve(std::vector<T>& b) const {
    const std::size_t n = d.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (swapped[i]) {
        T temp = b[i];
        b[i] = b[i + 1];
        b[i + 1] = temp - dl[i] * b[i];
      } else {
        b[i + 1] -= dl[i] * b[i];
      }
    }
    if (n == 0) return;
    b[n - 1] /= d[n - 1];
    if (n > 1) b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
    if (n > 2)
      for (std::size_t k = n - 2; k-- > 0;) b[k] = (b[k] - du[k] * b[k + 1] - du2[k] * b[k + 2]) / d[k];
  }
};

template <class T>
TridiagonalLU<T> factor_shifted(const SymTridiagonal& t, T shift) {
  std::vector<T> lower(t.off.begin(), t.off.end());
  std::vector<T> upper(t.off.begin(), t.off.end());
  std::vector<T> main(t.diag.size());
  for (std::size_t i = 0; i < main.size(); ++i) main[i] = T(t.diag[i]) - shift;
  return TridiagonalLU<T>(std::move(lower), std::move(main), std::move(upper));
}

template <class T>
std::vector<T> solve_impl(const SymTridiagonal& t, T shift, std::span<const T> rhs) {
  if (rhs.size() != t.size()) throw std::invalid_argument("solve_shifted: length mismatch");
  auto lu = factor_shifted(t, shift);
  if (lu.singular()) throw NumericError(ErrorKind::singular_solve, "shifted tridiagonal matrix is singular");
  std::vector<T> x(rhs.begin(), rhs.end());
  lu.solve(x);
  return x;
}

}  // namespace

std::vector<double> multiply(const SymTridiagonal& t, std::span<const double> x) {
  const std::size_t m = t.size();
  if (x.size() != m) throw std::invalid_argument("multiply: length mismatch");
  std::vector<double> y(m);
  for (std::size_t i = 0; i < m; ++i) {
    double acc = t.diag[i] * x[i];
    if (i > 0) acc += t.off[i - 1] * x[i - 1];
    if (i + 1 < m) acc += t.off[i] * x[i + 1];
    y[i] = acc;
  }
  return y;
}

std::pair<double, double> gershgorin_bounds(const SymTridiagonal& t) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  const std::size_t m = t.size();
  for (std::size_t i = 0; i < m; ++i) {
    double rad = 0.0;
    if (i > 0) rad += std::abs(t.off[i - 1]);
    if (i + 1 < m) rad += std::abs(t.off[i]);
    lo = std::min(lo, t.diag[i] - rad);
    hi = std::max(hi, t.diag[i] + rad);
  }
  return {lo, hi};
}

std::size_t sturm_count(const SymTridiagonal& t, double x) {
  const std::size_t m = t.size();
  if (m == 0) return 0;
  const double scale = std::max(1.0, std::abs(x));
  const double tiny = kEps * kEps * scale;
  std::size_t count = 0;
  double q = t.diag[0] - x;
  if (q == 0.0) q = -tiny;
  if (q < 0.0) ++count;
  for (std::size_t i = 1; i < m; ++i) {
    q = (t.diag[i] - x) - t.off[i - 1] * t.off[i - 1] / q;
    if (q == 0.0) q = -tiny;
    if (q < 0.0) ++count;
  }
  return count;
}

double eigenvalue_by_index(const SymTridiagonal& t, std::size_t k) {
  if (k >= t.size()) throw std::invalid_argument("eigenvalue_by_index: index out of range");
  auto [lo, hi] = gershgorin_bounds(t);
  const double span = std::max(std::abs(lo), std::abs(hi));
  lo -= kEps * span + 1e-300;
  hi += kEps * span + 1e-300;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (hi - lo <= 2.0 * kEps * std::max(std::abs(lo), std::abs(hi))) break;
    if (sturm_count(t, mid) > k)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<double> eigenvalues_in(const SymTridiagonal& t, double lo, double hi) {
  std::vector<double> out;
  if (!(hi > lo)) return out;
  std::size_t first = sturm_count(t, lo);
  std::size_t last = sturm_count(t, hi);
  for (std::size_t k = first; k < last; ++k) out.push_back(eigenvalue_by_index(t, k));
  return out;
}

std::vector<double> inverse_iteration(const SymTridiagonal& t, double lambda,
                                      std::span<const std::vector<double>> deflate) {
  const std::size_t m = t.size();
  auto [glo, ghi] = gershgorin_bounds(t);
  const double tnorm = std::max(std::abs(glo), std::abs(ghi));
  double shift = lambda + 4.0 * kEps * tnorm;
  auto lu = factor_shifted(t, shift);
  if (lu.singular()) {
    shift = lambda - 16.0 * kEps * tnorm;
    lu = factor_shifted(t, shift);
  }
  std::vector<double> x(m);
  // Deterministic start with components in every eigendirection.
  for (std::size_t i = 0; i < m; ++i) x[i] = 1.0 + 0.3 * std::sin(1.7 * static_cast<double>(i) + 0.4);
  auto project = [&](std::vector<double>& v) {
    for (const auto& q : deflate) {
      double dot = 0.0;
      for (std::size_t i = 0; i < m; ++i) dot += q[i] * v[i];
      for (std::size_t i = 0; i < m; ++i) v[i] -= dot * q[i];
    }
  };
  project(x);
  double nx = norm2(x);
  for (double& v : x) v /= nx;
  for (int it = 0; it < 8; ++it) {
    std::vector<double> y = x;
    lu.solve(y);
    for (double& v : y)
      if (!std::isfinite(v)) throw NumericError(ErrorKind::numeric_failure, "inverse iteration overflow");
    project(y);
    double ny = norm2(y);
    if (ny == 0.0) throw NumericError(ErrorKind::numeric_failure, "inverse iteration collapsed");
    for (double& v : y) v /= ny;
    double diff = 0.0;
    double dot = 0.0;
    for (std::size_t i = 0; i < m; ++i) dot += x[i] * y[i];
    double sgn = dot < 0 ? -1.0 : 1.0;
    for (std::size_t i = 0; i < m; ++i) diff = std::max(diff, std::abs(y[i] - sgn * x[i]));
    x = std::move(y);
    if (it >= 1 && diff < 1e-14) break;
  }
  return x;
}

std::vector<double> solve_shifted(const SymTridiagonal& t, double shift, std::span<const double> rhs) {
  return solve_impl<double>(t, shift, rhs);
}

std::vector<std::complex<double>> solve_shifted(const SymTridiagonal& t, std::complex<double> shift,
                                                std::span<const std::complex<double>> rhs) {
  return solve_impl<std::complex<double>>(t, shift, rhs);
}

TridiagonalEigensystem full_eigensystem(const SymTridiagonal& t) {
  const std::size_t m = t.size();
  TridiagonalEigensystem es;
  es.values.resize(static_cast<Eigen::Index>(m));
  es.vectors.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  auto [glo, ghi] = gershgorin_bounds(t);
  const double cluster_gap = 1e-8 * std::max(std::abs(glo), std::abs(ghi));
  std::vector<std::vector<double>> cluster;
  double prev = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < m; ++k) {
    double lam = eigenvalue_by_index(t, k);
    if (lam - prev > cluster_gap) cluster.clear();
    auto v = inverse_iteration(t, lam, cluster);
    for (std::size_t i = 0; i < m; ++i) es.vectors(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = v[i];
    es.values(static_cast<Eigen::Index>(k)) = lam;
    cluster.push_back(std::move(v));
    prev = lam;
  }
  return es;
}

}  // namespace solitonlab
