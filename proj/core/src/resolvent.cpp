#include "solitonlab/resolvent.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "solitonlab/errors.hpp"
#include "solitonlab/fitting.hpp"

namespace solitonlab {

namespace {

constexpr cplx I{0.0, 1.0};

double condition_number(const Eigen::MatrixXcd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0) return 1.0;
  const double smin = s(s.size() - 1);
  return smin == 0.0 ? std::numeric_limits<double>::infinity() : s(0) / smin;
}

}  // namespace

Eigen::MatrixXcd SingularFamily::at(cplx z) const {
  return A0.cast<cplx>() + z * A1(z);
}

SingularFamily make_singular_family(Eigen::MatrixXd A0, std::function<Eigen::MatrixXcd(cplx)> A1,
                                    double kernel_tol) {
  if (A0.rows() != A0.cols() || A0.rows() == 0) throw std::invalid_argument("A0 must be square and nonempty");
  const double scale = std::max(A0.norm(), 1.0);
  if ((A0 - A0.transpose()).norm() > 1e-12 * scale) throw std::invalid_argument("A0 must be symmetric");
  if (!A1) throw std::invalid_argument("A1 must be callable");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A0);
  const Eigen::VectorXd& ev = es.eigenvalues();
  const double cut = kernel_tol * scale;
  std::vector<int> kernel;
  double gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < ev.size(); ++i) {
    if (std::abs(ev(i)) <= cut) kernel.push_back(i);
    else gap = std::min(gap, std::abs(ev(i)));
  }
  if (kernel.empty()) throw std::invalid_argument("A0 has a trivial kernel");

  SingularFamily f;
  f.basis.resize(A0.rows(), static_cast<Eigen::Index>(kernel.size()));
  for (std::size_t k = 0; k < kernel.size(); ++k) f.basis.col(static_cast<Eigen::Index>(k)) = es.eigenvectors().col(kernel[k]);
  f.S = f.basis * f.basis.transpose();
  f.rank_S = static_cast<int>(kernel.size());
  f.gap = gap;
  f.A0 = std::move(A0);
  f.A1 = std::move(A1);
  return f;
}

JensenNenciuInverse jensen_nenciu_invert(const SingularFamily& family, cplx z) {
  if (z == cplx{0.0}) throw std::invalid_argument("z must be nonzero");
  const Eigen::MatrixXcd S = family.S.cast<cplx>();
  const Eigen::MatrixXcd Q = family.basis.cast<cplx>();
  const Eigen::MatrixXcd M = family.at(z) + S;

  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(M);
  if (!(lu.rcond() > 1e-14)) throw NumericError(ErrorKind::not_invertible, "A(z) + S is singular");
  const Eigen::MatrixXcd Minv = lu.inverse();

  JensenNenciuInverse out;
  out.B = (S - S * Minv * S) / z;
  const Eigen::MatrixXcd Bq = Q.adjoint() * out.B * Q;
  Eigen::FullPivLU<Eigen::MatrixXcd> blu(Bq);
  if (!blu.isInvertible() || condition_number(Bq) > 1e12)
    throw NumericError(ErrorKind::not_invertible, "B(z) is singular on ran S");
  const Eigen::MatrixXcd Binv = Q * blu.inverse() * Q.adjoint();
  out.A_inv = Minv + (Minv * S * Binv * S * Minv) / z;
  return out;
}

JensenNenciuConditioning jensen_nenciu_conditioning(const SingularFamily& family, cplx z) {
  if (z == cplx{0.0}) throw std::invalid_argument("z must be nonzero");
  const Eigen::MatrixXcd S = family.S.cast<cplx>();
  const Eigen::MatrixXcd Q = family.basis.cast<cplx>();
  const Eigen::MatrixXcd A = family.at(z);
  const Eigen::MatrixXcd M = A + S;

  JensenNenciuConditioning c;
  c.cond_A = condition_number(A);
  c.cond_A_plus_S = condition_number(M);
  const Eigen::MatrixXcd Minv = M.fullPivLu().inverse();
  const Eigen::MatrixXcd B = (S - S * Minv * S) / z;
  // A 1×1 block is always perfectly conditioned; measure B against the
  // scale of its z → 0 limit S A₁ S as well.
  const Eigen::MatrixXcd Bq = Q.adjoint() * B * Q;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(Bq);
  const auto& sv = svd.singularValues();
  const double ref = std::max(sv(0), Eigen::JacobiSVD<Eigen::MatrixXcd>(Q.adjoint() * family.A1(z) * Q).singularValues()(0));
  const double smin = sv(sv.size() - 1);
  c.cond_B = smin == 0.0 ? std::numeric_limits<double>::infinity() : ref / smin;
  return c;
}

double kernel_defect(const SingularFamily& family) {
  const Eigen::MatrixXd M = family.A0 + family.S;
  const Eigen::MatrixXd D = family.S - family.S * M.fullPivLu().inverse() * family.S;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(D);
  return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

SingularFamily random_singular_family(std::uint64_t seed, int dim, int rank, std::optional<double> degenerate_at) {
  if (dim < 2 || rank < 1 || rank >= dim) throw std::invalid_argument("need 1 <= rank < dim");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> spread(0.5, 2.0);
  auto random_matrix = [&] {
    Eigen::MatrixXd m(dim, dim);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = normal(rng);
    return m;
  };

  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(random_matrix());
  const Eigen::MatrixXd Q = qr.householderQ();
  Eigen::VectorXd spectrum(dim);
  for (int i = 0; i < dim; ++i) {
    const double sign = normal(rng) < 0.0 ? -1.0 : 1.0;
    spectrum(i) = i < rank ? 0.0 : sign * spread(rng);
  }
  Eigen::MatrixXd A0 = Q * spectrum.asDiagonal() * Q.transpose();
  A0 = (0.5 * (A0 + A0.transpose())).eval();
  Eigen::MatrixXd A1 = random_matrix();
  A1 = (0.5 * (A1 + A1.transpose()) / std::sqrt(static_cast<double>(dim))).eval();

  if (degenerate_at) {
    const double z0 = *degenerate_at;
    if (z0 == 0.0) throw std::invalid_argument("degenerate point must be nonzero");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A0 + z0 * A1);
    Eigen::Index j = 0;
    es.eigenvalues().cwiseAbs().minCoeff(&j);
    const Eigen::VectorXd u = es.eigenvectors().col(j);
    A1 -= (es.eigenvalues()(j) / z0) * u * u.transpose();
  }

  // Kernel tolerance well above round-off in A₀ and well below the spread.
  return make_singular_family(std::move(A0),
                              [A1c = Eigen::MatrixXcd(A1.cast<cplx>())](cplx) { return A1c; }, 1e-8);
}

JensenNenciuSuite jensen_nenciu_suite(std::uint64_t seed, int instances, double singular_cond) {
  if (instances < 1) throw std::invalid_argument("need at least one instance");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dim_dist(10, 50), rank_dist(1, 3);
  std::uniform_real_distribution<double> radius(0.05, 0.3), angle(0.05, std::numbers::pi - 0.05);

  JensenNenciuSuite out;
  out.min_degenerate_cond_A = out.min_degenerate_cond_B = std::numeric_limits<double>::infinity();
  for (int i = 0; i < instances; ++i) {
    const int dim = dim_dist(rng), rank = rank_dist(rng);
    const std::uint64_t family_seed = rng();
    const SingularFamily fam = random_singular_family(family_seed, dim, rank);
    const cplx z = std::polar(radius(rng), angle(rng));

    const JensenNenciuInverse jn = jensen_nenciu_invert(fam, z);
    const Eigen::MatrixXcd direct = fam.at(z).fullPivLu().inverse();
    out.max_relative_error = std::max(out.max_relative_error, (jn.A_inv - direct).norm() / direct.norm());
    out.max_kernel_defect = std::max(out.max_kernel_defect, kernel_defect(fam));

    const double z0 = radius(rng);
    const SingularFamily degenerate = random_singular_family(family_seed, dim, rank, z0);
    const auto cd = jensen_nenciu_conditioning(degenerate, z0);
    const auto cg = jensen_nenciu_conditioning(fam, z0);
    ++out.degenerate_instances;
    out.min_degenerate_cond_A = std::min(out.min_degenerate_cond_A, cd.cond_A);
    out.min_degenerate_cond_B = std::min(out.min_degenerate_cond_B, cd.cond_B);
    out.max_generic_cond_A = std::max(out.max_generic_cond_A, cg.cond_A);
    out.max_generic_cond_B = std::max(out.max_generic_cond_B, cg.cond_B);
    for (const auto& c : {cd, cg})
      if ((c.cond_A > singular_cond) != (c.cond_B > singular_cond)) ++out.iff_violations;
    ++out.instances;
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

Eigen::MatrixXcd inner_matrix(const Eigen::MatrixXcd& R0, const Eigen::VectorXd& V, Eigen::VectorXd& v) {
  if (R0.rows() != R0.cols() || R0.rows() != V.size())
    throw std::invalid_argument("R0 and V dimensions disagree");
  v = V.cwiseAbs().cwiseSqrt();
  Eigen::MatrixXcd K = v.cast<cplx>().asDiagonal() * R0 * v.cast<cplx>().asDiagonal();
  for (Eigen::Index i = 0; i < V.size(); ++i) K(i, i) += V(i) < 0.0 ? -1.0 : 1.0;
  return K;
}

}  // namespace

double symmetric_resolvent_inner_margin(const Eigen::MatrixXcd& R0, const Eigen::VectorXd& V) {
  Eigen::VectorXd v;
  const Eigen::MatrixXcd K = inner_matrix(R0, V, v);
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(K);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

Eigen::MatrixXcd symmetric_resolvent(const Eigen::MatrixXcd& R0, const Eigen::VectorXd& V,
                                     double singular_tol) {
  Eigen::VectorXd v;
  const Eigen::MatrixXcd K = inner_matrix(R0, V, v);
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(K, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double smin = svd.singularValues()(svd.singularValues().size() - 1);
  if (smin < singular_tol)
    throw NumericError(ErrorKind::not_invertible,
                       "U + vR0v is singular (smallest singular value " + std::to_string(smin) + ")");
  const Eigen::MatrixXcd vR0 = v.cast<cplx>().asDiagonal() * R0;
  const Eigen::MatrixXcd R0v = R0 * v.cast<cplx>().asDiagonal();
  return R0 - R0v * svd.solve(vR0);
}

// ---------------------------------------------------------------------------

const Eigen::MatrixXcd& LaurentCoefficients::order(int k) const {
  const int idx = k - min_order;
  if (idx < 0 || idx >= static_cast<int>(coefficients.size()))
    throw std::out_of_range("Laurent order " + std::to_string(k) + " was not fitted");
  return coefficients[static_cast<std::size_t>(idx)];
}

LaurentCoefficients laurent_fit(const ResolventSampler& sampler, const std::vector<cplx>& z_samples,
                                int max_order) {
  constexpr int min_order = -2;
  if (max_order < 0) throw std::invalid_argument("max_order must be at least 0");
  const int terms = max_order - min_order + 1;
  if (z_samples.size() < 4 || static_cast<int>(z_samples.size()) < terms)
    throw std::invalid_argument("need at least four samples and one per fitted order");
  for (cplx z : z_samples) {
    if (z == cplx{0.0}) throw std::invalid_argument("z = 0 cannot be sampled");
    if (z.real() > 0.0 && std::abs(z.imag()) <= 1e-14 * std::abs(z))
      throw std::invalid_argument("samples must avoid the positive real axis");
  }

  const auto N = static_cast<Eigen::Index>(z_samples.size());
  Eigen::MatrixXcd design(N, terms);
  Eigen::MatrixXcd first = sampler(z_samples[0]);
  const Eigen::Index rows = first.rows(), cols = first.cols();
  Eigen::MatrixXcd Y(N, rows * cols);
  for (Eigen::Index s = 0; s < N; ++s) {
    const cplx z = z_samples[static_cast<std::size_t>(s)];
    for (int k = 0; k < terms; ++k) design(s, k) = std::pow(z, min_order + k);
    const Eigen::MatrixXcd m = s == 0 ? first : sampler(z);
    if (m.rows() != rows || m.cols() != cols) throw std::invalid_argument("sampler changed shape");
    Y.row(s) = Eigen::Map<const Eigen::RowVectorXcd>(m.data(), rows * cols);
  }

  // Column scaling keeps the Vandermonde-type design well posed across |z|.
  Eigen::VectorXd col_scale(terms);
  for (int k = 0; k < terms; ++k) col_scale(k) = design.col(k).norm();
  const Eigen::MatrixXcd scaled = design * col_scale.cwiseInverse().asDiagonal();
  if (condition_number(scaled) > 1e12)
    throw NumericError(ErrorKind::numeric_failure, "sample set cannot separate the Laurent orders; widen it");

  const Eigen::MatrixXcd C = col_scale.cwiseInverse().asDiagonal() * scaled.colPivHouseholderQr().solve(Y);

  LaurentCoefficients out;
  out.min_order = min_order;
  for (int k = 0; k < terms; ++k) {
    Eigen::RowVectorXcd row = C.row(k);
    out.coefficients.push_back(Eigen::Map<const Eigen::MatrixXcd>(row.data(), rows, cols));
  }
  const double ynorm = Y.norm();
  out.fit_residual = ynorm > 0.0 ? (design * C - Y).norm() / ynorm : 0.0;
  return out;
}

std::vector<cplx> circle_samples(double radius, int count) {
  if (!(radius > 0.0) || count < 4) throw std::invalid_argument("circle needs radius > 0 and count >= 4");
  std::vector<cplx> z(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j)
    z[static_cast<std::size_t>(j)] = std::polar(radius, 2.0 * std::numbers::pi * (j + 0.5) / count);
  return z;
}

std::vector<cplx> imaginary_ray_samples(double rho_min, double rho_max, int count) {
  if (!(rho_min > 0.0) || !(rho_max > rho_min) || count < 4)
    throw std::invalid_argument("ray needs 0 < rho_min < rho_max and count >= 4");
  std::vector<cplx> z(static_cast<std::size_t>(count));
  const double lmin = std::log(rho_min), lmax = std::log(rho_max);
  for (int j = 0; j < count; ++j)
    z[static_cast<std::size_t>(j)] = I * std::exp(lmin + (lmax - lmin) * j / (count - 1));
  return z;
}

cplx free_resolvent_kernel_continued(int d, cplx z, double x, double y) {
  const double dist = std::abs(x - y);
  if (d == 1) {
    if (z == cplx{0.0}) throw std::invalid_argument("the d = 1 kernel has a pole at z = 0");
    return std::exp(I * z * dist) / (2.0 * I * z);
  }
  if (d == 3) {
    if (dist == 0.0) throw NumericError(ErrorKind::on_diagonal_singularity, "x = y in three dimensions");
    return std::exp(I * z * dist) / (4.0 * std::numbers::pi * dist);
  }
  throw std::invalid_argument("dimension must be 1 or 3");
}

cplx free_resolvent_kernel(int d, cplx z, double x, double y) {
  if (!(z.imag() > 0.0)) throw std::invalid_argument("free resolvent needs Im z > 0");
  return free_resolvent_kernel_continued(d, z, x, y);
}

cplx halfline_free_kernel(cplx z, double r, double s) {
  const double lo = std::min(r, s), hi = std::max(r, s);
  if (z == cplx{0.0}) return lo;
  return std::sin(z * lo) * std::exp(I * z * hi) / z;
}

ResolventSampler discrete_resolvent_sampler(const ChannelOperator& op, std::vector<std::size_t> nodes) {
  for (std::size_t j : nodes)
    if (j >= op.unknowns()) throw std::invalid_argument("node index outside the interior");
  return [t = op.matrix(), nodes = std::move(nodes)](cplx z) {
    const auto m = static_cast<Eigen::Index>(nodes.size());
    Eigen::MatrixXcd out(m, m);
    std::vector<cplx> rhs(t.size(), cplx{0.0});
    for (Eigen::Index c = 0; c < m; ++c) {
      rhs[nodes[static_cast<std::size_t>(c)]] = 1.0;
      const auto col = solve_shifted(t, z * z, rhs);
      rhs[nodes[static_cast<std::size_t>(c)]] = 0.0;
      for (Eigen::Index r = 0; r < m; ++r) out(r, c) = col[nodes[static_cast<std::size_t>(r)]];
    }
    return out;
  };
}

// ---------------------------------------------------------------------------

ZeroModeClassification classify_zero_mode(const std::vector<double>& V, const std::vector<double>& f,
                                          const RadialGrid& grid, int ell, const ZeroModeOptions& options) {
  if (V.size() != grid.size() || f.size() != grid.size())
    throw std::invalid_argument("V and f must be sampled on the grid");
  if (ell < 0) throw std::invalid_argument("ell must be nonnegative");

  const ChannelOperator op(grid, ell, V);
  std::vector<double> w(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) w[i] = grid[i] * f[i];
  const auto Hw = apply_operator(op, w);

  const std::size_t last = grid.index_at_or_below(0.9 * grid.r_max());
  double res = 0.0, scale = 0.0;
  for (std::size_t i = 0; i <= last && i + 1 < grid.size(); ++i) {
    res = std::max(res, std::abs(Hw[i]));
    scale = std::max(scale, std::abs(V[i] * w[i]));
  }
  ZeroModeClassification out;
  out.residual = scale > 0.0 ? res / scale : std::numeric_limits<double>::infinity();
  if (!(out.residual <= options.residual_tol))
    throw NumericError(ErrorKind::not_a_zero_mode,
                       "relative residual " + std::to_string(out.residual) + " exceeds tolerance");

  std::vector<double> vf(grid.size()), avf(grid.size()), absf(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double r2 = grid[i] * grid[i];
    vf[i] = V[i] * f[i] * r2;
    avf[i] = std::abs(vf[i]);
    absf[i] = std::abs(f[i]);
  }
  const double four_pi = 4.0 * std::numbers::pi;
  out.v_moment_scale = four_pi * integrate(grid, avf);
  out.v_integral = ell == 0 ? four_pi * integrate(grid, vf) : 0.0;

  std::vector<double> r_tail, f_tail;
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (grid[i] >= 0.5 * grid.r_max() && absf[i] > 0.0) {
      r_tail.push_back(grid[i]);
      f_tail.push_back(absf[i]);
    }
  out.tail_exponent = loglog_slope(r_tail, f_tail, 0.5 * grid.r_max(), grid.r_max());

  const bool monopole = std::abs(out.v_integral) > options.integral_tol * out.v_moment_scale;
  if (monopole && std::abs(out.tail_exponent + 1.0) <= options.exponent_tol) out.kind = ZeroEnergyKind::resonance;
  else if (!monopole && out.tail_exponent <= -2.0 + options.exponent_tol) out.kind = ZeroEnergyKind::eigenvalue;
  else throw NumericError(ErrorKind::not_a_zero_mode, "tail exponent and monopole moment are inconsistent");
  return out;
}

}  // namespace solitonlab
