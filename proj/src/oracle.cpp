#include "krein/oracle.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace krein::oracle {

Outcome<QuadraticMin> quadratic_min(const QuadraticForm& q, const Tolerance& tol) {
  if (q.M.rows() != q.M.cols() || q.M.rows() != q.v.size())
    fail(ErrorCode::DimensionMismatch, "quadratic form dimensions are inconsistent");
  if ((q.M - q.M.adjoint()).norm() > 1e-12 * std::max(q.M.norm(), 1.0))
    fail(ErrorCode::NotHermitian, "quadratic form matrix must be Hermitian");
  const Index n = q.M.rows();
  if (n == 0) return Outcome<QuadraticMin>::ok({Vector(0), q.c});

  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (q.M + q.M.adjoint()));
  const auto& lam = es.eigenvalues();
  const Matrix& U = es.eigenvectors();
  const double top = std::max(std::abs(lam(0)), std::abs(lam(n - 1)));
  if (lam(0) < -tol.psd_tol * std::max(top, 1.0))
    return Outcome<QuadraticMin>::no(Reason::Indefinite);

  const double rel = tol.rank_tol > 0.0
                         ? tol.rank_tol
                         : static_cast<double>(n) * std::numeric_limits<double>::epsilon();
  const double cut = rel * top;
  const Vector w = U.adjoint() * q.v;
  Vector y = Vector::Zero(n);
  for (Index i = 0; i < n; ++i)
    if (lam(i) > cut) y(i) = -w(i) / lam(i);
  Vector z = U * y;
  const double vnorm = q.v.norm();
  if (vnorm > 0 && (q.M * z + q.v).norm() > tol.residual_tol * vnorm)
    return Outcome<QuadraticMin>::no(Reason::Inconsistent);

  const double value = q.c + (q.v.adjoint() * z).value().real();
  return Outcome<QuadraticMin>::ok({std::move(z), value});
}

double sample_minimality(const VectorObjective& objective, const Vector& candidate,
                         int n_samples, double radius, std::uint64_t seed) {
  if (n_samples < 1)
    fail(ErrorCode::ValidationError, "sample_minimality requires n_samples >= 1");
  const double base = objective(candidate);
  const double r = radius > 0.0 ? radius : 1.0 + candidate.norm();

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

  double worst = std::numeric_limits<double>::infinity();
  Vector z(candidate.size());
  for (int s = 0; s < n_samples; ++s) {
    const double u = unif(rng);
    const double sigma = r * u * u;  // bias toward local probes
    for (Index i = 0; i < z.size(); ++i)
      z(i) = candidate(i) + sigma * Complex(gauss(rng), gauss(rng)) * inv_sqrt2;
    worst = std::min(worst, objective(z) - base);
  }
  return worst;
}

double fd_gradient(const MatrixObjective& F, const Matrix& X, const Matrix& Y,
                   double step) {
  if (step <= 0.0) fail(ErrorCode::ValidationError, "fd_gradient requires step > 0");
  return (F(X + step * Y) - F(X - step * Y)) / (2.0 * step);
}

}  // namespace krein::oracle
