#include "support.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

namespace krein::testing {

double uniform(double lo, double hi, Rng& rng) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Index uniform_index(Index lo, Index hi, Rng& rng) {
  return std::uniform_int_distribution<Index>(lo, hi)(rng);
}

Matrix gaussian(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix M(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i)
      M(i, j) = Complex(normal(rng), normal(rng)) / std::sqrt(2.0);
  return M;
}

Vector gaussian_vector(Index n, Rng& rng) { return gaussian(n, 1, rng); }

Matrix unitary(Index n, Rng& rng) {
  Eigen::HouseholderQR<Matrix> qr(gaussian(n, n, rng));
  return qr.householderQ() * Matrix::Identity(n, n);
}

Matrix orthonormal_cols(Index n, Index k, Rng& rng) {
  return unitary(n, rng).leftCols(k);
}

SignatureSpace diag_space(const std::vector<int>& signs) {
  const Index n = static_cast<Index>(signs.size());
  Matrix J = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) J(i, i) = signs[static_cast<std::size_t>(i)];
  return validate_signature(J);
}

SignatureSpace random_space(Index p, Index q, Rng& rng) {
  const Index n = p + q;
  if (p == 0 || q == 0)
    return validate_signature(p == 0 ? Matrix(-Matrix::Identity(n, n))
                                     : Matrix::Identity(n, n));
  const Matrix Q = unitary(n, rng);
  Matrix S = Matrix::Identity(n, n);
  for (Index i = p; i < n; ++i) S(i, i) = -1.0;
  return validate_signature(hermitized(Q * S * Q.adjoint()));
}

SignatureSpace random_space(Index n, Rng& rng) {
  const Index p = uniform_index(0, n, rng);
  return random_space(p, n - p, rng);
}

SignSplit sign_split(const SignatureSpace& H) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(H.J);
  SignSplit out;
  out.minus = es.eigenvectors().leftCols(H.q);
  out.plus = es.eigenvectors().rightCols(H.p);
  return out;
}

KreinMap random_selfadjoint(const SignatureSpace& H, Rng& rng) {
  const Matrix G = hermitized(gaussian(H.dim, H.dim, rng));
  return make_endo(H.J * G, H);
}

IlsqInstance feasible_ilsq(Index n, Index m, Rng& rng) {
  const SignatureSpace dom = random_space(n, rng);
  const SignatureSpace cod = random_space(m, rng);
  const Matrix U = unitary(m, rng);
  const Index k = uniform_index(1, std::min(n, m), rng);
  Vector lambda(m);
  for (Index i = 0; i < m; ++i)
    lambda(i) = i < k ? uniform(0.5, 2.0, rng) : uniform(-2.0, -0.5, rng);
  const Matrix G = hermitized(U * lambda.asDiagonal() * U.adjoint());
  const Matrix A = U.leftCols(k) * gaussian(k, n, rng);
  return make_ilsq(make_map(A, dom, cod), make_endo(cod.J * G, cod));
}

IlsqInstance inconsistent_ilsq(Index n, Rng& rng) {
  const SignatureSpace dom = random_space(n, rng);
  const SignatureSpace cod = diag_space({1, -1});
  Matrix A(2, n);
  const Matrix w = gaussian(1, n, rng);
  A.row(0) = w;
  A.row(1) = w;
  return make_ilsq(make_map(A, dom, cod),
                   make_endo(Matrix::Identity(2, 2), cod));
}

IlsqInstance nonneg_failing_ilsq(Index n, Rng& rng) {
  const SignatureSpace dom = random_space(n, rng);
  const Index p = uniform_index(0, 2, rng);
  const SignatureSpace cod = random_space(p, uniform_index(1, 2, rng), rng);
  const SignSplit split = sign_split(cod);
  const Matrix A = split.minus.col(0) * gaussian(1, n, rng);
  return make_ilsq(make_map(A, dom, cod),
                   make_endo(Matrix::Identity(cod.dim, cod.dim), cod));
}

IlsqInstance random_ilsq(Index n, Index m, Rng& rng) {
  const SignatureSpace dom = random_space(n, rng);
  const SignatureSpace cod = random_space(m, rng);
  return make_ilsq(make_map(gaussian(m, n, rng), dom, cod),
                   random_selfadjoint(cod, rng));
}

// ker V = span{e_1..e_k} exactly: V's leading k columns are zero, so the
// rank decision never sits on the eps boundary a dense projector would leave.
namespace {

Matrix with_zero_columns(const Matrix& rest, Index k) {
  const Index n = rest.rows();
  Matrix V = Matrix::Zero(n, n);
  V.rightCols(n - k) = rest;
  return V;
}

}  // namespace

SplineInstance feasible_spline(Index n, Index kernel_dim, Rng& rng) {
  const SignatureSpace H = random_space(n, rng);
  const SignSplit split = sign_split(H);
  const Index k = kernel_dim;

  const Matrix V = with_zero_columns(gaussian(n, n - k, rng), k);
  const Matrix M = gaussian(H.p, k, rng);
  Matrix T(n, n);
  T.leftCols(k) = split.plus * M;
  T.rightCols(n - k) = split.plus * (M * gaussian(k, n - k, rng)) +
                       split.minus * gaussian(H.q, n - k, rng);
  return make_spline(make_endo(T, H), make_endo(V, H));
}

SplineInstance negative_kernel_spline(Index n, Index kernel_dim, Rng& rng) {
  const Index q = uniform_index(1, n, rng);
  const SignatureSpace H = random_space(n - q, q, rng);
  const SignSplit split = sign_split(H);
  const Index k = kernel_dim;

  const Matrix V = with_zero_columns(gaussian(n, n - k, rng), k);
  Matrix Mq = gaussian(H.q, k, rng);
  if (Mq.norm() < 0.5) Mq *= 1.0 / Mq.norm();
  Matrix T(n, n);
  T.leftCols(k) = split.minus * Mq;
  T.rightCols(n - k) = gaussian(n, n - k, rng);
  return make_spline(make_endo(T, H), make_endo(V, H));
}

SplineInstance noncomplementable_spline(Index n, Rng& rng) {
  const Index q = uniform_index(1, n - 1, rng);
  const Index p = n - q;
  std::vector<int> signs(static_cast<std::size_t>(n), 1);
  for (Index i = p; i < n; ++i) signs[static_cast<std::size_t>(i)] = -1;
  const SignatureSpace H = diag_space(signs);
  const Index k = uniform_index(1, n - 1, rng);

  const Matrix V = with_zero_columns(gaussian(n, n - k, rng), k);
  Vector neutral = Vector::Zero(n);
  neutral(0) = 1.0;
  neutral(p) = 1.0;
  Matrix w = gaussian(k, 1, rng);
  w *= 1.0 / w.norm();
  Matrix T(n, n);
  T.leftCols(k) = neutral * w.adjoint();
  T.rightCols(n - k) = Vector::Unit(n, 0) * gaussian(1, n - k, rng);
  return make_spline(make_endo(T, H), make_endo(V, H));
}

SplineInstance random_spline(Index n, Rng& rng) {
  const SignatureSpace H = random_space(n, rng);
  return make_spline(make_endo(gaussian(n, n, rng), H),
                     make_endo(gaussian(n, n, rng), H));
}

SmoothingInstance feasible_smoothing(Index n, Rng& rng) {
  const SignatureSpace H = random_space(n, rng);
  const SignSplit split = sign_split(H);
  const Matrix T = split.plus * gaussian(H.p, n, rng);
  const Matrix V = split.minus * gaussian(H.q, n, rng);
  const double rho = -uniform(0.2, 3.0, rng);
  return make_smoothing(make_endo(T, H), make_endo(V, H), rho);
}

SmoothingInstance hilbert_smoothing(Index n, Rng& rng) {
  const SignatureSpace H = validate_signature(Matrix::Identity(n, n));
  return make_smoothing(make_endo(gaussian(n, n, rng), H),
                        make_endo(gaussian(n, n, rng), H),
                        uniform(0.2, 3.0, rng));
}

SmoothingInstance inconsistent_smoothing(Index n, Rng& rng) {
  const SignatureSpace H = random_space(n, rng);
  const Matrix T = gaussian(n, n, rng);
  return make_smoothing(make_endo(T, H), make_endo(T, H), -1.0);
}

SmoothingInstance random_smoothing(Index n, Rng& rng) {
  const SignatureSpace H = random_space(n, rng);
  const double rho = (uniform(0.0, 1.0, rng) < 0.5 ? -1.0 : 1.0) *
                     uniform(0.2, 3.0, rng);
  return make_smoothing(make_endo(gaussian(n, n, rng), H),
                        make_endo(gaussian(n, n, rng), H), rho);
}

}  // namespace krein::testing
