#include "krein/smoothing.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <utility>

#include <Eigen/Eigenvalues>

namespace krein {

namespace {

double real_checked(Complex z, double scale) {
  if (std::abs(z.imag()) > 1e-10 * std::max(1.0, scale))
    fail(ErrorCode::InvalidState, "smoothing objective value is not real");
  return z.real();
}

// Gram of the smoothing weight: J S = T*JT + rho V*JV.  The two terms can
// cancel (T = V, rho = -1), so the sum is snapped to zero when it falls below
// the rounding level of its parts.
Matrix smoothing_gram(const SmoothingInstance& inst) {
  const Matrix& J = inst.T.dom.J;
  Matrix Gs = hermitized(inst.T.mat.adjoint() * J * inst.T.mat +
                         inst.rho * inst.V.mat.adjoint() * J * inst.V.mat);
  if (negligible(Gs, inst.T.mat.squaredNorm() +
                         std::abs(inst.rho) * inst.V.mat.squaredNorm()))
    Gs.setZero();
  return Gs;
}

Matrix gaussian(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix M(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i)
      M(i, j) = Complex(normal(rng), normal(rng)) / std::sqrt(2.0);
  return M;
}

// J M(X) for the augmented residual KX - (0, B0); see smoothing_order_margin.
Matrix augmented_gram_form(const SmoothingInstance& inst, const Matrix& B0,
                           const Matrix& X) {
  const Matrix& J = inst.T.dom.J;
  const Matrix cross = inst.rho * X.adjoint() * inst.V.mat.adjoint() * J * B0;
  return Matrix(X.adjoint() * smoothing_gram(inst) * X - cross -
                cross.adjoint() + inst.rho * B0.adjoint() * J * B0);
}

void require_endo_on(const KreinMap& B0, const SignatureSpace& H,
                     const char* what) {
  if (B0.mat.rows() != H.dim || B0.mat.cols() != H.dim)
    fail(ErrorCode::DimensionMismatch,
         std::string(what) + ": B0 must act on the shared space");
}

}  // namespace

SmoothingInstance make_smoothing(KreinMap T, KreinMap V, double rho,
                                 Tolerance tol) {
  if (T.dom.dim != V.dom.dim || T.dom.dim != T.cod.dim || V.dom.dim != V.cod.dim)
    fail(ErrorCode::DimensionMismatch, "smoothing: T and V must act on one space");
  if (rho == 0.0 || !std::isfinite(rho))
    fail(ErrorCode::ValidationError, "smoothing: rho must be nonzero and finite");
  SmoothingInstance inst;
  inst.T = std::move(T);
  inst.V = std::move(V);
  inst.rho = rho;
  inst.tol = tol;
  return inst;
}

Augmented build_augmented(const SmoothingInstance& inst) {
  const Index n = inst.T.dom.dim;
  Augmented aug;
  aug.K.resize(2 * n, n);
  aug.K.topRows(n) = inst.T.mat;
  aug.K.bottomRows(n) = inst.V.mat;
  aug.space.base = inst.T.dom;
  aug.space.rho = inst.rho;
  aug.space.gram = Matrix::Zero(2 * n, 2 * n);
  aug.space.gram.topLeftCorner(n, n) = inst.T.dom.J;
  aug.space.gram.bottomRightCorner(n, n) = inst.rho * inst.T.dom.J;
  return aug;
}

Matrix augmented_adjoint(const SmoothingInstance& inst) {
  const Index n = inst.T.dom.dim;
  Matrix Ks(n, 2 * n);
  Ks.leftCols(n) = indefinite_adjoint(inst.T).mat;
  Ks.rightCols(n) = inst.rho * indefinite_adjoint(inst.V).mat;
  return Ks;
}

Matrix augmented_rhs(const SmoothingInstance& inst, const Matrix& B0) {
  const Index n = inst.T.dom.dim;
  if (B0.rows() != n) fail(ErrorCode::DimensionMismatch, "augmented_rhs: B0 rows");
  Matrix rhs = Matrix::Zero(2 * n, B0.cols());
  rhs.bottomRows(n) = B0;
  return rhs;
}

KreinMap smoothing_weight(const SmoothingInstance& inst) {
  return make_endo(inst.T.dom.J * smoothing_gram(inst), inst.T.dom);
}

bool smoothing_feasible(const SmoothingInstance& inst) {
  const Matrix Gs = smoothing_gram(inst);
  if (!psd_check(Gs, inst.tol.psd_tol).nonneg) return false;
  const Matrix& J = inst.T.dom.J;
  return solve_douglas(Gs, Matrix(inst.rho * inst.V.mat.adjoint() * J), inst.tol)
      .solved();
}

Outcome<SmoothingPoint> solve_smoothing_point(const SmoothingInstance& inst,
                                              const Vector& h0) {
  if (h0.size() != inst.V.cod.dim)
    fail(ErrorCode::DimensionMismatch, "smoothing: h0 has wrong size");
  const Matrix Gs = smoothing_gram(inst);
  if (!psd_check(Gs, inst.tol.psd_tol).nonneg)
    return Outcome<SmoothingPoint>::no(Reason::NotPositive);

  const Matrix& J = inst.T.dom.J;
  Vector rhs = inst.rho * inst.V.mat.adjoint() * J * h0;
  if (negligible(rhs, std::abs(inst.rho) * inst.V.mat.norm() * h0.norm()))
    rhs.setZero();
  const DouglasResult sys = solve_douglas(Gs, Matrix(rhs), inst.tol);
  if (!sys.solved()) return Outcome<SmoothingPoint>::no(Reason::Inconsistent);

  SmoothingPoint out;
  out.x0 = sys.X->col(0);
  const Vector tx = inst.T.mat * out.x0;
  const Vector err = inst.V.mat * out.x0 - h0;
  const Complex val = bracket(inst.T.cod, tx, tx) +
                      inst.rho * bracket(inst.V.cod, err, err);
  out.value = real_checked(val, tx.squaredNorm() + std::abs(inst.rho) * err.squaredNorm());
  out.normal_residual = sys.residual;
  return Outcome<SmoothingPoint>::ok(std::move(out));
}

BlockWeight diag_blocks(KreinMap W11, KreinMap W22) {
  BlockWeight W;
  W.W12 = make_map(Matrix::Zero(W11.cod.dim, W22.dom.dim), W22.dom, W11.cod);
  W.W11 = std::move(W11);
  W.W22 = std::move(W22);
  return W;
}

Outcome<KreinMap> optimal_inverse(const KreinMap& A, const BlockWeight& W,
                                  double rho, const Tolerance& tol) {
  if (rho == 0.0 || !std::isfinite(rho))
    fail(ErrorCode::ValidationError, "optimal_inverse: rho must be nonzero");
  const Index n = A.dom.dim;
  const Index m = A.cod.dim;
  if (W.W11.mat.rows() != n || W.W11.mat.cols() != n || W.W22.mat.rows() != m ||
      W.W22.mat.cols() != m || W.W12.mat.rows() != n || W.W12.mat.cols() != m)
    fail(ErrorCode::DimensionMismatch, "optimal_inverse: block sizes");

  // The assembled weight ((W11, W12), (W12#, W22)) must be selfadjoint for
  // [.,.]_rho, i.e. diag(J, rho J') times it Hermitian.
  const Matrix& Jd = A.dom.J;
  const Matrix& Jc = A.cod.J;
  const Matrix W21 = Jc * W.W12.mat.adjoint() * Jd;
  Matrix full(n + m, n + m);
  full.topLeftCorner(n, n) = Jd * W.W11.mat;
  full.topRightCorner(n, m) = Jd * W.W12.mat;
  full.bottomLeftCorner(m, n) = rho * Jc * W21;
  full.bottomRightCorner(m, m) = rho * Jc * W.W22.mat;
  if (!is_hermitian(full))
    fail(ErrorCode::ValidationError,
         "optimal_inverse: block weight is not selfadjoint for [.,.]_rho");

  const Matrix As = indefinite_adjoint(A).mat;
  Matrix omega = W.W11.mat + W.W12.mat * A.mat + rho * As * W21 +
                 rho * As * W.W22.mat * A.mat;
  const double omega_scale =
      W.W11.mat.norm() + W.W12.mat.norm() * A.mat.norm() +
      std::abs(rho) * As.norm() * (W21.norm() + W.W22.mat.norm() * A.mat.norm());
  if (negligible(omega, omega_scale)) omega.setZero();
  const KreinMap Omega = make_endo(std::move(omega), A.dom);
  if (!is_krein_selfadjoint(Omega, tol))
    fail(ErrorCode::InvalidState, "optimal_inverse: Omega lost selfadjointness");
  if (!psd_check(Matrix(Jd * Omega.mat), tol.psd_tol).nonneg)
    return Outcome<KreinMap>::no(Reason::NotPositive);

  Matrix rhs = W.W12.mat + rho * As * W.W22.mat;
  if (negligible(rhs, W.W12.mat.norm() +
                          std::abs(rho) * As.norm() * W.W22.mat.norm()))
    rhs.setZero();
  const DouglasResult sys = solve_douglas(Omega.mat, rhs, tol);
  if (!sys.solved()) return Outcome<KreinMap>::no(Reason::Inconsistent);
  return Outcome<KreinMap>::ok(make_map(*sys.X, A.cod, A.dom));
}

double optimal_inverse_margin(const KreinMap& A, const BlockWeight& W, double rho,
                              const KreinMap& G, int n_samples, std::uint64_t seed) {
  if (n_samples < 1)
    fail(ErrorCode::ValidationError, "optimal_inverse_margin: n_samples");
  if (G.mat.rows() != A.dom.dim || G.mat.cols() != A.cod.dim)
    fail(ErrorCode::DimensionMismatch, "optimal_inverse_margin: G shape");

  const Matrix& Jd = A.dom.J;
  const Matrix& Jc = A.cod.J;
  const Matrix W21 = Jc * W.W12.mat.adjoint() * Jd;
  const auto objective = [&](const Vector& x, const Vector& h) {
    const Vector e = A.mat * x - h;
    const Complex val = x.dot(Jd * (W.W11.mat * x + W.W12.mat * e)) +
                        rho * e.dot(Jc * (W21 * x + W.W22.mat * e));
    return val.real();
  };

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = std::numeric_limits<double>::infinity();
  for (int s = 0; s < n_samples; ++s) {
    const Vector h = gaussian(A.cod.dim, 1, rng);
    const Vector x0 = G.mat * h;
    const double u = unit(rng);
    const double sigma = (1.0 + x0.norm()) * u * u;
    const Vector x = x0 + sigma * Vector(gaussian(A.dom.dim, 1, rng));
    worst = std::min(worst, objective(x, h) - objective(x0, h));
  }
  return worst;
}

Outcome<KreinMap> smoothing_global_solution(const SmoothingInstance& inst) {
  const Matrix& J = inst.T.dom.J;
  const Matrix tg = hermitized(inst.T.mat.adjoint() * J * inst.T.mat);
  const KreinMap W11 = make_endo(J * tg, inst.T.dom);
  const KreinMap W22 = make_endo(Matrix::Identity(inst.T.dom.dim, inst.T.dom.dim),
                                 inst.T.dom);
  return optimal_inverse(inst.V, diag_blocks(W11, W22), inst.rho, inst.tol);
}

Outcome<SmoothingOperatorMin> operator_smoothing_min(const SmoothingInstance& inst,
                                                     const KreinMap& B0,
                                                     const Matrix& Jfs) {
  require_endo_on(B0, inst.T.dom, "operator_smoothing_min");
  const Matrix Gs = smoothing_gram(inst);
  if (!psd_check(Gs, inst.tol.psd_tol).nonneg)
    return Outcome<SmoothingOperatorMin>::no(Reason::NotPositive);

  const Matrix& J = inst.T.dom.J;
  Matrix rhs = inst.rho * inst.V.mat.adjoint() * J * B0.mat;
  if (negligible(rhs, std::abs(inst.rho) * inst.V.mat.norm() * B0.mat.norm()))
    rhs.setZero();
  const DouglasResult sys = solve_douglas(Gs, rhs, inst.tol);
  if (!sys.solved()) return Outcome<SmoothingOperatorMin>::no(Reason::Inconsistent);

  SmoothingOperatorMin out;
  out.X0 = make_endo(*sys.X, inst.T.dom);
  out.value = smoothing_objective(inst, B0.mat, out.X0.mat, Jfs);
  out.normal_residual = sys.residual;
  return Outcome<SmoothingOperatorMin>::ok(std::move(out));
}

double smoothing_objective(const SmoothingInstance& inst, const Matrix& B0,
                           const Matrix& X, const Matrix& Jfs) {
  const Index n = inst.T.dom.dim;
  if (X.rows() != n || X.cols() != n || B0.rows() != n || B0.cols() != n)
    fail(ErrorCode::DimensionMismatch, "smoothing_objective: operator shapes");
  const Matrix& J = inst.T.dom.J;
  const Matrix tx = inst.T.mat * X;
  const Matrix err = inst.V.mat * X - B0;
  const Complex val =
      j_trace(make_endo(Matrix(J * tx.adjoint() * J * tx), inst.T.dom), Jfs,
              inst.tol) +
      inst.rho * j_trace(make_endo(Matrix(J * err.adjoint() * J * err),
                                   inst.T.dom), Jfs, inst.tol);
  return real_checked(val, Jfs.norm() * (tx.squaredNorm() +
                                         std::abs(inst.rho) * err.squaredNorm()));
}

double frechet_derivative(const SmoothingInstance& inst, const Matrix& B0,
                          const Matrix& X, const Matrix& Y, const Matrix& Jfs) {
  const Index n = inst.T.dom.dim;
  if (X.rows() != n || X.cols() != n || Y.rows() != n || Y.cols() != n ||
      B0.rows() != n || B0.cols() != n)
    fail(ErrorCode::DimensionMismatch, "frechet_derivative: operator shapes");
  const Matrix& J = inst.T.dom.J;
  const Matrix grad = inst.T.mat.adjoint() * J * (inst.T.mat * X) +
                      inst.rho * inst.V.mat.adjoint() * J * (inst.V.mat * X - B0);
  // 2 Re tr_J(Y# Z) with Z = T#TX + rho V#(VX - B0) = J grad.
  return 2.0 *
         j_trace(make_endo(Matrix(J * Y.adjoint() * grad), inst.T.dom), Jfs,
                 inst.tol)
             .real();
}

double smoothing_order_margin(const SmoothingInstance& inst, const KreinMap& B0,
                              const Matrix& X0, int n_samples, std::uint64_t seed) {
  if (n_samples < 1)
    fail(ErrorCode::ValidationError, "smoothing_order_margin: n_samples");
  require_endo_on(B0, inst.T.dom, "smoothing_order_margin");
  const Index n = inst.T.dom.dim;
  const Matrix base = hermitized(augmented_gram_form(inst, B0.mat, X0));

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = std::numeric_limits<double>::infinity();
  for (int s = 0; s < n_samples; ++s) {
    const double u = unit(rng);
    const double sigma = (1.0 + X0.norm()) * u * u;
    const Matrix X = X0 + sigma * Matrix(gaussian(n, n, rng));
    const Matrix diff = hermitized(augmented_gram_form(inst, B0.mat, X)) - base;
    Eigen::SelfAdjointEigenSolver<Matrix> es(diff, Eigen::EigenvaluesOnly);
    worst = std::min(worst, es.eigenvalues().minCoeff());
  }
  return worst;
}

}  // namespace krein
