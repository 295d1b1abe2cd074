#include "krein/core.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <limits>
#include <random>
#include <sstream>

namespace krein {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NotInvolution: return "NotInvolution";
    case ErrorCode::NotSelfadjoint: return "NotSelfadjoint";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidFundamentalSymmetry: return "InvalidFundamentalSymmetry";
    case ErrorCode::NotWeaklyComplementable: return "NotWeaklyComplementable";
    case ErrorCode::InvalidState: return "InvalidState";
    case ErrorCode::PathMismatch: return "PathMismatch";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
  }
  return "Unknown";
}

const char* to_string(Reason r) {
  switch (r) {
    case Reason::None: return "None";
    case Reason::NotNonnegative: return "NotNonnegative";
    case Reason::Inconsistent: return "Inconsistent";
    case Reason::NotPositive: return "NotPositive";
    case Reason::RangeHypothesisFailed: return "RangeHypothesisFailed";
    case Reason::NotWeaklyComplementable: return "NotWeaklyComplementable";
    case Reason::Indefinite: return "Indefinite";
  }
  return "Unknown";
}

namespace {

double rel_scale(const Matrix& M) { return std::max(M.norm(), 1.0); }

Eigen::JacobiSVD<Matrix> full_svd(const Matrix& A) {
  return Eigen::JacobiSVD<Matrix>(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
}

double cutoff_of(const Eigen::JacobiSVD<Matrix>& svd, Index rows, Index cols,
                 const Tolerance& tol) {
  if (svd.singularValues().size() == 0) return 0.0;
  const double smax = svd.singularValues()(0);
  const double rel =
      tol.rank_tol > 0.0
          ? tol.rank_tol
          : static_cast<double>(std::max(rows, cols)) *
                std::numeric_limits<double>::epsilon();
  return rel * smax;
}

Index rank_of(const Eigen::JacobiSVD<Matrix>& svd, double cutoff) {
  Index r = 0;
  for (Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > cutoff) ++r;
  return r;
}

}  // namespace

SignatureSpace validate_signature(const Matrix& J, const Tolerance& tol) {
  if (J.rows() != J.cols())
    fail(ErrorCode::DimensionMismatch, "signature matrix must be square");
  const Index n = J.rows();
  if ((J - J.adjoint()).norm() > tol.residual_tol * rel_scale(J))
    fail(ErrorCode::NotHermitian, "signature matrix is not Hermitian");
  const Matrix J2 = J * J;
  if ((J2 - Matrix::Identity(n, n)).norm() > tol.residual_tol * rel_scale(J2))
    fail(ErrorCode::NotInvolution, "signature matrix is not an involution");
  SignatureSpace H;
  H.dim = n;
  H.J = 0.5 * (J + J.adjoint());
  if (n > 0) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(H.J);
    for (Index i = 0; i < n; ++i)
      (es.eigenvalues()(i) > 0 ? H.p : H.q) += 1;
  }
  return H;
}

SignatureSpace hilbert_space(Index n) {
  SignatureSpace H;
  H.dim = n;
  H.J = Matrix::Identity(n, n);
  H.p = n;
  H.q = 0;
  return H;
}

KreinMap make_map(Matrix A, SignatureSpace dom, SignatureSpace cod) {
  if (A.rows() != cod.dim || A.cols() != dom.dim)
    fail(ErrorCode::DimensionMismatch, "operator matrix does not match its spaces");
  return KreinMap{std::move(A), std::move(dom), std::move(cod)};
}

KreinMap make_endo(Matrix A, SignatureSpace H) {
  SignatureSpace cod = H;
  return make_map(std::move(A), std::move(H), std::move(cod));
}

SubspaceBasis make_subspace(Matrix B, SignatureSpace ambient, const Tolerance& tol) {
  if (B.rows() != ambient.dim)
    fail(ErrorCode::DimensionMismatch, "basis rows do not match the ambient dimension");
  if (B.cols() > 0 && numerical_rank(B, tol) != B.cols())
    fail(ErrorCode::ValidationError, "subspace basis is not of full column rank");
  return SubspaceBasis{std::move(B), std::move(ambient)};
}

SubspaceBasis zero_subspace(SignatureSpace ambient) {
  Matrix B(ambient.dim, 0);
  return SubspaceBasis{std::move(B), std::move(ambient)};
}

SubspaceBasis range_of(const KreinMap& A, const Tolerance& tol) {
  return SubspaceBasis{range_basis(A.mat, tol), A.cod};
}

SubspaceBasis kernel_of(const KreinMap& A, const Tolerance& tol) {
  return SubspaceBasis{nullspace_basis(A.mat, tol), A.dom};
}

double rank_cutoff(const Matrix& A, const Tolerance& tol) {
  if (A.rows() == 0 || A.cols() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(A);
  return cutoff_of(svd, A.rows(), A.cols(), tol);
}

Index numerical_rank(const Matrix& A, const Tolerance& tol) {
  if (A.rows() == 0 || A.cols() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(A);
  return rank_of(svd, cutoff_of(svd, A.rows(), A.cols(), tol));
}

Matrix pinv(const Matrix& A, const Tolerance& tol) {
  if (A.rows() == 0 || A.cols() == 0) return Matrix::Zero(A.cols(), A.rows());
  Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double cut = cutoff_of(svd, A.rows(), A.cols(), tol);
  const auto& sv = svd.singularValues();
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(sv.size());
  for (Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cut) inv(i) = 1.0 / sv(i);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
}

Matrix range_basis(const Matrix& A, const Tolerance& tol) {
  if (A.rows() == 0 || A.cols() == 0) return Matrix(A.rows(), 0);
  auto svd = full_svd(A);
  const Index r = rank_of(svd, cutoff_of(svd, A.rows(), A.cols(), tol));
  return svd.matrixU().leftCols(r);
}

Matrix nullspace_basis(const Matrix& A, const Tolerance& tol) {
  if (A.cols() == 0) return Matrix(0, 0);
  if (A.rows() == 0) return Matrix::Identity(A.cols(), A.cols());
  auto svd = full_svd(A);
  const Index r = rank_of(svd, cutoff_of(svd, A.rows(), A.cols(), tol));
  return svd.matrixV().rightCols(A.cols() - r);
}

bool is_hermitian(const Matrix& M, double rel_tol) {
  if (M.rows() != M.cols()) return false;
  return (M - M.adjoint()).norm() <= rel_tol * rel_scale(M);
}

PsdReport psd_check(const Matrix& M, double psd_tol) {
  PsdReport rep;
  if (M.rows() == 0) return rep;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (M + M.adjoint()),
                                           Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  rep.min_eig = ev(0);
  rep.scale = std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
  rep.nonneg = rep.min_eig >= -psd_tol * std::max(rep.scale, 1.0);
  return rep;
}

DouglasResult solve_douglas(const Matrix& A, const Matrix& B, const Tolerance& tol) {
  if (A.rows() != B.rows())
    fail(ErrorCode::DimensionMismatch, "solve_douglas: row dimensions differ");
  DouglasResult res;
  const double bnorm = B.norm();
  if (bnorm == 0.0) {
    res.X = Matrix::Zero(A.cols(), B.cols());
    return res;
  }
  Matrix X = pinv(A, tol) * B;
  res.residual = (A * X - B).norm() / bnorm;
  if (res.residual <= tol.residual_tol) res.X = std::move(X);
  return res;
}

KreinMap indefinite_adjoint(const KreinMap& T) {
  return KreinMap{T.dom.J * T.mat.adjoint() * T.cod.J, T.cod, T.dom};
}

Complex bracket(const SignatureSpace& H, const Vector& x, const Vector& y) {
  return (y.adjoint() * H.J * x).value();
}

bool is_krein_selfadjoint(const KreinMap& W, const Tolerance& tol) {
  if (W.rows() != W.cols() || W.dom.dim != W.cod.dim)
    fail(ErrorCode::DimensionMismatch, "is_krein_selfadjoint: operator not square");
  return is_hermitian(W.dom.J * W.mat, tol.residual_tol);
}

bool is_krein_positive(const KreinMap& W, const Tolerance& tol) {
  if (!is_krein_selfadjoint(W, tol))
    fail(ErrorCode::NotSelfadjoint, "is_krein_positive requires a Krein-selfadjoint operator");
  const PsdReport rep = psd_check(W.dom.J * W.mat, tol.psd_tol);
  return rep.min_eig >= -tol.psd_tol * rep.scale;
}

bool is_w_nonnegative_subspace(const KreinMap& W, const SubspaceBasis& S,
                               const Tolerance& tol) {
  if (!is_krein_selfadjoint(W, tol))
    fail(ErrorCode::NotSelfadjoint, "is_w_nonnegative_subspace requires a Krein-selfadjoint weight");
  if (S.ambient.dim != W.dom.dim)
    fail(ErrorCode::DimensionMismatch, "subspace does not live in the weight's space");
  const Matrix G = S.basis.adjoint() * (S.ambient.J * W.mat) * S.basis;
  return psd_check(G, tol.psd_tol).nonneg;
}

SubspaceBasis orthogonal_companion(const SubspaceBasis& S, const Tolerance& tol) {
  Matrix comp = nullspace_basis(S.basis.adjoint() * S.ambient.J, tol);
  return SubspaceBasis{std::move(comp), S.ambient};
}

bool is_regular_subspace(const SubspaceBasis& S, const Tolerance& tol) {
  const SubspaceBasis comp = orthogonal_companion(S, tol);
  Matrix C(S.ambient.dim, S.dim() + comp.dim());
  C << S.basis, comp.basis;
  return numerical_rank(C, tol) == S.ambient.dim;
}

bool is_fundamental_symmetry(const Matrix& Jfs, const SignatureSpace& H,
                             const Tolerance& tol) {
  if (Jfs.rows() != H.dim || Jfs.cols() != H.dim) return false;
  const Matrix J2 = Jfs * Jfs;
  if ((J2 - Matrix::Identity(H.dim, H.dim)).norm() >
      tol.residual_tol * rel_scale(J2))
    return false;
  if ((H.J * Jfs.adjoint() * H.J - Jfs).norm() > tol.residual_tol * rel_scale(Jfs))
    return false;
  const Matrix G = H.J * Jfs;
  if (!is_hermitian(G, tol.residual_tol)) return false;
  if (H.dim == 0) return true;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (G + G.adjoint()),
                                           Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0) > tol.psd_tol;
}

Matrix random_fundamental_symmetry(const SignatureSpace& H, std::uint64_t seed) {
  if (H.p == 0 || H.q == 0) return H.J;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  Eigen::SelfAdjointEigenSolver<Matrix> es(H.J);
  const Matrix Em = es.eigenvectors().leftCols(H.q);   // eigenvalue -1 block
  const Matrix Ep = es.eigenvectors().rightCols(H.p);  // eigenvalue +1 block

  // Strict contraction K: the maximal positive subspace is the graph
  // {x + Kx : x in H+}, its companion the graph of K*.
  Matrix K(H.q, H.p);
  for (Index i = 0; i < K.rows(); ++i)
    for (Index j = 0; j < K.cols(); ++j)
      K(i, j) = Complex(gauss(rng), gauss(rng));
  std::uniform_real_distribution<double> unif(0.1, 0.9);
  const double target = unif(rng);
  const double top = Eigen::JacobiSVD<Matrix>(K).singularValues()(0);
  if (top > 0) K *= target / top;

  Matrix B(H.dim, H.dim);
  B << Ep + Em * K, Em + Ep * K.adjoint();
  Matrix D = Matrix::Zero(H.dim, H.dim);
  D.topLeftCorner(H.p, H.p).setIdentity();
  D.bottomRightCorner(H.q, H.q) = -Matrix::Identity(H.q, H.q);
  const Matrix Jfs = B * D * B.inverse();
  if (!is_fundamental_symmetry(Jfs, H, Tolerance{}))
    fail(ErrorCode::InvalidState,
         "random_fundamental_symmetry produced an invalid symmetry");
  return Jfs;
}

Complex j_trace(const KreinMap& T, const Matrix& Jfs, const Tolerance& tol) {
  if (T.rows() != T.cols() || T.dom.dim != T.cod.dim)
    fail(ErrorCode::DimensionMismatch, "j_trace requires a square operator");
  if (!is_fundamental_symmetry(Jfs, T.dom, tol))
    fail(ErrorCode::InvalidFundamentalSymmetry,
         "j_trace requires a fundamental symmetry of the operator's space");
  return (Jfs * T.mat).trace();
}

}  // namespace krein
