#include "krein/schur.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

namespace krein {

Matrix BlockDecomposition::reassemble() const {
  const Index n = S_frame.rows();
  Matrix blocks(n, n);
  blocks.topLeftCorner(k, k) = a;
  blocks.topRightCorner(k, n - k) = b;
  blocks.bottomLeftCorner(n - k, k) = b.adjoint();
  blocks.bottomRightCorner(n - k, n - k) = c;
  return S_frame * blocks * S_frame.adjoint();
}

BlockDecomposition block_decompose(const Matrix& M, const SubspaceBasis& S,
                                   const Tolerance& tol) {
  if (M.rows() != M.cols() || M.rows() != S.ambient.dim)
    fail(ErrorCode::DimensionMismatch, "block_decompose: matrix does not match the subspace's space");
  if (!is_hermitian(M, tol.residual_tol))
    fail(ErrorCode::NotHermitian, "block_decompose requires a Hermitian matrix");

  const Index n = M.rows();
  const Matrix Qs = S.dim() > 0 ? range_basis(S.basis, tol) : Matrix(n, 0);
  const Matrix Qp = nullspace_basis(Qs.adjoint(), tol);

  BlockDecomposition d;
  d.k = Qs.cols();
  d.S_frame = Matrix(n, n);
  d.S_frame << Qs, Qp;
  d.a = hermitized(Qs.adjoint() * M * Qs);
  d.b = Qs.adjoint() * M * Qp;
  d.c = hermitized(Qp.adjoint() * M * Qp);
  // compressed blocks that vanish in exact arithmetic carry only compression
  // noise; snap them so later rank and range decisions see true zeros
  const double scale = M.norm();
  if (negligible(d.a, scale)) d.a.setZero();
  if (negligible(d.b, scale)) d.b.setZero();
  if (negligible(d.c, scale)) d.c.setZero();
  return d;
}

bool is_weakly_complementable(const KreinMap& W, const SubspaceBasis& S,
                              const Tolerance& tol) {
  if (!is_krein_selfadjoint(W, tol))
    fail(ErrorCode::NotSelfadjoint, "is_weakly_complementable requires a Krein-selfadjoint operator");
  const BlockDecomposition d = block_decompose(W.dom.J * W.mat, S, tol);
  return solve_douglas(d.a, d.b, tol).solved();
}

bool is_complementable(const KreinMap& W, const SubspaceBasis& S,
                       const Tolerance& tol) {
  if (!is_krein_selfadjoint(W, tol))
    fail(ErrorCode::NotSelfadjoint, "is_complementable requires a Krein-selfadjoint operator");
  Matrix ws = W.mat * S.basis;
  if (negligible(ws, W.mat.norm())) ws.setZero();
  const Matrix companion = nullspace_basis(ws.adjoint() * S.ambient.J, tol);
  Matrix C(S.ambient.dim, S.dim() + companion.cols());
  C << S.basis, companion;
  return numerical_rank(C, tol) == S.ambient.dim;
}

namespace {

Matrix shorted_from_blocks(const BlockDecomposition& d, const Tolerance& tol) {
  const Index n = d.S_frame.rows();
  const Matrix Qp = d.S_frame.rightCols(n - d.k);
  const Matrix schur =
      hermitized(d.c - d.b.adjoint() * pinv(d.a, tol) * d.b);
  return Qp * schur * Qp.adjoint();
}

}  // namespace

Matrix hilbert_shorted(const Matrix& M, const SubspaceBasis& S, const Tolerance& tol) {
  const BlockDecomposition d = block_decompose(M, S, tol);
  if (!solve_douglas(d.a, d.b, tol).solved())
    fail(ErrorCode::NotWeaklyComplementable,
         "hilbert_shorted: ran b is not contained in ran a");
  return shorted_from_blocks(d, tol);
}

KreinMap krein_schur_complement(const KreinMap& W, const SubspaceBasis& S,
                                const Matrix& Jfs, const Tolerance& tol) {
  if (!is_fundamental_symmetry(Jfs, W.dom, tol))
    fail(ErrorCode::InvalidFundamentalSymmetry,
         "krein_schur_complement requires a fundamental symmetry");
  if (!is_weakly_complementable(W, S, tol))
    fail(ErrorCode::NotWeaklyComplementable,
         "krein_schur_complement requires S-weak complementability");

  // Unitarize the Hilbert space (H, <.,.>_{Jfs}) whose Gram is J*Jfs, short
  // there, and pull back.
  const Matrix G = hermitized(W.dom.J * Jfs);
  Eigen::SelfAdjointEigenSolver<Matrix> es(G);
  const Matrix R = es.operatorSqrt();
  const Matrix Rinv = es.operatorInverseSqrt();

  const Matrix Mt = hermitized(R * (Jfs * W.mat) * Rinv);
  // weak complementability was already certified in the Krein frame; the
  // transformed blocks inherit it exactly, so short without rechecking.
  // Conjugating by R amplifies rounding by cond(R), so widen the default
  // rank cutoff accordingly or exact zeros of the a-block turn into junk
  // singular values just above n*eps that pinv would invert.
  Tolerance tt = tol;
  if (tt.rank_tol <= 0.0) {
    const Index n = W.dom.dim;
    const double cond_r =
        std::sqrt(es.eigenvalues()(n - 1) / es.eigenvalues()(0));
    tt.rank_tol = 32.0 * static_cast<double>(n) *
                  std::numeric_limits<double>::epsilon() * cond_r;
  }
  const SubspaceBasis St{R * S.basis, W.dom};
  const Matrix shorted =
      Rinv * shorted_from_blocks(block_decompose(Mt, St, tt), tt) * R;
  return make_endo(Jfs * shorted, W.dom);
}

}  // namespace krein
