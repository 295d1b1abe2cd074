#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>

#include "krein/types.hpp"

namespace krein {

// ---- construction ----------------------------------------------------------

// Accepts J iff J = J* and J^2 = I within tolerance; records the inertia.
SignatureSpace validate_signature(const Matrix& J, const Tolerance& tol = {});

// J = I.
SignatureSpace hilbert_space(Index n);

KreinMap make_map(Matrix A, SignatureSpace dom, SignatureSpace cod);
KreinMap make_endo(Matrix A, SignatureSpace H);

// Validates full column rank (smallest singular value above the rank cutoff).
SubspaceBasis make_subspace(Matrix B, SignatureSpace ambient,
                            const Tolerance& tol = {});
SubspaceBasis zero_subspace(SignatureSpace ambient);

// Orthonormal basis of ran A / ker A.
SubspaceBasis range_of(const KreinMap& A, const Tolerance& tol = {});
SubspaceBasis kernel_of(const KreinMap& A, const Tolerance& tol = {});

// ---- dense utilities (standard geometry) -----------------------------------

// Absolute singular-value cutoff: rank_tol * sigma_max, with rank_tol
// defaulting to max(m,n) * machine epsilon.
double rank_cutoff(const Matrix& A, const Tolerance& tol = {});

Index numerical_rank(const Matrix& A, const Tolerance& tol = {});
Matrix pinv(const Matrix& A, const Tolerance& tol = {});
Matrix range_basis(const Matrix& A, const Tolerance& tol = {});
Matrix nullspace_basis(const Matrix& A, const Tolerance& tol = {});

bool is_hermitian(const Matrix& M, double rel_tol = 1e-10);

inline Matrix hermitized(const Matrix& M) { return 0.5 * (M + M.adjoint()); }

// True when an assembled product or sum is indistinguishable from the zero
// matrix at the rounding level of its operands.  Rank and range decisions on
// such a matrix would only resolve noise, so callers snap it to zero first.
inline bool negligible(const Matrix& M, double assembly_scale) {
  const double dim =
      static_cast<double>(std::max<Index>(std::max(M.rows(), M.cols()), 1));
  return M.norm() <=
         32.0 * dim * std::numeric_limits<double>::epsilon() * assembly_scale;
}

// Smallest eigenvalue of the hermitized matrix and the PSD verdict
// min_eig >= -psd_tol * max(||M||, 1).
struct PsdReport {
  bool nonneg = true;
  double min_eig = 0.0;
  double scale = 0.0;
};
PsdReport psd_check(const Matrix& M, double psd_tol);

// Douglas' lemma: AX = B is solvable iff ran B is contained in ran A, tested
// via ||(I - A A^+) B|| <= tol * ||B||; X is the minimum-norm solution A^+ B.
struct DouglasResult {
  std::optional<Matrix> X;
  double residual = 0.0;

  bool solved() const { return X.has_value(); }
};
DouglasResult solve_douglas(const Matrix& A, const Matrix& B,
                            const Tolerance& tol = {});

// ---- Krein primitives ------------------------------------------------------

// T# = J_dom T* J_cod; satisfies [Tx,y]_cod = [x,T#y]_dom.
KreinMap indefinite_adjoint(const KreinMap& T);

// Indefinite inner product [x,y] = y*Jx of the given space.
Complex bracket(const SignatureSpace& H, const Vector& x, const Vector& y);

bool is_krein_selfadjoint(const KreinMap& W, const Tolerance& tol = {});
bool is_krein_positive(const KreinMap& W, const Tolerance& tol = {});
bool is_w_nonnegative_subspace(const KreinMap& W, const SubspaceBasis& S,
                               const Tolerance& tol = {});

// S^{[perp]} = kernel of B*J.
SubspaceBasis orthogonal_companion(const SubspaceBasis& S,
                                   const Tolerance& tol = {});
bool is_regular_subspace(const SubspaceBasis& S, const Tolerance& tol = {});

// Jfs^2 = I, Jfs Krein-selfadjoint, and J*Jfs Hermitian positive definite.
bool is_fundamental_symmetry(const Matrix& Jfs, const SignatureSpace& H,
                             const Tolerance& tol = {});

// Seeded fundamental symmetry built from a strict-contraction graph of the
// maximal positive subspace; returns J itself when p*q = 0.
Matrix random_fundamental_symmetry(const SignatureSpace& H, std::uint64_t seed);

// tr_J(T) = tr(Jfs * T) = sum_n [T e_n, e_n] over any <.,.>_{Jfs}-orthonormal
// basis.  Jfs must pass is_fundamental_symmetry.
Complex j_trace(const KreinMap& T, const Matrix& Jfs, const Tolerance& tol = {});

}  // namespace krein
