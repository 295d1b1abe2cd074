#pragma once

#include <array>

#include "krein/core.hpp"
#include "krein/schur.hpp"

namespace krein {

struct IlsqInstance {
  KreinMap A;  // K -> H
  KreinMap W;  // Krein-selfadjoint on H
  Tolerance tol;
};

// Validates the Krein-selfadjointness of W and the shared codomain.
IlsqInstance make_ilsq(KreinMap A, KreinMap W, Tolerance tol = {});

struct IlssPoint {
  Vector u;                      // minimum-norm W-ILSS
  double value = 0.0;            // [W(Au-x), Au-x]
  double normal_residual = 0.0;  // ||A#W(Au-x)|| relative
  double min_eigenvalue = 0.0;   // of the range Gram, the nonnegativity witness
};

Outcome<IlssPoint> solve_ilss_point(const IlsqInstance& inst, const Vector& x);

// Affine parameterization of all normal-equation solutions G0 + kernel*Theta.
struct SolutionSet {
  Matrix particular;
  Matrix kernel;
};

struct IlsqReport {
  // Raw ingredients, each computed independently.
  bool ran_A_nonnegative = false;
  bool range_sum_full = false;           // ran A + [W(ran A)]^{[perp]} = H
  bool normal_solvable = false;          // A#WA X = A#W consistent
  bool pointwise_basis_solvable = false; // W-ILSS exists at every basis vector
  bool inverse_verified = false;         // candidate G audited by the oracle

  std::optional<KreinMap> w_inverse;  // minimum-Frobenius-norm W-inverse
  SolutionSet solution_set;
  double normal_residual = 0.0;
  double min_eigenvalue = 0.0;

  // Theorem items i)-iv); equal on every instance.
  std::array<bool, 4> four_conditions() const {
    return {pointwise_basis_solvable, range_sum_full && ran_A_nonnegative,
            normal_solvable && ran_A_nonnegative, inverse_verified};
  }
  bool solvable() const { return normal_solvable && ran_A_nonnegative; }
};

IlsqReport analyze_w_inverse(const IlsqInstance& inst);

struct OperatorMin {
  KreinMap X0;
  double value = 0.0;
  std::array<double, 2> two_path_values{};  // trace of residual form / of W_{/[ran A]}
};

// Prop PropA: min tr_J((AX-I)#W(AX-I)) computed along both paths; a
// disagreement beyond tolerance raises PathMismatch.
Outcome<OperatorMin> operator_ilsq_min(const IlsqInstance& inst, const Matrix& Jfs);

// With W = I: a W-inverse forces ran A to be a regular subspace.
bool check_regularity_consequence(const IlsqInstance& inst);

}  // namespace krein
