#pragma once

#include <cstdint>

#include "krein/core.hpp"

namespace krein {

struct SmoothingInstance {
  KreinMap T;  // on H
  KreinMap V;  // on H
  double rho = 1.0;  // nonzero
  Tolerance tol;
};

SmoothingInstance make_smoothing(KreinMap T, KreinMap V, double rho,
                                 Tolerance tol = {});

// (H x H, [.,.]_rho) carried by its Gram diag(J, rho J); rho J is not an
// involution for |rho| != 1, so the metric stays in Gram form.
struct AugmentedSpace {
  SignatureSpace base;
  double rho = 1.0;
  Matrix gram;  // 2n x 2n
};

struct Augmented {
  Matrix K;  // 2n x n, K h = (Th, Vh)
  AugmentedSpace space;
};

Augmented build_augmented(const SmoothingInstance& inst);

// K# = [T#, rho V#] as an n x 2n matrix (equals J K* Gram).
Matrix augmented_adjoint(const SmoothingInstance& inst);

// B0' = (0, B0) stacked.
Matrix augmented_rhs(const SmoothingInstance& inst, const Matrix& B0);

// T#T + rho V#V as an operator on H.
KreinMap smoothing_weight(const SmoothingInstance& inst);

// Krein-positivity of T#T + rho V#V plus ran V# in ran(T#T + rho V#V).
bool smoothing_feasible(const SmoothingInstance& inst);

struct SmoothingPoint {
  Vector x0;
  double value = 0.0;  // [Tx0,Tx0] + rho [Vx0-h0, Vx0-h0]
  double normal_residual = 0.0;
};

Outcome<SmoothingPoint> solve_smoothing_point(const SmoothingInstance& inst,
                                              const Vector& h0);

// Block weight ((W11, W12), (W12#, W22)) on H x H; must be
// [.,.]_rho-selfadjoint.
struct BlockWeight {
  KreinMap W11;
  KreinMap W12;
  KreinMap W22;
};

BlockWeight diag_blocks(KreinMap W11, KreinMap W22);

// Minimum-norm solution of (W11 + W12 A + rho A#W12# + rho A#W22 A) X
//   = W12 + rho A#W22  (Eq. AoptinvB).
Outcome<KreinMap> optimal_inverse(const KreinMap& A, const BlockWeight& W,
                                  double rho, const Tolerance& tol = {});

// Worst sampled margin of the rho-metric objective against the returned
// inverse; nonnegative (within tolerance) certifies optimality.
double optimal_inverse_margin(const KreinMap& A, const BlockWeight& W, double rho,
                              const KreinMap& G, int n_samples, std::uint64_t seed);

Outcome<KreinMap> smoothing_global_solution(const SmoothingInstance& inst);

struct SmoothingOperatorMin {
  KreinMap X0;
  double value = 0.0;
  double normal_residual = 0.0;
};

Outcome<SmoothingOperatorMin> operator_smoothing_min(const SmoothingInstance& inst,
                                                     const KreinMap& B0,
                                                     const Matrix& Jfs);

// F(X) = tr_J((TX)#TX) + rho tr_J((VX-B0)#(VX-B0)).
double smoothing_objective(const SmoothingInstance& inst, const Matrix& B0,
                           const Matrix& X, const Matrix& Jfs);

// DF(X)(Y) = 2 Re tr_J(Y#(T#TX + rho V#(VX - B0))).
double frechet_derivative(const SmoothingInstance& inst, const Matrix& B0,
                          const Matrix& X, const Matrix& Y, const Matrix& Jfs);

// Lemma "teo2" order certificate: the smallest eigenvalue, over n_samples
// sampled X, of J((KX-B0')#(KX-B0') - (KX0-B0')#(KX0-B0')).
double smoothing_order_margin(const SmoothingInstance& inst, const KreinMap& B0,
                              const Matrix& X0, int n_samples, std::uint64_t seed);

}  // namespace krein
