#pragma once

#include <array>

#include "krein/core.hpp"
#include "krein/schur.hpp"

namespace krein {

struct SplineInstance {
  KreinMap T;  // on H
  KreinMap V;  // on H
  Tolerance tol;
};

SplineInstance make_spline(KreinMap T, KreinMap V, Tolerance tol = {});

// T#T as an operator on H; its J-Gram T*JT is the Hermitian workhorse.
KreinMap spline_weight(const SplineInstance& inst);

struct SplineSolvability {
  bool kernel_nonnegative = false;  // T(ker V) nonnegative
  bool complementable = false;      // T#T is ker V complementable
  bool global_exists = false;
};

SplineSolvability spline_solvability(const SplineInstance& inst);

struct SplinePoint {
  Vector x0;                        // minimum-norm element of sp(h0)
  double value = 0.0;               // [T x0, T x0]
  double constraint_residual = 0.0; // ||V x0 - V h0||
  double companion_residual = 0.0;  // ||(TN)* J (T x0)||, Lemma certificate
};

Outcome<SplinePoint> solve_spline_point(const SplineInstance& inst, const Vector& h0);

// Global solution G: VGh = Vh and Gh in sp(h) for every h.
Outcome<KreinMap> spline_global_solution(const SplineInstance& inst);

struct SplineOperatorMin {
  KreinMap X0;  // V X0 = B0
  double value = 0.0;
  // Residual-form / Schur-complement traces; absent when T#T is not ker V
  // weakly complementable (the second path needs the shorted operator).
  std::optional<std::array<double, 2>> two_path_values;
  double constraint_residual = 0.0;
};

Outcome<SplineOperatorMin> operator_spline_min(const SplineInstance& inst,
                                               const KreinMap& B0,
                                               const Matrix& Jfs);

}  // namespace krein
