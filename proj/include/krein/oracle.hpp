#pragma once

#include <cstdint>
#include <functional>

#include "krein/types.hpp"

namespace krein::oracle {

// q(z) = z*Mz + 2Re(v*z) + c with M Hermitian.  Every pointwise problem in
// the library reduces to this after a J-Gram substitution.
struct QuadraticForm {
  Matrix M;
  Vector v;
  double c = 0.0;
};

struct QuadraticMin {
  Vector argmin;
  double value = 0.0;
};

// A minimum exists iff M is PSD and v lies in ran M; then argmin = -M^+ v
// (minimum norm) and value = c - v*M^+v.  Solved through an eigendecomposition
// of M, independent of the SVD paths used by the solvers under audit.
Outcome<QuadraticMin> quadratic_min(const QuadraticForm& q,
                                    const Tolerance& tol = {});

using VectorObjective = std::function<double(const Vector&)>;

// Evaluates the objective at n_samples seeded Gaussian perturbations of the
// candidate and returns min(objective(sample) - objective(candidate)).
// radius <= 0 selects the default 1 + ||candidate||.
double sample_minimality(const VectorObjective& objective,
                         const Vector& candidate, int n_samples, double radius,
                         std::uint64_t seed);

using MatrixObjective = std::function<double(const Matrix&)>;

// Central difference (F(X + step Y) - F(X - step Y)) / (2 step).
double fd_gradient(const MatrixObjective& F, const Matrix& X, const Matrix& Y,
                   double step);

}  // namespace krein::oracle
