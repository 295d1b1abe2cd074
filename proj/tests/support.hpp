#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "krein/ilsq.hpp"
#include "krein/smoothing.hpp"
#include "krein/spline.hpp"

namespace krein::testing {

using Rng = std::mt19937_64;

double uniform(double lo, double hi, Rng& rng);
Index uniform_index(Index lo, Index hi, Rng& rng);  // inclusive bounds

Matrix gaussian(Index rows, Index cols, Rng& rng);
Vector gaussian_vector(Index n, Rng& rng);
Matrix unitary(Index n, Rng& rng);
Matrix orthonormal_cols(Index n, Index k, Rng& rng);

SignatureSpace diag_space(const std::vector<int>& signs);
SignatureSpace random_space(Index p, Index q, Rng& rng);
SignatureSpace random_space(Index n, Rng& rng);

// J-orthonormal bases of the +/- eigenspaces of J.
struct SignSplit {
  Matrix plus;   // n x p
  Matrix minus;  // n x q
};
SignSplit sign_split(const SignatureSpace& H);

KreinMap random_selfadjoint(const SignatureSpace& H, Rng& rng);

// A W-inverse exists: ran A spans strictly positive eigendirections of JW.
IlsqInstance feasible_ilsq(Index n, Index m, Rng& rng);
// Normal equation inconsistent: ran A neutral for W = I on an indefinite space.
IlsqInstance inconsistent_ilsq(Index n, Rng& rng);
// ran A not W-nonnegative.
IlsqInstance nonneg_failing_ilsq(Index n, Rng& rng);
IlsqInstance random_ilsq(Index n, Index m, Rng& rng);

// T(ker V) positive and T#T ker-V complementable by construction.
SplineInstance feasible_spline(Index n, Index kernel_dim, Rng& rng);
// A kernel direction with [Tz, Tz] < 0.
SplineInstance negative_kernel_spline(Index n, Index kernel_dim, Rng& rng);
// T(ker V) neutral and the cross block escapes: not weakly complementable.
SplineInstance noncomplementable_spline(Index n, Rng& rng);
SplineInstance random_spline(Index n, Rng& rng);

// rho < 0 with T positive-ranged and V negative-ranged: T#T + rho V#V > 0.
SmoothingInstance feasible_smoothing(Index n, Rng& rng);
// J = I, rho > 0.
SmoothingInstance hilbert_smoothing(Index n, Rng& rng);
// V = T, rho = -1: zero weight, nonzero right side.
SmoothingInstance inconsistent_smoothing(Index n, Rng& rng);
SmoothingInstance random_smoothing(Index n, Rng& rng);

}  // namespace krein::testing
