#pragma once

#include <Eigen/Dense>

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace krein {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Index = Eigen::Index;

enum class ErrorCode {
  NotHermitian,
  NotInvolution,
  NotSelfadjoint,
  DimensionMismatch,
  InvalidFundamentalSymmetry,
  NotWeaklyComplementable,
  InvalidState,
  PathMismatch,
  ParseError,
  ValidationError,
};

const char* to_string(ErrorCode code);

class KreinError : public std::runtime_error {
public:
  KreinError(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) {
  throw KreinError(code, msg);
}

// Numerical policy shared by every operation.  rank_tol is a relative
// singular-value cutoff (0 selects max(m,n)*eps); psd_tol bounds how far an
// eigenvalue may dip below zero relative to the matrix scale; residual_tol
// bounds relative residuals in consistency tests.
struct Tolerance {
  double rank_tol = 0.0;
  double psd_tol = 1e-10;
  double residual_tol = 1e-10;
};

// Coordinate model of a Krein space: [x,y] = y*Jx with J a Hermitian
// involution.  The associated Hilbert product <x,y>_J = [Jx,y] = y*x is the
// standard one, so pseudoinverses and orthogonal projections below are the
// standard ones.
struct SignatureSpace {
  Index dim = 0;
  Matrix J;
  Index p = 0;  // inertia: #eigenvalues +1
  Index q = 0;  // inertia: #eigenvalues -1
};

struct KreinMap {
  Matrix mat;  // cod.dim x dom.dim
  SignatureSpace dom;
  SignatureSpace cod;

  Index rows() const { return mat.rows(); }
  Index cols() const { return mat.cols(); }
};

// n x k matrix of full column rank spanning a subspace; k = 0 encodes the
// zero subspace.
struct SubspaceBasis {
  Matrix basis;
  SignatureSpace ambient;

  Index dim() const { return basis.cols(); }
};

// Reasons attached to a theorem-backed "no solution exists" verdict.  These
// are successful determinations, not errors.
enum class Reason {
  None,
  NotNonnegative,
  Inconsistent,
  NotPositive,
  RangeHypothesisFailed,
  NotWeaklyComplementable,
  Indefinite,
};

const char* to_string(Reason r);

template <typename T>
struct Outcome {
  std::optional<T> value;
  Reason reason = Reason::None;

  bool solved() const { return value.has_value(); }
  const T& operator*() const { return *value; }
  const T* operator->() const { return &*value; }

  static Outcome ok(T v) { return Outcome{std::move(v), Reason::None}; }
  static Outcome no(Reason r) { return Outcome{std::nullopt, r}; }
};

}  // namespace krein
