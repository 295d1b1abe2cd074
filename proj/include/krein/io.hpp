#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "krein/schur.hpp"
#include "krein/smoothing.hpp"

namespace krein::io {

using Json = nlohmann::ordered_json;

enum class ProblemType {
  Ilsq,
  Spline,
  Smoothing,
  Schur,
  OptimalInverse,
  Adjoint,
  Jtrace,
};

const char* to_string(ProblemType t);
std::optional<ProblemType> problem_type_from(const std::string& name);

struct Options {
  Tolerance tol;
  std::uint64_t seed = 0;
  int n_samples = 1000;
};

struct IlsqProblem {
  std::string dom, cod, A, W;
  Vector x;
};
struct SplineProblem {
  std::string space, T, V;
  Vector h0;
};
struct SmoothingProblem {
  std::string space, T, V;
  double rho = 1.0;
  Vector h0;
};
struct SchurProblem {
  std::string space, W;
  Matrix S;  // basis columns; [] encodes the zero subspace
};
struct OptInvProblem {
  std::string dom, cod, A, W11, W12, W22;
  double rho = 1.0;
};
struct AdjointProblem {
  std::string dom, cod, A;
};
struct JtraceProblem {
  std::string space, T, Jfs;  // Jfs empty selects J itself
};

using Payload = std::variant<IlsqProblem, SplineProblem, SmoothingProblem,
                             SchurProblem, OptInvProblem, AdjointProblem,
                             JtraceProblem>;

struct ProblemInstance {
  ProblemType type = ProblemType::Ilsq;
  Options options;
  std::map<std::string, SignatureSpace> spaces;
  std::map<std::string, Matrix> operators;
  Payload payload;
};

// Errors carry a dotted field path: ParseError for malformed structure,
// ValidationError for invariant breaches.
ProblemInstance parse_problem(const Json& file);
ProblemInstance parse_problem_text(const std::string& text);
Json serialize_problem(const ProblemInstance& inst);

enum class Status { Solved, NoSolution, InvalidInput };
const char* to_string(Status s);

struct ResultFile {
  Status status = Status::InvalidInput;
  Reason reason = Reason::None;
  std::string message;  // diagnostics for invalid_input
  ProblemType type = ProblemType::Ilsq;
  Options options;
  Json solution = Json::object();
  Json certificates = Json::object();
  std::vector<std::string> violations;  // certificate names outside tolerance

  Json to_json() const;
  int exit_code(bool strict) const;  // 0 / 2 / 3, 4 under strict violations
};

// Dispatches by type; never throws for valid instances, "no solution" is a
// certified verdict with exit code 2.
ResultFile run(const ProblemInstance& inst);
ResultFile invalid_result(const KreinError& err);

// Re-runs the independent oracle checks and appends margins; requires
// result.status == Solved.
ResultFile certify(const ProblemInstance& inst, ResultFile result);

// Canonical encoding: complex as [re, im], matrices as row-major nested
// arrays.
Json encode_complex(const Complex& z);
Json encode_vector(const Vector& v);
Json encode_matrix(const Matrix& M);
Vector decode_vector(const Json& node, const std::string& path);
Matrix decode_matrix(const Json& node, const std::string& path);

}  // namespace krein::io
