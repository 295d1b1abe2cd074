#include "krein/io.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "krein/ilsq.hpp"
#include "krein/oracle.hpp"
#include "krein/spline.hpp"

namespace krein::io {

namespace {

const Json& require(const Json& obj, const char* key, const std::string& path) {
  if (!obj.is_object())
    fail(ErrorCode::ParseError, path + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end())
    fail(ErrorCode::ParseError, path + "." + key + ": missing");
  return *it;
}

double require_number(const Json& node, const std::string& path) {
  if (!node.is_number()) fail(ErrorCode::ParseError, path + ": expected a number");
  return node.get<double>();
}

std::string require_string(const Json& node, const std::string& path) {
  if (!node.is_string()) fail(ErrorCode::ParseError, path + ": expected a string");
  return node.get<std::string>();
}

Complex decode_complex(const Json& node, const std::string& path) {
  if (!node.is_array() || node.size() != 2)
    fail(ErrorCode::ParseError, path + ": expected [re, im]");
  return Complex(require_number(node[0], path + "[0]"),
                 require_number(node[1], path + "[1]"));
}

std::string resolve_space(const ProblemInstance& inst, const Json& problem,
                          const char* key, const std::string& path) {
  const std::string name = require_string(require(problem, key, path),
                                          path + "." + key);
  if (inst.spaces.find(name) == inst.spaces.end())
    fail(ErrorCode::ValidationError,
         path + "." + key + ": unknown space '" + name + "'");
  return name;
}

std::string resolve_operator(const ProblemInstance& inst, const Json& problem,
                             const char* key, const std::string& path) {
  const std::string name = require_string(require(problem, key, path),
                                          path + "." + key);
  if (inst.operators.find(name) == inst.operators.end())
    fail(ErrorCode::ValidationError,
         path + "." + key + ": unknown operator '" + name + "'");
  return name;
}

const Matrix& shaped_operator(const ProblemInstance& inst, const std::string& name,
                              Index rows, Index cols, const std::string& path) {
  const Matrix& M = inst.operators.at(name);
  if (M.rows() != rows || M.cols() != cols)
    fail(ErrorCode::ValidationError,
         path + ": operator '" + name + "' is " + std::to_string(M.rows()) + "x" +
             std::to_string(M.cols()) + ", expected " + std::to_string(rows) +
             "x" + std::to_string(cols));
  return M;
}

void require_selfadjoint(const Matrix& W, const SignatureSpace& H,
                         const Tolerance& tol, const std::string& path) {
  if (!is_krein_selfadjoint(make_endo(W, H), tol))
    fail(ErrorCode::ValidationError,
         path + ": not selfadjoint for the indefinite metric");
}

double parse_rho(const Json& problem, const std::string& path) {
  const double rho = require_number(require(problem, "rho", path), path + ".rho");
  if (rho == 0.0 || !std::isfinite(rho))
    fail(ErrorCode::ValidationError, path + ".rho: must be nonzero and finite");
  return rho;
}

SignatureSpace parse_space(const Json& node, const std::string& path,
                           const Tolerance& tol) {
  const double dim_raw = require_number(require(node, "dim", path), path + ".dim");
  const Index dim = static_cast<Index>(dim_raw);
  if (dim_raw != static_cast<double>(dim) || dim < 1)
    fail(ErrorCode::ValidationError, path + ".dim: expected a positive integer");

  const Json& jnode = require(node, "J", path);
  Matrix J;
  if (jnode.is_object() && jnode.contains("diag")) {
    const Json& diag = jnode["diag"];
    if (!diag.is_array())
      fail(ErrorCode::ParseError, path + ".J.diag: expected an array");
    if (static_cast<Index>(diag.size()) != dim)
      fail(ErrorCode::ValidationError, path + ".J.diag: length must equal dim");
    J = Matrix::Zero(dim, dim);
    for (Index i = 0; i < dim; ++i) {
      const double s = require_number(diag[static_cast<std::size_t>(i)],
                                      path + ".J.diag");
      if (s != 1.0 && s != -1.0)
        fail(ErrorCode::ValidationError, path + ".J: diagonal entries must be +-1");
      J(i, i) = s;
    }
  } else if (jnode.is_object() && jnode.contains("dense")) {
    J = decode_matrix(jnode["dense"], path + ".J.dense");
    if (J.rows() != dim || J.cols() != dim)
      fail(ErrorCode::ValidationError, path + ".J.dense: shape must be dim x dim");
  } else {
    fail(ErrorCode::ParseError, path + ".J: expected {\"diag\": ...} or {\"dense\": ...}");
  }

  try {
    return validate_signature(J, tol);
  } catch (const KreinError& e) {
    fail(ErrorCode::ValidationError, path + ".J: " + e.what());
  }
}

Payload parse_payload(const ProblemInstance& inst, ProblemType type,
                      const Json& problem, const Tolerance& tol) {
  const std::string path = "problem";
  switch (type) {
    case ProblemType::Ilsq: {
      IlsqProblem p;
      p.dom = resolve_space(inst, problem, "dom", path);
      p.cod = resolve_space(inst, problem, "cod", path);
      const auto& dom = inst.spaces.at(p.dom);
      const auto& cod = inst.spaces.at(p.cod);
      p.A = resolve_operator(inst, problem, "A", path);
      shaped_operator(inst, p.A, cod.dim, dom.dim, path + ".A");
      p.W = resolve_operator(inst, problem, "W", path);
      require_selfadjoint(shaped_operator(inst, p.W, cod.dim, cod.dim, path + ".W"),
                          cod, tol, path + ".W");
      p.x = decode_vector(require(problem, "x", path), path + ".x");
      if (p.x.size() != cod.dim)
        fail(ErrorCode::ValidationError, path + ".x: length must equal cod dim");
      return p;
    }
    case ProblemType::Spline:
    case ProblemType::Smoothing: {
      const std::string space = resolve_space(inst, problem, "space", path);
      const auto& H = inst.spaces.at(space);
      const std::string T = resolve_operator(inst, problem, "T", path);
      shaped_operator(inst, T, H.dim, H.dim, path + ".T");
      const std::string V = resolve_operator(inst, problem, "V", path);
      shaped_operator(inst, V, H.dim, H.dim, path + ".V");
      Vector h0 = decode_vector(require(problem, "h0", path), path + ".h0");
      if (h0.size() != H.dim)
        fail(ErrorCode::ValidationError, path + ".h0: length must equal space dim");
      if (type == ProblemType::Spline) return SplineProblem{space, T, V, std::move(h0)};
      return SmoothingProblem{space, T, V, parse_rho(problem, path), std::move(h0)};
    }
    case ProblemType::Schur: {
      SchurProblem p;
      p.space = resolve_space(inst, problem, "space", path);
      const auto& H = inst.spaces.at(p.space);
      p.W = resolve_operator(inst, problem, "W", path);
      require_selfadjoint(shaped_operator(inst, p.W, H.dim, H.dim, path + ".W"),
                          H, tol, path + ".W");
      p.S = decode_matrix(require(problem, "S", path), path + ".S");
      if (p.S.size() == 0) {
        p.S = Matrix(H.dim, 0);
      } else if (p.S.rows() != H.dim) {
        fail(ErrorCode::ValidationError, path + ".S: rows must equal space dim");
      } else {
        try {
          make_subspace(p.S, H, tol);
        } catch (const KreinError& e) {
          fail(ErrorCode::ValidationError, path + ".S: " + e.what());
        }
      }
      return p;
    }
    case ProblemType::OptimalInverse: {
      OptInvProblem p;
      p.dom = resolve_space(inst, problem, "dom", path);
      p.cod = resolve_space(inst, problem, "cod", path);
      const auto& dom = inst.spaces.at(p.dom);
      const auto& cod = inst.spaces.at(p.cod);
      p.A = resolve_operator(inst, problem, "A", path);
      shaped_operator(inst, p.A, cod.dim, dom.dim, path + ".A");
      p.W11 = resolve_operator(inst, problem, "W11", path);
      require_selfadjoint(
          shaped_operator(inst, p.W11, dom.dim, dom.dim, path + ".W11"), dom, tol,
          path + ".W11");
      p.W12 = resolve_operator(inst, problem, "W12", path);
      const Matrix& W12 = shaped_operator(inst, p.W12, dom.dim, cod.dim,
                                          path + ".W12");
      p.W22 = resolve_operator(inst, problem, "W22", path);
      require_selfadjoint(
          shaped_operator(inst, p.W22, cod.dim, cod.dim, path + ".W22"), cod, tol,
          path + ".W22");
      p.rho = parse_rho(problem, path);
      if (p.rho != 1.0 && W12.norm() > 0)
        fail(ErrorCode::ValidationError,
             path + ".W12: block weight is not selfadjoint for [.,.]_rho "
                    "(needs rho = 1 or W12 = 0)");
      return p;
    }
    case ProblemType::Adjoint: {
      AdjointProblem p;
      p.dom = resolve_space(inst, problem, "dom", path);
      p.cod = resolve_space(inst, problem, "cod", path);
      p.A = resolve_operator(inst, problem, "A", path);
      shaped_operator(inst, p.A, inst.spaces.at(p.cod).dim,
                      inst.spaces.at(p.dom).dim, path + ".A");
      return p;
    }
    case ProblemType::Jtrace: {
      JtraceProblem p;
      p.space = resolve_space(inst, problem, "space", path);
      const auto& H = inst.spaces.at(p.space);
      p.T = resolve_operator(inst, problem, "T", path);
      shaped_operator(inst, p.T, H.dim, H.dim, path + ".T");
      if (problem.contains("Jfs")) {
        p.Jfs = resolve_operator(inst, problem, "Jfs", path);
        const Matrix& Jfs = shaped_operator(inst, p.Jfs, H.dim, H.dim,
                                            path + ".Jfs");
        if (!is_fundamental_symmetry(Jfs, H, tol))
          fail(ErrorCode::ValidationError,
               path + ".Jfs: not a fundamental symmetry of the space");
      }
      return p;
    }
  }
  fail(ErrorCode::ParseError, path + ".type: unknown problem type");
}

Options parse_options(const Json& file) {
  Options opt;
  if (!file.contains("options")) return opt;
  const Json& node = file["options"];
  if (!node.is_object()) fail(ErrorCode::ParseError, "options: expected an object");
  const auto number = [&](const char* key, double lo, double& out) {
    if (!node.contains(key)) return;
    out = require_number(node[key], std::string("options.") + key);
    if (out < lo || !std::isfinite(out))
      fail(ErrorCode::ValidationError, std::string("options.") + key + ": out of range");
  };
  number("rank_tol", 0.0, opt.tol.rank_tol);
  number("psd_tol", 0.0, opt.tol.psd_tol);
  number("residual_tol", 0.0, opt.tol.residual_tol);
  if (node.contains("seed")) {
    const Json& s = node["seed"];
    if (!s.is_number_integer() && !s.is_number_unsigned())
      fail(ErrorCode::ParseError, "options.seed: expected an integer");
    if (s.is_number_integer() && s.get<std::int64_t>() < 0)
      fail(ErrorCode::ValidationError, "options.seed: must be nonnegative");
    opt.seed = s.get<std::uint64_t>();
  }
  if (node.contains("n_samples")) {
    const Json& s = node["n_samples"];
    if (!s.is_number_integer())
      fail(ErrorCode::ParseError, "options.n_samples: expected an integer");
    opt.n_samples = s.get<int>();
    if (opt.n_samples < 1)
      fail(ErrorCode::ValidationError, "options.n_samples: must be >= 1");
  }
  return opt;
}

bool is_plain_signature_diagonal(const Matrix& J) {
  for (Index i = 0; i < J.rows(); ++i)
    for (Index j = 0; j < J.cols(); ++j) {
      const Complex z = J(i, j);
      if (i == j ? (z != Complex(1, 0) && z != Complex(-1, 0)) : z != Complex(0, 0))
        return false;
    }
  return true;
}

}  // namespace

const char* to_string(ProblemType t) {
  switch (t) {
    case ProblemType::Ilsq: return "ilsq";
    case ProblemType::Spline: return "spline";
    case ProblemType::Smoothing: return "smoothing";
    case ProblemType::Schur: return "schur";
    case ProblemType::OptimalInverse: return "optimal_inverse";
    case ProblemType::Adjoint: return "adjoint";
    case ProblemType::Jtrace: return "jtrace";
  }
  return "?";
}

std::optional<ProblemType> problem_type_from(const std::string& name) {
  for (ProblemType t : {ProblemType::Ilsq, ProblemType::Spline,
                        ProblemType::Smoothing, ProblemType::Schur,
                        ProblemType::OptimalInverse, ProblemType::Adjoint,
                        ProblemType::Jtrace})
    if (name == to_string(t)) return t;
  return std::nullopt;
}

const char* to_string(Status s) {
  switch (s) {
    case Status::Solved: return "solved";
    case Status::NoSolution: return "no_solution";
    case Status::InvalidInput: return "invalid_input";
  }
  return "?";
}

Json encode_complex(const Complex& z) { return Json::array({z.real(), z.imag()}); }

Json encode_vector(const Vector& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(encode_complex(v(i)));
  return out;
}

Json encode_matrix(const Matrix& M) {
  Json out = Json::array();
  for (Index i = 0; i < M.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < M.cols(); ++j) row.push_back(encode_complex(M(i, j)));
    out.push_back(row);
  }
  return out;
}

Vector decode_vector(const Json& node, const std::string& path) {
  if (!node.is_array()) fail(ErrorCode::ParseError, path + ": expected an array");
  Vector v(static_cast<Index>(node.size()));
  for (std::size_t i = 0; i < node.size(); ++i)
    v(static_cast<Index>(i)) =
        decode_complex(node[i], path + "[" + std::to_string(i) + "]");
  return v;
}

Matrix decode_matrix(const Json& node, const std::string& path) {
  if (!node.is_array()) fail(ErrorCode::ParseError, path + ": expected an array");
  const Index rows = static_cast<Index>(node.size());
  if (rows == 0) return Matrix(0, 0);
  const Json& first = node[0];
  if (!first.is_array())
    fail(ErrorCode::ParseError, path + "[0]: expected an array row");
  const Index cols = static_cast<Index>(first.size());
  Matrix M(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const Json& row = node[static_cast<std::size_t>(i)];
    const std::string rpath = path + "[" + std::to_string(i) + "]";
    if (!row.is_array() || static_cast<Index>(row.size()) != cols)
      fail(ErrorCode::ParseError, rpath + ": ragged matrix row");
    for (Index j = 0; j < cols; ++j)
      M(i, j) = decode_complex(row[static_cast<std::size_t>(j)],
                               rpath + "[" + std::to_string(j) + "]");
  }
  return M;
}

ProblemInstance parse_problem(const Json& file) {
  if (!file.is_object()) fail(ErrorCode::ParseError, "$: expected an object");
  const std::string field = require_string(require(file, "field", "$"), "field");
  if (field != "complex")
    fail(ErrorCode::ValidationError, "field: only \"complex\" is supported");

  ProblemInstance inst;
  inst.options = parse_options(file);

  const Json& spaces = require(file, "spaces", "$");
  if (!spaces.is_object() || spaces.empty())
    fail(ErrorCode::ParseError, "spaces: expected a non-empty object");
  for (const auto& [name, node] : spaces.items())
    inst.spaces.emplace(name, parse_space(node, "spaces." + name, inst.options.tol));

  if (file.contains("operators")) {
    const Json& ops = file["operators"];
    if (!ops.is_object()) fail(ErrorCode::ParseError, "operators: expected an object");
    for (const auto& [name, node] : ops.items())
      inst.operators.emplace(name, decode_matrix(node, "operators." + name));
  }

  const Json& problem = require(file, "problem", "$");
  const std::string type = require_string(require(problem, "type", "problem"),
                                          "problem.type");
  const auto parsed = problem_type_from(type);
  if (!parsed)
    fail(ErrorCode::ValidationError, "problem.type: unknown type '" + type + "'");
  inst.type = *parsed;
  inst.payload = parse_payload(inst, inst.type, problem, inst.options.tol);
  return inst;
}

ProblemInstance parse_problem_text(const std::string& text) {
  Json file;
  try {
    file = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::ParseError, std::string("$: ") + e.what());
  }
  return parse_problem(file);
}

Json serialize_problem(const ProblemInstance& inst) {
  Json out;
  out["field"] = "complex";

  Json spaces = Json::object();
  for (const auto& [name, H] : inst.spaces) {
    Json node;
    node["dim"] = H.dim;
    if (is_plain_signature_diagonal(H.J)) {
      Json diag = Json::array();
      for (Index i = 0; i < H.dim; ++i) diag.push_back(H.J(i, i).real());
      node["J"] = Json{{"diag", diag}};
    } else {
      node["J"] = Json{{"dense", encode_matrix(H.J)}};
    }
    spaces[name] = node;
  }
  out["spaces"] = spaces;

  Json ops = Json::object();
  for (const auto& [name, M] : inst.operators) ops[name] = encode_matrix(M);
  out["operators"] = ops;

  Json problem;
  problem["type"] = to_string(inst.type);
  switch (inst.type) {
    case ProblemType::Ilsq: {
      const auto& p = std::get<IlsqProblem>(inst.payload);
      problem["dom"] = p.dom;
      problem["cod"] = p.cod;
      problem["A"] = p.A;
      problem["W"] = p.W;
      problem["x"] = encode_vector(p.x);
      break;
    }
    case ProblemType::Spline: {
      const auto& p = std::get<SplineProblem>(inst.payload);
      problem["space"] = p.space;
      problem["T"] = p.T;
      problem["V"] = p.V;
      problem["h0"] = encode_vector(p.h0);
      break;
    }
    case ProblemType::Smoothing: {
      const auto& p = std::get<SmoothingProblem>(inst.payload);
      problem["space"] = p.space;
      problem["T"] = p.T;
      problem["V"] = p.V;
      problem["rho"] = p.rho;
      problem["h0"] = encode_vector(p.h0);
      break;
    }
    case ProblemType::Schur: {
      const auto& p = std::get<SchurProblem>(inst.payload);
      problem["space"] = p.space;
      problem["W"] = p.W;
      problem["S"] = encode_matrix(p.S);
      break;
    }
    case ProblemType::OptimalInverse: {
      const auto& p = std::get<OptInvProblem>(inst.payload);
      problem["dom"] = p.dom;
      problem["cod"] = p.cod;
      problem["A"] = p.A;
      problem["W11"] = p.W11;
      problem["W12"] = p.W12;
      problem["W22"] = p.W22;
      problem["rho"] = p.rho;
      break;
    }
    case ProblemType::Adjoint: {
      const auto& p = std::get<AdjointProblem>(inst.payload);
      problem["dom"] = p.dom;
      problem["cod"] = p.cod;
      problem["A"] = p.A;
      break;
    }
    case ProblemType::Jtrace: {
      const auto& p = std::get<JtraceProblem>(inst.payload);
      problem["space"] = p.space;
      problem["T"] = p.T;
      if (!p.Jfs.empty()) problem["Jfs"] = p.Jfs;
      break;
    }
  }
  out["problem"] = problem;

  Json options;
  options["rank_tol"] = inst.options.tol.rank_tol;
  options["psd_tol"] = inst.options.tol.psd_tol;
  options["residual_tol"] = inst.options.tol.residual_tol;
  options["seed"] = inst.options.seed;
  options["n_samples"] = inst.options.n_samples;
  out["options"] = options;
  return out;
}

ResultFile run(const ProblemInstance& inst) {
  ResultFile out;
  out.type = inst.type;
  out.options = inst.options;
  const Tolerance& tol = inst.options.tol;
  try {
    switch (inst.type) {
      case ProblemType::Ilsq: {
        const auto& p = std::get<IlsqProblem>(inst.payload);
        const auto& dom = inst.spaces.at(p.dom);
        const auto& cod = inst.spaces.at(p.cod);
        const IlsqInstance ii = make_ilsq(make_map(inst.operators.at(p.A), dom, cod),
                                          make_endo(inst.operators.at(p.W), cod), tol);
        const auto pt = solve_ilss_point(ii, p.x);
        if (!pt.solved()) {
          out.status = Status::NoSolution;
          out.reason = pt.reason;
          break;
        }
        out.status = Status::Solved;
        out.solution["u"] = encode_vector(pt->u);
        out.solution["value"] = pt->value;
        out.certificates["normal_residual"] = pt->normal_residual;
        out.certificates["min_eigenvalue"] = pt->min_eigenvalue;
        break;
      }
      case ProblemType::Spline: {
        const auto& p = std::get<SplineProblem>(inst.payload);
        const auto& H = inst.spaces.at(p.space);
        const SplineInstance si = make_spline(make_endo(inst.operators.at(p.T), H),
                                              make_endo(inst.operators.at(p.V), H),
                                              tol);
        const auto pt = solve_spline_point(si, p.h0);
        if (!pt.solved()) {
          out.status = Status::NoSolution;
          out.reason = pt.reason;
          break;
        }
        out.status = Status::Solved;
        out.solution["x0"] = encode_vector(pt->x0);
        out.solution["value"] = pt->value;
        out.certificates["constraint_residual"] = pt->constraint_residual;
        out.certificates["companion_residual"] = pt->companion_residual;
        break;
      }
      case ProblemType::Smoothing: {
        const auto& p = std::get<SmoothingProblem>(inst.payload);
        const auto& H = inst.spaces.at(p.space);
        const SmoothingInstance si =
            make_smoothing(make_endo(inst.operators.at(p.T), H),
                           make_endo(inst.operators.at(p.V), H), p.rho, tol);
        const Matrix gram = H.J * smoothing_weight(si).mat;
        out.certificates["min_eigenvalue"] = psd_check(gram, tol.psd_tol).min_eig;
        const auto pt = solve_smoothing_point(si, p.h0);
        if (!pt.solved()) {
          out.status = Status::NoSolution;
          out.reason = pt.reason;
          break;
        }
        out.status = Status::Solved;
        out.solution["x0"] = encode_vector(pt->x0);
        out.solution["value"] = pt->value;
        out.certificates["normal_residual"] = pt->normal_residual;
        break;
      }
      case ProblemType::Schur: {
        const auto& p = std::get<SchurProblem>(inst.payload);
        const auto& H = inst.spaces.at(p.space);
        const KreinMap W = make_endo(inst.operators.at(p.W), H);
        const SubspaceBasis S = p.S.cols() == 0 ? zero_subspace(H)
                                                : make_subspace(p.S, H, tol);
        if (!is_weakly_complementable(W, S, tol)) {
          out.status = Status::NoSolution;
          out.reason = Reason::NotWeaklyComplementable;
          break;
        }
        const KreinMap R = krein_schur_complement(W, S, H.J, tol);
        out.status = Status::Solved;
        out.solution["schur_complement"] = encode_matrix(R.mat);
        const double scale = 1.0 + R.mat.norm();
        out.certificates["range_containment_residual"] =
            S.dim() == 0 ? 0.0 : (S.basis.adjoint() * H.J * R.mat).norm() / scale;
        break;
      }
      case ProblemType::OptimalInverse: {
        const auto& p = std::get<OptInvProblem>(inst.payload);
        const auto& dom = inst.spaces.at(p.dom);
        const auto& cod = inst.spaces.at(p.cod);
        const KreinMap A = make_map(inst.operators.at(p.A), dom, cod);
        const BlockWeight W{make_endo(inst.operators.at(p.W11), dom),
                            make_map(inst.operators.at(p.W12), cod, dom),
                            make_endo(inst.operators.at(p.W22), cod)};
        const auto g = optimal_inverse(A, W, p.rho, tol);
        if (!g.solved()) {
          out.status = Status::NoSolution;
          out.reason = g.reason;
          break;
        }
        out.status = Status::Solved;
        out.solution["G"] = encode_matrix(g->mat);
        break;
      }
      case ProblemType::Adjoint: {
        const auto& p = std::get<AdjointProblem>(inst.payload);
        const KreinMap A = make_map(inst.operators.at(p.A), inst.spaces.at(p.dom),
                                    inst.spaces.at(p.cod));
        const KreinMap As = indefinite_adjoint(A);
        out.status = Status::Solved;
        out.solution["adjoint"] = encode_matrix(As.mat);
        out.certificates["adjoint_identity_residual"] =
            (A.cod.J * A.mat - As.mat.adjoint() * A.dom.J).norm() /
            (1.0 + A.mat.norm());
        break;
      }
      case ProblemType::Jtrace: {
        const auto& p = std::get<JtraceProblem>(inst.payload);
        const auto& H = inst.spaces.at(p.space);
        const Matrix& Jfs = p.Jfs.empty() ? H.J : inst.operators.at(p.Jfs);
        const Complex tr = j_trace(make_endo(inst.operators.at(p.T), H), Jfs, tol);
        out.status = Status::Solved;
        out.solution["value"] = encode_complex(tr);
        break;
      }
    }
  } catch (const KreinError& e) {
    out.status = Status::InvalidInput;
    out.solution = Json::object();
    out.message = std::string(to_string(e.code())) + ": " + e.what();
  }
  return out;
}

ResultFile invalid_result(const KreinError& err) {
  ResultFile out;
  out.status = Status::InvalidInput;
  out.message = std::string(to_string(err.code())) + ": " + err.what();
  return out;
}

ResultFile certify(const ProblemInstance& inst, ResultFile result) {
  if (result.status != Status::Solved)
    fail(ErrorCode::InvalidState, "certify requires a solved result");
  const Tolerance& tol = inst.options.tol;
  const int n_samples = inst.options.n_samples;
  const std::uint64_t seed = inst.options.seed;
  result.certificates["seed"] = seed;
  result.certificates["n_samples"] = n_samples;

  const auto note = [&result](const char* name, double val, bool ok) {
    result.certificates[name] = val;
    if (!ok) result.violations.push_back(name);
  };

  switch (inst.type) {
    case ProblemType::Ilsq: {
      const auto& p = std::get<IlsqProblem>(inst.payload);
      const auto& cod = inst.spaces.at(p.cod);
      const Matrix& A = inst.operators.at(p.A);
      const Matrix G = cod.J * inst.operators.at(p.W);
      const Vector u = decode_vector(result.solution["u"], "solution.u");
      const Vector x = p.x;
      const auto objective = [&](const Vector& v) {
        const Vector r = A * v - x;
        return Complex(r.dot(G * r)).real();
      };
      const double value = result.solution["value"].get<double>();
      const double margin = oracle::sample_minimality(objective, u, n_samples,
                                                      0.0, seed);
      note("worst_margin", margin, margin >= -1e-8 * (1.0 + std::abs(value)));
      break;
    }
    case ProblemType::Spline: {
      const auto& p = std::get<SplineProblem>(inst.payload);
      const auto& H = inst.spaces.at(p.space);
      const Matrix& T = inst.operators.at(p.T);
      const Matrix N = nullspace_basis(inst.operators.at(p.V), tol);
      const Vector x0 = decode_vector(result.solution["x0"], "solution.x0");
      const auto objective = [&](const Vector& z) {
        const Vector tx = T * (x0 + N * z);
        return Complex(tx.dot(H.J * tx)).real();
      };
      const double value = result.solution["value"].get<double>();
      const double margin = oracle::sample_minimality(
          objective, Vector::Zero(N.cols()), n_samples, 0.0, seed);
      note("worst_margin", margin, margin >= -1e-8 * (1.0 + std::abs(value)));
      break;
    }
    case ProblemType::Smoothing: {
      const auto& p = std::get<SmoothingProblem>(inst.payload);
      const auto& H = inst.spaces.at(p.space);
      const Matrix& T = inst.operators.at(p.T);
      const Matrix& V = inst.operators.at(p.V);
      const Vector x0 = decode_vector(result.solution["x0"], "solution.x0");
      const auto objective = [&](const Vector& v) {
        const Vector tx = T * v;
        const Vector err = V * v - p.h0;
        return Complex(tx.dot(H.J * tx) + p.rho * err.dot(H.J * err)).real();
      };
      const double value = result.solution["value"].get<double>();
      const double margin = oracle::sample_minimality(objective, x0, n_samples,
                                                      0.0, seed);
      note("worst_margin", margin, margin >= -1e-8 * (1.0 + std::abs(value)));
      break;
    }
    case ProblemType::Schur: {
      const auto& p = std::get<SchurProblem>(inst.payload);
      const auto& H = inst.spaces.at(p.space);
      const KreinMap W = make_endo(inst.operators.at(p.W), H);
      const SubspaceBasis S = p.S.cols() == 0 ? zero_subspace(H)
                                              : make_subspace(p.S, H, tol);
      const Matrix base = decode_matrix(result.solution["schur_complement"],
                                        "solution.schur_complement");
      const double scale = 1.0 + base.cwiseAbs().maxCoeff();
      double worst = 0.0;
      for (int i = 0; i < 5; ++i) {
        const Matrix Jfs = random_fundamental_symmetry(H, seed + 1 + i);
        const Matrix Ri = krein_schur_complement(W, S, Jfs, tol).mat;
        worst = std::max(worst, (Ri - base).cwiseAbs().maxCoeff() / scale);
      }
      note("jfs_agreement", worst, worst <= 1e-8);
      const double rc = result.certificates["range_containment_residual"].get<double>();
      note("range_containment_residual", rc, rc <= 1e-10);
      break;
    }
    case ProblemType::OptimalInverse: {
      const auto& p = std::get<OptInvProblem>(inst.payload);
      const auto& dom = inst.spaces.at(p.dom);
      const auto& cod = inst.spaces.at(p.cod);
      const KreinMap A = make_map(inst.operators.at(p.A), dom, cod);
      const BlockWeight W{make_endo(inst.operators.at(p.W11), dom),
                          make_map(inst.operators.at(p.W12), cod, dom),
                          make_endo(inst.operators.at(p.W22), cod)};
      const KreinMap G = make_map(decode_matrix(result.solution["G"], "solution.G"),
                                  cod, dom);
      const double margin = optimal_inverse_margin(A, W, p.rho, G, n_samples, seed);
      note("worst_margin", margin, margin >= -1e-8 * (1.0 + G.mat.norm()));
      break;
    }
    case ProblemType::Adjoint: {
      const double r =
          result.certificates["adjoint_identity_residual"].get<double>();
      note("adjoint_identity_residual", r, r <= 1e-10);
      break;
    }
    case ProblemType::Jtrace: {
      const auto& p = std::get<JtraceProblem>(inst.payload);
      const auto& H = inst.spaces.at(p.space);
      const Matrix& T = inst.operators.at(p.T);
      const Matrix& Jfs = p.Jfs.empty() ? H.J : inst.operators.at(p.Jfs);
      const Matrix G = hermitized(H.J * Jfs);
      Eigen::SelfAdjointEigenSolver<Matrix> es(G);
      const Matrix B = es.operatorInverseSqrt();
      Complex sum(0, 0);
      for (Index k = 0; k < H.dim; ++k) {
        const Vector b = B.col(k);
        sum += b.dot(H.J * (T * b));
      }
      const Complex tr = decode_complex(result.solution["value"], "solution.value");
      const double resid = std::abs(sum - tr) / (1.0 + std::abs(tr));
      note("basis_sum_residual", resid, resid <= 1e-8);
      break;
    }
  }
  return result;
}

Json ResultFile::to_json() const {
  Json out;
  out["tool"] = "kreinsolve";
  out["version"] = KREINLSQ_VERSION;
  out["problem_type"] = io::to_string(type);
  out["status"] = io::to_string(status);
  if (status == Status::NoSolution) out["reason"] = krein::to_string(reason);
  if (!message.empty()) out["message"] = message;
  if (status == Status::Solved) out["solution"] = solution;
  out["certificates"] = certificates;
  out["violations"] = violations;
  Json opts;
  opts["rank_tol"] = options.tol.rank_tol;
  opts["psd_tol"] = options.tol.psd_tol;
  opts["residual_tol"] = options.tol.residual_tol;
  opts["seed"] = options.seed;
  opts["n_samples"] = options.n_samples;
  out["options"] = opts;
  return out;
}

int ResultFile::exit_code(bool strict) const {
  switch (status) {
    case Status::Solved: return strict && !violations.empty() ? 4 : 0;
    case Status::NoSolution: return 2;
    case Status::InvalidInput: return 3;
  }
  return 3;
}

}  // namespace krein::io
