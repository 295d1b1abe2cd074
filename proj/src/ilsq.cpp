#include "krein/ilsq.hpp"

#include <Eigen/QR>

#include <cmath>

#include "krein/oracle.hpp"

namespace krein {

namespace {

// Hermitian reduction of the instance: the objective [W(Au-x), Au-x] equals
// u*Mu + 2Re(v*u) + c with M = A*(JW)A, v = -A*(JW)x, c = x*(JW)x.
Matrix weight_gram(const IlsqInstance& inst) {
  return inst.A.cod.J * inst.W.mat;
}

Matrix normal_matrix(const IlsqInstance& inst) {
  Matrix M = hermitized(inst.A.mat.adjoint() * weight_gram(inst) * inst.A.mat);
  if (negligible(M, inst.A.mat.squaredNorm() * inst.W.mat.norm())) M.setZero();
  return M;
}

// A*(JW), the shared right-hand side of the normal equations; neutral ranges
// cancel inside the contraction, so the assembled matrix is snapped when it
// sits below the rounding level of its factors.
Matrix normal_rhs(const IlsqInstance& inst) {
  Matrix N = inst.A.mat.adjoint() * weight_gram(inst);
  if (negligible(N, inst.A.mat.norm() * inst.W.mat.norm())) N.setZero();
  return N;
}

double real_part_checked(Complex z, double scale) {
  if (std::abs(z.imag()) > 1e-10 * std::max(1.0, scale))
    fail(ErrorCode::InvalidState, "indefinite objective value is not real");
  return z.real();
}

}  // namespace

IlsqInstance make_ilsq(KreinMap A, KreinMap W, Tolerance tol) {
  if (A.cod.dim != W.dom.dim)
    fail(ErrorCode::DimensionMismatch, "ilsq: A's codomain must carry the weight");
  IlsqInstance inst{std::move(A), std::move(W), tol};
  if (!is_krein_selfadjoint(inst.W, inst.tol))
    fail(ErrorCode::NotSelfadjoint, "ilsq: weight must be Krein-selfadjoint");
  return inst;
}

Outcome<IlssPoint> solve_ilss_point(const IlsqInstance& inst, const Vector& x) {
  if (x.size() != inst.A.cod.dim)
    fail(ErrorCode::DimensionMismatch, "solve_ilss_point: x has the wrong dimension");

  const SubspaceBasis ranA = range_of(inst.A, inst.tol);
  const Matrix gram =
      ranA.basis.adjoint() * weight_gram(inst) * ranA.basis;
  const PsdReport rep = psd_check(gram, inst.tol.psd_tol);
  if (!rep.nonneg) return Outcome<IlssPoint>::no(Reason::NotNonnegative);

  const Matrix M = normal_matrix(inst);
  Vector b = inst.A.mat.adjoint() * (weight_gram(inst) * x);
  if (negligible(b, inst.A.mat.norm() * inst.W.mat.norm() * x.norm()))
    b.setZero();
  const DouglasResult sys = solve_douglas(M, b, inst.tol);
  if (!sys.solved()) return Outcome<IlssPoint>::no(Reason::Inconsistent);

  IlssPoint out;
  out.u = *sys.X;
  const Vector r = inst.A.mat * out.u - x;
  out.value = real_part_checked(bracket(inst.A.cod, inst.W.mat * r, r),
                                r.squaredNorm() * inst.W.mat.norm());
  out.normal_residual = sys.residual;
  out.min_eigenvalue = rep.min_eig;
  return Outcome<IlssPoint>::ok(std::move(out));
}

IlsqReport analyze_w_inverse(const IlsqInstance& inst) {
  IlsqReport rep;
  const Index n = inst.A.cod.dim;
  const SubspaceBasis ranA = range_of(inst.A, inst.tol);
  const Matrix JW = weight_gram(inst);

  // (nonnegativity, shared hypothesis of items i), iii), iv))
  const Matrix range_gram = ranA.basis.adjoint() * JW * ranA.basis;
  const PsdReport psd = psd_check(range_gram, inst.tol.psd_tol);
  rep.ran_A_nonnegative = psd.nonneg;
  rep.min_eigenvalue = psd.min_eig;

  // ii) geometric route: ran A + [W(ran A)]^{[perp]} = H by a rank count.
  Matrix wran = inst.W.mat * ranA.basis;
  if (negligible(wran, inst.W.mat.norm())) wran.setZero();
  const Matrix companion =
      nullspace_basis(wran.adjoint() * inst.A.cod.J, inst.tol);
  Matrix sum(n, ranA.dim() + companion.cols());
  sum << ranA.basis, companion;
  rep.range_sum_full = numerical_rank(sum, inst.tol) == n;

  // iii) normal equation A#WA X = A#W through Douglas' lemma.
  const Matrix M = normal_matrix(inst);
  const Matrix N = normal_rhs(inst);
  const DouglasResult normal = solve_douglas(M, N, inst.tol);
  rep.normal_solvable = normal.solved();
  rep.normal_residual = normal.residual;

  // i) pointwise solvability over the standard basis.
  bool basis_ok = rep.ran_A_nonnegative;
  for (Index j = 0; basis_ok && j < n; ++j) {
    const Vector b = N.col(j);
    basis_ok = solve_douglas(M, b, inst.tol).solved();
  }
  rep.pointwise_basis_solvable = basis_ok;

  // iv) W-inverse existence: an independent dense least-squares solve of the
  // normal equation, then an oracle audit that G really minimizes pointwise.
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(M);
  Matrix G = cod.solve(N);
  const double nnorm = N.norm();
  const bool lstsq_ok =
      nnorm == 0.0 || (M * G - N).norm() <= inst.tol.residual_tol * nnorm;
  bool verified = lstsq_ok && rep.ran_A_nonnegative;
  for (Index j = 0; verified && j < n; ++j) {
    const Vector x = Vector::Unit(n, j);
    oracle::QuadraticForm q{M, -(inst.A.mat.adjoint() * (JW * x)),
                            real_part_checked((x.adjoint() * JW * x).value(),
                                              x.squaredNorm() * JW.norm())};
    const auto min = oracle::quadratic_min(q, inst.tol);
    if (!min.solved()) {
      verified = false;
      break;
    }
    const Vector u = G * x;
    const double at_u =
        q.c + ((u.adjoint() * q.M * u).value() + 2.0 * (q.v.adjoint() * u).value())
                  .real();
    verified = std::abs(at_u - min->value) <= 1e-8 * (1.0 + std::abs(min->value));
  }
  rep.inverse_verified = verified;

  if (rep.solvable()) {
    rep.w_inverse = make_map(*normal.X, inst.A.cod, inst.A.dom);
    rep.solution_set.particular = *normal.X;
    rep.solution_set.kernel = nullspace_basis(M, inst.tol);
  }
  return rep;
}

Outcome<OperatorMin> operator_ilsq_min(const IlsqInstance& inst, const Matrix& Jfs) {
  const SubspaceBasis ranA = range_of(inst.A, inst.tol);
  const Matrix JW = weight_gram(inst);
  if (!psd_check(ranA.basis.adjoint() * JW * ranA.basis, inst.tol.psd_tol).nonneg)
    return Outcome<OperatorMin>::no(Reason::NotNonnegative);

  const Matrix M = normal_matrix(inst);
  const Matrix N = normal_rhs(inst);
  const DouglasResult normal = solve_douglas(M, N, inst.tol);
  if (!normal.solved()) return Outcome<OperatorMin>::no(Reason::Inconsistent);

  OperatorMin out;
  out.X0 = make_map(*normal.X, inst.A.cod, inst.A.dom);

  const Index n = inst.A.cod.dim;
  const Matrix& J = inst.A.cod.J;
  const Matrix R = inst.A.mat * *normal.X - Matrix::Identity(n, n);
  const Matrix residual_form = J * R.adjoint() * J * inst.W.mat * R;
  const Complex t1 = (Jfs * residual_form).trace();

  const KreinMap shorted = krein_schur_complement(inst.W, ranA, Jfs, inst.tol);
  const Complex t2 = (Jfs * shorted.mat).trace();

  const double scale =
      Jfs.norm() * std::max(R.squaredNorm() * inst.W.mat.norm(),
                            shorted.mat.norm());
  const double v1 = real_part_checked(t1, scale);
  const double v2 = real_part_checked(t2, scale);
  if (std::abs(v1 - v2) > 1e-8 * (1.0 + std::abs(v1)))
    fail(ErrorCode::PathMismatch,
         "operator_ilsq_min: residual-form and Schur-complement values disagree");

  out.value = v1;
  out.two_path_values = {v1, v2};
  return Outcome<OperatorMin>::ok(std::move(out));
}

bool check_regularity_consequence(const IlsqInstance& inst) {
  const Index n = inst.A.cod.dim;
  if ((inst.W.mat - Matrix::Identity(n, n)).norm() >
      inst.tol.residual_tol * std::max(1.0, inst.W.mat.norm()))
    fail(ErrorCode::ValidationError,
         "check_regularity_consequence expects the identity weight");
  const IlsqReport rep = analyze_w_inverse(inst);
  if (!rep.solvable()) return true;
  return is_regular_subspace(range_of(inst.A, inst.tol), inst.tol);
}

}  // namespace krein
