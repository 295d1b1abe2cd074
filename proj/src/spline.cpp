#include "krein/spline.hpp"

#include <cmath>

#include "krein/oracle.hpp"

namespace krein {

namespace {

Matrix t_gram(const SplineInstance& inst) {
  Matrix G = hermitized(inst.T.mat.adjoint() * inst.T.cod.J * inst.T.mat);
  if (negligible(G, inst.T.mat.squaredNorm())) G.setZero();
  return G;
}

double real_checked(Complex z, double scale) {
  if (std::abs(z.imag()) > 1e-10 * std::max(1.0, scale))
    fail(ErrorCode::InvalidState, "spline objective value is not real");
  return z.real();
}

// Minimum-norm solution of Eq. Normal2 shifted by a particular solution of
// V X = B0:  X0 = N Y + V^+ B0 with (N*GN) Y = -N*G V^+ B0.
struct Normal2 {
  Matrix X0;
  Matrix N;  // orthonormal kernel basis of V
  double constraint_residual = 0.0;
};

Outcome<Normal2> solve_normal2(const SplineInstance& inst, const Matrix& B0) {
  const Matrix Vp = pinv(inst.V.mat, inst.tol);
  const double b0norm = B0.norm();
  if (b0norm > 0 &&
      (inst.V.mat * (Vp * B0) - B0).norm() > inst.tol.residual_tol * b0norm)
    return Outcome<Normal2>::no(Reason::RangeHypothesisFailed);

  const Matrix N = nullspace_basis(inst.V.mat, inst.tol);
  const Matrix G = t_gram(inst);
  const Matrix xp = Vp * B0;

  Matrix a = hermitized(N.adjoint() * G * N);
  if (negligible(a, G.norm())) a.setZero();
  if (!psd_check(a, inst.tol.psd_tol).nonneg)
    return Outcome<Normal2>::no(Reason::NotNonnegative);

  Matrix rhs = -N.adjoint() * G * xp;
  if (negligible(rhs, G.norm() * xp.norm())) rhs.setZero();
  const DouglasResult sys = solve_douglas(a, rhs, inst.tol);
  if (!sys.solved()) return Outcome<Normal2>::no(Reason::Inconsistent);

  Normal2 out;
  out.N = N;
  out.X0 = N * *sys.X + xp;
  out.constraint_residual = (inst.V.mat * out.X0 - B0).norm();
  return Outcome<Normal2>::ok(std::move(out));
}

}  // namespace

SplineInstance make_spline(KreinMap T, KreinMap V, Tolerance tol) {
  if (T.dom.dim != V.dom.dim || T.dom.dim != T.cod.dim || V.dom.dim != V.cod.dim)
    fail(ErrorCode::DimensionMismatch, "spline: T and V must act on one space");
  return SplineInstance{std::move(T), std::move(V), tol};
}

KreinMap spline_weight(const SplineInstance& inst) {
  return make_endo(inst.T.dom.J * t_gram(inst), inst.T.dom);
}

SplineSolvability spline_solvability(const SplineInstance& inst) {
  const KreinMap W = spline_weight(inst);
  const SubspaceBasis ker = kernel_of(inst.V, inst.tol);
  SplineSolvability s;
  s.kernel_nonnegative = is_w_nonnegative_subspace(W, ker, inst.tol);
  s.complementable = is_complementable(W, ker, inst.tol);
  s.global_exists = s.kernel_nonnegative && s.complementable;
  return s;
}

Outcome<SplinePoint> solve_spline_point(const SplineInstance& inst, const Vector& h0) {
  if (h0.size() != inst.V.dom.dim)
    fail(ErrorCode::DimensionMismatch, "solve_spline_point: h0 has the wrong dimension");

  const Matrix N = nullspace_basis(inst.V.mat, inst.tol);
  const Matrix G = t_gram(inst);
  const Vector xp = pinv(inst.V.mat, inst.tol) * (inst.V.mat * h0);

  oracle::QuadraticForm q;
  q.M = N.adjoint() * G * N;
  if (negligible(q.M, G.norm())) q.M.setZero();
  q.v = N.adjoint() * (G * xp);
  if (negligible(q.v, G.norm() * xp.norm())) q.v.setZero();
  q.c = real_checked((xp.adjoint() * G * xp).value(),
                     xp.squaredNorm() * std::max(1.0, G.norm()));
  const auto min = oracle::quadratic_min(q, inst.tol);
  if (!min.solved())
    return Outcome<SplinePoint>::no(min.reason == Reason::Indefinite
                                        ? Reason::NotNonnegative
                                        : min.reason);

  SplinePoint out;
  out.x0 = xp + N * min->argmin;
  out.value = min->value;
  out.constraint_residual = (inst.V.mat * (out.x0 - h0)).norm();
  out.companion_residual =
      ((inst.T.mat * N).adjoint() * inst.T.cod.J * (inst.T.mat * out.x0)).norm();
  return Outcome<SplinePoint>::ok(std::move(out));
}

Outcome<KreinMap> spline_global_solution(const SplineInstance& inst) {
  const SplineSolvability s = spline_solvability(inst);
  if (!s.global_exists)
    return Outcome<KreinMap>::no(s.kernel_nonnegative ? Reason::Inconsistent
                                                      : Reason::NotNonnegative);
  const auto normal = solve_normal2(inst, inst.V.mat);
  if (!normal.solved()) return Outcome<KreinMap>::no(normal.reason);
  const Matrix P = pinv(inst.V.mat, inst.tol) * inst.V.mat;  // onto (ker V)^perp
  return Outcome<KreinMap>::ok(make_endo(normal->X0 * P, inst.V.dom));
}

Outcome<SplineOperatorMin> operator_spline_min(const SplineInstance& inst,
                                               const KreinMap& B0,
                                               const Matrix& Jfs) {
  if (B0.mat.rows() != inst.V.cod.dim || B0.mat.cols() != inst.V.dom.dim)
    fail(ErrorCode::DimensionMismatch, "operator_spline_min: B0 must act on the shared space");
  const auto normal = solve_normal2(inst, B0.mat);
  if (!normal.solved()) return Outcome<SplineOperatorMin>::no(normal.reason);

  const Matrix& J = inst.T.dom.J;
  const Matrix G = t_gram(inst);

  SplineOperatorMin out;
  out.X0 = make_endo(normal->X0, inst.V.dom);
  out.constraint_residual = normal->constraint_residual;

  const Complex t1 = (Jfs * (J * normal->X0.adjoint() * G * normal->X0)).trace();
  const double v1 =
      real_checked(t1, Jfs.norm() * normal->X0.squaredNorm() * G.norm());
  out.value = v1;

  const KreinMap W = spline_weight(inst);
  const SubspaceBasis ker{normal->N, inst.V.dom};
  if (is_weakly_complementable(W, ker, inst.tol)) {
    const KreinMap shorted = krein_schur_complement(W, ker, Jfs, inst.tol);
    const Matrix C = pinv(inst.V.mat, inst.tol) * B0.mat;
    const Complex t2 = (Jfs * (J * C.adjoint() * J * shorted.mat * C)).trace();
    const double v2 =
        real_checked(t2, Jfs.norm() * C.squaredNorm() * shorted.mat.norm());
    if (std::abs(v1 - v2) > 1e-8 * (1.0 + std::abs(v1)))
      fail(ErrorCode::PathMismatch,
           "operator_spline_min: residual-form and Schur-complement values disagree");
    out.two_path_values = {{v1, v2}};
  }
  return Outcome<SplineOperatorMin>::ok(std::move(out));
}

}  // namespace krein
