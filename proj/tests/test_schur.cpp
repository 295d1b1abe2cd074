#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "krein/schur.hpp"
#include "support.hpp"

using namespace krein;
using namespace krein::testing;

namespace {

struct WcInstance {
  KreinMap W;
  SubspaceBasis S;
};

// JW = Q [[a, b], [b*, c]] Q* with S spanned by the first k columns of Q.
// a = V diag(s) V* with exact zeros and nonzeros in [0.5, 2], and b carries
// mass only along the nonzero eigendirections, so ran b lies in ran a with
// all rank decisions far from the cutoff.
WcInstance weakly_complementable_instance(Index n, Rng& rng, bool psd = false) {
  const SignatureSpace H = random_space(n, rng);
  const Matrix Q = unitary(n, rng);
  const Index k = uniform_index(0, n, rng);
  const Index m = n - k;
  const Index r = k == 0 ? 0 : uniform_index(0, k, rng);

  const Matrix V = unitary(k, rng);
  Vector s = Vector::Zero(k);
  Vector shalf = Vector::Zero(k);
  for (Index i = 0; i < r; ++i) {
    const double mag = uniform(0.5, 2.0, rng);
    const double sign = !psd && uniform(0.0, 1.0, rng) < 0.5 ? -1.0 : 1.0;
    s(i) = sign * mag;
    shalf(i) = std::sqrt(mag);
  }
  const Matrix a = hermitized(V * s.asDiagonal() * V.adjoint());

  Matrix c;
  if (psd) {
    const Matrix Vc = unitary(m, rng);
    Vector sc(m);
    for (Index i = 0; i < m; ++i) sc(i) = uniform(0.5, 2.0, rng);
    c = hermitized(Vc * sc.asDiagonal() * Vc.adjoint());
  } else {
    c = hermitized(gaussian(m, m, rng));
  }

  Matrix b;
  if (psd && m > 0) {
    // b = a^{1/2} K c^{1/2} with ||K|| < 1 keeps [[a, b], [b*, c]] PSD
    Matrix K = gaussian(k, m, rng);
    if (K.norm() > 0) K *= 0.8 / K.norm();
    Eigen::SelfAdjointEigenSolver<Matrix> ec(c);
    b = V * shalf.asDiagonal() * V.adjoint() * K * ec.operatorSqrt();
  } else {
    b = a * gaussian(k, m, rng);
  }

  Matrix JW(n, n);
  JW.topLeftCorner(k, k) = a;
  JW.topRightCorner(k, m) = b;
  JW.bottomLeftCorner(m, k) = b.adjoint();
  JW.bottomRightCorner(m, m) = c;
  JW = hermitized(Q * JW * Q.adjoint());
  WcInstance out{make_endo(H.J * JW, H), make_subspace(Q.leftCols(k), H)};
  return out;
}

}  // namespace

TEST_CASE("block_decompose splits a Hermitian matrix along S") {
  SignatureSpace H = hilbert_space(2);
  Matrix M(2, 2);
  M << 2, 1, 1, 1;
  const auto d = block_decompose(M, make_subspace(Matrix::Identity(2, 1), H));
  REQUIRE(d.k == 1);
  CHECK(d.a(0, 0).real() == doctest::Approx(2.0));
  CHECK(d.b(0, 0).real() == doctest::Approx(1.0));
  CHECK(d.c(0, 0).real() == doctest::Approx(1.0));
  CHECK((d.reassemble() - M).norm() <= 1e-12);

  Rng rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    const Index n = 1 + trial % 8;
    const SignatureSpace G = random_space(n, rng);
    const Matrix A = hermitized(gaussian(n, n, rng));
    const Index k = uniform_index(0, n, rng);
    const Matrix B = gaussian(n, k, rng);
    const SubspaceBasis S = make_subspace(range_basis(B), G);
    const auto dec = block_decompose(A, S);
    CHECK(dec.k == numerical_rank(B));
    CHECK((dec.S_frame * dec.S_frame.adjoint() - Matrix::Identity(n, n))
              .norm() <= 1e-10);
    CHECK((dec.reassemble() - A).norm() <= 1e-10 * (1.0 + A.norm()));
    CHECK(is_hermitian(dec.a));
    CHECK(is_hermitian(dec.c));
    // first k frame columns span S
    Matrix joint(n, dec.k + S.dim());
    joint << dec.S_frame.leftCols(dec.k), S.basis;
    CHECK(numerical_rank(joint) == dec.k);
  }
}

TEST_CASE("weak complementability detects ran b inside ran a") {
  SignatureSpace H2 = hilbert_space(2);
  Matrix flip(2, 2);
  flip << 0, 1, 1, 0;
  const SubspaceBasis e1 = make_subspace(Matrix::Identity(2, 1), H2);
  CHECK_FALSE(is_weakly_complementable(make_endo(flip, H2), e1));
  CHECK_THROWS_AS(hilbert_shorted(flip, e1), KreinError);
  CHECK_THROWS_AS(
      krein_schur_complement(make_endo(flip, H2), e1, Matrix::Identity(2, 2)),
      KreinError);

  // W = I on the flip space: S = e1 is neutral, neither weakly
  // complementable nor complementable.
  const SignatureSpace K = validate_signature(flip);
  const KreinMap I2 = make_endo(Matrix::Identity(2, 2), K);
  const SubspaceBasis e1K = make_subspace(Matrix::Identity(2, 1), K);
  CHECK_FALSE(is_weakly_complementable(I2, e1K));
  CHECK_FALSE(is_complementable(I2, e1K));

  // non-selfadjoint weight is rejected
  Matrix N(2, 2);
  N << 0, 1, 0, 0;
  const SignatureSpace D = diag_space({1, -1});
  CHECK_THROWS_AS(
      is_weakly_complementable(make_endo(N, D),
                               make_subspace(Matrix::Identity(2, 1), D)),
      KreinError);

  Rng rng(17);
  for (int trial = 0; trial < 120; ++trial) {
    const Index n = 1 + trial % 8;
    const auto inst = weakly_complementable_instance(n, rng);
    CHECK(is_weakly_complementable(inst.W, inst.S));
  }
}

TEST_CASE("complementability implies weak complementability") {
  Rng rng(23);
  int complementable_seen = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const Index n = 1 + trial % 6;
    const SignatureSpace H = random_space(n, rng);
    const KreinMap W = random_selfadjoint(H, rng);
    const Index k = uniform_index(0, n, rng);
    const Matrix B = gaussian(n, k, rng);
    const SubspaceBasis S = make_subspace(range_basis(B), H);
    if (is_complementable(W, S)) {
      ++complementable_seen;
      CHECK(is_weakly_complementable(W, S));
    }
  }
  CHECK(complementable_seen >= 50);
}

TEST_CASE("hilbert_shorted matches the block Schur complement") {
  Rng rng(29);
  for (int trial = 0; trial < 80; ++trial) {
    const Index n = 1 + trial % 8;
    const auto inst = weakly_complementable_instance(n, rng, true);
    const Matrix M = inst.W.dom.J * inst.W.mat;
    REQUIRE(psd_check(M, 1e-9).nonneg);
    const Matrix Sh = hilbert_shorted(M, inst.S);

    // shorted vanishes on S and is dominated by M
    CHECK((inst.S.basis.adjoint() * Sh).norm() <= 1e-9 * (1.0 + M.norm()));
    CHECK(psd_check(Sh, 1e-8).nonneg);
    CHECK(psd_check(M - Sh, 1e-8).nonneg);

    // explicit frame formula
    const auto d = block_decompose(M, inst.S);
    const Index k = d.k;
    const Matrix Qp = d.S_frame.rightCols(n - k);
    const Matrix expected =
        Qp * (d.c - d.b.adjoint() * pinv(d.a) * d.b) * Qp.adjoint();
    CHECK((Sh - expected).norm() <= 1e-9 * (1.0 + M.norm()));

    // shorting twice changes nothing
    CHECK((hilbert_shorted(Sh, inst.S) - Sh).norm() <=
          1e-9 * (1.0 + M.norm()));
  }
}

TEST_CASE("hilbert_shorted edge subspaces") {
  Rng rng(31);
  const Index n = 5;
  const Matrix F = gaussian(3, n, rng);
  const Matrix M = F.adjoint() * F;
  const SignatureSpace H = hilbert_space(n);
  CHECK((hilbert_shorted(M, zero_subspace(H)) - M).norm() <= 1e-12);
  const SubspaceBasis full = make_subspace(Matrix::Identity(n, n), H);
  CHECK(hilbert_shorted(M, full).norm() <= 1e-10);
}

TEST_CASE("krein_schur_complement frozen example") {
  const SignatureSpace H = diag_space({1, -1});
  Matrix W(2, 2);
  W << 2, 1, -1, -1;
  const KreinMap Wm = make_endo(W, H);
  const SubspaceBasis S = make_subspace(Matrix::Identity(2, 1), H);
  REQUIRE(is_weakly_complementable(Wm, S));
  const KreinMap Ws = krein_schur_complement(Wm, S, H.J);
  Matrix expected(2, 2);
  expected << 0, 0, 0, -0.5;
  CHECK((Ws.mat - expected).norm() <= 1e-12);

  CHECK_THROWS_AS(krein_schur_complement(Wm, S, Matrix(2.0 * H.J)),
                  KreinError);
}

TEST_CASE("krein_schur_complement is independent of the fundamental symmetry") {
  Rng rng(37);
  for (int trial = 0; trial < 60; ++trial) {
    const Index n = 1 + trial % 8;
    const auto inst = weakly_complementable_instance(n, rng);
    const KreinMap ref = krein_schur_complement(inst.W, inst.S, inst.W.dom.J);
    CHECK(is_krein_selfadjoint(ref));
    // the complement ranges inside S^[perp]
    CHECK((inst.S.basis.adjoint() * inst.W.dom.J * ref.mat).norm() <=
          1e-8 * (1.0 + ref.mat.norm()));
    for (int j = 0; j < 5; ++j) {
      const Matrix Jfs = random_fundamental_symmetry(
          inst.W.dom, 1000 + 11 * static_cast<std::uint64_t>(trial) + j);
      const KreinMap alt = krein_schur_complement(inst.W, inst.S, Jfs);
      CHECK((alt.mat - ref.mat).cwiseAbs().maxCoeff() <=
            1e-8 * (1.0 + ref.mat.norm()));
    }
  }
}

TEST_CASE("krein_schur_complement preserves Krein positivity and order") {
  Rng rng(41);
  for (int trial = 0; trial < 60; ++trial) {
    const Index n = 1 + trial % 8;
    const auto inst = weakly_complementable_instance(n, rng, true);
    REQUIRE(is_krein_positive(inst.W));
    const KreinMap Ws = krein_schur_complement(inst.W, inst.S, inst.W.dom.J);
    const double scale = 1.0 + inst.W.mat.norm();
    // J Ws and J (W - Ws) are PSD up to rounding at the scale of W
    CHECK(psd_check(Matrix(inst.W.dom.J * Ws.mat), 1e-10).min_eig >=
          -1e-10 * scale);
    CHECK(psd_check(Matrix(inst.W.dom.J * (inst.W.mat - Ws.mat)), 1e-10)
              .min_eig >= -1e-10 * scale);
  }
}
