#include "test_util.hpp"

#include <gtest/gtest.h>

namespace {

using namespace tenqr;
using tenqr::testing::low_rank_tensor;
using tenqr::testing::max_abs_diff;
using tenqr::testing::orthogonality_defect;
using tenqr::testing::random_tensor;

double relative_error(const Tensor3& approx, const Tensor3& x) {
  return frobenius_norm(approx - x) / frobenius_norm(x);
}

// Optimal rank-r error of the slice-wise truncated t-SVD, from singular values.
double truncation_error(const Tensor3& x, std::size_t r) {
  const FourierTensor3 xh = fft3(x);
  double tail = 0.0;
  for (std::size_t l = 0; l < x.n3(); ++l) {
    const Eigen::VectorXd sv = Eigen::JacobiSVD<CMatrix>(xh.slice(l)).singularValues();
    for (Eigen::Index p = static_cast<Eigen::Index>(r); p < sv.size(); ++p) tail += sv(p) * sv(p);
  }
  return std::sqrt(tail / static_cast<double>(x.n3()));
}

TEST(ThinQr, NonnegativeRealDiagonal) {
  std::mt19937_64 rng(1);
  CMatrix a = CMatrix::Random(5, 3);
  auto f = thin_qr(a);
  EXPECT_EQ(f.q.cols(), 3);
  EXPECT_LT((f.q * f.r - a).norm(), 1e-12);
  EXPECT_LT((f.q.adjoint() * f.q - CMatrix::Identity(3, 3)).norm(), 1e-12);
  for (Eigen::Index i = 0; i < 3; ++i) {
    EXPECT_GE(f.r(i, i).real(), 0.0);
    EXPECT_EQ(f.r(i, i).imag(), 0.0);
  }
}

TEST(TQr, IdentityFactorsAsIdentity) {
  const TQrPair f = t_qr(identity_tensor(4, 3));
  EXPECT_LT(max_abs_diff(f.q, identity_tensor(4, 3)), 1e-12);
  EXPECT_LT(max_abs_diff(f.r, identity_tensor(4, 3)), 1e-12);
}

TEST(TQr, SingleSliceIsMatrixQr) {
  const Tensor3 x = random_tensor({5, 3, 1}, 2);
  const TQrPair f = t_qr(x);
  const auto expected = thin_qr(Matrix(x.slice(0)));
  EXPECT_LT((f.q.slice(0) - expected.q).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((f.r.slice(0) - expected.r).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(TQr, ReconstructsWithTriangularSpectrum) {
  for (Dims d : {Dims{6, 4, 5}, Dims{4, 6, 3}, Dims{5, 5, 4}}) {
    const Tensor3 x = random_tensor(d, 3);
    const TQrPair f = t_qr(x);
    EXPECT_EQ(f.q.n2(), std::min(d.n1, d.n2));
    EXPECT_LT(max_abs_diff(t_product(f.q, f.r), x), 1e-10);
    EXPECT_LT(orthogonality_defect(f.q), 1e-8 * std::sqrt(static_cast<double>(f.q.n2() * d.n3)));
    const FourierTensor3 rh = fft3(f.r);
    for (std::size_t l = 0; l < d.n3; ++l)
      for (Eigen::Index j = 0; j < rh.slice(l).cols(); ++j)
        for (Eigen::Index i = j + 1; i < rh.slice(l).rows(); ++i)
          EXPECT_LT(std::abs(rh.slice(l)(i, j)), 1e-10);
  }
}

TEST(CsvdQr, DiagonalMatrixRecoversSingularValues) {
  Matrix x = Eigen::Vector3d(5.0, 3.0, 1.0).asDiagonal();
  const auto f = csvd_qr(x, 3, 10);
  EXPECT_LT((f.l * f.d * f.r - x).cwiseAbs().maxCoeff(), 1e-10);
  std::vector<double> diag;
  for (Eigen::Index i = 0; i < 3; ++i) diag.push_back(std::abs(f.d(i, i)));
  std::sort(diag.rbegin(), diag.rend());
  EXPECT_NEAR(diag[0], 5.0, 1e-8);
  EXPECT_NEAR(diag[1], 3.0, 1e-8);
  EXPECT_NEAR(diag[2], 1.0, 1e-8);
}

TEST(CsvdQr, ZeroMatrixGivesZeroCore) {
  const auto f = csvd_qr(Matrix::Zero(4, 3), 2, 3);
  EXPECT_EQ(f.d, Matrix::Zero(2, 2));
  EXPECT_EQ(f.l, Matrix::Identity(4, 2));
  EXPECT_EQ(f.r, Matrix::Identity(2, 3));
}

TEST(CsvdQr, ExactOnLowRankInput) {
  const Eigen::Vector4d a(1.0, -2.0, 0.5, 3.0), b(0.3, 1.0, -1.0, 2.0);
  const Eigen::Vector4d c(2.0, 0.0, 1.0, -1.0), e(-1.0, 0.5, 0.5, 1.5);
  const Matrix x = a * b.transpose() + c * e.transpose();
  const auto f = csvd_qr(x, 2, 3);
  EXPECT_LT((f.l * f.d * f.r - x).norm(), 1e-8);
  EXPECT_LT((f.l.transpose() * f.l - Matrix::Identity(2, 2)).norm(), 1e-12);
  EXPECT_LT((f.r * f.r.transpose() - Matrix::Identity(2, 2)).norm(), 1e-12);
}

TEST(CsvdQr, RankOutOfRange) {
  EXPECT_THROW(csvd_qr(Matrix::Ones(3, 4), 0, 3), std::invalid_argument);
  EXPECT_THROW(csvd_qr(Matrix::Ones(3, 4), 4, 3), std::invalid_argument);
  EXPECT_THROW(csvd_qr(Matrix::Ones(3, 4), 2, 0), std::invalid_argument);
}

TEST(CtsvdQr, ExactOnTubalRankInputs) {
  for (std::size_t r : {1u, 2u, 4u}) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const Tensor3 x = low_rank_tensor({8, 7, 5}, r, seed);
      const FactorTriple f = ctsvd_qr(x, r, 3);
      EXPECT_LT(relative_error(f.reconstruct(), x), 1e-7) << "r=" << r << " seed=" << seed;
      const double tol = 1e-8 * std::sqrt(static_cast<double>(r * x.n3()));
      EXPECT_LT(orthogonality_defect(f.l), tol);
      EXPECT_LT(orthogonality_defect(conj_transpose(f.r)), tol);
    }
  }
}

TEST(CtsvdQr, SingleSliceReducesToCsvdQr) {
  const Tensor3 x = random_tensor({6, 5, 1}, 4);
  const FactorTriple f = ctsvd_qr(x, 3, 3);
  const auto m = csvd_qr(Matrix(x.slice(0)), 3, 3);
  EXPECT_LT((f.l.slice(0) - m.l).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((f.d.slice(0) - m.d).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((f.r.slice(0) - m.r).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(CtsvdQr, IdentityCoreConvergesToIdentity) {
  const FactorTriple f = ctsvd_qr(identity_tensor(4, 6), 4, 3);
  const FourierTensor3 dh = fft3(f.d);
  for (std::size_t l = 0; l < 6; ++l) EXPECT_LT((dh.slice(l) - CMatrix::Identity(4, 4)).norm(), 1e-8);
}

TEST(CtsvdQr, OutputIsRealForOddAndEvenTubes) {
  for (std::size_t n3 : {1u, 2u, 5u, 6u, 10u}) {
    EXPECT_NO_THROW(ctsvd_qr(random_tensor({5, 5, n3}, n3), 2, 3)) << n3;
  }
}

TEST(CtsvdQr, RankOutOfRange) {
  EXPECT_THROW(ctsvd_qr(Tensor3(3, 4, 2), 4), std::invalid_argument);
  EXPECT_THROW(ctsvd_qr(Tensor3(3, 4, 2), 0), std::invalid_argument);
}

TEST(CtsvdQr, ZeroTensorKeepsIdentityFactors) {
  const FactorTriple f = ctsvd_qr(Tensor3(4, 4, 3), 2);
  EXPECT_EQ(frobenius_norm(f.d), 0.0);
  EXPECT_LT(max_abs_diff(f.l, eye_tensor(4, 2, 3)), 1e-15);
}

// Calibrated on 100 random 20x20x5 tensors for r in {2, 5, 10}: the observed
// ratio to the optimal truncation error never exceeded 1.091.
TEST(CtsvdQr, ApproximationWithinFactorOfTruncatedTsvd) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Tensor3 x = random_tensor({20, 20, 5}, 1000 + seed);
    const double optimal = truncation_error(x, 5);
    const double achieved = frobenius_norm(ctsvd_qr(x, 5, 3).reconstruct() - x);
    EXPECT_GE(achieved, optimal * (1.0 - 1e-12)) << seed;
    EXPECT_LE(achieved, 1.5 * optimal) << seed;
  }
}

TEST(CtsvdQr, OffDiagonalEnergyDecreasesWithIterations) {
  int violations = 0, steps = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const FourierTensor3 xh = fft3(random_tensor({10, 10, 4}, 5000 + seed));
    double previous = 0.0;
    for (std::size_t iters = 1; iters <= 6; ++iters) {
      const FourierTensor3 dh = fourier_ctsvd_qr(xh, 4, iters).d;
      double off = 0.0;
      for (std::size_t l = 0; l < 4; ++l) off += dh.slice(l).squaredNorm() - dh.slice(l).diagonal().squaredNorm();
      if (iters > 1) {
        ++steps;
        violations += off > previous;
      }
      previous = off;
    }
  }
  EXPECT_LE(violations, steps / 20);
}

TEST(TSvd, Reconstructs) {
  const Tensor3 x = random_tensor({5, 4, 3}, 6);
  const TSvd f = t_svd(x);
  EXPECT_LT(max_abs_diff(f.reconstruct(), x), 1e-10);
  EXPECT_LT(orthogonality_defect(f.u), 1e-10);
  EXPECT_LT(orthogonality_defect(f.v), 1e-10);
}

TEST(TSvd, CoreIsFDiagonalWithNonincreasingTubes) {
  const Tensor3 x = random_tensor({6, 4, 4}, 7);
  const TSvd f = t_svd(x);
  for (std::size_t k = 0; k < 4; ++k)
    for (std::size_t j = 0; j < 4; ++j)
      for (std::size_t i = 0; i < 6; ++i)
        if (i != j) EXPECT_LT(std::abs(f.s(i, j, k)), 1e-12);
  const auto norms = singular_tube_norms(x);
  for (std::size_t p = 1; p < norms.size(); ++p) EXPECT_LE(norms[p], norms[p - 1] + 1e-12);
  for (std::size_t p = 0; p < norms.size(); ++p) {
    double s = 0.0;
    for (std::size_t k = 0; k < 4; ++k) s += f.s(p, p, k) * f.s(p, p, k);
    EXPECT_NEAR(std::sqrt(s), norms[p], 1e-10);
  }
}

TEST(TubalRank, ConstructedAndZero) {
  EXPECT_EQ(tubal_rank(low_rank_tensor({6, 5, 4}, 2, 8), 1e-8), 2u);
  EXPECT_EQ(tubal_rank(Tensor3(4, 4, 3)), 0u);
  EXPECT_EQ(tubal_rank(random_tensor({4, 6, 3}, 9)), 4u);
}

}  // namespace
