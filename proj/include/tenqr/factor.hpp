#ifndef TENQR_FACTOR_HPP
#define TENQR_FACTOR_HPP

#include "tenqr/algebra.hpp"
#include "tenqr/tensor.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <cmath>
#include <string>
#include <utility>

namespace tenqr {

// Slice 0 and, for even n3, slice n3/2 of a real tensor's spectrum are real
// matrices; factoring them in real arithmetic keeps the inverse transform real.
inline bool self_conjugate_slice(std::size_t l, std::size_t n3) {
  return l == 0 || (n3 % 2 == 0 && l == n3 / 2);
}

template <typename M>
struct QrFactors {
  M q;
  M r;
};

// Economy QR with the diagonal of R forced real and nonnegative.
template <typename Derived>
auto thin_qr(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  using M = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  const Eigen::Index k = std::min(m, n);
  Eigen::HouseholderQR<M> qr(a);
  QrFactors<M> out;
  out.q = qr.householderQ() * M::Identity(m, k);
  out.r = qr.matrixQR().topRows(k).template triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < k; ++i) {
    const Scalar d = out.r(i, i);
    const double mag = std::abs(d);
    if (mag == 0.0) continue;
    const Scalar phase = d / mag;
    out.r.row(i) *= Eigen::numext::conj(phase);
    out.q.col(i) *= phase;
    out.r(i, i) = Scalar(mag);
  }
  return out;
}

struct TQrPair {
  Tensor3 q;
  Tensor3 r;
};

// Spectral t-QR: factors for every Fourier slice, Q economy-size.
struct FourierQr {
  FourierTensor3 q;
  FourierTensor3 r;
};

inline FourierQr fourier_qr(const FourierTensor3& xh) {
  const std::size_t n3 = xh.n3();
  const std::size_t k = std::min(xh.n1(), xh.n2());
  FourierQr out{FourierTensor3(xh.n1(), k, n3), FourierTensor3(k, xh.n2(), n3)};
  for (std::size_t l = 0; l < unique_fourier_slices(n3); ++l) {
    if (self_conjugate_slice(l, n3)) {
      auto f = thin_qr(Matrix(xh.slice(l).real()));
      out.q.slice(l) = f.q.cast<cplx>();
      out.r.slice(l) = f.r.cast<cplx>();
    } else {
      auto f = thin_qr(xh.slice(l));
      out.q.slice(l) = f.q;
      out.r.slice(l) = f.r;
    }
  }
  conjugate_fill(out.q);
  conjugate_fill(out.r);
  return out;
}

inline TQrPair t_qr(const Tensor3& x) {
  FourierQr f = fourier_qr(fft3(x));
  return {ifft3(f.q), ifft3(f.r)};
}

template <typename M>
struct CsvdQrFactors {
  M l;
  M d;
  M r;
};

// Alternating-QR approximation of a rank-r SVD, X ~ L * D * R, with L having
// orthonormal columns and R orthonormal rows. Starts from rectangular
// identities and runs `iters` sweeps of
//   L R' = qr(X R^*),  Rt T = qr(X^* L),  D = T^*,  R = Rt^*.
template <typename Derived>
auto csvd_qr(const Eigen::MatrixBase<Derived>& x, std::size_t rank, std::size_t iters) {
  using Scalar = typename Derived::Scalar;
  using M = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index m = x.rows();
  const Eigen::Index n = x.cols();
  const auto r = static_cast<Eigen::Index>(rank);
  if (rank < 1 || r > std::min(m, n)) {
    throw std::invalid_argument("csvd_qr: rank " + std::to_string(rank) +
                                " outside [1, " + std::to_string(std::min(m, n)) + "]");
  }
  if (iters < 1) throw std::invalid_argument("csvd_qr: iters must be >= 1");

  CsvdQrFactors<M> out{M::Identity(m, r), M::Identity(r, r), M::Identity(r, n)};
  if (x.squaredNorm() == 0.0) {
    out.d.setZero();
    return out;
  }
  for (std::size_t it = 0; it < iters; ++it) {
    auto left = thin_qr(x * out.r.adjoint());
    out.l = std::move(left.q);
    auto right = thin_qr(x.adjoint() * out.l);
    out.r = right.q.adjoint();
    out.d = right.r.adjoint();
  }
  return out;
}

struct FactorTriple {
  Tensor3 l;  // n1 x r x n3
  Tensor3 d;  // r x r x n3
  Tensor3 r;  // r x n2 x n3
  std::size_t rank = 0;

  Tensor3 reconstruct() const { return t_product(t_product(l, d), r); }
};

struct FourierTriple {
  FourierTensor3 l;
  FourierTensor3 d;
  FourierTensor3 r;
};

inline void check_rank(std::size_t rank, std::size_t n1, std::size_t n2, const char* who) {
  if (rank < 1 || rank > std::min(n1, n2)) {
    throw std::invalid_argument(std::string(who) + ": rank " + std::to_string(rank) +
                                " outside [1, " + std::to_string(std::min(n1, n2)) + "]");
  }
}

// CSVD-QR on the unique Fourier slices, remaining slices by conjugate symmetry.
inline FourierTriple fourier_ctsvd_qr(const FourierTensor3& xh, std::size_t rank,
                                      std::size_t iters) {
  check_rank(rank, xh.n1(), xh.n2(), "ctsvd_qr");
  const std::size_t n3 = xh.n3();
  FourierTriple out{FourierTensor3(xh.n1(), rank, n3), FourierTensor3(rank, rank, n3),
                    FourierTensor3(rank, xh.n2(), n3)};
  for (std::size_t l = 0; l < unique_fourier_slices(n3); ++l) {
    if (self_conjugate_slice(l, n3)) {
      auto f = csvd_qr(Matrix(xh.slice(l).real()), rank, iters);
      out.l.slice(l) = f.l.cast<cplx>();
      out.d.slice(l) = f.d.cast<cplx>();
      out.r.slice(l) = f.r.cast<cplx>();
    } else {
      auto f = csvd_qr(xh.slice(l), rank, iters);
      out.l.slice(l) = f.l;
      out.d.slice(l) = f.d;
      out.r.slice(l) = f.r;
    }
  }
  conjugate_fill(out.l);
  conjugate_fill(out.d);
  conjugate_fill(out.r);
  return out;
}

inline constexpr std::size_t kDefaultCtsvdIters = 3;

inline FactorTriple ctsvd_qr(const Tensor3& x, std::size_t rank,
                             std::size_t iters = kDefaultCtsvdIters) {
  FourierTriple f = fourier_ctsvd_qr(fft3(x), rank, iters);
  return {ifft3(f.l), ifft3(f.d), ifft3(f.r), rank};
}

struct TSvd {
  Tensor3 u;  // n1 x n1 x n3
  Tensor3 s;  // n1 x n2 x n3, f-diagonal
  Tensor3 v;  // n2 x n2 x n3; x = u * s * conj_transpose(v)

  Tensor3 reconstruct() const { return t_product(t_product(u, s), conj_transpose(v)); }
};

inline TSvd t_svd(const Tensor3& x) {
  const std::size_t n1 = x.n1();
  const std::size_t n2 = x.n2();
  const std::size_t n3 = x.n3();
  const FourierTensor3 xh = fft3(x);
  FourierTensor3 u(n1, n1, n3), s(n1, n2, n3), v(n2, n2, n3);
  for (std::size_t l = 0; l < unique_fourier_slices(n3); ++l) {
    auto store = [&](const auto& svd) {
      u.slice(l) = svd.matrixU().template cast<cplx>();
      v.slice(l) = svd.matrixV().template cast<cplx>();
      auto sl = s.slice(l);
      sl.setZero();
      for (Eigen::Index p = 0; p < svd.singularValues().size(); ++p)
        sl(p, p) = svd.singularValues()(p);
    };
    if (self_conjugate_slice(l, n3)) {
      store(Eigen::JacobiSVD<Matrix>(xh.slice(l).real(),
                                     Eigen::ComputeFullU | Eigen::ComputeFullV));
    } else {
      store(Eigen::JacobiSVD<CMatrix>(xh.slice(l),
                                      Eigen::ComputeFullU | Eigen::ComputeFullV));
    }
  }
  conjugate_fill(u);
  conjugate_fill(s);
  conjugate_fill(v);
  return {ifft3(u), ifft3(s), ifft3(v)};
}

// F-norms of the diagonal tubes S(p,p,:) of the t-SVD, nonincreasing.
inline std::vector<double> singular_tube_norms(const Tensor3& x) {
  const std::size_t n3 = x.n3();
  const std::size_t k = std::min(x.n1(), x.n2());
  const FourierTensor3 xh = fft3(x);
  std::vector<double> acc(k, 0.0);
  for (std::size_t l = 0; l < n3; ++l) {
    Eigen::VectorXd sv = Eigen::JacobiSVD<CMatrix>(xh.slice(l)).singularValues();
    for (std::size_t p = 0; p < k; ++p) acc[p] += sv(static_cast<Eigen::Index>(p)) *
                                                  sv(static_cast<Eigen::Index>(p));
  }
  // Parseval: ||tube||^2 = (1/n3) * sum_l |spectrum_l|^2.
  for (auto& a : acc) a = std::sqrt(a / static_cast<double>(n3));
  return acc;
}

inline std::size_t tubal_rank(const Tensor3& x, double tol = 1e-8) {
  std::size_t rank = 0;
  for (double t : singular_tube_norms(x)) rank += t > tol;
  return rank;
}

}  // namespace tenqr

#endif  // TENQR_FACTOR_HPP
