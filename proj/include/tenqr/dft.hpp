#ifndef TENQR_DFT_HPP
#define TENQR_DFT_HPP

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

namespace tenqr {

// Unnormalized DFT of fixed length n: forward applies F_n with
// omega = exp(-2*pi*i/n), inverse applies F_n^* / n. Power-of-two lengths use
// an iterative radix-2 transform, other lengths a direct O(n^2) evaluation
// against a precomputed twiddle table.
class TubeDft {
 public:
  using cplx = std::complex<double>;

  explicit TubeDft(std::size_t n) : n_(n), twiddle_(n) {
    for (std::size_t m = 0; m < n_; ++m) {
      const double angle = -2.0 * std::numbers::pi * static_cast<double>(m) /
                           static_cast<double>(n_);
      twiddle_[m] = cplx(std::cos(angle), std::sin(angle));
    }
    radix2_ = n_ > 1 && (n_ & (n_ - 1)) == 0;
    scratch_.resize(n_);
  }

  std::size_t length() const { return n_; }
  bool uses_radix2() const { return radix2_; }

  void forward(std::span<cplx> x) { transform(x, false); }

  void inverse(std::span<cplx> x) {
    transform(x, true);
    const double scale = 1.0 / static_cast<double>(n_);
    for (auto& v : x) v *= scale;
  }

 private:
  void transform(std::span<cplx> x, bool conjugate) {
    if (n_ <= 1) return;
    if (radix2_) {
      radix2(x, conjugate);
    } else {
      direct(x, conjugate);
    }
  }

  cplx w(std::size_t m, bool conjugate) const {
    return conjugate ? std::conj(twiddle_[m]) : twiddle_[m];
  }

  void direct(std::span<cplx> x, bool conjugate) {
    for (std::size_t l = 0; l < n_; ++l) {
      cplx acc = 0.0;
      std::size_t m = 0;
      for (std::size_t k = 0; k < n_; ++k) {
        acc += x[k] * w(m, conjugate);
        m += l;
        if (m >= n_) m -= n_;
      }
      scratch_[l] = acc;
    }
    for (std::size_t l = 0; l < n_; ++l) x[l] = scratch_[l];
  }

  void radix2(std::span<cplx> x, bool conjugate) {
    for (std::size_t i = 1, j = 0; i < n_; ++i) {
      std::size_t bit = n_ >> 1;
      for (; j & bit; bit >>= 1) j ^= bit;
      j ^= bit;
      if (i < j) std::swap(x[i], x[j]);
    }
    for (std::size_t len = 2; len <= n_; len <<= 1) {
      const std::size_t stride = n_ / len;
      for (std::size_t start = 0; start < n_; start += len) {
        for (std::size_t k = 0; k < len / 2; ++k) {
          const cplx t = w(k * stride, conjugate) * x[start + k + len / 2];
          const cplx u = x[start + k];
          x[start + k] = u + t;
          x[start + k + len / 2] = u - t;
        }
      }
    }
  }

  std::size_t n_;
  bool radix2_ = false;
  std::vector<cplx> twiddle_;
  std::vector<cplx> scratch_;
};

}  // namespace tenqr

#endif  // TENQR_DFT_HPP
