#ifndef TENQR_ALGEBRA_HPP
#define TENQR_ALGEBRA_HPP

#include "tenqr/dft.hpp"
#include "tenqr/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tenqr {

// Slices 0..count-1 of a real tensor's spectrum determine the rest by
// conjugate symmetry: slice l == conj(slice n3-l).
inline std::size_t unique_fourier_slices(std::size_t n3) { return n3 / 2 + 1; }

// Fills slices unique_fourier_slices(n3)..n3-1 from their conjugate partners.
inline void conjugate_fill(FourierTensor3& x) {
  const std::size_t n3 = x.n3();
  for (std::size_t l = unique_fourier_slices(n3); l < n3; ++l) {
    x.slice(l) = x.slice(n3 - l).conjugate();
  }
}

inline FourierTensor3 fft3(const Tensor3& x) {
  const Dims& d = x.dims();
  FourierTensor3 out(d);
  TubeDft dft(d.n3);
  std::vector<cplx> tube(d.n3);
  const std::size_t stride = d.slice_size();
  for (std::size_t p = 0; p < stride; ++p) {
    for (std::size_t k = 0; k < d.n3; ++k) tube[k] = x.data()[p + k * stride];
    dft.forward(tube);
    for (std::size_t k = 0; k < d.n3; ++k) out.data()[p + k * stride] = tube[k];
  }
  return out;
}

// Inverse tube DFT with 1/n3 scaling. The input must be conjugate symmetric:
// any imaginary residue above 1e-8 (relative to max(1, |result|_max)) means a
// Fourier-domain computation broke symmetry and is reported as an error.
inline Tensor3 ifft3(const FourierTensor3& x, double symmetry_tol = 1e-8) {
  const Dims& d = x.dims();
  Tensor3 out(d);
  TubeDft dft(d.n3);
  std::vector<cplx> tube(d.n3);
  const std::size_t stride = d.slice_size();
  double max_imag = 0.0;
  double max_real = 0.0;
  for (std::size_t p = 0; p < stride; ++p) {
    for (std::size_t k = 0; k < d.n3; ++k) tube[k] = x.data()[p + k * stride];
    dft.inverse(tube);
    for (std::size_t k = 0; k < d.n3; ++k) {
      out.data()[p + k * stride] = tube[k].real();
      max_imag = std::max(max_imag, std::abs(tube[k].imag()));
      max_real = std::max(max_real, std::abs(tube[k].real()));
    }
  }
  if (!(max_imag <= symmetry_tol * std::max(1.0, max_real))) {
    throw NumericalError("ifft3: imaginary residue " + std::to_string(max_imag) +
                         " exceeds tolerance; Fourier tensor is not conjugate "
                         "symmetric");
  }
  return out;
}

// Rectangular identity: slice 0 holds eye(m, n), the others are zero.
inline Tensor3 eye_tensor(std::size_t m, std::size_t n, std::size_t n3) {
  Tensor3 out(m, n, n3);
  for (std::size_t i = 0; i < std::min(m, n); ++i) out(i, i, 0) = 1.0;
  return out;
}

inline Tensor3 identity_tensor(std::size_t n, std::size_t n3) {
  if (n == 0 || n3 == 0) throw DimensionError("identity_tensor: n and n3 must be >= 1");
  return eye_tensor(n, n, n3);
}

// Slice-wise product of two spectra (only the unique half is multiplied).
inline FourierTensor3 fourier_product(const FourierTensor3& a, const FourierTensor3& b) {
  if (a.n2() != b.n1() || a.n3() != b.n3()) {
    throw DimensionError("t_product: cannot multiply " + a.dims().str() + " by " +
                         b.dims().str());
  }
  FourierTensor3 out(a.n1(), b.n2(), a.n3());
  const std::size_t half = unique_fourier_slices(a.n3());
  for (std::size_t l = 0; l < half; ++l) out.slice(l).noalias() = a.slice(l) * b.slice(l);
  conjugate_fill(out);
  return out;
}

inline Tensor3 t_product(const Tensor3& x, const Tensor3& y) {
  if (x.n2() != y.n1() || x.n3() != y.n3()) {
    throw DimensionError("t_product: cannot multiply " + x.dims().str() + " by " +
                         y.dims().str());
  }
  return ifft3(fourier_product(fft3(x), fft3(y)));
}

inline Tensor3 conj_transpose(const Tensor3& x) {
  const std::size_t n3 = x.n3();
  Tensor3 out(x.n2(), x.n1(), n3);
  if (n3 == 0) return out;
  out.slice(0) = x.slice(0).transpose();
  for (std::size_t k = 1; k < n3; ++k) out.slice(k) = x.slice(n3 - k).transpose();
  return out;
}

// Slice-wise conjugate transpose in the Fourier domain; equals
// fft3(conj_transpose(x)) when the input is fft3(x).
inline FourierTensor3 fourier_adjoint(const FourierTensor3& x) {
  FourierTensor3 out(x.n2(), x.n1(), x.n3());
  for (std::size_t l = 0; l < x.n3(); ++l) out.slice(l) = x.slice(l).adjoint();
  return out;
}

// ---- test oracles: explicit block-circulant forms, O(n3^2) memory ----

inline Matrix bcirc(const Tensor3& x) {
  const auto n1 = static_cast<Eigen::Index>(x.n1());
  const auto n2 = static_cast<Eigen::Index>(x.n2());
  const std::size_t n3 = x.n3();
  Matrix out(n1 * static_cast<Eigen::Index>(n3), n2 * static_cast<Eigen::Index>(n3));
  for (std::size_t p = 0; p < n3; ++p)
    for (std::size_t q = 0; q < n3; ++q)
      out.block(static_cast<Eigen::Index>(p) * n1, static_cast<Eigen::Index>(q) * n2, n1, n2) =
          x.slice((p + n3 - q) % n3);
  return out;
}

inline Matrix unfold(const Tensor3& x) {
  const auto n1 = static_cast<Eigen::Index>(x.n1());
  Matrix out(n1 * static_cast<Eigen::Index>(x.n3()), static_cast<Eigen::Index>(x.n2()));
  for (std::size_t k = 0; k < x.n3(); ++k)
    out.middleRows(static_cast<Eigen::Index>(k) * n1, n1) = x.slice(k);
  return out;
}

inline Tensor3 fold(const Matrix& m, Dims d) {
  if (static_cast<std::size_t>(m.rows()) != d.n1 * d.n3 ||
      static_cast<std::size_t>(m.cols()) != d.n2) {
    throw DimensionError("fold: matrix " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()) + " cannot fold into " + d.str());
  }
  Tensor3 out(d);
  const auto n1 = static_cast<Eigen::Index>(d.n1);
  for (std::size_t k = 0; k < d.n3; ++k)
    out.slice(k) = m.middleRows(static_cast<Eigen::Index>(k) * n1, n1);
  return out;
}

// --------------------------------------------------------------------

inline double squared_norm(const Tensor3& x) {
  double s = 0.0;
  for (double v : x.values()) s += v * v;
  return s;
}

inline double frobenius_norm(const Tensor3& x) { return std::sqrt(squared_norm(x)); }

// Sum over lateral slices X(:,j,:) of their Frobenius norms.
inline double l21_norm(const Tensor3& x) {
  double total = 0.0;
  for (std::size_t j = 0; j < x.n2(); ++j) {
    double s = 0.0;
    for (std::size_t k = 0; k < x.n3(); ++k)
      for (std::size_t i = 0; i < x.n1(); ++i) s += x(i, j, k) * x(i, j, k);
    total += std::sqrt(s);
  }
  return total;
}

inline Tensor3 hadamard(const Tensor3& x, const Tensor3& y) {
  detail::require_same_dims(x.dims(), y.dims(), "hadamard");
  Tensor3 out(x.dims());
  for (std::size_t n = 0; n < x.size(); ++n) out.data()[n] = x.data()[n] * y.data()[n];
  return out;
}

inline Tensor3 apply_mask(const Tensor3& x, const ObservationMask& a) {
  detail::require_same_dims(x.dims(), a.dims(), "apply_mask");
  Tensor3 out(x.dims());
  const double* m = a.indicator().data();
  for (std::size_t n = 0; n < x.size(); ++n) out.data()[n] = m[n] == 1.0 ? x.data()[n] : 0.0;
  return out;
}

}  // namespace tenqr

#endif  // TENQR_ALGEBRA_HPP
