#ifndef TENQR_TENSOR_HPP
#define TENQR_TENSOR_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace tenqr {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXd;
using CMatrix = Eigen::MatrixXcd;

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Dims {
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  std::size_t n3 = 0;

  std::size_t size() const { return n1 * n2 * n3; }
  std::size_t slice_size() const { return n1 * n2; }
  bool operator==(const Dims&) const = default;

  std::string str() const {
    return std::to_string(n1) + "x" + std::to_string(n2) + "x" +
           std::to_string(n3);
  }
};

namespace detail {

inline void require_same_dims(const Dims& a, const Dims& b, const char* what) {
  if (!(a == b)) {
    throw DimensionError(std::string(what) + ": dimension mismatch " + a.str() +
                         " vs " + b.str());
  }
}

}  // namespace detail

// Dense third-order array. Storage is frontal-slice-major and column-major
// inside each slice: entry (i,j,k) lives at i + n1*j + n1*n2*k, so a frontal
// slice maps directly onto an Eigen matrix.
template <typename Scalar>
class BasicTensor3 {
 public:
  using value_type = Scalar;
  using SliceMap = Eigen::Map<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>>;
  using ConstSliceMap =
      Eigen::Map<const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>>;

  BasicTensor3() = default;

  BasicTensor3(std::size_t n1, std::size_t n2, std::size_t n3)
      : dims_{n1, n2, n3}, values_(n1 * n2 * n3, Scalar(0)) {}

  explicit BasicTensor3(Dims d) : BasicTensor3(d.n1, d.n2, d.n3) {}

  BasicTensor3(Dims d, std::vector<Scalar> values)
      : dims_(d), values_(std::move(values)) {
    if (values_.size() != dims_.size()) {
      throw DimensionError("tensor " + dims_.str() + " needs " +
                           std::to_string(dims_.size()) + " values, got " +
                           std::to_string(values_.size()));
    }
  }

  const Dims& dims() const { return dims_; }
  std::size_t n1() const { return dims_.n1; }
  std::size_t n2() const { return dims_.n2; }
  std::size_t n3() const { return dims_.n3; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  Scalar& operator()(std::size_t i, std::size_t j, std::size_t k) {
    return values_[index(i, j, k)];
  }
  const Scalar& operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return values_[index(i, j, k)];
  }

  std::size_t index(std::size_t i, std::size_t j, std::size_t k) const {
    return i + dims_.n1 * (j + dims_.n2 * k);
  }

  Scalar* data() { return values_.data(); }
  const Scalar* data() const { return values_.data(); }
  std::vector<Scalar>& values() { return values_; }
  const std::vector<Scalar>& values() const { return values_; }

  // Frontal slice X(:,:,k) as a mutable n1 x n2 matrix view.
  SliceMap slice(std::size_t k) {
    return SliceMap(values_.data() + k * dims_.slice_size(),
                    static_cast<Eigen::Index>(dims_.n1),
                    static_cast<Eigen::Index>(dims_.n2));
  }
  ConstSliceMap slice(std::size_t k) const {
    return ConstSliceMap(values_.data() + k * dims_.slice_size(),
                         static_cast<Eigen::Index>(dims_.n1),
                         static_cast<Eigen::Index>(dims_.n2));
  }

  // Horizontal slice X(i,:,:) as a 1 x n2 x n3 tensor.
  BasicTensor3 horizontal(std::size_t i) const {
    BasicTensor3 out(1, dims_.n2, dims_.n3);
    for (std::size_t k = 0; k < dims_.n3; ++k)
      for (std::size_t j = 0; j < dims_.n2; ++j) out(0, j, k) = (*this)(i, j, k);
    return out;
  }

  // Lateral slice X(:,j,:) as an n1 x 1 x n3 tensor.
  BasicTensor3 lateral(std::size_t j) const {
    BasicTensor3 out(dims_.n1, 1, dims_.n3);
    for (std::size_t k = 0; k < dims_.n3; ++k)
      for (std::size_t i = 0; i < dims_.n1; ++i) out(i, 0, k) = (*this)(i, j, k);
    return out;
  }

  std::vector<Scalar> tube(std::size_t i, std::size_t j) const {
    std::vector<Scalar> out(dims_.n3);
    for (std::size_t k = 0; k < dims_.n3; ++k) out[k] = (*this)(i, j, k);
    return out;
  }

  // First `count` frontal slices, X(:,:,0:count).
  BasicTensor3 leading_slices(std::size_t count) const {
    if (count > dims_.n3) {
      throw DimensionError("leading_slices: requested " + std::to_string(count) +
                           " of " + std::to_string(dims_.n3) + " slices");
    }
    BasicTensor3 out(dims_.n1, dims_.n2, count);
    std::copy_n(values_.begin(), count * dims_.slice_size(), out.values_.begin());
    return out;
  }

  BasicTensor3 slice_range(std::size_t first, std::size_t count) const {
    if (first + count > dims_.n3) {
      throw DimensionError("slice_range: [" + std::to_string(first) + ", " +
                           std::to_string(first + count) + ") exceeds " +
                           std::to_string(dims_.n3) + " slices");
    }
    BasicTensor3 out(dims_.n1, dims_.n2, count);
    std::copy_n(values_.begin() + first * dims_.slice_size(),
                count * dims_.slice_size(), out.values_.begin());
    return out;
  }

  BasicTensor3& operator+=(const BasicTensor3& o) {
    detail::require_same_dims(dims_, o.dims_, "operator+=");
    for (std::size_t n = 0; n < values_.size(); ++n) values_[n] += o.values_[n];
    return *this;
  }
  BasicTensor3& operator-=(const BasicTensor3& o) {
    detail::require_same_dims(dims_, o.dims_, "operator-=");
    for (std::size_t n = 0; n < values_.size(); ++n) values_[n] -= o.values_[n];
    return *this;
  }
  BasicTensor3& operator*=(Scalar s) {
    for (auto& v : values_) v *= s;
    return *this;
  }

  friend BasicTensor3 operator+(BasicTensor3 a, const BasicTensor3& b) { return a += b; }
  friend BasicTensor3 operator-(BasicTensor3 a, const BasicTensor3& b) { return a -= b; }
  friend BasicTensor3 operator*(Scalar s, BasicTensor3 a) { return a *= s; }
  friend BasicTensor3 operator*(BasicTensor3 a, Scalar s) { return a *= s; }

  bool operator==(const BasicTensor3&) const = default;

  bool all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](const Scalar& v) {
      if constexpr (std::is_same_v<Scalar, cplx>) {
        return std::isfinite(v.real()) && std::isfinite(v.imag());
      } else {
        return std::isfinite(v);
      }
    });
  }

 private:
  Dims dims_;
  std::vector<Scalar> values_;
};

using Tensor3 = BasicTensor3<double>;

// Tube-wise DFT of a Tensor3: slice l holds the l-th frontal slice of fft(X,3).
using FourierTensor3 = BasicTensor3<cplx>;

struct Index3 {
  std::size_t i = 0;
  std::size_t j = 0;
  std::size_t k = 0;
  auto operator<=>(const Index3&) const = default;
};

// Binary indicator tensor A together with its support Omega. Omega is kept in
// (k, j, i) storage order, which is also the order entries are added by the
// samplers slot by slot.
class ObservationMask {
 public:
  ObservationMask() = default;
  explicit ObservationMask(Dims d) : mask_(d) {}

  static ObservationMask full(Dims d) {
    ObservationMask m(d);
    for (std::size_t k = 0; k < d.n3; ++k)
      for (std::size_t j = 0; j < d.n2; ++j)
        for (std::size_t i = 0; i < d.n1; ++i) m.add({i, j, k});
    return m;
  }

  // Builds a mask from a 0/1 tensor; any other value is rejected.
  static ObservationMask from_indicator(const Tensor3& indicator) {
    ObservationMask m(indicator.dims());
    const Dims& d = indicator.dims();
    for (std::size_t k = 0; k < d.n3; ++k)
      for (std::size_t j = 0; j < d.n2; ++j)
        for (std::size_t i = 0; i < d.n1; ++i) {
          const double v = indicator(i, j, k);
          if (v == 1.0) {
            m.add({i, j, k});
          } else if (v != 0.0) {
            throw std::invalid_argument("mask entry (" + std::to_string(i) + "," +
                                        std::to_string(j) + "," + std::to_string(k) +
                                        ") is neither 0 nor 1");
          }
        }
    return m;
  }

  // Returns false if the index was already present.
  bool add(Index3 idx) {
    double& cell = mask_(idx.i, idx.j, idx.k);
    if (cell == 1.0) return false;
    cell = 1.0;
    omega_.push_back(idx);
    return true;
  }

  bool contains(std::size_t i, std::size_t j, std::size_t k) const {
    return mask_(i, j, k) == 1.0;
  }

  const Tensor3& indicator() const { return mask_; }
  const std::vector<Index3>& omega() const { return omega_; }
  const Dims& dims() const { return mask_.dims(); }
  std::size_t count() const { return omega_.size(); }

  std::size_t count_in_slot(std::size_t k) const {
    std::size_t c = 0;
    auto s = mask_.slice(k);
    for (Eigen::Index n = 0; n < s.size(); ++n) c += s.data()[n] == 1.0;
    return c;
  }

 private:
  Tensor3 mask_;
  std::vector<Index3> omega_;
};

}  // namespace tenqr

#endif  // TENQR_TENSOR_HPP
