#ifndef TENQR_COMPLETION_HPP
#define TENQR_COMPLETION_HPP

#include "tenqr/algebra.hpp"
#include "tenqr/factor.hpp"
#include "tenqr/tensor.hpp"

#include <Eigen/SVD>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace tenqr {

struct SolverConfig {
  std::size_t rank = 5;
  double mu = 0.01;
  double rho = 1.5;
  // Stop once ||L*D*R - X||_F^2 < eps_rel * ||M||_F^2 (after min_iters).
  double eps_rel = 1e-8;
  std::size_t min_iters = 5;
  std::size_t max_iters = 200;
  std::uint64_t seed = 0;

  void validate(Dims d) const {
    if (!(mu > 0.0)) throw std::invalid_argument("solver: mu must be positive");
    if (!(rho >= 1.0)) throw std::invalid_argument("solver: rho must be >= 1");
    if (!(eps_rel > 0.0)) throw std::invalid_argument("solver: eps must be positive");
    if (max_iters < 1) throw std::invalid_argument("solver: max_iters must be >= 1");
    if (min_iters > max_iters) throw std::invalid_argument("solver: min_iters exceeds max_iters");
    check_rank(rank, d.n1, d.n2, "solver");
  }
};

struct SolverState {
  Tensor3 x;
  Tensor3 y;
  double mu = 0.0;
  FactorTriple triple;
  std::vector<double> residual_history;
  std::size_t iterations = 0;
  double elapsed_ms = 0.0;
  bool converged = false;
};

// Snapshot handed to an observer after every iteration.
struct IterationInfo {
  std::size_t iteration = 0;  // 1-based
  double residual = 0.0;      // ||L*D*R - X||_F^2
  double mu = 0.0;            // penalty used in this iteration
  double elapsed_ms = 0.0;
  const Tensor3* x = nullptr;
  // Spectra of D_T and of the shrunk D (LNLS-TQR only).
  const FourierTensor3* d_t = nullptr;
  const FourierTensor3* d = nullptr;
};

using IterationObserver = std::function<void(const IterationInfo&)>;

struct CompletionResult {
  Tensor3 x_hat;
  SolverState state;
};

// Column-wise group soft-threshold: c -> max(|c| - threshold, 0) c / |c|.
template <typename Derived>
void shrink_columns(Eigen::MatrixBase<Derived>& m, double threshold) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    const double norm = m.col(j).norm();
    if (norm <= threshold || norm == 0.0) {
      m.col(j).setZero();
    } else {
      m.col(j) *= (norm - threshold) / norm;
    }
  }
}

// Proximal map of (1/mu) * sum_{j,l} ||column j of Fourier slice l||, applied
// to D_T slice by slice in the Fourier domain.
inline FourierTensor3 fourier_l21_shrinkage(FourierTensor3 dh, double mu) {
  if (!(mu > 0.0)) throw std::invalid_argument("l21_shrinkage: mu must be positive");
  const double threshold = 1.0 / mu;
  for (std::size_t l = 0; l < dh.n3(); ++l) {
    auto s = dh.slice(l);
    shrink_columns(s, threshold);
  }
  return dh;
}

inline Tensor3 l21_shrinkage(const Tensor3& d_t, double mu) {
  return ifft3(fourier_l21_shrinkage(fft3(d_t), mu));
}

// (1/n3) * sum of the nuclear norms of the Fourier slices.
inline double tensor_nuclear_norm(const Tensor3& x) {
  const FourierTensor3 xh = fft3(x);
  double total = 0.0;
  for (std::size_t l = 0; l < xh.n3(); ++l)
    total += Eigen::JacobiSVD<CMatrix>(xh.slice(l)).singularValues().sum();
  return total / static_cast<double>(x.n3());
}

inline double rse(const Tensor3& estimate, const Tensor3& truth) {
  detail::require_same_dims(estimate.dims(), truth.dims(), "rse");
  const double denom = squared_norm(truth);
  if (denom == 0.0) throw std::invalid_argument("rse: truth tensor is zero");
  double num = 0.0;
  for (std::size_t n = 0; n < truth.size(); ++n) {
    const double e = estimate.data()[n] - truth.data()[n];
    num += e * e;
  }
  return std::sqrt(num / denom);
}

// RSE restricted to the entries of `known` (for ground truth with gaps).
inline double rse(const Tensor3& estimate, const Tensor3& truth, const ObservationMask& known) {
  return rse(apply_mask(estimate, known), apply_mask(truth, known));
}

namespace detail {

inline void validate_problem(const Tensor3& observed, const ObservationMask& mask,
                             const SolverConfig& cfg) {
  require_same_dims(observed.dims(), mask.dims(), "completion");
  if (observed.size() == 0) throw DimensionError("completion: empty tensor");
  cfg.validate(observed.dims());
  const double* a = mask.indicator().data();
  for (std::size_t n = 0; n < observed.size(); ++n) {
    if (a[n] != 1.0 && observed.data()[n] != 0.0) {
      throw std::invalid_argument("completion: observed tensor is nonzero outside the mask");
    }
    if (!std::isfinite(observed.data()[n])) {
      throw std::invalid_argument("completion: observed tensor has non-finite entries");
    }
  }
}

// Shared ADMM skeleton. `approximate` maps the spectrum of Z = X + Y/mu to the
// spectrum of the low-rank estimate L*D*R for the current mu.
template <typename Approximate>
CompletionResult admm_loop(const Tensor3& observed, const ObservationMask& mask,
                           const SolverConfig& cfg, Approximate&& approximate,
                           const IterationObserver& observer) {
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  const Dims d = observed.dims();
  const double* a = mask.indicator().data();
  const double eps = cfg.eps_rel * squared_norm(observed);

  SolverState st;
  st.x = observed;
  st.y = Tensor3(d);
  st.mu = cfg.mu;
  Tensor3 z(d);

  for (std::size_t k = 0; k < cfg.max_iters; ++k) {
    const double mu = st.mu;
    for (std::size_t n = 0; n < d.size(); ++n) z.data()[n] = st.x.data()[n] + st.y.data()[n] / mu;

    const Tensor3 low_rank = ifft3(approximate(fft3(z), mu));

    double residual = 0.0;
    for (std::size_t n = 0; n < d.size(); ++n) {
      const double p = low_rank.data()[n];
      const double x_new = a[n] == 1.0 ? observed.data()[n] : p;
      st.x.data()[n] = x_new;
      st.y.data()[n] += mu * (x_new - p);
      residual += (p - x_new) * (p - x_new);
    }
    st.mu = cfg.rho * mu;
    st.iterations = k + 1;
    st.residual_history.push_back(residual);

    if (!std::isfinite(residual) || !st.x.all_finite() || !st.y.all_finite()) {
      throw NumericalError("completion: non-finite values at iteration " +
                           std::to_string(k + 1));
    }
    st.elapsed_ms = std::chrono::duration<double, std::milli>(clock::now() - start).count();
    if (observer) {
      IterationInfo info;
      info.iteration = k + 1;
      info.residual = residual;
      info.mu = mu;
      info.elapsed_ms = st.elapsed_ms;
      info.x = &st.x;
      approximate.annotate(info);
      observer(info);
    }
    if (st.iterations >= cfg.min_iters && residual < eps) {
      st.converged = true;
      break;
    }
  }
  return {st.x, std::move(st)};
}

// One t-QR sweep plus L2,1 shrinkage per iteration.
struct TqrStep {
  std::size_t rank;
  FourierTriple f;
  FourierTensor3 d_t;

  TqrStep(Dims d, std::size_t r)
      : rank(r),
        f{FourierTensor3(d.n1, r, d.n3), FourierTensor3(r, r, d.n3),
          FourierTensor3(r, d.n2, d.n3)},
        d_t(r, r, d.n3) {
    // L_1, D_1, R_1 = rectangular identity tensors: eye in every Fourier slice.
    for (std::size_t l = 0; l < d.n3; ++l) {
      f.l.slice(l) = CMatrix::Identity(static_cast<Eigen::Index>(d.n1), static_cast<Eigen::Index>(r));
      f.d.slice(l) = CMatrix::Identity(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(r));
      f.r.slice(l) = CMatrix::Identity(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(d.n2));
    }
  }

  template <typename M>
  void sweep(const M& z, M& l, M& dt, M& d, M& r, M& product, double threshold) {
    l = thin_qr(z * r.adjoint()).q;
    auto second = thin_qr(z.adjoint() * l);
    r = second.q.adjoint();
    dt = second.r.adjoint();
    d = dt;
    shrink_columns(d, threshold);
    product.noalias() = l * (d * r);
  }

  FourierTensor3 operator()(const FourierTensor3& zh, double mu) {
    const std::size_t n3 = zh.n3();
    FourierTensor3 out(zh.dims());
    const double threshold = 1.0 / mu;
    for (std::size_t s = 0; s < unique_fourier_slices(n3); ++s) {
      if (self_conjugate_slice(s, n3)) {
        Matrix l = f.l.slice(s).real(), d = f.d.slice(s).real(), r = f.r.slice(s).real();
        Matrix dt, product;
        sweep(Matrix(zh.slice(s).real()), l, dt, d, r, product, threshold);
        f.l.slice(s) = l.cast<cplx>();
        f.d.slice(s) = d.cast<cplx>();
        f.r.slice(s) = r.cast<cplx>();
        d_t.slice(s) = dt.cast<cplx>();
        out.slice(s) = product.cast<cplx>();
      } else {
        CMatrix l = f.l.slice(s), d = f.d.slice(s), r = f.r.slice(s);
        CMatrix dt, product;
        sweep(CMatrix(zh.slice(s)), l, dt, d, r, product, threshold);
        f.l.slice(s) = l;
        f.d.slice(s) = d;
        f.r.slice(s) = r;
        d_t.slice(s) = dt;
        out.slice(s) = product;
      }
    }
    conjugate_fill(f.l);
    conjugate_fill(f.d);
    conjugate_fill(f.r);
    conjugate_fill(d_t);
    conjugate_fill(out);
    return out;
  }

  void annotate(IterationInfo& info) const {
    info.d_t = &d_t;
    info.d = &f.d;
  }
};

// Fourier-domain singular value thresholding at 1/mu.
struct SvtStep {
  template <typename M>
  static M threshold(const M& z, double tau) {
    Eigen::JacobiSVD<M> svd(z, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Eigen::VectorXd sv = (svd.singularValues().array() - tau).cwiseMax(0.0);
    return svd.matrixU() * sv.asDiagonal() * svd.matrixV().adjoint();
  }

  FourierTensor3 operator()(const FourierTensor3& zh, double mu) const {
    const std::size_t n3 = zh.n3();
    FourierTensor3 out(zh.dims());
    const double tau = 1.0 / mu;
    for (std::size_t s = 0; s < unique_fourier_slices(n3); ++s) {
      if (self_conjugate_slice(s, n3)) {
        out.slice(s) = threshold(Matrix(zh.slice(s).real()), tau).cast<cplx>();
      } else {
        out.slice(s) = threshold(CMatrix(zh.slice(s)), tau);
      }
    }
    conjugate_fill(out);
    return out;
  }

  void annotate(IterationInfo&) const {}
};

}  // namespace detail

// L2,1-norm ADMM completion with t-QR subproblem updates. Each iteration, with
// Z = X + Y/mu:
//   L           <- Q of t-QR(Z * R^*)
//   (Rt, T)     <- t-QR(Z^* * L),  R <- Rt^*,  D_T <- T^*
//   D           <- L2,1 shrinkage of D_T at 1/mu
//   X           <- L*D*R off the mask, M on it
//   Y           <- Y + mu (X - L*D*R),  mu <- rho mu
inline CompletionResult lnls_tqr(const Tensor3& observed, const ObservationMask& mask,
                                 const SolverConfig& cfg,
                                 const IterationObserver& observer = {}) {
  detail::validate_problem(observed, mask, cfg);
  detail::TqrStep step(observed.dims(), cfg.rank);
  CompletionResult res = detail::admm_loop(observed, mask, cfg, step, observer);
  res.state.triple = {ifft3(step.f.l), ifft3(step.f.d), ifft3(step.f.r), cfg.rank};
  return res;
}

// Baseline: the same ADMM skeleton with full t-SVD singular value thresholding.
inline CompletionResult tnn_admm(const Tensor3& observed, const ObservationMask& mask,
                                 const SolverConfig& cfg,
                                 const IterationObserver& observer = {}) {
  detail::validate_problem(observed, mask, cfg);
  detail::SvtStep step;
  return detail::admm_loop(observed, mask, cfg, step, observer);
}

}  // namespace tenqr

#endif  // TENQR_COMPLETION_HPP
