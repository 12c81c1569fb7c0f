#ifndef TENQR_DATA_HPP
#define TENQR_DATA_HPP

#include "tenqr/algebra.hpp"
#include "tenqr/tensor.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace tenqr {

struct SyntheticSpec {
  Dims dims{50, 50, 10};
  std::size_t true_rank = 5;
  std::uint64_t seed = 0;
  double scale = 1.0;  // max |entry| of the generated tensor
};

struct NoiseSpec {
  double mean = 0.0;
  double stddev = 0.01;
};

struct Normalized {
  Tensor3 tensor;
  double scale = 1.0;  // original = tensor * scale
};

inline Normalized normalize(const Tensor3& x) {
  double peak = 0.0;
  for (double v : x.values()) peak = std::max(peak, std::abs(v));
  if (peak == 0.0) throw std::invalid_argument("normalize: zero tensor");
  Normalized out{x, peak};
  out.tensor *= 1.0 / peak;
  return out;
}

inline Tensor3 gaussian_tensor(Dims d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Tensor3 out(d);
  for (auto& v : out.values()) v = normal(rng);
  return out;
}

// X = P * Q with standard normal P (n1 x r x n3) and Q (r x n2 x n3), rescaled
// so that max |X| = spec.scale.
inline Tensor3 gen_low_tubal_rank(const SyntheticSpec& spec) {
  const Dims& d = spec.dims;
  if (d.size() == 0) throw DimensionError("gen_low_tubal_rank: empty dims " + d.str());
  if (spec.true_rank < 1 || spec.true_rank > std::min(d.n1, d.n2)) {
    throw std::invalid_argument("gen_low_tubal_rank: rank must lie in [1, min(n1, n2)]");
  }
  std::mt19937_64 rng(spec.seed);
  const Tensor3 p = gaussian_tensor({d.n1, spec.true_rank, d.n3}, rng);
  const Tensor3 q = gaussian_tensor({spec.true_rank, d.n2, d.n3}, rng);
  Tensor3 x = normalize(t_product(p, q)).tensor;
  if (spec.scale != 1.0) x *= spec.scale;
  return x;
}

inline Tensor3 add_noise(const Tensor3& x, const NoiseSpec& spec, std::uint64_t seed) {
  if (!(spec.stddev >= 0.0)) throw std::invalid_argument("add_noise: stddev must be >= 0");
  if (spec.stddev == 0.0 && spec.mean == 0.0) return x;
  std::mt19937_64 rng(seed);
  Tensor3 out = x;
  if (spec.stddev == 0.0) {
    for (auto& v : out.values()) v += spec.mean;
    return out;
  }
  std::normal_distribution<double> normal(spec.mean, spec.stddev);
  for (auto& v : out.values()) v += normal(rng);
  return out;
}

}  // namespace tenqr

#endif  // TENQR_DATA_HPP
