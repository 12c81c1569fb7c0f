#ifndef TENQR_SAMPLING_HPP
#define TENQR_SAMPLING_HPP

#include "tenqr/factor.hpp"
#include "tenqr/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace tenqr {

// Probe budget split evenly over the time slots; the first `random_slots`
// slots are sampled uniformly, the remainder by leverage scores.
struct SamplingBudget {
  std::size_t total_probes = 0;
  std::size_t per_slot = 0;
  double beta = 0.1;
  std::size_t random_slots = 1;
};

inline SamplingBudget make_budget(std::size_t total_probes, Dims dims, double beta) {
  if (dims.size() == 0) throw DimensionError("make_budget: empty tensor " + dims.str());
  if (total_probes == 0) throw std::invalid_argument("make_budget: probe budget must be positive");
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("make_budget: beta must lie in (0,1)");
  SamplingBudget b;
  b.total_probes = total_probes;
  b.beta = beta;
  b.per_slot = (total_probes + dims.n3 - 1) / dims.n3;
  if (b.per_slot > dims.slice_size()) {
    throw std::invalid_argument("make_budget: " + std::to_string(b.per_slot) +
                                " probes per slot exceed slot capacity " +
                                std::to_string(dims.slice_size()));
  }
  const auto t = static_cast<std::size_t>(std::ceil(beta * static_cast<double>(dims.n3)));
  // At least one warm-up slot, and at least one leverage slot whenever n3 > 1.
  b.random_slots = std::clamp<std::size_t>(t, 1, std::max<std::size_t>(dims.n3 - 1, 1));
  return b;
}

// Budget for a fraction of all entries: N = ceil(rate * n1*n2*n3).
inline SamplingBudget budget_for_rate(double rate, Dims dims, double beta) {
  if (!(rate > 0.0 && rate <= 1.0)) throw std::invalid_argument("sampling rate must lie in (0,1]");
  const auto n = static_cast<std::size_t>(std::ceil(rate * static_cast<double>(dims.size()) - 1e-9));
  return make_budget(std::max<std::size_t>(n, 1), dims, beta);
}

struct LeverageScores {
  std::vector<double> u;  // horizontal-slice scores, one per row i
  std::vector<double> v;  // lateral-slice scores, one per column j
  std::size_t rank = 0;
};

// u_i = (n1/r) ||L(i,:,:)||_F^2,  v_j = (n2/r) ||R(:,j,:)||_F^2.
inline LeverageScores leverage_scores(const Tensor3& l_factor, const Tensor3& r_factor,
                                      std::size_t rank) {
  if (rank == 0 || l_factor.n2() != rank || r_factor.n1() != rank ||
      l_factor.n3() != r_factor.n3()) {
    throw DimensionError("leverage_scores: factors " + l_factor.dims().str() + " and " +
                         r_factor.dims().str() + " do not match rank " +
                         std::to_string(rank));
  }
  const std::size_t n1 = l_factor.n1();
  const std::size_t n2 = r_factor.n2();
  const std::size_t n3 = l_factor.n3();
  LeverageScores s{std::vector<double>(n1, 0.0), std::vector<double>(n2, 0.0), rank};
  for (std::size_t k = 0; k < n3; ++k)
    for (std::size_t c = 0; c < rank; ++c)
      for (std::size_t i = 0; i < n1; ++i) s.u[i] += l_factor(i, c, k) * l_factor(i, c, k);
  for (std::size_t k = 0; k < n3; ++k)
    for (std::size_t j = 0; j < n2; ++j)
      for (std::size_t c = 0; c < rank; ++c) s.v[j] += r_factor(c, j, k) * r_factor(c, j, k);
  const double ru = static_cast<double>(n1) / static_cast<double>(rank);
  const double rv = static_cast<double>(n2) / static_cast<double>(rank);
  for (auto& x : s.u) x *= ru;
  for (auto& x : s.v) x *= rv;
  return s;
}

struct SlotProbabilities {
  Matrix p;        // n1 x n2, capped at 1
  Matrix weight;   // the uncapped value before min{., 1}
  double c0 = 1.0;
};

// p_ij = min{ c0 (a_i + b_j - a_i b_j) log(n1 n3) log(n2 n3), 1 } with
// a_i = u_i r / n1 and b_j = v_j r / n2.
inline SlotProbabilities slot_probabilities(const LeverageScores& scores, std::size_t rank,
                                            std::size_t n1, std::size_t n2, std::size_t n3,
                                            double c0) {
  if (scores.u.size() != n1 || scores.v.size() != n2) {
    throw DimensionError("slot_probabilities: score vectors do not match " +
                         std::to_string(n1) + "x" + std::to_string(n2));
  }
  const double r = static_cast<double>(rank);
  const double logs = std::log(static_cast<double>(n1 * n3)) *
                      std::log(static_cast<double>(n2 * n3));
  SlotProbabilities out;
  out.c0 = c0;
  out.p.resize(static_cast<Eigen::Index>(n1), static_cast<Eigen::Index>(n2));
  out.weight.resizeLike(out.p);
  for (std::size_t j = 0; j < n2; ++j) {
    const double b = scores.v[j] * r / static_cast<double>(n2);
    for (std::size_t i = 0; i < n1; ++i) {
      const double a = scores.u[i] * r / static_cast<double>(n1);
      const double w = c0 * (a + b - a * b) * logs;
      const auto ei = static_cast<Eigen::Index>(i);
      const auto ej = static_cast<Eigen::Index>(j);
      out.weight(ei, ej) = w;
      out.p(ei, ej) = std::clamp(w, 0.0, 1.0);
    }
  }
  return out;
}

using SlotEntry = std::pair<std::size_t, std::size_t>;

// Rank-ordered selection: highest p first; entries tied at the cap are ordered
// by their uncapped weight, remaining ties by (i, j).
inline std::vector<SlotEntry> select_top(const SlotProbabilities& probs, std::size_t count,
                                         const std::vector<SlotEntry>& candidates) {
  std::vector<SlotEntry> order = candidates;
  count = std::min(count, order.size());
  auto key_less = [&](const SlotEntry& x, const SlotEntry& y) {
    const auto xi = static_cast<Eigen::Index>(x.first), xj = static_cast<Eigen::Index>(x.second);
    const auto yi = static_cast<Eigen::Index>(y.first), yj = static_cast<Eigen::Index>(y.second);
    if (probs.p(xi, xj) != probs.p(yi, yj)) return probs.p(xi, xj) > probs.p(yi, yj);
    if (probs.weight(xi, xj) != probs.weight(yi, yj))
      return probs.weight(xi, xj) > probs.weight(yi, yj);
    return x < y;
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(count),
                    order.end(), key_less);
  order.resize(count);
  return order;
}

inline std::vector<SlotEntry> slot_candidates(Dims dims, std::size_t k,
                                              const ObservationMask* available) {
  std::vector<SlotEntry> out;
  out.reserve(dims.slice_size());
  for (std::size_t i = 0; i < dims.n1; ++i)
    for (std::size_t j = 0; j < dims.n2; ++j)
      if (available == nullptr || available->contains(i, j, k)) out.emplace_back(i, j);
  return out;
}

// Uniform draw of `count` distinct pairs (partial Fisher-Yates).
inline std::vector<SlotEntry> random_sample_slot(std::vector<SlotEntry> pool,
                                                 std::size_t count, std::mt19937_64& rng) {
  count = std::min(count, pool.size());
  for (std::size_t n = 0; n < count; ++n) {
    std::uniform_int_distribution<std::size_t> pick(n, pool.size() - 1);
    std::swap(pool[n], pool[pick(rng)]);
  }
  pool.resize(count);
  return pool;
}

inline std::vector<SlotEntry> random_sample_slot(Dims dims, std::size_t k,
                                                 const SamplingBudget& budget,
                                                 std::uint64_t seed) {
  if (budget.per_slot > dims.slice_size()) {
    throw std::invalid_argument("random_sample_slot: budget exceeds slot capacity");
  }
  std::mt19937_64 rng(seed);
  return random_sample_slot(slot_candidates(dims, k, nullptr), budget.per_slot, rng);
}

using ProbeOracle = std::function<double(std::size_t, std::size_t, std::size_t)>;

struct SampleResult {
  Tensor3 observed;
  ObservationMask mask;
};

struct SamplingOptions {
  double c0 = 1.0;
  std::size_t ctsvd_iters = kDefaultCtsvdIters;
  // Entries outside this mask cannot be probed (e.g. missing RTTs); probes
  // allotted to a slot are capped at its number of available entries.
  const ObservationMask* available = nullptr;
};

namespace detail {

inline void probe_slot(const ProbeOracle& oracle, std::size_t k,
                       const std::vector<SlotEntry>& picks, SampleResult& out) {
  for (const auto& [i, j] : picks) {
    const double value = oracle(i, j, k);
    out.observed(i, j, k) = value;
    out.mask.add({i, j, k});
  }
}

inline void validate_sampling(Dims dims, const SamplingBudget& budget,
                              const SamplingOptions& opts) {
  if (dims.size() == 0) throw DimensionError("sampling: empty tensor " + dims.str());
  if (budget.per_slot == 0 || budget.per_slot > dims.slice_size()) {
    throw std::invalid_argument("sampling: per-slot budget " + std::to_string(budget.per_slot) +
                                " outside [1, " + std::to_string(dims.slice_size()) + "]");
  }
  if (opts.available != nullptr) detail::require_same_dims(dims, opts.available->dims(), "sampling");
}

}  // namespace detail

// Stage-1-only sampling: every slot is drawn uniformly at random.
inline SampleResult random_sampling(const ProbeOracle& oracle, Dims dims,
                                    const SamplingBudget& budget, std::uint64_t seed,
                                    const SamplingOptions& opts = {}) {
  detail::validate_sampling(dims, budget, opts);
  SampleResult out{Tensor3(dims), ObservationMask(dims)};
  std::mt19937_64 rng(seed);
  for (std::size_t k = 0; k < dims.n3; ++k) {
    detail::probe_slot(oracle, k,
                       random_sample_slot(slot_candidates(dims, k, opts.available),
                                          budget.per_slot, rng),
                       out);
  }
  return out;
}

// Two-stage QR-based leverage sampling. Slots [0, t) are sampled uniformly;
// each later slot k factors the zero-filled observations X(:,:,0:k) with
// CTSVD-QR and probes the per-slot budget in descending probability order.
inline SampleResult qrls(const ProbeOracle& oracle, Dims dims, const SamplingBudget& budget,
                         std::size_t rank, std::uint64_t seed,
                         const SamplingOptions& opts = {}) {
  detail::validate_sampling(dims, budget, opts);
  check_rank(rank, dims.n1, dims.n2, "qrls");
  SampleResult out{Tensor3(dims), ObservationMask(dims)};
  std::mt19937_64 rng(seed);
  const std::size_t warmup = std::min(budget.random_slots, dims.n3);
  for (std::size_t k = 0; k < warmup; ++k) {
    detail::probe_slot(oracle, k,
                       random_sample_slot(slot_candidates(dims, k, opts.available),
                                          budget.per_slot, rng),
                       out);
  }
  for (std::size_t k = warmup; k < dims.n3; ++k) {
    const FactorTriple f = ctsvd_qr(out.observed.leading_slices(k), rank, opts.ctsvd_iters);
    const LeverageScores scores = leverage_scores(f.l, f.r, rank);
    const SlotProbabilities probs =
        slot_probabilities(scores, rank, dims.n1, dims.n2, dims.n3, opts.c0);
    detail::probe_slot(oracle, k,
                       select_top(probs, budget.per_slot, slot_candidates(dims, k, opts.available)),
                       out);
  }
  return out;
}

inline ProbeOracle tensor_oracle(const Tensor3& truth) {
  return [&truth](std::size_t i, std::size_t j, std::size_t k) { return truth(i, j, k); };
}

}  // namespace tenqr

#endif  // TENQR_SAMPLING_HPP
