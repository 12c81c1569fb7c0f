#ifndef TENQR_PIPELINE_HPP
#define TENQR_PIPELINE_HPP

#include "tenqr/completion.hpp"
#include "tenqr/data.hpp"
#include "tenqr/io.hpp"
#include "tenqr/sampling.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

namespace tenqr {

enum class SamplerKind { qrls, random };
enum class SolverKind { lnls_tqr, tnn_admm };

inline std::string to_string(SamplerKind s) { return s == SamplerKind::qrls ? "qrls" : "random"; }
inline std::string to_string(SolverKind s) {
  return s == SolverKind::lnls_tqr ? "lnls-tqr" : "tnn-admm";
}

inline SamplerKind parse_sampler(const std::string& s) {
  if (s == "qrls") return SamplerKind::qrls;
  if (s == "random") return SamplerKind::random;
  throw std::invalid_argument("unknown sampler '" + s + "' (expected qrls or random)");
}

inline SolverKind parse_solver(const std::string& s) {
  if (s == "lnls-tqr") return SolverKind::lnls_tqr;
  if (s == "tnn-admm") return SolverKind::tnn_admm;
  throw std::invalid_argument("unknown solver '" + s + "' (expected lnls-tqr or tnn-admm)");
}

struct SampleOptions {
  SamplerKind sampler = SamplerKind::qrls;
  double rate = 0.5;
  double beta = 0.1;
  double c0 = 1.0;
  std::size_t rank = 5;
  std::uint64_t seed = 0;
};

// Derived per-purpose seeds so that sampling and noise draws never share a stream.
inline std::uint64_t noise_seed(std::uint64_t seed) { return seed * 0x9E3779B97F4A7C15ULL + 0x5851F42D4C957F2DULL; }

inline SampleResult sample_tensor(const Tensor3& truth, const SampleOptions& opt,
                                  const ObservationMask* available = nullptr) {
  const SamplingBudget budget = budget_for_rate(opt.rate, truth.dims(), opt.beta);
  SamplingOptions so;
  so.c0 = opt.c0;
  so.available = available;
  const ProbeOracle oracle = tensor_oracle(truth);
  if (opt.sampler == SamplerKind::random) return random_sampling(oracle, truth.dims(), budget, opt.seed, so);
  return qrls(oracle, truth.dims(), budget, opt.rank, opt.seed, so);
}

inline CompletionResult complete_tensor(SolverKind solver, const Tensor3& observed,
                                        const ObservationMask& mask, const SolverConfig& cfg,
                                        const IterationObserver& observer = {}) {
  return solver == SolverKind::lnls_tqr ? lnls_tqr(observed, mask, cfg, observer)
                                        : tnn_admm(observed, mask, cfg, observer);
}

// One report row; column order is the CSV layout.
struct BenchRow {
  std::string solver;
  std::string sampler;
  double sampling_rate = 0.0;
  double noise_sigma = 0.0;
  std::string seed;
  double rse = std::numeric_limits<double>::quiet_NaN();
  std::size_t iterations = 0;
  double total_ms = 0.0;
  double per_iter_ms = 0.0;
  std::size_t rank = 0;
  std::string status = "ok";
};

inline constexpr const char* kBenchHeader =
    "solver,sampler,sampling_rate,noise_sigma,seed,rse,iterations,total_ms,per_iter_ms,rank,status";

inline void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows) {
  os << kBenchHeader << '\n';
  for (const auto& r : rows) {
    std::string status = r.status;
    std::replace(status.begin(), status.end(), ',', ';');
    std::replace(status.begin(), status.end(), '\n', ' ');
    os << r.solver << ',' << r.sampler << ',' << format_double(r.sampling_rate, 6) << ','
       << format_double(r.noise_sigma, 6) << ',' << r.seed << ',' << format_double(r.rse, 10)
       << ',' << r.iterations << ',' << format_double(r.total_ms, 6) << ','
       << format_double(r.per_iter_ms, 6) << ',' << r.rank << ',' << status << '\n';
  }
}

struct CellSpec {
  SolverKind solver = SolverKind::lnls_tqr;
  SamplerKind sampler = SamplerKind::qrls;
  double rate = 0.5;
  double noise_sigma = 0.0;
  std::size_t rank = 5;
  std::uint64_t seed = 0;
};

struct CellParams {
  double beta = 0.1;
  double c0 = 1.0;
  SolverConfig solver;  // rank and seed are overridden per cell
};

// sample -> complete -> score for one configuration. Probes read the (optionally
// noisy) tensor; RSE is taken against the clean truth on its known entries.
inline BenchRow run_cell(const LatencyData& truth, const CellSpec& cell, const CellParams& params) {
  BenchRow row;
  row.solver = to_string(cell.solver);
  row.sampler = to_string(cell.sampler);
  row.sampling_rate = cell.rate;
  row.noise_sigma = cell.noise_sigma;
  row.seed = std::to_string(cell.seed);
  row.rank = cell.rank;
  try {
    const Tensor3 probed =
        cell.noise_sigma > 0.0
            ? add_noise(truth.values, NoiseSpec{0.0, cell.noise_sigma}, noise_seed(cell.seed))
            : truth.values;
    SampleOptions so{cell.sampler, cell.rate, params.beta, params.c0, cell.rank, cell.seed};
    const bool complete_truth = truth.known.count() == truth.values.size();
    const SampleResult sample = sample_tensor(probed, so, complete_truth ? nullptr : &truth.known);
    SolverConfig cfg = params.solver;
    cfg.rank = cell.rank;
    cfg.seed = cell.seed;
    const auto t0 = std::chrono::steady_clock::now();
    const CompletionResult res = complete_tensor(cell.solver, sample.observed, sample.mask, cfg);
    const auto t1 = std::chrono::steady_clock::now();
    row.total_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    row.iterations = res.state.iterations;
    row.per_iter_ms = row.iterations > 0 ? row.total_ms / static_cast<double>(row.iterations) : 0.0;
    row.rse = complete_truth ? rse(res.x_hat, truth.values) : rse(res.x_hat, truth.values, truth.known);
  } catch (const std::exception& e) {
    row.status = std::string("error: ") + e.what();
  }
  return row;
}

struct BenchOptions {
  std::vector<double> rates{0.5};
  std::vector<SolverKind> solvers{SolverKind::lnls_tqr};
  std::vector<SamplerKind> samplers{SamplerKind::qrls};
  std::vector<std::size_t> ranks{5};
  std::vector<double> noise_sigmas{0.0};
  std::size_t repeats = 1;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  CellParams params;
};

struct BenchReport {
  std::vector<BenchRow> rows;       // one per cell, deterministic order
  std::vector<BenchRow> aggregates; // mean over repeats
  std::size_t failures = 0;

  std::vector<BenchRow> all_rows() const {
    std::vector<BenchRow> out = rows;
    out.insert(out.end(), aggregates.begin(), aggregates.end());
    return out;
  }
};

// Cells are ordered by (rank, noise, solver, sampler, rate, repeat); repeat r
// uses seed + r, so each row is reproducible from its recorded seed alone.
inline std::vector<CellSpec> bench_cells(const BenchOptions& opt) {
  std::vector<CellSpec> cells;
  for (std::size_t rank : opt.ranks)
    for (double sigma : opt.noise_sigmas)
      for (SolverKind solver : opt.solvers)
        for (SamplerKind sampler : opt.samplers)
          for (double rate : opt.rates)
            for (std::size_t rep = 0; rep < opt.repeats; ++rep)
              cells.push_back({solver, sampler, rate, sigma, rank, opt.seed + rep});
  return cells;
}

inline BenchReport run_bench(const LatencyData& truth, const BenchOptions& opt) {
  const std::vector<CellSpec> cells = bench_cells(opt);
  BenchReport report;
  report.rows.resize(cells.size());
  const std::size_t workers = std::clamp<std::size_t>(opt.jobs, 1, std::max<std::size_t>(cells.size(), 1));
  if (workers == 1) {
    for (std::size_t c = 0; c < cells.size(); ++c) report.rows[c] = run_cell(truth, cells[c], opt.params);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t c = next++; c < cells.size(); c = next++)
          report.rows[c] = run_cell(truth, cells[c], opt.params);
      });
    }
    for (auto& t : pool) t.join();
  }

  using Key = std::tuple<std::size_t, double, std::string, std::string, double>;
  std::map<Key, std::vector<const BenchRow*>> groups;
  std::vector<Key> order;
  for (const auto& r : report.rows) {
    if (r.status != "ok") ++report.failures;
    Key key{r.rank, r.noise_sigma, r.solver, r.sampler, r.sampling_rate};
    if (!groups.count(key)) order.push_back(key);
    groups[key].push_back(&r);
  }
  for (const auto& key : order) {
    const auto& members = groups[key];
    BenchRow agg;
    agg.solver = std::get<2>(key);
    agg.sampler = std::get<3>(key);
    agg.sampling_rate = std::get<4>(key);
    agg.noise_sigma = std::get<1>(key);
    agg.rank = std::get<0>(key);
    agg.seed = "mean";
    double rse_sum = 0.0, total = 0.0, per_iter = 0.0, iters = 0.0;
    std::size_t ok = 0;
    for (const BenchRow* r : members) {
      if (r->status != "ok") continue;
      ++ok;
      rse_sum += r->rse;
      total += r->total_ms;
      per_iter += r->per_iter_ms;
      iters += static_cast<double>(r->iterations);
    }
    if (ok > 0) {
      const double n = static_cast<double>(ok);
      agg.rse = rse_sum / n;
      agg.total_ms = total / n;
      agg.per_iter_ms = per_iter / n;
      agg.iterations = static_cast<std::size_t>(std::lround(iters / n));
    }
    agg.status = ok == members.size() ? "ok" : std::to_string(members.size() - ok) + " failed";
    report.aggregates.push_back(agg);
  }
  return report;
}

// Picks `count` sequential slots starting at `start`; a negative start is drawn
// from the seed.
inline LatencyData select_slots(const LatencyData& data, std::size_t count, long long start,
                                std::uint64_t seed) {
  const std::size_t n3 = data.values.n3();
  if (count == 0 || count >= n3) {
    if (count > n3) {
      throw std::invalid_argument("requested " + std::to_string(count) + " slots, tensor has " +
                                  std::to_string(n3));
    }
    return data;
  }
  std::size_t first = 0;
  if (start < 0) {
    std::mt19937_64 rng(seed);
    first = std::uniform_int_distribution<std::size_t>(0, n3 - count)(rng);
  } else {
    first = static_cast<std::size_t>(start);
    if (first + count > n3) throw std::invalid_argument("slot window exceeds tensor length");
  }
  LatencyData out{data.values.slice_range(first, count),
                  ObservationMask(Dims{data.values.n1(), data.values.n2(), count})};
  for (const auto& idx : data.known.omega())
    if (idx.k >= first && idx.k < first + count) out.known.add({idx.i, idx.j, idx.k - first});
  return out;
}

// Divides by the largest known |entry|; RSE is unaffected.
inline LatencyData normalize_dataset(const LatencyData& data) {
  LatencyData out = data;
  out.values = normalize(data.values).tensor;
  return out;
}

}  // namespace tenqr

#endif  // TENQR_PIPELINE_HPP
