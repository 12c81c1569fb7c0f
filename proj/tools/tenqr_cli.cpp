// Command-line front end: synth, sample, complete, bench, rse.

#include "tenqr/tenqr.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

namespace {

using namespace tenqr;

constexpr int kUsageError = 2;
constexpr int kRunError = 1;

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct SynthArgs {
  std::size_t n1 = 50, n2 = 50, n3 = 10, rank = 5;
  std::uint64_t seed = 0;
  double scale = 1.0;
  std::string out;
};

int run_synth(const SynthArgs& a) {
  if (a.rank < 1 || a.rank > std::min(a.n1, a.n2)) {
    throw UsageError("--rank " + std::to_string(a.rank) + " must lie in [1, min(n1, n2) = " +
                     std::to_string(std::min(a.n1, a.n2)) + "]");
  }
  save_t3(gen_low_tubal_rank({{a.n1, a.n2, a.n3}, a.rank, a.seed, a.scale}), a.out);
  return 0;
}

struct SampleArgs {
  std::string input, strategy = "qrls", out_obs, out_mask;
  double rate = 0.5, beta = 0.1, c0 = 1.0;
  std::size_t rank = 5;
  std::uint64_t seed = 0;
};

int run_sample(const SampleArgs& a) {
  const LatencyData data = load_latency_dataset(a.input);
  SampleOptions so;
  try {
    so.sampler = parse_sampler(a.strategy);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--strategy: ") + e.what());
  }
  so.rate = a.rate;
  so.beta = a.beta;
  so.c0 = a.c0;
  so.rank = a.rank;
  so.seed = a.seed;
  const bool complete = data.known.count() == data.values.size();
  const SampleResult s = sample_tensor(data.values, so, complete ? nullptr : &data.known);
  save_t3(s.observed, a.out_obs);
  save_mask(s.mask, a.out_mask);
  std::cerr << "sampled " << s.mask.count() << " of " << data.values.size() << " entries\n";
  return 0;
}

struct CompleteArgs {
  std::string obs, mask, solver = "lnls-tqr", out, log;
  SolverConfig cfg;
};

int run_complete(const CompleteArgs& a) {
  SolverKind solver;
  try {
    solver = parse_solver(a.solver);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--solver: ") + e.what());
  }
  const Tensor3 observed = load_t3(a.obs);
  const ObservationMask mask = load_mask(a.mask);
  std::unique_ptr<std::ofstream> log;
  IterationObserver observer;
  if (!a.log.empty()) {
    log = std::make_unique<std::ofstream>(a.log, std::ios::trunc);
    if (!*log) throw std::runtime_error("cannot open log '" + a.log + "'");
    *log << "iter,residual,mu,elapsed_ms\n";
    observer = [&log](const IterationInfo& info) {
      *log << info.iteration << ',' << format_double(info.residual, 10) << ','
           << format_double(info.mu, 10) << ',' << format_double(info.elapsed_ms, 6) << '\n';
    };
  }
  const CompletionResult res = complete_tensor(solver, observed, mask, a.cfg, observer);
  save_t3(res.x_hat, a.out);
  std::cerr << to_string(solver) << ": " << res.state.iterations << " iterations, "
            << format_double(res.state.elapsed_ms, 6) << " ms"
            << (res.state.converged ? "" : " (iteration cap reached)") << '\n';
  return 0;
}

struct BenchArgs {
  std::string truth, out;
  std::vector<double> rates{0.5};
  std::vector<double> noise{0.0};
  std::vector<std::string> solvers{"lnls-tqr"};
  std::vector<std::string> samplers{"qrls"};
  std::vector<std::size_t> ranks{5};
  std::size_t repeats = 1, jobs = 1, slices = 0;
  long long slice_start = -1;
  std::uint64_t seed = 0;
  bool no_normalize = false;
  CellParams params;
};

int run_bench_cmd(const BenchArgs& a) {
  BenchOptions opt;
  opt.rates = a.rates;
  opt.noise_sigmas = a.noise;
  opt.ranks = a.ranks;
  opt.repeats = a.repeats;
  opt.seed = a.seed;
  opt.jobs = a.jobs;
  opt.params = a.params;
  opt.solvers.clear();
  opt.samplers.clear();
  try {
    for (const auto& s : a.solvers) opt.solvers.push_back(parse_solver(s));
    for (const auto& s : a.samplers) opt.samplers.push_back(parse_sampler(s));
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  for (double r : a.rates)
    if (!(r > 0.0 && r <= 1.0)) throw UsageError("--rates: every rate must lie in (0, 1]");
  if (a.repeats < 1) throw UsageError("--repeats must be >= 1");

  LatencyData data = load_latency_dataset(a.truth);
  if (a.slices > 0) data = select_slots(data, a.slices, a.slice_start, a.seed);
  if (!a.no_normalize) data = normalize_dataset(data);
  for (std::size_t r : a.ranks) {
    if (r < 1 || r > std::min(data.values.n1(), data.values.n2()))
      throw UsageError("--ranks: rank " + std::to_string(r) + " out of range");
  }

  const BenchReport report = run_bench(data, opt);
  std::ofstream os(a.out, std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open '" + a.out + "' for writing");
  write_bench_csv(os, report.all_rows());
  std::cerr << report.rows.size() << " cells, " << report.failures << " failed\n";
  return report.failures == 0 ? 0 : kRunError;
}

struct RseArgs {
  std::string truth, estimate;
};

int run_rse(const RseArgs& a) {
  const Tensor3 truth = load_latency_tensor(a.truth);
  const Tensor3 est = load_latency_tensor(a.estimate);
  std::cout << format_double(rse(est, truth), 6) << '\n';
  return 0;
}

void add_solver_flags(CLI::App* cmd, SolverConfig& cfg) {
  cmd->add_option("--mu", cfg.mu, "initial ADMM penalty")->capture_default_str();
  cmd->add_option("--rho", cfg.rho, "penalty growth factor")->capture_default_str();
  cmd->add_option("--eps", cfg.eps_rel, "residual tolerance relative to ||M||_F^2")->capture_default_str();
  cmd->add_option("--min-iters", cfg.min_iters, "iterations before the residual test applies")
      ->capture_default_str();
  cmd->add_option("--max-iters", cfg.max_iters, "iteration cap")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Low-tubal-rank latency tensor completion: sampling, completion, benchmarks"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* c_synth = app.add_subcommand("synth", "generate a synthetic low-tubal-rank tensor");
  c_synth->add_option("--n1", synth.n1)->capture_default_str();
  c_synth->add_option("--n2", synth.n2)->capture_default_str();
  c_synth->add_option("--n3", synth.n3)->capture_default_str();
  c_synth->add_option("--rank", synth.rank, "true tubal rank")->capture_default_str();
  c_synth->add_option("--seed", synth.seed)->capture_default_str();
  c_synth->add_option("--scale", synth.scale, "max |entry| of the output")->capture_default_str();
  c_synth->add_option("--out", synth.out, ".t3 output path")->required();

  SampleArgs sample;
  auto* c_sample = app.add_subcommand("sample", "allocate a probe budget and write observations");
  c_sample->add_option("--input", sample.input, ".t3 file or directory of per-slot CSVs")
      ->required()
      ->check(CLI::ExistingPath);
  c_sample->add_option("--strategy", sample.strategy, "qrls or random")->capture_default_str();
  c_sample->add_option("--rate", sample.rate, "fraction of entries to probe")->capture_default_str();
  c_sample->add_option("--beta", sample.beta, "fraction of random warm-up slots")->capture_default_str();
  c_sample->add_option("--rank", sample.rank, "estimated tubal rank")->capture_default_str();
  c_sample->add_option("--c0", sample.c0, "probability normalization constant")->capture_default_str();
  c_sample->add_option("--seed", sample.seed)->capture_default_str();
  c_sample->add_option("--out-obs", sample.out_obs)->required();
  c_sample->add_option("--out-mask", sample.out_mask)->required();

  CompleteArgs complete;
  auto* c_complete = app.add_subcommand("complete", "complete an observed tensor");
  c_complete->add_option("--obs", complete.obs, "observed .t3")->required()->check(CLI::ExistingFile);
  c_complete->add_option("--mask", complete.mask, "mask .t3")->required()->check(CLI::ExistingFile);
  c_complete->add_option("--solver", complete.solver, "lnls-tqr or tnn-admm")->capture_default_str();
  c_complete->add_option("--rank,-r", complete.cfg.rank, "estimated tubal rank")->capture_default_str();
  add_solver_flags(c_complete, complete.cfg);
  c_complete->add_option("--out", complete.out, "completed .t3")->required();
  c_complete->add_option("--log", complete.log, "per-iteration CSV log");

  BenchArgs bench;
  auto* c_bench = app.add_subcommand("bench", "factorial sweep of sample -> complete -> RSE");
  c_bench->add_option("--truth", bench.truth, ".t3 file or directory of per-slot CSVs")
      ->required()
      ->check(CLI::ExistingPath);
  c_bench->add_option("--rates", bench.rates, "sampling rates")->delimiter(',')->capture_default_str();
  c_bench->add_option("--noise-sigma", bench.noise, "Gaussian noise stddev(s)")->delimiter(',')
      ->capture_default_str();
  c_bench->add_option("--solvers", bench.solvers, "lnls-tqr,tnn-admm")->delimiter(',')
      ->capture_default_str();
  c_bench->add_option("--samplers", bench.samplers, "qrls,random")->delimiter(',')
      ->capture_default_str();
  c_bench->add_option("--ranks", bench.ranks, "estimated tubal rank(s)")->delimiter(',')
      ->capture_default_str();
  c_bench->add_option("--repeats", bench.repeats)->capture_default_str();
  c_bench->add_option("--seed", bench.seed, "base seed; repeat i uses seed + i")->capture_default_str();
  c_bench->add_option("--jobs", bench.jobs, "parallel worker slots")->capture_default_str();
  c_bench->add_option("--beta", bench.params.beta)->capture_default_str();
  c_bench->add_option("--c0", bench.params.c0)->capture_default_str();
  add_solver_flags(c_bench, bench.params.solver);
  c_bench->add_option("--slices", bench.slices, "use this many sequential slots (0 = all)")
      ->capture_default_str();
  c_bench->add_option("--slice-start", bench.slice_start, "first slot of the window (-1 = by seed)")
      ->capture_default_str();
  c_bench->add_flag("--no-normalize", bench.no_normalize, "skip max-abs normalization");
  c_bench->add_option("--out", bench.out, "report CSV")->required();

  RseArgs rse_args;
  auto* c_rse = app.add_subcommand("rse", "relative square error of an estimate");
  c_rse->add_option("--truth", rse_args.truth)->required()->check(CLI::ExistingPath);
  c_rse->add_option("--estimate", rse_args.estimate)->required()->check(CLI::ExistingPath);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*c_synth) return run_synth(synth);
    if (*c_sample) return run_sample(sample);
    if (*c_complete) return run_complete(complete);
    if (*c_bench) return run_bench_cmd(bench);
    if (*c_rse) return run_rse(rse_args);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRunError;
  }
  return kUsageError;
}
