#include "test_util.hpp"

#include <gtest/gtest.h>

#include <sstream>

namespace {

using namespace tenqr;

LatencyData synthetic(Dims d, std::size_t r, std::uint64_t seed) {
  const Tensor3 x = gen_low_tubal_rank({d, r, seed, 1.0});
  return {x, ObservationMask::full(d)};
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  for (std::string line; std::getline(is, line);) out.push_back(line);
  return out;
}

TEST(BenchCells, FactorialOrderAndSeeds) {
  BenchOptions opt;
  opt.rates = {0.3, 0.6};
  opt.solvers = {SolverKind::lnls_tqr, SolverKind::tnn_admm};
  opt.samplers = {SamplerKind::qrls, SamplerKind::random};
  opt.ranks = {2, 3};
  opt.noise_sigmas = {0.0, 0.01};
  opt.repeats = 3;
  opt.seed = 10;
  const auto cells = bench_cells(opt);
  ASSERT_EQ(cells.size(), 2u * 2 * 2 * 2 * 2 * 3);
  EXPECT_EQ(cells[0].rank, 2u);
  EXPECT_EQ(cells[0].seed, 10u);
  EXPECT_EQ(cells[1].seed, 11u);
  EXPECT_EQ(cells[2].seed, 12u);
  EXPECT_EQ(cells[3].rate, 0.6);
  EXPECT_EQ(cells[6].sampler, SamplerKind::random);
  EXPECT_EQ(cells[12].solver, SolverKind::tnn_admm);
  EXPECT_EQ(cells[24].noise_sigma, 0.01);
  EXPECT_EQ(cells[48].rank, 3u);
}

TEST(BenchCsv, HeaderDataAndAggregateRows) {
  const LatencyData data = synthetic({12, 10, 4}, 2, 1);
  BenchOptions opt;
  opt.rates = {0.6};
  opt.ranks = {2};
  const BenchReport report = run_bench(data, opt);
  ASSERT_EQ(report.rows.size(), 1u);
  ASSERT_EQ(report.aggregates.size(), 1u);
  EXPECT_EQ(report.failures, 0u);
  std::ostringstream os;
  write_bench_csv(os, report.all_rows());
  const auto out = lines(os.str());
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out[0], "solver,sampler,sampling_rate,noise_sigma,seed,rse,iterations,total_ms,per_iter_ms,rank,status");
  EXPECT_EQ(out[1].rfind("lnls-tqr,qrls,0.6,0,0,", 0), 0u) << out[1];
  EXPECT_EQ(out[2].rfind("lnls-tqr,qrls,0.6,0,mean,", 0), 0u) << out[2];
  EXPECT_EQ(out[1].substr(out[1].size() - 5), ",2,ok");
  EXPECT_EQ(report.aggregates[0].rse, report.rows[0].rse);
  EXPECT_GE(report.rows[0].rse, 0.0);
  EXPECT_GE(report.rows[0].iterations, 5u);
}

TEST(SampleTensor, BudgetAndStrategy) {
  const Tensor3 x = gen_low_tubal_rank({{50, 50, 10}, 5, 2, 1.0});
  SampleOptions so;
  so.rate = 0.4;
  const SampleResult q = sample_tensor(x, so);
  EXPECT_EQ(q.mask.count(), 10000u);
  for (std::size_t k = 0; k < 10; ++k) EXPECT_EQ(q.mask.count_in_slot(k), 1000u);
  so.sampler = SamplerKind::random;
  const SampleResult r = sample_tensor(x, so);
  EXPECT_EQ(r.mask.count(), 10000u);
  for (const auto& idx : r.mask.omega()) ASSERT_EQ(r.observed(idx.i, idx.j, idx.k), x(idx.i, idx.j, idx.k));
}

TEST(SampleTensor, RespectsUnavailableEntries) {
  LatencyData data = synthetic({8, 8, 3}, 2, 3);
  ObservationMask known({8, 8, 3});
  for (std::size_t k = 0; k < 3; ++k)
    for (std::size_t j = 0; j < 8; ++j)
      for (std::size_t i = 0; i < 8; ++i)
        if ((i + j) % 4 != 0) known.add({i, j, k});
  SampleOptions so;
  so.rate = 0.5;
  so.rank = 2;
  const SampleResult s = sample_tensor(data.values, so, &known);
  for (const auto& idx : s.mask.omega()) EXPECT_TRUE(known.contains(idx.i, idx.j, idx.k));
}

TEST(SelectSlots, WindowAndBounds) {
  LatencyData data = synthetic({4, 4, 10}, 2, 4);
  const LatencyData w = select_slots(data, 3, 5, 0);
  ASSERT_EQ(w.values.n3(), 3u);
  EXPECT_EQ(w.values(1, 2, 0), data.values(1, 2, 5));
  EXPECT_EQ(w.known.count(), 48u);
  EXPECT_EQ(select_slots(data, 3, -1, 7).values, select_slots(data, 3, -1, 7).values);
  EXPECT_EQ(select_slots(data, 0, 0, 0).values.n3(), 10u);
  EXPECT_THROW(select_slots(data, 11, 0, 0), std::invalid_argument);
  EXPECT_THROW(select_slots(data, 3, 8, 0), std::invalid_argument);
}

TEST(RunCell, FailureIsRecordedInRow) {
  const LatencyData data = synthetic({6, 6, 3}, 2, 5);
  CellSpec cell;
  cell.rank = 7;  // exceeds min(n1, n2)
  const BenchRow row = run_cell(data, cell, {});
  EXPECT_EQ(row.status.rfind("error: ", 0), 0u) << row.status;
  EXPECT_TRUE(std::isnan(row.rse));

  BenchOptions opt;
  opt.ranks = {2, 7};
  const BenchReport report = run_bench(data, opt);
  EXPECT_EQ(report.failures, 1u);
  EXPECT_EQ(report.rows[0].status, "ok");
  EXPECT_EQ(report.aggregates[1].status, "1 failed");
}

TEST(RunCell, NoiseTouchesProbesNotTruth) {
  const LatencyData data = synthetic({15, 15, 4}, 2, 6);
  CellSpec cell;
  cell.rank = 2;
  cell.rate = 1.0;
  CellParams params;
  params.solver.max_iters = 5;
  const BenchRow clean = run_cell(data, cell, params);
  EXPECT_EQ(clean.rse, 0.0);
  cell.noise_sigma = 0.01;
  const BenchRow noisy = run_cell(data, cell, params);
  EXPECT_GT(noisy.rse, 0.0);
}

TEST(RunBench, ParallelMatchesSerial) {
  const LatencyData data = synthetic({12, 12, 4}, 2, 7);
  BenchOptions opt;
  opt.rates = {0.4, 0.7};
  opt.samplers = {SamplerKind::qrls, SamplerKind::random};
  opt.ranks = {2};
  opt.repeats = 2;
  const BenchReport serial = run_bench(data, opt);
  opt.jobs = 3;
  const BenchReport parallel = run_bench(data, opt);
  ASSERT_EQ(serial.rows.size(), parallel.rows.size());
  for (std::size_t c = 0; c < serial.rows.size(); ++c) {
    EXPECT_EQ(serial.rows[c].rse, parallel.rows[c].rse) << c;
    EXPECT_EQ(serial.rows[c].seed, parallel.rows[c].seed) << c;
  }
}

TEST(Parsing, SolverAndSamplerNames) {
  EXPECT_EQ(parse_solver("tnn-admm"), SolverKind::tnn_admm);
  EXPECT_EQ(to_string(parse_solver("lnls-tqr")), "lnls-tqr");
  EXPECT_EQ(parse_sampler("random"), SamplerKind::random);
  EXPECT_THROW(parse_solver("svd"), std::invalid_argument);
  EXPECT_THROW(parse_sampler(""), std::invalid_argument);
}

}  // namespace
