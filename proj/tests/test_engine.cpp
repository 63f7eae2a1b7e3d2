// Copyright 2026 The sfsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sfsim/engine.hpp"

#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <vector>

#include "sfsim/oracle.hpp"
#include "test_util.hpp"

namespace sfsim {
namespace {

RealizationParams small_params(GateKind kind, int steps, int l1 = 4,
                               int l2 = 4) {
  RealizationParams params;
  params.L1 = l1;
  params.L2 = l2;
  params.alpha1 = 5.0;
  params.alpha2 = 1.0;
  params.Np = 2;  // keep unit tests fast; the physics does not matter here
  params.T = steps;
  params.gate_kind = kind;
  return params;
}

bool bit_equal(Complex a, Complex b) {
  return std::bit_cast<std::uint64_t>(a.real()) ==
             std::bit_cast<std::uint64_t>(b.real()) &&
         std::bit_cast<std::uint64_t>(a.imag()) ==
             std::bit_cast<std::uint64_t>(b.imag());
}

bool series_bit_equal(const SurvivalSeries& a, const SurvivalSeries& b) {
  if (a.amplitudes.size() != b.amplitudes.size()) return false;
  for (std::size_t t = 0; t < a.amplitudes.size(); ++t) {
    if (!bit_equal(a.amplitudes[t], b.amplitudes[t])) return false;
    if (std::bit_cast<std::uint64_t>(a.values[t]) !=
        std::bit_cast<std::uint64_t>(b.values[t])) {
      return false;
    }
  }
  return true;
}

/// Survival probability of one subsystem evolved alone, |<k|U^t|k>|^2.
std::vector<double> lone_subsystem_survival(const FloquetLayer& layer,
                                            std::uint64_t basis_index,
                                            int periods_per_step, int steps) {
  StateVector state = StateVector::product_state(layer.n, basis_index);
  std::vector<double> values = {1.0};
  for (int t = 1; t <= steps; ++t) {
    for (int p = 0; p < periods_per_step; ++p) {
      apply_floquet_period(state, layer);
    }
    values.push_back(std::norm(state.amplitude(basis_index)));
  }
  return values;
}

TEST(RunSurvival, ZeroStepsIsTriviallyOne) {
  const CircuitRealization real =
      build_realization(small_params(GateKind::kCz, 0), 11);
  const SurvivalResult result = run_survival(real);
  ASSERT_EQ(result.series.values.size(), 1u);
  EXPECT_EQ(result.series.values[0], 1.0);
  EXPECT_EQ(result.series.amplitudes[0], Complex(1, 0));
  EXPECT_EQ(result.stats.trajectories_executed, 1u);
}

TEST(RunSurvival, SurvivalStartsAtOneExactly) {
  for (GateKind kind : {GateKind::kCz, GateKind::kIswap, GateKind::kNone}) {
    const CircuitRealization real =
        build_realization(small_params(kind, 3), 17);
    const SurvivalResult result = run_survival(real);
    EXPECT_EQ(result.series.values[0], 1.0);
  }
}

TEST(RunSurvival, TrajectoryCountsMatchBranchCombinatorics) {
  const CircuitRealization cz =
      build_realization(small_params(GateKind::kCz, 6), 3);
  const SurvivalResult cz_result = run_survival(cz);
  EXPECT_EQ(cz_result.stats.trajectories_executed, 64u);
  for (int t = 0; t <= 6; ++t) {
    EXPECT_EQ(cz_result.stats.contributions_per_step[t],
              std::uint64_t{1} << t);
  }

  const CircuitRealization iswap =
      build_realization(small_params(GateKind::kIswap, 3), 3);
  const SurvivalResult iswap_result = run_survival(iswap);
  EXPECT_EQ(iswap_result.stats.trajectories_executed, 64u);
  for (int t = 0; t <= 3; ++t) {
    EXPECT_EQ(iswap_result.stats.contributions_per_step[t],
              std::uint64_t{1} << (2 * t));
  }

  const CircuitRealization none =
      build_realization(small_params(GateKind::kNone, 5), 3);
  EXPECT_EQ(run_survival(none).stats.trajectories_executed, 1u);
}

TEST(RunSurvival, MatchesOracleOnSmallSystems) {
  for (GateKind kind : {GateKind::kCz, GateKind::kIswap}) {
    for (std::uint64_t seed : {101u, 102u}) {
      const CircuitRealization real =
          build_realization(small_params(kind, 3), seed);
      const SurvivalResult sf = run_survival(real);
      const OracleResult reference = oracle_run(real);
      for (int t = 0; t <= 3; ++t) {
        EXPECT_NEAR(sf.series.values[t], reference.series.values[t], 1e-10)
            << "kind=" << gate_kind_name(kind) << " seed=" << seed
            << " t=" << t;
      }
    }
  }
}

TEST(RunSurvival, CustomGateMatchesOracle) {
  RandomStream rng(9, StreamPurpose::kLayer1);
  RealizationParams params = small_params(GateKind::kCustom, 3);
  params.custom_gate = testing::random_unitary(rng, 4);
  const CircuitRealization real = build_realization(params, 5);
  EXPECT_EQ(branches_for(params).branch_count(), 4);
  const SurvivalResult sf = run_survival(real);
  const OracleResult reference = oracle_run(real);
  for (int t = 0; t <= 3; ++t) {
    EXPECT_NEAR(sf.series.values[t], reference.series.values[t], 1e-10);
  }
}

TEST(RunSurvival, DisconnectedFactorizesIntoSubsystemSurvivals) {
  const CircuitRealization real =
      build_realization(small_params(GateKind::kNone, 4, 5, 4), 23);
  const SurvivalResult sf = run_survival(real);
  const std::vector<double> s1 = lone_subsystem_survival(
      real.layer1, real.k, real.params.Np, real.params.T);
  const std::vector<double> s2 = lone_subsystem_survival(
      real.layer2, real.l, real.params.Np, real.params.T);
  for (int t = 0; t <= real.params.T; ++t) {
    EXPECT_NEAR(sf.series.values[t], s1[t] * s2[t], 1e-12);
  }
}

TEST(RunSurvival, WorkerCountCannotChangeBits) {
  for (GateKind kind : {GateKind::kCz, GateKind::kIswap}) {
    const CircuitRealization real =
        build_realization(small_params(kind, 4), 31);
    EngineOptions options;
    options.workers = 1;
    const SurvivalResult reference = run_survival(real, options);
    for (int workers : {2, 4, 16}) {
      options.workers = workers;
      EXPECT_TRUE(
          series_bit_equal(run_survival(real, options).series,
                           reference.series))
          << "workers=" << workers;
    }
  }
}

TEST(RunSurvival, SampledWorkerCountCannotChangeBits) {
  const CircuitRealization real =
      build_realization(small_params(GateKind::kIswap, 4), 37);
  EngineOptions options;
  options.mode = RunMode::kSampled;
  options.fraction = 0.4;
  options.workers = 1;
  const SurvivalResult reference = run_survival(real, options);
  for (int workers : {3, 8}) {
    options.workers = workers;
    EXPECT_TRUE(series_bit_equal(run_survival(real, options).series,
                                 reference.series));
  }
}

TEST(RunSurvival, FullFractionIsExactModeBitForBit) {
  const CircuitRealization real =
      build_realization(small_params(GateKind::kIswap, 3), 41);
  const SurvivalResult exact = run_survival(real);
  EngineOptions sampled;
  sampled.mode = RunMode::kSampled;
  sampled.fraction = 1.0;
  EXPECT_TRUE(series_bit_equal(run_survival(real, sampled).series,
                               exact.series));
}

TEST(RunSurvival, SampledModeIsDeterministicAndCountsMatch) {
  const CircuitRealization real =
      build_realization(small_params(GateKind::kIswap, 4), 43);
  EngineOptions options;
  options.mode = RunMode::kSampled;
  options.fraction = 0.3;
  const SurvivalResult first = run_survival(real, options);
  const SurvivalResult second = run_survival(real, options);
  EXPECT_TRUE(series_bit_equal(first.series, second.series));
  // ceil(0.3 * 4^4) = 77 sampled leaves; L(0) is still exactly 1.
  EXPECT_EQ(first.stats.trajectories_executed, 77u);
  EXPECT_EQ(first.series.values[0], 1.0);
}

TEST(RunSurvival, SampledRecordsMatchIndependentTrajectoryRuns) {
  // Every sampled leaf contribution must equal, bit for bit, the value an
  // isolated start-to-finish run of that trajectory produces, and the
  // sampled series must be the plain reduction of the sampled records.
  const CircuitRealization real =
      build_realization(small_params(GateKind::kIswap, 3), 47);
  const BranchSet branches = branches_for(real.params);
  EngineOptions options;
  options.mode = RunMode::kSampled;
  options.fraction = 0.25;
  const auto records = collect_contributions(real, options);

  std::size_t leaves = 0;
  for (const ContributionRecord& record : records) {
    if (record.t != real.params.T) continue;
    ++leaves;
    const auto alone = run_trajectory(
        real, branches,
        TrajectoryId(record.trajectory_index, 4, real.params.T));
    EXPECT_TRUE(bit_equal(record_value(alone.back()), record_value(record)));
  }
  EXPECT_EQ(leaves, 16u);  // ceil(0.25 * 4^3)

  const SurvivalResult sampled = run_survival(real, options);
  EXPECT_TRUE(series_bit_equal(
      sampled.series, reduce_survival(records, 4, real.params.T, false)));
}

TEST(RunSurvival, RefusesBlownTrajectoryBudget) {
  const CircuitRealization real =
      build_realization(small_params(GateKind::kIswap, 4), 51);
  EngineOptions options;
  options.trajectory_budget = 100;  // needs 4^4 = 256
  try {
    run_survival(real, options);
    FAIL() << "expected ResourceError";
  } catch (const ResourceError& error) {
    EXPECT_NE(std::string(error.what()).find("256"), std::string::npos);
  }
}

TEST(RunSurvival, RejectsBadFractionAndInputs) {
  const CircuitRealization real =
      build_realization(small_params(GateKind::kCz, 2), 53);
  EngineOptions options;
  options.mode = RunMode::kSampled;
  options.fraction = 0.0;
  EXPECT_THROW(run_survival(real, options), ArgumentError);
  options.fraction = 1.5;
  EXPECT_THROW(run_survival(real, options), ArgumentError);

  CircuitRealization broken = real;
  broken.schedule.pop_back();
  EXPECT_THROW(run_survival(broken), ArgumentError);
  broken = real;
  broken.k = 1u << 5;
  EXPECT_THROW(run_survival(broken), ArgumentError);
}

TEST(RunSurvival, PeakStateMemoryStaysWithinCheckpointBound) {
  const int l_half = 6;
  const int steps = 4;
  const CircuitRealization real = build_realization(
      small_params(GateKind::kCz, steps, l_half, l_half), 57);
  const std::uint64_t baseline = StateVector::live_amplitude_count();
  StateVector::reset_peak_amplitude_count();
  run_survival(real);
  const std::uint64_t peak = StateVector::peak_amplitude_count() - baseline;
  EXPECT_LE(peak, 2ull * (steps + 1) * (std::uint64_t{1} << l_half));
}

TEST(RunTrajectory, AllZeroPathOwnsEveryStepContribution) {
  const CircuitRealization real =
      build_realization(small_params(GateKind::kIswap, 3), 61);
  const BranchSet branches = branches_for(real.params);
  const auto records =
      run_trajectory(real, branches, TrajectoryId(0, 4, 3));
  ASSERT_EQ(records.size(), 4u);
  for (int t = 0; t <= 3; ++t) {
    EXPECT_EQ(records[t].t, t);
    EXPECT_EQ(records[t].trajectory_index, 0u);
  }
  EXPECT_EQ(record_value(records[0]), Complex(1, 0));
}

TEST(RunTrajectory, NonCanonicalStepsAreSilent) {
  const CircuitRealization real =
      build_realization(small_params(GateKind::kIswap, 3), 61);
  const BranchSet branches = branches_for(real.params);
  // Digits (2, 1, 0): canonical at steps 2 and 3 only.
  const auto records = run_trajectory(
      real, branches, TrajectoryId::from_digits({2, 1, 0}, 4));
  ASSERT_EQ(records.size(), 2u);
  EXPECT_EQ(records[0].t, 2);
  EXPECT_EQ(records[1].t, 3);
  EXPECT_EQ(records[0].trajectory_index, records[1].trajectory_index);
}

TEST(RunTrajectory, SummedOverAllPathsMatchesOracleAmplitude) {
  const CircuitRealization real =
      build_realization(small_params(GateKind::kCz, 3), 67);
  const BranchSet branches = branches_for(real.params);
  const OracleResult reference = oracle_run(real);

  std::vector<Complex> sums(real.params.T + 1, Complex(0, 0));
  const std::uint64_t total = trajectory_count(2, real.params.T);
  for (std::uint64_t index = 0; index < total; ++index) {
    for (const ContributionRecord& record : run_trajectory(
             real, branches, TrajectoryId(index, 2, real.params.T))) {
      sums[record.t] += record_value(record);
    }
  }
  for (int t = 0; t <= real.params.T; ++t) {
    EXPECT_LT(std::abs(sums[t] - reference.series.amplitudes[t]), 1e-12);
  }
}

TEST(RunTrajectory, RejectsMismatchedInputs) {
  const CircuitRealization real =
      build_realization(small_params(GateKind::kCz, 3), 67);
  const BranchSet branches = branches_for(real.params);
  EXPECT_THROW(run_trajectory(real, branches, TrajectoryId(0, 2, 2)),
               ArgumentError);
  EXPECT_THROW(run_trajectory(real, branches, TrajectoryId(0, 4, 3)),
               ArgumentError);
}

TEST(ReduceSurvival, RebuildsEngineResultFromWireRecords) {
  for (GateKind kind : {GateKind::kCz, GateKind::kIswap}) {
    const CircuitRealization real =
        build_realization(small_params(kind, 4), 71);
    const SurvivalResult direct = run_survival(real);
    const int r = branches_for(real.params).branch_count();
    const SurvivalSeries reduced =
        reduce_survival(collect_contributions(real), r, real.params.T, true);
    EXPECT_TRUE(series_bit_equal(direct.series, reduced));
  }
}

TEST(ReduceSurvival, IndependentPerTrajectoryRunsReduceIdentically) {
  // Records produced trajectory-by-trajectory (in scrambled order) must
  // reduce to the same bits as the checkpointed tree walk.
  const CircuitRealization real =
      build_realization(small_params(GateKind::kIswap, 3), 73);
  const BranchSet branches = branches_for(real.params);
  const SurvivalResult direct = run_survival(real);

  std::vector<ContributionRecord> records;
  const std::uint64_t total = trajectory_count(4, real.params.T);
  for (std::uint64_t step = 0; step < total; ++step) {
    const std::uint64_t index = (step * 29) % total;  // arbitrary order
    const auto piece = run_trajectory(
        real, branches, TrajectoryId(index, 4, real.params.T));
    records.insert(records.end(), piece.begin(), piece.end());
  }
  const SurvivalSeries reduced =
      reduce_survival(std::move(records), 4, real.params.T, true);
  EXPECT_TRUE(series_bit_equal(direct.series, reduced));
}

TEST(ReduceSurvival, SingleTrajectorySeriesIsItsOwnSum) {
  const CircuitRealization real =
      build_realization(small_params(GateKind::kNone, 3), 79);
  const BranchSet branches = branches_for(real.params);
  const auto records =
      run_trajectory(real, branches, TrajectoryId(0, 1, 3));
  const SurvivalSeries series =
      reduce_survival(records, 1, real.params.T, true);
  for (int t = 0; t <= 3; ++t) {
    EXPECT_TRUE(bit_equal(series.amplitudes[t], record_value(records[t])));
  }
}

TEST(ReduceSurvival, DetectsMissingDuplicateAndRogueRecords) {
  const CircuitRealization real =
      build_realization(small_params(GateKind::kCz, 3), 83);
  const auto records = collect_contributions(real);

  std::vector<ContributionRecord> missing(records.begin(),
                                          records.end() - 1);
  EXPECT_THROW(reduce_survival(missing, 2, 3, true), IntegrityError);
  EXPECT_NO_THROW(reduce_survival(missing, 2, 3, false));

  std::vector<ContributionRecord> duplicated = records;
  duplicated.push_back(records.back());
  EXPECT_THROW(reduce_survival(duplicated, 2, 3, true), IntegrityError);

  std::vector<ContributionRecord> rogue = records;
  ASSERT_EQ(rogue[1].t, 1);
  rogue[1].trajectory_index = 3;  // not canonical at t = 1 (stride 4)
  EXPECT_THROW(reduce_survival(rogue, 2, 3, true), IntegrityError);
}

TEST(CollectContributions, CanonicalIndicesAndCounts) {
  const CircuitRealization real =
      build_realization(small_params(GateKind::kIswap, 3), 89);
  const auto records = collect_contributions(real);
  std::vector<std::uint64_t> counts(real.params.T + 1, 0);
  for (const ContributionRecord& record : records) {
    ASSERT_LE(record.t, real.params.T);
    std::uint64_t stride = 1;
    for (int s = 0; s < real.params.T - record.t; ++s) stride *= 4;
    EXPECT_EQ(record.trajectory_index % stride, 0u);
    EXPECT_EQ(record.realization_id, real.realization_index);
    ++counts[record.t];
  }
  for (int t = 0; t <= real.params.T; ++t) {
    std::uint64_t expected = 1;
    for (int s = 0; s < t; ++s) expected *= 4;
    EXPECT_EQ(counts[t], expected);
  }
}

TEST(ReconstructAmplitude, StepZeroIsTheInitialBasisState) {
  const CircuitRealization real =
      build_realization(small_params(GateKind::kCz, 2), 97);
  const BranchSet branches = branches_for(real.params);
  EXPECT_EQ(reconstruct_amplitude(real, branches, real.k, real.l, 0),
            Complex(1, 0));
  const std::uint64_t other_k = real.k ^ 1u;
  EXPECT_EQ(reconstruct_amplitude(real, branches, other_k, real.l, 0),
            Complex(0, 0));
}

TEST(ReconstructAmplitude, MatchesOracleCoefficients) {
  const CircuitRealization real =
      build_realization(small_params(GateKind::kIswap, 2), 101);
  const BranchSet branches = branches_for(real.params);
  const OracleResult reference = oracle_run(real, true);
  for (std::uint64_t k_prime : {0u, 3u, 9u, 15u}) {
    for (std::uint64_t l_prime : {0u, 7u, 12u}) {
      const Complex via_sum =
          reconstruct_amplitude(real, branches, k_prime, l_prime, 2);
      const Complex via_oracle = reference.states[2].amplitude(
          k_prime + (l_prime << real.params.L1));
      EXPECT_LT(std::abs(via_sum - via_oracle), 1e-12);
    }
  }
}

TEST(ReconstructAmplitude, RejectsOutOfRangeArguments) {
  const CircuitRealization real =
      build_realization(small_params(GateKind::kCz, 2), 97);
  const BranchSet branches = branches_for(real.params);
  EXPECT_THROW(reconstruct_amplitude(real, branches, 1u << 4, 0, 1),
               ArgumentError);
  EXPECT_THROW(reconstruct_amplitude(real, branches, 0, 1u << 4, 1),
               ArgumentError);
  EXPECT_THROW(reconstruct_amplitude(real, branches, 0, 0, 3),
               ArgumentError);
}

TEST(ReconstructState, HasUnitNormAtEveryStep) {
  const CircuitRealization real =
      build_realization(small_params(GateKind::kIswap, 3), 103);
  const BranchSet branches = branches_for(real.params);
  for (int t = 0; t <= real.params.T; ++t) {
    const StateVector full = reconstruct_state(real, branches, t);
    EXPECT_NEAR(full.norm_squared(), 1.0, 1e-10) << "t=" << t;
  }
}

TEST(ReconstructState, MatchesOracleState) {
  const CircuitRealization real =
      build_realization(small_params(GateKind::kCz, 3), 107);
  const BranchSet branches = branches_for(real.params);
  const OracleResult reference = oracle_run(real, true);
  const StateVector full = reconstruct_state(real, branches, 3);
  EXPECT_LT(testing::max_abs_diff(full, reference.states[3]), 1e-12);
}

}  // namespace
}  // namespace sfsim
