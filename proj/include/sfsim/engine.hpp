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

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <string>
#include <thread>
#include <unordered_set>
#include <utility>
#include <vector>

#include "sfsim/branch.hpp"
#include "sfsim/errors.hpp"
#include "sfsim/gates.hpp"
#include "sfsim/philox.hpp"
#include "sfsim/random_model.hpp"
#include "sfsim/record.hpp"
#include "sfsim/reduction.hpp"
#include "sfsim/state_vector.hpp"

namespace sfsim {

enum class RunMode { kExact, kSampled };

inline constexpr std::uint64_t kDefaultTrajectoryBudget = std::uint64_t{1}
                                                          << 22;

struct EngineOptions {
  RunMode mode = RunMode::kExact;
  /// Fraction of trajectories to sample, in (0, 1]; sampled mode only.
  double fraction = 1.0;
  /// Refusal threshold on the number of trajectories to execute.
  std::uint64_t trajectory_budget = kDefaultTrajectoryBudget;
  /// Worker threads for subtree-parallel execution; results are identical
  /// for every value.
  int workers = 1;
};

/// The survival-probability series: a(t) is the coherent sum of trajectory
/// contributions at step t, values(t) = |a(t)|^2.
struct SurvivalSeries {
  std::vector<Complex> amplitudes;
  std::vector<double> values;
};

struct EngineStats {
  /// Depth-T paths executed (= r^T in exact mode, sample size otherwise).
  std::uint64_t trajectories_executed = 0;
  /// Emitted contributions per step (= r^t in exact mode).
  std::vector<std::uint64_t> contributions_per_step;
};

struct SurvivalResult {
  SurvivalSeries series;
  EngineStats stats;
};

/// Branch set of a realization's connecting gate; the disconnected flavor
/// collapses to a single identity term (one trajectory).
inline BranchSet branches_for(const RealizationParams& params) {
  if (params.gate_kind == GateKind::kNone) {
    return BranchSet::disconnected();
  }
  return BranchSet::decompose(connecting_gate(params));
}

namespace detail {

inline Complex cmul(Complex a, Complex b) {
  return Complex(a.real() * b.real() - a.imag() * b.imag(),
                 a.real() * b.imag() + a.imag() * b.real());
}

/// Shared read-only data for one engine run. `max_depth` is T for survival
/// runs and the reconstruction step for the test utilities; `subset` (when
/// non-null) is the sorted list of sampled leaf indices in [0, r^max_depth).
struct EngineContext {
  const CircuitRealization* real = nullptr;
  const BranchSet* branches = nullptr;
  int r = 1;
  int max_depth = 0;
  const std::uint64_t* subset_begin = nullptr;
  const std::uint64_t* subset_end = nullptr;

  bool full() const { return subset_begin == nullptr; }

  std::uint64_t pow_r(int exponent) const {
    std::uint64_t value = 1;
    for (int i = 0; i < exponent; ++i) {
      value *= static_cast<std::uint64_t>(r);
    }
    return value;
  }
};

inline Complex survival_contribution(const EngineContext& ctx,
                                     const StateVector& s1,
                                     const StateVector& s2) {
  return cmul(s1.data()[ctx.real->k], s2.data()[ctx.real->l]);
}

inline void apply_step_periods(const EngineContext& ctx, StateVector& s1,
                               StateVector& s2) {
  for (int p = 0; p < ctx.real->params.Np; ++p) {
    apply_floquet_period(s1, ctx.real->layer1);
  }
  for (int p = 0; p < ctx.real->params.Np; ++p) {
    apply_floquet_period(s2, ctx.real->layer2);
  }
}

/// Applies branch term s of the step with 0-based index `step_index`.
inline void apply_branch_term(const EngineContext& ctx, StateVector& s1,
                              StateVector& s2, int step_index, int s) {
  const GatePosition& pos = ctx.real->schedule[step_index];
  const BranchTerm& term = ctx.branches->term(s);
  s1.apply_one_qubit(term.left, pos.q1);
  s2.apply_one_qubit(term.right, pos.q2);
}

/// Depth-first walk of the (possibly subset-restricted) branch tree.
/// Owns no states beyond the pair passed in: the node's pair is evolved in
/// place once per node and copied once per visited child, so a walk from
/// the root keeps at most (max_depth + 1) state pairs alive, which is the
/// 2 * (T+1) * 2^(L/2) memory contract.
///
/// `visit(depth, prefix, s1, s2)` is called in preorder; per depth the
/// prefixes are visited in ascending order.
template <typename Visitor>
void dfs(const EngineContext& ctx, StateVector& s1, StateVector& s2,
         int depth, std::uint64_t prefix, const std::uint64_t* lo,
         const std::uint64_t* hi, Visitor&& visit) {
  visit(depth, prefix, s1, s2);
  if (depth == ctx.max_depth) return;
  apply_step_periods(ctx, s1, s2);
  const std::uint64_t child_span = ctx.pow_r(ctx.max_depth - depth - 1);
  for (int s = 0; s < ctx.r; ++s) {
    const std::uint64_t child_prefix =
        prefix * static_cast<std::uint64_t>(ctx.r) +
        static_cast<std::uint64_t>(s);
    const std::uint64_t* child_lo = lo;
    const std::uint64_t* child_hi = hi;
    if (!ctx.full()) {
      const std::uint64_t first_leaf = child_prefix * child_span;
      child_lo = std::lower_bound(lo, hi, first_leaf);
      child_hi = std::lower_bound(child_lo, hi, first_leaf + child_span);
      if (child_lo == child_hi) continue;  // no sampled leaf below
    }
    StateVector c1 = s1;
    StateVector c2 = s2;
    apply_branch_term(ctx, c1, c2, depth, s);
    dfs(ctx, c1, c2, depth + 1, child_prefix, child_lo, child_hi, visit);
  }
}

struct Emission {
  std::uint16_t t;
  std::uint64_t prefix;
  Complex value;
};

/// Work decomposition: chunks are the nonempty depth-`depth` subtrees,
/// listed by ascending prefix. Depth 0 means one serial walk.
struct ChunkPlan {
  int depth = 0;
  std::vector<std::uint64_t> prefixes;
};

inline ChunkPlan plan_chunks(const EngineContext& ctx, int workers) {
  ChunkPlan plan;
  if (workers <= 1 || ctx.r < 2 || ctx.max_depth == 0) {
    plan.prefixes = {0};
    return plan;
  }
  int depth = 1;
  std::uint64_t count = static_cast<std::uint64_t>(ctx.r);
  while (count < 2 * static_cast<std::uint64_t>(workers) &&
         depth < ctx.max_depth && count <= 2048) {
    ++depth;
    count *= static_cast<std::uint64_t>(ctx.r);
  }
  plan.depth = depth;
  if (ctx.full()) {
    plan.prefixes.resize(count);
    for (std::uint64_t p = 0; p < count; ++p) plan.prefixes[p] = p;
  } else {
    const std::uint64_t span = ctx.pow_r(ctx.max_depth - depth);
    for (const std::uint64_t* it = ctx.subset_begin; it != ctx.subset_end;
         ++it) {
      const std::uint64_t prefix = *it / span;
      if (plan.prefixes.empty() || plan.prefixes.back() != prefix) {
        plan.prefixes.push_back(prefix);
      }
    }
  }
  return plan;
}

/// Executes one chunk: replays the branch path down to the chunk root
/// (emitting the shallow contributions this chunk owns), then walks the
/// subtree. Emission order within a chunk is the serial DFS order.
template <typename Emit>
void run_chunk(const EngineContext& ctx, const ChunkPlan& plan,
               std::size_t chunk_ordinal, Emit&& emit) {
  const std::uint64_t prefix = plan.prefixes[chunk_ordinal];
  const int depth = plan.depth;

  // This chunk owns the step-t node on its replay path iff it is the first
  // nonempty chunk inside that node's subtree, i.e. the previous chunk (if
  // any) lies outside it.
  std::vector<bool> owns(depth, false);
  for (int t = 0; t < depth; ++t) {
    const std::uint64_t span_t = ctx.pow_r(depth - t);
    owns[t] = chunk_ordinal == 0 ||
              plan.prefixes[chunk_ordinal - 1] / span_t != prefix / span_t;
  }

  const std::uint64_t* lo = ctx.subset_begin;
  const std::uint64_t* hi = ctx.subset_end;
  if (!ctx.full()) {
    const std::uint64_t span = ctx.pow_r(ctx.max_depth - depth);
    lo = std::lower_bound(ctx.subset_begin, ctx.subset_end, prefix * span);
    hi = std::lower_bound(lo, ctx.subset_end, (prefix + 1) * span);
  }

  StateVector s1 =
      StateVector::product_state(ctx.real->params.L1, ctx.real->k);
  StateVector s2 =
      StateVector::product_state(ctx.real->params.L2, ctx.real->l);
  for (int t = 0; t < depth; ++t) {
    if (owns[t]) {
      emit(static_cast<std::uint16_t>(t), prefix / ctx.pow_r(depth - t),
           survival_contribution(ctx, s1, s2));
    }
    apply_step_periods(ctx, s1, s2);
    const int digit = static_cast<int>(
        (prefix / ctx.pow_r(depth - t - 1)) %
        static_cast<std::uint64_t>(ctx.r));
    apply_branch_term(ctx, s1, s2, t, digit);
  }
  dfs(ctx, s1, s2, depth, prefix, lo, hi,
      [&emit, &ctx](int t, std::uint64_t node_prefix, const StateVector& a,
                    const StateVector& b) {
        emit(static_cast<std::uint16_t>(t), node_prefix,
             survival_contribution(ctx, a, b));
      });
}

/// Runs all chunks (optionally on worker threads) and returns the full
/// emission stream in ascending chunk order, which per time step is
/// ascending prefix order regardless of the worker count.
inline std::vector<Emission> run_emissions(const EngineContext& ctx,
                                           int workers) {
  const ChunkPlan plan = plan_chunks(ctx, workers);
  const std::size_t chunks = plan.prefixes.size();
  std::vector<std::vector<Emission>> per_chunk(chunks);

  auto execute = [&ctx, &plan, &per_chunk](std::size_t ordinal) {
    run_chunk(ctx, plan, ordinal,
              [&per_chunk, ordinal](std::uint16_t t, std::uint64_t prefix,
                                    Complex value) {
                per_chunk[ordinal].push_back({t, prefix, value});
              });
  };

  const int thread_count =
      std::min<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)),
                            chunks);
  if (thread_count <= 1) {
    for (std::size_t ordinal = 0; ordinal < chunks; ++ordinal) {
      execute(ordinal);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> failures(thread_count);
    std::vector<std::thread> pool;
    pool.reserve(thread_count);
    for (int w = 0; w < thread_count; ++w) {
      pool.emplace_back([&execute, &next, &failures, chunks, w] {
        try {
          for (;;) {
            const std::size_t ordinal =
                next.fetch_add(1, std::memory_order_relaxed);
            if (ordinal >= chunks) break;
            execute(ordinal);
          }
        } catch (...) {
          failures[w] = std::current_exception();
        }
      });
    }
    for (std::thread& worker : pool) worker.join();
    for (const std::exception_ptr& failure : failures) {
      if (failure) std::rethrow_exception(failure);
    }
  }

  std::size_t total = 0;
  for (const auto& list : per_chunk) total += list.size();
  std::vector<Emission> ordered;
  ordered.reserve(total);
  for (const auto& list : per_chunk) {
    ordered.insert(ordered.end(), list.begin(), list.end());
  }
  return ordered;
}

/// Uniform sample of m distinct leaves out of [0, total) (Floyd's
/// algorithm), sorted ascending. Returns an empty vector when the whole
/// space is selected, which callers treat as "no restriction" so that
/// fraction = 1 follows the exact-mode code path bit for bit.
inline std::vector<std::uint64_t> sample_leaves(const CircuitRealization& real,
                                                std::uint64_t total,
                                                double fraction,
                                                std::uint64_t budget) {
  if (!(fraction > 0.0) || fraction > 1.0) {
    throw ArgumentError("sampling fraction must be in (0, 1]");
  }
  std::uint64_t m = static_cast<std::uint64_t>(
      std::ceil(fraction * static_cast<double>(total)));
  if (m == 0) m = 1;
  if (m > total) m = total;
  if (m > budget) {
    throw ResourceError("sampled trajectory count " + std::to_string(m) +
                        " exceeds budget " + std::to_string(budget));
  }
  if (m == total) return {};

  RandomStream rng(real.seed, StreamPurpose::kTrajectorySample,
                   real.realization_index);
  std::unordered_set<std::uint64_t> chosen;
  chosen.reserve(m);
  for (std::uint64_t j = total - m; j < total; ++j) {
    const std::uint64_t draw = rng.uniform_below(j + 1);
    if (!chosen.insert(draw).second) {
      chosen.insert(j);
    }
  }
  std::vector<std::uint64_t> sorted(chosen.begin(), chosen.end());
  std::sort(sorted.begin(), sorted.end());
  return sorted;
}

inline void validate_run_inputs(const CircuitRealization& real) {
  validate(real.params);
  if (real.schedule.size() != static_cast<std::size_t>(real.params.T)) {
    throw ArgumentError("schedule length does not match step count");
  }
  if (real.k >= (std::uint64_t{1} << real.params.L1) ||
      real.l >= (std::uint64_t{1} << real.params.L2)) {
    throw ArgumentError("initial basis index out of range");
  }
}

}  // namespace detail

/// Per-step contribution list of one trajectory, simulated start to finish
/// on its own (no tree sharing). Emits c(t) only at steps where this
/// trajectory canonically owns its prefix (all later digits zero); the
/// t = 0 contribution (always 1) belongs to the all-zero trajectory.
inline std::vector<ContributionRecord> run_trajectory(
    const CircuitRealization& real, const BranchSet& branches,
    const TrajectoryId& traj) {
  detail::validate_run_inputs(real);
  if (traj.num_steps() != real.params.T ||
      traj.branch_count() != branches.branch_count()) {
    throw ArgumentError("trajectory does not match realization/branches");
  }
  detail::EngineContext ctx;
  ctx.real = &real;
  ctx.branches = &branches;
  ctx.r = branches.branch_count();
  ctx.max_depth = real.params.T;

  std::vector<ContributionRecord> records;
  auto emit = [&records, &real](std::uint16_t t, std::uint64_t index,
                                Complex value) {
    records.push_back({real.realization_index, index, t, value.real(),
                       value.imag()});
  };

  StateVector s1 = StateVector::product_state(real.params.L1, real.k);
  StateVector s2 = StateVector::product_state(real.params.L2, real.l);
  if (traj.index() == 0) {
    emit(0, 0, detail::survival_contribution(ctx, s1, s2));
  }
  for (int t = 1; t <= real.params.T; ++t) {
    detail::apply_step_periods(ctx, s1, s2);
    detail::apply_branch_term(ctx, s1, s2, t - 1, traj.digit(t));
    if (traj.is_canonical_at(t)) {
      emit(static_cast<std::uint16_t>(t), traj.index(),
           detail::survival_contribution(ctx, s1, s2));
    }
  }
  return records;
}

/// Fixed-shape reduction of a complete (exact) or subset (sampled)
/// contribution stream into the survival series. The result depends only
/// on the set of records, not their order.
inline SurvivalSeries reduce_survival(std::vector<ContributionRecord> records,
                                      int branch_count, int num_steps,
                                      bool exact) {
  const std::uint64_t total = trajectory_count(branch_count, num_steps);
  std::sort(records.begin(), records.end(),
            [](const ContributionRecord& a, const ContributionRecord& b) {
              return a.t != b.t ? a.t < b.t
                                : a.trajectory_index < b.trajectory_index;
            });

  SurvivalSeries series;
  series.amplitudes.resize(num_steps + 1);
  series.values.resize(num_steps + 1);

  std::size_t cursor = 0;
  for (int t = 0; t <= num_steps; ++t) {
    std::uint64_t stride = 1;
    for (int s = 0; s < num_steps - t; ++s) {
      stride *= static_cast<std::uint64_t>(branch_count);
    }
    const std::uint64_t leaf_space = total / stride;  // r^t
    PairwiseForest forest;
    std::uint64_t count = 0;
    while (cursor < records.size() && records[cursor].t == t) {
      const ContributionRecord& record = records[cursor];
      if (record.trajectory_index >= total ||
          record.trajectory_index % stride != 0) {
        throw IntegrityError("contribution index is not a canonical owner");
      }
      const std::uint64_t prefix = record.trajectory_index / stride;
      if (count > 0 && prefix < forest.next_position()) {
        throw IntegrityError("duplicate contribution for one trajectory");
      }
      forest.add_leaf(prefix, record_value(record));
      ++count;
      ++cursor;
    }
    if (exact && count != leaf_space) {
      throw IntegrityError("exact reduction expected " +
                           std::to_string(leaf_space) + " contributions at t=" +
                           std::to_string(t) + ", got " +
                           std::to_string(count));
    }
    const Complex a =
        count == 0 ? Complex(0.0, 0.0) : forest.root(leaf_space);
    series.amplitudes[t] = a;
    series.values[t] = a.real() * a.real() + a.imag() * a.imag();
  }
  if (cursor != records.size()) {
    throw IntegrityError("contribution with step index beyond the run");
  }
  return series;
}

/// Full engine run: enumerate (or sample) trajectories, evolve them
/// depth-first with checkpointed states, reduce into the survival series.
/// Bit-identical output for any worker count.
inline SurvivalResult run_survival(const CircuitRealization& real,
                                   const EngineOptions& options = {}) {
  detail::validate_run_inputs(real);
  const BranchSet branches = branches_for(real.params);
  const std::uint64_t total =
      trajectory_count(branches.branch_count(), real.params.T);

  std::vector<std::uint64_t> subset;
  if (options.mode == RunMode::kSampled) {
    subset = detail::sample_leaves(real, total, options.fraction,
                                   options.trajectory_budget);
  } else if (total > options.trajectory_budget) {
    throw ResourceError("exact run needs " + std::to_string(total) +
                        " trajectories, budget is " +
                        std::to_string(options.trajectory_budget));
  }

  detail::EngineContext ctx;
  ctx.real = &real;
  ctx.branches = &branches;
  ctx.r = branches.branch_count();
  ctx.max_depth = real.params.T;
  if (!subset.empty()) {
    ctx.subset_begin = subset.data();
    ctx.subset_end = subset.data() + subset.size();
  }

  const std::vector<detail::Emission> emissions =
      detail::run_emissions(ctx, options.workers);

  SurvivalResult result;
  result.stats.contributions_per_step.assign(real.params.T + 1, 0);
  std::vector<PairwiseForest> forests(real.params.T + 1);
  for (const detail::Emission& emission : emissions) {
    forests[emission.t].add_leaf(emission.prefix, emission.value);
    ++result.stats.contributions_per_step[emission.t];
  }
  result.series.amplitudes.resize(real.params.T + 1);
  result.series.values.resize(real.params.T + 1);
  for (int t = 0; t <= real.params.T; ++t) {
    const Complex a = forests[t].root(ctx.pow_r(t));
    result.series.amplitudes[t] = a;
    result.series.values[t] = a.real() * a.real() + a.imag() * a.imag();
  }
  result.stats.trajectories_executed =
      result.stats.contributions_per_step[real.params.T];
  return result;
}

/// The emission stream of a run as wire records (canonical trajectory
/// index = prefix extended with zeros), in the deterministic chunk order.
inline std::vector<ContributionRecord> collect_contributions(
    const CircuitRealization& real, const EngineOptions& options = {}) {
  detail::validate_run_inputs(real);
  const BranchSet branches = branches_for(real.params);
  const std::uint64_t total =
      trajectory_count(branches.branch_count(), real.params.T);

  std::vector<std::uint64_t> subset;
  if (options.mode == RunMode::kSampled) {
    subset = detail::sample_leaves(real, total, options.fraction,
                                   options.trajectory_budget);
  } else if (total > options.trajectory_budget) {
    throw ResourceError("exact run needs " + std::to_string(total) +
                        " trajectories, budget is " +
                        std::to_string(options.trajectory_budget));
  }

  detail::EngineContext ctx;
  ctx.real = &real;
  ctx.branches = &branches;
  ctx.r = branches.branch_count();
  ctx.max_depth = real.params.T;
  if (!subset.empty()) {
    ctx.subset_begin = subset.data();
    ctx.subset_end = subset.data() + subset.size();
  }

  const std::vector<detail::Emission> emissions =
      detail::run_emissions(ctx, options.workers);
  std::vector<ContributionRecord> records;
  records.reserve(emissions.size());
  for (const detail::Emission& emission : emissions) {
    const std::uint64_t index =
        emission.prefix * ctx.pow_r(real.params.T - emission.t);
    records.push_back({real.realization_index, index, emission.t,
                       emission.value.real(), emission.value.imag()});
  }
  return records;
}

/// Coherent sum over all step-t prefix trajectories of the joint amplitude
/// at (k', l'). Test utility for small systems.
inline Complex reconstruct_amplitude(const CircuitRealization& real,
                                     const BranchSet& branches,
                                     std::uint64_t k_prime,
                                     std::uint64_t l_prime, int t,
                                     std::uint64_t budget =
                                         kDefaultTrajectoryBudget) {
  detail::validate_run_inputs(real);
  if (t < 0 || t > real.params.T) {
    throw ArgumentError("reconstruction step out of range");
  }
  if (k_prime >= (std::uint64_t{1} << real.params.L1) ||
      l_prime >= (std::uint64_t{1} << real.params.L2)) {
    throw ArgumentError("reconstruction index out of range");
  }
  const std::uint64_t prefixes = trajectory_count(branches.branch_count(), t);
  if (prefixes > budget) {
    throw ResourceError("reconstruction needs " + std::to_string(prefixes) +
                        " prefix trajectories, budget is " +
                        std::to_string(budget));
  }

  detail::EngineContext ctx;
  ctx.real = &real;
  ctx.branches = &branches;
  ctx.r = branches.branch_count();
  ctx.max_depth = t;

  PairwiseForest forest;
  StateVector s1 = StateVector::product_state(real.params.L1, real.k);
  StateVector s2 = StateVector::product_state(real.params.L2, real.l);
  detail::dfs(ctx, s1, s2, 0, 0, nullptr, nullptr,
              [&forest, k_prime, l_prime, t](int depth, std::uint64_t prefix,
                                             const StateVector& a,
                                             const StateVector& b) {
                if (depth != t) return;
                forest.add_leaf(prefix, detail::cmul(a.data()[k_prime],
                                                     b.data()[l_prime]));
              });
  return forest.root(prefixes);
}

/// Full joint state at step t rebuilt from the trajectory sum,
/// global index = k' + 2^{L1} * l'. Test utility for small systems.
inline StateVector reconstruct_state(const CircuitRealization& real,
                                     const BranchSet& branches, int t,
                                     std::uint64_t budget =
                                         kDefaultTrajectoryBudget) {
  detail::validate_run_inputs(real);
  if (t < 0 || t > real.params.T) {
    throw ArgumentError("reconstruction step out of range");
  }
  const int total_qubits = real.params.L1 + real.params.L2;
  if (total_qubits > 24) {
    throw ResourceError("full-state reconstruction limited to 24 qubits");
  }
  const std::uint64_t prefixes = trajectory_count(branches.branch_count(), t);
  if (prefixes > budget) {
    throw ResourceError("reconstruction needs " + std::to_string(prefixes) +
                        " prefix trajectories, budget is " +
                        std::to_string(budget));
  }

  detail::EngineContext ctx;
  ctx.real = &real;
  ctx.branches = &branches;
  ctx.r = branches.branch_count();
  ctx.max_depth = t;

  StateVector full = StateVector::product_state(total_qubits, 0);
  full.data()[0] = Complex(0.0, 0.0);
  const int l1 = real.params.L1;

  StateVector s1 = StateVector::product_state(real.params.L1, real.k);
  StateVector s2 = StateVector::product_state(real.params.L2, real.l);
  detail::dfs(ctx, s1, s2, 0, 0, nullptr, nullptr,
              [&full, l1, t](int depth, std::uint64_t, const StateVector& a,
                             const StateVector& b) {
                if (depth != t) return;
                Complex* out = full.data();
                const Complex* pa = a.data();
                const Complex* pb = b.data();
                for (std::uint64_t l_prime = 0; l_prime < b.size();
                     ++l_prime) {
                  const std::uint64_t base = l_prime << l1;
                  for (std::uint64_t k_prime = 0; k_prime < a.size();
                       ++k_prime) {
                    out[base | k_prime] +=
                        detail::cmul(pa[k_prime], pb[l_prime]);
                  }
                }
              });
  return full;
}

}  // namespace sfsim
