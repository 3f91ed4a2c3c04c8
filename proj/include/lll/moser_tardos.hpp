#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <variant>
#include <vector>

#include "lll/csp.hpp"

namespace lll {

/// Depth-T truncation of a table tau : V -> Lambda^N. Row-major storage:
/// entry (v, row) lives at row * num_variables + v.
class Table {
 public:
  Table() = default;
  Table(std::size_t num_variables, std::size_t depth, std::vector<LabelId> entries);

  /// Table whose every row equals `row`.
  static Table constant_rows(std::span<const LabelId> row, std::size_t depth);
  static Table from_rows(const std::vector<std::vector<LabelId>>& rows);

  std::size_t depth() const { return depth_; }
  std::size_t num_variables() const { return num_variables_; }
  LabelId at(VariableId v, std::size_t row) const;
  void set(VariableId v, std::size_t row, LabelId label);
  std::vector<std::vector<LabelId>> rows() const;

  friend bool operator==(const Table&, const Table&) = default;

 private:
  std::size_t num_variables_ = 0;
  std::size_t depth_ = 0;
  std::vector<LabelId> entries_;
};

/// A finite MT-sequence: steps I_0, I_1, ... of constraint ids, each sorted.
struct MtSequence {
  std::vector<std::vector<ConstraintId>> steps;

  std::size_t total_size() const;
  friend bool operator==(const MtSequence&, const MtSequence&) = default;
};

/// Throws non_independent if some step repeats a constraint or contains two
/// adjacent constraints of `dependency`, and invalid_input for unknown ids.
void require_independent_steps(const MtSequence& seq, const FiniteGraph& dependency);

/// Counter-based generator: every draw is a pure function of
/// (seed, stream, a, b), so sampling order never matters.
std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t stream, std::uint64_t a,
                           std::uint64_t b);

/// Samples labels from rational weights using a 64-bit threshold table.
class LabelSampler {
 public:
  explicit LabelSampler(const std::vector<Rational>& weights);
  LabelId operator()(std::uint64_t draw) const;

 private:
  std::vector<std::uint64_t> thresholds_;  // cumulative mass * 2^64, last label omitted
};

/// Entry (v, row) of trial `trial` is LabelSampler(counter_hash(seed, trial, v, row)).
Table sample_table(const Csp& csp, std::size_t depth, std::uint64_t seed, std::uint64_t trial);

namespace strategy {
struct MaximalGreedy {};
struct FirstSingleton {};
/// Random nonempty independent subset: violated constraints are visited in a
/// seeded random order; the first is always taken, later independent ones
/// with probability 1/2.
struct RandomSubset {
  std::uint64_t seed = 0;
};
struct Scripted {
  MtSequence script;
};
}  // namespace strategy

using Strategy = std::variant<strategy::MaximalGreedy, strategy::FirstSingleton,
                              strategy::RandomSubset, strategy::Scripted>;

enum class RunStatus { completed, depth_exhausted, iteration_cap, script_exhausted };

const char* to_string(RunStatus status);

struct IterationRecord {
  std::vector<std::size_t> level;       // level_n
  std::vector<LabelId> labeling;        // f_n
  std::vector<ConstraintId> violated;   // Const_n
  std::vector<ConstraintId> chosen;     // I_n

  friend bool operator==(const IterationRecord&, const IterationRecord&) = default;
};

struct RunTrace {
  std::vector<IterationRecord> iterations;  // empty unless recorded
  MtSequence realized;                      // the I_n actually applied
  std::vector<std::size_t> final_level;
  PartialLabeling result;  // undefined where the level reached the depth
  RunStatus status = RunStatus::completed;
  std::size_t iterations_run = 0;
  std::size_t resamples = 0;  // sum of |I_n|

  friend bool operator==(const RunTrace&, const RunTrace&) = default;
};

struct MtaOptions {
  /// Defaults to |Const| * depth.
  std::optional<std::size_t> max_iters;
  bool record_iterations = true;
};

/// Runs the Moser-Tardos algorithm on a depth-truncated table. A run stops as
/// completed when no constraint is violated, depth_exhausted when an applied
/// step would push a level to the table depth, iteration_cap after max_iters
/// iterations, and script_exhausted when a scripted run outlives its script
/// with violations left. Throws script_inconsistent when a scripted step is
/// not contained in the violated set.
RunTrace mta_run(const Csp& csp, const Table& table, const Strategy& strategy,
                 const MtaOptions& options = {});

/// Consistency of `seq` with (csp, table) via the closed-form levels
/// level_n(v) = sum over c containing v of |{i < n : c in I_i}|.
/// Throws depth_exceeded when a required row lies beyond the table.
bool check_consistency(const Csp& csp, const Table& table, const MtSequence& seq);

/// Same as check_consistency, but only constraints for which `checked` is true
/// must be violated; the rest are treated as always violated.
bool check_consistency_masked(const Csp& csp, const Table& table, const MtSequence& seq,
                              const std::vector<bool>& checked);

struct MonteCarloReport {
  std::size_t trials = 0;
  std::size_t completed = 0;
  std::map<RunStatus, std::size_t> status_counts;
  std::map<std::size_t, std::size_t> resample_histogram;  // sum |I_n| -> trials
  std::size_t solutions = 0;  // completed runs whose output passes is_solution

  double success_rate() const {
    return trials == 0 ? 0.0 : static_cast<double>(completed) / static_cast<double>(trials);
  }
};

/// Independent tables per trial (see sample_table); a RandomSubset strategy
/// gets its seed re-derived per trial. `jobs` bounds worker threads; results
/// do not depend on it.
MonteCarloReport mt_monte_carlo(const Csp& csp, std::size_t trials, std::size_t depth,
                                std::uint64_t seed, const Strategy& strategy,
                                std::size_t jobs = 1);

/// Runs `body(i)` for i in [0, count) on up to `jobs` threads.
void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& body);

}  // namespace lll
