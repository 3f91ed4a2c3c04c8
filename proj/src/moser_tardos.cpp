#include "lll/moser_tardos.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "lll/error.hpp"

namespace lll {

Table::Table(std::size_t num_variables, std::size_t depth, std::vector<LabelId> entries)
    : num_variables_(num_variables), depth_(depth), entries_(std::move(entries)) {
  if (entries_.size() != num_variables_ * depth_) {
    throw Error(ErrorKind::invalid_input, "table has " + std::to_string(entries_.size()) + " entries, expected " +
                                              std::to_string(num_variables_ * depth_));
  }
}

Table Table::constant_rows(std::span<const LabelId> row, std::size_t depth) {
  std::vector<LabelId> entries;
  entries.reserve(row.size() * depth);
  for (std::size_t i = 0; i < depth; ++i) entries.insert(entries.end(), row.begin(), row.end());
  return Table(row.size(), depth, std::move(entries));
}

Table Table::from_rows(const std::vector<std::vector<LabelId>>& rows) {
  const std::size_t n = rows.empty() ? 0 : rows.front().size();
  std::vector<LabelId> entries;
  for (const auto& row : rows) {
    if (row.size() != n) throw Error(ErrorKind::invalid_input, "table rows differ in length");
    entries.insert(entries.end(), row.begin(), row.end());
  }
  return Table(n, rows.size(), std::move(entries));
}

LabelId Table::at(VariableId v, std::size_t row) const {
  if (v >= num_variables_) throw Error(ErrorKind::invalid_input, "table has no variable " + std::to_string(v));
  if (row >= depth_) {
    throw Error(ErrorKind::depth_exceeded,
                "row " + std::to_string(row) + " of variable " + std::to_string(v) + " is beyond depth " + std::to_string(depth_));
  }
  return entries_[row * num_variables_ + v];
}

void Table::set(VariableId v, std::size_t row, LabelId label) {
  if (v >= num_variables_ || row >= depth_) throw Error(ErrorKind::invalid_input, "table index out of range");
  entries_[row * num_variables_ + v] = label;
}

std::vector<std::vector<LabelId>> Table::rows() const {
  std::vector<std::vector<LabelId>> out(depth_);
  for (std::size_t r = 0; r < depth_; ++r) {
    out[r].assign(entries_.begin() + static_cast<std::ptrdiff_t>(r * num_variables_),
                  entries_.begin() + static_cast<std::ptrdiff_t>((r + 1) * num_variables_));
  }
  return out;
}

std::size_t MtSequence::total_size() const {
  std::size_t total = 0;
  for (const auto& step : steps) total += step.size();
  return total;
}

void require_independent_steps(const MtSequence& seq, const FiniteGraph& dependency) {
  for (std::size_t n = 0; n < seq.steps.size(); ++n) {
    const auto& step = seq.steps[n];
    for (std::size_t i = 0; i < step.size(); ++i) {
      if (step[i] >= dependency.size()) {
        throw Error(ErrorKind::invalid_input, "step " + std::to_string(n) + " names unknown constraint " + std::to_string(step[i]));
      }
      for (std::size_t j = 0; j < i; ++j) {
        if (step[i] == step[j] || dependency.has_edge(step[i], step[j])) {
          throw Error(ErrorKind::non_independent, "step " + std::to_string(n) + " is not independent: constraints " +
                                                      std::to_string(step[j]) + " and " + std::to_string(step[i]));
        }
      }
    }
  }
}

namespace {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t stream, std::uint64_t a, std::uint64_t b) {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ stream);
  h = mix64(h ^ a);
  return mix64(h ^ b);
}

LabelSampler::LabelSampler(const std::vector<Rational>& weights) {
  if (weights.empty()) throw Error(ErrorKind::invalid_input, "sampler needs at least one label");
  const BigInt scale = pow(BigInt(2), 64);
  Rational cumulative = 0;
  for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
    cumulative += weights[i];
    BigInt threshold = cumulative.get_num() * scale / cumulative.get_den();
    thresholds_.push_back(std::stoull(threshold.get_str()));
  }
}

LabelId LabelSampler::operator()(std::uint64_t draw) const {
  auto it = std::upper_bound(thresholds_.begin(), thresholds_.end(), draw);
  return static_cast<LabelId>(it - thresholds_.begin());
}

Table sample_table(const Csp& csp, std::size_t depth, std::uint64_t seed, std::uint64_t trial) {
  LabelSampler sampler(csp.weights());
  const std::size_t n = csp.num_variables();
  std::vector<LabelId> entries(n * depth);
  for (std::size_t row = 0; row < depth; ++row) {
    for (VariableId v = 0; v < n; ++v) entries[row * n + v] = sampler(counter_hash(seed, trial, v, row));
  }
  return Table(n, depth, std::move(entries));
}

const char* to_string(RunStatus status) {
  switch (status) {
    case RunStatus::completed: return "completed";
    case RunStatus::depth_exhausted: return "depth_exhausted";
    case RunStatus::iteration_cap: return "iteration_cap";
    case RunStatus::script_exhausted: return "script_exhausted";
  }
  return "unknown";
}

namespace {

bool independent_of(const FiniteGraph& dep, ConstraintId c, const std::vector<ConstraintId>& chosen) {
  return std::none_of(chosen.begin(), chosen.end(),
                      [&](ConstraintId x) { return x == c || dep.has_edge(x, c); });
}

std::vector<ConstraintId> choose_step(const Strategy& strategy, const FiniteGraph& dep,
                                      const std::vector<ConstraintId>& violated, std::size_t iteration) {
  return std::visit(
      [&](const auto& s) -> std::vector<ConstraintId> {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, strategy::MaximalGreedy>) {
          return maximal_independent_set(dep, violated);
        } else if constexpr (std::is_same_v<S, strategy::FirstSingleton>) {
          return {violated.front()};
        } else if constexpr (std::is_same_v<S, strategy::RandomSubset>) {
          std::vector<ConstraintId> order = violated;
          std::sort(order.begin(), order.end(), [&](ConstraintId a, ConstraintId b) {
            auto ha = counter_hash(s.seed, iteration, a, 0);
            auto hb = counter_hash(s.seed, iteration, b, 0);
            return ha != hb ? ha < hb : a < b;
          });
          std::vector<ConstraintId> chosen{order.front()};
          for (std::size_t i = 1; i < order.size(); ++i) {
            if ((counter_hash(s.seed, iteration, order[i], 1) & 1U) && independent_of(dep, order[i], chosen)) {
              chosen.push_back(order[i]);
            }
          }
          std::sort(chosen.begin(), chosen.end());
          return chosen;
        } else {
          std::vector<ConstraintId> step = s.script.steps.at(iteration);
          std::sort(step.begin(), step.end());
          for (std::size_t i = 0; i < step.size(); ++i) {
            if (!std::binary_search(violated.begin(), violated.end(), step[i])) {
              throw Error(ErrorKind::script_inconsistent, "scripted step " + std::to_string(iteration) + " resamples constraint " +
                                                              std::to_string(step[i]) + ", which is not violated");
            }
            for (std::size_t j = 0; j < i; ++j) {
              if (step[i] == step[j] || dep.has_edge(step[i], step[j])) {
                throw Error(ErrorKind::non_independent, "scripted step " + std::to_string(iteration) + " is not independent");
              }
            }
          }
          return step;
        }
      },
      strategy);
}

}  // namespace

RunTrace mta_run(const Csp& csp, const Table& table, const Strategy& strategy, const MtaOptions& options) {
  if (table.num_variables() != csp.num_variables()) {
    throw Error(ErrorKind::invalid_input, "table width does not match the number of variables");
  }
  if (table.depth() == 0) throw Error(ErrorKind::invalid_parameter, "table depth must be at least 1");
  const FiniteGraph dep = dependency_graph(csp);
  const std::size_t n = csp.num_variables();
  const std::size_t max_iters = options.max_iters.value_or(csp.num_constraints() * table.depth());
  const auto* script = std::get_if<strategy::Scripted>(&strategy);

  RunTrace trace;
  std::vector<std::size_t> level(n, 0);
  PartialLabeling f(n);
  for (VariableId v = 0; v < n; ++v) f.set(v, table.at(v, 0));

  for (;;) {
    std::vector<ConstraintId> violated;
    for (const auto& con : csp.constraints()) {
      if (violates(csp, con.id, f)) violated.push_back(con.id);
    }
    if (violated.empty()) {
      trace.status = RunStatus::completed;
      break;
    }
    if (script && trace.iterations_run >= script->script.steps.size()) {
      trace.status = RunStatus::script_exhausted;
      break;
    }
    if (trace.iterations_run >= max_iters) {
      trace.status = RunStatus::iteration_cap;
      break;
    }
    std::vector<ConstraintId> chosen = choose_step(strategy, dep, violated, trace.iterations_run);
    if (options.record_iterations) {
      trace.iterations.push_back(IterationRecord{level, f.labels(), violated, chosen});
    }
    bool exhausted = false;
    for (ConstraintId c : chosen) {
      for (VariableId v : csp.constraint(c).domain) {
        if (++level[v] >= table.depth()) {
          exhausted = true;
          f.unset(v);
        } else {
          f.set(v, table.at(v, level[v]));
        }
      }
    }
    trace.realized.steps.push_back(std::move(chosen));
    trace.resamples += trace.realized.steps.back().size();
    ++trace.iterations_run;
    if (exhausted) {
      trace.status = RunStatus::depth_exhausted;
      break;
    }
  }
  trace.final_level = level;
  trace.result = f;
  return trace;
}

bool check_consistency_masked(const Csp& csp, const Table& table, const MtSequence& seq,
                              const std::vector<bool>& checked) {
  if (checked.size() != csp.num_constraints()) throw Error(ErrorKind::invalid_input, "mask size does not match the CSP");
  require_independent_steps(seq, dependency_graph(csp));
  const std::size_t k = csp.num_labels();
  std::vector<std::size_t> level(csp.num_variables(), 0);
  for (const auto& step : seq.steps) {
    for (ConstraintId c : step) {
      if (!checked[c]) continue;
      const Constraint& con = csp.constraint(c);
      AssignmentCode code = 0;
      for (VariableId v : con.domain) code = code * k + table.at(v, level[v]);
      if (!csp.is_bad(c, code)) return false;
    }
    for (ConstraintId c : step) {
      for (VariableId v : csp.constraint(c).domain) ++level[v];
    }
  }
  return true;
}

bool check_consistency(const Csp& csp, const Table& table, const MtSequence& seq) {
  return check_consistency_masked(csp, table, seq, std::vector<bool>(csp.num_constraints(), true));
}

void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& body) {
  jobs = std::max<std::size_t>(1, std::min(jobs, count));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(count);
      }
    }
  };
  std::vector<std::thread> threads;
  for (std::size_t t = 0; t < jobs; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

MonteCarloReport mt_monte_carlo(const Csp& csp, std::size_t trials, std::size_t depth, std::uint64_t seed,
                                const Strategy& strategy, std::size_t jobs) {
  struct Outcome {
    RunStatus status;
    std::size_t resamples;
    bool solution;
  };
  std::vector<Outcome> outcomes(trials);
  parallel_for(trials, jobs, [&](std::size_t t) {
    Strategy local = strategy;
    if (auto* random = std::get_if<strategy::RandomSubset>(&local)) {
      random->seed = counter_hash(random->seed, t, 0x5eed, 0);
    }
    Table table = sample_table(csp, depth, seed, t);
    RunTrace trace = mta_run(csp, table, local, MtaOptions{std::nullopt, false});
    bool solution = trace.status == RunStatus::completed && is_solution(csp, trace.result);
    outcomes[t] = Outcome{trace.status, trace.resamples, solution};
  });
  MonteCarloReport report;
  report.trials = trials;
  for (const auto& o : outcomes) {
    ++report.status_counts[o.status];
    ++report.resample_histogram[o.resamples];
    if (o.status == RunStatus::completed) ++report.completed;
    if (o.solution) ++report.solutions;
  }
  return report;
}

}  // namespace lll
