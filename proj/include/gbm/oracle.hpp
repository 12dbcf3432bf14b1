#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "gbm/mechanism.hpp"

namespace gbm {

inline std::vector<double> machine_loads(const Instance& instance,
                                         const Allocation& allocation) {
  if (allocation.assign.size() != instance.tasks()) {
    throw Error("allocation covers " + std::to_string(allocation.assign.size()) +
                " tasks, instance has " + std::to_string(instance.tasks()));
  }
  std::vector<double> loads(instance.machines(), 0.0);
  for (std::size_t j = 0; j < allocation.assign.size(); ++j) {
    const int i = allocation.assign[j];
    if (i < 1 || static_cast<std::size_t>(i) > instance.machines()) {
      throw Error("allocation assigns task " + std::to_string(j + 1) +
                  " to machine " + std::to_string(i));
    }
    loads[i - 1] += instance.times[i - 1][j];
  }
  return loads;
}

inline double makespan(const Instance& instance, const Allocation& allocation) {
  const auto loads = machine_loads(instance, allocation);
  return *std::max_element(loads.begin(), loads.end());
}

struct OptResult {
  double value;
  Allocation allocation;  // lexicographically first optimal assignment
};

namespace detail {

struct OptSearch {
  const Instance& inst;
  std::vector<double> loads;
  std::vector<int> cur;
  std::vector<int> best_assign;
  double best = kInfiniteTime;

  explicit OptSearch(const Instance& i)
      : inst(i), loads(i.machines(), 0.0), cur(i.tasks(), 0) {}

  void run(std::size_t j, double cur_max) {
    if (j == inst.tasks()) {
      best = cur_max;  // reached only when cur_max < best
      best_assign = cur;
      return;
    }
    for (std::size_t i = 0; i < inst.machines(); ++i) {
      const double saved = loads[i];
      const double grown = saved + inst.times[i][j];
      const double next_max = std::max(cur_max, grown);
      if (next_max >= best) continue;
      loads[i] = grown;
      cur[j] = static_cast<int>(i) + 1;
      run(j + 1, next_max);
      loads[i] = saved;
    }
  }
};

}  // namespace detail

/// Exhaustive minimum makespan over all m^n allocations. Throws TooLarge
/// beyond the cap (default 2^24 allocations) instead of sampling.
inline OptResult opt_makespan(const Instance& instance,
                              std::uint64_t cap = std::uint64_t{1} << 24) {
  const std::size_t m = instance.machines();
  std::uint64_t total = 1;
  for (std::size_t j = 0; j < instance.tasks(); ++j) {
    if (total > cap / m) {
      throw TooLarge("enumeration needs more than " + std::to_string(cap) +
                     " allocations (" + std::to_string(m) + "^" +
                     std::to_string(instance.tasks()) + ")");
    }
    total *= m;
  }
  detail::OptSearch search(instance);
  search.run(0, 0.0);
  return OptResult{search.best == kInfiniteTime ? 0.0 : search.best,
                   Allocation{std::move(search.best_assign)}};
}

namespace detail {

inline void require_two_machines(const Instance& instance, const char* what) {
  if (instance.machines() != 2) {
    throw WrongMachineCount(std::string(what) + " requires exactly 2 machines, got " +
                            std::to_string(instance.machines()));
  }
}

inline void require_task_cap(const Instance& instance, std::size_t cap, const char* what) {
  if (instance.tasks() > cap) {
    throw TooLarge(std::string(what) + " enumerates 2^n assignments; n = " +
                   std::to_string(instance.tasks()) + " exceeds the cap " +
                   std::to_string(cap));
  }
}

inline std::vector<double> machine1_probabilities(const Instance& instance,
                                                  const Parameters& params) {
  std::vector<double> p(instance.tasks());
  for (std::size_t j = 0; j < instance.tasks(); ++j) {
    p[j] = allocation_probability(instance.times[0][j], instance.times[1][j], params);
  }
  return p;
}

struct ExpectationSearch {
  const Instance& inst;
  const std::vector<double>& p1;
  long double total = 0.0L;

  void run(std::size_t j, long double prob, double l1, double l2) {
    if (prob == 0.0L) return;
    if (j == inst.tasks()) {
      total += prob * std::max(l1, l2);
      return;
    }
    run(j + 1, prob * p1[j], l1 + inst.times[0][j], l2);
    run(j + 1, prob * (1.0 - p1[j]), l1, l2 + inst.times[1][j]);
  }
};

}  // namespace detail

/// Exact expected makespan of the two-machine mechanism, enumerating the
/// 2^n support of the per-task allocation probabilities (n <= 20).
inline double exact_expected_makespan(const Instance& instance, const Parameters& params) {
  detail::require_two_machines(instance, "exact_expected_makespan");
  detail::require_task_cap(instance, 20, "exact_expected_makespan");
  const auto p1 = detail::machine1_probabilities(instance, params);
  detail::ExpectationSearch search{instance, p1};
  search.run(0, 1.0L, 0.0, 0.0);
  return static_cast<double>(search.total);
}

/// One realized assignment with its probability, makespan, and the machine
/// finishing last (ties count as machine 1).
struct OutcomeAtom {
  Allocation assignment;
  double probability;
  double makespan;
  int last_machine;
};

struct TaskJoint {
  // joint[i][x] = Pr(last machine = i+1, task on machine x+1)
  double joint[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
};

struct JointStatistics {
  std::vector<OutcomeAtom> atoms;  // zero-probability assignments omitted
  std::vector<TaskJoint> per_task;
};

/// Full outcome enumeration of the two-machine mechanism plus the joint
/// last-machine/task-placement probabilities per task (n <= 20).
inline JointStatistics joint_statistics(const Instance& instance, const Parameters& params) {
  detail::require_two_machines(instance, "joint_statistics");
  detail::require_task_cap(instance, 20, "joint_statistics");
  const std::size_t n = instance.tasks();
  const auto p1 = detail::machine1_probabilities(instance, params);

  JointStatistics stats;
  stats.per_task.resize(n);
  std::vector<std::array<std::array<long double, 2>, 2>> acc(
      n, {{{0.0L, 0.0L}, {0.0L, 0.0L}}});
  std::vector<int> assign(n, 0);

  auto walk = [&](auto&& self, std::size_t j, long double prob, double l1,
                  double l2) -> void {
    if (prob == 0.0L) return;
    if (j == n) {
      const int last = l1 >= l2 ? 1 : 2;
      stats.atoms.push_back(OutcomeAtom{Allocation{assign},
                                        static_cast<double>(prob),
                                        std::max(l1, l2), last});
      for (std::size_t t = 0; t < n; ++t) {
        acc[t][last - 1][assign[t] - 1] += prob;
      }
      return;
    }
    assign[j] = 1;
    self(self, j + 1, prob * p1[j], l1 + instance.times[0][j], l2);
    assign[j] = 2;
    self(self, j + 1, prob * (1.0 - p1[j]), l1, l2 + instance.times[1][j]);
  };
  walk(walk, 0, 1.0L, 0.0, 0.0);

  for (std::size_t t = 0; t < n; ++t) {
    for (int i = 0; i < 2; ++i) {
      for (int x = 0; x < 2; ++x) {
        stats.per_task[t].joint[i][x] = static_cast<double>(acc[t][i][x]);
      }
    }
  }
  return stats;
}

/// Utility of one agent: minus the true load of assigned tasks, plus the
/// payment from the outcome. `instance` holds the reported times that
/// produced the outcome; `true_times` holds actual costs.
inline UtilityRecord agent_utility(const Instance& instance,
                                   const std::vector<std::vector<double>>& true_times,
                                   const Outcome& outcome, int agent) {
  if (true_times.size() != instance.machines()) {
    throw Error("true_times has " + std::to_string(true_times.size()) +
                " rows, instance has " + std::to_string(instance.machines()));
  }
  if (agent < 1 || static_cast<std::size_t>(agent) > instance.machines()) {
    throw Error("agent index " + std::to_string(agent) + " out of range");
  }
  const auto& row = true_times[agent - 1];
  if (row.size() != instance.tasks()) {
    throw Error("true_times row length mismatch");
  }
  double load = 0.0;
  for (std::size_t j = 0; j < outcome.allocation.assign.size(); ++j) {
    if (outcome.allocation.assign[j] == agent) load += row[j];
  }
  const double valuation = -load;
  const double payment = outcome.payments[agent - 1];
  return UtilityRecord{agent, valuation, payment, valuation + payment};
}

struct McEstimate {
  double mean;
  double std_error;  // zero when samples == 1
};

/// Seeded Monte Carlo fallback for the expected makespan (two machines).
inline McEstimate monte_carlo_expected_makespan(const Instance& instance,
                                                const Parameters& params,
                                                std::size_t samples,
                                                std::uint64_t seed) {
  detail::require_two_machines(instance, "monte_carlo_expected_makespan");
  if (samples < 1) {
    throw Error("monte_carlo_expected_makespan needs at least one sample");
  }
  const std::size_t n = instance.tasks();
  std::mt19937_64 rng(seed);
  long double sum = 0.0L, sum_sq = 0.0L;
  RandomScript script;
  script.values.resize(n);
  for (std::size_t k = 0; k < samples; ++k) {
    for (std::size_t j = 0; j < n; ++j) {
      script.values[j] = detail::draw_script_value(rng, params);
    }
    const Outcome out = allocate_gbm2(instance, script);
    const double mk = makespan(instance, out.allocation);
    sum += mk;
    sum_sq += static_cast<long double>(mk) * mk;
  }
  const double mean = static_cast<double>(sum / samples);
  double std_error = 0.0;
  if (samples > 1) {
    const long double var =
        (sum_sq - sum * sum / samples) / (static_cast<long double>(samples) - 1);
    std_error = std::sqrt(std::max(0.0, static_cast<double>(var)) /
                          static_cast<double>(samples));
  }
  return McEstimate{mean, std_error};
}

/// Seeded Monte Carlo estimate of the m-machine wrapper's expected
/// makespan. The wrapper has no exact-expectation oracle.
inline McEstimate monte_carlo_mgbm_makespan(
    const Instance& instance, const Parameters& params, std::size_t samples,
    std::uint64_t seed,
    const std::optional<MgbmConfig>& partition = std::nullopt) {
  if (samples < 1) {
    throw Error("monte_carlo_mgbm_makespan needs at least one sample");
  }
  const std::size_t n = instance.tasks();
  std::mt19937_64 rng(seed);
  long double sum = 0.0L, sum_sq = 0.0L;
  RandomScript script;
  script.values.resize(n);
  for (std::size_t k = 0; k < samples; ++k) {
    for (std::size_t j = 0; j < n; ++j) {
      script.values[j] = detail::draw_script_value(rng, params);
    }
    const Outcome out = allocate_mgbm_with_script(instance, script, partition);
    const double mk = makespan(instance, out.allocation);
    sum += mk;
    sum_sq += static_cast<long double>(mk) * mk;
  }
  const double mean = static_cast<double>(sum / samples);
  double std_error = 0.0;
  if (samples > 1) {
    const long double var =
        (sum_sq - sum * sum / samples) / (static_cast<long double>(samples) - 1);
    std_error = std::sqrt(std::max(0.0, static_cast<double>(var)) /
                          static_cast<double>(samples));
  }
  return McEstimate{mean, std_error};
}

/// Expected-makespan-to-optimum comparison for one instance.
struct RatioReport {
  double t_gbm;
  double t_opt;
  double ratio;
  Instance instance;
  Parameters params;
};

}  // namespace gbm
