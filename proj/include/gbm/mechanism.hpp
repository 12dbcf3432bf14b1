#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <utility>

#include "gbm/core.hpp"

namespace gbm {

/// Support {alpha, beta, 1/beta, 1/alpha} with probabilities
/// {1-r, r-1/2, r-1/2, 1-r}. Both 1-r and r-1/2 are exact in double
/// precision for r in [1/2, 1], so the probabilities sum to exactly 1.
struct ScriptDistribution {
  std::array<double, 4> support;
  std::array<double, 4> probabilities;
};

inline ScriptDistribution script_distribution(const Parameters& p) {
  return ScriptDistribution{
      {p.alpha, p.beta, 1.0 / p.beta, 1.0 / p.alpha},
      {1.0 - p.r, p.r - 0.5, p.r - 0.5, 1.0 - p.r},
  };
}

namespace detail {

// Canonical double in [0, 1) from one 64-bit draw; keeps seeded streams
// identical across platforms.
inline double canonical_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Cumulative thresholds 1-r, 1/2, r pick the script value for one task.
inline double draw_script_value(std::mt19937_64& rng, const Parameters& p) {
  const double u = canonical_unit(rng);
  if (u < 1.0 - p.r) return p.alpha;
  if (u < 0.5) return p.beta;
  if (u < p.r) return 1.0 / p.beta;
  return 1.0 / p.alpha;
}

}  // namespace detail

/// n independent draws from the script distribution; deterministic in
/// (params, n, seed).
inline RandomScript sample_script(const Parameters& params, std::size_t n,
                                  std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  RandomScript script;
  script.values.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    script.values.push_back(detail::draw_script_value(rng, params));
  }
  return script;
}

/// Two-machine allocation and payments for a fixed script. Task j goes to
/// machine 1 iff t1 < s_j * t2 (payment s_j * t2 to machine 1), otherwise
/// to machine 2 (payment t1 / s_j). Ties go to machine 2.
inline Outcome allocate_gbm2(const Instance& instance, const RandomScript& script) {
  if (instance.machines() != 2) {
    throw WrongMachineCount("gbm2 requires exactly 2 machines, got " +
                            std::to_string(instance.machines()));
  }
  const std::size_t n = instance.tasks();
  if (script.values.size() != n) {
    throw ScriptLengthMismatch("script has " + std::to_string(script.values.size()) +
                               " values for " + std::to_string(n) + " tasks");
  }
  Outcome out;
  out.allocation.assign.resize(n);
  out.payments.assign(2, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const double s = script.values[j];
    const double t1 = instance.times[0][j];
    const double t2 = instance.times[1][j];
    if (t1 < s * t2) {
      out.allocation.assign[j] = 1;
      out.payments[0] += s * t2;
    } else {
      out.allocation.assign[j] = 2;
      out.payments[1] += t1 / s;
    }
  }
  return out;
}

/// h-task iff max ratio > alpha, m-task iff in (beta, alpha], l-task
/// otherwise. Diagnostic view; boundaries belong to the lower category.
inline TaskCategory task_category(double t1, double t2, const Parameters& params) {
  const double ratio = t1 > t2 ? t1 / t2 : t2 / t1;
  TaskKind kind = TaskKind::L;
  if (ratio > params.alpha) {
    kind = TaskKind::H;
  } else if (ratio > params.beta) {
    kind = TaskKind::M;
  }
  std::optional<int> efficient;
  if (t1 < t2) {
    efficient = 1;
  } else if (t2 < t1) {
    efficient = 2;
  }
  return TaskCategory{kind, efficient};
}

/// Probability that the two-machine mechanism sends a task with times
/// (t1, t2) to machine 1. Uses the same threshold products s * t2 as the
/// allocation rule, so it matches the script distribution exactly,
/// boundaries included.
inline double allocation_probability(double t1, double t2, const Parameters& params) {
  if (t1 < (1.0 / params.alpha) * t2) return 1.0;
  if (t1 < (1.0 / params.beta) * t2) return params.r;
  if (t1 < params.beta * t2) return 0.5;
  if (t1 < params.alpha * t2) return 1.0 - params.r;
  return 0.0;
}

/// (4/3, 1, 1/2): the classical two-threshold baseline. The script support
/// degenerates to {4/3, 3/4} with equal probability.
inline Parameters nr_baseline_params() {
  return validate_parameters(4.0 / 3.0, 1.0, 0.5);
}

/// Machine partition for the m-machine wrapper, over the padded index
/// range 1..M. Halves must be disjoint, equally sized, and covering.
struct MgbmConfig {
  std::vector<int> s1;
  std::vector<int> s2;
  bool pad_used = false;
};

inline MgbmConfig default_mgbm_partition(std::size_t m) {
  MgbmConfig cfg;
  cfg.pad_used = (m % 2 != 0);
  const std::size_t padded = m + (cfg.pad_used ? 1 : 0);
  for (std::size_t i = 1; i <= padded / 2; ++i) cfg.s1.push_back(static_cast<int>(i));
  for (std::size_t i = padded / 2 + 1; i <= padded; ++i) cfg.s2.push_back(static_cast<int>(i));
  return cfg;
}

namespace detail {

inline void validate_mgbm_partition(const MgbmConfig& cfg, std::size_t m) {
  if (cfg.pad_used != (m % 2 != 0)) {
    throw ValidationError("pad_used must be set iff the machine count is odd");
  }
  const std::size_t padded = m + (cfg.pad_used ? 1 : 0);
  if (cfg.s1.size() != cfg.s2.size() || cfg.s1.size() + cfg.s2.size() != padded) {
    throw ValidationError("partition halves must be equal-size and cover all machines");
  }
  std::vector<bool> seen(padded, false);
  for (const auto* half : {&cfg.s1, &cfg.s2}) {
    for (int i : *half) {
      if (i < 1 || static_cast<std::size_t>(i) > padded) {
        throw ValidationError("partition index " + std::to_string(i) + " out of range");
      }
      if (seen[i - 1]) {
        throw ValidationError("partition index " + std::to_string(i) + " repeated");
      }
      seen[i - 1] = true;
    }
  }
}

// Time of task j on (possibly padded) machine index i.
inline double padded_time(const Instance& inst, int i, std::size_t j) {
  return static_cast<std::size_t>(i) <= inst.machines()
             ? inst.times[i - 1][j]
             : kInfiniteTime;
}

struct HalfMin {
  int argmin;
  double min;
  double second;  // +inf when the half has a single machine
};

inline HalfMin half_minima(const Instance& inst, const std::vector<int>& half,
                           std::size_t j) {
  HalfMin h{0, kInfiniteTime, kInfiniteTime};
  for (int i : half) {
    const double t = padded_time(inst, i, j);
    if (t < h.min || h.argmin == 0) {
      h.second = h.min;
      h.min = t;
      h.argmin = i;
    } else if (t < h.second) {
      h.second = t;
    }
  }
  return h;
}

}  // namespace detail

/// m-machine wrapper: per task, run the two-machine rule on the fastest
/// machine of each half; the winner's per-task payment is capped by the
/// second-fastest time in its own half.
inline Outcome allocate_mgbm_with_script(const Instance& instance,
                                         const RandomScript& script,
                                         const std::optional<MgbmConfig>& partition =
                                             std::nullopt) {
  const std::size_t m = instance.machines();
  if (m < 2) {
    throw WrongMachineCount("m-gbm requires at least 2 machines, got " +
                            std::to_string(m));
  }
  const std::size_t n = instance.tasks();
  if (script.values.size() != n) {
    throw ScriptLengthMismatch("script has " + std::to_string(script.values.size()) +
                               " values for " + std::to_string(n) + " tasks");
  }
  MgbmConfig cfg = partition ? *partition : default_mgbm_partition(m);
  detail::validate_mgbm_partition(cfg, m);
  // Lowest-index tie breaking for the argmins.
  std::sort(cfg.s1.begin(), cfg.s1.end());
  std::sort(cfg.s2.begin(), cfg.s2.end());

  Outcome out;
  out.allocation.assign.resize(n);
  out.payments.assign(m, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const auto a = detail::half_minima(instance, cfg.s1, j);
    const auto b = detail::half_minima(instance, cfg.s2, j);
    const double s = script.values[j];
    int winner;
    double raw_payment, cap;
    if (a.min < s * b.min) {
      winner = a.argmin;
      raw_payment = s * b.min;
      cap = a.second;
    } else {
      winner = b.argmin;
      raw_payment = a.min / s;
      cap = b.second;
    }
    out.allocation.assign[j] = winner;
    out.payments[winner - 1] += std::min(raw_payment, cap);
  }
  return out;
}

inline Outcome allocate_mgbm(const Instance& instance, const Parameters& params,
                             std::uint64_t seed,
                             const std::optional<MgbmConfig>& partition = std::nullopt) {
  return allocate_mgbm_with_script(instance,
                                   sample_script(params, instance.tasks(), seed),
                                   partition);
}

}  // namespace gbm
