#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "gbm/errors.hpp"

namespace gbm {

// Sentinel used only by the m-machine padding path. Never accepted from
// external input; extended-real order applies (min{p, +inf} = p).
inline constexpr double kInfiniteTime = std::numeric_limits<double>::infinity();

/// Mechanism parameters: thresholds alpha > beta >= 1 and bias 1 > r >= 1/2.
/// `bound_feasible` marks the region the closed-form bound certifier covers
/// (alpha <= 1 + 1/alpha and beta > 1); the mechanism itself runs anywhere
/// the ordering chain holds.
struct Parameters {
  double alpha;
  double beta;
  double r;
  bool bound_feasible;
};

inline Parameters validate_parameters(double alpha, double beta, double r) {
  if (!(std::isfinite(alpha) && std::isfinite(beta) && std::isfinite(r))) {
    throw OrderingViolation("parameters must be finite numbers");
  }
  if (!(beta >= 1.0)) {
    throw OrderingViolation("beta = " + std::to_string(beta) + " violates beta >= 1");
  }
  if (!(alpha > beta)) {
    throw OrderingViolation("alpha = " + std::to_string(alpha) +
                            " must exceed beta = " + std::to_string(beta));
  }
  if (!(r >= 0.5 && r < 1.0)) {
    throw OrderingViolation("r = " + std::to_string(r) + " violates 1/2 <= r < 1");
  }
  const bool feasible = alpha <= 1.0 + 1.0 / alpha && beta > 1.0;
  return Parameters{alpha, beta, r, feasible};
}

/// Run-time matrix: times[i][j] is the time of task j on machine i.
/// Rows are machines (m >= 1), columns are tasks (n >= 0). Immutable by
/// convention once built; share freely across threads.
struct Instance {
  std::vector<std::vector<double>> times;

  std::size_t machines() const { return times.size(); }
  std::size_t tasks() const { return times.empty() ? 0 : times.front().size(); }
};

/// Checks shape and positivity. Entries are copied, never mutated.
inline Instance validate_instance(const std::vector<std::vector<double>>& raw) {
  if (raw.empty()) {
    throw RaggedMatrix("instance needs at least one machine row");
  }
  const std::size_t n = raw.front().size();
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i].size() != n) {
      throw RaggedMatrix("machine " + std::to_string(i + 1) + " has " +
                         std::to_string(raw[i].size()) + " tasks, expected " +
                         std::to_string(n));
    }
    for (std::size_t j = 0; j < n; ++j) {
      const double t = raw[i][j];
      if (std::isnan(t) || std::isinf(t)) {
        throw NonFiniteEntry("entry (machine " + std::to_string(i + 1) + ", task " +
                             std::to_string(j + 1) + ") is not finite");
      }
      if (!(t > 0.0)) {
        throw NonPositiveEntry("entry (machine " + std::to_string(i + 1) + ", task " +
                               std::to_string(j + 1) + ") = " + std::to_string(t) +
                               "; run times must be strictly positive");
      }
    }
  }
  return Instance{raw};
}

/// Per-task multipliers drawn from {alpha, beta, 1/beta, 1/alpha}. Fixing a
/// script makes the two-machine mechanism deterministic.
struct RandomScript {
  std::vector<double> values;
};

/// One machine index per task, 1-based.
struct Allocation {
  std::vector<int> assign;

  friend bool operator==(const Allocation&, const Allocation&) = default;
};

struct Outcome {
  Allocation allocation;
  std::vector<double> payments;  // one per machine, zero for machines without tasks
};

enum class TaskKind { H, M, L };

/// Diagnostic category of a single task; the script-based mechanism is
/// authoritative at ratio boundaries.
struct TaskCategory {
  TaskKind kind;
  std::optional<int> efficient_machine;  // empty on exact ties
};

struct UtilityRecord {
  int agent;
  double valuation;  // minus the true load of assigned tasks
  double payment;
  double utility;    // valuation + payment
};

}  // namespace gbm
