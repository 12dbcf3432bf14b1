#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "gbm/oracle.hpp"

namespace gbm {

/// Misreport generator for one agent's row: whole-row scalings, single-entry
/// multiplicative tweaks, and explicit rows. Every produced row must be
/// strictly positive.
struct DeviationSpec {
  std::vector<double> scale_factors;
  std::vector<double> per_task_offsets;
  std::vector<std::vector<double>> custom_rows;
};

struct DeviationReport {
  int agent;
  std::vector<double> misreport;
  double truthful_utility;
  double deviant_utility;
  double gain;  // deviant - truthful
};

namespace detail {

inline void check_misreport_row(const std::vector<double>& row, std::size_t n) {
  if (row.size() != n) {
    throw ValidationError("misreport row has " + std::to_string(row.size()) +
                          " entries, expected " + std::to_string(n));
  }
  for (double v : row) {
    if (!(v > 0.0) || std::isinf(v)) {
      throw ValidationError("misreports must be strictly positive and finite");
    }
  }
}

}  // namespace detail

/// Materializes all misreport rows of a spec for one true row.
inline std::vector<std::vector<double>> misreport_rows(const DeviationSpec& spec,
                                                       const std::vector<double>& truth) {
  std::vector<std::vector<double>> rows;
  for (double scale : spec.scale_factors) {
    std::vector<double> row = truth;
    for (double& v : row) v *= scale;
    rows.push_back(std::move(row));
  }
  for (double factor : spec.per_task_offsets) {
    for (std::size_t j = 0; j < truth.size(); ++j) {
      std::vector<double> row = truth;
      row[j] *= factor;
      rows.push_back(std::move(row));
    }
  }
  for (const auto& row : spec.custom_rows) rows.push_back(row);
  for (const auto& row : rows) detail::check_misreport_row(row, truth.size());
  return rows;
}

/// Standard probe set: a scale ladder, per-entry tweaks, and rows landing
/// just above and below every opponent-derived threshold
/// {alpha, beta, 1/beta, 1/alpha} * t_opp (relative offset 1e-9).
inline DeviationSpec standard_deviation_spec(const Instance& instance,
                                             const Parameters& params) {
  DeviationSpec spec;
  spec.scale_factors = {0.1, 0.25, 0.5, 0.8, 0.95, 1.05, 1.25, 2.0, 4.0, 10.0};
  spec.per_task_offsets = {0.5, 0.9, 1.1, 2.0};
  const std::array<double, 4> thresholds = {params.alpha, params.beta,
                                            1.0 / params.beta, 1.0 / params.alpha};
  for (int agent = 1; agent <= 2; ++agent) {
    const auto& own = instance.times[agent - 1];
    const auto& opp = instance.times[2 - agent];
    for (std::size_t j = 0; j < instance.tasks(); ++j) {
      for (double thr : thresholds) {
        for (double side : {1.0 - 1e-9, 1.0 + 1e-9}) {
          std::vector<double> row = own;
          row[j] = thr * opp[j] * side;
          spec.custom_rows.push_back(std::move(row));
        }
      }
    }
  }
  return spec;
}

/// Fixed-script deviation check: rerun the allocation on each misreported
/// matrix and score utilities against true times. A passing run has every
/// gain <= 1e-9.
inline std::vector<DeviationReport> check_universal_truthfulness(
    const Instance& instance, const RandomScript& script, const DeviationSpec& spec) {
  detail::require_two_machines(instance, "check_universal_truthfulness");
  std::vector<DeviationReport> reports;
  const Outcome truthful = allocate_gbm2(instance, script);
  for (int agent = 1; agent <= 2; ++agent) {
    const double u_truth =
        agent_utility(instance, instance.times, truthful, agent).utility;
    for (auto& row : misreport_rows(spec, instance.times[agent - 1])) {
      Instance reported = instance;
      reported.times[agent - 1] = row;
      const Outcome deviant = allocate_gbm2(reported, script);
      const double u_dev =
          agent_utility(reported, instance.times, deviant, agent).utility;
      reports.push_back(DeviationReport{agent, std::move(row), u_truth, u_dev,
                                        u_dev - u_truth});
    }
  }
  return reports;
}

namespace detail {

// Expected utility of one agent under the script distribution, exact:
// per-task allocation and payment depend only on that task's script value,
// so the expectation sums task-wise over the four values.
inline double expected_utility(const Instance& truth, int agent,
                               const std::vector<double>& reported_row,
                               const Parameters& params) {
  const ScriptDistribution dist = script_distribution(params);
  long double total = 0.0L;
  for (std::size_t j = 0; j < truth.tasks(); ++j) {
    for (int k = 0; k < 4; ++k) {
      const double s = dist.support[k];
      const double p = dist.probabilities[k];
      if (agent == 1) {
        const double t2 = truth.times[1][j];
        if (reported_row[j] < s * t2) {
          total += static_cast<long double>(p) * (s * t2 - truth.times[0][j]);
        }
      } else {
        const double t1 = truth.times[0][j];
        if (!(t1 < s * reported_row[j])) {
          total += static_cast<long double>(p) * (t1 / s - truth.times[1][j]);
        }
      }
    }
  }
  return static_cast<double>(total);
}

}  // namespace detail

/// Deviation check in expectation over the script distribution (exact,
/// task-factorized; n <= 20).
inline std::vector<DeviationReport> check_expected_truthfulness(
    const Instance& instance, const Parameters& params, const DeviationSpec& spec) {
  detail::require_two_machines(instance, "check_expected_truthfulness");
  detail::require_task_cap(instance, 20, "check_expected_truthfulness");
  std::vector<DeviationReport> reports;
  for (int agent = 1; agent <= 2; ++agent) {
    const double u_truth =
        detail::expected_utility(instance, agent, instance.times[agent - 1], params);
    for (auto& row : misreport_rows(spec, instance.times[agent - 1])) {
      const double u_dev = detail::expected_utility(instance, agent, row, params);
      reports.push_back(DeviationReport{agent, std::move(row), u_truth, u_dev,
                                        u_dev - u_truth});
    }
  }
  return reports;
}

struct TruthHarnessReport {
  std::uint64_t instances;
  std::uint64_t scripts_per_instance;
  std::uint64_t deviations_checked;
  std::uint64_t positive_gains;  // gains above the tolerance
  double max_gain;
  double min_truthful_utility;
};

/// Randomized fixed-script harness: random instances, several script draws
/// each, the standard deviation spec for both agents.
inline TruthHarnessReport run_universal_harness(const Parameters& params,
                                                std::uint64_t instances,
                                                std::uint64_t scripts_per_instance,
                                                std::uint64_t seed,
                                                double tolerance = 1e-9) {
  std::mt19937_64 rng(seed);
  TruthHarnessReport report{instances, scripts_per_instance, 0, 0,
                            -kInfiniteTime, kInfiniteTime};
  for (std::uint64_t t = 0; t < instances; ++t) {
    const std::size_t n =
        2 + static_cast<std::size_t>(detail::canonical_unit(rng) * 5.0);
    Instance inst;
    inst.times.assign(2, std::vector<double>(n));
    for (auto& row : inst.times) {
      for (auto& v : row) v = std::pow(10.0, -2.0 + 4.0 * detail::canonical_unit(rng));
    }
    const DeviationSpec spec = standard_deviation_spec(inst, params);
    for (std::uint64_t k = 0; k < scripts_per_instance; ++k) {
      RandomScript script;
      script.values.resize(n);
      for (auto& s : script.values) s = detail::draw_script_value(rng, params);
      const Outcome truthful = allocate_gbm2(inst, script);
      for (int agent = 1; agent <= 2; ++agent) {
        report.min_truthful_utility =
            std::min(report.min_truthful_utility,
                     agent_utility(inst, inst.times, truthful, agent).utility);
      }
      for (const auto& dev : check_universal_truthfulness(inst, script, spec)) {
        ++report.deviations_checked;
        report.max_gain = std::max(report.max_gain, dev.gain);
        if (dev.gain > tolerance) ++report.positive_gains;
      }
    }
  }
  return report;
}

}  // namespace gbm
