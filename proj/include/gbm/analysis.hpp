#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "gbm/oracle.hpp"

namespace gbm {

/// The eight task magnitudes of the reduced worst-case family. Zero means
/// the task is absent. Together with Parameters the magnitudes induce a
/// 2 x k time matrix:
///   A:(a, aa)  B:(b, ab)  C:(c, ac)  D:(d, bd)
///   E:(be, e)  F:(af, f)  G:(g, bg)  H:(bh, h)    (a = alpha, b = beta)
struct ReducedInstance {
  double a = 0, b = 0, c = 0, d = 0, e = 0, f = 0, g = 0, h = 0;

  std::array<double, 8> magnitudes() const { return {a, b, c, d, e, f, g, h}; }
};

struct CoefficientVector {
  double c_a = 0, c_b = 0, c_c = 0, c_d = 0, c_e = 0, c_f = 0, c_g = 0, c_h = 0;

  std::array<double, 8> values() const { return {c_a, c_b, c_c, c_d, c_e, c_f, c_g, c_h}; }

  double weighted_sum(const ReducedInstance& red) const {
    const auto cs = values();
    const auto ms = red.magnitudes();
    long double s = 0.0L;
    for (int i = 0; i < 8; ++i) s += static_cast<long double>(cs[i]) * ms[i];
    return static_cast<double>(s);
  }
};

namespace detail {

struct ReducedTask {
  double unit1;  // time on machine 1 per unit of magnitude
  double unit2;
  double p1;     // machine-1 probability in the reduced family
};

// Limit probabilities of the reduced family: the two h-columns are
// deterministic, C/D keep the biased-toward-efficient probability r,
// E/F keep 1-r, and the l-columns stay at 1/2. The raw mechanism agrees
// with these on any matrix approaching the boundary ratios from inside
// the categories; see the limit-consistency tests.
inline std::array<ReducedTask, 8> reduced_tasks(const Parameters& p) {
  return {{
      {1.0, p.alpha, 1.0},        // A
      {1.0, p.alpha, 1.0},        // B
      {1.0, p.alpha, p.r},        // C
      {1.0, p.beta, p.r},         // D
      {p.beta, 1.0, 1.0 - p.r},   // E
      {p.alpha, 1.0, 1.0 - p.r},  // F
      {1.0, p.beta, 0.5},         // G
      {p.beta, 1.0, 0.5},         // H
  }};
}

}  // namespace detail

/// Induced 2 x k time matrix, dropping zero-magnitude tasks. Column order
/// follows A..H.
inline Instance reduced_to_instance(const ReducedInstance& red, const Parameters& params) {
  const auto tasks = detail::reduced_tasks(params);
  const auto mags = red.magnitudes();
  Instance inst;
  inst.times.assign(2, {});
  for (int k = 0; k < 8; ++k) {
    if (mags[k] == 0.0) continue;
    inst.times[0].push_back(tasks[k].unit1 * mags[k]);
    inst.times[1].push_back(tasks[k].unit2 * mags[k]);
  }
  return inst;
}

/// Makespan of the reduced family's reference allocation (A, C, E, G on
/// machine 1; the rest on machine 2). An upper bound on the true optimum.
inline double reduced_opt(const ReducedInstance& red, const Parameters& params) {
  const double load1 = red.a + red.c + params.beta * red.e + red.g;
  const double load2 = params.alpha * red.b + params.beta * red.d + red.f + red.h;
  return std::max(load1, load2);
}

/// Exact expected makespan of the reduced family under its limit
/// probabilities, by direct enumeration of the random columns.
inline double reduced_expected_makespan(const ReducedInstance& red, const Parameters& params) {
  const auto tasks = detail::reduced_tasks(params);
  const auto mags = red.magnitudes();
  long double total = 0.0L;
  auto walk = [&](auto&& self, int k, long double prob, double l1, double l2) -> void {
    if (prob == 0.0L) return;
    if (k == 8) {
      total += prob * std::max(l1, l2);
      return;
    }
    if (mags[k] == 0.0) {  // absent task: no contribution either way
      self(self, k + 1, prob, l1, l2);
      return;
    }
    self(self, k + 1, prob * tasks[k].p1, l1 + tasks[k].unit1 * mags[k], l2);
    self(self, k + 1, prob * (1.0 - tasks[k].p1), l1, l2 + tasks[k].unit2 * mags[k]);
  };
  walk(walk, 0, 1.0L, 0.0, 0.0);
  return static_cast<double>(total);
}

/// Exact makespan coefficients of the reduced family:
/// C_x = unit1 * Pr(M=1, X=1) + unit2 * Pr(M=2, X=2), so that
/// sum C_x * x equals the reduced expected makespan.
inline CoefficientVector coefficient_vector(const ReducedInstance& red, const Parameters& params) {
  const auto tasks = detail::reduced_tasks(params);
  const auto mags = red.magnitudes();
  std::array<long double, 8> pm1{};  // Pr(M=1, X=1)
  std::array<long double, 8> pm2{};  // Pr(M=2, X=2)
  std::array<int, 8> placement{};

  auto walk = [&](auto&& self, int k, long double prob, double l1, double l2) -> void {
    if (prob == 0.0L) return;
    if (k == 8) {
      const int last = l1 >= l2 ? 1 : 2;
      for (int t = 0; t < 8; ++t) {
        if (last == 1 && placement[t] == 1) pm1[t] += prob;
        if (last == 2 && placement[t] == 2) pm2[t] += prob;
      }
      return;
    }
    placement[k] = 1;
    self(self, k + 1, prob * tasks[k].p1, l1 + tasks[k].unit1 * mags[k], l2);
    placement[k] = 2;
    self(self, k + 1, prob * (1.0 - tasks[k].p1), l1, l2 + tasks[k].unit2 * mags[k]);
  };
  walk(walk, 0, 1.0L, 0.0, 0.0);

  std::array<double, 8> c{};
  for (int t = 0; t < 8; ++t) {
    c[t] = tasks[t].unit1 * static_cast<double>(pm1[t]) +
           tasks[t].unit2 * static_cast<double>(pm2[t]);
  }
  return CoefficientVector{c[0], c[1], c[2], c[3], c[4], c[5], c[6], c[7]};
}

/// The nine closed-form ceilings on pairwise coefficient sums, their
/// maximum, and which of them attain it (within kBindingTolerance).
struct BoundReport {
  std::array<double, 9> bounds;  // B1..B9
  double max_bound;
  std::vector<int> binding;  // 1-based indices within tolerance of the max
  bool feasible;
};

inline constexpr double kBindingTolerance = 1e-4;

namespace detail {

inline bool certifier_feasible(const Parameters& p) {
  return p.bound_feasible;  // alpha <= 1 + 1/alpha and beta > 1
}

inline std::array<double, 9> nine_bounds(const Parameters& p) {
  const double a = p.alpha, b = p.beta, r = p.r;
  return {
      1.0 + 1.0 / a,                                      // B1
      2.0 * r + a - r * r - a * r * r,                    // B2
      1.0 + r / b,                                        // B3
      1.0 + (1.0 - r) * a,                                // B4
      1.0 + b / 2.0,                                      // B5
      r * r / b + 1.0 + r * r + a - r - a * r,            // B6
      0.5 + r / 2.0 + a - a * r + b * r / 2.0,            // B7
      1.0 + r / (2.0 * b) + b / 2.0 - r / 2.0,            // B8
      0.75 + 0.75 * b,                                    // B9
  };
}

}  // namespace detail

inline BoundReport bounds_eval(const Parameters& params) {
  if (!detail::certifier_feasible(params)) {
    throw InfeasibleParameters(
        "bound certifier needs alpha <= 1 + 1/alpha and beta > 1; got alpha = " +
        std::to_string(params.alpha) + ", beta = " + std::to_string(params.beta));
  }
  BoundReport report;
  report.bounds = detail::nine_bounds(params);
  report.max_bound = *std::max_element(report.bounds.begin(), report.bounds.end());
  for (int i = 0; i < 9; ++i) {
    if (report.bounds[i] >= report.max_bound - kBindingTolerance) {
      report.binding.push_back(i + 1);
    }
  }
  report.feasible = true;
  return report;
}

/// Closed-form ceiling for each of the 16 sums between
/// {C_a, C_c, C_e/beta, C_g} (rows) and {C_b/alpha, C_d/beta, C_f, C_h}
/// (columns).
inline std::array<std::array<double, 4>, 4> pairwise_bound_table(const Parameters& p) {
  const double a = p.alpha, b = p.beta, r = p.r;
  const double b1 = 1.0 + 1.0 / a;
  const double b2 = 2.0 * r + a - r * r - a * r * r;
  const double b6 = r * r / b + 1.0 + r * r + a - r - a * r;
  const double b7 = 0.5 + r / 2.0 + a - a * r + b * r / 2.0;
  const double b8 = 1.0 + r / (2.0 * b) + b / 2.0 - r / 2.0;
  const double ed = (1.0 - r) + r / b + (1.0 + 1.0 / b) * r * (1.0 - r);
  return {{
      // vs C_b/alpha, C_d/beta, C_f, C_h
      {b1, 1.0 + r / b, 1.0 + (1.0 - r) * a, 1.0 + b / 2.0},  // C_a
      {b1, b6, b2, b7},                                       // C_c
      {b1, ed, b6, b8},                                       // C_e/beta
      {b1, b8, b7, 0.75 + 0.75 * b},                          // C_g
  }};
}

/// Uniformly random reduced instance: magnitudes log-uniform on
/// [1e-2, 1e2], absent with probability 0.2 each.
inline ReducedInstance random_reduced_instance(std::mt19937_64& rng) {
  std::array<double, 8> m{};
  for (auto& x : m) {
    if (detail::canonical_unit(rng) < 0.2) {
      x = 0.0;
    } else {
      x = std::pow(10.0, -2.0 + 4.0 * detail::canonical_unit(rng));
    }
  }
  return ReducedInstance{m[0], m[1], m[2], m[3], m[4], m[5], m[6], m[7]};
}

struct PairwiseViolation {
  std::uint64_t trial;
  int row;  // 0..3 into {C_a, C_c, C_e/beta, C_g}
  int col;  // 0..3 into {C_b/alpha, C_d/beta, C_f, C_h}
  double sum;
  double bound;
};

struct PairwiseReport {
  std::uint64_t trials;
  std::vector<PairwiseViolation> violations;
  double max_excess;  // largest sum - bound seen (negative when all hold)
};

/// Checks the 16 pairwise coefficient sums against their closed forms on
/// random reduced instances, using exact enumeration per trial.
inline PairwiseReport verify_pairwise_bounds(const Parameters& params,
                                             std::uint64_t trials, std::uint64_t seed,
                                             double tolerance = 1e-9) {
  if (!detail::certifier_feasible(params)) {
    throw InfeasibleParameters("verify_pairwise_bounds needs a certifiable parameter triple");
  }
  const auto table = pairwise_bound_table(params);
  std::mt19937_64 rng(seed);
  PairwiseReport report{trials, {}, -kInfiniteTime};
  for (std::uint64_t t = 0; t < trials; ++t) {
    const ReducedInstance red = random_reduced_instance(rng);
    const auto c = coefficient_vector(red, params).values();
    const std::array<double, 4> rows = {c[0], c[2], c[4] / params.beta, c[6]};
    const std::array<double, 4> cols = {c[1] / params.alpha, c[3] / params.beta, c[5], c[7]};
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        const double sum = rows[i] + cols[j];
        report.max_excess = std::max(report.max_excess, sum - table[i][j]);
        if (sum > table[i][j] + tolerance) {
          report.violations.push_back(PairwiseViolation{t, i, j, sum, table[i][j]});
        }
      }
    }
  }
  return report;
}

/// Search box and schedule for the minimax parameter tuner.
struct GridSpec {
  double alpha_min = 1.0, alpha_max = 1.62;
  double beta_min = 1.0, beta_max = 1.62;
  double r_min = 0.5, r_max = 0.995;
  double step = 0.01;
  int refine_passes = 2;   // each pass shrinks the step tenfold
  int incumbents = 24;     // coarse cells kept for refinement
  double window = 2.0;     // refinement half-width in units of the prior step
};

struct TuneResult {
  Parameters params;
  double objective;
  std::uint64_t evaluations;
};

namespace detail {

inline bool tune_feasible(double a, double b, double r) {
  return b > 1.0 && b < a && a <= 1.0 + 1.0 / a && r >= 0.5 && r < 1.0;
}

struct TunePoint {
  double value;
  double a, b, r;
};

template <typename Visit>
inline void scan_grid(double alo, double ahi, double blo, double bhi, double rlo,
                      double rhi, double step, Visit&& visit) {
  for (int ia = 0;; ++ia) {
    const double a = alo + ia * step;
    if (a > ahi + step * 1e-9) break;
    for (int ib = 0;; ++ib) {
      const double b = blo + ib * step;
      if (b > bhi + step * 1e-9) break;
      for (int ir = 0;; ++ir) {
        const double r = rlo + ir * step;
        if (r > rhi + step * 1e-9) break;
        visit(a, b, r);
      }
    }
  }
}

}  // namespace detail

/// Minimizes the maximum of the nine bounds over the certifiable region by
/// a coarse grid followed by tenfold refinement passes around the best
/// coarse cells. The minimax surface has flat tie valleys, so several
/// incumbents are refined rather than one. Deterministic.
inline TuneResult optimize_params(const GridSpec& spec = GridSpec{}) {
  std::uint64_t evaluations = 0;
  auto value_at = [&](double a, double b, double r) {
    ++evaluations;
    const auto bs = detail::nine_bounds(Parameters{a, b, r, true});
    return *std::max_element(bs.begin(), bs.end());
  };

  std::vector<detail::TunePoint> coarse;
  detail::scan_grid(spec.alpha_min, spec.alpha_max, spec.beta_min, spec.beta_max,
                    spec.r_min, spec.r_max, spec.step, [&](double a, double b, double r) {
                      if (!detail::tune_feasible(a, b, r)) return;
                      coarse.push_back({value_at(a, b, r), a, b, r});
                    });
  if (coarse.empty()) {
    throw EmptyFeasibleRegion("no certifiable point inside the supplied grid box");
  }
  std::stable_sort(coarse.begin(), coarse.end(),
                   [](const auto& x, const auto& y) { return x.value < y.value; });
  const std::size_t keep = std::min<std::size_t>(
      coarse.size(), static_cast<std::size_t>(std::max(1, spec.incumbents)));

  detail::TunePoint best = coarse.front();
  for (std::size_t k = 0; k < keep; ++k) {
    detail::TunePoint cur = coarse[k];
    double step = spec.step;
    for (int pass = 0; pass < spec.refine_passes; ++pass) {
      const double w = spec.window * step;
      step /= 10.0;
      detail::TunePoint local = cur;
      // Windows stay inside the caller's box so pinned coordinates stay pinned.
      detail::scan_grid(std::max(spec.alpha_min, cur.a - w),
                        std::min(spec.alpha_max, cur.a + w),
                        std::max(spec.beta_min, cur.b - w),
                        std::min(spec.beta_max, cur.b + w),
                        std::max(spec.r_min, cur.r - w),
                        std::min(spec.r_max, cur.r + w), step,
                        [&](double a, double b, double r) {
                          if (!detail::tune_feasible(a, b, r)) return;
                          const double v = value_at(a, b, r);
                          if (v < local.value) local = {v, a, b, r};
                        });
      cur = local;
    }
    if (cur.value < best.value) best = cur;
  }
  return TuneResult{validate_parameters(best.a, best.b, best.r), best.value, evaluations};
}

/// Two near-boundary tasks, both slightly past the upper threshold so the
/// mechanism keeps them together on machine 1 while the optimum splits
/// them. The ratio approaches 1 + 1/alpha as eps -> 0.
inline Instance worst_case_witness(const Parameters& params, double eps = 1e-6) {
  const double a = params.alpha;
  return Instance{{{a, 1.0}, {a * (a + eps), a + eps}}};
}

/// Ceiling the worst found ratio is checked against: the full certificate
/// when available, otherwise the h-task bound 1 + 1/alpha alone (the
/// certifier's closed forms need beta > 1).
inline double ratio_ceiling(const Parameters& params) {
  if (detail::certifier_feasible(params)) return bounds_eval(params).max_bound;
  return 1.0 + 1.0 / params.alpha;
}

namespace detail {

inline Instance random_two_machine_instance(std::mt19937_64& rng, std::size_t max_tasks) {
  const std::size_t n = 1 + static_cast<std::size_t>(canonical_unit(rng) *
                                                     static_cast<double>(max_tasks));
  Instance inst;
  inst.times.assign(2, std::vector<double>(n));
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      inst.times[i][j] = std::pow(10.0, -2.0 + 4.0 * canonical_unit(rng));
    }
  }
  return inst;
}

}  // namespace detail

/// Randomized worst-ratio search: deterministic witnesses, random general
/// and reduced-family instances, then multiplicative coordinate ascent on
/// the incumbent. Falsification only; never a proof.
inline RatioReport ratio_search(const Parameters& params, std::uint64_t trials,
                                std::uint64_t seed) {
  if (trials < 1) throw Error("ratio_search needs at least one trial");
  RatioReport worst{0.0, 0.0, 0.0, Instance{}, params};

  auto consider = [&](const Instance& inst) {
    if (inst.tasks() == 0 || inst.tasks() > 10) return;
    const double t_opt = opt_makespan(inst).value;
    if (!(t_opt > 0.0)) return;
    const double t_gbm = exact_expected_makespan(inst, params);
    const double ratio = t_gbm / t_opt;
    if (ratio > worst.ratio) worst = RatioReport{t_gbm, t_opt, ratio, inst, params};
  };

  consider(worst_case_witness(params));
  consider(Instance{{{1.0, 1.0}, {1.0, 1.0}}});
  consider(Instance{{{1.0}, {2.0}}});

  std::mt19937_64 rng(seed);
  for (std::uint64_t t = 0; t < trials; ++t) {
    if (t % 2 == 0) {
      consider(detail::random_two_machine_instance(rng, 10));
    } else {
      consider(reduced_to_instance(random_reduced_instance(rng), params));
    }
  }

  // Coordinate ascent: rescale single entries of the incumbent.
  static constexpr std::array<double, 8> kFactors = {0.5,      0.98,     0.999,
                                                     0.999999, 1.000001, 1.001,
                                                     1.02,     2.0};
  for (int pass = 0; pass < 24; ++pass) {
    const double before = worst.ratio;
    const Instance base = worst.instance;
    for (std::size_t i = 0; i < base.machines(); ++i) {
      for (std::size_t j = 0; j < base.tasks(); ++j) {
        for (const double f : kFactors) {
          Instance cand = base;
          cand.times[i][j] *= f;
          consider(cand);
        }
      }
    }
    if (!(worst.ratio > before)) break;
  }
  return worst;
}

/// Replaces two equal-ratio tasks (0-based indices) with one task of
/// summed times. The merged column sits at the smaller index.
inline Instance merge_tasks(const Instance& instance, std::size_t j1, std::size_t j2) {
  detail::require_two_machines(instance, "merge_tasks");
  const std::size_t n = instance.tasks();
  if (j1 >= n || j2 >= n || j1 == j2) {
    throw Error("merge_tasks needs two distinct task indices below " + std::to_string(n));
  }
  const double r1 = instance.times[0][j1] / instance.times[1][j1];
  const double r2 = instance.times[0][j2] / instance.times[1][j2];
  if (std::abs(r1 - r2) > 1e-12 * std::max(std::abs(r1), std::abs(r2))) {
    throw RatioMismatch("task ratios " + std::to_string(r1) + " and " +
                        std::to_string(r2) + " differ beyond 1e-12 relative");
  }
  const std::size_t lo = std::min(j1, j2), hi = std::max(j1, j2);
  Instance merged = instance;
  for (std::size_t i = 0; i < 2; ++i) {
    merged.times[i][lo] = instance.times[i][j1] + instance.times[i][j2];
    merged.times[i].erase(merged.times[i].begin() + static_cast<std::ptrdiff_t>(hi));
  }
  return merged;
}

/// A two-machine instance whose first two tasks share their time ratio
/// exactly, plus up to three unrelated context tasks.
struct MergePairSample {
  Instance instance;
  std::size_t j1 = 0;
  std::size_t j2 = 1;
  TaskKind kind;
};

inline MergePairSample random_equal_ratio_pair(const Parameters& params,
                                               std::mt19937_64& rng) {
  const double pick = detail::canonical_unit(rng);
  TaskKind kind;
  double ratio;
  if (pick < 1.0 / 3.0) {
    kind = TaskKind::H;
    ratio = params.alpha * (1.01 + 2.0 * detail::canonical_unit(rng));
  } else if (pick < 2.0 / 3.0) {
    kind = TaskKind::M;
    ratio = params.beta +
            (params.alpha - params.beta) * (0.05 + 0.9 * detail::canonical_unit(rng));
  } else {
    kind = TaskKind::L;
    ratio = 1.0 + (params.beta - 1.0) * 0.95 * detail::canonical_unit(rng);
  }
  const bool machine1_efficient = detail::canonical_unit(rng) < 0.5;
  auto magnitude = [&] { return std::pow(10.0, -2.0 + 4.0 * detail::canonical_unit(rng)); };

  Instance inst;
  inst.times.assign(2, {});
  for (int k = 0; k < 2; ++k) {
    const double x = magnitude();
    const double fast = x, slow = ratio * x;
    inst.times[0].push_back(machine1_efficient ? fast : slow);
    inst.times[1].push_back(machine1_efficient ? slow : fast);
  }
  const int context = static_cast<int>(detail::canonical_unit(rng) * 4.0);
  for (int k = 0; k < context; ++k) {
    inst.times[0].push_back(magnitude());
    inst.times[1].push_back(magnitude());
  }
  return MergePairSample{std::move(inst), 0, 1, kind};
}

struct MergeReport {
  double split_expectation;
  double merged_expectation;
  double split_opt;
  double merged_opt;
  bool expectation_monotone;  // merged >= split - 1e-9
  bool opt_monotone;          // merged >= split - 1e-9
};

/// Merging an equal-ratio pair must not decrease the expected makespan or
/// the optimum.
inline MergeReport check_merge_monotonicity(const Instance& instance, std::size_t j1,
                                            std::size_t j2, const Parameters& params) {
  detail::require_task_cap(instance, 20, "check_merge_monotonicity");
  const Instance merged = merge_tasks(instance, j1, j2);
  MergeReport report{};
  report.split_expectation = exact_expected_makespan(instance, params);
  report.merged_expectation = exact_expected_makespan(merged, params);
  report.split_opt = opt_makespan(instance).value;
  report.merged_opt = opt_makespan(merged).value;
  report.expectation_monotone =
      report.merged_expectation >= report.split_expectation - 1e-9;
  report.opt_monotone = report.merged_opt >= report.split_opt - 1e-9;
  return report;
}

}  // namespace gbm
