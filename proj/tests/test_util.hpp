#pragma once

// Shared generators and independent oracles. The oracles here enumerate the
// raw 4^n script space, so they share no code path with the per-task
// probability factorization they are used to check.

#include <random>

#include "gbm/gbm.hpp"

namespace testutil {

inline gbm::Parameters paper_params() {
  return gbm::validate_parameters(1.4844, 1.1854, 0.7932);
}

inline double log_uniform(std::mt19937_64& rng, double lo = 1e-2, double hi = 1e2) {
  std::uniform_real_distribution<double> u(std::log10(lo), std::log10(hi));
  return std::pow(10.0, u(rng));
}

inline gbm::Instance random_instance(std::mt19937_64& rng, std::size_t m, std::size_t n) {
  gbm::Instance inst;
  inst.times.assign(m, std::vector<double>(n));
  for (auto& row : inst.times) {
    for (auto& v : row) v = log_uniform(rng);
  }
  return inst;
}

// Machine-1 probability by direct summation over the script support.
inline double script_space_allocation_probability(double t1, double t2,
                                                  const gbm::Parameters& p) {
  const auto dist = gbm::script_distribution(p);
  double total = 0.0;
  for (int k = 0; k < 4; ++k) {
    if (t1 < dist.support[k] * t2) total += dist.probabilities[k];
  }
  return total;
}

// Expected makespan by enumerating all 4^n scripts and running the
// allocation rule on each.
inline double script_space_expected_makespan(const gbm::Instance& inst,
                                             const gbm::Parameters& p) {
  const auto dist = gbm::script_distribution(p);
  const std::size_t n = inst.tasks();
  gbm::RandomScript script;
  script.values.resize(n);
  long double total = 0.0L;
  auto walk = [&](auto&& self, std::size_t j, long double prob) -> void {
    if (prob == 0.0L) return;
    if (j == n) {
      const gbm::Outcome out = gbm::allocate_gbm2(inst, script);
      total += prob * gbm::makespan(inst, out.allocation);
      return;
    }
    for (int k = 0; k < 4; ++k) {
      script.values[j] = dist.support[k];
      self(self, j + 1, prob * dist.probabilities[k]);
    }
  };
  walk(walk, 0, 1.0L);
  return static_cast<double>(total);
}

}  // namespace testutil
