#include <catch2/catch_amalgamated.hpp>

#include "test_util.hpp"

using namespace gbm;

TEST_CASE("validate_instance accepts well-formed matrices") {
  const Instance inst = validate_instance({{1.0}, {2.0}});
  CHECK(inst.machines() == 2);
  CHECK(inst.tasks() == 1);
  CHECK(inst.times[0][0] == 1.0);
  CHECK(inst.times[1][0] == 2.0);

  const Instance wide = validate_instance({{0.5, 3.0, 7.0}});
  CHECK(wide.machines() == 1);
  CHECK(wide.tasks() == 3);
}

TEST_CASE("validate_instance rejects bad entries") {
  CHECK_THROWS_AS(validate_instance({{1.0, 0.0}, {2.0, 3.0}}), NonPositiveEntry);
  CHECK_THROWS_AS(validate_instance({{1.0, -2.0}, {2.0, 3.0}}), NonPositiveEntry);
  CHECK_THROWS_AS(validate_instance({{1.0}, {kInfiniteTime}}), NonFiniteEntry);
  CHECK_THROWS_AS(validate_instance({{std::nan("")}, {1.0}}), NonFiniteEntry);
  CHECK_THROWS_AS(validate_instance({{1.0}, {2.0, 3.0}}), RaggedMatrix);
  CHECK_THROWS_AS(validate_instance({}), RaggedMatrix);
}

TEST_CASE("validate_instance error messages name the offending entry") {
  try {
    validate_instance({{1.0, 0.0}, {2.0, 3.0}});
    FAIL("expected NonPositiveEntry");
  } catch (const NonPositiveEntry& e) {
    CHECK(std::string(e.what()).find("machine 1") != std::string::npos);
    CHECK(std::string(e.what()).find("task 2") != std::string::npos);
  }
}

TEST_CASE("validate_instance is idempotent") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 50; ++t) {
    const Instance a = testutil::random_instance(rng, 2 + t % 3, 1 + t % 5);
    const Instance b = validate_instance(a.times);
    CHECK(a.times == b.times);
  }
}

TEST_CASE("validate_parameters computes the certifier flag") {
  const Parameters paper = validate_parameters(1.4844, 1.1854, 0.7932);
  CHECK(paper.bound_feasible);

  const Parameters nr = validate_parameters(4.0 / 3.0, 1.0, 0.5);
  CHECK_FALSE(nr.bound_feasible);  // beta == 1

  const Parameters wide = validate_parameters(1.7, 1.1, 0.6);
  CHECK_FALSE(wide.bound_feasible);  // 1.7 > 1 + 1/1.7
}

TEST_CASE("validate_parameters rejects ordering violations") {
  CHECK_THROWS_AS(validate_parameters(1.2, 1.3, 0.6), OrderingViolation);
  CHECK_THROWS_AS(validate_parameters(1.2, 1.2, 0.6), OrderingViolation);
  CHECK_THROWS_AS(validate_parameters(1.4, 0.9, 0.6), OrderingViolation);
  CHECK_THROWS_AS(validate_parameters(1.4, 1.1, 0.4), OrderingViolation);
  CHECK_THROWS_AS(validate_parameters(1.4, 1.1, 1.0), OrderingViolation);
  CHECK_THROWS_AS(validate_parameters(std::nan(""), 1.1, 0.6), OrderingViolation);
}

TEST_CASE("script probabilities are nonnegative and sum to exactly one") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ub(1.0001, 1.55);
  std::uniform_real_distribution<double> ur(0.5, 0.999);
  for (int t = 0; t < 200; ++t) {
    const double beta = ub(rng);
    std::uniform_real_distribution<double> ua(beta + 1e-6, 1.6);
    const Parameters p = validate_parameters(ua(rng), beta, ur(rng));
    const ScriptDistribution dist = script_distribution(p);
    double sum = 0.0;
    for (int k = 0; k < 4; ++k) {
      CHECK(dist.probabilities[k] >= 0.0);
      sum += dist.probabilities[k];
    }
    // 1-r and r-1/2 are exact for r in [1/2, 1], so the sum is exact too.
    CHECK(sum == 1.0);
  }
}

TEST_CASE("certifier feasibility is monotone in alpha") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    const double beta = 1.0001 + 0.4 * u(rng);
    const double alpha = beta + (1.6 - beta) * u(rng);
    const Parameters p = validate_parameters(alpha, beta, 0.6);
    if (!p.bound_feasible) continue;
    const double alpha2 = beta + (alpha - beta) * u(rng);
    if (alpha2 <= beta) continue;
    CHECK(validate_parameters(alpha2, beta, 0.6).bound_feasible);
  }
}
