#include <catch2/catch_amalgamated.hpp>

#include "test_util.hpp"

using namespace gbm;
using Catch::Matchers::WithinAbs;

namespace {
const Parameters kPaper = testutil::paper_params();
}

TEST_CASE("misreport_rows expands scales, tweaks, and custom rows") {
  DeviationSpec spec;
  spec.scale_factors = {0.5, 2.0};
  spec.per_task_offsets = {3.0};
  spec.custom_rows = {{7.0, 8.0}};
  const auto rows = misreport_rows(spec, {1.0, 2.0});
  REQUIRE(rows.size() == 5);
  CHECK(rows[0] == std::vector<double>{0.5, 1.0});
  CHECK(rows[1] == std::vector<double>{2.0, 4.0});
  CHECK(rows[2] == std::vector<double>{3.0, 2.0});
  CHECK(rows[3] == std::vector<double>{1.0, 6.0});
  CHECK(rows[4] == std::vector<double>{7.0, 8.0});
}

TEST_CASE("misreport_rows rejects non-positive or misshaped rows") {
  DeviationSpec bad_row;
  bad_row.custom_rows = {{1.0, 0.0}};
  CHECK_THROWS_AS(misreport_rows(bad_row, {1.0, 2.0}), ValidationError);

  DeviationSpec bad_len;
  bad_len.custom_rows = {{1.0}};
  CHECK_THROWS_AS(misreport_rows(bad_len, {1.0, 2.0}), ValidationError);

  DeviationSpec bad_scale;
  bad_scale.scale_factors = {-1.0};
  CHECK_THROWS_AS(misreport_rows(bad_scale, {1.0, 2.0}), ValidationError);
}

TEST_CASE("standard spec probes both sides of every threshold") {
  const Instance inst = validate_instance({{1.0}, {2.0}});
  const DeviationSpec spec = standard_deviation_spec(inst, kPaper);
  // 2 agents x 1 task x 4 thresholds x 2 sides
  CHECK(spec.custom_rows.size() == 16);
  // Agent 1 rows bracket alpha * t2: both offsets of 2 * 1.4844 appear.
  int bracketing = 0;
  for (const auto& row : spec.custom_rows) {
    if (std::abs(row[0] - 2.0 * 1.4844) < 1e-6) ++bracketing;
  }
  CHECK(bracketing == 2);
}

TEST_CASE("winning misreports keep the payment, losing ones forfeit the task") {
  const Instance inst = validate_instance({{1.0}, {2.0}});
  const RandomScript script{{1.4844}};

  DeviationSpec spec;
  spec.custom_rows = {{1.5}, {3.0}};
  const auto reports = check_universal_truthfulness(inst, script, spec);
  REQUIRE(reports.size() == 4);  // two agents x two rows

  // Agent 1 misreporting 1.5 still wins (1.5 < 2.9688); same payment, zero gain.
  CHECK(reports[0].agent == 1);
  CHECK(reports[0].misreport == std::vector<double>{1.5});
  CHECK(reports[0].gain == 0.0);

  // Agent 1 misreporting 3.0 loses the task and its positive utility.
  CHECK(reports[1].misreport == std::vector<double>{3.0});
  CHECK_THAT(reports[1].truthful_utility, WithinAbs(1.9688, 1e-12));
  CHECK(reports[1].deviant_utility == 0.0);
  CHECK_THAT(reports[1].gain, WithinAbs(-1.9688, 1e-12));
}

TEST_CASE("the winner's payment is identical across winning misreports") {
  std::mt19937_64 rng(91);
  int winning_checked = 0;
  for (int t = 0; t < 200; ++t) {
    const Instance inst = testutil::random_instance(rng, 2, 1);
    const RandomScript script = sample_script(kPaper, 1, rng());
    const Outcome truthful = allocate_gbm2(inst, script);
    for (double scale : {0.01, 0.3, 0.7, 0.95, 1.1, 3.0}) {
      Instance reported = inst;
      reported.times[0][0] *= scale;
      const Outcome deviant = allocate_gbm2(reported, script);
      if (truthful.allocation.assign[0] == 1 && deviant.allocation.assign[0] == 1) {
        CHECK(deviant.payments[0] == truthful.payments[0]);
        ++winning_checked;
      }
    }
  }
  CHECK(winning_checked > 100);
}

TEST_CASE("fixed-script harness reports no profitable deviation") {
  const TruthHarnessReport report = run_universal_harness(kPaper, 100, 2, 17);
  CHECK(report.positive_gains == 0);
  CHECK(report.max_gain <= 1e-9);
  CHECK(report.deviations_checked >= 100 * 2 * 50);
  // Truth-telling never went below zero utility on this harness.
  CHECK(report.min_truthful_utility >= -1e-9);
}

TEST_CASE("the baseline parameters are also deviation-proof") {
  const TruthHarnessReport report = run_universal_harness(nr_baseline_params(), 50, 2, 18);
  CHECK(report.positive_gains == 0);
}

TEST_CASE("expected-utility checks match the fixed-script view") {
  SECTION("deviations that cross no threshold change nothing") {
    const Instance inst = validate_instance({{1.0}, {1.0}});
    DeviationSpec spec;
    spec.custom_rows = {{1.05}};  // stays strictly inside (1/beta, beta)
    const auto reports = check_expected_truthfulness(inst, kPaper, spec);
    CHECK(reports[0].agent == 1);
    CHECK(reports[0].gain == 0.0);
  }
  SECTION("underbidding an equal-times task cannot profit") {
    const Instance inst = validate_instance({{1.0}, {1.0}});
    DeviationSpec spec;
    spec.custom_rows = {{0.5}};
    const auto reports = check_expected_truthfulness(inst, kPaper, spec);
    CHECK(reports[0].gain < 0.0);
    CHECK_THAT(reports[0].truthful_utility,
               WithinAbs((1.0 - 0.7932) * (1.4844 - 1.0) + (0.7932 - 0.5) * (1.1854 - 1.0),
                         1e-12));
  }
  SECTION("random specs show no expected gain either") {
    std::mt19937_64 rng(92);
    for (int t = 0; t < 60; ++t) {
      const Instance inst = testutil::random_instance(rng, 2, 1 + t % 5);
      const DeviationSpec spec = standard_deviation_spec(inst, kPaper);
      for (const auto& report : check_expected_truthfulness(inst, kPaper, spec)) {
        CHECK(report.gain <= 1e-9);
      }
    }
  }
}

TEST_CASE("expected-utility checks enforce the task cap") {
  Instance big;
  big.times.assign(2, std::vector<double>(21, 1.0));
  CHECK_THROWS_AS(check_expected_truthfulness(big, kPaper, DeviationSpec{}), TooLarge);
}

TEST_CASE("expected utilities average the per-script utilities") {
  // Universal truthfulness is per-script; averaging over the four script
  // values must reproduce the expected-utility computation.
  std::mt19937_64 rng(93);
  const auto dist = script_distribution(kPaper);
  for (int t = 0; t < 30; ++t) {
    const Instance inst = testutil::random_instance(rng, 2, 2);
    DeviationSpec spec;
    spec.scale_factors = {0.5, 1.5};
    const auto expected = check_expected_truthfulness(inst, kPaper, spec);
    for (const auto& report : expected) {
      long double truth_avg = 0.0L, dev_avg = 0.0L;
      // enumerate all 4^2 scripts
      for (int k0 = 0; k0 < 4; ++k0) {
        for (int k1 = 0; k1 < 4; ++k1) {
          const RandomScript script{{dist.support[k0], dist.support[k1]}};
          const long double p = static_cast<long double>(dist.probabilities[k0]) *
                                dist.probabilities[k1];
          const Outcome truthful = allocate_gbm2(inst, script);
          truth_avg += p * agent_utility(inst, inst.times, truthful, report.agent).utility;
          Instance reported = inst;
          reported.times[report.agent - 1] = report.misreport;
          const Outcome deviant = allocate_gbm2(reported, script);
          dev_avg += p * agent_utility(reported, inst.times, deviant, report.agent).utility;
        }
      }
      CHECK_THAT(report.truthful_utility,
                 WithinAbs(static_cast<double>(truth_avg), 1e-10));
      CHECK_THAT(report.deviant_utility, WithinAbs(static_cast<double>(dev_avg), 1e-10));
    }
  }
}
