// Command-line front end: run the mechanism, measure ratios, certify
// bounds, tune parameters, and drive the verification harnesses.

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "gbm/gbm.hpp"

namespace {

struct CommonOpts {
  std::string preset = "paper";
  double alpha = 0.0, beta = 0.0, r = 0.0;
  bool has_alpha = false, has_beta = false, has_r = false;
  std::uint64_t seed = 0;
  std::string format = "json";
  std::string out;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--preset", opts.preset, "Parameter preset: paper or nisan-ronen")
      ->check(CLI::IsMember({"paper", "nisan-ronen"}));
  cmd->add_option("--alpha", opts.alpha, "Threshold alpha (> beta)")
      ->each([&](const std::string&) { opts.has_alpha = true; });
  cmd->add_option("--beta", opts.beta, "Threshold beta (>= 1)")
      ->each([&](const std::string&) { opts.has_beta = true; });
  cmd->add_option("--r", opts.r, "Bias probability in [1/2, 1)")
      ->each([&](const std::string&) { opts.has_r = true; });
  cmd->add_option("--seed", opts.seed, "Random seed (default 0)");
  cmd->add_option("--format", opts.format, "Output format")
      ->check(CLI::IsMember({"json", "table"}));
  cmd->add_option("--out", opts.out, "Write the report to this path instead of stdout");
}

gbm::Parameters resolve_parameters(const CommonOpts& opts) {
  const bool any = opts.has_alpha || opts.has_beta || opts.has_r;
  if (any) {
    if (!(opts.has_alpha && opts.has_beta && opts.has_r)) {
      throw gbm::ValidationError("--alpha, --beta and --r must be given together");
    }
    return gbm::validate_parameters(opts.alpha, opts.beta, opts.r);
  }
  return gbm::preset_parameters(opts.preset);
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

void render_table(const gbm::Json& doc, std::ostream& os, int indent = 0) {
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  auto scalar = [](const gbm::Json& v) -> std::string {
    if (v.is_number_float()) return format_number(v.get<double>());
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
  };
  for (const auto& [key, value] : doc.items()) {
    if (value.is_object()) {
      os << pad << key << ":\n";
      render_table(value, os, indent + 2);
    } else if (value.is_array() && !value.empty() && value.front().is_array()) {
      os << pad << key << ":\n";
      for (const auto& row : value) {
        os << pad << "  [";
        for (std::size_t j = 0; j < row.size(); ++j) {
          os << (j ? ", " : "") << scalar(row[j]);
        }
        os << "]\n";
      }
    } else if (value.is_array()) {
      os << pad << key << ": [";
      for (std::size_t j = 0; j < value.size(); ++j) {
        os << (j ? ", " : "") << scalar(value[j]);
      }
      os << "]\n";
    } else {
      os << pad << key << ": " << scalar(value) << "\n";
    }
  }
}

void emit(const gbm::Json& doc, const CommonOpts& opts) {
  std::ostringstream buf;
  if (opts.format == "table") {
    render_table(doc, buf);
  } else {
    buf << doc.dump(2) << "\n";
  }
  if (opts.out.empty()) {
    std::cout << buf.str();
  } else {
    std::ofstream file(opts.out);
    if (!file) throw gbm::Error("cannot write to " + opts.out);
    file << buf.str();
  }
}

gbm::Json params_json(const gbm::Parameters& p) {
  gbm::Json j = gbm::parameters_to_json(p);
  j["bound_feasible"] = p.bound_feasible;
  return j;
}

int cmd_run(const CommonOpts& opts, const std::string& instance_path) {
  const gbm::Instance inst = gbm::load_instance(instance_path);
  const gbm::Parameters params = resolve_parameters(opts);
  gbm::Json doc;
  doc["command"] = "run";
  doc["machines"] = inst.machines();
  doc["tasks"] = inst.tasks();
  doc["parameters"] = params_json(params);
  doc["seed"] = opts.seed;

  gbm::Outcome outcome;
  if (inst.machines() == 2) {
    const gbm::RandomScript script = gbm::sample_script(params, inst.tasks(), opts.seed);
    outcome = gbm::allocate_gbm2(inst, script);
    doc["mechanism"] = "gbm2";
    doc["script"] = script.values;
  } else {
    const gbm::MgbmConfig cfg = gbm::default_mgbm_partition(inst.machines());
    outcome = gbm::allocate_mgbm(inst, params, opts.seed, cfg);
    doc["mechanism"] = "m-gbm";
    doc["pad_used"] = cfg.pad_used;
    gbm::Json part;
    part["s1"] = cfg.s1;
    part["s2"] = cfg.s2;
    doc["partition"] = part;
  }
  doc["allocation"] = outcome.allocation.assign;
  doc["loads"] = gbm::machine_loads(inst, outcome.allocation);
  doc["makespan"] = gbm::makespan(inst, outcome.allocation);
  doc["payments"] = outcome.payments;
  emit(doc, opts);
  return 0;
}

int cmd_ratio(const CommonOpts& opts, const std::string& instance_path,
              std::uint64_t samples) {
  const gbm::Instance inst = gbm::load_instance(instance_path);
  const gbm::Parameters params = resolve_parameters(opts);
  if (inst.tasks() == 0) {
    throw gbm::ValidationError("ratio needs at least one task");
  }
  const gbm::OptResult opt = gbm::opt_makespan(inst);

  gbm::Json doc;
  doc["command"] = "ratio";
  doc["machines"] = inst.machines();
  doc["tasks"] = inst.tasks();
  doc["parameters"] = params_json(params);
  double t_gbm = 0.0;
  if (samples == 0) {
    if (inst.machines() != 2) {
      throw gbm::TooLarge(
          "no exact expectation for more than 2 machines; pass --samples N for Monte Carlo");
    }
    if (inst.tasks() > 20) {
      throw gbm::TooLarge("exact expectation caps at 20 tasks; pass --samples N for Monte Carlo");
    }
    t_gbm = gbm::exact_expected_makespan(inst, params);
    doc["method"] = "exact";
    doc["t_gbm"] = t_gbm;
  } else {
    const gbm::McEstimate mc =
        inst.machines() == 2
            ? gbm::monte_carlo_expected_makespan(inst, params, samples, opts.seed)
            : gbm::monte_carlo_mgbm_makespan(inst, params, samples, opts.seed);
    t_gbm = mc.mean;
    doc["method"] = "monte-carlo";
    doc["samples"] = samples;
    doc["seed"] = opts.seed;
    doc["t_gbm"] = mc.mean;
    doc["std_error"] = mc.std_error;
  }
  doc["t_opt"] = opt.value;
  doc["opt_allocation"] = opt.allocation.assign;
  doc["ratio"] = t_gbm / opt.value;
  emit(doc, opts);
  return 0;
}

int cmd_bounds(const CommonOpts& opts) {
  const gbm::Parameters params = resolve_parameters(opts);
  const gbm::BoundReport report = gbm::bounds_eval(params);
  gbm::Json doc;
  doc["command"] = "bounds";
  doc["parameters"] = params_json(params);
  doc["feasible"] = report.feasible;
  gbm::Json bounds;
  for (int i = 0; i < 9; ++i) {
    bounds["B" + std::to_string(i + 1)] = report.bounds[static_cast<std::size_t>(i)];
  }
  doc["bounds"] = bounds;
  doc["max_bound"] = report.max_bound;
  std::vector<std::string> binding;
  for (int i : report.binding) binding.push_back("B" + std::to_string(i));
  doc["binding"] = binding;
  emit(doc, opts);
  return 0;
}

int cmd_tune(const CommonOpts& opts, const gbm::GridSpec& spec) {
  const gbm::TuneResult result = gbm::optimize_params(spec);
  gbm::Json doc;
  doc["command"] = "tune";
  doc["alpha"] = result.params.alpha;
  doc["beta"] = result.params.beta;
  doc["r"] = result.params.r;
  doc["objective"] = result.objective;
  doc["evaluations"] = result.evaluations;
  emit(doc, opts);
  return 0;
}

int cmd_truthful(const CommonOpts& opts, std::uint64_t trials, std::uint64_t scripts) {
  const gbm::Parameters params = resolve_parameters(opts);
  const gbm::TruthHarnessReport report =
      gbm::run_universal_harness(params, trials, scripts, opts.seed);
  gbm::Json doc;
  doc["command"] = "truthful";
  doc["parameters"] = params_json(params);
  doc["trials"] = report.instances;
  doc["scripts_per_instance"] = report.scripts_per_instance;
  doc["deviations_checked"] = report.deviations_checked;
  doc["violations"] = report.positive_gains;
  doc["max_gain"] = report.max_gain;
  doc["min_truthful_utility"] = report.min_truthful_utility;
  doc["seed"] = opts.seed;
  emit(doc, opts);
  return 0;
}

int cmd_ratio_search(const CommonOpts& opts, std::uint64_t trials) {
  const gbm::Parameters params = resolve_parameters(opts);
  const gbm::RatioReport worst = gbm::ratio_search(params, trials, opts.seed);
  gbm::Json doc;
  doc["command"] = "ratio-search";
  doc["parameters"] = params_json(params);
  doc["trials"] = trials;
  doc["seed"] = opts.seed;
  gbm::Json w;
  w["ratio"] = worst.ratio;
  w["t_gbm"] = worst.t_gbm;
  w["t_opt"] = worst.t_opt;
  w["instance"] = worst.instance.times;
  doc["worst"] = w;
  doc["ceiling"] = gbm::ratio_ceiling(params);
  emit(doc, opts);
  return 0;
}

int cmd_merge_check(const CommonOpts& opts, const std::string& instance_path,
                    std::uint64_t trials, int j1, int j2) {
  const gbm::Parameters params = resolve_parameters(opts);
  gbm::Json doc;
  doc["command"] = "merge-check";
  doc["parameters"] = params_json(params);
  if (!instance_path.empty()) {
    if (j1 < 1 || j2 < 1) {
      throw gbm::ValidationError("--j1 and --j2 (1-based task indices) are required with --instance");
    }
    const gbm::Instance inst = gbm::load_instance(instance_path);
    const gbm::MergeReport report = gbm::check_merge_monotonicity(
        inst, static_cast<std::size_t>(j1 - 1), static_cast<std::size_t>(j2 - 1), params);
    doc["split_expectation"] = report.split_expectation;
    doc["merged_expectation"] = report.merged_expectation;
    doc["split_opt"] = report.split_opt;
    doc["merged_opt"] = report.merged_opt;
    doc["expectation_monotone"] = report.expectation_monotone;
    doc["opt_monotone"] = report.opt_monotone;
    emit(doc, opts);
    return 0;
  }
  std::mt19937_64 rng(opts.seed);
  std::uint64_t violations = 0;
  double max_deficit = -gbm::kInfiniteTime;
  for (std::uint64_t t = 0; t < trials; ++t) {
    const gbm::MergePairSample sample = gbm::random_equal_ratio_pair(params, rng);
    const gbm::MergeReport report =
        gbm::check_merge_monotonicity(sample.instance, sample.j1, sample.j2, params);
    max_deficit = std::max(max_deficit,
                           report.split_expectation - report.merged_expectation);
    if (!report.expectation_monotone || !report.opt_monotone) ++violations;
  }
  doc["trials"] = trials;
  doc["seed"] = opts.seed;
  doc["violations"] = violations;
  doc["max_expectation_deficit"] = max_deficit;
  emit(doc, opts);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Randomly biased truthful scheduling mechanism: runner, oracles, and analysis"};
  app.require_subcommand(1);

  CommonOpts run_opts, ratio_opts, bounds_opts, tune_opts, truthful_opts,
      search_opts, merge_opts;
  std::string run_instance, ratio_instance, merge_instance;
  std::uint64_t ratio_samples = 0;
  std::uint64_t truthful_trials = 1000, truthful_scripts = 4;
  std::uint64_t search_trials = 1000, merge_trials = 1000;
  int merge_j1 = 0, merge_j2 = 0;
  gbm::GridSpec grid;

  CLI::App* run = app.add_subcommand("run", "Allocate one instance and print the outcome");
  run->add_option("--instance", run_instance, "Instance JSON file")->required();
  add_common(run, run_opts);

  CLI::App* ratio = app.add_subcommand("ratio", "Expected makespan over brute-force optimum");
  ratio->add_option("--instance", ratio_instance, "Instance JSON file")->required();
  ratio->add_option("--samples", ratio_samples, "Monte Carlo sample count (default: exact)");
  add_common(ratio, ratio_opts);

  CLI::App* bounds = app.add_subcommand("bounds", "Evaluate the nine closed-form bounds");
  add_common(bounds, bounds_opts);

  CLI::App* tune = app.add_subcommand("tune", "Minimize the maximal bound over the feasible box");
  tune->add_option("--step", grid.step, "Coarse grid step (default 0.01)");
  tune->add_option("--alpha-min", grid.alpha_min, "Search box lower alpha");
  tune->add_option("--alpha-max", grid.alpha_max, "Search box upper alpha");
  tune->add_option("--beta-min", grid.beta_min, "Search box lower beta");
  tune->add_option("--beta-max", grid.beta_max, "Search box upper beta");
  tune->add_option("--r-min", grid.r_min, "Search box lower r");
  tune->add_option("--r-max", grid.r_max, "Search box upper r");
  add_common(tune, tune_opts);

  CLI::App* truthful = app.add_subcommand("truthful", "Fixed-script deviation harness");
  truthful->add_option("--trials", truthful_trials, "Random instances (default 1000)");
  truthful->add_option("--scripts", truthful_scripts, "Script draws per instance (default 4)");
  add_common(truthful, truthful_opts);

  CLI::App* search = app.add_subcommand("ratio-search", "Randomized worst-ratio search");
  search->add_option("--trials", search_trials, "Random instances (default 1000)");
  add_common(search, search_opts);

  CLI::App* merge = app.add_subcommand("merge-check", "Merge-monotonicity checks");
  merge->add_option("--instance", merge_instance, "Instance JSON file (single check)");
  merge->add_option("--j1", merge_j1, "First task (1-based, with --instance)");
  merge->add_option("--j2", merge_j2, "Second task (1-based, with --instance)");
  merge->add_option("--trials", merge_trials, "Random pairs when no instance given");
  add_common(merge, merge_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // prints help, exit 0
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (run->parsed()) return cmd_run(run_opts, run_instance);
    if (ratio->parsed()) return cmd_ratio(ratio_opts, ratio_instance, ratio_samples);
    if (bounds->parsed()) return cmd_bounds(bounds_opts);
    if (tune->parsed()) return cmd_tune(tune_opts, grid);
    if (truthful->parsed()) return cmd_truthful(truthful_opts, truthful_trials, truthful_scripts);
    if (search->parsed()) return cmd_ratio_search(search_opts, search_trials);
    if (merge->parsed())
      return cmd_merge_check(merge_opts, merge_instance, merge_trials, merge_j1, merge_j2);
  } catch (const gbm::TooLarge& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const gbm::InfeasibleParameters& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const gbm::EmptyFeasibleRegion& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
