// Command-line front end: `run` drives one experiment to CSV, `verify`
// executes the property suites, `replay` consumes an update-stream file.

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dynmatch/harness.hpp"
#include "dynmatch/suites.hpp"

namespace {

int do_run(const dynmatch::ExperimentConfig& cfg) {
  auto summary = dynmatch::run_experiment(cfg);
  std::cout << "updates=" << summary.updates << " final_matching=" << summary.final_matching
            << " final_mu=" << summary.final_mu << " max_ratio=" << summary.max_ratio
            << " mean_ops=" << summary.mean_ops << "\n";
  return summary.valid && summary.ratio_defined_everywhere ? 0 : 1;
}

int do_verify(const std::string& suite) {
  auto results = dynmatch::suites::run_suite(suite);
  bool all = true;
  for (const auto& r : results) {
    std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << "criterion " << r.id << ": " << r.name
              << " -- " << r.detail << "\n";
    all = all && r.pass;
  }
  return all ? 0 : 1;
}

int do_replay(const std::string& path, int n_override, uint64_t seed) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "cannot open stream file: " << path << "\n";
    return 1;
  }
  auto events = dynmatch::parse_update_stream(in);
  int n = n_override;
  if (n <= 0) {
    for (const auto& ev : events)
      if (ev.kind != dynmatch::UpdateKind::query) n = std::max({n, ev.edge.u + 1, ev.edge.v + 1});
    n = std::max(n, 2);
  }
  dynmatch::FrameworkConfig fc;
  fc.n = n;
  fc.eps = 0.25;
  fc.d = 134;
  fc.seed = seed;
  dynmatch::RoundingFramework fw(fc);
  int applied = 0;
  for (const auto& ev : events) {
    if (ev.kind == dynmatch::UpdateKind::query) {
      std::cout << "q," << applied << ',' << fw.current_matching().size() << "\n";
      continue;
    }
    fw.process_update(ev);
    ++applied;
    if (!dynmatch::verify_matching(fw.graph(), fw.current_matching())) {
      std::cerr << "validity violated after update " << applied << "\n";
      return 1;
    }
  }
  std::cout << "done," << applied << ',' << fw.current_matching().size() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dynamic matching rounding library harness"};
  app.require_subcommand(1);

  dynmatch::ExperimentConfig cfg;
  std::string algo = "framework", adversary = "random", policy = "proof", work_mode = "batch";
  double eps = 0.25, d = 134.0;
  int gamma = 2;

  auto* run = app.add_subcommand("run", "run one experiment and write CSV metrics");
  run->add_option("--algo", algo, "framework|det")->check(CLI::IsMember({"framework", "det"}));
  run->add_option("--n", cfg.n, "vertex count")->required();
  run->add_option("--updates", cfg.update_count, "number of updates")->required();
  run->add_option("--eps", eps, "epsilon");
  run->add_option("--d", d, "sparsifier degree parameter");
  run->add_option("--gamma", gamma, "palette multiplier (2 or 3)")->check(CLI::IsMember({2, 3}));
  run->add_option("--policy", policy, "alg1|proof")->check(CLI::IsMember({"alg1", "proof"}));
  run->add_option("--K", cfg.K, "tradeoff parameter (det algorithm)");
  run->add_option("--adversary", adversary, "random|window|matched|eraser")
      ->check(CLI::IsMember({"random", "window", "matched", "eraser"}));
  run->add_option("--p-insert", cfg.adversary.p_insert, "insert probability (random adversary)");
  run->add_option("--window", cfg.adversary.window, "window size (window adversary)");
  run->add_option("--refill-rate", cfg.adversary.refill_rate, "refill rate (adaptive adversaries)");
  run->add_option("--seed", cfg.seed, "master seed");
  run->add_option("--oracle-period", cfg.oracle_period, "updates between exact-oracle points");
  run->add_option("--work-mode", work_mode, "batch|stepped")
      ->check(CLI::IsMember({"batch", "stepped"}));
  std::string matcher = "exact";
  run->add_option("--matcher", matcher, "exact|bounded")
      ->check(CLI::IsMember({"exact", "bounded"}));
  run->add_option("--out", cfg.out_path, "CSV output path");
  run->add_flag("--timing", cfg.timing, "record wall_ns (makes reruns non-identical)");

  std::string suite;
  auto* verify = app.add_subcommand("verify", "run a property suite");
  verify->add_option("--suite", suite, "coloring|probs|kernel|fractional|endtoend")
      ->required()
      ->check(CLI::IsMember({"coloring", "probs", "kernel", "fractional", "endtoend"}));

  std::string stream_path;
  int replay_n = 0;
  uint64_t replay_seed = 1;
  auto* replay = app.add_subcommand("replay", "replay an update-stream file");
  replay->add_option("--stream", stream_path, "stream file (a/d/q lines)")->required();
  replay->add_option("--n", replay_n, "vertex count override");
  replay->add_option("--seed", replay_seed, "master seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      cfg.algo = algo == "det" ? dynmatch::ExperimentConfig::Algo::det
                               : dynmatch::ExperimentConfig::Algo::framework;
      cfg.framework.eps = eps;
      cfg.framework.d = d;
      cfg.framework.gamma = gamma;
      cfg.framework.policy = policy == "alg1" ? dynmatch::SparsifyParams::Policy::algorithm_one
                                              : dynmatch::SparsifyParams::Policy::proof_variant;
      cfg.framework.work_mode =
          work_mode == "stepped" ? dynmatch::WorkMode::stepped : dynmatch::WorkMode::batch;
      cfg.framework.matcher = matcher == "bounded" ? dynmatch::StaticMatcherKind::bounded_path
                                                   : dynmatch::StaticMatcherKind::exact;
      if (adversary == "random")
        cfg.adversary.kind = dynmatch::AdversaryConfig::Kind::random_oblivious;
      else if (adversary == "window")
        cfg.adversary.kind = dynmatch::AdversaryConfig::Kind::sliding_window;
      else if (adversary == "matched")
        cfg.adversary.kind = dynmatch::AdversaryConfig::Kind::matched_deleter;
      else
        cfg.adversary.kind = dynmatch::AdversaryConfig::Kind::sparsifier_eraser;
      return do_run(cfg);
    }
    if (verify->parsed()) return do_verify(suite);
    if (replay->parsed()) return do_replay(stream_path, replay_n, replay_seed);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}
