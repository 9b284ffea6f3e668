// Property suites behind the acceptance runner and the `verify` CLI
// subcommand. Each criterion returns a result with a pass flag and a
// one-line detail string; statistical checks carry three-sigma slack and
// rerun once at four times the trial count before reporting failure.

#ifndef DYNMATCH_SUITES_HPP
#define DYNMATCH_SUITES_HPP

#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "dynmatch/core.hpp"
#include "dynmatch/det_tradeoff.hpp"
#include "dynmatch/edge_coloring.hpp"
#include "dynmatch/framework.hpp"
#include "dynmatch/fractional_matching.hpp"
#include "dynmatch/graph.hpp"
#include "dynmatch/harness.hpp"
#include "dynmatch/matching.hpp"
#include "dynmatch/sparsifier.hpp"
#include "dynmatch/verification.hpp"

namespace dynmatch::suites {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

namespace detail {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

inline std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

// Fixed 50-vertex assignment exercising both full-palette and partially
// sampled buckets at eps = 0.25, d = 134: exponent 1 and 21 lie in fully
// sampled buckets (value above 1/d), exponent 22 sits just past the
// boundary, exponent 25 is deep (value*d ~ 0.5).
inline std::vector<std::pair<EdgeKey, int>> planted_assignment_50() {
  std::vector<std::pair<EdgeKey, int>> assign;
  assign.push_back({EdgeKey(0, 1), 1});
  assign.push_back({EdgeKey(2, 3), 1});
  assign.push_back({EdgeKey(4, 5), 1});
  assign.push_back({EdgeKey(6, 7), 21});
  assign.push_back({EdgeKey(8, 9), 21});
  assign.push_back({EdgeKey(10, 11), 22});
  assign.push_back({EdgeKey(12, 13), 22});
  for (VertexId leaf = 15; leaf <= 44; ++leaf) assign.push_back({EdgeKey(14, leaf), 25});
  for (VertexId leaf = 46; leaf <= 49; ++leaf) assign.push_back({EdgeKey(45, leaf), 25});
  for (VertexId leaf = 15; leaf <= 30; ++leaf) assign.push_back({EdgeKey(45, leaf), 25});
  return assign;
}

inline void apply_assignment(BucketedColoring& bc,
                             const std::vector<std::pair<EdgeKey, int>>& assign, Rng* rng) {
  ChangeBatch batch;
  for (const auto& [e, k] : assign) batch.changes.push_back({e, std::nullopt, k});
  bc.apply_change_batch(batch, nullptr, rng);
}

// Replays random insertions through the fractional matcher into a
// bucketed coloring; returns the edges inserted.
inline std::vector<EdgeKey> grow_random_instance(FractionalMatching& fm, BucketedColoring& bc,
                                                 int n, int edges, uint64_t seed) {
  Rng rng = make_stream(seed, 7);
  std::uniform_int_distribution<VertexId> pick(0, n - 1);
  std::vector<EdgeKey> inserted;
  while (static_cast<int>(inserted.size()) < edges) {
    VertexId u = pick(rng), v = pick(rng);
    if (u == v) continue;
    EdgeKey e(u, v);
    if (fm.contains(e)) continue;
    bc.apply_change_batch(fm.on_insert(e), nullptr, &rng);
    inserted.push_back(e);
  }
  return inserted;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// 1. Coloring suite: properness after every op, palette discipline, probe
//    bound, across 100 random dynamic multigraph sequences.
// ---------------------------------------------------------------------------
inline CriterionResult criterion_coloring() {
  detail::Stopwatch watch;
  const int sequences = 100;
  const int n = 200, cap = 32, palette = 2 * cap - 1, ops = 100000;
  const int probe_bound = static_cast<int>(std::ceil(std::log2(palette))) + 1;

  std::atomic<int> failures{0};
  std::atomic<long long> max_probes{0};
  auto run_sequence = [&](int s) {
    Rng rng = make_stream(1000 + s, 11);
    ColoredMultigraph cg(n, cap, palette);
    std::vector<std::pair<EdgeKey, ColorId>> instances;
    std::uniform_int_distribution<VertexId> pick(0, n - 1);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    for (int op = 0; op < ops; ++op) {
      bool insert = instances.empty() || coin(rng) < 0.55;
      if (insert) {
        EdgeKey e(0, 1);
        bool found = false;
        for (int t = 0; t < 64; ++t) {
          VertexId u = pick(rng), v = pick(rng);
          if (u == v) continue;
          if (cg.instance_degree(u) >= cap || cg.instance_degree(v) >= cap) continue;
          e = EdgeKey(u, v);
          found = true;
          break;
        }
        if (!found) insert = false;
        if (insert) {
          ColorId c = cg.insert_colored(e);
          if (c >= palette || cg.last_probe_count() > probe_bound ||
              cg.vertex_color_count(e.u, c) != 1 || cg.vertex_color_count(e.v, c) != 1) {
            failures.fetch_add(1);
            return;
          }
          long long probes = cg.last_probe_count();
          long long prev = max_probes.load();
          while (probes > prev && !max_probes.compare_exchange_weak(prev, probes)) {
          }
          instances.push_back({e, c});
        }
      }
      if (!insert) {
        std::uniform_int_distribution<size_t> which(0, instances.size() - 1);
        size_t idx = which(rng);
        auto [e, c] = instances[idx];
        cg.delete_colored(e, c);
        if (cg.vertex_color_count(e.u, c) != 0 || cg.vertex_color_count(e.v, c) != 0) {
          failures.fetch_add(1);
          return;
        }
        instances[idx] = instances.back();
        instances.pop_back();
      }
      if (op % 20000 == 19999 && !cg.recount_consistent()) {
        failures.fetch_add(1);
        return;
      }
    }
    if (!cg.recount_consistent()) failures.fetch_add(1);
  };

  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      int s = next.fetch_add(1);
      if (s >= sequences) return;
      run_sequence(s);
    }
  };
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  CriterionResult r{1, "coloring properness/palette/probes", false, "", 0.0};
  r.seconds = watch.seconds();
  r.pass = failures.load() == 0 && r.seconds < 30.0;
  r.detail = std::to_string(sequences) + " sequences x " + std::to_string(ops) +
             " ops, max probes " + std::to_string(max_probes.load()) + "/" +
             std::to_string(probe_bound) + ", " + detail::fmt(r.seconds) + "s";
  return r;
}

// ---------------------------------------------------------------------------
// Shared Monte Carlo pass for criteria 2-4 over the planted 50-vertex
// assignment: per-edge membership frequencies, adjacent-pair covariances,
// and per-draw z/y witness values.
// ---------------------------------------------------------------------------
struct ProbeRun {
  std::vector<std::pair<EdgeKey, int>> assign;
  std::vector<double> x;         // per edge
  std::vector<long long> hits;   // per edge
  std::vector<std::pair<size_t, size_t>> pairs;
  std::vector<long long> joint;  // per pair
  std::vector<double> y_sums;    // per draw
  bool y_always_feasible = true;
  int trials = 0;
  double eps = 0.25, d = 134.0;
};

inline ProbeRun run_probe_experiment(int trials, uint64_t seed) {
  ProbeRun run;
  run.trials = trials;
  run.assign = detail::planted_assignment_50();
  const int n = 50;

  BucketedColoring bc(n, run.eps, 2);
  detail::apply_assignment(bc, run.assign, nullptr);
  SparsifyParams params{run.eps, run.d, 2, SparsifyParams::Policy::proof_variant};

  FractionalMatching helper(n, run.eps);  // exact powers for x values
  run.x.reserve(run.assign.size());
  for (const auto& [e, k] : run.assign) run.x.push_back(helper.power(k));

  // adjacent pairs, deterministic order, capped at 200
  std::vector<std::vector<size_t>> at_vertex(n);
  for (size_t i = 0; i < run.assign.size(); ++i) {
    at_vertex[run.assign[i].first.u].push_back(i);
    at_vertex[run.assign[i].first.v].push_back(i);
  }
  for (int v = 0; v < n && run.pairs.size() < 200; ++v)
    for (size_t a = 0; a < at_vertex[v].size() && run.pairs.size() < 200; ++a)
      for (size_t b = a + 1; b < at_vertex[v].size() && run.pairs.size() < 200; ++b)
        run.pairs.push_back({at_vertex[v][a], at_vertex[v][b]});

  run.hits.assign(run.assign.size(), 0);
  run.joint.assign(run.pairs.size(), 0);
  run.y_sums.reserve(trials);

  std::vector<std::pair<EdgeKey, double>> xe;
  for (size_t i = 0; i < run.assign.size(); ++i) xe.push_back({run.assign[i].first, run.x[i]});

  Rng rng = make_stream(seed, 13);
  std::vector<char> member(run.assign.size());
  std::unordered_map<EdgeKey, size_t, EdgeKeyHash> index;
  for (size_t i = 0; i < run.assign.size(); ++i) index[run.assign[i].first] = i;

  for (int t = 0; t < trials; ++t) {
    auto sample = sample_sparsifier(bc, params, rng);
    std::fill(member.begin(), member.end(), 0);
    for (const EdgeKey& e : sample.edges) member[index.at(e)] = 1;
    for (size_t i = 0; i < member.size(); ++i)
      if (member[i]) ++run.hits[i];
    for (size_t p = 0; p < run.pairs.size(); ++p)
      if (member[run.pairs[p].first] && member[run.pairs[p].second]) ++run.joint[p];

    auto witness = build_zy_witness(xe, sample.members, n, run.eps, run.d);
    if (!fractional_matching_feasible(xe, witness.y, n)) run.y_always_feasible = false;
    run.y_sums.push_back(witness.y_sum);
  }
  return run;
}

inline const ProbeRun& shared_probe_run(int trials = 100000) {
  static ProbeRun cached = run_probe_experiment(trials, 42);
  return cached;
}

inline CriterionResult criterion_sampling_probability() {
  detail::Stopwatch watch;
  auto evaluate = [](const ProbeRun& run, std::string& detail_out) {
    const double eps = run.eps, d = run.d;
    int worst_edge = -1;
    double worst_gap = 0.0;
    bool ok = true;
    for (size_t i = 0; i < run.assign.size(); ++i) {
      double freq = static_cast<double>(run.hits[i]) / run.trials;
      double target = std::min(1.0, run.x[i] * d);
      double lb = target / ((1 + eps) * (1 + eps));
      double ub = target * (1 + eps);
      if (run.x[i] > 1.0 / d && freq != 1.0) ok = false;
      double lo = lb - 3 * binomial_sigma(lb, run.trials);
      double hi = ub + 3 * binomial_sigma(std::min(1.0, ub), run.trials);
      if (freq < lo || freq > hi) {
        ok = false;
        double gap = std::max(lo - freq, freq - hi);
        if (gap > worst_gap) {
          worst_gap = gap;
          worst_edge = static_cast<int>(i);
        }
      }
    }
    std::ostringstream os;
    os << run.assign.size() << " edges x " << run.trials << " draws";
    if (worst_edge >= 0) os << ", worst gap " << detail::fmt(worst_gap) << " at edge " << worst_edge;
    detail_out = os.str();
    return ok;
  };

  CriterionResult r{2, "sampling probability sandwich", false, "", 0.0};
  if (!(r.pass = evaluate(shared_probe_run(), r.detail))) {
    auto retry = run_probe_experiment(400000, 43);
    r.pass = evaluate(retry, r.detail);
    r.detail += " (after 4x retry)";
  }
  r.seconds = watch.seconds();
  r.pass = r.pass && r.seconds < 120.0;
  r.detail += ", " + detail::fmt(r.seconds) + "s";
  return r;
}

inline CriterionResult criterion_negative_correlation() {
  detail::Stopwatch watch;
  auto evaluate = [](const ProbeRun& run, std::string& detail_out) {
    bool ok = true;
    double worst = -1.0;
    for (size_t p = 0; p < run.pairs.size(); ++p) {
      double pa = static_cast<double>(run.hits[run.pairs[p].first]) / run.trials;
      double pb = static_cast<double>(run.hits[run.pairs[p].second]) / run.trials;
      double pab = static_cast<double>(run.joint[p]) / run.trials;
      double cov = pab - pa * pb;
      double sigma = std::sqrt((pab * (1 - pab) + pb * pb * pa * (1 - pa) +
                                pa * pa * pb * (1 - pb)) /
                               run.trials);
      if (cov > 3 * sigma) ok = false;
      worst = std::max(worst, sigma > 0 ? cov / sigma : 0.0);
    }
    detail_out = std::to_string(run.pairs.size()) + " adjacent pairs, worst cov/sigma " +
                 detail::fmt(worst);
    return ok;
  };

  CriterionResult r{3, "pairwise negative correlation", false, "", 0.0};
  if (!(r.pass = evaluate(shared_probe_run(), r.detail))) {
    auto retry = run_probe_experiment(400000, 44);
    r.pass = evaluate(retry, r.detail);
    r.detail += " (after 4x retry)";
  }
  r.seconds = watch.seconds();
  r.detail += ", " + detail::fmt(r.seconds) + "s";
  return r;
}

inline CriterionResult criterion_fractional_value() {
  detail::Stopwatch watch;
  auto evaluate = [](const ProbeRun& run, std::string& detail_out) {
    double x_sum = std::accumulate(run.x.begin(), run.x.end(), 0.0);
    double mean = std::accumulate(run.y_sums.begin(), run.y_sums.end(), 0.0) / run.trials;
    double var = 0.0;
    for (double y : run.y_sums) var += (y - mean) * (y - mean);
    var /= run.trials;
    double sem = std::sqrt(var / run.trials);
    double floor_value = (1.0 - 6.0 * run.eps) * x_sum - 3 * sem;
    detail_out = "E[sum y] " + detail::fmt(mean) + " vs floor " + detail::fmt(floor_value) +
                 " (sum x " + detail::fmt(x_sum) + ")";
    return run.y_always_feasible && mean >= floor_value;
  };

  CriterionResult r{4, "fractional sparsifier value", false, "", 0.0};
  if (!(r.pass = evaluate(shared_probe_run(), r.detail))) {
    auto retry = run_probe_experiment(400000, 45);
    r.pass = evaluate(retry, r.detail);
    r.detail += " (after 4x retry)";
  }
  r.seconds = watch.seconds();
  r.detail += ", " + detail::fmt(r.seconds) + "s";
  return r;
}

// ---------------------------------------------------------------------------
// 5. Kernel suites: (a) whp regime on a fractional-matcher instance,
//    (b) constant-d trimmed regime on an approximately-maximal hub
//    assignment with the fitted slack constant.
// ---------------------------------------------------------------------------
inline CriterionResult criterion_kernels() {
  detail::Stopwatch watch;
  CriterionResult r{5, "kernel suites (whp + trimmed)", false, "", 0.0};

  // (a) whp regime, n = 64
  const int n_a = 64;
  const double eps_a = 0.25, c_a = 1.0 + eps_a;
  const double d_a = std::ceil(9.0 * c_a * (1 + eps_a) * (1 + eps_a) * std::log(n_a) /
                               (eps_a * eps_a));
  FractionalMatching fm(n_a, eps_a);
  BucketedColoring bc(n_a, eps_a, 2);
  auto edges_a = detail::grow_random_instance(fm, bc, n_a, 256, 97);
  SparsifyParams params_a{eps_a, d_a, 2, SparsifyParams::Policy::proof_variant};
  Rng rng_a = make_stream(5, 17);
  auto sampler_a = [&](Rng& rng) { return sample_sparsifier(bc, params_a, rng).edges; };
  auto report_a = check_kernel(sampler_a, n_a, edges_a, c_a, d_a, 0.0, 10000, rng_a);
  bool pass_a = report_a.degree_violations == 0 && report_a.property2_violations == 0;

  // (b) trimmed constant-d regime on a hub construction:
  //     three hubs of 400 leaves, leaf-edge value ~ 0.45/d, which is a
  //     (1.25, 231)-approximately-maximal assignment with genuinely
  //     partial sampling (Pr[absent] ~ 0.6).
  const double eps_b = 0.2;
  const double d_b = std::ceil(4.0 * std::log(2.0 / eps_b) / (eps_b * eps_b));
  const double c_b = 1.0 / (1.0 - eps_b);
  const int hubs = 3, leaves = 400;
  const int n_b = hubs + hubs * leaves;
  std::vector<std::pair<EdgeKey, int>> assign_b;
  for (int h = 0; h < hubs; ++h)
    for (int l = 0; l < leaves; ++l)
      assign_b.push_back({EdgeKey(h, hubs + h * leaves + l), 34});
  {
    FractionalMatching helper(n_b, eps_b);
    std::vector<std::pair<EdgeKey, double>> xs;
    for (const auto& [e, k] : assign_b) xs.push_back({e, helper.power(k)});
    if (!is_approx_maximal(n_b, xs, c_b, d_b)) {
      r.detail = "hub fixture is not approximately maximal";
      r.seconds = watch.seconds();
      return r;
    }
  }
  BucketedColoring bc_b(n_b, eps_b, 2);
  detail::apply_assignment(bc_b, assign_b, nullptr);
  SparsifyParams params_b{eps_b, d_b, 2, SparsifyParams::Policy::proof_variant};
  std::vector<EdgeKey> edges_b;
  for (const auto& [e, k] : assign_b) edges_b.push_back(e);
  auto sampler_b = [&](Rng& rng) {
    auto h = sample_sparsifier(bc_b, params_b, rng).edges;
    return trim_high_degree(n_b, h, d_b, eps_b);
  };
  Rng rng_b = make_stream(6, 17);
  auto report_b = check_kernel(sampler_b, n_b, edges_b, c_b, d_b * (1 + 4 * eps_b), eps_b, 2000,
                               rng_b, 500, 8.0);
  bool pass_b = report_b.degree_violations == 0 && report_b.property2_violations == 0 &&
                report_b.property2_checked > 0 && report_b.fitted_slack <= 8.0;

  r.pass = pass_a && pass_b;
  r.seconds = watch.seconds();
  r.detail = "whp: deg viol " + std::to_string(report_a.degree_violations) + ", p2 viol " +
             std::to_string(report_a.property2_violations) + "; trimmed: checked " +
             std::to_string(report_b.property2_checked) + ", fitted C " +
             detail::fmt(report_b.fitted_slack) + ", " + detail::fmt(r.seconds) + "s";
  return r;
}

// ---------------------------------------------------------------------------
// 6. Kernel-to-matching: Monte Carlo mean of mu(H') against
//    mu(G) / (2c(1+1/d)) on an n = 64 instance, exact oracle.
// ---------------------------------------------------------------------------
inline CriterionResult criterion_kernel_matching() {
  detail::Stopwatch watch;
  const int n = 64;
  const double eps = 0.2;
  const double d = std::ceil(4.0 * std::log(2.0 / eps) / (eps * eps));
  const double c = std::max(1.0 + eps, 1.0 / (1.0 - eps));

  FractionalMatching fm(n, eps);
  BucketedColoring bc(n, eps, 2);
  auto edges = detail::grow_random_instance(fm, bc, n, 256, 131);
  const int mu_g = max_matching_exact(n, edges).size();

  SparsifyParams params{eps, d, 2, SparsifyParams::Policy::proof_variant};
  Rng rng = make_stream(7, 17);
  const int trials = 1000;
  std::vector<double> mus;
  mus.reserve(trials);
  for (int t = 0; t < trials; ++t) {
    auto h = trim_high_degree(n, sample_sparsifier(bc, params, rng).edges, d, eps);
    mus.push_back(max_matching_exact(n, h).size());
  }
  double mean = std::accumulate(mus.begin(), mus.end(), 0.0) / trials;
  double var = 0.0;
  for (double m : mus) var += (m - mean) * (m - mean);
  double sem = std::sqrt(var / trials / trials);
  double floor_value = mu_g / (2.0 * c * (1.0 + 1.0 / d)) - 3 * sem;

  CriterionResult r{6, "kernel-to-matching ratio", mean >= floor_value, "", watch.seconds()};
  r.detail = "mean mu(H) " + detail::fmt(mean) + " vs floor " + detail::fmt(floor_value) +
             " (mu(G) " + std::to_string(mu_g) + "), " + detail::fmt(r.seconds) + "s";
  return r;
}

// ---------------------------------------------------------------------------
// 7. End-to-end adaptive robustness: ratio <= 2.5 at every oracle point
//    against both adaptive adversaries, n in {100, 300}, 20 seeds.
// ---------------------------------------------------------------------------
inline ExperimentConfig endtoend_config(int n, AdversaryConfig::Kind kind, uint64_t seed,
                                        int updates) {
  ExperimentConfig cfg;
  cfg.n = n;
  cfg.update_count = updates;
  cfg.seed = seed;
  cfg.algo = ExperimentConfig::Algo::framework;
  cfg.framework.eps = 0.1;
  cfg.framework.d = std::ceil(4.0 * std::log(2.0 / 0.1) / (0.1 * 0.1));
  cfg.framework.gamma = 2;
  cfg.framework.policy = SparsifyParams::Policy::proof_variant;
  cfg.framework.matcher = StaticMatcherKind::exact;
  cfg.framework.work_mode = WorkMode::batch;
  cfg.adversary.kind = kind;
  cfg.adversary.refill_rate = 0.5;
  return cfg;
}

inline CriterionResult criterion_endtoend(int updates = 50000, int seeds = 20) {
  detail::Stopwatch watch;
  CriterionResult r{7, "end-to-end adaptive robustness", true, "", 0.0};
  std::ostringstream detail_os;
  double worst_ratio = 0.0;
  for (int n : {100, 300}) {
    for (auto kind :
         {AdversaryConfig::Kind::matched_deleter, AdversaryConfig::Kind::sparsifier_eraser}) {
      detail::Stopwatch config_watch;
      std::vector<ExperimentConfig> configs;
      for (int s = 1; s <= seeds; ++s) configs.push_back(endtoend_config(n, kind, s, updates));
      auto summaries = run_experiments_parallel(configs);
      double config_worst = 0.0;
      for (const auto& s : summaries) {
        if (!s.valid || !s.ratio_defined_everywhere) r.pass = false;
        config_worst = std::max(config_worst, s.max_ratio);
      }
      if (config_worst > 2.5) r.pass = false;
      double secs = config_watch.seconds();
      if (secs >= 600.0) r.pass = false;
      worst_ratio = std::max(worst_ratio, config_worst);
      detail_os << "n" << n
                << (kind == AdversaryConfig::Kind::matched_deleter ? "/matched " : "/eraser ")
                << detail::fmt(config_worst) << " (" << detail::fmt(secs) << "s) ";
    }
  }
  r.seconds = watch.seconds();
  r.detail = "worst ratio " + detail::fmt(worst_ratio) + " <= 2.5; " + detail_os.str();
  return r;
}

// ---------------------------------------------------------------------------
// 8. Deterministic tradeoff: planted-matching churn stream, validity,
//    exact pigeonhole bound, dropped mass, ratio <= 4K.
// ---------------------------------------------------------------------------
struct DetRunOutcome {
  bool valid = true;
  bool pigeonhole_ok = true;
  bool dropped_ok = true;
  double max_ratio = 0.0;
  std::string csv;
};

inline DetRunOutcome run_det_scenario(uint64_t seed, int churn_updates, bool keep_csv) {
  const int n = 256, K = 2;
  DetTradeoffAlgorithm algo(n, K);
  DynamicGraph shadow(n);
  Matching oracle(n);
  std::vector<EdgeKey> live_noise;
  Rng rng = make_stream(seed, 19);
  std::ostringstream csv;
  if (keep_csv) csv << "update,matching_size,mu,ratio\n";

  auto check = [&](int step, bool oracle_point) -> bool {
    Matching m = algo.current_matching();
    if (!verify_matching(algo.graph(), m)) return false;
    if (m.size() < algo.family().pigeonhole_lower_bound()) return false;
    if (algo.family().dropped_mass() > 0.25) return false;
    if (oracle_point) {
      Matching warm(n);
      for (const EdgeKey& e : oracle.edges())
        if (algo.graph().contains(e)) warm.add(e);
      oracle = max_matching_exact(algo.graph(), &warm);
      double ratio = m.size() > 0 ? static_cast<double>(oracle.size()) / m.size()
                                  : (oracle.size() == 0 ? 1.0 : 1e18);
      if (keep_csv)
        csv << step << ',' << m.size() << ',' << oracle.size() << ',' << ratio << '\n';
      return ratio <= 4.0 * K;
    }
    if (keep_csv) csv << step << ',' << m.size() << ",,\n";
    return true;
  };

  DetRunOutcome out;
  int step = 0;
  for (int i = 0; i < n / 2; ++i) {
    EdgeKey e(2 * i, 2 * i + 1);
    algo.process_update(UpdateEvent::insertion(e));
    shadow.insert_edge(e);
    if (!check(++step, false)) {
      out.valid = false;
      return out;
    }
  }
  std::uniform_int_distribution<VertexId> pick(0, n - 1);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (int i = 0; i < churn_updates; ++i) {
    bool insert = live_noise.empty() || coin(rng) < 0.55;
    if (insert) {
      EdgeKey e(0, 1);
      bool found = false;
      for (int t = 0; t < 200 && !found; ++t) {
        VertexId u = pick(rng), v = pick(rng);
        if (u == v) continue;
        EdgeKey cand(u, v);
        bool planted = cand.v == cand.u + 1 && cand.u % 2 == 0;
        if (planted || shadow.contains(cand)) continue;
        e = cand;
        found = true;
      }
      if (!found) insert = false;
      if (insert) {
        algo.process_update(UpdateEvent::insertion(e));
        shadow.insert_edge(e);
        live_noise.push_back(e);
      }
    }
    if (!insert) {
      std::uniform_int_distribution<size_t> which(0, live_noise.size() - 1);
      size_t idx = which(rng);
      EdgeKey e = live_noise[idx];
      algo.process_update(UpdateEvent::deletion(e));
      shadow.delete_edge(e);
      live_noise[idx] = live_noise.back();
      live_noise.pop_back();
    }
    bool oracle_point = (i + 1) % 100 == 0 || i + 1 == churn_updates;
    Matching m = algo.current_matching();
    if (!verify_matching(algo.graph(), m)) out.valid = false;
    if (m.size() < algo.family().pigeonhole_lower_bound()) out.pigeonhole_ok = false;
    if (algo.family().dropped_mass() > 0.25) out.dropped_ok = false;
    if (oracle_point) {
      Matching warm(n);
      for (const EdgeKey& e : oracle.edges())
        if (algo.graph().contains(e)) warm.add(e);
      oracle = max_matching_exact(algo.graph(), &warm);
      double ratio = m.size() > 0 ? static_cast<double>(oracle.size()) / m.size()
                                  : (oracle.size() == 0 ? 1.0 : 1e18);
      out.max_ratio = std::max(out.max_ratio, ratio);
      if (keep_csv)
        csv << (n / 2 + i + 1) << ',' << m.size() << ',' << oracle.size() << ',' << ratio << '\n';
    } else if (keep_csv) {
      csv << (n / 2 + i + 1) << ',' << m.size() << ",,\n";
    }
    if (!out.valid || !out.pigeonhole_ok || !out.dropped_ok) break;
  }
  out.csv = csv.str();
  return out;
}

inline CriterionResult criterion_det_tradeoff() {
  detail::Stopwatch watch;
  auto out = run_det_scenario(2024, 20000, false);
  CriterionResult r{8, "deterministic tradeoff (K=2)", false, "", 0.0};
  r.pass = out.valid && out.pigeonhole_ok && out.dropped_ok && out.max_ratio <= 8.0;
  r.seconds = watch.seconds();
  r.detail = "max ratio " + detail::fmt(out.max_ratio) + " <= 8, pigeonhole " +
             (out.pigeonhole_ok ? "ok" : "violated") + ", dropped mass " +
             (out.dropped_ok ? "ok" : "violated") + ", " + detail::fmt(r.seconds) + "s";
  return r;
}

// ---------------------------------------------------------------------------
// 9. Scaling trend: mean ops/update vs a + b log2 n over doubling n, and
//    the exact sparsifier size bound per sample.
// ---------------------------------------------------------------------------
struct ScalingPoint {
  int n = 0;
  double mean_ops = 0.0;
  bool h_bound_ok = true;
};

inline ScalingPoint run_scaling_point(int n, uint64_t seed, int updates) {
  ScalingPoint point;
  point.n = n;
  FrameworkConfig fc;
  fc.n = n;
  fc.eps = 0.25;
  fc.d = std::ceil(4.0 * std::log(2.0 / 0.25) / (0.25 * 0.25));
  fc.gamma = 2;
  fc.seed = seed;
  RoundingFramework fw(fc);
  AdversaryConfig ac;
  ac.kind = AdversaryConfig::Kind::random_oblivious;
  ac.p_insert = 0.6;
  Adversary adv(ac, n);
  Rng rng = make_stream(seed, 3);

  Matching oracle(n);
  auto mu_now = [&]() {
    Matching warm(n);
    for (const EdgeKey& e : oracle.edges())
      if (fw.graph().contains(e)) warm.add(e);
    oracle = max_matching_exact(fw.graph(), &warm);
    return oracle.size();
  };

  uint64_t ops_sum = 0;
  int prev_epoch = fw.epoch().index;
  int prev_length = fw.epoch().length;
  int mu_at_epoch_start = 0;
  for (int step = 1; step <= updates; ++step) {
    UpdateEvent ev = adv.generate_next(nullptr, rng);
    fw.process_update(ev);
    ops_sum += fw.ops_last_update();
    if (fw.epoch().index != prev_epoch) {
      // a roll happened: the new last_sample corresponds to the snapshot
      // of the epoch that just ended (live state for length-one epochs)
      int mu_ref = prev_length == 1 ? mu_now() : mu_at_epoch_start;
      const auto& sample = fw.last_sample();
      if (static_cast<long long>(sample.edges.size()) >
          static_cast<long long>(sample.color_draw_total) * mu_ref)
        point.h_bound_ok = false;
      mu_at_epoch_start = prev_length == 1 ? mu_ref : mu_now();
      prev_epoch = fw.epoch().index;
      prev_length = fw.epoch().length;
    }
  }
  point.mean_ops = static_cast<double>(ops_sum) / updates;
  return point;
}

inline CriterionResult criterion_scaling(int updates_per_vertex = 40) {
  detail::Stopwatch watch;
  std::vector<int> sizes{128, 256, 512, 1024};
  std::vector<ScalingPoint> points(sizes.size());
  std::vector<std::thread> pool;
  for (size_t i = 0; i < sizes.size(); ++i)
    pool.emplace_back(
        [&, i]() { points[i] = run_scaling_point(sizes[i], 99, updates_per_vertex * sizes[i]); });
  for (auto& t : pool) t.join();

  // least-squares fit ops = a + b log2 n
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& p : points) {
    double x = std::log2(p.n);
    sx += x;
    sy += p.mean_ops;
    sxx += x * x;
    sxy += x * p.mean_ops;
  }
  double k = points.size();
  double b = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  double a = (sy - b * sx) / k;

  bool trend_ok = true, h_ok = true;
  std::ostringstream os;
  for (const auto& p : points) {
    double fit = a + b * std::log2(p.n);
    if (fit <= 0 || p.mean_ops > 2.0 * fit || p.mean_ops < fit / 2.0) trend_ok = false;
    if (!p.h_bound_ok) h_ok = false;
    os << "n" << p.n << ":" << detail::fmt(p.mean_ops) << " ";
  }

  // per-update work against the log(n/eps) * gamma * d / eps^3 budget term
  const double eps = 0.25, d = 134.0, gamma = 2.0;
  double budget = std::log(1024.0 / eps) * gamma * d / (eps * eps * eps);
  double fitted_c = points.back().mean_ops / budget;

  CriterionResult r{9, "scaling trend + sparsifier size bound", trend_ok && h_ok, "",
                    watch.seconds()};
  r.detail = os.str() + "fit a=" + detail::fmt(a) + " b=" + detail::fmt(b) + ", work constant C=" +
             detail::fmt(fitted_c) + (h_ok ? ", |E(H)| bound ok" : ", |E(H)| bound VIOLATED") +
             ", " + detail::fmt(r.seconds) + "s";
  return r;
}

// ---------------------------------------------------------------------------
// 10. Determinism: byte-identical CSV for identical seeds across reruns of
//     each experiment scenario family.
// ---------------------------------------------------------------------------
inline CriterionResult criterion_determinism(int updates = 50000) {
  detail::Stopwatch watch;
  bool ok = true;
  std::ostringstream os;

  auto rerun_match = [&](ExperimentConfig cfg, const std::string& label) {
    cfg.keep_csv = true;
    auto first = run_experiment(cfg);
    auto second = run_experiment(cfg);
    bool same = first.csv == second.csv && !first.csv.empty();
    if (!same) ok = false;
    os << label << (same ? " ok; " : " MISMATCH; ");
  };

  for (int n : {100, 300}) {
    rerun_match(endtoend_config(n, AdversaryConfig::Kind::matched_deleter, 1, updates),
                "matched/n" + std::to_string(n));
    rerun_match(endtoend_config(n, AdversaryConfig::Kind::sparsifier_eraser, 1, updates),
                "eraser/n" + std::to_string(n));
  }

  {
    ExperimentConfig cfg;
    cfg.n = 512;
    cfg.update_count = updates / 5;
    cfg.seed = 99;
    cfg.framework.eps = 0.25;
    cfg.framework.d = 134;
    cfg.adversary.kind = AdversaryConfig::Kind::random_oblivious;
    cfg.adversary.p_insert = 0.6;
    rerun_match(cfg, "oblivious/n512");
  }

  auto det_a = run_det_scenario(2024, 4000, true);
  auto det_b = run_det_scenario(2024, 4000, true);
  bool det_same = det_a.csv == det_b.csv && !det_a.csv.empty();
  if (!det_same) ok = false;
  os << "det/n256" << (det_same ? " ok" : " MISMATCH");

  CriterionResult r{10, "determinism / replay", ok, os.str(), watch.seconds()};
  r.detail += ", " + detail::fmt(r.seconds) + "s";
  return r;
}

// ---------------------------------------------------------------------------

inline std::vector<CriterionResult> run_suite(const std::string& name) {
  std::vector<CriterionResult> results;
  if (name == "coloring") {
    results.push_back(criterion_coloring());
  } else if (name == "probs") {
    results.push_back(criterion_sampling_probability());
    results.push_back(criterion_negative_correlation());
  } else if (name == "fractional") {
    results.push_back(criterion_fractional_value());
  } else if (name == "kernel") {
    results.push_back(criterion_kernels());
    results.push_back(criterion_kernel_matching());
  } else if (name == "endtoend") {
    results.push_back(criterion_endtoend());
    results.push_back(criterion_det_tradeoff());
    results.push_back(criterion_scaling());
    results.push_back(criterion_determinism());
  } else {
    throw Error(Errc::invalid_value, "unknown suite '" + name + "'");
  }
  return results;
}

}  // namespace dynmatch::suites

#endif  // DYNMATCH_SUITES_HPP
