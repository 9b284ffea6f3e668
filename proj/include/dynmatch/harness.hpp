// Update-stream generators (oblivious and adaptive), the experiment
// runner with its exact-matching oracle, and CSV metrics output.
//
// All randomness of one experiment flows from a single seed: the
// algorithm's coloring and sampling streams and the adversary's stream
// are derived sub-streams, so a rerun with the same config is
// byte-identical. Wall-clock timing is off by default for that reason.

#ifndef DYNMATCH_HARNESS_HPP
#define DYNMATCH_HARNESS_HPP

#include <chrono>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "dynmatch/core.hpp"
#include "dynmatch/det_tradeoff.hpp"
#include "dynmatch/framework.hpp"
#include "dynmatch/graph.hpp"
#include "dynmatch/matching.hpp"

namespace dynmatch {

struct AdversaryConfig {
  enum class Kind { random_oblivious, sliding_window, matched_deleter, sparsifier_eraser };
  enum class VertexSampler { uniform };

  Kind kind = Kind::random_oblivious;
  double p_insert = 0.6;
  VertexSampler vertex_sampler = VertexSampler::uniform;
  int window = 64;
  double refill_rate = 0.5;

  bool adaptive() const {
    return kind == Kind::matched_deleter || kind == Kind::sparsifier_eraser;
  }
};

// What an adaptive adversary reads between updates. The harness fills it
// from the algorithm's exposed state; every field is read-only.
struct AdversaryView {
  const Matching* served = nullptr;
  const std::vector<EdgeKey>* sparsifier_edges = nullptr;
};

class Adversary {
 public:
  Adversary(AdversaryConfig cfg, int n) : cfg_(cfg), n_(n), present_(n) {
    if (n < 2) throw Error(Errc::invalid_value, "adversary needs >= 2 vertices");
  }

  UpdateEvent generate_next(const AdversaryView* view, Rng& rng) {
    if (cfg_.adaptive() && view == nullptr)
      throw Error(Errc::invalid_value, "adaptive adversary needs the state view");
    UpdateEvent ev = pick(view, rng);
    apply_to_mirror(ev);
    return ev;
  }

 private:
  UpdateEvent pick(const AdversaryView* view, Rng& rng) {
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    switch (cfg_.kind) {
      case AdversaryConfig::Kind::random_oblivious: {
        bool want_insert = coin(rng) < cfg_.p_insert;
        if (want_insert || live_.empty()) {
          if (auto e = random_absent_edge(rng)) return UpdateEvent::insertion(*e);
          // graph full; fall through to deletion
        }
        if (!live_.empty()) return UpdateEvent::deletion(random_live_edge(rng));
        throw Error(Errc::no_legal_move, "no legal move for oblivious adversary");
      }
      case AdversaryConfig::Kind::sliding_window: {
        while (!fifo_.empty() && !present_.contains(fifo_.front())) fifo_.erase(fifo_.begin());
        if (static_cast<int>(live_.size()) >= cfg_.window && !fifo_.empty()) {
          EdgeKey oldest = fifo_.front();
          fifo_.erase(fifo_.begin());
          return UpdateEvent::deletion(oldest);
        }
        if (auto e = random_absent_edge(rng)) return UpdateEvent::insertion(*e);
        if (!live_.empty()) return UpdateEvent::deletion(random_live_edge(rng));
        throw Error(Errc::no_legal_move, "window adversary stuck");
      }
      case AdversaryConfig::Kind::matched_deleter: {
        bool refill = view->served->size() == 0 || coin(rng) < cfg_.refill_rate;
        if (!refill) {
          auto edges = view->served->edges();
          std::uniform_int_distribution<size_t> pick_idx(0, edges.size() - 1);
          return UpdateEvent::deletion(edges[pick_idx(rng)]);
        }
        if (auto e = random_absent_edge(rng)) return UpdateEvent::insertion(*e);
        if (view->served->size() > 0) {
          auto edges = view->served->edges();
          std::uniform_int_distribution<size_t> pick_idx(0, edges.size() - 1);
          return UpdateEvent::deletion(edges[pick_idx(rng)]);
        }
        throw Error(Errc::no_legal_move, "matched deleter stuck");
      }
      case AdversaryConfig::Kind::sparsifier_eraser: {
        std::vector<EdgeKey> targets;
        if (view->sparsifier_edges)
          for (const EdgeKey& e : *view->sparsifier_edges)
            if (present_.contains(e)) targets.push_back(e);
        bool refill = targets.empty() || coin(rng) < cfg_.refill_rate;
        if (!refill) {
          std::uniform_int_distribution<size_t> pick_idx(0, targets.size() - 1);
          return UpdateEvent::deletion(targets[pick_idx(rng)]);
        }
        if (auto e = random_absent_edge(rng)) return UpdateEvent::insertion(*e);
        if (!targets.empty()) {
          std::uniform_int_distribution<size_t> pick_idx(0, targets.size() - 1);
          return UpdateEvent::deletion(targets[pick_idx(rng)]);
        }
        if (!live_.empty()) return UpdateEvent::deletion(random_live_edge(rng));
        throw Error(Errc::no_legal_move, "eraser stuck");
      }
    }
    throw Error(Errc::no_legal_move, "unreachable");
  }

  std::optional<EdgeKey> random_absent_edge(Rng& rng) {
    long long max_edges = static_cast<long long>(n_) * (n_ - 1) / 2;
    if (static_cast<long long>(live_.size()) >= max_edges) return std::nullopt;
    std::uniform_int_distribution<VertexId> pick_v(0, n_ - 1);
    for (int tries = 0; tries < 2000; ++tries) {
      VertexId u = pick_v(rng), v = pick_v(rng);
      if (u == v) continue;
      EdgeKey e(u, v);
      if (!present_.contains(e)) return e;
    }
    // dense graph: deterministic scan from a random offset
    std::uniform_int_distribution<long long> pick_off(0, max_edges - 1);
    long long off = pick_off(rng);
    for (long long step = 0; step < max_edges; ++step) {
      long long idx = (off + step) % max_edges;
      EdgeKey e = nth_pair(idx);
      if (!present_.contains(e)) return e;
    }
    return std::nullopt;
  }

  EdgeKey nth_pair(long long idx) const {
    // pairs (u,v), u < v, in lexicographic order
    long long remaining = idx;
    for (VertexId u = 0; u < n_ - 1; ++u) {
      long long row = n_ - 1 - u;
      if (remaining < row) return EdgeKey(u, static_cast<VertexId>(u + 1 + remaining));
      remaining -= row;
    }
    throw Error(Errc::invalid_value, "pair index out of range");
  }

  EdgeKey random_live_edge(Rng& rng) {
    std::uniform_int_distribution<size_t> pick_idx(0, live_.size() - 1);
    return live_[pick_idx(rng)];
  }

  void apply_to_mirror(const UpdateEvent& ev) {
    if (ev.kind == UpdateKind::insert) {
      present_.insert_edge(ev.edge);
      index_[ev.edge] = live_.size();
      live_.push_back(ev.edge);
      if (cfg_.kind == AdversaryConfig::Kind::sliding_window) fifo_.push_back(ev.edge);
    } else if (ev.kind == UpdateKind::erase) {
      present_.delete_edge(ev.edge);
      size_t pos = index_.at(ev.edge);
      EdgeKey moved = live_.back();
      live_[pos] = moved;
      index_[moved] = pos;
      live_.pop_back();
      index_.erase(ev.edge);
    }
  }

  AdversaryConfig cfg_;
  int n_;
  DynamicGraph present_;
  std::vector<EdgeKey> live_;
  std::unordered_map<EdgeKey, size_t, EdgeKeyHash> index_;
  std::vector<EdgeKey> fifo_;
};

struct ExperimentConfig {
  enum class Algo { framework, det };

  int n = 100;
  int update_count = 1000;
  uint64_t seed = 1;
  FrameworkConfig framework;
  AdversaryConfig adversary;
  Algo algo = Algo::framework;
  int K = 2;              // det only
  int oracle_period = 0;  // 0: max(1, update_count / 500)
  std::string out_path;   // empty: no file written
  bool keep_csv = false;  // retain the CSV text in the summary
  bool timing = false;    // wall_ns column stays 0 when off, keeping reruns byte-identical
};

struct ExperimentSummary {
  bool valid = true;
  int updates = 0;
  double max_ratio = 0.0;  // over oracle points with defined ratio
  bool ratio_defined_everywhere = true;
  double mean_ops = 0.0;
  int final_matching = 0;
  int final_mu = 0;
  uint64_t max_h_size = 0;
  std::string csv;
};

inline ExperimentSummary run_experiment(const ExperimentConfig& cfg) {
  const int q =
      cfg.oracle_period > 0 ? cfg.oracle_period : std::max(1, (cfg.update_count + 499) / 500);

  std::unique_ptr<RoundingFramework> fw;
  std::unique_ptr<DetTradeoffAlgorithm> det;
  if (cfg.algo == ExperimentConfig::Algo::framework) {
    FrameworkConfig fc = cfg.framework;
    fc.n = cfg.n;
    fc.seed = cfg.seed;
    fw = std::make_unique<RoundingFramework>(fc);
  } else {
    if (cfg.adversary.kind == AdversaryConfig::Kind::sparsifier_eraser)
      throw Error(Errc::invalid_value, "eraser adversary needs the framework algorithm");
    det = std::make_unique<DetTradeoffAlgorithm>(cfg.n, cfg.K);
  }

  Adversary adversary(cfg.adversary, cfg.n);
  Rng adv_rng = make_stream(cfg.seed, 3);

  Matching oracle(cfg.n);
  ExperimentSummary summary;
  const bool record = cfg.keep_csv || !cfg.out_path.empty();
  std::ostringstream csv;
  if (record) csv << "update,matching_size,mu,ratio,x_value_sum,h_size,epoch,ops,wall_ns\n";

  char buf[64];
  auto fmt = [&buf](double v) {
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return std::string(buf);
  };

  uint64_t ops_sum = 0;
  for (int step = 1; step <= cfg.update_count; ++step) {
    Matching det_serving;  // lifetime for the det view
    AdversaryView view;
    const AdversaryView* view_ptr = nullptr;
    if (cfg.adversary.adaptive()) {
      if (fw) {
        view.served = &fw->current_matching();
        view.sparsifier_edges = &fw->last_sample().edges;
      } else {
        det_serving = det->current_matching();
        view.served = &det_serving;
      }
      view_ptr = &view;
    }
    UpdateEvent ev = adversary.generate_next(view_ptr, adv_rng);

    auto t0 = std::chrono::steady_clock::now();
    if (fw)
      fw->process_update(ev);
    else
      det->process_update(ev);
    auto t1 = std::chrono::steady_clock::now();
    long long wall =
        cfg.timing ? std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count() : 0;

    const DynamicGraph& g = fw ? fw->graph() : det->graph();
    Matching det_current;
    if (det) det_current = det->current_matching();
    const Matching& current = fw ? fw->current_matching() : det_current;
    if (!verify_matching(g, current)) {
      csv << "#invalid_matching_at_update," << step << "\n";
      summary.valid = false;
      summary.csv = csv.str();
      if (!cfg.out_path.empty()) {
        std::ofstream out(cfg.out_path);
        out << summary.csv;
      }
      throw Error(Errc::invalid_value, "served matching failed validity at update " +
                                           std::to_string(step));
    }

    uint64_t ops = fw ? fw->ops_last_update() : det->ops_last_update();
    ops_sum += ops;
    uint64_t h_size = fw ? fw->last_sample().edges.size() : 0;
    summary.max_h_size = std::max(summary.max_h_size, h_size);

    std::string mu_cell, ratio_cell;
    if (step % q == 0 || step == cfg.update_count) {
      Matching warm(cfg.n);
      for (const EdgeKey& e : oracle.edges())
        if (g.contains(e)) warm.add(e);
      oracle = max_matching_exact(g, &warm);
      int mu = oracle.size();
      summary.final_mu = mu;
      mu_cell = std::to_string(mu);
      if (current.size() > 0) {
        double ratio = static_cast<double>(mu) / current.size();
        summary.max_ratio = std::max(summary.max_ratio, ratio);
        ratio_cell = fmt(ratio);
      } else if (mu == 0) {
        ratio_cell = fmt(1.0);
      } else {
        ratio_cell = "inf";
        summary.ratio_defined_everywhere = false;
      }
    }

    if (record)
      csv << step << ',' << current.size() << ',' << mu_cell << ',' << ratio_cell << ','
          << fmt(fw ? fw->fractional().value_sum() : det->fractional().value_sum()) << ','
          << (fw ? std::to_string(h_size) : std::string()) << ','
          << (fw ? std::to_string(fw->epoch().index) : std::string()) << ',' << ops << ',' << wall
          << '\n';
    summary.final_matching = current.size();
  }

  summary.updates = cfg.update_count;
  summary.mean_ops = cfg.update_count ? static_cast<double>(ops_sum) / cfg.update_count : 0.0;
  if (record) summary.csv = csv.str();
  if (!cfg.out_path.empty()) {
    std::ofstream out(cfg.out_path);
    out << summary.csv;
  }
  return summary;
}

// Fans independent experiment configs across hardware threads.
inline std::vector<ExperimentSummary> run_experiments_parallel(
    const std::vector<ExperimentConfig>& configs) {
  std::vector<ExperimentSummary> results(configs.size());
  std::vector<std::string> errors(configs.size());
  unsigned workers = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                                     static_cast<unsigned>(configs.size())));
  std::mutex next_mutex;
  size_t next = 0;
  auto worker = [&]() {
    for (;;) {
      size_t idx;
      {
        std::lock_guard<std::mutex> lk(next_mutex);
        if (next >= configs.size()) return;
        idx = next++;
      }
      try {
        results[idx] = run_experiment(configs[idx]);
      } catch (const std::exception& ex) {
        results[idx].valid = false;
        errors[idx] = ex.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return results;
}

}  // namespace dynmatch

#endif  // DYNMATCH_HARNESS_HPP
