#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "dynmatch/harness.hpp"

using namespace dynmatch;

TEST_CASE("oblivious adversary emits only legal moves") {
  const int n = 20;
  AdversaryConfig ac;
  ac.kind = AdversaryConfig::Kind::random_oblivious;
  ac.p_insert = 0.5;
  Adversary adv(ac, n);
  Rng rng = make_stream(71, 3);
  DynamicGraph g(n);
  for (int i = 0; i < 5000; ++i) {
    UpdateEvent ev = adv.generate_next(nullptr, rng);
    REQUIRE(ev.kind != UpdateKind::query);
    if (ev.kind == UpdateKind::insert) {
      REQUIRE_FALSE(g.contains(ev.edge));
      g.insert_edge(ev.edge);
    } else {
      REQUIRE(g.contains(ev.edge));
      g.delete_edge(ev.edge);
    }
  }
}

TEST_CASE("empty graph with p_insert = 1 always inserts") {
  AdversaryConfig ac;
  ac.kind = AdversaryConfig::Kind::random_oblivious;
  ac.p_insert = 1.0;
  Adversary adv(ac, 6);
  Rng rng = make_stream(72, 3);
  for (int i = 0; i < 10; ++i) CHECK(adv.generate_next(nullptr, rng).kind == UpdateKind::insert);
}

TEST_CASE("insert-biased adversary falls back to deletion on a complete graph") {
  const int n = 4;
  AdversaryConfig ac;
  ac.kind = AdversaryConfig::Kind::random_oblivious;
  ac.p_insert = 1.0;
  Adversary adv(ac, n);
  Rng rng = make_stream(78, 3);
  DynamicGraph g(n);
  for (int i = 0; i < 6; ++i) {
    UpdateEvent ev = adv.generate_next(nullptr, rng);
    REQUIRE(ev.kind == UpdateKind::insert);
    g.insert_edge(ev.edge);
  }
  REQUIRE(g.edge_count() == 6);  // K4 complete
  UpdateEvent ev = adv.generate_next(nullptr, rng);
  CHECK(ev.kind == UpdateKind::erase);
}

TEST_CASE("sliding window bounds the live edge count") {
  const int window = 16;
  AdversaryConfig ac;
  ac.kind = AdversaryConfig::Kind::sliding_window;
  ac.window = window;
  Adversary adv(ac, 30);
  Rng rng = make_stream(73, 3);
  DynamicGraph g(30);
  for (int i = 0; i < 3000; ++i) {
    UpdateEvent ev = adv.generate_next(nullptr, rng);
    g.apply(ev);
    REQUIRE(g.edge_count() <= window);
  }
  CHECK(g.edge_count() == window);  // saturated steady state
}

TEST_CASE("matched deleter attacks the served matching") {
  const int n = 30;
  FrameworkConfig fc;
  fc.n = n;
  fc.eps = 0.25;
  fc.d = 20;
  fc.seed = 9;
  RoundingFramework fw(fc);
  AdversaryConfig ac;
  ac.kind = AdversaryConfig::Kind::matched_deleter;
  ac.refill_rate = 0.5;
  Adversary adv(ac, n);
  Rng rng = make_stream(74, 3);
  int attack_steps = 0, exact_drops = 0;
  for (int i = 0; i < 1000; ++i) {
    AdversaryView view{&fw.current_matching(), &fw.last_sample().edges};
    int before = fw.current_matching().size();
    bool was_served_edge;
    UpdateEvent ev = adv.generate_next(&view, rng);
    was_served_edge = ev.kind == UpdateKind::erase && fw.current_matching().has(ev.edge);
    int epoch_before = fw.epoch().index;
    fw.process_update(ev);
    REQUIRE(verify_matching(fw.graph(), fw.current_matching()));
    if (was_served_edge) {
      ++attack_steps;
      if (fw.epoch().index == epoch_before) {
        REQUIRE(fw.current_matching().size() == before - 1);
        ++exact_drops;
      }
    }
  }
  CHECK(attack_steps > 100);
  CHECK(exact_drops > 0);
}

TEST_CASE("matched deleter with a singleton matching deletes that edge") {
  AdversaryConfig ac;
  ac.kind = AdversaryConfig::Kind::matched_deleter;
  ac.refill_rate = 0.0;
  Adversary adv(ac, 6);
  Rng rng = make_stream(75, 3);
  // seed the mirror with one present edge via a forced refill
  Matching served(6);
  AdversaryView empty_view{&served, nullptr};
  UpdateEvent first = adv.generate_next(&empty_view, rng);  // refill: matching empty
  REQUIRE(first.kind == UpdateKind::insert);
  served.add(first.edge);
  AdversaryView view{&served, nullptr};
  UpdateEvent second = adv.generate_next(&view, rng);
  CHECK(second.kind == UpdateKind::erase);
  CHECK(second.edge == first.edge);
}

TEST_CASE("sparsifier eraser deletes edges of the sampled subgraph") {
  const int n = 30;
  FrameworkConfig fc;
  fc.n = n;
  fc.eps = 0.25;
  fc.d = 20;
  fc.seed = 10;
  RoundingFramework fw(fc);
  AdversaryConfig ac;
  ac.kind = AdversaryConfig::Kind::sparsifier_eraser;
  ac.refill_rate = 0.5;
  Adversary adv(ac, n);
  Rng rng = make_stream(76, 3);
  int erasures = 0;
  for (int i = 0; i < 1000; ++i) {
    std::set<EdgeKey> h_now(fw.last_sample().edges.begin(), fw.last_sample().edges.end());
    AdversaryView view{&fw.current_matching(), &fw.last_sample().edges};
    UpdateEvent ev = adv.generate_next(&view, rng);
    if (ev.kind == UpdateKind::erase) {
      REQUIRE(h_now.count(ev.edge) == 1);
      ++erasures;
    }
    fw.process_update(ev);
    REQUIRE(verify_matching(fw.graph(), fw.current_matching()));
  }
  CHECK(erasures > 100);
}

TEST_CASE("adaptive adversary without a view is rejected") {
  AdversaryConfig ac;
  ac.kind = AdversaryConfig::Kind::matched_deleter;
  ac.refill_rate = 0.5;
  Adversary adv(ac, 6);
  Rng rng = make_stream(77, 3);
  CHECK_THROWS_AS(adv.generate_next(nullptr, rng), Error);
}

TEST_CASE("run_experiment produces deterministic CSV and sane summaries") {
  ExperimentConfig cfg;
  cfg.n = 24;
  cfg.update_count = 400;
  cfg.seed = 2;
  cfg.framework.eps = 0.25;
  cfg.framework.d = 20;
  cfg.adversary.kind = AdversaryConfig::Kind::random_oblivious;
  cfg.keep_csv = true;

  auto a = run_experiment(cfg);
  auto b = run_experiment(cfg);
  CHECK(a.csv == b.csv);
  CHECK(a.valid);
  CHECK(a.ratio_defined_everywhere);
  CHECK(a.updates == 400);
  CHECK(a.csv.find("update,matching_size,mu,ratio") == 0);

  // a different seed changes the trace
  cfg.seed = 3;
  auto c = run_experiment(cfg);
  CHECK(c.csv != a.csv);

  // zero updates: header-only CSV
  cfg.update_count = 0;
  auto d = run_experiment(cfg);
  CHECK(d.csv == "update,matching_size,mu,ratio,x_value_sum,h_size,epoch,ops,wall_ns\n");
}

TEST_CASE("run_experiment with the det algorithm") {
  ExperimentConfig cfg;
  cfg.n = 32;
  cfg.update_count = 500;
  cfg.seed = 4;
  cfg.algo = ExperimentConfig::Algo::det;
  cfg.K = 2;
  cfg.adversary.kind = AdversaryConfig::Kind::random_oblivious;
  auto s = run_experiment(cfg);
  CHECK(s.valid);

  cfg.adversary.kind = AdversaryConfig::Kind::sparsifier_eraser;
  CHECK_THROWS_AS(run_experiment(cfg), Error);
}

TEST_CASE("parallel fan-out preserves per-seed results") {
  std::vector<ExperimentConfig> configs;
  for (uint64_t s = 1; s <= 4; ++s) {
    ExperimentConfig cfg;
    cfg.n = 20;
    cfg.update_count = 300;
    cfg.seed = s;
    cfg.framework.eps = 0.25;
    cfg.framework.d = 20;
    cfg.keep_csv = true;
    configs.push_back(cfg);
  }
  auto results = run_experiments_parallel(configs);
  REQUIRE(results.size() == 4);
  for (size_t i = 0; i < 4; ++i) {
    CHECK(results[i].valid);
    CHECK(results[i].csv == run_experiment(configs[i]).csv);
  }
}
