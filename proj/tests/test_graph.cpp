#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <sstream>

#include "dynmatch/graph.hpp"

using namespace dynmatch;

TEST_CASE("insert and delete maintain edge count") {
  DynamicGraph g(4);
  g.insert_edge(EdgeKey(0, 1));
  CHECK(g.edge_count() == 1);
  CHECK(g.contains(EdgeKey(1, 0)));  // canonical identity

  g.delete_edge(EdgeKey(0, 1));
  CHECK(g.edge_count() == 0);
  CHECK_FALSE(g.contains(EdgeKey(0, 1)));
}

TEST_CASE("precondition violations raise typed errors") {
  DynamicGraph g(4);
  g.insert_edge(EdgeKey(0, 1));
  try {
    g.insert_edge(EdgeKey(0, 1));
    FAIL("expected duplicate_edge");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::duplicate_edge);
  }
  try {
    EdgeKey self(2, 2);
    FAIL("expected self_loop");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::self_loop);
  }
  try {
    g.delete_edge(EdgeKey(2, 3));
    FAIL("expected missing_edge");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::missing_edge);
  }
  try {
    g.degree(7);
    FAIL("expected vertex_out_of_range");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::vertex_out_of_range);
  }
}

TEST_CASE("degree bookkeeping across deletions") {
  DynamicGraph g(3);
  g.insert_edge(EdgeKey(0, 1));
  g.insert_edge(EdgeKey(1, 2));
  g.delete_edge(EdgeKey(0, 1));
  CHECK(g.degree(1) == 1);
}

TEST_CASE("star queries") {
  DynamicGraph g(4);
  for (VertexId v : {1, 2, 3}) g.insert_edge(EdgeKey(0, v));
  CHECK(g.degree(0) == 3);
  CHECK_FALSE(g.contains(EdgeKey(1, 2)));
  auto nb = g.neighbors(0);
  CHECK(std::vector<VertexId>(nb.begin(), nb.end()) == std::vector<VertexId>{1, 2, 3});
}

TEST_CASE("replay agrees with a set-based reference") {
  const int n = 40;
  DynamicGraph g(n);
  std::set<EdgeKey> reference;
  Rng rng = make_stream(3, 1);
  std::uniform_int_distribution<VertexId> pick(0, n - 1);
  std::uniform_real_distribution<double> coin(0.0, 1.0);

  for (int step = 0; step < 20000; ++step) {
    VertexId u = pick(rng), v = pick(rng);
    if (u == v) continue;
    EdgeKey e(u, v);
    if (reference.count(e) == 0 && (coin(rng) < 0.6 || reference.empty())) {
      g.insert_edge(e);
      reference.insert(e);
    } else if (reference.count(e)) {
      g.delete_edge(e);
      reference.erase(e);
    }
  }

  auto edges = g.edges();
  CHECK(edges.size() == reference.size());
  CHECK(std::set<EdgeKey>(edges.begin(), edges.end()) == reference);

  long long degree_sum = 0;
  for (VertexId v = 0; v < n; ++v) degree_sum += g.degree(v);
  CHECK(degree_sum == 2 * g.edge_count());
}

TEST_CASE("update stream format round trip") {
  std::string text = "a 0 1\na 1 2\nq\nd 0 1\nq\n";
  std::istringstream in(text);
  auto events = parse_update_stream(in);
  REQUIRE(events.size() == 5);
  CHECK(events[0].kind == UpdateKind::insert);
  CHECK(events[2].kind == UpdateKind::query);
  CHECK(events[3].kind == UpdateKind::erase);
  CHECK(events[3].edge == EdgeKey(0, 1));

  std::ostringstream out;
  write_update_stream(out, events);
  CHECK(out.str() == text);
}

TEST_CASE("malformed stream lines are rejected") {
  std::istringstream bad("a 0\n");
  CHECK_THROWS_AS(parse_update_stream(bad), Error);
  std::istringstream bad2("x 0 1\n");
  CHECK_THROWS_AS(parse_update_stream(bad2), Error);
}
