#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "dynmatch/det_tradeoff.hpp"
#include "dynmatch/harness.hpp"

using namespace dynmatch;

TEST_CASE("bucket placement and multiplicity formula") {
  MultiBucketFamily family(256, 2);
  double R = family.R();
  CHECK(R == Catch::Approx(16.0));
  CHECK(family.bucket_count() == static_cast<int>(std::ceil(2.0 * std::log(512.0) / std::log(R))));

  for (int i = 1; i <= family.bucket_count(); ++i) {
    // exact lower boundary: one copy in bucket i
    double x = std::pow(R, -i);
    auto b = family.bucket_for(x);
    REQUIRE(b.has_value());
    CHECK(*b == i);
    CHECK(family.multiplicity_for(x, i) == 1);
    // upper end of the range evaluates to ceil(R) copies
    CHECK(family.multiplicity_for(std::pow(R, -i + 1), i) ==
          static_cast<int>(std::ceil(R)));
  }

  CHECK(family.bucket_for(1.0) == 1);
  // below the smallest bucket: dropped
  CHECK_FALSE(family.bucket_for(std::pow(R, -family.bucket_count()) / 4.0).has_value());
  CHECK_THROWS_AS(family.bucket_for(0.0), Error);
}

TEST_CASE("value changes within a bucket adjust the copy count") {
  MultiBucketFamily family(64, 2);
  double R = family.R();
  double x1 = std::pow(R, -1);        // 1 copy in bucket 1
  double x2 = std::pow(R, -1) * 2.0;  // same bucket, 2 copies
  REQUIRE(family.bucket_for(x1) == family.bucket_for(x2));

  family.on_x_change(EdgeKey(0, 1), std::nullopt, x1);
  CHECK(family.buckets().at(1).multiplicity(EdgeKey(0, 1)) == 1);
  family.on_x_change(EdgeKey(0, 1), x1, x2);
  CHECK(family.buckets().at(1).multiplicity(EdgeKey(0, 1)) == 2);
  family.on_x_change(EdgeKey(0, 1), x2, std::nullopt);
  CHECK(family.buckets().at(1).multiplicity(EdgeKey(0, 1)) == 0);
}

TEST_CASE("dropped mass is tracked by direct summation") {
  MultiBucketFamily family(64, 2);
  double tiny = std::pow(family.R(), -family.bucket_count()) / 8.0;
  for (VertexId v = 1; v <= 30; ++v) family.on_x_change(EdgeKey(0, v), std::nullopt, tiny);
  CHECK(family.dropped_mass() == Catch::Approx(30 * tiny));
  CHECK(family.dropped_mass() <= 0.25);
  family.on_x_change(EdgeKey(0, 1), tiny, std::nullopt);
  CHECK(family.dropped_mass() == Catch::Approx(29 * tiny));
}

TEST_CASE("largest class matching basics") {
  MultiBucketFamily empty(16, 2);
  CHECK(empty.largest_class_matching().size() == 0);

  MultiBucketFamily single(16, 2);
  single.on_x_change(EdgeKey(0, 1), std::nullopt, 0.5);
  Matching m = single.largest_class_matching();
  CHECK(m.size() == 1);
  CHECK(m.has(EdgeKey(0, 1)));
}

TEST_CASE("full algorithm: validity, pigeonhole, ratio on random churn") {
  const int n = 64;
  DetTradeoffAlgorithm algo(n, 2);
  AdversaryConfig ac;
  ac.kind = AdversaryConfig::Kind::random_oblivious;
  ac.p_insert = 0.65;
  Adversary adv(ac, n);
  Rng rng = make_stream(51, 3);
  Matching oracle(n);
  for (int step = 1; step <= 4000; ++step) {
    algo.process_update(adv.generate_next(nullptr, rng));
    Matching m = algo.current_matching();
    REQUIRE(verify_matching(algo.graph(), m));
    REQUIRE(m.size() >= algo.family().pigeonhole_lower_bound());
    REQUIRE(algo.family().dropped_mass() <= 0.25);
    if (step % 200 == 0) {
      Matching warm(n);
      for (const EdgeKey& e : oracle.edges())
        if (algo.graph().contains(e)) warm.add(e);
      oracle = max_matching_exact(algo.graph(), &warm);
      if (m.size() > 0) CHECK(static_cast<double>(oracle.size()) / m.size() <= 8.0);
    }
  }
}
