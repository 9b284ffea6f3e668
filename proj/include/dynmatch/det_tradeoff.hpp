// Deterministic approximation/update-time tradeoff: value-weighted
// multigraph buckets with proper colorings, serving the largest color
// class across all buckets.
//
// With R = n^(1/K), bucket i covers values in [R^-i, R^-(i-1)); an edge of
// value x placed in bucket i appears as ceil(x * R^i) parallel instances.
// The fractional matching constraint caps an endpoint's instance count in
// bucket i by 2 R^i, so each bucket colors with degree cap 2 ceil(R^i) and
// palette 2*cap - 1. Every color class is a matching, and the largest one
// carries a constant-per-bucket fraction of the bucket's value mass.

#ifndef DYNMATCH_DET_TRADEOFF_HPP
#define DYNMATCH_DET_TRADEOFF_HPP

#include <cmath>
#include <map>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "dynmatch/core.hpp"
#include "dynmatch/edge_coloring.hpp"
#include "dynmatch/fractional_matching.hpp"
#include "dynmatch/graph.hpp"
#include "dynmatch/matching.hpp"

namespace dynmatch {

class MultiBucketFamily {
 public:
  MultiBucketFamily(int n, int K)
      : n_(n), r_(std::pow(static_cast<double>(n), 1.0 / K)) {
    if (n < 2 || K < 1) throw Error(Errc::invalid_value, "bad family parameters");
    bucket_count_ = static_cast<int>(std::ceil(2.0 * std::log(2.0 * n) / std::log(r_)));
  }

  double R() const { return r_; }
  int bucket_count() const { return bucket_count_; }

  // Bucket holding value x: the unique i >= 1 with R^-i <= x < R^-(i-1),
  // with x = 1 in bucket 1; nullopt below the smallest bucket.
  std::optional<int> bucket_for(double x) const {
    if (!(x > 0.0) || x > 1.0) throw Error(Errc::invalid_value, "x outside (0,1]");
    int i = static_cast<int>(std::ceil(std::log(1.0 / x) / std::log(r_)));
    if (i < 1) i = 1;
    while (i > 1 && x >= std::pow(r_, -(i - 1))) --i;
    while (x < std::pow(r_, -i)) ++i;
    return i <= bucket_count_ ? std::optional<int>(i) : std::nullopt;
  }

  // Parallel instances an edge of value x carries in bucket i.
  int multiplicity_for(double x, int bucket) const {
    return static_cast<int>(std::ceil(x * std::pow(r_, bucket) - 1e-12));
  }

  int degree_cap_for(int bucket) const {
    return 2 * static_cast<int>(std::ceil(std::pow(r_, bucket)));
  }
  int palette_for(int bucket) const { return 2 * degree_cap_for(bucket) - 1; }

  void on_x_change(EdgeKey e, std::optional<double> old_x, std::optional<double> new_x) {
    if (old_x) detach(e);
    if (new_x) attach(e, *new_x);
    ++work_ops_;
  }

  Matching largest_class_matching() const {
    Matching m(n_);
    int best_size = 0;
    const ColoredMultigraph* best = nullptr;
    ColorId best_color = 0;
    for (const auto& [i, cg] : buckets_) {
      auto [c, size] = cg.largest_color_class();
      if (size > best_size) {
        best_size = size;
        best = &cg;
        best_color = c;
      }
    }
    if (best)
      for (const EdgeKey& e : best->color_class(best_color)) m.add(e);
    return m;
  }

  // Largest guaranteed size by pigeonhole: max_i ceil(instances_i / palette_i).
  int pigeonhole_lower_bound() const {
    int best = 0;
    for (const auto& [i, cg] : buckets_) {
      if (cg.instance_count() == 0) continue;
      int bound = (cg.instance_count() + cg.palette_size() - 1) / cg.palette_size();
      best = std::max(best, bound);
    }
    return best;
  }

  double dropped_mass() const {
    double s = 0.0;
    for (const auto& [e, x] : dropped_) s += x;
    return s;
  }

  const std::map<int, ColoredMultigraph>& buckets() const { return buckets_; }
  uint64_t work_ops() const { return work_ops_; }

 private:
  void attach(EdgeKey e, double x) {
    auto bucket = bucket_for(x);
    if (!bucket) {
      dropped_[e] = x;
      return;
    }
    auto it = buckets_.find(*bucket);
    if (it == buckets_.end())
      it = buckets_
               .emplace(std::piecewise_construct, std::forward_as_tuple(*bucket),
                        std::forward_as_tuple(n_, degree_cap_for(*bucket), palette_for(*bucket)))
               .first;
    int copies = multiplicity_for(x, *bucket);
    for (int c = 0; c < copies; ++c) it->second.insert_colored(e);
    placed_[e] = *bucket;
    work_ops_ += static_cast<uint64_t>(copies);
  }

  void detach(EdgeKey e) {
    auto dit = dropped_.find(e);
    if (dit != dropped_.end()) {
      dropped_.erase(dit);
      return;
    }
    auto pit = placed_.find(e);
    if (pit == placed_.end()) throw Error(Errc::missing_edge, "edge not tracked");
    auto& cg = buckets_.at(pit->second);
    for (ColorId c : cg.colors_of(e)) cg.delete_colored(e, c);
    placed_.erase(pit);
  }

  int n_;
  double r_;
  int bucket_count_ = 0;
  std::map<int, ColoredMultigraph> buckets_;
  std::unordered_map<EdgeKey, int, EdgeKeyHash> placed_;
  std::unordered_map<EdgeKey, double, EdgeKeyHash> dropped_;
  uint64_t work_ops_ = 0;
};

// The full deterministic algorithm: a fractional matcher run at eps = 1/2
// feeding value changes into the bucket family. Takes the same matcher
// plugin as the rounding framework.
template <class FractionalMatcher = FractionalMatching>
class BasicDetTradeoff {
 public:
  BasicDetTradeoff(int n, int K) : graph_(n), fractional_(n, 0.5), family_(n, K) {}

  void process_update(const UpdateEvent& ev) {
    if (ev.kind == UpdateKind::query) return;
    uint64_t before = fractional_.work_ops() + family_.work_ops();
    ChangeBatch batch;
    if (ev.kind == UpdateKind::insert) {
      graph_.insert_edge(ev.edge);
      batch = fractional_.on_insert(ev.edge);
    } else {
      graph_.delete_edge(ev.edge);
      batch = fractional_.on_delete(ev.edge);
    }
    // all removals before all insertions, so transient degrees in the
    // bucket colorings never exceed the post-update bound
    for (const XChange& ch : batch.changes)
      if (ch.old_exponent)
        family_.on_x_change(ch.edge, fractional_.power(*ch.old_exponent), std::nullopt);
    for (const XChange& ch : batch.changes)
      if (ch.new_exponent)
        family_.on_x_change(ch.edge, std::nullopt, fractional_.power(*ch.new_exponent));
    ops_last_update_ = fractional_.work_ops() + family_.work_ops() - before + 1;
  }

  Matching current_matching() const { return family_.largest_class_matching(); }

  const DynamicGraph& graph() const { return graph_; }
  const FractionalMatcher& fractional() const { return fractional_; }
  const MultiBucketFamily& family() const { return family_; }
  uint64_t ops_last_update() const { return ops_last_update_; }

 private:
  DynamicGraph graph_;
  FractionalMatcher fractional_;
  MultiBucketFamily family_;
  uint64_t ops_last_update_ = 0;
};

using DetTradeoffAlgorithm = BasicDetTradeoff<>;

}  // namespace dynmatch

#endif  // DYNMATCH_DET_TRADEOFF_HPP
