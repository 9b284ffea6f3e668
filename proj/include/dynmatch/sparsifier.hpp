// Edge-color-and-sparsify: bucket edges by value range, keep a proper
// edge coloring per bucket, sample colors without replacement, take the
// union of the sampled classes.
//
// Bucket i holds edges with value in ((1+eps)^-i, (1+eps)^-(i-1)]; an edge
// whose exact exponent is k lands in bucket k+1, so membership never
// depends on floating-point boundaries. Bucket i's coloring uses degree
// cap ceil((1+eps)^i) and palette gamma * ceil((1+eps)^i).
//
// Two sample-count policies per nonempty bucket:
//  - algorithm_one: min(gamma * ceil(d(1+eps)), palette) colors.
//  - proof_variant: the whole palette while (1+eps)^(i-1) < d, otherwise
//    min(gamma * ceil(d), palette). The full-palette clause keeps every
//    edge with value above 1/d in the sample with probability one.

#ifndef DYNMATCH_SPARSIFIER_HPP
#define DYNMATCH_SPARSIFIER_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "dynmatch/core.hpp"
#include "dynmatch/edge_coloring.hpp"
#include "dynmatch/fractional_matching.hpp"

namespace dynmatch {

struct SparsifyParams {
  enum class Policy { algorithm_one, proof_variant };

  double eps = 0.25;
  double d = 1.0;
  int gamma = 2;
  Policy policy = Policy::proof_variant;
};

inline int bucket_index_limit(int n, double eps) {
  return static_cast<int>(std::ceil(2.0 * std::log(n / eps) / std::log1p(eps)));
}

// Bucket of a raw value: the unique i >= 1 with
// (1+eps)^-i < x <= (1+eps)^-(i-1), or nullopt once i would exceed the
// index limit (such edges are dropped from the sparsifier).
inline std::optional<int> bucket_of(double x, double eps, int n) {
  if (!(x > 0.0) || x > 1.0) throw Error(Errc::invalid_value, "x outside (0,1]");
  int i = static_cast<int>(std::floor(std::log(1.0 / x) / std::log1p(eps))) + 1;
  // local correction for floating-point rounding at range boundaries
  while (i > 1 && x > std::pow(1.0 + eps, -(i - 1))) --i;
  while (x <= std::pow(1.0 + eps, -i)) ++i;
  if (i < 1) i = 1;
  return i <= bucket_index_limit(n, eps) ? std::optional<int>(i) : std::nullopt;
}

// (bucket, color, edge) record appended to the epoch delta log.
struct ColorDelta {
  int bucket;
  ColorId color;
  EdgeKey edge;
  bool added;
};

class BucketedColoring {
 public:
  BucketedColoring(int n, double eps, int gamma)
      : n_(n), eps_(eps), gamma_(gamma), index_limit_(bucket_index_limit(n, eps)) {
    if (gamma < 2 || gamma > 3) throw Error(Errc::invalid_value, "gamma must be 2 or 3");
  }

  int vertex_count() const { return n_; }
  double eps() const { return eps_; }
  int gamma() const { return gamma_; }
  int index_limit() const { return index_limit_; }
  bool randomized() const { return gamma_ == 3; }

  // Exact bucket of an edge whose value is (1+eps)^-k.
  std::optional<int> bucket_of_exponent(int k) const {
    int i = k + 1;
    return i <= index_limit_ ? std::optional<int>(i) : std::nullopt;
  }

  int degree_cap_for(int bucket) const {
    return static_cast<int>(std::ceil(std::pow(1.0 + eps_, bucket)));
  }
  int palette_for(int bucket) const { return gamma_ * degree_cap_for(bucket); }

  const std::map<int, ColoredMultigraph>& buckets() const { return buckets_; }

  std::optional<std::pair<int, ColorId>> locate(EdgeKey e) const {
    auto it = where_.find(e);
    if (it == where_.end()) return std::nullopt;
    return it->second;
  }

  int bucketed_edge_count() const { return static_cast<int>(where_.size()); }
  int dropped_edge_count() const { return static_cast<int>(dropped_.size()); }
  const std::unordered_set<EdgeKey, EdgeKeyHash>& dropped_edges() const { return dropped_; }

  // Applies a fractional-matching change batch: all removals first, then
  // all insertions, so per-vertex degree caps are never transiently
  // exceeded inside one update. rng is only consulted when gamma = 3.
  void apply_change_batch(const ChangeBatch& batch, std::vector<ColorDelta>* delta_log,
                          Rng* rng = nullptr) {
    for (const XChange& ch : batch.changes)
      if (ch.old_exponent) remove_edge(ch.edge, delta_log);
    for (const XChange& ch : batch.changes)
      if (ch.new_exponent) insert_edge(ch.edge, *ch.new_exponent, delta_log, rng);
    work_ops_ += batch.changes.size();
  }

  uint64_t work_ops() const { return work_ops_; }

  // Drops bucket structures that ended up empty. Safe between epochs once
  // the delta log referencing them has been discarded.
  void prune_empty_buckets() {
    for (auto it = buckets_.begin(); it != buckets_.end();)
      it = it->second.instance_count() == 0 ? buckets_.erase(it) : std::next(it);
  }

 private:
  void remove_edge(EdgeKey e, std::vector<ColorDelta>* delta_log) {
    auto it = where_.find(e);
    if (it == where_.end()) {
      if (dropped_.erase(e) == 0)
        throw Error(Errc::missing_edge, "batch removes an edge the buckets never saw");
      return;
    }
    auto [bucket, color] = it->second;
    buckets_.at(bucket).delete_colored(e, color);
    ++work_ops_;
    if (delta_log) delta_log->push_back({bucket, color, e, false});
    where_.erase(it);
  }

  void insert_edge(EdgeKey e, int exponent, std::vector<ColorDelta>* delta_log, Rng* rng) {
    auto bucket = bucket_of_exponent(exponent);
    if (!bucket) {
      dropped_.insert(e);
      return;
    }
    auto bit = buckets_.find(*bucket);
    if (bit == buckets_.end())
      bit = buckets_
                .emplace(std::piecewise_construct, std::forward_as_tuple(*bucket),
                         std::forward_as_tuple(n_, degree_cap_for(*bucket), palette_for(*bucket)))
                .first;
    ColorId color;
    if (randomized()) {
      if (!rng) throw Error(Errc::invalid_value, "randomized coloring needs an rng");
      color = bit->second.insert_colored_randomized(e, *rng);
      work_ops_ += static_cast<uint64_t>(bit->second.last_draw_count());
    } else {
      color = bit->second.insert_colored(e);
      work_ops_ += static_cast<uint64_t>(bit->second.last_probe_count());
    }
    where_[e] = {*bucket, color};
    if (delta_log) delta_log->push_back({*bucket, color, e, true});
  }

  int n_;
  double eps_;
  int gamma_;
  int index_limit_;
  std::map<int, ColoredMultigraph> buckets_;
  std::unordered_map<EdgeKey, std::pair<int, ColorId>, EdgeKeyHash> where_;
  std::unordered_set<EdgeKey, EdgeKeyHash> dropped_;
  uint64_t work_ops_ = 0;
};

inline int sample_count(const SparsifyParams& p, int bucket, int palette) {
  switch (p.policy) {
    case SparsifyParams::Policy::algorithm_one: {
      int want = p.gamma * static_cast<int>(std::ceil(p.d * (1.0 + p.eps)));
      return std::min(want, palette);
    }
    case SparsifyParams::Policy::proof_variant: {
      if (std::pow(1.0 + p.eps, bucket - 1) < p.d) return palette;
      int want = p.gamma * static_cast<int>(std::ceil(p.d));
      return std::min(want, palette);
    }
  }
  return palette;
}

// k distinct values from [0, palette), ascending. Partial Fisher-Yates in
// O(k) space; a full draw takes the whole palette without touching rng.
inline std::vector<ColorId> sample_colors_without_replacement(int palette, int k, Rng& rng) {
  std::vector<ColorId> out;
  out.reserve(static_cast<size_t>(k));
  if (k >= palette) {
    for (ColorId c = 0; c < palette; ++c) out.push_back(c);
    return out;
  }
  std::unordered_map<int, int> swapped;
  for (int i = 0; i < k; ++i) {
    std::uniform_int_distribution<int> pick(i, palette - 1);
    int j = pick(rng);
    auto ji = swapped.find(j);
    int value_j = ji == swapped.end() ? j : ji->second;
    auto ii = swapped.find(i);
    int value_i = ii == swapped.end() ? i : ii->second;
    swapped[j] = value_i;
    out.push_back(value_j);
  }
  std::sort(out.begin(), out.end());
  return out;
}

struct SparsifierSample {
  std::map<int, std::vector<ColorId>> sampled_colors;  // per bucket, ascending
  std::vector<EdgeKey> edges;                          // union of sampled classes
  std::unordered_set<EdgeKey, EdgeKeyHash> members;
  int color_draw_total = 0;  // sum of k_i over nonempty buckets

  bool contains(EdgeKey e) const { return members.count(e) != 0; }
};

inline SparsifierSample sample_sparsifier(const BucketedColoring& bc, const SparsifyParams& params,
                                          Rng& rng) {
  SparsifierSample sample;
  for (const auto& [bucket, coloring] : bc.buckets()) {
    if (coloring.instance_count() == 0) continue;
    int k = sample_count(params, bucket, coloring.palette_size());
    sample.color_draw_total += k;
    auto colors = sample_colors_without_replacement(coloring.palette_size(), k, rng);
    for (ColorId c : colors) {
      auto cls = coloring.color_class(c);
      std::sort(cls.begin(), cls.end());
      for (const EdgeKey& e : cls) {
        sample.edges.push_back(e);
        sample.members.insert(e);
      }
    }
    sample.sampled_colors.emplace(bucket, std::move(colors));
  }
  return sample;
}

// Removes every edge with an endpoint of degree above d(1+4 eps) in h.
inline std::vector<EdgeKey> trim_high_degree(int n, const std::vector<EdgeKey>& h, double d,
                                             double eps) {
  const double threshold = d * (1.0 + 4.0 * eps);
  std::vector<int> deg(static_cast<size_t>(n), 0);
  for (const EdgeKey& e : h) {
    ++deg[e.u];
    ++deg[e.v];
  }
  std::vector<EdgeKey> out;
  out.reserve(h.size());
  for (const EdgeKey& e : h)
    if (deg[e.u] <= threshold && deg[e.v] <= threshold) out.push_back(e);
  return out;
}

inline double estimate_membership_probability(const BucketedColoring& bc,
                                              const SparsifyParams& params, EdgeKey e, int trials,
                                              Rng& rng) {
  if (trials < 1) throw Error(Errc::invalid_value, "trials must be positive");
  int hits = 0;
  for (int t = 0; t < trials; ++t)
    if (sample_sparsifier(bc, params, rng).contains(e)) ++hits;
  return static_cast<double>(hits) / trials;
}

}  // namespace dynmatch

#endif  // DYNMATCH_SPARSIFIER_HPP
