// Dynamic rounding of a fractional matching into an integral one, robust
// to adversaries that read the entire state between updates.
//
// Time is divided into epochs. Epoch t starts with fractional value
// S_t = |x|_1 and runs for L_t = 1 update when S_t <= 1/eps, otherwise
// ceil(eps * S_t) updates. At the end of an epoch the framework samples a
// sparsifier H from the edge colorings as they stood at the epoch's start
// (reconstructed through the epoch's delta log), computes a matching in H,
// drops whatever the adversary deleted meanwhile, and serves the rest
// during the next epoch. Length-one epochs skip the lag: their sample is
// taken from the live colorings inside the same update.
//
// Batch mode performs the sampling and matching at the roll; stepped mode
// spreads the identical computation over the epoch in bounded slices. The
// sampling randomness lives on its own stream and every intermediate
// collection is canonically ordered, so both modes produce the same
// matching from the same seed.

#ifndef DYNMATCH_FRAMEWORK_HPP
#define DYNMATCH_FRAMEWORK_HPP

#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <set>
#include <utility>
#include <vector>

#include "dynmatch/core.hpp"
#include "dynmatch/edge_coloring.hpp"
#include "dynmatch/fractional_matching.hpp"
#include "dynmatch/graph.hpp"
#include "dynmatch/matching.hpp"
#include "dynmatch/sparsifier.hpp"

namespace dynmatch {

enum class WorkMode { batch, stepped };
enum class StaticMatcherKind { exact, bounded_path };

struct FrameworkConfig {
  int n = 0;
  double eps = 0.1;
  double d = 1.0;
  int gamma = 2;
  SparsifyParams::Policy policy = SparsifyParams::Policy::proof_variant;
  WorkMode work_mode = WorkMode::batch;
  StaticMatcherKind matcher = StaticMatcherKind::exact;
  uint64_t seed = 0;

  SparsifyParams sparsify() const { return {eps, d, gamma, policy}; }
};

struct EpochState {
  int index = 0;
  double start_value = 0.0;
  int length = 1;
  int elapsed = 0;

  // Per (bucket, color): chronological records and the net add count per
  // edge. present_at_start = present_now - net, so the epoch-start classes
  // are recoverable at any moment of the epoch.
  std::vector<ColorDelta> records;
  std::map<std::pair<int, ColorId>, std::unordered_map<EdgeKey, int, EdgeKeyHash>> net;
  std::map<int, long long> bucket_net;

  void log(const ColorDelta& d) {
    records.push_back(d);
    net[{d.bucket, d.color}][d.edge] += d.added ? 1 : -1;
    bucket_net[d.bucket] += d.added ? 1 : -1;
  }

  void reset(int new_index, double s, int l) {
    index = new_index;
    start_value = s;
    length = l;
    elapsed = 0;
    records.clear();
    net.clear();
    bucket_net.clear();
  }
};

namespace detail {

// Exact or bounded-length augmentation over a fixed edge list, resumable
// one root at a time so stepped mode can slice the work.
class ResumableMatcher {
 public:
  ResumableMatcher(int n, const std::vector<EdgeKey>& edges, StaticMatcherKind kind, double eps)
      : n_(n),
        kind_(kind),
        max_len_(2 * static_cast<int>(std::ceil(1.0 / eps)) + 1),
        adj_(adjacency_of(n, edges)),
        search_(adj_) {
    Matching seed(n);
    greedy_fill(edges, seed);
    search_.seed(seed);
  }

  bool finished() const { return finished_; }

  int remaining_estimate() const { return finished_ ? 0 : std::max(1, n_ - root_); }

  // Processes one root; returns scanned-edge cost of the step.
  uint64_t step() {
    if (finished_) return 0;
    uint64_t before = search_.scanned_edges();
    while (root_ < n_ && !search_.free(root_)) ++root_;
    if (root_ == n_) {
      if (kind_ == StaticMatcherKind::bounded_path && progressed_) {
        progressed_ = false;
        root_ = 0;  // another pass; quiesces once no short augmentation remains
      } else {
        finished_ = true;
      }
      return 1;
    }
    VertexId end = search_.find_path(root_);
    if (end != -1) {
      if (kind_ == StaticMatcherKind::exact) {
        search_.augment(end);
      } else {
        auto path = search_.extract_path(end);
        if (static_cast<int>(path.size()) - 1 < max_len_) {
          search_.augment(end);
          progressed_ = true;
        }
      }
    }
    ++root_;
    return search_.scanned_edges() - before + 1;
  }

  uint64_t run_to_completion() {
    uint64_t cost = 0;
    while (!finished_) cost += step();
    return cost;
  }

  Matching result() const { return search_.result(); }

 private:
  int n_;
  StaticMatcherKind kind_;
  int max_len_;
  std::vector<std::vector<VertexId>> adj_;
  BlossomSearch search_;
  VertexId root_ = 0;
  bool progressed_ = false;
  bool finished_ = false;
};

}  // namespace detail

// The fractional matcher is a plugin: any type constructible from
// (n, eps) that emits exponent-keyed ChangeBatches from on_insert /
// on_delete and exposes value_sum(), power() and work_ops() can replace
// the default hierarchical-partition matcher.
template <class FractionalMatcher = FractionalMatching>
class BasicRoundingFramework {
 public:
  explicit BasicRoundingFramework(FrameworkConfig cfg)
      : cfg_(cfg),
        graph_(cfg.n),
        fractional_(cfg.n, cfg.eps),
        buckets_(cfg.n, cfg.eps, cfg.gamma),
        served_(cfg.n),
        coloring_rng_(make_stream(cfg.seed, 1)),
        sampling_rng_(make_stream(cfg.seed, 2)) {
    if (!(cfg.eps > 0.0 && cfg.eps < 0.5))
      throw Error(Errc::invalid_value, "eps outside (0, 1/2)");
    if (cfg.d < 1.0) throw Error(Errc::invalid_value, "d must be >= 1");
    epoch_.reset(0, 0.0, 1);
  }

  struct StateView {
    const DynamicGraph& graph;
    const FractionalMatcher& fractional;
    const BucketedColoring& buckets;
    const Matching& served;
    const SparsifierSample& last_sample;
    const EpochState& epoch;
    uint64_t ops_last_update;
  };

  void process_update(const UpdateEvent& ev) {
    if (ev.kind == UpdateKind::query) return;
    uint64_t fm_before = fractional_.work_ops();
    uint64_t bc_before = buckets_.work_ops();
    uint64_t roll_cost = 0;

    ChangeBatch batch;
    if (ev.kind == UpdateKind::insert) {
      graph_.insert_edge(ev.edge);
      batch = fractional_.on_insert(ev.edge);
    } else {
      graph_.delete_edge(ev.edge);
      batch = fractional_.on_delete(ev.edge);
      if (served_.has(ev.edge)) served_.remove(ev.edge);
    }

    delta_buffer_.clear();
    buckets_.apply_change_batch(batch, &delta_buffer_, &coloring_rng_);
    for (const ColorDelta& d : delta_buffer_) epoch_.log(d);

    ++epoch_.elapsed;
    if (epoch_.elapsed >= epoch_.length) {
      roll_cost = roll();
    } else if (pipeline_) {
      int updates_left = epoch_.length - epoch_.elapsed;
      uint64_t budget =
          (pipeline_remaining_units() + static_cast<uint64_t>(updates_left) - 1) / updates_left;
      roll_cost = advance_pipeline(budget);
    }

    ops_last_update_ = (fractional_.work_ops() - fm_before) + (buckets_.work_ops() - bc_before) +
                       batch.changes.size() + roll_cost + 1;
    ops_total_ += ops_last_update_;
  }

  const Matching& current_matching() const { return served_; }

  StateView expose_state() const {
    return {graph_, fractional_, buckets_, served_, last_sample_, epoch_, ops_last_update_};
  }

  const DynamicGraph& graph() const { return graph_; }
  const FractionalMatcher& fractional() const { return fractional_; }
  const BucketedColoring& buckets() const { return buckets_; }
  const EpochState& epoch() const { return epoch_; }
  const SparsifierSample& last_sample() const { return last_sample_; }
  const FrameworkConfig& config() const { return cfg_; }

  uint64_t ops_last_update() const { return ops_last_update_; }
  uint64_t ops_total() const { return ops_total_; }

  // size of the last pending matching before survivor filtering
  int last_pending_size() const { return last_pending_size_; }

 private:
  long long instances_now(int bucket) const {
    auto it = buckets_.buckets().find(bucket);
    return it == buckets_.buckets().end() ? 0 : it->second.instance_count();
  }

  long long instances_at_epoch_start(int bucket) const {
    auto it = epoch_.bucket_net.find(bucket);
    long long net = it == epoch_.bucket_net.end() ? 0 : it->second;
    return instances_now(bucket) - net;
  }

  // Class (bucket, color) as it stood at the start of the epoch.
  std::vector<EdgeKey> snapshot_class(int bucket, ColorId color) const {
    std::vector<EdgeKey> out;
    const std::unordered_map<EdgeKey, int, EdgeKeyHash>* net = nullptr;
    auto nit = epoch_.net.find({bucket, color});
    if (nit != epoch_.net.end()) net = &nit->second;

    auto bit = buckets_.buckets().find(bucket);
    if (bit != buckets_.buckets().end()) {
      for (const EdgeKey& e : bit->second.color_class(color)) {
        int n = 0;
        if (net) {
          auto eit = net->find(e);
          if (eit != net->end()) n = eit->second;
        }
        if (n <= 0) out.push_back(e);
      }
    }
    if (net)
      for (const auto& [e, n] : *net)
        if (n < 0) out.push_back(e);
    std::sort(out.begin(), out.end());
    return out;
  }

  // Buckets occupied at the start of the epoch, ascending.
  std::vector<int> snapshot_buckets() const {
    std::set<int> keys;
    for (const auto& [b, cg] : buckets_.buckets())
      if (cg.instance_count() > 0) keys.insert(b);
    for (const auto& [b, net] : epoch_.bucket_net) keys.insert(b);
    std::vector<int> out;
    for (int b : keys)
      if (instances_at_epoch_start(b) > 0) out.push_back(b);
    return out;
  }

  // Draws the sampled color set for the epoch-start snapshot. Consumed at
  // the roll in batch mode and at the epoch start in stepped mode; the
  // occupancy is identical at both points, so the draws agree.
  SparsifierSample draw_snapshot_colors() {
    SparsifierSample sample;
    SparsifyParams params = cfg_.sparsify();
    for (int b : snapshot_buckets()) {
      int palette = buckets_.palette_for(b);
      int k = sample_count(params, b, palette);
      sample.color_draw_total += k;
      sample.sampled_colors.emplace(b, sample_colors_without_replacement(palette, k, sampling_rng_));
    }
    return sample;
  }

  // Live-state sample for length-one epochs: fresh H from the current
  // colorings inside the same update.
  SparsifierSample draw_live_sample() { return sample_sparsifier(buckets_, cfg_.sparsify(), sampling_rng_); }

  void fill_from_snapshot(SparsifierSample& sample) {
    for (const auto& [bucket, colors] : sample.sampled_colors)
      for (ColorId c : colors)
        for (const EdgeKey& e : snapshot_class(bucket, c)) {
          sample.edges.push_back(e);
          sample.members.insert(e);
        }
  }

  Matching filtered_against_graph(const Matching& m) const {
    Matching out(cfg_.n);
    for (const EdgeKey& e : m.edges())
      if (graph_.contains(e)) out.add(e);
    return out;
  }

  struct Pipeline {
    SparsifierSample sample;
    std::vector<std::pair<int, ColorId>> class_list;
    size_t next_class = 0;
    std::unique_ptr<detail::ResumableMatcher> matcher;
    bool done = false;
  };

  uint64_t pipeline_remaining_units() const {
    if (!pipeline_ || pipeline_->done) return 0;
    uint64_t units = pipeline_->class_list.size() - pipeline_->next_class;
    units += 1;  // matcher construction
    units += pipeline_->matcher ? static_cast<uint64_t>(pipeline_->matcher->remaining_estimate())
                                : static_cast<uint64_t>(cfg_.n);
    return units;
  }

  uint64_t advance_pipeline(uint64_t budget) {
    uint64_t cost = 0;
    Pipeline& p = *pipeline_;
    while (budget > 0 && !p.done) {
      if (p.next_class < p.class_list.size()) {
        auto [b, c] = p.class_list[p.next_class++];
        for (const EdgeKey& e : snapshot_class(b, c)) {
          p.sample.edges.push_back(e);
          p.sample.members.insert(e);
          ++cost;
        }
        --budget;
      } else if (!p.matcher) {
        p.matcher = std::make_unique<detail::ResumableMatcher>(cfg_.n, p.sample.edges,
                                                               cfg_.matcher, cfg_.eps);
        ++cost;
        --budget;
      } else {
        cost += p.matcher->step();
        --budget;
        if (p.matcher->finished()) p.done = true;
      }
    }
    return cost;
  }

  // Ends the epoch: produce H and its matching, serve the survivors, then
  // open the next epoch (discarding the finished epoch's delta log).
  uint64_t roll() {
    uint64_t cost = 0;
    SparsifierSample sample;
    Matching pending(cfg_.n);

    if (epoch_.length == 1) {
      sample = draw_live_sample();
      detail::ResumableMatcher matcher(cfg_.n, sample.edges, cfg_.matcher, cfg_.eps);
      cost += matcher.run_to_completion() + sample.edges.size() + sample.color_draw_total;
      pending = matcher.result();
    } else if (cfg_.work_mode == WorkMode::batch) {
      sample = draw_snapshot_colors();
      fill_from_snapshot(sample);
      detail::ResumableMatcher matcher(cfg_.n, sample.edges, cfg_.matcher, cfg_.eps);
      cost += matcher.run_to_completion() + sample.edges.size() + sample.color_draw_total;
      pending = matcher.result();
    } else {
      cost += advance_pipeline(std::numeric_limits<uint64_t>::max());
      if (!pipeline_ || !pipeline_->done)
        throw Error(Errc::incomplete_computation, "stepped pipeline unfinished at epoch roll");
      sample = std::move(pipeline_->sample);
      pending = pipeline_->matcher->result();
      pipeline_.reset();
    }

    last_pending_size_ = pending.size();
    served_ = filtered_against_graph(pending);
    last_sample_ = std::move(sample);

    double s = fractional_.value_sum();
    int length = s <= 1.0 / cfg_.eps ? 1 : static_cast<int>(std::ceil(cfg_.eps * s));
    epoch_.reset(epoch_.index + 1, s, length);
    buckets_.prune_empty_buckets();

    if (cfg_.work_mode == WorkMode::stepped && length > 1) {
      pipeline_ = std::make_unique<Pipeline>();
      pipeline_->sample = draw_snapshot_colors();
      for (const auto& [b, colors] : pipeline_->sample.sampled_colors)
        for (ColorId c : colors) pipeline_->class_list.emplace_back(b, c);
      cost += pipeline_->sample.color_draw_total;
    } else {
      pipeline_.reset();
    }
    return cost;
  }

  FrameworkConfig cfg_;
  DynamicGraph graph_;
  FractionalMatcher fractional_;
  BucketedColoring buckets_;
  Matching served_;
  SparsifierSample last_sample_;
  EpochState epoch_;
  Rng coloring_rng_;
  Rng sampling_rng_;
  std::unique_ptr<Pipeline> pipeline_;
  std::vector<ColorDelta> delta_buffer_;
  uint64_t ops_last_update_ = 0;
  uint64_t ops_total_ = 0;
  int last_pending_size_ = 0;
};

using RoundingFramework = BasicRoundingFramework<>;

}  // namespace dynmatch

#endif  // DYNMATCH_FRAMEWORK_HPP
