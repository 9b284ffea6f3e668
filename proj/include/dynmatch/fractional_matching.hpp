// Fractional matching maintained through a hierarchical vertex partition.
//
// Every vertex carries an integer level; a present edge carries the exact
// value (1+eps)^(-(max endpoint level) - 1), stored as the integer
// exponent so bucket-boundary comparisons never touch floating point.
// After each edge update a repair loop restores two invariants:
//   - feasibility: fractional degree of every vertex <= 1 (promote above),
//   - fullness:    every positive-level vertex keeps fractional degree
//                  >= 1/(1+eps) (demote below).
// The gap between the promote trigger (> 1) and the demote trigger
// (< 1/(1+eps)) leaves each rule strictly inside the other's safe zone
// after a move, so a single level move never fires both. The fullness
// bound makes the resting state a (1+eps, d)-approximately-maximal
// fractional matching for every d > 1+eps.
//
// Each update emits a ChangeBatch: the net old/new exponent per touched
// edge, sorted by edge key.

#ifndef DYNMATCH_FRACTIONAL_MATCHING_HPP
#define DYNMATCH_FRACTIONAL_MATCHING_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <queue>
#include <unordered_map>
#include <vector>

#include "dynmatch/core.hpp"

namespace dynmatch {

struct XChange {
  EdgeKey edge;
  std::optional<int> old_exponent;  // absent when the edge is new
  std::optional<int> new_exponent;  // absent when the edge was deleted
};

struct ChangeBatch {
  std::vector<XChange> changes;
  bool empty() const { return changes.empty(); }
};

// Evaluates the Def. of (c,d)-approximate maximality on an arbitrary
// assignment by full scan: every edge has value > 1/d, or an endpoint of
// fractional degree >= 1/c all of whose edges have value <= 1/d.
inline bool is_approx_maximal(int n, const std::vector<std::pair<EdgeKey, double>>& x, double c,
                              double d) {
  std::vector<double> deg(static_cast<size_t>(n), 0.0);
  std::vector<double> max_incident(static_cast<size_t>(n), 0.0);
  for (const auto& [e, xe] : x) {
    deg[e.u] += xe;
    deg[e.v] += xe;
    max_incident[e.u] = std::max(max_incident[e.u], xe);
    max_incident[e.v] = std::max(max_incident[e.v], xe);
  }
  for (const auto& [e, xe] : x) {
    if (xe > 1.0 / d) continue;
    bool ok = false;
    for (VertexId w : {e.u, e.v})
      if (deg[w] >= 1.0 / c && max_incident[w] <= 1.0 / d) ok = true;
    if (!ok) return false;
  }
  return true;
}

class FractionalMatching {
 public:
  FractionalMatching(int n, double eps)
      : eps_(eps),
        level_(static_cast<size_t>(n), 0),
        exp_count_(static_cast<size_t>(n)),
        adj_(static_cast<size_t>(n)) {
    if (n < 0 || !(eps > 0.0 && eps < 1.0))
      throw Error(Errc::invalid_value, "bad fractional matching parameters");
    pow_neg_.push_back(1.0);
  }

  double eps() const { return eps_; }
  int vertex_count() const { return static_cast<int>(level_.size()); }
  int edge_count() const { return static_cast<int>(exponent_.size()); }
  int level(VertexId v) const { return level_[v]; }

  // Canonical value of an exponent; memoized std::pow so every module
  // sees bit-identical boundary values.
  double power(int k) const {
    while (static_cast<int>(pow_neg_.size()) <= k)
      pow_neg_.push_back(std::pow(1.0 + eps_, -static_cast<double>(pow_neg_.size())));
    return pow_neg_[static_cast<size_t>(k)];
  }

  bool contains(EdgeKey e) const { return exponent_.count(e) != 0; }

  int exponent(EdgeKey e) const {
    auto it = exponent_.find(e);
    if (it == exponent_.end()) throw Error(Errc::missing_edge, "edge not present");
    return it->second;
  }

  double x_value(EdgeKey e) const { return power(exponent(e)); }

  double value_sum() const { return value_sum_; }

  double recompute_value_sum() const {
    double s = 0.0;
    for (const auto& [e, k] : exponent_) s += power(k);
    return s;
  }

  // Fractional degree, recomputed from the per-vertex exponent histogram
  // (ascending exponents) so repeated reads drift-free and deterministic.
  double fractional_degree(VertexId v) const {
    double s = 0.0;
    for (const auto& [k, cnt] : exp_count_[v]) s += cnt * power(k);
    return s;
  }

  ChangeBatch on_insert(EdgeKey e) {
    if (contains(e)) throw Error(Errc::duplicate_edge, "edge already present");
    begin_batch();
    adj_[e.u].push_back(e.v);
    adj_[e.v].push_back(e.u);
    set_exponent(e, std::max(level_[e.u], level_[e.v]) + 1);
    repair({e.u, e.v});
    return end_batch();
  }

  ChangeBatch on_delete(EdgeKey e) {
    if (!contains(e)) throw Error(Errc::missing_edge, "edge not present");
    begin_batch();
    clear_exponent(e);
    drop_neighbor(e.u, e.v);
    drop_neighbor(e.v, e.u);
    repair({e.u, e.v});
    return end_batch();
  }

  bool check_feasible() const {
    for (VertexId v = 0; v < vertex_count(); ++v)
      if (fractional_degree(v) > 1.0 + 1e-12) return false;
    return true;
  }

  bool check_approx_maximal(double c, double d) const {
    std::vector<std::pair<EdgeKey, double>> x;
    x.reserve(exponent_.size());
    for (const auto& [e, k] : exponent_) x.emplace_back(e, power(k));
    return is_approx_maximal(vertex_count(), x, c, d);
  }

  // Distinct edge values, ascending.
  std::vector<double> distinct_values() const {
    std::vector<double> out;
    out.reserve(exp_hist_.size());
    for (auto it = exp_hist_.rbegin(); it != exp_hist_.rend(); ++it) out.push_back(power(it->first));
    return out;
  }

  int positive_level_count() const {
    int c = 0;
    for (VertexId v = 0; v < vertex_count(); ++v)
      if (level_[v] > 0) ++c;
    return c;
  }

  std::vector<std::pair<EdgeKey, int>> edges_with_exponents() const {
    std::vector<std::pair<EdgeKey, int>> out(exponent_.begin(), exponent_.end());
    std::sort(out.begin(), out.end());
    return out;
  }

  int last_repair_iterations() const { return last_repair_iters_; }
  uint64_t work_ops() const { return work_ops_; }

 private:
  struct Violation {
    double magnitude;
    VertexId vertex;
    bool operator<(const Violation& o) const {
      if (magnitude != o.magnitude) return magnitude < o.magnitude;
      return vertex > o.vertex;  // smaller id wins ties
    }
  };

  void begin_batch() { pending_.clear(); }

  ChangeBatch end_batch() {
    ChangeBatch batch;
    batch.changes.reserve(pending_.size());
    for (auto& [e, oldnew] : pending_) {
      if (oldnew.first == oldnew.second) continue;  // net no-op
      batch.changes.push_back({e, oldnew.first, oldnew.second});
    }
    std::sort(batch.changes.begin(), batch.changes.end(),
              [](const XChange& a, const XChange& b) { return a.edge < b.edge; });
    pending_.clear();
    return batch;
  }

  void record(EdgeKey e, std::optional<int> oldk, std::optional<int> newk) {
    auto it = pending_.find(e);
    if (it == pending_.end())
      pending_.emplace(e, std::make_pair(oldk, newk));
    else
      it->second.second = newk;
  }

  void set_exponent(EdgeKey e, int k) {
    auto it = exponent_.find(e);
    if (it == exponent_.end()) {
      exponent_.emplace(e, k);
      record(e, std::nullopt, k);
    } else {
      if (it->second == k) return;
      remove_histogram(e, it->second);
      record(e, it->second, k);
      it->second = k;
    }
    add_histogram(e, k);
    ++work_ops_;
  }

  void clear_exponent(EdgeKey e) {
    auto it = exponent_.find(e);
    remove_histogram(e, it->second);
    record(e, it->second, std::nullopt);
    exponent_.erase(it);
    ++work_ops_;
  }

  void add_histogram(EdgeKey e, int k) {
    ++exp_count_[e.u][k];
    ++exp_count_[e.v][k];
    ++exp_hist_[k];
    value_sum_ += power(k);
  }

  void remove_histogram(EdgeKey e, int k) {
    for (VertexId w : {e.u, e.v}) {
      auto it = exp_count_[w].find(k);
      if (--it->second == 0) exp_count_[w].erase(it);
    }
    auto hit = exp_hist_.find(k);
    if (--hit->second == 0) exp_hist_.erase(hit);
    value_sum_ -= power(k);
    if (exp_hist_.empty()) value_sum_ = 0.0;  // pin drift at empty
  }

  void drop_neighbor(VertexId v, VertexId w) {
    auto& nb = adj_[v];
    nb.erase(std::find(nb.begin(), nb.end(), w));
  }

  std::optional<Violation> violation_of(VertexId v) const {
    double d = fractional_degree(v);
    if (d > 1.0) return Violation{d - 1.0, v};
    if (level_[v] > 0 && d < demote_threshold()) return Violation{demote_threshold() - d, v};
    return std::nullopt;
  }

  double demote_threshold() const { return 1.0 / (1.0 + eps_); }

  void move_level(VertexId v, int delta) {
    level_[v] += delta;
    for (VertexId w : adj_[v]) {
      EdgeKey e(v, w);
      set_exponent(e, std::max(level_[v], level_[w]) + 1);
    }
    work_ops_ += adj_[v].size();
  }

  void repair(std::initializer_list<VertexId> seeds) {
    std::priority_queue<Violation> heap;
    auto push = [&](VertexId v) {
      if (auto viol = violation_of(v)) heap.push(*viol);
    };
    for (VertexId v : seeds) push(v);
    const int cap = 64 * std::max(1, vertex_count());
    int iters = 0;
    while (!heap.empty()) {
      Violation top = heap.top();
      heap.pop();
      auto current = violation_of(top.vertex);
      if (!current) continue;                       // stale entry
      if (current->magnitude < top.magnitude - 1e-15) {
        heap.push(*current);                        // re-rank with fresh magnitude
        continue;
      }
      if (++iters > cap) throw Error(Errc::non_termination, "repair loop exceeded iteration cap");
      VertexId v = top.vertex;
      double deg = fractional_degree(v);
      move_level(v, deg > 1.0 ? +1 : -1);
      push(v);
      for (VertexId w : adj_[v]) push(w);
    }
    last_repair_iters_ = iters;
  }

  double eps_;
  mutable std::vector<double> pow_neg_;
  std::vector<int> level_;
  std::vector<std::map<int, int>> exp_count_;  // per-vertex exponent histogram
  std::vector<std::vector<VertexId>> adj_;
  std::unordered_map<EdgeKey, int, EdgeKeyHash> exponent_;
  std::map<int, int> exp_hist_;  // global exponent histogram
  double value_sum_ = 0.0;
  std::unordered_map<EdgeKey, std::pair<std::optional<int>, std::optional<int>>, EdgeKeyHash>
      pending_;
  int last_repair_iters_ = 0;
  uint64_t work_ops_ = 0;
};

}  // namespace dynmatch

#endif  // DYNMATCH_FRACTIONAL_MATCHING_HPP
