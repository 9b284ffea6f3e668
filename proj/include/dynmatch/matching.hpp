// Static matching engines.
//
// max_matching_exact runs augmenting-path search with odd-cycle (blossom)
// contraction, one pass over free roots in index order; a root with no
// augmenting path stays unaugmentable after other augmentations, so one
// pass reaches maximum cardinality. Accepts a warm-start matching so the
// oracle can be maintained incrementally across a replay.
//
// approx_matching augments only along found paths shorter than
// 2*ceil(1/eps) + 1 and repeats passes until quiescent. The search grows
// alternating trees breadth-first, so found paths are near-shortest and
// the surviving matching has no short augmenting path left.

#ifndef DYNMATCH_MATCHING_HPP
#define DYNMATCH_MATCHING_HPP

#include <algorithm>
#include <cmath>
#include <unordered_set>
#include <vector>

#include "dynmatch/core.hpp"
#include "dynmatch/graph.hpp"

namespace dynmatch {

class Matching {
 public:
  Matching() = default;
  explicit Matching(int n) : mate_(static_cast<size_t>(n), -1) {}

  int vertex_count() const { return static_cast<int>(mate_.size()); }
  int size() const { return size_; }
  bool matched(VertexId v) const { return mate_[v] != -1; }
  VertexId mate(VertexId v) const { return mate_[v]; }

  bool has(EdgeKey e) const { return mate_[e.u] == e.v; }

  void add(EdgeKey e) {
    if (mate_[e.u] != -1 || mate_[e.v] != -1)
      throw Error(Errc::invalid_value, "endpoint already matched");
    mate_[e.u] = e.v;
    mate_[e.v] = e.u;
    ++size_;
  }

  void remove(EdgeKey e) {
    if (!has(e)) throw Error(Errc::missing_edge, "edge not in matching");
    mate_[e.u] = -1;
    mate_[e.v] = -1;
    --size_;
  }

  std::vector<EdgeKey> edges() const {
    std::vector<EdgeKey> out;
    out.reserve(static_cast<size_t>(size_));
    for (VertexId v = 0; v < vertex_count(); ++v)
      if (mate_[v] > v) out.emplace_back(v, mate_[v]);
    return out;
  }

  const std::vector<VertexId>& mates() const { return mate_; }

 private:
  std::vector<VertexId> mate_;
  int size_ = 0;
};

// True iff the edges are present in g and vertex-disjoint.
inline bool verify_matching(const DynamicGraph& g, const std::vector<EdgeKey>& edges) {
  std::unordered_set<VertexId> touched;
  for (const EdgeKey& e : edges) {
    if (!g.contains(e)) return false;
    if (!touched.insert(e.u).second || !touched.insert(e.v).second) return false;
  }
  return true;
}

inline bool verify_matching(const DynamicGraph& g, const Matching& m) {
  if (m.vertex_count() != g.vertex_count()) return false;
  int seen = 0;
  for (VertexId v = 0; v < m.vertex_count(); ++v) {
    VertexId w = m.mate(v);
    if (w == -1) continue;
    if (w < 0 || w >= m.vertex_count() || w == v) return false;
    if (m.mate(w) != v) return false;
    if (!g.contains(EdgeKey(v, w))) return false;
    ++seen;
  }
  return seen == 2 * m.size();
}

namespace detail {

// Blossom search state, reused across roots of one engine run.
class BlossomSearch {
 public:
  explicit BlossomSearch(const std::vector<std::vector<VertexId>>& adj)
      : adj_(adj),
        n_(static_cast<int>(adj.size())),
        match_(static_cast<size_t>(n_), -1),
        parent_(static_cast<size_t>(n_)),
        base_(static_cast<size_t>(n_)),
        in_queue_(static_cast<size_t>(n_)),
        in_blossom_(static_cast<size_t>(n_)) {}

  void seed(const Matching& m) {
    for (VertexId v = 0; v < n_; ++v) match_[v] = m.mate(v);
  }

  Matching result() const {
    Matching m(n_);
    for (VertexId v = 0; v < n_; ++v)
      if (match_[v] > v) m.add(EdgeKey(v, match_[v]));
    return m;
  }

  bool free(VertexId v) const { return match_[v] == -1; }
  uint64_t scanned_edges() const { return scanned_; }

  // Finds one augmenting path from root; returns its far endpoint or -1.
  VertexId find_path(VertexId root) {
    std::fill(parent_.begin(), parent_.end(), -1);
    std::fill(in_queue_.begin(), in_queue_.end(), false);
    for (VertexId v = 0; v < n_; ++v) base_[v] = v;
    queue_.clear();
    queue_.push_back(root);
    in_queue_[root] = true;
    for (size_t head = 0; head < queue_.size(); ++head) {
      VertexId v = queue_[head];
      for (VertexId to : adj_[v]) {
        ++scanned_;
        if (base_[v] == base_[to] || match_[v] == to) continue;
        if (to == root || (match_[to] != -1 && parent_[match_[to]] != -1)) {
          contract(v, to, root);
        } else if (parent_[to] == -1) {
          parent_[to] = v;
          if (match_[to] == -1) return to;  // augmenting path reached a free vertex
          if (!in_queue_[match_[to]]) {
            in_queue_[match_[to]] = true;
            queue_.push_back(match_[to]);
          }
        }
      }
    }
    return -1;
  }

  // Alternating path from the root down to v, as a vertex sequence.
  std::vector<VertexId> extract_path(VertexId v) const {
    std::vector<VertexId> path;
    while (v != -1) {
      path.push_back(v);
      VertexId pv = parent_[v];
      if (pv == -1) break;
      path.push_back(pv);
      v = match_[pv];
    }
    return path;  // ends at the root; length alternates unmatched/matched
  }

  void augment(VertexId v) {
    while (v != -1) {
      VertexId pv = parent_[v];
      VertexId next = match_[pv];
      match_[v] = pv;
      match_[pv] = v;
      v = next;
    }
  }

 private:
  VertexId lowest_common_base(VertexId a, VertexId b) {
    std::fill(in_blossom_.begin(), in_blossom_.end(), false);
    VertexId x = a;
    for (;;) {
      x = base_[x];
      in_blossom_[x] = true;
      if (match_[x] == -1) break;
      x = parent_[match_[x]];
    }
    VertexId y = b;
    for (;;) {
      y = base_[y];
      if (in_blossom_[y]) return y;
      y = parent_[match_[y]];
    }
  }

  void mark_path(VertexId v, VertexId b, VertexId child) {
    while (base_[v] != b) {
      blossom_[base_[v]] = true;
      blossom_[base_[match_[v]]] = true;
      parent_[v] = child;
      child = match_[v];
      v = parent_[match_[v]];
    }
  }

  void contract(VertexId v, VertexId to, VertexId root) {
    (void)root;
    VertexId b = lowest_common_base(v, to);
    blossom_.assign(static_cast<size_t>(n_), false);
    mark_path(v, b, to);
    mark_path(to, b, v);
    for (VertexId i = 0; i < n_; ++i) {
      if (!blossom_[base_[i]]) continue;
      base_[i] = b;
      if (!in_queue_[i]) {
        in_queue_[i] = true;
        queue_.push_back(i);
      }
    }
  }

  const std::vector<std::vector<VertexId>>& adj_;
  int n_;
  std::vector<VertexId> match_, parent_, base_;
  std::vector<bool> in_queue_, in_blossom_, blossom_;
  std::vector<VertexId> queue_;
  uint64_t scanned_ = 0;
};

inline std::vector<std::vector<VertexId>> adjacency_of(int n, const std::vector<EdgeKey>& edges) {
  std::vector<std::vector<VertexId>> adj(static_cast<size_t>(n));
  for (const EdgeKey& e : edges) {
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  return adj;
}

inline void greedy_fill(const std::vector<EdgeKey>& edges, Matching& m) {
  for (const EdgeKey& e : edges)
    if (!m.matched(e.u) && !m.matched(e.v)) m.add(e);
}

}  // namespace detail

struct MatcherStats {
  uint64_t scanned_edges = 0;
  int augmentations = 0;
};

inline Matching max_matching_exact(int n, const std::vector<EdgeKey>& edges,
                                   const Matching* warm_start = nullptr,
                                   MatcherStats* stats = nullptr) {
  auto adj = detail::adjacency_of(n, edges);
  detail::BlossomSearch search(adj);
  Matching seed = warm_start ? *warm_start : Matching(n);
  if (!warm_start) detail::greedy_fill(edges, seed);
  search.seed(seed);
  int augs = 0;
  for (VertexId root = 0; root < n; ++root) {
    if (!search.free(root)) continue;
    VertexId end = search.find_path(root);
    if (end != -1) {
      search.augment(end);
      ++augs;
    }
  }
  if (stats) {
    stats->scanned_edges += search.scanned_edges();
    stats->augmentations += augs;
  }
  return search.result();
}

inline Matching max_matching_exact(const DynamicGraph& g, const Matching* warm_start = nullptr,
                                   MatcherStats* stats = nullptr) {
  return max_matching_exact(g.vertex_count(), g.edges(), warm_start, stats);
}

// Augments only along found paths of fewer than 2*ceil(1/eps) + 1 edges;
// repeats passes until no such augmentation happens.
inline Matching approx_matching(int n, const std::vector<EdgeKey>& edges, double eps,
                                MatcherStats* stats = nullptr) {
  if (!(eps > 0.0 && eps < 1.0)) throw Error(Errc::invalid_value, "eps outside (0,1)");
  const int max_len = 2 * static_cast<int>(std::ceil(1.0 / eps)) + 1;
  auto adj = detail::adjacency_of(n, edges);
  detail::BlossomSearch search(adj);
  Matching seed(n);
  detail::greedy_fill(edges, seed);
  search.seed(seed);
  int augs = 0;
  bool progressed = true;
  while (progressed) {
    progressed = false;
    for (VertexId root = 0; root < n; ++root) {
      if (!search.free(root)) continue;
      VertexId end = search.find_path(root);
      if (end == -1) continue;
      auto path = search.extract_path(end);
      int len = static_cast<int>(path.size()) - 1;
      if (len < max_len) {
        search.augment(end);
        ++augs;
        progressed = true;
      }
    }
  }
  if (stats) {
    stats->scanned_edges += search.scanned_edges();
    stats->augmentations += augs;
  }
  return search.result();
}

inline Matching approx_matching(const DynamicGraph& g, double eps, MatcherStats* stats = nullptr) {
  return approx_matching(g.vertex_count(), g.edges(), eps, stats);
}

}  // namespace dynmatch

#endif  // DYNMATCH_MATCHING_HPP
