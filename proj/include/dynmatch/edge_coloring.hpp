// Dynamic proper edge coloring of bounded-degree multigraphs.
//
// Two insertion strategies over the same structure:
//  - insert_colored: deterministic binary search over the palette. At every
//    range the combined color usage of the two endpoints (counting
//    repetitions) is strictly below the range size, so one half always
//    stays viable; descending lands on a color free at both endpoints in
//    at most ceil(log2 palette) + 1 probes.
//  - insert_colored_randomized: rejection-sample uniform colors until one
//    is free at both endpoints. With palette >= 3 * degree_cap at least a
//    third of the palette is free, so three draws are expected.
//
// Parallel edge instances are supported; an instance is identified by the
// color it carries (properness makes colors unique per edge instance at a
// shared endpoint).

#ifndef DYNMATCH_EDGE_COLORING_HPP
#define DYNMATCH_EDGE_COLORING_HPP

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dynmatch/core.hpp"

namespace dynmatch {

using ColorId = int;

class ColoredMultigraph {
 public:
  // palette_size must be >= 2*degree_cap - 1 for deterministic insertion
  // and >= 3*degree_cap for randomized insertion.
  ColoredMultigraph(int n, int degree_cap, int palette_size)
      : degree_cap_(degree_cap), palette_(palette_size), vertex_colors_(static_cast<size_t>(n)) {
    if (n < 0 || degree_cap < 1 || palette_size < 1)
      throw Error(Errc::invalid_value, "bad coloring parameters");
  }

  int vertex_count() const { return static_cast<int>(vertex_colors_.size()); }
  int degree_cap() const { return degree_cap_; }
  int palette_size() const { return palette_; }
  int instance_count() const { return instance_count_; }

  int instance_degree(VertexId v) const { return static_cast<int>(vertex_colors_[v].size()); }

  int multiplicity(EdgeKey e) const {
    auto it = edge_colors_.find(e);
    return it == edge_colors_.end() ? 0 : static_cast<int>(it->second.size());
  }

  std::vector<ColorId> colors_of(EdgeKey e) const {
    auto it = edge_colors_.find(e);
    return it == edge_colors_.end() ? std::vector<ColorId>{} : it->second;
  }

  ColorId insert_colored(EdgeKey e) {
    check_capacity(e);
    const auto& cu = vertex_colors_[e.u];
    const auto& cv = vertex_colors_[e.v];
    int lo = 0, hi = palette_;
    last_probes_ = 1;  // root viability is given by the degree precondition
    while (hi - lo > 1) {
      int mid = lo + (hi - lo) / 2;
      int left_used = used_in(cu, lo, mid) + used_in(cv, lo, mid);
      if (left_used < mid - lo)
        hi = mid;
      else
        lo = mid;
      ++last_probes_;
    }
    total_probes_ += static_cast<uint64_t>(last_probes_);
    attach(e, lo);
    return lo;
  }

  ColorId insert_colored_randomized(EdgeKey e, Rng& rng) {
    check_capacity(e);
    std::uniform_int_distribution<ColorId> pick(0, palette_ - 1);
    const auto& cu = vertex_colors_[e.u];
    const auto& cv = vertex_colors_[e.v];
    int draws = 0;
    for (;;) {
      ColorId c = pick(rng);
      ++draws;
      if (!std::binary_search(cu.begin(), cu.end(), c) &&
          !std::binary_search(cv.begin(), cv.end(), c)) {
        last_draws_ = draws;
        total_draws_ += static_cast<uint64_t>(draws);
        attach(e, c);
        return c;
      }
      if (draws > 64 * palette_)
        throw Error(Errc::non_termination, "randomized color search stuck");
    }
  }

  void delete_colored(EdgeKey e, ColorId instance_color) {
    auto it = edge_colors_.find(e);
    if (it == edge_colors_.end())
      throw Error(Errc::missing_edge, "no instance of edge present");
    auto& colors = it->second;
    auto cit = std::find(colors.begin(), colors.end(), instance_color);
    if (cit == colors.end())
      throw Error(Errc::missing_edge, "no instance with that color");
    colors.erase(cit);
    if (colors.empty()) edge_colors_.erase(it);

    erase_vertex_color(e.u, instance_color);
    erase_vertex_color(e.v, instance_color);

    auto clit = classes_.find(instance_color);
    auto& cls = clit->second;
    size_t old = cls.size();
    by_size_.erase({static_cast<int>(old), instance_color});
    cls.erase(std::find(cls.begin(), cls.end(), e));
    if (cls.empty())
      classes_.erase(clit);
    else
      by_size_.insert({static_cast<int>(cls.size()), instance_color});
    --instance_count_;
  }

  // Edges of one color, in insertion order. Always a matching in the
  // underlying simple graph.
  std::vector<EdgeKey> color_class(ColorId c) const {
    if (c < 0 || c >= palette_) throw Error(Errc::color_out_of_range, "color out of palette");
    auto it = classes_.find(c);
    return it == classes_.end() ? std::vector<EdgeKey>{} : it->second;
  }

  std::pair<ColorId, int> largest_color_class() const {
    if (by_size_.empty()) return {0, 0};
    auto it = by_size_.rbegin();
    return {it->second, it->first};
  }

  std::vector<ColorId> used_colors() const {
    std::vector<ColorId> out;
    out.reserve(classes_.size());
    for (const auto& [c, cls] : classes_) out.push_back(c);
    std::sort(out.begin(), out.end());
    return out;
  }

  // How many instances at v carry color c. Properness keeps this in {0, 1}.
  int vertex_color_count(VertexId v, ColorId c) const {
    const auto& cs = vertex_colors_[v];
    auto b = std::lower_bound(cs.begin(), cs.end(), c);
    auto e = std::upper_bound(b, cs.end(), c);
    return static_cast<int>(e - b);
  }

  int last_probe_count() const { return last_probes_; }
  int last_draw_count() const { return last_draws_; }
  uint64_t total_probes() const { return total_probes_; }
  uint64_t total_draws() const { return total_draws_; }

  // Full audit: per-vertex usage lists agree with the classes, classes are
  // matchings, and the size index is consistent.
  bool recount_consistent() const {
    std::vector<std::vector<ColorId>> rebuilt(vertex_colors_.size());
    int instances = 0;
    for (const auto& [c, cls] : classes_) {
      std::set<VertexId> touched;
      for (const EdgeKey& e : cls) {
        if (!touched.insert(e.u).second || !touched.insert(e.v).second) return false;
        rebuilt[e.u].push_back(c);
        rebuilt[e.v].push_back(c);
        ++instances;
      }
      auto it = by_size_.find({static_cast<int>(cls.size()), c});
      if (it == by_size_.end()) return false;
    }
    if (instances != instance_count_) return false;
    for (size_t v = 0; v < rebuilt.size(); ++v) {
      std::sort(rebuilt[v].begin(), rebuilt[v].end());
      if (rebuilt[v] != vertex_colors_[v]) return false;
    }
    return by_size_.size() == classes_.size();
  }

 private:
  static int used_in(const std::vector<ColorId>& sorted, int lo, int hi) {
    auto b = std::lower_bound(sorted.begin(), sorted.end(), lo);
    auto e = std::lower_bound(b, sorted.end(), hi);
    return static_cast<int>(e - b);
  }

  void check_capacity(const EdgeKey& e) const {
    if (instance_degree(e.u) >= degree_cap_ || instance_degree(e.v) >= degree_cap_)
      throw Error(Errc::degree_cap_exceeded,
                  "degree cap " + std::to_string(degree_cap_) + " reached at an endpoint");
  }

  void attach(EdgeKey e, ColorId c) {
    insert_vertex_color(e.u, c);
    insert_vertex_color(e.v, c);
    edge_colors_[e].push_back(c);
    auto& cls = classes_[c];
    if (!cls.empty()) by_size_.erase({static_cast<int>(cls.size()), c});
    cls.push_back(e);
    by_size_.insert({static_cast<int>(cls.size()), c});
    ++instance_count_;
  }

  void insert_vertex_color(VertexId v, ColorId c) {
    auto& cs = vertex_colors_[v];
    cs.insert(std::lower_bound(cs.begin(), cs.end(), c), c);
  }

  void erase_vertex_color(VertexId v, ColorId c) {
    auto& cs = vertex_colors_[v];
    cs.erase(std::lower_bound(cs.begin(), cs.end(), c));
  }

  int degree_cap_;
  int palette_;
  int instance_count_ = 0;
  int last_probes_ = 0;
  int last_draws_ = 0;
  uint64_t total_probes_ = 0;
  uint64_t total_draws_ = 0;

  std::vector<std::vector<ColorId>> vertex_colors_;  // sorted used colors per vertex
  std::unordered_map<EdgeKey, std::vector<ColorId>, EdgeKeyHash> edge_colors_;
  std::unordered_map<ColorId, std::vector<EdgeKey>> classes_;
  std::set<std::pair<int, ColorId>> by_size_;
};

}  // namespace dynmatch

#endif  // DYNMATCH_EDGE_COLORING_HPP
