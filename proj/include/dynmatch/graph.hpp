// Dynamic simple graph on a fixed vertex set, plus the update-stream text
// format consumed by the replay tool.

#ifndef DYNMATCH_GRAPH_HPP
#define DYNMATCH_GRAPH_HPP

#include <algorithm>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "dynmatch/core.hpp"

namespace dynmatch {

class DynamicGraph {
 public:
  explicit DynamicGraph(int n) : adj_(static_cast<size_t>(n)) {
    if (n < 0) throw Error(Errc::invalid_value, "negative vertex count");
  }

  int vertex_count() const { return static_cast<int>(adj_.size()); }
  int edge_count() const { return edge_count_; }

  void insert_edge(EdgeKey e) {
    check_vertex(e.u);
    check_vertex(e.v);
    auto& nu = adj_[e.u];
    auto it = std::lower_bound(nu.begin(), nu.end(), e.v);
    if (it != nu.end() && *it == e.v)
      throw Error(Errc::duplicate_edge, "edge already present");
    nu.insert(it, e.v);
    auto& nv = adj_[e.v];
    nv.insert(std::lower_bound(nv.begin(), nv.end(), e.u), e.u);
    ++edge_count_;
  }

  void delete_edge(EdgeKey e) {
    check_vertex(e.u);
    check_vertex(e.v);
    auto& nu = adj_[e.u];
    auto it = std::lower_bound(nu.begin(), nu.end(), e.v);
    if (it == nu.end() || *it != e.v) throw Error(Errc::missing_edge, "edge not present");
    nu.erase(it);
    auto& nv = adj_[e.v];
    nv.erase(std::lower_bound(nv.begin(), nv.end(), e.u));
    --edge_count_;
  }

  bool contains(EdgeKey e) const {
    if (e.u < 0 || e.v >= vertex_count()) return false;
    const auto& nu = adj_[e.u];
    return std::binary_search(nu.begin(), nu.end(), e.v);
  }

  int degree(VertexId v) const {
    check_vertex(v);
    return static_cast<int>(adj_[v].size());
  }

  // Neighbors in ascending order; iteration is deterministic by construction.
  std::span<const VertexId> neighbors(VertexId v) const {
    check_vertex(v);
    return {adj_[v].data(), adj_[v].size()};
  }

  void apply(const UpdateEvent& ev) {
    switch (ev.kind) {
      case UpdateKind::insert: insert_edge(ev.edge); break;
      case UpdateKind::erase: delete_edge(ev.edge); break;
      case UpdateKind::query: break;
    }
  }

  std::vector<EdgeKey> edges() const {
    std::vector<EdgeKey> out;
    out.reserve(static_cast<size_t>(edge_count_));
    for (VertexId u = 0; u < vertex_count(); ++u)
      for (VertexId v : adj_[u])
        if (u < v) out.emplace_back(u, v);
    return out;
  }

 private:
  void check_vertex(VertexId v) const {
    if (v < 0 || v >= vertex_count())
      throw Error(Errc::vertex_out_of_range, "vertex " + std::to_string(v) + " out of range");
  }

  std::vector<std::vector<VertexId>> adj_;
  int edge_count_ = 0;
};

// Stream format, one event per line:
//   a u v   insert edge (u, v)
//   d u v   delete edge (u, v)
//   q       query point
inline std::vector<UpdateEvent> parse_update_stream(std::istream& in) {
  std::vector<UpdateEvent> events;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string op;
    if (!(ls >> op)) continue;  // blank line
    if (op == "q") {
      events.push_back(UpdateEvent::query());
      continue;
    }
    if (op != "a" && op != "d")
      throw Error(Errc::invalid_value,
                  "bad stream op '" + op + "' at line " + std::to_string(line_no));
    long long u, v;
    if (!(ls >> u >> v))
      throw Error(Errc::invalid_value, "missing endpoints at line " + std::to_string(line_no));
    EdgeKey e(static_cast<VertexId>(u), static_cast<VertexId>(v));
    events.push_back(op == "a" ? UpdateEvent::insertion(e) : UpdateEvent::deletion(e));
  }
  return events;
}

inline void write_update_stream(std::ostream& out, const std::vector<UpdateEvent>& events) {
  for (const auto& ev : events) {
    switch (ev.kind) {
      case UpdateKind::insert: out << "a " << ev.edge.u << ' ' << ev.edge.v << '\n'; break;
      case UpdateKind::erase: out << "d " << ev.edge.u << ' ' << ev.edge.v << '\n'; break;
      case UpdateKind::query: out << "q\n"; break;
    }
  }
}

}  // namespace dynmatch

#endif  // DYNMATCH_GRAPH_HPP
