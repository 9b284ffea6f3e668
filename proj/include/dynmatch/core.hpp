// Shared identifiers, update events and the error type used across the
// library. Every module speaks in terms of VertexId and canonical EdgeKey
// so edge identity is unambiguous between the graph, the fractional
// matcher, the bucketed colorings and the matchers.

#ifndef DYNMATCH_CORE_HPP
#define DYNMATCH_CORE_HPP

#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>

namespace dynmatch {

using VertexId = int;
using Rng = std::mt19937_64;

enum class Errc {
  duplicate_edge,
  self_loop,
  missing_edge,
  vertex_out_of_range,
  degree_cap_exceeded,
  color_out_of_range,
  non_termination,
  invalid_value,
  incomplete_computation,
  no_legal_move,
  degree_bound_violated,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

// Undirected edge stored as (min, max). Never a self-loop.
struct EdgeKey {
  VertexId u = 0;
  VertexId v = 1;

  EdgeKey() = default;
  EdgeKey(VertexId a, VertexId b) : u(a < b ? a : b), v(a < b ? b : a) {
    if (a == b) throw Error(Errc::self_loop, "self-loop (" + std::to_string(a) + ")");
  }

  VertexId other(VertexId w) const { return w == u ? v : u; }
  friend auto operator<=>(const EdgeKey&, const EdgeKey&) = default;
};

struct EdgeKeyHash {
  size_t operator()(const EdgeKey& e) const {
    uint64_t k = (static_cast<uint64_t>(static_cast<uint32_t>(e.u)) << 32) |
                 static_cast<uint32_t>(e.v);
    k ^= k >> 33;
    k *= 0xff51afd7ed558ccdULL;
    k ^= k >> 33;
    return static_cast<size_t>(k);
  }
};

enum class UpdateKind { insert, erase, query };

struct UpdateEvent {
  UpdateKind kind = UpdateKind::query;
  EdgeKey edge{};

  static UpdateEvent insertion(EdgeKey e) { return {UpdateKind::insert, e}; }
  static UpdateEvent deletion(EdgeKey e) { return {UpdateKind::erase, e}; }
  static UpdateEvent query() { return {UpdateKind::query, EdgeKey{}}; }
};

// Independent generator streams derived from one master seed, so consumers
// (coloring, sampling, adversary) stay decoupled while replays remain
// reproducible from the single seed.
inline Rng make_stream(uint64_t seed, uint64_t stream_id) {
  std::seed_seq seq{seed, stream_id, uint64_t{0x9e3779b97f4a7c15ULL}};
  return Rng(seq);
}

}  // namespace dynmatch

#endif  // DYNMATCH_CORE_HPP
