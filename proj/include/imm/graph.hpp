#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "imm/error.hpp"

namespace imm {

using NodeId = std::uint32_t;

struct Edge {
  NodeId src;
  NodeId dst;
  double p;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// One endpoint plus the activation probability of the connecting edge.
struct Arc {
  NodeId node;
  double p;
};

enum class Model { kWeightedCascade, kExplicit };

inline std::string_view to_string(Model m) {
  return m == Model::kWeightedCascade ? "wc" : "explicit";
}

inline Model parse_model(std::string_view s) {
  if (s == "wc") return Model::kWeightedCascade;
  if (s == "explicit") return Model::kExplicit;
  throw DomainError("unknown diffusion model '" + std::string(s) + "' (expected wc|explicit)");
}

// CSR adjacency: for node v, arcs()[offsets[v] .. offsets[v+1]).
class AdjacencyIndex {
 public:
  AdjacencyIndex() = default;

  // Groups edges by `dst` when `by_target` (in-arcs carry the source node),
  // otherwise by `src` (out-arcs carry the target node). Stable: arcs appear
  // in edge-list order.
  AdjacencyIndex(NodeId n, std::span<const Edge> edges, bool by_target)
      : offsets_(static_cast<std::size_t>(n) + 1, 0), arcs_(edges.size()) {
    for (const Edge& e : edges) ++offsets_[(by_target ? e.dst : e.src) + 1];
    for (std::size_t v = 0; v < n; ++v) offsets_[v + 1] += offsets_[v];
    std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
    for (const Edge& e : edges) {
      const NodeId key = by_target ? e.dst : e.src;
      arcs_[cursor[key]++] = Arc{by_target ? e.src : e.dst, e.p};
    }
  }

  std::span<const Arc> operator[](NodeId v) const {
    return {arcs_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
  }

  std::size_t degree(NodeId v) const { return offsets_[v + 1] - offsets_[v]; }
  std::size_t node_count() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }

 private:
  std::vector<std::size_t> offsets_;
  std::vector<Arc> arcs_;
};

// Immutable directed graph with per-edge IC activation probabilities.
class Graph {
 public:
  Graph() = default;

  Graph(NodeId n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
    if (n_ == 0) throw DomainError("graph must have at least one node");
    for (const Edge& e : edges_) {
      if (e.src >= n_ || e.dst >= n_) {
        throw BoundsError("edge (" + std::to_string(e.src) + "," + std::to_string(e.dst) +
                          ") references a node id >= n=" + std::to_string(n_));
      }
      if (!(e.p >= 0.0 && e.p <= 1.0)) {
        throw DomainError("edge probability " + std::to_string(e.p) + " outside [0,1]");
      }
      if (e.src == e.dst) ++self_loops_;
    }
    in_ = AdjacencyIndex(n_, edges_, /*by_target=*/true);
    out_ = AdjacencyIndex(n_, edges_, /*by_target=*/false);
  }

  NodeId node_count() const noexcept { return n_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  std::span<const Edge> edges() const noexcept { return edges_; }

  std::span<const Arc> in_arcs(NodeId v) const { return in_[v]; }
  std::span<const Arc> out_arcs(NodeId v) const { return out_[v]; }
  std::size_t in_degree(NodeId v) const { return in_.degree(v); }
  const AdjacencyIndex& reverse_index() const noexcept { return in_; }

  std::size_t self_loop_count() const noexcept { return self_loops_; }

  // Stable 64-bit fingerprint of (n, edge list); identifies the graph an RR
  // dump was generated from.
  std::uint64_t fingerprint() const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto feed = [&h](const void* data, std::size_t len) {
      const auto* bytes = static_cast<const unsigned char*>(data);
      for (std::size_t i = 0; i < len; ++i) {
        h ^= bytes[i];
        h *= 0x100000001b3ULL;
      }
    };
    const std::uint64_t n64 = n_;
    feed(&n64, sizeof n64);
    for (const Edge& e : edges_) {
      feed(&e.src, sizeof e.src);
      feed(&e.dst, sizeof e.dst);
      feed(&e.p, sizeof e.p);
    }
    return h;
  }

 private:
  NodeId n_ = 0;
  std::vector<Edge> edges_;
  AdjacencyIndex in_;
  AdjacencyIndex out_;
  std::size_t self_loops_ = 0;
};

// Reverse adjacency built directly from the edge list of `g`.
inline AdjacencyIndex transpose_index(const Graph& g) {
  return AdjacencyIndex(g.node_count(), g.edges(), /*by_target=*/true);
}

// Rebuilds the edge multiset from a reverse index, sorted.
inline std::vector<Edge> edges_from_reverse(const AdjacencyIndex& rev) {
  std::vector<Edge> out;
  for (NodeId v = 0; v < rev.node_count(); ++v) {
    for (const Arc& a : rev[v]) out.push_back(Edge{a.node, v, a.p});
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Weighted cascade: every in-edge of v gets p = 1 / in_degree(v).
inline std::vector<Edge> weighted_cascade(NodeId n, std::vector<Edge> edges) {
  std::vector<std::size_t> indeg(n, 0);
  for (const Edge& e : edges) {
    if (e.dst >= n) throw BoundsError("node id " + std::to_string(e.dst) + " >= n");
    ++indeg[e.dst];
  }
  for (Edge& e : edges) e.p = 1.0 / static_cast<double>(indeg[e.dst]);
  return edges;
}

namespace detail {

inline bool parse_node(std::string_view tok, std::uint64_t& out) {
  if (tok.empty()) return false;
  std::uint64_t v = 0;
  for (char c : tok) {
    if (c < '0' || c > '9') return false;
    v = v * 10 + static_cast<std::uint64_t>(c - '0');
    if (v > std::numeric_limits<NodeId>::max()) return false;
  }
  out = v;
  return true;
}

inline bool parse_prob(const std::string& tok, double& out) {
  std::size_t pos = 0;
  try {
    out = std::stod(tok, &pos);
  } catch (const std::exception&) {
    return false;
  }
  return pos == tok.size();
}

inline std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> toks;
  for (std::string t; is >> t;) toks.push_back(t);
  return toks;
}

}  // namespace detail

// Parses the edge-list format: header "n m", then m lines "u v" or "u v p".
// Blank lines and lines whose first non-space character is '#' are skipped.
inline Graph read_graph(std::istream& in, Model model) {
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  std::uint64_t n = 0, m = 0;
  std::vector<Edge> edges;

  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto toks = detail::split_ws(line);

    if (!have_header) {
      if (toks.size() != 2 || !detail::parse_node(toks[0], n) || !detail::parse_node(toks[1], m)) {
        throw ParseError(lineno, "expected header 'n m'");
      }
      have_header = true;
      edges.reserve(m);
      continue;
    }

    if (edges.size() == m) throw ParseError(lineno, "more edge lines than declared m=" + std::to_string(m));
    if (toks.size() < 2 || toks.size() > 3) throw ParseError(lineno, "expected 'u v' or 'u v p'");
    std::uint64_t u = 0, v = 0;
    if (!detail::parse_node(toks[0], u) || !detail::parse_node(toks[1], v)) {
      throw ParseError(lineno, "node ids must be non-negative integers");
    }
    if (u >= n || v >= n) {
      throw BoundsError("line " + std::to_string(lineno) + ": node id " + std::to_string(std::max(u, v)) +
                        " >= n=" + std::to_string(n));
    }
    double p = 1.0;
    if (model == Model::kExplicit) {
      if (toks.size() != 3) throw ParseError(lineno, "explicit model requires 'u v p'");
      if (!detail::parse_prob(toks[2], p)) throw ParseError(lineno, "unparseable probability '" + toks[2] + "'");
      if (!(p >= 0.0 && p <= 1.0)) {
        throw DomainError("line " + std::to_string(lineno) + ": probability " + toks[2] + " outside [0,1]");
      }
    }
    edges.push_back(Edge{static_cast<NodeId>(u), static_cast<NodeId>(v), p});
  }

  if (!have_header) throw ParseError(lineno, "missing header 'n m'");
  if (edges.size() != m) {
    throw ParseError(lineno, "declared m=" + std::to_string(m) + " but found " + std::to_string(edges.size()) +
                                 " edge lines");
  }
  if (model == Model::kWeightedCascade) edges = weighted_cascade(static_cast<NodeId>(n), std::move(edges));
  return Graph(static_cast<NodeId>(n), std::move(edges));
}

inline Graph load_graph(const std::string& path, Model model) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open graph file '" + path + "'");
  return read_graph(in, model);
}

// Writes the explicit-probability form; probabilities round-trip exactly.
inline void write_graph(std::ostream& out, const Graph& g) {
  out << g.node_count() << ' ' << g.edge_count() << '\n';
  out << std::setprecision(17);
  for (const Edge& e : g.edges()) out << e.src << ' ' << e.dst << ' ' << e.p << '\n';
}

}  // namespace imm
