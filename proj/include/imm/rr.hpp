#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstring>
#include <istream>
#include <memory>
#include <mutex>
#include <ostream>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "imm/error.hpp"
#include "imm/graph.hpp"
#include "imm/random.hpp"

namespace imm {

// Reverse-reachable set: the nodes that reach `root` in one live-edge draw.
// `members` is sorted ascending and always contains `root`.
struct RRSet {
  NodeId root = 0;
  std::vector<NodeId> members;

  bool contains(NodeId v) const { return std::binary_search(members.begin(), members.end(), v); }
  friend bool operator==(const RRSet&, const RRSet&) = default;
};

// Reusable scratch space for reverse BFS. One per thread.
class RRSampler {
 public:
  explicit RRSampler(const Graph& g) : g_(&g), mark_(g.node_count(), 0) {}

  RRSet sample(Stream& stream) {
    RRSet out;
    out.root = stream.below(g_->node_count());
    sample_from(out.root, stream, out.members);
    return out;
  }

  // Reverse BFS from `root`. Each in-arc of a visited node is flipped exactly
  // once; a node already visited is never re-entered, so no edge is flipped twice.
  void sample_from(NodeId root, Stream& stream, std::vector<NodeId>& members) {
    if (++epoch_ == 0) {
      std::fill(mark_.begin(), mark_.end(), 0);
      epoch_ = 1;
    }
    members.clear();
    members.push_back(root);
    mark_[root] = epoch_;
    for (std::size_t head = 0; head < members.size(); ++head) {
      for (const Arc& a : g_->in_arcs(members[head])) {
        if (mark_[a.node] == epoch_) continue;
        if (stream.bernoulli(a.p)) {
          mark_[a.node] = epoch_;
          members.push_back(a.node);
        }
      }
    }
    std::sort(members.begin(), members.end());
  }

 private:
  const Graph* g_;
  std::vector<std::uint32_t> mark_;
  std::uint32_t epoch_ = 0;
};

inline RRSet sample_rr(const Graph& g, Stream& stream) {
  RRSampler sampler(g);
  return sampler.sample(stream);
}

// The conceptually infinite i.i.d. sequence R_1, R_2, ... determined by a
// master seed. R_i depends only on (master_seed, i, graph): it is drawn from
// the stream derive_seed(master_seed, i). Entries are materialized on demand
// and never change once created.
//
// Spans returned by prefix() stay valid until the next call that extends the
// sequence.
class RRSequence {
 public:
  RRSequence(const Graph& g, std::uint64_t master_seed) : g_(&g), seed_(master_seed) {}

  RRSequence(const RRSequence&) = delete;
  RRSequence& operator=(const RRSequence&) = delete;

  std::uint64_t master_seed() const noexcept { return seed_; }
  const Graph& graph() const noexcept { return *g_; }
  std::size_t materialized() const {
    std::lock_guard lock(mu_);
    return sets_.size();
  }

  // Materializes R_1..R_theta (using up to `threads` workers on the missing
  // range) and returns them in order.
  std::span<const RRSet> prefix(std::size_t theta, unsigned threads = 1) {
    if (theta == 0) throw DomainError("prefix length must be >= 1");
    std::lock_guard lock(mu_);
    extend_locked(theta, threads);
    return {sets_.data(), theta};
  }

  // Serializes the first `theta` sets: header (magic, version, master seed,
  // graph fingerprint, theta), then per set: root, size, members. Native
  // little-endian layout.
  void dump(std::ostream& out, std::size_t theta) {
    auto sets = prefix(theta);
    out.write(kMagic.data(), kMagic.size());
    put(out, kVersion);
    put(out, seed_);
    put(out, g_->fingerprint());
    put(out, static_cast<std::uint64_t>(theta));
    for (const RRSet& r : sets) {
      put(out, r.root);
      put(out, static_cast<std::uint32_t>(r.members.size()));
      out.write(reinterpret_cast<const char*>(r.members.data()),
                static_cast<std::streamsize>(r.members.size() * sizeof(NodeId)));
    }
    if (!out) throw std::runtime_error("failed writing RR dump");
  }

  // Restores a dump written by dump(). The graph must match the one the dump
  // was generated from; the loaded prefix can be extended further as usual.
  static std::unique_ptr<RRSequence> load(std::istream& in, const Graph& g) {
    std::array<char, 8> magic{};
    in.read(magic.data(), magic.size());
    if (!in || magic != kMagic) throw std::runtime_error("not an RR sequence dump");
    const auto version = get<std::uint32_t>(in);
    if (version != kVersion) throw std::runtime_error("unsupported RR dump version " + std::to_string(version));
    const auto seed = get<std::uint64_t>(in);
    const auto fp = get<std::uint64_t>(in);
    if (fp != g.fingerprint()) throw std::runtime_error("RR dump was generated from a different graph");
    const auto theta = get<std::uint64_t>(in);
    auto seq = std::make_unique<RRSequence>(g, seed);
    seq->sets_.resize(theta);
    for (RRSet& r : seq->sets_) {
      r.root = get<NodeId>(in);
      r.members.resize(get<std::uint32_t>(in));
      in.read(reinterpret_cast<char*>(r.members.data()),
              static_cast<std::streamsize>(r.members.size() * sizeof(NodeId)));
      if (!in) throw std::runtime_error("truncated RR dump");
      for (NodeId v : r.members) {
        if (v >= g.node_count()) throw BoundsError("RR dump member id out of range");
      }
    }
    return seq;
  }

 private:
  static constexpr std::array<char, 8> kMagic{'I', 'M', 'M', 'R', 'R', 'S', 'E', 'Q'};
  static constexpr std::uint32_t kVersion = 1;

  template <class T>
  static void put(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
  }
  template <class T>
  static T get(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in) throw std::runtime_error("truncated RR dump");
    return v;
  }

  void fill(std::size_t lo, std::size_t hi) {
    RRSampler sampler(*g_);
    for (std::size_t i = lo; i < hi; ++i) {
      Stream stream(seed_, i + 1);  // R_{i+1}
      sets_[i] = sampler.sample(stream);
    }
  }

  void extend_locked(std::size_t theta, unsigned threads) {
    const std::size_t have = sets_.size();
    if (theta <= have) return;
    sets_.resize(theta);
    const std::size_t todo = theta - have;
    const std::size_t workers = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(1, todo / 64));
    if (workers == 1) {
      fill(have, theta);
      return;
    }
    std::vector<std::jthread> pool;
    const std::size_t chunk = (todo + workers - 1) / workers;
    for (std::size_t lo = have; lo < theta; lo += chunk) {
      pool.emplace_back([this, lo, hi = std::min(theta, lo + chunk)] { fill(lo, hi); });
    }
  }

  const Graph* g_;
  std::uint64_t seed_;
  mutable std::mutex mu_;
  std::vector<RRSet> sets_;
};

// Fraction of sets in `prefix` that intersect `seeds`; n times this is the
// RIS spread estimate.
inline double coverage_fraction(std::span<const RRSet> prefix, std::span<const NodeId> seeds, NodeId n) {
  if (prefix.empty()) throw DomainError("coverage of an empty RR collection is undefined");
  std::vector<char> in_seed(n, 0);
  for (NodeId s : seeds) {
    if (s >= n) throw BoundsError("seed id " + std::to_string(s) + " >= n");
    in_seed[s] = 1;
  }
  std::size_t covered = 0;
  for (const RRSet& r : prefix) {
    covered += std::any_of(r.members.begin(), r.members.end(), [&](NodeId v) { return in_seed[v] != 0; });
  }
  return static_cast<double>(covered) / static_cast<double>(prefix.size());
}

// Inverted index node -> indices of the sets containing it, over one prefix.
class CoverageIndex {
 public:
  CoverageIndex(std::span<const RRSet> prefix, NodeId n) : offsets_(static_cast<std::size_t>(n) + 1, 0) {
    for (const RRSet& r : prefix) {
      for (NodeId v : r.members) {
        if (v >= n) throw BoundsError("RR member id " + std::to_string(v) + " >= n");
        ++offsets_[v + 1];
      }
    }
    for (std::size_t v = 0; v < n; ++v) offsets_[v + 1] += offsets_[v];
    ids_.resize(offsets_.back());
    std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
    for (std::size_t i = 0; i < prefix.size(); ++i) {
      for (NodeId v : prefix[i].members) ids_[cursor[v]++] = static_cast<std::uint32_t>(i);
    }
    set_count_ = prefix.size();
  }

  std::span<const std::uint32_t> sets_containing(NodeId v) const {
    return {ids_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
  }
  std::size_t set_count() const noexcept { return set_count_; }
  NodeId node_count() const noexcept { return static_cast<NodeId>(offsets_.size() - 1); }

 private:
  std::vector<std::size_t> offsets_;
  std::vector<std::uint32_t> ids_;
  std::size_t set_count_ = 0;
};

}  // namespace imm
