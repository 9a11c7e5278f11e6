#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lightsnn {

enum class OpKind : std::uint8_t { Zeroize, Skip, Conv1x1, Conv3x3, AvgPool3x3, MaxPool3x3 };

/// Tags used in architecture files: zeroize, skip, conv1x1, conv3x3,
/// avgpool3x3, maxpool3x3.
std::string_view op_tag(OpKind op);
std::optional<OpKind> parse_op_tag(std::string_view tag);
bool op_has_weights(OpKind op);

enum class PoolVariant { Avg, Max };
std::string_view pool_tag(PoolVariant pool);

/// An ordered operation set. The order is canonical: it fixes tie-breaking
/// during pruning and the digit order when enumerating architectures.
struct OpSetProfile {
  std::string name;
  PoolVariant pool = PoolVariant::Avg;
  std::vector<OpKind> ops;

  /// zeroize, skip, conv1x1, conv3x3, and a 3x3 pool (avg or max by `pool`).
  static OpSetProfile snasnet5(PoolVariant pool = PoolVariant::Avg);
  /// conv3x3, skip, zeroize.
  static OpSetProfile light3(PoolVariant pool = PoolVariant::Avg);
  static OpSetProfile custom(std::string name, std::vector<OpKind> ops);
  /// snasnet5 | light3; throws std::invalid_argument otherwise.
  static OpSetProfile by_name(std::string_view name, PoolVariant pool = PoolVariant::Avg);

  std::size_t size() const noexcept { return ops.size(); }
  std::optional<std::size_t> index_of(OpKind op) const;
  bool is_named() const { return name == "snasnet5" || name == "light3"; }

  bool operator==(const OpSetProfile&) const = default;
};

enum class EdgeDirection : std::uint8_t { Forward, Backward };

/// Forward edges carry node src's spikes at t into dst > src. Backward edges
/// carry node src's spikes from t-1 into dst < src.
struct Edge {
  std::size_t src = 0;
  std::size_t dst = 0;
  EdgeDirection direction = EdgeDirection::Forward;

  bool operator==(const Edge&) const = default;
};

/// Fully connected cell DAG plus the reverse (recurrent) edges.
/// Canonical order: forward edges lexicographic by (src, dst), then backward
/// edges lexicographic by (src, dst).
class CellTopology {
 public:
  explicit CellTopology(std::size_t node_count = 4);

  std::size_t node_count() const noexcept { return node_count_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const Edge& edge(std::size_t i) const { return edges_.at(i); }
  std::optional<std::size_t> index_of(const Edge& e) const;

  bool operator==(const CellTopology& o) const { return node_count_ == o.node_count_; }

 private:
  std::size_t node_count_;
  std::vector<Edge> edges_;
};

/// A single-path architecture: exactly one operation per edge. Both searched
/// cells share these choices.
struct ArchitectureSpec {
  OpSetProfile profile;
  CellTopology topology;
  std::vector<OpKind> ops;

  /// Throws InvalidArchitecture on wrong edge count or ops outside the profile.
  void validate() const;

  bool operator==(const ArchitectureSpec&) const = default;
};

/// Per-edge sets of still-active operations as bitmasks over profile indices.
/// An empty set means the edge is absent.
class SupernetMask {
 public:
  SupernetMask(OpSetProfile profile, CellTopology topology);

  static SupernetMask full(const OpSetProfile& profile, const CellTopology& topology);
  static SupernetMask from_spec(const ArchitectureSpec& spec);

  const OpSetProfile& profile() const noexcept { return profile_; }
  const CellTopology& topology() const noexcept { return topology_; }
  std::size_t edge_count() const noexcept { return active_.size(); }

  bool contains(std::size_t edge, std::size_t op_index) const;
  std::size_t active_count(std::size_t edge) const;
  /// Active profile indices on `edge` in canonical order.
  std::vector<std::size_t> active_indices(std::size_t edge) const;
  std::vector<OpKind> active_ops(std::size_t edge) const;

  void add(std::size_t edge, std::size_t op_index);
  void remove(std::size_t edge, std::size_t op_index);
  void clear_edge(std::size_t edge);
  SupernetMask without(std::size_t edge, std::size_t op_index) const;

  bool is_single_path() const;
  /// Throws std::logic_error unless single-path.
  ArchitectureSpec to_spec() const;

  bool operator==(const SupernetMask&) const = default;

 private:
  OpSetProfile profile_;
  CellTopology topology_;
  std::vector<std::uint32_t> active_;
};

/// O^E. Throws std::overflow_error if the count exceeds 64 bits.
std::uint64_t enumerate_space(const OpSetProfile& profile, const CellTopology& topology);

/// The index-th architecture when specs are read as base-O numbers with edge 0
/// as the most significant digit.
ArchitectureSpec architecture_from_index(const OpSetProfile& profile, const CellTopology& topology,
                                         std::uint64_t index);

/// Architecture text format:
///   lightsnn-arch v1
///   profile <snasnet5|light3> pool=<avg|max>
///   edge <src> <dst> <F|B> <op-tag>     (one per edge, canonical order)
std::string serialize_arch(const ArchitectureSpec& spec);
/// Throws ParseError with a line number on malformed input.
ArchitectureSpec parse_arch(std::string_view text);

}  // namespace lightsnn
