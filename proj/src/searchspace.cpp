#include "lightsnn/searchspace.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "lightsnn/errors.hpp"

namespace lightsnn {
namespace {

constexpr std::array<std::pair<OpKind, std::string_view>, 6> kOpTags{{
    {OpKind::Zeroize, "zeroize"},
    {OpKind::Skip, "skip"},
    {OpKind::Conv1x1, "conv1x1"},
    {OpKind::Conv3x3, "conv3x3"},
    {OpKind::AvgPool3x3, "avgpool3x3"},
    {OpKind::MaxPool3x3, "maxpool3x3"},
}};

constexpr std::size_t kMaxOps = 32;

}  // namespace

std::string_view op_tag(OpKind op) {
  for (const auto& [kind, tag] : kOpTags)
    if (kind == op) return tag;
  return "unknown";
}

std::optional<OpKind> parse_op_tag(std::string_view tag) {
  for (const auto& [kind, name] : kOpTags)
    if (name == tag) return kind;
  return std::nullopt;
}

bool op_has_weights(OpKind op) { return op == OpKind::Conv1x1 || op == OpKind::Conv3x3; }

std::string_view pool_tag(PoolVariant pool) { return pool == PoolVariant::Max ? "max" : "avg"; }

OpSetProfile OpSetProfile::snasnet5(PoolVariant pool) {
  const OpKind pool_op = pool == PoolVariant::Max ? OpKind::MaxPool3x3 : OpKind::AvgPool3x3;
  return {"snasnet5", pool, {OpKind::Zeroize, OpKind::Skip, OpKind::Conv1x1, OpKind::Conv3x3, pool_op}};
}

OpSetProfile OpSetProfile::light3(PoolVariant pool) {
  return {"light3", pool, {OpKind::Conv3x3, OpKind::Skip, OpKind::Zeroize}};
}

OpSetProfile OpSetProfile::custom(std::string name, std::vector<OpKind> ops) {
  if (ops.empty() || ops.size() > kMaxOps) throw std::invalid_argument("OpSetProfile: need 1..32 operations");
  for (std::size_t i = 0; i < ops.size(); ++i)
    for (std::size_t j = i + 1; j < ops.size(); ++j)
      if (ops[i] == ops[j]) throw std::invalid_argument("OpSetProfile: duplicate operation");
  return {std::move(name), PoolVariant::Avg, std::move(ops)};
}

OpSetProfile OpSetProfile::by_name(std::string_view name, PoolVariant pool) {
  if (name == "snasnet5") return snasnet5(pool);
  if (name == "light3") return light3(pool);
  throw std::invalid_argument("unknown profile '" + std::string(name) + "'");
}

std::optional<std::size_t> OpSetProfile::index_of(OpKind op) const {
  const auto it = std::find(ops.begin(), ops.end(), op);
  if (it == ops.end()) return std::nullopt;
  return static_cast<std::size_t>(it - ops.begin());
}

CellTopology::CellTopology(std::size_t node_count) : node_count_(node_count) {
  if (node_count < 2) throw std::invalid_argument("CellTopology: need at least 2 nodes");
  for (std::size_t i = 0; i < node_count; ++i)
    for (std::size_t j = i + 1; j < node_count; ++j) edges_.push_back({i, j, EdgeDirection::Forward});
  for (std::size_t j = 1; j < node_count; ++j)
    for (std::size_t i = 0; i < j; ++i) edges_.push_back({j, i, EdgeDirection::Backward});
}

std::optional<std::size_t> CellTopology::index_of(const Edge& e) const {
  const auto it = std::find(edges_.begin(), edges_.end(), e);
  if (it == edges_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - edges_.begin());
}

void ArchitectureSpec::validate() const {
  if (ops.size() != topology.edge_count())
    throw InvalidArchitecture("architecture has " + std::to_string(ops.size()) + " edges, topology needs " +
                              std::to_string(topology.edge_count()));
  for (std::size_t e = 0; e < ops.size(); ++e)
    if (!profile.index_of(ops[e]))
      throw InvalidArchitecture("edge " + std::to_string(e) + ": operation '" + std::string(op_tag(ops[e])) +
                                "' is not in profile " + profile.name);
}

SupernetMask::SupernetMask(OpSetProfile profile, CellTopology topology)
    : profile_(std::move(profile)), topology_(std::move(topology)), active_(topology_.edge_count(), 0) {
  if (profile_.size() == 0 || profile_.size() > kMaxOps)
    throw std::invalid_argument("SupernetMask: profile must hold 1..32 operations");
}

SupernetMask SupernetMask::full(const OpSetProfile& profile, const CellTopology& topology) {
  SupernetMask m(profile, topology);
  const std::uint32_t all =
      profile.size() == 32 ? ~std::uint32_t{0} : (std::uint32_t{1} << profile.size()) - 1;
  std::fill(m.active_.begin(), m.active_.end(), all);
  return m;
}

SupernetMask SupernetMask::from_spec(const ArchitectureSpec& spec) {
  spec.validate();
  SupernetMask m(spec.profile, spec.topology);
  for (std::size_t e = 0; e < spec.ops.size(); ++e) m.add(e, *spec.profile.index_of(spec.ops[e]));
  return m;
}

bool SupernetMask::contains(std::size_t edge, std::size_t op_index) const {
  return op_index < profile_.size() && ((active_.at(edge) >> op_index) & 1U);
}

std::size_t SupernetMask::active_count(std::size_t edge) const {
  return static_cast<std::size_t>(std::popcount(active_.at(edge)));
}

std::vector<std::size_t> SupernetMask::active_indices(std::size_t edge) const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < profile_.size(); ++k)
    if (contains(edge, k)) out.push_back(k);
  return out;
}

std::vector<OpKind> SupernetMask::active_ops(std::size_t edge) const {
  std::vector<OpKind> out;
  for (std::size_t k : active_indices(edge)) out.push_back(profile_.ops[k]);
  return out;
}

void SupernetMask::add(std::size_t edge, std::size_t op_index) {
  if (op_index >= profile_.size()) throw std::out_of_range("SupernetMask: op index out of range");
  active_.at(edge) |= std::uint32_t{1} << op_index;
}

void SupernetMask::remove(std::size_t edge, std::size_t op_index) {
  if (op_index >= profile_.size()) throw std::out_of_range("SupernetMask: op index out of range");
  active_.at(edge) &= ~(std::uint32_t{1} << op_index);
}

void SupernetMask::clear_edge(std::size_t edge) { active_.at(edge) = 0; }

SupernetMask SupernetMask::without(std::size_t edge, std::size_t op_index) const {
  SupernetMask m = *this;
  m.remove(edge, op_index);
  return m;
}

bool SupernetMask::is_single_path() const {
  return std::all_of(active_.begin(), active_.end(), [](std::uint32_t a) { return std::popcount(a) == 1; });
}

ArchitectureSpec SupernetMask::to_spec() const {
  if (!is_single_path()) throw std::logic_error("SupernetMask: not a single-path network");
  ArchitectureSpec spec{profile_, topology_, {}};
  for (std::uint32_t a : active_) spec.ops.push_back(profile_.ops[static_cast<std::size_t>(std::countr_zero(a))]);
  return spec;
}

std::uint64_t enumerate_space(const OpSetProfile& profile, const CellTopology& topology) {
  const std::uint64_t base = profile.size();
  std::uint64_t count = 1;
  for (std::size_t e = 0; e < topology.edge_count(); ++e) {
    if (base != 0 && count > std::numeric_limits<std::uint64_t>::max() / base)
      throw std::overflow_error("enumerate_space: count exceeds 64 bits");
    count *= base;
  }
  return count;
}

ArchitectureSpec architecture_from_index(const OpSetProfile& profile, const CellTopology& topology,
                                         std::uint64_t index) {
  if (index >= enumerate_space(profile, topology)) throw std::out_of_range("architecture index out of range");
  const std::size_t edges = topology.edge_count();
  ArchitectureSpec spec{profile, topology, std::vector<OpKind>(edges)};
  for (std::size_t e = edges; e-- > 0;) {
    spec.ops[e] = profile.ops[index % profile.size()];
    index /= profile.size();
  }
  return spec;
}

std::string serialize_arch(const ArchitectureSpec& spec) {
  spec.validate();
  if (!spec.profile.is_named())
    throw std::invalid_argument("serialize_arch: profile '" + spec.profile.name + "' has no file representation");
  std::ostringstream os;
  os << "lightsnn-arch v1\n";
  os << "profile " << spec.profile.name << " pool=" << pool_tag(spec.profile.pool) << "\n";
  for (std::size_t e = 0; e < spec.ops.size(); ++e) {
    const Edge& edge = spec.topology.edge(e);
    os << "edge " << edge.src << ' ' << edge.dst << ' ' << (edge.direction == EdgeDirection::Forward ? 'F' : 'B')
       << ' ' << op_tag(spec.ops[e]) << "\n";
  }
  return os.str();
}

namespace {

std::vector<std::string> split_words(std::string_view line) {
  std::vector<std::string> words;
  std::istringstream is{std::string(line)};
  for (std::string w; is >> w;) words.push_back(w);
  return words;
}

std::size_t parse_node(const std::string& token, std::size_t line) {
  if (token.empty() || token.size() > 3 || !std::all_of(token.begin(), token.end(), ::isdigit))
    throw ParseError(line, "bad node index '" + token + "'");
  return static_cast<std::size_t>(std::stoul(token));
}

struct EdgeLine {
  Edge edge;
  OpKind op;
  std::size_t line;
};

}  // namespace

ArchitectureSpec parse_arch(std::string_view text) {
  std::vector<std::string> lines;
  {
    std::size_t start = 0;
    while (start <= text.size()) {
      const std::size_t end = text.find('\n', start);
      const std::size_t stop = end == std::string_view::npos ? text.size() : end;
      std::string_view l = text.substr(start, stop - start);
      if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
      lines.emplace_back(l);
      if (end == std::string_view::npos) break;
      start = end + 1;
    }
    while (!lines.empty() && split_words(lines.back()).empty()) lines.pop_back();
  }

  if (lines.empty() || split_words(lines[0]) != std::vector<std::string>{"lightsnn-arch", "v1"})
    throw ParseError(1, "expected header 'lightsnn-arch v1'");
  if (lines.size() < 2) throw ParseError(2, "missing profile line");

  const auto header = split_words(lines[1]);
  if (header.size() != 3 || header[0] != "profile") throw ParseError(2, "expected 'profile <name> pool=<avg|max>'");
  PoolVariant pool;
  if (header[2] == "pool=avg") {
    pool = PoolVariant::Avg;
  } else if (header[2] == "pool=max") {
    pool = PoolVariant::Max;
  } else {
    throw ParseError(2, "bad pool setting '" + header[2] + "'");
  }
  if (header[1] != "snasnet5" && header[1] != "light3") throw ParseError(2, "unknown profile '" + header[1] + "'");
  OpSetProfile profile = OpSetProfile::by_name(header[1], pool);

  std::vector<EdgeLine> parsed;
  std::size_t max_node = 0;
  for (std::size_t i = 2; i < lines.size(); ++i) {
    const std::size_t lineno = i + 1;
    const auto words = split_words(lines[i]);
    if (words.empty()) continue;
    if (words.size() != 5 || words[0] != "edge")
      throw ParseError(lineno, "expected 'edge <src> <dst> <F|B> <op>'");
    const std::size_t src = parse_node(words[1], lineno);
    const std::size_t dst = parse_node(words[2], lineno);
    EdgeDirection dir;
    if (words[3] == "F") {
      dir = EdgeDirection::Forward;
      if (src >= dst) throw ParseError(lineno, "forward edge must have src < dst");
    } else if (words[3] == "B") {
      dir = EdgeDirection::Backward;
      if (src <= dst) throw ParseError(lineno, "backward edge must have src > dst");
    } else {
      throw ParseError(lineno, "bad direction '" + words[3] + "'");
    }
    const auto op = parse_op_tag(words[4]);
    if (!op) throw ParseError(lineno, "unknown operation '" + words[4] + "'");
    if (!profile.index_of(*op))
      throw ParseError(lineno, "operation '" + words[4] + "' is not in profile " + profile.name);
    parsed.push_back({{src, dst, dir}, *op, lineno});
    max_node = std::max({max_node, src, dst});
  }
  if (parsed.empty()) throw ParseError(lines.size() + 1, "no edges");

  const CellTopology topology(max_node + 1);
  std::vector<std::optional<OpKind>> ops(topology.edge_count());
  for (const auto& p : parsed) {
    const std::size_t idx = *topology.index_of(p.edge);
    if (ops[idx]) throw ParseError(p.line, "duplicate edge " + std::to_string(p.edge.src) + " " + std::to_string(p.edge.dst));
    ops[idx] = p.op;
  }
  ArchitectureSpec spec{profile, topology, {}};
  for (std::size_t e = 0; e < ops.size(); ++e) {
    if (!ops[e]) {
      const Edge& edge = topology.edge(e);
      throw ParseError(lines.size() + 1, "missing edge " + std::to_string(edge.src) + " " + std::to_string(edge.dst) +
                                             (edge.direction == EdgeDirection::Forward ? " F" : " B"));
    }
    spec.ops.push_back(*ops[e]);
  }
  return spec;
}

}  // namespace lightsnn
