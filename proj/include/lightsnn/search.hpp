#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "lightsnn/fitness.hpp"
#include "lightsnn/network.hpp"
#include "lightsnn/searchspace.hpp"

namespace lightsnn {

/// Everything a search needs to score candidates. Every candidate of one
/// search is scored on the same batch with the same weight seed, so scores
/// are comparable and each is a pure function of the architecture.
struct SearchProblem {
  OpSetProfile profile = OpSetProfile::light3();
  CellTopology topology{4};
  Tensor batch;
  std::size_t timesteps = 5;
  std::uint64_t weight_seed = 0;
  Weighting weighting = Weighting::InverseActivity;
  MacroConfig macro{};
  /// Concurrent evaluations. Results never depend on this value.
  std::size_t threads = 1;

  Score evaluate(const SupernetMask& mask) const;
};

struct CandidateScore {
  OpKind op;
  Score score;
};

struct EdgeDecision {
  std::size_t edge = 0;
  /// s_{N \ o} for every op o active on the edge at the start of the round.
  std::vector<CandidateScore> candidates;
  OpKind pruned = OpKind::Zeroize;
  bool degenerate = false;
};

struct PruneRound {
  std::vector<EdgeDecision> edges;
  /// Cumulative masked evaluations at the end of the round.
  std::size_t evaluations = 0;
};

struct PruneTrace {
  std::size_t op_count = 0;
  std::size_t edge_count = 0;
  std::vector<PruneRound> rounds;
  std::size_t evaluations = 0;
  std::vector<std::string> warnings;
};

struct PruneResult {
  ArchitectureSpec architecture;
  PruneTrace trace;
  /// Score of the final single-path network.
  Score score;
};

/// Greedy operator pruning. Each round scores the supernet with every active
/// (edge, op) pair masked off in turn, then removes from every multi-op edge
/// the op whose removal scored highest (ties go to the lowest profile index).
/// Stops when every edge holds a single op.
PruneResult prune_search(const SearchProblem& problem);

struct RandomSearchResult {
  ArchitectureSpec best;
  Score best_score;
  /// Sampled candidates in sampling order with their scores.
  std::vector<ArchitectureSpec> candidates;
  std::vector<Score> scores;
};

/// Samples n candidates (each edge i.i.d. uniform over the profile) and
/// returns the first one with the maximum score. With `distinct`, candidates
/// are drawn without replacement; n >= O^E then covers the whole space.
RandomSearchResult random_search(const SearchProblem& problem, std::uint64_t sampling_seed, std::size_t n_candidates,
                                 bool distinct = false);

struct ComplexityCounters {
  std::size_t evaluations = 0;
  std::size_t rounds = 0;
  /// O * E: the op-edge pair count quoted as the pruning cost.
  std::size_t op_edge_product = 0;
  /// E * (O(O+1)/2 - 1): masked evaluations of a full pruning run.
  std::size_t evaluation_bound = 0;
};

ComplexityCounters complexity_counters(const PruneTrace& trace);

/// Plain-text run summary. Keys appear in a fixed order; the architecture is
/// embedded in its file format, indented by two spaces.
struct SearchReport {
  std::string method;
  std::string profile;
  std::uint64_t seed = 0;
  double score = 0.0;
  std::size_t evaluations = 0;
  std::size_t rounds = 0;
  std::int64_t elapsed_ms = 0;
  ArchitectureSpec architecture{OpSetProfile::light3(), CellTopology{4}, {}};
  double sar = 0.0;
  std::string weighting;
  std::size_t timesteps = 0;
  std::size_t batch_size = 0;
  std::size_t op_edge_product = 0;
  std::uint64_t space_size = 0;
  std::vector<std::string> warnings;

  bool operator==(const SearchReport&) const = default;
};

std::string serialize_report(const SearchReport& report);
/// Throws ParseError on malformed input.
SearchReport parse_report(std::string_view text);

}  // namespace lightsnn
