#include "lightsnn/search.hpp"

#include <stdexcept>
#include <unordered_set>

#include "lightsnn/parallel.hpp"

namespace lightsnn {

Score SearchProblem::evaluate(const SupernetMask& mask) const {
  return evaluate_architecture(mask, batch, timesteps, weight_seed, weighting, macro);
}

PruneResult prune_search(const SearchProblem& problem) {
  SupernetMask mask = SupernetMask::full(problem.profile, problem.topology);
  PruneTrace trace;
  trace.op_count = problem.profile.size();
  trace.edge_count = problem.topology.edge_count();

  while (!mask.is_single_path()) {
    struct Job {
      std::size_t edge;
      std::size_t op_index;
    };
    std::vector<Job> jobs;
    for (std::size_t e = 0; e < mask.edge_count(); ++e) {
      if (mask.active_count(e) < 2) continue;
      for (std::size_t k : mask.active_indices(e)) jobs.push_back({e, k});
    }

    std::vector<Score> scores(jobs.size());
    parallel_for(jobs.size(), problem.threads, [&](std::size_t i) {
      scores[i] = problem.evaluate(mask.without(jobs[i].edge, jobs[i].op_index));
    });
    trace.evaluations += jobs.size();

    PruneRound round;
    std::vector<std::pair<std::size_t, std::size_t>> removals;
    for (std::size_t i = 0; i < jobs.size();) {
      EdgeDecision decision;
      decision.edge = jobs[i].edge;
      std::size_t best = i;
      bool any_finite = false;
      std::size_t j = i;
      for (; j < jobs.size() && jobs[j].edge == decision.edge; ++j) {
        decision.candidates.push_back({problem.profile.ops[jobs[j].op_index], scores[j]});
        any_finite = any_finite || !scores[j].is_degenerate();
        // Strict comparison keeps the lowest canonical index on ties.
        if (scores[j] > scores[best]) best = j;
      }
      if (!any_finite) {
        best = i;
        decision.degenerate = true;
        trace.warnings.push_back("round " + std::to_string(trace.rounds.size() + 1) + " edge " +
                                 std::to_string(decision.edge) + ": all masked scores degenerate, removed " +
                                 std::string(op_tag(problem.profile.ops[jobs[i].op_index])));
      }
      decision.pruned = problem.profile.ops[jobs[best].op_index];
      removals.emplace_back(jobs[best].edge, jobs[best].op_index);
      round.edges.push_back(std::move(decision));
      i = j;
    }
    for (const auto& [edge, op] : removals) mask.remove(edge, op);
    round.evaluations = trace.evaluations;
    trace.rounds.push_back(std::move(round));
  }

  PruneResult result{mask.to_spec(), std::move(trace), {}};
  result.score = problem.evaluate(mask);
  return result;
}

RandomSearchResult random_search(const SearchProblem& problem, std::uint64_t sampling_seed, std::size_t n_candidates,
                                 bool distinct) {
  if (n_candidates == 0) throw std::invalid_argument("random_search: need at least one candidate");
  Rng rng(sampling_seed);
  const std::size_t edges = problem.topology.edge_count();
  const std::size_t ops = problem.profile.size();

  RandomSearchResult result{{problem.profile, problem.topology, {}}, Score::degenerate(), {}, {}};
  if (distinct) {
    const std::uint64_t space = enumerate_space(problem.profile, problem.topology);
    std::vector<std::uint64_t> indices;
    if (n_candidates >= space) {
      indices.resize(space);
      for (std::uint64_t i = 0; i < space; ++i) indices[i] = i;
      for (std::uint64_t i = space; i > 1; --i) std::swap(indices[i - 1], indices[rng.uniform_index(i)]);
    } else {
      std::unordered_set<std::uint64_t> seen;
      while (indices.size() < n_candidates) {
        const std::uint64_t idx = rng.uniform_index(space);
        if (seen.insert(idx).second) indices.push_back(idx);
      }
    }
    for (std::uint64_t idx : indices)
      result.candidates.push_back(architecture_from_index(problem.profile, problem.topology, idx));
  } else {
    for (std::size_t c = 0; c < n_candidates; ++c) {
      ArchitectureSpec spec{problem.profile, problem.topology, std::vector<OpKind>(edges)};
      for (auto& op : spec.ops) op = problem.profile.ops[rng.uniform_index(ops)];
      result.candidates.push_back(std::move(spec));
    }
  }

  result.scores.resize(result.candidates.size());
  parallel_for(result.candidates.size(), problem.threads, [&](std::size_t i) {
    result.scores[i] = problem.evaluate(SupernetMask::from_spec(result.candidates[i]));
  });

  std::size_t best = 0;
  for (std::size_t i = 1; i < result.scores.size(); ++i)
    if (result.scores[i] > result.scores[best]) best = i;
  result.best = result.candidates[best];
  result.best_score = result.scores[best];
  return result;
}

ComplexityCounters complexity_counters(const PruneTrace& trace) {
  ComplexityCounters c;
  c.evaluations = trace.evaluations;
  c.rounds = trace.rounds.size();
  c.op_edge_product = trace.op_count * trace.edge_count;
  c.evaluation_bound = trace.edge_count * (trace.op_count * (trace.op_count + 1) / 2 - 1);
  return c;
}

}  // namespace lightsnn
