#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "homeworld/planning.hpp"
#include "homeworld/similarity.hpp"

namespace homeworld {

/// Default exploration budget per Find subgoal, in agent actions.
inline constexpr int kExploreBudget = 150;

struct ReplanDecision {
  std::string original;
  std::map<std::string, double> scores;
  std::optional<std::string> chosen;
  double threshold = kReplanThreshold;
  std::vector<SubgoalBinary> rewritten;
};

/// Substitutes the most similar confirmed class for `target` in the
/// remaining subgoals. Find, Put, Open, Close and toggle arguments are
/// rewritten; Pickup and Slice keep theirs. `bound` lists classes already
/// serving other roles in the plan; they are never candidates.
inline ReplanDecision replan(const std::vector<SubgoalBinary>& subgoals, const std::string& target,
                             const std::set<std::string>& inventory, const SimilarityProvider& provider = builtin_similarity(),
                             const std::set<std::string>& bound = {}) {
  if (inventory.empty()) throw Error(ErrorCode::EmptyInventory, "confirmed inventory is empty");
  ReplanDecision d;
  d.original = target;
  d.rewritten = subgoals;
  std::set<std::string> candidates;
  for (const auto& c : inventory)
    if (c != target && !bound.count(c)) candidates.insert(c);
  if (candidates.empty()) return d;
  d.scores = similarity(target, candidates, provider);
  // std::map iterates in name order, so strict > keeps the smaller name on ties.
  double best = d.threshold;
  for (const auto& [c, s] : d.scores)
    if (s > best) {
      best = s;
      d.chosen = c;
    }
  if (d.chosen)
    for (auto& b : d.rewritten)
      if (b.arg == target && b.verb != SubgoalVerb::Pickup && b.verb != SubgoalVerb::Slice) b.arg = *d.chosen;
  return d;
}

struct SearchState {
  int steps_on_subgoal = 0;
  bool frontier_exhausted = false;
};

inline bool should_trigger(const SearchState& s, int budget = kExploreBudget) {
  if (budget <= 0) throw Error(ErrorCode::InvalidArgument, "explore budget must be positive");
  return s.steps_on_subgoal >= budget || s.frontier_exhausted;
}

/// Classes the plan uses in roles other than `target`.
inline std::set<std::string> bound_classes(const std::vector<SubgoalBinary>& plan, const std::string& target) {
  std::set<std::string> out;
  for (const auto& b : plan)
    if (b.arg != target) out.insert(b.arg);
  return out;
}

}  // namespace homeworld
