#pragma once

#include <string>
#include <vector>

#include "homeworld/core.hpp"

namespace homeworld {

enum class GoalPredicate { Placed, Clean, Hot, Cold, Sliced, ExaminedUnderLamp };

inline std::string_view to_string(GoalPredicate p) {
  switch (p) {
    case GoalPredicate::Placed: return "placed";
    case GoalPredicate::Clean: return "clean";
    case GoalPredicate::Hot: return "hot";
    case GoalPredicate::Cold: return "cold";
    case GoalPredicate::Sliced: return "sliced";
    case GoalPredicate::ExaminedUnderLamp: return "examined_under_lamp";
  }
  return "?";
}

inline GoalPredicate goal_predicate_from_string(std::string_view s) {
  for (auto p : {GoalPredicate::Placed, GoalPredicate::Clean, GoalPredicate::Hot, GoalPredicate::Cold,
                 GoalPredicate::Sliced, GoalPredicate::ExaminedUnderLamp})
    if (to_string(p) == s) return p;
  throw Error(ErrorCode::ParseError, "unknown goal predicate '" + std::string(s) + "'", std::string(s));
}

/// One goal condition. `object` is the class the condition is about; for
/// Placed, `receptacle` names the containing class. For Sliced, `object` is
/// the unsliced class (sliced(Tomato) holds once a SlicedTomato exists).
/// `count` is the number of distinct instances required.
struct GoalAtom {
  GoalPredicate predicate = GoalPredicate::Placed;
  std::string object;
  std::string receptacle;
  int count = 1;

  friend bool operator==(const GoalAtom&, const GoalAtom&) = default;
};

inline std::string describe(const GoalAtom& a) {
  std::string s(to_string(a.predicate));
  s += "(" + a.object;
  if (a.predicate == GoalPredicate::Placed) s += "," + a.receptacle;
  s += ")";
  if (a.count > 1) s += "x" + std::to_string(a.count);
  return s;
}

struct GoalSpec {
  std::vector<GoalAtom> conditions;

  friend bool operator==(const GoalSpec&, const GoalSpec&) = default;
};

}  // namespace homeworld
