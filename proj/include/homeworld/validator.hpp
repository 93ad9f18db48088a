#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "homeworld/goal.hpp"
#include "homeworld/planning.hpp"
#include "homeworld/registry.hpp"

namespace homeworld {

enum class FindingCode {
  MissingFind,
  HandOccupied,
  HandEmptyOnPut,
  ReceptacleClosed,
  MissingKnife,
  AffordanceViolation,
  ToggleOrder,
  ContainerDependency,
  GoalUnmet,
  UnknownSymbol,
};

inline constexpr FindingCode kFindingCodes[] = {
    FindingCode::MissingFind,         FindingCode::HandOccupied, FindingCode::HandEmptyOnPut,
    FindingCode::ReceptacleClosed,    FindingCode::MissingKnife, FindingCode::AffordanceViolation,
    FindingCode::ToggleOrder,         FindingCode::ContainerDependency, FindingCode::GoalUnmet,
    FindingCode::UnknownSymbol,
};

inline std::string_view to_string(FindingCode c) {
  switch (c) {
    case FindingCode::MissingFind: return "MissingFind";
    case FindingCode::HandOccupied: return "HandOccupied";
    case FindingCode::HandEmptyOnPut: return "HandEmptyOnPut";
    case FindingCode::ReceptacleClosed: return "ReceptacleClosed";
    case FindingCode::MissingKnife: return "MissingKnife";
    case FindingCode::AffordanceViolation: return "AffordanceViolation";
    case FindingCode::ToggleOrder: return "ToggleOrder";
    case FindingCode::ContainerDependency: return "ContainerDependency";
    case FindingCode::GoalUnmet: return "GoalUnmet";
    case FindingCode::UnknownSymbol: return "UnknownSymbol";
  }
  return "?";
}

/// Index of the plan step, or kGoalIndex for unmet goal atoms.
inline constexpr int kGoalIndex = -1;

struct Finding {
  int index = 0;
  FindingCode code = FindingCode::MissingFind;
  std::string detail;

  friend bool operator==(const Finding&, const Finding&) = default;
};

/// Plan-level state. Objects are tracked per instance so repeated pickups
/// of the same class are counted; receptacles are tracked by class.
struct SymbolicState {
  struct Item {
    std::string cls;
    std::string location;  // receptacle class; empty while in the world or held
    bool clean = false, hot = false, cold = false;
  };

  std::set<std::string> located;
  std::optional<int> holding;  // index into items
  std::set<std::string> open_set;
  std::set<std::string> on_set;
  std::set<std::string> sliced;
  std::set<std::string> examined;
  std::vector<Item> items;
  /// Item chosen by the latest Find of each class.
  std::map<std::string, int> focus;
  /// Receptacle class visited by the latest Find or Put.
  std::string here;
};

namespace detail {

struct Validator {
  const ClassRegistry& reg;
  const std::map<std::string, std::string>& hints;
  SymbolicState st;
  std::vector<Finding> findings;

  void flag(int i, FindingCode c, std::string d) { findings.push_back({i, c, std::move(d)}); }

  bool inside(int item, const std::string& rec, int depth = 0) const {
    const std::string& loc = st.items[item].location;
    if (loc.empty() || depth > 8) return false;
    if (loc == rec) return true;
    for (std::size_t j = 0; j < st.items.size(); ++j)
      if (static_cast<int>(j) != item && st.items[j].cls == loc && !(st.holding && *st.holding == static_cast<int>(j)))
        return inside(static_cast<int>(j), rec, depth + 1);
    return false;
  }

  int fresh(const std::string& cls) {
    st.items.push_back({cls, {}, false, false, false});
    return static_cast<int>(st.items.size()) - 1;
  }

  void require_found(int i, const std::string& cls) {
    if (!st.located.count(cls)) {
      flag(i, FindingCode::MissingFind, cls + " was never found");
      st.located.insert(cls);
    }
  }

  void check_container(int i, const std::string& cls) {
    auto it = hints.find(cls);
    if (it == hints.end()) return;
    const ObjectClass* c = reg.find(it->second);
    if (c && c->openable && !st.open_set.count(it->second))
      flag(i, FindingCode::ContainerDependency, cls + " is inside " + it->second + ", which is not open");
  }

  /// The instance a Pickup of `cls` takes: the found one, then one lying in
  /// the current receptacle, then an untouched one.
  int pick_target(const std::string& cls) {
    if (auto it = st.focus.find(cls); it != st.focus.end()) {
      const int f = it->second;
      if (!(st.holding && *st.holding == f) && (st.items[f].location.empty() || st.items[f].location == st.here))
        return f;
    }
    for (std::size_t j = 0; j < st.items.size(); ++j)
      if (st.items[j].cls == cls && st.items[j].location == st.here && !st.here.empty()) return static_cast<int>(j);
    return fresh(cls);
  }

  void run(const std::vector<SubgoalBinary>& plan) {
    for (int i = 0; i < static_cast<int>(plan.size()); ++i) {
      const auto& b = plan[i];
      const ObjectClass* c = reg.find(b.arg);
      if (!c) {
        flag(i, FindingCode::UnknownSymbol, "unknown class '" + b.arg + "'");
        continue;
      }
      switch (b.verb) {
        case SubgoalVerb::Find: {
          check_container(i, b.arg);
          st.located.insert(b.arg);
          if (c->receptacle) st.here = b.arg;
          if (c->pickupable) {
            auto it = st.focus.find(b.arg);
            // "find the X" again keeps the instance found before
            if (b.another || it == st.focus.end()) st.focus[b.arg] = fresh(b.arg);
          }
          break;
        }
        case SubgoalVerb::Pickup: {
          require_found(i, b.arg);
          check_container(i, b.arg);
          if (!c->pickupable) {
            flag(i, FindingCode::AffordanceViolation, b.arg + " is not pickupable");
            break;
          }
          if (st.holding) {
            flag(i, FindingCode::HandOccupied, "already holding " + st.items[*st.holding].cls);
            st.holding.reset();  // repair: drop it where it is
          }
          const int t = pick_target(b.arg);
          const std::string& loc = st.items[t].location;
          if (!loc.empty()) {
            const ObjectClass* lc = reg.find(loc);
            if (lc && lc->openable && !st.open_set.count(loc))
              flag(i, FindingCode::ReceptacleClosed, b.arg + " is inside closed " + loc);
          }
          st.items[t].location.clear();
          st.holding = t;
          st.focus[b.arg] = t;
          break;
        }
        case SubgoalVerb::Put: {
          require_found(i, b.arg);
          if (!c->receptacle) {
            flag(i, FindingCode::AffordanceViolation, b.arg + " is not a receptacle");
            break;
          }
          if (!st.holding) {
            flag(i, FindingCode::HandEmptyOnPut, "nothing held");
            break;
          }
          if (c->openable && !st.open_set.count(b.arg))
            flag(i, FindingCode::ReceptacleClosed, b.arg + " is closed");
          st.items[*st.holding].location = b.arg;
          st.holding.reset();
          st.here = b.arg;
          break;
        }
        case SubgoalVerb::Open:
        case SubgoalVerb::Close: {
          require_found(i, b.arg);
          const bool open = b.verb == SubgoalVerb::Open;
          if (!c->openable) {
            flag(i, FindingCode::AffordanceViolation, b.arg + " cannot be opened or closed");
            break;
          }
          if (st.open_set.count(b.arg) == (open ? 1u : 0u)) {
            flag(i, FindingCode::AffordanceViolation, b.arg + (open ? " is already open" : " is already closed"));
            break;
          }
          if (open) {
            st.open_set.insert(b.arg);
          } else {
            st.open_set.erase(b.arg);
            if (b.arg == "Fridge")
              for (std::size_t j = 0; j < st.items.size(); ++j)
                if (inside(static_cast<int>(j), "Fridge")) st.items[j].cold = true;
          }
          break;
        }
        case SubgoalVerb::ToggleOn:
        case SubgoalVerb::ToggleOff: {
          const bool on = b.verb == SubgoalVerb::ToggleOn;
          if (!c->toggleable) {
            flag(i, FindingCode::AffordanceViolation, b.arg + " cannot be toggled");
            break;
          }
          if (on) {
            if (st.on_set.count(b.arg)) {
              flag(i, FindingCode::AffordanceViolation, b.arg + " is already on");
              break;
            }
            st.on_set.insert(b.arg);
            if (is_lamp(b.arg) && st.holding) st.examined.insert(st.items[*st.holding].cls);
            break;
          }
          if (!st.on_set.count(b.arg)) {
            flag(i, FindingCode::ToggleOrder, b.arg + " turned off before it was turned on");
            break;
          }
          st.on_set.erase(b.arg);
          for (std::size_t j = 0; j < st.items.size(); ++j) {
            const int k = static_cast<int>(j);
            if (b.arg == "Faucet" && inside(k, "SinkBasin")) st.items[j].clean = true;
            if (b.arg == "Microwave" && !st.open_set.count("Microwave") && inside(k, "Microwave")) st.items[j].hot = true;
            if (b.arg == "StoveBurner" && inside(k, "StoveBurner")) st.items[j].hot = true;
          }
          break;
        }
        case SubgoalVerb::Slice: {
          require_found(i, b.arg);
          if (!st.holding || !is_knife(st.items[*st.holding].cls))
            flag(i, FindingCode::MissingKnife, "slicing " + b.arg + " without a knife in hand");
          if (!c->sliceable || !reg.contains(sliced_name(b.arg))) {
            flag(i, FindingCode::AffordanceViolation, b.arg + " is not sliceable");
            break;
          }
          st.sliced.insert(b.arg);
          const std::string s = sliced_name(b.arg);
          st.located.insert(s);
          st.focus[s] = fresh(s);
          break;
        }
      }
    }
  }

  bool holds(const GoalAtom& a) const {
    int n = 0;
    for (const auto& it : st.items) {
      if (it.cls != a.object) continue;
      switch (a.predicate) {
        case GoalPredicate::Placed: n += it.location == a.receptacle; break;
        case GoalPredicate::Clean: n += it.clean; break;
        case GoalPredicate::Hot: n += it.hot; break;
        case GoalPredicate::Cold: n += it.cold; break;
        default: break;
      }
    }
    if (a.predicate == GoalPredicate::Sliced) return st.sliced.count(a.object) != 0;
    if (a.predicate == GoalPredicate::ExaminedUnderLamp) return st.examined.count(a.object) != 0;
    return n >= a.count;
  }
};

}  // namespace detail

/// Symbolically executes `plan` and returns every finding, in plan order,
/// followed by unmet goal atoms. Execution continues past errors with a
/// repaired state, so one plan can produce several findings.
inline std::vector<Finding> validate(const std::vector<SubgoalBinary>& plan, const GoalSpec& goal,
                                     const ClassRegistry& reg = default_registry(),
                                     const std::map<std::string, std::string>& container_hints = {}) {
  detail::Validator v{reg, container_hints, {}, {}};
  v.run(plan);
  for (const auto& a : goal.conditions) {
    if (!reg.contains(a.object) || (a.predicate == GoalPredicate::Placed && !reg.contains(a.receptacle))) {
      v.flag(kGoalIndex, FindingCode::UnknownSymbol, "goal references unknown class in " + describe(a));
      continue;
    }
    if (!v.holds(a)) v.flag(kGoalIndex, FindingCode::GoalUnmet, describe(a) + " does not hold");
  }
  return v.findings;
}

// ----------------------------------------------------------------------------
// Dataset QA
// ----------------------------------------------------------------------------

struct QARecord {
  int line = 0;
  std::string instruction;
  std::vector<Finding> findings;
  bool valid() const { return findings.empty(); }
};

struct QAReport {
  int total = 0;
  int valid = 0;
  std::map<std::string, int> histogram;
  std::vector<QARecord> records;

  double valid_fraction() const { return total ? static_cast<double>(valid) / total : 0.0; }
};

inline GoalSpec goal_from_json(const nlohmann::json& j) {
  GoalSpec g;
  for (const auto& a : j) {
    GoalAtom atom;
    atom.predicate = goal_predicate_from_string(a.at("predicate").get<std::string>());
    atom.object = a.at("object").get<std::string>();
    atom.receptacle = a.value("receptacle", std::string());
    atom.count = a.value("count", 1);
    g.conditions.push_back(std::move(atom));
  }
  return g;
}

inline nlohmann::ordered_json goal_to_json(const GoalSpec& g) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& a : g.conditions) {
    nlohmann::ordered_json j;
    j["predicate"] = std::string(to_string(a.predicate));
    j["object"] = a.object;
    if (a.predicate == GoalPredicate::Placed) j["receptacle"] = a.receptacle;
    if (a.count != 1) j["count"] = a.count;
    arr.push_back(std::move(j));
  }
  return arr;
}

/// Validates a JSONL plan dataset. Each line holds {instruction, subgoals}
/// plus optional {goal, container_hints}. Phrases that fail to match become
/// UnknownSymbol findings. Malformed JSON throws ParseError with the line.
/// An empty file throws unless `allow_empty`.
inline QAReport qa_dataset_text(const std::string& text, const ClassRegistry& reg = default_registry(),
                                bool allow_empty = false) {
  QAReport rep;
  std::istringstream in(text);
  std::string row;
  int line = 0;
  while (std::getline(in, row)) {
    ++line;
    if (row.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(row);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + e.what(), {}, line);
    }
    QARecord rec;
    rec.line = line;
    try {
      rec.instruction = j.at("instruction").get<std::string>();
      std::vector<SubgoalBinary> plan;
      const auto& subs = j.at("subgoals");
      for (std::size_t i = 0; i < subs.size(); ++i) {
        try {
          plan.push_back(match(subs[i].get<std::string>(), reg));
        } catch (const Error& e) {
          rec.findings.push_back({static_cast<int>(i), FindingCode::UnknownSymbol, e.what()});
          plan.push_back({SubgoalVerb::Find, "?", false});
        }
      }
      GoalSpec goal = j.contains("goal") ? goal_from_json(j.at("goal")) : GoalSpec{};
      std::map<std::string, std::string> hints;
      if (j.contains("container_hints")) hints = j.at("container_hints").get<std::map<std::string, std::string>>();
      auto f = validate(plan, goal, reg, hints);
      // The placeholder for an unmatched phrase already produced a finding.
      f.erase(std::remove_if(f.begin(), f.end(),
                             [&](const Finding& x) {
                               return x.index >= 0 && x.index < static_cast<int>(plan.size()) && plan[x.index].arg == "?";
                             }),
              f.end());
      rec.findings.insert(rec.findings.end(), f.begin(), f.end());
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + e.what(), {}, line);
    }
    ++rep.total;
    if (rec.valid()) ++rep.valid;
    for (const auto& f : rec.findings) ++rep.histogram[std::string(to_string(f.code))];
    rep.records.push_back(std::move(rec));
  }
  if (rep.total == 0 && !allow_empty) throw Error(ErrorCode::ParseError, "dataset is empty", {}, 1);
  return rep;
}

inline QAReport qa_dataset(const std::string& path, const ClassRegistry& reg = default_registry(),
                           bool allow_empty = false) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'", path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return qa_dataset_text(ss.str(), reg, allow_empty);
}

inline nlohmann::ordered_json to_json(const QAReport& r) {
  nlohmann::ordered_json j;
  j["total"] = r.total;
  j["valid"] = r.valid;
  j["valid_fraction"] = r.valid_fraction();
  nlohmann::ordered_json hist = nlohmann::ordered_json::object();
  for (auto c : kFindingCodes)
    if (auto it = r.histogram.find(std::string(to_string(c))); it != r.histogram.end()) hist[it->first] = it->second;
  j["histogram"] = std::move(hist);
  auto findings = nlohmann::ordered_json::array();
  for (const auto& rec : r.records)
    for (const auto& f : rec.findings)
      findings.push_back({{"line", rec.line}, {"index", f.index}, {"code", std::string(to_string(f.code))}, {"detail", f.detail}});
  j["findings"] = std::move(findings);
  return j;
}

inline std::string qa_table(const QAReport& r) {
  std::ostringstream out;
  out << "records  " << r.total << "\nvalid    " << r.valid << "\nfraction " << r.valid_fraction() << "\n";
  for (auto c : kFindingCodes)
    if (auto it = r.histogram.find(std::string(to_string(c))); it != r.histogram.end())
      out << "  " << it->first << std::string(22 - std::min<std::size_t>(21, it->first.size()), ' ') << it->second << "\n";
  return out.str();
}

}  // namespace homeworld
