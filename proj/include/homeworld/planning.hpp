#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "homeworld/core.hpp"
#include "homeworld/goal.hpp"
#include "homeworld/lexicon.hpp"
#include "homeworld/registry.hpp"

namespace homeworld {

// ----------------------------------------------------------------------------
// Subgoals
// ----------------------------------------------------------------------------

enum class SubgoalVerb { Find, Pickup, Put, Open, Close, ToggleOn, ToggleOff, Slice };

inline constexpr SubgoalVerb kSubgoalVerbs[] = {SubgoalVerb::Find,     SubgoalVerb::Pickup,   SubgoalVerb::Put,
                                                SubgoalVerb::Open,     SubgoalVerb::Close,    SubgoalVerb::ToggleOn,
                                                SubgoalVerb::ToggleOff, SubgoalVerb::Slice};

inline std::string_view to_string(SubgoalVerb v) {
  switch (v) {
    case SubgoalVerb::Find: return "Find";
    case SubgoalVerb::Pickup: return "Pickup";
    case SubgoalVerb::Put: return "Put";
    case SubgoalVerb::Open: return "Open";
    case SubgoalVerb::Close: return "Close";
    case SubgoalVerb::ToggleOn: return "ToggleOn";
    case SubgoalVerb::ToggleOff: return "ToggleOff";
    case SubgoalVerb::Slice: return "Slice";
  }
  return "?";
}

inline SubgoalVerb subgoal_verb_from_string(std::string_view s) {
  for (auto v : kSubgoalVerbs)
    if (to_string(v) == s) return v;
  throw Error(ErrorCode::UnknownVerb, "unknown verb '" + std::string(s) + "'", std::string(s));
}

/// (verb, argument). For Put the argument is the receptacle; the held object
/// is implicit. `another` marks an instance qualifier ("find another book").
struct SubgoalBinary {
  SubgoalVerb verb = SubgoalVerb::Find;
  std::string arg;
  bool another = false;

  friend bool operator==(const SubgoalBinary&, const SubgoalBinary&) = default;
};

inline std::string describe(const SubgoalBinary& b) {
  return std::string(to_string(b.verb)) + " " + (b.another ? "another " : "") + b.arg;
}

/// Sequence equality on (verb, arg), ignoring qualifiers.
inline bool same_steps(const std::vector<SubgoalBinary>& a, const std::vector<SubgoalBinary>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].verb != b[i].verb || a[i].arg != b[i].arg) return false;
  return true;
}

struct SubgoalPhrase {
  std::string text;
  int index = 0;

  friend bool operator==(const SubgoalPhrase&, const SubgoalPhrase&) = default;
};

// ----------------------------------------------------------------------------
// Matching and rendering
// ----------------------------------------------------------------------------

/// Preposition used when rendering a Put into `receptacle`.
inline std::string_view put_preposition(const std::string& receptacle, const ClassRegistry& reg = default_registry()) {
  static const std::set<std::string> vessels{"SinkBasin", "BathtubBasin", "GarbageCan", "LaundryHamper", "Mug", "Cup",
                                             "Bowl",      "Pot",          "Pan",        "Kettle",        "Box"};
  const ObjectClass* c = reg.find(receptacle);
  return (c && c->openable) || vessels.count(receptacle) ? "in" : "on";
}

/// Renders a binary as an imperative phrase. `held` names the carried class
/// for Put phrases; without it the phrase says "it".
inline std::string render(const SubgoalBinary& b, const std::optional<std::string>& held = std::nullopt,
                          const ClassRegistry& reg = default_registry()) {
  const std::string noun = noun_of(b.arg);
  switch (b.verb) {
    case SubgoalVerb::Find: {
      if (b.another) return "find another " + noun;
      const bool vowel = !noun.empty() && std::string("aeiou").find(noun[0]) != std::string::npos;
      return std::string("find ") + (vowel ? "an " : "a ") + noun;
    }
    case SubgoalVerb::Pickup: return "pick up the " + noun;
    case SubgoalVerb::Put: {
      const std::string what = held ? "the " + noun_of(*held) : "it";
      return "put " + what + " " + std::string(put_preposition(b.arg, reg)) + " the " + noun;
    }
    case SubgoalVerb::Open: return "open the " + noun;
    case SubgoalVerb::Close: return "close the " + noun;
    case SubgoalVerb::ToggleOn: return "turn on the " + noun;
    case SubgoalVerb::ToggleOff: return "turn off the " + noun;
    case SubgoalVerb::Slice: return "slice the " + noun;
  }
  return {};
}

/// Parses one subgoal phrase into a binary. Throws UnknownVerb or
/// UnknownObject carrying the offending token.
inline SubgoalBinary match(const std::string& phrase, const ClassRegistry& reg = default_registry(),
                           const Lexicon& lx = default_lexicon()) {
  const auto words = tokenize(phrase);
  if (words.empty()) throw Error(ErrorCode::UnknownVerb, "empty phrase", "");

  SubgoalBinary b;
  std::size_t pos = 0;
  std::size_t end = words.size();
  bool have_verb = false;

  // "toggle faucet on", "turn the lamp off"
  if (lx.toggle_verbs.count(words[0]) && words.size() >= 3 && (words.back() == "on" || words.back() == "off")) {
    b.verb = words.back() == "on" ? SubgoalVerb::ToggleOn : SubgoalVerb::ToggleOff;
    pos = 1;
    end = words.size() - 1;
    have_verb = true;
  }
  for (std::size_t i = 0; !have_verb && i < lx.verbs.size(); ++i) {
    const auto vw = tokenize(lx.verbs[i].first);
    if (vw.size() > words.size() || !std::equal(vw.begin(), vw.end(), words.begin())) continue;
    b.verb = subgoal_verb_from_string(lx.verbs[i].second);
    pos = vw.size();
    have_verb = true;
  }
  if (!have_verb) throw Error(ErrorCode::UnknownVerb, "unknown verb in '" + phrase + "'", words[0]);

  if (b.verb == SubgoalVerb::Put) {
    std::size_t last = std::string::npos;
    for (std::size_t i = pos; i < end; ++i)
      if (lx.prepositions.count(words[i])) last = i;
    if (last != std::string::npos) pos = last + 1;
  }
  std::vector<std::string> noun;
  for (std::size_t i = pos; i < end; ++i) {
    if (lx.determiners.count(words[i])) continue;
    if (lx.qualifiers.count(words[i])) {
      b.another = true;
      continue;
    }
    noun.push_back(words[i]);
  }
  const std::string n = join(noun);
  b.arg = resolve_noun(n, reg, lx);
  if (b.arg.empty()) throw Error(ErrorCode::UnknownObject, "unknown object '" + n + "' in '" + phrase + "'", n);
  return b;
}

inline SubgoalBinary match(const SubgoalPhrase& p, const ClassRegistry& reg = default_registry(),
                           const Lexicon& lx = default_lexicon()) {
  return match(p.text, reg, lx);
}

/// Renders a whole plan, tracking the held class so Put phrases name it.
inline std::vector<SubgoalPhrase> render_plan(const std::vector<SubgoalBinary>& plan,
                                              const ClassRegistry& reg = default_registry()) {
  std::vector<SubgoalPhrase> out;
  std::optional<std::string> held;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    out.push_back({render(plan[i], held, reg), static_cast<int>(i) + 1});
    if (plan[i].verb == SubgoalVerb::Pickup) held = plan[i].arg;
    if (plan[i].verb == SubgoalVerb::Put) held.reset();
  }
  return out;
}

inline std::vector<SubgoalBinary> match_plan(const std::vector<SubgoalPhrase>& phrases,
                                             const ClassRegistry& reg = default_registry(),
                                             const Lexicon& lx = default_lexicon()) {
  std::vector<SubgoalBinary> out;
  for (const auto& p : phrases) out.push_back(match(p, reg, lx));
  return out;
}

// ----------------------------------------------------------------------------
// Task specs and templates
// ----------------------------------------------------------------------------

enum class TaskType {
  PickAndPlace,
  StackAndPlace,
  PickTwoAndPlace,
  CleanAndPlace,
  HeatAndPlace,
  CoolAndPlace,
  ExamineInLight,
  PickThreeAndPlace,
  PickTwoAndCleanAndPlace,
  StackAndHeatAndPlace,
  StackAndCoolAndPlace,
  PickTwoAndStackAndPlace,
};

inline constexpr TaskType kTaskTypes[] = {
    TaskType::PickAndPlace,         TaskType::StackAndPlace,        TaskType::PickTwoAndPlace,
    TaskType::CleanAndPlace,        TaskType::HeatAndPlace,         TaskType::CoolAndPlace,
    TaskType::ExamineInLight,       TaskType::PickThreeAndPlace,    TaskType::PickTwoAndCleanAndPlace,
    TaskType::StackAndHeatAndPlace, TaskType::StackAndCoolAndPlace, TaskType::PickTwoAndStackAndPlace,
};

inline std::string_view to_string(TaskType t) {
  switch (t) {
    case TaskType::PickAndPlace: return "Pick&Place";
    case TaskType::StackAndPlace: return "Stack&Place";
    case TaskType::PickTwoAndPlace: return "PickTwo&Place";
    case TaskType::CleanAndPlace: return "Clean&Place";
    case TaskType::HeatAndPlace: return "Heat&Place";
    case TaskType::CoolAndPlace: return "Cool&Place";
    case TaskType::ExamineInLight: return "Examine&Light";
    case TaskType::PickThreeAndPlace: return "PickThree&Place";
    case TaskType::PickTwoAndCleanAndPlace: return "PickTwo&Clean&Place";
    case TaskType::StackAndHeatAndPlace: return "Stack&Heat&Place";
    case TaskType::StackAndCoolAndPlace: return "Stack&Cool&Place";
    case TaskType::PickTwoAndStackAndPlace: return "PickTwo&Stack&Place";
  }
  return "?";
}

inline TaskType task_type_from_string(std::string_view s) {
  for (auto t : kTaskTypes)
    if (to_string(t) == s) return t;
  throw Error(ErrorCode::UnsupportedTemplate, "unknown task type '" + std::string(s) + "'", std::string(s));
}

/// Template parameters. `objects` by type:
///   Pick&Place, PickTwo&Place, PickThree&Place, PickTwo&Clean&Place: [object, destination]
///   Clean/Heat/Cool&Place: [object] or [object, destination]
///   Examine&Light: [object, lamp]
///   Stack&Place and the Stack/PickTwo&Stack composites: [object, vessel, destination]
/// `source` names the container the object starts in; `slice` prepends the
/// knife preamble and the task then carries the sliced object. The two
/// Stack&Heat/Cool composites always slice.
struct TaskSpec {
  TaskType type = TaskType::PickAndPlace;
  std::vector<std::string> objects;
  int count = 1;
  std::optional<std::string> source;
  bool slice = false;
  std::optional<std::string> knife_dest;
  std::string heat_appliance = "Microwave";

  friend bool operator==(const TaskSpec&, const TaskSpec&) = default;
};

inline std::string_view default_knife_dest() { return "CounterTop"; }

inline int multiplicity(const TaskSpec& s) {
  switch (s.type) {
    case TaskType::PickTwoAndPlace:
    case TaskType::PickTwoAndCleanAndPlace:
    case TaskType::PickTwoAndStackAndPlace: return 2;
    case TaskType::PickThreeAndPlace: return 3;
    case TaskType::PickAndPlace: return s.count;
    default: return 1;
  }
}

inline bool always_slices(TaskType t) { return t == TaskType::StackAndHeatAndPlace || t == TaskType::StackAndCoolAndPlace; }

inline bool slices(const TaskSpec& s) { return s.slice || always_slices(s.type); }

/// The object class the task carries after any slicing.
inline std::string carried_class(const TaskSpec& s) {
  return slices(s) ? sliced_name(s.objects.at(0)) : s.objects.at(0);
}

namespace detail {

inline std::pair<std::size_t, std::size_t> arity(TaskType t) {
  switch (t) {
    case TaskType::CleanAndPlace:
    case TaskType::HeatAndPlace:
    case TaskType::CoolAndPlace: return {1, 2};
    case TaskType::StackAndPlace:
    case TaskType::StackAndHeatAndPlace:
    case TaskType::StackAndCoolAndPlace:
    case TaskType::PickTwoAndStackAndPlace: return {3, 3};
    default: return {2, 2};
  }
}

inline void check_spec(const TaskSpec& s, const ClassRegistry& reg) {
  const auto [lo, hi] = arity(s.type);
  if (s.objects.size() < lo || s.objects.size() > hi)
    throw Error(ErrorCode::ArityMismatch,
                std::string(to_string(s.type)) + " takes " + std::to_string(lo) +
                    (lo == hi ? "" : "-" + std::to_string(hi)) + " objects, got " + std::to_string(s.objects.size()));
  if (s.count < 1 || s.count > 4) throw Error(ErrorCode::ArityMismatch, "count must be in 1..4");
  if (s.count != 1 && s.type != TaskType::PickAndPlace)
    throw Error(ErrorCode::ArityMismatch, "count applies to Pick&Place only");
  for (const auto& o : s.objects) reg.at(o);
  const ObjectClass& obj = reg.at(s.objects[0]);
  if (!obj.pickupable) throw Error(ErrorCode::ArityMismatch, s.objects[0] + " is not pickupable", s.objects[0]);
  if (slices(s)) {
    if (!obj.sliceable || !reg.contains(sliced_name(obj.name)))
      throw Error(ErrorCode::ArityMismatch, s.objects[0] + " is not sliceable", s.objects[0]);
    if (s.source) throw Error(ErrorCode::UnsupportedTemplate, "slicing an object inside a container");
    reg.at(s.knife_dest ? *s.knife_dest : std::string(default_knife_dest()));
  }
  if (s.type == TaskType::ExamineInLight && !is_lamp(s.objects[1]))
    throw Error(ErrorCode::ArityMismatch, s.objects[1] + " is not a lamp", s.objects[1]);
  if (s.source) reg.at(*s.source);
  if (s.heat_appliance != "Microwave" && s.heat_appliance != "StoveBurner")
    throw Error(ErrorCode::UnsupportedTemplate, "heat appliance must be Microwave or StoveBurner", s.heat_appliance);
}

struct Builder {
  const ClassRegistry& reg;
  std::vector<SubgoalBinary> out;

  void add(SubgoalVerb v, const std::string& arg, bool another = false) { out.push_back({v, arg, another}); }

  bool openable(const std::string& c) const { return reg.at(c).openable; }

  void acquire(const std::string& o, const std::optional<std::string>& source, bool another) {
    const bool boxed = source && openable(*source);
    if (boxed) {
      add(SubgoalVerb::Find, *source);
      add(SubgoalVerb::Open, *source);
    }
    add(SubgoalVerb::Find, o, another);
    add(SubgoalVerb::Pickup, o);
    if (boxed) add(SubgoalVerb::Close, *source);
  }

  void deliver(const std::string& r) {
    add(SubgoalVerb::Find, r);
    put_into(r);
  }

  void put_into(const std::string& r) {
    const bool o = openable(r);
    if (o) add(SubgoalVerb::Open, r);
    add(SubgoalVerb::Put, r);
    if (o) add(SubgoalVerb::Close, r);
  }

  void slice_preamble(const std::string& o, const std::string& knife_dest) {
    add(SubgoalVerb::Find, "Knife");
    add(SubgoalVerb::Pickup, "Knife");
    add(SubgoalVerb::Find, o);
    add(SubgoalVerb::Slice, o);
    deliver(knife_dest);
  }

  void clean_in_sink() {
    add(SubgoalVerb::ToggleOn, "Faucet");
    add(SubgoalVerb::ToggleOff, "Faucet");
  }

  /// Heats the held `item`; ends holding it when `retrieve`.
  void heat(const std::string& item, const std::string& appliance, bool retrieve) {
    add(SubgoalVerb::Find, appliance);
    if (appliance == "Microwave") {
      add(SubgoalVerb::Open, appliance);
      add(SubgoalVerb::Put, appliance);
      add(SubgoalVerb::Close, appliance);
      add(SubgoalVerb::ToggleOn, appliance);
      add(SubgoalVerb::ToggleOff, appliance);
      if (!retrieve) return;
      add(SubgoalVerb::Open, appliance);
      add(SubgoalVerb::Pickup, item);
      add(SubgoalVerb::Close, appliance);
    } else {
      add(SubgoalVerb::Put, appliance);
      add(SubgoalVerb::ToggleOn, appliance);
      add(SubgoalVerb::ToggleOff, appliance);
      if (retrieve) add(SubgoalVerb::Pickup, item);
    }
  }

  void cool(const std::string& item, bool retrieve) {
    add(SubgoalVerb::Find, "Fridge");
    add(SubgoalVerb::Open, "Fridge");
    add(SubgoalVerb::Put, "Fridge");
    add(SubgoalVerb::Close, "Fridge");
    if (!retrieve) return;
    add(SubgoalVerb::Open, "Fridge");
    add(SubgoalVerb::Pickup, item);
    add(SubgoalVerb::Close, "Fridge");
  }
};

}  // namespace detail

/// Canonical binary sequence for a task.
inline std::vector<SubgoalBinary> plan_binaries(const TaskSpec& spec, const ClassRegistry& reg = default_registry()) {
  detail::check_spec(spec, reg);
  detail::Builder b{reg, {}};
  const std::string o = carried_class(spec);
  const auto& objs = spec.objects;
  const std::optional<std::string> dest = objs.size() >= 2 ? std::optional(objs.back()) : std::nullopt;

  // The first acquisition; slicing replaces it with the knife preamble.
  auto first_acquire = [&] {
    if (slices(spec)) {
      b.slice_preamble(objs[0], spec.knife_dest ? *spec.knife_dest : std::string(default_knife_dest()));
      b.acquire(o, std::nullopt, false);
    } else {
      b.acquire(o, spec.source, false);
    }
  };

  switch (spec.type) {
    case TaskType::PickAndPlace:
    case TaskType::PickTwoAndPlace:
    case TaskType::PickThreeAndPlace: {
      const int n = multiplicity(spec);
      for (int i = 0; i < n; ++i) {
        if (i == 0) first_acquire();
        else b.acquire(o, spec.source, true);
        b.deliver(*dest);
      }
      break;
    }
    case TaskType::StackAndPlace:
      first_acquire();
      b.deliver(objs[1]);
      b.add(SubgoalVerb::Pickup, objs[1]);
      b.deliver(objs[2]);
      break;
    case TaskType::CleanAndPlace:
      first_acquire();
      b.deliver("SinkBasin");
      b.clean_in_sink();
      if (dest) {
        b.add(SubgoalVerb::Pickup, o);
        b.deliver(*dest);
      }
      break;
    case TaskType::HeatAndPlace:
      first_acquire();
      b.heat(o, spec.heat_appliance, dest.has_value());
      if (dest) b.deliver(*dest);
      break;
    case TaskType::CoolAndPlace:
      first_acquire();
      b.cool(o, dest.has_value());
      if (dest) b.deliver(*dest);
      break;
    case TaskType::ExamineInLight:
      first_acquire();
      b.add(SubgoalVerb::Find, objs[1]);
      b.add(SubgoalVerb::ToggleOn, objs[1]);
      break;
    case TaskType::PickTwoAndCleanAndPlace:
      first_acquire();
      b.deliver("SinkBasin");
      b.acquire(o, spec.source, true);
      b.deliver("SinkBasin");
      b.clean_in_sink();
      b.add(SubgoalVerb::Pickup, o);
      b.deliver(*dest);
      b.add(SubgoalVerb::Find, "SinkBasin");
      b.add(SubgoalVerb::Pickup, o);
      b.deliver(*dest);
      break;
    case TaskType::StackAndHeatAndPlace:
    case TaskType::StackAndCoolAndPlace:
      first_acquire();
      b.deliver(objs[1]);
      b.add(SubgoalVerb::Pickup, objs[1]);
      if (spec.type == TaskType::StackAndHeatAndPlace) b.heat(objs[1], spec.heat_appliance, true);
      else b.cool(objs[1], true);
      b.deliver(objs[2]);
      break;
    case TaskType::PickTwoAndStackAndPlace:
      first_acquire();
      b.deliver(objs[1]);
      b.acquire(o, spec.source, true);
      b.deliver(objs[1]);
      b.add(SubgoalVerb::Pickup, objs[1]);
      b.deliver(objs[2]);
      break;
  }
  return b.out;
}

inline std::vector<SubgoalPhrase> plan_template(const TaskSpec& spec, const ClassRegistry& reg = default_registry()) {
  return render_plan(plan_binaries(spec, reg), reg);
}

/// Goal conditions a task is judged on.
inline GoalSpec derive_goal(const TaskSpec& spec, const ClassRegistry& reg = default_registry()) {
  detail::check_spec(spec, reg);
  GoalSpec g;
  const std::string o = carried_class(spec);
  const auto& objs = spec.objects;
  const int n = multiplicity(spec);
  auto add = [&](GoalPredicate p, const std::string& obj, const std::string& rec = {}, int count = 1) {
    g.conditions.push_back({p, obj, rec, count});
  };
  if (slices(spec)) {
    add(GoalPredicate::Sliced, objs[0]);
    if (spec.knife_dest) add(GoalPredicate::Placed, "Knife", *spec.knife_dest);
  }
  switch (spec.type) {
    case TaskType::PickAndPlace:
    case TaskType::PickTwoAndPlace:
    case TaskType::PickThreeAndPlace: add(GoalPredicate::Placed, o, objs[1], n); break;
    case TaskType::StackAndPlace:
      add(GoalPredicate::Placed, o, objs[1]);
      add(GoalPredicate::Placed, objs[1], objs[2]);
      break;
    case TaskType::CleanAndPlace:
    case TaskType::HeatAndPlace:
    case TaskType::CoolAndPlace: {
      const auto p = spec.type == TaskType::CleanAndPlace  ? GoalPredicate::Clean
                     : spec.type == TaskType::HeatAndPlace ? GoalPredicate::Hot
                                                           : GoalPredicate::Cold;
      add(p, o);
      if (objs.size() == 2) add(GoalPredicate::Placed, o, objs[1]);
      break;
    }
    case TaskType::ExamineInLight: add(GoalPredicate::ExaminedUnderLamp, o); break;
    case TaskType::PickTwoAndCleanAndPlace:
      add(GoalPredicate::Clean, o, {}, 2);
      add(GoalPredicate::Placed, o, objs[1], 2);
      break;
    case TaskType::StackAndHeatAndPlace:
    case TaskType::StackAndCoolAndPlace:
      add(spec.type == TaskType::StackAndHeatAndPlace ? GoalPredicate::Hot : GoalPredicate::Cold, o);
      add(GoalPredicate::Placed, o, objs[1]);
      add(GoalPredicate::Placed, objs[1], objs[2]);
      break;
    case TaskType::PickTwoAndStackAndPlace:
      add(GoalPredicate::Placed, o, objs[1], 2);
      add(GoalPredicate::Placed, objs[1], objs[2]);
      break;
  }
  return g;
}

/// Container hints for the validator: the carried object starts in `source`.
inline std::map<std::string, std::string> container_hints(const TaskSpec& spec) {
  std::map<std::string, std::string> h;
  if (spec.source) h[spec.objects.at(0)] = *spec.source;
  return h;
}

// ----------------------------------------------------------------------------
// Environment prefixes
// ----------------------------------------------------------------------------

struct PrefixAssertions {
  std::set<std::string> present;
  std::set<std::string> absent;

  bool empty() const { return present.empty() && absent.empty(); }
  friend bool operator==(const PrefixAssertions&, const PrefixAssertions&) = default;
};

namespace detail {

/// Alternatives for each appliance slot, preferred first.
inline const std::vector<std::vector<std::string>>& appliance_slots() {
  static const std::vector<std::vector<std::string>> slots{
      {"Microwave", "StoveBurner"},
      {"Fridge"},
      {"SinkBasin"},
      {"FloorLamp", "DeskLamp", "Lamp"},
  };
  return slots;
}

inline std::string rebind(const std::string& cls, const PrefixAssertions& p) {
  for (const auto& slot : appliance_slots()) {
    if (std::find(slot.begin(), slot.end(), cls) == slot.end()) continue;
    if (!p.absent.count(cls) && (p.present.count(cls) || std::none_of(slot.begin(), slot.end(), [&](auto& c) {
                                   return p.present.count(c) != 0;
                                 })))
      return cls;
    for (const auto& alt : slot)
      if (p.present.count(alt) && !p.absent.count(alt)) return alt;
    for (const auto& alt : slot)
      if (!p.absent.count(alt)) return alt;
    throw Error(ErrorCode::NoFeasibleAppliance, "every alternative for " + cls + " is asserted absent", cls);
  }
  return cls;
}

}  // namespace detail

/// Rebinds appliance slots to what the prefix says is present. Returns the
/// adapted spec; absent-asserted classes never survive.
inline TaskSpec adapt_spec(TaskSpec spec, const PrefixAssertions& prefix, const ClassRegistry& reg = default_registry()) {
  for (const auto& c : prefix.present) reg.at(c);
  for (const auto& c : prefix.absent) reg.at(c);
  if (prefix.empty()) return spec;
  const bool heats = spec.type == TaskType::HeatAndPlace || spec.type == TaskType::StackAndHeatAndPlace;
  if (heats) spec.heat_appliance = detail::rebind(spec.heat_appliance, prefix);
  if (spec.type == TaskType::CoolAndPlace || spec.type == TaskType::StackAndCoolAndPlace) detail::rebind("Fridge", prefix);
  if (spec.type == TaskType::CleanAndPlace || spec.type == TaskType::PickTwoAndCleanAndPlace)
    detail::rebind("SinkBasin", prefix);
  if (spec.type == TaskType::ExamineInLight) spec.objects[1] = detail::rebind(spec.objects[1], prefix);
  for (const auto& o : spec.objects)
    if (prefix.absent.count(o))
      throw Error(ErrorCode::NoFeasibleAppliance, o + " is asserted absent and has no alternative", o);
  return spec;
}

inline std::vector<SubgoalPhrase> plan_prefix_adapt(const TaskSpec& spec, const PrefixAssertions& prefix,
                                                    const ClassRegistry& reg = default_registry()) {
  return plan_template(adapt_spec(spec, prefix, reg), reg);
}

}  // namespace homeworld
