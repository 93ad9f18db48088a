#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "homeworld/core.hpp"
#include "homeworld/goal.hpp"
#include "homeworld/registry.hpp"

namespace homeworld {

struct ObjectState {
  bool is_open = false;
  bool is_on = false;
  bool is_sliced = false;
  bool is_clean = false;
  bool is_hot = false;
  bool is_cold = false;

  friend bool operator==(const ObjectState&, const ObjectState&) = default;
};

struct SceneObject {
  std::string id;
  std::string cls;
  Cell cell;
  ObjectState state;
  std::vector<std::string> contents;
  std::optional<std::string> inside_of;

  friend bool operator==(const SceneObject&, const SceneObject&) = default;
};

struct AgentPose {
  Cell cell;
  Heading heading = Heading::N;
  std::optional<std::string> held;

  friend bool operator==(const AgentPose&, const AgentPose&) = default;
};

struct Scene {
  int grid_w = 0;
  int grid_h = 0;
  std::set<Cell> obstacles;
  std::vector<SceneObject> objects;
  AgentPose agent;
  std::uint64_t rng_seed = 0;
  /// Number of actions applied so far; indexes the observation noise stream.
  std::uint64_t tick = 0;

  bool in_bounds(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < grid_w && c.y < grid_h; }

  const SceneObject* find(const std::string& id) const {
    for (const auto& o : objects)
      if (o.id == id) return &o;
    return nullptr;
  }
  SceneObject* find(const std::string& id) {
    for (auto& o : objects)
      if (o.id == id) return &o;
    return nullptr;
  }

  friend bool operator==(const Scene&, const Scene&) = default;
};

// ----------------------------------------------------------------------------
// Actions
// ----------------------------------------------------------------------------

enum class ActionVerb { MoveAhead, RotateLeft, RotateRight, Pickup, Put, Open, Close, ToggleOn, ToggleOff, Slice };

inline std::string_view to_string(ActionVerb v) {
  switch (v) {
    case ActionVerb::MoveAhead: return "MoveAhead";
    case ActionVerb::RotateLeft: return "RotateLeft";
    case ActionVerb::RotateRight: return "RotateRight";
    case ActionVerb::Pickup: return "Pickup";
    case ActionVerb::Put: return "Put";
    case ActionVerb::Open: return "Open";
    case ActionVerb::Close: return "Close";
    case ActionVerb::ToggleOn: return "ToggleOn";
    case ActionVerb::ToggleOff: return "ToggleOff";
    case ActionVerb::Slice: return "Slice";
  }
  return "?";
}

inline bool is_navigation(ActionVerb v) {
  return v == ActionVerb::MoveAhead || v == ActionVerb::RotateLeft || v == ActionVerb::RotateRight;
}

struct Action {
  ActionVerb verb = ActionVerb::MoveAhead;
  std::optional<std::string> target;

  static Action move() { return {ActionVerb::MoveAhead, std::nullopt}; }
  static Action left() { return {ActionVerb::RotateLeft, std::nullopt}; }
  static Action right() { return {ActionVerb::RotateRight, std::nullopt}; }
  static Action on(ActionVerb v, std::string id) { return {v, std::move(id)}; }

  friend bool operator==(const Action&, const Action&) = default;
};

inline std::string describe(const Action& a) {
  std::string s(to_string(a.verb));
  if (a.target) s += "(" + *a.target + ")";
  return s;
}

enum class StepError {
  None,
  BlockedMove,
  NotVisible,
  OutOfRange,
  AffordanceViolation,
  HandOccupied,
  HandEmpty,
  ReceptacleClosed,
};

inline std::string_view to_string(StepError e) {
  switch (e) {
    case StepError::None: return "None";
    case StepError::BlockedMove: return "BlockedMove";
    case StepError::NotVisible: return "NotVisible";
    case StepError::OutOfRange: return "OutOfRange";
    case StepError::AffordanceViolation: return "AffordanceViolation";
    case StepError::HandOccupied: return "HandOccupied";
    case StepError::HandEmpty: return "HandEmpty";
    case StepError::ReceptacleClosed: return "ReceptacleClosed";
  }
  return "?";
}

struct Outcome {
  StepError error = StepError::None;
  std::string detail;

  bool ok() const { return error == StepError::None; }
  static Outcome success() { return {}; }
  static Outcome failure(StepError e, std::string detail) { return {e, std::move(detail)}; }
};

struct StepResult {
  Scene scene;
  Outcome outcome;
};

// ----------------------------------------------------------------------------
// Scene queries
// ----------------------------------------------------------------------------

/// Outermost container of `id` (itself when free-standing).
inline const SceneObject* root_of(const Scene& scene, const std::string& id) {
  const SceneObject* o = scene.find(id);
  for (int guard = 0; o && o->inside_of && guard < 1024; ++guard) o = scene.find(*o->inside_of);
  return o;
}

/// True when some container along the chain is openable and closed.
inline bool is_hidden(const Scene& scene, const SceneObject& obj, const ClassRegistry& reg) {
  const SceneObject* o = &obj;
  for (int guard = 0; o->inside_of && guard < 1024; ++guard) {
    const SceneObject* parent = scene.find(*o->inside_of);
    if (!parent) return false;
    const ObjectClass* pc = reg.find(parent->cls);
    if (pc && pc->openable && !parent->state.is_open) return true;
    o = parent;
  }
  return false;
}

/// Held objects and anything they carry.
inline bool is_carried(const Scene& scene, const SceneObject& obj) {
  if (!scene.agent.held) return false;
  const SceneObject* o = &obj;
  for (int guard = 0; guard < 1024; ++guard) {
    if (o->id == *scene.agent.held) return true;
    if (!o->inside_of) return false;
    o = scene.find(*o->inside_of);
    if (!o) return false;
  }
  return false;
}

/// Cells that stop motion and sight: obstacles plus free-standing objects.
inline std::set<Cell> blocking_cells(const Scene& scene) {
  std::set<Cell> out = scene.obstacles;
  for (const auto& o : scene.objects)
    if (!o.inside_of && !is_carried(scene, o)) out.insert(o.cell);
  return out;
}

/// Cells the agent currently sees: in-bounds wedge cells with line of sight.
inline std::set<Cell> visible_cells(const Scene& scene, const std::set<Cell>& blocking) {
  std::set<Cell> out;
  const Cell a = scene.agent.cell;
  for (int y = a.y - kViewRange; y <= a.y + kViewRange; ++y) {
    for (int x = a.x - kViewRange; x <= a.x + kViewRange; ++x) {
      const Cell c{x, y};
      if (!scene.in_bounds(c) || !in_wedge(a, scene.agent.heading, c)) continue;
      if (line_of_sight(a, c, [&](Cell m) { return blocking.count(m) != 0; })) out.insert(c);
    }
  }
  return out;
}

inline bool object_visible(const Scene& scene, const SceneObject& obj, const ClassRegistry& reg) {
  if (is_carried(scene, obj) || is_hidden(scene, obj, reg)) return false;
  const auto blocking = blocking_cells(scene);
  const Cell a = scene.agent.cell;
  if (!scene.in_bounds(obj.cell) || !in_wedge(a, scene.agent.heading, obj.cell)) return false;
  return line_of_sight(a, obj.cell, [&](Cell m) { return blocking.count(m) != 0; });
}

// ----------------------------------------------------------------------------
// Observation
// ----------------------------------------------------------------------------

inline constexpr int kVisibilityConstant = 40;

/// ceil(base_size * K / d), d the Chebyshev distance (>= 1).
inline int pixel_count(int base_size, int distance) {
  const int d = std::max(distance, 1);
  return (base_size * kVisibilityConstant + d - 1) / d;
}

struct NoiseConfig {
  double p_miss = 0.0;
  double p_mis = 0.0;
  std::uint64_t seed = 0;

  bool off() const { return p_miss <= 0.0 && p_mis <= 0.0; }
};

/// Fixed relabel table used by the detection-noise model.
inline const std::map<std::string, std::string>& confusion_table() {
  static const std::map<std::string, std::string> table{
      {"Mug", "Cup"},           {"Cup", "Mug"},
      {"Apple", "Tomato"},      {"Tomato", "Apple"},
      {"Potato", "Apple"},      {"Pen", "Pencil"},
      {"Pencil", "Pen"},        {"Knife", "ButterKnife"},
      {"ButterKnife", "Knife"}, {"CellPhone", "RemoteControl"},
      {"RemoteControl", "CellPhone"}, {"Laptop", "Book"},
      {"Book", "Laptop"},       {"Bowl", "Plate"},
      {"Plate", "Bowl"},        {"Pot", "Pan"},
      {"Pan", "Pot"},           {"Desk", "SideTable"},
      {"SideTable", "Desk"},    {"DiningTable", "CoffeeTable"},
      {"CoffeeTable", "DiningTable"}, {"Sofa", "ArmChair"},
      {"ArmChair", "Sofa"},     {"FloorLamp", "DeskLamp"},
      {"DeskLamp", "FloorLamp"}, {"Towel", "HandTowel"},
      {"HandTowel", "Towel"},   {"SaltShaker", "PepperShaker"},
      {"PepperShaker", "SaltShaker"}, {"Cabinet", "Drawer"},
      {"Drawer", "Cabinet"},    {"Shelf", "ShelvingUnit"},
      {"ShelvingUnit", "Shelf"}, {"Spoon", "Fork"},
      {"Fork", "Spoon"},
  };
  return table;
}

struct Detection {
  std::string object_id;
  std::string class_name;
  int pixel_count = 0;
  std::vector<Cell> cells;

  friend bool operator==(const Detection&, const Detection&) = default;
};

struct Observation {
  std::vector<Detection> detections;
  /// Ray hits: cell -> Chebyshev distance, for every observed blocking cell.
  std::map<Cell, int> depth;
  std::set<Cell> observed_cells;
  std::uint64_t step = 0;

  friend bool operator==(const Observation&, const Observation&) = default;
};

inline Observation observe(const Scene& scene, const NoiseConfig& noise = {},
                           const ClassRegistry& reg = default_registry()) {
  Observation obs;
  obs.step = scene.tick;
  const auto blocking = blocking_cells(scene);
  obs.observed_cells = visible_cells(scene, blocking);
  for (const Cell& c : obs.observed_cells)
    if (blocking.count(c)) obs.depth.emplace(c, chebyshev(scene.agent.cell, c));

  std::vector<const SceneObject*> ordered;
  for (const auto& o : scene.objects) ordered.push_back(&o);
  std::sort(ordered.begin(), ordered.end(), [](auto* a, auto* b) { return a->id < b->id; });

  Rng rng(mix_seed(mix_seed(scene.rng_seed, noise.seed), scene.tick));
  const auto& confusion = confusion_table();
  for (const SceneObject* o : ordered) {
    if (!obs.observed_cells.count(o->cell)) continue;
    if (is_carried(scene, *o) || is_hidden(scene, *o, reg)) continue;
    const ObjectClass* oc = reg.find(o->cls);
    const int base = oc ? oc->base_size : 1;
    Detection det{o->id, o->cls, pixel_count(base, chebyshev(scene.agent.cell, o->cell)), {o->cell}};
    // Both draws happen for every candidate so the stream does not depend on outcomes.
    const double u_miss = uniform01(rng);
    const double u_mis = uniform01(rng);
    if (u_miss < noise.p_miss) continue;
    if (u_mis < noise.p_mis) {
      if (auto it = confusion.find(det.class_name); it != confusion.end()) det.class_name = it->second;
    }
    obs.detections.push_back(std::move(det));
  }
  return obs;
}

// ----------------------------------------------------------------------------
// Transition function
// ----------------------------------------------------------------------------

namespace detail {

inline void move_subtree(Scene& scene, const std::string& id, Cell cell) {
  SceneObject* o = scene.find(id);
  if (!o) return;
  o->cell = cell;
  const auto contents = o->contents;
  for (const auto& child : contents) move_subtree(scene, child, cell);
}

template <typename Fn>
void for_each_content(Scene& scene, const std::string& id, Fn&& fn) {
  SceneObject* o = scene.find(id);
  if (!o) return;
  const auto contents = o->contents;
  for (const auto& child : contents) {
    if (SceneObject* c = scene.find(child)) fn(*c);
    for_each_content(scene, child, fn);
  }
}

inline void detach(Scene& scene, SceneObject& obj) {
  if (!obj.inside_of) return;
  if (SceneObject* parent = scene.find(*obj.inside_of)) {
    auto& v = parent->contents;
    v.erase(std::remove(v.begin(), v.end(), obj.id), v.end());
  }
  obj.inside_of.reset();
}

}  // namespace detail

/// Applies `action` to `scene` in place. Precondition: the action is
/// well-formed (navigation verbs carry no target, interaction verbs one).
inline Outcome apply(Scene& scene, const Action& action, const ClassRegistry& reg = default_registry()) {
  const bool nav = is_navigation(action.verb);
  if (nav == action.target.has_value())
    throw Error(ErrorCode::InvalidArgument, "malformed action " + describe(action));
  ++scene.tick;
  AgentPose& agent = scene.agent;

  switch (action.verb) {
    case ActionVerb::RotateLeft: agent.heading = rotate_left(agent.heading); return Outcome::success();
    case ActionVerb::RotateRight: agent.heading = rotate_right(agent.heading); return Outcome::success();
    case ActionVerb::MoveAhead: {
      const Cell next = step_cell(agent.cell, agent.heading);
      if (!scene.in_bounds(next) || blocking_cells(scene).count(next))
        return Outcome::failure(StepError::BlockedMove, "cell ahead is blocked");
      agent.cell = next;
      if (agent.held) detail::move_subtree(scene, *agent.held, next);
      return Outcome::success();
    }
    default: break;
  }

  const std::string& id = *action.target;
  SceneObject* target = scene.find(id);
  if (!target) return Outcome::failure(StepError::NotVisible, "no object '" + id + "'");
  const ObjectClass* tc = reg.find(target->cls);
  if (!tc) return Outcome::failure(StepError::AffordanceViolation, "unregistered class " + target->cls);

  if (action.verb == ActionVerb::Put && !agent.held) return Outcome::failure(StepError::HandEmpty, "nothing held");
  if (action.verb == ActionVerb::Pickup && agent.held)
    return Outcome::failure(StepError::HandOccupied, "already holding " + *agent.held);
  if (!object_visible(scene, *target, reg)) return Outcome::failure(StepError::NotVisible, id + " not visible");
  if (chebyshev(agent.cell, target->cell) > kInteractionRange)
    return Outcome::failure(StepError::OutOfRange, id + " out of range");

  switch (action.verb) {
    case ActionVerb::Pickup: {
      if (!tc->pickupable) return Outcome::failure(StepError::AffordanceViolation, target->cls + " is not pickupable");
      detail::detach(scene, *target);
      agent.held = id;
      detail::move_subtree(scene, id, agent.cell);
      return Outcome::success();
    }
    case ActionVerb::Put: {
      if (!tc->receptacle) return Outcome::failure(StepError::AffordanceViolation, target->cls + " is not a receptacle");
      if (*agent.held == id) return Outcome::failure(StepError::AffordanceViolation, "cannot put an object into itself");
      if (tc->openable && !target->state.is_open)
        return Outcome::failure(StepError::ReceptacleClosed, target->cls + " is closed");
      SceneObject* held = scene.find(*agent.held);
      held->inside_of = id;
      target->contents.push_back(held->id);
      const Cell dest = target->cell;
      agent.held.reset();
      detail::move_subtree(scene, held->id, dest);
      return Outcome::success();
    }
    case ActionVerb::Open:
    case ActionVerb::Close: {
      const bool open = action.verb == ActionVerb::Open;
      if (!tc->openable) return Outcome::failure(StepError::AffordanceViolation, target->cls + " is not openable");
      if (target->state.is_open == open)
        return Outcome::failure(StepError::AffordanceViolation, target->cls + (open ? " already open" : " already closed"));
      target->state.is_open = open;
      if (!open && target->cls == "Fridge")
        detail::for_each_content(scene, id, [](SceneObject& o) { o.state.is_cold = true; });
      return Outcome::success();
    }
    case ActionVerb::ToggleOn:
    case ActionVerb::ToggleOff: {
      const bool on = action.verb == ActionVerb::ToggleOn;
      if (!tc->toggleable) return Outcome::failure(StepError::AffordanceViolation, target->cls + " is not toggleable");
      if (target->state.is_on == on)
        return Outcome::failure(StepError::AffordanceViolation, target->cls + (on ? " already on" : " already off"));
      target->state.is_on = on;
      if (on) return Outcome::success();
      if (target->cls == "Faucet") {
        const Cell fc = target->cell;
        std::vector<std::string> sinks;
        for (const auto& o : scene.objects)
          if (o.cls == "SinkBasin" && chebyshev(o.cell, fc) <= kInteractionRange) sinks.push_back(o.id);
        for (const auto& s : sinks)
          detail::for_each_content(scene, s, [](SceneObject& o) { o.state.is_clean = true; });
      } else if ((target->cls == "Microwave" && !target->state.is_open) || target->cls == "StoveBurner") {
        detail::for_each_content(scene, id, [](SceneObject& o) { o.state.is_hot = true; });
      }
      return Outcome::success();
    }
    case ActionVerb::Slice: {
      if (!agent.held) return Outcome::failure(StepError::HandEmpty, "slicing needs a knife in hand");
      const SceneObject* held = scene.find(*agent.held);
      if (!held || !is_knife(held->cls)) return Outcome::failure(StepError::AffordanceViolation, "held object is not a knife");
      if (!tc->sliceable || !reg.contains(sliced_name(target->cls)))
        return Outcome::failure(StepError::AffordanceViolation, target->cls + " is not sliceable");
      target->cls = sliced_name(target->cls);
      target->state.is_sliced = true;
      return Outcome::success();
    }
    default: break;
  }
  return Outcome::failure(StepError::AffordanceViolation, "unsupported action");
}

inline StepResult step(Scene scene, const Action& action, const ClassRegistry& reg = default_registry()) {
  Outcome out = apply(scene, action, reg);
  return {std::move(scene), std::move(out)};
}

// ----------------------------------------------------------------------------
// Goal evaluation against ground truth
// ----------------------------------------------------------------------------

inline bool holds(const Scene& scene, const GoalAtom& atom) {
  int n = 0;
  switch (atom.predicate) {
    case GoalPredicate::Placed:
      for (const auto& o : scene.objects) {
        if (o.cls != atom.object || !o.inside_of) continue;
        const SceneObject* parent = scene.find(*o.inside_of);
        if (parent && parent->cls == atom.receptacle) ++n;
      }
      break;
    case GoalPredicate::Clean:
    case GoalPredicate::Hot:
    case GoalPredicate::Cold:
      for (const auto& o : scene.objects) {
        if (o.cls != atom.object) continue;
        const bool flag = atom.predicate == GoalPredicate::Clean ? o.state.is_clean
                          : atom.predicate == GoalPredicate::Hot ? o.state.is_hot
                                                                 : o.state.is_cold;
        if (flag) ++n;
      }
      break;
    case GoalPredicate::Sliced:
      for (const auto& o : scene.objects)
        if (o.state.is_sliced && o.cls == sliced_name(atom.object)) ++n;
      break;
    case GoalPredicate::ExaminedUnderLamp: {
      if (!scene.agent.held) return false;
      const SceneObject* held = scene.find(*scene.agent.held);
      if (!held || held->cls != atom.object) return false;
      for (const auto& o : scene.objects)
        if (is_lamp(o.cls) && o.state.is_on && chebyshev(o.cell, scene.agent.cell) <= kInteractionRange) return true;
      return false;
    }
  }
  return n >= atom.count;
}

/// Number of satisfied goal conditions.
inline int conditions_met(const Scene& scene, const GoalSpec& goal) {
  int n = 0;
  for (const auto& a : goal.conditions) n += holds(scene, a) ? 1 : 0;
  return n;
}

// ----------------------------------------------------------------------------
// Scene invariants
// ----------------------------------------------------------------------------

struct SceneViolation {
  std::string message;
  /// Index into scene.objects, or -1 for scene-level problems.
  int object_index = -1;
};

inline std::vector<SceneViolation> check_scene(const Scene& scene, const ClassRegistry& reg = default_registry()) {
  std::vector<SceneViolation> out;
  auto bad = [&](std::string m, int idx = -1) { out.push_back({std::move(m), idx}); };
  if (scene.grid_w <= 0 || scene.grid_h <= 0) bad("grid dimensions must be positive");
  for (const Cell& c : scene.obstacles)
    if (!scene.in_bounds(c)) bad("obstacle out of bounds");

  std::map<std::string, int> ids;
  for (int i = 0; i < static_cast<int>(scene.objects.size()); ++i) {
    const auto& o = scene.objects[i];
    if (o.id.empty()) bad("object id is empty", i);
    if (!ids.emplace(o.id, i).second) bad("duplicate object id '" + o.id + "'", i);
  }
  std::map<Cell, std::string> placed;
  for (int i = 0; i < static_cast<int>(scene.objects.size()); ++i) {
    const auto& o = scene.objects[i];
    const ObjectClass* oc = reg.find(o.cls);
    if (!oc) { bad("unknown class '" + o.cls + "'", i); continue; }
    if (!o.contents.empty() && !oc->receptacle) bad(o.cls + " is not a receptacle but has contents", i);
    for (const auto& child : o.contents) {
      auto it = ids.find(child);
      if (it == ids.end()) { bad("contents references unknown id '" + child + "'", i); continue; }
      const auto& co = scene.objects[it->second];
      if (co.inside_of != o.id) bad("'" + child + "' listed in contents but inside_of disagrees", i);
    }
    if (o.inside_of) {
      auto it = ids.find(*o.inside_of);
      if (it == ids.end()) { bad("inside_of references unknown id '" + *o.inside_of + "'", i); continue; }
      const auto& parent = scene.objects[it->second];
      if (std::find(parent.contents.begin(), parent.contents.end(), o.id) == parent.contents.end())
        bad("inside_of '" + parent.id + "' does not list this object", i);
      // containment must terminate at a placed receptacle
      std::set<std::string> seen{o.id};
      const SceneObject* cur = &o;
      while (cur && cur->inside_of) {
        if (!seen.insert(*cur->inside_of).second) { bad("containment cycle", i); break; }
        auto jt = ids.find(*cur->inside_of);
        cur = jt == ids.end() ? nullptr : &scene.objects[jt->second];
      }
      if (oc->large()) bad(o.cls + " is large and cannot be contained", i);
    } else if (!(scene.agent.held && *scene.agent.held == o.id)) {
      if (!scene.in_bounds(o.cell)) bad("object out of bounds", i);
      if (scene.obstacles.count(o.cell)) bad("object placed on an obstacle", i);
      auto [it, fresh] = placed.emplace(o.cell, o.id);
      if (!fresh) bad("cell shared with '" + it->second + "'", i);
    }
  }
  const Cell a = scene.agent.cell;
  if (!scene.in_bounds(a)) bad("agent out of bounds");
  else if (scene.obstacles.count(a)) bad("agent on an obstacle");
  else if (placed.count(a)) bad("agent on an object cell");
  if (scene.agent.held) {
    auto it = ids.find(*scene.agent.held);
    if (it == ids.end()) bad("held object '" + *scene.agent.held + "' does not exist");
    else {
      const auto& h = scene.objects[it->second];
      const ObjectClass* hc = reg.find(h.cls);
      if (h.inside_of) bad("held object is inside a container", it->second);
      if (hc && !hc->pickupable) bad("held object is not pickupable", it->second);
    }
  }
  return out;
}

/// Copies each root's cell onto everything it contains (and the held subtree
/// onto the agent cell).
inline void normalize_cells(Scene& scene) {
  for (auto& o : scene.objects) {
    if (o.inside_of) continue;
    if (scene.agent.held && *scene.agent.held == o.id) o.cell = scene.agent.cell;
    detail::move_subtree(scene, o.id, o.cell);
  }
}

}  // namespace homeworld
