#pragma once

#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "homeworld/instruction.hpp"
#include "homeworld/navigation.hpp"
#include "homeworld/planning.hpp"
#include "homeworld/replan.hpp"
#include "homeworld/semantic_map.hpp"
#include "homeworld/similarity.hpp"
#include "homeworld/validator.hpp"
#include "homeworld/world.hpp"

namespace homeworld {

enum class PlannerKind { Template, External };

/// Returns subgoal phrases for an instruction (the external planner seam).
using PlannerFn = std::function<std::vector<std::string>(const Instruction&)>;

struct EpisodeConfig {
  int max_steps = 1000;
  bool replan_enabled = true;
  bool map_correction_enabled = true;
  NoiseConfig noise;
  PlannerKind planner = PlannerKind::Template;
  int pixel_threshold = kPixelThreshold;
  int explore_budget = kExploreBudget;
  std::uint64_t seed = 0;
  /// Start from a ground-truth map (used for expert runs).
  bool oracle_map = false;
  /// A Re-Plan substitute also replaces its class in the goal. Set when the
  /// goal comes from the instruction rather than from the scene.
  bool goal_follows_substitution = false;
};

enum class SubgoalStatus { Completed, Failed, NotReached };

inline std::string_view to_string(SubgoalStatus s) {
  switch (s) {
    case SubgoalStatus::Completed: return "Completed";
    case SubgoalStatus::Failed: return "Failed";
    case SubgoalStatus::NotReached: return "NotReached";
  }
  return "?";
}

enum class FailureReason { None, InvalidPlan, ExploreExhausted, StepBudget, InteractionFailed, GoalUnmet };

inline std::string_view to_string(FailureReason r) {
  switch (r) {
    case FailureReason::None: return "None";
    case FailureReason::InvalidPlan: return "InvalidPlan";
    case FailureReason::ExploreExhausted: return "ExploreExhausted";
    case FailureReason::StepBudget: return "StepBudget";
    case FailureReason::InteractionFailed: return "InteractionFailed";
    case FailureReason::GoalUnmet: return "GoalUnmet";
  }
  return "?";
}

struct SubgoalOutcome {
  SubgoalBinary binary;
  SubgoalStatus status = SubgoalStatus::NotReached;
  int steps = 0;
  std::optional<ReplanDecision> replan;
  std::string detail;
};

struct StepRecord {
  int t = 0;
  int subgoal = 0;
  Action action;
  StepError error = StepError::None;
  Cell cell;
  Heading heading = Heading::N;
};

struct EpisodeTrace {
  std::string episode_id;
  std::vector<SubgoalBinary> plan;
  std::vector<Action> actions;
  std::vector<StepRecord> steps;
  std::vector<SubgoalOutcome> subgoal_outcomes;
  bool success = false;
  FailureReason reason = FailureReason::None;
  int path_length = 0;
  int conditions_met = 0;
  int conditions_total = 0;
  std::vector<Finding> plan_findings;

  /// The plan as executed, with Re-Plan substitutions applied.
  std::vector<SubgoalBinary> executed_plan() const {
    std::vector<SubgoalBinary> out;
    for (const auto& o : subgoal_outcomes) out.push_back(o.binary);
    return out;
  }
};

// ----------------------------------------------------------------------------
// Perception state
// ----------------------------------------------------------------------------

struct AgentState {
  SemanticMap map;
  std::map<std::string, int> pixel_history;
  InventoryVector inventory;
  AgentPose pose;
  std::optional<std::string> target;
  Observation last;
  bool correction = true;
  int pixel_threshold = kPixelThreshold;
};

/// One perception update: project, merge, refresh inventory.
inline AgentState tick(AgentState s, const Observation& obs) {
  const LocalMapFrame f = project(obs, s.pose, s.map.tracked, s.map.width, s.map.height);
  s.map = update(s.map, f, s.target, s.correction);
  merge_pixels(s.pixel_history, f.frame_pixels);
  s.inventory = inventory(s.map, s.pixel_history, s.pixel_threshold);
  s.last = obs;
  return s;
}

/// Map built from ground truth: every object on its cell, everything explored.
inline SemanticMap ground_truth_map(const Scene& scene, const std::vector<std::string>& tracked) {
  SemanticMap m(scene.grid_w, scene.grid_h, tracked);
  for (const Cell& c : blocking_cells(scene)) m.obstacles().set(c);
  for (int y = 0; y < scene.grid_h; ++y)
    for (int x = 0; x < scene.grid_w; ++x) m.explored().set({x, y});
  for (const auto& o : scene.objects)
    if (auto ch = m.channel_of(o.cls); ch && !is_carried(scene, o)) m.planes[*ch].set(o.cell);
  return m;
}

// ----------------------------------------------------------------------------
// Executive
// ----------------------------------------------------------------------------

namespace detail {

class Executive {
 public:
  Executive(Scene scene, std::vector<SubgoalBinary> plan, GoalSpec goal, const EpisodeConfig& cfg,
            const ClassRegistry& reg, const SimilarityProvider& sim)
      : scene_(std::move(scene)), plan_(std::move(plan)), goal_(std::move(goal)), cfg_(cfg), reg_(reg), sim_(sim) {
    scene_.rng_seed = mix_seed(scene_.rng_seed, cfg.seed);
    std::set<std::string> wanted;
    for (const auto& b : plan_) wanted.insert(b.arg);
    for (const auto& a : goal_.conditions) {
      wanted.insert(a.object);
      if (!a.receptacle.empty()) wanted.insert(a.receptacle);
    }
    std::set<std::string> known;
    for (const auto& w : wanted)
      if (reg_.contains(w)) known.insert(w);
    const auto tracked = select_channels(known, reg_, sim_);
    st_.map = cfg.oracle_map ? ground_truth_map(scene_, tracked) : SemanticMap(scene_.grid_w, scene_.grid_h, tracked);
    st_.correction = cfg.map_correction_enabled;
    st_.pixel_threshold = cfg.pixel_threshold;
    st_.pose = scene_.agent;
    perceive();
  }

  EpisodeTrace run() {
    trace_.plan = plan_;
    for (const auto& b : plan_) trace_.subgoal_outcomes.push_back({b, SubgoalStatus::NotReached, 0, std::nullopt, {}});
    for (std::size_t i = 0; i < plan_.size(); ++i) {
      current_ = static_cast<int>(i);
      const int before = trace_.path_length;
      const bool ok = plan_[i].verb == SubgoalVerb::Find ? find(i) : interact(i);
      auto& out = trace_.subgoal_outcomes[i];
      out.binary = plan_[i];
      out.steps = trace_.path_length - before;
      if (!ok) {
        out.status = SubgoalStatus::Failed;
        out.detail = detail_;
        trace_.reason = reason_;
        break;
      }
      out.status = SubgoalStatus::Completed;
    }
    // Later subgoals carry any substitution too.
    for (std::size_t i = 0; i < plan_.size(); ++i) trace_.subgoal_outcomes[i].binary = plan_[i];
    trace_.conditions_total = static_cast<int>(goal_.conditions.size());
    trace_.conditions_met = conditions_met(scene_, goal_);
    const bool all_done = std::all_of(trace_.subgoal_outcomes.begin(), trace_.subgoal_outcomes.end(),
                                      [](const auto& o) { return o.status == SubgoalStatus::Completed; });
    trace_.success = goal_.conditions.empty() ? all_done : trace_.conditions_met == trace_.conditions_total;
    if (trace_.success) trace_.reason = FailureReason::None;
    else if (trace_.reason == FailureReason::None) trace_.reason = FailureReason::GoalUnmet;
    return std::move(trace_);
  }

  const Scene& scene() const { return scene_; }

 private:
  // -- perception and acting ------------------------------------------------

  void perceive() {
    st_.pose = scene_.agent;
    st_.target = target_;
    st_ = tick(std::move(st_), observe(scene_, cfg_.noise, reg_));
    for (const auto& d : st_.last.detections)
      if (!d.cells.empty()) {
        auto& seen = last_seen_[d.object_id];
        seen.first = d.cells.front();
        seen.second.insert(d.class_name);
      }
  }

  /// Applies one action; false once the step budget is spent.
  bool act(const Action& a, StepError* err = nullptr) {
    if (trace_.path_length >= cfg_.max_steps) return fail(FailureReason::StepBudget, "step budget exhausted");
    const Outcome o = apply(scene_, a, reg_);
    trace_.actions.push_back(a);
    trace_.steps.push_back({trace_.path_length, current_, a, o.error, scene_.agent.cell, scene_.agent.heading});
    ++trace_.path_length;
    if (err) *err = o.error;
    perceive();
    return true;
  }

  bool fail(FailureReason r, std::string d) {
    reason_ = r;
    detail_ = std::move(d);
    return false;
  }

  bool out_of_steps() const { return trace_.path_length >= cfg_.max_steps; }

  // -- target selection -----------------------------------------------------

  const Detection* visible(const std::string& id) const {
    for (const auto& d : st_.last.detections)
      if (d.object_id == id) return &d;
    return nullptr;
  }

  bool in_reach(const Detection& d) const {
    return !d.cells.empty() && chebyshev(scene_.agent.cell, d.cells.front()) <= kInteractionRange;
  }

  /// Best in-reach detection of `cls` for `verb`, honouring exclusions.
  std::optional<std::string> choose(const std::string& cls, SubgoalVerb verb, const std::set<std::string>& excluded) const {
    std::vector<const Detection*> cands;
    for (const auto& d : st_.last.detections)
      if (d.class_name == cls && in_reach(d) && !excluded.count(d.object_id)) cands.push_back(&d);
    if (cands.empty()) return std::nullopt;
    auto rank = [&](const Detection* d) {
      int r = 2;
      if (auto it = found_.find(cls); it != found_.end() && it->second == d->object_id) r = 0;
      else if (verb == SubgoalVerb::Pickup && used_.count(d->object_id) && last_receptacle_ &&
               placed_in_.count(d->object_id) && placed_in_.at(d->object_id) == *last_receptacle_)
        r = 1;
      return std::make_tuple(r, chebyshev(scene_.agent.cell, d->cells.front()), d->object_id);
    };
    std::sort(cands.begin(), cands.end(), [&](auto* a, auto* b) { return rank(a) < rank(b); });
    return cands.front()->object_id;
  }

  std::set<std::string> exclusions(const SubgoalBinary& b) const {
    std::set<std::string> ex;
    if (scene_.agent.held) ex.insert(*scene_.agent.held);
    if (b.verb == SubgoalVerb::Find && b.another)
      for (const auto& id : used_) ex.insert(id);
    if (b.verb == SubgoalVerb::Pickup) {
      // Objects already delivered somewhere other than the receptacle at hand stay put.
      for (const auto& [id, rec] : placed_in_)
        if (!last_receptacle_ || rec != *last_receptacle_) ex.insert(id);
    }
    return ex;
  }

  // -- movement ---------------------------------------------------------------

  /// One step toward seeing `cls` within reach. Sets `exhausted` when there
  /// is nothing left to explore.
  bool approach_step(const std::string& cls, const std::set<std::string>& excluded, bool& exhausted) {
    for (const auto& d : st_.last.detections)
      if (d.class_name == cls)
        for (const Cell& c : d.cells) stale_.erase(c);
    std::set<Cell> skip;
    for (const auto& id : excluded)
      if (auto it = last_seen_.find(id); it != last_seen_.end() && it->second.second.count(cls)) skip.insert(it->second.first);
    auto usable = [&](const Cell& c) { return !skip.count(c) && !stale_.count(c); };

    std::vector<Cell> goals;
    if (const BinaryPlane* p = st_.map.plane_of(cls))
      for (const Cell& c : p->cells())
        if (usable(c)) goals.push_back(c);
    if (auto r = head_for(goals)) return *r;
    if (auto a = explore_step(st_.map, st_.pose)) {
      scan_ = 0;
      return act(*a);
    }
    // Nothing mapped and nothing left to explore: revisit where the class was
    // last detected, in case the map dropped it.
    std::vector<Cell> remembered;
    for (const auto& [id, seen] : last_seen_)
      if (seen.second.count(cls) && !excluded.count(id) && usable(seen.first)) remembered.push_back(seen.first);
    if (auto r = head_for(remembered)) return *r;
    if (scan_ < 4) {
      ++scan_;
      return act(Action::right());
    }
    stale_.clear();
    misses_.clear();
    exhausted = true;
    return true;
  }

  /// One step toward an interaction pose for any of `goals`; nullopt when
  /// there is no usable goal.
  std::optional<bool> head_for(const std::vector<Cell>& goals) {
    if (goals.empty()) return std::nullopt;
    NavResult r = goto_cells(st_.map, st_.pose, goals);
    if (!r.ok()) return std::nullopt;
    if (!r.actions.empty()) {
      scan_ = 0;
      return act(r.actions.front());
    }
    // In position but the target is not in view. One miss may be sensor
    // noise; the second marks the cell stale.
    for (const Cell& c : goals)
      if (can_reach(st_.map, st_.pose.cell, st_.pose.heading, c) && ++misses_[c] >= 2) stale_.insert(c);
    return act(Action::right());
  }

  // -- subgoals ---------------------------------------------------------------

  bool find(std::size_t i) {
    int steps = 0;
    bool replanned = false;
    scan_ = 0;
    stale_.clear();
    misses_.clear();
    target_ = plan_[i].arg;
    while (true) {
      const SubgoalBinary& b = plan_[i];
      const auto ex = exclusions(b);
      if (auto id = choose(b.arg, SubgoalVerb::Find, ex)) {
        found_[b.arg] = *id;
        if (reg_.at(b.arg).receptacle) last_receptacle_ = *id;
        target_.reset();
        return true;
      }
      if (out_of_steps()) return fail(FailureReason::StepBudget, "step budget exhausted");
      bool exhausted = false;
      if (should_trigger({steps, false}, cfg_.explore_budget)) exhausted = true;
      else if (!approach_step(b.arg, ex, exhausted)) return false;
      else if (!exhausted) ++steps;
      if (!exhausted) continue;

      if (!cfg_.replan_enabled || replanned)
        return fail(FailureReason::ExploreExhausted, b.arg + " not found");
      replanned = true;
      const std::string original = b.arg;
      if (st_.inventory.confirmed.empty()) return fail(FailureReason::ExploreExhausted, original + " not found");
      std::vector<SubgoalBinary> rest(plan_.begin() + static_cast<long>(i), plan_.end());
      ReplanDecision d = replan(rest, original, st_.inventory.confirmed, sim_, bound_classes(plan_, original));
      trace_.subgoal_outcomes[i].replan = d;
      if (!d.chosen) return fail(FailureReason::ExploreExhausted, original + " not found; no substitute above threshold");
      std::copy(d.rewritten.begin(), d.rewritten.end(), plan_.begin() + static_cast<long>(i));
      if (cfg_.goal_follows_substitution)
        for (auto& a : goal_.conditions) {
          if (a.object == original) a.object = *d.chosen;
          if (a.receptacle == original) a.receptacle = *d.chosen;
        }
      target_ = plan_[i].arg;
      steps = 0;
      scan_ = 0;
      stale_.clear();
      misses_.clear();
    }
  }

  static ActionVerb action_verb(SubgoalVerb v) {
    switch (v) {
      case SubgoalVerb::Pickup: return ActionVerb::Pickup;
      case SubgoalVerb::Put: return ActionVerb::Put;
      case SubgoalVerb::Open: return ActionVerb::Open;
      case SubgoalVerb::Close: return ActionVerb::Close;
      case SubgoalVerb::ToggleOn: return ActionVerb::ToggleOn;
      case SubgoalVerb::ToggleOff: return ActionVerb::ToggleOff;
      case SubgoalVerb::Slice: return ActionVerb::Slice;
      case SubgoalVerb::Find: break;
    }
    throw Error(ErrorCode::InvalidArgument, "Find has no action");
  }

  /// Moves until an acceptable `cls` instance is in reach; nullopt on failure.
  std::optional<std::string> acquire_target(const SubgoalBinary& b) {
    int steps = 0;
    scan_ = 0;
    stale_.clear();
    misses_.clear();
    while (true) {
      const auto ex = exclusions(b);
      if (auto id = choose(b.arg, b.verb, ex)) return id;
      if (out_of_steps()) {
        fail(FailureReason::StepBudget, "step budget exhausted");
        return std::nullopt;
      }
      bool exhausted = false;
      if (steps >= cfg_.explore_budget || !approach_step(b.arg, ex, exhausted) || exhausted) {
        if (reason_ == FailureReason::None)
          fail(FailureReason::InteractionFailed, "no reachable " + b.arg + " for " + std::string(to_string(b.verb)));
        return std::nullopt;
      }
      ++steps;
    }
  }

  bool interact(std::size_t i) {
    const SubgoalBinary& b = plan_[i];
    for (int attempt = 0; attempt < 2; ++attempt) {
      auto id = acquire_target(b);
      if (!id) return false;
      const std::optional<std::string> held = scene_.agent.held;
      StepError err = StepError::None;
      if (!act(Action::on(action_verb(b.verb), *id), &err)) return false;
      if (err == StepError::None) {
        if (b.verb == SubgoalVerb::Pickup) {
          used_.insert(*id);
          found_[b.arg] = *id;
          placed_in_.erase(*id);
        } else if (b.verb == SubgoalVerb::Put && held) {
          used_.insert(*held);
          placed_in_[*held] = *id;
          last_receptacle_ = *id;
        }
        if (b.verb != SubgoalVerb::Pickup && b.verb != SubgoalVerb::Slice) found_[b.arg] = *id;
        return true;
      }
      detail_ = std::string(to_string(err)) + " on " + *id;
      if (err == StepError::HandOccupied || err == StepError::HandEmpty || err == StepError::AffordanceViolation ||
          err == StepError::ReceptacleClosed)
        break;  // re-approaching cannot fix these
    }
    reason_ = FailureReason::InteractionFailed;
    return false;
  }

  Scene scene_;
  std::vector<SubgoalBinary> plan_;
  GoalSpec goal_;
  EpisodeConfig cfg_;
  const ClassRegistry& reg_;
  const SimilarityProvider& sim_;
  AgentState st_;
  EpisodeTrace trace_;
  int current_ = 0;
  FailureReason reason_ = FailureReason::None;
  std::string detail_;
  std::optional<std::string> target_;
  std::map<std::string, std::string> found_;
  std::set<std::string> used_;
  std::map<std::string, std::string> placed_in_;
  std::optional<std::string> last_receptacle_;
  // Last cell of each object id and every class it has been detected as.
  std::map<std::string, std::pair<Cell, std::set<std::string>>> last_seen_;
  std::set<Cell> stale_;
  std::map<Cell, int> misses_;
  int scan_ = 0;
};

}  // namespace detail

/// Runs a binary plan against `goal`. The plan is validated first; a plan
/// with step-level findings aborts with InvalidPlan when `screen` is set.
inline EpisodeTrace run_plan(const Scene& scene, const std::vector<SubgoalBinary>& plan, const GoalSpec& goal,
                             const EpisodeConfig& cfg, bool screen = false,
                             const std::map<std::string, std::string>& hints = {},
                             const ClassRegistry& reg = default_registry(),
                             const SimilarityProvider& sim = builtin_similarity()) {
  if (cfg.max_steps <= 0) throw Error(ErrorCode::InvalidArgument, "max_steps must be positive");
  if (screen) {
    auto findings = validate(plan, goal, reg, hints);
    if (!findings.empty()) {
      EpisodeTrace t;
      t.plan = plan;
      for (const auto& b : plan) t.subgoal_outcomes.push_back({b, SubgoalStatus::NotReached, 0, std::nullopt, {}});
      t.reason = FailureReason::InvalidPlan;
      t.plan_findings = std::move(findings);
      t.conditions_total = static_cast<int>(goal.conditions.size());
      t.conditions_met = conditions_met(scene, goal);
      return t;
    }
  }
  detail::Executive ex(scene, plan, goal, cfg, reg, sim);
  return ex.run();
}

inline EpisodeTrace run_episode(const Scene& scene, const TaskSpec& spec, const EpisodeConfig& cfg,
                                const ClassRegistry& reg = default_registry(),
                                const SimilarityProvider& sim = builtin_similarity()) {
  return run_plan(scene, plan_binaries(spec, reg), derive_goal(spec, reg), cfg, false, container_hints(spec), reg, sim);
}

/// Plans `inst` (built-in parser, or `external` when the parser cannot and
/// one is given) and runs it. External plans are screened by the validator.
inline EpisodeTrace run_episode(const Scene& scene, const Instruction& inst, const EpisodeConfig& base_cfg,
                                const PlannerFn& external = {}, const ClassRegistry& reg = default_registry(),
                                const SimilarityProvider& sim = builtin_similarity()) {
  const EpisodeConfig cfg = [&] {
    EpisodeConfig c = base_cfg;
    c.goal_follows_substitution = true;
    return c;
  }();
  std::string text = inst.prefix ? *inst.prefix + ". " + inst.text : inst.text;
  std::optional<ParsedInstruction> parsed;
  try {
    parsed = parse_instruction(text, reg);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::UnplannableInstruction || !external) throw;
  }
  if (parsed && (cfg.planner == PlannerKind::Template || !external)) {
    const TaskSpec spec = adapt_spec(parsed->spec, parsed->prefix, reg);
    return run_episode(scene, spec, cfg, reg, sim);
  }
  const auto phrases = external(inst);
  std::vector<SubgoalBinary> plan;
  for (std::size_t i = 0; i < phrases.size(); ++i) {
    try {
      plan.push_back(match(phrases[i], reg));
    } catch (const Error& e) {
      EpisodeTrace t;
      t.reason = FailureReason::InvalidPlan;
      t.plan_findings.push_back({static_cast<int>(i), FindingCode::UnknownSymbol, e.what()});
      return t;
    }
  }
  GoalSpec goal;
  std::map<std::string, std::string> hints;
  if (parsed) {
    const TaskSpec spec = adapt_spec(parsed->spec, parsed->prefix, reg);
    goal = derive_goal(spec, reg);
    hints = container_hints(spec);
  }
  return run_plan(scene, plan, goal, cfg, true, hints, reg, sim);
}

// ----------------------------------------------------------------------------
// Trace export
// ----------------------------------------------------------------------------

inline nlohmann::ordered_json replan_to_json(const ReplanDecision& d) {
  nlohmann::ordered_json j;
  j["original"] = d.original;
  nlohmann::ordered_json scores = nlohmann::ordered_json::object();
  for (const auto& [c, s] : d.scores) scores[c] = s;
  j["scores"] = std::move(scores);
  j["chosen"] = d.chosen ? nlohmann::ordered_json(*d.chosen) : nlohmann::ordered_json(nullptr);
  j["threshold"] = d.threshold;
  return j;
}

/// One JSON record per action, then one per subgoal, then an episode line.
inline void write_trace_jsonl(std::ostream& out, const EpisodeTrace& t, const std::string& episode_id = {}) {
  for (const auto& s : t.steps) {
    nlohmann::ordered_json j;
    j["type"] = "step";
    if (!episode_id.empty()) j["episode"] = episode_id;
    j["t"] = s.t;
    j["subgoal"] = s.subgoal;
    j["action"] = std::string(to_string(s.action.verb));
    if (s.action.target) j["target"] = *s.action.target;
    j["ok"] = s.error == StepError::None;
    if (s.error != StepError::None) j["error"] = std::string(to_string(s.error));
    j["cell"] = {s.cell.x, s.cell.y};
    j["heading"] = std::string(to_string(s.heading));
    out << j.dump() << "\n";
  }
  for (std::size_t i = 0; i < t.subgoal_outcomes.size(); ++i) {
    const auto& o = t.subgoal_outcomes[i];
    nlohmann::ordered_json j;
    j["type"] = "subgoal";
    if (!episode_id.empty()) j["episode"] = episode_id;
    j["index"] = i;
    j["verb"] = std::string(to_string(o.binary.verb));
    j["arg"] = o.binary.arg;
    j["status"] = std::string(to_string(o.status));
    j["steps"] = o.steps;
    if (o.replan) j["replan"] = replan_to_json(*o.replan);
    if (!o.detail.empty()) j["detail"] = o.detail;
    out << j.dump() << "\n";
  }
  nlohmann::ordered_json j;
  j["type"] = "episode";
  if (!episode_id.empty()) j["episode"] = episode_id;
  j["success"] = t.success;
  j["reason"] = std::string(to_string(t.reason));
  j["path_length"] = t.path_length;
  j["conditions_met"] = t.conditions_met;
  j["conditions_total"] = t.conditions_total;
  out << j.dump() << "\n";
}

}  // namespace homeworld
