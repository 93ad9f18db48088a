#pragma once

#include <algorithm>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "homeworld/homeworld.hpp"

namespace hwtest {

using namespace homeworld;

inline std::string source_path(const std::string& rel) { return std::string(HOMEWORLD_SOURCE_DIR) + "/" + rel; }
inline std::string fixture(const std::string& name) { return source_path("tests/fixtures/" + name); }

// ----------------------------------------------------------------------------
// Map update oracle, written cell by cell with no shared helpers.
// ----------------------------------------------------------------------------

inline SemanticMap brute_update(const SemanticMap& prev, const LocalMapFrame& f, const std::optional<std::string>& target,
                                bool correction, int r = kNeighborhoodRadius) {
  const int w = prev.width, h = prev.height;
  int tch = -1;
  for (std::size_t i = 0; target && i < prev.tracked.size(); ++i)
    if (prev.tracked[i] == *target) tch = static_cast<int>(i) + 2;

  auto near_prev_target = [&](int x, int y) {
    for (int dy = -r; dy <= r; ++dy)
      for (int dx = -r; dx <= r; ++dx) {
        const int px = x + dx, py = y + dy;
        if (px >= 0 && py >= 0 && px < w && py < h && prev.planes[tch].get({px, py})) return true;
      }
    return false;
  };

  bool guard = false;
  if (correction && tch >= 0) {
    bool observed_in = false, detected_in = false;
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        if (near_prev_target(x, y)) {
          observed_in = observed_in || f.observed.get({x, y});
          detected_in = detected_in || f.local[tch].get({x, y});
        }
    guard = observed_in && !detected_in;
  }

  SemanticMap out = prev;
  for (std::size_t k = 0; k < prev.planes.size(); ++k)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const Cell c{x, y};
        const bool p = prev.planes[k].get(c), q = f.local[k].get(c), o = f.observed.get(c);
        bool v = p || q;
        if (k == 0) v = o ? q : p;
        else if (guard && static_cast<int>(k) == tch && near_prev_target(x, y)) v = o ? q : p;
        out.planes[k].set(c, v);
      }
  return out;
}

// ----------------------------------------------------------------------------
// Navigation oracle: Bellman-Ford style relaxation over (cell, heading).
// ----------------------------------------------------------------------------

inline int relax_distance(const SemanticMap& map, const AgentPose& from, Cell to) {
  const int w = map.width, h = map.height;
  constexpr int kInf = std::numeric_limits<int>::max() / 2;
  auto free = [&](int x, int y) { return x >= 0 && y >= 0 && x < w && y < h && !map.obstacles().get({x, y}); };
  if (!free(to.x, to.y)) return -1;
  // dist[y][x][heading]
  std::vector<int> dist(static_cast<std::size_t>(w) * h * 4, kInf);
  auto at = [&](int x, int y, int d) -> int& { return dist[(static_cast<std::size_t>(y) * w + x) * 4 + d]; };
  at(from.cell.x, from.cell.y, static_cast<int>(from.heading)) = 0;
  const int dx[] = {0, 1, 0, -1}, dy[] = {-1, 0, 1, 0};
  for (bool changed = true; changed;) {
    changed = false;
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        for (int d = 0; d < 4; ++d) {
          const int cur = at(x, y, d);
          if (cur == kInf) continue;
          auto relax = [&](int nx, int ny, int nd) {
            if (at(nx, ny, nd) > cur + 1) {
              at(nx, ny, nd) = cur + 1;
              changed = true;
            }
          };
          relax(x, y, (d + 1) % 4);
          relax(x, y, (d + 3) % 4);
          if (free(x + dx[d], y + dy[d])) relax(x + dx[d], y + dy[d], d);
        }
  }
  int best = kInf;
  for (int d = 0; d < 4; ++d) best = std::min(best, at(to.x, to.y, d));
  return best == kInf ? -1 : best;
}

/// Cells 4-connected to `from` through free cells.
inline std::vector<Cell> reachable_free(const Scene& s, Cell from) {
  std::vector<Cell> out{from};
  std::set<Cell> seen{from};
  for (std::size_t i = 0; i < out.size(); ++i)
    for (Heading hd : kHeadings) {
      const Cell n = step_cell(out[i], hd);
      if (!s.in_bounds(n) || s.obstacles.count(n) || seen.count(n)) continue;
      seen.insert(n);
      out.push_back(n);
    }
  return out;
}

/// Random walled grid with scattered obstacles and the agent on a free cell.
inline Scene random_grid(Rng& rng, int min_side = 6, int max_side = 16, double density = 0.22) {
  Scene s;
  s.grid_w = uniform_int(rng, min_side, max_side);
  s.grid_h = uniform_int(rng, min_side, max_side);
  s.rng_seed = rng();
  std::vector<Cell> free;
  for (int y = 0; y < s.grid_h; ++y)
    for (int x = 0; x < s.grid_w; ++x) {
      const bool border = x == 0 || y == 0 || x == s.grid_w - 1 || y == s.grid_h - 1;
      if (border || uniform01(rng) < density) s.obstacles.insert({x, y});
      else free.push_back({x, y});
    }
  if (free.empty()) {
    s.obstacles.erase({1, 1});
    free.push_back({1, 1});
  }
  s.agent.cell = free[uniform_index(rng, free.size())];
  s.agent.heading = kHeadings[uniform_index(rng, 4)];
  return s;
}

// ----------------------------------------------------------------------------
// Plan mutation operators. Each edits the first site it applies to and
// returns nullopt when the plan has no such site.
// ----------------------------------------------------------------------------

enum class Mutation { DeleteFind, SwapPickupPut, DropOpen, DropKnife, DuplicatePickup, DropToggleOff, SwapToggles, WrongReceptacle };

inline constexpr Mutation kMutations[] = {Mutation::DeleteFind,      Mutation::SwapPickupPut, Mutation::DropOpen,
                                          Mutation::DropKnife,       Mutation::DuplicatePickup, Mutation::DropToggleOff,
                                          Mutation::SwapToggles,     Mutation::WrongReceptacle};

inline std::string to_string(Mutation m) {
  static const char* names[] = {"DeleteFind",      "SwapPickupPut", "DropOpen",    "DropKnife",
                                "DuplicatePickup", "DropToggleOff", "SwapToggles", "WrongReceptacle"};
  return names[static_cast<int>(m)];
}

inline std::optional<std::size_t> first_of(const std::vector<SubgoalBinary>& p, SubgoalVerb v, std::size_t from = 0) {
  for (std::size_t i = from; i < p.size(); ++i)
    if (p[i].verb == v) return i;
  return std::nullopt;
}

inline std::optional<std::vector<SubgoalBinary>> mutate(std::vector<SubgoalBinary> p, Mutation m) {
  using V = SubgoalVerb;
  switch (m) {
    case Mutation::DeleteFind: {
      auto i = first_of(p, V::Find);
      if (!i) return std::nullopt;
      p.erase(p.begin() + *i);
      return p;
    }
    case Mutation::SwapPickupPut: {
      auto i = first_of(p, V::Pickup);
      if (!i) return std::nullopt;
      auto j = first_of(p, V::Put, *i + 1);
      if (!j) return std::nullopt;
      std::swap(p[*i], p[*j]);
      return p;
    }
    case Mutation::DropOpen: {
      auto i = first_of(p, V::Open);
      if (!i) return std::nullopt;
      p.erase(p.begin() + *i);
      return p;
    }
    case Mutation::DropKnife: {
      for (std::size_t i = 0; i + 1 < p.size(); ++i)
        if (p[i].verb == V::Find && is_knife(p[i].arg) && p[i + 1].verb == V::Pickup && p[i + 1].arg == p[i].arg) {
          p.erase(p.begin() + i, p.begin() + i + 2);
          return p;
        }
      return std::nullopt;
    }
    case Mutation::DuplicatePickup: {
      auto i = first_of(p, V::Pickup);
      if (!i) return std::nullopt;
      p.insert(p.begin() + *i, p[*i]);
      return p;
    }
    case Mutation::DropToggleOff: {
      auto i = first_of(p, V::ToggleOff);
      if (!i) return std::nullopt;
      p.erase(p.begin() + *i);
      return p;
    }
    case Mutation::SwapToggles: {
      auto i = first_of(p, V::ToggleOn);
      if (!i) return std::nullopt;
      auto j = first_of(p, V::ToggleOff, *i + 1);
      if (!j) return std::nullopt;
      std::swap(p[*i], p[*j]);
      return p;
    }
    case Mutation::WrongReceptacle: {
      for (std::size_t k = p.size(); k-- > 0;)
        if (p[k].verb == V::Put) {
          p[k].arg = p[k].arg == "GarbageCan" ? "Bed" : "GarbageCan";
          return p;
        }
      return std::nullopt;
    }
  }
  return std::nullopt;
}

/// One binding per task type, chosen to give the operators as many sites
/// as the template allows (slicing for the knife, openable receptacles).
inline std::vector<TaskSpec> canonical_specs() {
  auto spec = [](TaskType t, std::vector<std::string> objs, bool slice = false, std::optional<std::string> kd = {}) {
    TaskSpec s;
    s.type = t;
    s.objects = std::move(objs);
    s.slice = slice;
    s.knife_dest = std::move(kd);
    return s;
  };
  return {
      spec(TaskType::PickAndPlace, {"Apple", "Fridge"}, true, "SinkBasin"),
      spec(TaskType::StackAndPlace, {"Apple", "Bowl", "Fridge"}, true),
      spec(TaskType::PickTwoAndPlace, {"Tomato", "Fridge"}, true),
      spec(TaskType::CleanAndPlace, {"Lettuce", "Fridge"}, true),
      spec(TaskType::HeatAndPlace, {"Potato", "Fridge"}, true),
      spec(TaskType::CoolAndPlace, {"Tomato", "CounterTop"}, true),
      spec(TaskType::ExamineInLight, {"Apple", "FloorLamp"}, true, "Fridge"),
      spec(TaskType::PickThreeAndPlace, {"Bread", "Safe"}, true),
      spec(TaskType::PickTwoAndCleanAndPlace, {"Potato", "Drawer"}, true),
      spec(TaskType::StackAndHeatAndPlace, {"Tomato", "Plate", "DiningTable"}),
      spec(TaskType::StackAndCoolAndPlace, {"Apple", "Bowl", "CounterTop"}),
      spec(TaskType::PickTwoAndStackAndPlace, {"Apple", "Bowl", "Safe"}, true),
  };
}

inline std::vector<Finding> validate_spec_plan(const TaskSpec& s, const std::vector<SubgoalBinary>& plan) {
  return validate(plan, derive_goal(s), default_registry(), container_hints(s));
}

// ----------------------------------------------------------------------------
// Seeded QA dataset: `n` records, exactly `corrupt` of them mutated.
// ----------------------------------------------------------------------------

inline Json dataset_record(const TaskSpec& s, const std::vector<SubgoalBinary>& plan) {
  Json j;
  j["instruction"] = render_instruction(s);
  Json subs = Json::array();
  for (const auto& p : render_plan(plan)) subs.push_back(p.text);
  j["subgoals"] = subs;
  j["goal"] = goal_to_json(derive_goal(s));
  const auto hints = container_hints(s);
  if (!hints.empty()) j["container_hints"] = hints;
  return j;
}

inline std::string qa_dataset_jsonl(int n, int corrupt, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<bool> bad(static_cast<std::size_t>(n), false);
  for (int i = 0; i < corrupt; ++i) bad[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = true;

  std::string out;
  for (int i = 0; i < n; ++i) {
    const TaskSpec s = detail::random_spec(kTaskTypes[i % 12], false, rng);
    std::vector<SubgoalBinary> plan = plan_binaries(s);
    if (bad[static_cast<std::size_t>(i)]) {
      std::vector<std::vector<SubgoalBinary>> options;
      for (Mutation m : kMutations)
        if (auto q = mutate(plan, m)) options.push_back(std::move(*q));
      plan = options[uniform_index(rng, options.size())];
    }
    out += dataset_record(s, plan).dump() + "\n";
  }
  return out;
}

// ----------------------------------------------------------------------------
// Metrics fixtures with hand-computed reports.
// ----------------------------------------------------------------------------

struct MetricsFixture {
  std::string name;
  std::vector<BenchmarkEpisode> bench;
  std::vector<EpisodeTrace> traces;
  double SR, GC, GC_mean, PLWSR, PLWGC, PLWGC_mean, HLP_ACC;
};

inline std::vector<SubgoalBinary> two_step(const std::string& r) {
  return {{SubgoalVerb::Find, r, false}, {SubgoalVerb::Put, r, false}};
}

inline BenchmarkEpisode fixture_episode(const std::string& id, int expert, std::vector<SubgoalBinary> golden) {
  BenchmarkEpisode e;
  e.id = id;
  e.expert_length = expert;
  e.golden_plan = std::move(golden);
  return e;
}

inline EpisodeTrace fixture_trace(const std::string& id, bool success, int length, int met, int total,
                                  const std::vector<SubgoalBinary>& executed) {
  EpisodeTrace t;
  t.episode_id = id;
  t.success = success;
  t.reason = success ? FailureReason::None : FailureReason::GoalUnmet;
  t.path_length = length;
  t.conditions_met = met;
  t.conditions_total = total;
  t.plan = executed;
  for (const auto& b : executed) t.subgoal_outcomes.push_back({b, SubgoalStatus::Completed, 1, std::nullopt, {}});
  return t;
}

inline std::vector<MetricsFixture> metrics_fixtures() {
  std::vector<MetricsFixture> out;
  const auto desk = two_step("Desk");

  // Expert-length success: weight 1 everywhere.
  out.push_back({"single_expert_length",
                 {fixture_episode("a", 12, desk)},
                 {fixture_trace("a", true, 12, 2, 2, desk)},
                 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0});

  // One success at twice the expert length, one failure: PLWSR = (0.5 + 0) / 2.
  {
    MetricsFixture f{"two_episode_quarter", {}, {}, 0.5, 0.5, 0.5, 0.25, 0.25, 0.25, 0.5};
    f.bench = {fixture_episode("a", 10, desk), fixture_episode("b", 10, desk)};
    f.traces = {fixture_trace("a", true, 20, 1, 1, desk), fixture_trace("b", false, 30, 0, 1, two_step("Bed"))};
    out.push_back(f);
  }

  // GC aggregate 2/4 against per-episode mean (1 + 1/3) / 2.
  // PLWGC = (1*1 + 1*0.5) / 4; PLWGC_mean = (1*1 + (1/3)*0.5) / 2.
  {
    MetricsFixture f{"gc_aggregate_vs_mean", {}, {}, 0.5, 0.5, 2.0 / 3.0, 0.5, 0.375, 7.0 / 12.0, 1.0};
    f.bench = {fixture_episode("a", 8, desk), fixture_episode("b", 8, desk)};
    f.traces = {fixture_trace("a", true, 8, 1, 1, desk), fixture_trace("b", false, 16, 1, 3, desk)};
    out.push_back(f);
  }

  // Plan accuracy follows the executed plan: "a" was planned for Table and
  // substituted to Desk (matches), "b" substituted to the wrong class.
  {
    MetricsFixture f{"hlp_after_substitution", {}, {}, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.5};
    f.bench = {fixture_episode("a", 6, desk), fixture_episode("b", 6, desk)};
    auto ta = fixture_trace("a", true, 6, 1, 1, desk);
    ta.plan = two_step("Table");
    auto tb = fixture_trace("b", true, 6, 1, 1, two_step("SideTable"));
    tb.plan = two_step("Table");
    f.traces = {ta, tb};
    out.push_back(f);
  }

  // Every episode fails; shorter than expert clamps the weight at 1.
  {
    MetricsFixture f{"all_fail_short", {}, {}, 0.0, 0.5, 0.5, 0.0, 0.5, 0.5, 1.0};
    f.bench = {fixture_episode("a", 10, desk), fixture_episode("b", 10, desk)};
    f.traces = {fixture_trace("a", false, 5, 1, 2, desk), fixture_trace("b", false, 3, 1, 2, desk)};
    out.push_back(f);
  }
  return out;
}

// ----------------------------------------------------------------------------
// End-to-end fixture cases.
// ----------------------------------------------------------------------------

struct EndToEndCase {
  std::string name;
  std::string scene;
  std::string instruction;
};

inline std::vector<EndToEndCase> end_to_end_cases() {
  return {
      {"container_dependency", "towel_cabinet.json", "put a towel from the cabinet on the towel holder"},
      {"quantity", "four_books.json", "put four books on the desk"},
      {"prefix_stove", "stove_kitchen.json", "There is a stove and no microwave. Heat an apple and put it on the dining table"},
  };
}

}  // namespace hwtest
