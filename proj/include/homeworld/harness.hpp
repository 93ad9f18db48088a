#pragma once

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "homeworld/agent.hpp"
#include "homeworld/instruction.hpp"
#include "homeworld/scene_io.hpp"
#include "homeworld/validator.hpp"

namespace homeworld {

struct Substitution {
  std::string instructed;
  std::string placed;

  friend bool operator==(const Substitution&, const Substitution&) = default;
};

struct BenchmarkEpisode {
  std::string id;
  Scene scene;
  /// The task as instructed (may name a class the scene lacks).
  TaskSpec spec;
  std::string instruction;
  /// Judged against the scene's true classes.
  GoalSpec goal;
  std::vector<SubgoalBinary> golden_plan;
  int expert_length = 0;
  bool mismatch_injected = false;
  std::optional<Substitution> substitution;
};

// ----------------------------------------------------------------------------
// Generation
// ----------------------------------------------------------------------------

namespace detail {

inline const std::vector<std::vector<std::string>>& synonym_clusters() {
  static const std::vector<std::vector<std::string>> c{
      {"Table", "Desk", "SideTable", "DiningTable", "CoffeeTable", "Dresser", "TVStand"},
      {"Sofa", "ArmChair", "Ottoman"},
      {"Shelf", "ShelvingUnit"},
      {"Lamp", "FloorLamp", "DeskLamp"},
      {"Bottle", "GlassBottle", "WineBottle", "SoapBottle", "SprayBottle"},
      {"Mug", "Cup"},
      {"Pan", "Pot", "Kettle"},
      {"Knife", "ButterKnife"},
      {"Towel", "HandTowel"},
      {"PepperShaker", "SaltShaker"},
  };
  return c;
}

/// Index of the cluster holding `cls`, or -1.
inline int cluster_of(const std::string& cls) {
  const auto& cs = synonym_clusters();
  for (std::size_t i = 0; i < cs.size(); ++i)
    if (std::find(cs[i].begin(), cs[i].end(), cls) != cs[i].end()) return static_cast<int>(i);
  return -1;
}

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& v) {
  return v[uniform_index(rng, v.size())];
}

// Destination roles where the instruction may name an absent synonym.
inline const std::vector<std::string> kMismatchDest{"Table",  "Desk",     "SideTable", "DiningTable", "CoffeeTable",
                                                     "Dresser", "TVStand", "Sofa",      "ArmChair",    "Ottoman",
                                                     "Shelf",   "ShelvingUnit"};
inline const std::vector<std::string> kPlainDest{"CounterTop", "Cabinet", "Drawer", "GarbageCan", "Bed", "Safe"};
inline const std::vector<std::string> kLamps{"Lamp", "FloorLamp", "DeskLamp"};
inline const std::vector<std::string> kSources{"Cabinet", "Drawer", "Fridge", "Safe"};
inline const std::vector<std::string> kSupports{"CounterTop", "DiningTable", "Shelf", "CoffeeTable", "Dresser", "Desk"};
inline const std::vector<std::string> kPlaceObjects{
    "Apple", "Mug", "Book", "Pencil", "CellPhone", "KeyChain", "RemoteControl", "Watch", "Vase", "Bowl", "Plate",
    "Spoon", "CreditCard", "CD", "Candle", "Statue", "AlarmClock", "Newspaper", "Pillow", "SoapBar", "TissueBox",
    "TeddyBear", "Laptop", "Towel", "Egg", "Potato"};
inline const std::vector<std::string> kCleanObjects{"Mug", "Cup", "Bowl", "Plate", "Spoon", "Fork", "Pan", "Pot",
                                                    "Apple", "Tomato", "Lettuce", "Potato", "Cloth", "Ladle", "Spatula"};
inline const std::vector<std::string> kHeatObjects{"Apple", "Potato", "Egg", "Mug", "Cup", "Bread", "Tomato", "Plate"};
inline const std::vector<std::string> kCoolObjects{"Apple", "Tomato", "Lettuce", "Egg", "Mug", "Cup",
                                                   "Bowl",  "Potato", "Bread",   "WineBottle"};
inline const std::vector<std::string> kExamineObjects{"Book", "Pencil", "CellPhone", "KeyChain", "Watch",
                                                      "CreditCard", "CD", "Statue", "Vase", "AlarmClock",
                                                      "Newspaper", "RemoteControl", "Laptop", "Bowl", "Mug"};
inline const std::vector<std::string> kStackObjects{"Pencil", "Pen", "Spoon", "Fork", "KeyChain", "CellPhone",
                                                    "Watch", "CreditCard", "Apple", "Egg", "Tomato"};
inline const std::vector<std::string> kVessels{"Mug", "Cup", "Bowl", "Plate", "Pan", "Pot", "Box"};
inline const std::vector<std::string> kSliceable{"Apple", "Tomato", "Bread", "Potato", "Lettuce"};
inline const std::vector<std::string> kHeatVessels{"Bowl", "Plate", "Pan", "Pot"};
inline const std::vector<std::string> kDistractorFurniture{"Bed",   "Toilet",     "GarbageCan",   "LaundryHamper",
                                                           "HousePlant", "Television", "CoffeeMachine", "Toaster",
                                                           "Safe",  "BathtubBasin", "TowelHolder"};
inline const std::vector<std::string> kDistractorObjects{"Newspaper", "Candle", "SoapBar", "Sponge", "TissueBox",
                                                         "CD", "Statue", "TeddyBear", "AlarmClock", "Vase",
                                                         "ToiletPaper", "Cloth", "Pen", "Watch", "Ladle"};

/// Random task of type `t`. The destination (or lamp) is drawn from the
/// synonym-cluster roles when `mismatch` is set.
inline TaskSpec random_spec(TaskType t, bool mismatch, Rng& rng) {
  TaskSpec s;
  s.type = t;
  auto dest = [&] {
    if (mismatch) return pick(rng, kMismatchDest);
    return uniform01(rng) < 0.5 ? pick(rng, kMismatchDest) : pick(rng, kPlainDest);
  };
  auto distinct = [&](const std::vector<std::string>& pool, const std::vector<std::string>& taken) {
    std::vector<std::string> ok;
    for (const auto& c : pool) {
      bool clash = false;
      for (const auto& u : taken) clash = clash || u == c || (cluster_of(c) >= 0 && cluster_of(c) == cluster_of(u));
      if (!clash) ok.push_back(c);
    }
    return pick(rng, ok);
  };
  switch (t) {
    case TaskType::PickAndPlace: {
      const bool slice = uniform01(rng) < 0.25;
      if (slice) {
        s.slice = true;
        s.objects = {pick(rng, kSliceable), dest()};
        if (uniform01(rng) < 0.5) s.knife_dest = uniform01(rng) < 0.5 ? "SinkBasin" : "CounterTop";
      } else {
        s.objects = {pick(rng, kPlaceObjects), dest()};
        if (uniform01(rng) < 0.3) s.count = 4;
        else if (uniform01(rng) < 0.3) s.source = pick(rng, kSources);
      }
      break;
    }
    case TaskType::PickTwoAndPlace:
    case TaskType::PickThreeAndPlace:
      s.objects = {pick(rng, kPlaceObjects), dest()};
      break;
    case TaskType::StackAndPlace:
    case TaskType::PickTwoAndStackAndPlace: {
      const std::string vessel = pick(rng, kVessels);
      s.objects = {distinct(kStackObjects, {vessel}), vessel, dest()};
      break;
    }
    case TaskType::CleanAndPlace:
    case TaskType::PickTwoAndCleanAndPlace:
      s.objects = {pick(rng, kCleanObjects), dest()};
      break;
    case TaskType::HeatAndPlace:
      s.objects = {pick(rng, kHeatObjects), dest()};
      if (uniform01(rng) < 0.3) s.heat_appliance = "StoveBurner";
      break;
    case TaskType::CoolAndPlace:
      s.objects = {pick(rng, kCoolObjects), dest()};
      break;
    case TaskType::ExamineInLight:
      s.objects = {pick(rng, kExamineObjects), pick(rng, kLamps)};
      break;
    case TaskType::StackAndHeatAndPlace:
    case TaskType::StackAndCoolAndPlace: {
      s.objects = {pick(rng, kSliceable), pick(rng, kHeatVessels), dest()};
      break;
    }
  }
  // Fridge cannot be both the cooling appliance and the destination.
  if ((t == TaskType::CoolAndPlace || t == TaskType::StackAndCoolAndPlace) && s.objects.back() == "Fridge")
    s.objects.back() = "CounterTop";
  if (s.source && *s.source == s.objects.back()) s.source.reset();
  return s;
}

/// Role whose class an instruction may misname: the destination, or the
/// lamp for examine tasks.
inline std::size_t mismatch_role(const TaskSpec& s) { return s.objects.size() - 1; }

struct SceneBuilder {
  const ClassRegistry& reg;
  Rng& rng;
  Scene scene;
  std::vector<Cell> ring;
  std::map<std::string, std::string> by_class;  // class -> id of the single furniture instance
  std::map<std::string, int> counter;

  std::string next_id(const std::string& cls) { return cls + "_" + std::to_string(++counter[cls]); }

  void room(int w, int h) {
    scene.grid_w = w;
    scene.grid_h = h;
    for (int x = 0; x < w; ++x) {
      scene.obstacles.insert({x, 0});
      scene.obstacles.insert({x, h - 1});
    }
    for (int y = 0; y < h; ++y) {
      scene.obstacles.insert({0, y});
      scene.obstacles.insert({w - 1, y});
    }
    // Cells next to the walls, corners excluded.
    for (int x = 2; x <= w - 3; ++x) {
      ring.push_back({x, 1});
      ring.push_back({x, h - 2});
    }
    for (int y = 2; y <= h - 3; ++y) {
      ring.push_back({1, y});
      ring.push_back({w - 2, y});
    }
    std::shuffle(ring.begin(), ring.end(), rng);
  }

  bool ring_free(Cell c) const {
    for (const auto& o : scene.objects)
      if (!o.inside_of && o.cell == c) return false;
    return std::find(ring.begin(), ring.end(), c) != ring.end();
  }

  std::optional<Cell> take_cell() {
    for (const Cell& c : ring)
      if (ring_free(c)) return c;
    return std::nullopt;
  }

  const std::string& furniture(const std::string& cls, std::optional<Cell> at = std::nullopt) {
    if (auto it = by_class.find(cls); it != by_class.end()) return it->second;
    if (!at) at = take_cell();
    if (!at) throw Error(ErrorCode::GenerationFailure, "room too small for " + cls);
    SceneObject o;
    o.id = next_id(cls);
    o.cls = cls;
    o.cell = *at;
    scene.objects.push_back(o);
    return by_class[cls] = o.id;
  }

  /// Sink with a faucet on a neighbouring wall cell.
  void sink() {
    if (by_class.count("SinkBasin")) return;
    for (const Cell& c : ring) {
      if (!ring_free(c)) continue;
      for (Heading hd : kHeadings) {
        const Cell n = step_cell(c, hd);
        if (n != c && ring_free(n)) {
          furniture("SinkBasin", c);
          furniture("Faucet", n);
          return;
        }
      }
    }
    throw Error(ErrorCode::GenerationFailure, "no room for a sink and faucet");
  }

  std::string small(const std::string& cls, const std::string& container_cls) {
    SceneObject* parent = scene.find(by_class.at(container_cls));
    SceneObject o;
    o.id = next_id(cls);
    o.cls = cls;
    o.cell = parent->cell;
    o.inside_of = parent->id;
    parent->contents.push_back(o.id);
    scene.objects.push_back(o);
    return o.id;
  }

  void place_agent() {
    std::vector<Cell> core;
    for (int y = 2; y <= scene.grid_h - 3; ++y)
      for (int x = 2; x <= scene.grid_w - 3; ++x) core.push_back({x, y});
    scene.agent.cell = pick(rng, core);
    scene.agent.heading = kHeadings[uniform_index(rng, 4)];
  }
};

/// Builds a scene that satisfies `truth`. `forbidden` classes must not
/// appear (the instructed class of a mismatch, plus its cluster mates).
inline Scene build_scene(const TaskSpec& truth, const std::vector<SubgoalBinary>& golden,
                         const std::set<std::string>& forbidden, Rng& rng, const ClassRegistry& reg) {
  SceneBuilder b{reg, rng, {}, {}, {}, {}};
  b.room(uniform_int(rng, 10, 13), uniform_int(rng, 10, 13));

  std::set<std::string> used;  // every class the scene will hold
  auto clashes = [&](const std::string& c) {
    if (forbidden.count(c)) return true;
    const int k = cluster_of(c);
    for (const auto& u : used)
      if (u != c && k >= 0 && cluster_of(u) == k) return true;
    return false;
  };

  // Furniture the plan names.
  std::vector<std::string> furniture;
  for (const auto& s : golden) {
    const ObjectClass& oc = reg.at(s.arg);
    if (!oc.pickupable && std::find(furniture.begin(), furniture.end(), s.arg) == furniture.end())
      furniture.push_back(s.arg);
  }
  for (const auto& f : furniture) used.insert(f);
  const std::string carried = carried_class(truth);
  const std::string raw = truth.objects[0];
  used.insert(raw);
  if (slices(truth)) used.insert("Knife");
  for (std::size_t i = 1; i < truth.objects.size(); ++i) used.insert(truth.objects[i]);
  for (const auto& u : used)
    if (forbidden.count(u)) throw Error(ErrorCode::GenerationFailure, "task needs forbidden class " + u);

  for (const auto& f : furniture) {
    if (f == "SinkBasin" || f == "Faucet") b.sink();
    else b.furniture(f);
  }

  // One or two surfaces hold the loose objects.
  std::vector<std::string> supports;
  for (const auto& s : kSupports)
    if (!clashes(s) && s != truth.objects.back()) supports.push_back(s);
  std::shuffle(supports.begin(), supports.end(), rng);
  supports.resize(std::min<std::size_t>(supports.size(), 1 + uniform_index(rng, 2)));
  if (supports.empty()) throw Error(ErrorCode::GenerationFailure, "no support surface");
  for (const auto& s : supports) {
    used.insert(s);
    b.furniture(s);
  }

  const int n = multiplicity(truth);
  for (int i = 0; i < n; ++i) b.small(raw, truth.source ? *truth.source : pick(rng, supports));
  if (slices(truth)) b.small("Knife", pick(rng, supports));
  const bool vessel_task = truth.type == TaskType::StackAndPlace || truth.type == TaskType::PickTwoAndStackAndPlace ||
                           truth.type == TaskType::StackAndHeatAndPlace || truth.type == TaskType::StackAndCoolAndPlace;
  if (vessel_task) b.small(truth.objects[1], pick(rng, supports));

  // Distractors that cannot be confused with anything the task names.
  const int extra_f = static_cast<int>(uniform_index(rng, 3));
  for (int i = 0, tries = 0; i < extra_f && tries < 20; ++tries) {
    const std::string& c = pick(rng, kDistractorFurniture);
    if (used.count(c) || clashes(c)) continue;
    used.insert(c);
    b.furniture(c);
    ++i;
  }
  std::vector<std::string> holders;
  for (const auto& [cls, id] : b.by_class)
    if (reg.at(cls).receptacle && !reg.at(cls).openable && cls != "SinkBasin") holders.push_back(cls);
  const int extra_o = static_cast<int>(uniform_index(rng, 4));
  for (int i = 0, tries = 0; i < extra_o && tries < 20 && !holders.empty(); ++tries) {
    const std::string& c = pick(rng, kDistractorObjects);
    if (used.count(c) || clashes(c) || c == carried) continue;
    used.insert(c);
    b.small(c, pick(rng, holders));
    ++i;
  }
  b.place_agent();
  b.scene.rng_seed = rng();
  return std::move(b.scene);
}

}  // namespace detail

/// Oracle run: ground-truth map, golden plan, noise off, no Re-Plan.
inline EpisodeTrace run_oracle(const BenchmarkEpisode& ep, const ClassRegistry& reg = default_registry(),
                               const SimilarityProvider& sim = builtin_similarity()) {
  EpisodeConfig cfg;
  cfg.oracle_map = true;
  cfg.replan_enabled = false;
  cfg.noise = NoiseConfig{};
  EpisodeTrace t = run_plan(ep.scene, ep.golden_plan, ep.goal, cfg, false, container_hints(ep.spec), reg, sim);
  t.episode_id = ep.id;
  return t;
}

inline std::string episode_id(std::size_t i) {
  std::ostringstream s;
  s << "ep" << std::setw(4) << std::setfill('0') << i;
  return s.str();
}

/// Seeded benchmark. Task types cycle through `task_mix` (all twelve when
/// empty). With probability `mismatch_rate` the destination or lamp is
/// instructed under a cluster synonym the scene lacks.
inline std::vector<BenchmarkEpisode> generate_benchmark(int count, std::vector<TaskType> task_mix, double mismatch_rate,
                                                        std::uint64_t seed,
                                                        const ClassRegistry& reg = default_registry(),
                                                        const SimilarityProvider& sim = builtin_similarity()) {
  if (count <= 0) throw Error(ErrorCode::InvalidArgument, "count must be positive");
  if (mismatch_rate < 0 || mismatch_rate > 1) throw Error(ErrorCode::InvalidArgument, "mismatch_rate must be in [0,1]");
  if (task_mix.empty()) task_mix.assign(std::begin(kTaskTypes), std::end(kTaskTypes));
  std::vector<BenchmarkEpisode> out;
  for (int i = 0; i < count; ++i) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(i)));
    const TaskType type = task_mix[static_cast<std::size_t>(i) % task_mix.size()];
    const bool mismatch = uniform01(rng) < mismatch_rate;
    bool done = false;
    std::string last_error;
    for (int attempt = 0; attempt < 20 && !done; ++attempt) {
      try {
        BenchmarkEpisode ep;
        ep.id = episode_id(static_cast<std::size_t>(i));
        ep.spec = detail::random_spec(type, mismatch, rng);
        TaskSpec truth = ep.spec;
        std::set<std::string> forbidden;
        if (mismatch) {
          const std::string instructed = ep.spec.objects[detail::mismatch_role(ep.spec)];
          const auto& cluster = detail::synonym_clusters()[static_cast<std::size_t>(detail::cluster_of(instructed))];
          std::vector<std::string> mates;
          // The stand-in must clear the pixel threshold from anywhere in the room.
          for (const auto& c : cluster)
            if (c != instructed && reg.at(c).base_size >= 3) mates.push_back(c);
          const std::string placed = detail::pick(rng, mates);
          truth.objects[detail::mismatch_role(truth)] = placed;
          for (const auto& c : cluster)
            if (c != placed) forbidden.insert(c);
          ep.mismatch_injected = true;
          ep.substitution = Substitution{instructed, placed};
        }
        ep.golden_plan = plan_binaries(truth, reg);
        ep.goal = derive_goal(truth, reg);
        if (!validate(ep.golden_plan, ep.goal, reg, container_hints(truth)).empty())
          throw Error(ErrorCode::GenerationFailure, "golden plan does not validate");
        ep.scene = detail::build_scene(truth, ep.golden_plan, forbidden, rng, reg);
        if (!check_scene(ep.scene, reg).empty()) throw Error(ErrorCode::GenerationFailure, "scene invalid");
        ep.instruction = render_instruction(ep.spec);
        const EpisodeTrace oracle = run_oracle(ep, reg, sim);
        if (!oracle.success || oracle.path_length <= 0)
          throw Error(ErrorCode::GenerationFailure, "oracle failed: " + std::string(to_string(oracle.reason)));
        ep.expert_length = oracle.path_length;
        out.push_back(std::move(ep));
        done = true;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::GenerationFailure) throw;
        last_error = e.what();
      }
    }
    if (!done) throw Error(ErrorCode::GenerationFailure, "episode " + std::to_string(i) + ": " + last_error);
  }
  return out;
}

// ----------------------------------------------------------------------------
// Running
// ----------------------------------------------------------------------------

/// Runs one benchmark episode under `cfg` with the built-in planner.
inline EpisodeTrace run_benchmark_episode(const BenchmarkEpisode& ep, const EpisodeConfig& cfg,
                                          const ClassRegistry& reg = default_registry(),
                                          const SimilarityProvider& sim = builtin_similarity()) {
  EpisodeTrace t = run_plan(ep.scene, plan_binaries(ep.spec, reg), ep.goal, cfg, false, container_hints(ep.spec), reg, sim);
  t.episode_id = ep.id;
  return t;
}

/// Runs every episode; `jobs` worker threads. Output order follows input.
inline std::vector<EpisodeTrace> run_benchmark(const std::vector<BenchmarkEpisode>& bench, const EpisodeConfig& cfg,
                                               int jobs = 1, const ClassRegistry& reg = default_registry(),
                                               const SimilarityProvider& sim = builtin_similarity()) {
  std::vector<EpisodeTrace> out(bench.size());
  jobs = std::max(1, std::min<int>(jobs, static_cast<int>(bench.size())));
  if (jobs == 1) {
    for (std::size_t i = 0; i < bench.size(); ++i) out[i] = run_benchmark_episode(bench[i], cfg, reg, sim);
    return out;
  }
  std::vector<std::thread> pool;
  for (int w = 0; w < jobs; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t i = static_cast<std::size_t>(w); i < bench.size(); i += static_cast<std::size_t>(jobs))
        out[i] = run_benchmark_episode(bench[i], cfg, reg, sim);
    });
  for (auto& t : pool) t.join();
  return out;
}

// ----------------------------------------------------------------------------
// Metrics
// ----------------------------------------------------------------------------

struct EpisodeRow {
  std::string id;
  bool success = false;
  int conditions_met = 0;
  int conditions_total = 0;
  int path_length = 0;
  int expert_length = 0;
  double weight = 0;
  bool plan_match = false;
  std::string reason;
};

struct MetricsReport {
  int episodes = 0;
  double SR = 0;
  /// Aggregate: total conditions met over total conditions.
  double GC = 0;
  double GC_mean = 0;
  double PLWSR = 0;
  double PLWGC = 0;
  double PLWGC_mean = 0;
  double HLP_ACC = 0;
  std::vector<EpisodeRow> rows;
};

/// Path-length weight L*/max(L, L*).
inline double plw_weight(int expert_length, int agent_length) {
  if (expert_length <= 0) throw Error(ErrorCode::InvalidArgument, "expert length must be positive");
  return static_cast<double>(expert_length) / std::max(expert_length, agent_length);
}

/// Scores traces against their episodes, matched by id.
inline MetricsReport score(const std::vector<EpisodeTrace>& traces, const std::vector<BenchmarkEpisode>& bench) {
  if (traces.empty()) throw Error(ErrorCode::IdMismatch, "no traces to score");
  std::map<std::string, const BenchmarkEpisode*> eps;
  for (const auto& e : bench)
    if (!eps.emplace(e.id, &e).second) throw Error(ErrorCode::IdMismatch, "duplicate episode id " + e.id, e.id);
  std::map<std::string, const EpisodeTrace*> ts;
  for (const auto& t : traces) {
    if (!eps.count(t.episode_id)) throw Error(ErrorCode::IdMismatch, "trace for unknown episode " + t.episode_id, t.episode_id);
    if (!ts.emplace(t.episode_id, &t).second)
      throw Error(ErrorCode::IdMismatch, "duplicate trace for " + t.episode_id, t.episode_id);
  }
  if (ts.size() != eps.size()) throw Error(ErrorCode::IdMismatch, "benchmark has episodes without traces");

  MetricsReport r;
  long met = 0, total = 0;
  double succ = 0, plwsr = 0, plwgc = 0, gc_mean = 0, plwgc_mean = 0, hlp = 0;
  for (const auto& [id, t] : ts) {
    const BenchmarkEpisode& e = *eps.at(id);
    EpisodeRow row;
    row.id = id;
    row.success = t->success;
    row.conditions_met = t->conditions_met;
    row.conditions_total = t->conditions_total;
    row.path_length = t->path_length;
    row.expert_length = e.expert_length;
    row.weight = plw_weight(e.expert_length, t->path_length);
    row.plan_match = same_steps(t->executed_plan(), e.golden_plan);
    row.reason = std::string(to_string(t->reason));
    const double ratio = row.conditions_total ? static_cast<double>(row.conditions_met) / row.conditions_total : 0.0;
    met += row.conditions_met;
    total += row.conditions_total;
    succ += row.success;
    plwsr += row.success * row.weight;
    plwgc += row.conditions_met * row.weight;
    gc_mean += ratio;
    plwgc_mean += ratio * row.weight;
    hlp += row.plan_match;
    r.rows.push_back(std::move(row));
  }
  const double n = static_cast<double>(r.rows.size());
  r.episodes = static_cast<int>(r.rows.size());
  r.SR = succ / n;
  r.GC = total ? static_cast<double>(met) / static_cast<double>(total) : 0.0;
  r.GC_mean = gc_mean / n;
  r.PLWSR = plwsr / n;
  r.PLWGC = total ? plwgc / static_cast<double>(total) : 0.0;
  r.PLWGC_mean = plwgc_mean / n;
  r.HLP_ACC = hlp / n;
  return r;
}

struct NamedConfig {
  std::string name;
  EpisodeConfig cfg;
};

struct AblationRow {
  std::string name;
  MetricsReport report;
};

/// Runs the benchmark under each configuration.
inline std::vector<AblationRow> ablate(const std::vector<BenchmarkEpisode>& bench, const std::vector<NamedConfig>& grid,
                                       int jobs = 1, const ClassRegistry& reg = default_registry(),
                                       const SimilarityProvider& sim = builtin_similarity()) {
  if (grid.empty()) throw Error(ErrorCode::InvalidArgument, "config grid is empty");
  std::vector<AblationRow> out;
  for (const auto& g : grid) out.push_back({g.name, score(run_benchmark(bench, g.cfg, jobs, reg, sim), bench)});
  return out;
}

// ----------------------------------------------------------------------------
// Serialisation
// ----------------------------------------------------------------------------

inline Json binaries_to_json(const std::vector<SubgoalBinary>& plan) {
  Json a = Json::array();
  for (const auto& b : plan) {
    Json s = Json::array({std::string(to_string(b.verb)), b.arg});
    if (b.another) s.push_back("another");
    a.push_back(std::move(s));
  }
  return a;
}

inline std::vector<SubgoalBinary> binaries_from_json(const Json& j) {
  std::vector<SubgoalBinary> out;
  for (const auto& s : j) {
    if (!s.is_array() || s.size() < 2) throw Error(ErrorCode::ParseError, "subgoal must be [verb, arg]");
    out.push_back({subgoal_verb_from_string(s[0].get<std::string>()), s[1].get<std::string>(), s.size() > 2});
  }
  return out;
}

inline Json spec_to_json(const TaskSpec& s) {
  Json j;
  j["type"] = std::string(to_string(s.type));
  j["objects"] = s.objects;
  if (s.count != 1) j["count"] = s.count;
  if (s.source) j["source"] = *s.source;
  if (s.slice) j["slice"] = true;
  if (s.knife_dest) j["knife_dest"] = *s.knife_dest;
  if (s.heat_appliance != "Microwave") j["heat_appliance"] = s.heat_appliance;
  return j;
}

inline TaskSpec spec_from_json(const Json& j) {
  TaskSpec s;
  s.type = task_type_from_string(j.at("type").get<std::string>());
  s.objects = j.at("objects").get<std::vector<std::string>>();
  s.count = j.value("count", 1);
  if (j.contains("source")) s.source = j.at("source").get<std::string>();
  s.slice = j.value("slice", false);
  if (j.contains("knife_dest")) s.knife_dest = j.at("knife_dest").get<std::string>();
  s.heat_appliance = j.value("heat_appliance", std::string("Microwave"));
  return s;
}

inline Json episode_to_json(const BenchmarkEpisode& e) {
  Json j;
  j["id"] = e.id;
  j["instruction"] = e.instruction;
  j["spec"] = spec_to_json(e.spec);
  j["goal"] = goal_to_json(e.goal);
  j["golden_plan"] = binaries_to_json(e.golden_plan);
  j["expert_length"] = e.expert_length;
  j["mismatch_injected"] = e.mismatch_injected;
  if (e.substitution) j["substitution"] = {{"instructed", e.substitution->instructed}, {"placed", e.substitution->placed}};
  j["scene"] = scene_to_json(e.scene);
  return j;
}

inline BenchmarkEpisode episode_from_json(const Json& j, const ClassRegistry& reg = default_registry()) {
  BenchmarkEpisode e;
  e.id = j.at("id").get<std::string>();
  e.instruction = j.value("instruction", std::string());
  e.spec = spec_from_json(j.at("spec"));
  e.goal = goal_from_json(j.at("goal"));
  e.golden_plan = binaries_from_json(j.at("golden_plan"));
  e.expert_length = j.at("expert_length").get<int>();
  if (e.expert_length <= 0) throw Error(ErrorCode::ParseError, "expert_length must be positive");
  e.mismatch_injected = j.value("mismatch_injected", false);
  if (j.contains("substitution"))
    e.substitution = Substitution{j["substitution"].at("instructed").get<std::string>(),
                                  j["substitution"].at("placed").get<std::string>()};
  e.scene = scene_from_json(j.at("scene"), reg);
  return e;
}

inline std::string benchmark_to_jsonl(const std::vector<BenchmarkEpisode>& bench) {
  std::string out;
  for (const auto& e : bench) out += episode_to_json(e).dump() + "\n";
  return out;
}

/// Parses benchmark JSONL; errors carry the 1-based line.
inline std::vector<BenchmarkEpisode> benchmark_from_jsonl(const std::string& text,
                                                          const ClassRegistry& reg = default_registry()) {
  std::vector<BenchmarkEpisode> out;
  std::istringstream in(text);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(episode_from_json(Json::parse(line), reg));
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(n) + ": " + e.what(), {}, n);
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(n) + ": " + e.what(), e.token(), n);
    }
  }
  return out;
}

inline std::vector<BenchmarkEpisode> load_benchmark(const std::string& path, const ClassRegistry& reg = default_registry()) {
  return benchmark_from_jsonl(read_text_file(path), reg);
}

inline Json report_to_json(const MetricsReport& r) {
  Json j;
  j["episodes"] = r.episodes;
  j["SR"] = r.SR;
  j["GC"] = r.GC;
  j["GC_mean"] = r.GC_mean;
  j["PLWSR"] = r.PLWSR;
  j["PLWGC"] = r.PLWGC;
  j["PLWGC_mean"] = r.PLWGC_mean;
  j["HLP_ACC"] = r.HLP_ACC;
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    Json x;
    x["id"] = row.id;
    x["success"] = row.success;
    x["conditions_met"] = row.conditions_met;
    x["conditions_total"] = row.conditions_total;
    x["path_length"] = row.path_length;
    x["expert_length"] = row.expert_length;
    x["weight"] = row.weight;
    x["plan_match"] = row.plan_match;
    x["reason"] = row.reason;
    rows.push_back(std::move(x));
  }
  j["rows"] = std::move(rows);
  return j;
}

inline std::string format_ratio(double v) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(4) << v;
  return s.str();
}

inline std::string report_to_csv(const MetricsReport& r) {
  std::string out = "id,success,conditions_met,conditions_total,path_length,expert_length,weight,plan_match,reason\n";
  for (const auto& row : r.rows)
    out += row.id + "," + (row.success ? "1" : "0") + "," + std::to_string(row.conditions_met) + "," +
           std::to_string(row.conditions_total) + "," + std::to_string(row.path_length) + "," +
           std::to_string(row.expert_length) + "," + format_ratio(row.weight) + "," + (row.plan_match ? "1" : "0") +
           "," + row.reason + "\n";
  return out;
}

/// One line per configuration; deltas are against the first row.
inline std::string ablation_to_csv(const std::vector<AblationRow>& rows) {
  std::string out = "config,SR,GC,PLWSR,PLWGC,HLP_ACC,dSR,dGC,dPLWSR,dPLWGC\n";
  if (rows.empty()) return out;
  const MetricsReport& base = rows.front().report;
  for (const auto& r : rows) {
    const MetricsReport& m = r.report;
    out += r.name + "," + format_ratio(m.SR) + "," + format_ratio(m.GC) + "," + format_ratio(m.PLWSR) + "," +
           format_ratio(m.PLWGC) + "," + format_ratio(m.HLP_ACC) + "," + format_ratio(m.SR - base.SR) + "," +
           format_ratio(m.GC - base.GC) + "," + format_ratio(m.PLWSR - base.PLWSR) + "," +
           format_ratio(m.PLWGC - base.PLWGC) + "\n";
  }
  return out;
}

inline std::string traces_to_jsonl(const std::vector<EpisodeTrace>& traces) {
  std::ostringstream out;
  for (const auto& t : traces) write_trace_jsonl(out, t, t.episode_id);
  return out.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::Io, "cannot write " + path, path);
  f << text;
  if (!f) throw Error(ErrorCode::Io, "write failed for " + path, path);
}

}  // namespace homeworld
