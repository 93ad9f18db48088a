#include <gtest/gtest.h>

#include <sstream>

#include "support.hpp"

using namespace homeworld;
using namespace hwtest;

namespace {

EpisodeTrace solve(const std::string& scene, const std::string& text, EpisodeConfig cfg = {}, PlannerFn ext = {}) {
  return run_episode(load_scene(fixture(scene)), Instruction{text, std::nullopt}, cfg, ext);
}

}  // namespace

TEST(EndToEnd, FixtureCapabilityCases) {
  for (const auto& c : end_to_end_cases()) {
    const auto t = solve(c.scene, c.instruction);
    EXPECT_TRUE(t.success) << c.name << ": " << to_string(t.reason);
    EXPECT_EQ(t.conditions_met, t.conditions_total) << c.name;
    EXPECT_EQ(t.path_length, static_cast<int>(t.actions.size()));
  }
}

TEST(EndToEnd, SliceTomatoKitchen) {
  const auto t = solve("tomato_kitchen.json",
                       "Slice a tomato, put the knife in the sink, and put the sliced tomato in the fridge");
  EXPECT_TRUE(t.success) << to_string(t.reason);
  EXPECT_EQ(t.plan.size(), 12u);
}

TEST(EndToEnd, StoveIsUsedWhenPrefixed) {
  const auto t = solve("stove_kitchen.json", "There is a stove and no microwave. Heat an apple and put it on the dining table");
  ASSERT_TRUE(t.success);
  EXPECT_TRUE(std::any_of(t.plan.begin(), t.plan.end(), [](auto& b) { return b.arg == "StoveBurner"; }));
  EXPECT_TRUE(std::none_of(t.plan.begin(), t.plan.end(), [](auto& b) { return b.arg == "Microwave"; }));
}

TEST(EndToEnd, ReplanSubstitutesAbsentSynonym) {
  const std::string text = "put a book on the side table";
  const auto on = solve("desk_room.json", text);
  ASSERT_TRUE(on.success) << to_string(on.reason);
  bool substituted = false;
  for (const auto& o : on.subgoal_outcomes)
    if (o.replan && o.replan->chosen) {
      EXPECT_EQ(o.replan->original, "SideTable");
      EXPECT_EQ(*o.replan->chosen, "Desk");
      substituted = true;
    }
  EXPECT_TRUE(substituted);
  EXPECT_EQ(on.executed_plan().back(), (SubgoalBinary{SubgoalVerb::Put, "Desk", false}));

  EpisodeConfig off;
  off.replan_enabled = false;
  const auto t = solve("desk_room.json", text, off);
  EXPECT_FALSE(t.success);
  EXPECT_EQ(t.reason, FailureReason::ExploreExhausted);
}

TEST(Executive, StepBudgetOfOne) {
  EpisodeConfig cfg;
  cfg.max_steps = 1;
  const auto t = solve("four_books.json", "put four books on the desk", cfg);
  EXPECT_FALSE(t.success);
  EXPECT_EQ(t.reason, FailureReason::StepBudget);
  EXPECT_EQ(t.path_length, 1);
  cfg.max_steps = 0;
  EXPECT_THROW(solve("four_books.json", "put four books on the desk", cfg), Error);
}

TEST(Executive, DeterministicAcrossRuns) {
  EpisodeConfig cfg;
  cfg.noise = {0.2, 0.1, 4};
  cfg.seed = 4;
  const auto a = solve("tomato_kitchen.json", "put a tomato in the fridge", cfg);
  const auto b = solve("tomato_kitchen.json", "put a tomato in the fridge", cfg);
  std::ostringstream x, y;
  write_trace_jsonl(x, a, "e");
  write_trace_jsonl(y, b, "e");
  EXPECT_EQ(x.str(), y.str());
}

TEST(Executive, OracleMapIsNoLongerThanExploring) {
  const Scene s = load_scene(fixture("four_books.json"));
  const auto spec = parse_instruction("put four books on the desk").spec;
  EpisodeConfig oracle;
  oracle.oracle_map = true;
  const auto a = run_episode(s, spec, oracle);
  const auto b = run_episode(s, spec, EpisodeConfig{});
  ASSERT_TRUE(a.success);
  ASSERT_TRUE(b.success);
  EXPECT_LE(a.path_length, b.path_length);
}

TEST(Executive, ExternalPlannerForUnknownInstruction) {
  auto planner = [](const Instruction&) {
    return std::vector<std::string>{"find a book", "pick up the book", "find a desk", "put the book on the desk"};
  };
  const auto t = solve("four_books.json", "tidy up a little", {}, planner);
  EXPECT_TRUE(t.success);
  EXPECT_EQ(t.plan.size(), 4u);
  EXPECT_THROW(solve("four_books.json", "tidy up a little"), Error);
}

TEST(Executive, ExternalPlansAreScreened) {
  auto bad = [](const Instruction&) { return std::vector<std::string>{"pick up the book", "put the book on the desk"}; };
  const auto t = solve("four_books.json", "tidy up", {}, bad);
  EXPECT_EQ(t.reason, FailureReason::InvalidPlan);
  EXPECT_EQ(t.path_length, 0);
  ASSERT_FALSE(t.plan_findings.empty());
  EXPECT_EQ(t.plan_findings[0].code, FindingCode::MissingFind);

  auto gibberish = [](const Instruction&) { return std::vector<std::string>{"find a book", "gather material"}; };
  const auto u = solve("four_books.json", "tidy up", {}, gibberish);
  EXPECT_EQ(u.reason, FailureReason::InvalidPlan);
  ASSERT_EQ(u.plan_findings.size(), 1u);
  EXPECT_EQ(u.plan_findings[0].index, 1);
  EXPECT_EQ(u.plan_findings[0].code, FindingCode::UnknownSymbol);
}

TEST(Trace, JsonlHasStepSubgoalAndEpisodeRecords) {
  const auto t = solve("four_books.json", "put a book on the desk");
  std::ostringstream out;
  write_trace_jsonl(out, t, "ep");
  std::istringstream in(out.str());
  std::string line;
  std::map<std::string, int> kinds;
  std::string last;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    kinds[j.at("type").get<std::string>()]++;
    last = j.at("type");
  }
  EXPECT_EQ(kinds["step"], t.path_length);
  EXPECT_EQ(kinds["subgoal"], static_cast<int>(t.subgoal_outcomes.size()));
  EXPECT_EQ(kinds["episode"], 1);
  EXPECT_EQ(last, "episode");
}

TEST(GroundTruthMap, MarksObjectsAndExplored) {
  const Scene s = load_scene(fixture("tomato_kitchen.json"));
  const auto m = ground_truth_map(s, {"Fridge", "Tomato"});
  EXPECT_TRUE(m.plane_of("Fridge")->get(s.find("Fridge_1")->cell));
  EXPECT_TRUE(m.plane_of("Tomato")->get(s.find("Tomato_1")->cell));
  EXPECT_EQ(m.explored().count(), s.grid_w * s.grid_h);
}

TEST(Executive, SubstituteEntersGoalOnlyWhenAsked) {
  const Scene s = load_scene(fixture("desk_room.json"));
  const auto spec = parse_instruction("put a book on the side table").spec;
  const auto kept = run_episode(s, spec, EpisodeConfig{});
  EXPECT_FALSE(kept.success);
  EXPECT_EQ(kept.executed_plan().back().arg, "Desk");
  EpisodeConfig follow;
  follow.goal_follows_substitution = true;
  EXPECT_TRUE(run_episode(s, spec, follow).success);
}
