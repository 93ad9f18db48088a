#include <gtest/gtest.h>

#include "support.hpp"

using namespace homeworld;

namespace {

TaskSpec make(TaskType t, std::vector<std::string> objs) {
  TaskSpec s;
  s.type = t;
  s.objects = std::move(objs);
  return s;
}

}  // namespace

TEST(Render, MatchRoundTripsEveryVerbAndClass) {
  int checked = 0;
  for (SubgoalVerb v : kSubgoalVerbs)
    for (const auto& cls : default_registry().names())
      for (bool another : {false, true}) {
        if (another && v != SubgoalVerb::Find) continue;
        const SubgoalBinary b{v, cls, another};
        for (const std::optional<std::string>& held : {std::optional<std::string>{}, std::optional<std::string>("Mug")}) {
          const std::string text = render(b, held);
          SubgoalBinary back;
          ASSERT_NO_THROW(back = match(text)) << text;
          EXPECT_EQ(back, b) << text;
          ++checked;
        }
      }
  EXPECT_GT(checked, 8 * 90);
}

TEST(Match, AcceptsParaphrases) {
  EXPECT_EQ(match("Go to the dining table"), (SubgoalBinary{SubgoalVerb::Find, "DiningTable", false}));
  EXPECT_EQ(match("toggle the faucet on"), (SubgoalBinary{SubgoalVerb::ToggleOn, "Faucet", false}));
  EXPECT_EQ(match("put the sliced tomato in the fridge"), (SubgoalBinary{SubgoalVerb::Put, "Fridge", false}));
}

TEST(Match, ErrorsCarryTheToken) {
  try {
    match("gather material");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownVerb);
    EXPECT_EQ(e.token(), "gather");
  }
  try {
    match("pick up the unicorn");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownObject);
    EXPECT_EQ(e.token(), "unicorn");
  }
  EXPECT_THROW(match(""), Error);
}

TEST(Templates, StepCounts) {
  EXPECT_EQ(plan_binaries(make(TaskType::PickAndPlace, {"Pencil", "Desk"})).size(), 4u);
  EXPECT_EQ(plan_binaries(make(TaskType::PickAndPlace, {"Apple", "Fridge"})).size(), 6u);
  auto four = make(TaskType::PickAndPlace, {"Book", "Desk"});
  four.count = 4;
  EXPECT_EQ(plan_binaries(four).size(), 16u);
  EXPECT_EQ(plan_binaries(make(TaskType::ExamineInLight, {"Book", "FloorLamp"})).size(), 4u);
  EXPECT_EQ(plan_binaries(make(TaskType::StackAndPlace, {"Pencil", "Mug", "Desk"})).size(), 7u);
  EXPECT_EQ(plan_binaries(make(TaskType::CleanAndPlace, {"Mug", "CounterTop"})).size(), 9u);
  EXPECT_EQ(plan_binaries(make(TaskType::HeatAndPlace, {"Apple", "DiningTable"})).size(), 13u);
  auto stove = make(TaskType::HeatAndPlace, {"Apple", "DiningTable"});
  stove.heat_appliance = "StoveBurner";
  EXPECT_EQ(plan_binaries(stove).size(), 9u);
  EXPECT_EQ(plan_binaries(make(TaskType::PickThreeAndPlace, {"CD", "Safe"})).size(), 18u);
}

TEST(Templates, SourceContainerIsOpenedAndClosed) {
  auto s = make(TaskType::PickAndPlace, {"Towel", "TowelHolder"});
  s.source = "Cabinet";
  const auto p = plan_binaries(s);
  ASSERT_EQ(p.size(), 7u);
  EXPECT_EQ(p[0], (SubgoalBinary{SubgoalVerb::Find, "Cabinet", false}));
  EXPECT_EQ(p[1], (SubgoalBinary{SubgoalVerb::Open, "Cabinet", false}));
  EXPECT_EQ(p[4], (SubgoalBinary{SubgoalVerb::Close, "Cabinet", false}));
  EXPECT_EQ(container_hints(s).at("Towel"), "Cabinet");
}

TEST(Templates, SpecErrors) {
  auto code = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Io;
  };
  EXPECT_EQ(code([] { plan_binaries(make(TaskType::StackAndPlace, {"Pencil", "Desk"})); }), ErrorCode::ArityMismatch);
  EXPECT_EQ(code([] { plan_binaries(make(TaskType::PickAndPlace, {"Desk", "Bed"})); }), ErrorCode::ArityMismatch);
  EXPECT_EQ(code([] { plan_binaries(make(TaskType::ExamineInLight, {"Book", "Desk"})); }), ErrorCode::ArityMismatch);
  EXPECT_EQ(code([] {
              auto s = make(TaskType::PickAndPlace, {"Apple", "Desk"});
              s.slice = true;
              s.source = "Fridge";
              plan_binaries(s);
            }),
            ErrorCode::UnsupportedTemplate);
  EXPECT_EQ(code([] { plan_binaries(make(TaskType::PickAndPlace, {"Unicorn", "Desk"})); }), ErrorCode::UnknownClass);
}

TEST(Goals, DerivedAtoms) {
  const auto g = derive_goal(hwtest::canonical_specs()[0]);
  ASSERT_EQ(g.conditions.size(), 3u);
  EXPECT_EQ(g.conditions[0], (GoalAtom{GoalPredicate::Sliced, "Apple", "", 1}));
  EXPECT_EQ(g.conditions[1], (GoalAtom{GoalPredicate::Placed, "Knife", "SinkBasin", 1}));
  EXPECT_EQ(g.conditions[2], (GoalAtom{GoalPredicate::Placed, "SlicedApple", "Fridge", 1}));
}

TEST(Prefix, StoveReplacesMicrowave) {
  auto s = make(TaskType::HeatAndPlace, {"Apple", "DiningTable"});
  const auto a = adapt_spec(s, {{"StoveBurner"}, {"Microwave"}});
  EXPECT_EQ(a.heat_appliance, "StoveBurner");
  const auto p = plan_binaries(a);
  EXPECT_TRUE(std::none_of(p.begin(), p.end(), [](auto& b) { return b.arg == "Microwave"; }));
  EXPECT_EQ(adapt_spec(s, {}).heat_appliance, "Microwave");
  try {
    adapt_spec(make(TaskType::CoolAndPlace, {"Apple", "CounterTop"}), {{}, {"Fridge"}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoFeasibleAppliance);
  }
}

TEST(Prefix, LampSlot) {
  auto s = make(TaskType::ExamineInLight, {"Book", "FloorLamp"});
  EXPECT_EQ(adapt_spec(s, {{"DeskLamp"}, {}}).objects[1], "DeskLamp");
  EXPECT_EQ(adapt_spec(s, {{}, {"FloorLamp"}}).objects[1], "DeskLamp");
}

// Every generated spec yields a plan the validator accepts.
TEST(TemplateProperty, GeneratedPlansValidate) {
  Rng rng(8);
  for (int i = 0; i < 600; ++i) {
    const TaskType t = kTaskTypes[i % 12];
    const TaskSpec s = detail::random_spec(t, i % 3 == 0, rng);
    const auto plan = plan_binaries(s);
    const auto f = hwtest::validate_spec_plan(s, plan);
    ASSERT_TRUE(f.empty()) << to_string(t) << ": " << to_string(f.front().code) << " " << f.front().detail;
    ASSERT_EQ(match_plan(render_plan(plan)), plan);
  }
}
