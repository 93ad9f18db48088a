#include <gtest/gtest.h>

#include "support.hpp"

using namespace homeworld;

TEST(Instruction, SliceTomatoKnifeInSink) {
  const auto p = parse_instruction("Slice a tomato, put the knife in the sink, and put the sliced tomato in the fridge");
  EXPECT_EQ(p.spec.type, TaskType::PickAndPlace);
  EXPECT_TRUE(p.spec.slice);
  EXPECT_EQ(p.spec.objects, (std::vector<std::string>{"Tomato", "Fridge"}));
  EXPECT_EQ(p.spec.knife_dest, std::optional<std::string>("SinkBasin"));
  const auto phrases = plan_template(p.spec);
  ASSERT_EQ(phrases.size(), 12u);
  EXPECT_EQ(phrases.front().text, "find a knife");
  EXPECT_EQ(phrases[5].text, "put the knife in the sink basin");
  EXPECT_EQ(phrases.back().text, "close the fridge");
  EXPECT_EQ(phrases.back().index, 12);
}

TEST(Instruction, TowelFromCabinet) {
  const auto p = parse_instruction("Put a towel from the cabinet on the towel holder");
  EXPECT_EQ(p.spec.objects, (std::vector<std::string>{"Towel", "TowelHolder"}));
  EXPECT_EQ(p.spec.source, std::optional<std::string>("Cabinet"));
  const auto plan = plan_binaries(p.spec);
  EXPECT_EQ(plan[1], (SubgoalBinary{SubgoalVerb::Open, "Cabinet", false}));
}

TEST(Instruction, FourBooks) {
  const auto p = parse_instruction("put four books on the desk");
  EXPECT_EQ(p.spec.type, TaskType::PickAndPlace);
  EXPECT_EQ(p.spec.count, 4);
  const auto plan = plan_binaries(p.spec);
  EXPECT_EQ(std::count_if(plan.begin(), plan.end(), [](auto& b) { return b.verb == SubgoalVerb::Put; }), 4);
  EXPECT_EQ(std::count_if(plan.begin(), plan.end(), [](auto& b) { return b.another; }), 3);
}

TEST(Instruction, PrefixSwapsAppliance) {
  const auto p = parse_instruction("There is a stove and no microwave. How to heat an apple and put it on the dining table?");
  EXPECT_EQ(p.prefix.present, (std::set<std::string>{"StoveBurner"}));
  EXPECT_EQ(p.prefix.absent, (std::set<std::string>{"Microwave"}));
  const auto spec = adapt_spec(p.spec, p.prefix);
  EXPECT_EQ(spec.heat_appliance, "StoveBurner");
  const auto phrases = plan_template(spec);
  EXPECT_TRUE(std::any_of(phrases.begin(), phrases.end(), [](auto& ph) { return ph.text == "turn on the stove burner"; }));
}

TEST(Instruction, SideTableKeepsItsName) {
  const auto p = parse_instruction("put a book on the side table");
  EXPECT_EQ(p.spec.objects.back(), "SideTable");
}

TEST(Instruction, UnplannableAndUnknown) {
  try {
    parse_instruction("gather material");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnplannableInstruction);
  }
  EXPECT_THROW(parse_instruction(""), Error);
  EXPECT_THROW(parse_instruction("put a unicorn on the desk"), Error);
}

// Rendering any generated spec (with or without prefix) parses back to it.
TEST(InstructionProperty, RenderParseRoundTrip) {
  Rng rng(12);
  for (int i = 0; i < 600; ++i) {
    const TaskSpec s = detail::random_spec(kTaskTypes[i % 12], i % 2 == 0, rng);
    const std::string text = render_instruction(s);
    ParsedInstruction p;
    ASSERT_NO_THROW(p = parse_instruction(text)) << text;
    EXPECT_EQ(p.spec, s) << text;
    EXPECT_TRUE(p.prefix.empty());
  }
}

TEST(InstructionProperty, PrefixRoundTrip) {
  TaskSpec s;
  s.type = TaskType::HeatAndPlace;
  s.objects = {"Potato", "CounterTop"};
  const PrefixAssertions pre{{"StoveBurner"}, {"Microwave"}};
  const auto p = parse_instruction(render_instruction(s, pre));
  EXPECT_EQ(p.prefix, pre);
  EXPECT_EQ(p.spec, s);
}
