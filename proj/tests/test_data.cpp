#include <gtest/gtest.h>

#include "support.hpp"

using namespace homeworld;

TEST(BundledData, MatchesDataDirectory) {
  EXPECT_EQ(std::string(bundled::kLexiconJson), read_text_file(hwtest::source_path("data/lexicon_v1.json")))
      << "run tools/embed_data.py";
  EXPECT_EQ(std::string(bundled::kClassVectorsCsv), read_text_file(hwtest::source_path("data/class_vectors_v1.csv")))
      << "run tools/embed_data.py";
}

TEST(BundledData, LexiconParsesAndVersionMatches) {
  const Lexicon& lx = default_lexicon();
  EXPECT_EQ(lx.version, bundled::kLexiconVersion);
  EXPECT_FALSE(lx.verbs.empty());
  for (std::size_t i = 1; i < lx.verbs.size(); ++i) EXPECT_GE(lx.verbs[i - 1].first.size(), lx.verbs[i].first.size());
  for (const auto& [phrase, verb] : lx.verbs) EXPECT_NO_THROW(subgoal_verb_from_string(verb)) << phrase;
  for (const auto& [word, cls] : lx.synonyms) EXPECT_TRUE(default_registry().contains(cls)) << word;
  EXPECT_EQ(lx.numbers.at("four"), 4);
}

TEST(BundledData, VectorsCoverRegistryWithOneWidth) {
  const auto v = parse_class_vectors(bundled::kClassVectorsCsv);
  std::size_t width = 0;
  for (const auto& name : default_registry().names()) {
    ASSERT_TRUE(v.count(name)) << name;
    if (!width) width = v.at(name).size();
    EXPECT_EQ(v.at(name).size(), width);
  }
}

TEST(BundledData, LexiconErrors) {
  EXPECT_THROW(parse_lexicon("{"), Error);
  EXPECT_THROW(parse_lexicon(R"({"version": "x"})"), Error);
}

TEST(Registry, Invariants) {
  const auto& reg = default_registry();
  EXPECT_EQ(reg.size(), 90u);
  for (const auto& c : reg.classes()) {
    EXPECT_GE(c.base_size, 1) << c.name;
    if (c.sliceable) EXPECT_TRUE(reg.contains(sliced_name(c.name))) << c.name;
    EXPECT_EQ(c.large(), !c.pickupable);
  }
  ClassRegistry r;
  EXPECT_THROW(r.add({"", true, false, false, false, false, 1}), Error);
  r.add({"A", true, false, false, false, false, 1});
  EXPECT_THROW(r.add({"A", true, false, false, false, false, 1}), Error);
  EXPECT_THROW(reg.at("Unicorn"), Error);
}

TEST(Registry, NounsResolveBack) {
  for (const auto& name : default_registry().names()) {
    EXPECT_EQ(resolve_noun(noun_of(name)), name);
    EXPECT_EQ(resolve_noun(plural_of(noun_of(name))), name) << plural_of(noun_of(name));
  }
}
