#include <gtest/gtest.h>

#include "support.hpp"

using namespace homeworld;

TEST(Cosine, BasicValues) {
  EXPECT_DOUBLE_EQ(cosine({1, 0}, {1, 0}), 1.0);
  EXPECT_DOUBLE_EQ(cosine({1, 0}, {0, 2}), 0.0);
  EXPECT_DOUBLE_EQ(cosine({1, 1}, {-1, -1}), -1.0);
  EXPECT_DOUBLE_EQ(cosine({0, 0}, {1, 1}), 0.0);
  EXPECT_THROW(cosine({1}, {1, 2}), Error);
}

TEST(ClassVectors, ParseErrorsCarryLine) {
  EXPECT_EQ(parse_class_vectors("class,a,b\nMug,1,0\nCup,0.5,0.5\n").size(), 2u);
  try {
    parse_class_vectors("Mug,1,0\nCup,1\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
    EXPECT_EQ(e.line(), 2);
  }
  EXPECT_THROW(parse_class_vectors("Mug,1,x\n"), Error);
}

TEST(Builtin, CoversRegistryAndIsSymmetric) {
  const auto& sim = builtin_similarity();
  const auto names = default_registry().names();
  for (const auto& n : names) ASSERT_TRUE(sim.knows(n)) << n;
  Rng rng(5);
  for (int i = 0; i < 500; ++i) {
    const auto& a = names[uniform_index(rng, names.size())];
    const auto& b = names[uniform_index(rng, names.size())];
    const double s = sim.score(a, b);
    EXPECT_EQ(s, sim.score(b, a));
    EXPECT_GE(s, 0.0);
    EXPECT_LE(s, 1.0);
  }
  EXPECT_EQ(sim.score("Mug", "Mug"), 1.0);
  EXPECT_THROW(sim.score("Mug", "Unicorn"), Error);
}

TEST(Builtin, SynonymClustersClearTheThresholdAndOthersDoNot) {
  const auto& sim = builtin_similarity();
  const auto& clusters = detail::synonym_clusters();
  for (std::size_t i = 0; i < clusters.size(); ++i)
    for (std::size_t j = 0; j < clusters.size(); ++j)
      for (const auto& a : clusters[i])
        for (const auto& b : clusters[j]) {
          if (a == b) continue;
          if (i == j) EXPECT_GT(sim.score(a, b), kReplanThreshold) << a << " " << b;
          else EXPECT_LE(sim.score(a, b), kReplanThreshold) << a << " " << b;
        }
}

TEST(Provider, OverridesAreSymmetricAndChecked) {
  SimilarityProvider p = SimilarityProvider::from_vectors({{"A", {1, 0}}, {"B", {0, 1}}});
  EXPECT_EQ(p.score("A", "B"), 0.0);
  p.set_override("B", "A", 0.9);
  EXPECT_EQ(p.score("A", "B"), 0.9);
  EXPECT_THROW(p.set_override("A", "B", 1.5), Error);
}

TEST(Provider, ExternalFetchesOnceAndCaches) {
  int calls = 0;
  std::size_t terms_seen = 0;
  auto p = SimilarityProvider::external([&](const std::vector<std::string>& terms) {
    ++calls;
    terms_seen += terms.size();
    std::vector<Vector> out;
    for (const auto& t : terms) out.push_back({static_cast<double>(t.size()), 1.0});
    return out;
  });
  const auto scores = similarity("Mug", {"Cup", "Desk", "Mug"}, p);
  EXPECT_EQ(calls, 1);
  EXPECT_EQ(terms_seen, 3u);
  EXPECT_EQ(scores.at("Mug"), 1.0);
  similarity("Cup", {"Mug"}, p);
  EXPECT_EQ(calls, 1);
}

TEST(Provider, ExternalCountMismatchIsServiceError) {
  auto p = SimilarityProvider::external([](const std::vector<std::string>&) { return std::vector<Vector>{}; });
  try {
    p.warm({"Mug"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ServiceError);
  }
}

TEST(Similarity, RejectsEmptyAndUnknown) {
  EXPECT_THROW(similarity("Mug", {}), Error);
  EXPECT_THROW(similarity("Unicorn", {"Mug"}), Error);
}
